//! Text formats for sentences and structures, and JSON reports.
//!
//! ```text
//! signature { E/2 }
//! colors { M1, M2 }
//! forbid { -M1(x), -M2(x) }
//! forbid { M1(x), M2(x) }
//! forbid { E(x,y), M1(x), M1(y) }
//! ```
//!
//! ```text
//! structure { domain { a, b } E(a,b) colour M1(a) }
//! ```

mod lexer;
mod parse;
pub(crate) mod print;

use std::fmt;

pub use parse::{parse_sentence, parse_structure, parse_structure_in};
pub use print::{print_sentence, print_structure};

/// Byte range and 1-based line/column of its start.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub begin: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
    pub expected: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.column, self.message)?;
        if let Some(e) = &self.expected {
            write!(f, " (expected {e})")?;
        }
        Ok(())
    }
}
