use super::{ParseError, SourceSpan};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum Tok {
    Word,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Slash,
    Minus,
    Equals,
    Eof,
}

#[derive(Clone, Debug)]
pub(super) struct Token<'a> {
    pub kind: Tok,
    pub text: &'a str,
    pub span: SourceSpan,
}

fn is_word(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '.'
}

pub(super) fn lex(src: &str) -> Result<Vec<Token<'_>>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut line_start = 0;
    let mut it = src.char_indices().peekable();
    let span = |b: usize, e: usize, line: usize, ls: usize| SourceSpan {
        begin: b,
        end: e,
        line,
        column: src[ls..b].chars().count() + 1,
    };
    while let Some(&(i, c)) = it.peek() {
        if c == '\n' {
            it.next();
            line += 1;
            line_start = i + 1;
            continue;
        }
        if c.is_whitespace() {
            it.next();
            continue;
        }
        if c == '#' || (c == '/' && src[i..].starts_with("//")) {
            while let Some(&(_, c)) = it.peek() {
                if c == '\n' {
                    break;
                }
                it.next();
            }
            continue;
        }
        let single = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '/' => Some(Tok::Slash),
            '-' => Some(Tok::Minus),
            '=' => Some(Tok::Equals),
            _ => None,
        };
        if let Some(kind) = single {
            it.next();
            out.push(Token { kind, text: &src[i..i + 1], span: span(i, i + 1, line, line_start) });
            continue;
        }
        if c == '!' && src[i..].starts_with("!=") {
            it.next();
            it.next();
            out.push(Token { kind: Tok::Equals, text: &src[i..i + 2], span: span(i, i + 2, line, line_start) });
            continue;
        }
        if is_word(c) {
            let mut end = i;
            while let Some(&(j, c)) = it.peek() {
                if !is_word(c) {
                    break;
                }
                end = j + c.len_utf8();
                it.next();
            }
            out.push(Token { kind: Tok::Word, text: &src[i..end], span: span(i, end, line, line_start) });
            continue;
        }
        let end = i + c.len_utf8();
        return Err(ParseError {
            message: format!("unexpected character {c:?}"),
            span: span(i, end, line, line_start),
            expected: None,
        });
    }
    let n = src.len();
    out.push(Token { kind: Tok::Eof, text: "", span: span(n, n, line, line_start.min(n)) });
    Ok(out)
}
