//! Parsing, normal forms, recolourings and P/NP-complete classification for
//! monotone monadic SNP (MMSNP) sentences.
//!
//! A sentence is a list of forbidden patterns mixing input relations with
//! existentially quantified colours. The crate rewrites sentences into normal
//! form, compares them via recolourings and decides the complexity of the
//! described problem by searching for a Siggers operation on colours.

pub mod classify;
mod error;
pub mod homsearch;
mod limits;
pub mod model;
pub mod normalform;
pub mod precolour;
pub mod recolour;
pub mod textio;

pub use error::{Diagnostic, Error, Result};
pub use limits::Limits;
pub use model::{
    Atom, Clause, ColourFunction, FinStructure, Literal, RecolouringMap, Sentence, Signature,
    Symbol,
};
