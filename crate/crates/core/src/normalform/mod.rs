//! Connected decomposition, the normal-form pipeline, validation of the
//! normal-form conditions and coloured obstruction sets.

mod clausehom;
mod decompose;
mod steps;
mod validate;

use std::sync::Arc;

use itertools::Itertools;

pub use decompose::decompose_connected;
pub use steps::{biconnected_split, close_small_clauses, fully_colour, normalize, predicates_to_colours};
pub use validate::validate_normal_form;
pub(crate) use validate::structural_normal_form;

use crate::error::{Error, Result};
use crate::model::{FinStructure, Sentence, Signature};

/// Totally coloured structures that must not map into a coloured structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionSet {
    tau: Signature,
    colours: Arc<Vec<String>>,
    structures: Vec<FinStructure>,
}

impl ObstructionSet {
    pub fn new(tau: Signature, colours: Vec<String>, structures: Vec<FinStructure>) -> Result<Self> {
        let colours = Arc::new(colours);
        let mut out = Vec::with_capacity(structures.len());
        for s in structures {
            if s.signature() != &tau {
                return Err(Error::SignatureMismatch("obstruction over a different signature".into()));
            }
            if s.colours() != colours.as_slice() {
                return Err(Error::ColourMismatch("obstruction over a different colour list".into()));
            }
            if !s.is_totally_coloured() {
                return Err(Error::Precondition("obstructions must be totally coloured".into()));
            }
            out.push(s.with_colour_list(colours.clone()));
        }
        Ok(ObstructionSet { tau, colours, structures: out })
    }

    pub fn tau(&self) -> &Signature {
        &self.tau
    }

    pub fn colours(&self) -> &[String] {
        &self.colours
    }

    pub(crate) fn colours_arc(&self) -> &Arc<Vec<String>> {
        &self.colours
    }

    pub fn structures(&self) -> &[FinStructure] {
        &self.structures
    }

    pub fn len(&self) -> usize {
        self.structures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.structures.is_empty()
    }

    /// Same obstructions ordered by size (stable).
    pub(crate) fn sorted_by_size(&self) -> ObstructionSet {
        let mut s = self.structures.clone();
        s.sort_by_key(FinStructure::len);
        ObstructionSet { tau: self.tau.clone(), colours: self.colours.clone(), structures: s }
    }
}

/// The canonical databases of all clauses other than the cover clause and
/// the pairwise exclusions. Clauses giving some variable two colours are
/// implied by the exclusions and skipped.
pub fn obstruction_set(phi: &Sentence) -> Result<ObstructionSet> {
    phi.check()?;
    if let Some(d) = structural_normal_form(phi, false).into_iter().next() {
        return Err(Error::Precondition(format!("sentence is not in normal form: {d}")));
    }
    let tau = Arc::new(phi.tau().clone());
    let colours = Arc::new(phi.colours().to_vec());
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for c in phi.clauses() {
        if c.is_cover_clause(phi.colours()) || c.is_exclusion_clause() {
            continue;
        }
        let mut colour = vec![None; c.num_vars()];
        let mut double = false;
        for l in c.literals() {
            let ci = phi.colour_index(&l.colour).expect("validated");
            match colour[l.var] {
                Some(x) if x != ci => double = true,
                _ => colour[l.var] = Some(ci),
            }
        }
        if double {
            continue;
        }
        let mut f = FinStructure::shared(tau.clone(), colours.clone());
        for (v, name) in c.vars().iter().enumerate() {
            f.add_element(name.clone());
            f.set_colour(v, colour[v].expect("fully coloured"))?;
        }
        for a in c.atoms() {
            f.add_fact(&a.symbol, a.args.clone())?;
        }
        if seen.insert(f.canonical_key(None)) {
            out.push(f);
        }
    }
    Ok(ObstructionSet { tau: phi.tau().clone(), colours, structures: out })
}

/// Largest number of variables in a clause (at least 1).
pub fn sentence_size(phi: &Sentence) -> usize {
    phi.size()
}

/// Items 1–4 of the normal form plus connectivity, without the exhaustive
/// small-clause check.
pub fn is_normal_form(phi: &Sentence) -> bool {
    phi.validate().is_empty() && structural_normal_form(phi, true).is_empty()
}

/// Whether the two sentences have the same signature and, after some
/// bijective renaming of colours, the same set of clauses up to variable
/// renaming and duplicates.
pub fn same_up_to_colour_renaming(a: &Sentence, b: &Sentence) -> bool {
    if a.tau() != b.tau() || a.colours().len() != b.colours().len() {
        return false;
    }
    let target = b.canonical_clause_set();
    let n = a.colours().len();
    (0..n).permutations(n).any(|perm| {
        let rename = |c: &str| b.colours()[perm[a.colour_index(c).expect("declared")]].clone();
        a.rename_colours(&rename).canonical_clause_set() == target
    })
}
