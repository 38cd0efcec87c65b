use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::model::{Clause, Sentence};

/// Splits a sentence into connected sentences whose disjunction is
/// equivalent to it. A clause whose incidence graph has several components
/// `C1..Ck` is equivalent to the disjunction of the sentences keeping just
/// one `Ci` in its place; this is applied to all clauses at once.
pub fn decompose_connected(phi: &Sentence, limits: &Limits) -> Result<Vec<Sentence>> {
    phi.check()?;
    let mut options: Vec<Vec<Clause>> = Vec::new();
    for c in phi.clauses() {
        let comps = c.components();
        if comps.len() <= 1 {
            options.push(vec![c.clone()]);
        } else {
            options.push(comps.iter().map(|vs| c.restrict(vs)).collect());
        }
    }
    let total = options.iter().try_fold(1usize, |acc, o| acc.checked_mul(o.len()));
    match total {
        Some(t) if t <= limits.max_components => {}
        _ => {
            return Err(Error::Budget { what: "connected decomposition", limit: limits.max_components as u64 });
        }
    }
    let mut out: Vec<Vec<Clause>> = vec![Vec::new()];
    for opts in &options {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for prefix in &out {
            for o in opts {
                let mut p = prefix.clone();
                p.push(o.clone());
                next.push(p);
            }
        }
        out = next;
    }
    let mut seen = std::collections::HashSet::new();
    let mut result = Vec::new();
    for clauses in out {
        let s = phi.with_clauses(clauses);
        if seen.insert(s.canonical_clause_set()) {
            result.push(s);
        }
    }
    Ok(result)
}
