//! Complexity classification: a precoloured sentence describes a problem
//! in P exactly when some realized colour operation satisfies the Siggers
//! identity, and is NP-complete exactly when the realized operations have a
//! trivial subfactor. Both are decided and must agree.

mod realized;
mod subfactor;
mod table;

use serde::Serialize;

pub use realized::{is_realized, RealizednessWitness};
pub use subfactor::trivial_subfactor_search;

use crate::error::{Error, Result};
use crate::limits::{Budget, Limits};
use crate::model::functions::cells;
use crate::model::{
    ClassificationReport, ColourFunction, ComponentReport, SearchStats, Sentence, Verdict, Witness,
};
use crate::normalform::{decompose_connected, obstruction_set};
use crate::precolour::{add_precolours, is_precoloured};
use crate::recolour::{contains, strong_normal_form};
use crate::textio::print_sentence;
use realized::RealizedChecker;
use table::{Solver, TableSpace};

/// Witnesses collected from one candidate table before searching again.
const WITNESS_BATCH: usize = 4096;

/// A clause learned from a witness: not every listed cell has its value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LearnedClause {
    pub cells: Vec<(usize, usize)>,
    pub witness: RealizednessWitness,
}

/// Record of one table search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchCertificate {
    pub arity: usize,
    pub learned: Vec<LearnedClause>,
    pub iterations: usize,
    /// A realized table meeting all constraints; `None` means none exists.
    pub found: Option<ColourFunction>,
}

/// Counterexample-guided search for a realized table in `space`.
fn cegar(space: &TableSpace, checker: &RealizedChecker, limits: &Limits) -> Result<SearchCertificate> {
    let mut solver = Solver::new(space);
    let mut budget = Budget::nodes(limits, "table search");
    let mut learned = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > limits.max_cegar_iters {
            return Err(Error::Budget { what: "table search rounds", limit: limits.max_cegar_iters as u64 });
        }
        let Some(values) = solver.solve(&mut budget)? else {
            return Ok(SearchCertificate { arity: space.arity, learned, iterations, found: None });
        };
        let h = space.table(&values);
        let witnesses = checker.witnesses(&h, WITNESS_BATCH, &mut budget)?;
        if witnesses.is_empty() {
            return Ok(SearchCertificate { arity: space.arity, learned, iterations, found: Some(h) });
        }
        for w in witnesses {
            let cells = w.cells(space.k);
            let lits = cells.iter().map(|&(cell, v)| (space.class_of[cell], v as u8)).collect();
            if solver.add(lits) {
                learned.push(LearnedClause { cells, witness: w });
            }
        }
        if solver.num_clauses() > limits.max_learned {
            return Err(Error::Budget { what: "learned clauses", limit: limits.max_learned as u64 });
        }
    }
}

fn require_precoloured(phi: &Sentence) -> Result<()> {
    if !is_precoloured(phi) {
        return Err(Error::Precondition("the sentence must be precoloured".into()));
    }
    Ok(())
}

/// Whether every realized binary operation is idempotent. All tables are
/// enumerated, so at most three colours are accepted.
pub fn realized_idempotency_check(phi: &Sentence, limits: &Limits) -> Result<bool> {
    require_precoloured(phi)?;
    let k = phi.colours().len();
    if k > 3 {
        return Err(Error::Budget { what: "colours for exhaustive binary tables", limit: 3 });
    }
    let checker = RealizedChecker::new(&obstruction_set(phi)?, limits)?;
    let mut budget = Budget::nodes(limits, "realizedness check");
    let n = cells(k, 2)?;
    let total = cells(k, n)?;
    for t in 0..total {
        let mut table = vec![0usize; n];
        crate::model::functions::decode_into(t, k, &mut table);
        let h = ColourFunction::new(2, k, table)?;
        if checker.witnesses(&h, 1, &mut budget)?.is_empty() && !h.is_idempotent() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn siggers_space(k: usize, limits: &Limits) -> Result<TableSpace> {
    let pairs: Vec<(usize, usize)> = itertools::iproduct!(0..k, 0..k, 0..k)
        .map(|(x, y, z)| {
            let enc = |a: &[usize]| a.iter().fold(0, |acc, &v| acc * k + v);
            (enc(&[x, y, x, z, y, z]), enc(&[y, x, z, x, z, y]))
        })
        .collect();
    TableSpace::new(6, k, pairs, [], true, limits)
}

fn cyclic_space(k: usize, p: usize, limits: &Limits) -> Result<TableSpace> {
    let n = cells(k, p)?;
    if n > limits.max_table_cells {
        return Err(Error::Budget { what: "table cells", limit: limits.max_table_cells as u64 });
    }
    let top = n / k;
    // rotating left: drop the leading digit and append it
    let pairs = (0..n).map(move |c| (c, (c % top) * k + c / top));
    TableSpace::new(p, k, pairs, [], true, limits)
}

/// Searches for a realized idempotent 6-ary operation with
/// `f(x,y,x,z,y,z) = f(y,x,z,x,z,y)`, returning the search record.
pub fn siggers_certificate(phi: &Sentence, limits: &Limits) -> Result<SearchCertificate> {
    require_precoloured(phi)?;
    let checker = RealizedChecker::new(&obstruction_set(phi)?, limits)?;
    cegar(&siggers_space(phi.colours().len(), limits)?, &checker, limits)
}

/// A realized Siggers operation on the colours, if there is one.
pub fn siggers_search(phi: &Sentence, limits: &Limits) -> Result<Option<ColourFunction>> {
    Ok(siggers_certificate(phi, limits)?.found)
}

/// Searches for a realized idempotent operation of arity `p` invariant
/// under rotating its arguments.
pub fn cyclic_certificate(phi: &Sentence, p: usize, limits: &Limits) -> Result<SearchCertificate> {
    require_precoloured(phi)?;
    if p < 2 {
        return Err(Error::Precondition("cyclic operations need arity at least 2".into()));
    }
    let checker = RealizedChecker::new(&obstruction_set(phi)?, limits)?;
    cegar(&cyclic_space(phi.colours().len(), p, limits)?, &checker, limits)
}

/// A realized cyclic operation of arity `p`, if there is one.
pub fn cyclic_search(phi: &Sentence, p: usize, limits: &Limits) -> Result<Option<ColourFunction>> {
    Ok(cyclic_certificate(phi, p, limits)?.found)
}

/// Classifies a precoloured sentence by both searches.
pub fn classify_precoloured(phi: &Sentence, limits: &Limits) -> Result<ComponentReport> {
    require_precoloured(phi)?;
    let cert = siggers_certificate(phi, limits)?;
    let (subfactor, candidates, searches) = subfactor::search(phi, limits)?;
    let stats = SearchStats {
        colours: phi.colours().len(),
        clauses: phi.clauses().len(),
        siggers_iterations: cert.iterations,
        siggers_learned: cert.learned.len(),
        subfactor_candidates: candidates,
        subfactor_searches: searches,
    };
    let sentence = print_sentence(phi);
    match (cert.found, subfactor) {
        (Some(h), None) => Ok(ComponentReport {
            sentence,
            verdict: Verdict::P,
            witness: Witness::Siggers {
                arity: 6,
                colours: phi.colours().to_vec(),
                table: h.table().iter().map(|&v| phi.colours()[v].clone()).collect(),
            },
            stats,
        }),
        (None, Some(s)) => Ok(ComponentReport { sentence, verdict: Verdict::NpComplete, witness: Witness::Subfactor(s), stats }),
        (Some(_), Some(s)) => Err(Error::Internal(format!(
            "found both a Siggers operation and the trivial subfactor {s:?}"
        ))),
        (None, None) => Err(Error::Internal("found neither a Siggers operation nor a trivial subfactor".into())),
    }
}

/// Classifies an arbitrary sentence: split into connected sentences, bring
/// each into strong normal form, precolour and classify it. Components
/// contained in another component are dropped first.
pub fn classify(phi: &Sentence, limits: &Limits) -> Result<ClassificationReport> {
    let diags = phi.validate();
    if !diags.is_empty() {
        return Err(Error::Invalid(diags));
    }
    let parts = decompose_connected(phi, limits)?;
    let mut keep = vec![true; parts.len()];
    if parts.len() > 1 {
        for i in 0..parts.len() {
            for j in 0..parts.len() {
                if i == j || !keep[j] || !keep[i] {
                    continue;
                }
                if contains(&parts[i], &parts[j], limits)?.holds {
                    // equivalent components: keep the first
                    if j > i && contains(&parts[j], &parts[i], limits)?.holds {
                        keep[j] = false;
                    } else {
                        keep[i] = false;
                    }
                }
            }
        }
    }
    let mut components = Vec::new();
    for (_, p) in parts.iter().enumerate().filter(|(i, _)| keep[*i]) {
        let snf = strong_normal_form(p, limits)?;
        let mut report = classify_precoloured(&add_precolours(&snf), limits)?;
        report.sentence = print_sentence(p);
        components.push(report);
    }
    let overall =
        if components.iter().all(|c| c.verdict == Verdict::P) { Verdict::P } else { Verdict::NpComplete };
    let mut caveats = Vec::new();
    if overall == Verdict::NpComplete && components.len() > 1 {
        caveats.push(
            "several components remain after pairwise pruning; hardness assumes none of them is redundant \
             with respect to the union of the others"
                .to_string(),
        );
    }
    Ok(ClassificationReport { components, overall, caveats })
}
