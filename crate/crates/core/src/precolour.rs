//! Precoloured sentences, colour sets of pointed structures and the
//! colour-defining formulas χ.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::homsearch::{free_colourings, is_free};
use crate::limits::Limits;
use crate::model::{Atom, Clause, FinStructure, Literal, PointedStructure, Sentence, Signature};
use crate::normalform::{is_normal_form, obstruction_set, ObstructionSet};
use crate::recolour::is_strong_normal_form;

fn fresh_symbol(tau: &Signature, base: &str) -> String {
    if tau.index_of(base).is_none() {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}_{i}")).find(|s| tau.index_of(s).is_none()).expect("unbounded")
}

/// The clause `¬(P(x) ∧ M(x))`.
fn clash_clause(p: &str, colour: &str) -> Clause {
    Clause::new(vec!["x".into()], vec![Atom::new(p, vec![0])], vec![Literal::pos(colour, 0)])
        .expect("well-formed")
}

fn is_clash_clause(c: &Clause, p: &str, colour: &str) -> bool {
    c.num_vars() == 1
        && c.atoms().len() == 1
        && c.atoms()[0].symbol == p
        && c.literals().len() == 1
        && c.literals()[0].positive
        && c.literals()[0].colour == colour
}

/// Adds a fresh unary symbol `P_M` for every colour `M` together with the
/// clauses forbidding `P_M` on elements of any other colour.
pub fn standard_precolouration(phi: &Sentence, limits: &Limits) -> Result<Sentence> {
    if !is_normal_form(phi) || !is_strong_normal_form(phi, limits)? {
        return Err(Error::Precondition("precolouration needs a sentence in strong normal form".into()));
    }
    Ok(add_precolours(phi))
}

pub(crate) fn add_precolours(phi: &Sentence) -> Sentence {
    let mut tau = phi.tau().clone();
    let mut clauses = phi.clauses().to_vec();
    for m in phi.colours() {
        let p = fresh_symbol(&tau, &format!("P_{m}"));
        tau.add(p.clone(), 1).expect("fresh symbol");
        for other in phi.colours().iter().filter(|o| *o != m) {
            clauses.push(clash_clause(&p, other));
        }
    }
    Sentence::new(tau, phi.colours().to_vec(), clauses)
}

/// For each colour, a unary symbol forcing it, if there is one.
pub fn precolour_symbols(phi: &Sentence) -> Vec<Option<String>> {
    phi.colours()
        .iter()
        .map(|m| {
            phi.tau()
                .symbols()
                .iter()
                .filter(|s| s.arity == 1)
                .find(|s| {
                    phi.colours()
                        .iter()
                        .filter(|o| *o != m)
                        .all(|o| phi.clauses().iter().any(|c| is_clash_clause(c, &s.name, o)))
                })
                .map(|s| s.name.clone())
        })
        .collect()
}

/// Whether the sentence is in normal form and every colour is forced by
/// some unary input symbol.
pub fn is_precoloured(phi: &Sentence) -> bool {
    is_normal_form(phi) && precolour_symbols(phi).iter().all(Option::is_some)
}

/// The colours `M` such that giving the root colour `M` leaves the
/// structure free of the sentence's obstructions.
pub fn colour_set(p: &PointedStructure, phi: &Sentence, limits: &Limits) -> Result<BTreeSet<String>> {
    let obs = obstruction_set(phi)?;
    colour_set_in(p, &obs, limits).map(|s| s.into_iter().map(|i| phi.colours()[i].clone()).collect())
}

fn colour_set_in(p: &PointedStructure, obs: &ObstructionSet, limits: &Limits) -> Result<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for m in 0..obs.colours().len() {
        let mut colouring = p.structure.colouring().to_vec();
        colouring[p.root] = Some(m);
        let a = p.structure.with_colouring(colouring);
        if is_free(&a, obs, limits)?.is_none() {
            out.insert(m);
        }
    }
    Ok(out)
}

/// The pointed obstructions whose colour set contains `m`, one per
/// isomorphism type, smallest first.
fn pointed_obstructions(obs: &ObstructionSet, m: usize, limits: &Limits) -> Result<Vec<(PointedStructure, BTreeSet<usize>)>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let sorted = obs.sorted_by_size();
    for f in sorted.structures() {
        for root in 0..f.len() {
            if !seen.insert(f.canonical_key(Some(root))) {
                continue;
            }
            let p = PointedStructure { structure: f.clone(), root };
            let set = colour_set_in(&p, obs, limits)?;
            if set.contains(&m) {
                out.push((p, set));
            }
        }
    }
    Ok(out)
}

/// For every colour `M`, whether the colour sets of the pointed
/// obstructions containing `M` intersect to exactly `{M}`.
pub fn colours_as_intersection_check(phi: &Sentence, limits: &Limits) -> Result<Vec<(String, bool)>> {
    let obs = obstruction_set(phi)?;
    let k = phi.colours().len();
    let mut out = Vec::new();
    for m in 0..k {
        let mut meet: BTreeSet<usize> = (0..k).collect();
        for (_, set) in pointed_obstructions(&obs, m, limits)? {
            meet = meet.intersection(&set).copied().collect();
        }
        out.push((phi.colours()[m].clone(), meet == BTreeSet::from([m])));
    }
    Ok(out)
}

fn element_name(depth: usize, index: usize) -> String {
    const LETTERS: [char; 4] = ['y', 'z', 'w', 'u'];
    match depth {
        0 => "x".into(),
        d if d <= LETTERS.len() => format!("{}{index}", LETTERS[d - 1]),
        d => format!("d{d}_{index}"),
    }
}

/// The canonical database of χ^(n)_M: a tree of copies of the uncoloured
/// pointed obstructions whose colour set contains `M`, glued at their
/// points, with the colours of the obstructions' other elements unfolded
/// recursively; only the depth-`n` leaves are coloured. An empty
/// conjunction leaves the root bare.
pub fn build_chi(phi: &Sentence, colour: &str, depth: usize, limits: &Limits) -> Result<PointedStructure> {
    if depth > limits.max_chi_depth {
        return Err(Error::Budget { what: "chi depth", limit: limits.max_chi_depth as u64 });
    }
    let m = phi
        .colour_index(colour)
        .ok_or_else(|| Error::ColourMismatch(format!("unknown colour {colour}")))?;
    let obs = obstruction_set(phi)?;
    let pointed: Vec<Vec<PointedStructure>> = (0..phi.colours().len())
        .map(|c| Ok(pointed_obstructions(&obs, c, limits)?.into_iter().map(|(p, _)| p).collect()))
        .collect::<Result<_>>()?;
    let mut a = FinStructure::new(phi.tau().clone(), phi.colours().to_vec());
    let mut per_depth = vec![0usize; depth + 1];
    let root = a.add_element(element_name(0, 0));
    per_depth[0] = 1;
    let mut guard = 0usize;
    expand(&mut a, root, m, depth, 0, &pointed, &mut per_depth, &mut guard, limits)?;
    Ok(PointedStructure { structure: a, root })
}

#[allow(clippy::too_many_arguments)]
fn expand(
    a: &mut FinStructure,
    at: usize,
    m: usize,
    remaining: usize,
    level: usize,
    pointed: &[Vec<PointedStructure>],
    per_depth: &mut Vec<usize>,
    guard: &mut usize,
    limits: &Limits,
) -> Result<()> {
    if remaining == 0 {
        return a.set_colour(at, m);
    }
    for p in &pointed[m] {
        let f = &p.structure;
        let mut image = vec![usize::MAX; f.len()];
        image[p.root] = at;
        for e in (0..f.len()).filter(|&e| e != p.root) {
            per_depth[level + 1] += 1;
            image[e] = a.add_element(element_name(level + 1, per_depth[level + 1]));
            *guard += 1;
            if *guard as u64 > limits.max_nodes {
                return Err(Error::Budget { what: "chi size", limit: limits.max_nodes });
            }
        }
        for s in 0..f.signature().len() {
            for t in f.tuples(s) {
                a.add_tuple(s, t.iter().map(|&e| image[e]).collect())?;
            }
        }
        for e in (0..f.len()).filter(|&e| e != p.root) {
            let c = f.colour(e).expect("obstructions are totally coloured");
            expand(a, image[e], c, remaining - 1, level + 1, pointed, per_depth, guard, limits)?;
        }
    }
    Ok(())
}

/// Whether the χ structure has an obstruction-free total colouring
/// extending its colours and every such colouring gives the root `M`.
pub fn chi_defines_colour(phi: &Sentence, colour: &str, depth: usize, limits: &Limits) -> Result<bool> {
    let p = build_chi(phi, colour, depth, limits)?;
    let obs = obstruction_set(phi)?;
    let m = phi.colour_index(colour).expect("checked by build_chi");
    let partial = p.structure.colouring().to_vec();
    if free_colourings(&p.structure, &obs, &partial, limits)?.next().transpose()?.is_none() {
        return Ok(false);
    }
    if let Some(c) = partial[p.root] {
        return Ok(c == m);
    }
    for other in (0..phi.colours().len()).filter(|&c| c != m) {
        let mut forced = partial.clone();
        forced[p.root] = Some(other);
        if free_colourings(&p.structure, &obs, &forced, limits)?.next().transpose()?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}
