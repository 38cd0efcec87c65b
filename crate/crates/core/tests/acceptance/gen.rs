//! Seeded random sentences over one binary symbol.

use mmsnp::normalform::{is_normal_form, normalize, obstruction_set};
use mmsnp::{Atom, Clause, Limits, Literal, Sentence, Signature};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn edge_signature() -> Signature {
    Signature::from_symbols([("E", 2)]).expect("one symbol")
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Connected atoms over `v` variables: a random spanning tree plus a few
/// extra edges or loops.
fn connected_atoms(rng: &mut ChaCha8Rng, v: usize) -> Vec<Atom> {
    let mut atoms = Vec::new();
    for i in 1..v {
        let j = rng.gen_range(0..i);
        atoms.push(if rng.gen_bool(0.5) { Atom::new("E", vec![i, j]) } else { Atom::new("E", vec![j, i]) });
    }
    for _ in 0..rng.gen_range(0..=2) {
        atoms.push(Atom::new("E", vec![rng.gen_range(0..v), rng.gen_range(0..v)]));
    }
    atoms
}

/// A sentence with up to two predicates and clauses of at most three
/// variables, with literals of both signs.
pub fn raw_sentence(rng: &mut ChaCha8Rng) -> Sentence {
    let preds = names("P", rng.gen_range(0..=2));
    let mut clauses = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let v = rng.gen_range(1..=3);
        let mut atoms = connected_atoms(rng, v);
        let mut literals = Vec::new();
        if !preds.is_empty() {
            for x in 0..v {
                for _ in 0..rng.gen_range(0..=1) {
                    let p = preds.choose(rng).expect("nonempty");
                    literals.push(if rng.gen_bool(0.5) { Literal::pos(p, x) } else { Literal::neg(p, x) });
                }
            }
        }
        if atoms.is_empty() && literals.is_empty() {
            atoms.push(Atom::new("E", vec![0, 0]));
        }
        clauses.push(Clause::new(names("x", v), atoms, literals).expect("well-formed"));
    }
    Sentence::new(edge_signature(), preds, clauses)
}

/// Fully coloured clauses that need no splitting: one variable with a loop,
/// or two or three pairwise joined variables without loops.
fn coloured_clause(rng: &mut ChaCha8Rng, colours: &[String]) -> Clause {
    let v = rng.gen_range(1..=3);
    let mut atoms = Vec::new();
    for i in 0..v {
        for j in i + 1..v {
            match rng.gen_range(0..3) {
                0 => atoms.push(Atom::new("E", vec![i, j])),
                1 => atoms.push(Atom::new("E", vec![j, i])),
                _ => {
                    atoms.push(Atom::new("E", vec![i, j]));
                    atoms.push(Atom::new("E", vec![j, i]));
                }
            }
        }
        // a loop next to other atoms would be split off
        if v == 1 {
            atoms.push(Atom::new("E", vec![i, i]));
        }
    }
    let literals = (0..v).map(|x| Literal::pos(colours.choose(rng).expect("nonempty"), x)).collect();
    Clause::new(names("x", v), atoms, literals).expect("well-formed")
}

/// A normal-form sentence with at most two colours and obstructions of at
/// most three elements, or `None` if normalizing left that range.
pub fn small_normal_form(rng: &mut ChaCha8Rng, limits: &Limits) -> Option<Sentence> {
    let colours = names("M", rng.gen_range(1..=2));
    let mut clauses = vec![Clause::cover(&colours)];
    if colours.len() == 2 {
        clauses.push(Clause::exclusion(&colours[0], &colours[1]));
    }
    for _ in 0..rng.gen_range(1..=4) {
        clauses.push(coloured_clause(rng, &colours));
    }
    let nf = normalize(&Sentence::new(edge_signature(), colours, clauses), limits).ok()?;
    let obs = obstruction_set(&nf).ok()?;
    let small = obs.structures().iter().all(|f| f.len() <= 3);
    (is_normal_form(&nf) && nf.colours().len() <= 2 && small).then_some(nf)
}
