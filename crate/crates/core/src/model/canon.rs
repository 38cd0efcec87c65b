//! Canonical labelling of small relational structures by colour refinement
//! with individualisation. Leaves are compared by their relabelled fact
//! lists and the least one wins.

use std::collections::{BTreeSet, HashSet};

use super::{Atom, Clause, Literal};

pub(crate) type Fact = (u32, Vec<usize>);

/// Returns `(position of each element, relabelled sorted facts)` for the
/// lexicographically least leaf. `initial` is an isomorphism-invariant
/// starting colour per element.
pub(crate) fn canonical_labeling(n: usize, facts: &[Fact], initial: &[u32]) -> (Vec<usize>, Vec<Fact>) {
    let mut occ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (f, (_, args)) in facts.iter().enumerate() {
        for (p, &e) in args.iter().enumerate() {
            occ[e].push((f, p));
        }
    }
    let fact_set: HashSet<&Fact> = facts.iter().collect();
    let ctx = Ctx { n, facts, occ, fact_set };
    let mut best: Option<(Vec<Fact>, Vec<usize>)> = None;
    ctx.search(initial.to_vec(), &mut best);
    let (enc, label) = best.unwrap_or_default();
    (label, enc)
}

struct Ctx<'a> {
    n: usize,
    facts: &'a [Fact],
    occ: Vec<Vec<(usize, usize)>>,
    fact_set: HashSet<&'a Fact>,
}

impl Ctx<'_> {
    fn refine(&self, col: &mut Vec<u32>) {
        let mut cells = usize::MAX;
        loop {
            let sigs: Vec<(u32, Vec<(u32, usize, Vec<u32>)>)> = (0..self.n)
                .map(|e| {
                    let mut v: Vec<_> = self.occ[e]
                        .iter()
                        .map(|&(f, p)| {
                            let (l, args) = &self.facts[f];
                            (*l, p, args.iter().map(|&x| col[x]).collect())
                        })
                        .collect();
                    v.sort();
                    (col[e], v)
                })
                .collect();
            let distinct: BTreeSet<&(u32, Vec<(u32, usize, Vec<u32>)>)> = sigs.iter().collect();
            let ranked: Vec<_> = distinct.into_iter().collect();
            let next: Vec<u32> =
                sigs.iter().map(|s| ranked.binary_search(&s).expect("present") as u32).collect();
            let k = ranked.len();
            *col = next;
            if k == cells || k == self.n {
                return;
            }
            cells = k;
        }
    }

    fn swap_is_automorphism(&self, a: usize, b: usize) -> bool {
        let sw = |x: usize| if x == a { b } else if x == b { a } else { x };
        self.facts.iter().all(|(l, args)| {
            let img: Fact = (*l, args.iter().map(|&x| sw(x)).collect());
            self.fact_set.contains(&img)
        })
    }

    fn search(&self, mut col: Vec<u32>, best: &mut Option<(Vec<Fact>, Vec<usize>)>) {
        self.refine(&mut col);
        let mut count = vec![0usize; self.n];
        for &c in &col {
            count[c as usize] += 1;
        }
        match (0..self.n).find(|&c| count[c] > 1) {
            None => {
                let label: Vec<usize> = col.iter().map(|&c| c as usize).collect();
                let mut enc: Vec<Fact> =
                    self.facts.iter().map(|(l, args)| (*l, args.iter().map(|&x| label[x]).collect())).collect();
                enc.sort();
                enc.dedup();
                if best.as_ref().is_none_or(|(b, _)| enc < *b) {
                    *best = Some((enc, label));
                }
            }
            Some(cell) => {
                let members: Vec<usize> = (0..self.n).filter(|&e| col[e] as usize == cell).collect();
                let mut tried: Vec<usize> = Vec::new();
                for &e in &members {
                    if tried.iter().any(|&f| self.swap_is_automorphism(e, f)) {
                        continue;
                    }
                    tried.push(e);
                    let mut next: Vec<u32> = col.iter().map(|&x| 2 * x + 1).collect();
                    next[e] = 2 * cell as u32;
                    self.search(next, best);
                }
            }
        }
    }
}

pub(super) fn canonical_clause(c: &Clause) -> Clause {
    let mut labels: BTreeSet<(u8, String, bool)> = BTreeSet::new();
    for a in c.atoms() {
        labels.insert((0, a.symbol.clone(), false));
    }
    for l in c.literals() {
        labels.insert((1, l.colour.clone(), l.positive));
    }
    let labels: Vec<(u8, String, bool)> = labels.into_iter().collect();
    let find = |k: &(u8, String, bool)| labels.binary_search(k).expect("label") as u32;
    let mut facts: Vec<Fact> = Vec::new();
    for a in c.atoms() {
        facts.push((find(&(0, a.symbol.clone(), false)), a.args.clone()));
    }
    for l in c.literals() {
        facts.push((find(&(1, l.colour.clone(), l.positive)), vec![l.var]));
    }
    let n = c.num_vars();
    let (_, enc) = canonical_labeling(n, &facts, &vec![0; n]);
    let mut atoms = Vec::new();
    let mut literals = Vec::new();
    for (l, args) in enc {
        let (kind, name, positive) = &labels[l as usize];
        if *kind == 0 {
            atoms.push(Atom { symbol: name.clone(), args });
        } else {
            literals.push(Literal { colour: name.clone(), var: args[0], positive: *positive });
        }
    }
    Clause::new(Clause::fresh_names(n), atoms, literals).expect("canonical clause is well formed")
}
