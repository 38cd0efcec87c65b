//! Search for operation tables: cells are grouped into classes that must
//! agree, each class ranges over a set of colours, and learned clauses
//! forbid combinations of cell values.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::limits::{Budget, Limits};
use crate::model::functions::{cells, encode};
use crate::model::{ColourFunction, UnionFind};

/// The cells of a `k`-colour table of some arity, grouped into classes with
/// allowed values.
#[derive(Clone, Debug)]
pub(crate) struct TableSpace {
    pub arity: usize,
    pub k: usize,
    pub class_of: Vec<u32>,
    pub domains: Vec<u64>,
}

impl TableSpace {
    /// `equal` lists pairs of cells that must agree; `restrict` lists cells
    /// with the colours they may take (as bitmasks). Idempotency is added
    /// when `idempotent` is set.
    pub fn new(
        arity: usize,
        k: usize,
        equal: impl IntoIterator<Item = (usize, usize)>,
        restrict: impl IntoIterator<Item = (usize, u64)>,
        idempotent: bool,
        limits: &Limits,
    ) -> Result<Self> {
        if k == 0 || k > 64 {
            return Err(Error::Precondition("tables need between 1 and 64 colours".into()));
        }
        let n = cells(k, arity)?;
        if n > limits.max_table_cells {
            return Err(Error::Budget { what: "table cells", limit: limits.max_table_cells as u64 });
        }
        let mut uf = UnionFind::new(n);
        for (a, b) in equal {
            uf.union(a, b);
        }
        let mut root_class = vec![u32::MAX; n];
        let mut class_of = vec![0u32; n];
        let mut count = 0u32;
        for (cell, slot) in class_of.iter_mut().enumerate() {
            let r = uf.find(cell);
            if root_class[r] == u32::MAX {
                root_class[r] = count;
                count += 1;
            }
            *slot = root_class[r];
        }
        let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        let mut domains = vec![full; count as usize];
        for (cell, mask) in restrict {
            domains[class_of[cell] as usize] &= mask;
        }
        if idempotent {
            for c in 0..k {
                domains[class_of[encode(&vec![c; arity], k)] as usize] &= 1 << c;
            }
        }
        Ok(TableSpace { arity, k, class_of, domains })
    }

    pub fn num_classes(&self) -> usize {
        self.domains.len()
    }

    pub fn table(&self, values: &[u8]) -> ColourFunction {
        let table = self.class_of.iter().map(|&c| values[c as usize] as usize).collect();
        ColourFunction::new(self.arity, self.k, table).expect("values within the colour set")
    }
}

/// A clause forbids all of its (class, value) literals holding at once.
type Lits = Vec<(u32, u8)>;

/// Chronological backtracking over classes with unit propagation on the
/// learned clauses. Values of the previous solution are tried first.
pub(crate) struct Solver {
    k: usize,
    base: Vec<u64>,
    clauses: Vec<Lits>,
    occurs: Vec<Vec<u32>>,
    seen: HashSet<Lits>,
    phase: Vec<u8>,
}

enum Added {
    New,
    Duplicate,
    Satisfied,
}

impl Solver {
    pub fn new(space: &TableSpace) -> Self {
        let n = space.num_classes();
        Solver {
            k: space.k,
            base: space.domains.clone(),
            clauses: Vec::new(),
            occurs: vec![Vec::new(); n * space.k],
            seen: HashSet::new(),
            phase: vec![0; n],
        }
    }

    pub fn num_clauses(&self) -> usize {
        self.seen.len()
    }

    /// Adds a clause over classes; returns whether it was new.
    pub fn add(&mut self, mut lits: Lits) -> bool {
        lits.sort_unstable();
        lits.dedup();
        let added = if lits.windows(2).any(|w| w[0].0 == w[1].0) {
            Added::Satisfied
        } else if self.seen.contains(&lits) {
            Added::Duplicate
        } else {
            self.seen.insert(lits.clone());
            Added::New
        };
        if !matches!(added, Added::New) {
            return false;
        }
        if lits.iter().any(|&(c, v)| self.base[c as usize] >> v & 1 == 0) {
            return true;
        }
        if let [(c, v)] = lits[..] {
            self.base[c as usize] &= !(1u64 << v);
            return true;
        }
        let id = self.clauses.len() as u32;
        for &(c, v) in &lits {
            self.occurs[c as usize * self.k + v as usize].push(id);
        }
        self.clauses.push(lits);
        true
    }

    /// A value for every class satisfying all clauses, if any.
    pub fn solve(&mut self, budget: &mut Budget) -> Result<Option<Vec<u8>>> {
        let n = self.base.len();
        let mut dom = self.base.clone();
        if dom.iter().any(|&d| d == 0) {
            return Ok(None);
        }
        let mut trail: Vec<(u32, u64)> = Vec::new();
        let mut decisions: Vec<(usize, u32, u8)> = Vec::new();
        let mut queue: Vec<u32> = (0..n as u32).filter(|&c| dom[c as usize].count_ones() == 1).collect();
        let mut ok = self.propagate(&mut dom, &mut trail, &mut queue, budget)?;
        loop {
            if !ok {
                // undo the latest decision and rule its value out
                loop {
                    let Some((mark, c, v)) = decisions.pop() else {
                        return Ok(None);
                    };
                    while trail.len() > mark {
                        let (cc, old) = trail.pop().expect("nonempty");
                        dom[cc as usize] = old;
                    }
                    trail.push((c, dom[c as usize]));
                    dom[c as usize] &= !(1u64 << v);
                    match dom[c as usize].count_ones() {
                        0 => continue,
                        1 => {
                            queue.clear();
                            queue.push(c);
                            if self.propagate(&mut dom, &mut trail, &mut queue, budget)? {
                                break;
                            }
                        }
                        _ => break,
                    }
                }
            }
            let mut pick: Option<(u32, u32)> = None;
            for (c, &d) in dom.iter().enumerate() {
                let size = d.count_ones();
                if size > 1 && pick.is_none_or(|(_, s)| size < s) {
                    pick = Some((c as u32, size));
                    if size == 2 {
                        break;
                    }
                }
            }
            let Some((c, _)) = pick else {
                let values: Vec<u8> = dom.iter().map(|d| d.trailing_zeros() as u8).collect();
                self.phase.clone_from(&values);
                return Ok(Some(values));
            };
            budget.tick()?;
            let d = dom[c as usize];
            let preferred = self.phase[c as usize];
            let v = if d >> preferred & 1 == 1 { preferred } else { d.trailing_zeros() as u8 };
            decisions.push((trail.len(), c, v));
            trail.push((c, d));
            dom[c as usize] = 1u64 << v;
            queue.clear();
            queue.push(c);
            ok = self.propagate(&mut dom, &mut trail, &mut queue, budget)?;
        }
    }

    fn propagate(
        &self,
        dom: &mut [u64],
        trail: &mut Vec<(u32, u64)>,
        queue: &mut Vec<u32>,
        budget: &mut Budget,
    ) -> Result<bool> {
        while let Some(c) = queue.pop() {
            budget.tick()?;
            let v = dom[c as usize].trailing_zeros() as usize;
            for &id in &self.occurs[c as usize * self.k + v] {
                let mut open: Option<(u32, u8)> = None;
                let mut undecided = 0;
                let mut satisfied = false;
                for &(cc, vv) in &self.clauses[id as usize] {
                    let d = dom[cc as usize];
                    if d >> vv & 1 == 0 {
                        satisfied = true;
                        break;
                    }
                    if d != 1u64 << vv {
                        undecided += 1;
                        open = Some((cc, vv));
                        if undecided > 1 {
                            break;
                        }
                    }
                }
                if satisfied || undecided > 1 {
                    continue;
                }
                let Some((cc, vv)) = open else {
                    return Ok(false);
                };
                trail.push((cc, dom[cc as usize]));
                dom[cc as usize] &= !(1u64 << vv);
                match dom[cc as usize].count_ones() {
                    0 => return Ok(false),
                    1 => queue.push(cc),
                    _ => {}
                }
            }
        }
        Ok(true)
    }
}
