//! Backtracking homomorphism search from a small source into an indexed
//! target.

use std::collections::HashSet;

use crate::limits::Budget;
use crate::model::FinStructure;
use crate::Result;

const UNSET: usize = usize::MAX;

/// Relations of a target structure with per-position lookup tables.
pub(crate) struct TargetIndex {
    n: usize,
    sets: Vec<HashSet<Vec<usize>>>,
    tuples: Vec<Vec<Vec<usize>>>,
    /// `by_pos[symbol][position][element]` = indices into `tuples[symbol]`.
    by_pos: Vec<Vec<Vec<Vec<u32>>>>,
    adjacency: Vec<Vec<usize>>,
}

impl TargetIndex {
    pub(crate) fn new(b: &FinStructure) -> Self {
        let n = b.len();
        let mut sets = Vec::new();
        let mut tuples = Vec::new();
        let mut by_pos = Vec::new();
        let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); n];
        for s in 0..b.signature().len() {
            let ts: Vec<Vec<usize>> = b.tuples(s).iter().cloned().collect();
            let arity = b.signature().arity(s);
            let mut pos = vec![vec![Vec::new(); n]; arity];
            for (i, t) in ts.iter().enumerate() {
                for (p, &e) in t.iter().enumerate() {
                    pos[p][e].push(i as u32);
                    for &f in t {
                        if f != e {
                            adj[e].insert(f);
                        }
                    }
                }
            }
            sets.push(ts.iter().cloned().collect());
            tuples.push(ts);
            by_pos.push(pos);
        }
        let adjacency = adj
            .into_iter()
            .map(|s| {
                let mut v: Vec<usize> = s.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect();
        TargetIndex { n, sets, tuples, by_pos, adjacency }
    }

    pub(crate) fn neighbours(&self, e: usize) -> &[usize] {
        &self.adjacency[e]
    }

    pub(crate) fn degree(&self, e: usize) -> usize {
        self.by_pos.iter().flat_map(|p| p.iter()).map(|v| v[e].len()).sum()
    }
}

/// Static variable order for a source structure with the tuples to check
/// at each depth and a tuple for generating candidates.
#[derive(Clone, Debug)]
pub(crate) struct SourcePlan {
    order: Vec<usize>,
    colours: Vec<Option<usize>>,
    checks: Vec<Vec<(usize, Vec<usize>)>>,
    anchors: Vec<Option<Anchor>>,
}

#[derive(Clone, Debug)]
struct Anchor {
    symbol: usize,
    tuple: Vec<usize>,
    known: usize,
    new: usize,
}

impl SourcePlan {
    /// Plan starting at `first` when given, else at the busiest element.
    pub(crate) fn new(a: &FinStructure, first: Option<usize>) -> Self {
        let m = a.len();
        let mut occ: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); m];
        for s in 0..a.signature().len() {
            for t in a.tuples(s) {
                let mut seen = Vec::new();
                for &e in t {
                    if !seen.contains(&e) {
                        seen.push(e);
                        occ[e].push((s, t.clone()));
                    }
                }
            }
        }
        let mut placed = vec![false; m];
        let mut order = Vec::with_capacity(m);
        let mut link = vec![0usize; m];
        while order.len() < m {
            let next = if order.is_empty() && first.is_some() {
                first.unwrap()
            } else {
                (0..m)
                    .filter(|&e| !placed[e])
                    .max_by_key(|&e| (link[e], occ[e].len(), std::cmp::Reverse(e)))
                    .expect("unplaced element")
            };
            placed[next] = true;
            order.push(next);
            for (_, t) in &occ[next] {
                let mut seen = Vec::new();
                for &f in t {
                    if !placed[f] && !seen.contains(&f) {
                        seen.push(f);
                        link[f] += 1;
                    }
                }
            }
        }
        let mut depth = vec![0; m];
        for (d, &e) in order.iter().enumerate() {
            depth[e] = d;
        }
        let mut checks = vec![Vec::new(); m];
        let mut anchors = vec![None; m];
        for s in 0..a.signature().len() {
            for t in a.tuples(s) {
                let last = t.iter().map(|&e| depth[e]).max().expect("nonempty tuple");
                checks[last].push((s, t.clone()));
                let e = order[last];
                if anchors[last].is_none() {
                    if let Some(k) = t.iter().position(|&f| depth[f] < last) {
                        let new = t.iter().position(|&f| f == e).expect("member");
                        anchors[last] = Some(Anchor { symbol: s, tuple: t.clone(), known: k, new });
                    }
                }
            }
        }
        SourcePlan { order, colours: a.colouring().to_vec(), checks, anchors }
    }

    pub(crate) fn len(&self) -> usize {
        self.order.len()
    }
}

/// Extra per-pair restriction on `(source, target)` assignments.
pub(crate) type PairFilter<'f> = &'f dyn Fn(usize, usize) -> bool;

pub(crate) struct Search<'a> {
    pub(crate) plan: &'a SourcePlan,
    pub(crate) target: &'a TargetIndex,
    pub(crate) target_colours: &'a [Option<usize>],
    /// Source element forced onto a target element.
    pub(crate) fixed: Option<(usize, usize)>,
    pub(crate) filter: Option<PairFilter<'a>>,
}

impl Search<'_> {
    pub(crate) fn run(&self, budget: &mut Budget) -> Result<Option<Vec<usize>>> {
        let mut map = vec![UNSET; self.plan.len()];
        let mut stamp = vec![0u32; self.target.n];
        let mut gen = 0u32;
        let mut buf = Vec::new();
        if self.extend(0, &mut map, &mut stamp, &mut gen, &mut buf, budget)? {
            Ok(Some(map))
        } else {
            Ok(None)
        }
    }

    fn admissible(&self, s: usize, t: usize) -> bool {
        if let Some(c) = self.plan.colours[s] {
            if self.target_colours[t] != Some(c) {
                return false;
            }
        }
        self.filter.is_none_or(|f| f(s, t))
    }

    fn consistent(&self, depth: usize, map: &[usize], buf: &mut Vec<usize>) -> bool {
        self.plan.checks[depth].iter().all(|(s, t)| {
            buf.clear();
            buf.extend(t.iter().map(|&e| map[e]));
            self.target.sets[*s].contains(buf.as_slice())
        })
    }

    fn extend(
        &self,
        depth: usize,
        map: &mut Vec<usize>,
        stamp: &mut Vec<u32>,
        gen: &mut u32,
        buf: &mut Vec<usize>,
        budget: &mut Budget,
    ) -> Result<bool> {
        if depth == self.plan.len() {
            return Ok(true);
        }
        budget.tick()?;
        let s = self.plan.order[depth];
        let mut cands: Vec<usize> = Vec::new();
        if let Some((_, ft)) = self.fixed.filter(|&(fs, _)| fs == s) {
            cands.push(ft);
        } else if let Some(an) = &self.plan.anchors[depth] {
            *gen = gen.wrapping_add(1);
            if *gen == 0 {
                stamp.iter_mut().for_each(|x| *x = 0);
                *gen = 1;
            }
            let img = map[an.tuple[an.known]];
            for &ti in &self.target.by_pos[an.symbol][an.known][img] {
                let tt = &self.target.tuples[an.symbol][ti as usize];
                let v = tt[an.new];
                if stamp[v] != *gen {
                    stamp[v] = *gen;
                    cands.push(v);
                }
            }
        } else {
            cands.extend(0..self.target.n);
        }
        for t in cands {
            if !self.admissible(s, t) {
                continue;
            }
            map[s] = t;
            if self.consistent(depth, map, buf) && self.extend(depth + 1, map, stamp, gen, buf, budget)? {
                return Ok(true);
            }
        }
        map[s] = UNSET;
        Ok(false)
    }
}
