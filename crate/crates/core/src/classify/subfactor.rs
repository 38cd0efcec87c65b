//! Search for a trivial subfactor: a set of colours closed under the
//! realized operations, with a two-block partition they respect, on which
//! they act as projections only.

use itertools::Itertools;

use super::realized::RealizedChecker;
use super::table::TableSpace;
use super::cegar;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::model::functions::{cells, decode_into, encode};
use crate::model::{Sentence, Subfactor};
use crate::normalform::obstruction_set;

struct Counter<'a> {
    checker: &'a RealizedChecker,
    limits: &'a Limits,
    searches: usize,
}

impl Counter<'_> {
    /// Whether some realized idempotent table of this arity meets the
    /// given cell restrictions.
    fn exists(&mut self, arity: usize, restrict: Vec<(usize, u64)>) -> Result<bool> {
        self.searches += 1;
        let k = self.checker.num_colours();
        let space = TableSpace::new(arity, k, [], restrict, true, self.limits)?;
        Ok(cegar(&space, self.checker, self.limits)?.found.is_some())
    }
}

fn mask(colours: &[usize]) -> u64 {
    colours.iter().fold(0, |m, &c| m | 1 << c)
}

/// Two-element idempotent operations outside the projection clone; a clone
/// on two elements is trivial unless it contains one of them.
const WITNESS_OPS: [(usize, fn(&[usize]) -> usize); 4] = [
    (2, |b| b[0] & b[1]),
    (2, |b| b[0] | b[1]),
    (3, |b| usize::from(b[0] + b[1] + b[2] >= 2)),
    (3, |b| b[0] ^ b[1] ^ b[2]),
];

/// Checks one candidate. Repeated arguments can be collapsed, so subset
/// preservation needs arity |ρ| with the elements of ρ as arguments, and
/// preservation of the partition needs arity |S|²+|T|² with all related
/// pairs as arguments.
fn is_trivial(c: &mut Counter<'_>, rho: &[usize], s: &[usize], t: &[usize]) -> Result<bool> {
    let k = c.checker.num_colours();
    let rho_mask = mask(rho);
    if rho.len() < k {
        let cell = encode(rho, k);
        if c.exists(rho.len(), vec![(cell, !rho_mask)])? {
            return Ok(false);
        }
    }
    if s.len() > 1 || t.len() > 1 {
        let pairs: Vec<(usize, usize)> = s
            .iter()
            .cartesian_product(s)
            .chain(t.iter().cartesian_product(t))
            .map(|(&a, &b)| (a, b))
            .collect();
        let u: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let v: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let (cu, cv) = (encode(&u, k), encode(&v, k));
        for (a, b) in [(s, t), (t, s)] {
            if c.exists(pairs.len(), vec![(cu, mask(a)), (cv, mask(b))])? {
                return Ok(false);
            }
        }
    }
    let block = |x: usize| usize::from(t.contains(&x));
    for (arity, op) in WITNESS_OPS {
        let mut restrict = Vec::new();
        let mut args = vec![0usize; arity];
        for i in 0..cells(rho.len(), arity)? {
            decode_into(i, rho.len(), &mut args);
            let colours: Vec<usize> = args.iter().map(|&a| rho[a]).collect();
            let blocks: Vec<usize> = colours.iter().map(|&x| block(x)).collect();
            let target = if op(&blocks) == 0 { s } else { t };
            restrict.push((encode(&colours, k), mask(target)));
        }
        if c.exists(arity, restrict)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The first trivial subfactor, trying smaller colour sets first, with the
/// number of candidates examined and table searches run.
pub(super) fn search(phi: &Sentence, limits: &Limits) -> Result<(Option<Subfactor>, usize, usize)> {
    let k = phi.colours().len();
    if k > limits.max_subfactor_colours {
        return Err(Error::Budget { what: "colours for the subfactor search", limit: limits.max_subfactor_colours as u64 });
    }
    let checker = RealizedChecker::new(&obstruction_set(phi)?, limits)?;
    let mut c = Counter { checker: &checker, limits, searches: 0 };
    let mut candidates = 0;
    for size in 2..=k {
        for rho in (0..k).combinations(size) {
            // S holds the first colour of rho
            for bits in 0..(1u32 << (size - 1)) {
                let (mut s, mut t) = (vec![rho[0]], Vec::new());
                for (i, &x) in rho.iter().enumerate().skip(1) {
                    if bits >> (i - 1) & 1 == 1 { s.push(x) } else { t.push(x) }
                }
                if t.is_empty() {
                    continue;
                }
                candidates += 1;
                if is_trivial(&mut c, &rho, &s, &t)? {
                    let names = |v: &[usize]| v.iter().map(|&i| phi.colours()[i].clone()).collect();
                    let found = Subfactor { rho: names(&rho), s: names(&s), t: names(&t) };
                    return Ok((Some(found), candidates, c.searches));
                }
            }
        }
    }
    Ok((None, candidates, c.searches))
}

/// A trivial subfactor of the realized operations, if one exists.
pub fn trivial_subfactor_search(phi: &Sentence, limits: &Limits) -> Result<Option<Subfactor>> {
    super::require_precoloured(phi)?;
    Ok(search(phi, limits)?.0)
}
