//! Recolourings between sentences in normal form: checking, searching,
//! containment and strong normal forms.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::homsearch::{is_free, ModelChecker};
use crate::limits::{Budget, Limits};
use crate::model::structure::Partitions;
use crate::model::{Clause, FinStructure, RecolouringMap, Sentence};
use crate::normalform::{normalize, obstruction_set, ObstructionSet};

/// Outcome of a containment check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContainmentVerdict {
    pub holds: bool,
    /// A recolouring from the first sentence to the second when `holds`.
    pub witness: Option<RecolouringMap>,
    /// A structure satisfying the first sentence but not the second, when
    /// one was found within budget.
    pub counterexample: Option<FinStructure>,
}

/// One way a map can fail: a small σ1-coloured structure free of the first
/// sentence's obstructions whose image under the map is hit by the second's.
#[derive(Clone, Debug)]
struct Nogood {
    /// Pairs (σ1 colour, σ2 colour) that the map must not all contain.
    pairs: Vec<(usize, usize)>,
    structure: FinStructure,
}

/// All nogoods from `phi1` to `phi2`. A map is a recolouring exactly when it
/// satisfies none of them: any violating structure shrinks to the image of
/// the obstruction hitting it, which is a quotient of that obstruction.
struct Nogoods {
    sigma1: Arc<Vec<String>>,
    sigma2: Vec<String>,
    list: Vec<Nogood>,
}

fn same_tau(phi1: &Sentence, phi2: &Sentence) -> Result<()> {
    if phi1.tau() != phi2.tau() {
        return Err(Error::SignatureMismatch("sentences over different input signatures".into()));
    }
    Ok(())
}

impl Nogoods {
    fn new(phi1: &Sentence, phi2: &Sentence, limits: &Limits) -> Result<Self> {
        same_tau(phi1, phi2)?;
        let obs1 = obstruction_set(phi1)?;
        let obs2 = obstruction_set(phi2)?;
        Nogoods::from_obstructions(&obs1, &obs2, limits)
    }

    fn from_obstructions(obs1: &ObstructionSet, obs2: &ObstructionSet, limits: &Limits) -> Result<Self> {
        let sigma1 = obs1.colours_arc().clone();
        let k1 = sigma1.len();
        let mut list = Vec::new();
        let mut seen = BTreeSet::new();
        let mut budget = Budget::nodes(limits, "recolouring witnesses");
        for f2 in obs2.structures() {
            for (block_of, blocks) in Partitions::new(f2.colouring().to_vec()) {
                let q = f2.quotient(&block_of, blocks);
                let target = q.total_colouring();
                let base = q.tau_reduct().with_colour_list(sigma1.clone());
                let mut c = vec![0usize; blocks];
                loop {
                    budget.tick()?;
                    let mut pairs: Vec<(usize, usize)> = c.iter().copied().zip(target.iter().copied()).collect();
                    pairs.sort_unstable();
                    pairs.dedup();
                    let functional = pairs.windows(2).all(|w| w[0].0 != w[1].0);
                    if functional && !seen.contains(&pairs) {
                        let a = base.with_total_colouring(&c);
                        if is_free(&a, obs1, limits)?.is_none() {
                            seen.insert(pairs.clone());
                            list.push(Nogood { pairs, structure: a });
                        }
                    }
                    if !odometer(&mut c, k1) {
                        break;
                    }
                }
            }
        }
        // smallest first, so reported witnesses are small
        list.sort_by_key(|n| n.structure.len());
        Ok(Nogoods { sigma1, sigma2: obs2.colours().to_vec(), list })
    }

    fn violated_by(&self, mapping: &[usize]) -> Option<&Nogood> {
        self.list.iter().find(|n| n.pairs.iter().all(|&(a, b)| mapping[a] == b))
    }

    /// Whether some nogood is fully decided and hit by a partial map on the
    /// first `upto` colours.
    fn blocks_prefix(&self, mapping: &[usize], upto: usize) -> bool {
        self.list.iter().any(|n| n.pairs.iter().all(|&(a, b)| a < upto && mapping[a] == b))
    }

    /// Lexicographically first recolouring whose image has at most
    /// `max_image` colours and which (if `skip_injective`) is not injective.
    fn search(&self, max_image: usize, skip_injective: bool, budget: &mut Budget) -> Result<Option<Vec<usize>>> {
        let k1 = self.sigma1.len();
        let k2 = self.sigma2.len();
        if k1 > 0 && k2 == 0 {
            return Ok(None);
        }
        let mut mapping = vec![0usize; k1];
        let mut used = vec![0usize; k2];
        self.extend(0, &mut mapping, &mut used, max_image, skip_injective, budget)
    }

    fn extend(
        &self,
        i: usize,
        mapping: &mut Vec<usize>,
        used: &mut Vec<usize>,
        max_image: usize,
        skip_injective: bool,
        budget: &mut Budget,
    ) -> Result<Option<Vec<usize>>> {
        let k1 = mapping.len();
        if i == k1 {
            let image = used.iter().filter(|&&u| u > 0).count();
            if skip_injective && image == k1 {
                return Ok(None);
            }
            return Ok(Some(mapping.clone()));
        }
        for t in 0..self.sigma2.len() {
            budget.tick()?;
            let image = used.iter().filter(|&&u| u > 0).count() + usize::from(used[t] == 0);
            if image > max_image {
                continue;
            }
            mapping[i] = t;
            if self.blocks_prefix(mapping, i + 1) {
                continue;
            }
            used[t] += 1;
            let r = self.extend(i + 1, mapping, used, max_image, skip_injective, budget)?;
            used[t] -= 1;
            if r.is_some() {
                return Ok(r);
            }
        }
        Ok(None)
    }
}

fn odometer(c: &mut [usize], k: usize) -> bool {
    for x in c.iter_mut().rev() {
        *x += 1;
        if *x < k {
            return true;
        }
        *x = 0;
    }
    false
}

fn check_map(r: &RecolouringMap, phi1: &Sentence, phi2: &Sentence) -> Result<()> {
    if r.source() != phi1.colours() {
        return Err(Error::ColourMismatch("map source differs from the first sentence's colours".into()));
    }
    if r.target() != phi2.colours() {
        return Err(Error::ColourMismatch("map target differs from the second sentence's colours".into()));
    }
    Ok(())
}

/// A σ1-coloured structure showing that `r` is not a recolouring: it is free
/// of the obstructions of `phi1` while its image under `r` is not free of
/// those of `phi2`. `None` means `r` is a recolouring.
pub fn recolouring_violation(
    r: &RecolouringMap,
    phi1: &Sentence,
    phi2: &Sentence,
    limits: &Limits,
) -> Result<Option<FinStructure>> {
    check_map(r, phi1, phi2)?;
    let nogoods = Nogoods::new(phi1, phi2, limits)?;
    Ok(nogoods.violated_by(r.mapping()).map(|n| n.structure.clone()))
}

/// Whether `r` is a recolouring from `phi1` to `phi2` (both in normal form).
pub fn is_recolouring(r: &RecolouringMap, phi1: &Sentence, phi2: &Sentence, limits: &Limits) -> Result<bool> {
    Ok(recolouring_violation(r, phi1, phi2, limits)?.is_none())
}

/// Some recolouring from `phi1` to `phi2`, if one exists (the
/// lexicographically first one).
pub fn find_recolouring(phi1: &Sentence, phi2: &Sentence, limits: &Limits) -> Result<Option<RecolouringMap>> {
    let nogoods = Nogoods::new(phi1, phi2, limits)?;
    let mut budget = Budget::nodes(limits, "recolouring search");
    let found = nogoods.search(usize::MAX, false, &mut budget)?;
    found.map(|m| RecolouringMap::new(phi1.colours().to_vec(), phi2.colours().to_vec(), m)).transpose()
}

/// A non-injective recolouring from `phi` to itself with the smallest
/// image, lexicographically first among those.
pub fn proper_self_recolouring(phi: &Sentence, limits: &Limits) -> Result<Option<RecolouringMap>> {
    let nogoods = Nogoods::new(phi, phi, limits)?;
    let mut budget = Budget::nodes(limits, "recolouring search");
    let k = phi.colours().len();
    for s in 1..k {
        if let Some(m) = nogoods.search(s, true, &mut budget)? {
            return RecolouringMap::new(phi.colours().to_vec(), phi.colours().to_vec(), m).map(Some);
        }
    }
    Ok(None)
}

/// True when no non-injective self-recolouring exists.
pub fn is_strong_normal_form(phi: &Sentence, limits: &Limits) -> Result<bool> {
    Ok(proper_self_recolouring(phi, limits)?.is_none())
}

/// Removes the given colours: clauses using one of them positively go, and
/// the cover clause loses their negative literals.
pub(crate) fn drop_colours(phi: &Sentence, drop: &BTreeSet<String>) -> Sentence {
    let colours: Vec<String> = phi.colours().iter().filter(|c| !drop.contains(*c)).cloned().collect();
    let mut clauses = Vec::new();
    for c in phi.clauses() {
        if c.is_cover_clause(phi.colours()) {
            clauses.push(Clause::cover(&colours));
        } else if !c.literals().iter().any(|l| l.positive && drop.contains(&l.colour)) {
            clauses.push(c.clone());
        }
    }
    Sentence::new(phi.tau().clone(), colours, clauses)
}

/// An equivalent sentence in strong normal form. The input is normalized
/// first; then, while a proper self-recolouring exists, the colours outside
/// the image of the one with the smallest image are removed.
pub fn strong_normal_form(phi: &Sentence, limits: &Limits) -> Result<Sentence> {
    let mut cur = normalize(phi, limits)?;
    while let Some(r) = proper_self_recolouring(&cur, limits)? {
        let image: BTreeSet<usize> = r.image().into_iter().collect();
        let drop: BTreeSet<String> =
            (0..cur.colours().len()).filter(|i| !image.contains(i)).map(|i| cur.colours()[i].clone()).collect();
        cur = drop_colours(&cur, &drop);
    }
    Ok(cur)
}

/// Like [`strong_normal_form`] for a sentence already in normal form, which
/// is kept as it is apart from the colour removal.
pub fn strong_normal_form_of_normal(phi: &Sentence, limits: &Limits) -> Result<Sentence> {
    let mut cur = phi.clone();
    while let Some(r) = proper_self_recolouring(&cur, limits)? {
        let image: BTreeSet<usize> = r.image().into_iter().collect();
        let drop: BTreeSet<String> =
            (0..cur.colours().len()).filter(|i| !image.contains(i)).map(|i| cur.colours()[i].clone()).collect();
        cur = drop_colours(&cur, &drop);
    }
    Ok(cur)
}

/// Containment of the problems described by two connected sentences:
/// every finite structure satisfying `phi1` satisfies `phi2`. Decided by a
/// recolouring between their normal forms; on failure a small separating
/// structure is searched for.
pub fn contains(phi1: &Sentence, phi2: &Sentence, limits: &Limits) -> Result<ContainmentVerdict> {
    same_tau(phi1, phi2)?;
    for (name, phi) in [("first", phi1), ("second", phi2)] {
        let d = phi.validate();
        if !d.is_empty() {
            return Err(Error::Invalid(d));
        }
        if !phi.is_connected() {
            return Err(Error::Precondition(format!(
                "the {name} sentence is not connected; decompose it with decompose_connected first"
            )));
        }
    }
    let nf1 = normalize(phi1, limits)?;
    let nf2 = normalize(phi2, limits)?;
    if let Some(r) = find_recolouring(&nf1, &nf2, limits)? {
        return Ok(ContainmentVerdict { holds: true, witness: Some(r), counterexample: None });
    }
    let counterexample = find_counterexample(&nf1, &nf2, limits)?;
    Ok(ContainmentVerdict { holds: false, witness: None, counterexample })
}

/// A structure satisfying `nf1` but not `nf2`: first the uncoloured
/// recolouring witnesses, then all structures with at most
/// `max_counterexample_slots` possible tuples, smallest domains first.
pub fn find_counterexample(nf1: &Sentence, nf2: &Sentence, limits: &Limits) -> Result<Option<FinStructure>> {
    let m1 = ModelChecker::new(nf1, limits)?;
    let m2 = ModelChecker::new(nf2, limits)?;
    let separates = |a: &FinStructure| -> Result<bool> { Ok(m1.check(a)?.is_some() && m2.check(a)?.is_none()) };
    let nogoods = Nogoods::new(nf1, nf2, limits)?;
    for n in &nogoods.list {
        let a = n.structure.tau_reduct().with_colour_list(Arc::new(Vec::new()));
        if separates(&a)? {
            return Ok(Some(a));
        }
    }
    let tau = nf1.tau();
    let mut size = 1usize;
    loop {
        let slots: Vec<(usize, Vec<usize>)> = (0..tau.len())
            .flat_map(|s| all_tuples(size, tau.arity(s)).into_iter().map(move |t| (s, t)))
            .collect();
        if slots.len() > limits.max_counterexample_slots || slots.len() >= 64 {
            return Ok(None);
        }
        for mask in 0u64..(1u64 << slots.len()) {
            let mut a = FinStructure::new(tau.clone(), Vec::new());
            a.add_elements(size);
            for (i, (s, t)) in slots.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    a.add_tuple(*s, t.clone())?;
                }
            }
            if separates(&a)? {
                return Ok(Some(a));
            }
        }
        size += 1;
    }
}

fn all_tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out.into_iter().flat_map(|t| (0..n).map(move |e| [t.clone(), vec![e]].concat())).collect();
    }
    out
}
