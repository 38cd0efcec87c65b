//! Homomorphism search, obstruction-freeness, model checking and
//! enumeration of obstruction-free colourings.

mod engine;

use std::sync::Arc;

pub(crate) use engine::{SourcePlan, TargetIndex};
use engine::Search;

use crate::error::{Error, Result};
use crate::limits::{Budget, Limits};
use crate::model::{FinStructure, Sentence, Signature};
use crate::normalform::{obstruction_set, ObstructionSet};

pub(crate) fn search<'a>(
    plan: &'a SourcePlan,
    target: &'a TargetIndex,
    target_colours: &'a [Option<usize>],
    fixed: Option<(usize, usize)>,
    filter: Option<engine::PairFilter<'a>>,
) -> Search<'a> {
    Search { plan, target, target_colours, fixed, filter }
}

/// A homomorphism, as the image of each source element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomWitness {
    pub map: Vec<usize>,
}

/// A structure with pairs of elements required to be distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeqInstance {
    pub base: FinStructure,
    pub disequalities: Vec<(usize, usize)>,
}

fn same_vocabulary(a: &FinStructure, b: &FinStructure) -> Result<()> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch("structures over different signatures".into()));
    }
    if a.colours() != b.colours() {
        return Err(Error::ColourMismatch("structures over different colour lists".into()));
    }
    Ok(())
}

/// A homomorphism from `a` to `b` preserving relations and colours of
/// coloured source elements, if one exists.
pub fn hom_exists(a: &FinStructure, b: &FinStructure, limits: &Limits) -> Result<Option<HomWitness>> {
    same_vocabulary(a, b)?;
    let plan = SourcePlan::new(a, None);
    let target = TargetIndex::new(b);
    let search = Search { plan: &plan, target: &target, target_colours: b.colouring(), fixed: None, filter: None };
    let mut budget = Budget::nodes(limits, "homomorphism search");
    Ok(search.run(&mut budget)?.map(|map| HomWitness { map }))
}

/// `None` when no obstruction maps into `a`; otherwise the index of a
/// mapping obstruction and the homomorphism.
pub fn is_free(
    a: &FinStructure,
    obstructions: &ObstructionSet,
    limits: &Limits,
) -> Result<Option<(usize, HomWitness)>> {
    let a = a.lift(obstructions.tau())?;
    let a = align_colours(&a, obstructions.colours_arc())?;
    for (i, f) in obstructions.structures().iter().enumerate() {
        if let Some(w) = hom_exists(f, &a, limits)? {
            return Ok(Some((i, w)));
        }
    }
    Ok(None)
}

/// Re-expresses the colouring of `a` over `colours`, matching names.
pub(crate) fn align_colours(a: &FinStructure, colours: &Arc<Vec<String>>) -> Result<FinStructure> {
    if a.colours() == colours.as_slice() {
        return Ok(a.with_colour_list(colours.clone()));
    }
    let mut col = Vec::with_capacity(a.len());
    for c in a.colouring() {
        col.push(match c {
            None => None,
            Some(c) => {
                let name = &a.colours()[*c];
                Some(colours.iter().position(|x| x == name).ok_or_else(|| {
                    Error::ColourMismatch(format!("colour {name} is not a colour of the sentence"))
                })?)
            }
        });
    }
    Ok(a.tau_reduct().with_colour_list(colours.clone()).with_colouring(col))
}

/// Obstructions with one search plan per (obstruction, start element).
pub(crate) struct Compiled {
    plans: Vec<Vec<SourcePlan>>,
    by_colour: Vec<Vec<(usize, usize)>>,
}

impl Compiled {
    pub(crate) fn new(obs: &ObstructionSet) -> Self {
        let mut by_colour = vec![Vec::new(); obs.colours().len()];
        let mut plans = Vec::new();
        for (f, s) in obs.structures().iter().enumerate() {
            plans.push((0..s.len()).map(|e| SourcePlan::new(s, Some(e))).collect());
            for e in 0..s.len() {
                by_colour[s.colour(e).expect("obstructions are totally coloured")].push((f, e));
            }
        }
        Compiled { plans, by_colour }
    }

    /// An obstruction hit that uses element `e` (which must be coloured).
    pub(crate) fn hit_at(
        &self,
        target: &TargetIndex,
        colouring: &[Option<usize>],
        e: usize,
        budget: &mut Budget,
    ) -> Result<Option<(usize, Vec<usize>)>> {
        let c = colouring[e].expect("element is coloured");
        for &(f, s) in &self.by_colour[c] {
            let search = Search {
                plan: &self.plans[f][s],
                target,
                target_colours: colouring,
                fixed: Some((s, e)),
                filter: None,
            };
            if let Some(m) = search.run(budget)? {
                return Ok(Some((f, m)));
            }
        }
        Ok(None)
    }
}

/// Reusable model checker for one sentence in normal form.
pub struct ModelChecker {
    tau: Arc<Signature>,
    colours: Arc<Vec<String>>,
    compiled: Compiled,
    limits: Limits,
}

impl ModelChecker {
    pub fn new(phi: &Sentence, limits: &Limits) -> Result<Self> {
        let obs = obstruction_set(phi)?;
        Ok(ModelChecker::from_obstructions(&obs, limits))
    }

    pub fn from_obstructions(obs: &ObstructionSet, limits: &Limits) -> Self {
        ModelChecker {
            tau: Arc::new(obs.tau().clone()),
            colours: obs.colours_arc().clone(),
            compiled: Compiled::new(obs),
            limits: limits.clone(),
        }
    }

    /// An obstruction-free total colouring extending the colouring of `a`,
    /// as colour indices of the sentence.
    pub fn check(&self, a: &FinStructure) -> Result<Option<Vec<usize>>> {
        let a = align_colours(&a.lift_arc(&self.tau)?, &self.colours)?;
        let target = TargetIndex::new(&a);
        let mut budget = Budget::nodes(&self.limits, "model checking");
        let mut colouring = a.colouring().to_vec();
        let k = self.colours.len();
        for e in 0..a.len() {
            if colouring[e].is_some() && self.compiled.hit_at(&target, &colouring, e, &mut budget)?.is_some() {
                return Ok(None);
            }
        }
        let mut domains: Vec<Vec<usize>> = vec![Vec::new(); a.len()];
        for e in 0..a.len() {
            if colouring[e].is_some() {
                continue;
            }
            for d in 0..k {
                colouring[e] = Some(d);
                if self.compiled.hit_at(&target, &colouring, e, &mut budget)?.is_none() {
                    domains[e].push(d);
                }
            }
            colouring[e] = None;
            if domains[e].is_empty() {
                return Ok(None);
            }
        }
        if self.dfs(&target, &mut colouring, &mut domains, &mut budget)? {
            Ok(Some(colouring.into_iter().map(|c| c.expect("total")).collect()))
        } else {
            Ok(None)
        }
    }

    fn dfs(
        &self,
        target: &TargetIndex,
        colouring: &mut Vec<Option<usize>>,
        domains: &mut Vec<Vec<usize>>,
        budget: &mut Budget,
    ) -> Result<bool> {
        let pick = (0..colouring.len())
            .filter(|&e| colouring[e].is_none())
            .min_by_key(|&e| (domains[e].len(), std::cmp::Reverse(target.degree(e)), e));
        let Some(e) = pick else { return Ok(true) };
        for d in domains[e].clone() {
            budget.tick()?;
            colouring[e] = Some(d);
            if self.compiled.hit_at(target, colouring, e, budget)?.is_some() {
                continue;
            }
            let mut saved = Vec::new();
            let mut ok = true;
            for &u in target.neighbours(e) {
                if colouring[u].is_some() {
                    continue;
                }
                let old = domains[u].clone();
                let mut kept = Vec::with_capacity(old.len());
                for &d2 in &old {
                    colouring[u] = Some(d2);
                    if self.compiled.hit_at(target, colouring, u, budget)?.is_none() {
                        kept.push(d2);
                    }
                }
                colouring[u] = None;
                let empty = kept.is_empty();
                domains[u] = kept;
                saved.push((u, old));
                if empty {
                    ok = false;
                    break;
                }
            }
            if ok && self.dfs(target, colouring, domains, budget)? {
                return Ok(true);
            }
            for (u, old) in saved.into_iter().rev() {
                domains[u] = old;
            }
        }
        colouring[e] = None;
        Ok(false)
    }
}

/// Decides `a ⊨ phi` for `phi` in normal form. Colours already present on
/// `a` are forced; the result is an obstruction-free total colouring.
pub fn model_check(a: &FinStructure, phi: &Sentence, limits: &Limits) -> Result<Option<Vec<usize>>> {
    ModelChecker::new(phi, limits)?.check(a)
}

/// Satisfaction of an instance with disequalities: a reflexive disequality
/// makes it unsatisfiable, the others are irrelevant for MMSNP.
pub fn model_check_neq(inst: &NeqInstance, phi: &Sentence, limits: &Limits) -> Result<bool> {
    if let Some(&(a, b)) = inst.disequalities.iter().find(|&&(a, b)| a >= inst.base.len() || b >= inst.base.len()) {
        return Err(Error::Precondition(format!("disequality ({a},{b}) outside the domain")));
    }
    if inst.disequalities.iter().any(|&(a, b)| a == b) {
        return Ok(false);
    }
    Ok(model_check(&inst.base, phi, limits)?.is_some())
}

/// Stream of all obstruction-free total colourings of `a` extending
/// `partial`, in lexicographic order of the colour vector.
pub struct FreeColourings {
    compiled: Compiled,
    target: TargetIndex,
    partial: Vec<Option<usize>>,
    colouring: Vec<Option<usize>>,
    next_choice: Vec<usize>,
    depth: usize,
    k: usize,
    budget: Budget,
    done: bool,
}

/// See [`FreeColourings`]. The colours of `a` itself are ignored.
pub fn free_colourings(
    a: &FinStructure,
    obstructions: &ObstructionSet,
    partial: &[Option<usize>],
    limits: &Limits,
) -> Result<FreeColourings> {
    let a = a.lift(obstructions.tau())?;
    if partial.len() != a.len() {
        return Err(Error::Precondition("partial colouring has the wrong length".into()));
    }
    if partial.iter().flatten().any(|&c| c >= obstructions.colours().len()) {
        return Err(Error::ColourMismatch("partial colouring uses an unknown colour".into()));
    }
    Ok(FreeColourings::new(Compiled::new(obstructions), TargetIndex::new(&a), partial.to_vec(), obstructions.colours().len(), limits))
}

impl FreeColourings {
    pub(crate) fn new(compiled: Compiled, target: TargetIndex, partial: Vec<Option<usize>>, k: usize, limits: &Limits) -> Self {
        let n = partial.len();
        FreeColourings {
            compiled,
            target,
            partial,
            colouring: vec![None; n],
            next_choice: vec![0; n + 1],
            depth: 0,
            k,
            budget: Budget::nodes(limits, "colouring enumeration"),
            done: false,
        }
    }
}

impl Iterator for FreeColourings {
    type Item = Result<Vec<usize>>;

    fn next(&mut self) -> Option<Self::Item> {
        let n = self.colouring.len();
        loop {
            if self.done {
                return None;
            }
            if self.depth == n {
                let out: Vec<usize> = self.colouring.iter().map(|c| c.expect("total")).collect();
                if n == 0 {
                    self.done = true;
                } else {
                    self.depth = n - 1;
                }
                return Some(Ok(out));
            }
            let i = self.depth;
            let mut found = false;
            while self.next_choice[i] < self.k {
                let c = self.next_choice[i];
                self.next_choice[i] += 1;
                if self.partial[i].is_some_and(|p| p != c) {
                    continue;
                }
                self.colouring[i] = Some(c);
                if let Err(e) = self.budget.tick() {
                    self.done = true;
                    return Some(Err(e));
                }
                match self.compiled.hit_at(&self.target, &self.colouring, i, &mut self.budget) {
                    Err(e) => {
                        self.done = true;
                        return Some(Err(e));
                    }
                    Ok(Some(_)) => {}
                    Ok(None) => {
                        found = true;
                        break;
                    }
                }
            }
            if found {
                self.depth += 1;
                if self.depth < n {
                    self.next_choice[self.depth] = 0;
                    self.colouring[self.depth] = None;
                }
            } else {
                self.colouring[i] = None;
                if i == 0 {
                    self.done = true;
                    return None;
                }
                self.depth -= 1;
            }
        }
    }
}
