use std::collections::{HashSet, VecDeque};

use super::clausehom::ClauseVocab;
use crate::error::{Error, Result};
use crate::limits::{Budget, Limits};
use crate::model::{Clause, Literal, Sentence, UnionFind};
use crate::textio::print::clause_text;

/// A variable at which the τ-atoms of `c` fall apart, together with the
/// atoms of the piece containing the first atom at that variable. Clauses
/// with at most one variable or without atoms never split.
pub(crate) fn split_point(c: &Clause) -> Option<(usize, Vec<usize>)> {
    let atoms = c.atoms();
    if c.num_vars() <= 1 || atoms.len() <= 1 {
        return None;
    }
    for v in 0..c.num_vars() {
        let mut uf = UnionFind::new(atoms.len());
        let mut owner = vec![usize::MAX; c.num_vars()];
        for (i, a) in atoms.iter().enumerate() {
            for &w in &a.args {
                if w == v {
                    continue;
                }
                if owner[w] == usize::MAX {
                    owner[w] = i;
                } else {
                    uf.union(owner[w], i);
                }
            }
        }
        let Some(first) = atoms.iter().position(|a| a.args.contains(&v)) else { continue };
        let root = uf.find(first);
        let group: Vec<usize> = (0..atoms.len()).filter(|&i| uf.find(i) == root).collect();
        if group.len() < atoms.len() {
            return Some((v, group));
        }
    }
    None
}

/// No split point: the atoms cannot be divided into two parts sharing at
/// most one variable.
pub(crate) fn is_biconnected(c: &Clause) -> bool {
    split_point(c).is_none()
}

/// Generator of names that clash with nothing already in use.
struct Fresh {
    used: HashSet<String>,
}

impl Fresh {
    fn new(phi: &Sentence) -> Self {
        let used = phi
            .tau()
            .symbols()
            .iter()
            .map(|s| s.name.clone())
            .chain(phi.colours().iter().cloned())
            .collect();
        Fresh { used }
    }

    fn next(&mut self, prefix: &str) -> String {
        let mut k = 1;
        loop {
            let name = format!("{prefix}{k}");
            if self.used.insert(name.clone()) {
                return name;
            }
            k += 1;
        }
    }
}

/// Splits `c` at `v` into `¬(φ1 ∧ P(v))` and `¬(φ2 ∧ ¬P(v))`.
fn split_at(c: &Clause, v: usize, group: &[usize], p: &str) -> (Clause, Clause) {
    let in_group: HashSet<usize> = group.iter().copied().collect();
    let mut vars1 = vec![false; c.num_vars()];
    let (mut a1, mut a2) = (Vec::new(), Vec::new());
    for (i, a) in c.atoms().iter().enumerate() {
        if in_group.contains(&i) {
            for &w in &a.args {
                vars1[w] = true;
            }
            a1.push(a.clone());
        } else {
            a2.push(a.clone());
        }
    }
    let mut l1 = vec![Literal::pos(p, v)];
    let mut l2 = vec![Literal::neg(p, v)];
    for l in c.literals() {
        if vars1[l.var] {
            l1.push(l.clone());
        } else {
            l2.push(l.clone());
        }
    }
    (Clause::compact(c.vars(), a1, l1), Clause::compact(c.vars(), a2, l2))
}

/// Splits `c` repeatedly until all pieces are biconnected, naming the new
/// predicates with `fresh` and appending them to `colours`.
fn split_fully(c: Clause, fresh: &mut Fresh, colours: &mut Vec<String>) -> Vec<Clause> {
    let mut out = Vec::new();
    let mut work = vec![c];
    while let Some(c) = work.pop() {
        match split_point(&c) {
            None => out.push(c),
            Some((v, group)) => {
                let p = fresh.next("P");
                colours.push(p.clone());
                let (c1, c2) = split_at(&c, v, &group, &p);
                work.push(c2);
                work.push(c1);
            }
        }
    }
    out.reverse();
    out
}

fn require_connected(phi: &Sentence) -> Result<()> {
    phi.check()?;
    if !phi.is_connected() {
        return Err(Error::Precondition(
            "sentence is not connected; split it with decompose_connected first".into(),
        ));
    }
    Ok(())
}

/// Replaces every clause whose atoms share only one variable between two
/// parts by two clauses linked through a fresh predicate.
pub fn biconnected_split(phi: &Sentence) -> Result<Sentence> {
    require_connected(phi)?;
    let mut fresh = Fresh::new(phi);
    let mut colours = phi.colours().to_vec();
    let mut clauses = Vec::new();
    for c in phi.clauses() {
        clauses.extend(split_fully(c.clone(), &mut fresh, &mut colours));
    }
    Ok(Sentence::new(phi.tau().clone(), colours, clauses))
}

/// Clause set kept cored, duplicate-free and free of subsumed clauses.
struct Store {
    phi: Sentence,
    vocab: ClauseVocab,
    clauses: Vec<Option<Clause>>,
    keys: HashSet<String>,
    live: usize,
    max_clauses: usize,
    budget: Budget,
}

impl Store {
    fn new(phi: &Sentence, limits: &Limits) -> Self {
        Store {
            vocab: ClauseVocab::new(phi),
            phi: phi.with_clauses(Vec::new()),
            clauses: Vec::new(),
            keys: HashSet::new(),
            live: 0,
            max_clauses: limits.max_clauses,
            budget: Budget::nodes(limits, "normal form"),
        }
    }

    fn add_colours(&mut self, colours: Vec<String>) {
        if colours.len() != self.phi.colours().len() {
            self.phi = Sentence::new(self.phi.tau().clone(), colours, Vec::new());
            self.vocab = ClauseVocab::new(&self.phi);
        }
    }

    /// Some stored clause with at most as many variables maps into `c`.
    fn covers(&mut self, c: &Clause) -> Result<bool> {
        for d in self.clauses.iter().flatten() {
            if d.num_vars() <= c.num_vars() && self.vocab.maps_into(d, c, &mut self.budget)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Cores `c`, splits the core at cut variables when allowed, and
    /// inserts the pieces that are not redundant. Returns their indices.
    fn insert(&mut self, c: Clause, fresh: &mut Fresh, allow_split: bool) -> Result<Vec<usize>> {
        let mut added = Vec::new();
        let mut work = vec![c];
        while let Some(c) = work.pop() {
            if c.is_contradictory() || self.covers(&c)? {
                continue;
            }
            let c = self.vocab.core(&c, &mut self.budget)?;
            if !is_biconnected(&c) {
                if !allow_split {
                    return Err(Error::Internal(format!(
                        "clause {} needs a split after colouring",
                        clause_text(&c)
                    )));
                }
                let mut colours = self.phi.colours().to_vec();
                work.extend(split_fully(c, fresh, &mut colours));
                self.add_colours(colours);
                continue;
            }
            let key = clause_text(&c.canonical());
            if self.keys.contains(&key) || self.covers(&c)? {
                continue;
            }
            for i in 0..self.clauses.len() {
                let Some(e) = &self.clauses[i] else { continue };
                if c.num_vars() <= e.num_vars() && self.vocab.maps_into(&c, e, &mut self.budget)? {
                    let e = self.clauses[i].take().expect("present");
                    self.keys.remove(&clause_text(&e.canonical()));
                    self.live -= 1;
                }
            }
            self.keys.insert(key);
            self.clauses.push(Some(c));
            self.live += 1;
            if self.live > self.max_clauses {
                return Err(Error::Budget { what: "normal-form clauses", limit: self.max_clauses as u64 });
            }
            added.push(self.clauses.len() - 1);
        }
        Ok(added)
    }

    /// Adds all identifications of two variables of every clause, splitting
    /// the ones that are not biconnected. With `allow_split` false a needed
    /// split is an internal error.
    fn close(&mut self, fresh: &mut Fresh, allow_split: bool) -> Result<()> {
        let mut queue: VecDeque<usize> = (0..self.clauses.len()).collect();
        while let Some(i) = queue.pop_front() {
            let Some(c) = self.clauses[i].clone() else { continue };
            let n = c.num_vars();
            for a in 0..n {
                for b in a + 1..n {
                    if self.clauses[i].is_none() {
                        break;
                    }
                    let map: Vec<usize> = (0..n).map(|v| if v == b { a } else { v }).collect();
                    let q = c.substitute(&map, c.vars());
                    queue.extend(self.insert(q, fresh, allow_split)?);
                }
            }
        }
        Ok(())
    }

    fn into_sentence(self) -> Sentence {
        let clauses = self.clauses.into_iter().flatten().collect();
        self.phi.with_clauses(clauses)
    }
}

/// Adds the clauses obtained by identifying variables, so that small
/// violations are witnessed by small clauses. Redundant clauses (those into
/// which a clause with no more variables maps) are dropped along the way.
pub fn close_small_clauses(phi: &Sentence, limits: &Limits) -> Result<Sentence> {
    require_connected(phi)?;
    let mut fresh = Fresh::new(phi);
    let mut store = Store::new(phi, limits);
    for c in phi.clauses() {
        store.insert(c.clone(), &mut fresh, true)?;
    }
    store.close(&mut fresh, true)?;
    Ok(store.into_sentence())
}

/// Replaces the predicates by one colour per set of predicates, adding the
/// cover clause and the pairwise exclusions. Sets ruled out by an atom-free
/// one-variable clause get no colour.
pub fn predicates_to_colours(phi: &Sentence, limits: &Limits) -> Result<Sentence> {
    phi.check()?;
    let preds = phi.colours();
    let n = preds.len();
    if n > limits.max_predicates {
        return Err(Error::Budget { what: "existential predicates", limit: limits.max_predicates as u64 });
    }
    let masks_of = |c: &Clause, v: usize| -> (u32, u32) {
        let (mut pos, mut neg) = (0u32, 0u32);
        for l in c.literals().iter().filter(|l| l.var == v) {
            let bit = 1 << phi.colour_index(&l.colour).expect("validated");
            if l.positive {
                pos |= bit;
            } else {
                neg |= bit;
            }
        }
        (pos, neg)
    };
    let fits = |s: u32, (pos, neg): (u32, u32)| s & pos == pos && s & neg == 0;
    let mut forbidden = vec![false; 1 << n];
    for c in phi.clauses() {
        if c.num_vars() == 1 && c.atoms().is_empty() {
            let m = masks_of(c, 0);
            for (s, f) in forbidden.iter_mut().enumerate() {
                *f |= fits(s as u32, m);
            }
        }
    }
    let mut allowed: Vec<u32> = (0..1u32 << n).filter(|&s| !forbidden[s as usize]).collect();
    if allowed.is_empty() {
        allowed.push(0);
    }
    let mut fresh = Fresh::new(phi);
    let mut name_of = vec![String::new(); 1 << n];
    for &s in &allowed {
        name_of[s as usize] = if s.count_ones() == 1 { preds[s.trailing_zeros() as usize].clone() } else { String::new() };
    }
    for &s in &allowed {
        if name_of[s as usize].is_empty() {
            name_of[s as usize] = fresh.next("M");
        }
    }
    let colours: Vec<String> = allowed.iter().map(|&s| name_of[s as usize].clone()).collect();

    let mut clauses = vec![Clause::cover(&colours)];
    for i in 0..colours.len() {
        for j in i + 1..colours.len() {
            clauses.push(Clause::exclusion(&colours[i], &colours[j]));
        }
    }
    for c in phi.clauses() {
        let mut choices: Vec<(usize, Vec<u32>)> = Vec::new();
        let mut vacuous = false;
        for v in 0..c.num_vars() {
            let m = masks_of(c, v);
            if m == (0, 0) {
                continue;
            }
            let fit: Vec<u32> = allowed.iter().copied().filter(|&s| fits(s, m)).collect();
            if fit.is_empty() {
                vacuous = true;
                break;
            }
            choices.push((v, fit));
        }
        if vacuous {
            continue;
        }
        let total: usize = choices.iter().map(|(_, f)| f.len()).product();
        if clauses.len() + total > limits.max_clauses {
            return Err(Error::Budget { what: "normal-form clauses", limit: limits.max_clauses as u64 });
        }
        let mut pick = vec![0usize; choices.len()];
        loop {
            let lits = choices
                .iter()
                .zip(&pick)
                .map(|((v, fit), &k)| Literal::pos(name_of[fit[k] as usize].clone(), *v));
            clauses.push(Clause::compact(c.vars(), c.atoms().to_vec(), lits.collect()));
            if !advance(&mut pick, |i| choices[i].1.len()) {
                break;
            }
        }
    }
    Ok(Sentence::new(phi.tau().clone(), colours, clauses))
}

/// Odometer step; false once every combination has been produced.
fn advance(pick: &mut [usize], size: impl Fn(usize) -> usize) -> bool {
    for i in (0..pick.len()).rev() {
        pick[i] += 1;
        if pick[i] < size(i) {
            return true;
        }
        pick[i] = 0;
    }
    false
}

/// Gives every variable of every clause (other than the cover clause and the
/// exclusions) exactly one positive colour, expanding over the colours it may
/// take. Negative literals are resolved against the colour set, which is
/// sound because every element carries exactly one colour.
pub fn fully_colour(phi: &Sentence, limits: &Limits) -> Result<Sentence> {
    phi.check()?;
    let k = phi.colours().len();
    let mut out = Vec::new();
    for c in phi.clauses() {
        if c.is_cover_clause(phi.colours()) || c.is_exclusion_clause() {
            out.push(c.clone());
            continue;
        }
        let mut options: Vec<Vec<usize>> = Vec::with_capacity(c.num_vars());
        for v in 0..c.num_vars() {
            let mut pos: Vec<usize> = Vec::new();
            let mut neg = vec![false; k];
            for l in c.literals().iter().filter(|l| l.var == v) {
                let i = phi.colour_index(&l.colour).expect("validated");
                if l.positive {
                    if !pos.contains(&i) {
                        pos.push(i);
                    }
                } else {
                    neg[i] = true;
                }
            }
            let opts: Vec<usize> = match pos.len() {
                0 => (0..k).filter(|&i| !neg[i]).collect(),
                1 if !neg[pos[0]] => pos,
                _ => Vec::new(),
            };
            options.push(opts);
        }
        if options.iter().any(Vec::is_empty) {
            continue;
        }
        let total: usize = options.iter().map(Vec::len).product();
        if out.len() + total > limits.max_clauses {
            return Err(Error::Budget { what: "normal-form clauses", limit: limits.max_clauses as u64 });
        }
        let mut pick = vec![0usize; options.len()];
        loop {
            let lits: Vec<Literal> = pick
                .iter()
                .enumerate()
                .map(|(v, &i)| Literal::pos(phi.colours()[options[v][i]].clone(), v))
                .collect();
            out.push(Clause::compact(c.vars(), c.atoms().to_vec(), lits));
            if !advance(&mut pick, |v| options[v].len()) {
                break;
            }
        }
    }
    Ok(phi.with_clauses(out))
}

/// Computes an equivalent sentence in normal form.
///
/// Steps, in this order: coring and splitting at cut variables, closing
/// under identification of variables, turning predicates into colours,
/// colouring every variable, and a last closure pass that also removes
/// clauses made redundant by the exclusions.
pub fn normalize(phi: &Sentence, limits: &Limits) -> Result<Sentence> {
    let closed = close_small_clauses(phi, limits)?;
    let coloured = predicates_to_colours(&closed, limits)?;
    let full = fully_colour(&coloured, limits)?;

    let mut fresh = Fresh::new(&full);
    let mut store = Store::new(&full, limits);
    for c in full.clauses() {
        store.insert(c.clone(), &mut fresh, false)?;
    }
    store.close(&mut fresh, false)?;
    let result = store.into_sentence();
    Ok(arrange(&result))
}

/// Cover clause, exclusions in colour order, then the remaining clauses in
/// canonical form sorted by size and text.
pub(crate) fn arrange(phi: &Sentence) -> Sentence {
    let colours = phi.colours();
    let mut clauses = vec![Clause::cover(colours)];
    for i in 0..colours.len() {
        for j in i + 1..colours.len() {
            clauses.push(Clause::exclusion(&colours[i], &colours[j]));
        }
    }
    let mut rest: Vec<(usize, String, Clause)> = phi
        .clauses()
        .iter()
        .filter(|c| !c.is_cover_clause(colours) && !c.is_exclusion_clause())
        .map(|c| {
            let c = c.canonical();
            (c.num_vars(), clause_text(&c), c)
        })
        .collect();
    rest.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    rest.dedup_by(|a, b| a.1 == b.1);
    clauses.extend(rest.into_iter().map(|(_, _, c)| c));
    phi.with_clauses(clauses)
}
