//! Clauses viewed as relational structures: relational atoms plus one unary
//! relation per signed colour literal. Used for coring, subsumption and the
//! small-clause check.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::homsearch::{SourcePlan, TargetIndex};
use crate::limits::Budget;
use crate::model::{Clause, FinStructure, Sentence, Signature};
use crate::Result;

pub(crate) struct ClauseVocab {
    sig: Arc<Signature>,
    none: Arc<Vec<String>>,
    index: HashMap<String, usize>,
}

fn lit_name(colour: &str, positive: bool) -> String {
    format!("{}{colour}", if positive { '+' } else { '-' })
}

impl ClauseVocab {
    pub(crate) fn new(phi: &Sentence) -> Self {
        let mut sig = phi.tau().clone();
        for c in phi.colours() {
            sig.add(lit_name(c, true), 1).expect("fresh literal symbol");
            sig.add(lit_name(c, false), 1).expect("fresh literal symbol");
        }
        let index = sig.symbols().iter().enumerate().map(|(i, s)| (s.name.clone(), i)).collect();
        ClauseVocab { sig: Arc::new(sig), none: Arc::new(Vec::new()), index }
    }

    pub(crate) fn structure(&self, c: &Clause) -> FinStructure {
        let mut a = FinStructure::shared(self.sig.clone(), self.none.clone());
        for v in c.vars() {
            a.add_element(v.clone());
        }
        for at in c.atoms() {
            a.add_tuple(self.index[&at.symbol], at.args.clone()).expect("valid atom");
        }
        for l in c.literals() {
            a.add_tuple(self.index[&lit_name(&l.colour, l.positive)], vec![l.var]).expect("valid literal");
        }
        a
    }

    fn labels(c: &Clause) -> BTreeSet<String> {
        c.atoms()
            .iter()
            .map(|a| a.symbol.clone())
            .chain(c.literals().iter().map(|l| lit_name(&l.colour, l.positive)))
            .collect()
    }

    /// Whether the conjunction of `d` maps homomorphically into that of `c`
    /// (then `¬d` implies `¬c`).
    pub(crate) fn maps_into(&self, d: &Clause, c: &Clause, budget: &mut Budget) -> Result<bool> {
        if !ClauseVocab::labels(d).is_subset(&ClauseVocab::labels(c)) {
            return Ok(false);
        }
        let src = self.structure(d);
        let tgt = self.structure(c);
        let plan = SourcePlan::new(&src, None);
        let index = TargetIndex::new(&tgt);
        let s = crate::homsearch::search(&plan, &index, tgt.colouring(), None, None);
        Ok(s.run(budget)?.is_some())
    }

    /// The core of the clause's conjunction: a minimal subclause it maps onto.
    pub(crate) fn core(&self, c: &Clause, budget: &mut Budget) -> Result<Clause> {
        let mut cur = c.clone();
        'outer: loop {
            let a = self.structure(&cur);
            let index = TargetIndex::new(&a);
            let plan = SourcePlan::new(&a, None);
            for v in 0..cur.num_vars() {
                let avoid = move |_s: usize, t: usize| t != v;
                let s = crate::homsearch::search(&plan, &index, a.colouring(), None, Some(&avoid));
                if let Some(m) = s.run(budget)? {
                    let mut keep: Vec<usize> = m.clone();
                    keep.sort_unstable();
                    keep.dedup();
                    cur = cur.restrict(&keep);
                    continue 'outer;
                }
            }
            return Ok(cur);
        }
    }
}
