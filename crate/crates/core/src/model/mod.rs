//! Signatures, clauses, sentences, finite structures and the values produced
//! by the decision procedures.

mod canon;
pub(crate) mod functions;
mod report;
pub(crate) mod structure;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Diagnostic, Error, Result};

pub use functions::{ColourFunction, RecolouringMap};
pub use report::{ClassificationReport, ComponentReport, SearchStats, Subfactor, Verdict, Witness};
pub use structure::{disjoint_union, quotients, FinStructure, PointedStructure, Quotients};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of relation symbols with unique names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn from_symbols<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut sig = Signature::new();
        for (name, arity) in symbols {
            sig.add(name, arity)?;
        }
        Ok(sig)
    }

    /// Appends a symbol and returns its index.
    pub fn add(&mut self, name: impl Into<String>, arity: usize) -> Result<usize> {
        let name = name.into();
        if arity == 0 {
            return Err(Error::Invalid(vec![Diagnostic::new(
                "arity",
                format!("symbol {name} has arity 0"),
            )]));
        }
        if self.index_of(&name).is_some() {
            return Err(Error::Invalid(vec![Diagnostic::new(
                "duplicate-symbol",
                format!("symbol {name} declared twice"),
            )]));
        }
        self.symbols.push(Symbol { name, arity });
        Ok(self.symbols.len() - 1)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn symbol(&self, id: usize) -> &Symbol {
        &self.symbols[id]
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn arity(&self, id: usize) -> usize {
        self.symbols[id].arity
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// True when every symbol of `self` occurs in `other` with the same arity.
    pub fn is_subset_of(&self, other: &Signature) -> bool {
        self.symbols
            .iter()
            .all(|s| other.index_of(&s.name).is_some_and(|j| other.arity(j) == s.arity))
    }
}

/// A relational atom `R(x1,..,xk)`; arguments index the clause's variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub symbol: String,
    pub args: Vec<usize>,
}

impl Atom {
    pub fn new(symbol: impl Into<String>, args: Vec<usize>) -> Self {
        Atom { symbol: symbol.into(), args }
    }
}

/// A colour literal `M(x)` or `-M(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub colour: String,
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(colour: impl Into<String>, var: usize) -> Self {
        Literal { colour: colour.into(), var, positive: true }
    }

    pub fn neg(colour: impl Into<String>, var: usize) -> Self {
        Literal { colour: colour.into(), var, positive: false }
    }
}

/// One forbidden conjunction `¬(α ∧ β)`: relational atoms α and colour
/// literals β over a shared set of variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    vars: Vec<String>,
    atoms: Vec<Atom>,
    literals: Vec<Literal>,
}

impl Clause {
    /// Builds a clause, rejecting out-of-range or unused variables. Repeated
    /// atoms and literals are dropped and variables are reordered by first
    /// occurrence (atoms before literals).
    pub fn new(vars: Vec<String>, atoms: Vec<Atom>, literals: Vec<Literal>) -> Result<Self> {
        let n = vars.len();
        let mut used = vec![false; n];
        for a in &atoms {
            for &v in &a.args {
                if v >= n {
                    return Err(Error::Precondition(format!("variable index {v} out of range")));
                }
                used[v] = true;
            }
        }
        for l in &literals {
            if l.var >= n {
                return Err(Error::Precondition(format!("variable index {} out of range", l.var)));
            }
            used[l.var] = true;
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::Precondition(format!("variable {} is not used", vars[v])));
        }
        let names: HashSet<&String> = vars.iter().collect();
        if names.len() != n {
            return Err(Error::Precondition("repeated variable name".into()));
        }
        Ok(Clause::compact(&vars, atoms, literals))
    }

    /// Builds a clause over variables `0..names.len()`, dropping unused
    /// variables and renumbering the rest by first occurrence.
    pub(crate) fn compact(names: &[String], atoms: Vec<Atom>, literals: Vec<Literal>) -> Self {
        let mut map = vec![usize::MAX; names.len()];
        let mut vars = Vec::new();
        let mut id = |v: usize, vars: &mut Vec<String>| {
            if map[v] == usize::MAX {
                map[v] = vars.len();
                vars.push(names[v].clone());
            }
            map[v]
        };
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|a| Atom { args: a.args.iter().map(|&v| id(v, &mut vars)).collect(), symbol: a.symbol })
            .collect();
        let literals: Vec<Literal> = literals
            .into_iter()
            .map(|l| Literal { var: id(l.var, &mut vars), ..l })
            .collect();
        Clause { vars, atoms: dedup(atoms), literals: dedup(literals) }
    }

    /// Variable names `v1..vn` for `n` variables.
    pub(crate) fn fresh_names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("v{i}")).collect()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    /// `¬(¬M1(x) ∧ .. ∧ ¬Mn(x))` for exactly the given colours.
    pub fn is_cover_clause(&self, colours: &[String]) -> bool {
        self.vars.len() == 1
            && self.atoms.is_empty()
            && self.literals.iter().all(|l| !l.positive)
            && self.literals.len() == colours.len()
            && colours.iter().all(|c| self.literals.iter().any(|l| &l.colour == c))
    }

    /// `¬(Mi(x) ∧ Mj(x))` for two distinct colours.
    pub fn is_exclusion_clause(&self) -> bool {
        self.vars.len() == 1
            && self.atoms.is_empty()
            && self.literals.len() == 2
            && self.literals.iter().all(|l| l.positive)
            && self.literals[0].colour != self.literals[1].colour
    }

    pub fn cover(colours: &[String]) -> Self {
        Clause {
            vars: vec!["x".into()],
            atoms: vec![],
            literals: colours.iter().map(|c| Literal::neg(c.clone(), 0)).collect(),
        }
    }

    pub fn exclusion(a: &str, b: &str) -> Self {
        Clause {
            vars: vec!["x".into()],
            atoms: vec![],
            literals: vec![Literal::pos(a, 0), Literal::pos(b, 0)],
        }
    }

    /// Positive colour literals of a variable.
    pub fn colours_of(&self, v: usize) -> impl Iterator<Item = &str> {
        self.literals.iter().filter(move |l| l.var == v && l.positive).map(|l| l.colour.as_str())
    }

    /// Connectivity of the incidence graph of atoms and literals.
    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Variable sets of the connected components of the incidence graph.
    pub(crate) fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vars.len();
        let mut uf = UnionFind::new(n);
        for a in &self.atoms {
            for w in a.args.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut idx = vec![usize::MAX; n];
        for v in 0..n {
            let r = uf.find(v);
            if idx[r] == usize::MAX {
                idx[r] = comps.len();
                comps.push(Vec::new());
            }
            comps[idx[r]].push(v);
        }
        comps
    }

    /// Returns a clause with each variable replaced by `map[v]`, over `names`.
    pub(crate) fn substitute(&self, map: &[usize], names: &[String]) -> Clause {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { symbol: a.symbol.clone(), args: a.args.iter().map(|&v| map[v]).collect() })
            .collect();
        let literals = self.literals.iter().map(|l| Literal { var: map[l.var], ..l.clone() }).collect();
        Clause::compact(names, atoms, literals)
    }

    /// Restriction to the given variables (atoms must lie inside them).
    pub(crate) fn restrict(&self, keep: &[usize]) -> Clause {
        let set: BTreeSet<usize> = keep.iter().copied().collect();
        let atoms = self.atoms.iter().filter(|a| a.args.iter().all(|v| set.contains(v))).cloned().collect();
        let literals = self.literals.iter().filter(|l| set.contains(&l.var)).cloned().collect();
        Clause::compact(&self.vars, atoms, literals)
    }

    /// True when some variable carries both `P(x)` and `-P(x)`; the negated
    /// conjunction is then a tautology.
    pub(crate) fn is_contradictory(&self) -> bool {
        self.literals.iter().any(|l| {
            l.positive
                && self.literals.iter().any(|m| !m.positive && m.var == l.var && m.colour == l.colour)
        })
    }

    pub(crate) fn rename_colours(&self, f: &dyn Fn(&str) -> String) -> Clause {
        let literals = self.literals.iter().map(|l| Literal { colour: f(&l.colour), ..l.clone() }).collect();
        Clause::compact(&self.vars, self.atoms.clone(), literals)
    }

    /// Canonical representative of the clause's isomorphism class; variables
    /// are named `v1..vn`.
    pub fn canonical(&self) -> Clause {
        canon::canonical_clause(self)
    }
}

/// See [`Clause::canonical`].
pub fn canonical_clause_form(clause: &Clause) -> Clause {
    clause.canonical()
}

fn dedup<T: Clone + Eq + std::hash::Hash>(items: Vec<T>) -> Vec<T> {
    let mut seen = HashSet::new();
    items.into_iter().filter(|x| seen.insert(x.clone())).collect()
}

/// An MMSNP sentence `∃σ ∀x̄ ⋀ ¬(α ∧ β)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    tau: Signature,
    colours: Vec<String>,
    clauses: Vec<Clause>,
}

impl Sentence {
    /// Assembles a sentence without checking it; see [`Sentence::validate`].
    pub fn new(tau: Signature, colours: Vec<String>, clauses: Vec<Clause>) -> Self {
        Sentence { tau, colours, clauses }
    }

    /// Assembles a sentence and rejects it if [`Sentence::validate`] complains.
    pub fn try_new(tau: Signature, colours: Vec<String>, clauses: Vec<Clause>) -> Result<Self> {
        let s = Sentence::new(tau, colours, clauses);
        s.check()?;
        Ok(s)
    }

    pub fn tau(&self) -> &Signature {
        &self.tau
    }

    pub fn colours(&self) -> &[String] {
        &self.colours
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn colour_index(&self, name: &str) -> Option<usize> {
        self.colours.iter().position(|c| c == name)
    }

    /// The largest number of variables of a clause, at least 1.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Clause::num_vars).max().unwrap_or(1).max(1)
    }

    pub(crate) fn check(&self) -> Result<()> {
        let d = self.validate();
        if d.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(d))
        }
    }

    /// Type-level problems: unknown names, wrong arities, clashes between
    /// colour and symbol names.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for s in self.tau.symbols() {
            if s.arity == 0 {
                out.push(Diagnostic::new("arity", format!("symbol {} has arity 0", s.name)));
            }
            if !seen.insert(s.name.as_str()) {
                out.push(Diagnostic::new("duplicate-symbol", format!("symbol {} declared twice", s.name)));
            }
        }
        let mut seen_c = HashSet::new();
        for c in &self.colours {
            if !seen_c.insert(c.as_str()) {
                out.push(Diagnostic::new("duplicate-colour", format!("colour {c} declared twice")));
            }
            if self.tau.index_of(c).is_some() {
                out.push(Diagnostic::new(
                    "colour-symbol-clash",
                    format!("{c} is both a colour and a relation symbol"),
                ));
            }
        }
        for (i, cl) in self.clauses.iter().enumerate() {
            let n = cl.vars.len();
            let mut used = vec![false; n];
            for a in &cl.atoms {
                match self.tau.index_of(&a.symbol) {
                    None => out.push(Diagnostic::new(
                        "undeclared-symbol",
                        format!("clause {}: undeclared symbol {}", i + 1, a.symbol),
                    )),
                    Some(id) if self.tau.arity(id) != a.args.len() => out.push(Diagnostic::new(
                        "arity",
                        format!(
                            "clause {}: {} has arity {} but is used with {} arguments",
                            i + 1,
                            a.symbol,
                            self.tau.arity(id),
                            a.args.len()
                        ),
                    )),
                    Some(_) => {}
                }
                for &v in &a.args {
                    if v < n {
                        used[v] = true;
                    } else {
                        out.push(Diagnostic::new("variable", format!("clause {}: bad variable index", i + 1)));
                    }
                }
            }
            for l in &cl.literals {
                if self.colour_index(&l.colour).is_none() {
                    out.push(Diagnostic::new(
                        "undeclared-colour",
                        format!("clause {}: undeclared colour {}", i + 1, l.colour),
                    ));
                }
                if l.var < n {
                    used[l.var] = true;
                } else {
                    out.push(Diagnostic::new("variable", format!("clause {}: bad variable index", i + 1)));
                }
            }
            if let Some(v) = used.iter().position(|u| !u) {
                out.push(Diagnostic::new(
                    "unused-variable",
                    format!("clause {}: variable {} occurs nowhere", i + 1, cl.vars[v]),
                ));
            }
        }
        out
    }

    /// Every clause connected (incidence of atoms and literals).
    pub fn is_connected(&self) -> bool {
        self.clauses.iter().all(Clause::is_connected)
    }

    pub(crate) fn with_clauses(&self, clauses: Vec<Clause>) -> Sentence {
        Sentence { tau: self.tau.clone(), colours: self.colours.clone(), clauses }
    }

    /// Same sentence with colours renamed by `map` (old name → new name).
    pub fn rename_colours(&self, map: &dyn Fn(&str) -> String) -> Sentence {
        Sentence {
            tau: self.tau.clone(),
            colours: self.colours.iter().map(|c| map(c)).collect(),
            clauses: self.clauses.iter().map(|c| c.rename_colours(map)).collect(),
        }
    }

    /// The set of canonical clause forms; equal for sentences that differ
    /// only in clause order, duplicates and variable names.
    pub fn canonical_clause_set(&self) -> BTreeSet<String> {
        self.clauses.iter().map(|c| format!("{:?}", c.canonical())).collect()
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::textio::print_sentence(self))
    }
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_colouring() -> Sentence {
        let tau = Signature::from_symbols([("E", 2)]).unwrap();
        let colours = vec!["A".to_string(), "B".to_string()];
        let xy = vec!["x".to_string(), "y".to_string()];
        let mono = |c: &str| {
            Clause::new(xy.clone(), vec![Atom::new("E", vec![0, 1])], vec![Literal::pos(c, 0), Literal::pos(c, 1)])
                .unwrap()
        };
        Sentence::new(
            tau,
            colours.clone(),
            vec![Clause::cover(&colours), Clause::exclusion("A", "B"), mono("A"), mono("B")],
        )
    }

    #[test]
    fn well_formed_sentence_has_no_diagnostics() {
        assert!(two_colouring().validate().is_empty());
    }

    #[test]
    fn undeclared_symbol_is_named() {
        let s = two_colouring();
        let bad = Clause::new(vec!["x".into(), "y".into()], vec![Atom::new("F", vec![0, 1])], vec![]).unwrap();
        let mut clauses = s.clauses().to_vec();
        clauses.push(bad);
        let d = s.with_clauses(clauses).validate();
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains('F'));
    }

    #[test]
    fn wrong_arity_is_reported() {
        let s = two_colouring();
        let bad = Clause::new(vec!["x".into()], vec![Atom::new("E", vec![0])], vec![]).unwrap();
        let d = s.with_clauses(vec![bad]).validate();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, "arity");
    }

    #[test]
    fn zero_arity_rejected() {
        assert!(Signature::from_symbols([("Z", 0)]).is_err());
    }

    #[test]
    fn clause_rejects_unused_variable() {
        assert!(Clause::new(vec!["x".into(), "y".into()], vec![Atom::new("E", vec![0, 0])], vec![]).is_err());
    }

    #[test]
    fn compact_renumbers_by_first_occurrence() {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let c = Clause::compact(&names, vec![Atom::new("E", vec![2, 0])], vec![]);
        assert_eq!(c.vars(), &["c".to_string(), "a".to_string()]);
        assert_eq!(c.atoms()[0].args, vec![0, 1]);
    }
}
