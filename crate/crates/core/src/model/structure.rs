use std::collections::BTreeSet;
use std::sync::Arc;

use super::canon::{canonical_labeling, Fact};
use super::{Signature, UnionFind};
use crate::error::{Error, Result};

/// A finite relational structure over a signature, with an optional partial
/// colouring by a fixed colour list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinStructure {
    signature: Arc<Signature>,
    colours: Arc<Vec<String>>,
    elements: Vec<String>,
    relations: Vec<BTreeSet<Vec<usize>>>,
    colouring: Vec<Option<usize>>,
}

impl FinStructure {
    pub fn new(signature: Signature, colours: Vec<String>) -> Self {
        FinStructure::shared(Arc::new(signature), Arc::new(colours))
    }

    pub(crate) fn shared(signature: Arc<Signature>, colours: Arc<Vec<String>>) -> Self {
        let relations = vec![BTreeSet::new(); signature.len()];
        FinStructure { signature, colours, elements: Vec::new(), relations, colouring: Vec::new() }
    }

    /// Empty structure over the same signature and colours.
    pub(crate) fn empty_like(&self) -> Self {
        FinStructure::shared(self.signature.clone(), self.colours.clone())
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn colours(&self) -> &[String] {
        &self.colours
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn element_name(&self, e: usize) -> &str {
        &self.elements[e]
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|n| n == name)
    }

    pub fn add_element(&mut self, name: impl Into<String>) -> usize {
        self.elements.push(name.into());
        self.colouring.push(None);
        self.elements.len() - 1
    }

    /// Adds `n` elements named `e<i>` and returns the first index.
    pub fn add_elements(&mut self, n: usize) -> usize {
        let first = self.len();
        for i in first..first + n {
            self.add_element(format!("e{i}"));
        }
        first
    }

    /// Adds a tuple; returns whether it was new.
    pub fn add_tuple(&mut self, symbol: usize, tuple: Vec<usize>) -> Result<bool> {
        let s = self
            .signature
            .symbols()
            .get(symbol)
            .ok_or_else(|| Error::SignatureMismatch(format!("no symbol with index {symbol}")))?;
        if s.arity != tuple.len() {
            return Err(Error::SignatureMismatch(format!(
                "{} has arity {}, got a tuple of length {}",
                s.name,
                s.arity,
                tuple.len()
            )));
        }
        if let Some(&e) = tuple.iter().find(|&&e| e >= self.len()) {
            return Err(Error::Precondition(format!("element index {e} out of range")));
        }
        Ok(self.relations[symbol].insert(tuple))
    }

    pub fn add_fact(&mut self, symbol: &str, tuple: Vec<usize>) -> Result<bool> {
        let id = self
            .signature
            .index_of(symbol)
            .ok_or_else(|| Error::SignatureMismatch(format!("unknown symbol {symbol}")))?;
        self.add_tuple(id, tuple)
    }

    pub fn tuples(&self, symbol: usize) -> &BTreeSet<Vec<usize>> {
        &self.relations[symbol]
    }

    pub fn has_tuple(&self, symbol: usize, tuple: &[usize]) -> bool {
        self.relations[symbol].contains(tuple)
    }

    pub fn num_tuples(&self) -> usize {
        self.relations.iter().map(BTreeSet::len).sum()
    }

    pub fn colour(&self, e: usize) -> Option<usize> {
        self.colouring[e]
    }

    pub fn colouring(&self) -> &[Option<usize>] {
        &self.colouring
    }

    pub fn colour_index(&self, name: &str) -> Option<usize> {
        self.colours.iter().position(|c| c == name)
    }

    /// Colours `e`; recolouring with a different colour is an error.
    pub fn set_colour(&mut self, e: usize, colour: usize) -> Result<()> {
        if colour >= self.colours.len() {
            return Err(Error::ColourMismatch(format!("no colour with index {colour}")));
        }
        match self.colouring[e] {
            Some(c) if c != colour => Err(Error::Precondition(format!(
                "element {} doubly coloured ({} and {})",
                self.elements[e], self.colours[c], self.colours[colour]
            ))),
            _ => {
                self.colouring[e] = Some(colour);
                Ok(())
            }
        }
    }

    pub fn with_colouring(&self, colouring: Vec<Option<usize>>) -> Self {
        assert_eq!(colouring.len(), self.len());
        FinStructure { colouring, ..self.clone() }
    }

    pub fn with_total_colouring(&self, colouring: &[usize]) -> Self {
        self.with_colouring(colouring.iter().map(|&c| Some(c)).collect())
    }

    /// Same relations, no colours.
    pub fn tau_reduct(&self) -> Self {
        self.with_colouring(vec![None; self.len()])
    }

    pub fn is_totally_coloured(&self) -> bool {
        self.colouring.iter().all(Option::is_some)
    }

    /// Total colouring as a vector; panics on uncoloured elements.
    pub(crate) fn total_colouring(&self) -> Vec<usize> {
        self.colouring.iter().map(|c| c.expect("totally coloured")).collect()
    }

    /// Same structure viewed over a colour list with identical names.
    pub(crate) fn with_colour_list(&self, colours: Arc<Vec<String>>) -> Self {
        FinStructure { colours, ..self.clone() }
    }

    /// Connectivity of the Gaifman graph; the empty structure counts as
    /// connected.
    pub fn is_connected(&self) -> bool {
        let n = self.len();
        if n <= 1 {
            return true;
        }
        let mut uf = UnionFind::new(n);
        let mut k = n;
        for rel in &self.relations {
            for t in rel {
                for w in t.windows(2) {
                    if uf.union(w[0], w[1]) {
                        k -= 1;
                    }
                }
            }
        }
        k == 1
    }

    /// Re-indexes relations into a signature containing this one; symbols
    /// missing here become empty relations.
    pub fn lift(&self, target: &Signature) -> Result<Self> {
        self.lift_arc(&Arc::new(target.clone()))
    }

    pub(crate) fn lift_arc(&self, target: &Arc<Signature>) -> Result<Self> {
        if *self.signature == **target {
            return Ok(FinStructure { signature: target.clone(), ..self.clone() });
        }
        if !self.signature.is_subset_of(target) {
            return Err(Error::SignatureMismatch(
                "structure uses symbols missing from the target signature".into(),
            ));
        }
        let mut relations = vec![BTreeSet::new(); target.len()];
        for (i, s) in self.signature.symbols().iter().enumerate() {
            relations[target.index_of(&s.name).expect("subset")] = self.relations[i].clone();
        }
        Ok(FinStructure {
            signature: target.clone(),
            colours: self.colours.clone(),
            elements: self.elements.clone(),
            relations,
            colouring: self.colouring.clone(),
        })
    }

    /// Image of the structure under `block_of`, which maps elements onto
    /// `0..blocks`. Each block takes the name and colour of its first member.
    pub fn quotient(&self, block_of: &[usize], blocks: usize) -> Self {
        let mut q = self.empty_like();
        let mut first = vec![usize::MAX; blocks];
        for (e, &b) in block_of.iter().enumerate() {
            if first[b] == usize::MAX {
                first[b] = e;
            }
        }
        for &e in &first {
            q.add_element(self.elements[e].clone());
        }
        for (b, &e) in first.iter().enumerate() {
            q.colouring[b] = self.colouring[e];
        }
        for (s, rel) in self.relations.iter().enumerate() {
            for t in rel {
                q.relations[s].insert(t.iter().map(|&e| block_of[e]).collect());
            }
        }
        q
    }

    /// Substructure induced by `keep` (in that order).
    pub fn induced(&self, keep: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.len()];
        let mut out = self.empty_like();
        for (i, &e) in keep.iter().enumerate() {
            pos[e] = i;
            out.add_element(self.elements[e].clone());
            out.colouring[i] = self.colouring[e];
        }
        for (s, rel) in self.relations.iter().enumerate() {
            for t in rel {
                if t.iter().all(|&e| pos[e] != usize::MAX) {
                    out.relations[s].insert(t.iter().map(|&e| pos[e]).collect());
                }
            }
        }
        out
    }

    pub(crate) fn facts(&self, root: Option<usize>) -> Vec<Fact> {
        let ns = self.signature.len() as u32;
        let mut facts: Vec<Fact> = Vec::new();
        for (s, rel) in self.relations.iter().enumerate() {
            for t in rel {
                facts.push((s as u32, t.clone()));
            }
        }
        for (e, c) in self.colouring.iter().enumerate() {
            if let Some(c) = c {
                facts.push((ns + *c as u32, vec![e]));
            }
        }
        if let Some(r) = root {
            facts.push((ns + self.colours.len() as u32, vec![r]));
        }
        facts
    }

    /// Isomorphism-invariant key (optionally of the structure pointed at
    /// `root`): equal keys iff isomorphic.
    pub fn canonical_key(&self, root: Option<usize>) -> (usize, Vec<(u32, Vec<usize>)>) {
        let n = self.len();
        let (_, enc) = canonical_labeling(n, &self.facts(root), &vec![0; n]);
        (n, enc)
    }
}

/// A structure with a distinguished element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedStructure {
    pub structure: FinStructure,
    pub root: usize,
}

/// Disjoint union; elements of `b` whose names clash with `a` get a suffix.
pub fn disjoint_union(a: &FinStructure, b: &FinStructure) -> Result<FinStructure> {
    if a.signature != b.signature {
        return Err(Error::SignatureMismatch("disjoint union of structures over different signatures".into()));
    }
    if a.colours != b.colours {
        return Err(Error::ColourMismatch("disjoint union of structures over different colours".into()));
    }
    let mut out = a.clone();
    let off = a.len();
    let mut names: std::collections::HashSet<String> = a.elements.iter().cloned().collect();
    for (i, name) in b.elements.iter().enumerate() {
        let mut n = name.clone();
        while names.contains(&n) {
            n.push_str("_2");
        }
        names.insert(n.clone());
        out.add_element(n);
        out.colouring[off + i] = b.colouring[i];
    }
    for (s, rel) in b.relations.iter().enumerate() {
        for t in rel {
            out.relations[s].insert(t.iter().map(|&e| e + off).collect());
        }
    }
    Ok(out)
}

/// Partitions of `0..colours.len()` into blocks of equal colour, as block
/// assignments in restricted-growth form. The partition into singletons comes
/// first.
#[derive(Clone, Debug)]
pub(crate) struct Partitions {
    colours: Vec<Option<usize>>,
    assign: Vec<usize>,
    started: bool,
    done: bool,
}

impl Partitions {
    pub(crate) fn new(colours: Vec<Option<usize>>) -> Self {
        Partitions { assign: vec![0; colours.len()], colours, started: false, done: false }
    }

    fn blocks_before(&self, i: usize) -> usize {
        self.assign[..i].iter().max().map_or(0, |m| m + 1)
    }

    fn fill_new(&mut self, from: usize) {
        for i in from..self.assign.len() {
            self.assign[i] = self.blocks_before(i);
        }
    }

    fn block_colour(&self, i: usize, b: usize) -> Option<usize> {
        let e = self.assign[..i].iter().position(|&x| x == b).expect("block exists");
        self.colours[e]
    }

    /// Next admissible choice for position `i` after its current one: the
    /// order is "new block", then blocks `0, 1, ..`.
    fn advance(&mut self, i: usize) -> bool {
        let nb = self.blocks_before(i);
        let cur = self.assign[i];
        let start = if cur == nb { 0 } else { cur + 1 };
        for b in start..nb {
            if self.block_colour(i, b) == self.colours[i] {
                self.assign[i] = b;
                return true;
            }
        }
        false
    }
}

impl Iterator for Partitions {
    /// `(block of each element, number of blocks)`
    type Item = (Vec<usize>, usize);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.fill_new(0);
        } else {
            let mut i = self.assign.len();
            loop {
                if i == 0 {
                    self.done = true;
                    return None;
                }
                i -= 1;
                if self.advance(i) {
                    self.fill_new(i + 1);
                    break;
                }
            }
        }
        let nb = self.blocks_before(self.assign.len());
        Some((self.assign.clone(), nb))
    }
}

/// Stream of the colour-homogeneous quotients of a structure.
pub struct Quotients<'a> {
    a: &'a FinStructure,
    parts: Partitions,
}

impl Iterator for Quotients<'_> {
    type Item = FinStructure;

    fn next(&mut self) -> Option<FinStructure> {
        self.parts.next().map(|(m, k)| self.a.quotient(&m, k))
    }
}

/// All quotients of `a` by partitions whose blocks share a colour, starting
/// with `a` itself.
pub fn quotients(a: &FinStructure) -> Quotients<'_> {
    Quotients { a, parts: Partitions::new(a.colouring.clone()) }
}
