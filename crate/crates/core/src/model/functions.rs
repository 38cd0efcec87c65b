use serde::Serialize;

use crate::error::{Error, Result};

/// A total operation `σ^k → σ` on colour indices. Cells are indexed in mixed
/// radix with the first argument most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ColourFunction {
    arity: usize,
    colours: usize,
    table: Vec<usize>,
}

impl ColourFunction {
    pub fn new(arity: usize, colours: usize, table: Vec<usize>) -> Result<Self> {
        if arity == 0 || colours == 0 {
            return Err(Error::Precondition("colour functions need arity ≥ 1 and at least one colour".into()));
        }
        let cells = cells(colours, arity)?;
        if table.len() != cells {
            return Err(Error::Precondition(format!("table has {} cells, expected {cells}", table.len())));
        }
        if table.iter().any(|&v| v >= colours) {
            return Err(Error::ColourMismatch("table value outside the colour set".into()));
        }
        Ok(ColourFunction { arity, colours, table })
    }

    pub fn from_fn(arity: usize, colours: usize, f: impl Fn(&[usize]) -> usize) -> Result<Self> {
        let n = cells(colours, arity)?;
        let mut args = vec![0; arity];
        let table = (0..n)
            .map(|i| {
                decode_into(i, colours, &mut args);
                f(&args)
            })
            .collect();
        ColourFunction::new(arity, colours, table)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn num_colours(&self) -> usize {
        self.colours
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn index(&self, args: &[usize]) -> usize {
        encode(args, self.colours)
    }

    pub fn eval(&self, args: &[usize]) -> usize {
        self.table[self.index(args)]
    }

    pub fn args_of(&self, cell: usize) -> Vec<usize> {
        let mut v = vec![0; self.arity];
        decode_into(cell, self.colours, &mut v);
        v
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.colours).all(|c| self.eval(&vec![c; self.arity]) == c)
    }

    /// `f(x,y,x,z,y,z) = f(y,x,z,x,z,y)` for all colours.
    pub fn is_siggers(&self) -> bool {
        if self.arity != 6 {
            return false;
        }
        let n = self.colours;
        (0..n).all(|x| {
            (0..n).all(|y| (0..n).all(|z| self.eval(&[x, y, x, z, y, z]) == self.eval(&[y, x, z, x, z, y])))
        })
    }

    /// Invariant under rotating the arguments.
    pub fn is_cyclic(&self) -> bool {
        (0..self.table.len()).all(|i| {
            let mut a = self.args_of(i);
            a.rotate_left(1);
            self.table[i] == self.eval(&a)
        })
    }
}

/// `colours^arity`, guarded against overflow.
pub(crate) fn cells(colours: usize, arity: usize) -> Result<usize> {
    u32::try_from(arity)
        .ok()
        .and_then(|a| colours.checked_pow(a))
        .ok_or_else(|| Error::Precondition("operation table too large".into()))
}

pub(crate) fn encode(args: &[usize], colours: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * colours + a)
}

pub(crate) fn decode_into(mut cell: usize, colours: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = cell % colours;
        cell /= colours;
    }
}

/// A map between two colour lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RecolouringMap {
    source: Vec<String>,
    target: Vec<String>,
    mapping: Vec<usize>,
}

impl RecolouringMap {
    pub fn new(source: Vec<String>, target: Vec<String>, mapping: Vec<usize>) -> Result<Self> {
        if mapping.len() != source.len() {
            return Err(Error::ColourMismatch("map is not total on the source colours".into()));
        }
        if mapping.iter().any(|&t| t >= target.len()) {
            return Err(Error::ColourMismatch("map leaves the target colours".into()));
        }
        Ok(RecolouringMap { source, target, mapping })
    }

    /// Builds a map from `(source, target)` name pairs.
    pub fn from_names(source: &[String], target: &[String], pairs: &[(&str, &str)]) -> Result<Self> {
        let mut mapping = vec![usize::MAX; source.len()];
        for (s, t) in pairs {
            let i = source
                .iter()
                .position(|c| c == s)
                .ok_or_else(|| Error::ColourMismatch(format!("unknown source colour {s}")))?;
            let j = target
                .iter()
                .position(|c| c == t)
                .ok_or_else(|| Error::ColourMismatch(format!("unknown target colour {t}")))?;
            mapping[i] = j;
        }
        RecolouringMap::new(source.to_vec(), target.to_vec(), mapping)
    }

    pub fn identity(colours: &[String]) -> Self {
        RecolouringMap { source: colours.to_vec(), target: colours.to_vec(), mapping: (0..colours.len()).collect() }
    }

    pub fn source(&self) -> &[String] {
        &self.source
    }

    pub fn target(&self) -> &[String] {
        &self.target
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn apply(&self, colour: usize) -> usize {
        self.mapping[colour]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.len()];
        self.mapping.iter().all(|&t| !std::mem::replace(&mut seen[t], true))
    }

    /// Target colours hit by the map, ascending.
    pub fn image(&self) -> Vec<usize> {
        let mut v = self.mapping.clone();
        v.sort_unstable();
        v.dedup();
        v
    }
}

impl std::fmt::Display for RecolouringMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> =
            self.mapping.iter().enumerate().map(|(i, &t)| format!("{} -> {}", self.source[i], self.target[t])).collect();
        f.write_str(&parts.join(", "))
    }
}
