//! Whether a colour operation is the colour behaviour of some polymorphism:
//! it is, unless obstruction-free colourings of some obstruction recombine
//! under it into that obstruction.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homsearch::free_colourings;
use crate::limits::{Budget, Limits};
use crate::model::{ColourFunction, FinStructure};
use crate::normalform::ObstructionSet;

/// An obstruction with obstruction-free colourings `c1..ck` of its
/// uncoloured version that `h` combines into the obstruction's own colours.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RealizednessWitness {
    #[serde(skip)]
    pub obstruction: FinStructure,
    pub colourings: Vec<Vec<usize>>,
}

impl RealizednessWitness {
    /// The table cells the witness reads, with the values it needs there.
    pub fn cells(&self, k: usize) -> Vec<(usize, usize)> {
        let arity = self.colourings.len();
        (0..self.obstruction.len())
            .map(|x| {
                let cell = (0..arity).fold(0, |acc, i| acc * k + self.colourings[i][x]);
                (cell, self.obstruction.colour(x).expect("obstructions are totally coloured"))
            })
            .collect()
    }

    /// Whether the witness refutes `h`.
    pub fn refutes(&self, h: &ColourFunction) -> bool {
        self.cells(h.num_colours()).into_iter().all(|(cell, v)| h.table()[cell] == v)
    }
}

struct Entry {
    obstruction: FinStructure,
    colours: Vec<usize>,
    /// Obstruction-free colourings of the uncoloured obstruction, in
    /// lexicographic order.
    free: Vec<Vec<usize>>,
}

/// The obstructions of a sentence, smallest first, with their free
/// colourings precomputed.
pub(crate) struct RealizedChecker {
    k: usize,
    entries: Vec<Entry>,
}

impl RealizedChecker {
    pub fn new(obs: &ObstructionSet, limits: &Limits) -> Result<Self> {
        let mut sorted: Vec<&FinStructure> = obs.structures().iter().collect();
        sorted.sort_by_key(|f| f.len());
        let mut entries = Vec::with_capacity(sorted.len());
        for f in sorted {
            let uncoloured = vec![None; f.len()];
            let free = free_colourings(&f.tau_reduct(), obs, &uncoloured, limits)?.collect::<Result<Vec<_>>>()?;
            entries.push(Entry { obstruction: f.clone(), colours: f.total_colouring(), free });
        }
        Ok(RealizedChecker { k: obs.colours().len(), entries })
    }

    pub fn num_colours(&self) -> usize {
        self.k
    }

    /// Up to `max` witnesses refuting `h`, smallest obstructions first and
    /// colouring tuples in lexicographic order.
    pub fn witnesses(&self, h: &ColourFunction, max: usize, budget: &mut Budget) -> Result<Vec<RealizednessWitness>> {
        if h.num_colours() != self.k {
            return Err(Error::ColourMismatch(format!(
                "operation on {} colours, sentence has {}",
                h.num_colours(),
                self.k
            )));
        }
        let reach = reachable(h);
        let mut out = Vec::new();
        for e in &self.entries {
            if e.free.is_empty() {
                continue;
            }
            let mut chosen = Vec::with_capacity(h.arity());
            let prefix = vec![0usize; e.colours.len()];
            self.extend(e, h.arity(), &reach, &prefix, &mut chosen, max, &mut out, budget)?;
            if out.len() >= max {
                break;
            }
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        e: &Entry,
        arity: usize,
        reach: &[Vec<u64>],
        prefix: &[usize],
        chosen: &mut Vec<usize>,
        max: usize,
        out: &mut Vec<RealizednessWitness>,
        budget: &mut Budget,
    ) -> Result<()> {
        let j = chosen.len();
        if j == arity {
            out.push(RealizednessWitness {
                obstruction: e.obstruction.clone(),
                colourings: chosen.iter().map(|&i| e.free[i].clone()).collect(),
            });
            return Ok(());
        }
        let mut next = vec![0usize; prefix.len()];
        for (i, c) in e.free.iter().enumerate() {
            budget.tick()?;
            let ok = (0..prefix.len()).all(|x| {
                next[x] = prefix[x] * self.k + c[x];
                reach[j + 1][next[x]] >> e.colours[x] & 1 == 1
            });
            if !ok {
                continue;
            }
            chosen.push(i);
            self.extend(e, arity, reach, &next.clone(), chosen, max, out, budget)?;
            chosen.pop();
            if out.len() >= max {
                break;
            }
        }
        Ok(())
    }
}

/// `reach[j][p]`: the values `h` takes on cells whose first `j` arguments
/// encode to `p`.
fn reachable(h: &ColourFunction) -> Vec<Vec<u64>> {
    let k = h.num_colours();
    let mut levels = vec![h.table().iter().map(|&v| 1u64 << v).collect::<Vec<_>>()];
    for _ in 0..h.arity() {
        let below = levels.last().expect("nonempty");
        let up: Vec<u64> = below.chunks(k).map(|c| c.iter().fold(0, |a, &b| a | b)).collect();
        levels.push(up);
    }
    levels.reverse();
    levels
}

/// `None` when `h` is realized; otherwise the first witness against it.
pub fn is_realized(h: &ColourFunction, obs: &ObstructionSet, limits: &Limits) -> Result<Option<RealizednessWitness>> {
    let checker = RealizedChecker::new(obs, limits)?;
    let mut budget = Budget::nodes(limits, "realizedness check");
    Ok(checker.witnesses(h, 1, &mut budget)?.into_iter().next())
}
