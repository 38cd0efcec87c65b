use std::env;

use crate::error::{Error, Result};

/// Resource caps shared by every search in the crate. Exceeding one is
/// reported as [`Error::Budget`], never as a wrong answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Backtracking nodes per individual search.
    pub max_nodes: u64,
    /// Clauses a normal-form computation may hold.
    pub max_clauses: usize,
    /// Existential predicates before they are turned into 2^n colours.
    pub max_predicates: usize,
    /// Sentences produced by the connected decomposition.
    pub max_components: usize,
    /// Refinement rounds of one table search.
    pub max_cegar_iters: usize,
    /// Learned clauses of one table search.
    pub max_learned: usize,
    /// Cells (|colours|^arity) of a searched operation table.
    pub max_table_cells: usize,
    /// Largest colour set the subfactor search accepts.
    pub max_subfactor_colours: usize,
    /// Largest depth accepted when unfolding colour-defining formulas.
    pub max_chi_depth: usize,
    /// Tuple slots of the exhaustive counterexample search in containment.
    pub max_counterexample_slots: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_nodes: 20_000_000,
            max_clauses: 20_000,
            max_predicates: 8,
            max_components: 256,
            max_cegar_iters: 20_000,
            max_learned: 2_000_000,
            max_table_cells: 1 << 20,
            max_subfactor_colours: 4,
            max_chi_depth: 3,
            max_counterexample_slots: 16,
        }
    }
}

impl Limits {
    /// Defaults overridden by `MMSNP_BUDGET_<FIELD>` environment variables,
    /// e.g. `MMSNP_BUDGET_MAX_NODES=1000000`.
    pub fn from_env() -> Result<Self> {
        let mut l = Limits::default();
        macro_rules! read {
            ($($field:ident),*) => {$(
                let key = concat!("MMSNP_BUDGET_", stringify!($field)).to_ascii_uppercase();
                if let Ok(v) = env::var(&key) {
                    l.$field = v.trim().parse().map_err(|_| {
                        Error::Precondition(format!("{key} must be a nonnegative integer, got {v:?}"))
                    })?;
                }
            )*};
        }
        read!(
            max_nodes,
            max_clauses,
            max_predicates,
            max_components,
            max_cegar_iters,
            max_learned,
            max_table_cells,
            max_subfactor_colours,
            max_chi_depth,
            max_counterexample_slots
        );
        Ok(l)
    }
}

/// Node counter for one search.
#[derive(Debug)]
pub(crate) struct Budget {
    used: u64,
    limit: u64,
    what: &'static str,
}

impl Budget {
    pub(crate) fn new(limit: u64, what: &'static str) -> Self {
        Budget { used: 0, limit, what }
    }

    pub(crate) fn nodes(limits: &Limits, what: &'static str) -> Self {
        Budget::new(limits.max_nodes, what)
    }

    #[inline]
    pub(crate) fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::Budget { what: self.what, limit: self.limit });
        }
        Ok(())
    }
}
