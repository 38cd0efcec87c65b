use serde::Serialize;

/// Complexity of the problem described by a sentence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "P")]
    P,
    #[serde(rename = "NP-complete")]
    NpComplete,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::P => "P",
            Verdict::NpComplete => "NP-complete",
        })
    }
}

/// A subset `rho` of colours with a two-block partition `{s, t}` (colour
/// names).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Subfactor {
    pub rho: Vec<String>,
    pub s: Vec<String>,
    pub t: Vec<String>,
}

/// Evidence for a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// A realized 6-ary Siggers operation; `table` lists the value of every
    /// cell in mixed-radix order, first argument most significant.
    Siggers { arity: usize, colours: Vec<String>, table: Vec<String> },
    /// A trivial subfactor of the realized colour operations.
    Subfactor(Subfactor),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub colours: usize,
    pub clauses: usize,
    pub siggers_iterations: usize,
    pub siggers_learned: usize,
    pub subfactor_candidates: usize,
    pub subfactor_searches: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    /// The connected component as decomposed from the input.
    pub sentence: String,
    pub verdict: Verdict,
    pub witness: Witness,
    pub stats: SearchStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub components: Vec<ComponentReport>,
    pub overall: Verdict,
    pub caveats: Vec<String>,
}

impl ClassificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
