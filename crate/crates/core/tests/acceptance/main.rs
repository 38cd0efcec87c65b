//! Acceptance run: one line per criterion, then a check that the failing
//! set is exactly the pinned list of known reds.

mod criteria;
mod gen;
mod oracle;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use mmsnp::Limits;

use criteria::CRITERIA;

/// Criteria that fail for reasons recorded in the decisions ledger: the
/// claimed strong normal form of the vertex-cover sentence is not
/// equivalent to it, and K5 does not satisfy the vertex 2-colouring
/// triangle sentence.
const KNOWN_RED: &[u32] = &[2, 6];

fn main() -> ExitCode {
    let limits = Limits::default();
    // numeric arguments pick criteria; other arguments come from cargo
    let picked: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut red = BTreeSet::new();
    for c in CRITERIA.iter().filter(|c| picked.is_empty() || picked.contains(&c.id)) {
        let start = Instant::now();
        let result = (c.run)(&limits);
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= c.limit, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            red.insert(c.id);
        }
        println!(
            "criterion {:>2} {}: {} [{:.2?} of {:?}] {}",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            elapsed,
            c.limit,
            detail
        );
    }
    let known: BTreeSet<u32> =
        KNOWN_RED.iter().copied().filter(|id| picked.is_empty() || picked.contains(id)).collect();
    if red == known {
        ExitCode::SUCCESS
    } else {
        println!("failing criteria {red:?} differ from the known reds {known:?}");
        ExitCode::FAILURE
    }
}
