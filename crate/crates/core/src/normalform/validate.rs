use super::clausehom::ClauseVocab;
use super::steps::is_biconnected;
use crate::error::{Diagnostic, Result};
use crate::limits::{Budget, Limits};
use crate::model::structure::Partitions;
use crate::model::{Clause, FinStructure, Sentence};
use crate::textio::print::clause_text;

/// Connectivity and items 1–3 of the normal form; with `biconnected` also
/// item 4.
pub(crate) fn structural_normal_form(phi: &Sentence, biconnected: bool) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let colours = phi.colours();
    if colours.is_empty() {
        out.push(Diagnostic::new("nf-cover", "a sentence in normal form has at least one colour"));
    }
    if !phi.is_connected() {
        out.push(Diagnostic::new("nf-connected", "some clause is not connected"));
    }
    match phi.clauses().first() {
        _ if colours.is_empty() => {}
        Some(c) if c.is_cover_clause(colours) => {}
        _ => out.push(Diagnostic::new(
            "nf-cover",
            "the first clause must state that every element has a colour",
        )),
    }
    for i in 0..colours.len() {
        for j in i + 1..colours.len() {
            let present = phi.clauses().iter().any(|c| {
                c.is_exclusion_clause()
                    && c.literals().iter().any(|l| l.colour == colours[i])
                    && c.literals().iter().any(|l| l.colour == colours[j])
            });
            if !present {
                out.push(Diagnostic::new(
                    "nf-exclusion",
                    format!("missing clause forbidding {} and {} on one element", colours[i], colours[j]),
                ));
            }
        }
    }
    for (k, c) in phi.clauses().iter().enumerate().skip(1) {
        if c.literals().iter().any(|l| !l.positive) {
            out.push(Diagnostic::new(
                "nf-coloured",
                format!("clause {} has a negative colour literal: {}", k + 1, clause_text(c)),
            ));
            continue;
        }
        if let Some(v) = (0..c.num_vars()).find(|&v| c.colours_of(v).next().is_none()) {
            out.push(Diagnostic::new(
                "nf-coloured",
                format!("clause {}: variable {} has no colour", k + 1, c.vars()[v]),
            ));
        }
        if biconnected && !c.is_exclusion_clause() && !is_biconnected(c) {
            out.push(Diagnostic::new(
                "nf-biconnected",
                format!("clause {} is not biconnected: {}", k + 1, clause_text(c)),
            ));
        }
    }
    out
}

/// The canonical database of a clause over the sentence's vocabulary, using
/// the first positive colour of each variable.
fn clause_structure(phi: &Sentence, c: &Clause) -> Result<FinStructure> {
    let mut a = FinStructure::new(phi.tau().clone(), phi.colours().to_vec());
    for v in c.vars() {
        a.add_element(v.clone());
    }
    for at in c.atoms() {
        a.add_fact(&at.symbol, at.args.clone())?;
    }
    for v in 0..c.num_vars() {
        if let Some(col) = c.colours_of(v).next() {
            a.set_colour(v, phi.colour_index(col).expect("declared"))?;
        }
    }
    Ok(a)
}

/// Diagnostics for all five normal-form items. Item 5 is checked on every
/// identification pattern of every clause down to at most
/// `min(size_cap, |Φ|)` elements: each such image must already violate a
/// clause with no more variables than it has elements. Witnesses are listed
/// largest first.
pub fn validate_normal_form(phi: &Sentence, size_cap: usize) -> Vec<Diagnostic> {
    let mut out = phi.validate();
    if !out.is_empty() {
        return out;
    }
    out.extend(structural_normal_form(phi, true));
    match small_clause_witnesses(phi, size_cap.min(phi.size()), &Limits::default()) {
        Ok(found) => out.extend(found),
        Err(e) => out.push(Diagnostic::new("nf-small-clauses", format!("check abandoned: {e}"))),
    }
    out
}

fn small_clause_witnesses(phi: &Sentence, cap: usize, limits: &Limits) -> Result<Vec<Diagnostic>> {
    let vocab = ClauseVocab::new(phi);
    let mut budget = Budget::nodes(limits, "normal-form validation");
    let mut found: Vec<(usize, Diagnostic)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for c in phi.clauses() {
        let n = c.num_vars();
        if n <= 1 {
            continue;
        }
        // variables may merge only when their positive colours agree
        let keys: Vec<Vec<&str>> = (0..n)
            .map(|v| {
                let mut k: Vec<&str> = c.colours_of(v).collect();
                k.sort_unstable();
                k.dedup();
                k
            })
            .collect();
        let mut ids: Vec<&Vec<&str>> = Vec::new();
        let classes: Vec<Option<usize>> = keys
            .iter()
            .map(|k| {
                Some(ids.iter().position(|x| *x == k).unwrap_or_else(|| {
                    ids.push(k);
                    ids.len() - 1
                }))
            })
            .collect();
        for (block_of, blocks) in Partitions::new(classes) {
            if blocks >= n || blocks > cap {
                continue;
            }
            let q = c.substitute(&block_of, c.vars());
            if q.is_contradictory() {
                continue;
            }
            let mut explained = false;
            for d in phi.clauses() {
                if d.num_vars() <= blocks && vocab.maps_into(d, &q, &mut budget)? {
                    explained = true;
                    break;
                }
            }
            if !explained && seen.insert(clause_text(&q.canonical())) {
                let w = clause_structure(phi, &q)?;
                let d = Diagnostic::new(
                    "nf-small-clauses",
                    format!(
                        "a {blocks}-element image of `{}` violates no clause with at most {blocks} variables",
                        clause_text(c)
                    ),
                )
                .with_witness(w);
                found.push((blocks, d));
            }
        }
    }
    found.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(found.into_iter().map(|(_, d)| d).collect())
}
