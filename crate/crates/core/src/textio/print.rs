use std::fmt::Write;

use crate::model::{Clause, FinStructure, Sentence, Signature};

fn header(out: &mut String, sig: &Signature, colours: &[String]) {
    let decls: Vec<String> = sig.symbols().iter().map(|s| format!("{}/{}", s.name, s.arity)).collect();
    if decls.is_empty() {
        out.push_str("signature { }\n");
    } else {
        let _ = writeln!(out, "signature {{ {} }}", decls.join(", "));
    }
    if colours.is_empty() {
        out.push_str("colors { }\n");
    } else {
        let _ = writeln!(out, "colors {{ {} }}", colours.join(", "));
    }
}

pub(crate) fn clause_text(c: &Clause) -> String {
    let mut parts: Vec<String> = Vec::new();
    for a in c.atoms() {
        let args: Vec<&str> = a.args.iter().map(|&v| c.vars()[v].as_str()).collect();
        parts.push(format!("{}({})", a.symbol, args.join(",")));
    }
    for l in c.literals() {
        let sign = if l.positive { "" } else { "-" };
        parts.push(format!("{sign}{}({})", l.colour, c.vars()[l.var]));
    }
    format!("forbid {{ {} }}", parts.join(", "))
}

/// Prints a sentence; the output parses back to an equal sentence.
pub fn print_sentence(s: &Sentence) -> String {
    let mut out = String::new();
    header(&mut out, s.tau(), s.colours());
    for c in s.clauses() {
        out.push_str(&clause_text(c));
        out.push('\n');
    }
    out
}

/// Prints a structure with its signature and colour header. Facts are sorted
/// by their element tuple, then by symbol; colour facts follow.
pub fn print_structure(a: &FinStructure) -> String {
    let mut out = String::new();
    header(&mut out, a.signature(), a.colours());
    let _ = writeln!(out, "structure {{");
    let _ = writeln!(out, "  domain {{ {} }}", a.elements().join(", "));
    let mut facts: Vec<(&Vec<usize>, usize)> = Vec::new();
    for s in 0..a.signature().len() {
        for t in a.tuples(s) {
            facts.push((t, s));
        }
    }
    facts.sort();
    for (t, s) in facts {
        let args: Vec<&str> = t.iter().map(|&e| a.element_name(e)).collect();
        let _ = writeln!(out, "  {}({})", a.signature().symbol(s).name, args.join(","));
    }
    for e in 0..a.len() {
        if let Some(c) = a.colour(e) {
            let _ = writeln!(out, "  colour {}({})", a.colours()[c], a.element_name(e));
        }
    }
    out.push_str("}\n");
    out
}
