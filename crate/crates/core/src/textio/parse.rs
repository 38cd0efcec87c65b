use std::collections::HashMap;

use super::lexer::{lex, Tok, Token};
use super::{ParseError, SourceSpan};
use crate::model::{Atom, Clause, FinStructure, Literal, Sentence, Signature};

struct Parser<'a> {
    toks: Vec<Token<'a>>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> PResult<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Token<'a> {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Token<'a> {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> Token<'a> {
        let t = self.toks[self.pos].clone();
        if t.kind != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, span: SourceSpan, message: impl Into<String>, expected: Option<&str>) -> ParseError {
        ParseError { message: message.into(), span, expected: expected.map(str::to_string) }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let t = self.peek();
        if t.kind == Tok::Equals {
            return self.error_at(t.span, "equality not permitted in MMSNP", None);
        }
        let found = if t.kind == Tok::Eof { "end of input".to_string() } else { format!("{:?}", t.text) };
        self.error_at(t.span, format!("unexpected {found}"), Some(expected))
    }

    fn expect(&mut self, kind: Tok, what: &str) -> PResult<Token<'a>> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn keyword(&mut self, words: &[&str]) -> PResult<Token<'a>> {
        let t = self.peek();
        if t.kind == Tok::Word && words.contains(&t.text) {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&format!("`{}`", words[0])))
        }
    }

    fn at_keyword(&self, word: &str) -> bool {
        let t = self.peek();
        t.kind == Tok::Word && t.text == word
    }

    fn name(&mut self) -> PResult<Token<'a>> {
        self.expect(Tok::Word, "a name")
    }

    /// `{ item (, item)* }` with an optional trailing comma; possibly empty.
    fn braced_list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.expect(Tok::LBrace, "`{`")?;
        let mut out = Vec::new();
        loop {
            if self.peek().kind == Tok::RBrace {
                self.bump();
                return Ok(out);
            }
            out.push(item(self)?);
            match self.peek().kind {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBrace => {}
                _ => return Err(self.unexpected("`,` or `}`")),
            }
        }
    }

    fn signature(&mut self) -> PResult<Signature> {
        self.keyword(&["signature"])?;
        let decls = self.braced_list(|p| {
            let n = p.name()?;
            p.expect(Tok::Slash, "`/`")?;
            let a = p.name()?;
            let arity: usize =
                a.text.parse().map_err(|_| p.error_at(a.span, "arity must be a number", Some("an arity")))?;
            if arity == 0 {
                return Err(p.error_at(a.span, "arity-0 symbols are not allowed", None));
            }
            Ok((n, arity))
        })?;
        let mut sig = Signature::new();
        for (n, a) in decls {
            if sig.index_of(n.text).is_some() {
                return Err(self.error_at(n.span, format!("symbol {} declared twice", n.text), None));
            }
            sig.add(n.text, a).expect("checked");
        }
        Ok(sig)
    }

    fn colours(&mut self, sig: &Signature) -> PResult<Vec<String>> {
        self.keyword(&["colors", "colours"])?;
        let names = self.braced_list(|p| p.name())?;
        let mut out: Vec<String> = Vec::new();
        for n in names {
            if out.iter().any(|c| c == n.text) {
                return Err(self.error_at(n.span, format!("colour {} declared twice", n.text), None));
            }
            if sig.index_of(n.text).is_some() {
                return Err(self.error_at(n.span, format!("{} is both a colour and a relation symbol", n.text), None));
            }
            out.push(n.text.to_string());
        }
        Ok(out)
    }

    fn args(&mut self) -> PResult<Vec<Token<'a>>> {
        self.expect(Tok::LParen, "`(`")?;
        let mut out = vec![self.name()?];
        loop {
            match self.peek().kind {
                Tok::Comma => {
                    self.bump();
                    out.push(self.name()?);
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(out);
                }
                _ => return Err(self.unexpected("`,` or `)`")),
            }
        }
    }

    fn clause(&mut self, sig: &Signature, colours: &[String]) -> PResult<Clause> {
        let open = self.keyword(&["forbid"])?;
        let mut vars: Vec<String> = Vec::new();
        let mut atoms = Vec::new();
        let mut literals = Vec::new();
        let lits = self.braced_list(|p| {
            let negative = if p.peek().kind == Tok::Minus {
                p.bump();
                true
            } else {
                false
            };
            let head = p.name()?;
            if p.peek().kind == Tok::Equals {
                return Err(p.error_at(p.peek().span, "equality not permitted in MMSNP", None));
            }
            let args = p.args()?;
            Ok((negative, head, args))
        })?;
        if lits.is_empty() {
            return Err(self.error_at(open.span, "empty clause", Some("at least one literal")));
        }
        for (negative, head, args) in lits {
            let mut idx = |t: &Token| match vars.iter().position(|v| v == t.text) {
                Some(i) => i,
                None => {
                    vars.push(t.text.to_string());
                    vars.len() - 1
                }
            };
            if colours.iter().any(|c| c == head.text) {
                if args.len() != 1 {
                    return Err(self.error_at(head.span, format!("colour {} takes one argument", head.text), None));
                }
                let v = idx(&args[0]);
                literals.push(Literal { colour: head.text.to_string(), var: v, positive: !negative });
            } else if let Some(id) = sig.index_of(head.text) {
                if negative {
                    return Err(self.error_at(head.span, "relation atoms cannot be negated in MMSNP", None));
                }
                if sig.arity(id) != args.len() {
                    return Err(self.error_at(
                        head.span,
                        format!("{} has arity {} but is used with {} arguments", head.text, sig.arity(id), args.len()),
                        None,
                    ));
                }
                let a = args.iter().map(&mut idx).collect();
                atoms.push(Atom { symbol: head.text.to_string(), args: a });
            } else {
                return Err(self.error_at(
                    head.span,
                    format!("unknown symbol or colour {}", head.text),
                    Some("a declared symbol or colour"),
                ));
            }
        }
        Ok(Clause::new(vars, atoms, literals).expect("parsed clause is well formed"))
    }

    fn eof(&mut self) -> PResult<()> {
        self.expect(Tok::Eof, "end of input").map(|_| ())
    }
}

/// Parses the sentence format described in the module docs.
pub fn parse_sentence(text: &str) -> Result<Sentence, ParseError> {
    let mut p = Parser::new(text)?;
    let sig = p.signature()?;
    let colours = p.colours(&sig)?;
    let mut clauses = Vec::new();
    while p.at_keyword("forbid") {
        clauses.push(p.clause(&sig, &colours)?);
    }
    p.eof()?;
    Ok(Sentence::new(sig, colours, clauses))
}

enum Fact<'a> {
    Colour(Token<'a>, Token<'a>),
    Rel(Token<'a>, Vec<Token<'a>>),
}

/// Parses a structure. Without a `signature`/`colors` header the symbols are
/// inferred from their first use and colours are listed by first use.
pub fn parse_structure(text: &str) -> Result<FinStructure, ParseError> {
    parse_structure_impl(text, None)
}

/// Parses a structure against a known signature and colour list; a header in
/// the text, if present, must agree with them.
pub fn parse_structure_in(text: &str, sig: &Signature, colours: &[String]) -> Result<FinStructure, ParseError> {
    parse_structure_impl(text, Some((sig, colours)))
}

fn parse_structure_impl(text: &str, ctx: Option<(&Signature, &[String])>) -> Result<FinStructure, ParseError> {
    let mut p = Parser::new(text)?;
    let mut header: Option<(Signature, Vec<String>, SourceSpan)> = None;
    if p.at_keyword("signature") {
        let span = p.peek().span;
        let sig = p.signature()?;
        let colours = p.colours(&sig)?;
        header = Some((sig, colours, span));
    }
    p.keyword(&["structure"])?;
    p.expect(Tok::LBrace, "`{`")?;
    p.keyword(&["domain"])?;
    let domain = p.braced_list(|p| p.name())?;
    let mut facts = Vec::new();
    loop {
        match p.peek().kind {
            Tok::RBrace => {
                p.bump();
                break;
            }
            Tok::Comma => {
                p.bump();
            }
            Tok::Word if p.peek().text == "colour" || p.peek().text == "color" => {
                if p.peek_at(1).kind == Tok::LParen {
                    let head = p.bump();
                    facts.push(Fact::Rel(head, p.args()?));
                } else {
                    p.bump();
                    let c = p.name()?;
                    let args = p.args()?;
                    if args.len() != 1 {
                        return Err(p.error_at(c.span, "a colour fact takes one element", None));
                    }
                    facts.push(Fact::Colour(c, args[0].clone()));
                }
            }
            Tok::Word => {
                let head = p.bump();
                if p.peek().kind == Tok::Equals {
                    return Err(p.error_at(p.peek().span, "equality not permitted in MMSNP", None));
                }
                facts.push(Fact::Rel(head, p.args()?));
            }
            _ => return Err(p.unexpected("a fact or `}`")),
        }
    }
    p.eof()?;

    let (sig, colours) = match (ctx, header) {
        (Some((s, c)), Some((hs, hc, span))) => {
            if *s != hs || c != hc.as_slice() {
                return Err(p.error_at(span, "structure header disagrees with the expected signature or colours", None));
            }
            (hs, hc)
        }
        (Some((s, c)), None) => (s.clone(), c.to_vec()),
        (None, Some((hs, hc, _))) => (hs, hc),
        (None, None) => {
            let mut sig = Signature::new();
            let mut colours: Vec<String> = Vec::new();
            for f in &facts {
                match f {
                    Fact::Rel(h, args) => {
                        if sig.index_of(h.text).is_none() {
                            sig.add(h.text, args.len()).expect("fresh symbol");
                        }
                    }
                    Fact::Colour(c, _) => {
                        if !colours.iter().any(|x| x == c.text) {
                            colours.push(c.text.to_string());
                        }
                    }
                }
            }
            if let Some(c) = colours.iter().find(|c| sig.index_of(c).is_some()) {
                return Err(p.error_at(SourceSpan { begin: 0, end: 0, line: 1, column: 1 }, format!("{c} is both a colour and a relation symbol"), None));
            }
            (sig, colours)
        }
    };

    let mut a = FinStructure::new(sig, colours);
    let mut index: HashMap<&str, usize> = HashMap::new();
    for d in &domain {
        if index.contains_key(d.text) {
            return Err(p.error_at(d.span, format!("element {} listed twice", d.text), None));
        }
        index.insert(d.text, a.add_element(d.text));
    }
    let elem = |t: &Token| {
        index
            .get(t.text)
            .copied()
            .ok_or_else(|| p.error_at(t.span, format!("unknown element {}", t.text), Some("an element of the domain")))
    };
    for f in &facts {
        match f {
            Fact::Rel(h, args) => {
                let id = a.signature().index_of(h.text).ok_or_else(|| {
                    p.error_at(h.span, format!("unknown symbol {}", h.text), Some("a declared symbol"))
                })?;
                if a.signature().arity(id) != args.len() {
                    return Err(p.error_at(
                        h.span,
                        format!("{} has arity {} but is used with {} arguments", h.text, a.signature().arity(id), args.len()),
                        None,
                    ));
                }
                let t = args.iter().map(elem).collect::<Result<Vec<_>, _>>()?;
                a.add_tuple(id, t).expect("checked tuple");
            }
            Fact::Colour(c, e) => {
                let ci = a
                    .colour_index(c.text)
                    .ok_or_else(|| p.error_at(c.span, format!("unknown colour {}", c.text), Some("a declared colour")))?;
                let ei = elem(e)?;
                if a.colour(ei).is_some_and(|x| x != ci) {
                    return Err(p.error_at(e.span, format!("element {} doubly coloured", e.text), None));
                }
                a.set_colour(ei, ci).expect("checked colour");
            }
        }
    }
    Ok(a)
}
