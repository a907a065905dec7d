//! Text format for labeled knowledge bases.
//!
//! ```text
//! ontology  { A subsumedBy exists R . B ; ... }
//! database  { A(a); R(a,b); ... }
//! positive  { a ... }
//! negative  { b ... }
//! signature { R A ... }
//! ```
//!
//! Concept syntax: `top | bot | NAME | not C | C and D | C or D |
//! C implies D | exists R . C | forall R . C | exists inv(R) . C`,
//! parentheses allowed; `and` binds tighter than `or`, `implies` is weakest
//! and right-associative; the unary operators bind tightest. `#` and `//`
//! start line comments. The `signature` section is optional and defaults to
//! the full signature of the knowledge base. Derived forms are expanded at
//! parse time, so the resulting ASTs use only the four primitive
//! constructors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::concept::{Concept, Role};
use crate::kb::{Database, KnowledgeBase, LabeledKb, Signature};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("semantic error: {0}")]
    Semantic(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Keyword(&'static str),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Dot,
    Comma,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(n) => write!(f, "'{n}'"),
            Tok::Keyword(k) => write!(f, "'{k}'"),
            Tok::LBrace => write!(f, "'{{'"),
            Tok::RBrace => write!(f, "'}}'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Semi => write!(f, "';'"),
            Tok::Dot => write!(f, "'.'"),
            Tok::Comma => write!(f, "','"),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "ontology", "database", "positive", "negative", "signature", "subsumedBy", "top", "bot",
    "not", "and", "or", "implies", "exists", "forall", "inv",
];

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1, col: 1 }
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }

    fn bump(&mut self, ch: char) {
        self.pos += ch.len_utf8();
        if ch == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(ch) = self.src[self.pos..].chars().next() {
            if ch.is_whitespace() {
                self.bump(ch);
                continue;
            }
            if ch == '#' || self.src[self.pos..].starts_with("//") {
                while let Some(c) = self.src[self.pos..].chars().next() {
                    if c == '\n' {
                        break;
                    }
                    self.bump(c);
                }
                continue;
            }
            let (line, col) = (self.line, self.col);
            let tok = match ch {
                '{' => {
                    self.bump(ch);
                    Tok::LBrace
                }
                '}' => {
                    self.bump(ch);
                    Tok::RBrace
                }
                '(' => {
                    self.bump(ch);
                    Tok::LParen
                }
                ')' => {
                    self.bump(ch);
                    Tok::RParen
                }
                ';' => {
                    self.bump(ch);
                    Tok::Semi
                }
                '.' => {
                    self.bump(ch);
                    Tok::Dot
                }
                ',' => {
                    self.bump(ch);
                    Tok::Comma
                }
                c if c.is_ascii_alphabetic() => {
                    let start = self.pos;
                    while let Some(c) = self.src[self.pos..].chars().next() {
                        if c.is_ascii_alphanumeric() || c == '_' {
                            self.bump(c);
                        } else {
                            break;
                        }
                    }
                    let word = &self.src[start..self.pos];
                    match KEYWORDS.iter().find(|k| **k == word) {
                        Some(k) => Tok::Keyword(k),
                        None => Tok::Name(word.to_string()),
                    }
                }
                other => return Err(self.error(format!("unexpected character '{other}'"))),
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn error_here(&self, msg: impl Into<String>) -> ParseError {
        match self.toks.get(self.pos.min(self.toks.len().saturating_sub(1))) {
            Some(s) if self.pos < self.toks.len() => {
                ParseError::Syntax { line: s.line, col: s.col, msg: msg.into() }
            }
            Some(s) => ParseError::Syntax {
                line: s.line,
                col: s.col + 1,
                msg: format!("{} (at end of input)", msg.into()),
            },
            None => ParseError::Syntax { line: 1, col: 1, msg: format!("{} (empty input)", msg.into()) },
        }
    }

    fn next(&mut self, what: &str) -> Result<Tok, ParseError> {
        match self.toks.get(self.pos) {
            Some(s) => {
                self.pos += 1;
                Ok(s.tok.clone())
            }
            None => Err(self.error_here(format!("expected {what}"))),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        let got = self.next(&tok.to_string())?;
        if got == tok {
            Ok(())
        } else {
            self.pos -= 1;
            Err(self.error_here(format!("expected {tok}, found {got}")))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.next(what)? {
            Tok::Name(n) => Ok(n),
            other => {
                self.pos -= 1;
                Err(self.error_here(format!("expected {what}, found {other}")))
            }
        }
    }

    // concept := implies
    fn concept(&mut self) -> Result<Concept, ParseError> {
        self.implies_expr()
    }

    fn implies_expr(&mut self) -> Result<Concept, ParseError> {
        let lhs = self.or_expr()?;
        if self.eat(&Tok::Keyword("implies")) {
            let rhs = self.implies_expr()?;
            Ok(Concept::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or_expr(&mut self) -> Result<Concept, ParseError> {
        let mut acc = self.and_expr()?;
        while self.eat(&Tok::Keyword("or")) {
            let rhs = self.and_expr()?;
            acc = Concept::or2(acc, rhs);
        }
        Ok(acc)
    }

    fn and_expr(&mut self) -> Result<Concept, ParseError> {
        let mut parts = vec![self.unary_expr()?];
        while self.eat(&Tok::Keyword("and")) {
            parts.push(self.unary_expr()?);
        }
        if parts.len() == 1 {
            Ok(parts.pop().unwrap())
        } else {
            Ok(Concept::and_all(parts))
        }
    }

    fn unary_expr(&mut self) -> Result<Concept, ParseError> {
        if self.eat(&Tok::Keyword("not")) {
            return Ok(self.unary_expr()?.negate());
        }
        if self.eat(&Tok::Keyword("exists")) {
            let role = self.role()?;
            self.expect(Tok::Dot)?;
            return Ok(Concept::exists(role, self.unary_expr()?));
        }
        if self.eat(&Tok::Keyword("forall")) {
            let role = self.role()?;
            self.expect(Tok::Dot)?;
            return Ok(Concept::forall(role, self.unary_expr()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Concept, ParseError> {
        if self.eat(&Tok::Keyword("top")) {
            return Ok(Concept::top());
        }
        if self.eat(&Tok::Keyword("bot")) {
            return Ok(Concept::bot());
        }
        if self.eat(&Tok::LParen) {
            let c = self.concept()?;
            self.expect(Tok::RParen)?;
            return Ok(c);
        }
        let n = self.name("a concept")?;
        Ok(Concept::atom(n))
    }

    fn role(&mut self) -> Result<Role, ParseError> {
        if self.eat(&Tok::Keyword("inv")) {
            self.expect(Tok::LParen)?;
            let inner = self.role()?;
            self.expect(Tok::RParen)?;
            Ok(inner.inverse())
        } else {
            Ok(Role::named(self.name("a role name")?))
        }
    }
}

#[derive(Debug, Default)]
struct SymbolKinds {
    kinds: BTreeMap<String, &'static str>,
}

impl SymbolKinds {
    fn record(&mut self, name: &str, kind: &'static str) -> Result<(), ParseError> {
        match self.kinds.get(name) {
            Some(k) if *k != kind => Err(ParseError::Semantic(format!(
                "symbol '{name}' is used both as a {k} and as a {kind}"
            ))),
            _ => {
                self.kinds.insert(name.to_string(), kind);
                Ok(())
            }
        }
    }
}

/// Parses a labeled KB document, returning the normalized problem and any
/// non-fatal warnings.
pub fn parse_kb(text: &str) -> Result<(LabeledKb, Vec<String>), ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0 };

    let mut ontology: Vec<(Concept, Concept)> = Vec::new();
    let mut database = Database::default();
    let mut positives: BTreeSet<String> = BTreeSet::new();
    let mut negatives: BTreeSet<String> = BTreeSet::new();
    let mut signature_names: Option<Vec<String>> = None;
    let mut seen: BTreeSet<&'static str> = BTreeSet::new();

    while p.peek().is_some() {
        let section = match p.next("a section keyword")? {
            Tok::Keyword(k @ ("ontology" | "database" | "positive" | "negative" | "signature")) => k,
            other => {
                p.pos -= 1;
                return Err(p.error_here(format!(
                    "expected a section keyword (ontology/database/positive/negative/signature), found {other}"
                )));
            }
        };
        if !seen.insert(section) {
            return Err(ParseError::Semantic(format!("duplicate section '{section}'")));
        }
        p.expect(Tok::LBrace)?;
        match section {
            "ontology" => {
                while !p.eat(&Tok::RBrace) {
                    let lhs = p.concept()?;
                    p.expect(Tok::Keyword("subsumedBy"))?;
                    let rhs = p.concept()?;
                    ontology.push((lhs, rhs));
                    if !p.eat(&Tok::Semi) {
                        p.expect(Tok::RBrace)?;
                        break;
                    }
                }
            }
            "database" => {
                while !p.eat(&Tok::RBrace) {
                    let rel = p.name("a relation symbol")?;
                    p.expect(Tok::LParen)?;
                    let first = p.name("a constant")?;
                    if p.eat(&Tok::Comma) {
                        let second = p.name("a constant")?;
                        p.expect(Tok::RParen)?;
                        database.binary.insert((rel, first, second));
                    } else {
                        p.expect(Tok::RParen)?;
                        database.unary.insert((rel, first));
                    }
                    if !p.eat(&Tok::Semi) {
                        p.expect(Tok::RBrace)?;
                        break;
                    }
                }
            }
            "positive" | "negative" => {
                let target = if section == "positive" { &mut positives } else { &mut negatives };
                while !p.eat(&Tok::RBrace) {
                    let n = p.name("a constant")?;
                    target.insert(n);
                    p.eat(&Tok::Comma);
                }
            }
            "signature" => {
                let mut names = Vec::new();
                while !p.eat(&Tok::RBrace) {
                    names.push(p.name("a relation symbol")?);
                    p.eat(&Tok::Comma);
                }
                signature_names = Some(names);
            }
            _ => unreachable!(),
        }
    }

    // Arity discipline: a symbol is exclusively a concept name or a role name.
    let mut kinds = SymbolKinds::default();
    for (c, d) in &ontology {
        for side in [c, d] {
            let sig = Signature::of_concept(side);
            for a in &sig.concepts {
                kinds.record(a, "concept name")?;
            }
            for r in &sig.roles {
                kinds.record(r, "role name")?;
            }
        }
    }
    for (a, _) in &database.unary {
        kinds.record(a, "concept name")?;
    }
    for (r, _, _) in &database.binary {
        kinds.record(r, "role name")?;
    }

    let kb = KnowledgeBase::new(ontology, database);
    let kb_sig = kb.signature();

    let sigma = match signature_names {
        None => kb_sig.clone(),
        Some(names) => {
            let mut sigma = Signature::default();
            for n in names {
                if kb_sig.contains_concept(&n) {
                    sigma.concepts.insert(n);
                } else if kb_sig.contains_role(&n) {
                    sigma.roles.insert(n);
                } else {
                    return Err(ParseError::Semantic(format!(
                        "signature symbol '{n}' does not occur in the knowledge base"
                    )));
                }
            }
            sigma
        }
    };

    let labeled = LabeledKb { kb, positives, negatives, sigma };
    labeled.validate().map_err(ParseError::Semantic)?;

    let mut warnings = Vec::new();
    let overlap: Vec<&String> = labeled.positives.intersection(&labeled.negatives).collect();
    if !overlap.is_empty() {
        warnings.push(format!(
            "positive and negative examples overlap ({}); nothing can separate them",
            overlap.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
        ));
    }
    Ok((labeled, warnings))
}

/// Prints a labeled KB in the input format; `parse_kb` of the output
/// reproduces the problem.
pub fn print_kb(l: &LabeledKb) -> String {
    let mut out = String::new();
    out.push_str("ontology {\n");
    for (c, d) in &l.kb.ontology {
        out.push_str(&format!("  {c} subsumedBy {d};\n"));
    }
    out.push_str("}\n");
    out.push_str("database {\n");
    for (a, c) in &l.kb.database.unary {
        out.push_str(&format!("  {a}({c});\n"));
    }
    for (r, c, d) in &l.kb.database.binary {
        out.push_str(&format!("  {r}({c},{d});\n"));
    }
    out.push_str("}\n");
    let list = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(" ");
    out.push_str(&format!("positive {{ {} }}\n", list(&l.positives)));
    out.push_str(&format!("negative {{ {} }}\n", list(&l.negatives)));
    let mut sig_names: Vec<String> = l.sigma.roles.iter().cloned().collect();
    sig_names.extend(l.sigma.concepts.iter().cloned());
    out.push_str(&format!("signature {{ {} }}\n", sig_names.join(" ")));
    out
}
