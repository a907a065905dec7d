//! A small TPTP FOF syntax checker covering the fragment this crate emits:
//! `fof(name, role, formula).` annotated formulas with quantifiers, the
//! standard connectives, equality, and `%` comments. Mixing `&` and `|`
//! without parentheses is rejected, as in the TPTP grammar.

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("TPTP syntax error at {pos}: {msg}")]
pub struct TptpError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LowerWord(String),
    UpperWord(String),
    Dollar(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Dot,
    Tilde,
    Amp,
    Pipe,
    Bang,
    Question,
    Arrow,    // =>
    Iff,      // <=>
    RevArrow, // <=
    NotIff,   // <~>
    Eq,
    Neq,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, TptpError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '%' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            '[' => {
                out.push((Tok::LBracket, i));
                i += 1;
            }
            ']' => {
                out.push((Tok::RBracket, i));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, i));
                i += 1;
            }
            ':' => {
                out.push((Tok::Colon, i));
                i += 1;
            }
            '.' => {
                out.push((Tok::Dot, i));
                i += 1;
            }
            '~' => {
                out.push((Tok::Tilde, i));
                i += 1;
            }
            '&' => {
                out.push((Tok::Amp, i));
                i += 1;
            }
            '|' => {
                out.push((Tok::Pipe, i));
                i += 1;
            }
            '?' => {
                out.push((Tok::Question, i));
                i += 1;
            }
            '!' => {
                if text[i..].starts_with("!=") {
                    out.push((Tok::Neq, i));
                    i += 2;
                } else {
                    out.push((Tok::Bang, i));
                    i += 1;
                }
            }
            '=' => {
                if text[i..].starts_with("=>") {
                    out.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    out.push((Tok::Eq, i));
                    i += 1;
                }
            }
            '<' => {
                if text[i..].starts_with("<=>") {
                    out.push((Tok::Iff, i));
                    i += 3;
                } else if text[i..].starts_with("<~>") {
                    out.push((Tok::NotIff, i));
                    i += 3;
                } else if text[i..].starts_with("<=") {
                    out.push((Tok::RevArrow, i));
                    i += 2;
                } else {
                    return Err(TptpError { pos: i, msg: "stray '<'".into() });
                }
            }
            '$' => {
                let start = i;
                i += 1;
                let ws = word_end(text, i);
                if ws == i {
                    return Err(TptpError { pos: start, msg: "empty $-word".into() });
                }
                out.push((Tok::Dollar(text[i..ws].to_string()), start));
                i = ws;
            }
            c if c.is_ascii_lowercase() => {
                let ws = word_end(text, i);
                out.push((Tok::LowerWord(text[i..ws].to_string()), i));
                i = ws;
            }
            c if c.is_ascii_uppercase() => {
                let ws = word_end(text, i);
                out.push((Tok::UpperWord(text[i..ws].to_string()), i));
                i = ws;
            }
            other => {
                return Err(TptpError { pos: i, msg: format!("unexpected character '{other}'") })
            }
        }
    }
    Ok(out)
}

fn word_end(text: &str, mut i: usize) -> usize {
    let bytes = text.as_bytes();
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_alphanumeric() || c == '_' {
            i += 1;
        } else {
            break;
        }
    }
    i
}

struct P {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|&(_, p)| p).unwrap_or_else(|| {
            self.toks.last().map(|&(_, p)| p + 1).unwrap_or(0)
        })
    }

    fn err(&self, msg: impl Into<String>) -> TptpError {
        TptpError { pos: self.here(), msg: msg.into() }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), TptpError> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn formula(&mut self) -> Result<(), TptpError> {
        self.unitary()?;
        match self.peek() {
            Some(Tok::Amp) => {
                while self.eat(&Tok::Amp) {
                    self.unitary()?;
                }
                if matches!(self.peek(), Some(Tok::Pipe)) {
                    return Err(self.err("'&' and '|' may not be mixed without parentheses"));
                }
                Ok(())
            }
            Some(Tok::Pipe) => {
                while self.eat(&Tok::Pipe) {
                    self.unitary()?;
                }
                if matches!(self.peek(), Some(Tok::Amp)) {
                    return Err(self.err("'&' and '|' may not be mixed without parentheses"));
                }
                Ok(())
            }
            Some(Tok::Arrow | Tok::Iff | Tok::RevArrow | Tok::NotIff) => {
                self.pos += 1;
                self.unitary()?;
                if matches!(
                    self.peek(),
                    Some(Tok::Arrow | Tok::Iff | Tok::RevArrow | Tok::NotIff)
                ) {
                    return Err(self.err("binary pair connectives are non-associative"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn unitary(&mut self) -> Result<(), TptpError> {
        match self.peek().cloned() {
            Some(Tok::Bang) | Some(Tok::Question) => {
                self.pos += 1;
                self.expect(Tok::LBracket, "'[' after quantifier")?;
                loop {
                    match self.peek() {
                        Some(Tok::UpperWord(_)) => self.pos += 1,
                        _ => return Err(self.err("a variable in the quantifier list")),
                    }
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(Tok::RBracket, "']' closing the quantifier list")?;
                self.expect(Tok::Colon, "':' after the quantifier list")?;
                self.unitary()
            }
            Some(Tok::Tilde) => {
                self.pos += 1;
                self.unitary()
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                self.formula()?;
                self.expect(Tok::RParen, "')'")
            }
            Some(Tok::Dollar(word)) => {
                if word == "true" || word == "false" {
                    self.pos += 1;
                    Ok(())
                } else {
                    Err(self.err(format!("unknown defined constant ${word}")))
                }
            }
            Some(Tok::LowerWord(_)) => {
                self.pos += 1;
                if self.eat(&Tok::LParen) {
                    loop {
                        self.term()?;
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::RParen, "')' closing the argument list")?;
                }
                self.maybe_equality()
            }
            Some(Tok::UpperWord(_)) => {
                self.pos += 1;
                // a bare variable must be part of an equality
                if self.eat(&Tok::Eq) || self.eat(&Tok::Neq) {
                    self.term()
                } else {
                    Err(self.err("a variable cannot stand alone as a formula"))
                }
            }
            _ => Err(self.err("a formula")),
        }
    }

    fn maybe_equality(&mut self) -> Result<(), TptpError> {
        if self.eat(&Tok::Eq) || self.eat(&Tok::Neq) {
            self.term()?;
        }
        Ok(())
    }

    fn term(&mut self) -> Result<(), TptpError> {
        match self.peek().cloned() {
            Some(Tok::UpperWord(_)) => {
                self.pos += 1;
                Ok(())
            }
            Some(Tok::LowerWord(_)) => {
                self.pos += 1;
                if self.eat(&Tok::LParen) {
                    loop {
                        self.term()?;
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::RParen, "')' closing the argument list")?;
                }
                Ok(())
            }
            _ => Err(self.err("a term")),
        }
    }
}

/// Validates a TPTP FOF document: a sequence of `fof(name, role, formula).`
/// units with comments.
pub fn validate_tptp(text: &str) -> Result<usize, TptpError> {
    let toks = tokenize(text)?;
    let mut p = P { toks, pos: 0 };
    let mut count = 0;
    while p.peek().is_some() {
        match p.peek() {
            Some(Tok::LowerWord(w)) if w == "fof" => p.pos += 1,
            _ => return Err(p.err("'fof' at the start of an annotated formula")),
        }
        p.expect(Tok::LParen, "'(' after fof")?;
        match p.peek() {
            Some(Tok::LowerWord(_)) => p.pos += 1,
            _ => return Err(p.err("a formula name")),
        }
        p.expect(Tok::Comma, "',' after the name")?;
        match p.peek().cloned() {
            Some(Tok::LowerWord(role))
                if matches!(
                    role.as_str(),
                    "axiom" | "hypothesis" | "conjecture" | "negated_conjecture" | "lemma" | "definition"
                ) =>
            {
                p.pos += 1
            }
            _ => return Err(p.err("a formula role")),
        }
        p.expect(Tok::Comma, "',' after the role")?;
        p.formula()?;
        p.expect(Tok::RParen, "')' closing the annotated formula")?;
        p.expect(Tok::Dot, "'.' terminating the annotated formula")?;
        count += 1;
    }
    if count == 0 {
        return Err(TptpError { pos: 0, msg: "no annotated formulas".into() });
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_wellformed() {
        let ok = "% comment\nfof(sep,conjecture, ![X]: (p(X) => ~(q(X) & r(X,Y)))).\n";
        assert_eq!(validate_tptp(ok), Ok(1));
        let two = "fof(a1,axiom,p(c)). fof(goal,conjecture, ?[X]: (p(X) | $true)).";
        assert_eq!(validate_tptp(two), Ok(2));
        let eq = "fof(e,axiom, ![X,Y]: (X = Y => (p(X) <=> p(Y)))).";
        assert_eq!(validate_tptp(eq), Ok(1));
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "fof(a,axiom,p(X)",                       // missing ).
            "fof(a,axiom,p(X) & q(X) | r(X)).",       // mixed & and |
            "fof(a,axiom,p(X) => q(X) => r(X)).",     // chained =>
            "fof(a,badrole,p(X)).",                   // unknown role
            "fof(a,axiom,P(X)).",                     // uppercase predicate
            "fof(a,axiom,p(X)) .extra",               // trailing junk
            "",                                        // empty
        ] {
            assert!(validate_tptp(bad).is_err(), "accepted: {bad}");
        }
    }

    #[test]
    fn validates_emitted_instances() {
        use crate::fo::{build_instance, emit_tptp, EmitMode};
        use crate::parser::parse_kb;
        let (l, _) = parse_kb(
            "ontology { A subsumedBy forall R . not A; } database { R(a,a); A(b); } \
             positive { a } negative { b } signature { R }",
        )
        .unwrap();
        for guarded in [false, true] {
            let inst = build_instance(&l.kb, &l.sigma, "a", "b", guarded).unwrap();
            for mode in [EmitMode::Validity, EmitMode::InterpolationComment] {
                let text = emit_tptp(&inst, mode);
                assert_eq!(validate_tptp(&text), Ok(1), "guarded={guarded}: {text}");
            }
        }
    }
}
