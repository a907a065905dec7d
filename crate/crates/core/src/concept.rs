//! ALCI concept ASTs: roles (possibly inverted), the four primitive concept
//! constructors, normalization of the derived forms, canonical conjunction
//! order, signatures, sizes and relativization.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// Reserved concept name used to encode `top`/`bot` with the primitive
/// constructors. The lexer cannot produce names starting with `$`, so this
/// never collides with user symbols and is excluded from signatures.
pub const TOP_ATOM: &str = "$T";

/// A role name or its inverse. `inv(inv(R))` collapses to `R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Role {
    pub name: String,
    pub inverted: bool,
}

impl Role {
    pub fn named(name: impl Into<String>) -> Self {
        Role { name: name.into(), inverted: false }
    }

    pub fn inv(name: impl Into<String>) -> Self {
        Role { name: name.into(), inverted: true }
    }

    pub fn inverse(&self) -> Role {
        Role { name: self.name.clone(), inverted: !self.inverted }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "inv({})", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

/// An ALCI concept in normal form: only the four primitive constructors
/// appear, `not not C` is collapsed, and conjunctions are flattened, sorted
/// and deduplicated into right-nested binary trees.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Concept {
    Atom(String),
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Exists(Role, Box<Concept>),
}

impl Concept {
    pub fn atom(name: impl Into<String>) -> Concept {
        Concept::Atom(name.into())
    }

    /// `bot` is encoded as the contradiction `$T and not $T`.
    pub fn bot() -> Concept {
        Concept::And(
            Box::new(Concept::Atom(TOP_ATOM.into())),
            Box::new(Concept::Not(Box::new(Concept::Atom(TOP_ATOM.into())))),
        )
    }

    /// `top` is `not bot`.
    pub fn top() -> Concept {
        Concept::Not(Box::new(Concept::bot()))
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Concept::And(l, r)
            if matches!(&**l, Concept::Atom(a) if a == TOP_ATOM)
            && matches!(&**r, Concept::Not(inner)
                if matches!(&**inner, Concept::Atom(a) if a == TOP_ATOM)))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Concept::Not(inner) if inner.is_bot())
    }

    /// Negation with double-negation collapse.
    pub fn negate(self) -> Concept {
        match self {
            Concept::Not(inner) => *inner,
            other => Concept::Not(Box::new(other)),
        }
    }

    /// Canonical conjunction: flattens, sorts, deduplicates and right-nests.
    /// A singleton list yields the concept itself.
    pub fn and_all(parts: Vec<Concept>) -> Concept {
        assert!(!parts.is_empty(), "conjunction of zero concepts");
        let mut flat = Vec::new();
        for p in parts {
            p.flatten_into(&mut flat);
        }
        flat.sort();
        flat.dedup();
        let mut iter = flat.into_iter().rev();
        let mut acc = iter.next().unwrap();
        for c in iter {
            acc = Concept::And(Box::new(c), Box::new(acc));
        }
        acc
    }

    pub fn and2(a: Concept, b: Concept) -> Concept {
        Concept::and_all(vec![a, b])
    }

    pub fn or2(a: Concept, b: Concept) -> Concept {
        Concept::and2(a.negate(), b.negate()).negate()
    }

    pub fn implies(a: Concept, b: Concept) -> Concept {
        Concept::and2(a, b.negate()).negate()
    }

    pub fn exists(role: Role, body: Concept) -> Concept {
        Concept::Exists(role, Box::new(body))
    }

    pub fn forall(role: Role, body: Concept) -> Concept {
        Concept::exists(role, body.negate()).negate()
    }

    fn flatten_into(self, out: &mut Vec<Concept>) {
        // `bot` is itself an And pattern; keep it opaque so it survives
        // canonicalization unchanged.
        if self.is_bot() {
            out.push(self);
            return;
        }
        match self {
            Concept::And(l, r) => {
                l.flatten_into(out);
                r.flatten_into(out);
            }
            other => out.push(other),
        }
    }

    /// Conjuncts of a (possibly nested) conjunction; a non-And is a singleton.
    pub fn conjuncts(&self) -> Vec<&Concept> {
        let mut out = Vec::new();
        fn go<'a>(c: &'a Concept, out: &mut Vec<&'a Concept>) {
            if c.is_bot() {
                out.push(c);
                return;
            }
            match c {
                Concept::And(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    /// Constructor count, with `top` and `bot` counting as atomic.
    pub fn size(&self) -> usize {
        if self.is_top() || self.is_bot() {
            return 1;
        }
        match self {
            Concept::Atom(_) => 1,
            Concept::Not(c) => 1 + c.size(),
            Concept::And(l, r) => 1 + l.size() + r.size(),
            Concept::Exists(_, c) => 1 + c.size(),
        }
    }

    /// Collects concept and role names, skipping the reserved `$T` atom.
    pub fn collect_sig(&self, concepts: &mut BTreeSet<String>, roles: &mut BTreeSet<String>) {
        match self {
            Concept::Atom(a) => {
                if !a.starts_with('$') {
                    concepts.insert(a.clone());
                }
            }
            Concept::Not(c) => c.collect_sig(concepts, roles),
            Concept::And(l, r) => {
                l.collect_sig(concepts, roles);
                r.collect_sig(concepts, roles);
            }
            Concept::Exists(role, c) => {
                roles.insert(role.name.clone());
                c.collect_sig(concepts, roles);
            }
        }
    }

    /// All subconcepts including `self`, in normal form.
    pub fn subconcepts(&self) -> Vec<&Concept> {
        let mut out = Vec::new();
        fn go<'a>(c: &'a Concept, out: &mut Vec<&'a Concept>) {
            out.push(c);
            match c {
                Concept::Atom(_) => {}
                Concept::Not(inner) => go(inner, out),
                Concept::And(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                Concept::Exists(_, inner) => go(inner, out),
            }
        }
        go(self, &mut out);
        out
    }

    /// Replaces every `exists R . D` with `exists R . (guard and D)`,
    /// recursively through the whole concept.
    pub fn relativize(&self, guard: &str) -> Concept {
        match self {
            Concept::Atom(_) => self.clone(),
            Concept::Not(c) => Concept::Not(Box::new(c.relativize(guard))),
            Concept::And(l, r) => {
                Concept::and2(l.relativize(guard), r.relativize(guard))
            }
            Concept::Exists(role, c) => Concept::Exists(
                role.clone(),
                Box::new(Concept::and2(Concept::atom(guard), c.relativize(guard))),
            ),
        }
    }

    fn needs_parens_in_unary(&self) -> bool {
        if self.is_top() || self.is_bot() {
            return false;
        }
        matches!(self, Concept::And(_, _))
    }
}

/// Total order used by the enumeration: size first, then structural order.
pub fn size_then_structural(a: &Concept, b: &Concept) -> Ordering {
    a.size().cmp(&b.size()).then_with(|| a.cmp(b))
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_top() {
            return write!(f, "top");
        }
        if self.is_bot() {
            return write!(f, "bot");
        }
        match self {
            Concept::Atom(a) => write!(f, "{a}"),
            Concept::Not(c) => {
                if c.needs_parens_in_unary() {
                    write!(f, "not ({c})")
                } else {
                    write!(f, "not {c}")
                }
            }
            Concept::And(_, _) => {
                let parts: Vec<String> = self
                    .conjuncts()
                    .iter()
                    .map(|c| {
                        if c.needs_parens_in_unary() {
                            format!("({c})")
                        } else {
                            c.to_string()
                        }
                    })
                    .collect();
                write!(f, "{}", parts.join(" and "))
            }
            Concept::Exists(role, c) => {
                if c.needs_parens_in_unary() {
                    write!(f, "exists {role} . ({c})")
                } else {
                    write!(f, "exists {role} . {c}")
                }
            }
        }
    }
}
