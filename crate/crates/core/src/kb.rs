//! Databases, knowledge bases, labeled separability problems and signatures.

use std::collections::BTreeSet;
use std::fmt;

use crate::concept::Concept;

/// A finite set of unary and binary ground atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Database {
    /// `(concept name, constant)` for atoms `A(a)`.
    pub unary: BTreeSet<(String, String)>,
    /// `(role name, from, to)` for atoms `R(a,b)`.
    pub binary: BTreeSet<(String, String, String)>,
}

impl Database {
    /// The constants occurring in the atoms, in sorted order.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (_, a) in &self.unary {
            out.insert(a.clone());
        }
        for (_, a, b) in &self.binary {
            out.insert(a.clone());
            out.insert(b.clone());
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.unary.is_empty() && self.binary.is_empty()
    }

    /// Sub-database induced by all constants at finite Gaifman distance
    /// from `anchor`.
    pub fn connected_component(&self, anchor: &str) -> Option<Database> {
        if !self.constants().contains(anchor) {
            return None;
        }
        let mut reach: BTreeSet<String> = BTreeSet::new();
        let mut queue = vec![anchor.to_string()];
        while let Some(c) = queue.pop() {
            if !reach.insert(c.clone()) {
                continue;
            }
            for (_, x, y) in &self.binary {
                if x == &c && !reach.contains(y) {
                    queue.push(y.clone());
                }
                if y == &c && !reach.contains(x) {
                    queue.push(x.clone());
                }
            }
        }
        Some(Database {
            unary: self
                .unary
                .iter()
                .filter(|(_, a)| reach.contains(a))
                .cloned()
                .collect(),
            binary: self
                .binary
                .iter()
                .filter(|(_, a, b)| reach.contains(a) && reach.contains(b))
                .cloned()
                .collect(),
        })
    }

    /// Disjoint union with a copy of `self` in which every constant `c` is
    /// renamed by `rename`.
    pub fn with_renamed_copy(&self, rename: &dyn Fn(&str) -> String) -> Database {
        let mut out = self.clone();
        for (a, c) in &self.unary {
            out.unary.insert((a.clone(), rename(c)));
        }
        for (r, c, d) in &self.binary {
            out.binary.insert((r.clone(), rename(c), rename(d)));
        }
        out
    }
}

/// Concept and role names available to a formula or problem.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
}

impl Signature {
    pub fn contains_concept(&self, name: &str) -> bool {
        self.concepts.contains(name)
    }

    pub fn contains_role(&self, name: &str) -> bool {
        self.roles.contains(name)
    }

    pub fn is_subset_of(&self, other: &Signature) -> bool {
        self.concepts.is_subset(&other.concepts) && self.roles.is_subset(&other.roles)
    }

    pub fn union(&self, other: &Signature) -> Signature {
        Signature {
            concepts: self.concepts.union(&other.concepts).cloned().collect(),
            roles: self.roles.union(&other.roles).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &Signature) -> Signature {
        Signature {
            concepts: self.concepts.intersection(&other.concepts).cloned().collect(),
            roles: self.roles.intersection(&other.roles).cloned().collect(),
        }
    }

    pub fn of_concept(c: &Concept) -> Signature {
        let mut sig = Signature::default();
        c.collect_sig(&mut sig.concepts, &mut sig.roles);
        sig
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self
            .roles
            .iter()
            .map(|s| s.as_str())
            .chain(self.concepts.iter().map(|s| s.as_str()))
            .collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// An ontology (set of concept inclusions) together with a database.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    /// Concept inclusions `C subsumedBy D`, sorted and deduplicated.
    pub ontology: Vec<(Concept, Concept)>,
    pub database: Database,
}

impl KnowledgeBase {
    pub fn new(mut ontology: Vec<(Concept, Concept)>, database: Database) -> Self {
        ontology.sort();
        ontology.dedup();
        KnowledgeBase { ontology, database }
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        for (c, d) in &self.ontology {
            c.collect_sig(&mut sig.concepts, &mut sig.roles);
            d.collect_sig(&mut sig.concepts, &mut sig.roles);
        }
        for (a, _) in &self.database.unary {
            sig.concepts.insert(a.clone());
        }
        for (r, _, _) in &self.database.binary {
            sig.roles.insert(r.clone());
        }
        sig
    }
}

/// A knowledge base with positive and negative example constants and the
/// signature available to separating concepts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledKb {
    pub kb: KnowledgeBase,
    pub positives: BTreeSet<String>,
    pub negatives: BTreeSet<String>,
    pub sigma: Signature,
}

impl LabeledKb {
    /// Validates the structural invariants: P, N nonempty subsets of
    /// cons(D) and sigma within sig(K).
    pub fn validate(&self) -> Result<(), String> {
        let cons = self.kb.database.constants();
        if self.positives.is_empty() {
            return Err("positive example set is empty".into());
        }
        if self.negatives.is_empty() {
            return Err("negative example set is empty".into());
        }
        for p in &self.positives {
            if !cons.contains(p) {
                return Err(format!("positive example '{p}' does not occur in the database"));
            }
        }
        for n in &self.negatives {
            if !cons.contains(n) {
                return Err(format!("negative example '{n}' does not occur in the database"));
            }
        }
        let sig = self.kb.signature();
        if !self.sigma.is_subset_of(&sig) {
            return Err("signature contains symbols that do not occur in the knowledge base".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn db(unary: &[(&str, &str)], binary: &[(&str, &str, &str)]) -> Database {
        Database {
            unary: unary.iter().map(|(a, c)| (a.to_string(), c.to_string())).collect(),
            binary: binary
                .iter()
                .map(|(r, c, d)| (r.to_string(), c.to_string(), d.to_string()))
                .collect(),
        }
    }

    #[test]
    fn constants_are_exactly_those_occurring() {
        let d = db(&[("A", "a")], &[("R", "b", "c")]);
        let cons: Vec<String> = d.constants().into_iter().collect();
        assert_eq!(cons, vec!["a", "b", "c"]);
    }

    #[test]
    fn component_of_singleton() {
        let d = db(&[("A", "a")], &[]);
        assert_eq!(d.connected_component("a").unwrap(), d);
    }

    #[test]
    fn component_splits_two_parts() {
        let d = db(&[], &[("R", "a", "b"), ("S", "c", "c")]);
        let got = d.connected_component("a").unwrap();
        assert_eq!(got, db(&[], &[("R", "a", "b")]));
        assert!(d.connected_component("x").is_none());
    }

    #[test]
    fn components_partition() {
        let d = db(&[("A", "a")], &[("R", "a", "b"), ("S", "c", "d"), ("R", "d", "e")]);
        let ca = d.connected_component("a").unwrap();
        let cb = d.connected_component("b").unwrap();
        let cc = d.connected_component("c").unwrap();
        assert_eq!(ca, cb);
        assert_ne!(ca, cc);
        let (ca_cons, cc_cons) = (ca.constants(), cc.constants());
        assert!(ca_cons.is_disjoint(&cc_cons));
    }
}
