//! Finite relational structures with constant interpretation (no unique
//! name assumption), concept extensions, model checking and the forest-model
//! test.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::concept::Concept;
use crate::kb::{Database, KnowledgeBase, Signature};

/// Elements are dense indices `0..len`; `names` carries display names.
/// `const_map` interprets constants and need not be injective.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteStructure {
    pub names: Vec<String>,
    pub unary: BTreeMap<String, BTreeSet<usize>>,
    pub binary: BTreeMap<String, BTreeSet<(usize, usize)>>,
    pub const_map: BTreeMap<String, usize>,
}

impl FiniteStructure {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn add_element(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.names.len() - 1
    }

    pub fn add_unary(&mut self, concept_name: impl Into<String>, e: usize) {
        self.unary.entry(concept_name.into()).or_default().insert(e);
    }

    pub fn add_edge(&mut self, role_name: impl Into<String>, from: usize, to: usize) {
        self.binary.entry(role_name.into()).or_default().insert((from, to));
    }

    pub fn has_unary(&self, concept_name: &str, e: usize) -> bool {
        self.unary.get(concept_name).is_some_and(|s| s.contains(&e))
    }

    pub fn has_edge(&self, role_name: &str, from: usize, to: usize) -> bool {
        self.binary.get(role_name).is_some_and(|s| s.contains(&(from, to)))
    }

    /// The structure A_D induced by a database: one element per constant.
    pub fn from_database(db: &Database) -> FiniteStructure {
        let mut s = FiniteStructure::default();
        for c in db.constants() {
            let e = s.add_element(c.clone());
            s.const_map.insert(c, e);
        }
        for (a, c) in &db.unary {
            let e = s.const_map[c];
            s.add_unary(a.clone(), e);
        }
        for (r, c, d) in &db.binary {
            let (e, f) = (s.const_map[c], s.const_map[d]);
            s.add_edge(r.clone(), e, f);
        }
        s
    }

    /// Successors of `e` along `role` (predecessors when the role is
    /// inverted).
    pub fn role_successors(&self, role: &crate::concept::Role, e: usize) -> Vec<usize> {
        match self.binary.get(&role.name) {
            None => Vec::new(),
            Some(pairs) => pairs
                .iter()
                .filter_map(|&(x, y)| {
                    if role.inverted {
                        (y == e).then_some(x)
                    } else {
                        (x == e).then_some(y)
                    }
                })
                .collect(),
        }
    }

    /// The extension of a concept, by structural recursion over the AST.
    pub fn extension(&self, concept: &Concept) -> BTreeSet<usize> {
        match concept {
            Concept::Atom(a) => self.unary.get(a).cloned().unwrap_or_default(),
            Concept::Not(c) => {
                let inner = self.extension(c);
                (0..self.len()).filter(|e| !inner.contains(e)).collect()
            }
            Concept::And(l, r) => {
                let le = self.extension(l);
                let re = self.extension(r);
                le.intersection(&re).cloned().collect()
            }
            Concept::Exists(role, c) => {
                let body = self.extension(c);
                (0..self.len())
                    .filter(|&e| self.role_successors(role, e).iter().any(|f| body.contains(f)))
                    .collect()
            }
        }
    }

    /// Model check: every concept inclusion holds and every ground atom is
    /// satisfied under the constant interpretation.
    pub fn is_model(&self, kb: &KnowledgeBase) -> bool {
        if self.is_empty() {
            return false;
        }
        for (a, c) in &kb.database.unary {
            match self.const_map.get(c) {
                Some(&e) if self.has_unary(a, e) => {}
                _ => return false,
            }
        }
        for (r, c, d) in &kb.database.binary {
            match (self.const_map.get(c), self.const_map.get(d)) {
                (Some(&e), Some(&f)) if self.has_edge(r, e, f) => {}
                _ => return false,
            }
        }
        for (lhs, rhs) in &kb.ontology {
            let le = self.extension(lhs);
            let re = self.extension(rhs);
            if !le.is_subset(&re) {
                return false;
            }
        }
        true
    }

    /// Forest test relative to a KB: edges between elements that both
    /// interpret database constants are exempt; the remaining undirected
    /// graph must be acyclic, without self-loops and without parallel role
    /// edges on a pair.
    pub fn is_forest_model(&self, kb: &KnowledgeBase) -> bool {
        if !self.is_model(kb) {
            return false;
        }
        let const_elems: BTreeSet<usize> = kb
            .database
            .constants()
            .iter()
            .filter_map(|c| self.const_map.get(c).copied())
            .collect();
        let mut edge_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for pairs in self.binary.values() {
            for &(x, y) in pairs {
                if const_elems.contains(&x) && const_elems.contains(&y) {
                    continue;
                }
                if x == y {
                    return false;
                }
                let key = (x.min(y), x.max(y));
                *edge_count.entry(key).or_default() += 1;
            }
        }
        if edge_count.values().any(|&n| n > 1) {
            return false;
        }
        // Acyclicity of the remaining simple graph via union-find.
        let mut parent: Vec<usize> = (0..self.len()).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(x, y) in edge_count.keys() {
            let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
            if rx == ry {
                return false;
            }
            parent[rx] = ry;
        }
        true
    }

    /// Display name of an element.
    pub fn name(&self, e: usize) -> &str {
        &self.names[e]
    }

    /// Edge test respecting role orientation.
    pub fn has_dir_edge(&self, role: &crate::concept::Role, from: usize, to: usize) -> bool {
        if role.inverted {
            self.has_edge(&role.name, to, from)
        } else {
            self.has_edge(&role.name, from, to)
        }
    }
}

/// Signature restriction view helpers shared by bisimulation and
/// homomorphism search.
pub fn sigma_concept_names<'a>(sigma: &'a Signature) -> impl Iterator<Item = &'a String> {
    sigma.concepts.iter()
}
