//! Seeded random generators for tiny knowledge bases, structures and
//! concepts, shared by the randomized oracle suites and the frozen fixture
//! corpus. All generation is deterministic for a fixed seed.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::concept::{Concept, Role};
use crate::kb::{Database, KnowledgeBase, LabeledKb, Signature};
use crate::structure::FiniteStructure;
use crate::types::Reasoner;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random concept over the given alphabet with bounded constructor depth.
pub fn random_concept(
    rng: &mut ChaCha8Rng,
    concept_names: &[String],
    role_names: &[String],
    depth: usize,
) -> Concept {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        if concept_names.is_empty() || rng.gen_bool(0.15) {
            return Concept::top();
        }
        return Concept::atom(concept_names.choose(rng).unwrap().clone());
    }
    match rng.gen_range(0..3) {
        0 => random_concept(rng, concept_names, role_names, depth - 1).negate(),
        1 => Concept::and2(
            random_concept(rng, concept_names, role_names, depth - 1),
            random_concept(rng, concept_names, role_names, depth - 1),
        ),
        _ => {
            if role_names.is_empty() {
                return random_concept(rng, concept_names, role_names, depth - 1).negate();
            }
            let name = role_names.choose(rng).unwrap().clone();
            let role = if rng.gen_bool(0.5) { Role::named(name) } else { Role::inv(name) };
            Concept::exists(role, random_concept(rng, concept_names, role_names, depth - 1))
        }
    }
}

/// Shape parameters for random labeled KBs.
#[derive(Clone, Copy, Debug)]
pub struct KbShape {
    pub concept_names: usize,
    pub role_names: usize,
    pub max_cis: usize,
    pub ci_depth: usize,
    pub max_unary: usize,
    pub max_binary: usize,
    pub constants: usize,
}

impl Default for KbShape {
    fn default() -> Self {
        KbShape {
            concept_names: 2,
            role_names: 1,
            max_cis: 2,
            ci_depth: 2,
            max_unary: 2,
            max_binary: 2,
            constants: 3,
        }
    }
}

fn name_pool(prefix: char, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A random labeled KB, retried until satisfiable (up to a bounded number
/// of attempts; the last attempt is returned regardless).
pub fn random_labeled_kb(rng: &mut ChaCha8Rng, shape: KbShape) -> LabeledKb {
    let mut last = None;
    for _ in 0..40 {
        let candidate = random_labeled_kb_once(rng, shape);
        let satisfiable = Reasoner::new(candidate.kb.clone()).kb_satisfiable();
        if satisfiable {
            return candidate;
        }
        last = Some(candidate);
    }
    last.unwrap()
}

fn random_labeled_kb_once(rng: &mut ChaCha8Rng, shape: KbShape) -> LabeledKb {
    let cnames = name_pool('A', shape.concept_names);
    let rnames = name_pool('R', shape.role_names);
    let consts: Vec<String> = (0..shape.constants).map(|i| format!("c{i}")).collect();

    let mut ontology = Vec::new();
    for _ in 0..rng.gen_range(0..=shape.max_cis) {
        let lhs = random_concept(rng, &cnames, &rnames, shape.ci_depth);
        let rhs = random_concept(rng, &cnames, &rnames, shape.ci_depth);
        ontology.push((lhs, rhs));
    }

    let mut db = Database::default();
    for _ in 0..rng.gen_range(1..=shape.max_unary.max(1)) {
        let a = cnames.choose(rng).unwrap().clone();
        let c = consts.choose(rng).unwrap().clone();
        db.unary.insert((a, c));
    }
    for _ in 0..rng.gen_range(0..=shape.max_binary) {
        let r = rnames.choose(rng).unwrap().clone();
        let c = consts.choose(rng).unwrap().clone();
        let d = consts.choose(rng).unwrap().clone();
        db.binary.insert((r, c, d));
    }

    let kb = KnowledgeBase::new(ontology, db);
    let occurring: Vec<String> = kb.database.constants().into_iter().collect();
    let pos = occurring.choose(rng).unwrap().clone();
    let neg_candidates: Vec<&String> = occurring.iter().filter(|c| **c != pos).collect();
    let neg = neg_candidates
        .choose(rng)
        .map(|c| (*c).clone())
        .unwrap_or_else(|| pos.clone());

    let full = kb.signature();
    let mut sigma = Signature::default();
    for r in &full.roles {
        if rng.gen_bool(0.8) {
            sigma.roles.insert(r.clone());
        }
    }
    for c in &full.concepts {
        if rng.gen_bool(0.5) {
            sigma.concepts.insert(c.clone());
        }
    }
    if sigma.roles.is_empty() && sigma.concepts.is_empty() {
        if let Some(r) = full.roles.iter().next() {
            sigma.roles.insert(r.clone());
        } else if let Some(c) = full.concepts.iter().next() {
            sigma.concepts.insert(c.clone());
        }
    }

    LabeledKb {
        kb,
        positives: [pos].into_iter().collect(),
        negatives: [neg].into_iter().collect(),
        sigma,
    }
}

/// A random finite structure with the given element count and densities.
pub fn random_structure(
    rng: &mut ChaCha8Rng,
    elements: usize,
    concept_names: &[String],
    role_names: &[String],
    label_prob: f64,
    edge_prob: f64,
) -> FiniteStructure {
    let mut s = FiniteStructure::default();
    for i in 0..elements {
        s.add_element(format!("e{i}"));
    }
    for a in concept_names {
        for e in 0..elements {
            if rng.gen_bool(label_prob) {
                s.add_unary(a.clone(), e);
            }
        }
    }
    for r in role_names {
        for x in 0..elements {
            for y in 0..elements {
                if rng.gen_bool(edge_prob) {
                    s.add_edge(r.clone(), x, y);
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let a = random_labeled_kb(&mut rng(7), KbShape::default());
        let b = random_labeled_kb(&mut rng(7), KbShape::default());
        assert_eq!(a, b);
        let c = random_labeled_kb(&mut rng(8), KbShape::default());
        assert!(a != c || a.kb.database == c.kb.database);
    }

    #[test]
    fn generated_kbs_validate() {
        let mut r = rng(42);
        for _ in 0..50 {
            let l = random_labeled_kb(&mut r, KbShape::default());
            l.validate().expect("generated labeled KB is well-formed");
        }
    }

    #[test]
    fn generated_concepts_are_normal_forms() {
        let mut r = rng(1);
        let names = vec!["A".to_string(), "B".to_string()];
        let roles = vec!["R".to_string()];
        for _ in 0..200 {
            let c = random_concept(&mut r, &names, &roles, 4);
            for sub in c.subconcepts() {
                if let Concept::Not(inner) = sub {
                    assert!(!matches!(**inner, Concept::Not(_)), "double negation in {c}");
                }
            }
        }
    }
}
