//! Sound candidate prefiltering for separator search: evaluate candidates
//! on a few concrete finite models of the knowledge base. A concept not
//! entailed in some sample model is certainly not entailed by the KB, which
//! rejects most enumeration candidates without touching the type engine.
//! Helper names are covered by baking helper interpretations into extra
//! sample copies.

use std::collections::BTreeSet;

use crate::concept::Concept;
use crate::structure::FiniteStructure;
use crate::types::Reasoner;
use crate::weak::sample_finite_models;

pub struct ModelFilter {
    structures: Vec<FiniteStructure>,
}

const MAX_STRUCTURES: usize = 160;

impl ModelFilter {
    /// Builds sample models and, when helper names are given, copies with
    /// every helper interpretation (up to a cap, smallest interpretations
    /// first).
    pub fn build(reasoner: &Reasoner, helpers: &[String]) -> ModelFilter {
        let bases = sample_finite_models(reasoner, 4);
        let mut structures = Vec::new();
        for base in &bases {
            if helpers.is_empty() {
                structures.push(base.clone());
                continue;
            }
            let n = base.len();
            let cells: Vec<(usize, usize)> = (0..helpers.len())
                .flat_map(|h| (0..n).map(move |e| (h, e)))
                .collect();
            let total_patterns = 1usize.checked_shl(cells.len() as u32).unwrap_or(usize::MAX);
            let per_base = MAX_STRUCTURES / bases.len().max(1);
            let mut patterns: Vec<u64> = (0..total_patterns.min(per_base)).map(|p| p as u64).collect();
            // always include the all-ones interpretation
            if total_patterns > per_base {
                patterns.push((total_patterns - 1) as u64);
            }
            patterns.sort_unstable_by_key(|p| (p.count_ones(), *p));
            patterns.dedup();
            for pattern in patterns {
                let mut s = base.clone();
                for (bit, &(h, e)) in cells.iter().enumerate() {
                    if pattern >> bit & 1 == 1 {
                        s.add_unary(helpers[h].clone(), e);
                    }
                }
                structures.push(s);
            }
        }
        ModelFilter { structures }
    }

    pub fn sample_count(&self) -> usize {
        self.structures.len()
    }

    /// True implies `K ⊭ C(constant)`: some sample model refutes the
    /// entailment at the constant.
    pub fn refutes_entailment(&self, c: &Concept, constant: &str) -> bool {
        self.structures.iter().any(|s| {
            s.const_map
                .get(constant)
                .is_some_and(|&e| !s.extension(c).contains(&e))
        })
    }

    /// True implies `K ⊭ ¬C(constant)`: some sample model satisfies `C` at
    /// the constant.
    pub fn refutes_negated_entailment(&self, c: &Concept, constant: &str) -> bool {
        self.structures.iter().any(|s| {
            s.const_map
                .get(constant)
                .is_some_and(|&e| s.extension(c).contains(&e))
        })
    }

    /// True implies the candidate cannot weakly separate: entailment
    /// refuted at a positive example.
    pub fn rejects_weak(&self, c: &Concept, positives: &BTreeSet<String>) -> bool {
        positives.iter().any(|a| self.refutes_entailment(c, a))
    }

    /// True implies the candidate cannot strongly separate.
    pub fn rejects_strong(
        &self,
        c: &Concept,
        positives: &BTreeSet<String>,
        negatives: &BTreeSet<String>,
    ) -> bool {
        positives.iter().any(|a| self.refutes_entailment(c, a))
            || negatives.iter().any(|b| self.refutes_negated_entailment(c, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::Role;
    use crate::parser::parse_kb;

    #[test]
    fn filter_never_rejects_true_entailments() {
        let (l, _) = parse_kb(
            "ontology { A subsumedBy exists R . B; } database { A(a); R(a,b); B(c); } \
             positive { a } negative { c } signature { R A B }",
        )
        .unwrap();
        let r = Reasoner::new(l.kb.clone());
        let filter = ModelFilter::build(&r, &[]);
        assert!(filter.sample_count() > 0);
        let entailed = [
            Concept::atom("A"),
            Concept::exists(Role::named("R"), Concept::atom("B")),
            Concept::top(),
        ];
        for c in &entailed {
            assert!(r.entails_concept(c, "a"));
            assert!(!filter.refutes_entailment(c, "a"), "filter rejected entailed {c}");
        }
        // and it does reject something false quickly
        assert!(filter.refutes_entailment(&Concept::atom("B"), "a"));
    }

    #[test]
    fn helper_interpretations_reject_helper_tautologies() {
        let (l, _) = parse_kb("database { R(a,b); } positive { a } negative { b }").unwrap();
        let r = Reasoner::new(l.kb.clone());
        let filter = ModelFilter::build(&r, &["H1".to_string()]);
        // H1 alone is never entailed: some interpretation leaves a out
        assert!(filter.refutes_entailment(&Concept::atom("H1"), "a"));
        // H1 or not H1 is entailed everywhere and never rejected
        let taut = Concept::or2(Concept::atom("H1"), Concept::atom("H1").negate());
        assert!(!filter.refutes_entailment(&taut, "a"));
    }
}
