//! Canonical enumeration of ALCI concepts over a signature by nondecreasing
//! size, used for separator search and synthesis.
//!
//! Canonical form mirrors the parser's normalization: conjunctions are
//! sorted, deduplicated multisets of non-conjunction parts; double negation
//! never appears. Concepts equivalent to a smaller candidate under the
//! empty ontology are pruned syntactically: `bot` and `not top`, `exists
//! R . bot`, conjunctions containing `top`, `bot` or a complementary pair.

use crate::concept::{Concept, Role};
use crate::kb::Signature;

pub struct ConceptEnumerator {
    atoms: Vec<Concept>,
    roles: Vec<Role>,
    /// `by_size[s]` holds the canonical concepts of size `s + 1`.
    by_size: Vec<Vec<Concept>>,
    /// Non-conjunction concepts by size, the building blocks of conjunctions.
    non_and_by_size: Vec<Vec<Concept>>,
}

impl ConceptEnumerator {
    /// Alphabet: `top`, the Σ concept names, the helper names, and the
    /// Σ roles in both orientations.
    pub fn new(sigma: &Signature, helpers: &[String]) -> ConceptEnumerator {
        let mut atoms = vec![Concept::top()];
        atoms.extend(sigma.concepts.iter().map(Concept::atom));
        atoms.extend(helpers.iter().map(Concept::atom));
        atoms.sort();
        atoms.dedup();
        let roles = sigma
            .roles
            .iter()
            .flat_map(|n| [Role::named(n.clone()), Role::inv(n.clone())])
            .collect();
        ConceptEnumerator { atoms, roles, by_size: Vec::new(), non_and_by_size: Vec::new() }
    }

    /// Canonical concepts of the given size (≥ 1), in deterministic order.
    pub fn of_size(&mut self, size: usize) -> &[Concept] {
        assert!(size >= 1);
        while self.by_size.len() < size {
            self.grow();
        }
        &self.by_size[size - 1]
    }

    fn grow(&mut self) {
        let size = self.by_size.len() + 1;
        let mut out: Vec<Concept> = Vec::new();

        if size == 1 {
            out.extend(self.atoms.iter().cloned());
        } else {
            // negations of non-negations (no double negation, no `not top`)
            for c in &self.by_size[size - 2] {
                if matches!(c, Concept::Not(_)) && !c.is_top() {
                    continue;
                }
                if c.is_top() {
                    continue;
                }
                out.push(c.clone().negate());
            }
            // existentials over every role direction, body not `bot`
            for c in &self.by_size[size - 2] {
                if c.is_bot() {
                    continue;
                }
                for role in &self.roles {
                    out.push(Concept::exists(role.clone(), c.clone()));
                }
            }
            // conjunctions: sorted multisets of ≥ 2 distinct non-And parts
            // with total part size = size - (parts - 1)
            let mut parts: Vec<Concept> = Vec::new();
            let pool: Vec<(usize, usize)> = self
                .non_and_by_size
                .iter()
                .enumerate()
                .flat_map(|(s, v)| (0..v.len()).map(move |i| (s, i)))
                .collect();
            self.conjunctions(&pool, 0, size, 0, &mut parts, &mut out);
        }

        out.sort();
        out.dedup();
        let non_and: Vec<Concept> = out
            .iter()
            .filter(|c| !matches!(c, Concept::And(_, _)) || c.is_bot())
            .filter(|c| !c.is_bot())
            .cloned()
            .collect();
        self.by_size.push(out);
        self.non_and_by_size.push(non_and);
    }

    fn conjunctions(
        &self,
        pool: &[(usize, usize)],
        from: usize,
        target: usize,
        used: usize,
        parts: &mut Vec<Concept>,
        out: &mut Vec<Concept>,
    ) {
        if parts.len() >= 2 {
            let total = used + (parts.len() - 1);
            if total == target {
                out.push(Concept::and_all(parts.clone()));
            }
        }
        if parts.len() + 1 > target {
            return;
        }
        for k in from..pool.len() {
            let (s, i) = pool[k];
            let part_size = s + 1;
            let lower_bound = used + part_size + parts.len(); // +1 connective per new part
            if lower_bound > target {
                continue;
            }
            let c = &self.non_and_by_size[s][i];
            if c.is_top() {
                continue; // absorbed
            }
            if parts.iter().any(|p| complementary(p, c)) {
                continue; // contradiction
            }
            parts.push(c.clone());
            self.conjunctions(pool, k + 1, target, used + part_size, parts, out);
            parts.pop();
        }
    }

    /// Iterates all candidates of size 1..=max in (size, structural) order.
    pub fn for_each_up_to(&mut self, max: usize, f: &mut dyn FnMut(&Concept) -> bool) {
        for s in 1..=max {
            let batch: Vec<Concept> = self.of_size(s).to_vec();
            for c in &batch {
                if f(c) {
                    return;
                }
            }
        }
    }
}

fn complementary(a: &Concept, b: &Concept) -> bool {
    match (a, b) {
        (Concept::Not(inner), _) => &**inner == b,
        (_, Concept::Not(inner)) => &**inner == a,
        _ => false,
    }
}

/// Deterministic helper names outside the signature of the knowledge base.
pub fn helper_names(count: usize, kb_sig: &Signature) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 1;
    while out.len() < count {
        let name = format!("H{i}");
        if !kb_sig.contains_concept(&name) && !kb_sig.contains_role(&name) {
            out.push(name);
        }
        i += 1;
    }
    out
}
