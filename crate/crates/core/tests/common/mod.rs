//! Shared oracles for the integration suites: brute-force model search over
//! tiny domains and exhaustive map enumeration, independent of the type
//! engine and the backtracking searches they check.

use std::collections::BTreeMap;

use alcisep_core::{Database, FiniteStructure, KnowledgeBase, Signature};

/// Enumerates every structure over `1..=max_elements` elements interpreting
/// the given signature and constants, invoking the callback until it
/// returns true; returns whether any callback accepted. Exponential; keep
/// the signature tiny.
pub fn exists_structure(
    sig: &Signature,
    constants: &[String],
    max_elements: usize,
    accept: &mut dyn FnMut(&FiniteStructure) -> bool,
) -> bool {
    for n in 1..=max_elements {
        let concept_names: Vec<&String> = sig.concepts.iter().collect();
        let role_names: Vec<&String> = sig.roles.iter().collect();
        let unary_cells = concept_names.len() * n;
        let binary_cells = role_names.len() * n * n;
        let const_choices = n.pow(constants.len() as u32);
        let unary_patterns = 1usize << unary_cells;
        let binary_patterns = 1usize << binary_cells;
        for cpat in 0..const_choices {
            for upat in 0..unary_patterns {
                for bpat in 0..binary_patterns {
                    let mut s = FiniteStructure::default();
                    for i in 0..n {
                        s.add_element(format!("e{i}"));
                    }
                    let mut c = cpat;
                    for name in constants {
                        s.const_map.insert(name.clone(), c % n);
                        c /= n;
                    }
                    for (k, a) in concept_names.iter().enumerate() {
                        for e in 0..n {
                            if upat >> (k * n + e) & 1 == 1 {
                                s.add_unary((*a).clone(), e);
                            }
                        }
                    }
                    for (k, r) in role_names.iter().enumerate() {
                        for x in 0..n {
                            for y in 0..n {
                                if bpat >> (k * n * n + x * n + y) & 1 == 1 {
                                    s.add_edge((*r).clone(), x, y);
                                }
                            }
                        }
                    }
                    if accept(&s) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Brute-force satisfiability over tiny domains: sound only in the
/// "model found" direction.
pub fn tiny_model_exists(kb: &KnowledgeBase, max_elements: usize) -> bool {
    let sig = kb.signature();
    let constants: Vec<String> = kb.database.constants().into_iter().collect();
    exists_structure(&sig, &constants, max_elements, &mut |s| s.is_model(kb))
}

/// Exhaustive Σ-homomorphism existence: all maps from the database
/// constants into the target domain, anchored.
pub fn hom_exists_exhaustive(
    src: &Database,
    anchor: &str,
    target: &FiniteStructure,
    target_elem: usize,
    sigma: &Signature,
) -> bool {
    let consts: Vec<String> = src.constants().into_iter().collect();
    let n = target.len();
    if n == 0 {
        return false;
    }
    let total = n.pow(consts.len() as u32);
    'maps: for code in 0..total {
        let mut map: BTreeMap<&str, usize> = BTreeMap::new();
        let mut c = code;
        for k in &consts {
            map.insert(k.as_str(), c % n);
            c /= n;
        }
        if map[anchor] != target_elem {
            continue;
        }
        for (a, x) in &src.unary {
            if sigma.contains_concept(a) && !target.has_unary(a, map[x.as_str()]) {
                continue 'maps;
            }
        }
        for (r, x, y) in &src.binary {
            if sigma.contains_role(r) && !target.has_edge(r, map[x.as_str()], map[y.as_str()]) {
                continue 'maps;
            }
        }
        return true;
    }
    false
}
