//! ALCI(Σ)-bisimulations between finite structures: the greatest
//! bisimulation as a pair-elimination fixpoint, membership queries, and the
//! functional variant decided by backtracking search.

use std::collections::BTreeSet;

use crate::concept::Role;
use crate::kb::Signature;
use crate::structure::FiniteStructure;

/// A bisimulation relation as a set of element pairs `(d in S1, e in S2)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BisimRelation {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl BisimRelation {
    pub fn contains(&self, d: usize, e: usize) -> bool {
        self.pairs.contains(&(d, e))
    }
}

fn sigma_dir_roles(s1: &FiniteStructure, s2: &FiniteStructure, sigma: &Signature) -> Vec<Role> {
    let mut names: BTreeSet<&String> = s1.binary.keys().collect();
    names.extend(s2.binary.keys());
    names
        .into_iter()
        .filter(|n| sigma.contains_role(n))
        .flat_map(|n| [Role::named(n.clone()), Role::inv(n.clone())])
        .collect()
}

fn atoms_agree(s1: &FiniteStructure, d: usize, s2: &FiniteStructure, e: usize, sigma: &Signature) -> bool {
    sigma
        .concepts
        .iter()
        .all(|a| s1.has_unary(a, d) == s2.has_unary(a, e))
}

/// The greatest ALCI(Σ)-bisimulation between two structures: start from all
/// pairs that agree on Σ-concept names and remove pairs violating the forth
/// or back condition for some Σ-role (or inverse) until stable. Processes a
/// worklist of invalidated pairs.
pub fn max_bisimulation(s1: &FiniteStructure, s2: &FiniteStructure, sigma: &Signature) -> BisimRelation {
    let roles = sigma_dir_roles(s1, s2, sigma);
    let (n1, n2) = (s1.len(), s2.len());
    let mut alive = vec![true; n1 * n2];
    let idx = |d: usize, e: usize| d * n2 + e;

    for d in 0..n1 {
        for e in 0..n2 {
            if !atoms_agree(s1, d, s2, e, sigma) {
                alive[idx(d, e)] = false;
            }
        }
    }

    let violated = |alive: &[bool], d: usize, e: usize| -> bool {
        for role in &roles {
            for d2 in s1.role_successors(role, d) {
                if !s2.role_successors(role, e).iter().any(|&e2| alive[idx(d2, e2)]) {
                    return true;
                }
            }
            for e2 in s2.role_successors(role, e) {
                if !s1.role_successors(role, d).iter().any(|&d2| alive[idx(d2, e2)]) {
                    return true;
                }
            }
        }
        false
    };

    let mut queue: Vec<(usize, usize)> = (0..n1)
        .flat_map(|d| (0..n2).map(move |e| (d, e)))
        .filter(|&(d, e)| alive[idx(d, e)] && violated(&alive, d, e))
        .collect();
    while let Some((d, e)) = queue.pop() {
        if !alive[idx(d, e)] {
            continue;
        }
        alive[idx(d, e)] = false;
        // only neighbors of (d, e) can become newly violated
        for role in &roles {
            for d2 in s1.role_successors(&role.inverse(), d) {
                for e2 in s2.role_successors(&role.inverse(), e) {
                    if alive[idx(d2, e2)] && violated(&alive, d2, e2) {
                        queue.push((d2, e2));
                    }
                }
            }
        }
    }

    let mut pairs = BTreeSet::new();
    for d in 0..n1 {
        for e in 0..n2 {
            if alive[idx(d, e)] {
                pairs.insert((d, e));
            }
        }
    }
    BisimRelation { pairs }
}

/// Membership of `(d, e)` in the greatest bisimulation.
pub fn bisimilar(
    s1: &FiniteStructure,
    d: usize,
    s2: &FiniteStructure,
    e: usize,
    sigma: &Signature,
) -> bool {
    max_bisimulation(s1, s2, sigma).contains(d, e)
}

/// Does some functional bisimulation (a partial function from `dom(S1)`)
/// contain `(d, e)`? The domain of any such function must cover the
/// Σ-connected component of `d`, so the search assigns images to exactly
/// that component, constrained to pairs of the greatest bisimulation.
pub fn functional_bisim_exists(
    s1: &FiniteStructure,
    d: usize,
    s2: &FiniteStructure,
    e: usize,
    sigma: &Signature,
) -> bool {
    let max = max_bisimulation(s1, s2, sigma);
    if !max.contains(d, e) {
        return false;
    }
    let roles = sigma_dir_roles(s1, s2, sigma);

    // Σ-connected component of d in S1, BFS order
    let mut component = Vec::new();
    let mut seen = vec![false; s1.len()];
    let mut queue = std::collections::VecDeque::from([d]);
    seen[d] = true;
    while let Some(x) = queue.pop_front() {
        component.push(x);
        for role in &roles {
            for y in s1.role_successors(role, x) {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    let pos_of: std::collections::HashMap<usize, usize> =
        component.iter().enumerate().map(|(i, &x)| (x, i)).collect();

    let mut images: Vec<Option<usize>> = vec![None; component.len()];
    images[0] = Some(e);

    fn consistent(
        s1: &FiniteStructure,
        s2: &FiniteStructure,
        roles: &[Role],
        component: &[usize],
        pos_of: &std::collections::HashMap<usize, usize>,
        images: &[Option<usize>],
        i: usize,
    ) -> bool {
        let x = component[i];
        let fx = images[i].unwrap();
        for role in roles {
            // forth: assigned successors must be mapped to successors
            for y in s1.role_successors(role, x) {
                let j = pos_of[&y];
                if let Some(fy) = images[j] {
                    if !s2.has_dir_edge(role, fx, fy) {
                        return false;
                    }
                }
            }
            // back, checkable once all successors of x are assigned
            let succs = s1.role_successors(role, x);
            if succs.iter().all(|y| images[pos_of[y]].is_some()) {
                for fy in s2.role_successors(role, fx) {
                    if !succs.iter().any(|y| images[pos_of[y]] == Some(fy)) {
                        return false;
                    }
                }
            }
            // incoming edges from assigned elements
            for y in s1.role_successors(&role.inverse(), x) {
                let j = pos_of[&y];
                if let Some(fy) = images[j] {
                    if !s2.has_dir_edge(role, fy, fx) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn search(
        s1: &FiniteStructure,
        s2: &FiniteStructure,
        roles: &[Role],
        max: &BisimRelation,
        component: &[usize],
        pos_of: &std::collections::HashMap<usize, usize>,
        images: &mut Vec<Option<usize>>,
        next: usize,
    ) -> bool {
        if next == component.len() {
            // final full back-condition sweep
            return (0..component.len())
                .all(|i| consistent(s1, s2, roles, component, pos_of, images, i));
        }
        if images[next].is_some() {
            return search(s1, s2, roles, max, component, pos_of, images, next + 1);
        }
        let x = component[next];
        for fe in 0..s2.len() {
            if !max.contains(x, fe) {
                continue;
            }
            images[next] = Some(fe);
            if consistent(s1, s2, roles, component, pos_of, images, next)
                && search(s1, s2, roles, max, component, pos_of, images, next + 1)
            {
                return true;
            }
            images[next] = None;
        }
        false
    }

    consistent(s1, s2, &roles, &component, &pos_of, &images, 0)
        && search(s1, s2, &roles, &max, &component, &pos_of, &mut images, 1)
}
