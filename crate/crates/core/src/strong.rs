//! Exact decision of strong ALCI(Σ)-separability: amalgamable sets of
//! K-types computed coinductively with memoization, Ψ-satisfiability, and
//! witness enumeration over pairs of examples, with separator synthesis on
//! the separable side.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::concept::Concept;
use crate::enumerate::ConceptEnumerator;
use crate::kb::{Database, KnowledgeBase, LabeledKb, Signature};
use crate::types::{DirRole, Reasoner, TypeTable};

/// A canonical set of type indices.
pub type TypeSet = BTreeSet<usize>;

/// Per-constant strong-inseparability witness data: the realized type `t_c`
/// and the tracking set `Φ_c`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PsiAssignment {
    pub assignments: BTreeMap<String, (usize, TypeSet)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrongWitness {
    /// A verified strongly separating concept.
    Separator { concept: Concept },
    /// A K,a,b-satisfiable Ψ for some pair of examples.
    Psi { positive: String, negative: String, duplicated: bool, psi: PsiAssignment },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongVerdict {
    pub separable: bool,
    pub witness: Option<StrongWitness>,
    /// True when the Φ-cardinality cap or the assignment cap was hit while
    /// no witness was found; the separable verdict is then not certain.
    pub incomplete: bool,
    pub notes: Vec<String>,
}

/// Amalgamability of sets of K-types, computed on demand as a greatest
/// fixpoint: a set is assumed amalgamable while its own check is in
/// progress, which is sound for the coinductive semantics. Failures are
/// cached unconditionally; successes only when no in-progress assumption
/// was used (plus the root of a successful query).
pub struct Amalgamation<'a> {
    table: &'a TypeTable,
    sigma_dirs: Vec<DirRole>,
    sigma_atom_members: Vec<usize>,
    memo: RefCell<HashMap<Vec<u32>, bool>>,
}

impl<'a> Amalgamation<'a> {
    pub fn new(table: &'a TypeTable, sigma: &Signature) -> Amalgamation<'a> {
        let sigma_dirs = table
            .dir_roles()
            .into_iter()
            .filter(|dr| sigma.contains_role(&table.role_display(*dr).name))
            .collect();
        let sigma_atom_members = table
            .closure
            .members()
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match c {
                Concept::Atom(a) if sigma.contains_concept(a) => Some(i),
                _ => None,
            })
            .collect();
        Amalgamation { table, sigma_dirs, sigma_atom_members, memo: RefCell::new(HashMap::new()) }
    }

    /// Σ-concept-name profile of a type, packed into one word.
    pub fn profile_key(&self, t: usize) -> u64 {
        assert!(self.sigma_atom_members.len() <= 64, "more than 64 sigma concept names");
        let bits = self.table.type_bits(t);
        self.sigma_atom_members
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &m)| acc | (u64::from(bits.get(m)) << k))
    }

    pub fn amalgamable(&self, set: &TypeSet) -> bool {
        if set.is_empty() {
            return true;
        }
        let key: Vec<u32> = set.iter().map(|&t| t as u32).collect();
        let mut path = Vec::new();
        let (ok, used) = self.check(&key, &mut path);
        if ok && used {
            // the completed derivation is self-supporting, so the root is in
            // the greatest fixpoint
            self.memo.borrow_mut().insert(key, true);
        }
        ok
    }

    fn check(&self, set: &Vec<u32>, path: &mut Vec<Vec<u32>>) -> (bool, bool) {
        if let Some(&cached) = self.memo.borrow().get(set) {
            return (cached, false);
        }
        // Σ-concept-name agreement across the set
        let first_profile = self.profile_key(set[0] as usize);
        if set.iter().any(|&t| self.profile_key(t as usize) != first_profile) {
            self.memo.borrow_mut().insert(set.clone(), false);
            return (false, false);
        }
        if path.contains(set) {
            return (true, true);
        }
        path.push(set.clone());
        let mut used_any = false;
        let mut ok = true;
        'outer: for &ti in set.iter() {
            let bits = self.table.type_bits(ti as usize);
            for (dr, body, _) in self.table.obligations(bits) {
                if !self.sigma_dirs.contains(&dr) {
                    continue; // non-Σ obligations need only coherence,
                              // which realizability provides
                }
                match self.discharge(set, ti as usize, dr, body, path) {
                    Some(used) => used_any |= used,
                    None => {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        path.pop();
        if !ok {
            self.memo.borrow_mut().insert(set.clone(), false);
            return (false, false);
        }
        if !used_any {
            self.memo.borrow_mut().insert(set.clone(), true);
        }
        (true, used_any)
    }

    /// Finds successor types `t_j'` for every member, with the obligated
    /// body at the obligated member's successor, pairwise role-coherent and
    /// with an amalgamable image set. Candidates are grouped by Σ-profile
    /// since the image set must agree on Σ-concept names.
    fn discharge(
        &self,
        set: &[u32],
        obligated: usize,
        dr: DirRole,
        body: crate::types::Lit,
        path: &mut Vec<Vec<u32>>,
    ) -> Option<bool> {
        let n_types = self.table.type_count();
        let mut profiles: Vec<u64> = (0..n_types).map(|t| self.profile_key(t)).collect();
        profiles.sort_unstable();
        profiles.dedup();

        for profile in profiles {
            // per-member candidate successor lists within this profile
            let mut candidate_lists: Vec<Vec<usize>> = Vec::with_capacity(set.len());
            let mut feasible = true;
            for &tj in set {
                let mask = self.table.successor_mask(tj as usize, dr);
                let list: Vec<usize> = (0..n_types)
                    .filter(|&t2| {
                        mask.get(t2)
                            && self.profile_key(t2) == profile
                            && (tj as usize != obligated
                                || self.table.type_bits(t2).get(body.0) == body.1)
                    })
                    .collect();
                if list.is_empty() {
                    feasible = false;
                    break;
                }
                candidate_lists.push(list);
            }
            if !feasible {
                continue;
            }
            let mut tried: HashSet<Vec<u32>> = HashSet::new();
            let mut image: TypeSet = TypeSet::new();
            if let Some(used) =
                self.product_search(&candidate_lists, 0, &mut image, &mut tried, path)
            {
                return Some(used);
            }
        }
        None
    }

    fn product_search(
        &self,
        lists: &[Vec<usize>],
        pos: usize,
        image: &mut TypeSet,
        tried: &mut HashSet<Vec<u32>>,
        path: &mut Vec<Vec<u32>>,
    ) -> Option<bool> {
        if pos == lists.len() {
            let key: Vec<u32> = image.iter().map(|&t| t as u32).collect();
            if !tried.insert(key.clone()) {
                return None;
            }
            let (ok, used) = self.check(&key, path);
            return ok.then_some(used);
        }
        for &t in &lists[pos] {
            let fresh = image.insert(t);
            if let Some(used) = self.product_search(lists, pos + 1, image, tried, path) {
                if fresh {
                    image.remove(&t);
                }
                return Some(used);
            }
            if fresh {
                image.remove(&t);
            }
        }
        None
    }
}

/// Reference implementation of the amalgamable-set computation: the eager
/// elimination from the full powerset. Exponential in the number of types;
/// intended for cross-checking on small tables.
pub fn amalgamable_eager(table: &TypeTable, sigma: &Signature) -> Vec<TypeSet> {
    let n = table.type_count();
    assert!(n <= 16, "eager elimination is for small type tables only");
    let engine = Amalgamation::new(table, sigma);
    let all_sets: Vec<TypeSet> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|&t| mask >> t & 1 == 1).collect())
        .collect();
    let mut alive: Vec<bool> = all_sets
        .iter()
        .map(|set| {
            let profile = engine.profile_key(*set.iter().next().unwrap());
            set.iter().all(|&t| engine.profile_key(t) == profile)
        })
        .collect();

    let index_of = |set: &TypeSet| -> usize {
        let mask: u32 = set.iter().fold(0, |acc, &t| acc | (1 << t));
        (mask - 1) as usize
    };

    loop {
        let mut changed = false;
        for (si, set) in all_sets.iter().enumerate() {
            if !alive[si] {
                continue;
            }
            let members: Vec<usize> = set.iter().copied().collect();
            let mut ok = true;
            'obligations: for &ti in &members {
                for (dr, body, _) in table.obligations(table.type_bits(ti)) {
                    if !engine.sigma_dirs.contains(&dr) {
                        continue;
                    }
                    // exhaustive search over successor families whose image
                    // set is still alive
                    let lists: Vec<Vec<usize>> = members
                        .iter()
                        .map(|&tj| {
                            let mask = table.successor_mask(tj, dr);
                            (0..n)
                                .filter(|&t2| {
                                    mask.get(t2)
                                        && (tj != ti
                                            || table.type_bits(t2).get(body.0) == body.1)
                                })
                                .collect()
                        })
                        .collect();
                    if lists.iter().any(|l| l.is_empty()) {
                        ok = false;
                        break 'obligations;
                    }
                    let mut found = false;
                    let mut image = TypeSet::new();
                    fn product(
                        lists: &[Vec<usize>],
                        pos: usize,
                        image: &mut TypeSet,
                        alive: &[bool],
                        index_of: &dyn Fn(&TypeSet) -> usize,
                        found: &mut bool,
                    ) {
                        if *found {
                            return;
                        }
                        if pos == lists.len() {
                            if alive[index_of(image)] {
                                *found = true;
                            }
                            return;
                        }
                        for &t in &lists[pos] {
                            let fresh = image.insert(t);
                            product(lists, pos + 1, image, alive, index_of, found);
                            if fresh {
                                image.remove(&t);
                            }
                            if *found {
                                return;
                            }
                        }
                    }
                    product(&lists, 0, &mut image, &alive, &index_of, &mut found);
                    if !found {
                        ok = false;
                        break 'obligations;
                    }
                }
            }
            if !ok {
                alive[si] = false;
                changed = true;
            }
        }
        if !changed {
            return all_sets
                .into_iter()
                .zip(alive)
                .filter_map(|(s, a)| a.then_some(s))
                .collect();
        }
    }
}

/// The four K,a,b-satisfiability conditions for a Ψ mapping: a joint model
/// realizing every `t_c`, amalgamability of `Φ_c ∪ {t_c}` and of
/// `Φ_a ∪ Φ_b ∪ {t_a, t_b}`, and role coherence of the tracking sets along
/// every Σ-role database edge (in both directions).
pub fn psi_satisfiable(
    reasoner: &Reasoner,
    sigma: &Signature,
    psi: &PsiAssignment,
    a: &str,
    b: &str,
) -> bool {
    let table = reasoner.table();
    let engine = Amalgamation::new(table, sigma);
    psi_satisfiable_with(reasoner, &engine, sigma, psi, a, b)
}

fn psi_satisfiable_with(
    reasoner: &Reasoner,
    engine: &Amalgamation<'_>,
    sigma: &Signature,
    psi: &PsiAssignment,
    a: &str,
    b: &str,
) -> bool {
    let table = reasoner.table();
    let db = &reasoner.kb().database;
    let cons = db.constants();
    if !cons.iter().all(|c| psi.assignments.contains_key(c)) {
        return false;
    }
    let (Some(&(t_a, ref phi_a)), Some(&(t_b, ref phi_b))) =
        (psi.assignments.get(a), psi.assignments.get(b))
    else {
        return false;
    };

    // 1: one model realizes every t_c at its constant
    let requirements: BTreeMap<String, Vec<crate::types::Lit>> = psi
        .assignments
        .iter()
        .map(|(c, &(t, _))| {
            let lits: Vec<crate::types::Lit> =
                (0..table.closure.len()).map(|i| (i, table.type_bits(t).get(i))).collect();
            (c.clone(), lits)
        })
        .collect();
    if table.solve_assignment(db, &requirements).is_none() {
        return false;
    }

    // 2: Φ_c ∪ {t_c} amalgamable for every constant
    for (_, &(t, ref phi)) in psi.assignments.iter() {
        let mut set = phi.clone();
        set.insert(t);
        if !engine.amalgamable(&set) {
            return false;
        }
    }

    // 3: Φ_a ∪ Φ_b ∪ {t_a, t_b} amalgamable
    let mut joint: TypeSet = phi_a.union(phi_b).copied().collect();
    joint.insert(t_a);
    joint.insert(t_b);
    if !engine.amalgamable(&joint) {
        return false;
    }

    // 4: coherence steps along Σ-role database atoms, both orientations
    for (r, d, e) in &db.binary {
        if !sigma.contains_role(r) {
            continue;
        }
        let Some(name_idx) = table.closure.role_index(r) else { continue };
        let fwd = DirRole { name_idx, inverted: false };
        let bwd = DirRole { name_idx, inverted: true };
        let phi_d = &psi.assignments[d].1;
        let phi_e = &psi.assignments[e].1;
        for &t in phi_d {
            if !phi_e.iter().any(|&t2| {
                table.edge_compatible(table.type_bits(t), fwd, table.type_bits(t2))
            }) {
                return false;
            }
        }
        for &t in phi_e {
            if !phi_d.iter().any(|&t2| {
                table.edge_compatible(table.type_bits(t), bwd, table.type_bits(t2))
            }) {
                return false;
            }
        }
    }
    true
}

/// Caps for the witness enumeration.
#[derive(Clone, Copy, Debug)]
pub struct StrongBudget {
    /// Maximum cardinality of each Φ_c; None = unbounded. The default is
    /// unbounded for type tables of at most 12 types and 4 otherwise.
    pub phi_cap: Option<usize>,
    pub assignment_cap: usize,
}

impl Default for StrongBudget {
    fn default() -> Self {
        StrongBudget { phi_cap: None, assignment_cap: 50_000 }
    }
}

impl StrongBudget {
    fn effective_phi_cap(&self, type_count: usize) -> Option<usize> {
        match self.phi_cap {
            Some(k) => Some(k),
            None if type_count <= 12 => None,
            None => Some(4),
        }
    }
}

/// Searches for a K,a,b-satisfiable Ψ. Exact over the finite type table up
/// to the Φ-cardinality cap; the enumeration additionally requires
/// `t_b ∈ Φ_a` and `t_a ∈ Φ_b` so that the database edges of the example
/// constants are tracked across the bisimulation (the canonical witness
/// from a model always satisfies this). Returns the witness or None, plus a
/// flag telling whether a cap was hit.
pub fn strong_inseparable_witness(
    reasoner: &Reasoner,
    sigma: &Signature,
    a: &str,
    b: &str,
    budget: StrongBudget,
) -> (Option<PsiAssignment>, bool) {
    let table = reasoner.table();
    let db = &reasoner.kb().database;
    let consts: Vec<String> = db.constants().into_iter().collect();
    let engine = Amalgamation::new(table, sigma);

    let phi_cap = budget.effective_phi_cap(table.type_count());
    let mut capped = false;

    let assignments = table.all_assignments(db, budget.assignment_cap);
    if assignments.len() >= budget.assignment_cap {
        capped = true;
    }

    let a_pos = consts.iter().position(|c| c == a).expect("a in database");
    let b_pos = consts.iter().position(|c| c == b).expect("b in database");

    // Σ-role adjacency between constants, with directions
    let mut arcs: Vec<(usize, usize, DirRole)> = Vec::new();
    for (r, d, e) in &db.binary {
        if !sigma.contains_role(r) {
            continue;
        }
        let Some(name_idx) = table.closure.role_index(r) else { continue };
        let di = consts.iter().position(|c| c == d).unwrap();
        let ei = consts.iter().position(|c| c == e).unwrap();
        arcs.push((di, ei, DirRole { name_idx, inverted: false }));
        arcs.push((ei, di, DirRole { name_idx, inverted: true }));
    }

    // constants Σ-reachable from a or b carry tracking sets; the rest keep ∅
    let mut tracked = vec![false; consts.len()];
    let mut queue = vec![a_pos, b_pos];
    while let Some(x) = queue.pop() {
        if tracked[x] {
            continue;
        }
        tracked[x] = true;
        for &(d, e, _) in &arcs {
            if d == x && !tracked[e] {
                queue.push(e);
            }
            if e == x && !tracked[d] {
                queue.push(d);
            }
        }
    }

    // assignments that agree on the tracked constants yield the same
    // Φ-search; untracked constants keep the empty tracking set
    let tracked_positions: Vec<usize> = (0..consts.len()).filter(|&c| tracked[c]).collect();
    let mut seen_projections: HashSet<Vec<usize>> = HashSet::new();
    // Φ pools depend only on (t_c, seed) pairs
    let mut pool_cache: HashMap<(usize, Option<usize>), (Vec<TypeSet>, bool)> = HashMap::new();

    for assignment in &assignments {
        let (t_a, t_b) = (assignment[a_pos], assignment[b_pos]);
        if engine.profile_key(t_a) != engine.profile_key(t_b) {
            continue;
        }
        let projection: Vec<usize> = tracked_positions.iter().map(|&c| assignment[c]).collect();
        if !seen_projections.insert(projection) {
            continue;
        }
        // candidate Φ pools per constant: subsets of the profile class of
        // t_c that keep Φ_c ∪ {t_c} amalgamable, by ascending cardinality
        let mut pools: Vec<Vec<TypeSet>> = Vec::with_capacity(consts.len());
        let mut feasible = true;
        for (ci, &t_c) in assignment.iter().enumerate() {
            if !tracked[ci] {
                pools.push(vec![TypeSet::new()]);
                continue;
            }
            let seed_type = if ci == a_pos {
                Some(t_b)
            } else if ci == b_pos {
                Some(t_a)
            } else {
                None
            };
            let (candidates, pool_capped) = pool_cache
                .entry((t_c, seed_type))
                .or_insert_with(|| {
                    phi_pool(table, &engine, t_c, seed_type, phi_cap)
                })
                .clone();
            if pool_capped {
                capped = true;
            }
            if candidates.is_empty() {
                feasible = false;
                break;
            }
            pools.push(candidates);
        }
        if !feasible {
            continue;
        }

        // order constants: tracked ones first (they interact via arcs)
        let mut order: Vec<usize> = (0..consts.len()).collect();
        order.sort_by_key(|&c| (!tracked[c], c));

        let mut choice: Vec<usize> = vec![0; consts.len()];
        if search_phi(&engine, table, &arcs, &pools, &order, 0, &mut choice, &|choice| {
            // condition 3 on the full choice
            let phi_a = &pools[a_pos][choice[a_pos]];
            let phi_b = &pools[b_pos][choice[b_pos]];
            let mut joint: TypeSet = phi_a.union(phi_b).copied().collect();
            joint.insert(t_a);
            joint.insert(t_b);
            engine.amalgamable(&joint)
        }) {
            let psi = PsiAssignment {
                assignments: consts
                    .iter()
                    .enumerate()
                    .map(|(ci, c)| (c.clone(), (assignment[ci], pools[ci][choice[ci]].clone())))
                    .collect(),
            };
            debug_assert!(psi_satisfiable_with(reasoner, &engine, sigma, &psi, a, b));
            return (Some(psi), capped);
        }
    }
    (None, capped)
}

/// All tracking-set candidates for a constant realizing `t_c`, optionally
/// required to contain a seed type: subsets of the Σ-profile class of `t_c`
/// that keep `Φ ∪ {t_c}` amalgamable, by ascending cardinality. The second
/// component reports whether the cardinality cap truncated the pool.
fn phi_pool(
    table: &TypeTable,
    engine: &Amalgamation<'_>,
    t_c: usize,
    seed_type: Option<usize>,
    phi_cap: Option<usize>,
) -> (Vec<TypeSet>, bool) {
    let class: Vec<usize> = (0..table.type_count())
        .filter(|&t| engine.profile_key(t) == engine.profile_key(t_c))
        .collect();
    let mut seed = TypeSet::new();
    if let Some(s) = seed_type {
        seed.insert(s);
    }
    let free: Vec<usize> = class.iter().copied().filter(|t| !seed.contains(t)).collect();
    let mut capped = false;
    let max_extra = match phi_cap {
        Some(k) => {
            if k < seed.len() {
                return (Vec::new(), true);
            }
            let allowed = k - seed.len();
            if allowed < free.len() {
                capped = true;
            }
            allowed.min(free.len())
        }
        None => free.len(),
    };
    let mut candidates: Vec<TypeSet> = Vec::new();
    for size in 0..=max_extra {
        subsets_of_size(&free, size, &mut |extra| {
            let mut phi = seed.clone();
            phi.extend(extra.iter().copied());
            let mut with_t = phi.clone();
            with_t.insert(t_c);
            if engine.amalgamable(&with_t) {
                candidates.push(phi);
            }
        });
    }
    (candidates, capped)
}

fn subsets_of_size(pool: &[usize], size: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(pool: &[usize], size: usize, from: usize, acc: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if acc.len() == size {
            f(acc);
            return;
        }
        let needed = size - acc.len();
        for i in from..pool.len() {
            if pool.len() - i < needed {
                break;
            }
            acc.push(pool[i]);
            rec(pool, size, i + 1, acc, f);
            acc.pop();
        }
    }
    rec(pool, size, 0, &mut Vec::new(), f);
}

#[allow(clippy::too_many_arguments)]
fn search_phi(
    engine: &Amalgamation<'_>,
    table: &TypeTable,
    arcs: &[(usize, usize, DirRole)],
    pools: &[Vec<TypeSet>],
    order: &[usize],
    depth: usize,
    choice: &mut Vec<usize>,
    final_check: &dyn Fn(&[usize]) -> bool,
) -> bool {
    if depth == order.len() {
        return final_check(choice);
    }
    let c = order[depth];
    let assigned: Vec<usize> = order[..depth].to_vec();
    'cand: for k in 0..pools[c].len() {
        choice[c] = k;
        // condition-4 arcs against already assigned neighbors (and self loops)
        for &(d, e, dr) in arcs {
            let d_ready = d == c || assigned.contains(&d);
            let e_ready = e == c || assigned.contains(&e);
            if !(d_ready && e_ready) || (d != c && e != c) {
                continue;
            }
            let phi_d = &pools[d][choice[d]];
            let phi_e = &pools[e][choice[e]];
            for &t in phi_d {
                if !phi_e.iter().any(|&t2| {
                    table.edge_compatible(table.type_bits(t), dr, table.type_bits(t2))
                }) {
                    continue 'cand;
                }
            }
        }
        let _ = engine;
        if search_phi(engine, table, arcs, pools, order, depth + 1, choice, final_check) {
            return true;
        }
    }
    false
}

/// The full decision: if the KB is unsatisfiable, `top` strongly separates;
/// otherwise every pair in P × N must fail the Ψ search. Pairs whose
/// examples share a connected component are checked on a disjoint renamed
/// copy of the database.
pub fn strong_separable(
    reasoner: &Reasoner,
    labeled: &LabeledKb,
    budget: StrongBudget,
) -> StrongVerdict {
    if !reasoner.kb_satisfiable() {
        return StrongVerdict {
            separable: true,
            witness: Some(StrongWitness::Separator { concept: Concept::top() }),
            incomplete: false,
            notes: vec!["knowledge base is unsatisfiable: top strongly separates".into()],
        };
    }
    let mut incomplete = false;
    let mut notes = Vec::new();
    let mut duplicated: Option<(Reasoner, String)> = None;

    for a in &labeled.positives {
        for b in &labeled.negatives {
            let same_component = {
                let comp = labeled.kb.database.connected_component(a).expect("a in database");
                comp.constants().contains(b)
            };
            let (psi, capped, dup, b_used) = if same_component {
                let (dup_reasoner, suffix) = duplicated.get_or_insert_with(|| {
                    let (kb, suffix) = duplicate_database(&labeled.kb);
                    (Reasoner::new(kb), suffix)
                });
                let b_copy = format!("{b}{suffix}");
                let (psi, capped) =
                    strong_inseparable_witness(dup_reasoner, &labeled.sigma, a, &b_copy, budget);
                (psi, capped, true, b_copy)
            } else {
                let (psi, capped) =
                    strong_inseparable_witness(reasoner, &labeled.sigma, a, b, budget);
                (psi, capped, false, b.clone())
            };
            if let Some(psi) = psi {
                return StrongVerdict {
                    separable: false,
                    witness: Some(StrongWitness::Psi {
                        positive: a.clone(),
                        negative: b_used,
                        duplicated: dup,
                        psi,
                    }),
                    incomplete: false,
                    notes,
                };
            }
            if capped {
                incomplete = true;
                notes.push(format!("witness search for ({a},{b}) hit an enumeration cap"));
            }
        }
    }
    StrongVerdict { separable: true, witness: None, incomplete, notes }
}

/// Disjoint union of the database with a renamed copy of itself; returns
/// the new KB and the rename suffix.
pub fn duplicate_database(kb: &KnowledgeBase) -> (KnowledgeBase, String) {
    let cons = kb.database.constants();
    let mut suffix = "_copy".to_string();
    let mut n = 1;
    while cons.iter().any(|c| cons.contains(&format!("{c}{suffix}"))) {
        n += 1;
        suffix = format!("_copy{n}");
    }
    let renamed = kb.database.with_renamed_copy(&|c| format!("{c}{suffix}"));
    (KnowledgeBase { ontology: kb.ontology.clone(), database: renamed }, suffix)
}

/// Enumerates canonical ALCI(Σ)-concepts by size and returns the first that
/// strongly separates: entailed at every positive example with its negation
/// entailed at every negative one.
pub fn strong_separator_synthesize(
    reasoner: &Reasoner,
    labeled: &LabeledKb,
    max_size: usize,
) -> Option<Concept> {
    let filter = crate::filter::ModelFilter::build(reasoner, &[]);
    let mut enumerator = ConceptEnumerator::new(&labeled.sigma, &[]);
    let mut hit = None;
    enumerator.for_each_up_to(max_size, &mut |c| {
        if filter.rejects_strong(c, &labeled.positives, &labeled.negatives) {
            return false;
        }
        let oracle = reasoner.concept_oracle(c);
        let ok = labeled.positives.iter().all(|a| oracle.entails_at(a))
            && labeled.negatives.iter().all(|b| oracle.entails_negation_at(b));
        if ok {
            debug_assert!(is_strong_separator(reasoner, labeled, c));
            hit = Some(c.clone());
        }
        ok
    });
    hit
}

/// Strong separation test by the entailment oracle.
pub fn is_strong_separator(reasoner: &Reasoner, labeled: &LabeledKb, concept: &Concept) -> bool {
    labeled.positives.iter().all(|a| reasoner.entails_concept(concept, a))
        && labeled
            .negatives
            .iter()
            .all(|b| reasoner.entails_concept(&concept.clone().negate(), b))
}

/// Re-verification of a strong witness for report checking.
pub fn verify_strong_witness(
    reasoner: &Reasoner,
    labeled: &LabeledKb,
    witness: &StrongWitness,
) -> bool {
    match witness {
        StrongWitness::Separator { concept } => {
            let csig = Signature::of_concept(concept);
            csig.is_subset_of(&labeled.sigma) && is_strong_separator(reasoner, labeled, concept)
        }
        StrongWitness::Psi { positive, negative, duplicated, psi } => {
            if *duplicated {
                let (kb, _) = duplicate_database(&labeled.kb);
                let dup = Reasoner::new(kb);
                psi_satisfiable(&dup, &labeled.sigma, psi, positive, negative)
            } else {
                psi_satisfiable(reasoner, &labeled.sigma, psi, positive, negative)
            }
        }
    }
}

/// Extracts the database whose constants a Ψ witness refers to, for
/// display.
pub fn witness_database(labeled: &LabeledKb, witness: &StrongWitness) -> Database {
    match witness {
        StrongWitness::Psi { duplicated: true, .. } => duplicate_database(&labeled.kb).0.database,
        _ => labeled.kb.database.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concept::Role;
    use crate::parser::parse_kb;

    fn setup(text: &str) -> (Reasoner, LabeledKb) {
        let (l, _) = parse_kb(text).unwrap();
        (Reasoner::new(l.kb.clone()), l)
    }

    const EX61_R: &str = "ontology { A subsumedBy forall R . not A; } \
                          database { R(a,a); A(b); } positive { a } negative { b } signature { R }";
    const EX61_RA: &str = "ontology { A subsumedBy forall R . not A; } \
                           database { R(a,a); A(b); } positive { a } negative { b } signature { R A }";

    #[test]
    fn singleton_sets_are_amalgamable() {
        let (r, l) = setup(EX61_R);
        let engine = Amalgamation::new(r.table(), &l.sigma);
        for t in 0..r.table().type_count() {
            assert!(engine.amalgamable(&[t].into_iter().collect()));
        }
    }

    #[test]
    fn profile_disagreement_blocks_amalgamation() {
        let (r, l) = setup(EX61_RA);
        let engine = Amalgamation::new(r.table(), &l.sigma);
        let table = r.table();
        let a_lit = table.closure.lit_of(&Concept::atom("A")).unwrap();
        let with_a =
            (0..table.type_count()).find(|&t| table.type_bits(t).get(a_lit.0) == a_lit.1).unwrap();
        let without_a =
            (0..table.type_count()).find(|&t| table.type_bits(t).get(a_lit.0) != a_lit.1).unwrap();
        assert!(!engine.amalgamable(&[with_a, without_a].into_iter().collect()));
    }

    #[test]
    fn example_6_1_amalgamable_pair_without_a_in_sigma() {
        // Σ = {R}: the A-type of b and a no-successor type of a are
        // amalgamable since A is invisible
        let (r, l) = setup(EX61_R);
        let engine = Amalgamation::new(r.table(), &l.sigma);
        let table = r.table();
        let a_lit = table.closure.lit_of(&Concept::atom("A")).unwrap();
        let ex_lit = table
            .closure
            .lit_of(&Concept::exists(Role::named("R"), Concept::atom("A")))
            .unwrap();
        let t1 = (0..table.type_count())
            .find(|&t| table.type_bits(t).get(a_lit.0) && !table.type_bits(t).get(ex_lit.0))
            .unwrap();
        let t3 = (0..table.type_count())
            .find(|&t| !table.type_bits(t).get(a_lit.0) && !table.type_bits(t).get(ex_lit.0))
            .unwrap();
        assert!(engine.amalgamable(&[t1, t3].into_iter().collect()));
    }

    #[test]
    fn coinductive_matches_eager_on_example_6_1() {
        for text in [EX61_R, EX61_RA] {
            let (r, l) = setup(text);
            let table = r.table();
            let eager: std::collections::BTreeSet<TypeSet> =
                amalgamable_eager(table, &l.sigma).into_iter().collect();
            let engine = Amalgamation::new(table, &l.sigma);
            let n = table.type_count();
            for mask in 1u32..(1 << n) {
                let set: TypeSet = (0..n).filter(|&t| mask >> t & 1 == 1).collect();
                assert_eq!(
                    engine.amalgamable(&set),
                    eager.contains(&set),
                    "disagreement on {set:?} for {text}"
                );
            }
        }
    }

    #[test]
    fn amalgamability_monotone_under_subsets() {
        let (r, l) = setup(EX61_R);
        let table = r.table();
        let engine = Amalgamation::new(table, &l.sigma);
        let n = table.type_count();
        for mask in 1u32..(1 << n) {
            let set: TypeSet = (0..n).filter(|&t| mask >> t & 1 == 1).collect();
            if engine.amalgamable(&set) {
                for sub_mask in 1u32..mask {
                    if sub_mask & mask == sub_mask {
                        let sub: TypeSet = (0..n).filter(|&t| sub_mask >> t & 1 == 1).collect();
                        assert!(engine.amalgamable(&sub), "subset {sub:?} of {set:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn example_6_1_sigma_r_inseparable_with_witness() {
        let (r, l) = setup(EX61_R);
        let v = strong_separable(&r, &l, StrongBudget::default());
        assert!(!v.separable);
        let Some(w @ StrongWitness::Psi { .. }) = &v.witness else { panic!("expected psi") };
        assert!(verify_strong_witness(&r, &l, w));
    }

    #[test]
    fn example_6_1_sigma_ra_separable_and_synthesis_finds_not_a() {
        let (r, l) = setup(EX61_RA);
        let v = strong_separable(&r, &l, StrongBudget::default());
        assert!(v.separable);
        assert!(!v.incomplete);
        let c = strong_separator_synthesize(&r, &l, 3).expect("synthesis");
        assert_eq!(c, Concept::atom("A").negate());
        assert!(is_strong_separator(&r, &l, &c));
    }

    #[test]
    fn disconnected_atoms_inseparable_without_ontology() {
        // nothing entails ¬A at b when the ontology is empty: a model may
        // put b into A as well, so no concept strongly separates; the
        // witness realizes the same type at both constants
        let (r, l) = setup(
            "database { A(a); B(b); } positive { a } negative { b } signature { A B }",
        );
        assert!(!is_strong_separator(&r, &l, &Concept::atom("A")));
        let v = strong_separable(&r, &l, StrongBudget::default());
        assert!(!v.separable);
        let Some(StrongWitness::Psi { psi, .. }) = &v.witness else { panic!() };
        let (t_a, _) = psi.assignments["a"];
        let (t_b, _) = psi.assignments["b"];
        assert_eq!(t_a, t_b);
    }

    #[test]
    fn disconnected_atoms_separable_with_disjointness() {
        // B ⊑ ¬A forces ¬A at b, making A a strong separator
        let (r, l) = setup(
            "ontology { B subsumedBy not A; } database { A(a); B(b); } \
             positive { a } negative { b } signature { A B }",
        );
        let v = strong_separable(&r, &l, StrongBudget::default());
        assert!(v.separable);
        let c = strong_separator_synthesize(&r, &l, 4).expect("synthesis");
        // smallest in enumeration order: A itself
        assert_eq!(c, Concept::atom("A"));
        assert!(is_strong_separator(&r, &l, &c));
    }

    #[test]
    fn same_example_inseparable_via_duplication() {
        let (r, l) = setup("database { R(a,e); } positive { a } negative { a } signature { R }");
        let v = strong_separable(&r, &l, StrongBudget::default());
        assert!(!v.separable);
        let Some(w @ StrongWitness::Psi { duplicated: true, .. }) = &v.witness else {
            panic!("expected duplicated psi, got {:?}", v.witness)
        };
        assert!(verify_strong_witness(&r, &l, w));
    }

    #[test]
    fn unsatisfiable_kb_strongly_separable_by_top() {
        let (r, l) = setup(
            "ontology { top subsumedBy bot; } database { A(a); B(b); } positive { a } negative { b }",
        );
        let v = strong_separable(&r, &l, StrongBudget::default());
        assert!(v.separable);
        let Some(w @ StrongWitness::Separator { .. }) = &v.witness else { panic!() };
        // top literally verifies: K ⊨ top(a) and K ⊨ ¬top(b) both vacuous
        assert!(verify_strong_witness(&r, &l, w));
    }

    #[test]
    fn chain_blocking_requires_tracking_sets() {
        // B1 ⊑ ∀R.B2, B2 ⊑ ∀R.⊥: a has a forced R-R-path, b cannot grow
        // one, so ∃R.∃R.top strongly separates; the trivial Ψ with empty
        // tracking sets would wrongly claim inseparability without the
        // seeded enumeration
        let (r, l) = setup(
            "ontology { B1 subsumedBy forall R . B2; B2 subsumedBy forall R . bot; } \
             database { R(a,e); R(e,e2); B1(b); } positive { a } negative { b } signature { R }",
        );
        let sep = Concept::exists(
            Role::named("R"),
            Concept::exists(Role::named("R"), Concept::top()),
        );
        assert!(is_strong_separator(&r, &l, &sep));
        let v = strong_separable(&r, &l, StrongBudget::default());
        assert!(v.separable, "seeded enumeration must not find a bogus witness");
        let c = strong_separator_synthesize(&r, &l, 4).expect("synthesis");
        assert!(is_strong_separator(&r, &l, &c));
    }

    #[test]
    fn psi_witness_matches_paper_shape_on_example_6_1() {
        let (r, l) = setup(EX61_R);
        let v = strong_separable(&r, &l, StrongBudget::default());
        let Some(StrongWitness::Psi { psi, positive, negative, .. }) = &v.witness else {
            panic!()
        };
        assert_eq!((positive.as_str(), negative.as_str()), ("a", "b"));
        // the Ψ respects the database: t_b contains A, t_a does not
        let table = r.table();
        let a_lit = table.closure.lit_of(&Concept::atom("A")).unwrap();
        let (t_a, _) = psi.assignments["a"];
        let (t_b, _) = psi.assignments["b"];
        assert!(!table.type_bits(t_a).get(a_lit.0));
        assert!(table.type_bits(t_b).get(a_lit.0));
        assert!(psi_satisfiable(&r, &l.sigma, psi, "a", "b"));
    }
}
