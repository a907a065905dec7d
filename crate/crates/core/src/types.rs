//! K-type machinery: the subconcept closure, Hintikka sets, the type
//! elimination fixpoint that yields exactly the realizable types, role
//! coherence, and satisfiability of knowledge bases and extended databases
//! by typing the constants.
//!
//! Satisfiability with database atoms assigns a realizable type to every
//! constant and requires role compatibility along every binary atom. This is
//! sound and complete for ALCI because a model can be unraveled everywhere
//! except on constant-constant edges.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use crate::bits::Bits;
use crate::concept::{Concept, Role};
use crate::kb::{Database, KnowledgeBase};

/// A signed reference to a closure member: `(index, polarity)`.
pub type Lit = (usize, bool);

#[derive(Clone, Debug)]
enum MemberKind {
    Atom,
    And(Lit, Lit),
    /// `(role name index, inverted, body literal)`
    Exists(usize, bool, Lit),
}

/// The subconcept closure of a knowledge base: all subconcepts of concept
/// inclusion sides and database concept atoms, stored in positive form
/// (negations are represented by literal polarity, which realizes closure
/// under single negation with `¬¬C = C`).
#[derive(Clone, Debug)]
pub struct Closure {
    members: Vec<Concept>,
    kinds: Vec<MemberKind>,
    index: HashMap<Concept, usize>,
    /// Sorted role names: closure existentials plus database binary symbols.
    pub role_names: Vec<String>,
    /// Indices of members of `Exists` kind.
    existentials: Vec<usize>,
}

impl Closure {
    fn collect_positive(c: &Concept, out: &mut BTreeSet<Concept>) {
        match c {
            Concept::Not(inner) => Self::collect_positive(inner, out),
            Concept::Atom(_) => {
                out.insert(c.clone());
            }
            Concept::And(l, r) => {
                out.insert(c.clone());
                Self::collect_positive(l, out);
                Self::collect_positive(r, out);
            }
            Concept::Exists(_, body) => {
                out.insert(c.clone());
                Self::collect_positive(body, out);
            }
        }
    }

    fn build(seed_concepts: &[Concept], extra_role_names: &BTreeSet<String>) -> Closure {
        let mut set = BTreeSet::new();
        for c in seed_concepts {
            Self::collect_positive(c, &mut set);
        }
        let mut members: Vec<Concept> = set.into_iter().collect();
        members.sort_by(crate::concept::size_then_structural);

        let mut role_names: BTreeSet<String> = extra_role_names.clone();
        for m in &members {
            if let Concept::Exists(r, _) = m {
                role_names.insert(r.name.clone());
            }
        }
        let role_names: Vec<String> = role_names.into_iter().collect();

        let index: HashMap<Concept, usize> =
            members.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let mut kinds = Vec::with_capacity(members.len());
        let mut existentials = Vec::new();
        for (i, m) in members.iter().enumerate() {
            let kind = match m {
                Concept::Atom(_) => MemberKind::Atom,
                Concept::And(l, r) => {
                    MemberKind::And(lit_in(&index, l), lit_in(&index, r))
                }
                Concept::Exists(r, body) => {
                    existentials.push(i);
                    let ri = role_names.binary_search(&r.name).expect("role indexed");
                    MemberKind::Exists(ri, r.inverted, lit_in(&index, body))
                }
                Concept::Not(_) => unreachable!("closure members are positive"),
            };
            kinds.push(kind);
        }
        Closure { members, kinds, index, role_names, existentials }
    }

    /// Builds the union closure, keeping the indices of `self` stable and
    /// appending the new members.
    fn extended(&self, extra: &[Concept], extra_role_names: &BTreeSet<String>) -> Closure {
        let mut new_set = BTreeSet::new();
        for c in extra {
            Self::collect_positive(c, &mut new_set);
        }
        let mut fresh: Vec<Concept> = new_set
            .into_iter()
            .filter(|c| !self.index.contains_key(c))
            .collect();
        fresh.sort_by(crate::concept::size_then_structural);

        let mut members = self.members.clone();
        members.extend(fresh);

        let mut role_names: BTreeSet<String> =
            self.role_names.iter().cloned().chain(extra_role_names.iter().cloned()).collect();
        for m in &members {
            if let Concept::Exists(r, _) = m {
                role_names.insert(r.name.clone());
            }
        }
        let role_names: Vec<String> = role_names.into_iter().collect();

        let index: HashMap<Concept, usize> =
            members.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let mut kinds = Vec::with_capacity(members.len());
        let mut existentials = Vec::new();
        for (i, m) in members.iter().enumerate() {
            let kind = match m {
                Concept::Atom(_) => MemberKind::Atom,
                Concept::And(l, r) => MemberKind::And(lit_in(&index, l), lit_in(&index, r)),
                Concept::Exists(r, body) => {
                    existentials.push(i);
                    let ri = role_names.binary_search(&r.name).expect("role indexed");
                    MemberKind::Exists(ri, r.inverted, lit_in(&index, body))
                }
                Concept::Not(_) => unreachable!(),
            };
            kinds.push(kind);
        }
        Closure { members, kinds, index, role_names, existentials }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Positive-form members in deterministic order.
    pub fn members(&self) -> &[Concept] {
        &self.members
    }

    /// Signed index of a normalized concept, if it belongs to the closure.
    pub fn lit_of(&self, c: &Concept) -> Option<Lit> {
        match c {
            Concept::Not(inner) => self.index.get(&**inner).map(|&i| (i, false)),
            _ => self.index.get(c).map(|&i| (i, true)),
        }
    }

    pub fn role_index(&self, name: &str) -> Option<usize> {
        self.role_names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }
}

fn lit_in(index: &HashMap<Concept, usize>, c: &Concept) -> Lit {
    match c {
        Concept::Not(inner) => (index[&**inner], false),
        _ => (index[c], true),
    }
}

#[inline]
fn eval(bits: &Bits, lit: Lit) -> bool {
    bits.get(lit.0) == lit.1
}

/// A directed role: role name index plus orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirRole {
    pub name_idx: usize,
    pub inverted: bool,
}

impl DirRole {
    pub fn inverse(self) -> DirRole {
        DirRole { name_idx: self.name_idx, inverted: !self.inverted }
    }
}

/// The realizable K-types of a knowledge base with role compatibility.
#[derive(Debug)]
pub struct TypeTable {
    pub closure: Closure,
    cis: Vec<(Lit, Lit)>,
    /// Realizable types in canonical (lexicographic) order.
    types: Vec<Bits>,
    /// `succ_masks[dir_role][t]` = bitset over type indices allowed as
    /// `dir_role`-successors of `t`; built on demand.
    succ_masks: OnceLock<Vec<Vec<Bits>>>,
}

impl TypeTable {
    pub fn build(kb: &KnowledgeBase) -> TypeTable {
        let mut seeds: Vec<Concept> = Vec::new();
        for (c, d) in &kb.ontology {
            seeds.push(c.clone());
            seeds.push(d.clone());
        }
        let mut db_concepts: BTreeSet<String> = BTreeSet::new();
        let mut db_roles: BTreeSet<String> = BTreeSet::new();
        for (a, _) in &kb.database.unary {
            db_concepts.insert(a.clone());
        }
        for (r, _, _) in &kb.database.binary {
            db_roles.insert(r.clone());
        }
        seeds.extend(db_concepts.into_iter().map(Concept::Atom));

        let closure = Closure::build(&seeds, &db_roles);
        let cis = kb
            .ontology
            .iter()
            .map(|(c, d)| {
                (closure.lit_of(c).expect("CI side in closure"), closure.lit_of(d).expect("CI side in closure"))
            })
            .collect();
        Self::from_parts(closure, cis)
    }

    fn from_parts(closure: Closure, cis: Vec<(Lit, Lit)>) -> TypeTable {
        let hintikka = enumerate_hintikka(&closure, &cis, None);
        let types = eliminate(&closure, hintikka);
        TypeTable { closure, cis, types, succ_masks: OnceLock::new() }
    }

    /// Extends the closure with additional concepts (and role names) and
    /// recomputes realizability. Base member indices stay valid.
    pub fn extend(&self, extra: &[Concept]) -> TypeTable {
        let mut extra_roles = BTreeSet::new();
        for c in extra {
            let sig = crate::kb::Signature::of_concept(c);
            extra_roles.extend(sig.roles);
        }
        let closure = self.closure.extended(extra, &extra_roles);
        if closure.len() == self.closure.len() && closure.role_names == self.closure.role_names {
            return TypeTable {
                closure,
                cis: self.cis.clone(),
                types: self.types.clone(),
                succ_masks: OnceLock::new(),
            };
        }
        let hintikka = enumerate_hintikka(&closure, &self.cis, Some((&self.types, self.closure.len())));
        let types = eliminate(&closure, hintikka);
        TypeTable { closure, cis: self.cis.clone(), types, succ_masks: OnceLock::new() }
    }

    /// The realizable types, canonically ordered.
    pub fn types(&self) -> &[Bits] {
        &self.types
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    pub fn type_bits(&self, idx: usize) -> &Bits {
        &self.types[idx]
    }

    /// Index of a type given as a bitset over the closure.
    pub fn index_of(&self, bits: &Bits) -> Option<usize> {
        self.types.binary_search(bits).ok()
    }

    pub fn dir_role(&self, role: &Role) -> Option<DirRole> {
        self.closure.role_index(&role.name).map(|name_idx| DirRole { name_idx, inverted: role.inverted })
    }

    pub fn dir_roles(&self) -> Vec<DirRole> {
        let mut out = Vec::new();
        for name_idx in 0..self.closure.role_names.len() {
            out.push(DirRole { name_idx, inverted: false });
            out.push(DirRole { name_idx, inverted: true });
        }
        out
    }

    pub fn role_display(&self, dr: DirRole) -> Role {
        Role { name: self.closure.role_names[dr.name_idx].clone(), inverted: dr.inverted }
    }

    /// Whether an edge `d --dr--> d'` with `tp(d) = t1`, `tp(d') = t2` is
    /// consistent with the closure: no existential membership may be forced
    /// on either side that the type does not contain.
    pub fn edge_compatible(&self, t1: &Bits, dr: DirRole, t2: &Bits) -> bool {
        for &m in &self.closure.existentials {
            let MemberKind::Exists(name_idx, inverted, body) = self.closure.kinds[m] else {
                unreachable!()
            };
            if name_idx != dr.name_idx {
                continue;
            }
            if inverted == dr.inverted {
                // ∃dr.C: a dr-successor satisfying C forces membership at d
                if !t1.get(m) && eval(t2, body) {
                    return false;
                }
            } else {
                // ∃dr⁻.C: d is a dr⁻-predecessor of d'; C at d forces
                // membership at d'
                if !t2.get(m) && eval(t1, body) {
                    return false;
                }
            }
        }
        true
    }

    /// R-coherence of two realizable types: jointly realizable across an
    /// R-edge in some model of the ontology.
    pub fn coherent(&self, t1: usize, role: &Role, t2: usize) -> bool {
        match self.dir_role(role) {
            // a role unknown to the closure carries no constraints
            None => true,
            Some(dr) => self.edge_compatible(&self.types[t1], dr, &self.types[t2]),
        }
    }

    /// Allowed successor types of `t` along `dr`, as a bitset over type
    /// indices.
    pub fn successor_mask(&self, t: usize, dr: DirRole) -> &Bits {
        let masks = self.succ_masks.get_or_init(|| {
            let drs = self.dir_roles();
            let mut all = vec![Vec::new(); drs.len()];
            for (k, dr) in drs.iter().enumerate() {
                let mut per_type = Vec::with_capacity(self.types.len());
                for t1 in &self.types {
                    let mut mask = Bits::new(self.types.len());
                    for (j, t2) in self.types.iter().enumerate() {
                        if self.edge_compatible(t1, *dr, t2) {
                            mask.set(j, true);
                        }
                    }
                    per_type.push(mask);
                }
                all[k] = per_type;
            }
            all
        });
        let pos = dr.name_idx * 2 + usize::from(dr.inverted);
        &masks[pos][t]
    }

    /// Existential obligations of a type: `(dir role, body lit, member)`.
    pub fn obligations(&self, t: &Bits) -> Vec<(DirRole, Lit, usize)> {
        let mut out = Vec::new();
        for &m in &self.closure.existentials {
            if t.get(m) {
                let MemberKind::Exists(name_idx, inverted, body) = self.closure.kinds[m] else {
                    unreachable!()
                };
                out.push((DirRole { name_idx, inverted }, body, m));
            }
        }
        out
    }

    /// Membership of a closure atom in a type, by concept name.
    pub fn type_has_atom(&self, t: usize, name: &str) -> bool {
        match self.closure.lit_of(&Concept::atom(name)) {
            Some(lit) => eval(&self.types[t], lit),
            None => false,
        }
    }

    /// Satisfiability of the database under per-constant requirements:
    /// requirements map constants (database or fresh) to literals that must
    /// hold in the assigned type. Returns a type assignment on success.
    pub fn solve_assignment(
        &self,
        db: &Database,
        requirements: &BTreeMap<String, Vec<Lit>>,
    ) -> Option<BTreeMap<String, usize>> {
        let mut vars: Vec<String> = db.constants().into_iter().collect();
        for c in requirements.keys() {
            if !vars.contains(c) {
                vars.push(c.clone());
            }
        }
        vars.sort();
        if vars.is_empty() {
            return if self.types.is_empty() { None } else { Some(BTreeMap::new()) };
        }
        let var_idx: BTreeMap<&str, usize> = vars.iter().map(|v| v.as_str()).zip(0..).collect();

        // unary atoms and requirements restrict domains
        let mut domains: Vec<Vec<usize>> = vec![(0..self.types.len()).collect(); vars.len()];
        for (a, c) in &db.unary {
            let lit = self
                .closure
                .lit_of(&Concept::atom(a))
                .expect("database concept atom in closure");
            let v = var_idx[c.as_str()];
            domains[v].retain(|&t| eval(&self.types[t], lit));
        }
        for (c, lits) in requirements {
            let v = var_idx[c.as_str()];
            domains[v].retain(|&t| lits.iter().all(|&l| eval(&self.types[t], l)));
        }
        if domains.iter().any(|d| d.is_empty()) {
            return None;
        }

        let mut edges: Vec<(usize, usize, DirRole)> = Vec::new();
        for (r, c, d) in &db.binary {
            let Some(name_idx) = self.closure.role_index(r) else { continue };
            edges.push((var_idx[c.as_str()], var_idx[d.as_str()], DirRole { name_idx, inverted: false }));
        }

        // order variables by ascending domain size, deterministic tie-break
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by_key(|&v| (domains[v].len(), v));
        let rank: Vec<usize> = {
            let mut r = vec![0; vars.len()];
            for (pos, &v) in order.iter().enumerate() {
                r[v] = pos;
            }
            r
        };

        let mut assignment: Vec<Option<usize>> = vec![None; vars.len()];
        if self.backtrack(&order, &rank, &edges, &domains, &mut assignment, 0) {
            Some(
                vars.iter()
                    .enumerate()
                    .map(|(v, name)| (name.clone(), assignment[v].unwrap()))
                    .collect(),
            )
        } else {
            None
        }
    }

    fn backtrack(
        &self,
        order: &[usize],
        rank: &[usize],
        edges: &[(usize, usize, DirRole)],
        domains: &[Vec<usize>],
        assignment: &mut Vec<Option<usize>>,
        depth: usize,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        'candidates: for &t in &domains[v] {
            for &(x, y, dr) in edges {
                if x == v && rank[y] <= depth {
                    if let Some(ty) = assignment[y] {
                        if !self.edge_compatible(&self.types[t], dr, &self.types[ty]) {
                            continue 'candidates;
                        }
                    }
                }
                if y == v && rank[x] <= depth {
                    if let Some(tx) = assignment[x] {
                        if !self.edge_compatible(&self.types[tx], dr, &self.types[t]) {
                            continue 'candidates;
                        }
                    }
                }
                // self loops
                if x == v && y == v && !self.edge_compatible(&self.types[t], dr, &self.types[t]) {
                    continue 'candidates;
                }
            }
            assignment[v] = Some(t);
            if self.backtrack(order, rank, edges, domains, assignment, depth + 1) {
                return true;
            }
            assignment[v] = None;
        }
        false
    }

    /// All type assignments to the database constants consistent with the
    /// atoms and edge compatibility, in deterministic order, at most `cap`
    /// of them. Constants are addressed in sorted order.
    pub fn all_assignments(&self, db: &Database, cap: usize) -> Vec<Vec<usize>> {
        let consts: Vec<String> = db.constants().into_iter().collect();
        let mut domains: Vec<Vec<usize>> = vec![(0..self.types.len()).collect(); consts.len()];
        for (a, c) in &db.unary {
            let lit = self.closure.lit_of(&Concept::atom(a)).expect("atom in closure");
            let v = consts.iter().position(|x| x == c).unwrap();
            domains[v].retain(|&t| eval(&self.types[t], lit));
        }
        let edges: Vec<(usize, usize, DirRole)> = db
            .binary
            .iter()
            .filter_map(|(r, c, d)| {
                let ci = consts.iter().position(|x| x == c)?;
                let di = consts.iter().position(|x| x == d)?;
                let name_idx = self.closure.role_index(r)?;
                Some((ci, di, DirRole { name_idx, inverted: false }))
            })
            .collect();

        let mut out = Vec::new();
        let mut current = vec![0usize; consts.len()];
        self.assignments_rec(&domains, &edges, &mut current, 0, &mut out, cap);
        out
    }

    fn assignments_rec(
        &self,
        domains: &[Vec<usize>],
        edges: &[(usize, usize, DirRole)],
        current: &mut Vec<usize>,
        pos: usize,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if pos == domains.len() {
            out.push(current.clone());
            return;
        }
        'cand: for &t in &domains[pos] {
            for &(x, y, dr) in edges {
                if x == pos && y <= pos {
                    let ty = if y == pos { t } else { current[y] };
                    if !self.edge_compatible(&self.types[t], dr, &self.types[ty]) {
                        continue 'cand;
                    }
                }
                if y == pos && x < pos {
                    let tx = current[x];
                    if !self.edge_compatible(&self.types[tx], dr, &self.types[t]) {
                        continue 'cand;
                    }
                }
            }
            current[pos] = t;
            self.assignments_rec(domains, edges, current, pos + 1, out, cap);
        }
    }

    /// Pretty form of a type: the positive members plus negations of the
    /// absent ones.
    pub fn describe_type(&self, t: usize) -> Vec<String> {
        let bits = &self.types[t];
        self.closure
            .members()
            .iter()
            .enumerate()
            .map(|(i, c)| if bits.get(i) { c.to_string() } else { format!("not ({c})") })
            .collect()
    }
}

fn enumerate_hintikka(
    closure: &Closure,
    cis: &[(Lit, Lit)],
    base: Option<(&[Bits], usize)>,
) -> Vec<Bits> {
    let n = closure.len();
    let mut out = Vec::new();
    match base {
        None => {
            let mut bits = Bits::new(n);
            fill_from(closure, cis, &mut bits, 0, &mut out);
        }
        Some((base_types, base_len)) => {
            // extensions of already-realizable base types; base CIs hold
            for bt in base_types {
                let mut bits = bt.resized(n);
                fill_from(closure, cis, &mut bits, base_len, &mut out);
            }
        }
    }
    out
}

fn fill_from(closure: &Closure, cis: &[(Lit, Lit)], bits: &mut Bits, from: usize, out: &mut Vec<Bits>) {
    if from == closure.len() {
        if cis.iter().all(|&(c, d)| !eval(bits, c) || eval(bits, d)) {
            out.push(bits.clone());
        }
        return;
    }
    match &closure.kinds[from] {
        MemberKind::And(l, r) => {
            // children precede conjunctions in the size-major order
            let v = eval(bits, *l) && eval(bits, *r);
            bits.set(from, v);
            fill_from(closure, cis, bits, from + 1, out);
        }
        _ => {
            for v in [false, true] {
                bits.set(from, v);
                fill_from(closure, cis, bits, from + 1, out);
            }
            bits.set(from, false);
        }
    }
}

/// Type elimination: repeatedly delete Hintikka sets with an existential
/// obligation that no surviving set can witness, then return the survivors
/// in canonical order. The survivors are exactly the realizable types.
///
/// Allowed-successor sets along a directed role depend only on a small
/// projection of the source type (its memberships of the role's
/// existentials and of the inverse existentials' bodies), so they are
/// memoized per projection and intersected with the alive and body masks
/// as bitsets.
fn eliminate(closure: &Closure, mut candidates: Vec<Bits>) -> Vec<Bits> {
    candidates.sort();
    candidates.dedup();
    let n = candidates.len();
    if n == 0 {
        return candidates;
    }

    // obligations grouped by directed role
    let mut dir_roles: Vec<DirRole> = Vec::new();
    let mut per_role_fwd: Vec<Vec<usize>> = Vec::new(); // ∃dr.C members
    let mut per_role_bwd: Vec<Vec<usize>> = Vec::new(); // ∃dr⁻.C members
    for &m in &closure.existentials {
        let MemberKind::Exists(name_idx, inverted, _) = closure.kinds[m] else { unreachable!() };
        for dr in [DirRole { name_idx, inverted }, DirRole { name_idx, inverted: !inverted }] {
            if !dir_roles.contains(&dr) {
                dir_roles.push(dr);
                per_role_fwd.push(Vec::new());
                per_role_bwd.push(Vec::new());
            }
        }
    }
    for &m in &closure.existentials {
        let MemberKind::Exists(name_idx, inverted, _) = closure.kinds[m] else { unreachable!() };
        let fwd = DirRole { name_idx, inverted };
        let bwd = fwd.inverse();
        per_role_fwd[dir_roles.iter().position(|d| *d == fwd).unwrap()].push(m);
        per_role_bwd[dir_roles.iter().position(|d| *d == bwd).unwrap()].push(m);
    }

    // candidate sets satisfying a literal, as masks over candidate indices
    let mask_for = |lit: Lit| -> Bits {
        let mut mask = Bits::new(n);
        for (i, t) in candidates.iter().enumerate() {
            if eval(t, lit) {
                mask.set(i, true);
            }
        }
        mask
    };
    // per fwd member m: types where a successor with body(m) is NOT allowed
    // to exist give the complement mask; we store "types satisfying body"
    let body_of = |m: usize| -> Lit {
        let MemberKind::Exists(_, _, body) = closure.kinds[m] else { unreachable!() };
        body
    };
    let body_sat: HashMap<usize, Bits> =
        closure.existentials.iter().map(|&m| (m, mask_for(body_of(m)))).collect();
    let body_unsat: HashMap<usize, Bits> = closure
        .existentials
        .iter()
        .map(|&m| (m, mask_for((body_of(m).0, !body_of(m).1))))
        .collect();
    let has_member: HashMap<usize, Bits> =
        closure.existentials.iter().map(|&m| (m, mask_for((m, true)))).collect();

    // SUCC(t, dr) = ∩ {m ∈ fwd(dr), m ∉ t} body_unsat[m]
    //            ∩ {m ∈ bwd(dr), body(m) ∈ t} has_member[m]
    let succ_key = |t: &Bits, k: usize| -> u64 {
        let mut key = 0u64;
        let mut bit = 0;
        for &m in &per_role_fwd[k] {
            key |= u64::from(t.get(m)) << bit;
            bit += 1;
        }
        for &m in &per_role_bwd[k] {
            key |= u64::from(eval(t, body_of(m))) << bit;
            bit += 1;
        }
        debug_assert!(bit <= 64, "too many role-relevant members");
        key
    };
    let full_mask = {
        let mut b = Bits::new(n);
        for i in 0..n {
            b.set(i, true);
        }
        b
    };
    let mut succ_memo: HashMap<(usize, u64), Bits> = HashMap::new();
    let mut succ_of = |t: &Bits, k: usize| -> Bits {
        let key = succ_key(t, k);
        if let Some(cached) = succ_memo.get(&(k, key)) {
            return cached.clone();
        }
        let mut mask = full_mask.clone();
        for &m in &per_role_fwd[k] {
            if !t.get(m) {
                mask = mask.and(&body_unsat[&m]);
            }
        }
        for &m in &per_role_bwd[k] {
            if eval(t, body_of(m)) {
                mask = mask.and(&has_member[&m]);
            }
        }
        succ_memo.insert((k, key), mask.clone());
        mask
    };

    let mut alive = full_mask.clone();
    loop {
        let mut changed = false;
        for i in 0..n {
            if !alive.get(i) {
                continue;
            }
            let t = &candidates[i];
            let mut ok = true;
            'obl: for (k, dr) in dir_roles.iter().enumerate() {
                let _ = dr;
                for &m in &per_role_fwd[k] {
                    if !t.get(m) {
                        continue;
                    }
                    let succ = succ_of(t, k);
                    if !succ.intersects_all(&alive, &body_sat[&m]) {
                        ok = false;
                        break 'obl;
                    }
                }
            }
            if !ok {
                alive.set(i, false);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    candidates
        .into_iter()
        .enumerate()
        .filter_map(|(i, t)| alive.get(i).then_some(t))
        .collect()
}

/// Shared reasoning context for one knowledge base: the type table is
/// computed once and reused by every operation.
#[derive(Debug)]
pub struct Reasoner {
    kb: KnowledgeBase,
    table: OnceLock<TypeTable>,
}

impl Reasoner {
    pub fn new(kb: KnowledgeBase) -> Reasoner {
        Reasoner { kb, table: OnceLock::new() }
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn table(&self) -> &TypeTable {
        self.table.get_or_init(|| TypeTable::build(&self.kb))
    }

    /// The subconcept closure of the knowledge base.
    pub fn sub_closure(&self) -> &Closure {
        &self.table().closure
    }

    /// The realizable K-types.
    pub fn enumerate_types(&self) -> &[Bits] {
        self.table().types()
    }

    pub fn kb_satisfiable(&self) -> bool {
        self.table().solve_assignment(&self.kb.database, &BTreeMap::new()).is_some()
    }

    /// Satisfiability of `(O, D ∪ {C(d) | (C, d) ∈ assertions})`. Constants
    /// may be fresh. Realized by extending the type table with the asserted
    /// concepts and requiring their literals at the constants.
    pub fn extended_satisfiable(&self, assertions: &[(Concept, String)]) -> bool {
        if assertions.is_empty() {
            return self.kb_satisfiable();
        }
        let extra: Vec<Concept> = assertions.iter().map(|(c, _)| c.clone()).collect();
        let ext = self.table().extend(&extra);
        let mut requirements: BTreeMap<String, Vec<Lit>> = BTreeMap::new();
        for (c, d) in assertions {
            let lit = ext.closure.lit_of(c).expect("asserted concept in extended closure");
            requirements.entry(d.clone()).or_default().push(lit);
        }
        ext.solve_assignment(&self.kb.database, &requirements).is_some()
    }

    /// `K ⊨ C(a)`: the extended database with `¬C(a)` is unsatisfiable.
    pub fn entails_concept(&self, c: &Concept, constant: &str) -> bool {
        !self.extended_satisfiable(&[(c.clone().negate(), constant.to_string())])
    }

    /// Realizability of a type presented as a bitset over the closure.
    pub fn realizable(&self, t: &Bits) -> bool {
        self.table().index_of(t).is_some()
    }

    /// One extended table shared across entailment queries about a single
    /// concept, for separator search loops.
    pub fn concept_oracle(&self, c: &Concept) -> ConceptOracle<'_> {
        let ext = self.table().extend(std::slice::from_ref(c));
        let lit = ext.closure.lit_of(c).expect("candidate in extended closure");
        ConceptOracle { reasoner: self, ext, lit }
    }

    /// R-coherence by type index.
    pub fn coherent(&self, t1: usize, role: &Role, t2: usize) -> bool {
        self.table().coherent(t1, role, t2)
    }
}

/// Entailment queries about one fixed concept over a shared extended
/// table.
pub struct ConceptOracle<'r> {
    reasoner: &'r Reasoner,
    ext: TypeTable,
    lit: Lit,
}

impl ConceptOracle<'_> {
    /// `K ⊨ C(constant)`.
    pub fn entails_at(&self, constant: &str) -> bool {
        !self.satisfiable_with_lit((self.lit.0, !self.lit.1), constant)
    }

    /// `K ⊨ ¬C(constant)`.
    pub fn entails_negation_at(&self, constant: &str) -> bool {
        !self.satisfiable_with_lit(self.lit, constant)
    }

    fn satisfiable_with_lit(&self, lit: Lit, constant: &str) -> bool {
        let mut requirements: BTreeMap<String, Vec<Lit>> = BTreeMap::new();
        requirements.insert(constant.to_string(), vec![lit]);
        self.ext.solve_assignment(&self.reasoner.kb.database, &requirements).is_some()
    }
}
