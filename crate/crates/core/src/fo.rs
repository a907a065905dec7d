//! First-order translations of labeled KBs into implication/interpolation
//! instances: the tagged formula pair for a pair of examples, the guarded
//! variant with a fresh guard relation, TPTP FOF emission, and dispatch of
//! the validity question to an external prover with SZS status parsing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write as _;
use std::process::Command;
use std::time::{Duration, Instant};

use crate::concept::{Concept, Role};
use crate::kb::{KnowledgeBase, Signature};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FoError {
    #[error("constant '{0}' does not occur in the database")]
    UnknownConstant(String),
    #[error("guarded emission requires an ALCI ontology: {0}")]
    NotGuarded(String),
}

/// First-order formulas over unary/binary atoms, sufficient for the
/// translations emitted here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FoFormula {
    Atom { pred: String, args: Vec<String> },
    Not(Box<FoFormula>),
    And(Vec<FoFormula>),
    Or(Vec<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    Exists(Vec<String>, Box<FoFormula>),
    Forall(Vec<String>, Box<FoFormula>),
    True,
}

impl FoFormula {
    fn free_and_bound_preds(&self, out: &mut BTreeSet<String>) {
        match self {
            FoFormula::Atom { pred, .. } => {
                out.insert(pred.clone());
            }
            FoFormula::Not(f) => f.free_and_bound_preds(out),
            FoFormula::And(fs) | FoFormula::Or(fs) => {
                for f in fs {
                    f.free_and_bound_preds(out);
                }
            }
            FoFormula::Implies(a, b) => {
                a.free_and_bound_preds(out);
                b.free_and_bound_preds(out);
            }
            FoFormula::Exists(_, f) | FoFormula::Forall(_, f) => f.free_and_bound_preds(out),
            FoFormula::True => {}
        }
    }

    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_and_bound_preds(&mut out);
        out
    }
}

/// Which side of the interpolation pair a formula belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tag {
    ASide,
    BSide,
}

impl Tag {
    fn suffix(self) -> &'static str {
        match self {
            Tag::ASide => "_a",
            Tag::BSide => "_b",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    Fo,
    Gf,
    Gnf,
}

/// An interpolation instance: left ⊨ ¬(inner of right) iff the labeled KB is
/// strongly FO(Σ)-separable for the chosen pair of examples.
#[derive(Clone, Debug)]
pub struct InterpolationInstance {
    pub left: FoFormula,
    pub right_inner: FoFormula,
    pub shared: Signature,
    pub dialect: Dialect,
    pub free_var: String,
}

/// TPTP-safe predicate name: concept names get a `c` prefix, role names an
/// `r` prefix; non-Σ symbols additionally carry the side suffix.
fn pred_name(kind: char, name: &str, tagged: Option<Tag>) -> String {
    let mut out = String::new();
    out.push(kind);
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() || ch == '_' {
            out.push(ch);
        } else {
            out.push('_');
        }
    }
    if let Some(tag) = tagged {
        out.push_str(tag.suffix());
    }
    out
}

fn var_for(constant: &str, tag: Tag, shared: &str) -> String {
    if constant == shared {
        "X".to_string()
    } else {
        let mut out = String::from("Z");
        for ch in constant.chars() {
            if ch.is_ascii_alphanumeric() {
                out.push(ch);
            } else {
                out.push('_');
            }
        }
        out.push_str(match tag {
            Tag::ASide => "a",
            Tag::BSide => "b",
        });
        out
    }
}

struct Translator<'k> {
    sigma: &'k Signature,
    tag: Tag,
    var_counter: usize,
}

impl<'k> Translator<'k> {
    fn concept_pred(&self, name: &str) -> String {
        let tagged = (!self.sigma.contains_concept(name)).then_some(self.tag);
        pred_name('c', name, tagged)
    }

    fn role_pred(&self, name: &str) -> String {
        let tagged = (!self.sigma.contains_role(name)).then_some(self.tag);
        pred_name('r', name, tagged)
    }

    fn fresh_var(&mut self) -> String {
        self.var_counter += 1;
        format!("Y{}", self.var_counter)
    }

    /// The standard translation of a concept to a formula with one free
    /// variable.
    fn concept(&mut self, c: &Concept, var: &str) -> FoFormula {
        if c.is_top() {
            return FoFormula::True;
        }
        if c.is_bot() {
            return FoFormula::Not(Box::new(FoFormula::True));
        }
        match c {
            Concept::Atom(a) => FoFormula::Atom {
                pred: self.concept_pred(a),
                args: vec![var.to_string()],
            },
            Concept::Not(inner) => FoFormula::Not(Box::new(self.concept(inner, var))),
            Concept::And(_, _) => FoFormula::And(
                c.conjuncts().into_iter().map(|p| self.concept(p, var)).collect(),
            ),
            Concept::Exists(role, body) => {
                let y = self.fresh_var();
                let edge = self.role_atom(role, var, &y);
                let inner = self.concept(body, &y);
                FoFormula::Exists(vec![y], Box::new(FoFormula::And(vec![edge, inner])))
            }
        }
    }

    fn role_atom(&self, role: &Role, from: &str, to: &str) -> FoFormula {
        let (x, y) = if role.inverted { (to, from) } else { (from, to) };
        FoFormula::Atom { pred: self.role_pred(&role.name), args: vec![x.to_string(), y.to_string()] }
    }

    /// A concept inclusion as a guarded sentence ∀x (C† → D†).
    fn inclusion(&mut self, lhs: &Concept, rhs: &Concept) -> FoFormula {
        let x = self.fresh_var();
        let body = FoFormula::Implies(
            Box::new(self.concept(lhs, &x)),
            Box::new(self.concept(rhs, &x)),
        );
        FoFormula::Forall(vec![x], Box::new(body))
    }
}

/// Builds `φ_{Σ,ā}`: the conjunction of the tagged ontology sentences and
/// tagged database atoms, constants replaced by fresh variables except the
/// example constant, which becomes the shared free variable; the database
/// variables are existentially closed.
pub fn build_phi(
    kb: &KnowledgeBase,
    sigma: &Signature,
    example: &str,
    tag: Tag,
) -> Result<FoFormula, FoError> {
    build_phi_impl(kb, sigma, example, tag, false)
}

/// The guarded variant: adds one fresh guard atom over all database
/// variables so that the existential block is guarded.
pub fn build_phi_guarded(
    kb: &KnowledgeBase,
    sigma: &Signature,
    example: &str,
    tag: Tag,
) -> Result<FoFormula, FoError> {
    build_phi_impl(kb, sigma, example, tag, true)
}

fn build_phi_impl(
    kb: &KnowledgeBase,
    sigma: &Signature,
    example: &str,
    tag: Tag,
    guarded: bool,
) -> Result<FoFormula, FoError> {
    let cons = kb.database.constants();
    if !cons.contains(example) {
        return Err(FoError::UnknownConstant(example.to_string()));
    }
    let mut tr = Translator { sigma, tag, var_counter: 0 };

    let mut conjuncts = Vec::new();
    for (lhs, rhs) in &kb.ontology {
        conjuncts.push(tr.inclusion(lhs, rhs));
    }
    let var_of: BTreeMap<&String, String> =
        cons.iter().map(|c| (c, var_for(c, tag, example))).collect();
    for (a, c) in &kb.database.unary {
        conjuncts.push(FoFormula::Atom {
            pred: tr.concept_pred(a),
            args: vec![var_of[c].clone()],
        });
    }
    for (r, c, d) in &kb.database.binary {
        conjuncts.push(FoFormula::Atom {
            pred: tr.role_pred(r),
            args: vec![var_of[c].clone(), var_of[d].clone()],
        });
    }
    // an enumeration of all database variables, the shared one included
    let all_vars: Vec<String> = cons.iter().map(|c| var_of[c].clone()).collect();
    if guarded {
        conjuncts.push(FoFormula::Atom {
            pred: format!("gD{}", tag.suffix()),
            args: all_vars.clone(),
        });
    }
    let bound: Vec<String> =
        cons.iter().filter(|c| c.as_str() != example).map(|c| var_of[c].clone()).collect();
    let body = FoFormula::And(conjuncts);
    Ok(if bound.is_empty() { body } else { FoFormula::Exists(bound, Box::new(body)) })
}

/// Builds the full interpolation instance for one pair of examples.
pub fn build_instance(
    kb: &KnowledgeBase,
    sigma: &Signature,
    a: &str,
    b: &str,
    guarded: bool,
) -> Result<InterpolationInstance, FoError> {
    let left = if guarded {
        build_phi_guarded(kb, sigma, a, Tag::ASide)?
    } else {
        build_phi(kb, sigma, a, Tag::ASide)?
    };
    let right_inner = if guarded {
        build_phi_guarded(kb, sigma, b, Tag::BSide)?
    } else {
        build_phi(kb, sigma, b, Tag::BSide)?
    };
    Ok(InterpolationInstance {
        left,
        right_inner,
        shared: sigma.clone(),
        dialect: if guarded { Dialect::Gf } else { Dialect::Fo },
        free_var: "X".into(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmitMode {
    Validity,
    InterpolationComment,
}

fn render(f: &FoFormula, out: &mut String) {
    match f {
        FoFormula::True => out.push_str("$true"),
        FoFormula::Atom { pred, args } => {
            out.push_str(pred);
            out.push('(');
            out.push_str(&args.join(","));
            out.push(')');
        }
        FoFormula::Not(inner) => {
            out.push_str("~(");
            render(inner, out);
            out.push(')');
        }
        FoFormula::And(fs) | FoFormula::Or(fs) => {
            let sep = if matches!(f, FoFormula::And(_)) { " & " } else { " | " };
            if fs.is_empty() {
                out.push_str("$true");
                return;
            }
            out.push('(');
            for (i, part) in fs.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                render(part, out);
            }
            out.push(')');
        }
        FoFormula::Implies(a, b) => {
            out.push('(');
            render(a, out);
            out.push_str(" => ");
            render(b, out);
            out.push(')');
        }
        FoFormula::Exists(vars, inner) => {
            out.push_str("?[");
            out.push_str(&vars.join(","));
            out.push_str("]: (");
            render(inner, out);
            out.push(')');
        }
        FoFormula::Forall(vars, inner) => {
            out.push_str("![");
            out.push_str(&vars.join(","));
            out.push_str("]: (");
            render(inner, out);
            out.push(')');
        }
    }
}

/// Emits the instance as a TPTP FOF problem whose conjecture is the
/// validity of `left → ¬right_inner`, universally closed over the shared
/// free variable.
pub fn emit_tptp(inst: &InterpolationInstance, mode: EmitMode) -> String {
    let mut out = String::new();
    out.push_str("% strong FO(Sigma)-separability instance\n");
    out.push_str(&format!(
        "% dialect: {}\n",
        match inst.dialect {
            Dialect::Fo => "fo",
            Dialect::Gf => "gf",
            Dialect::Gnf => "gnf",
        }
    ));
    if mode == EmitMode::InterpolationComment {
        let shared_names: Vec<String> = inst
            .shared
            .roles
            .iter()
            .map(|r| pred_name('r', r, None))
            .chain(inst.shared.concepts.iter().map(|c| pred_name('c', c, None)))
            .collect();
        out.push_str(&format!("% shared signature: {}\n", shared_names.join(" ")));
        out.push_str("% an interpolant over the shared signature strongly separates the examples\n");
    }
    let mut formula = String::new();
    formula.push_str(&format!("![{}]: (", inst.free_var));
    render(&inst.left, &mut formula);
    formula.push_str(" => ~(");
    render(&inst.right_inner, &mut formula);
    formula.push_str("))");
    out.push_str(&format!("fof(separation,conjecture,\n    {formula}).\n"));
    out
}

/// Outcome of asking an external prover about the emitted implication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FoOutcome {
    Separable,
    Inseparable,
    Unknown(String),
}

/// SZS status extraction from prover output.
pub fn parse_szs(output: &str) -> Option<&str> {
    for line in output.lines() {
        if let Some(rest) = line.split("SZS status ").nth(1) {
            return rest.split_whitespace().next();
        }
    }
    None
}

/// Runs the configured prover on the emitted problem. The command template
/// receives `{input}` and `{timeout}` substitutions and is split on
/// whitespace. Theorem means the implication is valid (Separable);
/// CounterSatisfiable means a countermodel exists (Inseparable); anything
/// else is Unknown with diagnostics.
pub fn fo_strong_check(
    inst: &InterpolationInstance,
    prover_command: Option<&str>,
    timeout: Duration,
) -> FoOutcome {
    let Some(template) = prover_command else {
        return FoOutcome::Unknown("no prover configured (set --prover-cmd or ALCISEP_PROVER)".into());
    };
    let problem = emit_tptp(inst, EmitMode::Validity);
    let mut file = match tempfile::NamedTempFile::new() {
        Ok(f) => f,
        Err(e) => return FoOutcome::Unknown(format!("tempfile: {e}")),
    };
    if let Err(e) = file.write_all(problem.as_bytes()) {
        return FoOutcome::Unknown(format!("write: {e}"));
    }
    let input_path = file.path().display().to_string();
    let parts: Vec<String> = template
        .split_whitespace()
        .map(|p| {
            p.replace("{input}", &input_path)
                .replace("{timeout}", &timeout.as_secs().to_string())
        })
        .collect();
    if parts.is_empty() {
        return FoOutcome::Unknown("empty prover command".into());
    }
    let mut cmd = Command::new(&parts[0]);
    cmd.args(&parts[1..]);
    cmd.stdout(std::process::Stdio::piped()).stderr(std::process::Stdio::piped());
    let start = Instant::now();
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) => return FoOutcome::Unknown(format!("prover missing or failed to start: {e}")),
    };
    // poll with a grace margin beyond the prover's own timeout
    let deadline = timeout + Duration::from_secs(5);
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) => {
                if start.elapsed() > deadline {
                    let _ = child.kill();
                    let _ = child.wait();
                    return FoOutcome::Unknown("prover timeout".into());
                }
                std::thread::sleep(Duration::from_millis(25));
            }
            Err(e) => return FoOutcome::Unknown(format!("prover wait: {e}")),
        }
    }
    let output = match child.wait_with_output() {
        Ok(o) => o,
        Err(e) => return FoOutcome::Unknown(format!("prover output: {e}")),
    };
    let text = format!(
        "{}\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    match parse_szs(&text) {
        Some("Theorem") | Some("Unsatisfiable") => FoOutcome::Separable,
        Some("CounterSatisfiable") | Some("Satisfiable") => FoOutcome::Inseparable,
        Some(status) => FoOutcome::Unknown(format!("SZS status {status}")),
        None => FoOutcome::Unknown("no SZS status in prover output".into()),
    }
}

/// Tagged symbols of the two sides must be disjoint outside Σ; used as a
/// structural self-check and in tests.
pub fn sides_share_only_sigma(inst: &InterpolationInstance) -> bool {
    let left = inst.left.predicates();
    let right = inst.right_inner.predicates();
    left.intersection(&right)
        .all(|p| !p.ends_with("_a") && !p.ends_with("_b") && !p.starts_with("gD"))
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        render(self, &mut s);
        write!(f, "{s}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_kb;

    const EX61: &str = "ontology { A subsumedBy forall R . not A; } \
                        database { R(a,a); A(b); } positive { a } negative { b } signature { R }";

    fn setup(text: &str) -> (KnowledgeBase, Signature) {
        let (l, _) = parse_kb(text).unwrap();
        (l.kb.clone(), l.sigma)
    }

    #[test]
    fn phi_tags_non_sigma_symbols() {
        let (kb, sigma) = setup(EX61);
        let left = build_phi(&kb, &sigma, "a", Tag::ASide).unwrap();
        let preds = left.predicates();
        assert!(preds.contains("rR"), "sigma role untagged: {preds:?}");
        assert!(preds.contains("cA_a"), "non-sigma concept tagged: {preds:?}");
        assert!(!preds.contains("cA"));
        let right = build_phi(&kb, &sigma, "b", Tag::BSide).unwrap();
        assert!(right.predicates().contains("cA_b"));
    }

    #[test]
    fn full_sigma_means_no_tagging() {
        let (kb, _) = setup(EX61);
        let sigma = kb.signature();
        let left = build_phi(&kb, &sigma, "a", Tag::ASide).unwrap();
        let right = build_phi(&kb, &sigma, "b", Tag::BSide).unwrap();
        assert_eq!(left.predicates(), right.predicates());
    }

    #[test]
    fn empty_ontology_gives_database_conjunction() {
        let (kb, sigma) = setup("database { R(a,b); A(b); } positive { a } negative { b } signature { R A }");
        let phi = build_phi(&kb, &sigma, "a", Tag::ASide).unwrap();
        // shape: exists [Zb..] (rR(X,Zb) & cA(Zb))
        let FoFormula::Exists(vars, _) = &phi else { panic!("expected existential closure") };
        assert_eq!(vars.len(), 1);
    }

    #[test]
    fn sides_disjoint_outside_sigma() {
        let (kb, sigma) = setup(EX61);
        let inst = build_instance(&kb, &sigma, "a", "b", false).unwrap();
        assert!(sides_share_only_sigma(&inst));
        let inst = build_instance(&kb, &sigma, "a", "b", true).unwrap();
        assert!(sides_share_only_sigma(&inst));
    }

    #[test]
    fn guard_has_database_arity() {
        let (kb, sigma) = setup(EX61);
        let phi = build_phi_guarded(&kb, &sigma, "a", Tag::ASide).unwrap();
        // cons(D) = {a, b}: guard arity 2
        fn find_guard(f: &FoFormula) -> Option<usize> {
            match f {
                FoFormula::Atom { pred, args } if pred.starts_with("gD") => Some(args.len()),
                FoFormula::Atom { .. } | FoFormula::True => None,
                FoFormula::Not(g) => find_guard(g),
                FoFormula::And(fs) | FoFormula::Or(fs) => fs.iter().find_map(find_guard),
                FoFormula::Implies(a, b) => find_guard(a).or_else(|| find_guard(b)),
                FoFormula::Exists(_, g) | FoFormula::Forall(_, g) => find_guard(g),
            }
        }
        assert_eq!(find_guard(&phi), Some(2));
        // single-constant database gives guard arity 1
        let (kb1, sigma1) =
            setup("database { A(a); } positive { a } negative { a } signature { A }");
        let phi1 = build_phi_guarded(&kb1, &sigma1, "a", Tag::ASide).unwrap();
        assert_eq!(find_guard(&phi1), Some(1));
    }

    #[test]
    fn emit_produces_single_conjecture() {
        let (kb, sigma) = setup(EX61);
        let inst = build_instance(&kb, &sigma, "a", "b", false).unwrap();
        let text = emit_tptp(&inst, EmitMode::Validity);
        assert_eq!(text.matches("fof(").count(), 1);
        assert!(text.contains("conjecture"));
        assert!(text.contains("![X]:"));
        let commented = emit_tptp(&inst, EmitMode::InterpolationComment);
        assert!(commented.contains("% shared signature: rR"));
    }

    #[test]
    fn szs_parsing() {
        assert_eq!(parse_szs("% SZS status Theorem for problem"), Some("Theorem"));
        assert_eq!(parse_szs("foo\n% SZS status CounterSatisfiable\n"), Some("CounterSatisfiable"));
        assert_eq!(parse_szs("no status here"), None);
    }

    #[test]
    fn missing_prover_is_unknown() {
        let (kb, sigma) = setup(EX61);
        let inst = build_instance(&kb, &sigma, "a", "b", false).unwrap();
        let out = fo_strong_check(&inst, None, Duration::from_secs(1));
        assert!(matches!(out, FoOutcome::Unknown(_)));
        let out = fo_strong_check(
            &inst,
            Some("/nonexistent/prover {input}"),
            Duration::from_secs(1),
        );
        assert!(matches!(out, FoOutcome::Unknown(_)));
    }

    #[test]
    fn fake_prover_roundtrip() {
        // a stand-in prover script that always reports Theorem
        let dir = tempfile::tempdir().unwrap();
        let script = dir.path().join("fake_prover.sh");
        std::fs::write(&script, "#!/bin/sh\necho '% SZS status Theorem for input'\n").unwrap();
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
        let (kb, sigma) = setup(EX61);
        let inst = build_instance(&kb, &sigma, "a", "b", false).unwrap();
        let cmd = format!("{} {{input}}", script.display());
        assert_eq!(fo_strong_check(&inst, Some(&cmd), Duration::from_secs(5)), FoOutcome::Separable);
    }

    #[test]
    fn unknown_constant_is_an_error() {
        let (kb, sigma) = setup(EX61);
        assert!(matches!(
            build_phi(&kb, &sigma, "zz", Tag::ASide),
            Err(FoError::UnknownConstant(_))
        ));
    }
}
