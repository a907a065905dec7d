//! Command-line front end: parses labeled KB files and runs the weak and
//! strong separability engines, FO emission and the inspection views.
//!
//! Exit codes: 0 = Separable, 1 = Inseparable, 2 = Unknown,
//! 64 = usage error, 65 = input error.

mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use alcisep_core::bisim::max_bisimulation;
use alcisep_core::fo::{build_instance, emit_tptp, fo_strong_check, EmitMode, FoOutcome};
use alcisep_core::strong::{
    strong_separable, strong_separator_synthesize, verify_strong_witness, StrongBudget,
    StrongWitness,
};
use alcisep_core::tptp::validate_tptp;
use alcisep_core::weak::{
    verify_weak_certificate, weak_separable, WeakBudget, WeakCertificate,
};
use alcisep_core::{parse_kb, FiniteStructure, LabeledKb, Reasoner};

use report::{
    status_string, strong_witness_json, weak_certificate_json, BudgetJson,
    CertificateJson, Report, SignatureJson,
};

const EXIT_SEPARABLE: i32 = 0;
const EXIT_INSEPARABLE: i32 = 1;
const EXIT_UNKNOWN: i32 = 2;
const EXIT_USAGE: i32 = 64;
const EXIT_INPUT: i32 = 65;

#[derive(Parser)]
#[command(
    name = "alcisep",
    version,
    about = "Weak and strong separability of labeled ALCI knowledge bases"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Path to the labeled KB file.
    #[arg(long)]
    kb: PathBuf,
    /// Emit a JSON report to stdout instead of text.
    #[arg(long)]
    json: bool,
    /// Random seed recorded in reports (reserved for randomized features).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Weak separability: separator enumeration plus forest-model witness
    /// search (projective mode only for the latter).
    CheckWeak {
        #[command(flatten)]
        common: Common,
        /// Allow fresh helper concept names in separators.
        #[arg(long)]
        projective: bool,
        /// Maximum separator size to enumerate.
        #[arg(long, default_value_t = 8)]
        max_size: usize,
        /// Number of fresh helper concept names (projective mode).
        #[arg(long, default_value_t = 1)]
        helpers: usize,
        /// Tree-unfolding depth for the witness search.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Maximum branching per node in the witness search.
        #[arg(long, default_value_t = 4)]
        outdegree: usize,
        /// Re-verify the certificate before reporting.
        #[arg(long)]
        verify_certificate: bool,
    },
    /// Strong separability: exact decision via type amalgamation.
    CheckStrong {
        #[command(flatten)]
        common: Common,
        /// Synthesize a strongly separating concept on the separable side.
        #[arg(long)]
        synthesize: bool,
        /// Maximum concept size for synthesis.
        #[arg(long, default_value_t = 8)]
        max_size: usize,
        /// Cardinality cap for the tracking sets (default: unbounded up to
        /// 12 types, then 4).
        #[arg(long)]
        phi_cap: Option<usize>,
        /// Re-verify the certificate before reporting.
        #[arg(long)]
        verify_certificate: bool,
    },
    /// Search for a separating concept only (no witness search).
    FindSeparator {
        #[command(flatten)]
        common: Common,
        /// Which notion of separation the concept must satisfy.
        #[arg(long, value_parser = ["weak", "strong"], default_value = "weak")]
        mode: String,
        #[arg(long)]
        projective: bool,
        #[arg(long, default_value_t = 8)]
        max_size: usize,
        #[arg(long, default_value_t = 1)]
        helpers: usize,
    },
    /// Emit the first-order implication instance in TPTP form, optionally
    /// dispatching it to an external prover.
    EmitFo {
        #[command(flatten)]
        common: Common,
        /// Add the fresh guard relation for the guarded-fragment shape.
        #[arg(long)]
        guarded: bool,
        /// Emission mode.
        #[arg(long, value_parser = ["validity", "interpolation-comment"], default_value = "validity")]
        mode: String,
        /// Example pair as `a:b`; defaults to every pair in P x N.
        #[arg(long)]
        pair: Option<String>,
        /// Write the problem(s) to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run the configured prover on the instance.
        #[arg(long)]
        prove: bool,
        /// Prover command template with {input} and {timeout} slots;
        /// defaults to the ALCISEP_PROVER environment variable.
        #[arg(long)]
        prover_cmd: Option<String>,
        /// Prover timeout in seconds.
        #[arg(long, default_value_t = 30)]
        timeout: u64,
        /// Validate the emitted TPTP syntactically.
        #[arg(long)]
        check: bool,
    },
    /// Inspect a knowledge base: summary, realizable types, bisimulation.
    Show {
        #[command(flatten)]
        common: Common,
        /// Print the realizable type table with indices.
        #[arg(long)]
        types: bool,
        /// Print the greatest ALCI(Sigma)-bisimulation on the database
        /// structure.
        #[arg(long)]
        bisim: bool,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    std::process::exit(0);
                }
                _ => {
                    eprint!("{e}");
                    std::process::exit(EXIT_USAGE);
                }
            }
        }
    };
    std::process::exit(run(cli));
}

fn load_kb(path: &PathBuf) -> Result<LabeledKb, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let (labeled, warnings) = parse_kb(&text).map_err(|e| e.to_string())?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(labeled)
}

fn base_report(command: &str, common: &Common, labeled: &LabeledKb) -> Report {
    Report {
        tool: "alcisep".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        kb: common.kb.display().to_string(),
        sigma: SignatureJson::from_sig(&labeled.sigma),
        positives: labeled.positives.iter().cloned().collect(),
        negatives: labeled.negatives.iter().cloned().collect(),
        verdict: "unknown".into(),
        projective: None,
        budget: None,
        certificate: None,
        incomplete: false,
        notes: Vec::new(),
        seed: common.seed,
        certificate_verified: None,
    }
}

fn emit_report(report: &Report, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
        return;
    }
    println!("{}: {}", report.command, report.verdict);
    if let Some(cert) = &report.certificate {
        match cert {
            CertificateJson::Separator { concept, helpers } => {
                if helpers.is_empty() {
                    println!("separator: {concept}");
                } else {
                    println!("separator: {concept}   (helpers: {})", helpers.join(", "));
                }
            }
            CertificateJson::ModelWitness { negative, structure } => {
                println!(
                    "model witness against '{negative}': {} elements, {} edges",
                    structure.names.len(),
                    structure.binary.values().map(|s| s.len()).sum::<usize>()
                );
            }
            CertificateJson::Psi { positive, negative, duplicated, psi } => {
                println!("inseparability witness for ({positive}, {negative})");
                if *duplicated {
                    println!("  (checked on a disjoint copy of the database)");
                }
                for (c, entry) in psi {
                    println!("  {c}: type #{}, phi {:?}", entry.type_index, entry.phi_indices);
                }
            }
            CertificateJson::UnsatisfiableKb { concept } => {
                println!("knowledge base unsatisfiable; separator: {concept}");
            }
            CertificateJson::Composite { parts } => {
                println!("per-negative certificates for {} branches", parts.len());
            }
        }
    }
    if let Some(v) = report.certificate_verified {
        println!("certificate verified: {v}");
    }
    for note in &report.notes {
        println!("note: {note}");
    }
}

fn verdict_exit(verdict: &str) -> i32 {
    match verdict {
        "separable" => EXIT_SEPARABLE,
        "inseparable" => EXIT_INSEPARABLE,
        _ => EXIT_UNKNOWN,
    }
}

fn run(cli: Cli) -> i32 {
    match cli.command {
        Cmd::CheckWeak {
            common,
            projective,
            max_size,
            helpers,
            depth,
            outdegree,
            verify_certificate,
        } => {
            let labeled = match load_kb(&common.kb) {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            };
            let reasoner = Reasoner::new(labeled.kb.clone());
            let budget = WeakBudget { max_size, helpers, depth, outdegree };
            let verdict = weak_separable(&reasoner, &labeled, budget, projective);
            let mut report = base_report("check-weak", &common, &labeled);
            report.projective = Some(projective);
            report.budget = Some(BudgetJson {
                max_size: Some(max_size),
                helpers: Some(helpers),
                depth: Some(depth),
                outdegree: Some(outdegree),
                phi_cap: None,
            });
            report.verdict = status_string(verdict.status).into();
            report.notes = verdict.notes.clone();
            if let Some(cert) = &verdict.certificate {
                report.certificate = Some(weak_certificate_json(cert));
                if verify_certificate {
                    report.certificate_verified =
                        Some(verify_weak_certificate(&reasoner, &labeled, cert, projective));
                }
            }
            emit_report(&report, common.json);
            if report.certificate_verified == Some(false) {
                return EXIT_UNKNOWN;
            }
            verdict_exit(&report.verdict)
        }

        Cmd::CheckStrong { common, synthesize, max_size, phi_cap, verify_certificate } => {
            let labeled = match load_kb(&common.kb) {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            };
            let reasoner = Reasoner::new(labeled.kb.clone());
            let budget = StrongBudget { phi_cap, ..Default::default() };
            let verdict = strong_separable(&reasoner, &labeled, budget);
            let mut report = base_report("check-strong", &common, &labeled);
            report.budget = Some(BudgetJson {
                max_size: synthesize.then_some(max_size),
                helpers: None,
                depth: None,
                outdegree: None,
                phi_cap,
            });
            report.verdict =
                if verdict.separable { "separable".into() } else { "inseparable".into() };
            report.incomplete = verdict.incomplete;
            report.notes = verdict.notes.clone();
            let mut witness = verdict.witness.clone();
            if verdict.separable && synthesize && witness.is_none() {
                match strong_separator_synthesize(&reasoner, &labeled, max_size) {
                    Some(c) => witness = Some(StrongWitness::Separator { concept: c }),
                    None => report
                        .notes
                        .push(format!("no strong separator found up to size {max_size}")),
                }
            }
            if let Some(w) = &witness {
                report.certificate = Some(strong_witness_json(&labeled, &reasoner, w));
                if verify_certificate {
                    report.certificate_verified =
                        Some(verify_strong_witness(&reasoner, &labeled, w));
                }
            }
            emit_report(&report, common.json);
            if report.certificate_verified == Some(false) {
                return EXIT_UNKNOWN;
            }
            verdict_exit(&report.verdict)
        }

        Cmd::FindSeparator { common, mode, projective, max_size, helpers } => {
            let labeled = match load_kb(&common.kb) {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            };
            let reasoner = Reasoner::new(labeled.kb.clone());
            let mut report = base_report("find-separator", &common, &labeled);
            report.projective = Some(projective);
            report.budget = Some(BudgetJson {
                max_size: Some(max_size),
                helpers: Some(helpers),
                depth: None,
                outdegree: None,
                phi_cap: None,
            });
            if mode == "strong" {
                match strong_separator_synthesize(&reasoner, &labeled, max_size) {
                    Some(c) => {
                        report.verdict = "separable".into();
                        report.certificate = Some(CertificateJson::Separator {
                            concept: c.to_string(),
                            helpers: Vec::new(),
                        });
                    }
                    None => {
                        report.verdict = "unknown".into();
                        report.notes.push(format!("no strong separator up to size {max_size}"));
                    }
                }
            } else {
                let budget = WeakBudget { max_size, helpers, ..Default::default() };
                let v = alcisep_core::weak::enumerate_separators(
                    &reasoner, &labeled, budget, projective,
                );
                report.verdict = status_string(v.status).into();
                report.notes = v.notes.clone();
                if let Some(WeakCertificate::Separator { concept, helpers }) = v.certificate {
                    report.certificate = Some(CertificateJson::Separator {
                        concept: concept.to_string(),
                        helpers,
                    });
                }
            }
            emit_report(&report, common.json);
            verdict_exit(&report.verdict)
        }

        Cmd::EmitFo { common, guarded, mode, pair, out, prove, prover_cmd, timeout, check } => {
            let labeled = match load_kb(&common.kb) {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            };
            let emit_mode = if mode == "interpolation-comment" {
                EmitMode::InterpolationComment
            } else {
                EmitMode::Validity
            };
            let pairs: Vec<(String, String)> = match &pair {
                Some(spec) => match spec.split_once(':') {
                    Some((a, b)) => vec![(a.to_string(), b.to_string())],
                    None => {
                        eprintln!("error: --pair expects the form a:b");
                        return EXIT_USAGE;
                    }
                },
                None => labeled
                    .positives
                    .iter()
                    .flat_map(|a| labeled.negatives.iter().map(move |b| (a.clone(), b.clone())))
                    .collect(),
            };
            let mut rendered = String::new();
            let mut outcomes: Vec<(String, String, FoOutcome)> = Vec::new();
            let prover = prover_cmd.or_else(|| std::env::var("ALCISEP_PROVER").ok());
            for (a, b) in &pairs {
                let inst = match build_instance(&labeled.kb, &labeled.sigma, a, b, guarded) {
                    Ok(i) => i,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_INPUT;
                    }
                };
                let text = emit_tptp(&inst, emit_mode);
                if check {
                    if let Err(e) = validate_tptp(&text) {
                        eprintln!("error: emitted TPTP failed validation: {e}");
                        return EXIT_UNKNOWN;
                    }
                }
                rendered.push_str(&format!("% pair ({a}, {b})\n"));
                rendered.push_str(&text);
                rendered.push('\n');
                if prove {
                    let outcome =
                        fo_strong_check(&inst, prover.as_deref(), Duration::from_secs(timeout));
                    outcomes.push((a.clone(), b.clone(), outcome));
                }
            }
            match &out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &rendered) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return EXIT_INPUT;
                    }
                }
                None => print!("{rendered}"),
            }
            if prove {
                // FO strong separability needs every pair separable
                let mut verdict = "separable";
                for (a, b, outcome) in &outcomes {
                    match outcome {
                        FoOutcome::Separable => eprintln!("pair ({a},{b}): Separable"),
                        FoOutcome::Inseparable => {
                            eprintln!("pair ({a},{b}): Inseparable (countermodel)");
                            verdict = "inseparable";
                        }
                        FoOutcome::Unknown(msg) => {
                            eprintln!("pair ({a},{b}): Unknown ({msg})");
                            if verdict == "separable" {
                                verdict = "unknown";
                            }
                        }
                    }
                }
                let mut report = base_report("emit-fo", &common, &labeled);
                report.verdict = verdict.into();
                if common.json {
                    emit_report(&report, true);
                }
                return verdict_exit(verdict);
            }
            EXIT_SEPARABLE
        }

        Cmd::Show { common, types, bisim } => {
            let labeled = match load_kb(&common.kb) {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            };
            let reasoner = Reasoner::new(labeled.kb.clone());
            if common.json {
                let mut doc = BTreeMap::new();
                doc.insert("kb".to_string(), serde_json::json!(common.kb.display().to_string()));
                doc.insert(
                    "signature".to_string(),
                    serde_json::to_value(SignatureJson::from_sig(&labeled.kb.signature()))
                        .unwrap(),
                );
                doc.insert(
                    "sigma".to_string(),
                    serde_json::to_value(SignatureJson::from_sig(&labeled.sigma)).unwrap(),
                );
                doc.insert(
                    "satisfiable".to_string(),
                    serde_json::json!(reasoner.kb_satisfiable()),
                );
                if types {
                    let table = reasoner.table();
                    let list: Vec<Vec<String>> =
                        (0..table.type_count()).map(|t| table.describe_type(t)).collect();
                    doc.insert("types".to_string(), serde_json::to_value(list).unwrap());
                }
                if bisim {
                    let s = FiniteStructure::from_database(&labeled.kb.database);
                    let rel = max_bisimulation(&s, &s, &labeled.sigma);
                    let named: Vec<(String, String)> = rel
                        .pairs
                        .iter()
                        .map(|&(d, e)| (s.name(d).to_string(), s.name(e).to_string()))
                        .collect();
                    doc.insert("bisimulation".to_string(), serde_json::to_value(named).unwrap());
                }
                println!("{}", serde_json::to_string_pretty(&doc).unwrap());
                return EXIT_SEPARABLE;
            }
            println!("kb: {}", common.kb.display());
            println!(
                "ontology: {} inclusions; database: {} unary, {} binary atoms; constants: {}",
                labeled.kb.ontology.len(),
                labeled.kb.database.unary.len(),
                labeled.kb.database.binary.len(),
                labeled.kb.database.constants().len()
            );
            println!("signature of K: {}", labeled.kb.signature());
            println!("sigma: {}", labeled.sigma);
            println!(
                "positives: {:?}  negatives: {:?}",
                labeled.positives.iter().collect::<Vec<_>>(),
                labeled.negatives.iter().collect::<Vec<_>>()
            );
            println!("satisfiable: {}", reasoner.kb_satisfiable());
            if types {
                let table = reasoner.table();
                println!("realizable types ({}):", table.type_count());
                for t in 0..table.type_count() {
                    println!("  #{t}: {{ {} }}", table.describe_type(t).join(", "));
                }
            }
            if bisim {
                let s = FiniteStructure::from_database(&labeled.kb.database);
                let rel = max_bisimulation(&s, &s, &labeled.sigma);
                println!("greatest ALCI(sigma)-bisimulation on the database structure:");
                for &(d, e) in &rel.pairs {
                    println!("  ({}, {})", s.name(d), s.name(e));
                }
            }
            EXIT_SEPARABLE
        }
    }
}
