//! Separability of labeled ALCI knowledge bases.
//!
//! The crate decides strong ALCI(Σ)-separability exactly via type
//! amalgamation, semi-decides weak projective and non-projective
//! separability through certified separator enumeration and forest-model
//! witness search, and emits first-order interpolation instances in TPTP
//! form for external provers.

pub mod bits;
pub mod bisim;
pub mod gen;
pub mod hom;
pub mod concept;
pub mod enumerate;
pub mod filter;
pub mod fo;
pub mod kb;
pub mod parser;
pub mod strong;
pub mod structure;
pub mod tptp;
pub mod types;
pub mod weak;

pub use bits::Bits;
pub use bisim::{bisimilar, functional_bisim_exists, max_bisimulation, BisimRelation};
pub use fo::{build_instance, build_phi, build_phi_guarded, emit_tptp, fo_strong_check, parse_szs, Dialect, EmitMode, FoFormula, FoOutcome, InterpolationInstance, Tag};
pub use hom::{hom_c_check, realizable_bisimilar, sigma_hom_exists, BisimTypeFixpoint, HomWitness};
pub use concept::{Concept, Role};
pub use kb::{Database, KnowledgeBase, LabeledKb, Signature};
pub use parser::{parse_kb, print_kb, ParseError};
pub use structure::FiniteStructure;
pub use weak::{check_separator, enumerate_separators, weak_separable, witness_model_search, WeakBudget, WeakCertificate, WeakStatus, WeakVerdict};
pub use strong::{amalgamable_eager, psi_satisfiable, strong_inseparable_witness, strong_separable, strong_separator_synthesize, Amalgamation, PsiAssignment, StrongBudget, StrongVerdict, StrongWitness};
pub use tptp::validate_tptp;
pub use types::{Closure, Reasoner, TypeTable};
