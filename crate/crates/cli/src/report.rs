//! Machine-readable reports. All maps are ordered so that identical inputs
//! and seed produce byte-identical JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use alcisep_core::strong::{PsiAssignment, StrongWitness};
use alcisep_core::weak::{WeakCertificate, WeakStatus};
use alcisep_core::{FiniteStructure, LabeledKb, Reasoner};

#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub kb: String,
    pub sigma: SignatureJson,
    pub positives: Vec<String>,
    pub negatives: Vec<String>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projective: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
    pub incomplete: bool,
    pub notes: Vec<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_verified: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SignatureJson {
    pub concepts: Vec<String>,
    pub roles: Vec<String>,
}

impl SignatureJson {
    pub fn from_sig(sig: &alcisep_core::Signature) -> Self {
        SignatureJson {
            concepts: sig.concepts.iter().cloned().collect(),
            roles: sig.roles.iter().cloned().collect(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BudgetJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub helpers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outdegree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_cap: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CertificateJson {
    Separator {
        concept: String,
        helpers: Vec<String>,
    },
    ModelWitness {
        negative: String,
        structure: FiniteStructure,
    },
    Psi {
        positive: String,
        negative: String,
        duplicated: bool,
        psi: BTreeMap<String, PsiJson>,
    },
    UnsatisfiableKb {
        concept: String,
    },
    Composite {
        parts: Vec<CompositePartJson>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CompositePartJson {
    pub negative: String,
    pub certificate: CertificateJson,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PsiJson {
    /// The realized type as concept strings (positive members and negated
    /// absent members).
    pub r#type: Vec<String>,
    pub type_index: usize,
    /// The tracking set: one entry per member type, as concept strings.
    pub phi: Vec<Vec<String>>,
    pub phi_indices: Vec<usize>,
}

pub fn weak_certificate_json(cert: &WeakCertificate) -> CertificateJson {
    match cert {
        WeakCertificate::Separator { concept, helpers } => CertificateJson::Separator {
            concept: concept.to_string(),
            helpers: helpers.clone(),
        },
        WeakCertificate::ModelWitness { structure, negative } => CertificateJson::ModelWitness {
            negative: negative.clone(),
            structure: structure.clone(),
        },
        WeakCertificate::UnsatisfiableKb => {
            CertificateJson::UnsatisfiableKb { concept: "top".into() }
        }
        WeakCertificate::Composite(parts) => CertificateJson::Composite {
            parts: parts
                .iter()
                .map(|(negative, c)| CompositePartJson {
                    negative: negative.clone(),
                    certificate: weak_certificate_json(c),
                })
                .collect(),
        },
    }
}

pub fn psi_json(reasoner: &Reasoner, psi: &PsiAssignment) -> BTreeMap<String, PsiJson> {
    let table = reasoner.table();
    psi.assignments
        .iter()
        .map(|(c, (t, phi))| {
            (
                c.clone(),
                PsiJson {
                    r#type: table.describe_type(*t),
                    type_index: *t,
                    phi: phi.iter().map(|&p| table.describe_type(p)).collect(),
                    phi_indices: phi.iter().copied().collect(),
                },
            )
        })
        .collect()
}

pub fn strong_witness_json(
    labeled: &LabeledKb,
    reasoner: &Reasoner,
    witness: &StrongWitness,
) -> CertificateJson {
    match witness {
        StrongWitness::Separator { concept } => CertificateJson::Separator {
            concept: concept.to_string(),
            helpers: Vec::new(),
        },
        StrongWitness::Psi { positive, negative, duplicated, psi } => {
            let psi_map = if *duplicated {
                let (kb, _) = alcisep_core::strong::duplicate_database(&labeled.kb);
                let dup = Reasoner::new(kb);
                psi_json(&dup, psi)
            } else {
                psi_json(reasoner, psi)
            };
            CertificateJson::Psi {
                positive: positive.clone(),
                negative: negative.clone(),
                duplicated: *duplicated,
                psi: psi_map,
            }
        }
    }
}

pub fn status_string(status: WeakStatus) -> &'static str {
    match status {
        WeakStatus::Separable => "separable",
        WeakStatus::Unknown => "unknown",
    }
}
