use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Bump when any computation or output format changes; part of the cache key.
pub const ARTIFACT_VERSION: &str = concat!("alemass-", env!("CARGO_PKG_VERSION"), "+r1");
pub const CATALOG_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// Name of the acceptance rule, e.g. `mass.expected`.
    pub rule: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(rule: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            rule: rule.to_string(),
            pass,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub artifact_version: String,
    pub catalog_version: String,
    pub cache_key: String,
    /// Seconds spent computing; not part of [`ReportBundle::content_hash`].
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassRowRecord {
    pub rho: f64,
    pub integrand: f64,
    pub running_extrapolation: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalloffRecord {
    pub slope_g: Option<f64>,
    pub slope_dg: Option<f64>,
    pub pass: bool,
    pub inconclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassRecord {
    pub metric: String,
    pub group_order: u32,
    pub rows: Vec<MassRowRecord>,
    pub extrapolated_mass: f64,
    pub fitted_decay: f64,
    pub residual: f64,
    pub non_convergent: bool,
    pub warning: Option<String>,
    pub expected: Option<f64>,
    pub falloff: Option<FalloffRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HjRecord {
    pub q: i64,
    pub p: i64,
    pub chain: Vec<i64>,
    pub intermediates: Vec<String>,
    pub dual_p: i64,
    pub dual_chain: Vec<i64>,
    pub plumbing: Vec<Vec<i64>>,
    pub labels: Vec<String>,
    pub b_plus: usize,
    pub determinant: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapsuleVertex {
    pub label: String,
    pub weight: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapsuleRecord {
    pub ell: u64,
    pub group: String,
    pub profile: Vec<u32>,
    pub local_types: Vec<(i64, i64)>,
    pub chains: Vec<Vec<i64>>,
    pub vertices: Vec<CapsuleVertex>,
    pub edges: Vec<(usize, usize)>,
    pub degree: u64,
    pub is_tree: bool,
    pub adjacency: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub rho: f64,
    pub displacement: f64,
    pub jacobian_defect: f64,
    pub jacobian_det: f64,
    pub pullback_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoserRecord {
    pub family: String,
    pub working_radius: f64,
    pub safety_radius: f64,
    pub epsilon: f64,
    pub steps: usize,
    pub seeds: Vec<SeedRecord>,
    pub pullback_residual: f64,
    pub convergence_order: f64,
    pub displacement_slope: Option<f64>,
    pub jacobian_slope: Option<f64>,
    pub equivariance_defect: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupRecord {
    pub metric: String,
    pub mass: f64,
    pub mass_rows: Vec<MassRowRecord>,
    pub exceptional_area: f64,
    pub area_radii: Vec<f64>,
    pub area_values: Vec<f64>,
    pub scalar_integral: f64,
    /// `|m∞ − m(ρ_max)|` plus the fit residual.
    pub mass_noise: f64,
    pub area_noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckRecord {
    pub blowup: BlowupRecord,
    pub formula_mass: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenroseRecord {
    pub blowup: BlowupRecord,
    pub scalar_bump: f64,
    pub mass: f64,
    pub lower_bound: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Records {
    Mass(MassRecord),
    Hj(HjRecord),
    Capsule(CapsuleRecord),
    Moser(MoserRecord),
    Crosscheck(CrosscheckRecord),
    Penrose(PenroseRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub name: String,
    /// Canonical scenario text.
    pub scenario: String,
    pub records: Records,
    pub verdicts: Vec<Verdict>,
    pub provenance: Provenance,
}

impl ReportBundle {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// SHA-256 of everything except the wall time.
    pub fn content_hash(&self) -> String {
        let mut b = self.clone();
        b.provenance.wall_time_s = 0.0;
        let json = serde_json::to_vec(&b).expect("bundle serialises");
        hex::encode(Sha256::digest(&json))
    }
}
