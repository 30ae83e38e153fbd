//! Scenario files: one TOML document per scenario, strict keys.

use std::fs;
use std::path::{Path, PathBuf};

use alemass_core::geom::{MetricKind, MetricSpec};
use alemass_core::hj::OrbifoldGroupType;
use alemass_core::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Mass,
    Hj,
    Capsule,
    Moser,
    Crosscheck,
    Penrose,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Mass => "mass",
            Kind::Hj => "hj",
            Kind::Capsule => "capsule",
            Kind::Moser => "moser",
            Kind::Crosscheck => "crosscheck",
            Kind::Penrose => "penrose",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    /// Catalog string, e.g. `burns:c=0.5` or `flat;quotient:q=4,p=1`.
    pub spec: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassSection {
    #[serde(default = "d_rule_order")]
    pub rule_order: i64,
    /// Defaults to `a·2^k`, `k = 3..=10`.
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default = "d_two_term")]
    pub two_term_threshold: f64,
    /// Overrides the catalog's known mass.
    #[serde(default)]
    pub expected: Option<f64>,
    #[serde(default = "d_mass_tol")]
    pub tolerance: f64,
    #[serde(default = "d_abs_tol")]
    pub abs_tolerance: f64,
    #[serde(default = "d_true")]
    pub check_falloff: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HjSection {
    pub q: i64,
    pub p: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsuleSection {
    pub ell: u64,
    /// `cyclic(4)`, `dihedral(3)`, `tetrahedral`, ...
    pub group: String,
    /// Local types `"q:p"`, one per cone point.
    pub local: Vec<String>,
    /// Rational self-intersection of the central sphere, e.g. `"-1/2"`.
    #[serde(default)]
    pub central_weight: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoserFamily {
    Trivial,
    Burns,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoserSection {
    pub family: MoserFamily,
    /// Burns parameter.
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default = "d_steps")]
    pub steps: i64,
    /// Seed radii; default `1.01·c_safe·10^{k/2}`, `k = 0..=4`.
    #[serde(default)]
    pub seeds: Option<Vec<f64>>,
    #[serde(default = "d_direction")]
    pub direction: [f64; 4],
    #[serde(default = "d_fd_step")]
    pub fd_step: f64,
    #[serde(default = "d_pullback_tol")]
    pub pullback_tol: f64,
    #[serde(default = "d_slope_tol")]
    pub slope_tol: f64,
    #[serde(default = "d_order_steps")]
    pub order_steps: Vec<i64>,
    #[serde(default = "d_order_tol")]
    pub order_tol: f64,
    /// Lens type `[q, p]` for the equivariance check.
    #[serde(default)]
    pub quotient: Option<[u32; 2]>,
    #[serde(default = "d_equivariance_tol")]
    pub equivariance_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrosscheckSection {
    #[serde(default = "d_rule_order")]
    pub rule_order: i64,
    #[serde(default = "d_crosscheck_tol")]
    pub tolerance: f64,
    #[serde(default = "d_area_order")]
    pub area_rule_order: i64,
    /// Radii of the shrinking cycles; default `0.1·2^{−k}`, `k = 0..6`.
    #[serde(default)]
    pub area_radii: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenroseSection {
    #[serde(default = "d_rule_order")]
    pub rule_order: i64,
    #[serde(default = "d_eq_tol")]
    pub eq_tol: f64,
    /// Added to the scalar-curvature integral: a synthetic `s > 0` bump.
    #[serde(default)]
    pub scalar_bump: f64,
    #[serde(default = "d_area_order")]
    pub area_rule_order: i64,
    #[serde(default)]
    pub area_radii: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub kind: Kind,
    /// Relative paths resolve against the scenario file.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<MassSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hj: Option<HjSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capsule: Option<CapsuleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moser: Option<MoserSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crosscheck: Option<CrosscheckSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penrose: Option<PenroseSection>,
}

fn d_rule_order() -> i64 {
    24
}
fn d_two_term() -> f64 {
    1e-6
}
fn d_mass_tol() -> f64 {
    1e-3
}
fn d_abs_tol() -> f64 {
    1e-6
}
fn d_true() -> bool {
    true
}
fn d_steps() -> i64 {
    256
}
fn d_direction() -> [f64; 4] {
    [0.3, 0.4, -0.5, 0.7]
}
fn d_fd_step() -> f64 {
    1e-4
}
fn d_pullback_tol() -> f64 {
    1e-5
}
fn d_slope_tol() -> f64 {
    0.1
}
fn d_order_steps() -> Vec<i64> {
    vec![4, 8, 16]
}
fn d_order_tol() -> f64 {
    0.5
}
fn d_equivariance_tol() -> f64 {
    1e-9
}
fn d_crosscheck_tol() -> f64 {
    1e-2
}
fn d_area_order() -> i64 {
    24
}
fn d_eq_tol() -> f64 {
    1e-6
}

impl Default for MassSection {
    fn default() -> Self {
        Self {
            rule_order: d_rule_order(),
            radii: None,
            two_term_threshold: d_two_term(),
            expected: None,
            tolerance: d_mass_tol(),
            abs_tolerance: d_abs_tol(),
            check_falloff: true,
        }
    }
}

impl Default for CrosscheckSection {
    fn default() -> Self {
        Self {
            rule_order: d_rule_order(),
            tolerance: d_crosscheck_tol(),
            area_rule_order: d_area_order(),
            area_radii: None,
        }
    }
}

impl Default for PenroseSection {
    fn default() -> Self {
        Self {
            rule_order: d_rule_order(),
            eq_tol: d_eq_tol(),
            scalar_bump: 0.0,
            area_rule_order: d_area_order(),
            area_radii: None,
        }
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("invalid value for `{field}`: {msg}"))
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("{v} must be positive")))
    }
}

fn positive_int(field: &str, v: i64) -> Result<()> {
    if v > 0 {
        Ok(())
    } else {
        Err(invalid(field, format!("{v} must be a positive integer")))
    }
}

fn radii(field: &str, r: &Option<Vec<f64>>) -> Result<()> {
    if let Some(r) = r {
        if r.is_empty() {
            return Err(invalid(field, "empty radius list"));
        }
        for v in r {
            positive(field, *v)?;
        }
    }
    Ok(())
}

impl Scenario {
    pub fn parse_str(text: &str, origin: &str) -> Result<Self> {
        let mut s: Scenario =
            toml::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))?;
        s.fill_defaults();
        s.validate().map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{origin}: {m}")),
            other => other,
        })?;
        Ok(s)
    }

    /// Kinds whose knobs are all optional get their section materialised,
    /// so the canonical text lists every knob.
    fn fill_defaults(&mut self) {
        match self.kind {
            Kind::Mass => {
                self.mass.get_or_insert_with(MassSection::default);
            }
            Kind::Crosscheck => {
                self.crosscheck
                    .get_or_insert_with(CrosscheckSection::default);
            }
            Kind::Penrose => {
                self.penrose.get_or_insert_with(PenroseSection::default);
            }
            _ => {}
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(invalid("name", "use letters, digits, '_' or '-'"));
        }
        let present = [
            ("metric", self.metric.is_some()),
            ("mass", self.mass.is_some()),
            ("hj", self.hj.is_some()),
            ("capsule", self.capsule.is_some()),
            ("moser", self.moser.is_some()),
            ("crosscheck", self.crosscheck.is_some()),
            ("penrose", self.penrose.is_some()),
        ];
        let needed: &[&str] = match self.kind {
            Kind::Mass => &["metric", "mass"],
            Kind::Hj => &["hj"],
            Kind::Capsule => &["capsule"],
            Kind::Moser => &["moser"],
            Kind::Crosscheck => &["metric", "crosscheck"],
            Kind::Penrose => &["metric", "penrose"],
        };
        for (section, is_present) in present {
            let wanted = needed.contains(&section);
            if wanted && !is_present {
                return Err(CliError::Config(format!(
                    "{} scenario requires a [{section}] section",
                    self.kind.as_str()
                )));
            }
            if !wanted && is_present {
                return Err(CliError::Config(format!(
                    "section [{section}] is not used by {} scenarios",
                    self.kind.as_str()
                )));
            }
        }
        if let Some(m) = &self.metric {
            let spec = self.metric_spec()?;
            if matches!(self.kind, Kind::Crosscheck | Kind::Penrose)
                && !matches!(spec.kind, MetricKind::Burns { .. } | MetricKind::Flat)
            {
                return Err(invalid(
                    "metric.spec",
                    format!("{} has no blow-up model; use burns or flat", m.spec),
                ));
            }
            if matches!(self.kind, Kind::Crosscheck | Kind::Penrose) && spec.quotient.is_some() {
                return Err(invalid(
                    "metric.spec",
                    "the blow-up model is for AE metrics; drop the quotient",
                ));
            }
        }
        if let Some(m) = &self.mass {
            positive_int("mass.rule_order", m.rule_order)?;
            radii("mass.radii", &m.radii)?;
            positive("mass.two_term_threshold", m.two_term_threshold)?;
            positive("mass.tolerance", m.tolerance)?;
            positive("mass.abs_tolerance", m.abs_tolerance)?;
        }
        if let Some(h) = &self.hj {
            alemass_core::hj::hj_resolve(h.q, h.p).map_err(|e| invalid("hj", e))?;
        }
        if let Some(c) = &self.capsule {
            self.capsule_group()?;
            self.capsule_local()?;
            if c.ell < 1 {
                return Err(invalid("capsule.ell", "must be at least 1"));
            }
            self.central_weight()?;
        }
        if let Some(m) = &self.moser {
            if m.family == MoserFamily::Burns {
                positive(
                    "moser.c",
                    m.c.ok_or_else(|| invalid("moser.c", "required for the burns family"))?,
                )?;
            } else if m.c.is_some() {
                return Err(invalid("moser.c", "only the burns family takes c"));
            }
            positive_int("moser.steps", m.steps)?;
            radii("moser.seeds", &m.seeds)?;
            if m.direction.iter().all(|v| *v == 0.0) || m.direction.iter().any(|v| !v.is_finite()) {
                return Err(invalid(
                    "moser.direction",
                    "must be a finite non-zero vector",
                ));
            }
            positive("moser.fd_step", m.fd_step)?;
            positive("moser.pullback_tol", m.pullback_tol)?;
            positive("moser.slope_tol", m.slope_tol)?;
            if m.order_steps.len() < 2 {
                return Err(invalid(
                    "moser.order_steps",
                    "need at least two step counts",
                ));
            }
            for s in &m.order_steps {
                positive_int("moser.order_steps", *s)?;
            }
            positive("moser.order_tol", m.order_tol)?;
            positive("moser.equivariance_tol", m.equivariance_tol)?;
            if let Some([q, p]) = m.quotient {
                alemass_core::hj::lens_generator(q as i64, p as i64)
                    .map_err(|e| invalid("moser.quotient", e))?;
            }
        }
        if let Some(c) = &self.crosscheck {
            positive_int("crosscheck.rule_order", c.rule_order)?;
            positive("crosscheck.tolerance", c.tolerance)?;
            positive_int("crosscheck.area_rule_order", c.area_rule_order)?;
            radii("crosscheck.area_radii", &c.area_radii)?;
        }
        if let Some(p) = &self.penrose {
            positive_int("penrose.rule_order", p.rule_order)?;
            positive("penrose.eq_tol", p.eq_tol)?;
            if !(p.scalar_bump >= 0.0 && p.scalar_bump.is_finite()) {
                return Err(invalid(
                    "penrose.scalar_bump",
                    "must be finite and non-negative",
                ));
            }
            positive_int("penrose.area_rule_order", p.area_rule_order)?;
            radii("penrose.area_radii", &p.area_radii)?;
        }
        Ok(())
    }

    pub fn metric_spec(&self) -> Result<MetricSpec> {
        let m = self
            .metric
            .as_ref()
            .ok_or_else(|| invalid("metric", "missing"))?;
        m.spec
            .parse::<MetricSpec>()
            .map_err(|e| invalid("metric.spec", e))
    }

    pub fn capsule_group(&self) -> Result<OrbifoldGroupType> {
        let c = self
            .capsule
            .as_ref()
            .ok_or_else(|| invalid("capsule", "missing"))?;
        c.group
            .parse::<OrbifoldGroupType>()
            .and_then(|g| g.validate())
            .map_err(|e| invalid("capsule.group", e))
    }

    pub fn capsule_local(&self) -> Result<Vec<(i64, i64)>> {
        let c = self
            .capsule
            .as_ref()
            .ok_or_else(|| invalid("capsule", "missing"))?;
        c.local
            .iter()
            .map(|s| parse_local_type(s).map_err(|e| invalid("capsule.local", e)))
            .collect()
    }

    pub fn central_weight(&self) -> Result<Option<Rational>> {
        let c = self
            .capsule
            .as_ref()
            .ok_or_else(|| invalid("capsule", "missing"))?;
        c.central_weight
            .as_ref()
            .map(|w| {
                w.trim()
                    .parse::<Rational>()
                    .map_err(|e| invalid("capsule.central_weight", e))
            })
            .transpose()
    }

    /// Defaults filled, output directory dropped: the text that is hashed.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("scenario serialises")
    }
}

/// `"q:p"`.
pub fn parse_local_type(s: &str) -> std::result::Result<(i64, i64), String> {
    let (q, p) = s
        .split_once(':')
        .ok_or_else(|| format!("`{s}` is not of the form q:p"))?;
    let q = q.trim().parse::<i64>().map_err(|e| format!("`{s}`: {e}"))?;
    let p = p.trim().parse::<i64>().map_err(|e| format!("`{s}`: {e}"))?;
    Ok((q, p))
}

/// Reads and validates a scenario file. The output directory defaults to
/// `out/` next to the file.
pub fn parse_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut s = Scenario::parse_str(&text, &path.display().to_string())?;
    let base = path.parent().unwrap_or(Path::new("."));
    s.output_dir = Some(match &s.output_dir {
        Some(d) if d.is_absolute() => d.clone(),
        Some(d) => base.join(d),
        None => base.join("out"),
    });
    Ok(s)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    scenarios: Vec<PathBuf>,
    #[serde(default)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub struct Suite {
    pub scenarios: Vec<Scenario>,
}

/// A suite lists scenario paths relative to itself. With `output_dir` set,
/// each scenario writes to `<output_dir>/<name>/`.
pub fn parse_suite(path: &Path) -> Result<Suite> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let suite: SuiteFile =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if suite.scenarios.is_empty() {
        return Err(CliError::Config(format!(
            "{}: the suite lists no scenarios",
            path.display()
        )));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let mut scenarios = Vec::with_capacity(suite.scenarios.len());
    for p in &suite.scenarios {
        let mut s = parse_scenario(&base.join(p))?;
        if let Some(out) = &suite.output_dir {
            s.output_dir = Some(base.join(out).join(&s.name));
        }
        scenarios.push(s);
    }
    let mut names: Vec<&str> = scenarios.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::Config(format!(
            "{}: duplicate scenario name `{}`",
            path.display(),
            w[0]
        )));
    }
    Ok(Suite { scenarios })
}
