use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use super::{
    scalar_curvature, AsymptoticChart, CatalogPotential, ConformalMetric, KahlerMetric, MetricField,
};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat4};
use crate::scalar::Real;

/// Catalog metric family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    Flat,
    /// `(1 + c·ρ^{−power})·δ`.
    Conformal {
        c: f64,
        power: f64,
    },
    EguchiHanson {
        a: f64,
    },
    Burns {
        c: f64,
    },
}

/// A parsed catalog metric name such as `burns:c=0.5` or
/// `flat;quotient:q=4,p=1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub kind: MetricKind,
    /// Overrides the family's default fall-off exponent.
    pub epsilon: Option<f64>,
    /// Overrides the family's default inner radius.
    pub inner_radius: Option<f64>,
    /// Lens type `(q, p)` of the quotient group.
    pub quotient: Option<(u32, u32)>,
}

/// One row of `alemass catalog`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub parameters: &'static str,
    pub description: &'static str,
}

impl CatalogEntry {
    pub fn all() -> &'static [CatalogEntry] {
        &[
            CatalogEntry {
                name: "flat",
                parameters: "inner",
                description: "Euclidean metric, mass 0",
            },
            CatalogEntry {
                name: "conformal",
                parameters: "c, power=2, eps=power-1, inner=1",
                description: "(1 + c rho^-power) delta; mass c when power = 2",
            },
            CatalogEntry {
                name: "burns",
                parameters: "c > 0, inner=1",
                description: "scalar-flat Kahler potential t + c log t; mass c/3",
            },
            CatalogEntry {
                name: "eguchi_hanson",
                parameters: "a > 0, inner=a",
                description: "Ricci-flat ALE metric on T*S^2, quotient Z2 by default; mass 0",
            },
            CatalogEntry {
                name: "quotient",
                parameters: "q >= 2, p coprime to q",
                description:
                    "modifier: lens quotient (z1, z2) -> (e^{2 pi i/q} z1, e^{2 pi i p/q} z2)",
            },
        ]
    }
}

fn parse_params(body: &str) -> Result<Vec<(String, f64)>> {
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    body.split(',')
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                Error::InvalidSpec(format!("expected key=value, got '{}'", kv.trim()))
            })?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec(format!("'{}' is not a number", v.trim())))?;
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{} must be finite", k.trim())));
            }
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

struct Params {
    name: String,
    items: Vec<(String, f64)>,
}

impl Params {
    fn take(&mut self, key: &str) -> Option<f64> {
        let i = self.items.iter().position(|(k, _)| k == key)?;
        Some(self.items.remove(i).1)
    }

    fn require(&mut self, key: &str) -> Result<f64> {
        self.take(key)
            .ok_or_else(|| Error::InvalidSpec(format!("{} requires parameter '{key}'", self.name)))
    }

    fn finish(self) -> Result<()> {
        match self.items.first() {
            Some((k, _)) => Err(Error::InvalidSpec(format!(
                "unknown parameter '{k}' for {}",
                self.name
            ))),
            None => Ok(()),
        }
    }
}

fn as_u32(key: &str, v: f64) -> Result<u32> {
    if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
        return Err(Error::InvalidSpec(format!(
            "{key} must be a non-negative integer"
        )));
    }
    Ok(v as u32)
}

impl FromStr for MetricSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut segments = s.split(';').map(str::trim);
        let head = segments.next().unwrap_or("");
        let (name, body) = head.split_once(':').unwrap_or((head, ""));
        let mut p = Params {
            name: name.trim().to_string(),
            items: parse_params(body)?,
        };
        let epsilon = p.take("eps");
        let inner_radius = p.take("inner");
        let kind = match p.name.as_str() {
            "flat" => MetricKind::Flat,
            "conformal" => {
                let c = p.require("c")?;
                let power = p.take("power").unwrap_or(2.0);
                MetricKind::Conformal { c, power }
            }
            "burns" => MetricKind::Burns { c: p.require("c")? },
            "eguchi_hanson" => MetricKind::EguchiHanson { a: p.require("a")? },
            "" => return Err(Error::InvalidSpec("empty metric name".into())),
            other => return Err(Error::InvalidSpec(format!("unknown metric '{other}'"))),
        };
        p.finish()?;
        let mut quotient = None;
        for seg in segments {
            let (name, body) = seg.split_once(':').unwrap_or((seg, ""));
            if name.trim() != "quotient" {
                return Err(Error::InvalidSpec(format!(
                    "unknown modifier '{}'",
                    name.trim()
                )));
            }
            if quotient.is_some() {
                return Err(Error::InvalidSpec("quotient given twice".into()));
            }
            let mut q = Params {
                name: "quotient".into(),
                items: parse_params(body)?,
            };
            let qq = as_u32("q", q.require("q")?)?;
            let pp = as_u32("p", q.take("p").unwrap_or(1.0))?;
            q.finish()?;
            quotient = Some((qq, pp));
        }
        let spec = MetricSpec {
            kind,
            epsilon,
            inner_radius,
            quotient,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut params: Vec<String> = match self.kind {
            MetricKind::Flat => vec![],
            MetricKind::Conformal { c, power } => vec![format!("c={c}"), format!("power={power}")],
            MetricKind::Burns { c } => vec![format!("c={c}")],
            MetricKind::EguchiHanson { a } => vec![format!("a={a}")],
        };
        if let Some(e) = self.epsilon {
            params.push(format!("eps={e}"));
        }
        if let Some(r) = self.inner_radius {
            params.push(format!("inner={r}"));
        }
        write!(f, "{}", self.name())?;
        if !params.is_empty() {
            write!(f, ":{}", params.join(","))?;
        }
        if let Some((q, p)) = self.quotient {
            write!(f, ";quotient:q={q},p={p}")?;
        }
        Ok(())
    }
}

impl MetricSpec {
    pub fn new(kind: MetricKind) -> Self {
        Self {
            kind,
            epsilon: None,
            inner_radius: None,
            quotient: None,
        }
    }

    pub fn with_quotient(mut self, q: u32, p: u32) -> Result<Self> {
        self.quotient = Some((q, p));
        self.validate()?;
        Ok(self)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MetricKind::Flat => "flat",
            MetricKind::Conformal { .. } => "conformal",
            MetricKind::Burns { .. } => "burns",
            MetricKind::EguchiHanson { .. } => "eguchi_hanson",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        let inner = self.default_inner_radius();
        if !(inner > 0.0) {
            return bad("inner radius must be positive".into());
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0) {
                return bad("eps must be positive".into());
            }
        }
        match self.kind {
            MetricKind::Flat => {}
            MetricKind::Conformal { c, power } => {
                if !(power > 0.0) {
                    return bad("conformal power must be positive".into());
                }
                if !(1.0 + c * inner.powf(-power) > 0.0) {
                    return bad("conformal factor is not positive on the chart".into());
                }
                if self.epsilon.is_none() && power <= 1.0 {
                    return bad("conformal power <= 1 requires an explicit eps".into());
                }
            }
            MetricKind::Burns { c } => {
                if !(c > 0.0) {
                    return bad("burns parameter c must be positive".into());
                }
            }
            MetricKind::EguchiHanson { a } => {
                if !(a > 0.0) {
                    return bad("eguchi_hanson parameter a must be positive".into());
                }
                if let Some((q, _)) = self.quotient {
                    if q != 2 {
                        return bad("eguchi_hanson is asymptotic to the Z2 quotient only".into());
                    }
                }
            }
        }
        if let Some((q, p)) = self.quotient {
            if q < 2 {
                return bad("quotient order q must be at least 2".into());
            }
            if p == 0 || p >= q || q.gcd(&p) != 1 {
                return bad(format!(
                    "quotient ({q}, {p}) needs 0 < p < q with gcd(p, q) = 1"
                ));
            }
        }
        Ok(())
    }

    fn default_inner_radius(&self) -> f64 {
        self.inner_radius.unwrap_or(match self.kind {
            MetricKind::EguchiHanson { a } => a,
            _ => 1.0,
        })
    }

    /// Effective quotient: Eguchi–Hanson defaults to `ℤ₂`.
    pub fn lens(&self) -> Option<(u32, u32)> {
        match (self.quotient, self.kind) {
            (None, MetricKind::EguchiHanson { .. }) => Some((2, 1)),
            (q, _) => q,
        }
    }

    pub fn group_order(&self) -> u32 {
        self.lens().map_or(1, |(q, _)| q)
    }

    /// Exact mass of the family, where known in closed form.
    pub fn expected_mass(&self) -> Option<f64> {
        let q = self.group_order() as f64;
        match self.kind {
            MetricKind::Flat | MetricKind::EguchiHanson { .. } => Some(0.0),
            MetricKind::Conformal { c, power: 2.0 } => Some(c / q),
            MetricKind::Conformal { .. } => None,
            MetricKind::Burns { c } => Some(c / (3.0 * q)),
        }
    }

    pub fn default_epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(match self.kind {
            MetricKind::Flat | MetricKind::Burns { .. } => 1.0,
            MetricKind::Conformal { power, .. } => (power - 1.0).min(1.0),
            MetricKind::EguchiHanson { .. } => 3.0,
        })
    }

    pub fn potential<T: Real>(&self) -> Option<CatalogPotential<T>> {
        match self.kind {
            MetricKind::Flat => Some(CatalogPotential::Flat),
            MetricKind::Burns { c } => Some(CatalogPotential::Burns { c: T::lit(c) }),
            MetricKind::EguchiHanson { a } => Some(CatalogPotential::EguchiHanson { a: T::lit(a) }),
            MetricKind::Conformal { .. } => None,
        }
    }

    pub fn chart<T: Real>(&self) -> Result<AsymptoticChart<T>> {
        AsymptoticChart::new(
            T::lit(self.default_inner_radius()),
            self.group_order(),
            T::lit(self.default_epsilon()),
        )
    }

    /// Generator `diag(e^{2πi/q}, e^{2πip/q})` of the quotient group as a
    /// real 4×4 rotation, or the identity.
    pub fn generator<T: Real>(&self) -> Mat4<T> {
        match self.lens() {
            None => linalg::identity(),
            Some((q, p)) => {
                let a = T::lit(2.0 * std::f64::consts::PI / q as f64);
                linalg::unitary_diagonal(a, a * T::lit(p as f64))
            }
        }
    }

    /// Builds the field without the curvature gate.
    pub fn build_unchecked<T: Real>(&self) -> Result<MetricField<T>> {
        self.validate()?;
        let chart = self.chart::<T>()?;
        let field = match self.kind {
            MetricKind::Flat => MetricField::new(
                chart,
                KahlerMetric {
                    potential: CatalogPotential::Flat,
                },
            ),
            MetricKind::Conformal { c, power } => MetricField::new(
                chart,
                ConformalMetric {
                    c: T::lit(c),
                    power: T::lit(power),
                },
            ),
            _ => MetricField::new(
                chart,
                KahlerMetric {
                    potential: self.potential::<T>().expect("kahler"),
                },
            ),
        };
        Ok(MetricField {
            label: self.to_string(),
            ..field
        })
    }

    /// Builds the field. Potential-derived metrics are admitted only after
    /// the scalar-curvature gate passes (they are all scalar-flat).
    pub fn build<T: Real>(&self) -> Result<MetricField<T>> {
        let field = self.build_unchecked::<T>()?;
        if matches!(
            self.kind,
            MetricKind::Burns { .. } | MetricKind::EguchiHanson { .. }
        ) {
            let gate = curvature_gate(&field, &gate_radii(field.chart.inner_radius), T::lit(1e-6))?;
            if !gate.pass {
                return Err(Error::CurvatureGate {
                    max: gate.max_abs.to_f64_lossy(),
                    tol: 1e-6,
                });
            }
        }
        Ok(field)
    }
}

/// Outcome of [`curvature_gate`].
#[derive(Debug, Clone, PartialEq)]
pub struct GateReport<T> {
    pub radii: Vec<T>,
    /// `max |s|` on each radius.
    pub per_radius: Vec<T>,
    pub max_abs: T,
    pub pass: bool,
}

/// 20 log-spaced radii from `2a` to `200a`.
pub fn gate_radii<T: Real>(a: T) -> Vec<T> {
    (0..20)
        .map(|k| a * T::lit(2.0 * 100f64.powf(k as f64 / 19.0)))
        .collect()
}

/// Checks `|s| ≤ tol` at a few generic directions on each radius.
pub fn curvature_gate<T: Real>(
    field: &MetricField<T>,
    radii: &[T],
    tol: T,
) -> Result<GateReport<T>> {
    let dirs: [[f64; 4]; 3] = [
        [1.0, 0.0, 0.0, 0.0],
        [0.5, 0.5, 0.5, 0.5],
        [0.6, -0.2, 0.3, 0.714_142_842_854_285],
    ];
    let mut per_radius = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut worst = T::zero();
        for d in &dirs {
            let n = linalg::norm(&d.map(T::lit));
            let x = linalg::vscale(&d.map(T::lit), r / n);
            worst = worst.max(scalar_curvature(field, &x)?.abs());
        }
        per_radius.push(worst);
    }
    let max_abs = per_radius.iter().fold(T::zero(), |m, v| m.max(*v));
    Ok(GateReport {
        radii: radii.to_vec(),
        per_radius,
        max_abs,
        pass: max_abs <= tol,
    })
}
