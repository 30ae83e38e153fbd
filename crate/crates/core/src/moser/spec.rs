use std::fmt;

use super::field::moser_field_raw;
use crate::error::{Error, Result};
use crate::geom::{
    audit_grid, kahler_form_field, AsymptoticChart, OneFormField, RadialPotential, TwoFormField,
};
use crate::linalg::{self, Vec4};
use crate::scalar::Real;

/// Radial potential with `u'(t) = 1 + k·t^{−a}`. `a = 1` is the
/// Burns potential `t + k log t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawPotential<T> {
    pub k: T,
    pub a: T,
}

impl<T: Real> RadialPotential<T> for PowerLawPotential<T> {
    fn value(&self, t: T) -> T {
        if self.a == T::one() {
            t + self.k * t.ln()
        } else {
            let e = T::one() - self.a;
            t + self.k * t.powf(e) / e
        }
    }

    fn d1(&self, t: T) -> T {
        T::one() + self.k * t.powf(-self.a)
    }

    fn d2(&self, t: T) -> T {
        -self.a * self.k * t.powf(-self.a - T::one())
    }

    fn d3(&self, t: T) -> T {
        self.a * (self.a + T::one()) * self.k * t.powf(-self.a - T::lit(2.0))
    }

    fn domain_floor(&self) -> T {
        T::epsilon().sqrt()
    }

    fn label(&self) -> String {
        format!("powerlaw:k={},a={}", self.k, self.a)
    }
}

/// Knobs of the audit performed when a spec is constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecConfig<T> {
    /// Radii of the audit grid are `b·2^j`, `j = 0..audit_radii`.
    pub audit_radii: usize,
    pub audit_rule_order: usize,
    pub closure_tol: T,
    /// Outer radius, in units of `b`, of the `|X_t| < 1` sampling.
    pub calibration_extent: T,
}

impl<T: Real> Default for SpecConfig<T> {
    fn default() -> Self {
        Self {
            audit_radii: 6,
            audit_rule_order: 3,
            closure_tol: T::lit(1e-7),
            calibration_extent: T::lit(32.0),
        }
    }
}

/// A closed perturbation `ω` of `ω₀` with primitive `θ`, certified on
/// `ρ ≥ b`, and the radius `c` beyond which the flow is trapped.
#[derive(Clone)]
pub struct PerturbationSpec<T: Real> {
    pub omega: TwoFormField<T>,
    pub theta: OneFormField<T>,
    pub working_radius: T,
    pub safety_radius: T,
    /// Declared decay `|ω − ω₀| = O(ρ^{−1−ε})`.
    pub epsilon: T,
    /// Largest `|ω − ω₀|` seen on the audit grid.
    pub max_deviation: T,
    /// Largest `|dθ − (ω − ω₀)|` seen on the audit grid.
    pub primitive_defect: T,
}

impl<T: Real> fmt::Debug for PerturbationSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerturbationSpec")
            .field("omega", &self.omega.label)
            .field("theta", &self.theta.label)
            .field("working_radius", &self.working_radius)
            .field("safety_radius", &self.safety_radius)
            .field("epsilon", &self.epsilon)
            .finish()
    }
}

impl<T: Real> PerturbationSpec<T> {
    /// Audits `ω` and `θ` on `ρ ≥ b` and accepts the given `c ≥ b + 1`.
    pub fn new(
        omega: TwoFormField<T>,
        theta: OneFormField<T>,
        working_radius: T,
        safety_radius: T,
        epsilon: T,
        config: &SpecConfig<T>,
    ) -> Result<Self> {
        let b = working_radius;
        if !(b > T::zero()) || !(epsilon > T::zero()) {
            return Err(Error::InvalidPerturbation(
                "b and eps must be positive".into(),
            ));
        }
        if !(safety_radius >= b + T::one()) {
            return Err(Error::InvalidPerturbation(format!(
                "safety radius {safety_radius} must be at least b + 1 = {}",
                b + T::one()
            )));
        }
        // Audit stencils need room below b.
        let chart = AsymptoticChart::new(b * T::lit(0.5), omega.chart.group_order, epsilon)?;
        let mut omega = omega.with_chart(chart.clone());
        let theta = theta.with_chart(chart);
        let radii: Vec<T> = (0..config.audit_radii.max(1))
            .map(|j| b * T::lit(2f64.powi(j as i32)))
            .collect();
        let pts = audit_grid(&radii, config.audit_rule_order.max(1));
        if !omega.closedness_certified {
            let defect = omega.certify_closed(&pts, config.closure_tol)?;
            if !omega.closedness_certified {
                return Err(Error::InvalidPerturbation(format!(
                    "omega is not closed: |d omega| = {defect}"
                )));
            }
        }
        let limit = T::FRAC_1_SQRT_2();
        let w0 = linalg::standard_symplectic::<T>();
        let mut max_deviation = T::zero();
        let mut primitive_defect = T::zero();
        for x in &pts {
            let dw = linalg::sub(&omega.eval(x)?, &w0);
            max_deviation = max_deviation.max(linalg::two_form_norm(&dw));
            let dth = theta.exterior_derivative(x)?;
            primitive_defect = primitive_defect.max(linalg::max_abs(&linalg::sub(&dth, &dw)));
        }
        if !(max_deviation < limit) {
            return Err(Error::InvalidPerturbation(format!(
                "|omega - omega0| reaches {max_deviation} >= 1/sqrt(2) on rho >= b"
            )));
        }
        if !(primitive_defect <= config.closure_tol) {
            return Err(Error::InvalidPerturbation(format!(
                "d theta differs from omega - omega0 by {primitive_defect}"
            )));
        }
        Ok(Self {
            omega,
            theta,
            working_radius: b,
            safety_radius,
            epsilon,
            max_deviation,
            primitive_defect,
        })
    }

    /// Like [`PerturbationSpec::new`], choosing `c` by sampling: the smallest
    /// `c ≥ b + 1.5` on a half-unit grid with `|X_t| < 1` for all sampled
    /// `ρ ≥ c − 1` and `t ∈ {0, ¼, ½, ¾, 1}`. The extra half unit keeps the
    /// cut-off zone `[c − 1.5, c − 1]` inside `ρ ≥ b`.
    pub fn calibrate(
        omega: TwoFormField<T>,
        theta: OneFormField<T>,
        working_radius: T,
        epsilon: T,
        config: &SpecConfig<T>,
    ) -> Result<Self> {
        let b = working_radius;
        let provisional = Self::new(omega, theta, b, b + T::lit(1.5), epsilon, config)?;
        let outer = b * config.calibration_extent;
        let samples = |c: T| -> Vec<Vec4<T>> {
            let lo = c - T::one();
            let n = 12;
            let radii: Vec<T> = (0..n)
                .map(|i| {
                    lo * (outer / lo)
                        .max(T::one())
                        .powf(T::from_usize_lossy(i) / T::from_usize_lossy(n - 1))
                })
                .collect();
            audit_grid(&radii, config.audit_rule_order.max(1))
        };
        let ts = [0.0, 0.25, 0.5, 0.75, 1.0].map(T::lit);
        let mut c = b + T::lit(1.5);
        for _ in 0..200 {
            let mut ok = true;
            'scan: for x in samples(c) {
                for &t in &ts {
                    let v = moser_field_raw(&provisional, &x, t)?;
                    if !(linalg::norm(&v) < T::one()) {
                        ok = false;
                        break 'scan;
                    }
                }
            }
            if ok {
                return Ok(Self {
                    safety_radius: c,
                    ..provisional
                });
            }
            c = c + T::lit(0.5);
        }
        Err(Error::InvalidPerturbation(
            "no safety radius with |X_t| < 1 found".into(),
        ))
    }

    /// `ω = ω₀`, `θ = 0`.
    pub fn trivial(working_radius: T) -> Result<Self> {
        let chart = AsymptoticChart::new(working_radius * T::lit(0.5), 1, T::one())?;
        Self::new(
            TwoFormField::standard(chart.clone()),
            OneFormField::zero(chart),
            working_radius,
            working_radius + T::lit(1.5),
            T::one(),
            &SpecConfig::default(),
        )
    }
}

/// Spec of a radial Kähler form `ω = ω₀ + dθ` with `θ = (u' − 1)·λ₀`,
/// `λ₀ = ½(x¹dx² − x²dx¹ + x³dx⁴ − x⁴dx³)`. Invariant under `U(2)`.
pub fn radial_spec<T, P>(
    pot: P,
    working_radius: T,
    epsilon: T,
    config: &SpecConfig<T>,
) -> Result<PerturbationSpec<T>>
where
    T: Real,
    P: RadialPotential<T> + Clone + 'static,
{
    let chart = AsymptoticChart::new(working_radius * T::lit(0.5), 1, epsilon)?;
    let omega = kahler_form_field(pot.clone(), chart.clone());
    let label = format!("theta[{}]", pot.label());
    let theta = OneFormField::new(chart, &label, move |x: &Vec4<T>| {
        let f = (pot.d1(linalg::dot(x, x)) - T::one()) * T::lit(0.5);
        [-f * x[1], f * x[0], -f * x[3], f * x[2]]
    });
    PerturbationSpec::calibrate(omega, theta, working_radius, epsilon, config)
}

/// Burns-type spec: `u' = 1 + c/ρ²`, `ε = 1`, certified from `b = 1`.
pub fn burns_spec<T: Real>(c: T) -> Result<PerturbationSpec<T>> {
    let b = (T::lit(2.0) * c).sqrt().max(T::one());
    radial_spec(
        PowerLawPotential { k: c, a: T::one() },
        b,
        T::one(),
        &SpecConfig::default(),
    )
}

/// Synthetic `ε = ½` spec: `θ = ρ^{−1/2}·σ` with `σ = J₀x/ρ` the unit
/// tangential Hopf form, i.e. `u' = 1 + 2ρ^{−3/2}`.
pub fn synthetic_spec<T: Real>() -> Result<PerturbationSpec<T>> {
    radial_spec(
        PowerLawPotential {
            k: T::lit(2.0),
            a: T::lit(0.75),
        },
        T::lit(2.5),
        T::lit(0.5),
        &SpecConfig::default(),
    )
}
