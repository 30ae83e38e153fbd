//! The Chruściel mass of an asymptotically locally Euclidean end,
//!
//! `m = lim_{ρ→∞} 1/(12π²|Γ|) ∫_{S_ρ} (g_{kℓ,k} − g_{kk,ℓ}) n^ℓ dA`,
//!
//! evaluated on a schedule of spheres and extrapolated in `ρ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{metric_derivatives, MetricField};
use crate::linalg;
use crate::numerics::{fit_power_law, SphereRule};
use crate::scalar::Real;

/// Spheres must stay this factor outside the inner radius so that
/// finite-difference stencils remain in the chart.
pub const STENCIL_MARGIN: f64 = 1.5;

#[derive(Debug, Clone, PartialEq)]
pub struct MassConfig<T> {
    /// `N` of the `(N, N, 2N)` product rule.
    pub rule_order: usize,
    /// One-term RMS residual above which the two-term model is tried.
    pub two_term_threshold: T,
    /// Initial decay exponent; defaults to the chart's `ε`.
    pub kappa_init: Option<T>,
}

impl<T: Real> Default for MassConfig<T> {
    fn default() -> Self {
        Self {
            rule_order: 24,
            two_term_threshold: T::lit(1e-6),
            kappa_init: None,
        }
    }
}

/// Samples of the boundary integral and their extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassEstimate<T> {
    /// `(ρ, integral)` in increasing `ρ`.
    pub samples: Vec<(T, T)>,
    pub extrapolated_mass: T,
    /// Fitted `κ` in `m(ρ) ≈ m∞ + A·ρ^{−κ}`.
    pub fitted_decay: T,
    /// RMS fit residual.
    pub residual: T,
    pub group_order: u32,
    /// The samples were constant to round-off.
    pub constant: bool,
    /// `κ ≤ 0.05`: the integral does not settle and the mass is undefined.
    pub non_convergent: bool,
    pub warning: Option<String>,
}

/// One CSV row of a mass run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassRow<T> {
    pub rho: T,
    pub integrand: T,
    pub running_extrapolation: T,
    pub residual: T,
}

const NON_CONVERGENT_KAPPA: f64 = 0.05;

/// `ρ_k = a·2^k`, `k = 3..=10`.
pub fn default_schedule<T: Real>(inner_radius: T) -> Vec<T> {
    (3..=10)
        .map(|k| inner_radius * T::lit((1u32 << k) as f64))
        .collect()
}

/// The normalised boundary integral on the sphere of radius `rho`, with the
/// default `N = 24` rule.
pub fn mass_integrand_at<T: Real>(field: &MetricField<T>, rho: T) -> Result<T> {
    mass_integrand_with(field, rho, &SphereRule::product_gauss_legendre(24))
}

pub fn mass_integrand_with<T: Real>(
    field: &MetricField<T>,
    rho: T,
    rule: &SphereRule<T>,
) -> Result<T> {
    let min = field.chart.inner_radius * T::lit(STENCIL_MARGIN);
    if !(rho >= min) {
        return Err(Error::BelowInnerRadius {
            radius: rho.to_f64_lossy(),
            inner: min.to_f64_lossy(),
        });
    }
    let integral = rule.try_integrate_par(|n| {
        let x = linalg::vscale(n, rho);
        let d = metric_derivatives(field, &x)?;
        let mut s = T::zero();
        for l in 0..4 {
            let mut c = T::zero();
            for k in 0..4 {
                c = c + d[k][k][l] - d[l][k][k];
            }
            s = s + c * n[l];
        }
        Ok(s)
    })?;
    let q = T::from_usize_lossy(field.chart.group_order as usize);
    let norm = T::lit(12.0) * T::PI() * T::PI() * q;
    let v = integral * rho * rho * rho / norm;
    if !v.is_finite() {
        return Err(Error::NonFinite("mass integrand"));
    }
    Ok(v)
}

fn check_schedule<T: Real>(field: &MetricField<T>, schedule: &[T]) -> Result<()> {
    if schedule.len() < 4 {
        return Err(Error::InvalidSchedule(format!(
            "{} radii given, need at least 4",
            schedule.len()
        )));
    }
    if schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidSchedule(
            "radii must be strictly increasing".into(),
        ));
    }
    let span = (schedule[schedule.len() - 1] / schedule[0]).log10();
    if !(span >= T::lit(2.0) - T::lit(1e-9)) {
        return Err(Error::InvalidSchedule(format!(
            "radii span {:.3} decades, need at least 2",
            span.to_f64_lossy()
        )));
    }
    let min = field.chart.inner_radius * T::lit(STENCIL_MARGIN);
    if schedule[0] < min {
        return Err(Error::InvalidSchedule(format!(
            "first radius {} is inside {}·inner radius",
            schedule[0], STENCIL_MARGIN
        )));
    }
    Ok(())
}

/// Evaluates the boundary integral on every radius of `schedule` and fits
/// `m∞ + A·ρ^{−κ}`.
pub fn chrusciel_mass<T: Real>(field: &MetricField<T>, schedule: &[T]) -> Result<MassEstimate<T>> {
    chrusciel_mass_with(field, schedule, &MassConfig::default())
}

pub fn chrusciel_mass_with<T: Real>(
    field: &MetricField<T>,
    schedule: &[T],
    config: &MassConfig<T>,
) -> Result<MassEstimate<T>> {
    check_schedule(field, schedule)?;
    let rule = SphereRule::product_gauss_legendre(config.rule_order.max(1));
    let samples = schedule
        .iter()
        .map(|&r| Ok((r, mass_integrand_with(field, r, &rule)?)))
        .collect::<Result<Vec<_>>>()?;
    extrapolate(
        samples,
        field.chart.group_order,
        config.kappa_init.unwrap_or(field.chart.falloff_epsilon),
        config.two_term_threshold,
    )
}

/// Fits an already-sampled integral.
pub fn extrapolate<T: Real>(
    samples: Vec<(T, T)>,
    group_order: u32,
    kappa_init: T,
    two_term_threshold: T,
) -> Result<MassEstimate<T>> {
    let xs: Vec<T> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<T> = samples.iter().map(|s| s.1).collect();
    let fit = fit_power_law(&xs, &ys, kappa_init, two_term_threshold)?;
    let non_convergent = !fit.constant && fit.exponent <= T::lit(NON_CONVERGENT_KAPPA);
    let (first, last) = (ys[0], ys[ys.len() - 1]);
    let mut warning = None;
    if non_convergent {
        warning = Some(format!(
            "fitted decay exponent {:.4} <= {NON_CONVERGENT_KAPPA}: boundary integral does not converge",
            fit.exponent
        ));
    } else if (fit.limit - last).abs()
        > (first - last).abs() + T::epsilon() * T::lit(1e3) * last.abs().max(T::one())
    {
        warning = Some("extrapolated mass lies outside the observed trend".into());
    }
    Ok(MassEstimate {
        samples,
        extrapolated_mass: fit.limit,
        fitted_decay: fit.exponent,
        residual: fit.residual,
        group_order,
        constant: fit.constant,
        non_convergent,
        warning,
    })
}

impl<T: Real> MassEstimate<T> {
    /// Per-radius rows; the running columns refit the samples up to each
    /// radius (the raw value stands in until three samples exist).
    pub fn rows(&self, kappa_init: T) -> Vec<MassRow<T>> {
        (0..self.samples.len())
            .map(|i| {
                let (rho, integrand) = self.samples[i];
                let (running_extrapolation, residual) = if i >= 2 {
                    let xs: Vec<T> = self.samples[..=i].iter().map(|s| s.0).collect();
                    let ys: Vec<T> = self.samples[..=i].iter().map(|s| s.1).collect();
                    fit_power_law(&xs, &ys, kappa_init, T::infinity())
                        .map(|f| (f.limit, f.residual))
                        .unwrap_or((integrand, T::nan()))
                } else {
                    (integrand, T::zero())
                };
                MassRow {
                    rho,
                    integrand,
                    running_extrapolation,
                    residual,
                }
            })
            .collect()
    }

    /// `max − min` of the sampled integrals.
    pub fn spread(&self) -> T {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), s| {
                (lo.min(s.1), hi.max(s.1))
            });
        hi - lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{AsymptoticChart, ConformalMetric};

    #[test]
    fn conformal_integrand_is_c() {
        let chart = AsymptoticChart::new(1.0, 1, 1.0).unwrap();
        let f = MetricField::new(chart, ConformalMetric { c: 0.7, power: 2.0 });
        let rule = SphereRule::product_gauss_legendre(24);
        for r in [2.0f64, 30.0, 500.0] {
            let v = mass_integrand_with(&f, r, &rule).unwrap();
            assert!((v - 0.7).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn schedule_is_validated() {
        let chart = AsymptoticChart::new(1.0, 1, 1.0).unwrap();
        let f = MetricField::new(chart, ConformalMetric { c: 0.7, power: 2.0 });
        assert!(chrusciel_mass(&f, &[8.0, 16.0, 32.0]).is_err());
        assert!(chrusciel_mass(&f, &[8.0, 16.0, 32.0, 64.0]).is_err());
        assert!(chrusciel_mass(&f, &[1.2, 16.0, 32.0, 640.0]).is_err());
        assert!(chrusciel_mass(&f, &[8.0, 4.0, 32.0, 1024.0]).is_err());
        assert_eq!(
            default_schedule(1.0),
            vec![8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0]
        );
    }
}
