use crate::error::{Error, Result};
use crate::geom::{eval_metric, scalar_curvature, MetricField};
use crate::linalg::{self, Vec4};
use crate::mass::STENCIL_MARGIN;
use crate::numerics::{compensated_sum, loglog_slope, GaussLegendre, SphereRule};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarIntegralConfig<T> {
    /// `N` of the sphere rule on each shell.
    pub rule_order: usize,
    /// Decades of `ρ` integrated before the tail closure.
    pub decades: usize,
    pub panels_per_decade: usize,
    /// Gauss–Legendre points per panel in `log ρ`.
    pub panel_points: usize,
    /// `|ρ·F(ρ)|` on the last panel below which the tail is dropped.
    pub tail_floor: T,
    /// Shell integrals `F(ρ)` must decay faster than `ρ^{max_tail_slope}`.
    pub max_tail_slope: T,
}

impl<T: Real> Default for ScalarIntegralConfig<T> {
    fn default() -> Self {
        Self {
            rule_order: 8,
            decades: 4,
            panels_per_decade: 4,
            panel_points: 8,
            tail_floor: T::lit(1e-8),
            max_tail_slope: T::lit(-1.05),
        }
    }
}

/// `inner_data + ∫_{ρ ≥ r0} f d⁴x` for a density `f`, using shell
/// integrals `F(ρ) = ρ³∫_{S³} f(ρn) dσ`, Gauss–Legendre panels in `log ρ`
/// and a power-law closure of the tail.
pub fn scalar_volume_integral_of<T, F>(
    density: &F,
    r0: T,
    inner_data: T,
    config: &ScalarIntegralConfig<T>,
) -> Result<T>
where
    T: Real,
    F: Fn(&Vec4<T>) -> Result<T> + Sync,
{
    if !(r0 > T::zero())
        || config.decades == 0
        || config.panels_per_decade == 0
        || config.panel_points == 0
    {
        return Err(Error::InvalidSchedule(
            "scalar integral needs r0 > 0 and a non-empty panel layout".into(),
        ));
    }
    let rule = SphereRule::<T>::product_gauss_legendre(config.rule_order.max(1));
    let gl = GaussLegendre::<T>::new(config.panel_points);
    let panels = config.decades * config.panels_per_decade;
    let du = T::LN_10() / T::from_usize_lossy(config.panels_per_decade);
    let shell = |rho: T| -> Result<T> {
        let s = rule.try_integrate_par(|n| density(&linalg::vscale(n, rho)))?;
        Ok(s * rho * rho * rho)
    };
    let mut terms = Vec::with_capacity(panels * config.panel_points);
    let mut last_panel = Vec::with_capacity(config.panel_points);
    for p in 0..panels {
        let u0 = du * T::from_usize_lossy(p);
        for (u, w) in gl.on_interval(u0, u0 + du) {
            let rho = r0 * u.exp();
            let f = shell(rho)?;
            terms.push(w * f * rho);
            if p + 1 == panels {
                last_panel.push((rho, f));
            }
        }
    }
    let body = compensated_sum(terms);
    let tail = tail_closure(
        &last_panel,
        r0 * (du * T::from_usize_lossy(panels)).exp(),
        config,
    )?;
    Ok(inner_data + body + tail)
}

fn tail_closure<T: Real>(last: &[(T, T)], r_end: T, config: &ScalarIntegralConfig<T>) -> Result<T> {
    let worst = last
        .iter()
        .fold(T::zero(), |m, (r, f)| m.max((*r * *f).abs()));
    if worst <= config.tail_floor {
        return Ok(T::zero());
    }
    let same_sign =
        last.iter().all(|(_, f)| *f > T::zero()) || last.iter().all(|(_, f)| *f < T::zero());
    let xs: Vec<T> = last.iter().map(|p| p.0).collect();
    let ys: Vec<T> = last.iter().map(|p| p.1.abs()).collect();
    let slope = loglog_slope(&xs, &ys).unwrap_or(T::nan());
    if !same_sign || !(slope < config.max_tail_slope) {
        return Err(Error::NonIntegrableTail {
            slope: slope.to_f64_lossy(),
        });
    }
    // F ≈ A ρ^σ on the tail: ∫_R^∞ A ρ^σ dρ = A R^{σ+1}/(−σ−1).
    let (rl, fl) = last[last.len() - 1];
    let f_end = fl * (r_end / rl).powf(slope);
    Ok(f_end * r_end / (-slope - T::one()))
}

/// `inner_data + ∫ s_g dμ_g` over the chart, divided by `|Γ|`. The
/// integration starts at `1.5·inner_radius` to keep curvature stencils in
/// the chart, so `inner_data` must cover everything inside that sphere.
pub fn scalar_volume_integral<T: Real>(
    field: &MetricField<T>,
    inner_data: T,
    config: &ScalarIntegralConfig<T>,
) -> Result<T> {
    let r0 = field.chart.inner_radius * T::lit(STENCIL_MARGIN);
    let density = |x: &Vec4<T>| -> Result<T> {
        let g = eval_metric(field, x)?;
        Ok(scalar_curvature(field, x)? * linalg::determinant(&g).sqrt())
    };
    let q = T::from_usize_lossy(field.chart.group_order as usize);
    let total = scalar_volume_integral_of(&density, r0, T::zero(), config)?;
    Ok(inner_data + total / q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hand_integral_of_rho_minus_six() {
        let f = |x: &Vec4<f64>| Ok(linalg::dot(x, x).powi(-3));
        let v = scalar_volume_integral_of(&f, 1.0, 0.0, &ScalarIntegralConfig::default()).unwrap();
        assert!((v - PI * PI).abs() < 1e-9, "{v}");
    }

    #[test]
    fn slow_tail_is_rejected() {
        let f = |x: &Vec4<f64>| Ok(linalg::dot(x, x).powi(-2));
        let r = scalar_volume_integral_of(&f, 1.0, 0.0, &ScalarIntegralConfig::default());
        assert!(matches!(r, Err(Error::NonIntegrableTail { .. })));
    }

    #[test]
    fn zero_density_gives_inner_data() {
        let f = |_: &Vec4<f64>| Ok(0.0);
        let v = scalar_volume_integral_of(&f, 1.0, 2.5, &ScalarIntegralConfig::default()).unwrap();
        assert_eq!(v, 2.5);
    }
}
