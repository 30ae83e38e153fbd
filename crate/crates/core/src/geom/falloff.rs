use super::{eval_metric, metric_derivatives, MetricField};
use crate::error::{Error, Result};
use crate::linalg::{self, Vec4};
use crate::numerics::{loglog_slope, SphereRule};
use crate::scalar::Real;

/// Sampling and tolerance knobs for [`verify_falloff`].
#[derive(Debug, Clone, PartialEq)]
pub struct FallOffConfig<T> {
    /// Sphere radii; must span at least two decades.
    pub radii: Vec<T>,
    /// Order of the sphere rule used on each radius.
    pub rule_order: usize,
    pub slope_tol: T,
}

impl<T: Real> FallOffConfig<T> {
    /// Radii `a·2^{k/2}`, `k = 2..=16`, spanning 2.1 decades.
    pub fn for_inner_radius(a: T) -> Self {
        let radii = (2..=16)
            .map(|k| a * T::lit(2f64.powf(k as f64 / 2.0)))
            .collect();
        Self {
            radii,
            rule_order: 4,
            slope_tol: T::lit(0.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FallOffReport<T> {
    /// Fitted log–log slope of `sup |g − δ|`; `None` at the noise floor.
    pub slope_g: Option<T>,
    /// Fitted log–log slope of `sup |∂g|`; `None` at the noise floor.
    pub slope_dg: Option<T>,
    pub pass: bool,
    /// No slope could be fitted because the deviations are round-off.
    pub inconclusive: bool,
    pub noise_floor: T,
    pub sup_g: Vec<T>,
    pub sup_dg: Vec<T>,
}

/// Fits the decay of `g − δ` and `∂g` on nested spheres against the chart's
/// declared `ε`: pass iff `slope_g ≤ −1−ε+tol` and `slope_dg ≤ −2−ε+tol`.
pub fn verify_falloff<T: Real>(
    field: &MetricField<T>,
    config: &FallOffConfig<T>,
) -> Result<FallOffReport<T>> {
    let radii = &config.radii;
    if radii.len() < 3 {
        return Err(Error::InsufficientRange(format!(
            "{} radii given, need at least 3",
            radii.len()
        )));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InsufficientRange(
            "radii must be strictly increasing".into(),
        ));
    }
    let span = (radii[radii.len() - 1] / radii[0]).log10();
    if !(span >= T::lit(2.0) - T::lit(1e-9)) {
        return Err(Error::InsufficientRange(format!(
            "radii span {:.3} decades, need at least 2",
            span.to_f64_lossy()
        )));
    }
    let rule = SphereRule::<T>::product_gauss_legendre(config.rule_order.max(1));
    let id = linalg::identity::<T>();
    let mut sup_g = Vec::with_capacity(radii.len());
    let mut sup_dg = Vec::with_capacity(radii.len());
    for &r in radii {
        let (mut mg, mut mdg) = (T::zero(), T::zero());
        for n in &rule.nodes {
            let x: Vec4<T> = linalg::vscale(n, r);
            let g = eval_metric(field, &x)?;
            if linalg::cholesky(&g).is_none() {
                return Err(Error::NotPositiveDefinite(r.to_f64_lossy()));
            }
            mg = mg.max(linalg::max_abs(&linalg::sub(&g, &id)));
            for d in metric_derivatives(field, &x)? {
                mdg = mdg.max(linalg::max_abs(&d));
            }
        }
        sup_g.push(mg);
        sup_dg.push(mdg);
    }
    let noise_floor = T::epsilon() * T::lit(1e3);
    let fit = |ys: &[T]| -> Option<T> {
        let (xs, ys): (Vec<T>, Vec<T>) = radii
            .iter()
            .zip(ys)
            .filter(|(_, y)| **y > noise_floor)
            .map(|(x, y)| (*x, *y))
            .unzip();
        if xs.len() < 3 {
            None
        } else {
            loglog_slope(&xs, &ys)
        }
    };
    let slope_g = fit(&sup_g);
    let slope_dg = fit(&sup_dg);
    let eps = field.chart.falloff_epsilon;
    let tol = config.slope_tol;
    let ok_g = slope_g.is_none_or(|s| s <= -T::one() - eps + tol);
    let ok_dg = slope_dg.is_none_or(|s| s <= -T::lit(2.0) - eps + tol);
    Ok(FallOffReport {
        slope_g,
        slope_dg,
        pass: ok_g && ok_dg,
        inconclusive: slope_g.is_none() && slope_dg.is_none(),
        noise_floor,
        sup_g,
        sup_dg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{AsymptoticChart, ConformalMetric};

    #[test]
    fn conformal_passes_slow_family_fails() {
        let chart = AsymptoticChart::new(1.0, 1, 1.0).unwrap();
        let cfg = FallOffConfig::for_inner_radius(1.0f64);
        let f = MetricField::new(chart, ConformalMetric { c: 0.7, power: 2.0 });
        let r = verify_falloff(&f, &cfg).unwrap();
        assert!((r.slope_g.unwrap() + 2.0).abs() < 1e-6);
        assert!((r.slope_dg.unwrap() + 3.0).abs() < 1e-6);
        assert!(r.pass);

        let chart = AsymptoticChart::new(1.0, 1, 0.5).unwrap();
        let slow = MetricField::new(chart, ConformalMetric { c: 0.7, power: 0.4 });
        let r = verify_falloff(&slow, &cfg).unwrap();
        assert!((r.slope_g.unwrap() + 0.4).abs() < 1e-6);
        assert!(!r.pass);
    }

    #[test]
    fn flat_is_inconclusive_pass() {
        let chart = AsymptoticChart::new(1.0, 1, 1.0).unwrap();
        let f = MetricField::from_fn(chart, "flat", |_| linalg::identity());
        let r = verify_falloff(&f, &FallOffConfig::for_inner_radius(1.0)).unwrap();
        assert!(r.pass && r.inconclusive);
    }

    #[test]
    fn short_range_is_rejected() {
        let chart = AsymptoticChart::new(1.0, 1, 1.0).unwrap();
        let f = MetricField::from_fn(chart, "flat", |_| linalg::identity());
        let cfg = FallOffConfig {
            radii: vec![2.0, 5.0, 20.0, 50.0],
            rule_order: 3,
            slope_tol: 0.1,
        };
        assert!(matches!(
            verify_falloff(&f, &cfg),
            Err(Error::InsufficientRange(_))
        ));
    }
}
