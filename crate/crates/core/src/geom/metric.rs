use std::fmt;
use std::sync::Arc;

use super::AsymptoticChart;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat4, Vec4};
use crate::scalar::Real;

/// Anything that can evaluate a Riemannian metric in the asymptotic chart.
pub trait MetricSource<T: Real>: Send + Sync {
    fn metric(&self, x: &Vec4<T>) -> Mat4<T>;

    /// Analytic first derivatives `d[ℓ][j][k] = ∂_ℓ g_jk`, when known.
    fn gradient(&self, _x: &Vec4<T>) -> Option<[Mat4<T>; 4]> {
        None
    }

    fn has_gradient(&self) -> bool {
        false
    }

    fn label(&self) -> String;
}

/// How `metric_derivatives` obtains `∂g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode<T> {
    Analytic,
    /// Central differences with step `h = max(ρ·rel_step, min_step)`.
    CentralDifference {
        rel_step: T,
        min_step: T,
    },
}

impl<T: Real> DerivativeMode<T> {
    pub fn central_default() -> Self {
        DerivativeMode::CentralDifference {
            rel_step: T::lit(1e-4),
            min_step: T::lit(1e-6),
        }
    }

    pub fn step(&self, rho: T) -> T {
        match *self {
            DerivativeMode::Analytic => (rho * T::lit(1e-4)).max(T::lit(1e-6)),
            DerivativeMode::CentralDifference { rel_step, min_step } => {
                (rho * rel_step).max(min_step)
            }
        }
    }
}

/// A metric on an asymptotic chart together with its derivative policy.
#[derive(Clone)]
pub struct MetricField<T: Real> {
    pub chart: AsymptoticChart<T>,
    pub source: Arc<dyn MetricSource<T>>,
    pub derivative_mode: DerivativeMode<T>,
    pub label: String,
}

impl<T: Real> fmt::Debug for MetricField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("label", &self.label)
            .field("chart", &self.chart)
            .field("derivative_mode", &self.derivative_mode)
            .finish()
    }
}

impl<T: Real> MetricField<T> {
    /// Uses analytic derivatives whenever the source provides them.
    pub fn new<S: MetricSource<T> + 'static>(chart: AsymptoticChart<T>, source: S) -> Self {
        let label = source.label();
        let has_gradient = source.has_gradient();
        Self {
            chart,
            source: Arc::new(source),
            derivative_mode: if has_gradient {
                DerivativeMode::Analytic
            } else {
                DerivativeMode::central_default()
            },
            label,
        }
    }

    pub fn from_fn<F>(chart: AsymptoticChart<T>, label: &str, f: F) -> Self
    where
        F: Fn(&Vec4<T>) -> Mat4<T> + Send + Sync + 'static,
    {
        Self::new(chart, FnMetric::new(label, f))
    }

    pub fn with_mode(mut self, mode: DerivativeMode<T>) -> Self {
        self.derivative_mode = mode;
        self
    }

    pub fn with_chart(mut self, chart: AsymptoticChart<T>) -> Self {
        self.chart = chart;
        self
    }

    /// Unchecked evaluation, used on finite-difference stencils.
    pub(crate) fn raw(&self, x: &Vec4<T>) -> Mat4<T> {
        self.source.metric(x)
    }
}

/// `g_jk(x)`; requires `|x| ≥ inner_radius`.
pub fn eval_metric<T: Real>(field: &MetricField<T>, x: &Vec4<T>) -> Result<Mat4<T>> {
    field.chart.check_point(x)?;
    let g = field.source.metric(x);
    if !linalg::is_finite(&g) {
        return Err(Error::NonFinite("metric"));
    }
    Ok(g)
}

/// All 64 partials `d[ℓ][j][k] = ∂_ℓ g_jk` at `x`.
pub fn metric_derivatives<T: Real>(field: &MetricField<T>, x: &Vec4<T>) -> Result<[Mat4<T>; 4]> {
    let rho = field.chart.check_point(x)?;
    let d = match field.derivative_mode {
        DerivativeMode::Analytic => match field.source.gradient(x) {
            Some(d) => d,
            None => central_gradient(field, x, DerivativeMode::central_default().step(rho), rho)?,
        },
        mode => central_gradient(field, x, mode.step(rho), rho)?,
    };
    if d.iter().any(|m| !linalg::is_finite(m)) {
        return Err(Error::NonFinite("metric derivatives"));
    }
    Ok(d)
}

fn central_gradient<T: Real>(
    field: &MetricField<T>,
    x: &Vec4<T>,
    h: T,
    rho: T,
) -> Result<[Mat4<T>; 4]> {
    if !(h > T::zero()) || rho + h == rho {
        return Err(Error::StepUnderflow(h.to_f64_lossy()));
    }
    if rho - h < field.chart.inner_radius {
        return Err(Error::BelowInnerRadius {
            radius: (rho - h).to_f64_lossy(),
            inner: field.chart.inner_radius.to_f64_lossy(),
        });
    }
    let mut d = [linalg::zeros(); 4];
    let two_h = h + h;
    for l in 0..4 {
        let mut xp = *x;
        let mut xm = *x;
        xp[l] = xp[l] + h;
        xm[l] = xm[l] - h;
        let gp = field.raw(&xp);
        let gm = field.raw(&xm);
        for j in 0..4 {
            for k in 0..4 {
                d[l][j][k] = (gp[j][k] - gm[j][k]) / two_h;
            }
        }
    }
    Ok(d)
}

type MetricFn<T> = dyn Fn(&Vec4<T>) -> Mat4<T> + Send + Sync;

/// Metric given by a closure; derivatives by finite differences.
pub struct FnMetric<T> {
    label: String,
    f: Box<MetricFn<T>>,
}

impl<T: Real> FnMetric<T> {
    pub fn new<F>(label: &str, f: F) -> Self
    where
        F: Fn(&Vec4<T>) -> Mat4<T> + Send + Sync + 'static,
    {
        Self {
            label: label.to_string(),
            f: Box::new(f),
        }
    }
}

impl<T: Real> MetricSource<T> for FnMetric<T> {
    fn metric(&self, x: &Vec4<T>) -> Mat4<T> {
        (self.f)(x)
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// `g = (1 + c·ρ^{−p})·δ`. With `p = 2` the mass is exactly `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConformalMetric<T> {
    pub c: T,
    pub power: T,
}

impl<T: Real> MetricSource<T> for ConformalMetric<T> {
    fn metric(&self, x: &Vec4<T>) -> Mat4<T> {
        let r2 = linalg::dot(x, x);
        let f = self.c * r2.powf(-self.power * T::lit(0.5));
        linalg::scale(&linalg::identity(), T::one() + f)
    }

    fn gradient(&self, x: &Vec4<T>) -> Option<[Mat4<T>; 4]> {
        // ∂_ℓ (c ρ^{−p}) = −p c ρ^{−p−2} x_ℓ
        let r2 = linalg::dot(x, x);
        let k = -self.power * self.c * r2.powf(-(self.power + T::lit(2.0)) * T::lit(0.5));
        let mut d = [linalg::zeros(); 4];
        for (l, m) in d.iter_mut().enumerate() {
            *m = linalg::scale(&linalg::identity(), k * x[l]);
        }
        Some(d)
    }

    fn has_gradient(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        if self.power == T::lit(2.0) {
            format!("conformal:c={}", self.c)
        } else {
            format!("conformal:c={},power={}", self.c, self.power)
        }
    }
}

/// Pull-back of a metric under the rotation `x ↦ R·x`:
/// `g'(x) = Rᵀ g(Rx) R`.
pub struct RotatedMetric<T: Real> {
    pub inner: Arc<dyn MetricSource<T>>,
    pub rotation: Mat4<T>,
}

impl<T: Real> MetricSource<T> for RotatedMetric<T> {
    fn metric(&self, x: &Vec4<T>) -> Mat4<T> {
        let r = &self.rotation;
        let y = linalg::matvec(r, x);
        let g = self.inner.metric(&y);
        linalg::matmul(&linalg::transpose(r), &linalg::matmul(&g, r))
    }

    fn gradient(&self, x: &Vec4<T>) -> Option<[Mat4<T>; 4]> {
        let r = &self.rotation;
        let y = linalg::matvec(r, x);
        let dg = self.inner.gradient(&y)?;
        let rt = linalg::transpose(r);
        let mut out = [linalg::zeros(); 4];
        for (l, o) in out.iter_mut().enumerate() {
            let mut acc = linalg::zeros();
            for (m, dgm) in dg.iter().enumerate() {
                acc = linalg::add(&acc, &linalg::scale(dgm, r[m][l]));
            }
            *o = linalg::matmul(&rt, &linalg::matmul(&acc, r));
        }
        Some(out)
    }

    fn has_gradient(&self) -> bool {
        self.inner.has_gradient()
    }

    fn label(&self) -> String {
        format!("rotated({})", self.inner.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> AsymptoticChart<f64> {
        AsymptoticChart::new(0.5, 1, 1.0).unwrap()
    }

    #[test]
    fn flat_metric_is_identity_with_zero_derivatives() {
        let f = MetricField::from_fn(chart(), "flat", |_| linalg::identity());
        let x = [0.3, -1.0, 2.0, 0.5];
        assert_eq!(eval_metric(&f, &x).unwrap(), linalg::identity());
        let d = metric_derivatives(&f, &x).unwrap();
        assert!(d.iter().all(|m| linalg::max_abs(m) == 0.0));
    }

    #[test]
    fn conformal_value_and_hand_derivative() {
        let f = MetricField::new(chart(), ConformalMetric { c: 1.0, power: 2.0 });
        let x = [1.0, 0.0, 0.0, 0.0];
        let g = eval_metric(&f, &x).unwrap();
        assert_eq!(g, linalg::scale(&linalg::identity(), 2.0));
        let d = metric_derivatives(&f, &x).unwrap();
        assert_eq!(d[0][0][0], -2.0);
        assert_eq!(d[1][0][0], 0.0);
        let fd = f.clone().with_mode(DerivativeMode::central_default());
        let dn = metric_derivatives(&fd, &x).unwrap();
        assert!((dn[0][0][0] + 2.0).abs() < 1e-7);
    }

    #[test]
    fn below_inner_radius_is_an_error() {
        let f = MetricField::new(chart(), ConformalMetric { c: 1.0, power: 2.0 });
        assert!(matches!(
            eval_metric(&f, &[0.1, 0.0, 0.0, 0.0]),
            Err(Error::BelowInnerRadius { .. })
        ));
    }

    #[test]
    fn non_finite_metric_is_reported() {
        let f = MetricField::from_fn(chart(), "nan", |_| [[f64::NAN; 4]; 4]);
        assert_eq!(
            eval_metric(&f, &[1.0, 0.0, 0.0, 0.0]),
            Err(Error::NonFinite("metric"))
        );
    }

    #[test]
    fn step_rule_clamps_at_min_step() {
        let m = DerivativeMode::<f64>::central_default();
        assert_eq!(m.step(1e3), 0.1);
        assert_eq!(m.step(1e-3), 1e-6);
    }
}
