use std::fmt;
use std::sync::Arc;

use super::AsymptoticChart;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat4, Vec4};
use crate::scalar::Real;

type TwoFormFn<T> = dyn Fn(&Vec4<T>) -> Mat4<T> + Send + Sync;
type OneFormFn<T> = dyn Fn(&Vec4<T>) -> Vec4<T> + Send + Sync;

/// Relative finite-difference step for exterior derivatives.
const REL_STEP: f64 = 1e-4;
const MIN_STEP: f64 = 1e-6;

fn fd_step<T: Real>(chart: &AsymptoticChart<T>, x: &Vec4<T>) -> Result<T> {
    let rho = chart.check_point(x)?;
    let h = (rho * T::lit(REL_STEP)).max(T::lit(MIN_STEP));
    if rho - h < chart.inner_radius {
        return Err(Error::BelowInnerRadius {
            radius: (rho - h).to_f64_lossy(),
            inner: chart.inner_radius.to_f64_lossy(),
        });
    }
    Ok(h)
}

/// A two-form `ω = Σ_{j<k} Ω_jk dx^j∧dx^k`, stored as the antisymmetric
/// matrix `Ω_jk = ω(∂_j, ∂_k)`.
#[derive(Clone)]
pub struct TwoFormField<T: Real> {
    pub chart: AsymptoticChart<T>,
    pub label: String,
    pub closedness_certified: bool,
    eval: Arc<TwoFormFn<T>>,
}

impl<T: Real> fmt::Debug for TwoFormField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoFormField")
            .field("label", &self.label)
            .field("chart", &self.chart)
            .field("closedness_certified", &self.closedness_certified)
            .finish()
    }
}

impl<T: Real> TwoFormField<T> {
    pub fn new<F>(chart: AsymptoticChart<T>, label: &str, f: F) -> Self
    where
        F: Fn(&Vec4<T>) -> Mat4<T> + Send + Sync + 'static,
    {
        Self {
            chart,
            label: label.to_string(),
            closedness_certified: false,
            eval: Arc::new(f),
        }
    }

    /// Same form on a different chart. Closedness must be re-certified.
    pub fn with_chart(self, chart: AsymptoticChart<T>) -> Self {
        Self {
            chart,
            closedness_certified: false,
            ..self
        }
    }

    /// The constant form `ω₀ = dx¹∧dx² + dx³∧dx⁴`.
    pub fn standard(chart: AsymptoticChart<T>) -> Self {
        let mut w = Self::new(chart, "omega0", |_| linalg::standard_symplectic());
        w.closedness_certified = true;
        w
    }

    pub fn zero(chart: AsymptoticChart<T>) -> Self {
        let mut w = Self::new(chart, "zero", |_| linalg::zeros());
        w.closedness_certified = true;
        w
    }

    pub fn eval(&self, x: &Vec4<T>) -> Result<Mat4<T>> {
        self.chart.check_point(x)?;
        let w = (self.eval)(x);
        if !linalg::is_finite(&w) {
            return Err(Error::NonFinite("two-form"));
        }
        Ok(w)
    }

    pub(crate) fn raw(&self, x: &Vec4<T>) -> Mat4<T> {
        (self.eval)(x)
    }

    /// `ω − ω₀`. Closedness carries over.
    pub fn minus_standard(&self) -> Self {
        let inner = self.eval.clone();
        let mut out = Self::new(
            self.chart.clone(),
            &format!("{}-omega0", self.label),
            move |x| linalg::sub(&inner(x), &linalg::standard_symplectic()),
        );
        out.closedness_certified = self.closedness_certified;
        out
    }

    /// Components `(dω)_{ijk} = ∂_iΩ_jk + ∂_jΩ_ki + ∂_kΩ_ij` for `i<j<k`, in
    /// the order `(012, 013, 023, 123)`, by central differences.
    pub fn exterior_derivative(&self, x: &Vec4<T>) -> Result<[T; 4]> {
        let h = fd_step(&self.chart, x)?;
        let mut d = [linalg::zeros::<T>(); 4];
        for (l, dl) in d.iter_mut().enumerate() {
            let mut xp = *x;
            let mut xm = *x;
            xp[l] = xp[l] + h;
            xm[l] = xm[l] - h;
            *dl = linalg::scale(
                &linalg::sub(&self.raw(&xp), &self.raw(&xm)),
                T::one() / (h + h),
            );
        }
        let c = |i: usize, j: usize, k: usize| d[i][j][k] + d[j][k][i] + d[k][i][j];
        let out = [c(0, 1, 2), c(0, 1, 3), c(0, 2, 3), c(1, 2, 3)];
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("exterior derivative"));
        }
        Ok(out)
    }

    /// Largest `|dω|` component over `points`.
    pub fn closure_defect(&self, points: &[Vec4<T>]) -> Result<T> {
        let mut worst = T::zero();
        for x in points {
            let d = self.exterior_derivative(x)?;
            worst = d.iter().fold(worst, |m, v| m.max(v.abs()));
        }
        Ok(worst)
    }

    /// Runs the finite-difference closedness check and sets
    /// `closedness_certified` when the defect is at most `tol`. Returns the
    /// defect.
    pub fn certify_closed(&mut self, points: &[Vec4<T>], tol: T) -> Result<T> {
        let defect = self.closure_defect(points)?;
        self.closedness_certified = defect <= tol;
        Ok(defect)
    }
}

/// A one-form `θ = Σ θ_k dx^k`.
#[derive(Clone)]
pub struct OneFormField<T: Real> {
    pub chart: AsymptoticChart<T>,
    pub label: String,
    eval: Arc<OneFormFn<T>>,
}

impl<T: Real> fmt::Debug for OneFormField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OneFormField")
            .field("label", &self.label)
            .field("chart", &self.chart)
            .finish()
    }
}

impl<T: Real> OneFormField<T> {
    pub fn new<F>(chart: AsymptoticChart<T>, label: &str, f: F) -> Self
    where
        F: Fn(&Vec4<T>) -> Vec4<T> + Send + Sync + 'static,
    {
        Self {
            chart,
            label: label.to_string(),
            eval: Arc::new(f),
        }
    }

    pub fn with_chart(self, chart: AsymptoticChart<T>) -> Self {
        Self { chart, ..self }
    }

    pub fn zero(chart: AsymptoticChart<T>) -> Self {
        Self::new(chart, "zero", |_| [T::zero(); 4])
    }

    pub fn eval(&self, x: &Vec4<T>) -> Result<Vec4<T>> {
        self.chart.check_point(x)?;
        let v = (self.eval)(x);
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("one-form"));
        }
        Ok(v)
    }

    pub(crate) fn raw(&self, x: &Vec4<T>) -> Vec4<T> {
        (self.eval)(x)
    }

    /// `(dθ)_jk = ∂_jθ_k − ∂_kθ_j` by central differences.
    pub fn exterior_derivative(&self, x: &Vec4<T>) -> Result<Mat4<T>> {
        let h = fd_step(&self.chart, x)?;
        let mut grad = linalg::zeros::<T>();
        for (j, row) in grad.iter_mut().enumerate() {
            let mut xp = *x;
            let mut xm = *x;
            xp[j] = xp[j] + h;
            xm[j] = xm[j] - h;
            let (p, m) = (self.raw(&xp), self.raw(&xm));
            for k in 0..4 {
                row[k] = (p[k] - m[k]) / (h + h);
            }
        }
        let d = linalg::sub(&grad, &linalg::transpose(&grad));
        if !linalg::is_finite(&d) {
            return Err(Error::NonFinite("exterior derivative"));
        }
        Ok(d)
    }
}
