use super::{AsymptoticChart, MetricSource, TwoFormField};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat4, Vec4};
use crate::scalar::Real;

/// Kähler potential `u(t)` depending only on `t = |z|² = ρ²`, with analytic
/// derivatives in `t`.
pub trait RadialPotential<T: Real>: Send + Sync {
    fn value(&self, t: T) -> T;
    fn d1(&self, t: T) -> T;
    fn d2(&self, t: T) -> T;
    fn d3(&self, t: T) -> T;
    /// Smallest admissible `t`.
    fn domain_floor(&self) -> T;
    fn label(&self) -> String;
}

/// Radial potentials shipped with the catalog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogPotential<T> {
    /// `u = t`.
    Flat,
    /// `u = t + c·log t`: scalar-flat on the blow-up of `ℂ²` at the origin,
    /// exceptional curve of area `π c`.
    Burns { c: T },
    /// `u = s + a²·log(t / (a² + s))`, `s = √(t² + a⁴)`: Ricci-flat on
    /// `T*S²`, asymptotic to `ℂ²/ℤ₂`. Gives `u' = s/t`.
    EguchiHanson { a: T },
}

impl<T: Real> RadialPotential<T> for CatalogPotential<T> {
    fn value(&self, t: T) -> T {
        match *self {
            CatalogPotential::Flat => t,
            CatalogPotential::Burns { c } => t + c * t.ln(),
            CatalogPotential::EguchiHanson { a } => {
                let a2 = a * a;
                let s = (t * t + a2 * a2).sqrt();
                s + a2 * (t / (a2 + s)).ln()
            }
        }
    }

    fn d1(&self, t: T) -> T {
        match *self {
            CatalogPotential::Flat => T::one(),
            CatalogPotential::Burns { c } => T::one() + c / t,
            CatalogPotential::EguchiHanson { a } => {
                let a4 = (a * a) * (a * a);
                (T::one() + a4 / (t * t)).sqrt()
            }
        }
    }

    fn d2(&self, t: T) -> T {
        match *self {
            CatalogPotential::Flat => T::zero(),
            CatalogPotential::Burns { c } => -c / (t * t),
            CatalogPotential::EguchiHanson { a } => {
                let a4 = (a * a) * (a * a);
                let s = (t * t + a4).sqrt();
                -a4 / (s * t * t)
            }
        }
    }

    fn d3(&self, t: T) -> T {
        match *self {
            CatalogPotential::Flat => T::zero(),
            CatalogPotential::Burns { c } => T::lit(2.0) * c / (t * t * t),
            CatalogPotential::EguchiHanson { a } => {
                let a4 = (a * a) * (a * a);
                let s = (t * t + a4).sqrt();
                a4 * (T::one() / (s * s * s * t) + T::lit(2.0) / (s * t * t * t))
            }
        }
    }

    fn domain_floor(&self) -> T {
        T::epsilon().sqrt()
    }

    fn label(&self) -> String {
        match self {
            CatalogPotential::Flat => "flat".into(),
            CatalogPotential::Burns { c } => format!("burns:c={c}"),
            CatalogPotential::EguchiHanson { a } => format!("eguchi_hanson:a={a}"),
        }
    }
}

/// `y = J₀x`.
fn rotate_j<T: Real>(x: &Vec4<T>) -> Vec4<T> {
    [-x[1], x[0], -x[3], x[2]]
}

fn check_floor<T: Real, P: RadialPotential<T> + ?Sized>(pot: &P, x: &Vec4<T>) -> Result<T> {
    let t = linalg::dot(x, x);
    if !t.is_finite() {
        return Err(Error::NonFinite("point"));
    }
    if t < pot.domain_floor() {
        return Err(Error::BelowDomainFloor {
            value: t.to_f64_lossy(),
            floor: pot.domain_floor().to_f64_lossy(),
        });
    }
    Ok(t)
}

/// Real metric of the Hermitian form `∂∂̄u`, `h_{αβ̄} = u'δ_{αβ} + u''z̄_α z_β`:
/// `g = u'·I + u''·(x xᵀ + y yᵀ)` with `y = J₀x`.
fn raw_metric<T: Real, P: RadialPotential<T> + ?Sized>(pot: &P, x: &Vec4<T>, t: T) -> Mat4<T> {
    let (d1, d2) = (pot.d1(t), pot.d2(t));
    let y = rotate_j(x);
    let mut g = linalg::zeros();
    for j in 0..4 {
        for k in 0..4 {
            g[j][k] = d2 * (x[j] * x[k] + y[j] * y[k]);
        }
        g[j][j] = g[j][j] + d1;
    }
    g
}

/// Real 4×4 metric induced by the radial potential at `x ∈ ℂ² ≅ ℝ⁴`.
pub fn kahler_metric_from_potential<T: Real, P: RadialPotential<T> + ?Sized>(
    pot: &P,
    x: &Vec4<T>,
) -> Result<Mat4<T>> {
    let t = check_floor(pot, x)?;
    let g = raw_metric(pot, x, t);
    if !linalg::is_finite(&g) {
        return Err(Error::NonFinite("kahler metric"));
    }
    if linalg::cholesky(&g).is_none() {
        return Err(Error::NotPositiveDefinite(t.sqrt().to_f64_lossy()));
    }
    Ok(g)
}

/// Kähler form `ω = g(J₀·,·)` as the antisymmetric matrix `Ω = J₀ᵀ g`.
pub fn kahler_form<T: Real, P: RadialPotential<T> + ?Sized>(
    pot: &P,
    x: &Vec4<T>,
) -> Result<Mat4<T>> {
    let g = kahler_metric_from_potential(pot, x)?;
    Ok(linalg::matmul(
        &linalg::transpose(&linalg::complex_structure()),
        &g,
    ))
}

/// The Kähler form of a radial potential as a two-form field,
/// `Ω = u'·J₀ᵀ + u''·(x yᵀ − y xᵀ)`.
pub fn kahler_form_field<T, P>(pot: P, chart: AsymptoticChart<T>) -> TwoFormField<T>
where
    T: Real,
    P: RadialPotential<T> + 'static,
{
    let label = format!("omega[{}]", pot.label());
    TwoFormField::new(chart, &label, move |x| {
        let t = linalg::dot(x, x);
        let (d1, d2) = (pot.d1(t), pot.d2(t));
        let y = rotate_j(x);
        let mut w = linalg::scale(&linalg::standard_symplectic(), d1);
        for j in 0..4 {
            for k in 0..4 {
                w[j][k] = w[j][k] + d2 * (x[j] * y[k] - y[j] * x[k]);
            }
        }
        w
    })
}

/// Metric source backed by a radial potential, with analytic derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KahlerMetric<P> {
    pub potential: P,
}

impl<T: Real, P: RadialPotential<T>> MetricSource<T> for KahlerMetric<P> {
    fn metric(&self, x: &Vec4<T>) -> Mat4<T> {
        raw_metric(&self.potential, x, linalg::dot(x, x))
    }

    fn gradient(&self, x: &Vec4<T>) -> Option<[Mat4<T>; 4]> {
        // ∂_m g = 2x_m [u''·I + u'''·(xxᵀ + yyᵀ)] + u''·∂_m(xxᵀ + yyᵀ),
        // ∂_m y_j = J_jm.
        let t = linalg::dot(x, x);
        let (d2, d3) = (self.potential.d2(t), self.potential.d3(t));
        let y = rotate_j(x);
        let jm = linalg::complex_structure::<T>();
        let two = T::lit(2.0);
        let mut out = [linalg::zeros(); 4];
        for (m, dm) in out.iter_mut().enumerate() {
            for j in 0..4 {
                for k in 0..4 {
                    let p = x[j] * x[k] + y[j] * y[k];
                    let dp = (if j == m { x[k] } else { T::zero() })
                        + (if k == m { x[j] } else { T::zero() })
                        + jm[j][m] * y[k]
                        + y[j] * jm[k][m];
                    let diag = if j == k { d2 } else { T::zero() };
                    dm[j][k] = two * x[m] * (diag + d3 * p) + d2 * dp;
                }
            }
        }
        Some(out)
    }

    fn has_gradient(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        self.potential.label()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_potential_gives_identity_and_standard_form() {
        let p = CatalogPotential::<f64>::Flat;
        let x = [0.3, 1.2, -0.7, 2.0];
        assert_eq!(
            kahler_metric_from_potential(&p, &x).unwrap(),
            linalg::identity()
        );
        assert_eq!(kahler_form(&p, &x).unwrap(), linalg::standard_symplectic());
    }

    #[test]
    fn burns_at_unit_point_by_hand() {
        // t = 1: eigenvalue 1 on span{x, Jx}, 1 + c on its complement.
        let c = 0.5;
        let g = kahler_metric_from_potential(&CatalogPotential::Burns { c }, &[1.0, 0.0, 0.0, 0.0])
            .unwrap();
        let want = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.5, 0.0],
            [0.0, 0.0, 0.0, 1.5],
        ];
        assert!(linalg::max_abs(&linalg::sub(&g, &want)) < 1e-15);
    }

    #[test]
    fn eguchi_hanson_derivatives_match_difference_quotients() {
        let p = CatalogPotential::EguchiHanson { a: 1.3f64 };
        for t in [0.5, 2.0, 10.0] {
            let h = 1e-5 * t;
            let fd1 = (p.value(t + h) - p.value(t - h)) / (2.0 * h);
            let fd2 = (p.d1(t + h) - p.d1(t - h)) / (2.0 * h);
            let fd3 = (p.d2(t + h) - p.d2(t - h)) / (2.0 * h);
            assert!((fd1 - p.d1(t)).abs() < 1e-8 * p.d1(t).abs().max(1.0));
            assert!((fd2 - p.d2(t)).abs() < 1e-7 * p.d2(t).abs().max(1e-3));
            assert!((fd3 - p.d3(t)).abs() < 1e-6 * p.d3(t).abs().max(1e-3));
        }
    }

    #[test]
    fn eguchi_hanson_is_unimodular() {
        // det h = u'(u' + t u'') = 1 is the Ricci-flat condition.
        let p = CatalogPotential::EguchiHanson { a: 1.0f64 };
        for x in [[1.1, 0.2, 0.0, 0.4], [3.0, -1.0, 2.0, 0.5]] {
            let g = kahler_metric_from_potential(&p, &x).unwrap();
            assert!((linalg::determinant(&g) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn form_field_matches_j_times_metric() {
        let p = CatalogPotential::Burns { c: 0.3f64 };
        let chart = AsymptoticChart::new(0.5, 1, 1.0).unwrap();
        let w = kahler_form_field(p, chart);
        let x = [0.4, 0.9, -1.1, 0.2];
        let direct = kahler_form(&p, &x).unwrap();
        assert!(linalg::max_abs(&linalg::sub(&w.eval(&x).unwrap(), &direct)) < 1e-15);
    }

    #[test]
    fn scaling_the_potential_scales_the_metric() {
        struct Scaled(f64, CatalogPotential<f64>);
        impl RadialPotential<f64> for Scaled {
            fn value(&self, t: f64) -> f64 {
                self.0 * self.1.value(t)
            }
            fn d1(&self, t: f64) -> f64 {
                self.0 * self.1.d1(t)
            }
            fn d2(&self, t: f64) -> f64 {
                self.0 * self.1.d2(t)
            }
            fn d3(&self, t: f64) -> f64 {
                self.0 * self.1.d3(t)
            }
            fn domain_floor(&self) -> f64 {
                self.1.domain_floor()
            }
            fn label(&self) -> String {
                "scaled".into()
            }
        }
        let base = CatalogPotential::Burns { c: 0.3 };
        let x = [0.4, 0.9, -1.1, 0.2];
        let g = kahler_metric_from_potential(&base, &x).unwrap();
        let g3 = kahler_metric_from_potential(&Scaled(3.0, base), &x).unwrap();
        assert!(linalg::max_abs(&linalg::sub(&g3, &linalg::scale(&g, 3.0))) < 1e-14);
    }

    #[test]
    fn floor_and_definiteness_errors() {
        let p = CatalogPotential::Burns { c: 0.5f64 };
        assert!(matches!(
            kahler_metric_from_potential(&p, &[0.0; 4]),
            Err(Error::BelowDomainFloor { .. })
        ));
        // c < 0 makes u' negative for t < |c|.
        let bad = CatalogPotential::Burns { c: -1.0f64 };
        assert!(matches!(
            kahler_metric_from_potential(&bad, &[0.5, 0.0, 0.0, 0.0]),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        for pot in [
            CatalogPotential::Burns { c: 0.7f64 },
            CatalogPotential::EguchiHanson { a: 1.0 },
        ] {
            let m = KahlerMetric { potential: pot };
            let x = [1.3, -0.4, 0.8, 2.1];
            let d = m.gradient(&x).unwrap();
            let h = 1e-5;
            for l in 0..4 {
                let mut xp = x;
                let mut xm = x;
                xp[l] += h;
                xm[l] -= h;
                let fd = linalg::scale(&linalg::sub(&m.metric(&xp), &m.metric(&xm)), 0.5 / h);
                assert!(
                    linalg::max_abs(&linalg::sub(&fd, &d[l])) < 1e-8,
                    "{pot:?} l={l}"
                );
            }
        }
    }
}
