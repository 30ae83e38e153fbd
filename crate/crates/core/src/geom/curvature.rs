use super::{metric_derivatives, DerivativeMode, MetricField};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat4, Vec4};
use crate::scalar::Real;

/// Relative step for pure second differences of `g`: larger than the
/// first-derivative step to keep round-off at `ε/h²` small.
const SECOND_REL_STEP: f64 = 2e-3;

/// `dd[l][m][j][k] = ∂_l ∂_m g_jk`.
///
/// Central differences of the analytic gradient when the field has one,
/// otherwise second differences of `g`.
pub fn second_derivatives<T: Real>(
    field: &MetricField<T>,
    x: &Vec4<T>,
) -> Result<[[Mat4<T>; 4]; 4]> {
    let rho = field.chart.check_point(x)?;
    let analytic =
        matches!(field.derivative_mode, DerivativeMode::Analytic) && field.source.has_gradient();
    let h = if analytic {
        field.derivative_mode.step(rho)
    } else {
        (rho * T::lit(SECOND_REL_STEP)).max(T::lit(1e-5))
    };
    if !(h > T::zero()) || rho + h == rho {
        return Err(Error::StepUnderflow(h.to_f64_lossy()));
    }
    if rho - h - h < field.chart.inner_radius {
        return Err(Error::BelowInnerRadius {
            radius: (rho - h - h).to_f64_lossy(),
            inner: field.chart.inner_radius.to_f64_lossy(),
        });
    }
    let shifted = |a: usize, sa: T, b: usize, sb: T| {
        let mut y = *x;
        y[a] = y[a] + sa;
        y[b] = y[b] + sb;
        y
    };
    let mut dd = [[linalg::zeros::<T>(); 4]; 4];
    if analytic {
        let grad = |y: &Vec4<T>| field.source.gradient(y).ok_or(Error::NonFinite("gradient"));
        // Fourth-order stencil (−f₂ + 8f₁ − 8f₋₁ + f₋₂)/12h.
        for l in 0..4 {
            let gp = grad(&shifted(l, h, l, T::zero()))?;
            let gm = grad(&shifted(l, -h, l, T::zero()))?;
            let gpp = grad(&shifted(l, h + h, l, T::zero()))?;
            let gmm = grad(&shifted(l, -h - h, l, T::zero()))?;
            for m in 0..4 {
                let inner = linalg::scale(&linalg::sub(&gp[m], &gm[m]), T::lit(8.0));
                let outer = linalg::sub(&gpp[m], &gmm[m]);
                dd[l][m] =
                    linalg::scale(&linalg::sub(&inner, &outer), T::one() / (T::lit(12.0) * h));
            }
        }
        // Symmetrise in (l, m).
        for l in 0..4 {
            for m in (l + 1)..4 {
                let avg = linalg::scale(&linalg::add(&dd[l][m], &dd[m][l]), T::lit(0.5));
                dd[l][m] = avg;
                dd[m][l] = avg;
            }
        }
    } else {
        let g0 = field.raw(x);
        for l in 0..4 {
            let gp = field.raw(&shifted(l, h, l, T::zero()));
            let gm = field.raw(&shifted(l, -h, l, T::zero()));
            let num = linalg::add(&linalg::sub(&gp, &linalg::scale(&g0, T::lit(2.0))), &gm);
            dd[l][l] = linalg::scale(&num, T::one() / (h * h));
            for m in (l + 1)..4 {
                let pp = field.raw(&shifted(l, h, m, h));
                let pm = field.raw(&shifted(l, h, m, -h));
                let mp = field.raw(&shifted(l, -h, m, h));
                let mm = field.raw(&shifted(l, -h, m, -h));
                let num = linalg::add(&linalg::sub(&pp, &pm), &linalg::sub(&mm, &mp));
                let v = linalg::scale(&num, T::one() / (T::lit(4.0) * h * h));
                dd[l][m] = v;
                dd[m][l] = v;
            }
        }
    }
    if dd.iter().flatten().any(|m| !linalg::is_finite(m)) {
        return Err(Error::NonFinite("second derivatives"));
    }
    Ok(dd)
}

/// Scalar curvature `s = g^{jk} R_jk` from the Christoffel symbols and their
/// derivatives.
pub fn scalar_curvature<T: Real>(field: &MetricField<T>, x: &Vec4<T>) -> Result<T> {
    let g = super::eval_metric(field, x)?;
    let dg = metric_derivatives(field, x)?;
    let ddg = second_derivatives(field, x)?;
    let gi = linalg::inverse(&g).ok_or_else(|| Error::Singular("metric".into()))?;
    let half = T::lit(0.5);

    // First-kind symbols [jk, p] = ½(∂_j g_pk + ∂_k g_pj − ∂_p g_jk) and
    // their derivatives.
    let mut first = [[[T::zero(); 4]; 4]; 4];
    let mut dfirst = [[[[T::zero(); 4]; 4]; 4]; 4];
    for j in 0..4 {
        for k in 0..4 {
            for p in 0..4 {
                first[p][j][k] = half * (dg[j][p][k] + dg[k][p][j] - dg[p][j][k]);
                for l in 0..4 {
                    dfirst[l][p][j][k] =
                        half * (ddg[l][j][p][k] + ddg[l][k][p][j] - ddg[l][p][j][k]);
                }
            }
        }
    }
    // ∂_l g^{ip} = −g^{ia} ∂_l g_ab g^{bp}
    let mut dgi = [linalg::zeros::<T>(); 4];
    for (l, d) in dgi.iter_mut().enumerate() {
        *d = linalg::scale(
            &linalg::matmul(&gi, &linalg::matmul(&dg[l], &gi)),
            -T::one(),
        );
    }
    let mut gamma = [[[T::zero(); 4]; 4]; 4];
    let mut dgamma = [[[[T::zero(); 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let mut s = T::zero();
                for p in 0..4 {
                    s = s + gi[i][p] * first[p][j][k];
                }
                gamma[i][j][k] = s;
                for l in 0..4 {
                    let mut s = T::zero();
                    for p in 0..4 {
                        s = s + dgi[l][i][p] * first[p][j][k] + gi[i][p] * dfirst[l][p][j][k];
                    }
                    dgamma[l][i][j][k] = s;
                }
            }
        }
    }
    let mut scal = T::zero();
    for j in 0..4 {
        for k in 0..4 {
            let mut r = T::zero();
            for i in 0..4 {
                r = r + dgamma[i][i][j][k] - dgamma[k][i][i][j];
                for p in 0..4 {
                    r = r + gamma[i][i][p] * gamma[p][j][k] - gamma[i][k][p] * gamma[p][i][j];
                }
            }
            scal = scal + gi[j][k] * r;
        }
    }
    if !scal.is_finite() {
        return Err(Error::NonFinite("scalar curvature"));
    }
    Ok(scal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{AsymptoticChart, CatalogPotential, KahlerMetric};

    fn chart() -> AsymptoticChart<f64> {
        AsymptoticChart::new(0.5, 1, 1.0).unwrap()
    }

    #[test]
    fn flat_is_zero() {
        let f = MetricField::from_fn(chart(), "flat", |_| linalg::identity());
        assert!(scalar_curvature(&f, &[1.0, 2.0, -0.5, 0.3]).unwrap().abs() < 1e-8);
    }

    #[test]
    fn round_sphere_chart_has_curvature_twelve() {
        // Stereographic unit S⁴: g = 4/(1+ρ²)² δ.
        let f = MetricField::from_fn(chart(), "s4", |x: &Vec4<f64>| {
            let r2 = linalg::dot(x, x);
            linalg::scale(&linalg::identity(), 4.0 / ((1.0 + r2) * (1.0 + r2)))
        });
        for x in [[0.7, 0.1, 0.0, 0.2], [1.0, -1.0, 0.5, 0.5]] {
            let s = scalar_curvature(&f, &x).unwrap();
            assert!((s - 12.0).abs() < 5e-4, "s = {s}");
        }
    }

    #[test]
    fn conformal_formula_matches() {
        // g = e^{2φ}δ in dimension 4: s = −6 e^{−2φ}(Δφ + |∇φ|²).
        // φ = ½ log(1 + ρ⁻²): with f = 1 + ρ⁻², Δφ and ∇φ by hand.
        let f = MetricField::new(chart(), crate::geom::ConformalMetric { c: 1.0, power: 2.0 });
        let x: [f64; 4] = [1.2, 0.4, -0.3, 0.9];
        let r2 = linalg::dot(&x, &x);
        let ff: f64 = 1.0 + 1.0 / r2;
        // φ(ρ) = ½ ln f, φ' = −ρ⁻³/f, Δφ = φ'' + 3φ'/ρ.
        let r = r2.sqrt();
        let fp = -2.0 / (r * r * r);
        let fpp = 6.0 / (r2 * r2);
        let phip = 0.5 * fp / ff;
        let phipp = 0.5 * (fpp / ff - fp * fp / (ff * ff));
        let want = -6.0 / ff * (phipp + 3.0 * phip / r + phip * phip);
        let got = scalar_curvature(&f, &x).unwrap();
        assert!(
            (got - want).abs() < 1e-7 * want.abs().max(1.0),
            "{got} vs {want}"
        );
        let got_fd =
            scalar_curvature(&f.clone().with_mode(DerivativeMode::central_default()), &x).unwrap();
        assert!(
            (got_fd - want).abs() < 1e-5 * want.abs().max(1.0),
            "{got_fd} vs {want}"
        );
    }

    #[test]
    fn scalar_flat_kahler_catalog() {
        for pot in [
            CatalogPotential::Burns { c: 0.5 },
            CatalogPotential::EguchiHanson { a: 1.0 },
        ] {
            let f = MetricField::new(chart(), KahlerMetric { potential: pot });
            for r in [2.0, 7.0, 40.0] {
                let x = linalg::vscale(&[0.5, 0.5, 0.5, 0.5], r);
                assert!(scalar_curvature(&f, &x).unwrap().abs() < 1e-6);
            }
        }
    }

    #[test]
    fn non_flat_kahler_potential_has_curvature() {
        // u = t + t²: not scalar-flat.
        struct P;
        impl crate::geom::RadialPotential<f64> for P {
            fn value(&self, t: f64) -> f64 {
                t + t * t
            }
            fn d1(&self, t: f64) -> f64 {
                1.0 + 2.0 * t
            }
            fn d2(&self, _t: f64) -> f64 {
                2.0
            }
            fn d3(&self, _t: f64) -> f64 {
                0.0
            }
            fn domain_floor(&self) -> f64 {
                0.0
            }
            fn label(&self) -> String {
                "quartic".into()
            }
        }
        let f = MetricField::new(chart(), KahlerMetric { potential: P });
        assert!(scalar_curvature(&f, &[1.0, 0.0, 0.0, 0.0]).unwrap().abs() > 1e-2);
    }
}
