use super::PerturbationSpec;
use crate::error::{Error, Result};
use crate::linalg::{self, Vec4};
use crate::scalar::Real;

/// C² smoothstep: 0 for `ρ ≤ c − 1.5`, 1 for `ρ ≥ c − 1`.
pub fn cutoff<T: Real>(rho: T, safety_radius: T) -> T {
    let lo = safety_radius - T::lit(1.5);
    let s = ((rho - lo) / T::lit(0.5)).max(T::zero()).min(T::one());
    s * s * s * (s * (s * T::lit(6.0) - T::lit(15.0)) + T::lit(10.0))
}

/// Solves `Ω_t X = θ`, i.e. `X ⌟ ω_t = −θ`, with one step of iterative
/// refinement. No cut-off.
pub fn moser_field_raw<T: Real>(spec: &PerturbationSpec<T>, x: &Vec4<T>, t: T) -> Result<Vec4<T>> {
    let rho = linalg::norm(x);
    if rho < spec.working_radius {
        return Err(Error::BelowInnerRadius {
            radius: rho.to_f64_lossy(),
            inner: spec.working_radius.to_f64_lossy(),
        });
    }
    let theta = spec.theta.eval(x)?;
    if theta.iter().all(|v| *v == T::zero()) {
        return Ok([T::zero(); 4]);
    }
    let w0 = linalg::standard_symplectic();
    let wt = linalg::lerp(&w0, &spec.omega.eval(x)?, t);
    let singular = || Error::Singular(format!("omega_t at radius {rho}, t = {t}"));
    let mut v = linalg::solve(&wt, &theta).ok_or_else(singular)?;
    let r = linalg::vsub(&theta, &linalg::matvec(&wt, &v));
    let dv = linalg::solve(&wt, &r).ok_or_else(singular)?;
    v = linalg::vadd(&v, &dv);
    let res = linalg::norm(&linalg::vsub(&linalg::matvec(&wt, &v), &theta));
    let scale = linalg::norm(&theta);
    if !(res <= T::lit(1e-12) * scale + T::min_positive_value()) {
        return Err(Error::Singular(format!(
            "residual {res} of the skew solve at radius {rho}"
        )));
    }
    Ok(v)
}

/// `X_t(x)` multiplied by the cut-off, so that it vanishes for
/// `ρ ≤ c − 1.5`.
pub fn moser_field<T: Real>(spec: &PerturbationSpec<T>, x: &Vec4<T>, t: T) -> Result<Vec4<T>> {
    let phi = cutoff(linalg::norm(x), spec.safety_radius);
    if phi == T::zero() {
        return Ok([T::zero(); 4]);
    }
    let v = moser_field_raw(spec, x, t)?;
    Ok(if phi == T::one() {
        v
    } else {
        linalg::vscale(&v, phi)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{AsymptoticChart, OneFormField, TwoFormField};
    use crate::moser::SpecConfig;

    fn constant_spec(theta: Vec4<f64>) -> PerturbationSpec<f64> {
        let chart = AsymptoticChart::new(1.0, 1, 1.0).unwrap();
        PerturbationSpec::new(
            TwoFormField::standard(chart.clone()),
            OneFormField::new(chart, "const", move |_| theta),
            2.0,
            3.5,
            1.0,
            &SpecConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn hand_solves() {
        let x = [5.0, 0.0, 0.0, 0.0];
        assert_eq!(
            moser_field(&constant_spec([1.0, 0.0, 0.0, 0.0]), &x, 0.3).unwrap(),
            [0.0, 1.0, 0.0, 0.0]
        );
        assert_eq!(
            moser_field(&constant_spec([0.0, 0.0, 1.0, 0.0]), &x, 0.7).unwrap(),
            [0.0, 0.0, 0.0, 1.0]
        );
        assert_eq!(
            moser_field(&constant_spec([0.0; 4]), &x, 0.5).unwrap(),
            [0.0; 4]
        );
    }

    #[test]
    fn cutoff_profile() {
        assert_eq!(cutoff(1.0, 3.0), 0.0);
        assert_eq!(cutoff(1.5, 3.0), 0.0);
        assert_eq!(cutoff(2.0, 3.0), 1.0);
        assert!((cutoff(1.75f64, 3.0) - 0.5).abs() < 1e-15);
        let x = [2.2, 0.0, 0.0, 0.0];
        let v = moser_field(&constant_spec([1.0, 0.0, 0.0, 0.0]), &x, 0.0).unwrap();
        assert!(v[1] > 0.0 && v[1] < 1.0);
    }
}
