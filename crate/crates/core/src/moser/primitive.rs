use crate::error::{Error, Result};
use crate::geom::{audit_grid, OneFormField, TwoFormField};
use crate::linalg::{self, Vec4};
use crate::numerics::adaptive_simpson;
use crate::scalar::Real;

/// `ψ = ∫_{ρ₀}^{ρ} φ_r dr` with `φ_r = ∂_r ⌟ δω` restricted to the sphere
/// of radius `r`, extended to `ℝ⁴ ∖ B` with no radial component:
///
/// `ψ_k(x) = (1/ρ) ∫_{ρ₀}^{ρ} r·x̂^j δΩ_jk(r x̂) dr`.
///
/// `dψ = δω` holds only when the closed form left over on the sphere
/// vanishes; the result is checked on an audit grid and rejected otherwise.
pub fn radial_primitive<T: Real>(
    delta_omega: &TwoFormField<T>,
    rho0: T,
) -> Result<OneFormField<T>> {
    let b = rho0.max(delta_omega.chart.inner_radius * T::lit(1.01));
    let radii: Vec<T> = (0..5).map(|j| b * T::lit(1.1 * 2f64.powi(j))).collect();
    radial_primitive_with(delta_omega, rho0, &audit_grid(&radii, 3), T::lit(1e-6))
}

pub fn radial_primitive_with<T: Real>(
    delta_omega: &TwoFormField<T>,
    rho0: T,
    audit: &[Vec4<T>],
    tol: T,
) -> Result<OneFormField<T>> {
    if !delta_omega.closedness_certified {
        return Err(Error::InvalidPerturbation(
            "delta omega must be certified closed".into(),
        ));
    }
    if !(rho0 >= delta_omega.chart.inner_radius) {
        return Err(Error::InvalidPerturbation(format!(
            "rho0 = {rho0} lies inside the chart inner radius"
        )));
    }
    let dw = delta_omega.clone();
    let simpson_tol = T::lit(1e-10);
    let psi = OneFormField::new(
        delta_omega.chart.clone(),
        &format!("psi[{}]", delta_omega.label),
        move |x| {
            let rho = linalg::norm(x);
            let u = linalg::vscale(x, rho.recip());
            let integrand = |r: T| -> [T; 4] {
                let w = dw.raw(&linalg::vscale(&u, r));
                let mut out = [T::zero(); 4];
                for (k, o) in out.iter_mut().enumerate() {
                    *o = r * (0..4).fold(T::zero(), |s, j| s + u[j] * w[j][k]);
                }
                out
            };
            let v = adaptive_simpson(&integrand, rho0, rho, simpson_tol, 40);
            linalg::vscale(&v, rho.recip())
        },
    );
    let mut residual = T::zero();
    for x in audit {
        let d = psi.exterior_derivative(x)?;
        let w = delta_omega.eval(x)?;
        residual = residual.max(linalg::max_abs(&linalg::sub(&d, &w)));
    }
    if !(residual <= tol) {
        return Err(Error::PrimitiveResidual {
            residual: residual.to_f64_lossy(),
            tol: tol.to_f64_lossy(),
        });
    }
    Ok(psi)
}
