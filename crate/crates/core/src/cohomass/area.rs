use serde::Serialize;

use crate::error::Result;
use crate::geom::{kahler_form, RadialPotential};
use crate::linalg::{self, Vec4};
use crate::numerics::{compensated_sum, fit_power_law, GaussLegendre};
use crate::scalar::Real;

/// `∫ ω` over the disc `{(ρ cosχ e^{iφ}, ρ sinχ) : χ ∈ [0, π/2]}`.
///
/// As `ρ → 0` these discs converge to the exceptional curve of a blow-up
/// potential (the lines through the origin), so the integral tends to its
/// area. For the flat potential the value is `πρ²`.
pub fn burns_cycle_integral<T: Real, P: RadialPotential<T> + ?Sized>(
    pot: &P,
    rho: T,
    n: usize,
) -> Result<T> {
    let chi = GaussLegendre::<T>::new(n).on_interval(T::zero(), T::FRAC_PI_2());
    let phi = GaussLegendre::<T>::new(2 * n).on_interval(T::zero(), T::PI() + T::PI());
    let mut terms = Vec::with_capacity(chi.len() * phi.len());
    for &(c, wc) in &chi {
        let (sc, cc) = c.sin_cos();
        for &(p, wp) in &phi {
            let (sp, cp) = p.sin_cos();
            let x: Vec4<T> = [rho * cc * cp, rho * cc * sp, rho * sc, T::zero()];
            let d_phi: Vec4<T> = [-rho * cc * sp, rho * cc * cp, T::zero(), T::zero()];
            let d_chi: Vec4<T> = [-rho * sc * cp, -rho * sc * sp, rho * cc, T::zero()];
            let w = kahler_form(pot, &x)?;
            terms.push(wc * wp * linalg::dot(&d_phi, &linalg::matvec(&w, &d_chi)));
        }
    }
    Ok(compensated_sum(terms))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaEstimate<T> {
    pub radii: Vec<T>,
    pub values: Vec<T>,
    /// Extrapolated `ρ → 0` limit.
    pub area: T,
    /// Fitted `κ` in `value ≈ area + A·ρ^κ`.
    pub exponent: T,
    pub residual: T,
}

/// Area of the exceptional curve as the `ρ → 0` limit of
/// [`burns_cycle_integral`].
pub fn exceptional_area<T: Real, P: RadialPotential<T> + ?Sized>(
    pot: &P,
    radii: &[T],
    n: usize,
) -> Result<AreaEstimate<T>> {
    let values = radii
        .iter()
        .map(|&r| burns_cycle_integral(pot, r, n))
        .collect::<Result<Vec<_>>>()?;
    let inv: Vec<T> = radii.iter().map(|r| r.recip()).collect();
    let fit = fit_power_law(&inv, &values, T::lit(2.0), T::lit(1e-10))?;
    Ok(AreaEstimate {
        radii: radii.to_vec(),
        values,
        area: fit.limit,
        exponent: fit.exponent,
        residual: fit.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::CatalogPotential;
    use std::f64::consts::PI;

    #[test]
    fn flat_disc_has_euclidean_area() {
        let v = burns_cycle_integral(&CatalogPotential::<f64>::Flat, 2.0, 16).unwrap();
        assert!((v - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn burns_area_is_pi_c() {
        let c = 0.5;
        let est = exceptional_area(
            &CatalogPotential::Burns { c },
            &[0.4, 0.2, 0.1, 0.05, 0.025],
            24,
        )
        .unwrap();
        assert!((est.area - PI * c).abs() < 1e-9, "{}", est.area);
    }
}
