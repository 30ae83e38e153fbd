use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Cohomological data of an ALE Kähler surface in the basis of exceptional
/// classes `[E_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupModel<T> {
    /// `∫_{E_i} ω`; the generator count is `areas.len()`.
    pub areas: Vec<T>,
    /// `⟨♣(c₁), [ω]⟩`.
    pub chern_pairing: T,
    /// `∫_M s dμ`.
    pub scalar_integral: T,
}

impl<T: Real> BlowupModel<T> {
    pub fn new(areas: Vec<T>, chern_pairing: T, scalar_integral: T) -> Result<Self> {
        let m = Self {
            areas,
            chern_pairing,
            scalar_integral,
        };
        m.validate()?;
        Ok(m)
    }

    /// Blow-up of `ℂ²` at `k` points, where `♣(−c₁) = Σ[E_i]` and so the
    /// pairing is `−Σ areas`.
    pub fn ae_blowup(areas: Vec<T>, scalar_integral: T) -> Result<Self> {
        let pairing = -areas.iter().copied().sum::<T>();
        Self::new(areas, pairing, scalar_integral)
    }

    pub fn k(&self) -> usize {
        self.areas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self
            .areas
            .iter()
            .find(|a| !(**a > T::zero()) || !a.is_finite())
        {
            return Err(Error::InvalidModel(format!(
                "areas must be positive and finite, got {a}"
            )));
        }
        if !self.chern_pairing.is_finite() || !self.scalar_integral.is_finite() {
            return Err(Error::InvalidModel(
                "pairing and scalar integral must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// `m = −⟨♣(c₁),[ω]⟩/(3π) + ∫s dμ/(12π²)`.
pub fn mass_formula<T: Real>(model: &BlowupModel<T>) -> Result<T> {
    model.validate()?;
    let pi = T::PI();
    Ok(
        -model.chern_pairing / (T::lit(3.0) * pi)
            + model.scalar_integral / (T::lit(12.0) * pi * pi),
    )
}

/// Effective divisor `Σ n_j D_j` by multiplicity and volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisorData<T> {
    pub components: Vec<(u32, T)>,
}

impl<T: Real> DivisorData<T> {
    pub fn new(components: Vec<(u32, T)>) -> Result<Self> {
        for &(n, v) in &components {
            if n < 1 {
                return Err(Error::InvalidModel(
                    "multiplicities must be at least 1".into(),
                ));
            }
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "volumes must be positive, got {v}"
                )));
            }
        }
        Ok(Self { components })
    }

    /// `Σ n_j Vol(D_j)`.
    pub fn weighted_volume(&self) -> T {
        self.components
            .iter()
            .map(|&(n, v)| T::from_usize_lossy(n as usize) * v)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenroseVerdict<T> {
    pub lower_bound: T,
    pub satisfied: bool,
    pub gap: T,
}

/// `m ≥ Σ n_j Vol(D_j)/(3π)`, with `eq_tol` slack.
pub fn penrose_check<T: Real>(mass: T, divisors: &DivisorData<T>, eq_tol: T) -> PenroseVerdict<T> {
    let lower_bound = divisors.weighted_volume() / (T::lit(3.0) * T::PI());
    let gap = mass - lower_bound;
    PenroseVerdict {
        lower_bound,
        satisfied: mass.is_finite() && mass >= lower_bound - eq_tol,
        gap,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crosscheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub rel_err: T,
    pub pass: bool,
}

/// Relative comparison with the default `1e-2` tolerance and a `1e-6`
/// absolute floor for values that vanish.
pub fn crosscheck_mass<T: Real>(lhs: T, rhs: T) -> Crosscheck<T> {
    crosscheck_mass_with(lhs, rhs, T::lit(1e-2), T::lit(1e-6))
}

pub fn crosscheck_mass_with<T: Real>(lhs: T, rhs: T, tol: T, abs_floor: T) -> Crosscheck<T> {
    let diff = (lhs - rhs).abs();
    let scale = lhs.abs().max(rhs.abs());
    let rel_err = if scale > T::zero() {
        diff / scale
    } else {
        T::zero()
    };
    let pass = lhs.is_finite() && rhs.is_finite() && (rel_err <= tol || diff <= abs_floor);
    Crosscheck {
        lhs,
        rhs,
        rel_err,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn formula_examples() {
        let flat = BlowupModel::ae_blowup(vec![], 0.0).unwrap();
        assert_eq!(mass_formula(&flat).unwrap(), 0.0);
        let one = BlowupModel::ae_blowup(vec![PI], 0.0).unwrap();
        assert!((mass_formula(&one).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let two = BlowupModel::ae_blowup(vec![PI, 2.0 * PI], 12.0 * PI * PI).unwrap();
        assert!((mass_formula(&two).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(two.k(), 2);
        assert_eq!(two.chern_pairing, -3.0 * PI);
    }

    #[test]
    fn invalid_models() {
        assert!(BlowupModel::ae_blowup(vec![0.0], 0.0).is_err());
        assert!(BlowupModel::new(vec![1.0], f64::NAN, 0.0).is_err());
        assert!(DivisorData::new(vec![(0, 1.0)]).is_err());
        assert!(DivisorData::new(vec![(1, -1.0)]).is_err());
    }

    #[test]
    fn penrose_examples() {
        let d = DivisorData::new(vec![(1, PI)]).unwrap();
        let v = penrose_check(1.0 / 3.0, &d, 1e-6);
        assert!(v.satisfied && v.gap.abs() < 1e-15);
        let v = penrose_check(2.0, &d, 1e-6);
        assert!(v.satisfied && (v.gap - (2.0 - 1.0 / 3.0)).abs() < 1e-15);
        assert!(!penrose_check(0.0, &d, 1e-6).satisfied);
    }

    #[test]
    fn crosscheck_behaviour() {
        assert!(crosscheck_mass(0.0, 0.0).pass);
        assert!(crosscheck_mass(0.1667, 1.0 / 6.0).pass);
        assert!(!crosscheck_mass(0.18, 1.0 / 6.0).pass);
        assert!(crosscheck_mass(3e-7, -2e-7).pass);
    }
}
