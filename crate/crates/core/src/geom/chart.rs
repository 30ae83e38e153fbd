use crate::error::{Error, Result};
use crate::linalg::{vscale, Vec4};
use crate::numerics::SphereRule;
use crate::scalar::Real;

/// Exterior chart `ρ ≥ inner_radius` on `ℝ⁴` (or its quotient by a group of
/// order `group_order`) with declared fall-off exponent `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticChart<T> {
    pub dimension: usize,
    pub inner_radius: T,
    pub group_order: u32,
    pub falloff_epsilon: T,
}

impl<T: Real> AsymptoticChart<T> {
    pub fn new(inner_radius: T, group_order: u32, falloff_epsilon: T) -> Result<Self> {
        Self::with_dimension(4, inner_radius, group_order, falloff_epsilon)
    }

    pub fn with_dimension(
        dimension: usize,
        inner_radius: T,
        group_order: u32,
        falloff_epsilon: T,
    ) -> Result<Self> {
        if dimension != 4 {
            return Err(Error::InvalidChart(format!(
                "dimension must be 4, got {dimension}"
            )));
        }
        if !(inner_radius > T::zero()) || !inner_radius.is_finite() {
            return Err(Error::InvalidChart("inner radius must be positive".into()));
        }
        if group_order == 0 {
            return Err(Error::InvalidChart("group order must be at least 1".into()));
        }
        if !(falloff_epsilon > T::zero()) || !falloff_epsilon.is_finite() {
            return Err(Error::InvalidChart(
                "fall-off epsilon must be positive".into(),
            ));
        }
        Ok(Self {
            dimension,
            inner_radius,
            group_order,
            falloff_epsilon,
        })
    }

    pub fn check_point(&self, x: &Vec4<T>) -> Result<T> {
        let r = crate::linalg::norm(x);
        if !r.is_finite() {
            return Err(Error::NonFinite("point"));
        }
        if r < self.inner_radius {
            return Err(Error::BelowInnerRadius {
                radius: r.to_f64_lossy(),
                inner: self.inner_radius.to_f64_lossy(),
            });
        }
        Ok(r)
    }

    pub fn with_group_order(mut self, q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidChart("group order must be at least 1".into()));
        }
        self.group_order = q;
        Ok(self)
    }
}

/// Audit points: the nodes of a coarse sphere rule scaled to each radius.
pub fn audit_grid<T: Real>(radii: &[T], rule_order: usize) -> Vec<Vec4<T>> {
    let rule = SphereRule::<T>::product_gauss_legendre(rule_order);
    radii
        .iter()
        .flat_map(|&r| rule.nodes.iter().map(move |n| vscale(n, r)))
        .collect()
}
