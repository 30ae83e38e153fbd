use rayon::prelude::*;

use super::{compensated_sum, GaussLegendre};
use crate::linalg::Vec4;
use crate::scalar::Real;

/// Product Gauss–Legendre rule on the unit 3-sphere.
///
/// Hyperspherical angles `ψ, θ ∈ [0, π]`, `φ ∈ [0, 2π]` with node counts
/// `(n, n, 2n)`; the weights absorb the area element `sin²ψ sinθ`.
#[derive(Debug, Clone)]
pub struct SphereRule<T> {
    pub nodes: Vec<Vec4<T>>,
    pub weights: Vec<T>,
    pub order: usize,
}

impl<T: Real> SphereRule<T> {
    pub fn product_gauss_legendre(n: usize) -> Self {
        assert!(n >= 1, "sphere rule needs n >= 1");
        let polar = GaussLegendre::<T>::new(n);
        let azim = GaussLegendre::<T>::new(2 * n);
        let psi = polar.on_interval(T::zero(), T::PI());
        let theta = psi.clone();
        let phi = azim.on_interval(T::zero(), T::lit(2.0) * T::PI());
        let mut nodes = Vec::with_capacity(psi.len() * theta.len() * phi.len());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for &(a, wa) in &psi {
            let (sa, ca) = a.sin_cos();
            for &(b, wb) in &theta {
                let (sb, cb) = b.sin_cos();
                for &(c, wc) in &phi {
                    let (sc, cc) = c.sin_cos();
                    nodes.push([ca, sa * cb, sa * sb * cc, sa * sb * sc]);
                    weights.push(wa * wb * wc * sa * sa * sb);
                }
            }
        }
        Self {
            nodes,
            weights,
            order: n,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> T {
        compensated_sum(self.weights.iter().copied())
    }

    /// `∫_{S³} f dσ`, summed in node order.
    pub fn integrate<F: Fn(&Vec4<T>) -> T>(&self, f: F) -> T {
        compensated_sum(self.nodes.iter().zip(&self.weights).map(|(x, &w)| w * f(x)))
    }

    /// Fallible integral with node evaluations in parallel. Values are
    /// collected before a sequential compensated sum, so the result does not
    /// depend on the thread count.
    pub fn try_integrate_par<E, F>(&self, f: F) -> Result<T, E>
    where
        E: Send,
        F: Fn(&Vec4<T>) -> Result<T, E> + Sync,
    {
        let vals: Vec<T> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(x, &w)| f(x).map(|v| w * v))
            .collect::<Result<_, E>>()?;
        Ok(compensated_sum(vals))
    }
}
