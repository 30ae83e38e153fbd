//! Numerical and exact tools for the mass of asymptotically locally Euclidean
//! Kähler surfaces.
//!
//! The floating-point side ([`geom`], [`mass`], [`moser`] and the numeric
//! parts of [`cohomass`]) is generic over [`Real`], implemented for `f32` and
//! `f64`. The combinatorial side ([`hj`] and the signature computations in
//! [`cohomass`]) works over exact rationals ([`Rational`]).
//!
//! Concrete `f64` aliases for the common types are exported at the crate root.

// `!(x > 0)` rejects NaN as well; index loops mirror the matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cohomass;
pub mod error;
pub mod geom;
pub mod hj;
pub mod linalg;
pub mod mass;
pub mod moser;
pub mod numerics;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Arbitrary-precision rational used by every exact computation.
pub type Rational = num_rational::BigRational;

pub type Point = linalg::Vec4<f64>;
pub type Mat4 = linalg::Mat4<f64>;
pub type AsymptoticChart = geom::AsymptoticChart<f64>;
pub type MetricField = geom::MetricField<f64>;
pub type TwoFormField = geom::TwoFormField<f64>;
pub type OneFormField = geom::OneFormField<f64>;
pub type CatalogPotential = geom::CatalogPotential<f64>;
pub type QuadratureRule = numerics::SphereRule<f64>;
pub type MassEstimate = mass::MassEstimate<f64>;
pub type PerturbationSpec = moser::PerturbationSpec<f64>;
pub type FlowMap = moser::FlowMap<f64>;
