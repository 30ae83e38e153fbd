//! The cohomological side of the mass: the blow-up mass formula, the
//! Penrose-type bound, intersection-form signatures and the numerical
//! ingredients (exceptional areas, scalar-curvature integrals) used to
//! compare it with the boundary integral.

mod area;
mod form;
mod model;
mod scalar_integral;

pub use area::{burns_cycle_integral, exceptional_area, AreaEstimate};
pub use form::{
    b_plus, determinant, ends_bound, ends_versus_ambient, signature, EndsCheck, IntersectionForm,
    Signature,
};
pub use model::{
    crosscheck_mass, crosscheck_mass_with, mass_formula, penrose_check, BlowupModel, Crosscheck,
    DivisorData, PenroseVerdict,
};
pub use scalar_integral::{
    scalar_volume_integral, scalar_volume_integral_of, ScalarIntegralConfig,
};
