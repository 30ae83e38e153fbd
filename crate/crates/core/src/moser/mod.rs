//! Moser's stability argument as a numerical experiment: given a closed
//! form `ω = ω₀ + dθ` close to the standard symplectic form at infinity,
//! flow along `X_t` with `X_t ⌟ ω_t = −θ`, `ω_t = (1−t)ω₀ + tω`, to obtain
//! `Φ` with `Φ*ω = ω₀` and measure how fast `Φ` approaches the identity.

mod field;
mod flow;
mod primitive;
mod spec;

pub use field::{cutoff, moser_field, moser_field_raw};
pub use flow::{
    convergence_order, equivariance_defect, falloff_fit, integrate_flow, integrate_flow_range,
    pullback_residual, FlowFalloff, FlowMap, FlowSample,
};
pub use primitive::{radial_primitive, radial_primitive_with};
pub use spec::{
    burns_spec, radial_spec, synthetic_spec, PerturbationSpec, PowerLawPotential, SpecConfig,
};
