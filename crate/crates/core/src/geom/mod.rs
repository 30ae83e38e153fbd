//! Asymptotic charts, metric and form fields on `ℝ⁴ ∖ B`, radial Kähler
//! potentials and curvature.
//!
//! Points are always Cartesian coordinates `(x¹, x², x³, x⁴)` of the fixed
//! asymptotic chart, identified with `ℂ²` via `z₁ = x¹ + i x²`,
//! `z₂ = x³ + i x⁴`. A quotient by a finite group `Γ ⊂ U(2)` is represented by
//! the invariant field on the cover together with `|Γ|`.

mod catalog;
mod chart;
mod curvature;
mod falloff;
mod forms;
mod metric;
mod potential;

pub use catalog::{curvature_gate, gate_radii, CatalogEntry, GateReport, MetricKind, MetricSpec};
pub use chart::{audit_grid, AsymptoticChart};
pub use curvature::{scalar_curvature, second_derivatives};
pub use falloff::{verify_falloff, FallOffConfig, FallOffReport};
pub use forms::{OneFormField, TwoFormField};
pub use metric::{
    eval_metric, metric_derivatives, ConformalMetric, DerivativeMode, FnMetric, MetricField,
    MetricSource, RotatedMetric,
};
pub use potential::{
    kahler_form, kahler_form_field, kahler_metric_from_potential, CatalogPotential, KahlerMetric,
    RadialPotential,
};
