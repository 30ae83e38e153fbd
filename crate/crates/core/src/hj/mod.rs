//! Exact combinatorics of cyclic quotient singularities and capsules:
//! Hirzebruch–Jung strings, lens actions, central quotients of finite
//! subgroups of `U(2)` and the plumbing trees that cap an ALE end.
//!
//! Everything here is exact; no floating point is used.

mod capsule;
mod group;
mod kind;
mod string;

pub use capsule::{build_capsule, capsule_degree, CapsuleModel, CapsuleTree, Vertex};
pub use group::{
    central_quotient, group_closure, lens_generator, CentralQuotient, GroupElement, LensAction,
};
pub use kind::OrbifoldGroupType;
pub use string::{hj_evaluate, hj_resolve, plumbing_matrix, HJString};

/// Maximum group order explored by [`group_closure`].
pub const CLOSURE_CAP: usize = 10_000;
