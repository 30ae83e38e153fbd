//! Quadrature, summation and curve-fitting primitives shared by the
//! geometric modules.

mod fit;
mod gauss;
mod simpson;
mod sphere;
mod sum;

pub use fit::{fit_power_law, least_squares, loglog_slope, PowerLawFit};
pub use gauss::GaussLegendre;
pub use simpson::adaptive_simpson;
pub use sphere::SphereRule;
pub use sum::{compensated_sum, Neumaier};
