//! Matrix functions: principal square roots, the exponential, and
//! Balakrishnan fractional powers, plus the norm inequalities they satisfy
//! on accretive operators.

mod expm;
mod fractional;
mod inequalities;
mod quadrature;
mod sqrt;

pub use expm::expm;
pub use fractional::{balakrishnan_power, balakrishnan_power_with};
pub use inequalities::{kato_square_inequality_check, moment_inequality_check, MomentCheck};
pub use quadrature::{gauss_legendre_reference, QuadratureDomain, QuadratureRule};
pub use sqrt::{principal_sqrt, root_residual, sqrt_denman_beavers, sqrt_with_kernel};
