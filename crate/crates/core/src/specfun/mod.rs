//! Scalar special functions and quadrature used by the distribution code.
//!
//! Everything here is pure and reentrant.

mod bessel;
mod gamma;
mod quad;

pub use bessel::{bessel_k, bessel_k_pair};
pub use gamma::ln_gamma;
pub use quad::{adaptive_quad, QuadratureSpec};
