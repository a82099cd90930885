//! Scalar numerical kernels shared by the geometric modules.

pub mod quadrature;
pub mod roots;

pub use quadrature::{integrate, Integral, QuadratureConfig};
pub use roots::{brent_root, scan_bracket, RootConfig};
