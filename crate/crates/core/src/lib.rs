//! Numerical toolkit for Cheeger constants of warped products `Σ ×_f ℝ`.
//!
//! The Fuchsian warp `f = cosh` is the main instance: its Cheeger constant
//! is `2/α` with `coth α = α`, certified here from above by the optimal slab
//! and from below by a calibration potential.

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cheeger;
pub mod curvature;
pub mod error;
pub mod format;
pub mod numerics;
pub mod oracle;
pub mod profiles;
pub mod radial;
pub mod spectrum;
pub mod warp;

pub use cheeger::{certify, fuchsian_alpha, fuchsian_cheeger_constant, CheegerCertificate};
pub use error::{Error, Result};
pub use warp::{BaseSurface, Slab, WarpFunction, WarpedProduct};
