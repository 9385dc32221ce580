//! Robin, Neumann and Steklov eigenvalues of the Laplace–Beltrami operator on
//! geodesic balls of constant-curvature space forms and on planar domains,
//! together with numerical checks of the comparison and shape-optimization
//! inequalities for the second Robin eigenvalue.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod fem2d;
pub mod model;
pub mod ode;
pub mod profile;
pub mod quadrature;
pub mod radial;
pub mod shapes;
pub mod spaceform;
pub mod verify;

pub use error::{Error, Result};
