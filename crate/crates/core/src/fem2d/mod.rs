//! P1 finite elements for Robin, Neumann and Steklov eigenvalues of planar
//! domains in the Euclidean plane and in the conformal disk model of the
//! hyperbolic plane.
//!
//! In two dimensions the Dirichlet energy is conformally invariant, so the
//! stiffness matrix is Euclidean; the metric enters through `ρ²` in the mass
//! matrix and `ρ` in the boundary mass matrix.

mod assembly;
mod eigen;
mod mesh;
pub mod sparse;

pub use assembly::{assemble, AssembledSystem};
pub use eigen::{
    robin_eigs_fem, robin_eigs_system, smallest_eigenpairs, steklov_fem, steklov_system, EigenResult, DENSE_LIMIT,
    RESIDUAL_TOL,
};
pub use mesh::{
    domain_perimeter, domain_volume, min_angle_deg, refine, BoundaryCurve, Mesh2D, MIN_ANGLE_DEG, MIN_AREA,
};
