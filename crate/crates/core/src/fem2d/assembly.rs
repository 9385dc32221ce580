//! P1 stiffness, mass and boundary-mass matrices.

use rayon::prelude::*;

use super::mesh::{Mesh2D, MIN_AREA};
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::model;
use crate::quadrature::{SEGMENT_RULE, TRIANGLE_RULE};

/// `K` (Dirichlet energy), `M` (metric mass) and `B` (metric boundary mass),
/// all on the vertex-adjacency pattern of the mesh.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub boundary_mass: CsrMatrix,
}

impl AssembledSystem {
    /// `K + αB`.
    pub fn robin_operator(&self, alpha: f64) -> CsrMatrix {
        self.stiffness.combine(1.0, &self.boundary_mass, alpha)
    }
}

type Local = ([usize; 3], [[f64; 3]; 3], [[f64; 3]; 3]);

fn element(mesh: &Mesh2D, t: usize) -> Result<Local> {
    let tri = mesh.triangles()[t];
    let p = mesh.triangle_points(t);
    let area = mesh.triangle_area(t);
    if area < MIN_AREA {
        return Err(Error::DegenerateTriangle { index: t, area });
    }
    // gradients of the barycentric coordinates times 2·area
    let b = [p[1][1] - p[2][1], p[2][1] - p[0][1], p[0][1] - p[1][1]];
    let c = [p[2][0] - p[1][0], p[0][0] - p[2][0], p[1][0] - p[0][0]];
    let mut k = [[0.0; 3]; 3];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
        }
    }
    for (lam, w) in TRIANGLE_RULE {
        let x = [
            lam[0] * p[0][0] + lam[1] * p[1][0] + lam[2] * p[2][0],
            lam[0] * p[0][1] + lam[1] * p[1][1] + lam[2] * p[2][1],
        ];
        let rho = model::conformal_factor(mesh.kappa(), x);
        let s = w * area * rho * rho;
        for i in 0..3 {
            for j in i..3 {
                m[i][j] += s * lam[i] * lam[j];
            }
        }
    }
    for i in 0..3 {
        for j in 0..i {
            m[i][j] = m[j][i];
        }
    }
    Ok((tri, k, m))
}

fn pattern(mesh: &Mesh2D) -> CsrMatrix {
    let mut rows: Vec<Vec<usize>> = (0..mesh.num_vertices()).map(|i| vec![i]).collect();
    for t in mesh.triangles() {
        for &i in t {
            rows[i].extend_from_slice(t);
        }
    }
    CsrMatrix::from_pattern(rows)
}

/// Assemble `K`, `M`, `B` for the mesh. Element matrices are computed in
/// parallel and summed in triangle order, so the result is reproducible.
pub fn assemble(mesh: &Mesh2D) -> Result<AssembledSystem> {
    let locals: Vec<Local> =
        (0..mesh.triangles().len()).into_par_iter().map(|t| element(mesh, t)).collect::<Result<_>>()?;
    let mut stiffness = pattern(mesh);
    let mut mass = stiffness.clone();
    let mut boundary_mass = stiffness.clone();
    for (tri, k, m) in &locals {
        for i in 0..3 {
            for j in 0..3 {
                stiffness.add(tri[i], tri[j], k[i][j]);
                mass.add(tri[i], tri[j], m[i][j]);
            }
        }
    }
    let verts = mesh.vertices();
    for e in mesh.boundary_edges() {
        let (a, b) = (verts[e[0]], verts[e[1]]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let mut local = [[0.0; 2]; 2];
        for &(s, w) in &SEGMENT_RULE {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let phi = [1.0 - s, s];
            let f = w * len * model::conformal_factor(mesh.kappa(), x);
            local[0][0] += f * phi[0] * phi[0];
            local[0][1] += f * phi[0] * phi[1];
            local[1][1] += f * phi[1] * phi[1];
        }
        local[1][0] = local[0][1];
        for i in 0..2 {
            for j in 0..2 {
                boundary_mass.add(e[i], e[j], local[i][j]);
            }
        }
    }
    Ok(AssembledSystem { stiffness, mass, boundary_mass })
}
