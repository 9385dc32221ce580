//! Smallest eigenpairs of the Robin pencil `(K + αB, M)` and of the
//! Steklov pencil `(K, B)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::assembly::{assemble, AssembledSystem};
use super::mesh::Mesh2D;
use super::sparse::{CsrMatrix, SkylineLdl};
use crate::error::{Error, Result};

/// Residual bound every returned pair satisfies.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Residual at which subspace iteration stops early.
const TARGET_RESIDUAL: f64 = 1e-11;
const MAX_ITERATIONS: usize = 1000;
/// Below this many unknowns the pencil is solved densely.
pub const DENSE_LIMIT: usize = 200;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Vertex values; normalized in the pencil's mass inner product.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖A u - λ N u‖ / ‖u‖` for the pencil `(A, N)`.
    pub residuals: Vec<f64>,
    /// Subspace iterations (0 for the dense path).
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual(a: &CsrMatrix, n: &CsrMatrix, lambda: f64, u: &[f64]) -> f64 {
    let au = a.mul_vec(u);
    let nu = n.mul_vec(u);
    let r: Vec<f64> = au.iter().zip(&nu).map(|(x, y)| x - lambda * y).collect();
    norm(&r) / norm(u)
}

fn to_dense(a: &CsrMatrix) -> DMatrix<f64> {
    let n = a.dim();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let (c, v) = a.row(i);
        for (&j, &x) in c.iter().zip(v) {
            d[(i, j)] = x;
        }
    }
    d
}

/// `k` smallest eigenpairs of `A y = θ N y` with `N` SPD, dense.
fn dense_generalized(a: &DMatrix<f64>, n: &DMatrix<f64>, k: usize) -> Result<(Vec<f64>, Vec<DVector<f64>>)> {
    let chol = n.clone().cholesky().ok_or(Error::NotPositiveDefinite { row: 0, pivot: f64::NAN })?;
    let l = chol.l();
    let x = l.solve_lower_triangular(a).expect("triangular factor");
    let c = l.solve_lower_triangular(&x.transpose()).expect("triangular factor");
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lt = l.transpose();
    let mut vals = Vec::with_capacity(k);
    let mut vecs = Vec::with_capacity(k);
    for &i in order.iter().take(k) {
        vals.push(eig.eigenvalues[i]);
        vecs.push(lt.solve_upper_triangular(&eig.eigenvectors.column(i).into_owned()).expect("triangular factor"));
    }
    Ok((vals, vecs))
}

/// Rayleigh–Ritz on the span of `y`: returns Ritz values (ascending) and the
/// coefficient matrix of the `N`-orthonormal Ritz vectors.
fn ritz(ay: &[Vec<f64>], ny: &[Vec<f64>], y: &[Vec<f64>]) -> (Vec<f64>, DMatrix<f64>) {
    let p = y.len();
    let ah = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &ay[j]) + dot(&y[j], &ay[i])));
    let nh = DMatrix::from_fn(p, p, |i, j| 0.5 * (dot(&y[i], &ny[j]) + dot(&y[j], &ny[i])));
    // orthonormal basis of the numerically nonsingular part of N̂
    let ne = SymmetricEigen::new(nh);
    let top = ne.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x));
    let keep: Vec<usize> = (0..p).filter(|&i| ne.eigenvalues[i] > 1e-13 * top).collect();
    let z = DMatrix::from_fn(p, keep.len(), |r, c| ne.eigenvectors[(r, keep[c])] / ne.eigenvalues[keep[c]].sqrt());
    let reduced = z.transpose() * ah * &z;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let re = SymmetricEigen::new(reduced);
    let mut order: Vec<usize> = (0..keep.len()).collect();
    order.sort_by(|&i, &j| re.eigenvalues[i].total_cmp(&re.eigenvalues[j]));
    let q = DMatrix::from_fn(keep.len(), keep.len(), |r, c| re.eigenvectors[(r, order[c])]);
    (order.iter().map(|&i| re.eigenvalues[i]).collect(), z * q)
}

fn combine_columns(y: &[Vec<f64>], coef: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let n = y[0].len();
    (0..coef.ncols())
        .map(|c| {
            let mut out = vec![0.0; n];
            for (r, yr) in y.iter().enumerate() {
                let w = coef[(r, c)];
                if w != 0.0 {
                    for (o, v) in out.iter_mut().zip(yr) {
                        *o += w * v;
                    }
                }
            }
            out
        })
        .collect()
}

/// Factor `A - σN` for some `σ` below the spectrum, starting just below the
/// upper bound `upper ≥ θ_1`.
fn shifted_factor(a: &CsrMatrix, n: &CsrMatrix, upper: f64) -> Result<(f64, SkylineLdl)> {
    let mut sigma = upper - 1.0 - upper.abs();
    for _ in 0..64 {
        match SkylineLdl::factor(&a.combine(1.0, n, -sigma)) {
            Ok(f) => return Ok((sigma, f)),
            Err(Error::NotPositiveDefinite { .. }) => sigma -= 2.0 * (sigma.abs() + 1.0),
            Err(e) => return Err(e),
        }
    }
    Err(Error::NonConvergence { iterations: 64, residual: f64::NAN })
}

/// Deterministic, well-spread start vectors.
fn default_block(n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..p)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let s = ((i as f64 + 1.0) * 12.9898 + (j as f64 + 1.0) * 78.233).sin() * 43758.5453;
                    s - s.floor() - 0.5
                })
                .collect()
        })
        .collect()
}

/// `k` smallest eigenpairs of the symmetric pencil `(A, N)`, `N` SPD.
/// `start` optionally seeds the iteration subspace.
pub fn smallest_eigenpairs(
    a: &CsrMatrix,
    n: &CsrMatrix,
    k: usize,
    start: Option<Vec<Vec<f64>>>,
) -> Result<EigenResult> {
    let dim = a.dim();
    if k == 0 || k > dim {
        return Err(Error::Domain(format!("cannot compute {k} eigenpairs of a {dim}-dimensional pencil")));
    }
    if dim < DENSE_LIMIT {
        let (vals, vecs) = dense_generalized(&to_dense(a), &to_dense(n), k)?;
        let vecs: Vec<Vec<f64>> = vecs.into_iter().map(|v| v.as_slice().to_vec()).collect();
        let residuals = vals.iter().zip(&vecs).map(|(&l, u)| residual(a, n, l, u)).collect();
        return finish(EigenResult { eigenvalues: vals, eigenvectors: vecs, residuals, iterations: 0 });
    }
    let p = (k + k.max(4)).min(dim);
    let mut x = start.unwrap_or_default();
    x.truncate(p);
    if x.len() < p {
        x.extend(default_block(dim, p).into_iter().skip(x.len()));
    }
    let ones = vec![1.0; dim];
    let upper = a.quad_form(&ones) / n.quad_form(&ones);
    let (_, fact) = shifted_factor(a, n, upper)?;
    let mut history: Vec<f64> = Vec::new();
    for it in 1..=MAX_ITERATIONS {
        let y: Vec<Vec<f64>> = x.iter().map(|v| fact.solve(&n.mul_vec(v))).collect();
        let ay: Vec<Vec<f64>> = y.iter().map(|v| a.mul_vec(v)).collect();
        let ny: Vec<Vec<f64>> = y.iter().map(|v| n.mul_vec(v)).collect();
        let (theta, coef) = ritz(&ay, &ny, &y);
        if theta.len() < k {
            return Err(Error::NonConvergence { iterations: it, residual: f64::NAN });
        }
        x = combine_columns(&y, &coef);
        let ax = combine_columns(&ay, &coef);
        let nx = combine_columns(&ny, &coef);
        let res: Vec<f64> = (0..k)
            .map(|j| {
                let r: Vec<f64> = ax[j].iter().zip(&nx[j]).map(|(p, q)| p - theta[j] * q).collect();
                norm(&r) / norm(&x[j])
            })
            .collect();
        let worst = res.iter().fold(0.0f64, |m, &r| m.max(r));
        history.push(worst);
        let stalled = it > 40 && worst > 0.5 * history[it - 21];
        if worst <= TARGET_RESIDUAL || stalled || it == MAX_ITERATIONS {
            if worst > RESIDUAL_TOL {
                return Err(Error::NonConvergence { iterations: it, residual: worst });
            }
            x.truncate(k);
            let residuals = x.iter().zip(&theta).map(|(u, &l)| residual(a, n, l, u)).collect();
            return finish(EigenResult {
                eigenvalues: theta[..k].to_vec(),
                eigenvectors: x,
                residuals,
                iterations: it,
            });
        }
        // restore a full block if Rayleigh–Ritz dropped directions
        if x.len() < p {
            x.extend(default_block(dim, p).into_iter().skip(x.len()));
        }
    }
    unreachable!("loop returns on the last iteration")
}

/// Sign convention: the entry of largest magnitude is positive.
fn finish(mut r: EigenResult) -> Result<EigenResult> {
    for v in &mut r.eigenvectors {
        let big = v.iter().fold(0.0f64, |m, &x| if x.abs() > m.abs() { x } else { m });
        if big < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    if let Some(&worst) = r.residuals.iter().max_by(|a, b| a.total_cmp(b)) {
        if !(worst <= RESIDUAL_TOL) {
            return Err(Error::NonConvergence { iterations: r.iterations, residual: worst });
        }
    }
    Ok(r)
}

/// Monomials in scaled vertex coordinates, a smooth start subspace.
fn monomial_block(mesh: &Mesh2D, p: usize) -> Vec<Vec<f64>> {
    let v = mesh.vertices();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for x in v {
        for d in 0..2 {
            lo[d] = lo[d].min(x[d]);
            hi[d] = hi[d].max(x[d]);
        }
    }
    let c = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let s = 0.5 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let mut out = Vec::with_capacity(p);
    'outer: for deg in 0.. {
        for i in 0..=deg {
            if out.len() == p {
                break 'outer;
            }
            let (ex, ey) = (deg - i, i);
            out.push(v.iter().map(|x| ((x[0] - c[0]) / s).powi(ex) * ((x[1] - c[1]) / s).powi(ey)).collect());
        }
    }
    out
}

/// `k` smallest Robin eigenpairs `(K + αB) u = λ M u`, `α ≤ 0`.
pub fn robin_eigs_fem(mesh: &Mesh2D, alpha: f64, k: usize) -> Result<EigenResult> {
    let sys = assemble(mesh)?;
    robin_eigs_system(mesh, &sys, alpha, k)
}

/// As [`robin_eigs_fem`] with a pre-assembled system.
pub fn robin_eigs_system(mesh: &Mesh2D, sys: &AssembledSystem, alpha: f64, k: usize) -> Result<EigenResult> {
    if !(alpha <= 0.0) {
        return Err(Error::Domain(format!("Robin parameter must satisfy α ≤ 0, got {alpha}")));
    }
    let p = k + k.max(4);
    smallest_eigenpairs(&sys.robin_operator(alpha), &sys.mass, k, Some(monomial_block(mesh, p)))
}

/// `k` smallest nonzero Steklov eigenpairs `K u = σ B u`, computed on the
/// boundary through the Schur complement of the interior block and extended
/// harmonically; constants are deflated.
pub fn steklov_fem(mesh: &Mesh2D, k: usize) -> Result<EigenResult> {
    let sys = assemble(mesh)?;
    steklov_system(mesh, &sys, k)
}

pub fn steklov_system(mesh: &Mesh2D, sys: &AssembledSystem, k: usize) -> Result<EigenResult> {
    let nv = mesh.num_vertices();
    let bnd = mesh.boundary_vertices();
    let nb = bnd.len();
    if k == 0 || k + 1 > nb {
        return Err(Error::Domain(format!("cannot compute {k} Steklov pairs with {nb} boundary vertices")));
    }
    let mut local = vec![usize::MAX; nv];
    for (i, &b) in bnd.iter().enumerate() {
        local[b] = i;
    }
    let interior: Vec<usize> = (0..nv).filter(|&v| local[v] == usize::MAX).collect();
    let mut int_local = vec![usize::MAX; nv];
    for (i, &v) in interior.iter().enumerate() {
        int_local[v] = i;
    }
    let kmat = &sys.stiffness;
    let mut s = DMatrix::zeros(nb, nb);
    for (i, &b) in bnd.iter().enumerate() {
        let (c, v) = kmat.row(b);
        for (&j, &x) in c.iter().zip(v) {
            if local[j] != usize::MAX {
                s[(i, local[j])] = x;
            }
        }
    }
    // Z = K_ii⁻¹ K_ib, one column per boundary vertex
    let mut z: Vec<Vec<f64>> = Vec::new();
    if !interior.is_empty() {
        let fact = SkylineLdl::factor(&kmat.principal(&interior))?;
        z = bnd
            .iter()
            .map(|&b| {
                let mut col = vec![0.0; interior.len()];
                let (c, v) = kmat.row(b);
                for (&j, &x) in c.iter().zip(v) {
                    if int_local[j] != usize::MAX {
                        col[int_local[j]] = x;
                    }
                }
                fact.solve(&col)
            })
            .collect();
        for (i, &b) in bnd.iter().enumerate() {
            let (c, v) = kmat.row(b);
            for (&j, &x) in c.iter().zip(v) {
                if int_local[j] != usize::MAX {
                    let il = int_local[j];
                    for (col, zc) in z.iter().enumerate() {
                        s[(i, col)] -= x * zc[il];
                    }
                }
            }
        }
    }
    let s = (&s + s.transpose()) * 0.5;
    let bmat = DMatrix::from_fn(nb, nb, |i, j| sys.boundary_mass.get(bnd[i], bnd[j]));
    let chol = bmat.clone().cholesky().ok_or(Error::NotPositiveDefinite { row: 0, pivot: f64::NAN })?;
    let l = chol.l();
    let x = l.solve_lower_triangular(&s).expect("triangular factor");
    let c = l.solve_lower_triangular(&x.transpose()).expect("triangular factor");
    // deflate the B-normalized constant
    let lt = l.transpose();
    let mut w = &lt * DVector::from_element(nb, 1.0);
    w /= w.norm();
    let proj = DMatrix::identity(nb, nb) - &w * w.transpose();
    let c = &proj * c * &proj;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let constant = (0..nb)
        .max_by(|&i, &j| eig.eigenvectors.column(i).dot(&w).abs().total_cmp(&eig.eigenvectors.column(j).dot(&w).abs()))
        .expect("nonempty");
    let mut order: Vec<usize> = (0..nb).filter(|&i| i != constant).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    for &i in order.iter().take(k) {
        let vb = lt.solve_upper_triangular(&eig.eigenvectors.column(i).into_owned()).expect("triangular factor");
        let mut u = vec![0.0; nv];
        for (bi, &b) in bnd.iter().enumerate() {
            u[b] = vb[bi];
        }
        for (ii, &v) in interior.iter().enumerate() {
            u[v] = -z.iter().zip(vb.iter()).map(|(zc, &c)| zc[ii] * c).sum::<f64>();
        }
        eigenvalues.push(eig.eigenvalues[i]);
        eigenvectors.push(u);
    }
    let residuals = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(&l, u)| residual(kmat, &sys.boundary_mass, l, u))
        .collect();
    finish(EigenResult { eigenvalues, eigenvectors, residuals, iterations: 0 })
}
