//! End-to-end numerical checks of the comparison and shape-optimization
//! inequalities for the second Robin eigenvalue.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem2d::{self, assemble, robin_eigs_system, steklov_system, AssembledSystem, Mesh2D};
use crate::model::{self, Point};
use crate::profile::{extend_profile, ExtendedProfile, Verdict};
use crate::quadrature::{integrate_adaptive, SEGMENT_RULE, TRIANGLE_RULE};
use crate::radial::{self, Sector};
use crate::shapes;
use crate::spaceform::{radius_for_volume, BallSpec, Curvature};

pub const COM_DAMPING: f64 = 0.5;
pub const COM_MAX_ITERATIONS: usize = 200;
/// Relative size of the moment accepted as zero.
pub const COM_TOL: f64 = 1e-8;
/// Relative slack per link of the chain.
pub const CHAIN_SLACK: f64 = 1e-6;
/// Safety factor applied to the Richardson estimate of the mesh error.
pub const MESH_ERROR_SAFETY: f64 = 2.0;
/// Slack for monotonicity in κ along a sweep row.
pub const COMPARISON_SLACK: f64 = 1e-8;
/// Tolerance of the ball nonnegativity check.
pub const NONNEGATIVE_TOL: f64 = 1e-10;

/// A quadrature node in the interior: model point, metric weight, and the
/// value of an optional P1 field.
#[derive(Debug, Clone, Copy)]
struct Node {
    x: Point,
    w: f64,
    u: f64,
}

fn interior_nodes(mesh: &Mesh2D, field: Option<&[f64]>) -> Vec<Node> {
    let mut out = Vec::with_capacity(mesh.triangles().len() * TRIANGLE_RULE.len());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let p = mesh.triangle_points(t);
        let area = mesh.triangle_area(t);
        for (lam, w) in TRIANGLE_RULE {
            let x = [
                lam[0] * p[0][0] + lam[1] * p[1][0] + lam[2] * p[2][0],
                lam[0] * p[0][1] + lam[1] * p[1][1] + lam[2] * p[2][1],
            ];
            let rho = model::conformal_factor(mesh.kappa(), x);
            let u = field.map_or(1.0, |f| lam[0] * f[tri[0]] + lam[1] * f[tri[1]] + lam[2] * f[tri[2]]);
            out.push(Node { x, w: w * area * rho * rho, u });
        }
    }
    out
}

fn boundary_nodes(mesh: &Mesh2D) -> Vec<Node> {
    let verts = mesh.vertices();
    let mut out = Vec::with_capacity(mesh.boundary_edges().len() * SEGMENT_RULE.len());
    for e in mesh.boundary_edges() {
        let (a, b) = (verts[e[0]], verts[e[1]]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        for &(s, w) in &SEGMENT_RULE {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            out.push(Node { x, w: w * len * model::conformal_factor(mesh.kappa(), x), u: 1.0 });
        }
    }
    out
}

/// Result of the center-of-mass search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CenterOfMass {
    pub point: Point,
    /// `‖∫ F(r_p) θ_p u dμ‖ / ∫ F(r_p) u dμ` at `point`.
    pub residual: f64,
    pub iterations: usize,
}

/// Moment `X(p) = ∫ F(r_p) θ_p u dμ`, the weight `∫ F(r_p)/r_p u dμ` and the
/// scale `∫ F(r_p) u dμ`.
fn moment(kappa: f64, nodes: &[Node], profile: &ExtendedProfile, p: Point) -> ([f64; 2], f64, f64) {
    let mut x = [0.0; 2];
    let mut weight = 0.0;
    let mut scale = 0.0;
    for n in nodes {
        let (r, dir) = model::polar_about(kappa, p, n.x);
        let f = profile.value(r);
        let wu = n.w * n.u;
        x[0] += wu * f * dir[0];
        x[1] += wu * f * dir[1];
        weight += wu * if r > 0.0 { f / r } else { 1.0 };
        scale += wu * f;
    }
    (x, weight, scale)
}

/// Point `p` at which `∫_Ω F(r_p) exp_p⁻¹(x)/r_p u₁ dμ` vanishes, found by
/// damped fixed-point iteration along the moment field, started at the
/// `u₁`-weighted centroid.
pub fn center_of_mass(mesh: &Mesh2D, u1: &[f64], profile: &ExtendedProfile) -> Result<CenterOfMass> {
    if u1.len() != mesh.num_vertices() {
        return Err(Error::Domain(format!("field has {} values for {} vertices", u1.len(), mesh.num_vertices())));
    }
    let kappa = mesh.kappa();
    let nodes = interior_nodes(mesh, Some(u1));
    let total: f64 = nodes.iter().map(|n| n.w * n.u).sum();
    if !(total > 0.0) {
        return Err(Error::Domain("first eigenfunction must be sign-normalized to be positive".into()));
    }
    let mut p = [0.0; 2];
    for n in &nodes {
        p[0] += n.w * n.u * n.x[0] / total;
        p[1] += n.w * n.u * n.x[1] / total;
    }
    let mut residual = f64::INFINITY;
    for it in 0..=COM_MAX_ITERATIONS {
        let (x, weight, scale) = moment(kappa, &nodes, profile, p);
        residual = x[0].hypot(x[1]) / scale;
        if residual <= COM_TOL {
            return Ok(CenterOfMass { point: p, residual, iterations: it });
        }
        if it == COM_MAX_ITERATIONS {
            break;
        }
        let step = COM_DAMPING / weight;
        p = model::exp_at(kappa, p, [step * x[0], step * x[1]]);
    }
    Err(Error::NonConvergence { iterations: COM_MAX_ITERATIONS, residual })
}

/// The chain `λ₂(Ω) ≤ Q_rayleigh ≤ Q_potential ≤ Q_ball = λ₂(Ω*)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainReport {
    pub kappa: f64,
    pub alpha: f64,
    /// Metric volume of the mesh domain.
    pub volume: f64,
    /// Radius of the comparison ball `Ω*`.
    pub radius_star: f64,
    pub sigma1_star: f64,
    pub lambda2_omega: f64,
    /// Averaged Rayleigh quotient of the test functions `F(r_p) θ_p^i`.
    pub rayleigh_bound: f64,
    /// `∫_Ω H(r_p) / ∫_Ω F(r_p)²`.
    pub potential_bound: f64,
    /// `∫_{Ω*} H / ∫_{Ω*} F²` by radial quadrature.
    pub ball_bound: f64,
    pub lambda2_ball: f64,
    /// Consecutive differences along the chain (each expected `≥ 0`, the last `≈ 0`).
    pub margins: [f64; 4],
    pub slack: f64,
    /// Richardson estimate from one uniform refinement.
    pub mesh_error_bound: f64,
    pub center: Point,
    pub center_residual: f64,
    pub center_iterations: usize,
    pub links: [Verdict; 4],
    pub verdict: Verdict,
}

impl ChainReport {
    fn not_applicable(kappa: f64, alpha: f64, volume: f64, radius_star: f64, sigma1_star: f64) -> Self {
        ChainReport {
            kappa,
            alpha,
            volume,
            radius_star,
            sigma1_star,
            lambda2_omega: f64::NAN,
            rayleigh_bound: f64::NAN,
            potential_bound: f64::NAN,
            ball_bound: f64::NAN,
            lambda2_ball: f64::NAN,
            margins: [f64::NAN; 4],
            slack: f64::NAN,
            mesh_error_bound: f64::NAN,
            center: [f64::NAN; 2],
            center_residual: f64::NAN,
            center_iterations: 0,
            links: [Verdict::NotApplicable; 4],
            verdict: Verdict::NotApplicable,
        }
    }

    /// The largest chain gap in absolute value.
    pub fn max_gap(&self) -> f64 {
        self.margins.iter().fold(0.0, |m, g| m.max(g.abs()))
    }
}

struct MeshQuantities {
    lambda2: f64,
    rayleigh: f64,
    potential: f64,
    center: CenterOfMass,
}

fn mesh_quantities(mesh: &Mesh2D, alpha: f64, profile: &ExtendedProfile) -> Result<MeshQuantities> {
    let sys = assemble(mesh)?;
    let eig = robin_eigs_system(mesh, &sys, alpha, 2)?;
    let center = center_of_mass(mesh, &eig.eigenvectors[0], profile)?;
    let kappa = mesh.kappa();
    let p = center.point;
    let (mut energy, mut potential, mut mass) = (0.0, 0.0, 0.0);
    for n in interior_nodes(mesh, None) {
        let (r, _) = model::polar_about(kappa, p, n.x);
        let (f, df) = profile.eval(r);
        energy += n.w * (df * df + profile.angular_energy(r));
        potential += n.w * if r > 0.0 { profile.h_unchecked(r) } else { profile.ball.dim as f64 };
        mass += n.w * f * f;
    }
    let mut trace = 0.0;
    for n in boundary_nodes(mesh) {
        let (r, _) = model::polar_about(kappa, p, n.x);
        trace += n.w * profile.value(r).powi(2);
    }
    if !(mass > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(MeshQuantities {
        lambda2: eig.eigenvalues[1],
        rayleigh: (energy + alpha * trace) / mass,
        potential: potential / mass,
        center,
    })
}

/// `∫_0^R H sn^{n-1} / ∫_0^R F² sn^{n-1}`.
fn ball_quotient(profile: &ExtendedProfile) -> Result<f64> {
    let ball = &profile.ball;
    let k = ball.kappa;
    let m = (ball.dim - 1) as i32;
    let big_r = ball.radius;
    let f_end = profile.boundary_value();
    let tol = 1e-13 * f_end * f_end * big_r.powi(ball.dim as i32);
    let mass = integrate_adaptive(|r| profile.value(r).powi(2) * k.sn(r).powi(m), 0.0, big_r, tol);
    if !(mass > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    let scale = profile.lambda.abs().max(big_r.powi(-2));
    let num = integrate_adaptive(|r| profile.h_unchecked(r) * k.sn(r).powi(m), 0.0, big_r, tol * scale);
    Ok(num / mass)
}

/// Evaluate every link of the chain on `mesh` for Robin parameter `alpha`.
/// The comparison ball has the metric volume of the mesh; `p` is the
/// center of mass of the first eigenfunction weighted by that ball's
/// extended profile. The mesh error bound comes from repeating the mesh
/// quantities on one uniform refinement.
pub fn inequality_chain(mesh: &Mesh2D, alpha: f64) -> Result<ChainReport> {
    let kappa = mesh.kappa();
    let volume = fem2d::domain_volume(mesh);
    let radius_star = radius_for_volume(Curvature::new(kappa)?, 2, volume)?;
    let ball = BallSpec::new(kappa, 2, radius_star)?;
    let sigma1_star = radial::steklov_ball(&ball)?;
    if !(alpha <= 0.0) || alpha < -sigma1_star * (1.0 + 1e-9) {
        return Ok(ChainReport::not_applicable(kappa, alpha, volume, radius_star, sigma1_star));
    }
    let profile = extend_profile(&ball, alpha)?;
    let lambda2_ball = profile.lambda;
    let ball_bound = ball_quotient(&profile)?;
    let coarse = mesh_quantities(mesh, alpha, &profile)?;
    let fine = mesh_quantities(&fem2d::refine(mesh)?, alpha, &profile)?;
    let richardson = |c: f64, f: f64| (c - f).abs() * 4.0 / 3.0;
    let mesh_error_bound = MESH_ERROR_SAFETY
        * (richardson(coarse.lambda2, fine.lambda2)
            + richardson(coarse.rayleigh, fine.rayleigh)
            + richardson(coarse.potential, fine.potential));
    let slack = CHAIN_SLACK * lambda2_ball.abs().max(radius_star.powi(-2));
    let margins = [
        coarse.rayleigh - coarse.lambda2,
        coarse.potential - coarse.rayleigh,
        ball_bound - coarse.potential,
        lambda2_ball - ball_bound,
    ];
    let mut links = [Verdict::Pass; 4];
    for i in 0..3 {
        links[i] = Verdict::from_bool(margins[i] >= -(slack + mesh_error_bound));
    }
    links[3] = Verdict::from_bool(margins[3].abs() <= slack);
    let verdict = Verdict::from_bool(links.iter().all(|v| *v == Verdict::Pass));
    Ok(ChainReport {
        kappa,
        alpha,
        volume,
        radius_star,
        sigma1_star,
        lambda2_omega: coarse.lambda2,
        rayleigh_bound: coarse.rayleigh,
        potential_bound: coarse.potential,
        ball_bound,
        lambda2_ball,
        margins,
        slack,
        mesh_error_bound,
        center: coarse.center.point,
        center_residual: coarse.center.residual,
        center_iterations: coarse.center.iterations,
        links,
        verdict,
    })
}

/// One row of a result table; matches the CSV schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kappa: f64,
    pub dim: usize,
    pub radius: f64,
    pub alpha: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub sigma1: f64,
    /// `radial` or `fem`.
    pub source: String,
    pub residual: f64,
}

/// Radial-solver row for one ball.
pub fn ball_row(ball: &BallSpec, alpha: f64) -> Result<SweepRow> {
    let l1 = radial::solve_robin_ball(ball, alpha, Sector::Radial)?;
    let l2 = radial::solve_robin_ball(ball, alpha, Sector::Dipole)?;
    Ok(SweepRow {
        kappa: ball.kappa.value(),
        dim: ball.dim,
        radius: ball.radius,
        alpha,
        lambda1: l1.lambda,
        lambda2: l2.lambda,
        sigma1: radial::steklov_ball(ball)?,
        source: "radial".into(),
        residual: l1.residual.abs().max(l2.residual.abs()),
    })
}

/// FEM row for a mesh with a pre-assembled system; `radius` is the radius
/// of the ball of equal volume.
pub fn fem_row(mesh: &Mesh2D, sys: &AssembledSystem, alpha: f64) -> Result<SweepRow> {
    let eig = robin_eigs_system(mesh, sys, alpha, 2)?;
    let st = steklov_system(mesh, sys, 1)?;
    let kappa = mesh.kappa();
    Ok(SweepRow {
        kappa,
        dim: 2,
        radius: radius_for_volume(Curvature::new(kappa)?, 2, fem2d::domain_volume(mesh))?,
        alpha,
        lambda1: eig.eigenvalues[0],
        lambda2: eig.eigenvalues[1],
        sigma1: st.eigenvalues[0],
        source: "fem".into(),
        residual: eig.residuals.iter().chain(&st.residuals).fold(0.0, |m: f64, r| m.max(*r)),
    })
}

/// Ball values along rows of increasing κ, one row per α.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Row-major: for each α (input order), κ ascending.
    pub rows: Vec<SweepRow>,
    /// `λ₂(κ_i) - λ₂(κ_{i-1})` within the α-row; `None` for the first κ.
    pub margins: Vec<Option<f64>>,
    pub verdict: Verdict,
}

/// `λ_{2,α}(B_κ(R))` over the grid, checking that it is nondecreasing in κ.
pub fn comparison_sweep(radius: f64, dim: usize, alphas: &[f64], kappas: &[f64]) -> Result<ComparisonReport> {
    if let Some(a) = alphas.iter().find(|a| !(**a <= 0.0)) {
        return Err(Error::Domain(format!("Robin parameter must satisfy α ≤ 0, got {a}")));
    }
    let mut ks = kappas.to_vec();
    if ks.iter().any(|k| !k.is_finite()) {
        return Err(Error::Domain("curvatures must be finite".into()));
    }
    ks.sort_by(f64::total_cmp);
    let cells: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| ks.iter().map(move |&k| (a, k))).collect();
    let rows: Vec<SweepRow> = cells
        .par_iter()
        .map(|&(a, k)| ball_row(&BallSpec::new(k, dim, radius)?, a))
        .collect::<Result<_>>()?;
    let mut margins = Vec::with_capacity(rows.len());
    let mut ok = true;
    for (i, row) in rows.iter().enumerate() {
        if i % ks.len() == 0 {
            margins.push(None);
        } else {
            let m = row.lambda2 - rows[i - 1].lambda2;
            ok &= m >= -COMPARISON_SLACK;
            margins.push(Some(m));
        }
    }
    Ok(ComparisonReport { rows, margins, verdict: Verdict::from_bool(ok) })
}

/// Members of the shape families compared against their volume ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ShapeFamily {
    /// Euclidean ellipse with axis ratio `a/b` and the given area.
    Ellipse { ratio: f64, area: f64 },
    /// `r(θ) = R(1 + ε cos kθ)` in geodesic polar coordinates.
    PerturbedDisk { kappa: f64, radius: f64, eps: f64, k: u32 },
    Disk { kappa: f64, radius: f64 },
}

impl ShapeFamily {
    pub fn mesh(&self, h: f64) -> Result<Mesh2D> {
        match *self {
            ShapeFamily::Ellipse { ratio, area } => {
                if !(ratio >= 1.0 && area > 0.0) {
                    return Err(Error::Domain(format!("ellipse needs ratio ≥ 1 and area > 0, got {ratio}, {area}")));
                }
                let a = (ratio * area / std::f64::consts::PI).sqrt();
                shapes::ellipse_mesh(0.0, a, a / ratio, h)
            }
            ShapeFamily::PerturbedDisk { kappa, radius, eps, k } => shapes::perturbed_disk_mesh(kappa, radius, eps, k, h),
            ShapeFamily::Disk { kappa, radius } => shapes::disk_mesh(kappa, radius, h),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ShapeFamily::Ellipse { ratio, .. } => format!("ellipse(a/b={ratio})"),
            ShapeFamily::PerturbedDisk { kappa, eps, k, .. } => format!("perturbed(kappa={kappa},eps={eps},k={k})"),
            ShapeFamily::Disk { kappa, .. } => format!("disk(kappa={kappa})"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeOptRow {
    pub shape: ShapeFamily,
    pub alpha: f64,
    pub volume: f64,
    pub radius_star: f64,
    pub sigma1_star: f64,
    pub lambda2_omega: f64,
    pub lambda2_ball: f64,
    /// `λ₂(Ω*) - λ₂(Ω)`.
    pub gap: f64,
    pub verdict: Verdict,
}

/// FEM `λ_{2,α}(Ω)` against the radial `λ_{2,α}(Ω*)` for every member and
/// α; a row passes when the gap is at least `-mesh_slack`. Rows with
/// `α < -σ_1(Ω*)` are not applicable.
pub fn shape_opt_sweep(members: &[ShapeFamily], alphas: &[f64], h: f64, mesh_slack: f64) -> Result<Vec<ShapeOptRow>> {
    let per_member: Vec<Vec<ShapeOptRow>> = members
        .par_iter()
        .map(|shape| -> Result<Vec<ShapeOptRow>> {
            let mesh = shape.mesh(h)?;
            let sys = assemble(&mesh)?;
            let volume = fem2d::domain_volume(&mesh);
            let radius_star = radius_for_volume(Curvature::new(mesh.kappa())?, 2, volume)?;
            let ball = BallSpec::new(mesh.kappa(), 2, radius_star)?;
            let sigma1_star = radial::steklov_ball(&ball)?;
            let mut rows = Vec::with_capacity(alphas.len());
            for &alpha in alphas {
                let mut row = ShapeOptRow {
                    shape: *shape,
                    alpha,
                    volume,
                    radius_star,
                    sigma1_star,
                    lambda2_omega: f64::NAN,
                    lambda2_ball: f64::NAN,
                    gap: f64::NAN,
                    verdict: Verdict::NotApplicable,
                };
                if alpha <= 0.0 && alpha >= -sigma1_star {
                    row.lambda2_omega = robin_eigs_system(&mesh, &sys, alpha, 2)?.eigenvalues[1];
                    row.lambda2_ball = radial::robin_eigenvalue_ball(&ball, alpha, Sector::Dipole)?;
                    row.gap = row.lambda2_ball - row.lambda2_omega;
                    row.verdict = Verdict::from_bool(row.gap >= -mesh_slack);
                }
                rows.push(row);
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_member.into_iter().flatten().collect())
}

/// `σ₁(B)` as `-α₀`, where `α₀` is the root of `α ↦ λ_{2,α}(B)` on
/// `[-1.5 σ₁, 0]`, located by bisection.
pub fn steklov_via_robin_root(ball: &BallSpec) -> Result<f64> {
    let sigma = radial::steklov_ball(ball)?;
    let f = |a: f64| radial::robin_eigenvalue_ball(ball, a, Sector::Dipole);
    let (mut lo, mut hi) = (-1.5 * sigma, 0.0);
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::RootNotBracketed { lo, hi });
    }
    while hi - lo > 1e-12 * sigma {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(-0.5 * (lo + hi))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonnegativeReport {
    pub verdict: Verdict,
    pub lambda2: f64,
    pub sigma1: f64,
}

/// `λ_{2,α}(B) ≥ 0` whenever `α ≥ -σ₁(B)`.
pub fn check_ball_nonnegative(ball: &BallSpec, alpha: f64) -> Result<NonnegativeReport> {
    let sigma1 = radial::steklov_ball(ball)?;
    if !(alpha <= 0.0) || alpha < -sigma1 * (1.0 + 1e-9) {
        return Ok(NonnegativeReport { verdict: Verdict::NotApplicable, lambda2: f64::NAN, sigma1 });
    }
    let lambda2 = radial::robin_eigenvalue_ball(ball, alpha, Sector::Dipole)?;
    Ok(NonnegativeReport { verdict: Verdict::from_bool(lambda2 >= -NONNEGATIVE_TOL), lambda2, sigma1 })
}

/// FEM on a disk mesh against the radial dipole value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossCheck {
    pub alpha: f64,
    pub vertices: usize,
    pub max_edge: f64,
    pub fem_lambda2: f64,
    pub fem_lambda3: f64,
    pub radial_lambda2: f64,
    /// `|fem_lambda2 - radial_lambda2|`.
    pub error: f64,
    /// False when the FEM second eigenvalue sits clearly below the dipole
    /// value, i.e. another sector would own `λ₂`.
    pub ordering_ok: bool,
}

/// Compare FEM eigenvalues on a mesh of `B_κ(R)` with the radial solver.
pub fn fem_cross_check(mesh: &Mesh2D, radius: f64, alpha: f64) -> Result<CrossCheck> {
    let ball = BallSpec::new(mesh.kappa(), 2, radius)?;
    let radial_lambda2 = radial::robin_eigenvalue_ball(&ball, alpha, Sector::Dipole)?;
    let eig = fem2d::robin_eigs_fem(mesh, alpha, 3)?;
    let (l2, l3) = (eig.eigenvalues[1], eig.eigenvalues[2]);
    let error = (l2 - radial_lambda2).abs();
    // the P1 error is one-sided to leading order; allow a generous band
    let band = 10.0 * (l3 - l2).abs() + 1e-2 * radial_lambda2.abs().max(1.0);
    Ok(CrossCheck {
        alpha,
        vertices: mesh.num_vertices(),
        max_edge: mesh.max_edge(),
        fem_lambda2: l2,
        fem_lambda3: l3,
        radial_lambda2,
        error,
        ordering_ok: l2 >= radial_lambda2 - band,
    })
}

/// Least-squares slope of `log e` against `log h`.
pub fn fitted_order(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(k: f64, n: usize, r: f64) -> BallSpec {
        BallSpec::new(k, n, r).unwrap()
    }

    fn first_mode(mesh: &Mesh2D, alpha: f64) -> Vec<f64> {
        fem2d::robin_eigs_fem(mesh, alpha, 1).unwrap().eigenvectors.remove(0)
    }

    #[test]
    fn steklov_root_examples() {
        assert!((steklov_via_robin_root(&ball(0.0, 2, 1.0)).unwrap() - 1.0).abs() < 1e-8);
        assert!((steklov_via_robin_root(&ball(0.0, 4, 0.5)).unwrap() - 2.0).abs() < 1e-8);
        let b = ball(-1.0, 2, 1.0);
        let s = steklov_via_robin_root(&b).unwrap();
        assert!((s - radial::steklov_ball(&b).unwrap()).abs() < 1e-8);
        assert!((s - 0.85092).abs() < 1e-5);
    }

    #[test]
    fn nonnegative_at_the_steklov_threshold() {
        let b = ball(-1.0, 3, 0.8);
        let s = radial::steklov_ball(&b).unwrap();
        let r = check_ball_nonnegative(&b, -s).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.lambda2.abs() < 1e-8);
        assert_eq!(check_ball_nonnegative(&b, -1.1 * s).unwrap().verdict, Verdict::NotApplicable);
        assert_eq!(check_ball_nonnegative(&b, 0.1).unwrap().verdict, Verdict::NotApplicable);
    }

    #[test]
    fn comparison_rows() {
        let r = comparison_sweep(1.0, 2, &[0.0], &[0.0, -2.0, -1.0]).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.rows.iter().map(|x| x.kappa).collect::<Vec<_>>(), vec![-2.0, -1.0, 0.0]);
        assert!(r.margins[1].unwrap() > 0.0 && r.margins[2].unwrap() > 0.0);
        let r = comparison_sweep(1.0, 3, &[-0.5], &[-2.0, -1.0, 0.0]).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let r = comparison_sweep(1.0, 2, &[-0.3], &[-1.0, -1.0, -1.0]).unwrap();
        assert!(r.margins.iter().flatten().all(|m| *m == 0.0));
        assert!(comparison_sweep(1.0, 2, &[0.5], &[0.0]).is_err());
    }

    #[test]
    fn center_of_disk_is_origin() {
        let mesh = shapes::disk_mesh(0.0, 1.0, 0.1).unwrap();
        let profile = extend_profile(&ball(0.0, 2, 1.0), 0.0).unwrap();
        let c = center_of_mass(&mesh, &first_mode(&mesh, 0.0), &profile).unwrap();
        assert!(c.residual <= COM_TOL);
        assert!(c.point[0].hypot(c.point[1]) < 1e-8, "{:?}", c.point);
    }

    #[test]
    fn center_of_ellipse_is_center() {
        let mesh = shapes::ellipse_mesh(0.0, 1.3, 0.7, 0.1).unwrap();
        let profile = extend_profile(&ball(0.0, 2, 1.0), -0.5).unwrap();
        let c = center_of_mass(&mesh, &first_mode(&mesh, -0.5), &profile).unwrap();
        assert!(c.point[0].hypot(c.point[1]) < 1e-8, "{:?}", c.point);
    }

    #[test]
    fn center_moves_with_euclidean_translation() {
        let mesh = shapes::ellipse_mesh(0.0, 1.2, 0.8, 0.1).unwrap();
        let profile = extend_profile(&ball(0.0, 2, 1.0), -0.3).unwrap();
        let c0 = center_of_mass(&mesh, &first_mode(&mesh, -0.3), &profile).unwrap();
        let shift = [0.4, -0.25];
        let moved = shapes::translate_mesh(&mesh, shift).unwrap();
        let c1 = center_of_mass(&moved, &first_mode(&moved, -0.3), &profile).unwrap();
        assert!((c1.point[0] - c0.point[0] - shift[0]).abs() < 1e-8);
        assert!((c1.point[1] - c0.point[1] - shift[1]).abs() < 1e-8);
    }

    #[test]
    fn center_follows_hyperbolic_translation() {
        let mesh = shapes::disk_mesh(-1.0, 0.8, 0.08).unwrap();
        let c = [0.3, 0.2];
        let moved = shapes::translate_mesh(&mesh, c).unwrap();
        let profile = extend_profile(&ball(-1.0, 2, 0.8), -0.4).unwrap();
        let c0 = center_of_mass(&mesh, &first_mode(&mesh, -0.4), &profile).unwrap();
        let c1 = center_of_mass(&moved, &first_mode(&moved, -0.4), &profile).unwrap();
        let back = model::translate_to_origin(-1.0, c, c1.point);
        // the meshes are congruent only up to the P1 discretization
        let d = (back[0] - c0.point[0]).hypot(back[1] - c0.point[1]);
        assert!(d < 1e-3, "{d}");
        assert!(c1.residual <= COM_TOL);
    }

    #[test]
    fn chain_on_disk_closes() {
        let mesh = shapes::disk_mesh(0.0, 1.0, 0.08).unwrap();
        let r = inequality_chain(&mesh, -0.5).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(r.max_gap() <= r.mesh_error_bound + r.slack, "{r:?}");
        assert!(r.mesh_error_bound < 1e-1);
    }

    #[test]
    fn chain_at_neumann_has_equal_middle_link() {
        let mesh = shapes::ellipse_mesh(0.0, 1.4, 1.0 / 1.4, 0.08).unwrap();
        let r = inequality_chain(&mesh, 0.0).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(r.margins[1].abs() < 1e-12 * r.lambda2_ball);
        assert!(r.margins[0] + r.margins[2] > 0.1);
    }

    #[test]
    fn chain_outside_hypothesis_is_not_applicable() {
        let mesh = shapes::disk_mesh(0.0, 1.0, 0.2).unwrap();
        assert_eq!(inequality_chain(&mesh, -1.5).unwrap().verdict, Verdict::NotApplicable);
        assert_eq!(inequality_chain(&mesh, 0.5).unwrap().verdict, Verdict::NotApplicable);
    }

    #[test]
    fn order_fit_recovers_slope() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|x| 3.0 * x * x).collect();
        assert!((fitted_order(&h, &e) - 2.0).abs() < 1e-12);
    }
}
