//! Radial mode ODEs on geodesic balls and the shooting method for their
//! Robin and Steklov eigenvalues.
//!
//! On `B_κ(R)` every eigenfunction separates as `F(r) Y(θ)` with `Y` a
//! spherical harmonic of degree `ℓ`. The radial factor solves
//!
//! ```text
//! F'' + (n-1) (sn'/sn) F' + (λ - ℓ(ℓ+n-2)/sn²) F = 0
//! ```
//!
//! with `F(0) = 0, F'(0) = 1` for `ℓ = 1` and `F(0) = 1, F'(0) = 0` for `ℓ = 0`.
//! The Robin condition becomes `F'(R) + α F(R) = 0`. The first root in the
//! `ℓ = 0` sector is `λ_{1,α}` and the first root in the `ℓ = 1` sector is
//! `λ_{2,α}` (for `α ≤ 0`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, Output, State, Tolerances};
use crate::quadrature::simpson_nonuniform;
use crate::spaceform::BallSpec;

/// Start of integration as a fraction of the radius; the regular singular point
/// at `r = 0` is bridged with a Taylor expansion.
pub const START_FRACTION: f64 = 1e-6;

/// Absolute tolerance of the eigenvalue bisection.
pub const LAMBDA_TOL: f64 = 1e-10;

const SCAN_STEPS: f64 = 200.0;

/// Angular sector `ℓ` of the separated eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// `ℓ = 0`: radial functions; first root is `λ_{1,α}`.
    Radial,
    /// `ℓ = 1`: `F(r)ψ_i(θ)` with linear coordinate functions `ψ_i`; first root is `λ_{2,α}`.
    Dipole,
}

impl Sector {
    pub fn from_index(l: u32) -> Result<Self> {
        match l {
            0 => Ok(Sector::Radial),
            1 => Ok(Sector::Dipole),
            _ => Err(Error::Unsupported(format!("angular sector {l}; only 0 and 1 are supported"))),
        }
    }

    pub fn index(self) -> u32 {
        match self {
            Sector::Radial => 0,
            Sector::Dipole => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialMode {
    pub sector: Sector,
    pub ball: BallSpec,
    pub lambda: f64,
    pub alpha: f64,
}

impl RadialMode {
    pub fn new(sector: Sector, ball: BallSpec, lambda: f64, alpha: f64) -> Self {
        RadialMode { sector, ball, lambda, alpha }
    }

    fn angular(&self) -> f64 {
        match self.sector {
            Sector::Radial => 0.0,
            Sector::Dipole => (self.ball.dim - 1) as f64,
        }
    }

    /// Right-hand side of the first-order system `(F, F')' = (F', F'')`.
    pub fn rhs(&self) -> impl Fn(f64, State) -> State {
        let kappa = self.ball.kappa;
        let nm1 = (self.ball.dim - 1) as f64;
        let ang = self.angular();
        let lambda = self.lambda;
        move |r, y| {
            let s = kappa.sn(r);
            let cot = kappa.cot(r);
            [y[1], -nm1 * cot * y[1] - (lambda - ang / (s * s)) * y[0]]
        }
    }

    /// `F''(r)` recovered from the ODE; exact limit at `r = 0`.
    pub fn second_derivative(&self, r: f64, value: f64, deriv: f64) -> f64 {
        if r == 0.0 {
            return self.series(0.0).2;
        }
        self.rhs()(r, [value, deriv])[1]
    }

    /// Taylor data `(F, F', F'')` at small `r`.
    fn series(&self, r: f64) -> (f64, f64, f64) {
        let n = self.ball.dim as f64;
        let kappa = self.ball.kappa.value();
        match self.sector {
            Sector::Dipole => {
                let c3 = (2.0 * (n - 1.0) * kappa / 3.0 - self.lambda) / (2.0 * (n + 2.0));
                (r + c3 * r.powi(3), 1.0 + 3.0 * c3 * r * r, 6.0 * c3 * r)
            }
            Sector::Radial => {
                let d2 = -self.lambda / (2.0 * n);
                (1.0 + d2 * r * r, 2.0 * d2 * r, 2.0 * d2)
            }
        }
    }

    fn initial(&self) -> State {
        match self.sector {
            Sector::Dipole => [0.0, 1.0],
            Sector::Radial => [1.0, 0.0],
        }
    }
}

/// Sampled solution of a radial mode ODE on `[0, R]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    pub end_value: f64,
    pub end_deriv: f64,
}

impl RadialProfile {
    /// Number of sign changes of the sampled values on `(0, R]`.
    pub fn interior_sign_changes(&self) -> usize {
        let mut count = 0;
        let mut last = 0.0f64;
        for &v in self.values.iter().skip(1) {
            if v != 0.0 {
                if last != 0.0 && v.signum() != last.signum() {
                    count += 1;
                }
                last = v;
            }
        }
        count
    }

    /// Build a profile from arbitrary samples of a test function `v` (for the Rayleigh quotient).
    pub fn from_samples(grid: Vec<f64>, values: Vec<f64>, derivs: Vec<f64>) -> Result<Self> {
        if grid.len() < 3 || grid.len() != values.len() || grid.len() != derivs.len() {
            return Err(Error::Domain("profile samples must have equal length >= 3".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("profile grid must be strictly increasing".into()));
        }
        let end_value = *values.last().unwrap();
        let end_deriv = *derivs.last().unwrap();
        Ok(RadialProfile { grid, values, derivs, end_value, end_deriv })
    }
}

fn check_mode(mode: &RadialMode) -> Result<()> {
    if !mode.lambda.is_finite() || !mode.alpha.is_finite() {
        return Err(Error::Domain("lambda and alpha must be finite".into()));
    }
    Ok(())
}

fn assemble_profile(mode: &RadialMode, traj: ode::Trajectory) -> RadialProfile {
    let init = mode.initial();
    let mut grid = Vec::with_capacity(traj.t.len() + 1);
    let mut values = Vec::with_capacity(traj.t.len() + 1);
    let mut derivs = Vec::with_capacity(traj.t.len() + 1);
    grid.push(0.0);
    values.push(init[0]);
    derivs.push(init[1]);
    for (t, y) in traj.t.iter().zip(&traj.y) {
        grid.push(*t);
        values.push(y[0]);
        derivs.push(y[1]);
    }
    let end_value = *values.last().unwrap();
    let end_deriv = *derivs.last().unwrap();
    RadialProfile { grid, values, derivs, end_value, end_deriv }
}

/// Integrate the sector ODE on `[0, R]`, returning every accepted step.
pub fn integrate_radial(mode: &RadialMode) -> Result<RadialProfile> {
    integrate_radial_with(mode, Tolerances::default(), None)
}

/// Integrate and sample at the given increasing points in `(0, R]`; the profile ends at the last point.
pub fn integrate_radial_at(mode: &RadialMode, points: &[f64]) -> Result<RadialProfile> {
    integrate_radial_with(mode, Tolerances::default(), Some(points))
}

pub fn integrate_radial_with(mode: &RadialMode, tol: Tolerances, points: Option<&[f64]>) -> Result<RadialProfile> {
    check_mode(mode)?;
    let r_end = mode.ball.radius;
    let eps = START_FRACTION * r_end;
    let (f, fp, _) = mode.series(eps);
    let rhs = mode.rhs();
    let traj = match points {
        None => ode::integrate(rhs, eps, [f, fp], r_end, tol, Output::Steps)?,
        Some(p) => {
            if p.iter().any(|&x| x <= 0.0 || x > r_end) || p.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Domain("sample points must be increasing and lie in (0, R]".into()));
            }
            // points at or below the series start are filled from the expansion
            let split = p.partition_point(|&x| x <= eps);
            let stops = &p[split..];
            let last = stops.last().copied().unwrap_or(eps);
            let mut traj = ode::integrate(rhs, eps, [f, fp], last, tol, Output::At(stops))?;
            // drop the start sample, prepend series samples
            traj.t.remove(0);
            traj.y.remove(0);
            let mut t: Vec<f64> = p[..split].to_vec();
            let mut y: Vec<State> = p[..split]
                .iter()
                .map(|&x| {
                    let (a, b, _) = mode.series(x);
                    [a, b]
                })
                .collect();
            t.append(&mut traj.t);
            y.append(&mut traj.y);
            traj.t = t;
            traj.y = y;
            return Ok(assemble_profile(mode, traj));
        }
    };
    Ok(assemble_profile(mode, traj))
}

/// `(F(R), F'(R))` with the inner part `[0, r_start]` integrated to tight
/// tolerance and `[r_start, R]` covered by `steps` fixed fifth-order steps.
/// Used to measure the convergence order of the propagator.
pub fn integrate_radial_fixed(mode: &RadialMode, r_start: f64, steps: usize) -> Result<State> {
    check_mode(mode)?;
    let inner = integrate_radial_with(mode, Tolerances { rtol: 1e-13, atol: 1e-13 }, Some(&[r_start]))?;
    let y0 = [*inner.values.last().unwrap(), *inner.derivs.last().unwrap()];
    Ok(ode::integrate_fixed(mode.rhs(), r_start, y0, mode.ball.radius, steps))
}

/// Robin shooting residual `F'(R) + α F(R)`.
pub fn shoot_residual(mode: &RadialMode) -> Result<f64> {
    let p = integrate_radial(mode)?;
    Ok(p.end_deriv + mode.alpha * p.end_value)
}

/// A converged ball eigenvalue together with solver statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallEigen {
    pub lambda: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
    pub bisection_steps: usize,
}

fn scan_upper(ball: &BallSpec, sector: Sector) -> f64 {
    let j = sector.index() as f64 + ball.dim as f64 / 2.0;
    let hyperbolic_shift = 0.25 * ((ball.dim - 1) as f64).powi(2) * (-ball.kappa.value()).max(0.0);
    4.0 * (j + 2.0).powi(2) * std::f64::consts::PI.powi(2) / ball.radius.powi(2) + hyperbolic_shift
}

/// Full Robin eigenvalue solve on a ball in the given sector.
pub fn solve_robin_ball(ball: &BallSpec, alpha: f64, sector: Sector) -> Result<BallEigen> {
    if !alpha.is_finite() {
        return Err(Error::Domain("alpha must be finite".into()));
    }
    if alpha > 0.0 {
        return Err(Error::Unsupported(format!("Robin parameter alpha = {alpha} > 0")));
    }
    let upper = scan_upper(ball, sector);
    let step = upper / SCAN_STEPS;
    let mut evaluations = 0usize;
    let mut eval = |lambda: f64| -> Result<(f64, usize)> {
        evaluations += 1;
        let p = integrate_radial(&RadialMode::new(sector, *ball, lambda, alpha))?;
        Ok((p.end_deriv + alpha * p.end_value, p.interior_sign_changes()))
    };

    // Lower end: a λ with a nodeless profile and positive residual lies below the
    // first root of the sector; push further down until that holds.
    let mut lo = -(4.0 * alpha * alpha).max(0.0) - step;
    let (mut f_lo, mut z_lo) = eval(lo)?;
    let mut widen = 0;
    while !(f_lo > 0.0 && z_lo == 0) {
        widen += 1;
        if widen > 60 {
            return Err(Error::BracketNotFound { lo, hi: upper });
        }
        lo = 2.0 * lo - step;
        (f_lo, z_lo) = eval(lo)?;
    }

    let mut a = lo;
    let mut fa = f_lo;
    let mut bracket = None;
    let mut x = lo;
    while x < upper {
        let b = (x + step).min(upper);
        let (fb, _) = eval(b)?;
        if fb == 0.0 || fb.signum() != fa.signum() {
            bracket = Some((a, b, fa, fb));
            break;
        }
        a = b;
        fa = fb;
        x = b;
    }
    let Some((mut a, mut b, mut fa, mut fb)) = bracket else {
        return Err(Error::BracketNotFound { lo, hi: upper });
    };
    let found = (a, b);
    let mut bisection_steps = 0;
    while b - a > LAMBDA_TOL && fb != 0.0 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let (fm, _) = eval(m)?;
        bisection_steps += 1;
        if fm == 0.0 {
            a = m;
            b = m;
            fa = 0.0;
            fb = 0.0;
            break;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    // closing secant step inside the final bracket
    let lambda = if fb == 0.0 {
        b
    } else if fa == 0.0 {
        a
    } else {
        let s = a - fa * (b - a) / (fb - fa);
        if s.is_finite() && s >= a && s <= b { s } else { 0.5 * (a + b) }
    };
    let profile = integrate_radial(&RadialMode::new(sector, *ball, lambda, alpha))?;
    evaluations += 1;
    if profile.interior_sign_changes() != 0 {
        return Err(Error::BracketNotFound { lo: found.0, hi: found.1 });
    }
    Ok(BallEigen {
        lambda,
        residual: profile.end_deriv + alpha * profile.end_value,
        bracket: found,
        evaluations,
        bisection_steps,
    })
}

/// `λ_{1,α}(B_κ(R))` for `sector = 0`, `λ_{2,α}(B_κ(R))` for `sector = 1`. Requires `α ≤ 0`.
pub fn robin_eigenvalue_ball(ball: &BallSpec, alpha: f64, sector: Sector) -> Result<f64> {
    Ok(solve_robin_ball(ball, alpha, sector)?.lambda)
}

/// First nonzero Steklov eigenvalue `σ_1(B_κ(R)) = F'(R)/F(R)` for the harmonic `ℓ = 1` profile.
pub fn steklov_ball(ball: &BallSpec) -> Result<f64> {
    let p = integrate_radial(&RadialMode::new(Sector::Dipole, *ball, 0.0, 0.0))?;
    Ok(p.end_deriv / p.end_value)
}

/// Dipole-sector Rayleigh quotient
///
/// ```text
/// [∫_0^R (v'² + (n-1) v²/sn²) sn^{n-1} dt + α v(R)² sn^{n-1}(R)] / ∫_0^R v² sn^{n-1} dt
/// ```
///
/// evaluated by composite Simpson quadrature on the sample grid.
pub fn rayleigh_radial(v: &RadialProfile, ball: &BallSpec, alpha: f64) -> Result<f64> {
    if v.grid[0] != 0.0 || v.values[0].abs() > 1e-12 {
        return Err(Error::Domain("test function must be sampled from r = 0 with v(0) = 0".into()));
    }
    if (v.grid.last().unwrap() - ball.radius).abs() > 1e-12 * ball.radius {
        return Err(Error::Domain("test function grid must end at the ball radius".into()));
    }
    let kappa = ball.kappa;
    let p = (ball.dim - 1) as i32;
    let nm1 = (ball.dim - 1) as f64;
    let mut num = Vec::with_capacity(v.grid.len());
    let mut den = Vec::with_capacity(v.grid.len());
    for i in 0..v.grid.len() {
        let t = v.grid[i];
        if t == 0.0 {
            num.push(0.0);
            den.push(0.0);
            continue;
        }
        let s = kappa.sn(t);
        let w = s.powi(p);
        let (f, df) = (v.values[i], v.derivs[i]);
        num.push((df * df + nm1 * f * f / (s * s)) * w);
        den.push(f * f * w);
    }
    let d = simpson_nonuniform(&v.grid, &den);
    if d == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let boundary = alpha * v.end_value * v.end_value * kappa.sn(ball.radius).powi(p);
    Ok((simpson_nonuniform(&v.grid, &num) + boundary) / d)
}
