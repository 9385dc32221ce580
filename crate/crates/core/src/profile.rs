//! The dipole profile of the comparison ball extended past its radius, the
//! potential `H`, and pointwise grid checks of the properties the
//! shape-optimization argument relies on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{self, RadialMode, RadialProfile, Sector};
use crate::spaceform::BallSpec;

/// Uniform intervals in the tabulation of the inner profile.
const TABLE_INTERVALS: usize = 4096;
/// Points used by the pointwise checks.
pub const CHECK_POINTS: usize = 10_000;

/// `F = F_1` on `[0, R]` (the `λ_{2,α}` dipole profile, `F'(0) = 1`) and
/// `F(r) = F_1(R) e^{-α(r-R)}` for `r > R`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtendedProfile {
    pub ball: BallSpec,
    pub alpha: f64,
    /// `λ_{2,α}(B_κ(R))`.
    pub lambda: f64,
    /// Uniform tabulation of `F_1` and `F_1'` on `[0, R]`.
    pub inner: RadialProfile,
    second: Vec<f64>,
    step: f64,
}

impl ExtendedProfile {
    /// `(F(r), F'(r))` for `r ≥ 0`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let big_r = self.ball.radius;
        if r >= big_r {
            let f = self.inner.end_value * (-self.alpha * (r - big_r)).exp();
            return (f, -self.alpha * f);
        }
        let r = r.max(0.0);
        let i = ((r / self.step) as usize).min(TABLE_INTERVALS - 1);
        let h = self.step;
        let t = (r - self.inner.grid[i]) / h;
        let (f0, d0, s0) = (self.inner.values[i], self.inner.derivs[i], self.second[i]);
        let (f1, d1, s1) = (self.inner.values[i + 1], self.inner.derivs[i + 1], self.second[i + 1]);
        quintic_hermite(t, h, [f0, d0, s0], [f1, d1, s1])
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    pub fn deriv(&self, r: f64) -> f64 {
        self.eval(r).1
    }

    /// `F(R)`.
    pub fn boundary_value(&self) -> f64 {
        self.inner.end_value
    }

    /// Relative mismatch between `F_1'(R)` and the outer slope `-α F_1(R)`.
    pub fn junction_mismatch(&self) -> f64 {
        let inner = self.inner.end_deriv;
        let outer = -self.alpha * self.inner.end_value;
        (inner - outer).abs() / inner.abs().max(self.inner.end_value.abs())
    }

    /// `H(r)` built from `F`; requires `r > 0`.
    pub fn h_value(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("H is evaluated on r > 0, got {r}")));
        }
        Ok(self.h_unchecked(r))
    }

    pub(crate) fn h_unchecked(&self, r: f64) -> f64 {
        let (f, df) = self.eval(r);
        h_from_parts(&self.ball, self.alpha, r, f, df)
    }

    /// `(n-1) F(r)²/sn_κ(r)²` with the `r → 0` limit `(n-1) F'(0)²`.
    pub fn angular_energy(&self, r: f64) -> f64 {
        let nm1 = (self.ball.dim - 1) as f64;
        if r < 1e-300 {
            return nm1;
        }
        let f = self.value(r);
        let s = self.ball.kappa.sn(r);
        nm1 * (f / s).powi(2)
    }
}

/// `H = F'² + (n-1)F²/sn² + 2αFF' + α(n-1)(sn'/sn)F²`.
pub fn h_from_parts(ball: &BallSpec, alpha: f64, r: f64, f: f64, df: f64) -> f64 {
    let nm1 = (ball.dim - 1) as f64;
    let s = ball.kappa.sn(r);
    let cot = ball.kappa.cot(r);
    df * df + nm1 * f * f / (s * s) + 2.0 * alpha * f * df + alpha * nm1 * cot * f * f
}

fn quintic_hermite(t: f64, h: f64, a: [f64; 3], b: [f64; 3]) -> (f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h5 = 0.5 * (t3 - 2.0 * t4 + t5);
    let d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let d2 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
    let d3 = -d0;
    let d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let d5 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
    let v = a[0] * h0 + h * a[1] * h1 + h * h * a[2] * h2 + b[0] * h3 + h * b[1] * h4 + h * h * b[2] * h5;
    let dv = (a[0] * d0 + b[0] * d3) / h + a[1] * d1 + b[1] * d4 + h * (a[2] * d2 + b[2] * d5);
    (v, dv)
}

/// Solve for `λ_{2,α}(B_κ(R))` and build the extended profile.
pub fn extend_profile(ball: &BallSpec, alpha: f64) -> Result<ExtendedProfile> {
    let lambda = radial::robin_eigenvalue_ball(ball, alpha, Sector::Dipole)?;
    extend_profile_with(ball, alpha, lambda)
}

/// Build the extended profile for an already known eigenvalue.
pub fn extend_profile_with(ball: &BallSpec, alpha: f64, lambda: f64) -> Result<ExtendedProfile> {
    let mode = RadialMode::new(Sector::Dipole, *ball, lambda, alpha);
    let step = ball.radius / TABLE_INTERVALS as f64;
    let points: Vec<f64> = (1..=TABLE_INTERVALS)
        .map(|i| if i == TABLE_INTERVALS { ball.radius } else { i as f64 * step })
        .collect();
    let inner = radial::integrate_radial_at(&mode, &points)?;
    let second = inner
        .grid
        .iter()
        .zip(inner.values.iter().zip(&inner.derivs))
        .map(|(&r, (&f, &df))| mode.second_derivative(r, f, df))
        .collect();
    let p = ExtendedProfile { ball: *ball, alpha, lambda, inner, second, step };
    let mismatch = p.junction_mismatch();
    if mismatch > 1e-9 {
        return Err(Error::Integration {
            r: ball.radius,
            reason: format!("profile slope does not match the Robin condition (relative {mismatch:e})"),
        });
    }
    Ok(p)
}

/// Outcome of a hypothesis-guarded check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_failure(self) -> bool {
        self == Verdict::Fail
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlopeReport {
    /// `F' > 0` on `[0, R]` (needs `α < 0`).
    pub fprime_positive: Verdict,
    /// `F'/F ≥ -α` on `(0, R]` (needs additionally `α ≥ -2 sn'(R)/sn(R)`).
    pub ratio_bound: Verdict,
    /// `min F'` over the grid, with `F'(0) = 1` normalization.
    pub min_fprime: f64,
    /// `min (F'/F + α)` over the grid.
    pub worst_ratio_margin: f64,
}

/// Margin below zero tolerated by the pointwise checks.
pub const MARGIN_TOL: f64 = 1e-10;

/// Check `F' > 0` and `F'/F ≥ -α` for the dipole profile on a uniform grid.
pub fn check_profile_slope(ball: &BallSpec, alpha: f64) -> Result<SlopeReport> {
    if !(alpha < 0.0) {
        return Ok(SlopeReport {
            fprime_positive: Verdict::NotApplicable,
            ratio_bound: Verdict::NotApplicable,
            min_fprime: f64::NAN,
            worst_ratio_margin: f64::NAN,
        });
    }
    let p = extend_profile(ball, alpha)?;
    let r_max = ball.radius;
    let mut min_fprime = f64::INFINITY;
    let mut worst = f64::INFINITY;
    for i in 0..CHECK_POINTS {
        let r = r_max * i as f64 / (CHECK_POINTS - 1) as f64;
        let (f, df) = p.eval(r);
        min_fprime = min_fprime.min(df);
        if r > 0.0 {
            worst = worst.min(df / f + alpha);
        }
    }
    let ratio_hyp = alpha >= -2.0 * ball.kappa.cot(ball.radius);
    Ok(SlopeReport {
        fprime_positive: Verdict::from_bool(min_fprime > 0.0),
        ratio_bound: if ratio_hyp { Verdict::from_bool(worst >= -MARGIN_TOL) } else { Verdict::NotApplicable },
        min_fprime,
        worst_ratio_margin: worst,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HMonotoneReport {
    pub verdict: Verdict,
    /// Largest `H(r_{i+1}) - H(r_i)` on the grid.
    pub max_forward_difference: f64,
    /// `|H(ε)|`.
    pub scale: f64,
    pub sigma1: f64,
}

/// Check that `H` is decreasing on `(ε, r_max]`, `ε = 10⁻⁶ R`, over a
/// geometrically clustered grid. Requires `κ ≤ 0` and `α ∈ [-σ_1(B), 0]`.
pub fn check_h_monotone(ball: &BallSpec, alpha: f64, r_max: f64) -> Result<HMonotoneReport> {
    let sigma1 = radial::steklov_ball(ball)?;
    // σ_1 carries solver error; α = -σ_1 itself belongs to the admissible range
    if ball.kappa.value() > 0.0 || alpha > 0.0 || alpha < -sigma1 * (1.0 + 1e-9) {
        return Ok(HMonotoneReport {
            verdict: Verdict::NotApplicable,
            max_forward_difference: f64::NAN,
            scale: f64::NAN,
            sigma1,
        });
    }
    if !(r_max > 0.0) {
        return Err(Error::Domain(format!("r_max must be positive, got {r_max}")));
    }
    let p = extend_profile(ball, alpha)?;
    let eps = radial::START_FRACTION * ball.radius;
    let grid = geometric_grid(eps, r_max, CHECK_POINTS);
    let hs: Vec<f64> = grid.iter().map(|&r| p.h_unchecked(r)).collect();
    let scale = hs[0].abs();
    let max_fd = hs.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    Ok(HMonotoneReport {
        verdict: Verdict::from_bool(max_fd <= MARGIN_TOL * scale),
        max_forward_difference: max_fd,
        scale,
        sigma1,
    })
}

/// `count` points from `lo` to `hi` with constant ratio.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count)
        .map(|i| if i == count - 1 { hi } else { lo * (ratio * i as f64).exp() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(k: f64, n: usize, r: f64) -> BallSpec {
        BallSpec::new(k, n, r).unwrap()
    }

    #[test]
    fn outer_rule_examples() {
        let p = extend_profile(&ball(0.0, 2, 1.0), 0.0).unwrap();
        let f1 = p.boundary_value();
        for r in [1.0, 1.5, 3.0, 10.0] {
            assert_eq!(p.value(r), f1);
            assert_eq!(p.deriv(r), 0.0);
        }
        let p = extend_profile(&ball(0.0, 2, 1.0), -1.0).unwrap();
        assert!((p.value(2.0) / p.value(1.0) - std::f64::consts::E).abs() < 1e-12);
        // λ = 0 here, so F = r exactly inside
        assert!((p.value(0.5) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn c1_junction() {
        for (k, n, r, a) in [(0.0, 2, 1.0, -1.0), (-1.0, 3, 0.8, -0.4), (-2.0, 2, 1.5, 0.0)] {
            let p = extend_profile(&ball(k, n, r), a).unwrap();
            assert!(p.junction_mismatch() < 1e-9);
            let (fl, dl) = p.eval(r * (1.0 - 1e-12));
            let (fr, dr) = p.eval(r * (1.0 + 1e-12));
            assert!((fl - fr).abs() < 1e-9 * fl.abs());
            assert!((dl - dr).abs() < 1e-9 * dl.abs().max(fl.abs()));
            assert!((p.deriv(r) - (-a * p.value(r))).abs() < 1e-9 * p.value(r));
        }
    }

    #[test]
    fn interpolation_matches_direct_integration() {
        let b = ball(-1.0, 3, 1.3);
        let p = extend_profile(&b, -0.5).unwrap();
        let pts = [0.001, 0.0173, 0.41, 0.777, 1.2999];
        let direct = radial::integrate_radial_at(&RadialMode::new(Sector::Dipole, b, p.lambda, -0.5), &pts).unwrap();
        for (i, &r) in pts.iter().enumerate() {
            let (f, df) = p.eval(r);
            // two independent adaptive runs agree to the integrator tolerance
            assert!((f - direct.values[i + 1]).abs() < 1e-9 * f.abs(), "r={r}");
            assert!((df - direct.derivs[i + 1]).abs() < 1e-9 * df.abs(), "r={r}");
        }
    }

    #[test]
    fn non_decreasing_for_nonpositive_alpha() {
        for (k, n, r, a) in [(0.0, 2, 1.0, 0.0), (-1.0, 2, 1.0, -0.5), (0.0, 4, 2.0, -0.8), (-0.5, 3, 1.0, -3.0)] {
            let p = extend_profile(&ball(k, n, r), a).unwrap();
            let mut prev = -1.0;
            for i in 0..=3000 {
                let x = 3.0 * r * i as f64 / 3000.0;
                let v = p.value(x);
                assert!(v >= prev - 1e-14, "κ={k} α={a} r={x}");
                prev = v;
            }
        }
    }

    #[test]
    fn h_value_examples() {
        let p = extend_profile(&ball(0.0, 2, 1.0), 0.0).unwrap();
        // rescale to F(R) = 1
        let f1 = p.boundary_value();
        assert!((p.h_value(2.0).unwrap() / (f1 * f1) - 0.25).abs() < 1e-14);
        assert!((p.h_value(4.0).unwrap() / (f1 * f1) - 1.0 / 16.0).abs() < 1e-14);
        assert!(p.h_value(0.0).is_err());

        // term-by-term recomputation at r = R for α = -1 (F = r, F' = 1 there)
        let p = extend_profile(&ball(0.0, 2, 1.0), -1.0).unwrap();
        let (f, df) = (p.value(1.0), p.deriv(1.0));
        let oracle = df * df + f * f - 2.0 * f * df - f * f;
        assert!((p.h_value(1.0).unwrap() - oracle).abs() < 1e-10);
        assert!((oracle - (-1.0)).abs() < 1e-8);
    }

    #[test]
    fn h_limit_at_origin_is_dimension() {
        for n in [2, 3, 5] {
            let p = extend_profile(&ball(-1.0, n, 1.0), -0.3).unwrap();
            assert!((p.h_value(1e-9).unwrap() - n as f64).abs() < 1e-6);
            assert!((p.angular_energy(0.0) - (n - 1) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn profile_slope_examples() {
        let r = check_profile_slope(&ball(0.0, 2, 1.0), -1.0).unwrap();
        assert_eq!(r.fprime_positive, Verdict::Pass);
        assert_eq!(r.ratio_bound, Verdict::Pass);
        let r = check_profile_slope(&ball(-1.0, 3, 1.0), -0.5).unwrap();
        assert_eq!((r.fprime_positive, r.ratio_bound), (Verdict::Pass, Verdict::Pass));
        let r = check_profile_slope(&ball(0.0, 2, 1.0), -0.01).unwrap();
        assert_eq!((r.fprime_positive, r.ratio_bound), (Verdict::Pass, Verdict::Pass));
        assert!(r.worst_ratio_margin >= -MARGIN_TOL);
        // hypotheses
        assert_eq!(check_profile_slope(&ball(0.0, 2, 1.0), 0.0).unwrap().fprime_positive, Verdict::NotApplicable);
        let r = check_profile_slope(&ball(0.0, 2, 1.0), -2.5).unwrap();
        assert_eq!(r.ratio_bound, Verdict::NotApplicable);
    }

    #[test]
    fn h_monotone_examples() {
        for (k, n, r, a, rmax) in [
            (0.0, 2, 1.0, 0.0, 3.0),
            (-1.0, 2, 1.0, -0.5, 3.0),
            (0.0, 3, 1.0, -1.0, 4.0),
        ] {
            let rep = check_h_monotone(&ball(k, n, r), a, rmax).unwrap();
            assert_eq!(rep.verdict, Verdict::Pass, "{rep:?}");
        }
        let rep = check_h_monotone(&ball(0.0, 2, 1.0), -1.5, 3.0).unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
        let rep = check_h_monotone(&ball(0.5, 2, 1.0), 0.0, 3.0).unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn steklov_bound_used_for_h_monotonicity() {
        // σ_1(B_κ(R)) ≤ 1/R ≤ 2 sn'(R)/sn(R) for κ ≤ 0
        for k in [0.0, -0.5, -1.0, -3.0] {
            for r in [0.3, 1.0, 2.5] {
                let b = ball(k, 2, r);
                let s = radial::steklov_ball(&b).unwrap();
                assert!(s <= 1.0 / r + 1e-12);
                assert!(1.0 / r <= 2.0 * b.kappa.cot(r) + 1e-12);
            }
        }
    }
}
