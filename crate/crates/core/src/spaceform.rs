//! Constant-curvature geometry: the generalized sine `sn_κ`, its derivatives,
//! and volumes of geodesic balls in the simply connected space form `M_κ^n`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;

/// Below this magnitude `sn_κ` is evaluated from its Taylor series in `κ`.
pub const KAPPA_SERIES_THRESHOLD: f64 = 1e-10;

const VOLUME_QUAD_TOL: f64 = 1e-12;

/// Sectional curvature `κ` of a space form (units 1/length²).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Curvature(f64);

impl Curvature {
    pub fn new(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::Domain(format!("curvature must be finite, got {kappa}")));
        }
        Ok(Curvature(kappa))
    }

    pub const FLAT: Curvature = Curvature(0.0);

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Largest admissible radius: `π/√κ` for `κ > 0`, infinite otherwise.
    pub fn max_radius(self) -> f64 {
        if self.0 > 0.0 {
            PI / self.0.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// `sn_κ(t)` without domain checks.
    #[inline]
    pub fn sn(self, t: f64) -> f64 {
        let k = self.0;
        if k.abs() < KAPPA_SERIES_THRESHOLD {
            sn_series(k, t)
        } else if k > 0.0 {
            let s = k.sqrt();
            (s * t).sin() / s
        } else {
            let s = (-k).sqrt();
            (s * t).sinh() / s
        }
    }

    /// `sn_κ'(t)` without domain checks.
    #[inline]
    pub fn sn_prime(self, t: f64) -> f64 {
        let k = self.0;
        if k.abs() < KAPPA_SERIES_THRESHOLD {
            sn_prime_series(k, t)
        } else if k > 0.0 {
            (k.sqrt() * t).cos()
        } else {
            ((-k).sqrt() * t).cosh()
        }
    }

    /// `sn_κ''(t) = -κ sn_κ(t)`.
    #[inline]
    pub fn sn_second(self, t: f64) -> f64 {
        -self.0 * self.sn(t)
    }

    /// `sn_κ'(t) / sn_κ(t)` without domain checks.
    #[inline]
    pub fn cot(self, t: f64) -> f64 {
        let k = self.0;
        if k.abs() < KAPPA_SERIES_THRESHOLD {
            sn_prime_series(k, t) / sn_series(k, t)
        } else if k > 0.0 {
            let s = k.sqrt();
            s / (s * t).tan()
        } else {
            let s = (-k).sqrt();
            s / (s * t).tanh()
        }
    }

    fn check_arg(self, t: f64) -> Result<()> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("sn argument must be finite and >= 0, got {t}")));
        }
        if t > self.max_radius() {
            return Err(Error::Domain(format!(
                "sn argument {t} exceeds pi/sqrt(kappa) = {} for kappa = {}",
                self.max_radius(),
                self.0
            )));
        }
        Ok(())
    }
}

// sn = t Σ (-κ t²)^k / (2k+1)!
fn sn_series(k: f64, t: f64) -> f64 {
    let x = -k * t * t;
    let mut term = t;
    let mut sum = t;
    for j in 1..40 {
        term *= x / ((2 * j) as f64 * (2 * j + 1) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

// sn' = Σ (-κ t²)^k / (2k)!
fn sn_prime_series(k: f64, t: f64) -> f64 {
    let x = -k * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..40 {
        term *= x / ((2 * j - 1) as f64 * (2 * j) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `sn_κ(t)`; the generalized sine solving `f'' + κ f = 0, f(0) = 0, f'(0) = 1`.
pub fn sn(kappa: Curvature, t: f64) -> Result<f64> {
    kappa.check_arg(t)?;
    Ok(kappa.sn(t))
}

pub fn sn_prime(kappa: Curvature, t: f64) -> Result<f64> {
    kappa.check_arg(t)?;
    Ok(kappa.sn_prime(t))
}

/// `sn_κ'(t)/sn_κ(t)`, the mean-curvature factor of geodesic spheres. Undefined at `t = 0`.
pub fn cot_ratio(kappa: Curvature, t: f64) -> Result<f64> {
    kappa.check_arg(t)?;
    if t == 0.0 {
        return Err(Error::Domain("cot_ratio is singular at t = 0".into()));
    }
    Ok(kappa.cot(t))
}

/// A geodesic ball `B_κ(R)` in the `n`-dimensional space form of curvature `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub kappa: Curvature,
    pub dim: usize,
    pub radius: f64,
}

impl BallSpec {
    pub fn new(kappa: f64, dim: usize, radius: f64) -> Result<Self> {
        let kappa = Curvature::new(kappa)?;
        if dim < 2 {
            return Err(Error::Domain(format!("dimension must be >= 2, got {dim}")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("radius must be positive, got {radius}")));
        }
        if kappa.value() > 0.0 && radius >= kappa.max_radius() {
            return Err(Error::Domain(format!(
                "radius {radius} must be below pi/sqrt(kappa) = {}",
                kappa.max_radius()
            )));
        }
        Ok(BallSpec { kappa, dim, radius })
    }

    pub fn with_radius(self, radius: f64) -> Result<Self> {
        BallSpec::new(self.kappa.value(), self.dim, radius)
    }
}

/// Area of the unit sphere `S^k ⊂ R^{k+1}`.
pub fn unit_sphere_area(k: usize) -> f64 {
    // |S^0| = 2, |S^1| = 2π, |S^{k+2}| = 2π/(k+1) |S^k|
    let mut a = if k.is_multiple_of(2) { 2.0 } else { 2.0 * PI };
    let mut j = k % 2;
    while j < k {
        a *= 2.0 * PI / (j + 1) as f64;
        j += 2;
    }
    a
}

fn volume_unchecked(kappa: Curvature, dim: usize, radius: f64) -> f64 {
    let p = (dim - 1) as i32;
    let scale = kappa.sn(radius).abs().max(1e-300).powi(p) * radius;
    let tol = VOLUME_QUAD_TOL * scale.max(1.0);
    unit_sphere_area(dim - 1) * integrate_adaptive(|t| kappa.sn(t).powi(p), 0.0, radius, tol)
}

/// `|B_κ(R)| = ω_{n-1} ∫_0^R sn_κ^{n-1}(t) dt`.
pub fn ball_volume(b: &BallSpec) -> f64 {
    volume_unchecked(b.kappa, b.dim, b.radius)
}

/// `|∂B_κ(R)| = ω_{n-1} sn_κ^{n-1}(R)`.
pub fn ball_area(b: &BallSpec) -> f64 {
    unit_sphere_area(b.dim - 1) * b.kappa.sn(b.radius).powi(b.dim as i32 - 1)
}

/// Radius of the geodesic ball with the given volume.
pub fn radius_for_volume(kappa: Curvature, dim: usize, volume: f64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::Domain(format!("dimension must be >= 2, got {dim}")));
    }
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(Error::Domain(format!("volume must be positive, got {volume}")));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    if kappa.value() > 0.0 {
        hi = kappa.max_radius();
        let max = volume_unchecked(kappa, dim, hi);
        if volume >= max {
            return Err(Error::UnreachableVolume { volume, max });
        }
    } else {
        while volume_unchecked(kappa, dim, hi) < volume {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::UnreachableVolume { volume, max: f64::INFINITY });
            }
        }
    }
    // Newton on V(R) - volume, safeguarded by the bracket [lo, hi].
    let omega = unit_sphere_area(dim - 1);
    let mut r = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = volume_unchecked(kappa, dim, r) - volume;
        if f.abs() <= 1e-13 * volume {
            return Ok(r);
        }
        if f > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let df = omega * kappa.sn(r).powi(dim as i32 - 1);
        let mut next = r - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - r).abs() <= 1e-16 * r {
            return Ok(next);
        }
        r = next;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    // power-series oracles, deliberately independent of std's sinh/cosh
    fn sinh_series(x: f64) -> f64 {
        let (mut term, mut sum) = (x, x);
        for k in 1..30 {
            term *= x * x / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
        }
        sum
    }
    fn cosh_series(x: f64) -> f64 {
        let (mut term, mut sum) = (1.0, 1.0);
        for k in 1..30 {
            term *= x * x / ((2 * k - 1) as f64 * (2 * k) as f64);
            sum += term;
        }
        sum
    }

    fn k(v: f64) -> Curvature {
        Curvature::new(v).unwrap()
    }

    #[test]
    fn sn_examples() {
        assert_eq!(sn(k(0.0), 2.0).unwrap(), 2.0);
        assert!((sn(k(1.0), PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
        let oracle = sinh_series(1.0);
        assert!((sn(k(-1.0), 1.0).unwrap() - oracle).abs() < 1e-14);
        assert!((oracle - 1.175_20).abs() < 1e-5);
    }

    #[test]
    fn sn_rejects_beyond_antipode() {
        assert!(matches!(sn(k(1.0), 3.2), Err(Error::Domain(_))));
        assert!(sn(k(1.0), PI).is_ok());
        assert!(sn(k(0.0), -1.0).is_err());
    }

    #[test]
    fn cot_ratio_examples() {
        assert!((cot_ratio(k(0.0), 3.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let oracle = cosh_series(1.0) / sinh_series(1.0);
        assert!((cot_ratio(k(-1.0), 1.0).unwrap() - oracle).abs() < 1e-14);
        assert!((oracle - 1.313_04).abs() < 1e-5);
        assert!(cot_ratio(k(-1.0), 1.0).unwrap() > cot_ratio(k(-1.0), 2.0).unwrap());
        assert!(cot_ratio(k(-1.0), 0.0).is_err());
    }

    #[test]
    fn cot_ratio_behaves_like_inverse_t_near_zero() {
        for kv in [-3.0, -1.0, 0.0, 1.0, 2.0] {
            let t = 1e-6;
            assert!((cot_ratio(k(kv), t).unwrap() * t - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sn_continuous_across_zero_curvature() {
        for t in [0.1, 1.0, 3.0, 7.0] {
            assert_eq!(k(0.0).sn(t), t);
            assert!((k(1e-8).sn(t) - t).abs() < 1e-6 * t.powi(3));
            assert!((k(-1e-8).sn(t) - t).abs() < 1e-6 * t.powi(3));
            // just above the series threshold the closed form agrees with the series
            let kv = 1.01e-10;
            assert!((k(kv).sn(t) - sn_series(kv, t)).abs() < 1e-14 * t);
            assert!((k(-kv).sn(t) - sn_series(-kv, t)).abs() < 1e-14 * t);
        }
    }

    #[test]
    fn sn_wronskian_identity_on_grid() {
        for &kv in &[-4.0, -1.0, -0.25, -1e-11, 0.0, 1e-11, 0.5, 1.0, 2.0] {
            let c = k(kv);
            for i in 1..=40 {
                let t = i as f64 * 0.05;
                if t >= c.max_radius() {
                    continue;
                }
                let w = c.sn(t) * c.sn_second(t) - c.sn_prime(t).powi(2);
                let scale = c.sn_prime(t).powi(2).max(1.0);
                assert!((w + 1.0).abs() < 1e-12 * scale, "kappa={kv} t={t} w={w}");
            }
        }
    }

    #[test]
    fn ball_volume_examples() {
        let b = BallSpec::new(0.0, 2, 1.0).unwrap();
        assert!((ball_volume(&b) - PI).abs() < 1e-12);
        let b = BallSpec::new(0.0, 3, 2.0).unwrap();
        assert!((ball_volume(&b) - 32.0 * PI / 3.0).abs() < 1e-11);
        let b = BallSpec::new(-1.0, 2, 1.0).unwrap();
        let oracle = 2.0 * PI * (cosh_series(1.0) - 1.0);
        assert!((ball_volume(&b) - oracle).abs() < 1e-12);
        assert!((oracle - 3.412_28).abs() < 1e-5);
    }

    #[test]
    fn ball_area_and_sphere_constants() {
        assert!((unit_sphere_area(1) - 2.0 * PI).abs() < 1e-15);
        assert!((unit_sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 2.0 * PI * PI).abs() < 1e-14);
        assert!((unit_sphere_area(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        let b = BallSpec::new(0.0, 3, 2.0).unwrap();
        assert!((ball_area(&b) - 16.0 * PI).abs() < 1e-12);
        // full unit sphere S^2 as a cap of radius π (limit)
        let c = k(1.0);
        let v = volume_unchecked(c, 2, PI);
        assert!((v - 4.0 * PI).abs() < 1e-11);
    }

    #[test]
    fn ball_spec_invariants() {
        assert!(BallSpec::new(1.0, 2, 3.2).is_err());
        assert!(BallSpec::new(0.0, 1, 1.0).is_err());
        assert!(BallSpec::new(0.0, 2, 0.0).is_err());
        assert!(BallSpec::new(f64::NAN, 2, 1.0).is_err());
    }

    #[test]
    fn radius_for_volume_examples() {
        assert!((radius_for_volume(k(0.0), 2, PI).unwrap() - 1.0).abs() < 1e-12);
        assert!((radius_for_volume(k(0.0), 3, 4.0 * PI / 3.0).unwrap() - 1.0).abs() < 1e-12);
        let v = 2.0 * PI * (cosh_series(1.0) - 1.0);
        assert!((radius_for_volume(k(-1.0), 2, v).unwrap() - 1.0).abs() < 1e-12);
        assert!((radius_for_volume(k(-1.0), 2, 3.4127).unwrap() - 1.0).abs() < 1e-3);
        assert!(matches!(
            radius_for_volume(k(1.0), 2, 4.0 * PI + 0.1),
            Err(Error::UnreachableVolume { .. })
        ));
    }

    #[test]
    fn volume_round_trip_and_monotone() {
        for &kv in &[-2.0, -1.0, 0.0, 0.5] {
            for dim in 2..=5 {
                let mut prev = 0.0;
                for i in 1..=8 {
                    let r = 0.3 * i as f64;
                    let Ok(b) = BallSpec::new(kv, dim, r) else { continue };
                    let v = ball_volume(&b);
                    assert!(v > prev);
                    prev = v;
                    let back = radius_for_volume(b.kappa, dim, v).unwrap();
                    assert!((back - r).abs() < 1e-10 * r.max(1.0), "k={kv} n={dim} r={r} back={back}");
                }
            }
        }
    }
}
