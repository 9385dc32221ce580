//! Conformal disk model of the two-dimensional space forms with `κ ≤ 0`.
//!
//! For `κ < 0` the metric is `ρ(x)²|dx|²` with `ρ(x) = 2/(1 + κ|x|²)` on the
//! disk `|x| < 1/√(-κ)`; for `κ = 0` the model is the Euclidean plane itself.

use nalgebra::Complex;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

fn check(kappa: f64) -> Result<()> {
    if kappa > 0.0 || !kappa.is_finite() {
        return Err(Error::Unsupported(format!("disk model needs κ ≤ 0, got {kappa}")));
    }
    Ok(())
}

/// Conformal factor `ρ(x)`.
#[inline]
pub fn conformal_factor(kappa: f64, x: Point) -> f64 {
    if kappa < 0.0 {
        2.0 / (1.0 + kappa * (x[0] * x[0] + x[1] * x[1]))
    } else {
        1.0
    }
}

/// Euclidean radius of the model disk (infinite when `κ = 0`).
pub fn model_bound(kappa: f64) -> f64 {
    if kappa < 0.0 {
        1.0 / (-kappa).sqrt()
    } else {
        f64::INFINITY
    }
}

/// Model radius of the geodesic circle of radius `r` about the origin.
pub fn model_radius(kappa: f64, r: f64) -> Result<f64> {
    check(kappa)?;
    Ok(if kappa < 0.0 {
        let c = (-kappa).sqrt();
        (0.5 * c * r).tanh() / c
    } else {
        r
    })
}

/// Geodesic distance from the origin of a point at model radius `s`.
pub fn geodesic_radius(kappa: f64, s: f64) -> Result<f64> {
    check(kappa)?;
    if kappa < 0.0 {
        let c = (-kappa).sqrt();
        if c * s >= 1.0 {
            return Err(Error::Domain(format!("model radius {s} outside the model disk")));
        }
        Ok(2.0 * (c * s).atanh() / c)
    } else {
        Ok(s)
    }
}

fn cx(p: Point) -> Complex<f64> {
    Complex::new(p[0], p[1])
}

/// The orientation-preserving isometry taking the origin to `p` with
/// differential a positive multiple of the identity at the origin.
pub fn translate(kappa: f64, p: Point, x: Point) -> Point {
    if kappa < 0.0 {
        let c = (-kappa).sqrt();
        let a = cx(p) * c;
        let w = cx(x) * c;
        let z = (w + a) / (Complex::new(1.0, 0.0) + a.conj() * w) / c;
        [z.re, z.im]
    } else {
        [x[0] + p[0], x[1] + p[1]]
    }
}

/// Inverse of [`translate`]: takes `p` to the origin.
pub fn translate_to_origin(kappa: f64, p: Point, x: Point) -> Point {
    translate(kappa, [-p[0], -p[1]], x)
}

/// Geodesic distance `r_p(x)` and `exp_p⁻¹(x)/r_p(x)` expressed in the
/// orthonormal frame at `p` aligned with the coordinate axes.
/// The direction is `[0, 0]` when `x = p`.
pub fn polar_about(kappa: f64, p: Point, x: Point) -> (f64, Point) {
    let y = translate_to_origin(kappa, p, x);
    let s = y[0].hypot(y[1]);
    if s == 0.0 {
        return (0.0, [0.0, 0.0]);
    }
    let r = if kappa < 0.0 {
        let c = (-kappa).sqrt();
        2.0 * (c * s).min(1.0 - f64::EPSILON).atanh() / c
    } else {
        s
    };
    (r, [y[0] / s, y[1] / s])
}

/// `exp_p(v)` for a tangent vector given in the frame of [`polar_about`].
pub fn exp_at(kappa: f64, p: Point, v: Point) -> Point {
    let len = v[0].hypot(v[1]);
    if len == 0.0 {
        return p;
    }
    let s = if kappa < 0.0 {
        let c = (-kappa).sqrt();
        (0.5 * c * len).tanh() / c
    } else {
        len
    };
    translate(kappa, p, [v[0] / len * s, v[1] / len * s])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_radius_examples() {
        assert!((model_radius(-1.0, 1.0).unwrap() - 0.5f64.tanh()).abs() < 1e-15);
        assert!((model_radius(-1.0, 1.0).unwrap() - 0.46211715726).abs() < 1e-10);
        assert_eq!(model_radius(0.0, 1.7).unwrap(), 1.7);
        assert!(model_radius(1.0, 1.0).is_err());
        for k in [-0.3, -1.0, -4.0] {
            for r in [0.01, 0.5, 2.0] {
                let s = model_radius(k, r).unwrap();
                assert!((geodesic_radius(k, s).unwrap() - r).abs() < 1e-12 * r.max(1.0));
            }
        }
    }

    #[test]
    fn translation_is_an_isometry() {
        // ρ(T(x))|T'(x)| = ρ(x), checked by finite differences of the model distance
        let k = -1.0;
        let p = [0.3, -0.2];
        let (a, b) = ([0.1, 0.05], [-0.25, 0.4]);
        let d0 = polar_about(k, a, b).0;
        let d1 = polar_about(k, translate(k, p, a), translate(k, p, b)).0;
        assert!((d0 - d1).abs() < 1e-12);
        // the distance from the origin is the geodesic radius
        let x = [0.2, 0.1];
        let r = polar_about(k, [0.0, 0.0], x).0;
        assert!((r - geodesic_radius(k, x[0].hypot(x[1])).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn exp_inverts_polar() {
        for k in [0.0, -1.0, -2.5] {
            let p = [0.12, 0.2];
            let x = [-0.1, 0.3];
            let (r, d) = polar_about(k, p, x);
            let y = exp_at(k, p, [r * d[0], r * d[1]]);
            assert!((y[0] - x[0]).abs() < 1e-13 && (y[1] - x[1]).abs() < 1e-13, "κ={k}");
            let q = translate_to_origin(k, p, translate(k, p, x));
            assert!((q[0] - x[0]).abs() < 1e-14 && (q[1] - x[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn conformal_factor_at_origin() {
        assert_eq!(conformal_factor(-1.0, [0.0, 0.0]), 2.0);
        assert_eq!(conformal_factor(0.0, [5.0, 0.0]), 1.0);
    }
}
