//! Dormand–Prince 5(4) integrator for planar first-order systems.

use crate::error::{Error, Result};

pub type State = [f64; 2];

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order solution minus embedded fourth-order solution
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Order of the propagated (fifth-order) solution.
pub const ORDER: f64 = 5.0;

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-11, atol: 1e-11 }
    }
}

/// Sampled trajectory; `t` is strictly increasing.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub y: Vec<State>,
    pub steps: usize,
    pub rejected: usize,
}

/// Which points end up in the trajectory.
#[derive(Debug, Clone, Copy)]
pub enum Output<'a> {
    /// Every accepted step.
    Steps,
    /// Exactly the given increasing points in `(t0, t_end]`; steps are clamped to hit them.
    At(&'a [f64]),
}

#[inline]
fn stage<F: Fn(f64, State) -> State>(f: &F, t: f64, y: State, h: f64) -> (State, State, State) {
    let mut k = [[0.0; 2]; 7];
    k[0] = f(t, y);
    for s in 1..7 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            ys[0] += h * A[s][j] * kj[0];
            ys[1] += h * A[s][j] * kj[1];
        }
        k[s] = f(t + C[s] * h, ys);
    }
    // FSAL: row 7 of A are the fifth-order weights, so y_new is the last stage argument
    let mut y_new = y;
    let mut err = [0.0; 2];
    for s in 0..7 {
        if s < 6 {
            y_new[0] += h * A[6][s] * k[s][0];
            y_new[1] += h * A[6][s] * k[s][1];
        }
        err[0] += h * E[s] * k[s][0];
        err[1] += h * E[s] * k[s][1];
    }
    (y_new, err, k[6])
}

/// Adaptive integration of `y' = f(t, y)` from `t0` to `t_end`.
pub fn integrate<F: Fn(f64, State) -> State>(
    f: F,
    t0: f64,
    y0: State,
    t_end: f64,
    tol: Tolerances,
    output: Output<'_>,
) -> Result<Trajectory> {
    let mut traj = Trajectory { t: vec![t0], y: vec![y0], ..Default::default() };
    let span = t_end - t0;
    if span <= 0.0 {
        return Ok(traj);
    }
    let stops: &[f64] = match output {
        Output::Steps => &[],
        Output::At(p) => p,
    };
    let mut next_stop = 0;
    while next_stop < stops.len() && stops[next_stop] <= t0 {
        next_stop += 1;
    }
    let h_min = 1e-14 * span.max(t0.abs());
    let mut t = t0;
    let mut y = y0;
    let mut h = (span * 1e-3).min((t0.abs() + span) * 1e-2).max(h_min * 10.0);
    while t < t_end {
        let target = if next_stop < stops.len() { stops[next_stop].min(t_end) } else { t_end };
        let mut hit = false;
        let mut step = h;
        if t + step >= target - 1e-15 * target.abs() {
            step = target - t;
            hit = true;
        }
        let (y_new, e, _) = stage(&f, t, y, step);
        let mut err = 0.0;
        for i in 0..2 {
            let sc = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
            err += (e[i] / sc).powi(2);
        }
        err = (err / 2.0).sqrt();
        if !err.is_finite() {
            return Err(Error::Integration { r: t, reason: "non-finite solution".into() });
        }
        if err <= 1.0 {
            t = if hit { target } else { t + step };
            y = y_new;
            traj.steps += 1;
            match output {
                Output::Steps => {
                    traj.t.push(t);
                    traj.y.push(y);
                }
                Output::At(_) => {
                    if hit && next_stop < stops.len() && target == stops[next_stop].min(t_end) {
                        traj.t.push(t);
                        traj.y.push(y);
                        next_stop += 1;
                    }
                }
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // a clamped step says nothing about the natural step size
            h = if hit { h.max(step * fac) } else { step * fac };
        } else {
            traj.rejected += 1;
            h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            if h < h_min {
                return Err(Error::Integration { r: t, reason: "step size underflow".into() });
            }
        }
        if traj.steps + traj.rejected > 5_000_000 {
            return Err(Error::Integration { r: t, reason: "too many steps".into() });
        }
    }
    Ok(traj)
}

/// Fixed-step integration with the fifth-order Dormand–Prince propagator.
pub fn integrate_fixed<F: Fn(f64, State) -> State>(f: F, t0: f64, y0: State, t_end: f64, n: usize) -> State {
    let h = (t_end - t0) / n as f64;
    let mut y = y0;
    for i in 0..n {
        y = stage(&f, t0 + i as f64 * h, y, h).0;
    }
    y
}
