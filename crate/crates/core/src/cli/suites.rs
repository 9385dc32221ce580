//! Verification suites and sweeps driven by a [`RunConfig`].

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Family, RunConfig};
use crate::error::{Error, Result};
use crate::fem2d::assemble;
use crate::profile::{self, Verdict};
use crate::spaceform::BallSpec;
use crate::verify::{self, ShapeFamily, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Prop21,
    Prop22,
    Hmono,
    Chain,
    Compare,
    Shapeopt,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Prop21 => "prop21",
            Suite::Prop22 => "prop22",
            Suite::Hmono => "hmono",
            Suite::Chain => "chain",
            Suite::Compare => "compare",
            Suite::Shapeopt => "shapeopt",
        }
    }
}

/// One line of a suite report. `margin` is positive when the check holds
/// with room to spare.
#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub label: String,
    pub verdict: Verdict,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<CheckLine>,
}

impl SuiteReport {
    pub fn count(&self, v: Verdict) -> usize {
        self.checks.iter().filter(|c| c.verdict == v).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Verdict::Fail) == 0
    }
}

fn balls(cfg: &RunConfig) -> Result<Vec<BallSpec>> {
    let mut out = Vec::new();
    for &k in &cfg.kappa {
        for &n in &cfg.dim {
            for &r in &cfg.radius {
                out.push(BallSpec::new(k, n, r).map_err(|e| Error::Parse(format!("invalid ball in config: {e}")))?);
            }
        }
    }
    Ok(out)
}

fn ball_label(b: &BallSpec, alpha: f64) -> String {
    format!("kappa={} dim={} radius={} alpha={}", b.kappa.value(), b.dim, b.radius, alpha)
}

/// Meshed domains described by the configuration.
pub fn members(cfg: &RunConfig) -> Result<Vec<ShapeFamily>> {
    if cfg.kappa.iter().any(|&k| k > 0.0) {
        return Err(Error::Parse("meshed domains need kappa ≤ 0".into()));
    }
    let mut out = Vec::new();
    match cfg.family {
        Family::Ball | Family::Disk => {
            for &kappa in &cfg.kappa {
                for &radius in &cfg.radius {
                    out.push(ShapeFamily::Disk { kappa, radius });
                }
            }
        }
        Family::Ellipse => {
            if cfg.kappa.iter().any(|&k| k != 0.0) {
                return Err(Error::Parse("ellipse family is Euclidean; set kappa=0".into()));
            }
            for &radius in &cfg.radius {
                for &ratio in &cfg.ratio {
                    out.push(ShapeFamily::Ellipse { ratio, area: std::f64::consts::PI * radius * radius });
                }
            }
        }
        Family::Perturbed => {
            for &kappa in &cfg.kappa {
                for &radius in &cfg.radius {
                    for &eps in &cfg.eps {
                        for &k in &cfg.mode_k {
                            out.push(ShapeFamily::PerturbedDisk { kappa, radius, eps, k });
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn ball_cells(cfg: &RunConfig) -> Result<Vec<(BallSpec, f64)>> {
    let alphas = cfg.alphas();
    Ok(balls(cfg)?.into_iter().flat_map(|b| alphas.iter().map(move |&a| (b, a))).collect())
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<SuiteReport> {
    let checks: Vec<CheckLine> = match suite {
        Suite::Prop21 => ball_cells(cfg)?
            .par_iter()
            .map(|&(b, a)| {
                let r = profile::check_profile_slope(&b, a)?;
                Ok(vec![
                    CheckLine {
                        label: format!("F' > 0 on [0,R]: {}", ball_label(&b, a)),
                        verdict: r.fprime_positive,
                        margin: r.min_fprime,
                    },
                    CheckLine {
                        label: format!("F'/F >= -alpha on (0,R]: {}", ball_label(&b, a)),
                        verdict: r.ratio_bound,
                        margin: r.worst_ratio_margin,
                    },
                ])
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect(),
        Suite::Prop22 => ball_cells(cfg)?
            .par_iter()
            .map(|&(b, a)| {
                let r = verify::check_ball_nonnegative(&b, a)?;
                Ok(CheckLine {
                    label: format!("lambda2 >= 0 for alpha >= -sigma1: {}", ball_label(&b, a)),
                    verdict: r.verdict,
                    margin: r.lambda2,
                })
            })
            .collect::<Result<_>>()?,
        Suite::Hmono => ball_cells(cfg)?
            .par_iter()
            .map(|&(b, a)| {
                let r = profile::check_h_monotone(&b, a, 3.0 * b.radius)?;
                Ok(CheckLine {
                    label: format!("H decreasing on (eps,3R]: {}", ball_label(&b, a)),
                    verdict: r.verdict,
                    margin: profile::MARGIN_TOL * r.scale - r.max_forward_difference,
                })
            })
            .collect::<Result<_>>()?,
        Suite::Chain => {
            let alphas = cfg.alphas();
            let cells: Vec<(ShapeFamily, f64)> =
                members(cfg)?.into_iter().flat_map(|m| alphas.iter().map(move |&a| (m, a))).collect();
            cells
                .par_iter()
                .map(|&(m, a)| {
                    let mesh = m.mesh(cfg.mesh_h)?;
                    let r = verify::inequality_chain(&mesh, a)?;
                    let allowance = r.slack + r.mesh_error_bound;
                    let margin = r.margins[..3].iter().map(|g| g + allowance).fold(r.slack - r.margins[3].abs(), f64::min);
                    Ok(CheckLine { label: format!("chain: {} alpha={a}", m.label()), verdict: r.verdict, margin })
                })
                .collect::<Result<_>>()?
        }
        Suite::Compare => {
            let alphas = cfg.alphas();
            let mut lines = Vec::new();
            for &n in &cfg.dim {
                for &r in &cfg.radius {
                    let rep = verify::comparison_sweep(r, n, &alphas, &cfg.kappa)?;
                    for (row, m) in rep.rows.iter().zip(&rep.margins) {
                        if let Some(m) = m {
                            lines.push(CheckLine {
                                label: format!("nondecreasing in kappa up to kappa={}: dim={n} radius={r} alpha={}", row.kappa, row.alpha),
                                verdict: Verdict::from_bool(*m >= -verify::COMPARISON_SLACK),
                                margin: *m,
                            });
                        }
                    }
                }
            }
            lines
        }
        Suite::Shapeopt => verify::shape_opt_sweep(&members(cfg)?, &cfg.alphas(), cfg.mesh_h, cfg.tolerance)?
            .into_iter()
            .map(|r| CheckLine {
                label: format!("lambda2(Omega) <= lambda2(ball): {} alpha={}", r.shape.label(), r.alpha),
                verdict: r.verdict,
                margin: r.gap,
            })
            .collect(),
    };
    Ok(SuiteReport { suite: suite.name(), checks })
}

/// Table rows: radial rows per `(κ, n, R, α)` for the ball family, FEM rows
/// per domain and α otherwise.
pub fn sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    if cfg.family == Family::Ball {
        return ball_cells(cfg)?.par_iter().map(|&(b, a)| verify::ball_row(&b, a)).collect();
    }
    let alphas = cfg.alphas();
    let per_member: Vec<Vec<SweepRow>> = members(cfg)?
        .par_iter()
        .map(|m| {
            let mesh = m.mesh(cfg.mesh_h)?;
            let sys = assemble(&mesh)?;
            alphas.iter().map(|&a| verify::fem_row(&mesh, &sys, a)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_member.into_iter().flatten().collect())
}
