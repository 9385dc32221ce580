//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robinlab::fem2d::{refine, robin_eigs_fem};
use robinlab::profile::{check_h_monotone, check_profile_slope, Verdict};
use robinlab::radial::{robin_eigenvalue_ball, steklov_ball, Sector};
use robinlab::shapes::{disk_mesh, ellipse_mesh, rectangle_mesh};
use robinlab::spaceform::BallSpec;
use robinlab::verify::{
    comparison_sweep, fem_cross_check, fitted_order, inequality_chain, shape_opt_sweep, steklov_via_robin_root,
    ShapeFamily,
};

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

fn ball(k: f64, n: usize, r: f64) -> BallSpec {
    BallSpec::new(k, n, r).expect("valid ball")
}

fn lambda2(k: f64, n: usize, r: f64, alpha: f64) -> robinlab::Result<f64> {
    robin_eigenvalue_ball(&ball(k, n, r), alpha, Sector::Dipole)
}

/// `J_m(x)` by its power series.
fn bessel_j(m: u32, x: f64) -> f64 {
    let mut term = (0.5 * x).powi(m as i32) / (1..=m).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..60 {
        term *= -(0.25 * x * x) / (k as f64 * (k + m) as f64);
        sum += term;
    }
    sum
}

/// First positive zero of `J_1'` by bisection, with `2 J_1' = J_0 - J_2`.
fn first_zero_of_j1_prime() -> f64 {
    let f = |x: f64| bessel_j(0, x) - bessel_j(2, x);
    let (mut lo, mut hi) = (1.0, 2.5);
    assert!(f(lo) > 0.0 && f(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Balls with `κ ∈ [-2, 0]`, `n ∈ 2..=5`, `R ∈ [0.3, 2]`; every fifth has `κ = 0`.
fn sample_balls(seed: u64, count: usize) -> Vec<BallSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let k = if i % 5 == 0 { 0.0 } else { rng.random_range(-2.0..0.0) };
            ball(k, rng.random_range(2..=5), rng.random_range(0.3..2.0))
        })
        .collect()
}

fn c1_steklov_exactness() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for n in [2, 3, 5] {
        for r in [0.5, 1.0, 2.0] {
            worst = worst.max((steklov_ball(&ball(0.0, n, r))? - 1.0 / r).abs());
        }
    }
    let dt = t.elapsed();
    Ok((worst <= 1e-8 && dt < Duration::from_secs(1), format!("max |σ₁ - 1/R| = {worst:.2e}, {dt:.2?}")))
}

fn c2_robin_zero() -> Outcome {
    let mut worst: f64 = 0.0;
    for r in [0.5, 1.0, 2.0] {
        worst = worst.max(lambda2(0.0, 2, r, -1.0 / r)?.abs());
    }
    Ok((worst <= 1e-8, format!("max |λ₂| = {worst:.2e}")))
}

fn c3_bessel() -> Outcome {
    let j = first_zero_of_j1_prime();
    let l = lambda2(0.0, 2, 1.0, 0.0)?;
    let err = (l - j * j).abs();
    Ok((err <= 1e-6, format!("λ₂ = {l:.10}, oracle (j'₁₁)² = {:.10}, |diff| = {err:.2e}", j * j)))
}

fn c4_alpha_monotone() -> Outcome {
    let alphas = [-1.0, -0.75, -0.5, -0.25, 0.0];
    let mut min_gap = f64::INFINITY;
    for k in [0.0, -1.0] {
        for n in [2, 3] {
            let vals: Vec<f64> = alphas.iter().map(|&a| lambda2(k, n, 1.0, a)).collect::<robinlab::Result<_>>()?;
            for w in vals.windows(2) {
                min_gap = min_gap.min(w[1] - w[0]);
            }
        }
    }
    Ok((min_gap > 1e-6, format!("min consecutive gap {min_gap:.4}")))
}

fn c5_kappa_monotone() -> Outcome {
    let t = Instant::now();
    let kappas = [-2.0, -1.0, -0.5, 0.0];
    let mut worst = f64::INFINITY;
    let mut ok = true;
    for n in [2, 3] {
        for r in [0.5, 1.0] {
            // σ₁ of the flat ball of the same radius
            let s = steklov_ball(&ball(0.0, n, r))?;
            let rep = comparison_sweep(r, n, &[-s, -0.5 * s, 0.0], &kappas)?;
            ok &= rep.verdict == Verdict::Pass;
            worst = rep.margins.iter().flatten().fold(worst, |m, x| m.min(*x));
        }
    }
    let dt = t.elapsed();
    Ok((ok && worst >= -1e-8 && dt < Duration::from_secs(30), format!("min step in κ {worst:.3e}, {dt:.2?}")))
}

fn c6_profile_slope() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for b in sample_balls(61, 20) {
        let s = steklov_ball(&b)?;
        let alpha = -s * rng.random_range(0.02..=1.0);
        assert!(alpha >= -2.0 * b.kappa.cot(b.radius));
        let r = check_profile_slope(&b, alpha)?;
        ok &= r.fprime_positive == Verdict::Pass && r.ratio_bound == Verdict::Pass;
        worst = worst.min(r.worst_ratio_margin);
    }
    Ok((ok && worst >= -1e-10, format!("20 tuples, worst margin of F'/F + α: {worst:.3e}")))
}

fn c7_h_monotone() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for b in sample_balls(71, 20) {
        let s = steklov_ball(&b)?;
        let alpha = -s * rng.random_range(0.0..=1.0);
        let r = check_h_monotone(&b, alpha, 3.0 * b.radius)?;
        ok &= r.verdict == Verdict::Pass;
        worst = worst.max(r.max_forward_difference / r.scale);
    }
    Ok((ok, format!("20 tuples, largest relative forward difference {worst:.3e}")))
}

fn c8_fem_convergence() -> Outcome {
    let t = Instant::now();
    let m0 = disk_mesh(0.0, 1.0, 0.08)?;
    let m1 = refine(&m0)?;
    let m2 = refine(&m1)?;
    let hs = [0.08, 0.04, 0.02];
    let mut ok = true;
    let mut detail = Vec::new();
    for alpha in [0.0, -0.5, -1.0] {
        let errs: Vec<f64> =
            [&m0, &m1, &m2].iter().map(|m| fem_cross_check(m, 1.0, alpha).map(|c| c.error)).collect::<robinlab::Result<_>>()?;
        let p = fitted_order(&hs, &errs);
        ok &= (1.7..=2.3).contains(&p) && errs[2] <= 1e-2;
        detail.push(format!("α={alpha}: p={p:.3}, e(0.02)={:.2e}", errs[2]));
    }
    let dt = t.elapsed();
    Ok((ok && dt < Duration::from_secs(120), format!("{}, {dt:.2?}", detail.join("; "))))
}

fn c9_shape_optimization() -> Outcome {
    let mut ok = true;
    let mut min_ellipse_gap = f64::INFINITY;
    for alpha in [0.0, -0.5, -1.0] {
        let disk = lambda2(0.0, 2, 1.0, alpha)?;
        for ratio in [1.2f64, 1.5, 2.0] {
            let a = ratio.sqrt();
            let mesh = ellipse_mesh(0.0, a, 1.0 / a, 0.04)?;
            let l = robin_eigs_fem(&mesh, alpha, 2)?.eigenvalues[1];
            ok &= l <= disk - 1e-3;
            min_ellipse_gap = min_ellipse_gap.min(disk - l);
        }
    }
    let mut members = Vec::new();
    for eps in [0.1, 0.2] {
        for k in [2, 3] {
            members.push(ShapeFamily::PerturbedDisk { kappa: -1.0, radius: 1.0, eps, k });
        }
    }
    let rows = shape_opt_sweep(&members, &[0.0, -0.4], 0.04, 1e-2)?;
    ok &= rows.len() == 8 && rows.iter().all(|r| r.verdict == Verdict::Pass);
    let min_h = rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    Ok((ok, format!("min ellipse gap {min_ellipse_gap:.4}, min hyperbolic gap {min_h:.4}")))
}

fn c10_chain() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    let a = 1.5f64.sqrt();
    let ellipse = ellipse_mesh(0.0, a, 1.0 / a, 0.04)?;
    let disk = disk_mesh(0.0, 1.0, 0.04)?;
    for alpha in [0.0, -0.5] {
        let r = inequality_chain(&ellipse, alpha)?;
        let slack = 1e-6 * r.lambda2_ball;
        let links = r.margins[..3].iter().all(|m| *m >= -slack);
        let closes = r.margins[3].abs() <= 1e-6;
        ok &= links && closes;
        detail.push(format!(
            "ellipse α={alpha}: λ₂={:.5} ≤ {:.5} ≤ {:.5} ≤ {:.5} = {:.5}",
            r.lambda2_omega, r.rayleigh_bound, r.potential_bound, r.ball_bound, r.lambda2_ball
        ));
        let d = inequality_chain(&disk, alpha)?;
        ok &= d.max_gap() <= d.mesh_error_bound;
        detail.push(format!("disk α={alpha}: max gap {:.2e} ≤ bound {:.2e}", d.max_gap(), d.mesh_error_bound));
    }
    Ok((ok, detail.join("; ")))
}

fn c11_steklov_consistency() -> Outcome {
    let mut balls = vec![ball(-1.0, 2, 1.0)];
    balls.extend(sample_balls(11, 11));
    let mut worst: f64 = 0.0;
    for b in &balls {
        worst = worst.max((steklov_via_robin_root(b)? - steklov_ball(b)?).abs());
    }
    // harmonic extension of tanh(r/2)·cos θ in the disk model gives σ₁ = 1/sinh R
    let hyp = steklov_via_robin_root(&balls[0])?;
    let oracle = 1.0 / 1f64.sinh();
    Ok((
        worst <= 1e-8 && (hyp - oracle).abs() <= 1e-8,
        format!("12 balls, max diff {worst:.2e}; κ=-1,n=2,R=1: {hyp:.8} vs 1/sinh 1 = {oracle:.8}"),
    ))
}

fn c12_square() -> Outcome {
    let side = PI.sqrt();
    let mesh = rectangle_mesh(0.0, side, side, 0.02)?;
    let mu1 = robin_eigs_fem(&mesh, 0.0, 2)?.eigenvalues[1];
    let disk = lambda2(0.0, 2, 1.0, 0.0)?;
    Ok(((mu1 - PI).abs() <= 1e-3 && mu1 < 3.390 && mu1 < disk, format!("μ₁ = {mu1:.6}, π = {PI:.6}, disk {disk:.6}")))
}

fn main() {
    #[allow(clippy::type_complexity)]
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("Steklov exactness on flat balls", c1_steklov_exactness),
        ("Robin zero at α = -1/R", c2_robin_zero),
        ("Bessel oracle for the unit disk", c3_bessel),
        ("λ₂ strictly increasing in α", c4_alpha_monotone),
        ("λ₂ nondecreasing in κ", c5_kappa_monotone),
        ("F' > 0 and F'/F ≥ -α", c6_profile_slope),
        ("H nonincreasing on (ε, 3R]", c7_h_monotone),
        ("FEM convergence on the unit disk", c8_fem_convergence),
        ("ellipses and perturbed disks below their ball", c9_shape_optimization),
        ("inequality chain", c10_chain),
        ("Steklov via the Robin root", c11_steklov_consistency),
        ("square Neumann benchmark", c12_square),
    ];
    let mut failures = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".to_string()),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {title}: {detail} [{:.2?}]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            t.elapsed()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
