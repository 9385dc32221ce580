//! Numerical integration helpers shared by the geometry, radial and mesh code.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss-Kronrod 7/15 panel: returns (kronrod estimate, |kronrod - gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Bisections allowed before the remaining panels are accepted as they are.
const MAX_SPLITS: usize = 20_000;

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut stack = vec![(a, b, tol, 0usize)];
    let mut total = 0.0;
    let mut splits = 0usize;
    while let Some((lo, hi, t, depth)) = stack.pop() {
        let (val, err) = gk15(&f, lo, hi);
        // the error estimate cannot drop below the rounding level of the panel sum
        let floor = 50.0 * f64::EPSILON * val.abs();
        if err <= t.max(floor) || depth >= 50 || splits >= MAX_SPLITS || (hi - lo).abs() < 1e-14 * (1.0 + lo.abs()) {
            total += val;
        } else {
            splits += 1;
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * t, depth + 1));
            stack.push((lo, mid, 0.5 * t, depth + 1));
        }
    }
    total
}

/// Composite Simpson rule on an arbitrary increasing grid.
///
/// Pairs of intervals use the three-point rule for unequal spacing; an odd
/// trailing interval is closed with the quadratic through its last three nodes.
pub fn simpson_nonuniform(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
    }
    let mut sum = 0.0;
    let mut i = 0;
    while i + 2 < n {
        sum += simpson_pair(x[i], x[i + 1], x[i + 2], y[i], y[i + 1], y[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        // last single interval [x[n-2], x[n-1]] integrated with the parabola through
        // the final three nodes
        let (x0, x1, x2) = (x[n - 3], x[n - 2], x[n - 1]);
        let (y0, y1, y2) = (y[n - 3], y[n - 2], y[n - 1]);
        sum += parabola_integral(x0, x1, x2, y0, y1, y2, x1, x2);
    }
    sum
}

fn simpson_pair(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64) -> f64 {
    let h0 = x1 - x0;
    let h1 = x2 - x1;
    let s = h0 + h1;
    s / 6.0 * (y0 * (2.0 - h1 / h0) + y1 * s * s / (h0 * h1) + y2 * (2.0 - h0 / h1))
}

/// Integral over `[a, b]` of the quadratic interpolating three points.
#[allow(clippy::too_many_arguments)]
fn parabola_integral(x0: f64, x1: f64, x2: f64, y0: f64, y1: f64, y2: f64, a: f64, b: f64) -> f64 {
    // Lagrange basis integrated exactly via antiderivatives of (t - xi)(t - xj)
    let prim = |xi: f64, xj: f64, t: f64| t * t * t / 3.0 - 0.5 * (xi + xj) * t * t + xi * xj * t;
    let l = |xi: f64, xj: f64, xk: f64| (prim(xj, xk, b) - prim(xj, xk, a)) / ((xi - xj) * (xi - xk));
    y0 * l(x0, x1, x2) + y1 * l(x1, x0, x2) + y2 * l(x2, x0, x1)
}

/// Symmetric 6-point triangle rule, exact for polynomials of degree 4.
/// Entries are barycentric coordinates and weights summing to one.
pub const TRIANGLE_RULE: [([f64; 3], f64); 6] = {
    const A1: f64 = 0.445_948_490_915_965;
    const B1: f64 = 1.0 - 2.0 * A1;
    const W1: f64 = 0.223_381_589_678_011;
    const A2: f64 = 0.091_576_213_509_771;
    const B2: f64 = 1.0 - 2.0 * A2;
    const W2: f64 = 0.109_951_743_655_322;
    [
        ([A1, A1, B1], W1),
        ([A1, B1, A1], W1),
        ([B1, A1, A1], W1),
        ([A2, A2, B2], W2),
        ([A2, B2, A2], W2),
        ([B2, A2, A2], W2),
    ]
};

/// Three-point Gauss-Legendre rule on [0, 1], exact to degree 5.
pub const SEGMENT_RULE: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];
