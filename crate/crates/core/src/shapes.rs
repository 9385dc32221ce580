//! Meshed test domains: disks, ellipses, rectangles and perturbed disks.
//!
//! Curved domains are meshed by placing boundary vertices at equal arclength
//! on the curve, filling the interior with a hexagonal lattice, and handing
//! both to a constrained Delaunay triangulation with angle-driven refinement.
//! A final smoothing pass moves interior vertices only when it improves the
//! worst incident angle.
//!
//! For `κ < 0` all lengths passed in are geodesic; the target edge length `h`
//! is met at the model origin, where `ρ = 2`.

use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use crate::error::{Error, Result};
use crate::fem2d::{domain_volume, min_angle_deg, BoundaryCurve, Mesh2D};
use crate::model::{self, Point};

const REFINE_ANGLE_DEG: f64 = 25.0;
const SMOOTHING_SWEEPS: usize = 6;

fn model_step(kappa: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!("edge length must be positive, got {h}")));
    }
    if kappa > 0.0 {
        return Err(Error::Unsupported("domains need κ ≤ 0".into()));
    }
    Ok(if kappa < 0.0 { 0.5 * h } else { h })
}

/// Points at (nearly) equal arclength on the curve for parameters in
/// `[t0, t1]`, both ends included, counter-clockwise.
fn polygonize_arc(curve: &BoundaryCurve, t0: f64, t1: f64, h: f64, min_pieces: usize) -> Vec<Point> {
    const SAMPLES_PER_SIDE: usize = 64;
    const COARSE_SAMPLES: usize = 4096;
    let span = t1 - t0;
    let uniform_radius = match *curve {
        BoundaryCurve::Circle { radius, .. } => Some(radius),
        BoundaryCurve::Polar { radius, eps: 0.0, .. } => Some(radius),
        _ => None,
    };
    if let Some(radius) = uniform_radius {
        let n = ((span * radius / h).ceil() as usize).max(min_pieces);
        return (0..=n).map(|i| curve.point(t0 + span * i as f64 / n as f64)).collect();
    }
    let arc_table = |m: usize| {
        let mut cum = vec![0.0; m + 1];
        let mut prev = curve.point(t0);
        for i in 1..=m {
            let p = curve.point(t0 + span * i as f64 / m as f64);
            cum[i] = cum[i - 1] + (p[0] - prev[0]).hypot(p[1] - prev[1]);
            prev = p;
        }
        cum
    };
    let coarse = arc_table(COARSE_SAMPLES);
    let n = ((coarse[COARSE_SAMPLES] / h).ceil() as usize).max(min_pieces);
    // re-tabulate finely enough that linear inversion is accurate
    let fine = (n * SAMPLES_PER_SIDE).max(COARSE_SAMPLES);
    let cum = arc_table(fine);
    let total = cum[fine];
    let mut out = Vec::with_capacity(n + 1);
    let mut j = 0;
    for i in 0..n {
        let s = total * i as f64 / n as f64;
        while cum[j + 1] < s {
            j += 1;
        }
        let f = (s - cum[j]) / (cum[j + 1] - cum[j]);
        out.push(curve.point(t0 + span * (j as f64 + f) / fine as f64));
    }
    out.push(curve.point(t1));
    out
}

/// Interior points of the segment `a → b` at spacing about `h`.
fn segment_points(a: Point, b: Point, h: f64) -> Vec<Point> {
    let n = (((b[0] - a[0]).hypot(b[1] - a[1]) / h).ceil() as usize).max(1);
    (1..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
        })
        .collect()
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(a, b, c);
    let d2 = cross(a, b, d);
    let d3 = cross(c, d, a);
    let d4 = cross(c, d, b);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Total turning of a closed polygon divided by `2π`.
pub fn turning_number(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        let u = [b[0] - a[0], b[1] - a[1]];
        let v = [c[0] - b[0], c[1] - b[1]];
        total += (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]);
    }
    total / std::f64::consts::TAU
}

/// Reject polygons that wind other than once counter-clockwise or whose
/// non-adjacent sides cross.
fn check_simple(poly: &[Point]) -> Result<()> {
    let w = turning_number(poly);
    if (w - 1.0).abs() > 1e-6 {
        return Err(Error::SelfIntersection(format!("boundary turning number is {w:.6}")));
    }
    let n = poly.len();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return Err(Error::SelfIntersection(format!("boundary sides {i} and {j} cross")));
            }
        }
    }
    Ok(())
}

fn inside(poly: &[Point], p: Point) -> bool {
    let mut c = false;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]) {
            c = !c;
        }
    }
    c
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1])).clamp(0.0, 1.0);
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

/// Hexagonal lattice points at least `0.55 h` inside the polygon, with a
/// lattice point at `center`.
fn interior_lattice(poly: &[Point], center: Point, h: f64) -> Vec<Point> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in poly {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let dy = h * 3f64.sqrt() / 2.0;
    let j0 = ((lo[1] - center[1]) / dy).floor() as i64;
    let j1 = ((hi[1] - center[1]) / dy).ceil() as i64;
    let mut out = Vec::new();
    for j in j0..=j1 {
        let y = center[1] + j as f64 * dy;
        let shift = if j.rem_euclid(2) == 1 { 0.5 * h } else { 0.0 };
        let i0 = ((lo[0] - center[0] - shift) / h).floor() as i64;
        let i1 = ((hi[0] - center[0] - shift) / h).ceil() as i64;
        for i in i0..=i1 {
            let p = [center[0] + shift + i as f64 * h, y];
            if !inside(poly, p) {
                continue;
            }
            let n = poly.len();
            if (0..n).all(|k| segment_distance(p, poly[k], poly[(k + 1) % n]) >= 0.55 * h) {
                out.push(p);
            }
        }
    }
    out
}

/// Constrained Delaunay triangulation of a simple polygon with refinement
/// and smoothing. Returns vertices (polygon vertices first, in order) and
/// counter-clockwise triangles.
fn triangulate_polygon(poly: &[Point], center: Point, h: f64) -> Result<(Vec<Point>, Vec<[usize; 3]>)> {
    check_simple(poly)?;
    let nb = poly.len();
    let mut pts: Vec<Point2<f64>> = poly.iter().map(|p| Point2::new(p[0], p[1])).collect();
    pts.extend(interior_lattice(poly, center, h).into_iter().map(|p| Point2::new(p[0], p[1])));
    let edges: Vec<[usize; 2]> = (0..nb).map(|i| [i, (i + 1) % nb]).collect();
    let count = pts.len();
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::bulk_load_cdt(pts, edges)
        .map_err(|e| Error::InvalidMesh(format!("triangulation failed: {e:?}")))?;
    if cdt.num_vertices() != count {
        return Err(Error::InvalidMesh("coincident mesh vertices".into()));
    }
    let area = h * h;
    let params = RefinementParameters::<f64>::new()
        .with_angle_limit(AngleLimit::from_deg(REFINE_ANGLE_DEG))
        .with_max_allowed_area(0.75 * area)
        .with_min_required_area(0.02 * area)
        .keep_constraint_edges()
        .exclude_outer_faces(true);
    let result = cdt.refine(params);
    let positions: Vec<Point> = cdt.vertices().map(|v| [v.position().x, v.position().y]).collect();
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        if result.excluded_faces.contains(&face.fix()) {
            continue;
        }
        let [a, b, c] = face.vertices().map(|v| v.fix().index());
        if cross(positions[a], positions[b], positions[c]) > 0.0 {
            triangles.push([a, b, c]);
        } else {
            triangles.push([a, c, b]);
        }
    }
    // compact away vertices outside the domain, keeping the polygon first
    let mut remap = vec![usize::MAX; positions.len()];
    let mut vertices: Vec<Point> = poly.to_vec();
    for (i, r) in remap.iter_mut().enumerate().take(nb) {
        *r = i;
    }
    for t in &mut triangles {
        for v in t.iter_mut() {
            if remap[*v] == usize::MAX {
                remap[*v] = vertices.len();
                vertices.push(positions[*v]);
            }
            *v = remap[*v];
        }
    }
    let mut used = vec![false; vertices.len()];
    triangles.iter().flatten().for_each(|&v| used[v] = true);
    if used.iter().take(nb).any(|u| !u) {
        return Err(Error::InvalidMesh("boundary vertex lost during triangulation".into()));
    }
    let fixed: Vec<bool> = (0..vertices.len()).map(|i| i < nb).collect();
    smooth(&mut vertices, &triangles, &fixed);
    Ok((vertices, triangles))
}

/// Move each free vertex to the centroid of its neighbours when that raises
/// the smallest angle among its triangles.
fn smooth(vertices: &mut [Point], triangles: &[[usize; 3]], fixed: &[bool]) {
    let n = vertices.len();
    let mut star: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, tri) in triangles.iter().enumerate() {
        for &v in tri {
            star[v].push(t);
        }
    }
    let worst = |verts: &[Point], v: usize| -> f64 {
        star[v]
            .iter()
            .map(|&t| {
                let p = triangles[t].map(|i| verts[i]);
                if cross(p[0], p[1], p[2]) <= 0.0 {
                    -1.0
                } else {
                    min_angle_deg(p)
                }
            })
            .fold(f64::INFINITY, f64::min)
    };
    for _ in 0..SMOOTHING_SWEEPS {
        for v in 0..n {
            if fixed[v] {
                continue;
            }
            let mut c = [0.0, 0.0];
            let mut count = 0.0;
            for &t in &star[v] {
                for &w in &triangles[t] {
                    if w != v {
                        c[0] += vertices[w][0];
                        c[1] += vertices[w][1];
                        count += 1.0;
                    }
                }
            }
            let target = [c[0] / count, c[1] / count];
            let before = worst(vertices, v);
            let old = vertices[v];
            vertices[v] = target;
            if worst(vertices, v) <= before {
                vertices[v] = old;
            }
        }
    }
}

/// Mesh a curve centred at the origin. The curve is symmetric under
/// `y ↦ -y`, and under `x ↦ -x` too unless it is an odd polar mode; only the
/// fundamental piece (upper half or first quadrant) is triangulated and the
/// rest is obtained by reflection, so the mesh carries the symmetries of the
/// domain exactly.
fn mesh_curve(curve: BoundaryCurve, h: f64, kappa: f64) -> Result<Mesh2D> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let quadrant = !matches!(curve, BoundaryCurve::Polar { k, eps, .. } if k % 2 == 1 && eps != 0.0);
    let (t1, min_pieces) = if quadrant { (FRAC_PI_2, 3) } else { (PI, 6) };
    let mut arc = polygonize_arc(&curve, 0.0, t1, h, min_pieces);
    let last = arc.len() - 1;
    arc[0][1] = 0.0;
    if quadrant {
        arc[last][0] = 0.0;
    } else {
        arc[last][1] = 0.0;
    }
    let (start, end) = (arc[0], arc[last]);
    let mut poly = arc.clone();
    if quadrant {
        poly.extend(segment_points(end, [0.0, 0.0], h));
        poly.push([0.0, 0.0]);
        poly.extend(segment_points([0.0, 0.0], start, h));
    } else {
        poly.extend(segment_points(end, start, h));
    }
    let (verts, tris) = triangulate_polygon(&poly, [0.0, 0.0], h)?;
    let mirrors: &[[f64; 2]] =
        if quadrant { &[[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]] } else { &[[1.0, 1.0], [1.0, -1.0]] };
    let key = |p: Point| ((p[0] + 0.0).to_bits(), (p[1] + 0.0).to_bits());
    let mut index = std::collections::HashMap::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut boundary = Vec::new();
    for m in mirrors {
        let ids: Vec<usize> = verts
            .iter()
            .map(|v| {
                let p = [m[0] * v[0], m[1] * v[1]];
                *index.entry(key(p)).or_insert_with(|| {
                    vertices.push(p);
                    vertices.len() - 1
                })
            })
            .collect();
        let flip = m[0] * m[1] < 0.0;
        for t in &tris {
            let t = t.map(|v| ids[v]);
            triangles.push(if flip { [t[0], t[2], t[1]] } else { t });
        }
        for i in 0..last {
            boundary.push([ids[i], ids[i + 1]]);
        }
    }
    Ok(Mesh2D::new(vertices, triangles, boundary, kappa)?.with_curve(curve))
}

/// Geodesic disk of radius `radius` about the model origin.
pub fn disk_mesh(kappa: f64, radius: f64, h: f64) -> Result<Mesh2D> {
    let hm = model_step(kappa, h)?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("radius must be positive, got {radius}")));
    }
    let s = model::model_radius(kappa, radius)?;
    mesh_curve(BoundaryCurve::Circle { center: [0.0, 0.0], radius: s }, hm, kappa)
}

/// Euclidean ellipse with semi-axes `a` (along x) and `b`.
pub fn ellipse_mesh(kappa: f64, a: f64, b: f64, h: f64) -> Result<Mesh2D> {
    if kappa != 0.0 {
        return Err(Error::Unsupported("ellipses are generated in the Euclidean plane only".into()));
    }
    let hm = model_step(kappa, h)?;
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("semi-axes must be positive, got {a}, {b}")));
    }
    mesh_curve(BoundaryCurve::Ellipse { center: [0.0, 0.0], a, b }, hm, kappa)
}

/// Euclidean `w × l` rectangle centred at the origin, structured with
/// alternating diagonals.
pub fn rectangle_mesh(kappa: f64, w: f64, l: f64, h: f64) -> Result<Mesh2D> {
    if kappa != 0.0 {
        return Err(Error::Unsupported("rectangles are generated in the Euclidean plane only".into()));
    }
    let hm = model_step(kappa, h)?;
    if !(w > 0.0 && l > 0.0) {
        return Err(Error::Domain(format!("side lengths must be positive, got {w}, {l}")));
    }
    let nx = ((w / hm).ceil() as usize).max(1);
    let ny = ((l / hm).ceil() as usize).max(1);
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([-0.5 * w + w * i as f64 / nx as f64, -0.5 * l + l * j as f64 / ny as f64]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            if (i + j) % 2 == 0 {
                triangles.extend([[a, b, c], [a, c, d]]);
            } else {
                triangles.extend([[a, b, d], [b, c, d]]);
            }
        }
    }
    let mut edges = Vec::with_capacity(2 * (nx + ny));
    for i in 0..nx {
        edges.push([idx(i, 0), idx(i + 1, 0)]);
        edges.push([idx(i + 1, ny), idx(i, ny)]);
    }
    for j in 0..ny {
        edges.push([idx(nx, j), idx(nx, j + 1)]);
        edges.push([idx(0, j + 1), idx(0, j)]);
    }
    Mesh2D::new(vertices, triangles, edges, kappa)
}

/// Domain bounded by `r(θ) = s(1 + ε cos kθ)` in model coordinates, where
/// `s` is the model radius of the geodesic radius `radius`.
pub fn perturbed_disk_mesh(kappa: f64, radius: f64, eps: f64, k: u32, h: f64) -> Result<Mesh2D> {
    let hm = model_step(kappa, h)?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Domain(format!("radius must be positive, got {radius}")));
    }
    if !(eps.abs() < 0.3) {
        return Err(Error::Domain(format!("perturbation must satisfy |ε| < 0.3, got {eps}")));
    }
    if k < 2 {
        return Err(Error::Domain(format!("perturbation mode must be at least 2, got {k}")));
    }
    let s = model::model_radius(kappa, radius)?;
    if s * (1.0 + eps.abs()) >= model::model_bound(kappa) {
        return Err(Error::Domain("perturbed boundary leaves the model disk".into()));
    }
    mesh_curve(BoundaryCurve::Polar { radius: s, eps, k }, hm, kappa)
}

fn scale_curve(c: BoundaryCurve, f: f64) -> BoundaryCurve {
    match c {
        BoundaryCurve::Circle { center, radius } => {
            BoundaryCurve::Circle { center: [center[0] * f, center[1] * f], radius: radius * f }
        }
        BoundaryCurve::Ellipse { center, a, b } => {
            BoundaryCurve::Ellipse { center: [center[0] * f, center[1] * f], a: a * f, b: b * f }
        }
        BoundaryCurve::Polar { radius, eps, k } => BoundaryCurve::Polar { radius: radius * f, eps, k },
    }
}

/// Scale a Euclidean mesh about the origin to the given area.
pub fn normalize_to_volume(mesh: &Mesh2D, target: f64) -> Result<Mesh2D> {
    if mesh.kappa() != 0.0 {
        return Err(Error::Unsupported(
            "volume normalization by scaling is only meaningful for κ = 0; build hyperbolic domains at the target volume".into(),
        ));
    }
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::Domain(format!("target volume must be positive, got {target}")));
    }
    let f = (target / domain_volume(mesh)).sqrt();
    mesh.map_vertices(|v| [v[0] * f, v[1] * f], mesh.curve().map(|c| scale_curve(c, f)))
}

/// Isometric copy of the mesh under the model isometry taking the origin to `p`.
pub fn translate_mesh(mesh: &Mesh2D, p: Point) -> Result<Mesh2D> {
    let k = mesh.kappa();
    if k < 0.0 && p[0].hypot(p[1]) >= model::model_bound(k) {
        return Err(Error::Domain("translation target outside the model disk".into()));
    }
    let curve = match mesh.curve() {
        Some(BoundaryCurve::Circle { center, radius }) if k == 0.0 => {
            Some(BoundaryCurve::Circle { center: [center[0] + p[0], center[1] + p[1]], radius })
        }
        Some(BoundaryCurve::Ellipse { center, a, b }) if k == 0.0 => {
            Some(BoundaryCurve::Ellipse { center: [center[0] + p[0], center[1] + p[1]], a, b })
        }
        Some(BoundaryCurve::Circle { center: [0.0, 0.0], radius }) => {
            // Möbius maps circles to circles: recover the image from three points
            let q: Vec<Point> = (0..3)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / 3.0;
                    model::translate(k, p, [radius * t.cos(), radius * t.sin()])
                })
                .collect();
            let (c, r) = circumcircle(q[0], q[1], q[2]);
            Some(BoundaryCurve::Circle { center: c, radius: r })
        }
        _ => None,
    };
    mesh.map_vertices(|v| model::translate(k, p, v), curve)
}

fn circumcircle(a: Point, b: Point, c: Point) -> (Point, f64) {
    let d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
    let (a2, b2, c2) = (a[0] * a[0] + a[1] * a[1], b[0] * b[0] + b[1] * b[1], c[0] * c[0] + c[1] * c[1]);
    let ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d;
    let uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d;
    ([ux, uy], (a[0] - ux).hypot(a[1] - uy))
}
