//! Triangle meshes in model coordinates and the `mesh2d v1` text format.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{self, Point};
use crate::quadrature::{SEGMENT_RULE, TRIANGLE_RULE};

/// Smallest interior angle accepted by [`Mesh2D::new`], in degrees.
pub const MIN_ANGLE_DEG: f64 = 15.0;
/// Triangles with area below this are degenerate.
pub const MIN_AREA: f64 = 1e-14;

/// Analytic boundary recorded by a generator so that [`refine`] can place
/// new boundary vertices on the curve instead of on the polygon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCurve {
    Circle { center: Point, radius: f64 },
    Ellipse { center: Point, a: f64, b: f64 },
    /// `r(θ) = radius·(1 + eps·cos(k θ))` about the origin.
    Polar { radius: f64, eps: f64, k: u32 },
}

impl BoundaryCurve {
    /// Point at parameter `t ∈ [0, 2π)`.
    pub fn point(&self, t: f64) -> Point {
        match *self {
            BoundaryCurve::Circle { center, radius } => [center[0] + radius * t.cos(), center[1] + radius * t.sin()],
            BoundaryCurve::Ellipse { center, a, b } => [center[0] + a * t.cos(), center[1] + b * t.sin()],
            BoundaryCurve::Polar { radius, eps, k } => {
                let r = radius * (1.0 + eps * (k as f64 * t).cos());
                [r * t.cos(), r * t.sin()]
            }
        }
    }

    /// Parameter of the curve point "behind" `x` as seen from the center.
    pub fn parameter(&self, x: Point) -> f64 {
        match *self {
            BoundaryCurve::Circle { center, .. } => (x[1] - center[1]).atan2(x[0] - center[0]),
            BoundaryCurve::Ellipse { center, a, b } => ((x[1] - center[1]) / b).atan2((x[0] - center[0]) / a),
            BoundaryCurve::Polar { .. } => x[1].atan2(x[0]),
        }
    }

    pub fn project(&self, x: Point) -> Point {
        self.point(self.parameter(x))
    }
}

/// Conforming, positively oriented P1 mesh of a planar domain in the disk
/// model of curvature `kappa ≤ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh2D {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<[usize; 2]>,
    kappa: f64,
    curve: Option<BoundaryCurve>,
}

fn signed_area(p: Point, q: Point, r: Point) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Smallest interior angle of a triangle, in degrees.
pub fn min_angle_deg(p: [Point; 3]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..3 {
        let a = p[i];
        let b = p[(i + 1) % 3];
        let c = p[(i + 2) % 3];
        let u = [b[0] - a[0], b[1] - a[1]];
        let v = [c[0] - a[0], c[1] - a[1]];
        let cross = u[0] * v[1] - u[1] * v[0];
        let dot = u[0] * v[0] + u[1] * v[1];
        m = m.min(cross.abs().atan2(dot).to_degrees());
    }
    m
}

impl Mesh2D {
    /// Validate and build a mesh. Boundary edges are re-oriented to follow
    /// the counter-clockwise traversal of their triangle.
    pub fn new(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<[usize; 2]>,
        kappa: f64,
    ) -> Result<Self> {
        if !(kappa <= 0.0) {
            return Err(Error::Unsupported(format!("meshes need κ ≤ 0, got {kappa}")));
        }
        let nv = vertices.len();
        if nv < 3 || triangles.is_empty() {
            return Err(Error::InvalidMesh("mesh needs at least one triangle".into()));
        }
        let bound = model::model_bound(kappa);
        for (i, v) in vertices.iter().enumerate() {
            if !v[0].is_finite() || !v[1].is_finite() {
                return Err(Error::InvalidMesh(format!("vertex {i} is not finite")));
            }
            if v[0].hypot(v[1]) >= bound {
                return Err(Error::InvalidMesh(format!("vertex {i} lies outside the model disk")));
            }
        }
        let mut used = vec![false; nv];
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= nv) || tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InvalidMesh(format!("triangle {t} has invalid vertex indices")));
            }
            let p = tri.map(|i| vertices[i]);
            let area = signed_area(p[0], p[1], p[2]);
            if area.abs() < MIN_AREA {
                return Err(Error::DegenerateTriangle { index: t, area });
            }
            if area < 0.0 {
                return Err(Error::InvalidMesh(format!("triangle {t} is clockwise")));
            }
            let ang = min_angle_deg(p);
            if !(ang > MIN_ANGLE_DEG) {
                return Err(Error::InvalidMesh(format!("triangle {t} has a {ang:.2}° angle")));
            }
            for i in 0..3 {
                used[tri[i]] = true;
                let e = (tri[i], tri[(i + 1) % 3]);
                if directed.insert(e, t).is_some() {
                    return Err(Error::InvalidMesh(format!("edge {e:?} is traversed twice in the same direction")));
                }
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidMesh(format!("vertex {i} belongs to no triangle")));
        }
        let mut open: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for &(a, b) in directed.keys() {
            if !directed.contains_key(&(b, a)) {
                open.insert(key(a, b), (a, b));
            }
        }
        let mut oriented = Vec::with_capacity(boundary_edges.len());
        for e in &boundary_edges {
            match open.remove(&key(e[0], e[1])) {
                Some((a, b)) => oriented.push([a, b]),
                None => {
                    return Err(Error::InvalidMesh(format!(
                        "boundary edge {e:?} is not an edge of exactly one triangle"
                    )))
                }
            }
        }
        if let Some(e) = open.keys().min() {
            return Err(Error::InvalidMesh(format!("edge {e:?} has one triangle but is not listed as boundary")));
        }
        Ok(Mesh2D { vertices, triangles, boundary_edges: oriented, kappa, curve: None })
    }

    pub fn with_curve(mut self, curve: BoundaryCurve) -> Self {
        self.curve = Some(curve);
        self
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn curve(&self) -> Option<BoundaryCurve> {
        self.curve
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.vertices[i])
    }

    /// Euclidean (model) area of triangle `t`.
    pub fn triangle_area(&self, t: usize) -> f64 {
        let p = self.triangle_points(t);
        signed_area(p[0], p[1], p[2])
    }

    /// Sorted indices of vertices on the boundary.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        let mut on = vec![false; self.vertices.len()];
        for e in &self.boundary_edges {
            on[e[0]] = true;
            on[e[1]] = true;
        }
        (0..on.len()).filter(|&i| on[i]).collect()
    }

    /// Longest model edge.
    pub fn max_edge(&self) -> f64 {
        let mut h = 0.0f64;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            for i in 0..3 {
                let (a, b) = (p[i], p[(i + 1) % 3]);
                h = h.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        h
    }

    /// Smallest triangle angle in degrees.
    pub fn min_angle(&self) -> f64 {
        (0..self.triangles.len()).map(|t| min_angle_deg(self.triangle_points(t))).fold(f64::INFINITY, f64::min)
    }

    /// Apply a vertex map that preserves orientation (isometries, scalings).
    pub fn map_vertices(&self, f: impl Fn(Point) -> Point, curve: Option<BoundaryCurve>) -> Result<Mesh2D> {
        let vertices = self.vertices.iter().map(|&v| f(v)).collect();
        let m = Mesh2D::new(vertices, self.triangles.clone(), self.boundary_edges.clone(), self.kappa)?;
        Ok(Mesh2D { curve, ..m })
    }

    /// Serialize to the `mesh2d v1` format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mesh2d v1 kappa={}", self.kappa);
        let _ = writeln!(s, "{}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{} {}", v[0], v[1]);
        }
        let _ = writeln!(s, "{}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(s, "{}", self.boundary_edges.len());
        for e in &self.boundary_edges {
            let _ = writeln!(s, "{} {}", e[0], e[1]);
        }
        s
    }

    /// Parse the `mesh2d v1` format and validate the result.
    pub fn from_text(text: &str) -> Result<Mesh2D> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty mesh file".into()))?;
        let kappa = header
            .trim_end()
            .strip_prefix("mesh2d v1 kappa=")
            .ok_or_else(|| Error::Parse(format!("bad mesh header {header:?}")))?;
        let kappa: f64 = kappa.parse().map_err(|_| Error::Parse(format!("bad kappa {kappa:?}")))?;
        let mut tokens = lines.flat_map(str::split_whitespace);
        let mut next = |what: &str| tokens.next().ok_or_else(|| Error::Parse(format!("mesh file ends before {what}")));
        fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))
        }
        let nv: usize = num(next("vertex count")?)?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            vertices.push([num(next("vertex")?)?, num(next("vertex")?)?]);
        }
        let nt: usize = num(next("triangle count")?)?;
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            triangles.push([num(next("triangle")?)?, num(next("triangle")?)?, num(next("triangle")?)?]);
        }
        let nb: usize = num(next("boundary count")?)?;
        let mut edges = Vec::with_capacity(nb);
        for _ in 0..nb {
            edges.push([num(next("boundary edge")?)?, num(next("boundary edge")?)?]);
        }
        if next("end").is_ok() {
            return Err(Error::Parse("trailing data after boundary edges".into()));
        }
        Mesh2D::new(vertices, triangles, edges, kappa)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Mesh2D> {
        Mesh2D::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Metric area `∫ρ² dx` of the triangulated domain.
pub fn domain_volume(mesh: &Mesh2D) -> f64 {
    let k = mesh.kappa;
    (0..mesh.triangles.len())
        .map(|t| {
            let p = mesh.triangle_points(t);
            let area = mesh.triangle_area(t);
            TRIANGLE_RULE
                .iter()
                .map(|(b, w)| {
                    let x = [
                        b[0] * p[0][0] + b[1] * p[1][0] + b[2] * p[2][0],
                        b[0] * p[0][1] + b[1] * p[1][1] + b[2] * p[2][1],
                    ];
                    w * model::conformal_factor(k, x).powi(2)
                })
                .sum::<f64>()
                * area
        })
        .sum()
}

/// Metric length `∫ρ ds` of the boundary polygon.
pub fn domain_perimeter(mesh: &Mesh2D) -> f64 {
    let k = mesh.kappa;
    mesh.boundary_edges
        .iter()
        .map(|e| {
            let (a, b) = (mesh.vertices[e[0]], mesh.vertices[e[1]]);
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            SEGMENT_RULE
                .iter()
                .map(|&(s, w)| w * model::conformal_factor(k, [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]))
                .sum::<f64>()
                * len
        })
        .sum()
}

/// Uniform red refinement: every triangle is split into four through its
/// edge midpoints. Boundary midpoints go onto the recorded curve, if any.
pub fn refine(mesh: &Mesh2D) -> Result<Mesh2D> {
    let mut vertices = mesh.vertices.clone();
    let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
    let on_boundary: std::collections::HashSet<(usize, usize)> =
        mesh.boundary_edges.iter().map(|e| key(e[0], e[1])).collect();
    let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
        *mid.entry(key(a, b)).or_insert_with(|| {
            let (p, q) = (vertices[a], vertices[b]);
            let mut m = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
            if let (Some(c), true) = (mesh.curve, on_boundary.contains(&key(a, b))) {
                m = c.project(m);
            }
            vertices.push(m);
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for &[a, b, c] in &mesh.triangles {
        let ab = midpoint(a, b, &mut vertices);
        let bc = midpoint(b, c, &mut vertices);
        let ca = midpoint(c, a, &mut vertices);
        triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
    }
    let mut edges = Vec::with_capacity(2 * mesh.boundary_edges.len());
    for &[a, b] in &mesh.boundary_edges {
        let m = midpoint(a, b, &mut vertices);
        edges.extend([[a, m], [m, b]]);
    }
    let out = Mesh2D::new(vertices, triangles, edges, mesh.kappa)?;
    Ok(Mesh2D { curve: mesh.curve, ..out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square(n: usize) -> Mesh2D {
        let idx = |i: usize, j: usize| i * (n + 1) + j;
        let mut v = Vec::new();
        for i in 0..=n {
            for j in 0..=n {
                v.push([j as f64 / n as f64, i as f64 / n as f64]);
            }
        }
        let mut t = Vec::new();
        for i in 0..n {
            for j in 0..n {
                t.push([idx(i, j), idx(i, j + 1), idx(i + 1, j + 1)]);
                t.push([idx(i, j), idx(i + 1, j + 1), idx(i + 1, j)]);
            }
        }
        let mut e = Vec::new();
        for k in 0..n {
            e.push([idx(0, k), idx(0, k + 1)]);
            e.push([idx(k, n), idx(k + 1, n)]);
            e.push([idx(n, k + 1), idx(n, k)]);
            e.push([idx(k + 1, 0), idx(k, 0)]);
        }
        Mesh2D::new(v, t, e, 0.0).unwrap()
    }

    #[test]
    fn square_volume_and_perimeter() {
        let m = unit_square(3);
        assert!((domain_volume(&m) - 1.0).abs() < 1e-14);
        assert!((domain_perimeter(&m) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn validation_errors() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let e = vec![[0, 1], [1, 2], [2, 0]];
        assert!(Mesh2D::new(v.clone(), vec![[0, 1, 2]], e.clone(), 0.0).is_ok());
        assert!(matches!(Mesh2D::new(v.clone(), vec![[0, 2, 1]], e.clone(), 0.0), Err(Error::InvalidMesh(_))));
        assert!(Mesh2D::new(v.clone(), vec![[0, 1, 2]], e[..2].to_vec(), 0.0).is_err());
        assert!(Mesh2D::new(v.clone(), vec![[0, 1, 2]], e.clone(), 0.5).is_err());
        let flat = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 1e-15]];
        assert!(matches!(
            Mesh2D::new(flat, vec![[0, 1, 2]], e.clone(), 0.0),
            Err(Error::DegenerateTriangle { .. })
        ));
        let sliver = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 0.05]];
        assert!(Mesh2D::new(sliver, vec![[0, 1, 2]], e.clone(), 0.0).is_err());
        let far = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(Mesh2D::new(far, vec![[0, 1, 2]], e, -1.0).is_err());
        // reversed boundary edge input is accepted and re-oriented
        let m = Mesh2D::new(v, vec![[0, 1, 2]], vec![[1, 0], [2, 1], [0, 2]], 0.0).unwrap();
        assert_eq!(m.boundary_edges(), &[[0, 1], [1, 2], [2, 0]]);
    }

    #[test]
    fn hanging_node_is_rejected() {
        // vertex 4 sits on the edge (1, 2) of the lower triangle
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5]];
        let t = vec![[0, 1, 2], [1, 3, 4], [4, 3, 2]];
        let e = vec![[0, 1], [1, 3], [3, 2], [2, 0]];
        assert!(Mesh2D::new(v, t, e, 0.0).is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = unit_square(2);
        let back = Mesh2D::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
        assert!(m.to_text().starts_with("mesh2d v1 kappa=0\n9\n"));
        assert!(Mesh2D::from_text("mesh2d v2 kappa=0\n").is_err());
        assert!(Mesh2D::from_text(&(m.to_text() + "1\n")).is_err());
    }

    #[test]
    fn refine_counts() {
        let m = unit_square(3);
        let nedges = (m.triangles().len() * 3 + m.boundary_edges().len()) / 2;
        let r = refine(&m).unwrap();
        assert_eq!(r.triangles().len(), 4 * m.triangles().len());
        assert_eq!(r.num_vertices(), m.num_vertices() + nedges);
        assert_eq!(r.boundary_edges().len(), 2 * m.boundary_edges().len());
        assert!((domain_volume(&r) - 1.0).abs() < 1e-14);
    }
}
