//! Closed parametrized curves, graded corner meshes, boundary quadrature and
//! point location.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

pub type Point = [f64; 2];

/// Grading exponent used for polygons when none is given.
pub const DEFAULT_GRADING: f64 = 8.0;
/// Points within this distance of a curve are reported as [`Location::Boundary`].
pub const BOUNDARY_BAND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid geometry: {0}")]
    DomainError(String),
}

type Result<T> = std::result::Result<T, GeometryError>;

fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(GeometryError::DomainError(msg.into()))
}

/// A closed curve, traversed counterclockwise for `t ∈ [0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Curve {
    Circle { center: Point, radius: f64 },
    Kite { center: Point, scale: f64 },
    Peanut { center: Point, scale: f64 },
    Polygon { vertices: Vec<Point> },
}

/// Result of [`contains_point`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Outside,
    Boundary,
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn segment_distance(z: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let t = (dot(sub(z, a), ab) / dot(ab, ab)).clamp(0.0, 1.0);
    norm(sub(z, [a[0] + t * ab[0], a[1] + t * ab[1]]))
}

impl Curve {
    pub fn circle(center: Point, radius: f64) -> Result<Self> {
        let c = Curve::Circle { center, radius };
        c.validate()?;
        Ok(c)
    }

    pub fn kite(center: Point, scale: f64) -> Result<Self> {
        let c = Curve::Kite { center, scale };
        c.validate()?;
        Ok(c)
    }

    pub fn peanut(center: Point, scale: f64) -> Result<Self> {
        let c = Curve::Peanut { center, scale };
        c.validate()?;
        Ok(c)
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        let c = Curve::Polygon { vertices };
        c.validate()?;
        Ok(c)
    }

    /// Checks radii and scales, and that polygons are convex and counterclockwise.
    pub fn validate(&self) -> Result<()> {
        let finite = |p: &Point| p[0].is_finite() && p[1].is_finite();
        match self {
            Curve::Circle { center, radius } => {
                if !finite(center) || !(*radius > 0.0) || !radius.is_finite() {
                    return domain(format!("circle radius must be positive, got {radius}"));
                }
            }
            Curve::Kite { center, scale } | Curve::Peanut { center, scale } => {
                if !finite(center) || !(*scale > 0.0) || !scale.is_finite() {
                    return domain(format!("curve scale must be positive, got {scale}"));
                }
            }
            Curve::Polygon { vertices } => {
                let n = vertices.len();
                if n < 3 {
                    return domain("polygon needs at least 3 vertices");
                }
                if !vertices.iter().all(finite) {
                    return domain("polygon vertex is not finite");
                }
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let c = vertices[(i + 2) % n];
                    if norm(sub(b, a)) == 0.0 {
                        return domain(format!("polygon vertices {i} and {} coincide", (i + 1) % n));
                    }
                    if cross(sub(b, a), sub(c, b)) <= 0.0 {
                        return domain(format!(
                            "polygon must be convex with counterclockwise vertices (turn at vertex {} is not left)",
                            (i + 1) % n
                        ));
                    }
                }
                // a convex chain can still wind twice; total turning must be 2π
                let turning: f64 = (0..n)
                    .map(|i| {
                        let a = sub(vertices[(i + 1) % n], vertices[i]);
                        let b = sub(vertices[(i + 2) % n], vertices[(i + 1) % n]);
                        cross(a, b).atan2(dot(a, b))
                    })
                    .sum();
                if (turning - TAU).abs() > 1e-9 {
                    return domain("polygon is not simple");
                }
            }
        }
        Ok(())
    }

    /// Position and first two derivatives at parameter `t` for smooth curves.
    fn smooth_eval(&self, t: f64) -> (Point, Point, Point) {
        let (s, c) = t.sin_cos();
        match self {
            Curve::Circle { center, radius: r } => (
                [center[0] + r * c, center[1] + r * s],
                [-r * s, r * c],
                [-r * c, -r * s],
            ),
            Curve::Kite { center, scale: a } => {
                let (s2, c2) = (2.0 * t).sin_cos();
                (
                    [center[0] + a * (c + 0.65 * c2 - 0.65), center[1] + a * 1.5 * s],
                    [a * (-s - 1.3 * s2), a * 1.5 * c],
                    [a * (-c - 2.6 * c2), -a * 1.5 * s],
                )
            }
            Curve::Peanut { center, scale: a } => {
                let (s2, c2) = (2.0 * t).sin_cos();
                let g = 1.0 - 0.75 * s * s;
                let g1 = -0.75 * s2;
                let g2 = -1.5 * c2;
                let sg = g.sqrt();
                let rho = a * sg;
                let rho1 = a * g1 / (2.0 * sg);
                let rho2 = a * (g2 / (2.0 * sg) - g1 * g1 / (4.0 * g * sg));
                (
                    [center[0] + rho * c, center[1] + rho * s],
                    [rho1 * c - rho * s, rho1 * s + rho * c],
                    [rho2 * c - 2.0 * rho1 * s - rho * c, rho2 * s + 2.0 * rho1 * c - rho * s],
                )
            }
            Curve::Polygon { .. } => unreachable!("polygons are sampled per side"),
        }
    }

    /// Point at parameter `t`; polygons use the ungraded side parametrization.
    pub fn point_at(&self, t: f64) -> Point {
        match self {
            Curve::Polygon { vertices } => {
                let n = vertices.len();
                let u = t.rem_euclid(TAU) / TAU * n as f64;
                let j = (u.floor() as usize).min(n - 1);
                let f = u - j as f64;
                let a = vertices[j];
                let b = vertices[(j + 1) % n];
                [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]
            }
            _ => self.smooth_eval(t).0,
        }
    }

    /// Exact perimeter for circles and polygons.
    pub fn exact_perimeter(&self) -> Option<f64> {
        match self {
            Curve::Circle { radius, .. } => Some(TAU * radius),
            Curve::Polygon { vertices } => {
                let n = vertices.len();
                Some((0..n).map(|i| norm(sub(vertices[(i + 1) % n], vertices[i]))).sum())
            }
            _ => None,
        }
    }

    /// Largest distance from the origin to a point of the curve.
    pub fn max_distance_from_origin(&self) -> f64 {
        match self {
            Curve::Circle { center, radius } => norm(*center) + radius,
            Curve::Polygon { vertices } => vertices.iter().map(|v| norm(*v)).fold(0.0, f64::max),
            _ => {
                let m = 4096;
                (0..m).map(|i| norm(self.point_at(TAU * i as f64 / m as f64))).fold(0.0, f64::max) + 1e-6
            }
        }
    }

    /// Euclidean distance from `z` to the curve.
    pub fn distance_to(&self, z: Point) -> f64 {
        match self {
            Curve::Circle { center, radius } => (norm(sub(z, *center)) - radius).abs(),
            Curve::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| segment_distance(z, vertices[i], vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
            _ => {
                let m = 2048;
                let h = TAU / m as f64;
                let d2 = |t: f64| {
                    let p = self.point_at(t);
                    let d = sub(p, z);
                    dot(d, d)
                };
                let best = (0..m)
                    .map(|i| i as f64 * h)
                    .min_by(|a, b| d2(*a).total_cmp(&d2(*b)))
                    .unwrap_or(0.0);
                // golden-section refinement around the best sample
                let (mut lo, mut hi) = (best - h, best + h);
                let g = 0.5 * (5f64.sqrt() - 1.0);
                for _ in 0..80 {
                    let a = hi - g * (hi - lo);
                    let b = lo + g * (hi - lo);
                    if d2(a) < d2(b) {
                        hi = b;
                    } else {
                        lo = a;
                    }
                }
                d2(0.5 * (lo + hi)).sqrt()
            }
        }
    }

    /// Geometric center used for placing artificial objects.
    pub fn center(&self) -> Point {
        match self {
            Curve::Circle { center, .. } | Curve::Kite { center, .. } | Curve::Peanut { center, .. } => *center,
            Curve::Polygon { vertices } => {
                let n = vertices.len() as f64;
                let s = vertices.iter().fold([0.0, 0.0], |acc, v| [acc[0] + v[0], acc[1] + v[1]]);
                [s[0] / n, s[1] / n]
            }
        }
    }
}

fn check_grading(p: f64) -> Result<()> {
    if !(2.0..=10.0).contains(&p) {
        return domain(format!("grading exponent {p} outside [2, 10]"));
    }
    Ok(())
}

/// `w(s)` and its first two derivatives for the polynomial grading substitution.
pub fn graded_parameter_derivatives(s: f64, p: f64) -> Result<(f64, f64, f64)> {
    check_grading(p)?;
    if !(0.0..=TAU).contains(&s) {
        return domain(format!("graded parameter {s} outside [0, 2π]"));
    }
    let a = 1.0 / p - 0.5;
    let b = 1.0 / p;
    let v = |s: f64| {
        let c = (PI - s) / PI;
        (a * c * c * c + b * (s - PI) / PI + 0.5, -3.0 * a * c * c / PI + b / PI, 6.0 * a * c / (PI * PI))
    };
    let (v0, v1, v2) = v(s);
    let (u0, u1, u2) = v(TAU - s);
    let (u1, u2) = (-u1, u2);
    let pw = |x: f64, e: f64| if x <= 0.0 { 0.0 } else { x.powf(e) };
    let fa = pw(v0, p);
    let fb = pw(u0, p);
    let fa1 = p * pw(v0, p - 1.0) * v1;
    let fb1 = p * pw(u0, p - 1.0) * u1;
    let fa2 = p * (p - 1.0) * pw(v0, p - 2.0) * v1 * v1 + p * pw(v0, p - 1.0) * v2;
    let fb2 = p * (p - 1.0) * pw(u0, p - 2.0) * u1 * u1 + p * pw(u0, p - 1.0) * u2;
    let den = fa + fb;
    let num1 = fa1 * fb - fa * fb1;
    let w = TAU * fa / den;
    let w1 = TAU * num1 / (den * den);
    let w2 = TAU * ((fa2 * fb - fa * fb2) * den - 2.0 * num1 * (fa1 + fb1)) / (den * den * den);
    Ok((w, w1, w2))
}

/// Strictly increasing bijection of `[0, 2π]` whose derivatives through
/// order `p − 1` vanish at both ends.
pub fn graded_parameter_map(s: f64, p: f64) -> Result<f64> {
    Ok(graded_parameter_derivatives(s, p)?.0)
}

/// Nodes, derivatives, normals and arc-length weights on a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryQuadrature {
    pub points: Vec<Point>,
    /// `dx/dt` in the global (possibly graded) parameter.
    pub tangents: Vec<Point>,
    /// `d²x/dt²`.
    pub accelerations: Vec<Point>,
    pub normals: Vec<Point>,
    pub weights: Vec<f64>,
    pub parameter: Vec<f64>,
    /// Number of equal, contiguous panels: one per polygon side, else 1.
    pub panels: usize,
    /// `points[i] = anchors[i] + offsets[i]`; polygon nodes are anchored at
    /// their nearest corner so that node separations near corners keep full
    /// relative precision. Smooth curves anchor at the origin.
    pub anchors: Vec<Point>,
    pub offsets: Vec<Point>,
}

impl BoundaryQuadrature {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn speed(&self, i: usize) -> f64 {
        norm(self.tangents[i])
    }

    /// `points[i] − points[j]` without cancellation near shared corners.
    pub fn separation(&self, i: usize, j: usize) -> Point {
        let a = sub(self.anchors[i], self.anchors[j]);
        let o = sub(self.offsets[i], self.offsets[j]);
        [a[0] + o[0], a[1] + o[1]]
    }

    fn from_samples(parameter: Vec<f64>, samples: Vec<(Point, Point, Point)>, panels: usize, anchored: Vec<(Point, Point)>) -> Self {
        let m = samples.len();
        let (anchors, offsets) = anchored.into_iter().unzip();
        let mut q = BoundaryQuadrature {
            points: Vec::with_capacity(m),
            tangents: Vec::with_capacity(m),
            accelerations: Vec::with_capacity(m),
            normals: Vec::with_capacity(m),
            weights: Vec::with_capacity(m),
            parameter,
            panels,
            anchors,
            offsets,
        };
        for (x, d1, d2) in samples {
            let speed = norm(d1);
            q.points.push(x);
            q.tangents.push(d1);
            q.accelerations.push(d2);
            q.normals.push([d1[1] / speed, -d1[0] / speed]);
            q.weights.push(speed * TAU / m as f64);
        }
        q
    }
}

/// Equispaced nodes in the curve parameter. Polygons get one graded panel
/// per side with corner nodes excluded and an even node count per side; `grading` defaults to 4 for them and
/// is ignored for smooth curves.
pub fn sample_curve(curve: &Curve, m: usize, grading: Option<f64>) -> Result<BoundaryQuadrature> {
    curve.validate()?;
    if m % 2 == 1 {
        return domain(format!("node count must be even, got {m}"));
    }
    if m < 32 {
        return domain(format!("node count must be at least 32, got {m}"));
    }
    match curve {
        Curve::Polygon { vertices } => {
            let p = grading.unwrap_or(DEFAULT_GRADING);
            check_grading(p)?;
            let sides = vertices.len();
            if m % (2 * sides) != 0 {
                return domain(format!("node count {m} must give an even count on each of the {sides} sides"));
            }
            let per_side = m / sides;
            let hs = TAU / per_side as f64;
            let ns = sides as f64;
            let mut params = Vec::with_capacity(m);
            let mut samples = Vec::with_capacity(m);
            let mut anchored = Vec::with_capacity(m);
            for j in 0..sides {
                let a = vertices[j];
                let b = vertices[(j + 1) % sides];
                let e = sub(b, a);
                for i in 0..per_side {
                    let s = (i as f64 + 0.5) * hs;
                    let (w, w1, w2) = graded_parameter_derivatives(s, p)?;
                    let f = w / TAU;
                    let d1 = ns * w1 / TAU;
                    let d2 = ns * ns * w2 / TAU;
                    params.push((j as f64 + s / TAU) * TAU / ns);
                    samples.push(([a[0] + f * e[0], a[1] + f * e[1]], [d1 * e[0], d1 * e[1]], [d2 * e[0], d2 * e[1]]));
                    // w(2π − s) = 2π − w(s): the mirrored node gives 1 − f exactly
                    anchored.push(if 2 * i < per_side {
                        (a, [f * e[0], f * e[1]])
                    } else {
                        let g = graded_parameter_derivatives(TAU - s, p)?.0 / TAU;
                        (b, [-g * e[0], -g * e[1]])
                    });
                }
            }
            Ok(BoundaryQuadrature::from_samples(params, samples, sides, anchored))
        }
        _ => {
            let params: Vec<f64> = (0..m).map(|i| TAU * i as f64 / m as f64).collect();
            let samples: Vec<(Point, Point, Point)> = params.iter().map(|&t| curve.smooth_eval(t)).collect();
            let anchored = samples.iter().map(|s| ([0.0, 0.0], s.0)).collect();
            Ok(BoundaryQuadrature::from_samples(params, samples, 1, anchored))
        }
    }
}

/// Winding-number location of `z` relative to the region enclosed by `curve`.
pub fn contains_point(curve: &Curve, z: Point) -> Location {
    let band = |d: f64| d.abs() <= BOUNDARY_BAND;
    match curve {
        Curve::Circle { center, radius } => {
            let d = norm(sub(z, *center)) - radius;
            if band(d) {
                Location::Boundary
            } else if d < 0.0 {
                Location::Inside
            } else {
                Location::Outside
            }
        }
        Curve::Polygon { vertices } => {
            if curve.distance_to(z) <= BOUNDARY_BAND {
                return Location::Boundary;
            }
            let n = vertices.len();
            let mut winding = 0i32;
            for i in 0..n {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let side = cross(sub(b, a), sub(z, a));
                if a[1] <= z[1] {
                    if b[1] > z[1] && side > 0.0 {
                        winding += 1;
                    }
                } else if b[1] <= z[1] && side < 0.0 {
                    winding -= 1;
                }
            }
            if winding != 0 {
                Location::Inside
            } else {
                Location::Outside
            }
        }
        Curve::Kite { center, scale } => {
            // y = 1.5 a sin t fixes two parameters; inside lies between their x
            let x = (z[0] - center[0]) / scale;
            let y = (z[1] - center[1]) / scale;
            let sy = y / 1.5;
            if sy.abs() > 1.0 {
                return Location::Outside;
            }
            let c = (1.0 - sy * sy).sqrt();
            let c2 = 1.0 - 2.0 * sy * sy;
            let xr = c + 0.65 * c2 - 0.65;
            let xl = -c + 0.65 * c2 - 0.65;
            let gap = (x - xr).abs().min((x - xl).abs()) * scale;
            if band(gap) || band((sy.abs() - 1.0) * 1.5 * scale) {
                Location::Boundary
            } else if x > xl && x < xr {
                Location::Inside
            } else {
                Location::Outside
            }
        }
        Curve::Peanut { center, scale } => {
            // star-shaped about the center with polar angle equal to t
            let d = sub(z, *center);
            let t = d[1].atan2(d[0]);
            let rho = scale * (1.0 - 0.75 * t.sin().powi(2)).sqrt();
            let gap = norm(d) - rho;
            if band(gap) {
                Location::Boundary
            } else if gap < 0.0 {
                Location::Inside
            } else {
                Location::Outside
            }
        }
    }
}
