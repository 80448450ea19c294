//! Nyström discretization of single, double and adjoint double layer
//! potentials with the fundamental solution `Φ_k(x,y) = (i/4) H_0^{(1)}(k|x−y|)`.
//!
//! Densities are per unit arc length. Self-blocks split the kernel as
//! `k1(t,τ) ln(4 sin²((t−τ)/2)) + k2(t,τ)` and integrate the logarithmic part
//! with trigonometric interpolation weights; everything else uses the plain
//! weighted trapezoidal rule.

use crate::geometry::{BoundaryQuadrature, Point};
use crate::linalg::{ComplexMatrix, C64};
use crate::specfun::{bessel01, EULER_GAMMA};
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

/// Distinct boundaries closer than this cannot be coupled by the plain rule.
pub const OVERLAP_DISTANCE: f64 = 1e-6;
/// Minimum distance from field points to the source curve.
pub const FIELD_CLEARANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PotentialError {
    #[error("boundaries overlap: node distance {distance:e} below {OVERLAP_DISTANCE:e}")]
    GeometryOverlap { distance: f64 },
    #[error("evaluation point {index} lies {distance:e} from the source curve")]
    TooClose { index: usize, distance: f64 },
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

type Result<T> = std::result::Result<T, PotentialError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerVariant {
    Single,
    Double,
    AdjointDouble,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wavenumber {
    Helmholtz(C64),
    /// `k → 0` limit with `Φ_0 = −ln|x−y| / 2π`, used for calibration.
    Laplace,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerKernel {
    pub variant: LayerVariant,
    pub wavenumber: Wavenumber,
}

impl LayerKernel {
    pub fn new(variant: LayerVariant, k: C64) -> Result<Self> {
        if k == C64::new(0.0, 0.0) || !k.is_finite() {
            return Err(PotentialError::InvalidKernel(format!("wavenumber {k} must be finite and nonzero")));
        }
        if k.im < 0.0 {
            return Err(PotentialError::InvalidKernel(format!("wavenumber {k} has negative imaginary part")));
        }
        Ok(LayerKernel { variant, wavenumber: Wavenumber::Helmholtz(k) })
    }

    pub fn laplace(variant: LayerVariant) -> Self {
        LayerKernel { variant, wavenumber: Wavenumber::Laplace }
    }
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `(Φ, ∂Φ/∂r · r)`-type radial data at distance `r`:
/// returns `(i/4)H_0(kr)` and `(ik/4)H_1(kr)/r`.
fn radial(w: Wavenumber, r: f64) -> (C64, C64) {
    match w {
        Wavenumber::Helmholtz(k) => {
            let b = bessel01(k * r);
            let i4 = C64::new(0.0, 0.25);
            (i4 * b.h0, i4 * k * b.h1 / r)
        }
        Wavenumber::Laplace => (C64::new(-r.ln() / TAU, 0.0), C64::new(1.0 / (TAU * r * r), 0.0)),
    }
}

/// Trigonometric weights `R_j` for `∫ ln(4 sin²((t−τ)/2)) φ(τ) dτ` on `m = 2n`
/// equispaced nodes, indexed by `|i − j|`.
pub fn log_weights(m: usize) -> Vec<f64> {
    let n = m / 2;
    let nf = n as f64;
    (0..m)
        .map(|d| {
            let s = TAU * d as f64 / m as f64;
            let mut acc = 0.0;
            for l in 1..n {
                acc += (l as f64 * s).cos() / l as f64;
            }
            -(TAU / nf) * acc - (PI / (nf * nf)) * (nf * s).cos()
        })
        .collect()
}

/// Unsplit kernel value between target `i` and source `j` (times source speed
/// for single and double layers through the weights applied by the caller).
fn kernel_value(kernel: &LayerKernel, x: Point, nx: Point, y: Point, ny: Point) -> (C64, f64) {
    let d = sub(x, y);
    let r = d[0].hypot(d[1]);
    let (phi, h1r) = radial(kernel.wavenumber, r);
    let v = match kernel.variant {
        LayerVariant::Single => phi,
        LayerVariant::Double => h1r * dot(d, ny),
        LayerVariant::AdjointDouble => -h1r * dot(d, nx),
    };
    (v, r)
}

/// Dense Nyström matrix of the layer operator from `source` to `target`.
///
/// `self_block` must be set exactly when both arguments are the same
/// quadrature; the diagonal then carries the limiting values and the single
/// layer and Helmholtz double layers use the log-split rule.
pub fn assemble_block(
    kernel: &LayerKernel,
    source: &BoundaryQuadrature,
    target: &BoundaryQuadrature,
    self_block: bool,
) -> Result<ComplexMatrix> {
    if self_block {
        if source.points != target.points {
            return Err(PotentialError::DimensionMismatch("self block requires identical quadratures".into()));
        }
        return Ok(assemble_self(kernel, source));
    }
    let m = target.len();
    let n = source.len();
    let rows: Vec<Result<Vec<C64>>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let (v, r) = kernel_value(kernel, target.points[i], target.normals[i], source.points[j], source.normals[j]);
                if r < OVERLAP_DISTANCE {
                    return Err(PotentialError::GeometryOverlap { distance: r });
                }
                row.push(v * source.weights[j]);
            }
            Ok(row)
        })
        .collect();
    let mut data = Vec::with_capacity(m * n);
    for row in rows {
        data.extend(row?);
    }
    Ok(ComplexMatrix::from_row_major(m, n, data).expect("row lengths fixed"))
}

/// Self block with the log-split rule applied within each panel. A panel of
/// `n` nodes is its own `2π`-periodic parameter `s`; since `t` advances by
/// `2π/panels` per panel, the local speed is `|dx/dt| / panels`. Pairs on
/// different panels use the plain weighted rule.
fn assemble_self(kernel: &LayerKernel, q: &BoundaryQuadrature) -> ComplexMatrix {
    let m = q.len();
    let panels = q.panels.max(1);
    let n = m / panels;
    let h = TAU / n as f64;
    let weights = log_weights(n);
    let rows: Vec<Vec<C64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![C64::new(0.0, 0.0); m];
            for j in 0..m {
                let d = q.separation(i, j);
                if i / n != j / n {
                    let (v, _) = kernel_value(kernel, d, q.normals[i], [0.0, 0.0], q.normals[j]);
                    row[j] = v * q.weights[j];
                    continue;
                }
                let speed_j = q.speed(j) / panels as f64;
                let rw = weights[(i as isize - j as isize).unsigned_abs()];
                if i == j {
                    row[j] = self_diagonal(kernel, q, i, rw, h);
                    continue;
                }
                let r = d[0].hypot(d[1]);
                let lg = {
                    let s = (0.5 * panels as f64 * (q.parameter[i] - q.parameter[j])).sin();
                    (4.0 * s * s).ln()
                };
                row[j] = match (kernel.wavenumber, kernel.variant) {
                    (Wavenumber::Helmholtz(k), LayerVariant::Single) => {
                        let b = bessel01(k * r);
                        let full = C64::new(0.0, 0.25) * b.h0 * speed_j;
                        let k1 = -b.j0 * speed_j / (4.0 * PI);
                        rw * k1 + h * (full - k1 * lg)
                    }
                    (Wavenumber::Helmholtz(k), variant) => {
                        let b = bessel01(k * r);
                        let geom = match variant {
                            LayerVariant::Double => dot(d, q.normals[j]) * speed_j / r,
                            _ => -dot(d, q.normals[i]) * speed_j / r,
                        };
                        let full = C64::new(0.0, 0.25) * k * b.h1 * geom;
                        let k1 = -k * b.j1 * geom / (4.0 * PI);
                        rw * k1 + h * (full - k1 * lg)
                    }
                    (Wavenumber::Laplace, LayerVariant::Single) => {
                        let full = -r.ln() * speed_j / TAU;
                        let k1 = -speed_j / (4.0 * PI);
                        C64::new(rw * k1 + h * (full - k1 * lg), 0.0)
                    }
                    (Wavenumber::Laplace, _) => {
                        let (v, _) = kernel_value(kernel, d, q.normals[i], [0.0, 0.0], q.normals[j]);
                        v * speed_j * h
                    }
                };
            }
            row
        })
        .collect();
    ComplexMatrix::from_row_major(m, m, rows.concat()).expect("square")
}

fn self_diagonal(kernel: &LayerKernel, q: &BoundaryQuadrature, i: usize, rw: f64, h: f64) -> C64 {
    let panels = q.panels.max(1) as f64;
    let speed = q.speed(i) / panels;
    let curvature_term = dot(q.normals[i], q.accelerations[i]) / (4.0 * PI * speed * panels * panels);
    match (kernel.wavenumber, kernel.variant) {
        (Wavenumber::Helmholtz(k), LayerVariant::Single) => {
            let k1 = -speed / (4.0 * PI);
            let k2 = (C64::new(0.0, 0.25) - ((k * speed * 0.5).ln() + EULER_GAMMA) / TAU) * speed;
            rw * k1 + h * k2
        }
        (Wavenumber::Laplace, LayerVariant::Single) => {
            let k1 = -speed / (4.0 * PI);
            let k2 = -speed.ln() * speed / TAU;
            C64::new(rw * k1 + h * k2, 0.0)
        }
        // k1 vanishes on the diagonal for both double layers
        (_, _) => C64::new(h * curvature_term, 0.0),
    }
}

fn check_clearance(source: &BoundaryQuadrature, points: &[Point]) -> Result<()> {
    for (index, p) in points.iter().enumerate() {
        let distance = source
            .points
            .iter()
            .map(|y| (p[0] - y[0]).hypot(p[1] - y[1]))
            .fold(f64::INFINITY, f64::min);
        if distance < FIELD_CLEARANCE {
            return Err(PotentialError::TooClose { index, distance });
        }
    }
    Ok(())
}

fn check_density(source: &BoundaryQuadrature, density: &[C64]) -> Result<()> {
    if density.len() != source.len() {
        return Err(PotentialError::DimensionMismatch(format!(
            "density has {} entries for {} nodes",
            density.len(),
            source.len()
        )));
    }
    Ok(())
}

/// Layer potential at points off the source curve.
pub fn evaluate_field(
    kernel: &LayerKernel,
    source: &BoundaryQuadrature,
    density: &[C64],
    points: &[Point],
) -> Result<Vec<C64>> {
    check_density(source, density)?;
    check_clearance(source, points)?;
    if kernel.variant == LayerVariant::AdjointDouble {
        return Err(PotentialError::InvalidKernel(
            "the adjoint double layer is a boundary operator; use evaluate_field_gradient".into(),
        ));
    }
    Ok(points
        .par_iter()
        .map(|&x| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..source.len() {
                let (v, _) = kernel_value(kernel, x, [0.0, 0.0], source.points[j], source.normals[j]);
                acc += v * source.weights[j] * density[j];
            }
            acc
        })
        .collect())
}

/// `dir·∇_x` of the kernel from source `(y, ν)` and the distance.
fn gradient_value(kernel: &LayerKernel, x: Point, dir: Point, y: Point, nu: Point) -> (C64, f64) {
    let d = sub(x, y);
    let r = d[0].hypot(d[1]);
    let v = match kernel.variant {
        LayerVariant::Single | LayerVariant::AdjointDouble => {
            let (_, h1r) = radial(kernel.wavenumber, r);
            -h1r * dot(d, dir)
        }
        LayerVariant::Double => {
            // D = f(r) (x−y)·ν with f = (ik/4) H_1(kr)/r
            let (f, fp) = match kernel.wavenumber {
                Wavenumber::Helmholtz(k) => {
                    let b = bessel01(k * r);
                    let ik4 = C64::new(0.0, 0.25) * k;
                    (ik4 * b.h1 / r, ik4 * (k * b.h0 / r - 2.0 * b.h1 / (r * r)))
                }
                Wavenumber::Laplace => (C64::new(1.0 / (TAU * r * r), 0.0), C64::new(-1.0 / (PI * r * r * r), 0.0)),
            };
            fp * (dot(d, dir) / r) * dot(d, nu) + f * dot(nu, dir)
        }
    };
    (v, r)
}

/// Normal derivative at the `target` nodes of the layer potential on a
/// separate `source` curve. For the double layer this is the hypersingular
/// kernel, which is smooth between disjoint curves.
pub fn assemble_normal_derivative_block(
    kernel: &LayerKernel,
    source: &BoundaryQuadrature,
    target: &BoundaryQuadrature,
) -> Result<ComplexMatrix> {
    let m = target.len();
    let n = source.len();
    let rows: Vec<Result<Vec<C64>>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let (v, r) = gradient_value(kernel, target.points[i], target.normals[i], source.points[j], source.normals[j]);
                if r < OVERLAP_DISTANCE {
                    return Err(PotentialError::GeometryOverlap { distance: r });
                }
                row.push(v * source.weights[j]);
            }
            Ok(row)
        })
        .collect();
    let mut data = Vec::with_capacity(m * n);
    for row in rows {
        data.extend(row?);
    }
    Ok(ComplexMatrix::from_row_major(m, n, data).expect("row lengths fixed"))
}

/// Directional derivative `d·∇u` of a layer potential. The single and
/// adjoint double variants both differentiate the single-layer potential.
pub fn evaluate_field_gradient(
    kernel: &LayerKernel,
    source: &BoundaryQuadrature,
    density: &[C64],
    points: &[Point],
    directions: &[Point],
) -> Result<Vec<C64>> {
    check_density(source, density)?;
    if points.len() != directions.len() {
        return Err(PotentialError::DimensionMismatch("one direction per point required".into()));
    }
    check_clearance(source, points)?;
    Ok(points
        .par_iter()
        .zip(directions.par_iter())
        .map(|(&x, &dir)| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..source.len() {
                let y = source.points[j];
                let nu = source.normals[j];
                let (value, _) = gradient_value(kernel, x, dir, y, nu);
                acc += value * source.weights[j] * density[j];
            }
            acc
        })
        .collect())
}
