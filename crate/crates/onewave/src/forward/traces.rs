//! Analytic disk quantities and Green-function test traces on `∂B`.

use super::boundary::{order_of, projection_matrix, BoundaryFunction};
use super::system::{DtnMatrix, ForwardSystem, Object, Resolution, Scenario};
use super::{ForwardError, Result};
use crate::geometry::{Curve, Point};
use crate::linalg::{ComplexMatrix, C64};
use crate::specfun::{bessel01, bessel_j_upto, bessel_jy_upto, bessel_log_derivative};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// `|J_n(kR)|` relative to its envelope below this flags a disk eigenvalue.
pub const EIGENVALUE_THRESHOLD: f64 = 1e-3;
/// Grid points closer than this to an artificial disk are not tested.
pub const TRACE_CLEARANCE: f64 = 1e-3;
const POINT_BATCH: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskEigenvalueReport {
    /// Smallest `|J_n(kR)| / √(J_n² + Y_n²)` over the checked orders.
    pub min_ratio: f64,
    /// Order attaining it.
    pub order: usize,
    pub flagged: bool,
}

/// Proximity of `k²` to a Dirichlet eigenvalue of the disk of radius `R`,
/// checked over orders `0..=N/2`. Orders above `kR` have no zeros there and
/// count as ratio 1.
pub fn detect_disk_eigenvalue(k: f64, radius: f64, modes: usize) -> Result<DiskEigenvalueReport> {
    let x = k * radius;
    let top = modes / 2;
    let pairs = bessel_jy_upto(top, x)?;
    let mut report = DiskEigenvalueReport { min_ratio: 1.0, order: 0, flagged: false };
    for (n, p) in pairs.iter().enumerate() {
        if n as f64 > x {
            break;
        }
        let ratio = p.j.abs() / p.j.hypot(p.y).max(1e-300);
        if ratio < report.min_ratio {
            report.min_ratio = ratio;
            report.order = n;
        }
    }
    report.flagged = report.min_ratio < EIGENVALUE_THRESHOLD;
    Ok(report)
}

fn ensure_no_disk_eigenvalue(k: f64, radius: f64, modes: usize) -> Result<()> {
    let report = detect_disk_eigenvalue(k, radius, modes)?;
    if report.flagged {
        return Err(ForwardError::NearDiskEigenvalue { order: report.order });
    }
    Ok(())
}

/// Diagonal DtN map of the empty disk, `k J'_n(kR)/J_n(kR)`.
pub fn dtn_empty_disk(k: f64, radius: f64, modes: usize) -> Result<DtnMatrix> {
    ensure_no_disk_eigenvalue(k, radius, modes)?;
    let d = bessel_log_derivative(modes / 2, C64::new(k * radius, 0.0));
    let diag: Vec<C64> = (0..modes)
        .map(|i| C64::new(k * d[order_of(i, modes).unsigned_abs() as usize].re, 0.0))
        .collect();
    Ok(DtnMatrix {
        entries: ComplexMatrix::from_diagonal(&diag),
        radius,
        wavenumber: C64::new(k, 0.0),
        scenario_hash: Scenario::new(radius, C64::new(k, 0.0), Object::Empty)?.hash(),
    })
}

/// `Φ_k(x, z)` and `∂_{ν(x)} Φ_k(x, z)`.
fn fundamental(k: f64, x: Point, nu: Point, z: Point) -> (C64, C64) {
    let d = [x[0] - z[0], x[1] - z[1]];
    let r = d[0].hypot(d[1]);
    let b = bessel01(C64::new(k * r, 0.0));
    let i4 = C64::new(0.0, 0.25);
    (i4 * b.h0, -i4 * k * b.h1 * (d[0] * nu[0] + d[1] * nu[1]) / r)
}

/// Coefficients of `∂_ν Ψ_k(·, z)|_{∂B}` for the disk Green function
/// vanishing on `∂B`.
pub fn psi_test_trace(z: Point, k: f64, radius: f64, modes: usize) -> Result<BoundaryFunction> {
    ensure_no_disk_eigenvalue(k, radius, modes)?;
    Ok(classical_trace(z, k, radius, modes))
}

fn classical_trace(z: Point, k: f64, radius: f64, modes: usize) -> BoundaryFunction {
    let rz = z[0].hypot(z[1]);
    let theta = z[1].atan2(z[0]);
    let top = modes / 2;
    let jr = bessel_j_upto(top, k * radius).expect("positive argument");
    let jz = bessel_j_upto(top, k * rz).expect("nonnegative argument");
    let scale = -(TAU * radius).sqrt() / (TAU * radius);
    let coefficients = (0..modes)
        .map(|i| {
            let n = order_of(i, modes);
            let a = n.unsigned_abs() as usize;
            C64::from_polar(scale * jz[a] / jr[a], -(n as f64) * theta)
        })
        .collect();
    BoundaryFunction::new(coefficients, radius)
}

/// Which Green function vanishing on `∂B` supplies the test traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceKind {
    /// `Ψ_k`: the disk `B` alone.
    Classical,
    /// `Ψ̃_k`: also vanishing on an artificial disk `B̃`.
    Tilde { center: Point, radius: f64 },
    /// `Ψ̃'_k`: `B̃` filled with a real refractive index.
    TildePrime { center: Point, radius: f64, index: f64 },
}

impl TraceKind {
    fn disk(&self) -> Option<(Point, f64)> {
        match self {
            TraceKind::Classical => None,
            TraceKind::Tilde { center, radius } | TraceKind::TildePrime { center, radius, .. } => {
                Some((*center, *radius))
            }
        }
    }

    fn with_radius(&self, r: f64) -> Self {
        match self {
            TraceKind::Classical => TraceKind::Classical,
            TraceKind::Tilde { center, .. } => TraceKind::Tilde { center: *center, radius: r },
            TraceKind::TildePrime { center, index, .. } => TraceKind::TildePrime { center: *center, radius: r, index: *index },
        }
    }

    fn scenario(&self, k: f64, outer: f64) -> Result<Option<Scenario>> {
        let k = C64::new(k, 0.0);
        Ok(match self {
            TraceKind::Classical => None,
            TraceKind::Tilde { center, radius } => {
                Some(Scenario::new(outer, k, Object::Dirichlet { curve: Curve::circle(*center, *radius)? })?)
            }
            TraceKind::TildePrime { center, radius, index } => Some(Scenario::new(
                outer,
                k,
                Object::Medium { curve: Curve::circle(*center, *radius)?, index: C64::new(*index, 0.0) },
            )?),
        })
    }
}

/// Reusable generator of test traces and Green-function values.
#[derive(Debug, Clone)]
pub struct TestTraces {
    kind: TraceKind,
    k: f64,
    radius: f64,
    modes: usize,
    system: Option<ForwardSystem>,
}

impl TestTraces {
    /// Factors the two-boundary system once. An ill-conditioned artificial
    /// disk is enlarged by 5% and tried once more.
    pub fn new(kind: TraceKind, k: f64, radius: f64, modes: usize, resolution: &Resolution) -> Result<Self> {
        if !(k > 0.0) {
            return Err(ForwardError::InvalidScenario(format!("test traces need real k > 0, got {k}")));
        }
        if kind == TraceKind::Classical {
            ensure_no_disk_eigenvalue(k, radius, modes)?;
            return Ok(TestTraces { kind, k, radius, modes, system: None });
        }
        let build = |kind: &TraceKind| -> Result<ForwardSystem> {
            let scenario = kind.scenario(k, radius)?.expect("artificial disk present");
            ForwardSystem::new(&scenario, resolution)
        };
        match build(&kind) {
            Ok(system) => Ok(TestTraces { kind, k, radius, modes, system: Some(system) }),
            Err(ForwardError::IllConditioned { .. }) => {
                let (_, r) = kind.disk().expect("artificial disk present");
                let adjusted = kind.with_radius(1.05 * r);
                let system = build(&adjusted)?;
                Ok(TestTraces { kind: adjusted, k, radius, modes, system: Some(system) })
            }
            Err(e) => Err(e),
        }
    }

    /// The kind actually in use, after any radius adjustment.
    pub fn kind(&self) -> &TraceKind {
        &self.kind
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    /// Whether `z` is too close to the artificial disk or outside `B`.
    pub fn excludes(&self, z: Point, clearance: f64) -> bool {
        if z[0].hypot(z[1]) >= self.radius - clearance {
            return true;
        }
        match self.kind.disk() {
            Some((c, r)) => (z[0] - c[0]).hypot(z[1] - c[1]) < r + clearance,
            None => false,
        }
    }

    fn check_point(&self, index: usize, z: Point) -> Result<()> {
        if z[0].hypot(z[1]) >= self.radius - 1e-6 {
            return Err(ForwardError::InvalidScenario(format!("source point {z:?} is not inside B")));
        }
        if let Some((c, r)) = self.kind.disk() {
            let distance = (z[0] - c[0]).hypot(z[1] - c[1]) - r;
            if distance < TRACE_CLEARANCE {
                return Err(ForwardError::TooClose { index, distance });
            }
        }
        Ok(())
    }

    /// Densities of the correction field for each source point.
    fn correction_densities(&self, system: &ForwardSystem, zs: &[Point]) -> Result<ComplexMatrix> {
        let outer = system.outer_quadrature();
        let inner = system.inner_quadrature().expect("artificial disk");
        let f = ComplexMatrix::from_fn(outer.len(), zs.len(), |i, j| {
            -fundamental(self.k, outer.points[i], outer.normals[i], zs[j]).0
        });
        let mut g = ComplexMatrix::zeros(inner.len(), zs.len());
        for (j, z) in zs.iter().enumerate() {
            let (vals, ders): (Vec<C64>, Vec<C64>) =
                (0..inner.len()).map(|i| fundamental(self.k, inner.points[i], inner.normals[i], *z)).unzip();
            for (i, v) in system.inner_rhs(&vals, &ders).into_iter().enumerate() {
                g[(i, j)] = v;
            }
        }
        system.solve_densities(&f, Some(&g))
    }

    pub fn trace(&self, z: Point) -> Result<BoundaryFunction> {
        Ok(self.traces(&[z])?.remove(0))
    }

    /// Test traces for many source points.
    pub fn traces(&self, zs: &[Point]) -> Result<Vec<BoundaryFunction>> {
        for (i, z) in zs.iter().enumerate() {
            self.check_point(i, *z)?;
        }
        let Some(system) = &self.system else {
            return Ok(zs.iter().map(|z| classical_trace(*z, self.k, self.radius, self.modes)).collect());
        };
        let outer = system.outer_quadrature();
        let proj = projection_matrix(self.modes, outer.len(), self.radius);
        let mut out = Vec::with_capacity(zs.len());
        for chunk in zs.chunks(POINT_BATCH) {
            let dens = self.correction_densities(system, chunk)?;
            let mut dn = system.neumann_at_nodes(&dens);
            for (j, z) in chunk.iter().enumerate() {
                for i in 0..outer.len() {
                    dn[(i, j)] += fundamental(self.k, outer.points[i], outer.normals[i], *z).1;
                }
            }
            let coeffs = proj.matmul(&dn);
            for j in 0..chunk.len() {
                out.push(BoundaryFunction::new(coeffs.col(j), self.radius));
            }
        }
        Ok(out)
    }

    /// Green function value `Ψ(x, y)` for distinct points of `B` outside the
    /// artificial disk.
    pub fn green(&self, x: Point, y: Point) -> Result<C64> {
        self.check_point(0, x)?;
        self.check_point(1, y)?;
        let phi = fundamental(self.k, x, [0.0, 0.0], y).0;
        let Some(system) = &self.system else {
            return Ok(phi + disk_correction(self.k, self.radius, x, y));
        };
        let dens = self.correction_densities(system, &[y])?;
        Ok(phi + system.field(&dens.col(0), &[x])?[0])
    }
}

/// `ψ_k(x, y)` for the disk by the addition theorem:
/// `−(i/4) Σ_n H_n(kR) J_n(k|x|) J_n(k|y|) / J_n(kR) e^{in(θ_x − θ_y)}`.
fn disk_correction(k: f64, radius: f64, x: Point, y: Point) -> C64 {
    let top = 40 + (k * radius).ceil() as usize * 2;
    let pr = bessel_jy_upto(top, k * radius).expect("positive argument");
    let jx = bessel_j_upto(top, k * x[0].hypot(x[1])).expect("nonnegative argument");
    let jy = bessel_j_upto(top, k * y[0].hypot(y[1])).expect("nonnegative argument");
    let dtheta = x[1].atan2(x[0]) - y[1].atan2(y[0]);
    let mut acc = C64::new(0.0, 0.0);
    for n in 0..=top {
        let term = jx[n] * jy[n] * C64::new(1.0, pr[n].y / pr[n].j);
        if !term.is_finite() {
            break;
        }
        let weight = if n == 0 { 1.0 } else { 2.0 * (n as f64 * dtheta).cos() };
        acc += term * weight;
    }
    -C64::new(0.0, 0.25) * acc
}

/// Reference field used in the coefficient indicators.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceKind {
    /// `A₀(κ²) f`.
    EmptyDisk { kappa: f64 },
    /// `A(κ², B̂) f` with an impedance disk.
    ImpedanceHat { kappa: f64, curve: Curve, eta: C64 },
    /// `A(κ², B̂) f` with a penetrable disk.
    MediumHat { kappa: f64, curve: Curve, index: C64 },
}

/// `∂_ν u₀` or `∂_ν ũ₀` on `∂B` for Dirichlet data `f`.
pub fn u0_reference_trace(kind: &ReferenceKind, f: &BoundaryFunction, resolution: &Resolution) -> Result<BoundaryFunction> {
    let r = f.radius;
    match kind {
        ReferenceKind::EmptyDisk { kappa } => Ok(dtn_empty_disk(*kappa, r, f.modes())?.apply(f)),
        ReferenceKind::ImpedanceHat { kappa, curve, eta } => {
            let s = Scenario::new(r, C64::new(*kappa, 0.0), Object::Impedance { curve: curve.clone(), eta: *eta })?;
            ForwardSystem::new(&s, resolution)?.apply(f)
        }
        ReferenceKind::MediumHat { kappa, curve, index } => {
            let s = Scenario::new(r, C64::new(*kappa, 0.0), Object::Medium { curve: curve.clone(), index: *index })?;
            ForwardSystem::new(&s, resolution)?.apply(f)
        }
    }
}
