//! Scenarios and the coupled Nyström system for `Δu + k²u = 0` in `B∖Γ̄`
//! with `u = f` on `∂B` and a condition on the object boundary `Γ`.
//!
//! The field is `u = SL_{∂B}[φ_B] + SL_Γ[φ_Γ]`, except that a sound-soft
//! object carries the combined potential `(DL_Γ − iη SL_Γ)[φ_Γ]` so that its
//! rows are of the second kind on corner-graded meshes. Rows on `∂B` impose
//! the Dirichlet data; rows on `Γ` impose the object's condition. For a
//! penetrable disk the interior is eliminated with its Dirichlet-to-Neumann
//! map, applied mode by mode on the disk.

use super::boundary::{projection_matrix, synthesis_matrix, BoundaryFunction};
use super::{ForwardError, Result};
use crate::geometry::{sample_curve, BoundaryQuadrature, Curve, Point, DEFAULT_GRADING};
use crate::linalg::{lu_factor, ComplexMatrix, LuFactors, C64};
use crate::potential::{assemble_block, assemble_normal_derivative_block, evaluate_field, LayerKernel, LayerVariant};
use crate::specfun::bessel_log_derivative;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::TAU;

/// Required gap between an interior object and the measurement circle.
pub const OBJECT_CLEARANCE: f64 = 1e-3;
/// Condition estimates above this reject the system.
pub const CONDITION_LIMIT: f64 = 1e10;

/// What occupies the interior of `B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Object {
    Empty,
    Dirichlet { curve: Curve },
    Neumann { curve: Curve },
    /// `∂_ν u + η u = 0` with `ν` pointing out of the object.
    Impedance { curve: Curve, eta: C64 },
    /// Constant refractive index on a disk.
    Medium { curve: Curve, index: C64 },
}

impl Object {
    pub fn curve(&self) -> Option<&Curve> {
        match self {
            Object::Empty => None,
            Object::Dirichlet { curve }
            | Object::Neumann { curve }
            | Object::Impedance { curve, .. }
            | Object::Medium { curve, .. } => Some(curve),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub outer_radius: f64,
    pub wavenumber: C64,
    pub object: Object,
}

impl Scenario {
    pub fn new(outer_radius: f64, wavenumber: C64, object: Object) -> Result<Self> {
        let s = Scenario { outer_radius, wavenumber, object };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ForwardError::InvalidScenario(m));
        if !(self.outer_radius > 0.0) || !self.outer_radius.is_finite() {
            return bad(format!("outer radius must be positive, got {}", self.outer_radius));
        }
        let k = self.wavenumber;
        if !k.is_finite() || k.norm() == 0.0 || k.im < 0.0 {
            return bad(format!("wavenumber {k} must be finite, nonzero, with Im k >= 0"));
        }
        if let Some(curve) = self.object.curve() {
            curve.validate().map_err(|e| ForwardError::InvalidScenario(e.to_string()))?;
            let reach = curve.max_distance_from_origin();
            if reach > self.outer_radius - OBJECT_CLEARANCE {
                return bad(format!(
                    "object reaches radius {reach:.6} but must stay {OBJECT_CLEARANCE} inside the outer radius {}",
                    self.outer_radius
                ));
            }
        }
        if let Object::Medium { curve, index } = &self.object {
            if !matches!(curve, Curve::Circle { .. }) {
                return bad("penetrable objects must be disks".into());
            }
            if *index == C64::new(1.0, 0.0) || !index.is_finite() {
                return bad(format!("refractive index {index} must differ from 1"));
            }
        }
        if let Object::Impedance { eta, .. } = &self.object {
            if !eta.is_finite() {
                return bad("impedance must be finite".into());
            }
        }
        Ok(())
    }

    /// Short stable digest of the scenario.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("scenario serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Same object at another wavenumber.
    pub fn with_wavenumber(&self, k: C64) -> Self {
        Scenario { wavenumber: k, ..self.clone() }
    }
}

/// Node counts for the Nyström discretization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Resolution {
    /// Nodes on `∂B`.
    pub boundary: usize,
    /// Nodes on the object boundary.
    pub interior: usize,
    /// Grading exponent for polygon corners.
    pub grading: f64,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution { boundary: 512, interior: 256, grading: DEFAULT_GRADING }
    }
}

impl Resolution {
    pub fn refined(&self, factor: usize) -> Self {
        Resolution { boundary: self.boundary * factor, interior: self.interior * factor, grading: self.grading }
    }
}

/// `k_in = k√n` with `Im k_in ≥ 0`.
pub fn interior_wavenumber(k: C64, index: C64) -> C64 {
    let r = k * index.sqrt();
    if r.im < 0.0 {
        -r
    } else {
        r
    }
}

/// Circulant pair `(P₁, P₂)` on equispaced disk nodes such that the rows
/// `P₁ ∂_ν u − P₂ u = 0` state that `u` extends into the disk as a solution
/// of `Δw + k_in² w = 0`. Per mode the pair is `(J_m, k_in J'_m)` scaled to
/// unit length, so interior Dirichlet eigenvalues cause no blow-up.
fn disk_transmission_rows(k_in: C64, radius: f64, m: usize) -> (ComplexMatrix, ComplexMatrix) {
    let half = m / 2;
    let ratios = bessel_log_derivative(half, k_in * radius);
    let pair = |l: usize| {
        let lam = k_in * ratios[l];
        if !lam.is_finite() {
            return (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        }
        let s = (1.0 + lam.norm_sqr()).sqrt();
        (C64::new(1.0 / s, 0.0), lam / s)
    };
    let pairs: Vec<(C64, C64)> = (0..=half).map(pair).collect();
    let circulant = |pick: fn(&(C64, C64)) -> C64| {
        let first: Vec<C64> = (0..m)
            .map(|d| {
                let s = TAU * d as f64 / m as f64;
                let mut acc = pick(&pairs[0]);
                for (l, p) in pairs.iter().enumerate().take(half).skip(1) {
                    acc += pick(p) * (2.0 * (l as f64 * s).cos());
                }
                acc += pick(&pairs[half]) * (half as f64 * s).cos();
                acc / m as f64
            })
            .collect();
        ComplexMatrix::from_fn(m, m, |i, j| first[(i + m - j) % m])
    };
    (circulant(|p| p.0), circulant(|p| p.1))
}

#[derive(Debug, Clone)]
enum InnerRows {
    None,
    /// Combined potential with coupling `η`.
    Dirichlet(f64),
    Impedance(C64),
    Medium { p1: ComplexMatrix, p2: ComplexMatrix },
}

/// Factored Nyström system of one scenario.
#[derive(Debug, Clone)]
pub struct ForwardSystem {
    scenario: Scenario,
    resolution: Resolution,
    outer: BoundaryQuadrature,
    inner: Option<BoundaryQuadrature>,
    rows: InnerRows,
    lu: LuFactors,
    /// Interior-limit `∂_ν u` on `∂B` nodes as a map of the stacked density.
    neumann: ComplexMatrix,
    condition: f64,
    scale: Vec<f64>,
}

impl ForwardSystem {
    pub fn new(scenario: &Scenario, resolution: &Resolution) -> Result<Self> {
        scenario.validate()?;
        let k = scenario.wavenumber;
        let outer_curve = Curve::circle([0.0, 0.0], scenario.outer_radius)?;
        let outer = sample_curve(&outer_curve, resolution.boundary, None)?;
        let single = LayerKernel::new(LayerVariant::Single, k)?;
        let adjoint = LayerKernel::new(LayerVariant::AdjointDouble, k)?;
        let mb = outer.len();
        let half = C64::new(0.5, 0.0);

        let s_bb = assemble_block(&single, &outer, &outer, true)?;
        let mut kp_bb = assemble_block(&adjoint, &outer, &outer, true)?;
        for i in 0..mb {
            kp_bb[(i, i)] += half;
        }

        let Some(curve) = scenario.object.curve() else {
            let lu = lu_factor(&s_bb)?;
            let condition = lu.condition_estimate();
            check_condition(condition)?;
            return Ok(ForwardSystem {
                scenario: scenario.clone(),
                resolution: *resolution,
                outer,
                inner: None,
                rows: InnerRows::None,
                lu,
                neumann: kp_bb,
                condition,
                scale: vec![1.0; mb],
            });
        };

        let inner = sample_curve(curve, resolution.interior, Some(resolution.grading))?;
        let mg = inner.len();
        let n = mb + mg;
        let s_gb = assemble_block(&single, &inner, &outer, false)?;
        let kp_gb = assemble_block(&adjoint, &inner, &outer, false)?;
        let s_bg = assemble_block(&single, &outer, &inner, false)?;
        let s_gg = assemble_block(&single, &inner, &inner, true)?;

        let mut a = ComplexMatrix::zeros(n, n);
        a.set_block(0, 0, &s_bb);
        a.set_block(0, mb, &s_gb);
        let mut neumann = ComplexMatrix::zeros(mb, n);
        neumann.set_block(0, 0, &kp_bb);
        neumann.set_block(0, mb, &kp_gb);

        let rows = match &scenario.object {
            Object::Empty => unreachable!("handled above"),
            Object::Dirichlet { .. } => {
                let eta = k.norm().max(1.0);
                let ieta = C64::new(0.0, eta);
                let double = LayerKernel::new(LayerVariant::Double, k)?;
                let d_gb = assemble_block(&double, &inner, &outer, false)?;
                let t_gb = assemble_normal_derivative_block(&double, &inner, &outer)?;
                let mut d_gg = assemble_block(&double, &inner, &inner, true)?;
                for i in 0..mg {
                    d_gg[(i, i)] += half;
                }
                a.set_block(0, mb, &d_gb.sub(&s_gb.scale(ieta)));
                a.set_block(mb, 0, &s_bg);
                a.set_block(mb, mb, &d_gg.sub(&s_gg.scale(ieta)));
                neumann.set_block(0, mb, &t_gb.sub(&kp_gb.scale(ieta)));
                InnerRows::Dirichlet(eta)
            }
            Object::Neumann { .. } | Object::Impedance { .. } => {
                let eta = match &scenario.object {
                    Object::Impedance { eta, .. } => *eta,
                    _ => C64::new(0.0, 0.0),
                };
                let kp_bg = assemble_block(&adjoint, &outer, &inner, false)?;
                let mut kp_gg = assemble_block(&adjoint, &inner, &inner, true)?;
                for i in 0..mg {
                    kp_gg[(i, i)] -= half;
                }
                a.set_block(mb, 0, &kp_bg.add(&s_bg.scale(eta)));
                a.set_block(mb, mb, &kp_gg.add(&s_gg.scale(eta)));
                InnerRows::Impedance(eta)
            }
            Object::Medium { curve, index } => {
                let Curve::Circle { radius, .. } = curve else { unreachable!("validated") };
                let (p1, p2) = disk_transmission_rows(interior_wavenumber(k, *index), *radius, mg);
                let kp_bg = assemble_block(&adjoint, &outer, &inner, false)?;
                let mut kp_gg = assemble_block(&adjoint, &inner, &inner, true)?;
                for i in 0..mg {
                    kp_gg[(i, i)] -= half;
                }
                a.set_block(mb, 0, &p1.matmul(&kp_bg).sub(&p2.matmul(&s_bg)));
                a.set_block(mb, mb, &p1.matmul(&kp_gg).sub(&p2.matmul(&s_gg)));
                InnerRows::Medium { p1, p2 }
            }
        };

        // Graded corner weights spread column norms over many decades; the
        // similarity W^{1/2} A W^{-1/2} on the object block keeps the pivots
        // and the condition estimate meaningful.
        let mean = inner.weights.iter().sum::<f64>() / mg as f64;
        let mut scale = vec![1.0; n];
        for (i, w) in inner.weights.iter().enumerate() {
            scale[mb + i] = (w / mean).sqrt();
        }
        let a = ComplexMatrix::from_fn(n, n, |i, j| a[(i, j)] * (scale[i] / scale[j]));
        let lu = lu_factor(&a)?;
        let condition = lu.condition_estimate();
        check_condition(condition)?;
        Ok(ForwardSystem {
            scenario: scenario.clone(),
            resolution: *resolution,
            outer,
            inner: Some(inner),
            rows,
            lu,
            neumann,
            condition,
            scale,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn resolution(&self) -> &Resolution {
        &self.resolution
    }

    pub fn outer_quadrature(&self) -> &BoundaryQuadrature {
        &self.outer
    }

    pub fn inner_quadrature(&self) -> Option<&BoundaryQuadrature> {
        self.inner.as_ref()
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    fn unknowns(&self) -> usize {
        self.lu.dim()
    }

    /// Right-hand side on `Γ` for an incident field with the given values and
    /// normal derivatives at the object nodes: the scattered part must cancel it.
    pub fn inner_rhs(&self, values: &[C64], normal_derivatives: &[C64]) -> Vec<C64> {
        match &self.rows {
            InnerRows::None => Vec::new(),
            InnerRows::Dirichlet(_) => values.iter().map(|v| -v).collect(),
            InnerRows::Impedance(eta) => {
                values.iter().zip(normal_derivatives).map(|(v, d)| -(d + eta * v)).collect()
            }
            InnerRows::Medium { p1, p2 } => {
                let a = p1.matvec(normal_derivatives);
                let b = p2.matvec(values);
                a.iter().zip(&b).map(|(x, y)| y - x).collect()
            }
        }
    }

    /// Densities for Dirichlet data on `∂B` nodes (columns of `outer`) and
    /// optional object-row data (columns of `inner`).
    pub fn solve_densities(&self, outer: &ComplexMatrix, inner: Option<&ComplexMatrix>) -> Result<ComplexMatrix> {
        let mb = self.outer.len();
        let n = self.unknowns();
        if outer.rows() != mb {
            return Err(ForwardError::DimensionMismatch(format!("{} boundary values for {mb} nodes", outer.rows())));
        }
        let mut rhs = ComplexMatrix::zeros(n, outer.cols());
        rhs.set_block(0, 0, outer);
        if let Some(inner) = inner {
            if inner.rows() != n - mb || inner.cols() != outer.cols() {
                return Err(ForwardError::DimensionMismatch("object-row data has the wrong shape".into()));
            }
            rhs.set_block(mb, 0, inner);
        }
        let rhs = ComplexMatrix::from_fn(n, rhs.cols(), |i, j| rhs[(i, j)] * self.scale[i]);
        let y = self.lu.solve(&rhs)?;
        Ok(ComplexMatrix::from_fn(n, y.cols(), |i, j| y[(i, j)] / self.scale[i]))
    }

    /// `∂_ν u` at the `∂B` nodes for stacked densities.
    pub fn neumann_at_nodes(&self, densities: &ComplexMatrix) -> ComplexMatrix {
        self.neumann.matmul(densities)
    }

    /// `∂_ν u|_{∂B}` for Dirichlet data `f`.
    pub fn apply(&self, f: &BoundaryFunction) -> Result<BoundaryFunction> {
        let values = f.sample(self.outer.len());
        let dens = self.solve_densities(&ComplexMatrix::column(&values), None)?;
        let g = self.neumann_at_nodes(&dens).col(0);
        Ok(BoundaryFunction::from_samples(&g, f.modes(), self.scenario.outer_radius))
    }

    /// DtN matrix in the orthonormal Fourier basis with `modes` orders.
    pub fn dtn(&self, modes: usize) -> Result<DtnMatrix> {
        let mb = self.outer.len();
        let r = self.scenario.outer_radius;
        let e = synthesis_matrix(modes, mb, r);
        let dens = self.solve_densities(&e, None)?;
        let p = projection_matrix(modes, mb, r);
        let entries = p.matmul(&self.neumann).matmul(&dens);
        Ok(DtnMatrix { entries, radius: r, wavenumber: self.scenario.wavenumber, scenario_hash: self.scenario.hash() })
    }

    /// Field `u` at points away from both boundaries for one density column.
    pub fn field(&self, density: &[C64], points: &[Point]) -> Result<Vec<C64>> {
        let k = self.scenario.wavenumber;
        let single = LayerKernel::new(LayerVariant::Single, k)?;
        let mb = self.outer.len();
        let mut u = evaluate_field(&single, &self.outer, &density[..mb], points)?;
        if let Some(inner) = &self.inner {
            let v = evaluate_field(&single, inner, &density[mb..], points)?;
            let combined = match self.rows {
                InnerRows::Dirichlet(eta) => {
                    let double = LayerKernel::new(LayerVariant::Double, k)?;
                    let d = evaluate_field(&double, inner, &density[mb..], points)?;
                    d.into_iter().zip(v).map(|(d, s)| d - C64::new(0.0, eta) * s).collect()
                }
                _ => v,
            };
            for (a, b) in u.iter_mut().zip(combined) {
                *a += b;
            }
        }
        Ok(u)
    }
}

fn check_condition(estimate: f64) -> Result<()> {
    if !(estimate <= CONDITION_LIMIT) {
        return Err(ForwardError::IllConditioned { estimate });
    }
    Ok(())
}

/// A Dirichlet-to-Neumann map in the orthonormal Fourier basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DtnMatrix {
    pub entries: ComplexMatrix,
    pub radius: f64,
    pub wavenumber: C64,
    pub scenario_hash: String,
}

impl DtnMatrix {
    pub fn modes(&self) -> usize {
        self.entries.rows()
    }

    pub fn apply(&self, f: &BoundaryFunction) -> BoundaryFunction {
        BoundaryFunction::new(self.entries.matvec(&f.coefficients), self.radius)
    }

    /// Largest `|M[m,n] − M[−n,−m]|` over index pairs resolved on both sides.
    pub fn reciprocity_defect(entries: &ComplexMatrix) -> f64 {
        let n = entries.rows();
        let mut d: f64 = 0.0;
        // order o sits at index o + n/2; −o at n/2 − o, i.e. index n − i
        for i in 1..n {
            for j in 1..n {
                d = d.max((entries[(i, j)] - entries[(n - j, n - i)]).norm());
            }
        }
        d
    }
}

/// `∂_ν u|_{∂B}` for a scenario and boundary data.
pub fn solve_forward(scenario: &Scenario, f: &BoundaryFunction, resolution: &Resolution) -> Result<BoundaryFunction> {
    ForwardSystem::new(scenario, resolution)?.apply(f)
}

/// DtN matrix of a scenario; one factorization serves every column.
pub fn assemble_dtn(scenario: &Scenario, modes: usize, resolution: &Resolution) -> Result<DtnMatrix> {
    ForwardSystem::new(scenario, resolution)?.dtn(modes)
}
