//! Forward solvers, DtN maps, Green-function test traces and synthetic
//! Cauchy data.

mod boundary;
mod formats;
mod system;
mod traces;

pub use boundary::{index_of, order_of, projection_matrix, synthesis_matrix, BoundaryFunction};
pub use formats::{read_cauchy_json, read_dtn_binary, write_cauchy_json, write_dtn_binary, DTN_MAGIC};
pub use system::{
    assemble_dtn, interior_wavenumber, solve_forward, DtnMatrix, ForwardSystem, Object, Resolution, Scenario,
    CONDITION_LIMIT, OBJECT_CLEARANCE,
};
pub use traces::{
    detect_disk_eigenvalue, dtn_empty_disk, psi_test_trace, u0_reference_trace, DiskEigenvalueReport,
    ReferenceKind, TestTraces, TraceKind, EIGENVALUE_THRESHOLD, TRACE_CLEARANCE,
};

use crate::geometry::{GeometryError, Point};
use crate::linalg::{LinalgError, C64};
use crate::potential::PotentialError;
use crate::specfun::SpecfunError;
use serde::{Deserialize, Serialize};

/// Default number of Fourier modes on `∂B`.
pub const DEFAULT_MODES: usize = 128;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ForwardError {
    #[error("wavenumber is close to a Dirichlet eigenvalue of the disk (order {order})")]
    NearDiskEigenvalue { order: usize },
    #[error("system is ill-conditioned (condition estimate {estimate:.3e})")]
    IllConditioned { estimate: f64 },
    #[error("boundaries overlap (distance {distance:.3e})")]
    GeometryOverlap { distance: f64 },
    #[error("point {index} is too close to a boundary (distance {distance:.3e})")]
    TooClose { index: usize, distance: f64 },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed file: {0}")]
    Format(String),
}

impl From<PotentialError> for ForwardError {
    fn from(e: PotentialError) -> Self {
        match e {
            PotentialError::GeometryOverlap { distance } => ForwardError::GeometryOverlap { distance },
            PotentialError::TooClose { index, distance } => ForwardError::TooClose { index, distance },
            other => ForwardError::InvalidScenario(other.to_string()),
        }
    }
}

impl From<GeometryError> for ForwardError {
    fn from(e: GeometryError) -> Self {
        ForwardError::InvalidScenario(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ForwardError>;

/// Provenance attached to synthesized data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyMeta {
    pub scenario_hash: String,
    pub refinement: usize,
    #[serde(default)]
    pub description: String,
}

/// A Dirichlet datum `f` and the measured flux `g = σ ∂_ν u` on `∂B`.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    pub f: BoundaryFunction,
    pub g: BoundaryFunction,
    pub meta: CauchyMeta,
}

impl CauchyData {
    pub fn new(f: BoundaryFunction, g: BoundaryFunction, meta: CauchyMeta) -> Result<Self> {
        if f.modes() != g.modes() || f.radius != g.radius {
            return Err(ForwardError::DimensionMismatch("f and g must share modes and radius".into()));
        }
        Ok(CauchyData { f, g, meta })
    }

    pub fn radius(&self) -> f64 {
        self.f.radius
    }

    pub fn modes(&self) -> usize {
        self.f.modes()
    }

    /// `(c f, c g)`.
    pub fn scaled(&self, c: C64) -> Self {
        CauchyData { f: self.f.scale(c), g: self.g.scale(c), meta: self.meta.clone() }
    }
}

/// Synthetic `g = σ ∂_ν u` computed `refinement` times finer than
/// `resolution` with twice the modes, then truncated back to those of `f`.
pub fn synthesize_cauchy_data(
    scenario: &Scenario,
    sigma: f64,
    f: &BoundaryFunction,
    resolution: &Resolution,
    refinement: usize,
) -> Result<CauchyData> {
    if !(sigma > 0.0) {
        return Err(ForwardError::InvalidScenario(format!("sigma must be positive, got {sigma}")));
    }
    if refinement < 2 {
        return Err(ForwardError::InvalidScenario(format!("refinement must be at least 2, got {refinement}")));
    }
    let fine = resolution.refined(refinement);
    let system = ForwardSystem::new(scenario, &fine)?;
    let g = system.apply(&f.resized(2 * f.modes()))?.resized(f.modes()).scale(C64::new(sigma, 0.0));
    CauchyData::new(
        f.clone(),
        g,
        CauchyMeta {
            scenario_hash: scenario.hash(),
            refinement,
            description: format!(
                "sigma={sigma} boundary_nodes={} interior_nodes={} grading={}",
                fine.boundary, fine.interior, fine.grading
            ),
        },
    )
}

/// Whether a sampling point may serve as a source for test traces.
pub fn is_valid_source(z: Point, outer_radius: f64) -> bool {
    z[0].hypot(z[1]) < outer_radius - 1e-6
}
