//! Sharp operators, Picard indicators and the scans built on them.
//!
//! All operators act on Fourier coefficients in the orthonormal basis of
//! `L²(∂B)`, so adjoints are conjugate transposes and the inner product is
//! the plain Hermitian one.

use crate::forward::{
    assemble_dtn, dtn_empty_disk, CauchyData, DtnMatrix, ForwardError, Object, Resolution, Scenario, TestTraces,
};
use crate::geometry::{contains_point, Curve, Location, Point};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianEigensystem, LinalgError, C64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_CUTOFF: f64 = 1e-8;
/// Grid points this close to an artificial interior disk are not sampled.
pub const GRID_CLEARANCE: f64 = 1e-2;
/// Eigenvalues above `−PSD_TOLERANCE·λ_1` are roundoff and clamp to zero.
pub const PSD_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum FactorizationError {
    #[error("operator has no positive spectrum")]
    DegenerateOperator,
    #[error("indicator range is degenerate (I_max = I_min)")]
    DegenerateRange,
    #[error("no tested domain passes the acceptance threshold")]
    NoAcceptedDomains,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Forward(#[from] ForwardError),
}

pub type Result<T> = std::result::Result<T, FactorizationError>;

/// Eigensystem of `F_# = |Re F| + |Im F|`, eigenvalues descending and
/// clamped to be nonnegative.
#[derive(Debug, Clone)]
pub struct SharpEigensystem {
    pub eigensystem: HermitianEigensystem,
    /// Number of leading eigenpairs with `λ_n ≥ ε·λ_1`.
    pub cutoff_index: usize,
}

impl SharpEigensystem {
    pub fn dim(&self) -> usize {
        self.eigensystem.dim()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigensystem.eigenvalues
    }

    /// Same eigenpairs with a different relative cutoff.
    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff_index = cutoff_index(&self.eigensystem.eigenvalues, cutoff);
        self
    }
}

fn cutoff_index(eigenvalues: &[f64], cutoff: f64) -> usize {
    let top = eigenvalues.first().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return 0;
    }
    eigenvalues.iter().take_while(|&&l| l >= cutoff * top).count()
}

/// `|H| = V |Λ| V*` for Hermitian `H`.
fn absolute_value(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = hermitian_eig(h)?;
    let n = e.dim();
    let v = &e.eigenvectors;
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for (l, lam) in e.eigenvalues.iter().enumerate() {
            acc += v[(i, l)] * lam.abs() * v[(j, l)].conj();
        }
        acc
    }))
}

pub fn sharp(f: &ComplexMatrix) -> Result<SharpEigensystem> {
    sharp_with_cutoff(f, DEFAULT_CUTOFF)
}

pub fn sharp_with_cutoff(f: &ComplexMatrix, cutoff: f64) -> Result<SharpEigensystem> {
    if !f.is_square() {
        return Err(FactorizationError::DimensionMismatch(format!("{}x{} operator is not square", f.rows(), f.cols())));
    }
    let re = f.hermitian_part();
    let im = f.skew_hermitian_part();
    let (a, b) = rayon::join(|| absolute_value(&re), || absolute_value(&im));
    let sum = a?.add(&b?);
    let mut eigensystem = hermitian_eig(&sum.hermitian_part())?;
    let top = eigensystem.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    for l in eigensystem.eigenvalues.iter_mut() {
        if *l < 0.0 && *l >= -PSD_TOLERANCE * top {
            *l = 0.0;
        }
    }
    let cutoff_index = cutoff_index(&eigensystem.eigenvalues, cutoff);
    Ok(SharpEigensystem { eigensystem, cutoff_index })
}

/// `[Σ_{n<cutoff} |(g, φ_n)|² / λ_n]^{−1}`; `+∞` for `g = 0`, and `0` when
/// the series overflows.
pub fn picard(series: &SharpEigensystem, g: &[C64]) -> Result<f64> {
    let n = series.dim();
    if g.len() != n {
        return Err(FactorizationError::DimensionMismatch(format!("{} coefficients for a {n}-dimensional operator", g.len())));
    }
    if g.iter().all(|c| *c == C64::new(0.0, 0.0)) {
        return Ok(f64::INFINITY);
    }
    let v = &series.eigensystem.eigenvectors;
    let mut sum = 0.0;
    for l in 0..series.cutoff_index {
        let mut proj = C64::new(0.0, 0.0);
        for (i, gi) in g.iter().enumerate() {
            proj += gi * v[(i, l)].conj();
        }
        sum += proj.norm_sqr() / series.eigensystem.eigenvalues[l];
    }
    if !sum.is_finite() {
        return Ok(0.0);
    }
    Ok(1.0 / sum)
}

/// Indicator values with validity flags (`mask[i]` is true where
/// `values[i]` was computed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorResult {
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
    /// Index of the largest valid value.
    pub argmax: Option<usize>,
    /// `(I_min, I_max)` over valid finite values.
    pub extrema: Option<(f64, f64)>,
    /// Row-major shape for grid-indexed results, `(rows, cols)`.
    pub shape: (usize, usize),
    #[serde(default)]
    pub note: Option<String>,
}

impl IndicatorResult {
    pub fn new(values: Vec<f64>, mask: Vec<bool>, shape: (usize, usize)) -> Self {
        assert_eq!(values.len(), mask.len(), "one flag per value");
        assert_eq!(shape.0 * shape.1, values.len(), "shape covers the values");
        let mut argmax: Option<usize> = None;
        let mut extrema: Option<(f64, f64)> = None;
        for (i, (&v, &ok)) in values.iter().zip(&mask).enumerate() {
            if !ok || v.is_nan() {
                continue;
            }
            if argmax.is_none_or(|a| v > values[a]) {
                argmax = Some(i);
            }
            if v.is_finite() {
                extrema = Some(match extrema {
                    None => (v, v),
                    Some((lo, hi)) => (lo.min(v), hi.max(v)),
                });
            }
        }
        IndicatorResult { values, mask, argmax, extrema, shape, note: None }
    }

    /// All entries masked, with an explanation.
    pub fn degenerate(len: usize, shape: (usize, usize), note: impl Into<String>) -> Self {
        let mut r = IndicatorResult::new(vec![0.0; len], vec![false; len], shape);
        r.note = Some(note.into());
        r
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn valid_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().zip(&self.mask).filter(|(_, &ok)| ok).map(|(&v, _)| v)
    }
}

/// Rectangular sampling grid `x0..=x1 × y0..=y1`, row-major with `y`
/// increasing by row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(x_range: (f64, f64), y_range: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 || !(x_range.1 > x_range.0) || !(y_range.1 > y_range.0) {
            return Err(FactorizationError::InvalidInput("grid needs at least 2x2 points on a nonempty rectangle".into()));
        }
        Ok(Grid { x_range, y_range, nx, ny })
    }

    /// Square grid with spacing `step` centred at the origin, `|x|, |y| ≤ half_width`.
    pub fn square(half_width: f64, step: f64) -> Result<Self> {
        let n = (2.0 * half_width / step).round() as usize + 1;
        Grid::new((-half_width, half_width), (-half_width, half_width), n, n)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, index: usize) -> Point {
        let (r, c) = (index / self.nx, index % self.nx);
        let x = self.x_range.0 + (self.x_range.1 - self.x_range.0) * c as f64 / (self.nx - 1) as f64;
        let y = self.y_range.0 + (self.y_range.1 - self.y_range.0) * r as f64 / (self.ny - 1) as f64;
        [x, y]
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

/// Sharp decomposition of `F`, or `None` when `F` has no usable spectrum.
fn sharp_or_degenerate(f: &ComplexMatrix, cutoff: f64) -> Result<Option<SharpEigensystem>> {
    let s = sharp_with_cutoff(f, cutoff)?;
    let top = s.eigenvalues().first().copied().unwrap_or(0.0);
    // F = 0 up to roundoff: nothing above the noise floor of the entries
    if s.cutoff_index == 0 || !(top > 1e-13 * f.max_abs().max(f64::MIN_POSITIVE)) || f.max_abs() < 1e-300 {
        return Ok(None);
    }
    Ok(Some(s))
}

/// Picard indicator of the test traces over `grid`. Points outside the disk
/// of radius `R − GRID_CLEARANCE` or near the artificial disk are masked.
pub fn indicator_field(operator: &ComplexMatrix, traces: &TestTraces, grid: &Grid, cutoff: f64) -> Result<IndicatorResult> {
    let shape = (grid.ny, grid.nx);
    let Some(series) = sharp_or_degenerate(operator, cutoff)? else {
        return Ok(IndicatorResult::degenerate(grid.len(), shape, "DegenerateOperator: the data operator vanishes"));
    };
    let points = grid.points();
    let usable: Vec<usize> = (0..points.len()).filter(|&i| !traces.excludes(points[i], GRID_CLEARANCE)).collect();
    let selected: Vec<Point> = usable.iter().map(|&i| points[i]).collect();
    let test = traces.traces(&selected)?;
    let computed: Vec<f64> = test
        .par_iter()
        .map(|t| picard(&series, &t.coefficients))
        .collect::<Result<Vec<_>>>()?;
    let mut values = vec![0.0; grid.len()];
    let mut mask = vec![false; grid.len()];
    for (&i, v) in usable.iter().zip(computed) {
        values[i] = v;
        mask[i] = true;
    }
    Ok(IndicatorResult::new(values, mask, shape))
}

/// How a test domain and its artificial partner are realized at wavenumber `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// `∂_ν u + i|κ|u = 0` on `∂Ω` and `∂_ν u − i|κ|u = 0` on `∂Ω̃`.
    Impedance,
    /// Interior wavenumbers `|κ|(2+i)` in `℧` and `|κ|(2−i)` in `℧̃`.
    Medium,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Reference operator `A₀(κ²)` of the empty disk.
    Classical,
    /// Reference operator of the artificial object, robust at disk eigenvalues.
    Tilde,
}

/// A test domain `Ω` (or `℧`), the artificial object `Ω̃` inside it, and the
/// object `B̂` whose field serves as the tilde reference solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestDomain {
    pub kind: ProbeKind,
    pub domain: Curve,
    pub artificial: Curve,
    pub hat: Curve,
}

impl TestDomain {
    /// `B̂ = Ω̃`.
    pub fn new(kind: ProbeKind, domain: Curve, artificial: Curve) -> Self {
        TestDomain { kind, hat: artificial.clone(), domain, artificial }
    }

    fn object(&self, curve: &Curve, kappa: f64, outer: bool) -> Object {
        let a = kappa.abs();
        match self.kind {
            ProbeKind::Impedance => Object::Impedance {
                curve: curve.clone(),
                eta: C64::new(0.0, if outer { a } else { -a }),
            },
            ProbeKind::Medium => {
                let m = C64::new(2.0, if outer { 1.0 } else { -1.0 });
                Object::Medium { curve: curve.clone(), index: m * m }
            }
        }
    }

    pub fn domain_object(&self, kappa: f64) -> Object {
        self.object(&self.domain, kappa, true)
    }

    pub fn artificial_object(&self, kappa: f64) -> Object {
        self.object(&self.artificial, kappa, false)
    }

    pub fn hat_object(&self, kappa: f64) -> Object {
        self.object(&self.hat, kappa, false)
    }
}

/// Data operator `F` and reference map for one test domain at one `κ`.
struct Probe {
    series: Option<SharpEigensystem>,
    reference: DtnMatrix,
}

fn probe(
    domain: &TestDomain,
    kappa: f64,
    radius: f64,
    modes: usize,
    variant: Variant,
    resolution: &Resolution,
    cutoff: f64,
) -> Result<Probe> {
    let k = C64::new(kappa, 0.0);
    let a = assemble_dtn(&Scenario::new(radius, k, domain.domain_object(kappa))?, modes, resolution)?;
    let (artificial, reference) = match variant {
        Variant::Classical => {
            let a0 = dtn_empty_disk(kappa, radius, modes)?;
            (a0.clone(), a0)
        }
        Variant::Tilde => {
            let at = assemble_dtn(&Scenario::new(radius, k, domain.artificial_object(kappa))?, modes, resolution)?;
            let reference = if domain.hat == domain.artificial {
                at.clone()
            } else {
                assemble_dtn(&Scenario::new(radius, k, domain.hat_object(kappa))?, modes, resolution)?
            };
            (at, reference)
        }
    };
    let f = a.entries.sub(&artificial.entries);
    Ok(Probe { series: sharp_or_degenerate(&f, cutoff)?, reference })
}

/// `p = g − τ·Λ_ref f` for the measured pair.
fn residual(measured: &CauchyData, reference: &DtnMatrix, tau: f64) -> Vec<C64> {
    let r = reference.apply(&measured.f);
    measured.g.coefficients.iter().zip(&r.coefficients).map(|(g, u)| g - u * tau).collect()
}

/// `I₁(τ_j, κ_ℓ)`: rows index `κ`, columns index `τ`. A failure at one `κ`
/// masks its row.
#[allow(clippy::too_many_arguments)]
pub fn coefficient_scan(
    measured: &CauchyData,
    domain: &TestDomain,
    tau_grid: &[f64],
    kappa_grid: &[f64],
    variant: Variant,
    resolution: &Resolution,
    cutoff: f64,
) -> Result<IndicatorResult> {
    if tau_grid.is_empty() || kappa_grid.is_empty() {
        return Err(FactorizationError::InvalidInput("empty coefficient grid".into()));
    }
    let (radius, modes) = (measured.radius(), measured.modes());
    let rows: Vec<Option<Vec<f64>>> = kappa_grid
        .iter()
        .map(|&kappa| {
            let Ok(p) = probe(domain, kappa, radius, modes, variant, resolution, cutoff) else {
                return Ok(None);
            };
            let Some(series) = p.series else { return Ok(None) };
            let row = tau_grid
                .par_iter()
                .map(|&tau| picard(&series, &residual(measured, &p.reference, tau)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Some(row))
        })
        .collect::<Result<Vec<_>>>()?;
    let nt = tau_grid.len();
    let mut values = Vec::with_capacity(nt * kappa_grid.len());
    let mut mask = Vec::with_capacity(values.capacity());
    for row in rows {
        match row {
            Some(r) => {
                values.extend(r);
                mask.extend(std::iter::repeat_n(true, nt));
            }
            None => {
                values.extend(std::iter::repeat_n(0.0, nt));
                mask.extend(std::iter::repeat_n(false, nt));
            }
        }
    }
    Ok(IndicatorResult::new(values, mask, (kappa_grid.len(), nt)))
}

/// `I₂(Ω^{(ℓ)})` for each family member at the recovered `(σ, q)`.
pub fn domain_scan(
    measured: &CauchyData,
    family: &[TestDomain],
    sigma: f64,
    q: f64,
    variant: Variant,
    resolution: &Resolution,
    cutoff: f64,
) -> Result<IndicatorResult> {
    if family.is_empty() {
        return Err(FactorizationError::InvalidInput("empty domain family".into()));
    }
    if !(sigma > 0.0 && q > 0.0) {
        return Err(FactorizationError::InvalidInput(format!("need σ, q > 0, got σ={sigma}, q={q}")));
    }
    let k = (q / sigma).sqrt();
    let (radius, modes) = (measured.radius(), measured.modes());
    let out: Vec<Option<f64>> = family
        .iter()
        .map(|d| {
            let Ok(p) = probe(d, k, radius, modes, variant, resolution, cutoff) else {
                return Ok(None);
            };
            match p.series {
                Some(s) => Ok(Some(picard(&s, &residual(measured, &p.reference, sigma))?)),
                None => Ok(None),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mask: Vec<bool> = out.iter().map(Option::is_some).collect();
    let values: Vec<f64> = out.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    let n = values.len();
    Ok(IndicatorResult::new(values, mask, (1, n)))
}

/// Color of each valid entry: `V = 2(I − I_min)/(I_max − I_min) − 1`, then
/// `(V, 1−V, 0)` for `V ≥ 0` and `(0, 1+V, −V)` otherwise. With `log_scale`
/// the values are replaced by `ln I` first; zero values are then left out.
pub fn rgb_map(values: &IndicatorResult, log_scale: bool) -> Result<Vec<Option<[f64; 3]>>> {
    let scaled: Vec<Option<f64>> = values
        .values
        .iter()
        .zip(&values.mask)
        .map(|(&v, &ok)| {
            let v = if log_scale { v.ln() } else { v };
            (ok && v.is_finite()).then_some(v)
        })
        .collect();
    let (lo, hi) = scaled
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !(hi > lo) {
        return Err(FactorizationError::DegenerateRange);
    }
    Ok(scaled
        .into_iter()
        .map(|v| {
            v.map(|v| {
                let t = (2.0 * (v - lo) / (hi - lo) - 1.0).clamp(-1.0, 1.0);
                if t >= 0.0 {
                    [t, 1.0 - t, 0.0]
                } else {
                    [0.0, 1.0 + t, -t]
                }
            })
        })
        .collect())
}

/// Threshold `Q` = the `⌈q·n⌉`-th smallest valid value (`−∞` for `q = 0`);
/// members with values strictly above `Q` are accepted, and the result marks grid points inside
/// every accepted member.
pub fn convex_hull_estimate(family: &[Curve], values: &IndicatorResult, quantile: f64, grid: &Grid) -> Result<Vec<bool>> {
    if family.len() != values.len() {
        return Err(FactorizationError::DimensionMismatch(format!("{} domains for {} values", family.len(), values.len())));
    }
    if !(0.0..=1.0).contains(&quantile) {
        return Err(FactorizationError::InvalidInput(format!("quantile {quantile} outside [0, 1]")));
    }
    let mut valid: Vec<f64> = values.valid_values().filter(|v| !v.is_nan()).collect();
    if valid.len() < 2 {
        return Err(FactorizationError::InvalidInput("need at least two valid indicator values".into()));
    }
    valid.sort_by(f64::total_cmp);
    let rank = ((quantile * valid.len() as f64).ceil() as usize).min(valid.len());
    let threshold = if rank == 0 { f64::NEG_INFINITY } else { valid[rank - 1] };
    let accepted: Vec<&Curve> = family
        .iter()
        .zip(values.values.iter().zip(&values.mask))
        .filter(|(_, (&v, &ok))| ok && v > threshold)
        .map(|(c, _)| c)
        .collect();
    if accepted.is_empty() {
        return Err(FactorizationError::NoAcceptedDomains);
    }
    Ok(grid
        .points()
        .into_iter()
        .map(|z| accepted.iter().all(|c| contains_point(c, z) != Location::Outside))
        .collect())
}
