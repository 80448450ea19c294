//! Run configuration: scenario, boundary data, pipeline and output.

use crate::factorization::{Grid, ProbeKind, TestDomain, Variant, DEFAULT_CUTOFF};
use crate::forward::{Object, Resolution, Scenario, DEFAULT_MODES};
use crate::geometry::{Curve, Point};
use crate::linalg::C64;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use super::CliError;

fn default_radius() -> f64 {
    5.0
}

fn one() -> f64 {
    1.0
}

fn default_modes() -> usize {
    DEFAULT_MODES
}

fn default_refinement() -> usize {
    2
}

fn default_cutoff() -> f64 {
    DEFAULT_CUTOFF
}

fn default_variant() -> Variant {
    Variant::Tilde
}

fn default_quantile() -> f64 {
    0.5
}

fn default_half_width() -> f64 {
    2.0
}

fn default_formats() -> Vec<String> {
    vec!["csv".into(), "ppm".into(), "svg".into()]
}

fn default_cell_pixels() -> usize {
    8
}

/// Medium `D` with `∇·σ∇u + q u = 0`, so `k² = q/σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default = "default_radius")]
    pub outer_radius: f64,
    #[serde(default = "one")]
    pub sigma: f64,
    pub q: f64,
    pub object: Object,
}

impl ScenarioSpec {
    pub fn wavenumber(&self) -> f64 {
        (self.q / self.sigma).sqrt()
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        Scenario::new(self.outer_radius, C64::new(self.wavenumber(), 0.0), self.object.clone())
            .map_err(|e| CliError::config("scenario", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    /// Values on equal arcs of `∂B`, starting at `θ = 0`.
    pub knots: Vec<f64>,
    #[serde(default = "default_modes")]
    pub modes: usize,
    /// Synthesis runs this many times finer than `resolution`.
    #[serde(default = "default_refinement")]
    pub refinement: usize,
    #[serde(default)]
    pub resolution: Resolution,
}

/// `start, start + step, …` with `count` entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.start + self.step * j as f64).collect()
    }
}

/// Rectangle `x × y` sampled with spacing `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub step: f64,
}

impl GridSpec {
    pub fn grid(&self) -> Result<Grid, CliError> {
        if !(self.step > 0.0) {
            return Err(CliError::config("grid.step", "must be positive"));
        }
        let n = |r: [f64; 2]| ((r[1] - r[0]) / self.step).round() as usize + 1;
        Grid::new((self.x[0], self.x[1]), (self.y[0], self.y[1]), n(self.x), n(self.y))
            .map_err(|e| CliError::config("grid", e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageSpec {
    pub grid: GridSpec,
    /// Impedance: `Ω̃` with `η = −ik` and traces vanishing on `B̃`.
    /// Medium: `℧̃` with index `(3−4i)²` and traces for `B̃` filled with `trace_index`.
    pub probe: ProbeKind,
    /// Disk `Ω̃` (or `℧̃`) of the tilde variant; `B̃` shares its center.
    pub artificial: Curve,
    pub trace_radius: f64,
    pub trace_index: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffSpec {
    pub probe: ProbeKind,
    pub domain: Curve,
    pub artificial: Curve,
    /// `B̂`; defaults to the artificial disk.
    #[serde(default)]
    pub hat: Option<Curve>,
    pub tau: AxisSpec,
    pub kappa: AxisSpec,
}

impl CoeffSpec {
    pub fn test_domain(&self) -> TestDomain {
        let mut d = TestDomain::new(self.probe, self.domain.clone(), self.artificial.clone());
        if let Some(h) = &self.hat {
            d.hat = h.clone();
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Disks of radius `ℓ·step` about `center`, `ℓ = first..=last`.
    Radial { center: Point, first: usize, last: usize, step: f64 },
    /// Disks of radius `r` centred at `(2r j₁ − w, 2r j₂ − w)`, `j ∈ {0..w/r}²`.
    Lattice {
        radius: f64,
        #[serde(default = "default_half_width")]
        half_width: f64,
    },
}

/// One family member: the disk and its centre and radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point,
    pub radius: f64,
}

impl FamilySpec {
    pub fn disks(&self) -> Result<Vec<Disk>, CliError> {
        match *self {
            FamilySpec::Radial { center, first, last, step } => {
                if first == 0 || last < first || !(step > 0.0) {
                    return Err(CliError::config("family", "radial family needs 1 <= first <= last and step > 0"));
                }
                Ok((first..=last).map(|l| Disk { center, radius: l as f64 * step }).collect())
            }
            FamilySpec::Lattice { radius, half_width } => {
                let steps = half_width / radius;
                if !(radius > 0.0) || (steps - steps.round()).abs() > 1e-9 {
                    return Err(CliError::config("family", "lattice needs half_width / radius to be a whole number"));
                }
                let n = steps.round() as usize;
                let c = |j: usize| 2.0 * radius * j as f64 - half_width;
                Ok((0..=n)
                    .flat_map(|j2| (0..=n).map(move |j1| (j1, j2)))
                    .map(|(j1, j2)| Disk { center: [c(j1), c(j2)], radius })
                    .collect())
            }
        }
    }

    /// Formula recorded in manifests.
    pub fn describe(&self) -> String {
        match self {
            FamilySpec::Radial { center, first, last, step } => format!(
                "radial P=({},{}) radius=l*{step} l={first}..{last} artificial=radius/2",
                center[0], center[1]
            ),
            FamilySpec::Lattice { radius, half_width } => format!(
                "lattice r={radius} P_j=(2r*j1-{half_width},2r*j2-{half_width}) j in 0..{}^2 artificial=r/2",
                (half_width / radius).round()
            ),
        }
    }

    pub fn test_domains(&self, probe: ProbeKind) -> Result<Vec<TestDomain>, CliError> {
        self.disks()?
            .into_iter()
            .map(|d| {
                let outer = Curve::circle(d.center, d.radius).map_err(|e| CliError::config("family", e.to_string()))?;
                let inner =
                    Curve::circle(d.center, d.radius / 2.0).map_err(|e| CliError::config("family", e.to_string()))?;
                Ok(TestDomain::new(probe, outer, inner))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonSpec {
    pub probe: ProbeKind,
    pub families: Vec<FamilySpec>,
    #[serde(default = "default_quantile")]
    pub quantile: f64,
    pub hull_grid: GridSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineSpec {
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_cutoff")]
    pub cutoff: f64,
    #[serde(default)]
    pub log_scale: bool,
    /// Nodes for the probe and reference maps.
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default)]
    pub image: Option<ImageSpec>,
    #[serde(default)]
    pub coeffs: Option<CoeffSpec>,
    #[serde(default)]
    pub polygon: Option<PolygonSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    /// Any of `csv`, `ppm`, `svg`. CSV and the manifest are always written.
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
    #[serde(default = "default_cell_pixels")]
    pub cell_pixels: usize,
}

impl OutputSpec {
    pub fn wants(&self, format: &str) -> bool {
        self.formats.iter().any(|f| f == format)
    }
}

/// One panel of a sweep: overrides `q` and the centre of radial families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    pub label: String,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub center: Option<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    pub scenario: ScenarioSpec,
    pub data: DataSpec,
    pub pipeline: PipelineSpec,
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepEntry>,
}

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub variant: Option<Variant>,
    pub modes: Option<usize>,
    pub quadrature: Option<usize>,
    pub cutoff: Option<f64>,
    pub log_scale: bool,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {}", e.message().trim())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.variant {
            self.pipeline.variant = v;
        }
        if let Some(m) = o.modes {
            self.data.modes = m;
        }
        if let Some(m) = o.quadrature {
            self.pipeline.resolution.boundary = m;
            self.data.resolution.boundary = m;
        }
        if let Some(c) = o.cutoff {
            self.pipeline.cutoff = c;
        }
        if o.log_scale {
            self.pipeline.log_scale = true;
        }
    }

    /// One concrete run per sweep entry, labelled, or the config itself
    /// with an empty label.
    pub fn expand(&self) -> Vec<(String, RunConfig)> {
        if self.sweep.is_empty() {
            return vec![(String::new(), self.clone())];
        }
        self.sweep
            .iter()
            .map(|s| {
                let mut c = self.clone();
                c.sweep.clear();
                c.name = format!("{}-{}", self.name, s.label);
                if let Some(q) = s.q {
                    c.scenario.q = q;
                }
                if let (Some(p), Some(poly)) = (s.center, c.pipeline.polygon.as_mut()) {
                    for f in &mut poly.families {
                        if let FamilySpec::Radial { center, .. } = f {
                            *center = p;
                        }
                    }
                }
                (s.label.clone(), c)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.scenario;
        if !(s.sigma > 0.0) || !(s.q > 0.0) {
            return Err(CliError::config("scenario", "sigma and q must be positive"));
        }
        s.scenario()?;
        if self.data.knots.is_empty() {
            return Err(CliError::config("data.knots", "need at least one knot value"));
        }
        if self.data.modes < 2 || self.data.modes % 2 != 0 {
            return Err(CliError::config("data.modes", "must be even and at least 2"));
        }
        if self.data.refinement < 2 {
            return Err(CliError::config("data.refinement", "must be at least 2"));
        }
        for (path, r) in [("data.resolution", &self.data.resolution), ("pipeline.resolution", &self.pipeline.resolution)] {
            if r.boundary < self.data.modes {
                return Err(CliError::config(path, "need at least as many boundary nodes as modes"));
            }
        }
        let p = &self.pipeline;
        if !(p.cutoff > 0.0 && p.cutoff < 1.0) {
            return Err(CliError::config("pipeline.cutoff", "must lie in (0, 1)"));
        }
        if let Some(img) = &p.image {
            img.grid.grid()?;
            let Curve::Circle { radius, .. } = img.artificial else {
                return Err(CliError::config("pipeline.image.artificial", "must be a circle"));
            };
            if !(img.trace_radius > 0.0 && img.trace_radius < radius) {
                return Err(CliError::config("pipeline.image.trace_radius", "must be positive and below the artificial radius"));
            }
            if !(img.trace_index > 0.0) {
                return Err(CliError::config("pipeline.image.trace_index", "must be positive"));
            }
            check_inside(&img.artificial, s.outer_radius, "pipeline.image.artificial")?;
        }
        if let Some(c) = &p.coeffs {
            if c.tau.count == 0 || c.kappa.count == 0 {
                return Err(CliError::config("pipeline.coeffs", "tau and kappa grids must be nonempty"));
            }
            if c.kappa.values().iter().any(|k| !(*k > 0.0)) || c.tau.values().iter().any(|t| !(*t > 0.0)) {
                return Err(CliError::config("pipeline.coeffs", "tau and kappa must be positive"));
            }
            check_inside(&c.domain, s.outer_radius, "pipeline.coeffs.domain")?;
            check_inside(&c.artificial, s.outer_radius, "pipeline.coeffs.artificial")?;
            if let Some(h) = &c.hat {
                check_inside(h, s.outer_radius, "pipeline.coeffs.hat")?;
            }
        }
        if let Some(poly) = &p.polygon {
            if poly.families.is_empty() {
                return Err(CliError::config("pipeline.polygon.families", "need at least one family"));
            }
            if !(0.0..=1.0).contains(&poly.quantile) {
                return Err(CliError::config("pipeline.polygon.quantile", "must lie in [0, 1]"));
            }
            poly.hull_grid.grid()?;
            for f in &poly.families {
                for d in f.disks()? {
                    if d.center[0].hypot(d.center[1]) + d.radius > s.outer_radius - crate::forward::OBJECT_CLEARANCE {
                        return Err(CliError::config(
                            "pipeline.polygon.families",
                            format!("disk at ({}, {}) of radius {} leaves B", d.center[0], d.center[1], d.radius),
                        ));
                    }
                }
            }
        }
        for f in &self.output.formats {
            if !matches!(f.as_str(), "csv" | "ppm" | "svg") {
                return Err(CliError::config("output.formats", format!("unknown format {f:?}")));
            }
        }
        if self.output.cell_pixels == 0 {
            return Err(CliError::config("output.cell_pixels", "must be positive"));
        }
        for (i, e) in self.sweep.iter().enumerate() {
            if e.label.is_empty() || e.label.contains(['/', '\\']) {
                return Err(CliError::config(format!("sweep[{i}].label"), "must be a plain nonempty name"));
            }
        }
        Ok(())
    }
}

fn check_inside(curve: &Curve, outer: f64, path: &str) -> Result<(), CliError> {
    curve.validate().map_err(|e| CliError::config(path, e.to_string()))?;
    if curve.max_distance_from_origin() > outer - crate::forward::OBJECT_CLEARANCE {
        return Err(CliError::config(path, "must stay inside B"));
    }
    Ok(())
}

/// Built-in presets, by name.
pub const PRESETS: &[(&str, &str)] = &[
    ("ex1-kite", include_str!("../../presets/ex1-kite.toml")),
    ("ex1-polygon", include_str!("../../presets/ex1-polygon.toml")),
    ("ex1-peanut", include_str!("../../presets/ex1-peanut.toml")),
    ("ex1-medium-quarter", include_str!("../../presets/ex1-medium-quarter.toml")),
    ("ex1-medium-four", include_str!("../../presets/ex1-medium-four.toml")),
    ("ex2", include_str!("../../presets/ex2.toml")),
    ("ex2-truth", include_str!("../../presets/ex2-truth.toml")),
    ("ex3", include_str!("../../presets/ex3.toml")),
    ("ex3-centered", include_str!("../../presets/ex3-centered.toml")),
    ("ex4", include_str!("../../presets/ex4.toml")),
    ("empty", include_str!("../../presets/empty.toml")),
];

pub fn preset(name: &str) -> Result<RunConfig, CliError> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| CliError::Config(format!("unknown preset {name:?}")))?;
    RunConfig::from_toml(text)
}
