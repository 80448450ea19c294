//! The five subcommands.

use super::config::{preset, CoeffSpec, ImageSpec, Overrides, PolygonSpec, RunConfig};
use super::render::{circles_svg, csv_bytes, heatmap_svg, mask_ppm, num, ppm, Overlay, Raster};
use super::{sha256_hex, Artifacts, CliError, Result};
use crate::factorization::{
    coefficient_scan, convex_hull_estimate, domain_scan, indicator_field, rgb_map, FactorizationError,
    IndicatorResult, ProbeKind, Variant,
};
use crate::forward::{
    assemble_dtn, dtn_empty_disk, read_cauchy_json, synthesize_cauchy_data, write_cauchy_json, BoundaryFunction,
    CauchyData, CauchyMeta, Object, Scenario, TestTraces, TraceKind,
};
use crate::geometry::Curve;
use crate::linalg::C64;
use std::path::{Path, PathBuf};

const BOTH_VARIANTS: [Variant; 2] = [Variant::Classical, Variant::Tilde];
const BOTH_PROBES: [ProbeKind; 2] = [ProbeKind::Impedance, ProbeKind::Medium];

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Classical => "classical",
        Variant::Tilde => "tilde",
    }
}

fn probe_name(p: ProbeKind) -> &'static str {
    match p {
        ProbeKind::Impedance => "impedance",
        ProbeKind::Medium => "medium",
    }
}

fn probe_parameters(p: ProbeKind) -> &'static str {
    match p {
        ProbeKind::Impedance => "eta=+ik on Omega; eta=-ik on Omega~",
        ProbeKind::Medium => "k(2+i) inside Omega; k(2-i) inside Omega~",
    }
}

fn config_digest(cfg: &RunConfig) -> String {
    sha256_hex(cfg.to_toml().as_bytes())[..16].to_string()
}

fn inputs(cfg: &RunConfig, data: Option<&str>) -> String {
    match data {
        Some(d) => format!("config={};data={}", config_digest(cfg), &d[..16]),
        None => format!("config={}", config_digest(cfg)),
    }
}

fn parameters(cfg: &RunConfig) -> String {
    let r = &cfg.pipeline.resolution;
    format!(
        "{} modes; R={}; k={}; sigma={}; q={}; knots={:?}; variant={}; cutoff={:e}; nodes={}/{}; grading={}",
        cfg.data.modes,
        cfg.scenario.outer_radius,
        cfg.scenario.wavenumber(),
        cfg.scenario.sigma,
        cfg.scenario.q,
        cfg.data.knots,
        variant_name(cfg.pipeline.variant),
        cfg.pipeline.cutoff,
        r.boundary,
        r.interior,
        r.grading
    )
}

fn colors(result: &IndicatorResult, log_scale: bool) -> Vec<Option<[f64; 3]>> {
    match rgb_map(result, log_scale) {
        Ok(c) => c,
        Err(_) => vec![None; result.len()],
    }
}

fn circle_of(curve: &Curve) -> Option<([f64; 2], f64)> {
    match curve {
        Curve::Circle { center, radius } => Some((*center, *radius)),
        _ => None,
    }
}

/// Synthesized Cauchy pair for one run. The empty disk uses its closed-form
/// map, so `g = σ A₀ f` exactly.
pub fn synthesize_run(cfg: &RunConfig) -> Result<CauchyData> {
    cfg.validate()?;
    let scenario = cfg.scenario.scenario()?;
    let f = BoundaryFunction::from_knot_values(&cfg.data.knots, cfg.data.modes, cfg.scenario.outer_radius);
    let sigma = cfg.scenario.sigma;
    if scenario.object == Object::Empty {
        let a0 = dtn_empty_disk(cfg.scenario.wavenumber(), cfg.scenario.outer_radius, cfg.data.modes)?;
        let g = a0.apply(&f).scale(C64::new(sigma, 0.0));
        let meta = CauchyMeta {
            scenario_hash: scenario.hash(),
            refinement: cfg.data.refinement,
            description: format!("sigma={sigma} closed-form empty disk"),
        };
        return Ok(CauchyData::new(f, g, meta)?);
    }
    Ok(synthesize_cauchy_data(&scenario, sigma, &f, &cfg.data.resolution, cfg.data.refinement)?)
}

/// Reads a Cauchy file and checks it belongs to the configured scenario.
pub fn load_data(path: &Path, cfg: &RunConfig) -> Result<CauchyData> {
    let data = read_cauchy_json(path)?;
    let expected = cfg.scenario.scenario()?.hash();
    if data.meta.scenario_hash != expected {
        return Err(CliError::config(
            "data",
            format!("file was synthesized for scenario {}, the config describes {expected}", data.meta.scenario_hash),
        ));
    }
    if data.modes() != cfg.data.modes || data.radius() != cfg.scenario.outer_radius {
        return Err(CliError::config("data.modes", format!("file has {} modes, config asks for {}", data.modes(), cfg.data.modes)));
    }
    Ok(data)
}

/// Loaded or freshly synthesized data and the SHA-256 of its file.
fn obtain_data(cfg: &RunConfig, sub: &Path, file: Option<&Path>, art: &mut Artifacts) -> Result<(CauchyData, String)> {
    if let Some(p) = file {
        let data = load_data(p, cfg)?;
        let bytes = std::fs::read(p)?;
        return Ok((data, sha256_hex(&bytes)));
    }
    let data = synthesize_run(cfg)?;
    let rel = sub.join("data.json");
    let path = art.root().join(&rel);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    write_cauchy_json(&data, &path)?;
    let bytes = art.record(&rel, &inputs(cfg, None), &format!("{}; refinement={}", parameters(cfg), cfg.data.refinement))?;
    art.say(format!("{}: synthesized {}", cfg.name, rel.display()));
    Ok((data, sha256_hex(&bytes)))
}

fn write_config(cfg: &RunConfig, sub: &Path, art: &mut Artifacts) -> Result<()> {
    art.write(sub.join("config.toml"), cfg.to_toml().as_bytes(), &inputs(cfg, None), "resolved configuration")?;
    Ok(())
}

fn single_run(cfg: &RunConfig, data: Option<&Path>) -> Result<Vec<(String, RunConfig)>> {
    cfg.validate()?;
    let runs = cfg.expand();
    if data.is_some() && runs.len() > 1 {
        return Err(CliError::config("sweep", "--data needs a config without sweep panels"));
    }
    for (_, r) in &runs {
        r.validate()?;
    }
    Ok(runs)
}

/// Writes `data.json` for each run.
pub fn cmd_synthesize(cfg: &RunConfig, art: &mut Artifacts) -> Result<()> {
    for (label, run) in single_run(cfg, None)? {
        let sub = PathBuf::from(label);
        obtain_data(&run, &sub, None, art)?;
        write_config(&run, &sub, art)?;
    }
    Ok(())
}

/// Indicator image of the configured object from its full DtN map.
pub fn cmd_image(cfg: &RunConfig, data: Option<&Path>, art: &mut Artifacts) -> Result<()> {
    for (label, run) in single_run(cfg, data)? {
        let spec = run.pipeline.image.clone().ok_or_else(|| CliError::config("pipeline.image", "missing"))?;
        if let Some(p) = data {
            load_data(p, &run)?;
        }
        image_run(&run, &spec, Path::new(&label), art)?;
    }
    Ok(())
}

fn image_run(cfg: &RunConfig, spec: &ImageSpec, sub: &Path, art: &mut Artifacts) -> Result<()> {
    write_config(cfg, sub, art)?;
    let scenario = cfg.scenario.scenario()?;
    let (k, r, modes) = (cfg.scenario.wavenumber(), cfg.scenario.outer_radius, cfg.data.modes);
    let variant = cfg.pipeline.variant;
    let a = match scenario.object {
        Object::Empty => dtn_empty_disk(k, r, modes)?,
        _ => assemble_dtn(&scenario, modes, &cfg.data.resolution.refined(cfg.data.refinement))?,
    };
    let (center, _) = circle_of(&spec.artificial).ok_or_else(|| CliError::config("pipeline.image.artificial", "must be a circle"))?;
    let (reference, kind) = match variant {
        Variant::Classical => (dtn_empty_disk(k, r, modes)?, TraceKind::Classical),
        Variant::Tilde => {
            let (object, kind) = match spec.probe {
                ProbeKind::Impedance => (
                    Object::Impedance { curve: spec.artificial.clone(), eta: C64::new(0.0, -k) },
                    TraceKind::Tilde { center, radius: spec.trace_radius },
                ),
                ProbeKind::Medium => {
                    let m = C64::new(3.0, -4.0);
                    (
                        Object::Medium { curve: spec.artificial.clone(), index: m * m },
                        TraceKind::TildePrime { center, radius: spec.trace_radius, index: spec.trace_index },
                    )
                }
            };
            let s = Scenario::new(r, C64::new(k, 0.0), object)?;
            (assemble_dtn(&s, modes, &cfg.pipeline.resolution)?, kind)
        }
    };
    let operator = a.entries.sub(&reference.entries);
    let traces = TestTraces::new(kind, k, r, modes, &cfg.pipeline.resolution)?;
    let grid = spec.grid.grid()?;
    let result = indicator_field(&operator, &traces, &grid, cfg.pipeline.cutoff)?;

    let ins = inputs(cfg, None);
    let params = format!("{}; probe={}; {}", parameters(cfg), probe_name(spec.probe), image_reference(spec, variant));
    let rows = (0..grid.len()).map(|i| {
        let z = grid.point(i);
        vec![num(z[0]), num(z[1]), num(result.values[i]), result.mask[i].to_string()]
    });
    art.write(sub.join("indicator.csv"), &csv_bytes(&["x", "y", "value", "valid"], rows), &ins, &params)?;
    let c = colors(&result, cfg.pipeline.log_scale);
    if cfg.output.wants("ppm") {
        art.write(sub.join("indicator.ppm"), &ppm(&c, grid.nx, grid.ny, cfg.output.cell_pixels), &ins, &params)?;
    }
    if cfg.output.wants("svg") {
        let xs: Vec<f64> = (0..grid.nx).map(|i| grid.point(i)[0]).collect();
        let ys: Vec<f64> = (0..grid.ny).map(|j| grid.point(j * grid.nx)[1]).collect();
        let mut items = Vec::new();
        if let Some(c) = scenario.object.curve() {
            items.push(Overlay::Curve { curve: c.clone(), color: "black" });
        }
        if variant == Variant::Tilde {
            items.push(Overlay::Curve { curve: spec.artificial.clone(), color: "white" });
        }
        let svg = heatmap_svg(&c, &Raster::from_axes(&xs, &ys), &items);
        art.write(sub.join("indicator.svg"), svg.as_bytes(), &ins, &params)?;
    }
    if let Some(note) = &result.note {
        art.write(sub.join("note.txt"), format!("{note}\n").as_bytes(), &ins, &params)?;
        art.say(format!("{}: {note}", cfg.name));
    } else if let (Some(i), Some((lo, hi))) = (result.argmax, result.extrema) {
        let z = grid.point(i);
        art.say(format!(
            "{} [{}]: I in [{lo:.3e}, {hi:.3e}], maximum at ({:.2}, {:.2})",
            cfg.name,
            variant_name(variant),
            z[0],
            z[1]
        ));
    }
    Ok(())
}

fn image_reference(spec: &ImageSpec, variant: Variant) -> String {
    match (variant, spec.probe) {
        (Variant::Classical, _) => "reference=A0; traces=Psi_k".into(),
        (Variant::Tilde, ProbeKind::Impedance) => {
            format!("reference=impedance disk eta=-ik; traces vanish on disk of radius {}", spec.trace_radius)
        }
        (Variant::Tilde, ProbeKind::Medium) => format!(
            "reference=medium disk index (3-4i)^2; traces for disk of radius {} with index {}",
            spec.trace_radius, spec.trace_index
        ),
    }
}

/// Scan of `I₁(τ, κ)` over the configured grid.
pub fn cmd_coeffs(cfg: &RunConfig, data: Option<&Path>, art: &mut Artifacts) -> Result<()> {
    for (label, run) in single_run(cfg, data)? {
        let spec = run.pipeline.coeffs.clone().ok_or_else(|| CliError::config("pipeline.coeffs", "missing"))?;
        let sub = PathBuf::from(label);
        let (d, digest) = obtain_data(&run, &sub, data, art)?;
        coeffs_run(&run, &spec, &d, &digest, &sub, art)?;
    }
    Ok(())
}

fn coeffs_run(cfg: &RunConfig, spec: &CoeffSpec, data: &CauchyData, digest: &str, sub: &Path, art: &mut Artifacts) -> Result<()> {
    write_config(cfg, sub, art)?;
    let (taus, kappas) = (spec.tau.values(), spec.kappa.values());
    let result = coefficient_scan(
        data,
        &spec.test_domain(),
        &taus,
        &kappas,
        cfg.pipeline.variant,
        &cfg.pipeline.resolution,
        cfg.pipeline.cutoff,
    )?;
    let ins = inputs(cfg, Some(digest));
    let params = format!("{}; probe={}; {}", parameters(cfg), probe_name(spec.probe), probe_parameters(spec.probe));
    let nt = taus.len();
    let rows = (0..result.len()).map(|i| {
        vec![num(taus[i % nt]), num(kappas[i / nt]), num(result.values[i]), result.mask[i].to_string()]
    });
    art.write(sub.join("indicator.csv"), &csv_bytes(&["tau", "kappa", "value", "valid"], rows), &ins, &params)?;
    let best = result.argmax.map(|i| (taus[i % nt], kappas[i / nt], result.values[i]));
    let report = match best {
        Some((t, k, v)) => vec![vec![num(t), num(k), num(v)]],
        None => Vec::new(),
    };
    art.write(sub.join("argmax.csv"), &csv_bytes(&["tau", "kappa", "value"], report), &ins, &params)?;
    let raster = Raster::from_axes(&taus, &kappas);
    if cfg.output.wants("ppm") {
        for (name, log) in [("indicator.ppm", false), ("indicator-log.ppm", true)] {
            let img = ppm(&colors(&result, log), nt, kappas.len(), cfg.output.cell_pixels);
            art.write(sub.join(name), &img, &ins, &params)?;
        }
    }
    if cfg.output.wants("svg") {
        let dot: Vec<Overlay> =
            best.map(|(t, k, _)| Overlay::Dot { at: [t, k], radius: 0.3 * raster.dx.abs().min(raster.dy.abs()) }).into_iter().collect();
        for (name, log) in [("indicator.svg", false), ("indicator-log.svg", true)] {
            let svg = heatmap_svg(&colors(&result, log), &raster, &dot);
            art.write(sub.join(name), svg.as_bytes(), &ins, &params)?;
        }
    }
    match best {
        Some((t, k, v)) => art.say(format!(
            "{} [{} {}]: argmax tau={t} kappa={k} (I={v:.3e})",
            cfg.name,
            probe_name(spec.probe),
            variant_name(cfg.pipeline.variant)
        )),
        None => art.say(format!("{}: every row was masked", cfg.name)),
    }
    Ok(())
}

/// Domain scans over each configured family, with colored circles and the
/// hull raster.
pub fn cmd_polygon(cfg: &RunConfig, data: Option<&Path>, art: &mut Artifacts) -> Result<()> {
    for (label, run) in single_run(cfg, data)? {
        let spec = run.pipeline.polygon.clone().ok_or_else(|| CliError::config("pipeline.polygon", "missing"))?;
        let sub = PathBuf::from(label);
        let (d, digest) = obtain_data(&run, &sub, data, art)?;
        polygon_run(&run, &spec, &d, &digest, &sub, art)?;
    }
    Ok(())
}

fn polygon_run(cfg: &RunConfig, spec: &PolygonSpec, data: &CauchyData, digest: &str, sub: &Path, art: &mut Artifacts) -> Result<()> {
    write_config(cfg, sub, art)?;
    let ins = inputs(cfg, Some(digest));
    let hull_grid = spec.hull_grid.grid()?;
    let truth = cfg.scenario.object.curve().cloned();
    for (i, family) in spec.families.iter().enumerate() {
        let domains = family.test_domains(spec.probe)?;
        let disks = family.disks()?;
        let result = domain_scan(
            data,
            &domains,
            cfg.scenario.sigma,
            cfg.scenario.q,
            cfg.pipeline.variant,
            &cfg.pipeline.resolution,
            cfg.pipeline.cutoff,
        )?;
        let params = format!(
            "{}; probe={}; {}; family={}; quantile={}",
            parameters(cfg),
            probe_name(spec.probe),
            probe_parameters(spec.probe),
            family.describe(),
            spec.quantile
        );
        let rows = disks.iter().enumerate().map(|(m, d)| {
            vec![
                m.to_string(),
                num(d.center[0]),
                num(d.center[1]),
                num(d.radius),
                num(result.values[m]),
                result.mask[m].to_string(),
            ]
        });
        let header = ["member", "center_x", "center_y", "radius", "value", "valid"];
        art.write(sub.join(format!("family-{i}.csv")), &csv_bytes(&header, rows), &ins, &params)?;
        if cfg.output.wants("svg") {
            let half = disks.iter().map(|d| d.center[0].abs().max(d.center[1].abs()) + d.radius).fold(2.5_f64, f64::max);
            let circles: Vec<_> = disks.iter().map(|d| (d.center, d.radius)).collect();
            let items: Vec<Overlay> = truth.iter().map(|c| Overlay::Curve { curve: c.clone(), color: "black" }).collect();
            let svg = circles_svg(&circles, &colors(&result, cfg.pipeline.log_scale), half.ceil(), &items);
            art.write(sub.join(format!("family-{i}.svg")), svg.as_bytes(), &ins, &params)?;
        }
        let curves: Vec<Curve> = domains.iter().map(|d| d.domain.clone()).collect();
        match convex_hull_estimate(&curves, &result, spec.quantile, &hull_grid) {
            Ok(mask) => {
                let rows = hull_grid.points().into_iter().zip(&mask).map(|(z, m)| vec![num(z[0]), num(z[1]), m.to_string()]);
                art.write(sub.join(format!("hull-{i}.csv")), &csv_bytes(&["x", "y", "inside"], rows), &ins, &params)?;
                if cfg.output.wants("ppm") {
                    let img = mask_ppm(&mask, hull_grid.nx, hull_grid.ny, cfg.output.cell_pixels);
                    art.write(sub.join(format!("hull-{i}.ppm")), &img, &ins, &params)?;
                }
            }
            Err(e @ (FactorizationError::NoAcceptedDomains | FactorizationError::InvalidInput(_))) => {
                art.write(sub.join(format!("hull-{i}.txt")), format!("{e}\n").as_bytes(), &ins, &params)?;
            }
            Err(e) => return Err(e.into()),
        }
        if let (Some(a), Some((lo, hi))) = (result.argmax, result.extrema) {
            art.say(format!(
                "{} [{} {}] family {i}: I in [{lo:.3e}, {hi:.3e}], largest for the disk of radius {} at ({}, {})",
                cfg.name,
                probe_name(spec.probe),
                variant_name(cfg.pipeline.variant),
                disks[a].radius,
                disks[a].center[0],
                disks[a].center[1]
            ));
        }
    }
    Ok(())
}

/// Runs a worked example end to end with its preset parameters, for both
/// variants (and both probes where the example has them) unless
/// `overrides.variant` pins one.
pub fn cmd_reproduce(id: &str, overrides: &Overrides, art: &mut Artifacts) -> Result<()> {
    let variants: Vec<Variant> = match overrides.variant {
        Some(v) => vec![v],
        None => BOTH_VARIANTS.to_vec(),
    };
    let load = |name: &str| -> Result<RunConfig> {
        let mut c = preset(name)?;
        c.apply(overrides);
        c.validate()?;
        Ok(c)
    };
    match id {
        "ex1" => {
            for name in ["ex1-kite", "ex1-polygon", "ex1-peanut", "ex1-medium-quarter", "ex1-medium-four"] {
                let mut cfg = load(name)?;
                let spec = cfg.pipeline.image.clone().ok_or_else(|| CliError::config("pipeline.image", "missing"))?;
                for &v in &variants {
                    cfg.pipeline.variant = v;
                    image_run(&cfg, &spec, &Path::new(name).join(variant_name(v)), art)?;
                }
            }
        }
        "ex2" => {
            let mut cfg = load("ex2")?;
            let (data, digest) = obtain_data(&cfg, Path::new(""), None, art)?;
            let mut spec = cfg.pipeline.coeffs.clone().ok_or_else(|| CliError::config("pipeline.coeffs", "missing"))?;
            for probe in BOTH_PROBES {
                spec.probe = probe;
                cfg.pipeline.coeffs = Some(spec.clone());
                for &v in &variants {
                    cfg.pipeline.variant = v;
                    let sub = PathBuf::from(format!("{}-{}", probe_name(probe), variant_name(v)));
                    coeffs_run(&cfg, &spec, &data, &digest, &sub, art)?;
                }
            }
        }
        "ex3" | "ex4" => {
            let base = load(id)?;
            for (label, mut cfg) in base.expand() {
                let (data, digest) = obtain_data(&cfg, Path::new(&label), None, art)?;
                let mut spec = cfg.pipeline.polygon.clone().ok_or_else(|| CliError::config("pipeline.polygon", "missing"))?;
                for probe in BOTH_PROBES {
                    spec.probe = probe;
                    cfg.pipeline.polygon = Some(spec.clone());
                    for &v in &variants {
                        cfg.pipeline.variant = v;
                        let sub = Path::new(&label).join(format!("{}-{}", probe_name(probe), variant_name(v)));
                        polygon_run(&cfg, &spec, &data, &digest, &sub, art)?;
                    }
                }
            }
        }
        other => return Err(CliError::Config(format!("unknown example {other:?}; expected ex1, ex2, ex3 or ex4"))),
    }
    Ok(())
}
