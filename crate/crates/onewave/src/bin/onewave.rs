use clap::{Parser, Subcommand, ValueEnum};
use onewave::cli::{self, Artifacts, CliError, Overrides, RunConfig};
use onewave::factorization::Variant;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "onewave", version, about = "Single-data factorization imaging on a disk")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Classical,
    Tilde,
}

#[derive(clap::Args)]
struct Common {
    /// Config file, or preset:NAME for a built-in preset.
    #[arg(long)]
    config: Option<String>,
    /// Cauchy data JSON; synthesized from the config when absent.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Output directory (defaults to the config's output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Fourier modes on the measurement circle.
    #[arg(long)]
    modes: Option<usize>,
    /// Quadrature nodes on the measurement circle.
    #[arg(long)]
    quadrature: Option<usize>,
    /// Relative spectral cutoff of the Picard series.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Color maps by ln I.
    #[arg(long)]
    log_scale: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize Cauchy data for a scenario.
    Synthesize(Common),
    /// Indicator image of an object.
    Image(Common),
    /// Recover (sigma, q) on a (tau, kappa) grid.
    Coeffs(Common),
    /// Domain scans over disk families and the hull estimate.
    Polygon(Common),
    /// Run a worked example: ex1, ex2, ex3 or ex4.
    Reproduce {
        example: String,
        #[command(flatten)]
        common: Common,
    },
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            variant: self.variant.map(|v| match v {
                VariantArg::Classical => Variant::Classical,
                VariantArg::Tilde => Variant::Tilde,
            }),
            modes: self.modes,
            quadrature: self.quadrature,
            cutoff: self.cutoff,
            log_scale: self.log_scale,
        }
    }

    fn config(&self) -> Result<RunConfig, CliError> {
        let spec = self.config.as_deref().ok_or_else(|| CliError::Config("--config is required".into()))?;
        let mut cfg = cli::load_config(spec)?;
        cfg.apply(&self.overrides());
        Ok(cfg)
    }
}

fn run(command: Command) -> Result<Artifacts, CliError> {
    let (common, out_default) = match &command {
        Command::Reproduce { example, common } => (common, Some(PathBuf::from("out").join(example))),
        Command::Synthesize(c) | Command::Image(c) | Command::Coeffs(c) | Command::Polygon(c) => (c, None),
    };
    if let Command::Reproduce { example, common } = &command {
        if common.config.is_some() || common.data.is_some() {
            return Err(CliError::Config("reproduce takes its settings from the built-in presets".into()));
        }
        let mut art = Artifacts::new(common.out.clone().or(out_default).expect("default set"));
        cli::cmd_reproduce(example, &common.overrides(), &mut art)?;
        return Ok(art);
    }
    let cfg = common.config()?;
    let mut art = Artifacts::new(common.out.clone().unwrap_or_else(|| cfg.output.dir.clone()));
    let data = common.data.as_deref();
    match &command {
        Command::Synthesize(_) => cli::cmd_synthesize(&cfg, &mut art)?,
        Command::Image(_) => cli::cmd_image(&cfg, data, &mut art)?,
        Command::Coeffs(_) => cli::cmd_coeffs(&cfg, data, &mut art)?,
        Command::Polygon(_) => cli::cmd_polygon(&cfg, data, &mut art)?,
        Command::Reproduce { .. } => unreachable!(),
    }
    Ok(art)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = run(args.command).and_then(|art| art.finish());
    match outcome {
        Ok((manifest, log)) => {
            for line in log {
                println!("{line}");
            }
            println!("manifest: {}", manifest.display());
            ExitCode::from(cli::EXIT_OK as u8)
        }
        Err(e) => {
            eprintln!("onewave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
