use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use dort::config::{parse_aperture, ConfigError, EngineKind, ExperimentConfig};
use dort::pipeline::{self, RunError, RunReport, Timing};
use dort::{formats, scenes, verify};

#[derive(Parser)]
#[command(name = "dort", version, about = "Time-reversal imaging of small elastic cavities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the measured far-field operator and store it as `operator.bin`.
    Simulate(Overrides),
    /// Decompose a stored operator and image the significant eigenvectors.
    Invert {
        #[command(flatten)]
        overrides: Overrides,
        /// Operator file written by `simulate` (default: <out>/operator.bin).
        #[arg(long)]
        operator: Option<PathBuf>,
    },
    /// Run the theory checks for the scene's medium and shapes.
    Verify(Overrides),
    /// Run a builtin scene through the whole pipeline.
    Replay {
        /// One of the builtin scene names.
        name: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the whole pipeline on a configuration file.
    Run(Overrides),
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    directions: Option<usize>,
    #[arg(long)]
    engine: Option<String>,
    /// Arcs in radians, `a,b;c,d`.
    #[arg(long)]
    aperture: Option<String>,
}

impl Overrides {
    fn apply(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig, RunError> {
        if let Some(o) = &self.out {
            cfg.outputs = o.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.noise {
            cfg.noise_level = n;
        }
        if let Some(d) = self.directions {
            cfg.n_directions = d;
        }
        if let Some(e) = &self.engine {
            cfg.engine = EngineKind::parse(e).ok_or_else(|| ConfigError::Semantic { field: "engine".into(), message: format!("unknown engine `{e}`") })?;
        }
        if let Some(a) = &self.aperture {
            cfg.aperture = parse_aperture(a)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn load(&self) -> Result<ExperimentConfig, RunError> {
        let Some(path) = &self.config else {
            return Err(ConfigError::Semantic { field: "--config".into(), message: "a configuration file is required".into() }.into());
        };
        let text = fs::read_to_string(path).map_err(pipeline::io_error(path))?;
        self.apply(dort::parse_config(&text)?)
    }
}

fn print_run(r: &RunReport) {
    println!("scene {} ({} engine, {} directions, noise {}, seed {})", r.name, r.engine.name(), r.n_directions, r.noise_level, r.seed);
    if r.aperture_mode {
        println!("aperture mode: {} of {} directions retained", r.retained_directions, r.n_directions);
    }
    let top: Vec<String> = r.leading_eigenvalues.iter().take(r.significant_count + 1).map(|v| format!("{v:.6e}")).collect();
    println!("significant eigenvalues: {} (gap ratio {:.3e})", r.significant_count, r.gap_ratio);
    println!("leading eigenvalues: {}", top.join(" "));
    match r.checks.reciprocity {
        Some(rec) => println!("normality {:.2e}, reciprocity {:.2e}", r.checks.normality, rec),
        None => println!("normality {:.2e}", r.checks.normality),
    }
    println!("report: {}", r.report_path.display());
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Simulate(o) => {
            let cfg = o.load()?;
            let (_, measured) = pipeline::simulate(&cfg)?;
            fs::create_dir_all(&cfg.outputs).map_err(pipeline::io_error(&cfg.outputs))?;
            let path = cfg.outputs.join("operator.bin");
            formats::write_operator(&path, &measured).map_err(pipeline::io_error(&path))?;
            println!("operator ({} directions) written to {}", measured.n_dir(), path.display());
        }
        Command::Invert { overrides, operator } => {
            let cfg = overrides.load()?;
            let path = operator.unwrap_or_else(|| cfg.outputs.join("operator.bin"));
            let t = Instant::now();
            let f = formats::read_operator(&path).map_err(pipeline::io_error(&path))?;
            let checks = pipeline::operator_checks(&f);
            let read_s = t.elapsed().as_secs_f64();
            print_run(&pipeline::invert(&cfg, &f, checks, Timing { total_s: read_s, ..Timing::default() })?);
        }
        Command::Verify(o) => {
            let cfg = o.load()?;
            let report = verify::verify_theory(&cfg);
            for e in &report.entries {
                println!("{} {}: {:.6e} (target {})", if e.pass { "PASS" } else { "FAIL" }, e.name, e.measured, e.target);
            }
            println!("{} of {} checks passed", report.passed(), report.entries.len());
            fs::create_dir_all(&cfg.outputs).map_err(pipeline::io_error(&cfg.outputs))?;
            let path = cfg.outputs.join("verify.csv");
            let mut w = csv::Writer::from_path(&path).map_err(|e| pipeline::io_error(&path)(std::io::Error::other(e)))?;
            for e in &report.entries {
                w.serialize(e).map_err(|e| pipeline::io_error(&path)(std::io::Error::other(e)))?;
            }
            w.flush().map_err(pipeline::io_error(&path))?;
        }
        Command::Replay { name, overrides } => {
            let Some(cfg) = scenes::builtin(&name) else {
                let msg = format!("unknown scene `{name}`; builtin scenes: {}", scenes::BUILTIN.join(", "));
                return Err(ConfigError::Semantic { field: "name".into(), message: msg }.into());
            };
            let mut cfg = overrides.apply(cfg)?;
            if overrides.out.is_none() {
                cfg.outputs = PathBuf::from("out").join(&name);
            }
            print_run(&pipeline::run_experiment(&cfg)?);
        }
        Command::Run(o) => print_run(&pipeline::run_experiment(&o.load()?)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
