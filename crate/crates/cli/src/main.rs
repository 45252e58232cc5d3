//! `setprop`: set-propagation flowpipes and reference integrators for FEM
//! transient problems.

mod config;
mod error;
mod output;
mod problem;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{Method, Overrides, Resolved, RunConfig};
use error::CliError;
use problem::build_problem;

#[derive(Parser)]
#[command(name = "setprop", version, about = "Flowpipes for linear FEM transient problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file and write CSV, SVG and manifest files.
    Run {
        config: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Check a config file and its system file without computing anything.
    Validate {
        config: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run one of the bundled example configs.
    Demo {
        name: Demo,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args, Clone, Default)]
struct Flags {
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            delta: self.delta,
            steps: self.steps,
            method: self.method,
            out_dir: self.out_dir.clone(),
            seed: self.seed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Demo {
    Oscillator,
    ClampedBar,
    Wave2d,
    HeatRod,
    Hydration,
}

impl Demo {
    fn name(self) -> &'static str {
        match self {
            Demo::Oscillator => "oscillator",
            Demo::ClampedBar => "clamped_bar",
            Demo::Wave2d => "wave2d",
            Demo::HeatRod => "heat_rod",
            Demo::Hydration => "hydration",
        }
    }

    /// The config text and the system files it refers to.
    fn files(self) -> (&'static str, &'static [(&'static str, &'static str)]) {
        const WAVE: &str = include_str!("../../../configs/systems/wave2d.sys");
        const HYDRATION: &str = include_str!("../../../configs/systems/hydration.sys");
        match self {
            Demo::Oscillator => (include_str!("../../../configs/oscillator.yaml"), &[]),
            Demo::ClampedBar => (include_str!("../../../configs/clamped_bar.yaml"), &[]),
            Demo::Wave2d => (
                include_str!("../../../configs/wave2d.yaml"),
                &[("systems/wave2d.sys", WAVE)],
            ),
            Demo::HeatRod => (include_str!("../../../configs/heat_rod.yaml"), &[]),
            Demo::Hydration => (
                include_str!("../../../configs/hydration.yaml"),
                &[("systems/hydration.sys", HYDRATION)],
            ),
        }
    }
}

fn load(path: &Path, flags: &Flags) -> Result<Resolved, CliError> {
    let mut cfg = RunConfig::load(path)?;
    cfg.apply(&flags.overrides());
    let base = path.parent().unwrap_or(Path::new("."));
    cfg.resolve(base)
}

fn out_dir_for(res: &Resolved, fallback: &str) -> PathBuf {
    match &res.config.out_dir {
        Some(d) if d.is_absolute() => d.clone(),
        Some(d) => res.base_dir.join(d),
        None => PathBuf::from("out").join(fallback),
    }
}

fn run(res: &Resolved, out_dir: &Path) -> Result<(), CliError> {
    let report = run::execute(res, out_dir)?;
    println!(
        "{} with {}: {} steps, state {} (augmented {}), {:.3} s",
        report.problem, report.method, report.steps, report.state_dim, report.augmented_dim, report.wall_time_s
    );
    for o in &report.outputs {
        match o.peak_width {
            Some(w) => println!("  {}: peak width {w:.6e}, L1 {:.6e}, Linf {:.6e}", o.id, o.l1, o.linf),
            None => println!("  {}: L1 {:.6e}, Linf {:.6e}", o.id, o.l1, o.linf),
        }
    }
    for r in &report.integrators {
        println!("  {}: {} trajectories", r.method, r.samples);
    }
    println!("wrote {} files to {}", report.files.len() + 1, out_dir.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, flags } => {
            let res = load(&config, &flags)?;
            let stem = config.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
            let dir = match &flags.out_dir {
                Some(d) => d.clone(),
                None => out_dir_for(&res, &stem),
            };
            run(&res, &dir)
        }
        Command::Validate { config, flags } => {
            let res = load(&config, &flags)?;
            let cfg = &res.config;
            let p = build_problem(&cfg.problem, cfg.initial.as_ref(), &res.base_dir)?;
            problem::build_outputs(&cfg.outputs, &p.system)?;
            println!(
                "ok: {} ({} system, {} dofs, {} input terms), {} with delta {} over {} steps",
                p.label,
                p.system.kind().name(),
                p.system.dofs(),
                p.inputs.len(),
                res.method,
                cfg.delta,
                res.steps
            );
            Ok(())
        }
        Command::Demo { name, flags } => {
            let dir = flags.out_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(name.name()));
            let (text, systems) = name.files();
            let write = |rel: &str, body: &str| {
                let path = dir.join(rel);
                if let Some(parent) = path.parent() {
                    std::fs::create_dir_all(parent)?;
                }
                std::fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
            };
            for (rel, body) in systems {
                write(rel, body)?;
            }
            write("config.yaml", text)?;
            let mut cfg = RunConfig::parse(text, name.name())?;
            cfg.apply(&flags.overrides());
            let res = cfg.resolve(&dir)?;
            run(&res, &dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("setprop: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
