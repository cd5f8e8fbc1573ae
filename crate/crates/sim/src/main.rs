use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use junction_core::model::SystemParams;
use junction_sim::artifacts::spectrum_csv;
use junction_sim::config::{parse_omega_schedule, ExperimentConfig, GridSpec, PauseWindow, SpectrumConfig};
use junction_sim::presets::{preset, PRESET_NAMES};
use junction_sim::runner::SpectrumOutput;
use junction_sim::{run_experiment, Result, SimError};
use log::info;

#[derive(Parser)]
#[command(name = "junction", version, about = "Single-photon transport through a driven-atom waveguide junction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML config or a preset.
    Run(RunArgs),
    /// Stationary transmission spectrum for one or more control strengths.
    Spectrum(SpectrumArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML).
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    /// Output directory [default: out/<name>].
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Piecewise-constant control field, `t0:v0,t1:v1,...` with t0 = 0.
    #[arg(long)]
    omega_schedule: Option<String>,
    /// Switch the control field off on `t_off:t_on`.
    #[arg(long)]
    pause: Option<String>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Control field strength; repeat for several.
    #[arg(long, required = true, allow_negative_numbers = true)]
    omega: Vec<f64>,
    /// Energy grid `lo:hi:n`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, default_value_t = SystemParams::default().n_atoms)]
    n_atoms: usize,
    #[arg(long, default_value_t = SystemParams::default().g)]
    g: f64,
    /// Write full artifacts here instead of printing CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Spectrum(args) => spectrum(args),
        Command::Presets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut config = match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    if args.dt.is_some() || args.t_end.is_some() || args.omega_schedule.is_some() || args.pause.is_some() {
        let d = config
            .dynamics
            .as_mut()
            .ok_or_else(|| SimError::Invalid("overrides need a dynamics run".into()))?;
        if let Some(dt) = args.dt {
            d.dt = dt;
        }
        if let Some(t) = args.t_end {
            d.t_end = t;
        }
        if let Some(s) = &args.omega_schedule {
            d.schedule = parse_omega_schedule(s)?;
        }
        if let Some(p) = &args.pause {
            d.pause = Some(parse_pause(p)?);
        }
        config.validate()?;
    }
    let out = args.out.unwrap_or_else(|| PathBuf::from("out").join(&config.name));
    let (run, files) = run_experiment(&config, &out)?;
    info!("{}: wrote {} files to {}", config.name, files.len(), out.display());
    if let Some(d) = &run.dynamics {
        let p = d.trajectory.probabilities.last().copied().unwrap_or_default();
        println!(
            "{}: P_AL={:.6} P_AR={:.6} P_BL={:.6} P_BR={:.6} P_C={:.6} max_norm_drift={:.3e}",
            config.name, p.p_al, p.p_ar, p.p_bl, p.p_br, p.p_c, d.trajectory.max_norm_drift
        );
    }
    println!("artifacts: {}", out.display());
    Ok(())
}

fn parse_pause(text: &str) -> Result<PauseWindow> {
    let bad = || SimError::Invalid(format!("pause `{text}` is not t_off:t_on"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    Ok(PauseWindow {
        t_off: a.trim().parse().map_err(|_| bad())?,
        t_on: b.trim().parse().map_err(|_| bad())?,
    })
}

fn spectrum(args: SpectrumArgs) -> Result<()> {
    let grid = match &args.grid {
        Some(g) => GridSpec::parse(g)?,
        None => GridSpec::default(),
    };
    let config = ExperimentConfig {
        name: "spectrum".into(),
        system: SystemParams {
            n_atoms: args.n_atoms,
            g: args.g,
            ..SystemParams::default()
        },
        dynamics: None,
        spectrum: Some(SpectrumConfig {
            omegas: args.omega.clone(),
            grid,
        }),
        outputs: Default::default(),
    };
    config.validate()?;
    if let Some(out) = &args.out {
        run_experiment(&config, out)?;
        println!("artifacts: {}", out.display());
        return Ok(());
    }
    let run = junction_sim::simulate(&config)?;
    let mut stdout = std::io::stdout().lock();
    for s in &run.spectra {
        write_spectrum(&mut stdout, s, run.spectra.len() > 1)
            .map_err(|e| SimError::io("<stdout>", e))?;
    }
    Ok(())
}

fn write_spectrum(w: &mut impl Write, s: &SpectrumOutput, label: bool) -> std::io::Result<()> {
    if label {
        writeln!(w, "# omega = {:?}", s.omega)?;
    }
    w.write_all(spectrum_csv(s).as_bytes())
}
