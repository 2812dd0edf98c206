use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use radmhd::diagnostics::{div_lower_bound, lifespan_bound, optimize_alpha};
use radmhd::crossval::picard_cross_check;
use radmhd::mms::convergence_study;
use radmhd::presets::preset_text;
use radmhd::scenario::{bound_summary, init_scenario};
use radmhd::{parse_config, Error, Result, Runner, ScenarioConfig};

#[derive(Parser)]
#[command(name = "radmhd", version, about = "Radial MHD with interior vacuum: runs, lifespan bounds, convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write run.csv and run.json.
    Run {
        /// Configuration file (optional with --preset).
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Start from a built-in preset; a config file given as well is applied on top.
        #[arg(long)]
        preset: Option<String>,
        /// `key=value` applied after the configuration.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Evaluate the lifespan bound and the optimal exponent without simulating.
    Bounds {
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Convergence study of the manufactured solution.
    Mms {
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Comma-separated resolutions.
        #[arg(long, value_delimiter = ',', default_value = "128,256,512")]
        n: Vec<usize>,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Picard iteration over the window, compared with the nonlinear solver.
    Picard {
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn load(config: Option<&PathBuf>, preset: Option<&str>, overrides: &[String]) -> Result<ScenarioConfig> {
    let mut text = String::new();
    if let Some(name) = preset {
        text.push_str(preset_text(name)?);
        text.push('\n');
    }
    match config {
        Some(path) => text.push_str(&std::fs::read_to_string(path)?),
        None if preset.is_none() => return Err(Error::Config("need a config file or --preset".into())),
        None => {}
    }
    let mut cfg = parse_config(&text)?;
    for o in overrides {
        cfg.apply_override(o)?;
    }
    Ok(cfg)
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn finite(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

fn bounds(cfg: &ScenarioConfig) -> Result<()> {
    let summary = match (cfg.bounds.c0, cfg.bounds.e0) {
        (Some(c0), Some(e0)) => bound_summary(cfg, c0, e0)?,
        _ => init_scenario(cfg)?.bounds,
    };
    let inputs = summary.inputs(cfg);
    let (alpha_star, t_star) = optimize_alpha(&inputs)?;
    let t_at = lifespan_bound(&inputs)?;
    print_json(&json!({
        "geometry": cfg.physics.geometry.name(),
        "alpha": summary.alpha_star,
        "T_bound": finite(t_at),
        "alpha_star": alpha_star,
        "T_star": finite(t_star),
        "C0": summary.c0,
        "E0": summary.e0,
        "R_ref": summary.r_ref,
        "C_envelope": summary.c_envelope,
        "div_lower_bound": div_lower_bound(&inputs, inputs.r_ref)?,
    }));
    Ok(())
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config, out, preset, overrides } => {
            let cfg = load(config.as_ref(), preset.as_deref(), &overrides)?;
            let mut runner = Runner::new(cfg)?;
            let outcome = runner.run_to_end()?;
            runner.write_outputs(&out)?;
            print_json(&runner.json());
            Ok(ExitCode::from(outcome.status.exit_code() as u8))
        }
        Command::Bounds { config, preset, overrides } => {
            bounds(&load(config.as_ref(), preset.as_deref(), &overrides)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Mms { config, preset, n, overrides } => {
            let cfg = load(config.as_ref(), preset.as_deref(), &overrides)?;
            let table = convergence_study(&cfg, &n)?;
            print_json(&serde_json::to_value(&table).map_err(|e| Error::Io(e.to_string()))?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Picard { config, preset, overrides } => {
            let cfg = load(config.as_ref(), preset.as_deref(), &overrides)?;
            let check = picard_cross_check(&cfg)?;
            print_json(&serde_json::to_value(&check).map_err(|e| Error::Io(e.to_string()))?);
            Ok(if check.report.converged { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
