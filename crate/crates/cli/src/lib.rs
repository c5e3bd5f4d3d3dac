//! Command-line front end: configuration parsing and experiment
//! pipelines for the stochastic traffic solvers.

pub mod experiment;
pub mod parser;

pub use experiment::{run_experiment, CliError, RunArtifacts};
pub use parser::{parse_config_file, parse_config_str, ParseError};

use std::path::PathBuf;

use traffic_gpc::config::ScenarioConfig;

pub const USAGE: &str = "\
usage: traffic-gpc <command> <config> [options]

commands:
  run       execute the configured experiment and write its artifacts
  sweep     run a steady-state or spread sweep (sweep scenarios only)
  validate  check a configuration and list violations

options:
  --output-dir <dir>      override the output directory
  --snapshots <t1,t2,..>  override the snapshot times
  --seed <n>              override the random seed
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Run,
    Sweep,
    Validate,
}

#[derive(Debug)]
pub struct CliInvocation {
    pub command: Command,
    pub config_path: PathBuf,
    pub output_dir: Option<PathBuf>,
    pub snapshots: Option<Vec<f64>>,
    pub seed: Option<u64>,
}

/// Parse the argument list (without the program name).
pub fn parse_args(args: &[String]) -> Result<CliInvocation, String> {
    let mut it = args.iter();
    let command = match it.next().map(String::as_str) {
        Some("run") => Command::Run,
        Some("sweep") => Command::Sweep,
        Some("validate") => Command::Validate,
        Some(other) => return Err(format!("unknown command `{other}`")),
        None => return Err("missing command".into()),
    };
    let config_path = PathBuf::from(
        it.next()
            .ok_or_else(|| "missing configuration path".to_string())?,
    );
    let mut invocation = CliInvocation {
        command,
        config_path,
        output_dir: None,
        snapshots: None,
        seed: None,
    };
    while let Some(flag) = it.next() {
        let mut value = || {
            it.next()
                .ok_or_else(|| format!("flag {flag} expects a value"))
        };
        match flag.as_str() {
            "--output-dir" => invocation.output_dir = Some(PathBuf::from(value()?)),
            "--snapshots" => {
                let raw = value()?;
                let times = raw
                    .split(',')
                    .filter(|p| !p.is_empty())
                    .map(|p| p.parse::<f64>().map_err(|_| format!("bad time `{p}`")))
                    .collect::<Result<Vec<f64>, _>>()?;
                invocation.snapshots = Some(times);
            }
            "--seed" => {
                invocation.seed = Some(
                    value()?
                        .parse()
                        .map_err(|_| "seed must be an integer".to_string())?,
                )
            }
            other => return Err(format!("unknown flag `{other}`")),
        }
    }
    Ok(invocation)
}

/// Load the configuration and apply command-line overrides.
pub fn load_config(invocation: &CliInvocation) -> Result<ScenarioConfig, CliError> {
    let mut config = parse_config_file(&invocation.config_path)?;
    if let Some(dir) = &invocation.output_dir {
        config.output_dir = dir.clone();
    }
    if let Some(times) = &invocation.snapshots {
        config.snapshots = times.clone();
    }
    if let Some(seed) = invocation.seed {
        config.seed = seed;
    }
    Ok(config)
}

/// Execute an invocation; returns the process exit code.
pub fn execute(invocation: &CliInvocation) -> i32 {
    let config = match load_config(invocation) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return 2;
        }
    };
    match invocation.command {
        Command::Validate => {
            let violations = config.validate();
            if violations.is_empty() {
                println!("configuration ok");
                0
            } else {
                for v in &violations {
                    println!("violation: {v}");
                }
                2
            }
        }
        Command::Sweep => {
            if !config.scenario.is_sweep() {
                eprintln!(
                    "scenario `{}` is not a sweep; use `run`",
                    config.scenario.name()
                );
                return 2;
            }
            run_and_report(&config)
        }
        Command::Run => run_and_report(&config),
    }
}

fn run_and_report(config: &ScenarioConfig) -> i32 {
    match run_experiment(config) {
        Ok(artifacts) => {
            for f in &artifacts.files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(CliError::Invalid(violations)) => {
            for v in &violations {
                eprintln!("violation: {v}");
            }
            2
        }
        Err(e) => {
            eprintln!("{e}");
            1
        }
    }
}
