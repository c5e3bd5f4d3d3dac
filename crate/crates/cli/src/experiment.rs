//! Experiment pipelines: dispatch a parsed configuration to the solvers
//! and diagnostics and write the result files.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Instant;

use traffic_gpc::config::{Scenario, ScenarioConfig};
use traffic_gpc::diagnostics::{
    confidence_band, probability_field, sigma_sweep, steady_state_sweep, MuOptions, SweepRow,
};
use traffic_gpc::initial::project_initial_data;
use traffic_gpc::monte_carlo::{compare_with_gpc, run_samples, Sampling};
use traffic_gpc::output;
use traffic_gpc::physics::PhysicsParams;
use traffic_gpc::{
    ArzOptions, ArzSolver, FluidState, HaarBasis, KineticOptions, KineticSolver,
};

#[derive(Debug)]
pub enum CliError {
    Parse(crate::parser::ParseError),
    Invalid(Vec<String>),
    Core(traffic_gpc::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(e) => write!(f, "config parse error: {e}"),
            CliError::Invalid(v) => write!(f, "invalid configuration: {}", v.join("; ")),
            CliError::Core(e) => write!(f, "solver error: {e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<traffic_gpc::Error> for CliError {
    fn from(e: traffic_gpc::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<crate::parser::ParseError> for CliError {
    fn from(e: crate::parser::ParseError) -> Self {
        CliError::Parse(e)
    }
}

/// Files written by a run plus the summary entries.
#[derive(Debug, Default)]
pub struct RunArtifacts {
    pub files: Vec<PathBuf>,
    pub summary: Vec<(String, String)>,
}

fn config_summary(config: &ScenarioConfig) -> Vec<(String, String)> {
    let mut s = vec![
        ("scenario".into(), config.scenario.name().to_string()),
        ("domain_start".into(), config.domain.0.to_string()),
        ("domain_end".into(), config.domain.1.to_string()),
        ("dx".into(), config.dx.to_string()),
        ("t_final".into(), config.t_final.to_string()),
        ("cfl".into(), config.cfl.to_string()),
        ("k".into(), config.k.to_string()),
        ("gamma".into(), config.gamma.to_string()),
        ("n_v".into(), config.n_v.to_string()),
        ("epsilon".into(), config.epsilon.to_string()),
        ("n_xi".into(), config.n_xi.to_string()),
        ("v_max".into(), config.v_max.to_string()),
        ("rho_max".into(), config.rho_max.to_string()),
        ("seed".into(), config.seed.to_string()),
        ("mc_samples".into(), config.mc_samples.to_string()),
        ("write_kinetic".into(), config.write_kinetic.to_string()),
        (
            "snapshots".into(),
            config
                .snapshot_times()
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        ),
    ];
    if let Some(n) = config.n_v_compare {
        s.push(("n_v_compare".into(), n.to_string()));
    }
    if let Some(g) = config.gamma_compare {
        s.push(("gamma_compare".into(), g.to_string()));
    }
    if let Some(r) = config.rho_ref {
        s.push(("rho_ref".into(), r.to_string()));
    }
    match &config.scenario {
        Scenario::SteadySweep {
            rho0_min,
            rho0_max,
            rho0_steps,
            sigma,
        } => {
            s.push(("rho0_min".into(), rho0_min.to_string()));
            s.push(("rho0_max".into(), rho0_max.to_string()));
            s.push(("rho0_steps".into(), rho0_steps.to_string()));
            s.push(("sigma".into(), sigma.to_string()));
        }
        Scenario::SigmaSweep {
            rho0,
            sigma_min,
            sigma_max,
            sigma_steps,
        } => {
            s.push(("rho0".into(), rho0.to_string()));
            s.push(("sigma_min".into(), sigma_min.to_string()));
            s.push(("sigma_max".into(), sigma_max.to_string()));
            s.push(("sigma_steps".into(), sigma_steps.to_string()));
        }
        Scenario::CustomRiemann {
            left_rho_lo,
            left_rho_hi,
            left_v,
            right_rho,
            right_v,
            split,
        } => {
            s.push(("left_rho_lo".into(), left_rho_lo.to_string()));
            s.push(("left_rho_hi".into(), left_rho_hi.to_string()));
            s.push(("left_v".into(), left_v.to_string()));
            s.push(("right_rho".into(), right_rho.to_string()));
            s.push(("right_v".into(), right_v.to_string()));
            s.push(("split".into(), split.to_string()));
        }
        _ => {}
    }
    s
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Run the configured experiment, writing result files into the output
/// directory. Validation violations abort the run.
pub fn run_experiment(config: &ScenarioConfig) -> Result<RunArtifacts, CliError> {
    let violations = config.validate();
    if !violations.is_empty() {
        return Err(CliError::Invalid(violations));
    }
    std::fs::create_dir_all(&config.output_dir)?;
    let started = Instant::now();
    let mut artifacts = if config.scenario.is_sweep() {
        run_sweep(config)?
    } else {
        run_riemann(config)?
    };
    let mut summary = config_summary(config);
    summary.append(&mut artifacts.summary);
    summary.push((
        "wall_time_ms".into(),
        started.elapsed().as_millis().to_string(),
    ));
    for f in &artifacts.files {
        summary.push(("artifact".into(), f.display().to_string()));
    }
    let summary_path = config.output_dir.join("run_summary.txt");
    output::write_summary(BufWriter::new(File::create(&summary_path)?), &summary)?;
    artifacts.summary = summary;
    artifacts.files.push(summary_path);
    Ok(artifacts)
}

fn sweep_curve(
    config: &ScenarioConfig,
    n_v: usize,
    gamma: u32,
    opts: &MuOptions,
) -> Result<Vec<SweepRow>, CliError> {
    let params = PhysicsParams {
        gamma,
        n_v,
        v_max: config.v_max,
        rho_max: config.rho_max,
        ..PhysicsParams::default()
    };
    let rows = match &config.scenario {
        Scenario::SteadySweep {
            rho0_min,
            rho0_max,
            rho0_steps,
            sigma,
        } => steady_state_sweep(
            &linspace(*rho0_min, *rho0_max, *rho0_steps),
            *sigma,
            &params,
            config.n_xi,
            opts,
        )?,
        Scenario::SigmaSweep {
            rho0,
            sigma_min,
            sigma_max,
            sigma_steps,
        } => sigma_sweep(
            *rho0,
            &linspace(*sigma_min, *sigma_max, *sigma_steps),
            &params,
            config.n_xi,
            opts,
        )?,
        _ => unreachable!("sweep pipeline on non-sweep scenario"),
    };
    Ok(rows)
}

fn run_sweep(config: &ScenarioConfig) -> Result<RunArtifacts, CliError> {
    let opts = config.mu_options();
    let mut rows = sweep_curve(config, config.n_v, config.gamma, &opts)?;
    let primary_len = rows.len();
    if let Some(n_v) = config.n_v_compare {
        rows.extend(sweep_curve(config, n_v, config.gamma, &opts)?);
    }
    let mut summary = Vec::new();
    if let Some(gamma) = config.gamma_compare {
        let other = sweep_curve(config, config.n_v, gamma, &opts)?;
        // how far the two hesitation exponents move the curve
        let linf = rows[..primary_len]
            .iter()
            .zip(&other)
            .map(|(a, b)| (a.probability - b.probability).abs())
            .fold(0.0f64, f64::max);
        summary.push((format!("gamma_{{{},{gamma}}}_linf", config.gamma), linf.to_string()));
        rows.extend(other);
    }
    let path = config.output_dir.join("sweep.csv");
    output::write_sweep_csv(BufWriter::new(File::create(&path)?), &rows)?;
    summary.push(("sweep_rows".into(), rows.len().to_string()));
    Ok(RunArtifacts {
        files: vec![path],
        summary,
    })
}

fn run_riemann(config: &ScenarioConfig) -> Result<RunArtifacts, CliError> {
    let basis = HaarBasis::new(config.level())?;
    let params = config.physics();
    let mesh = config.mesh();
    let data = config
        .initial_data()
        .expect("riemann pipeline has initial data");
    let opts = config.mu_options();
    let mut files = Vec::new();
    let mut summary = Vec::new();

    let solver = ArzSolver::new(
        basis.clone(),
        params.clone(),
        ArzOptions {
            epsilon: Some(config.epsilon),
            cfl: config.cfl,
            ..ArzOptions::default()
        },
    );
    let (rho, q) = project_initial_data(&data, &basis, &params, &mesh.centers())?;
    let state = FluidState::new(mesh, basis.len(), rho, q);
    let times = config.snapshot_times();
    let run = solver.run(state, config.t_final, &times)?;
    summary.push(("fluid_steps".into(), run.steps.to_string()));
    for (i, audit) in run.audits.iter().enumerate() {
        summary.push((
            format!("hyperbolic_t{i}"),
            format!("{} (min nodal density {})", audit.hyperbolic, audit.min_nodal_density),
        ));
    }
    let centers = mesh.centers();
    for (i, snapshot) in run.snapshots.iter().enumerate() {
        let path = config.output_dir.join(format!("snapshot_{i}.csv"));
        output::write_snapshot_csv(
            BufWriter::new(File::create(&path)?),
            snapshot,
            config.gamma,
            config.epsilon,
        )?;
        files.push(path);

        let probability = probability_field(snapshot, &basis, &params, config.n_xi, &opts)?;
        let mut bands = Vec::with_capacity(mesh.n_cells);
        let mut means = Vec::with_capacity(mesh.n_cells);
        for c in 0..mesh.n_cells {
            bands.push(confidence_band(snapshot.rho_cell(c), &basis, config.n_xi, 0.95));
            means.push(snapshot.rho_cell(c)[0]);
        }
        let path = config.output_dir.join(format!("field_{i}.csv"));
        output::write_field_csv(
            BufWriter::new(File::create(&path)?),
            &centers,
            &probability,
            &bands,
            &means,
        )?;
        files.push(path);
    }

    if config.write_kinetic {
        let rho_ref = config
            .rho_ref
            .or_else(|| config.mean_initial_density())
            .unwrap_or(0.5);
        let kinetic = KineticSolver::new(
            basis.clone(),
            params.clone(),
            KineticOptions {
                epsilon: Some(config.epsilon),
                cfl: config.cfl,
                rho_ref,
                pad_range: (0.0, config.rho_max),
                ..KineticOptions::default()
            },
        );
        let gamma = config.gamma;
        let kstate = kinetic.init_with_moments(
            mesh,
            |x, xi| data.rho_at(x, xi),
            |x, xi| {
                let r = data.rho_at(x, xi);
                r * (data.v_at(x, xi) + traffic_gpc::physics::h(r, gamma))
            },
        )?;
        let krun = kinetic.run(kstate, config.t_final, &times)?;
        for (i, (t, rho, q)) in krun.snapshots.iter().enumerate() {
            let mut moments = FluidState::new(mesh, basis.len(), rho.clone(), q.clone());
            moments.time = *t;
            let path = config.output_dir.join(format!("kinetic_{i}.csv"));
            output::write_snapshot_csv(
                BufWriter::new(File::create(&path)?),
                &moments,
                config.gamma,
                config.epsilon,
            )?;
            files.push(path);
        }
        summary.push(("kinetic_steps".into(), krun.steps.to_string()));
        summary.push((
            "kinetic_min_nodal_value".into(),
            krun.monitor.min_value.to_string(),
        ));
        summary.push((
            "kinetic_positivity_violations".into(),
            krun.monitor.violations.to_string(),
        ));
    }

    if config.mc_samples > 0 {
        let mc = run_samples(config, config.mc_samples, Sampling::UniformGrid)?;
        let report = compare_with_gpc(&mc, &run.snapshots, &basis)?;
        let path = config.output_dir.join("mc_comparison.csv");
        output::write_mc_csv(BufWriter::new(File::create(&path)?), &report)?;
        files.push(path);
        for (i, t) in report.times.iter().enumerate() {
            summary.push((
                format!("mc_l1_mean_t{i}"),
                format!("{} (t = {t})", report.l1_mean[i]),
            ));
            summary.push((
                format!("mc_l1_var_t{i}"),
                format!("{} (t = {t})", report.l1_var[i]),
            ));
        }
    }

    Ok(RunArtifacts { files, summary })
}
