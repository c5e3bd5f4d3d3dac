//! Non-intrusive validation: solve the deterministic system per sample of
//! the random parameter and compare statistics against the intrusive
//! solution.
//!
//! Uniform-grid sampling places samples at midpoint quadrature nodes, so
//! the estimator is a quadrature rule and the comparison is deterministic;
//! pseudo-random sampling with a fixed seed is available as an
//! alternative.

use crate::arz::{ArzOptions, ArzSolver, FluidState};
use crate::basis::HaarBasis;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Midpoint nodes `(s + 1/2) / n`.
    UniformGrid,
    /// Seeded pseudo-random draws from the open unit interval.
    PseudoRandom { seed: u64 },
}

/// Density statistics per snapshot time and cell.
#[derive(Debug, Clone)]
pub struct McMoments {
    pub times: Vec<f64>,
    pub mesh: Mesh,
    /// `mean[s][c]`
    pub mean: Vec<Vec<f64>>,
    /// `var[s][c]`
    pub var: Vec<Vec<f64>>,
    pub n_samples: usize,
}

/// One comparison row: `(x, mean_mc, mean_gpc, var_mc, var_gpc)`.
pub type McRow = (f64, f64, f64, f64, f64);

/// Per-snapshot comparison of sample statistics against expansion
/// statistics.
#[derive(Debug, Clone)]
pub struct McReport {
    pub times: Vec<f64>,
    /// `rows[s][c]`
    pub rows: Vec<Vec<McRow>>,
    pub l1_mean: Vec<f64>,
    pub linf_mean: Vec<f64>,
    pub l1_var: Vec<f64>,
    pub linf_var: Vec<f64>,
}

/// Deterministic solver runs over parameter samples, with one-pass
/// mean/variance accumulation per cell and snapshot.
pub fn run_samples(
    config: &ScenarioConfig,
    n_samples: usize,
    sampling: Sampling,
) -> Result<McMoments> {
    assert!(n_samples >= 1);
    let data = config
        .initial_data()
        .ok_or_else(|| Error::InvalidConfig("scenario has no time-dependent fields".into()))?;
    let mesh = config.mesh();
    let basis = HaarBasis::new(0)?;
    let params = config.physics();
    let solver = ArzSolver::new(basis.clone(), params.clone(), ArzOptions {
        epsilon: Some(config.epsilon),
        cfl: config.cfl,
        ..ArzOptions::default()
    });
    let times = config.snapshot_times();
    let centers = mesh.centers();
    let mut rng = SplitMix64::new(match sampling {
        Sampling::PseudoRandom { seed } => seed,
        Sampling::UniformGrid => 0,
    });
    let n_cells = mesh.n_cells;
    let mut mean = vec![vec![0.0; n_cells]; times.len()];
    let mut m2 = vec![vec![0.0; n_cells]; times.len()];
    for s in 0..n_samples {
        let xi = match sampling {
            Sampling::UniformGrid => (s as f64 + 0.5) / n_samples as f64,
            Sampling::PseudoRandom { .. } => rng.next_unit_open(),
        };
        // deterministic projection at fixed xi; level-0 modal coefficients
        // are the nodal values themselves, so this matches the intrusive
        // path bit for bit when the expansion is truncated to one mode
        let mut rho = vec![0.0; centers.len()];
        let mut q = vec![0.0; centers.len()];
        for (c, &x) in centers.iter().enumerate() {
            let r = data.rho_at(x, xi);
            if !(r > 0.0 && r <= params.rho_max) {
                return Err(Error::SampleFailed {
                    index: s,
                    source: Box::new(Error::BadInitialData(format!(
                        "density {r} at x = {x}, xi = {xi} outside (0, {}]",
                        params.rho_max
                    ))),
                });
            }
            let v = data.v_at(x, xi);
            rho[c] = r;
            q[c] = r * (v + crate::physics::h(r, params.gamma));
        }
        let state = FluidState::new(mesh, 1, rho, q);
        let run = solver
            .run(state, config.t_final, &times)
            .map_err(|e| Error::SampleFailed {
                index: s,
                source: Box::new(e),
            })?;
        if run.snapshots.len() != times.len() {
            return Err(Error::SampleFailed {
                index: s,
                source: Box::new(Error::InvalidConfig(format!(
                    "expected {} snapshots, got {}",
                    times.len(),
                    run.snapshots.len()
                ))),
            });
        }
        // Welford update per snapshot and cell
        let count = (s + 1) as f64;
        for (snap, state) in run.snapshots.iter().enumerate() {
            for c in 0..n_cells {
                let value = state.rho[c];
                let delta = value - mean[snap][c];
                mean[snap][c] += delta / count;
                m2[snap][c] += delta * (value - mean[snap][c]);
            }
        }
    }
    let var = m2
        .into_iter()
        .map(|row| row.into_iter().map(|v| v / n_samples as f64).collect())
        .collect();
    Ok(McMoments {
        times,
        mesh,
        mean,
        var,
        n_samples,
    })
}

/// Expansion statistics against sample statistics, per snapshot.
pub fn compare_with_gpc(
    mc: &McMoments,
    gpc_snapshots: &[FluidState],
    basis: &HaarBasis,
) -> Result<McReport> {
    if gpc_snapshots.len() != mc.times.len() {
        return Err(Error::GridMismatch(format!(
            "{} sample snapshots vs {} expansion snapshots",
            mc.times.len(),
            gpc_snapshots.len()
        )));
    }
    let n = basis.len();
    let mut report = McReport {
        times: mc.times.clone(),
        rows: Vec::new(),
        l1_mean: Vec::new(),
        linf_mean: Vec::new(),
        l1_var: Vec::new(),
        linf_var: Vec::new(),
    };
    for (snap, state) in gpc_snapshots.iter().enumerate() {
        if state.mesh.n_cells != mc.mesh.n_cells {
            return Err(Error::GridMismatch(format!(
                "{} cells vs {} cells",
                state.mesh.n_cells, mc.mesh.n_cells
            )));
        }
        let mut rows = Vec::with_capacity(state.mesh.n_cells);
        let (mut l1m, mut lim, mut l1v, mut liv) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for c in 0..state.mesh.n_cells {
            let coeffs = state.rho_cell(c);
            let mean_gpc = coeffs[0];
            let var_gpc: f64 = coeffs[1..].iter().map(|v| v * v).sum();
            let mean_mc = mc.mean[snap][c];
            let var_mc = mc.var[snap][c];
            let em = (mean_mc - mean_gpc).abs();
            let ev = (var_mc - var_gpc).abs();
            l1m += em * state.mesh.dx;
            l1v += ev * state.mesh.dx;
            lim = lim.max(em);
            liv = liv.max(ev);
            rows.push((state.mesh.center(c), mean_mc, mean_gpc, var_mc, var_gpc));
            debug_assert_eq!(coeffs.len(), n);
        }
        report.rows.push(rows);
        report.l1_mean.push(l1m);
        report.linf_mean.push(lim);
        report.l1_var.push(l1v);
        report.linf_var.push(liv);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scenario;
    use crate::gpc::GpcVector;
    use crate::initial::project_initial_data;
    use approx::assert_abs_diff_eq;

    fn tiny_config() -> ScenarioConfig {
        ScenarioConfig {
            dx: 0.1,
            t_final: 0.0,
            snapshots: vec![0.0],
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn zero_time_mean_is_the_midpoint_value() {
        // mean of the affine left state over midpoint samples equals the
        // center value by symmetry
        let config = tiny_config();
        let mc = run_samples(&config, 64, Sampling::UniformGrid).unwrap();
        // left cells carry the uniform(0.55, 0.85) state: mean 0.7
        assert_abs_diff_eq!(mc.mean[0][0], 0.7, epsilon = 1e-12);
        // right cells are deterministic
        assert_abs_diff_eq!(mc.mean[0][15], 0.2, epsilon = 1e-14);
        assert_abs_diff_eq!(mc.var[0][15], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn single_sample_reduces_to_one_deterministic_run() {
        let config = tiny_config();
        let mc = run_samples(&config, 1, Sampling::UniformGrid).unwrap();
        let data = crate::initial::InitialData::rarefaction();
        assert_abs_diff_eq!(mc.mean[0][0], data.rho_at(0.05, 0.5), epsilon = 1e-14);
        assert_abs_diff_eq!(mc.var[0][0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn parseval_variance_of_a_two_mode_field() {
        let v = GpcVector::new(vec![0.4, 0.12]);
        assert_abs_diff_eq!(v.variance(), 0.12 * 0.12, epsilon = 1e-16);
        // quadrature variance of the reconstruction agrees
        let basis = HaarBasis::new(1).unwrap();
        let nodal = basis.nodal_from_modal(&v.coeffs);
        let mean: f64 = nodal.iter().sum::<f64>() / 2.0;
        let quad_var: f64 = nodal.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 2.0;
        assert_abs_diff_eq!(quad_var, v.variance(), epsilon = 1e-14);
    }

    #[test]
    fn collocation_at_dyadic_nodes_matches_projected_data_exactly() {
        // 2^L midpoint samples of the projected initial data reproduce the
        // expansion statistics at time zero
        let level = 4;
        let basis = HaarBasis::new(level).unwrap();
        let config = tiny_config();
        let mesh = config.mesh();
        let params = config.physics();
        let data = crate::initial::InitialData::rarefaction();
        let (rho, q) = project_initial_data(&data, &basis, &params, &mesh.centers()).unwrap();
        let gpc = FluidState::new(mesh, basis.len(), rho, q);
        let mc = run_samples(&config, 16, Sampling::UniformGrid).unwrap();
        let report = compare_with_gpc(&mc, &[gpc], &basis).unwrap();
        assert!(report.linf_mean[0] < 1e-12, "{}", report.linf_mean[0]);
        assert!(report.linf_var[0] < 1e-12, "{}", report.linf_var[0]);
    }

    #[test]
    fn grid_mismatch_is_a_contract_violation() {
        let config = tiny_config();
        let mc = run_samples(&config, 2, Sampling::UniformGrid).unwrap();
        let basis = HaarBasis::new(1).unwrap();
        let other = FluidState::new(Mesh::new(0.0, 2.0, 5), 2, vec![0.3; 10], vec![0.0; 10]);
        assert!(compare_with_gpc(&mc, &[other], &basis).is_err());
    }

    #[test]
    fn pseudo_random_sampling_is_reproducible() {
        let config = ScenarioConfig {
            scenario: Scenario::Shock,
            dx: 0.2,
            t_final: 0.05,
            snapshots: vec![0.05],
            ..ScenarioConfig::default()
        };
        let a = run_samples(&config, 8, Sampling::PseudoRandom { seed: 9 }).unwrap();
        let b = run_samples(&config, 8, Sampling::PseudoRandom { seed: 9 }).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.var, b.var);
    }
}
