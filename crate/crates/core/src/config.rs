//! Experiment configuration shared by the solvers, the validation oracle
//! and the command-line front end.

use std::path::PathBuf;

use crate::diagnostics::MuOptions;
use crate::initial::InitialData;
use crate::mesh::Mesh;
use crate::physics::PhysicsParams;

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    SteadySweep {
        rho0_min: f64,
        rho0_max: f64,
        rho0_steps: usize,
        sigma: f64,
    },
    SigmaSweep {
        rho0: f64,
        sigma_min: f64,
        sigma_max: f64,
        sigma_steps: usize,
    },
    Rarefaction,
    Shock,
    CustomRiemann {
        left_rho_lo: f64,
        left_rho_hi: f64,
        left_v: f64,
        right_rho: f64,
        right_v: f64,
        split: f64,
    },
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::SteadySweep { .. } => "steady-sweep",
            Scenario::SigmaSweep { .. } => "sigma-sweep",
            Scenario::Rarefaction => "rarefaction",
            Scenario::Shock => "shock",
            Scenario::CustomRiemann { .. } => "custom",
        }
    }

    pub fn is_sweep(&self) -> bool {
        matches!(
            self,
            Scenario::SteadySweep { .. } | Scenario::SigmaSweep { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub domain: (f64, f64),
    pub dx: f64,
    pub t_final: f64,
    pub cfl: f64,
    /// Number of expansion modes; must be a power of two.
    pub k: usize,
    pub gamma: u32,
    pub n_v: usize,
    pub epsilon: f64,
    pub n_xi: usize,
    pub v_max: f64,
    pub rho_max: f64,
    pub scenario: Scenario,
    /// Snapshot times; empty means `{0, T/2, T}`.
    pub snapshots: Vec<f64>,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Collocation sample count for the validation comparison; zero skips
    /// it.
    pub mc_samples: usize,
    /// Anchor density of the kinetic grid; defaults to the mean initial
    /// density.
    pub rho_ref: Option<f64>,
    pub write_kinetic: bool,
    /// Sweeps only: additional curve at this velocity count.
    pub n_v_compare: Option<usize>,
    /// Sweeps only: additional curve at this hesitation exponent.
    pub gamma_compare: Option<u32>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            domain: (0.0, 2.0),
            dx: 0.02,
            t_final: 1.0,
            cfl: 0.45,
            k: 64,
            gamma: 1,
            n_v: 5,
            epsilon: 1e-2,
            n_xi: 100,
            v_max: 1.0,
            rho_max: 1.0,
            scenario: Scenario::Rarefaction,
            snapshots: Vec::new(),
            output_dir: PathBuf::from("out"),
            seed: 0,
            mc_samples: 0,
            rho_ref: None,
            write_kinetic: false,
            n_v_compare: None,
            gamma_compare: None,
        }
    }
}

impl ScenarioConfig {
    pub fn rarefaction() -> Self {
        Self::default()
    }

    pub fn shock() -> Self {
        Self {
            scenario: Scenario::Shock,
            // weak relaxation keeps the two-wave structure of the jump
            epsilon: 1.0,
            ..Self::default()
        }
    }

    pub fn steady_sweep() -> Self {
        Self {
            scenario: Scenario::SteadySweep {
                rho0_min: 0.1,
                rho0_max: 0.9,
                rho0_steps: 81,
                sigma: 0.1,
            },
            n_v: 10,
            n_v_compare: Some(3),
            n_xi: 10_000,
            ..Self::default()
        }
    }

    pub fn sigma_sweep(rho0: f64) -> Self {
        Self {
            scenario: Scenario::SigmaSweep {
                rho0,
                sigma_min: 0.0,
                sigma_max: 0.2,
                sigma_steps: 41,
            },
            n_v: 10,
            n_v_compare: Some(3),
            n_xi: 10_000,
            ..Self::default()
        }
    }

    pub fn level(&self) -> u32 {
        self.k.trailing_zeros()
    }

    pub fn mesh(&self) -> Mesh {
        Mesh::with_dx(self.domain.0, self.domain.1, self.dx)
    }

    pub fn physics(&self) -> PhysicsParams {
        PhysicsParams {
            gamma: self.gamma,
            v_max: self.v_max,
            rho_max: self.rho_max,
            n_v: self.n_v,
            ..PhysicsParams::default()
        }
    }

    pub fn mu_options(&self) -> MuOptions {
        MuOptions::default()
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        if self.snapshots.is_empty() {
            vec![0.0, 0.5 * self.t_final, self.t_final]
        } else {
            self.snapshots.clone()
        }
    }

    /// Initial fields for the time-dependent scenarios; sweeps have none.
    pub fn initial_data(&self) -> Option<InitialData> {
        match &self.scenario {
            Scenario::Rarefaction => Some(InitialData::rarefaction()),
            Scenario::Shock => Some(InitialData::shock()),
            Scenario::CustomRiemann {
                left_rho_lo,
                left_rho_hi,
                left_v,
                right_rho,
                right_v,
                split,
            } => Some(InitialData::Riemann {
                left_rho: crate::initial::RandomScalar::Uniform {
                    lo: *left_rho_lo,
                    hi: *left_rho_hi,
                },
                left_v: *left_v,
                right_rho: crate::initial::RandomScalar::Deterministic(*right_rho),
                right_v: *right_v,
                split: *split,
            }),
            _ => None,
        }
    }

    /// Mean initial density, used as the default kinetic grid anchor.
    pub fn mean_initial_density(&self) -> Option<f64> {
        let data = self.initial_data()?;
        let mesh = self.mesh();
        let mut acc = 0.0;
        for c in 0..mesh.n_cells {
            acc += data.rho_at(mesh.center(c), 0.5);
        }
        Some(acc / mesh.n_cells as f64)
    }

    /// Invariant violations as data; an empty list means the
    /// configuration is usable.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.dx > 0.0) {
            out.push(format!("dx must be positive, got {}", self.dx));
        }
        if self.domain.1 <= self.domain.0 {
            out.push(format!(
                "domain must be an interval, got [{}, {}]",
                self.domain.0, self.domain.1
            ));
        }
        if self.t_final < 0.0 {
            out.push(format!("t_final must be nonnegative, got {}", self.t_final));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            out.push(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if !self.k.is_power_of_two() {
            out.push(format!("k must be a power of two, got {}", self.k));
        } else if self.k > 4096 {
            out.push(format!("k must not exceed 4096, got {}", self.k));
        }
        if !(1..=3).contains(&self.gamma) {
            out.push(format!("gamma must be 1, 2 or 3, got {}", self.gamma));
        }
        if self.n_v < 2 {
            out.push(format!("n_v must be at least 2, got {}", self.n_v));
        }
        if !(self.epsilon > 0.0) {
            out.push(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.n_xi == 0 {
            out.push("n_xi must be at least 1".into());
        }
        if let Some(n) = self.n_v_compare {
            if n < 2 {
                out.push(format!("n_v_compare must be at least 2, got {n}"));
            }
        }
        if let Some(g) = self.gamma_compare {
            if !(1..=3).contains(&g) {
                out.push(format!("gamma_compare must be 1, 2 or 3, got {g}"));
            }
        }
        for t in &self.snapshots {
            if *t < 0.0 || *t > self.t_final + 1e-12 {
                out.push(format!("snapshot time {t} outside [0, {}]", self.t_final));
            }
        }
        let check_density_range = |label: &str, lo: f64, hi: f64, out: &mut Vec<String>| {
            if lo <= 0.0 || hi >= self.rho_max {
                out.push(format!(
                    "{label} density support [{lo}, {hi}] exceeds (0, {})",
                    self.rho_max
                ));
            }
        };
        match &self.scenario {
            Scenario::SteadySweep {
                rho0_min,
                rho0_max,
                rho0_steps,
                sigma,
            } => {
                if rho0_steps < &2 {
                    out.push("steady sweep needs at least 2 grid points".into());
                }
                check_density_range(
                    "sweep",
                    rho0_min - 0.5 * sigma,
                    rho0_max + 0.5 * sigma,
                    &mut out,
                );
            }
            Scenario::SigmaSweep {
                rho0,
                sigma_min,
                sigma_max,
                sigma_steps,
            } => {
                if sigma_steps < &2 {
                    out.push("sigma sweep needs at least 2 grid points".into());
                }
                if sigma_min < &0.0 {
                    out.push(format!("sigma_min must be nonnegative, got {sigma_min}"));
                }
                check_density_range(
                    "sigma sweep",
                    rho0 - 0.5 * sigma_max,
                    rho0 + 0.5 * sigma_max,
                    &mut out,
                );
            }
            Scenario::Rarefaction | Scenario::Shock => {}
            Scenario::CustomRiemann {
                left_rho_lo,
                left_rho_hi,
                right_rho,
                split,
                ..
            } => {
                check_density_range("left state", *left_rho_lo, *left_rho_hi, &mut out);
                check_density_range("right state", *right_rho, *right_rho, &mut out);
                if *split <= self.domain.0 || *split >= self.domain.1 {
                    out.push(format!("split {split} outside the domain"));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_configuration_is_valid() {
        assert!(ScenarioConfig::default().validate().is_empty());
        assert!(ScenarioConfig::shock().validate().is_empty());
        assert!(ScenarioConfig::steady_sweep().validate().is_empty());
        assert!(ScenarioConfig::sigma_sweep(0.4).validate().is_empty());
    }

    #[test]
    fn sweep_support_leaving_the_density_range_is_flagged() {
        let cfg = ScenarioConfig {
            scenario: Scenario::SteadySweep {
                rho0_min: 0.1,
                rho0_max: 0.9,
                rho0_steps: 5,
                sigma: 0.9,
            },
            ..ScenarioConfig::default()
        };
        let violations = cfg.validate();
        assert!(violations.iter().any(|v| v.contains("exceeds")));
    }

    #[test]
    fn non_power_of_two_mode_count_is_flagged() {
        let cfg = ScenarioConfig {
            k: 3,
            ..ScenarioConfig::default()
        };
        let violations = cfg.validate();
        assert!(violations.iter().any(|v| v.contains("power of two")));
    }

    #[test]
    fn snapshot_defaults_cover_start_middle_end() {
        let cfg = ScenarioConfig::default();
        assert_eq!(cfg.snapshot_times(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn level_matches_mode_count() {
        let cfg = ScenarioConfig {
            k: 8,
            ..ScenarioConfig::default()
        };
        assert_eq!(cfg.level(), 3);
    }

    #[test]
    fn mean_initial_density_of_the_shock_case() {
        let cfg = ScenarioConfig::shock();
        let mean = cfg.mean_initial_density().unwrap();
        // left mean 0.3 on half the domain, right 0.75 on the other half
        assert!((mean - 0.525).abs() < 1e-12);
    }
}
