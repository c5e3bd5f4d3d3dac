//! Finite-volume solver for the Galerkin-expanded second-order traffic
//! system with stiff relaxation.
//!
//! The state carries modal coefficients of density and generalized flux
//! per cell. All nonlinear flux evaluations run through nodal values on
//! the dyadic grid of the random parameter; for the Haar basis this is
//! exact and coincides with the Galerkin-matrix form of the flux
//! (`flux_matrix_form` keeps the matrix route alive for cross-checks).
//! The homogeneous part uses a local Lax-Friedrichs flux with the
//! dissipation coefficient taken as the larger of the two adjacent cell
//! wave speeds; the relaxation source is integrated exactly, which keeps
//! the scheme robust for stiff relaxation rates.

use crate::basis::HaarBasis;
use crate::error::{Error, Result};
use crate::gpc::{self, GalerkinTensor, GpcVector};
use crate::mesh::{Boundary, Mesh};
use crate::physics::{h, hesitation_derivative, maxwellian_moment, v_eq, PhysicsParams};

/// Modal density/flux coefficients per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub mesh: Mesh,
    pub n_modes: usize,
    pub time: f64,
    /// `rho[c * n_modes + i]`
    pub rho: Vec<f64>,
    /// `q[c * n_modes + i]`
    pub q: Vec<f64>,
}

impl FluidState {
    pub fn new(mesh: Mesh, n_modes: usize, rho: Vec<f64>, q: Vec<f64>) -> Self {
        assert_eq!(rho.len(), mesh.n_cells * n_modes);
        assert_eq!(q.len(), mesh.n_cells * n_modes);
        Self {
            mesh,
            n_modes,
            time: 0.0,
            rho,
            q,
        }
    }

    pub fn rho_cell(&self, c: usize) -> &[f64] {
        &self.rho[c * self.n_modes..(c + 1) * self.n_modes]
    }

    pub fn q_cell(&self, c: usize) -> &[f64] {
        &self.q[c * self.n_modes..(c + 1) * self.n_modes]
    }

    /// Total mass of one density mode, `sum_c rho_i(c) dx`.
    pub fn total_mass(&self, mode: usize) -> f64 {
        (0..self.mesh.n_cells)
            .map(|c| self.rho[c * self.n_modes + mode])
            .sum::<f64>()
            * self.mesh.dx
    }
}

/// Equilibrium velocity used by the relaxation target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EquilibriumVelocity {
    /// `V_eq = 1 - 2 rho`.
    #[default]
    Linear,
    /// Mean speed of the discrete equilibrium distribution,
    /// `U(rho) = m_1(rho) / rho`; consistent with the kinetic relaxation
    /// target, which makes the two levels of description share their
    /// equilibrium flux.
    MaxwellianConsistent,
}

impl EquilibriumVelocity {
    pub fn eval(&self, rho: f64, params: &PhysicsParams) -> f64 {
        match self {
            EquilibriumVelocity::Linear => v_eq(rho),
            EquilibriumVelocity::MaxwellianConsistent => {
                if rho <= 1e-300 {
                    return params.v_max;
                }
                let r = rho.min(params.rho_max);
                let m1 = maxwellian_moment(1, r, params).expect("density in range");
                m1 / r
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ArzOptions {
    pub cfl: f64,
    pub boundary: Boundary,
    /// Relaxation rate; `None` disables the source.
    pub epsilon: Option<f64>,
    pub eq_velocity: EquilibriumVelocity,
}

impl Default for ArzOptions {
    fn default() -> Self {
        Self {
            cfl: 0.45,
            boundary: Boundary::Outflow,
            epsilon: Some(1e-2),
            eq_velocity: EquilibriumVelocity::Linear,
        }
    }
}

/// One density-positivity audit entry per recorded snapshot.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolicityAudit {
    pub time: f64,
    pub min_nodal_density: f64,
    pub hyperbolic: bool,
}

#[derive(Debug)]
pub struct ArzRun {
    pub snapshots: Vec<FluidState>,
    pub audits: Vec<HyperbolicityAudit>,
    pub steps: usize,
}

pub struct ArzSolver {
    pub basis: HaarBasis,
    pub params: PhysicsParams,
    pub opts: ArzOptions,
}

impl ArzSolver {
    pub fn new(basis: HaarBasis, params: PhysicsParams, opts: ArzOptions) -> Self {
        Self {
            basis,
            params,
            opts,
        }
    }

    /// Physical flux of one cell, computed nodally (exact for Haar):
    /// per node `(q - h(r) r, q^2 / r - h(r) q)`, then back to modal
    /// coefficients. Fails on non-positive nodal density.
    pub fn flux_modal(&self, rho: &[f64], q: &[f64], cell: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.basis.len();
        let rn = self.basis.nodal_from_modal(rho);
        let qn = self.basis.nodal_from_modal(q);
        let mut fr = vec![0.0; n];
        let mut fq = vec![0.0; n];
        for nu in 0..n {
            let r = rn[nu];
            if r <= 0.0 {
                return Err(Error::Vacuum { cell, rho: r });
            }
            let hv = h(r, self.params.gamma);
            fr[nu] = qn[nu] - hv * r;
            fq[nu] = qn[nu] * qn[nu] / r - hv * qn[nu];
        }
        Ok((
            self.basis.modal_from_nodal(&fr),
            self.basis.modal_from_nodal(&fq),
        ))
    }

    /// The same flux through the Galerkin matrices,
    /// `(q - P(h) rho, P(q) P(rho)^{-1} q - P(h) q)`, with a dense linear
    /// solve for the inverse. Kept as the independent algebraic route;
    /// agrees with `flux_modal` to rounding for the Haar basis.
    pub fn flux_matrix_form(
        &self,
        tensor: &GalerkinTensor,
        rho: &[f64],
        q: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = tensor.len();
        let gamma = self.params.gamma;
        let rho_v = GpcVector::new(rho.to_vec());
        let q_v = GpcVector::new(q.to_vec());
        let h_of_rho = gpc::project_nonlinear(|x| h(x, gamma), &rho_v, &self.basis)?;
        let p_h = tensor.galerkin_matrix(&h_of_rho)?;
        let p_rho = tensor.galerkin_matrix(&rho_v)?;
        let p_q = tensor.galerkin_matrix(&q_v)?;
        let inv_q = gpc::solve_dense(&p_rho, q, n).ok_or(Error::Vacuum { cell: 0, rho: 0.0 })?;
        let mut fr = vec![0.0; n];
        let mut fq = vec![0.0; n];
        for i in 0..n {
            let mut acc_r = 0.0;
            let mut acc_q1 = 0.0;
            let mut acc_q2 = 0.0;
            for j in 0..n {
                acc_r += p_h[i * n + j] * rho[j];
                acc_q1 += p_q[i * n + j] * inv_q[j];
                acc_q2 += p_h[i * n + j] * q[j];
            }
            fr[i] = q[i] - acc_r;
            fq[i] = acc_q1 - acc_q2;
        }
        Ok((fr, fq))
    }

    /// Largest characteristic speed over the nodal systems of one cell:
    /// `max(|v|, |v - r h'(r)|)` with `v = q/r - h(r)`.
    fn cell_wave_speed(&self, rho_nodal: &[f64], q_nodal: &[f64], cell: usize) -> Result<f64> {
        let gamma = self.params.gamma;
        let mut speed: f64 = 0.0;
        for (r, q) in rho_nodal.iter().zip(q_nodal) {
            if *r <= 0.0 {
                return Err(Error::Vacuum { cell, rho: *r });
            }
            let v = q / r - h(*r, gamma);
            let lambda1 = v - r * hesitation_derivative(*r, gamma);
            speed = speed.max(v.abs()).max(lambda1.abs());
        }
        Ok(speed)
    }

    /// Largest wave speed over the whole state.
    pub fn max_wave_speed(&self, state: &FluidState) -> Result<f64> {
        let mut speed: f64 = 0.0;
        for c in 0..state.mesh.n_cells {
            let rn = self.basis.nodal_from_modal(state.rho_cell(c));
            let qn = self.basis.nodal_from_modal(state.q_cell(c));
            speed = speed.max(self.cell_wave_speed(&rn, &qn, c)?);
        }
        Ok(speed)
    }

    /// Largest stable time step at the configured CFL number.
    pub fn stable_dt(&self, state: &FluidState) -> Result<f64> {
        Ok(self.opts.cfl * state.mesh.dx / self.max_wave_speed(state)?.max(1e-300))
    }

    /// Nodal relaxation target `r (V_eq(r) + h(r))`.
    pub fn equilibrium_target(&self, rho_nodal: &[f64]) -> Vec<f64> {
        rho_nodal
            .iter()
            .map(|&r| r * (self.opts.eq_velocity.eval(r, &self.params) + h(r, self.params.gamma)))
            .collect()
    }

    /// Modal equilibrium flux for a cell (projection of the nodal target).
    pub fn equilibrium_q_modal(&self, rho: &[f64]) -> Vec<f64> {
        let rn = self.basis.nodal_from_modal(rho);
        self.basis.modal_from_nodal(&self.equilibrium_target(&rn))
    }

    /// One step: local Lax-Friedrichs transport, then the exact
    /// exponential relaxation of the flux toward its equilibrium target.
    /// The density is untouched by the source.
    pub fn step(&self, state: &mut FluidState, dt: f64) -> Result<()> {
        let n = self.basis.len();
        let cells = state.mesh.n_cells;
        let mut flux_r = vec![0.0; cells * n];
        let mut flux_q = vec![0.0; cells * n];
        let mut speeds = vec![0.0; cells];
        for c in 0..cells {
            let rn = self.basis.nodal_from_modal(state.rho_cell(c));
            let qn = self.basis.nodal_from_modal(state.q_cell(c));
            speeds[c] = self.cell_wave_speed(&rn, &qn, c)?;
            let gamma = self.params.gamma;
            let mut fr = vec![0.0; n];
            let mut fq = vec![0.0; n];
            for nu in 0..n {
                let (r, q) = (rn[nu], qn[nu]);
                let hv = h(r, gamma);
                fr[nu] = q - hv * r;
                fq[nu] = q * q / r - hv * q;
            }
            flux_r[c * n..(c + 1) * n].copy_from_slice(&self.basis.modal_from_nodal(&fr));
            flux_q[c * n..(c + 1) * n].copy_from_slice(&self.basis.modal_from_nodal(&fq));
        }

        let max_speed = speeds.iter().cloned().fold(0.0f64, f64::max);
        let dt_max = self.opts.cfl * state.mesh.dx / max_speed.max(1e-300);
        if dt > dt_max * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, dt_max });
        }

        // interface fluxes: hat F = (F_L + F_R)/2 - alpha (U_R - U_L)/2
        let lam = dt / state.mesh.dx;
        let mut new_rho = state.rho.clone();
        let mut new_q = state.q.clone();
        let neighbor = |c: isize| -> usize {
            if c < 0 {
                self.opts.boundary.left_ghost(cells)
            } else if c as usize >= cells {
                self.opts.boundary.right_ghost(cells)
            } else {
                c as usize
            }
        };
        for iface in 0..=cells {
            let left = neighbor(iface as isize - 1);
            let right = neighbor(iface as isize);
            let alpha = speeds[left].max(speeds[right]);
            for i in 0..n {
                let fr_hat = 0.5 * (flux_r[left * n + i] + flux_r[right * n + i])
                    - 0.5 * alpha * (state.rho[right * n + i] - state.rho[left * n + i]);
                let fq_hat = 0.5 * (flux_q[left * n + i] + flux_q[right * n + i])
                    - 0.5 * alpha * (state.q[right * n + i] - state.q[left * n + i]);
                if iface > 0 {
                    let c = iface - 1;
                    new_rho[c * n + i] -= lam * fr_hat;
                    new_q[c * n + i] -= lam * fq_hat;
                }
                if iface < cells {
                    let c = iface;
                    new_rho[c * n + i] += lam * fr_hat;
                    new_q[c * n + i] += lam * fq_hat;
                }
            }
        }
        state.rho = new_rho;
        state.q = new_q;

        if let Some(eps) = self.opts.epsilon {
            let decay = (-dt / eps).exp();
            for c in 0..cells {
                let rn = self.basis.nodal_from_modal(state.rho_cell(c));
                let mut qn = self.basis.nodal_from_modal(state.q_cell(c));
                let target = self.equilibrium_target(&rn);
                for nu in 0..n {
                    qn[nu] = target[nu] + (qn[nu] - target[nu]) * decay;
                }
                state.q[c * n..(c + 1) * n].copy_from_slice(&self.basis.modal_from_nodal(&qn));
            }
        }
        state.time += dt;
        Ok(())
    }

    fn audit(&self, state: &FluidState) -> HyperbolicityAudit {
        let mut min_density = f64::INFINITY;
        for c in 0..state.mesh.n_cells {
            let rn = self.basis.nodal_from_modal(state.rho_cell(c));
            for r in rn {
                min_density = min_density.min(r);
            }
        }
        HyperbolicityAudit {
            time: state.time,
            min_nodal_density: min_density,
            hyperbolic: min_density > 0.0,
        }
    }

    /// March to `t_final`, recording snapshots at the requested times
    /// (which must be sorted; `0.0` records the initial state). Each
    /// snapshot is audited for nodal density positivity.
    pub fn run(&self, mut state: FluidState, t_final: f64, snapshot_times: &[f64]) -> Result<ArzRun> {
        let mut run = ArzRun {
            snapshots: Vec::new(),
            audits: Vec::new(),
            steps: 0,
        };
        let mut pending: Vec<f64> = snapshot_times.to_vec();
        pending.sort_by(f64::total_cmp);
        let record = |state: &FluidState, run: &mut ArzRun| {
            run.audits.push(self.audit(state));
            run.snapshots.push(state.clone());
        };
        let mut next_snap = 0;
        while next_snap < pending.len() && pending[next_snap] <= state.time + 1e-12 {
            record(&state, &mut run);
            next_snap += 1;
        }
        while state.time < t_final - 1e-12 {
            let mut dt = self.stable_dt(&state)?;
            let mut target = t_final;
            if next_snap < pending.len() {
                target = target.min(pending[next_snap]);
            }
            if state.time + dt > target {
                dt = target - state.time;
            }
            self.step(&mut state, dt)?;
            run.steps += 1;
            while next_snap < pending.len() && pending[next_snap] <= state.time + 1e-12 {
                record(&state, &mut run);
                next_snap += 1;
            }
        }
        Ok(run)
    }
}
