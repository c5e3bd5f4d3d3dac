//! Finite-volume solver for the Galerkin-expanded kinetic relaxation model
//! in the Lagrangian velocity variable `w = v + h(rho)`.
//!
//! The discretization in `w` is a static uniform grid anchored at a
//! reference density, padded so that equilibrium mass shifted by any
//! admissible density stays interior. Equilibrium mass that falls between
//! grid nodes is split over the bracketing pair so that both the mass and
//! the flux moment of the placed distribution are exact
//! ([`MaxwellianPlacement::TwoNodeSplit`]); nearest-node placement is kept
//! as an alternative that conserves mass only.
//!
//! Transport upwinds each characteristic channel of the random parameter
//! separately (the shared eigenbasis of the Galerkin matrices makes the
//! channels independent); the relaxation source is integrated exactly and
//! preserves the density coefficients cell by cell.

use crate::basis::HaarBasis;
use crate::error::{Error, Result};
use crate::gpc::GalerkinTensor;
use crate::mesh::{Boundary, Mesh};
use crate::physics::{h, maxwellian_weights, PhysicsParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaxwellianPlacement {
    /// Split each equilibrium weight over the two bracketing grid nodes,
    /// preserving mass and the first `w`-moment exactly.
    #[default]
    TwoNodeSplit,
    /// Drop each weight on the nearest grid node (mass only).
    NearestNode,
}

/// Static uniform grid in the Lagrangian velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct WGrid {
    pub nodes: Vec<f64>,
    pub spacing: f64,
}

impl WGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn first(&self) -> f64 {
        self.nodes[0]
    }
}

#[derive(Debug, Clone)]
pub struct KineticOptions {
    pub cfl: f64,
    pub boundary: Boundary,
    /// Relaxation rate; `None` disables the source.
    pub epsilon: Option<f64>,
    pub placement: MaxwellianPlacement,
    /// Anchor density of the static grid; defaults to the mean initial
    /// density when states are built from initial data.
    pub rho_ref: f64,
    /// Density range the padding must cover.
    pub pad_range: (f64, f64),
}

impl Default for KineticOptions {
    fn default() -> Self {
        Self {
            cfl: 0.45,
            boundary: Boundary::Outflow,
            epsilon: Some(1e-2),
            placement: MaxwellianPlacement::default(),
            rho_ref: 0.5,
            pad_range: (0.0, 1.0),
        }
    }
}

/// Distribution coefficients indexed by (cell, grid velocity, mode).
#[derive(Debug, Clone)]
pub struct KineticState {
    pub mesh: Mesh,
    pub n_modes: usize,
    pub w: WGrid,
    pub time: f64,
    /// `g[(c * n_w + j) * n_modes + i]`
    pub g: Vec<f64>,
}

impl KineticState {
    pub fn slot(&self, c: usize, j: usize) -> &[f64] {
        let n = self.n_modes;
        let base = (c * self.w.len() + j) * n;
        &self.g[base..base + n]
    }

    /// Modal density per cell: zeroth `w`-moment.
    pub fn rho_modal(&self) -> Vec<f64> {
        let n = self.n_modes;
        let nw = self.w.len();
        let mut rho = vec![0.0; self.mesh.n_cells * n];
        for c in 0..self.mesh.n_cells {
            for j in 0..nw {
                let base = (c * nw + j) * n;
                for i in 0..n {
                    rho[c * n + i] += self.g[base + i];
                }
            }
        }
        rho
    }

    /// Modal flux per cell: first `w`-moment.
    pub fn q_modal(&self) -> Vec<f64> {
        let n = self.n_modes;
        let nw = self.w.len();
        let mut q = vec![0.0; self.mesh.n_cells * n];
        for c in 0..self.mesh.n_cells {
            for j in 0..nw {
                let base = (c * nw + j) * n;
                let wj = self.w.nodes[j];
                for i in 0..n {
                    q[c * n + i] += wj * self.g[base + i];
                }
            }
        }
        q
    }

    /// Mass of one density mode.
    pub fn total_mass(&self, mode: usize) -> f64 {
        let rho = self.rho_modal();
        (0..self.mesh.n_cells)
            .map(|c| rho[c * self.n_modes + mode])
            .sum::<f64>()
            * self.mesh.dx
    }
}

/// Running minimum of the nodal reconstructions of the distribution;
/// negative undershoots are reported, never clamped.
#[derive(Debug, Clone, Copy, Default)]
pub struct PositivityMonitor {
    pub min_value: f64,
    pub violations: usize,
}

impl PositivityMonitor {
    pub fn observe(&mut self, value: f64) {
        if value < self.min_value {
            self.min_value = value;
        }
        if value < -1e-12 {
            self.violations += 1;
        }
    }
}

#[derive(Debug)]
pub struct KineticRun {
    /// Moment snapshots `(time, rho_modal, q_modal)`.
    pub snapshots: Vec<(f64, Vec<f64>, Vec<f64>)>,
    pub monitor: PositivityMonitor,
    pub steps: usize,
}

pub struct KineticSolver {
    pub basis: HaarBasis,
    pub params: PhysicsParams,
    pub opts: KineticOptions,
}

impl KineticSolver {
    pub fn new(basis: HaarBasis, params: PhysicsParams, opts: KineticOptions) -> Self {
        Self {
            basis,
            params,
            opts,
        }
    }

    /// Static grid `w_j = v_j + h(rho_ref)`, extended with uniformly spaced
    /// padding nodes until every admissible shift stays interior.
    pub fn w_grid(&self) -> WGrid {
        let gamma = self.params.gamma;
        let spacing = self.params.v_max / (self.params.n_v - 1) as f64;
        let href = h(self.opts.rho_ref, gamma);
        let (lo, hi) = self.opts.pad_range;
        let h_lo = h(lo.max(0.0), gamma);
        let h_hi = h(hi.min(self.params.rho_max), gamma);
        let pad_down = ((href - h_lo) / spacing).ceil().max(0.0) as usize;
        let pad_up = ((h_hi - href) / spacing).ceil().max(0.0) as usize;
        let n_w = self.params.n_v + pad_down + pad_up;
        let start = href - (pad_down as f64) * spacing;
        WGrid {
            nodes: (0..n_w).map(|k| start + k as f64 * spacing).collect(),
            spacing,
        }
    }

    /// Equilibrium mass of density `rho` placed on the static grid.
    pub fn maxwellian_on_grid(&self, w: &WGrid, rho: f64) -> Result<Vec<f64>> {
        let weights = maxwellian_weights(rho, &self.params)?;
        let velocities = self.params.velocities();
        let shift = h(rho, self.params.gamma);
        let mut out = vec![0.0; w.len()];
        for (f, v) in weights.iter().zip(&velocities) {
            if *f == 0.0 {
                continue;
            }
            let pos = v + shift;
            let t = (pos - w.first()) / w.spacing;
            match self.opts.placement {
                MaxwellianPlacement::NearestNode => {
                    let k = (t.round().max(0.0) as usize).min(w.len() - 1);
                    out[k] += f;
                }
                MaxwellianPlacement::TwoNodeSplit => {
                    let k = (t.floor().max(0.0) as usize).min(w.len() - 1);
                    if k + 1 >= w.len() {
                        out[k] += f;
                    } else {
                        let theta = ((pos - w.nodes[k]) / w.spacing).clamp(0.0, 1.0);
                        out[k] += f * (1.0 - theta);
                        out[k + 1] += f * theta;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Modal coefficients of the projected equilibrium for one cell:
    /// `maxw[j * n_modes + i]` built from the nodal densities.
    pub fn projected_maxwellian(&self, w: &WGrid, rho_nodal: &[f64]) -> Result<Vec<f64>> {
        let n = self.basis.len();
        let nw = w.len();
        let mut nodal = vec![0.0; nw * n]; // [j * n + nu]
        for (nu, &r) in rho_nodal.iter().enumerate() {
            let placed = self.maxwellian_on_grid(w, r)?;
            for j in 0..nw {
                nodal[j * n + nu] = placed[j];
            }
        }
        let mut modal = vec![0.0; nw * n];
        for j in 0..nw {
            let row = self.basis.modal_from_nodal(&nodal[j * n..(j + 1) * n]);
            modal[j * n..(j + 1) * n].copy_from_slice(&row);
        }
        Ok(modal)
    }

    /// State initialized at the projected equilibrium of a density field.
    pub fn init_equilibrium(
        &self,
        mesh: Mesh,
        rho_field: impl Fn(f64, f64) -> f64,
    ) -> Result<KineticState> {
        let w = self.w_grid();
        let n = self.basis.len();
        let nw = w.len();
        let mut g = vec![0.0; mesh.n_cells * nw * n];
        let mut rho_nodal = vec![0.0; n];
        for c in 0..mesh.n_cells {
            let x = mesh.center(c);
            for nu in 0..n {
                rho_nodal[nu] = rho_field(x, self.basis.node(nu));
            }
            let maxw = self.projected_maxwellian(&w, &rho_nodal)?;
            g[c * nw * n..(c + 1) * nw * n].copy_from_slice(&maxw);
        }
        Ok(KineticState {
            mesh,
            n_modes: n,
            w,
            time: 0.0,
            g,
        })
    }

    /// Equilibrium state whose flux moment is then corrected to the given
    /// field by a two-node adjustment at the grid ends; mass moments stay
    /// untouched, so both moments match the prescribed data exactly.
    pub fn init_with_moments(
        &self,
        mesh: Mesh,
        rho_field: impl Fn(f64, f64) -> f64,
        q_field: impl Fn(f64, f64) -> f64,
    ) -> Result<KineticState> {
        let mut state = self.init_equilibrium(mesh, &rho_field)?;
        let n = self.basis.len();
        let nw = state.w.len();
        let span = state.w.nodes[nw - 1] - state.w.nodes[0];
        for c in 0..mesh.n_cells {
            let x = mesh.center(c);
            // current nodal flux moment
            let mut q_now = vec![0.0; n];
            for j in 0..nw {
                let wj = state.w.nodes[j];
                let nodal = self.basis.nodal_from_modal(state.slot(c, j));
                for nu in 0..n {
                    q_now[nu] += wj * nodal[nu];
                }
            }
            let mut delta_lo = vec![0.0; n];
            let mut delta_hi = vec![0.0; n];
            for nu in 0..n {
                let want = q_field(x, self.basis.node(nu));
                let d = (want - q_now[nu]) / span;
                delta_hi[nu] = d;
                delta_lo[nu] = -d;
            }
            let lo_modal = self.basis.modal_from_nodal(&delta_lo);
            let hi_modal = self.basis.modal_from_nodal(&delta_hi);
            let base_lo = (c * nw) * n;
            let base_hi = (c * nw + nw - 1) * n;
            for i in 0..n {
                state.g[base_lo + i] += lo_modal[i];
                state.g[base_hi + i] += hi_modal[i];
            }
        }
        Ok(state)
    }

    /// Nodal densities per cell, `rho_nodal[c * n + nu]`.
    fn nodal_densities(&self, state: &KineticState) -> Vec<f64> {
        let n = self.basis.len();
        let rho = state.rho_modal();
        let mut out = vec![0.0; state.mesh.n_cells * n];
        for c in 0..state.mesh.n_cells {
            let nodal = self.basis.nodal_from_modal(&rho[c * n..(c + 1) * n]);
            out[c * n..(c + 1) * n].copy_from_slice(&nodal);
        }
        out
    }

    /// Largest characteristic speed `|w_j - h(rho)|` over the state.
    pub fn max_speed(&self, state: &KineticState) -> Result<f64> {
        let n = self.basis.len();
        let rho_nodal = self.nodal_densities(state);
        let gamma = self.params.gamma;
        let mut speed: f64 = 0.0;
        for c in 0..state.mesh.n_cells {
            for nu in 0..n {
                let r = rho_nodal[c * n + nu];
                if !(0.0..=self.params.rho_max).contains(&r) {
                    return Err(Error::StateOutOfRange {
                        cell: c,
                        rho: r,
                        rho_max: self.params.rho_max,
                    });
                }
                let hr = h(r, gamma);
                for wj in &state.w.nodes {
                    speed = speed.max((wj - hr).abs());
                }
            }
        }
        Ok(speed)
    }

    pub fn stable_dt(&self, state: &KineticState) -> Result<f64> {
        Ok(self.opts.cfl * state.mesh.dx / self.max_speed(state)?.max(1e-300))
    }

    /// One step: per-channel upwind transport of every `w`-slice, then the
    /// exact exponential relaxation toward the projected equilibrium. The
    /// relaxation preserves the density coefficients cell by cell.
    pub fn step(
        &self,
        state: &mut KineticState,
        dt: f64,
        monitor: &mut PositivityMonitor,
    ) -> Result<()> {
        let n = self.basis.len();
        let nw = state.w.len();
        let cells = state.mesh.n_cells;
        let gamma = self.params.gamma;

        let rho_nodal = self.nodal_densities(state);
        let max_speed = {
            let mut s: f64 = 0.0;
            for c in 0..cells {
                for nu in 0..n {
                    let r = rho_nodal[c * n + nu];
                    if !(0.0..=self.params.rho_max).contains(&r) {
                        return Err(Error::StateOutOfRange {
                            cell: c,
                            rho: r,
                            rho_max: self.params.rho_max,
                        });
                    }
                    let hr = h(r, gamma);
                    for wj in &state.w.nodes {
                        s = s.max((wj - hr).abs());
                    }
                }
            }
            s
        };
        let dt_max = self.opts.cfl * state.mesh.dx / max_speed.max(1e-300);
        if dt > dt_max * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, dt_max });
        }

        // nodal hesitation per cell
        let mut h_nodal = vec![0.0; cells * n];
        for (dst, r) in h_nodal.iter_mut().zip(&rho_nodal) {
            *dst = h(*r, gamma);
        }

        let lam = dt / state.mesh.dx;
        let neighbor = |c: isize| -> usize {
            if c < 0 {
                self.opts.boundary.left_ghost(cells)
            } else if c as usize >= cells {
                self.opts.boundary.right_ghost(cells)
            } else {
                c as usize
            }
        };

        // transport each w-slice in its decoupled nodal channels
        let mut slice_nodal = vec![0.0; cells * n];
        for j in 0..nw {
            let wj = state.w.nodes[j];
            for c in 0..cells {
                let base = (c * nw + j) * n;
                let nodal = self.basis.nodal_from_modal(&state.g[base..base + n]);
                slice_nodal[c * n..(c + 1) * n].copy_from_slice(&nodal);
            }
            let mut updated = slice_nodal.clone();
            for iface in 0..=cells {
                let left = neighbor(iface as isize - 1);
                let right = neighbor(iface as isize);
                for nu in 0..n {
                    let a_left = wj - h_nodal[left * n + nu];
                    let a_right = wj - h_nodal[right * n + nu];
                    let a = 0.5 * (a_left + a_right);
                    let flux = if a >= 0.0 {
                        a * slice_nodal[left * n + nu]
                    } else {
                        a * slice_nodal[right * n + nu]
                    };
                    if iface > 0 {
                        updated[(iface - 1) * n + nu] -= lam * flux;
                    }
                    if iface < cells {
                        updated[iface * n + nu] += lam * flux;
                    }
                }
            }
            for c in 0..cells {
                let base = (c * nw + j) * n;
                let modal = self.basis.modal_from_nodal(&updated[c * n..(c + 1) * n]);
                state.g[base..base + n].copy_from_slice(&modal);
            }
        }

        if let Some(eps) = self.opts.epsilon {
            let decay = (-dt / eps).exp();
            let rho_nodal = self.nodal_densities(state);
            let mut cell_nodal = vec![0.0; nw * n];
            for c in 0..cells {
                for j in 0..nw {
                    let base = (c * nw + j) * n;
                    let nodal = self.basis.nodal_from_modal(&state.g[base..base + n]);
                    cell_nodal[j * n..(j + 1) * n].copy_from_slice(&nodal);
                }
                for nu in 0..n {
                    let r = rho_nodal[c * n + nu];
                    if !(0.0..=self.params.rho_max).contains(&r) {
                        return Err(Error::StateOutOfRange {
                            cell: c,
                            rho: r,
                            rho_max: self.params.rho_max,
                        });
                    }
                    let placed = self.maxwellian_on_grid(&state.w, r)?;
                    for j in 0..nw {
                        let g_nu = &mut cell_nodal[j * n + nu];
                        *g_nu = placed[j] + (*g_nu - placed[j]) * decay;
                        monitor.observe(*g_nu);
                    }
                }
                for j in 0..nw {
                    let base = (c * nw + j) * n;
                    let modal = self.basis.modal_from_nodal(&cell_nodal[j * n..(j + 1) * n]);
                    state.g[base..base + n].copy_from_slice(&modal);
                }
            }
        }
        state.time += dt;
        Ok(())
    }

    /// Reference transport step through dense matrices
    /// `A = w Id - P(h(rho))` split in the shared eigenbasis. Exists to
    /// cross-check the per-channel route; the two agree to rounding.
    pub fn transport_step_matrix(
        &self,
        tensor: &GalerkinTensor,
        state: &KineticState,
        dt: f64,
    ) -> Result<KineticState> {
        let n = self.basis.len();
        let nw = state.w.len();
        let cells = state.mesh.n_cells;
        let gamma = self.params.gamma;
        let rho_nodal = self.nodal_densities(state);
        let mut h_nodal = vec![0.0; cells * n];
        for (dst, r) in h_nodal.iter_mut().zip(&rho_nodal) {
            *dst = h(*r, gamma);
        }
        let v = tensor.eigenvectors();
        let lam = dt / state.mesh.dx;
        let neighbor = |c: isize| -> usize {
            if c < 0 {
                self.opts.boundary.left_ghost(cells)
            } else if c as usize >= cells {
                self.opts.boundary.right_ghost(cells)
            } else {
                c as usize
            }
        };
        let mut out = state.clone();
        for j in 0..nw {
            let wj = state.w.nodes[j];
            for iface in 0..=cells {
                let left = neighbor(iface as isize - 1);
                let right = neighbor(iface as isize);
                // split matrices A+ and A- from the interface channel speeds
                let mut a_plus = vec![0.0; n * n];
                let mut a_minus = vec![0.0; n * n];
                for nu in 0..n {
                    let a = 0.5 * ((wj - h_nodal[left * n + nu]) + (wj - h_nodal[right * n + nu]));
                    let (p, m) = if a >= 0.0 { (a, 0.0) } else { (0.0, a) };
                    for r in 0..n {
                        for ccol in 0..n {
                            a_plus[r * n + ccol] += v[r * n + nu] * p * v[ccol * n + nu];
                            a_minus[r * n + ccol] += v[r * n + nu] * m * v[ccol * n + nu];
                        }
                    }
                }
                let gl = state.slot(left, j);
                let gr = state.slot(right, j);
                for i in 0..n {
                    let mut flux = 0.0;
                    for k in 0..n {
                        flux += a_plus[i * n + k] * gl[k] + a_minus[i * n + k] * gr[k];
                    }
                    if iface > 0 {
                        out.g[((iface - 1) * nw + j) * n + i] -= lam * flux;
                    }
                    if iface < cells {
                        out.g[(iface * nw + j) * n + i] += lam * flux;
                    }
                }
            }
        }
        out.time += dt;
        Ok(out)
    }

    /// March to `t_final`, recording moment snapshots at the requested
    /// times.
    pub fn run(
        &self,
        mut state: KineticState,
        t_final: f64,
        snapshot_times: &[f64],
    ) -> Result<KineticRun> {
        let mut run = KineticRun {
            snapshots: Vec::new(),
            monitor: PositivityMonitor::default(),
            steps: 0,
        };
        let mut pending: Vec<f64> = snapshot_times.to_vec();
        pending.sort_by(f64::total_cmp);
        let mut next_snap = 0;
        while next_snap < pending.len() && pending[next_snap] <= state.time + 1e-12 {
            run.snapshots
                .push((state.time, state.rho_modal(), state.q_modal()));
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
            self.step(&mut state, dt, &mut run.monitor)?;
            run.steps += 1;
            while next_snap < pending.len() && pending[next_snap] <= state.time + 1e-12 {
                run.snapshots
                    .push((state.time, state.rho_modal(), state.q_modal()));
                next_snap += 1;
            }
        }
        Ok(run)
    }
}
