//! Effective diffusion coefficient of the relaxation limit and the
//! probability that it is non-positive over the random parameter.
//!
//! The coefficient combines an algebraic part built from the equilibrium
//! flux and the hesitation function with the density derivative of the
//! second velocity moment of the equilibrium distribution. Regions where
//! it turns non-positive flag traffic regimes prone to stop-and-go waves.
//!
//! Two readings are selectable where the closure leaves slack:
//! the equilibrium flux entering the formula ([`QeqSource`], defaulting
//! to the first moment of the discrete equilibrium, which is the premise
//! under which the simplified coefficient is derived), and the grouping
//! of the leading term ([`Precedence`], defaulting to the squared
//! derivative, which matches the closed-form specialization below).
//! States where the coefficient is exactly zero (one-point equilibria in
//! congestion) are classified by [`TieRule`]; the default counts them as
//! stable so that degenerate marginal states do not flag risk.

use crate::arz::FluidState;
use crate::basis::HaarBasis;
use crate::error::{Error, Result};
use crate::gpc::{project_nonlinear, GalerkinTensor, GpcVector};
use crate::physics::{
    h, hesitation_derivative, maxwellian_moment, maxwellian_moment_drho, q_eq, PhysicsParams,
    DEFAULT_FD_DELTA,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QeqSource {
    /// Equilibrium flux taken as the first moment of the discrete
    /// equilibrium distribution (consistent with the kinetic closure).
    #[default]
    MaxwellianMoment,
    /// Analytic linear closure `Q_eq = rho (1 - 2 rho)`.
    LinearVelocity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precedence {
    /// Leading term `-(d Q_eq / d rho)^2`.
    #[default]
    SquaredDerivative,
    /// Alternative grouping `-d(Q_eq^2)/d rho`, kept for auditing.
    DerivativeOfSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    /// A vanishing coefficient is classified stable.
    #[default]
    Stable,
    /// A vanishing coefficient counts toward the instability probability.
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuOptions {
    pub q_eq: QeqSource,
    pub precedence: Precedence,
    pub tie: TieRule,
    pub fd_delta: f64,
}

impl Default for MuOptions {
    fn default() -> Self {
        Self {
            q_eq: QeqSource::default(),
            precedence: Precedence::default(),
            tie: TieRule::default(),
            fd_delta: DEFAULT_FD_DELTA,
        }
    }
}

/// Samples of the diffusion coefficient along a density profile together
/// with the resulting instability probability.
#[derive(Debug, Clone)]
pub struct MuEvaluation {
    pub rho_samples: Vec<f64>,
    pub mu_values: Vec<f64>,
    pub probability: f64,
}

fn q_and_derivative(rho: f64, params: &PhysicsParams, opts: &MuOptions) -> Result<(f64, f64)> {
    match opts.q_eq {
        QeqSource::LinearVelocity => Ok((q_eq(rho), 1.0 - 4.0 * rho)),
        QeqSource::MaxwellianMoment => {
            let q = maxwellian_moment(1, rho, params)?;
            let dq = maxwellian_moment_drho(1, rho, params, opts.fd_delta)?;
            Ok((q, dq))
        }
    }
}

/// Effective diffusion coefficient at a single density.
pub fn mu(rho: f64, params: &PhysicsParams, opts: &MuOptions) -> Result<f64> {
    if !(rho > 0.0 && rho < params.rho_max) {
        return Err(Error::DensityOutOfRange {
            rho,
            rho_max: params.rho_max,
        });
    }
    let (q, dq) = q_and_derivative(rho, params, opts)?;
    let dh = hesitation_derivative(rho, params.gamma);
    let algebraic = match opts.precedence {
        Precedence::SquaredDerivative => -dq * dq - dh * dq * rho + q * dh,
        Precedence::DerivativeOfSquare => -2.0 * q * dq - dh * dq * rho + q * dh,
    };
    let kinetic = maxwellian_moment_drho(2, rho, params, opts.fd_delta)?;
    Ok(algebraic + kinetic)
}

/// Indicator of the event "coefficient non-positive" with the configured
/// treatment of exact zeros.
pub fn is_nonpositive(mu_value: f64, tie: TieRule) -> bool {
    if mu_value < 0.0 {
        return true;
    }
    mu_value == 0.0 && tie == TieRule::Unstable
}

/// Instability probability of a density profile over the random
/// parameter, by midpoint quadrature with `n_xi` nodes.
pub fn probability_mu_nonpositive(
    rho_of_xi: impl Fn(f64) -> f64,
    params: &PhysicsParams,
    n_xi: usize,
    opts: &MuOptions,
) -> Result<f64> {
    Ok(mu_evaluation(rho_of_xi, params, n_xi, opts)?.probability)
}

/// Full evaluation: density samples, coefficient samples, probability.
pub fn mu_evaluation(
    rho_of_xi: impl Fn(f64) -> f64,
    params: &PhysicsParams,
    n_xi: usize,
    opts: &MuOptions,
) -> Result<MuEvaluation> {
    assert!(n_xi >= 1);
    let mut rho_samples = Vec::with_capacity(n_xi);
    let mut mu_values = Vec::with_capacity(n_xi);
    let mut hits = 0usize;
    for m in 0..n_xi {
        let xi = (m as f64 + 0.5) / n_xi as f64;
        let rho = rho_of_xi(xi);
        if !(rho > 0.0 && rho < params.rho_max) {
            return Err(Error::DensityOutOfRange {
                rho,
                rho_max: params.rho_max,
            });
        }
        let value = mu(rho, params, opts)?;
        if is_nonpositive(value, opts.tie) {
            hits += 1;
        }
        rho_samples.push(rho);
        mu_values.push(value);
    }
    Ok(MuEvaluation {
        rho_samples,
        mu_values,
        probability: hits as f64 / n_xi as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub rho0: f64,
    pub sigma: f64,
    pub n_v: usize,
    pub gamma: u32,
    pub probability: f64,
}

/// Steady-state sweep: instability probability of the centered uniform
/// perturbation `rho0 + sigma (xi - 1/2)` for each base density.
pub fn steady_state_sweep(
    rho0_grid: &[f64],
    sigma: f64,
    params: &PhysicsParams,
    n_xi: usize,
    opts: &MuOptions,
) -> Result<Vec<SweepRow>> {
    rho0_grid
        .iter()
        .map(|&rho0| {
            let p =
                probability_mu_nonpositive(|xi| rho0 + sigma * (xi - 0.5), params, n_xi, opts)?;
            Ok(SweepRow {
                rho0,
                sigma,
                n_v: params.n_v,
                gamma: params.gamma,
                probability: p,
            })
        })
        .collect()
}

/// Spread sweep at a fixed base density over a range of perturbation
/// sizes.
pub fn sigma_sweep(
    rho0: f64,
    sigmas: &[f64],
    params: &PhysicsParams,
    n_xi: usize,
    opts: &MuOptions,
) -> Result<Vec<SweepRow>> {
    sigmas
        .iter()
        .map(|&sigma| {
            let p =
                probability_mu_nonpositive(|xi| rho0 + sigma * (xi - 0.5), params, n_xi, opts)?;
            Ok(SweepRow {
                rho0,
                sigma,
                n_v: params.n_v,
                gamma: params.gamma,
                probability: p,
            })
        })
        .collect()
}

/// Per-cell instability probability of a fluid state, reconstructing the
/// random density cellwise.
pub fn probability_field(
    state: &FluidState,
    basis: &HaarBasis,
    params: &PhysicsParams,
    n_xi: usize,
    opts: &MuOptions,
) -> Result<Vec<f64>> {
    let n = basis.len();
    let mut out = Vec::with_capacity(state.mesh.n_cells);
    for c in 0..state.mesh.n_cells {
        let nodal = basis.nodal_from_modal(state.rho_cell(c));
        let p = probability_mu_nonpositive(
            |xi| nodal[basis.cell_of(xi)],
            params,
            n_xi,
            opts,
        )?;
        debug_assert_eq!(nodal.len(), n);
        out.push(p);
    }
    Ok(out)
}

/// Empirical central band of the reconstructed field at the given
/// coverage (e.g. 0.95), from `n_xi` midpoint samples.
pub fn confidence_band(
    coeffs: &[f64],
    basis: &HaarBasis,
    n_xi: usize,
    coverage: f64,
) -> (f64, f64) {
    assert!(n_xi >= 1 && coverage > 0.0 && coverage < 1.0);
    let nodal = basis.nodal_from_modal(coeffs);
    let mut samples: Vec<f64> = (0..n_xi)
        .map(|m| {
            let xi = (m as f64 + 0.5) / n_xi as f64;
            nodal[basis.cell_of(xi)]
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - coverage);
    let lo_idx = (tail * (n_xi - 1) as f64).floor() as usize;
    let hi_idx = ((1.0 - tail) * (n_xi - 1) as f64).ceil() as usize;
    (samples[lo_idx], samples[hi_idx.min(n_xi - 1)])
}

/// Closed-form algebraic part of the coefficient in the special case of a
/// linear hesitation and the concave equilibrium flux with the given
/// maximal density. All four printed terms are kept even though the last
/// two cancel.
pub fn lwr_r(rho: f64, rho_max: f64) -> f64 {
    -(rho_max - 2.0 * rho) * (rho_max - 2.0 * rho) - (rho_max * rho - rho * rho)
        + rho * (rho_max - rho)
}

/// Galerkin coefficients of `lwr_r` along a random density, through the
/// printed matrix formula. The symbol for the constant unit field is the
/// deterministic coefficient vector `(1, 0, ..., 0)`; with it the formula
/// agrees with the nodal projection of `lwr_r` to rounding.
pub fn lwr_r_coeffs(
    rho: &GpcVector,
    tensor: &GalerkinTensor,
    rho_max: f64,
) -> Result<GpcVector> {
    let n = rho.len();
    let unit = GpcVector::deterministic(n, rho_max);
    // m = rho_max 1 - 2 rho ; s = rho_max 1 - rho
    let m = GpcVector::new(
        unit.coeffs
            .iter()
            .zip(&rho.coeffs)
            .map(|(u, r)| u - 2.0 * r)
            .collect(),
    );
    let s = GpcVector::new(
        unit.coeffs
            .iter()
            .zip(&rho.coeffs)
            .map(|(u, r)| u - r)
            .collect(),
    );
    let t1 = tensor.apply_galerkin_matrix(&m, &m)?;
    let t3 = tensor.apply_galerkin_matrix(rho, rho)?;
    let t4 = tensor.apply_galerkin_matrix(rho, &s)?;
    let coeffs = (0..n)
        .map(|i| -t1.coeffs[i] - rho_max * rho.coeffs[i] + t3.coeffs[i] + t4.coeffs[i])
        .collect();
    Ok(GpcVector::new(coeffs))
}

/// Nodal-projection route for `lwr_r` along a random density.
pub fn lwr_r_projected(rho: &GpcVector, basis: &HaarBasis, rho_max: f64) -> Result<GpcVector> {
    project_nonlinear(|r| lwr_r(r, rho_max), rho, basis)
}

/// Unsimplified diffusion coefficient of the relaxation expansion,
/// kept as an audit companion to [`mu`].
pub fn chapman_enskog_d(rho: f64, params: &PhysicsParams, opts: &MuOptions) -> Result<f64> {
    let (q, dq) = q_and_derivative(rho, params, opts)?;
    let gamma = params.gamma;
    let hr = h(rho, gamma);
    let dh = hesitation_derivative(rho, gamma);
    // d(h rho)/drho = h + rho h'
    let dhrho = hr + rho * dh;
    Ok((dq + dhrho) * (dq + hr) + dh * (q + hr * rho))
}

/// Difference between the two printed forms of the diffusion correction:
/// `mu` versus `-D` plus the density derivative of the second moment of
/// the shifted equilibrium. Reported numerically, never asserted zero.
pub fn diffusion_form_gap(rho: f64, params: &PhysicsParams, opts: &MuOptions) -> Result<f64> {
    let mu_v = mu(rho, params, opts)?;
    let d = chapman_enskog_d(rho, params, opts)?;
    // second w-moment of the shifted equilibrium: m2 + 2 h m1 + h^2 rho
    let delta = opts.fd_delta;
    let second_shifted = |r: f64| -> Result<f64> {
        let m1 = maxwellian_moment(1, r, params)?;
        let m2 = maxwellian_moment(2, r, params)?;
        let hv = h(r, params.gamma);
        Ok(m2 + 2.0 * hv * m1 + hv * hv * r)
    };
    let half = 0.5 * params.rho_max;
    let dsecond = if rho >= half {
        // shifted moment is smooth there; one-sided difference
        (second_shifted((rho + delta).min(params.rho_max))? - second_shifted(rho)?) / delta
    } else if rho + delta >= half || rho - delta <= 0.0 {
        (second_shifted(rho)? - second_shifted(rho - delta)?) / delta
    } else {
        (second_shifted(rho + delta)? - second_shifted(rho - delta)?) / (2.0 * delta)
    };
    Ok(mu_v - (-d + dsecond))
}
