//! Traffic closure functions: hesitation, equilibrium velocity and flux,
//! the discrete-velocity equilibrium distribution and its moments.
//!
//! The equilibrium weights follow a recursion with a branch at half the
//! maximal density: at or above it the whole mass sits on the slowest
//! velocity (stopped traffic), below it the weights fill the velocity
//! ladder from fastest to slowest. The printed form of the recursion
//! leaves the index of the weight under the square root unbound;
//! [`RadicandRule`] selects the reading. `PreviousWeight` keeps every
//! weight nonnegative across the admissible density range, `PartialSum`
//! is retained for comparison and can drive the remainder weight negative.

use crate::error::{Error, Result};

/// Default step for density derivatives of the equilibrium moments.
pub const DEFAULT_FD_DELTA: f64 = 1e-6;

/// Reading of the weight index under the square root of the equilibrium
/// recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadicandRule {
    /// Radicand uses the previous weight `f_{j-1}`.
    #[default]
    PreviousWeight,
    /// Radicand uses the partial sum `sum_{k<j} f_k`.
    PartialSum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicsParams {
    /// Hesitation exponent, 1..=3.
    pub gamma: u32,
    /// Maximal speed.
    pub v_max: f64,
    /// Maximal density.
    pub rho_max: f64,
    /// Number of discrete velocities, at least 2.
    pub n_v: usize,
    pub radicand: RadicandRule,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        Self {
            gamma: 1,
            v_max: 1.0,
            rho_max: 1.0,
            n_v: 5,
            radicand: RadicandRule::default(),
        }
    }
}

impl PhysicsParams {
    pub fn with_gamma_n_v(gamma: u32, n_v: usize) -> Self {
        Self {
            gamma,
            n_v,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.gamma) {
            return Err(Error::InvalidParams(format!(
                "gamma must be 1, 2 or 3, got {}",
                self.gamma
            )));
        }
        if self.n_v < 2 {
            return Err(Error::InvalidParams(format!(
                "need at least 2 discrete velocities, got {}",
                self.n_v
            )));
        }
        if !(self.v_max > 0.0) || !(self.rho_max > 0.0) {
            return Err(Error::InvalidParams(
                "v_max and rho_max must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Discrete velocity ladder, fastest first:
    /// `v_j = v_max (N - j) / (N - 1)` for `j = 1..=N`, so `v_1 = v_max`
    /// and `v_N = 0`. In free flow the recursion loads the leading (fast)
    /// weights; in congestion the whole mass drops to `v_N = 0`.
    pub fn velocities(&self) -> Vec<f64> {
        let n = self.n_v;
        (0..n)
            .map(|j| self.v_max * (n - 1 - j) as f64 / (n - 1) as f64)
            .collect()
    }

    /// Slowest velocity on the ladder (carries the congested mass).
    pub fn v_last(&self) -> f64 {
        0.0
    }

    fn check_rho(&self, rho: f64) -> Result<()> {
        if !(0.0..=self.rho_max).contains(&rho) {
            return Err(Error::DensityOutOfRange {
                rho,
                rho_max: self.rho_max,
            });
        }
        Ok(())
    }
}

/// Hesitation (pressure) function `h(rho) = rho^gamma`.
pub fn hesitation(rho: f64, gamma: u32) -> Result<f64> {
    if rho < 0.0 {
        return Err(Error::DensityOutOfRange { rho, rho_max: f64::INFINITY });
    }
    Ok(h(rho, gamma))
}

/// Unchecked hesitation evaluation; callers validate the density.
#[inline]
pub fn h(rho: f64, gamma: u32) -> f64 {
    rho.powi(gamma as i32)
}

/// `h'(rho) = gamma rho^(gamma-1)`.
#[inline]
pub fn hesitation_derivative(rho: f64, gamma: u32) -> f64 {
    gamma as f64 * rho.powi(gamma as i32 - 1)
}

/// Linear equilibrium velocity `V_eq = 1 - 2 rho`, negative beyond half
/// density by construction (no clamping).
#[inline]
pub fn v_eq(rho: f64) -> f64 {
    1.0 - 2.0 * rho
}

/// Equilibrium flux `Q_eq = rho V_eq(rho)`.
#[inline]
pub fn q_eq(rho: f64) -> f64 {
    rho * v_eq(rho)
}

/// Equilibrium weights of the discrete-velocity distribution at density
/// `rho`. The vector always sums to `rho` (the last weight is the
/// remainder); at or above half density the mass collapses onto the
/// slowest velocity.
pub fn maxwellian_weights(rho: f64, params: &PhysicsParams) -> Result<Vec<f64>> {
    params.check_rho(rho)?;
    let n = params.n_v;
    let mut f = vec![0.0; n];
    if rho == 0.0 {
        return Ok(f);
    }
    let r = rho / params.rho_max;
    if r >= 0.5 {
        f[n - 1] = rho;
        return Ok(f);
    }
    let lin = (1.0 - 2.0 * r) * r;
    let quad = 4.0 * r * (1.0 - r) * r;
    let denom = 2.0 * (1.0 - r);
    let mut sum = 0.0;
    for j in 0..n - 1 {
        let radicand_weight = match params.radicand {
            RadicandRule::PreviousWeight => {
                if j == 0 {
                    0.0
                } else {
                    f[j - 1]
                }
            }
            RadicandRule::PartialSum => sum,
        };
        let shifted = lin - denom * sum;
        let radicand = shifted * shifted + quad * radicand_weight;
        if radicand < 0.0 {
            return Err(Error::NegativeDiscriminant {
                rho,
                index: j + 1,
            });
        }
        f[j] = (lin - denom * sum + radicand.sqrt()) / denom;
        sum += f[j];
    }
    let remainder = r - sum;
    // remainder is nonnegative for the default rule; absorb roundoff only
    f[n - 1] = if remainder < 0.0 && remainder > -1e-12 {
        0.0
    } else {
        remainder
    };
    if params.rho_max != 1.0 {
        for w in &mut f {
            *w *= params.rho_max;
        }
    }
    Ok(f)
}

/// Velocity moment `sum_j v_j^order f_j(rho)` of the equilibrium
/// distribution. Order zero returns `rho` exactly.
pub fn maxwellian_moment(order: u32, rho: f64, params: &PhysicsParams) -> Result<f64> {
    params.check_rho(rho)?;
    if order == 0 {
        return Ok(rho);
    }
    if rho / params.rho_max >= 0.5 {
        // all mass on the slowest velocity
        return Ok(rho * params.v_last().powi(order as i32));
    }
    let weights = maxwellian_weights(rho, params)?;
    let velocities = params.velocities();
    Ok(weights
        .iter()
        .zip(&velocities)
        .map(|(w, v)| w * v.powi(order as i32))
        .sum())
}

/// Density derivative of a velocity moment.
///
/// Central finite difference with step `delta`; one-sided at the domain
/// ends and on each side of the branch density so the stencil never
/// straddles the discontinuity. At or above the branch the moment is
/// exactly linear in `rho`, so the derivative is returned in closed form
/// (this avoids cancellation noise where the moment is constant).
pub fn maxwellian_moment_drho(
    order: u32,
    rho: f64,
    params: &PhysicsParams,
    delta: f64,
) -> Result<f64> {
    params.check_rho(rho)?;
    if order == 0 {
        return Ok(1.0);
    }
    let half = 0.5 * params.rho_max;
    if rho >= half {
        return Ok(params.v_last().powi(order as i32));
    }
    let lo = rho - delta;
    let hi = rho + delta;
    let m = |x: f64| maxwellian_moment(order, x, params);
    if hi >= half || hi > params.rho_max {
        // one-sided toward the free side
        Ok((m(rho)? - m(rho - delta)?) / delta)
    } else if lo <= 0.0 {
        Ok((m(rho + delta)? - m(rho)?) / delta)
    } else {
        Ok((m(hi)? - m(lo)?) / (2.0 * delta))
    }
}

/// Density derivative of the second velocity moment (diffusion input).
pub fn maxwellian_second_moment_drho(rho: f64, params: &PhysicsParams, delta: f64) -> Result<f64> {
    maxwellian_moment_drho(2, rho, params, delta)
}

/// Moments of the shifted equilibrium in the Lagrangian velocity
/// `w = v + h(rho)`. Order zero is the density; order one shifts the
/// first velocity moment by `rho h(rho)`.
pub fn mg_moment(order: u32, rho: f64, params: &PhysicsParams) -> Result<f64> {
    match order {
        0 => {
            params.check_rho(rho)?;
            Ok(rho)
        }
        1 => {
            let m1 = maxwellian_moment(1, rho, params)?;
            Ok(m1 + rho * h(rho, params.gamma))
        }
        _ => Err(Error::InvalidParams(format!(
            "shifted moments are defined for orders 0 and 1, got {order}"
        ))),
    }
}

/// Residual of the second moment condition: difference between the first
/// shifted moment and the linear-equilibrium target
/// `rho V_eq + rho h(rho)`. Reported as a diagnostic, never asserted to
/// vanish; the discrete equilibrium satisfies the mass condition exactly
/// but matches the linear equilibrium flux only approximately.
pub fn m2_residual(rho: f64, params: &PhysicsParams) -> Result<f64> {
    let lhs = mg_moment(1, rho, params)?;
    let target = rho * v_eq(rho) + rho * h(rho, params.gamma);
    Ok(lhs - target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn hesitation_examples() {
        assert_abs_diff_eq!(hesitation(0.5, 1).unwrap(), 0.5);
        assert_abs_diff_eq!(hesitation(0.0, 2).unwrap(), 0.0);
        assert_abs_diff_eq!(hesitation(0.5, 3).unwrap(), 0.125);
        assert!(hesitation(-0.1, 1).is_err());
    }

    #[test]
    fn equilibrium_velocity_and_flux() {
        assert_abs_diff_eq!(v_eq(0.0), 1.0);
        assert_abs_diff_eq!(q_eq(0.0), 0.0);
        assert_abs_diff_eq!(v_eq(0.5), 0.0);
        assert_abs_diff_eq!(q_eq(0.5), 0.0);
        assert_abs_diff_eq!(q_eq(0.25), 0.125);
        // negative beyond half density, by construction
        assert!(v_eq(0.75) < 0.0);
    }

    #[test]
    fn velocity_ladder_is_uniform_and_decreasing() {
        let p = PhysicsParams::with_gamma_n_v(1, 5);
        let v = p.velocities();
        assert_eq!(v, vec![1.0, 0.75, 0.5, 0.25, 0.0]);
    }

    #[test]
    fn congested_branch_collapses_to_the_last_weight() {
        let p = PhysicsParams::with_gamma_n_v(1, 3);
        let f = maxwellian_weights(0.75, &p).unwrap();
        assert_eq!(f, vec![0.0, 0.0, 0.75]);
    }

    #[test]
    fn zero_density_gives_zero_weights() {
        let p = PhysicsParams::with_gamma_n_v(1, 4);
        assert_eq!(maxwellian_weights(0.0, &p).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn first_weight_closed_form() {
        // leading weight solves its quadratic in closed form:
        // f_1 = rho (1 - 2 rho) / (1 - rho)
        let p = PhysicsParams::default();
        for rho in [0.05, 0.2, 0.35, 0.49] {
            let f = maxwellian_weights(rho, &p).unwrap();
            assert_abs_diff_eq!(f[0], rho * (1.0 - 2.0 * rho) / (1.0 - rho), epsilon = 1e-14);
        }
    }

    #[test]
    fn second_weight_closed_form() {
        // eliminating the partial sum for j = 2 gives
        // f_2 = rho (sqrt(1 - 4 rho^2) - (1 - 2 rho)) / (2 (1 - rho))
        let p = PhysicsParams::default();
        for rho in [0.1, 0.2, 0.3, 0.45] {
            let f = maxwellian_weights(rho, &p).unwrap();
            let want =
                rho * ((1.0 - 4.0 * rho * rho).sqrt() - (1.0 - 2.0 * rho)) / (2.0 * (1.0 - rho));
            assert_abs_diff_eq!(f[1], want, epsilon = 1e-13);
        }
    }

    #[test]
    fn two_velocity_remainder_closed_form() {
        let p = PhysicsParams::with_gamma_n_v(1, 2);
        for rho in [0.1, 0.25, 0.4] {
            let f = maxwellian_weights(rho, &p).unwrap();
            assert_abs_diff_eq!(f[1], rho * rho / (1.0 - rho), epsilon = 1e-14);
        }
    }

    #[test]
    fn weights_sum_to_density_and_stay_nonnegative() {
        for n_v in [3usize, 5, 10] {
            let p = PhysicsParams::with_gamma_n_v(1, n_v);
            for k in 0..=1000 {
                let rho = k as f64 / 1000.0;
                let f = maxwellian_weights(rho, &p).unwrap();
                let sum: f64 = f.iter().sum();
                assert!((sum - rho).abs() < 1e-12, "sum {sum} != {rho} at n_v={n_v}");
                for (j, w) in f.iter().enumerate() {
                    assert!(*w >= 0.0, "negative weight {w} at rho={rho}, j={j}");
                }
            }
        }
    }

    #[test]
    fn partial_sum_reading_overshoots_for_wide_ladders() {
        // retained alternative reading: the remainder goes negative, which
        // is why it is not the default
        let p = PhysicsParams {
            n_v: 5,
            radicand: RadicandRule::PartialSum,
            ..Default::default()
        };
        let f = maxwellian_weights(0.2, &p).unwrap();
        assert!(f[4] < 0.0);
    }

    #[test]
    fn zeroth_moment_is_the_density() {
        let p = PhysicsParams::with_gamma_n_v(1, 5);
        for rho in [0.0, 0.3, 0.75] {
            assert_eq!(maxwellian_moment(0, rho, &p).unwrap(), rho);
        }
    }

    #[test]
    fn congested_moments_in_closed_form() {
        // all mass on the slowest velocity: first and second moments vanish
        let p = PhysicsParams::with_gamma_n_v(1, 3);
        assert_eq!(maxwellian_moment(1, 0.75, &p).unwrap(), 0.0);
        assert_eq!(maxwellian_moment(2, 0.75, &p).unwrap(), 0.0);
        assert_eq!(maxwellian_moment(2, 0.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn moment_derivative_is_exact_on_the_congested_branch() {
        let p = PhysicsParams::with_gamma_n_v(1, 3);
        let d = maxwellian_moment_drho(2, 0.8, &p, DEFAULT_FD_DELTA).unwrap();
        assert_eq!(d, 0.0);
        let d1 = maxwellian_moment_drho(1, 0.6, &p, DEFAULT_FD_DELTA).unwrap();
        assert_eq!(d1, 0.0);
    }

    #[test]
    fn central_difference_has_second_order_accuracy() {
        // Richardson: halving delta shrinks the central-difference error
        // by about four away from the branch
        let p = PhysicsParams::with_gamma_n_v(1, 5);
        let rho = 0.23;
        let reference = maxwellian_moment_drho(2, rho, &p, 1e-8).unwrap();
        let e1 = (maxwellian_moment_drho(2, rho, &p, 1e-3).unwrap() - reference).abs();
        let e2 = (maxwellian_moment_drho(2, rho, &p, 5e-4).unwrap() - reference).abs();
        assert!(e2 < e1 / 3.0, "e1={e1}, e2={e2}");
    }

    #[test]
    fn boundary_stencils_are_one_sided_and_finite() {
        let p = PhysicsParams::with_gamma_n_v(1, 5);
        let d0 = maxwellian_moment_drho(2, 0.0, &p, 1e-6).unwrap();
        assert!(d0.is_finite());
        let dh = maxwellian_moment_drho(2, 0.4999999, &p, 1e-6).unwrap();
        assert!(dh.is_finite());
    }

    #[test]
    fn shifted_moment_conserves_mass() {
        let p = PhysicsParams::with_gamma_n_v(1, 4);
        for rho in [0.1, 0.45, 0.9] {
            assert_eq!(mg_moment(0, rho, &p).unwrap(), rho);
        }
        assert_eq!(mg_moment(1, 0.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn shifted_first_moment_and_its_audited_residual() {
        // congested state: mass stopped, so the shifted moment is rho h(rho)
        let p = PhysicsParams::with_gamma_n_v(1, 3);
        let got = mg_moment(1, 0.75, &p).unwrap();
        assert_abs_diff_eq!(got, 0.75 * 0.75, epsilon = 1e-14);
        // the linear-equilibrium target differs; the residual is reported,
        // not assumed zero: target = rho V_eq + rho h = -0.375 + 0.5625
        let res = m2_residual(0.75, &p).unwrap();
        assert_abs_diff_eq!(res, 0.5625 - 0.1875, epsilon = 1e-14);
    }

    #[test]
    fn residual_profile_is_finite_on_a_grid() {
        let p = PhysicsParams::with_gamma_n_v(1, 5);
        let mut worst: f64 = 0.0;
        for k in 1..1000 {
            let rho = k as f64 / 1000.0;
            let r = m2_residual(rho, &p).unwrap();
            assert!(r.is_finite());
            worst = worst.max(r.abs());
        }
        assert!(worst > 0.0); // genuinely nonzero: an audit, not an identity
    }

    proptest! {
        #[test]
        fn weights_normalize_for_random_densities(
            rho in 0.0f64..1.0,
            n_v in 2usize..12,
        ) {
            let p = PhysicsParams::with_gamma_n_v(1, n_v);
            let f = maxwellian_weights(rho, &p).unwrap();
            let sum: f64 = f.iter().sum();
            prop_assert!((sum - rho).abs() < 1e-12);
            prop_assert!(f.iter().all(|w| *w >= 0.0));
        }
    }
}
