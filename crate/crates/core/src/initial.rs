//! Initial-data descriptors for the solvers: density and velocity fields
//! over space and the random parameter, with exact Haar projection.

use crate::basis::HaarBasis;
use crate::error::{Error, Result};
use crate::physics::{h, PhysicsParams};

/// A scalar that may depend on the random parameter through an affine map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RandomScalar {
    Deterministic(f64),
    /// Uniformly distributed on `(lo, hi)` via `xi -> lo + (hi - lo) xi`.
    Uniform { lo: f64, hi: f64 },
}

impl RandomScalar {
    pub fn eval(&self, xi: f64) -> f64 {
        match *self {
            RandomScalar::Deterministic(v) => v,
            RandomScalar::Uniform { lo, hi } => lo + (hi - lo) * xi,
        }
    }

    /// Centered perturbation `rho0 + sigma (xi - 1/2)`.
    pub fn centered(rho0: f64, sigma: f64) -> Self {
        if sigma == 0.0 {
            RandomScalar::Deterministic(rho0)
        } else {
            RandomScalar::Uniform {
                lo: rho0 - 0.5 * sigma,
                hi: rho0 + 0.5 * sigma,
            }
        }
    }

    pub fn range(&self) -> (f64, f64) {
        match *self {
            RandomScalar::Deterministic(v) => (v, v),
            RandomScalar::Uniform { lo, hi } => (lo.min(hi), lo.max(hi)),
        }
    }
}

type FieldFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Density/velocity initial fields `(x, xi) -> value`.
pub enum InitialData {
    /// Spatially constant state with a centered uniform density
    /// perturbation and a fixed velocity profile.
    UniformPerturbed {
        rho0: f64,
        sigma: f64,
        v: RandomScalar,
    },
    /// Two-state Riemann datum split at `split`.
    Riemann {
        left_rho: RandomScalar,
        left_v: f64,
        right_rho: RandomScalar,
        right_v: f64,
        split: f64,
    },
    /// Arbitrary fields; used by library-level experiments.
    Custom { rho: FieldFn, v: FieldFn },
}

impl std::fmt::Debug for InitialData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialData::UniformPerturbed { rho0, sigma, v } => f
                .debug_struct("UniformPerturbed")
                .field("rho0", rho0)
                .field("sigma", sigma)
                .field("v", v)
                .finish(),
            InitialData::Riemann {
                left_rho,
                left_v,
                right_rho,
                right_v,
                split,
            } => f
                .debug_struct("Riemann")
                .field("left_rho", left_rho)
                .field("left_v", left_v)
                .field("right_rho", right_rho)
                .field("right_v", right_v)
                .field("split", split)
                .finish(),
            InitialData::Custom { .. } => f.write_str("Custom"),
        }
    }
}

impl InitialData {
    /// Rarefaction benchmark: uncertain congested block ahead of light,
    /// faster traffic.
    pub fn rarefaction() -> Self {
        InitialData::Riemann {
            left_rho: RandomScalar::Uniform { lo: 0.55, hi: 0.85 },
            left_v: 0.2,
            right_rho: RandomScalar::Deterministic(0.2),
            right_v: 0.7,
            split: 1.0,
        }
    }

    /// Shock benchmark: uncertain light traffic running into a congested
    /// block.
    pub fn shock() -> Self {
        InitialData::Riemann {
            left_rho: RandomScalar::Uniform { lo: 0.15, hi: 0.45 },
            left_v: 0.7,
            right_rho: RandomScalar::Deterministic(0.75),
            right_v: 0.3,
            split: 1.0,
        }
    }

    pub fn rho_at(&self, x: f64, xi: f64) -> f64 {
        match self {
            InitialData::UniformPerturbed { rho0, sigma, .. } => rho0 + sigma * (xi - 0.5),
            InitialData::Riemann {
                left_rho,
                right_rho,
                split,
                ..
            } => {
                if x < *split {
                    left_rho.eval(xi)
                } else {
                    right_rho.eval(xi)
                }
            }
            InitialData::Custom { rho, .. } => rho(x, xi),
        }
    }

    pub fn v_at(&self, x: f64, xi: f64) -> f64 {
        match self {
            InitialData::UniformPerturbed { v, .. } => v.eval(xi),
            InitialData::Riemann {
                left_v,
                right_v,
                split,
                ..
            } => {
                if x < *split {
                    *left_v
                } else {
                    *right_v
                }
            }
            InitialData::Custom { v, .. } => v(x, xi),
        }
    }

    /// Sample the density at a fixed random parameter, as a deterministic
    /// field of space (collocation runs).
    pub fn at_xi(&self, xi: f64) -> impl Fn(f64) -> (f64, f64) + '_ {
        move |x| (self.rho_at(x, xi), self.v_at(x, xi))
    }
}

/// Exact Haar projection of the initial fields onto modal coefficients per
/// cell. The momentum coordinate is built nodally from
/// `q = rho (v + h(rho))` before projecting, which is exact for fields
/// that are piecewise constant in the random parameter on the dyadic grid.
///
/// Densities must stay inside `(0, rho_max]` at every dyadic node.
pub fn project_initial_data(
    data: &InitialData,
    basis: &HaarBasis,
    params: &PhysicsParams,
    centers: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = basis.len();
    let mut rho = vec![0.0; centers.len() * n];
    let mut q = vec![0.0; centers.len() * n];
    let mut rho_nodal = vec![0.0; n];
    let mut q_nodal = vec![0.0; n];
    for (c, &x) in centers.iter().enumerate() {
        for nu in 0..n {
            let xi = basis.node(nu);
            let r = data.rho_at(x, xi);
            if !(r > 0.0 && r <= params.rho_max) {
                return Err(Error::BadInitialData(format!(
                    "density {r} at x = {x}, xi = {xi} outside (0, {}]",
                    params.rho_max
                )));
            }
            let v = data.v_at(x, xi);
            rho_nodal[nu] = r;
            q_nodal[nu] = r * (v + h(r, params.gamma));
        }
        rho[c * n..(c + 1) * n].copy_from_slice(&basis.modal_from_nodal(&rho_nodal));
        q[c * n..(c + 1) * n].copy_from_slice(&basis.modal_from_nodal(&q_nodal));
    }
    Ok((rho, q))
}
