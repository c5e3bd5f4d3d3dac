//! Orthonormal Haar wavelet basis on the unit interval with uniform weight.
//!
//! Level `L` yields `n = 2^L` functions: the constant `phi_0 = 1` and the
//! wavelets `phi_{2^j + k}(x) = 2^{j/2} psi(2^j x - k)` for `j < L`,
//! `k < 2^j`, where `psi = +1` on `[0, 1/2)` and `-1` on `[1/2, 1)`.
//! Every basis function is piecewise constant on the dyadic grid of `n`
//! half-open cells `[c/n, (c+1)/n)`, so the span is exactly the space of
//! piecewise-constant fields on that grid. The modal<->nodal change of
//! basis below is therefore exact, not an approximation; all nonlinear
//! operations elsewhere in the crate lean on this.

use crate::error::{Error, Result};

/// Hard cap on the level; dense tensors grow as `8^level`.
pub const MAX_LEVEL: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaarBasis {
    level: u32,
    len: usize,
}

impl HaarBasis {
    pub fn new(level: u32) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::LevelTooLarge {
                level,
                max: MAX_LEVEL,
            });
        }
        Ok(Self {
            level,
            len: 1usize << level,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of basis functions, equal to the number of dyadic cells.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Midpoint of dyadic cell `c`.
    pub fn node(&self, c: usize) -> f64 {
        (c as f64 + 0.5) / self.len as f64
    }

    /// All dyadic cell midpoints in cell order.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len).map(|c| self.node(c)).collect()
    }

    /// Index of the dyadic cell containing `xi` (cells are left-closed).
    pub fn cell_of(&self, xi: f64) -> usize {
        ((xi * self.len as f64).floor() as usize).min(self.len - 1)
    }

    /// Evaluate `phi_i(xi)`. Breakpoints follow the left-closed cell rule.
    pub fn eval(&self, i: usize, xi: f64) -> f64 {
        debug_assert!(i < self.len);
        if i == 0 {
            return 1.0;
        }
        let j = usize::BITS - 1 - i.leading_zeros();
        let k = i - (1usize << j);
        let t = (1u64 << j) as f64 * xi - k as f64;
        if !(0.0..1.0).contains(&t) {
            return 0.0;
        }
        let amp = ((1u64 << j) as f64).sqrt();
        if t < 0.5 {
            amp
        } else {
            -amp
        }
    }

    /// Nodal values (on dyadic cell midpoints) of the field with the given
    /// modal coefficients. Inverse wavelet pyramid, `O(n)`.
    pub fn nodal_from_modal(&self, modal: &[f64]) -> Vec<f64> {
        assert_eq!(modal.len(), self.len, "modal length mismatch");
        let mut s = vec![0.0; self.len];
        s[0] = modal[0];
        for j in 0..self.level {
            let half = 1usize << j;
            let amp = (half as f64).sqrt();
            // expand in place from coarse to fine, back to front
            for k in (0..half).rev() {
                let base = s[k];
                let d = amp * modal[half + k];
                s[2 * k] = base + d;
                s[2 * k + 1] = base - d;
            }
        }
        s
    }

    /// Modal coefficients of the piecewise-constant field with the given
    /// nodal values. Exact inverse of [`nodal_from_modal`].
    ///
    /// [`nodal_from_modal`]: HaarBasis::nodal_from_modal
    pub fn modal_from_nodal(&self, nodal: &[f64]) -> Vec<f64> {
        assert_eq!(nodal.len(), self.len, "nodal length mismatch");
        let mut s = nodal.to_vec();
        let mut out = vec![0.0; self.len];
        for j in (0..self.level).rev() {
            let half = 1usize << j;
            let scale = 0.5 / (half as f64).sqrt();
            for k in 0..half {
                let a = s[2 * k];
                let b = s[2 * k + 1];
                out[half + k] = scale * (a - b);
                s[k] = 0.5 * (a + b);
            }
        }
        out[0] = s[0];
        out
    }

    /// Evaluate the truncated expansion `sum_i u_i phi_i(xi)`.
    pub fn reconstruct(&self, modal: &[f64], xi: f64) -> Result<f64> {
        if !(xi > 0.0 && xi < 1.0) {
            return Err(Error::PointOutOfDomain { xi });
        }
        if modal.len() != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                got: modal.len(),
            });
        }
        let mut acc = modal[0];
        for i in 1..self.len {
            let phi = self.eval(i, xi);
            if phi != 0.0 {
                acc += modal[i] * phi;
            }
        }
        Ok(acc)
    }
}
