//! Galerkin machinery for random fields expanded in the Haar basis:
//! triple-product tensors, Galerkin products and matrices, nonlinear
//! projections, and the constant eigenvector matrix shared by all
//! Galerkin matrices.

use crate::basis::HaarBasis;
use crate::error::{Error, Result};

/// Modal coefficients of a scalar random quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct GpcVector {
    pub coeffs: Vec<f64>,
}

impl GpcVector {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// Coefficients of a deterministic value: `(value, 0, ..., 0)`.
    pub fn deterministic(len: usize, value: f64) -> Self {
        let mut coeffs = vec![0.0; len];
        coeffs[0] = value;
        Self { coeffs }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            coeffs: vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Expected value of the represented field (`phi_0 = 1` and the basis
    /// is orthonormal, so the mean is the zeroth coefficient).
    pub fn mean(&self) -> f64 {
        self.coeffs[0]
    }

    /// Variance by Parseval: sum of squares of the non-constant modes.
    pub fn variance(&self) -> f64 {
        self.coeffs[1..].iter().map(|c| c * c).sum()
    }
}

/// Triple-product matrices `(M_l)_{ij} = int phi_i phi_j phi_l` together
/// with the constant orthogonal eigenvector matrix `V` that simultaneously
/// diagonalizes every Galerkin matrix built from them.
#[derive(Debug, Clone)]
pub struct GalerkinTensor {
    n: usize,
    /// `matrices[l][i * n + j]`
    matrices: Vec<Vec<f64>>,
    /// `V[i * n + c] = phi_i(node_c) / sqrt(n)`; columns are indexed by
    /// dyadic cells, so `V^T P(u) V = diag(nodal values of u)`.
    eigenvectors: Vec<f64>,
}

impl GalerkinTensor {
    pub fn new(basis: &HaarBasis) -> Self {
        let n = basis.len();
        // (M_l)_{ij} is the l-th modal coefficient of phi_i * phi_j, which
        // is itself piecewise constant, so one nodal->modal transform per
        // (i, j) pair fills a whole column of the tensor exactly.
        let mut phi = vec![0.0; n * n]; // phi[i * n + c]
        for i in 0..n {
            for c in 0..n {
                phi[i * n + c] = basis.eval(i, basis.node(c));
            }
        }
        let mut matrices = vec![vec![0.0; n * n]; n];
        let mut prod = vec![0.0; n];
        for i in 0..n {
            for j in 0..=i {
                for c in 0..n {
                    prod[c] = phi[i * n + c] * phi[j * n + c];
                }
                let column = basis.modal_from_nodal(&prod);
                for (l, v) in column.iter().enumerate() {
                    matrices[l][i * n + j] = *v;
                    matrices[l][j * n + i] = *v;
                }
            }
        }
        let scale = 1.0 / (n as f64).sqrt();
        let eigenvectors = (0..n * n).map(|k| phi[k] * scale).collect();
        Self {
            n,
            matrices,
            eigenvectors,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The matrix `M_l`, row-major.
    pub fn matrix(&self, l: usize) -> &[f64] {
        &self.matrices[l]
    }

    /// The shared orthogonal eigenvector matrix, row-major with columns
    /// indexed by dyadic cells.
    pub fn eigenvectors(&self) -> &[f64] {
        &self.eigenvectors
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got,
            });
        }
        Ok(())
    }

    /// Galerkin product `(u * z)_k = sum_{ij} u_i z_j (M_k)_{ij}`.
    ///
    /// This is the tensor-sum definition; `nodal_product` computes the same
    /// thing through nodal values and serves as the independent route.
    pub fn product(&self, u: &GpcVector, z: &GpcVector) -> Result<GpcVector> {
        self.check_len(u.len())?;
        self.check_len(z.len())?;
        let n = self.n;
        let mut out = vec![0.0; n];
        for (k, m) in self.matrices.iter().enumerate() {
            let mut acc = 0.0;
            for i in 0..n {
                let ui = u.coeffs[i];
                if ui == 0.0 {
                    continue;
                }
                let row = &m[i * n..(i + 1) * n];
                let mut inner = 0.0;
                for j in 0..n {
                    inner += row[j] * z.coeffs[j];
                }
                acc += ui * inner;
            }
            out[k] = acc;
        }
        Ok(GpcVector::new(out))
    }

    /// Galerkin matrix `P(u) = sum_l u_l M_l`, row-major.
    pub fn galerkin_matrix(&self, u: &GpcVector) -> Result<Vec<f64>> {
        self.check_len(u.len())?;
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for (l, m) in self.matrices.iter().enumerate() {
            let ul = u.coeffs[l];
            if ul == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(m.iter()) {
                *o += ul * v;
            }
        }
        Ok(out)
    }

    /// `P(u) z` without materializing `P(u)`.
    pub fn apply_galerkin_matrix(&self, u: &GpcVector, z: &GpcVector) -> Result<GpcVector> {
        let p = self.galerkin_matrix(u)?;
        self.check_len(z.len())?;
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let row = &p[i * n..(i + 1) * n];
            out[i] = row.iter().zip(&z.coeffs).map(|(a, b)| a * b).sum();
        }
        Ok(GpcVector::new(out))
    }

    /// Eigenvalues of `P(u)` in the shared eigenbasis, ordered by dyadic
    /// cell: these are exactly the nodal values of the represented field.
    pub fn eigenvalues(&self, u: &GpcVector, basis: &HaarBasis) -> Result<Vec<f64>> {
        self.check_len(u.len())?;
        Ok(basis.nodal_from_modal(&u.coeffs))
    }
}

/// Pointwise product computed through nodal values. For the Haar basis the
/// product of two fields in the span stays in the span, so this agrees with
/// the tensor-sum Galerkin product to rounding.
pub fn nodal_product(u: &GpcVector, z: &GpcVector, basis: &HaarBasis) -> Result<GpcVector> {
    if u.len() != basis.len() || z.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            got: u.len().max(z.len()),
        });
    }
    let a = basis.nodal_from_modal(&u.coeffs);
    let b = basis.nodal_from_modal(&z.coeffs);
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    Ok(GpcVector::new(basis.modal_from_nodal(&prod)))
}

/// Coefficients of `xi -> f(u(xi))` via the nodal transform. Exact for the
/// Haar basis, where it coincides with the Galerkin-matrix identities for
/// composite nonlinearities.
pub fn project_nonlinear(
    f: impl Fn(f64) -> f64,
    u: &GpcVector,
    basis: &HaarBasis,
) -> Result<GpcVector> {
    if u.len() != basis.len() {
        return Err(Error::LengthMismatch {
            expected: basis.len(),
            got: u.len(),
        });
    }
    let mut nodal = basis.nodal_from_modal(&u.coeffs);
    for (cell, v) in nodal.iter_mut().enumerate() {
        let fv = f(*v);
        if !fv.is_finite() {
            return Err(Error::UndefinedAtNode { cell, value: *v });
        }
        *v = fv;
    }
    Ok(GpcVector::new(basis.modal_from_nodal(&nodal)))
}

/// Solve `A x = b` for a small dense row-major matrix by Gaussian
/// elimination with partial pivoting. Used by the matrix-form flux route.
pub(crate) fn solve_dense(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let (pivot, pval) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .max_by(|p, q| p.1.total_cmp(&q.1))?;
        if pval == 0.0 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            x.swap(col, pivot);
        }
        let d = m[col * n + col];
        for r in col + 1..n {
            let factor = m[r * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                m[r * n + j] -= factor * m[col * n + j];
            }
            x[r] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for j in col + 1..n {
            acc -= m[col * n + j] * x[j];
        }
        x[col] = acc / m[col * n + col];
    }
    Some(x)
}
