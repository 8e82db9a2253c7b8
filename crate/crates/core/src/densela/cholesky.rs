use super::matrix::{dot, DenseMatrix};
use crate::error::{Error, Result};

/// Relative asymmetry accepted before a matrix is rejected as non-symmetric.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Lower-triangular factor `L` with `L·Lᵀ = A` for a symmetric positive
/// definite `A`. Factor once, solve many times.
#[derive(Clone, Debug)]
pub struct SpdFactorization {
    dim: usize,
    factor: DenseMatrix,
}

impl SpdFactorization {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factor(&self) -> &DenseMatrix {
        &self.factor
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        spd_solve(self, b)
    }

    /// `L⁻¹ b`
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let l = self.factor.as_slice();
        let mut x = b.to_vec();
        for i in 0..n {
            let row = &l[i * n..i * n + i];
            x[i] = (x[i] - dot(row, &x[..i])) / l[i * n + i];
        }
        x
    }

    /// `L⁻ᵀ b`
    pub fn backward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let l = self.factor.as_slice();
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            x[i] /= l[i * n + i];
            let xi = x[i];
            let row = &l[i * n..i * n + i];
            for (xj, lij) in x[..i].iter_mut().zip(row) {
                *xj -= lij * xi;
            }
        }
        x
    }
}

pub(crate) fn check_symmetric(a: &DenseMatrix) -> Result<()> {
    let asym = a
        .max_asymmetry()
        .ok_or_else(|| Error::DimensionMismatch(format!("expected a square matrix, got {}x{}", a.rows(), a.cols())))?;
    let scale = a.max_abs();
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { asymmetry: asym, scale });
    }
    Ok(())
}

/// Cholesky factorization of a symmetric positive definite matrix. The input
/// is symmetrized as `(A + Aᵀ)/2` first.
pub fn spd_factor(a: &DenseMatrix) -> Result<SpdFactorization> {
    check_symmetric(a)?;
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix to factor"));
    }
    let n = a.rows();
    let mut l = a.clone();
    l.symmetrize();
    let data = l.as_mut_slice();
    for i in 0..n {
        for j in 0..=i {
            let (head, tail) = data.split_at_mut(i * n);
            let row_i = &tail[..n];
            let s = if j == i {
                row_i[i] - dot(&row_i[..i], &row_i[..i])
            } else {
                let row_j = &head[j * n..j * n + j];
                row_i[j] - dot(&row_i[..j], row_j)
            };
            if j == i {
                if !(s > 0.0) {
                    return Err(Error::NotPositiveDefinite { index: i, pivot: s });
                }
                tail[i] = s.sqrt();
            } else {
                tail[j] = s / head[j * n + j];
            }
        }
        for v in &mut data[i * n + i + 1..(i + 1) * n] {
            *v = 0.0;
        }
    }
    Ok(SpdFactorization { dim: n, factor: l })
}

/// Solves `A x = b` with a cached factorization.
pub fn spd_solve(f: &SpdFactorization, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != f.dim {
        return Err(Error::DimensionMismatch(format!("rhs of length {} for a {}-dim factorization", b.len(), f.dim)));
    }
    Ok(f.backward(&f.forward(b)))
}
