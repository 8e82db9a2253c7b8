//! Dense linear algebra substrate: row-major matrices, the X-norm, cached
//! SPD factorizations, extreme eigenvalues and thin SVD.

mod cholesky;
mod matrix;
mod spectral;

pub use cholesky::{spd_factor, spd_solve, SpdFactorization, SYMMETRY_TOL};
pub use matrix::{axpy, dot, norm2, norm_inf, rel_err, scale_vec, sub_vec, DenseMatrix};
pub use spectral::{extreme_eigs, symmetric_eigen, thin_svd, SvdResult, SymmetricEigen};

use crate::error::{Error, Result};

/// `‖w‖_X = √(wᵀXᵀXw / n) = ‖Xw‖₂ / √n`.
pub fn xnorm(x: &DenseMatrix, w: &[f64]) -> Result<f64> {
    if w.len() != x.cols() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against a matrix with {} columns",
            w.len(),
            x.cols()
        )));
    }
    Ok(norm2(&x.matvec(w)) / (x.rows() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xnorm_examples() {
        let x = DenseMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        assert_eq!(xnorm(&x, &[1.0]).unwrap(), 1.0);
        assert_eq!(xnorm(&x, &[0.0]).unwrap(), 0.0);
        assert!(xnorm(&x, &[1.0, 2.0]).is_err());
    }
}
