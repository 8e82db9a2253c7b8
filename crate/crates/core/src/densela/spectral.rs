use super::cholesky::check_symmetric;
use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Thin singular value decomposition `X ≈ U·diag(σ)·Vᵀ` restricted to the
/// top `k` triplets, singular values nonincreasing.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdResult {
    /// Number of singular values above `rel_tol · σ₁`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        if top <= 0.0 {
            return 0;
        }
        self.singular_values.iter().take_while(|&&s| s > rel_tol * top).count()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        let k = self.singular_values.len();
        for i in 0..us.rows() {
            for j in 0..k {
                us.set(i, j, us.get(i, j) * self.singular_values[j]);
            }
        }
        us.matmul_t(&self.v)
    }
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors stored as
/// columns.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

fn faer_eigen(a: &DenseMatrix) -> Result<faer::linalg::solvers::SelfAdjointEigen<f64>> {
    check_symmetric(a)?;
    if a.rows() == 0 {
        return Err(Error::InvalidArgument("empty matrix has no eigenvalues".into()));
    }
    let mut sym = a.clone();
    sym.symmetrize();
    sym.to_faer()
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::InvalidArgument(format!("eigendecomposition failed: {e:?}")))
}

pub fn symmetric_eigen(a: &DenseMatrix) -> Result<SymmetricEigen> {
    let eig = faer_eigen(a)?;
    let n = a.rows();
    let (s, u) = (eig.S(), eig.U());
    Ok(SymmetricEigen { values: (0..n).map(|i| s[i]).collect(), vectors: DenseMatrix::from_fn(n, n, |r, c| u[(r, c)]) })
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn extreme_eigs(a: &DenseMatrix) -> Result<(f64, f64)> {
    let values = faer_eigen(a)?.S().column_vector().to_owned();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Top-`k` singular triplets of `x`.
pub fn thin_svd(x: &DenseMatrix, k: usize) -> Result<SvdResult> {
    let (n, p) = x.shape();
    let full = n.min(p);
    if k > full {
        return Err(Error::InvalidArgument(format!("requested {k} singular triplets from a {n}x{p} matrix")));
    }
    let svd = x.to_faer().thin_svd().map_err(|e| Error::InvalidArgument(format!("SVD failed: {e:?}")))?;
    let (u, s, v) = (svd.U(), svd.S(), svd.V());
    let mut order: Vec<usize> = (0..full).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    order.truncate(k);
    Ok(SvdResult {
        u: DenseMatrix::from_fn(n, k, |r, c| u[(r, order[c])]),
        singular_values: order.iter().map(|&i| s[i]).collect(),
        v: DenseMatrix::from_fn(p, k, |r, c| v[(r, order[c])]),
    })
}
