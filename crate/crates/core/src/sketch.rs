//! Random sketching operators `Π ∈ ℝⁿˣᵐ` (sample reduction) and
//! `R ∈ ℝᵖˣᵈ` (dimension reduction).
//!
//! Entries are drawn from `ChaCha8Rng::seed_from_u64(seed)` in row-major
//! order, so an operator is a pure function of `(kind, input_dim,
//! sketch_dim, seed)`. Gaussian entries are `N(0, 1/sketch_dim)`; Rademacher
//! entries are `±1/√sketch_dim`. Both satisfy `E[S Sᵀ] = I`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::densela::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SketchKind {
    Gaussian,
    Rademacher,
    /// `S = I`; makes every sketched solver exact.
    Identity,
    /// Caller-supplied matrix (see [`SketchOperator::from_matrix`]).
    Explicit,
}

impl SketchKind {
    pub fn name(self) -> &'static str {
        match self {
            SketchKind::Gaussian => "gaussian",
            SketchKind::Rademacher => "rademacher",
            SketchKind::Identity => "identity",
            SketchKind::Explicit => "explicit",
        }
    }
}

/// Which product [`apply_sketch`] forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SketchSide {
    /// `Πᵀ X` (m×p); the operator maps the sample dimension `n`.
    LeftTranspose,
    /// `X R` (n×d); the operator maps the feature dimension `p`.
    Right,
}

#[derive(Clone, Debug)]
pub struct SketchOperator {
    kind: SketchKind,
    seed: u64,
    matrix: DenseMatrix,
}

impl SketchOperator {
    /// Wraps an arbitrary `input_dim × sketch_dim` matrix.
    pub fn from_matrix(matrix: DenseMatrix) -> Result<Self> {
        if matrix.rows() == 0 || matrix.cols() == 0 {
            return Err(Error::InvalidArgument("sketch dimensions must be positive".into()));
        }
        Ok(Self { kind: SketchKind::Explicit, seed: 0, matrix })
    }

    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    pub fn input_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn sketch_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }
}

pub fn make_sketch(kind: SketchKind, input_dim: usize, sketch_dim: usize, seed: u64) -> Result<SketchOperator> {
    if input_dim == 0 || sketch_dim == 0 {
        return Err(Error::InvalidArgument(format!(
            "sketch dimensions must be positive (got {input_dim} -> {sketch_dim})"
        )));
    }
    let scale = 1.0 / (sketch_dim as f64).sqrt();
    let matrix = match kind {
        SketchKind::Identity => {
            if input_dim != sketch_dim {
                return Err(Error::IdentityDimMismatch { input_dim, sketch_dim });
            }
            DenseMatrix::identity(input_dim)
        }
        SketchKind::Gaussian => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            DenseMatrix::from_fn(input_dim, sketch_dim, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
        }
        SketchKind::Rademacher => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            DenseMatrix::from_fn(input_dim, sketch_dim, |_, _| if rng.random::<bool>() { scale } else { -scale })
        }
        SketchKind::Explicit => {
            return Err(Error::InvalidArgument("explicit sketches are built with SketchOperator::from_matrix".into()))
        }
    };
    Ok(SketchOperator { kind, seed, matrix })
}

/// Forms `Πᵀ X` or `X R` exactly.
pub fn apply_sketch(x: &DenseMatrix, op: &SketchOperator, side: SketchSide) -> Result<DenseMatrix> {
    let (n, p) = x.shape();
    match side {
        SketchSide::LeftTranspose => {
            if op.input_dim() != n {
                return Err(Error::DimensionMismatch(format!(
                    "left sketch expects {} rows, data has {n}",
                    op.input_dim()
                )));
            }
            if op.kind == SketchKind::Identity {
                return Ok(x.clone());
            }
            Ok(op.matrix.t_matmul(x))
        }
        SketchSide::Right => {
            if op.input_dim() != p {
                return Err(Error::DimensionMismatch(format!(
                    "right sketch expects {} columns, data has {p}",
                    op.input_dim()
                )));
            }
            if op.kind == SketchKind::Identity {
                return Ok(x.clone());
            }
            Ok(x.matmul(&op.matrix))
        }
    }
}

/// Derives an independent 64-bit seed from a base seed and a stream tag
/// (splitmix64 finalizer), e.g. to draw `Π` and `R` from one user seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
