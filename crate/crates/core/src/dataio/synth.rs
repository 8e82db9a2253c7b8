use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::densela::DenseMatrix;
use crate::error::{Error, Result};

/// Divisor giving the ill-conditioned correlation `0.5^{|i−j|/10}`.
pub const ILL_CONDITIONED_DIVISOR: f64 = 10.0;

const STREAM_DESIGN: u64 = 0;
const STREAM_COEFFICIENTS: u64 = 1;
const STREAM_NOISE: u64 = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SyntheticKind {
    /// Gaussian rows with covariance `Σᵢⱼ = 0.5^{|i−j|/divisor}`.
    Ar1 { divisor: f64 },
    /// `X = UVᵀ` with standard normal `U` (n×rank) and `V` (p×rank).
    LowRank { rank: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub n: usize,
    pub p: usize,
    pub noise_std: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn ar1(n: usize, p: usize, divisor: f64, seed: u64) -> Self {
        Self { kind: SyntheticKind::Ar1 { divisor }, n, p, noise_std: 1.0, seed }
    }

    pub fn low_rank(n: usize, p: usize, rank: usize, seed: u64) -> Self {
        Self { kind: SyntheticKind::LowRank { rank }, n, p, noise_std: 1.0, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(Error::InvalidArgument("n and p must be positive".into()));
        }
        if !(self.noise_std >= 0.0) || !self.noise_std.is_finite() {
            return Err(Error::InvalidArgument(format!("noise std must be nonnegative, got {}", self.noise_std)));
        }
        match self.kind {
            SyntheticKind::Ar1 { divisor } if !(divisor > 0.0) || !divisor.is_finite() => {
                Err(Error::InvalidArgument(format!("decay divisor must be positive, got {divisor}")))
            }
            SyntheticKind::LowRank { rank } if rank == 0 || rank > self.n.min(self.p) => {
                Err(Error::InvalidArgument(format!("rank {rank} must lie in [1, {}]", self.n.min(self.p))))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticData {
    pub x: DenseMatrix,
    pub y: Vec<f64>,
    pub beta_star: Vec<f64>,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Draws `(X, y, β*)` with `y = Xβ* + ε`, `β*ᵢ ~ U[0, 1]` and
/// `εᵢ ~ N(0, noise_std²)`. The design, coefficients and noise use separate
/// ChaCha8 streams of the same seed.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let (n, p) = (spec.n, spec.p);
    let mut rng = stream(spec.seed, STREAM_DESIGN);
    let x = match spec.kind {
        SyntheticKind::Ar1 { divisor } => {
            let phi = 0.5f64.powf(1.0 / divisor);
            let innov = (1.0 - phi * phi).sqrt();
            let mut data = Vec::with_capacity(n * p);
            for _ in 0..n {
                let mut prev: f64 = StandardNormal.sample(&mut rng);
                data.push(prev);
                for _ in 1..p {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    prev = phi * prev + innov * z;
                    data.push(prev);
                }
            }
            DenseMatrix::from_row_major(n, p, data)?
        }
        SyntheticKind::LowRank { rank } => {
            let u = DenseMatrix::from_fn(n, rank, |_, _| StandardNormal.sample(&mut rng));
            let v = DenseMatrix::from_fn(p, rank, |_, _| StandardNormal.sample(&mut rng));
            u.matmul_t(&v)
        }
    };
    let mut rng = stream(spec.seed, STREAM_COEFFICIENTS);
    let beta_star: Vec<f64> = (0..p).map(|_| rng.random::<f64>()).collect();
    let mut rng = stream(spec.seed, STREAM_NOISE);
    let noise = Normal::new(0.0, spec.noise_std).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let y = x.matvec(&beta_star).into_iter().map(|v| v + noise.sample(&mut rng)).collect();
    Ok(SyntheticData { x, y, beta_star })
}
