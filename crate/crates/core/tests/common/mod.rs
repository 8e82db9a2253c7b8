#![allow(dead_code)]

use faer::linalg::solvers::Solve;
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use ridgesketch::closedform::{ClosedFormMethod, RidgeProblem};
use ridgesketch::densela::DenseMatrix;
use ridgesketch::sketch::{make_sketch, SketchKind, SketchOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vec(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Well-conditioned SPD matrix `GᵀG/dim + shift·I`.
pub fn random_spd(dim: usize, shift: f64, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    naive_gram(&g, 1.0 / dim as f64, shift)
}

pub fn random_problem(n: usize, p: usize, lambda: f64, seed: u64) -> RidgeProblem {
    let mut r = rng(seed);
    let x = gaussian_matrix(n, p, &mut r);
    let y = gaussian_vec(n, &mut r);
    RidgeProblem::new(x, y, lambda).unwrap()
}

/// `U Vᵀ` with standard normal factors.
pub fn low_rank_problem(n: usize, p: usize, rank: usize, lambda: f64, seed: u64) -> RidgeProblem {
    let mut r = rng(seed);
    let u = gaussian_matrix(n, rank, &mut r);
    let v = gaussian_matrix(p, rank, &mut r);
    let x = DenseMatrix::from_fn(n, p, |i, j| (0..rank).map(|k| u.get(i, k) * v.get(j, k)).sum());
    let y = gaussian_vec(n, &mut r);
    RidgeProblem::new(x, y, lambda).unwrap()
}

/// `scale·AᵀA + shift·I` by explicit triple loop.
pub fn naive_gram(a: &DenseMatrix, scale: f64, shift: f64) -> DenseMatrix {
    let (r, c) = a.shape();
    DenseMatrix::from_fn(c, c, |i, j| {
        let s: f64 = (0..r).map(|k| a.get(k, i) * a.get(k, j)).sum();
        scale * s + if i == j { shift } else { 0.0 }
    })
}

pub fn naive_matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| (0..a.cols()).map(|k| a.get(i, k) * b.get(k, j)).sum())
}

pub fn naive_matvec(a: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    (0..a.rows()).map(|i| (0..a.cols()).map(|k| a.get(i, k) * x[k]).sum()).collect()
}

pub fn naive_t_matvec(a: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    (0..a.cols()).map(|j| (0..a.rows()).map(|k| a.get(k, j) * x[k]).sum()).collect()
}

/// Partial-pivot LU solve, independent of the crate's own factorization.
pub fn oracle_solve(a: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let m = Mat::<f64>::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j));
    let rhs = Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
    let sol = m.partial_piv_lu().solve(&rhs);
    (0..b.len()).map(|i| sol[(i, 0)]).collect()
}

/// Primal ridge solution from the normal equations.
pub fn oracle_ridge(prob: &RidgeProblem) -> Vec<f64> {
    let n = prob.n() as f64;
    let h = naive_gram(prob.x(), 1.0 / n, prob.lambda());
    let rhs: Vec<f64> = naive_t_matvec(prob.x(), prob.y()).iter().map(|v| v / n).collect();
    oracle_solve(&h, &rhs)
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn rel(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d) / norm(b).max(f64::MIN_POSITIVE)
}

pub const LAMBDAS: [f64; 3] = [0.01, 0.1, 1.0];

/// Instance `i` of the seeded family: `n ≤ 40`, `p ≤ 30`, `m ≤ 40`, `d ≤ 10`.
pub fn instance(i: u64) -> (RidgeProblem, SketchOperator, SketchOperator) {
    let n = 5 + (i as usize * 7) % 36;
    let p = 2 + (i as usize * 11) % 29;
    let lambda = LAMBDAS[i as usize % 3];
    let prob = random_problem(n, p, lambda, 1000 + i);
    let m = 1 + (i as usize * 5) % 40;
    let d = 1 + (i as usize * 3) % 10;
    let pi = make_sketch(SketchKind::Gaussian, n, m, 2000 + i).unwrap();
    let r = make_sketch(SketchKind::Gaussian, p, d, 3000 + i).unwrap();
    (prob, pi, r)
}

pub fn oracle_closed_form(prob: &RidgeProblem, method: ClosedFormMethod, op: &SketchOperator) -> Vec<f64> {
    let n = prob.n() as f64;
    let lambda = prob.lambda();
    let x = prob.x();
    let s = op.matrix();
    match method {
        ClosedFormMethod::Original => oracle_ridge(prob),
        ClosedFormMethod::ClassicalSketch | ClosedFormMethod::HessianSketch => {
            let sx = naive_matmul(&s.transpose(), x);
            let h = naive_gram(&sx, 1.0 / n, lambda);
            let rhs = if method == ClosedFormMethod::ClassicalSketch {
                naive_t_matvec(&sx, &naive_t_matvec(s, prob.y()))
            } else {
                naive_t_matvec(x, prob.y())
            };
            let rhs: Vec<f64> = rhs.iter().map(|v| v / n).collect();
            oracle_solve(&h, &rhs)
        }
        ClosedFormMethod::RandomProjection => {
            let b = naive_matmul(x, s);
            let g = naive_gram(&b, 1.0 / n, lambda);
            let rhs: Vec<f64> = naive_t_matvec(&b, prob.y()).iter().map(|v| v / n).collect();
            naive_matvec(s, &oracle_solve(&g, &rhs))
        }
        ClosedFormMethod::DualRandomProjection => dual_route(prob, op),
    }
}

/// Hessian sketch of the dual: solve `(XRRᵀXᵀ/n + λI)α = λy` as an
/// `n × n` system, then map back with `w = Xᵀα/(λn)`.
pub fn dual_route(prob: &RidgeProblem, r: &SketchOperator) -> Vec<f64> {
    let (n, lambda) = (prob.n() as f64, prob.lambda());
    let b = naive_matmul(prob.x(), r.matrix());
    let k = naive_gram(&b.transpose(), 1.0 / n, lambda);
    let rhs: Vec<f64> = prob.y().iter().map(|v| lambda * v).collect();
    let alpha = oracle_solve(&k, &rhs);
    naive_t_matvec(prob.x(), &alpha).iter().map(|v| v / (lambda * n)).collect()
}
