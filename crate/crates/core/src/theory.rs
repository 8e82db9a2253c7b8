//! Computable sketch-quality quantities: subspace embedding constants,
//! Monte-Carlo Gaussian widths, preconditioned condition numbers, rate
//! envelopes, iteration-count predictors and the explicit constants of the
//! one-shot recovery bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::closedform::RidgeProblem;
use crate::densela::{axpy, dot, extreme_eigs, norm2, spd_factor, sub_vec, thin_svd, DenseMatrix};
use crate::error::{Error, Result};
use crate::sketch::{apply_sketch, SketchOperator, SketchSide};

/// Relative cut-off on singular values defining the numerical rank.
pub const RANK_TOL: f64 = 1e-10;
/// Largest eigenproblem [`kappa_sketch`] will form.
pub const KAPPA_DIM_GUARD: usize = 2000;
pub const DEFAULT_WIDTH_TRIALS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubspaceKind {
    /// Range of `X` in `ℝⁿ`.
    ColumnSpace,
    /// Range of `Xᵀ` in `ℝᵖ`.
    RowSpace,
}

impl SubspaceKind {
    pub fn ambient_dim(self, x: &DenseMatrix) -> usize {
        match self {
            SubspaceKind::ColumnSpace => x.rows(),
            SubspaceKind::RowSpace => x.cols(),
        }
    }

    /// The subspace a sketch with the given input dimension acts on.
    pub fn for_sketch(x: &DenseMatrix, op: &SketchOperator) -> Result<Self> {
        if op.input_dim() == x.rows() {
            Ok(SubspaceKind::ColumnSpace)
        } else if op.input_dim() == x.cols() {
            Ok(SubspaceKind::RowSpace)
        } else {
            Err(Error::DimensionMismatch(format!(
                "sketch input dimension {} matches neither side of a {}x{} matrix",
                op.input_dim(),
                x.rows(),
                x.cols()
            )))
        }
    }
}

/// Orthonormal basis (as columns) of the chosen subspace of `x`, truncated
/// at the numerical rank.
pub fn subspace_basis(x: &DenseMatrix, kind: SubspaceKind) -> Result<DenseMatrix> {
    let k = x.rows().min(x.cols());
    let svd = thin_svd(x, k)?;
    let rank = svd.numerical_rank(RANK_TOL);
    let full = match kind {
        SubspaceKind::ColumnSpace => svd.u,
        SubspaceKind::RowSpace => svd.v,
    };
    Ok(DenseMatrix::from_fn(full.rows(), rank, |i, j| full.get(i, j)))
}

/// `inf uᵀSSᵀu` over unit vectors `u` of the subspace of `x` the sketch
/// acts on; the smallest eigenvalue of `(SᵀU)ᵀ(SᵀU)`.
pub fn rho1(x: &DenseMatrix, s: &SketchOperator) -> Result<f64> {
    let kind = SubspaceKind::for_sketch(x, s)?;
    let u = subspace_basis(x, kind)?;
    if u.cols() == 0 {
        return Err(Error::InvalidArgument("matrix has numerical rank 0".into()));
    }
    let stu = apply_sketch(&u, s, SketchSide::LeftTranspose)?;
    Ok(extreme_eigs(&stu.gram())?.0)
}

/// `sup |uᵀ(SSᵀ − I)v|` over unit vectors `u` of the subspace of `x` the
/// sketch acts on; equals `‖Uᵀ(SSᵀ − I)v‖₂`.
pub fn rho2(x: &DenseMatrix, s: &SketchOperator, v: &[f64]) -> Result<f64> {
    let kind = SubspaceKind::for_sketch(x, s)?;
    if v.len() != s.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a sketch on dimension {}",
            v.len(),
            s.input_dim()
        )));
    }
    let u = subspace_basis(x, kind)?;
    let ssv = s.matrix().matvec(&s.matrix().t_matvec(v));
    let diff: Vec<f64> = ssv.iter().zip(v).map(|(a, b)| a - b).collect();
    Ok(norm2(&u.t_matvec(&diff)))
}

/// Monte-Carlo estimate of the Gaussian width `E‖Uᵀg‖₂` of the unit sphere
/// of a subspace of `x`. Returns `(mean, standard error)`.
pub fn gaussian_width_mc(x: &DenseMatrix, kind: SubspaceKind, trials: usize, seed: u64) -> Result<(f64, f64)> {
    if trials < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 trials, got {trials}")));
    }
    let u = subspace_basis(x, kind)?;
    if u.cols() == 0 {
        return Ok((0.0, 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ambient = u.rows();
    let samples: Vec<f64> = (0..trials)
        .map(|_| {
            let g: Vec<f64> = (0..ambient).map(|_| StandardNormal.sample(&mut rng)).collect();
            norm2(&u.t_matvec(&g))
        })
        .collect();
    let t = trials as f64;
    let mean = samples.iter().sum::<f64>() / t;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (t - 1.0);
    Ok((mean, (var / t).sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaSide {
    /// `κ(H̃⁻¹H)` with `H = XᵀX/n + λI`, `H̃ = XᵀΠΠᵀX/n + λI`.
    HessianSketch,
    /// Dual analogue with `XXᵀ/n + λI` and `XRRᵀXᵀ/n + λI`.
    DualRandomProjection,
}

/// Condition number of the sketch-preconditioned Hessian: the ratio of the
/// extreme generalized eigenvalues of the exact and sketched Hessians.
pub fn kappa_sketch(prob: &RidgeProblem, s: &SketchOperator, side: KappaSide) -> Result<f64> {
    let (n, p) = (prob.n(), prob.p());
    let inv_n = 1.0 / n as f64;
    let (mut exact, mut sketched) = match side {
        KappaSide::HessianSketch => {
            guard(p)?;
            if s.input_dim() != n {
                return Err(Error::SketchSide {
                    method: "kappa/hessian-sketch",
                    detail: format!("sample sketch must act on n = {n}, got {}", s.input_dim()),
                });
            }
            (prob.x().gram(), apply_sketch(prob.x(), s, SketchSide::LeftTranspose)?.gram())
        }
        KappaSide::DualRandomProjection => {
            guard(n)?;
            if s.input_dim() != p {
                return Err(Error::SketchSide {
                    method: "kappa/dual-random-projection",
                    detail: format!("feature sketch must act on p = {p}, got {}", s.input_dim()),
                });
            }
            (prob.x().outer_gram(), apply_sketch(prob.x(), s, SketchSide::Right)?.outer_gram())
        }
    };
    for m in [&mut exact, &mut sketched] {
        m.scale_in_place(inv_n);
        m.add_diag(prob.lambda());
    }
    // L⁻¹ H L⁻ᵀ with L Lᵀ = H̃ has the same spectrum as H̃⁻¹H.
    let l = spd_factor(&sketched)?;
    let dim = exact.rows();
    let mut half = DenseMatrix::zeros(dim, dim);
    for j in 0..dim {
        for (i, v) in l.forward(&exact.column(j)).into_iter().enumerate() {
            half.set(i, j, v);
        }
    }
    let half_t = half.transpose();
    let mut congruent = DenseMatrix::zeros(dim, dim);
    for j in 0..dim {
        for (i, v) in l.forward(&half_t.column(j)).into_iter().enumerate() {
            congruent.set(i, j, v);
        }
    }
    congruent.symmetrize();
    let (lo, hi) = extreme_eigs(&congruent)?;
    if !(lo > 0.0) {
        return Err(Error::NotPositiveDefinite { index: 0, pivot: lo });
    }
    Ok(hi / lo)
}

fn guard(dim: usize) -> Result<()> {
    if dim > KAPPA_DIM_GUARD {
        return Err(Error::TooLarge(format!(
            "condition-number eigenproblem of dimension {dim} exceeds {KAPPA_DIM_GUARD}"
        )));
    }
    Ok(())
}

/// `t ↦ 2((√κ − 1)/(√κ + 1))ᵗ · w_norm`, the PCG error envelope in the
/// X-norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEnvelope {
    pub kappa: f64,
    pub w_norm: f64,
}

impl RateEnvelope {
    pub fn ratio(&self) -> f64 {
        let s = self.kappa.sqrt();
        (s - 1.0) / (s + 1.0)
    }

    pub fn at(&self, t: usize) -> f64 {
        let r = self.ratio();
        if r == 0.0 {
            return if t == 0 { 2.0 * self.w_norm } else { 0.0 };
        }
        2.0 * r.powi(t.min(i32::MAX as usize) as i32) * self.w_norm
    }
}

pub fn rate_envelope(kappa: f64, w_norm: f64) -> Result<RateEnvelope> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::InvalidArgument(format!("condition number must be at least 1, got {kappa}")));
    }
    if !(w_norm >= 0.0) {
        return Err(Error::InvalidArgument(format!("norm must be nonnegative, got {w_norm}")));
    }
    Ok(RateEnvelope { kappa, w_norm })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IterationScheme {
    /// `⌈(1+ρ)/(1−ρ) · log(2‖w*‖/ε)⌉`
    Ihs,
    /// `⌈√(1/(1−2ρ)) · log(2‖w*‖/ε)⌉`
    AccIhs,
    /// Outer loop of the primal-dual sketch: `⌈(1+ρ)/(1−ρ) · log(4‖w*‖/ε)⌉`
    IpdsOuter,
    /// Inner loop: `⌈(1+ρ)/(1−ρ) · log(40 λ_max² ‖w*‖/(λ ε))⌉`, with
    /// `λ_max` the top eigenvalue of `XᵀX/n`.
    IpdsInner { lambda_max: f64, lambda: f64 },
    /// Accelerated outer loop: `⌈√(1/(1−2ρ)) · log(4‖w*‖/ε)⌉`
    AccIpdsOuter,
    /// Accelerated inner loop with the same logarithm as `IpdsInner`.
    AccIpdsInner { lambda_max: f64, lambda: f64 },
}

/// Predicted iteration count. Negative logarithms (already accurate
/// enough) give 0.
pub fn iteration_counts(rho: f64, w_norm: f64, eps: f64, scheme: IterationScheme) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("accuracy must be positive, got {eps}")));
    }
    if !(w_norm >= 0.0) {
        return Err(Error::InvalidArgument(format!("norm must be nonnegative, got {w_norm}")));
    }
    let accelerated = matches!(
        scheme,
        IterationScheme::AccIhs | IterationScheme::AccIpdsOuter | IterationScheme::AccIpdsInner { .. }
    );
    let limit = if accelerated { 0.5 } else { 1.0 };
    if !(0.0..limit).contains(&rho) {
        return Err(Error::InvalidArgument(format!("rho must lie in [0, {limit}), got {rho}")));
    }
    let factor = if accelerated { (1.0 / (1.0 - 2.0 * rho)).sqrt() } else { (1.0 + rho) / (1.0 - rho) };
    let log_arg = match scheme {
        IterationScheme::Ihs | IterationScheme::AccIhs => 2.0 * w_norm / eps,
        IterationScheme::IpdsOuter | IterationScheme::AccIpdsOuter => 4.0 * w_norm / eps,
        IterationScheme::IpdsInner { lambda_max, lambda } | IterationScheme::AccIpdsInner { lambda_max, lambda } => {
            if !(lambda > 0.0) {
                return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
            }
            40.0 * lambda_max * lambda_max * w_norm / (lambda * eps)
        }
    };
    if log_arg <= 1.0 {
        return Ok(0);
    }
    Ok((factor * log_arg.ln()).ceil() as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSide {
    /// Sample sketch of size `m`; ambient dimension `n`.
    HessianSketch,
    /// Feature sketch of size `d`; ambient dimension `p`.
    DualRandomProjection,
}

/// Explicit constants of the high-probability recovery bound for one-shot
/// Hessian sketch and dual random projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveryConstants {
    pub eps: f64,
    pub tau: f64,
    pub upsilon: f64,
    /// Multiplier of `‖w*‖` on the right-hand side; infinite when `eps ≥ 1`.
    pub bound: f64,
    /// Right-hand side of the sketch-size requirement.
    pub threshold: f64,
    pub thresholds_met: bool,
}

/// Inputs of [`recovery_constants`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveryInputs {
    pub sketch_dim: usize,
    /// Rank cut-off `r`.
    pub r: usize,
    /// `n` for the Hessian sketch, `p` for dual random projection.
    pub ambient: usize,
    pub delta: f64,
    /// `σ_{r+1}(X)`
    pub sigma_tail: f64,
    pub lambda: f64,
    pub n: usize,
    pub side: BoundSide,
    /// How far `w*` is from the top-`r` subspace, relative.
    pub rho_orth: f64,
}

fn validate_recovery(inp: &RecoveryInputs) -> Result<()> {
    if !(inp.delta > 0.0 && inp.delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {}", inp.delta)));
    }
    if inp.r == 0 || inp.r >= inp.ambient {
        return Err(Error::InvalidArgument(format!("rank cut-off {} must lie in [1, {})", inp.r, inp.ambient)));
    }
    if inp.sketch_dim == 0 || inp.n == 0 {
        return Err(Error::InvalidArgument("sketch dimension and n must be positive".into()));
    }
    if !(inp.lambda > 0.0) || !(inp.sigma_tail >= 0.0) || !(inp.rho_orth >= 0.0) {
        return Err(Error::InvalidArgument("lambda must be positive, sigma and rho nonnegative".into()));
    }
    Ok(())
}

/// `max(32(r+1), 4 log(2k/δ), c σ²) · log(ambient/δ)` where `k` is the
/// sketch size and `c = 784/(9λ)` (Hessian sketch) or `784p/(9λn)`.
fn size_threshold(inp: &RecoveryInputs, k: usize) -> f64 {
    let r = inp.r as f64;
    let delta = inp.delta;
    let sigma_term = match inp.side {
        BoundSide::HessianSketch => 784.0 * inp.sigma_tail.powi(2) / (9.0 * inp.lambda),
        BoundSide::DualRandomProjection => {
            784.0 * inp.ambient as f64 * inp.sigma_tail.powi(2) / (9.0 * inp.lambda * inp.n as f64)
        }
    };
    let first = (32.0 * (r + 1.0)).max(4.0 * (2.0 * k as f64 / delta).ln()).max(sigma_term);
    first * (inp.ambient as f64 / delta).ln()
}

pub fn recovery_constants(inp: &RecoveryInputs) -> Result<RecoveryConstants> {
    validate_recovery(inp)?;
    let k = inp.sketch_dim as f64;
    let r = inp.r as f64;
    let a = inp.ambient as f64;
    let delta = inp.delta;
    let eps = 2.0 * (2.0 * (r + 1.0) / k * (2.0 * r / delta).ln()).sqrt();
    let tau = 7.0 / 3.0 * (2.0 * (a - r) / k * (a / delta).ln()).sqrt();
    let upsilon = 2.0 * (2.0 * (a - r + 1.0) / k * (2.0 * (a - r) / delta).ln()).sqrt();
    let s2 = inp.sigma_tail * inp.sigma_tail;
    let ln = inp.lambda * inp.n as f64;
    let rho2 = inp.rho_orth * inp.rho_orth;
    let bound = if eps < 1.0 {
        let first = (1.0 / (1.0 - eps) + s2 / ln).sqrt();
        let second = ((eps * eps + tau * tau * rho2) / (1.0 - eps)
            + (tau * tau * s2 + rho2 * upsilon * upsilon * s2) / ln)
            .sqrt();
        4.0 * first * second
    } else {
        f64::INFINITY
    };
    let threshold = size_threshold(inp, inp.sketch_dim);
    Ok(RecoveryConstants { eps, tau, upsilon, bound, threshold, thresholds_met: k >= threshold })
}

/// Smallest sketch size meeting the sketch-size requirement (the
/// `sketch_dim` field of `inp` is ignored).
pub fn min_sketch_dim(inp: &RecoveryInputs) -> Result<usize> {
    validate_recovery(&RecoveryInputs { sketch_dim: 1, ..*inp })?;
    let mut k = 1usize;
    loop {
        let need = size_threshold(inp, k).ceil();
        if !need.is_finite() || need > 1e12 {
            return Err(Error::InvalidArgument("sketch-size requirement is unbounded".into()));
        }
        if k as f64 >= need {
            return Ok(k);
        }
        k = need as usize;
    }
}

/// `σ_{r+1}(X)` and the relative part of the solution outside the top-`r`
/// singular subspace: `Xw` against the left subspace for the Hessian sketch,
/// `w` against the right subspace for dual random projection.
pub fn tail_geometry(x: &DenseMatrix, r: usize, side: BoundSide, w: &[f64]) -> Result<(f64, f64)> {
    let full = x.rows().min(x.cols());
    if r == 0 || r > full {
        return Err(Error::InvalidArgument(format!("rank cut-off {r} must lie in [1, {full}]")));
    }
    if w.len() != x.cols() {
        return Err(Error::DimensionMismatch(format!("direction of length {} for p = {}", w.len(), x.cols())));
    }
    let svd = thin_svd(x, full)?;
    let sigma_tail = svd.singular_values.get(r).copied().unwrap_or(0.0);
    let (basis, v) = match side {
        BoundSide::HessianSketch => (&svd.u, x.matvec(w)),
        BoundSide::DualRandomProjection => (&svd.v, w.to_vec()),
    };
    let total = norm2(&v);
    if total == 0.0 {
        return Ok((sigma_tail, 0.0));
    }
    let mut par = vec![0.0; v.len()];
    for j in 0..r {
        let col = basis.column(j);
        axpy(dot(&col, &v), &col, &mut par);
    }
    Ok((sigma_tail, norm2(&sub_vec(&v, &par)) / total))
}

/// Summary of sketch-quality quantities for one operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryReport {
    pub rho1: f64,
    pub rho2: f64,
    pub width_sq_estimate: f64,
    /// `None` when the eigenproblem exceeds [`KAPPA_DIM_GUARD`].
    pub kappa: Option<f64>,
    pub envelope: Option<RateEnvelope>,
}

/// Evaluates the report for sketch `s` on `prob`. `v` is the direction used
/// for `rho2` and `w_norm` scales the envelope.
pub fn theory_report(
    prob: &RidgeProblem,
    s: &SketchOperator,
    v: &[f64],
    w_norm: f64,
    trials: usize,
    seed: u64,
) -> Result<TheoryReport> {
    let kind = SubspaceKind::for_sketch(prob.x(), s)?;
    let r1 = rho1(prob.x(), s)?;
    let r2 = rho2(prob.x(), s, v)?;
    let (width, _) = gaussian_width_mc(prob.x(), kind, trials, seed)?;
    let side = match kind {
        SubspaceKind::ColumnSpace => KappaSide::HessianSketch,
        SubspaceKind::RowSpace => KappaSide::DualRandomProjection,
    };
    let kappa = match kappa_sketch(prob, s, side) {
        Ok(k) => Some(k),
        Err(Error::TooLarge(_)) => None,
        Err(e) => return Err(e),
    };
    let envelope = kappa.map(|k| rate_envelope(k.max(1.0), w_norm)).transpose()?;
    Ok(TheoryReport { rho1: r1, rho2: r2, width_sq_estimate: width * width, kappa, envelope })
}
