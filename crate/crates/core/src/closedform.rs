//! Ridge problem definition, exact solutions in primal and dual form, the
//! four one-shot sketched estimators, and the primal↔dual maps
//! `α = y − Xw`, `w = Xᵀα/(λn)`.

use crate::densela::{norm2, spd_factor, sub_vec, DenseMatrix};
use crate::error::{Error, Result};
use crate::sketch::{apply_sketch, SketchOperator, SketchSide};

/// Largest `n` for which an `n×n` dual system is factored unless explicitly
/// allowed.
pub const DUAL_SIZE_GUARD: usize = 5000;

/// `min_w ‖y − Xw‖²/(2n) + (λ/2)‖w‖²` with `λ > 0`.
#[derive(Clone, Debug)]
pub struct RidgeProblem {
    x: DenseMatrix,
    y: Vec<f64>,
    lambda: f64,
}

impl RidgeProblem {
    pub fn new(x: DenseMatrix, y: Vec<f64>, lambda: f64) -> Result<Self> {
        if y.len() != x.rows() {
            return Err(Error::DimensionMismatch(format!("response of length {} for {} samples", y.len(), x.rows())));
        }
        if x.rows() == 0 || x.cols() == 0 {
            return Err(Error::InvalidArgument("empty design matrix".into()));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!("lambda must be positive and finite, got {lambda}")));
        }
        if !x.is_finite() {
            return Err(Error::NonFinite("design matrix"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("response"));
        }
        Ok(Self { x, y, lambda })
    }

    pub fn x(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn p(&self) -> usize {
        self.x.cols()
    }

    /// Primal objective `‖y − Xw‖²/(2n) + (λ/2)‖w‖²`.
    pub fn objective(&self, w: &[f64]) -> f64 {
        let resid = sub_vec(&self.y, &self.x.matvec(w));
        let r = norm2(&resid);
        let wn = norm2(w);
        r * r / (2.0 * self.n() as f64) + 0.5 * self.lambda * wn * wn
    }

    /// `Xᵀy / n`
    pub fn xty_over_n(&self) -> Vec<f64> {
        let inv_n = 1.0 / self.n() as f64;
        self.x.t_matvec(&self.y).into_iter().map(|v| v * inv_n).collect()
    }

    /// `(XᵀX/n + λI) w`, matrix-free.
    pub fn apply_primal_hessian(&self, w: &[f64]) -> Vec<f64> {
        let inv_n = 1.0 / self.n() as f64;
        let xw = self.x.matvec(w);
        self.x.t_matvec(&xw).into_iter().zip(w).map(|(v, wi)| v * inv_n + self.lambda * wi).collect()
    }

    /// `(XXᵀ/n + λI) α`, matrix-free.
    pub fn apply_dual_hessian(&self, alpha: &[f64]) -> Vec<f64> {
        let inv_n = 1.0 / self.n() as f64;
        let xta = self.x.t_matvec(alpha);
        self.x.matvec(&xta).into_iter().zip(alpha).map(|(v, ai)| v * inv_n + self.lambda * ai).collect()
    }

    fn check_w(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.p() {
            return Err(Error::DimensionMismatch(format!("primal vector of length {} for p = {}", w.len(), self.p())));
        }
        Ok(())
    }

    fn check_alpha(&self, alpha: &[f64]) -> Result<()> {
        if alpha.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "dual vector of length {} for n = {}",
                alpha.len(),
                self.n()
            )));
        }
        Ok(())
    }
}

/// Primal iterate `w ∈ ℝᵖ` with its dual companion `α ∈ ℝⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimalDualPair {
    pub w: Vec<f64>,
    pub alpha: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactForm {
    /// Primal when `p ≤ n`, dual otherwise.
    Auto,
    /// `(λI_p + XᵀX/n)⁻¹ Xᵀy/n`
    Primal,
    /// `(Xᵀ/n)(λI_n + XXᵀ/n)⁻¹ y`
    Dual,
}

#[derive(Clone, Copy, Debug)]
pub struct ExactOptions {
    pub form: ExactForm,
    /// Permit dual systems larger than [`DUAL_SIZE_GUARD`].
    pub allow_large_dual: bool,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self { form: ExactForm::Auto, allow_large_dual: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosedFormMethod {
    Original,
    ClassicalSketch,
    RandomProjection,
    HessianSketch,
    DualRandomProjection,
}

impl ClosedFormMethod {
    pub const ALL: [ClosedFormMethod; 5] = [
        ClosedFormMethod::Original,
        ClosedFormMethod::ClassicalSketch,
        ClosedFormMethod::RandomProjection,
        ClosedFormMethod::HessianSketch,
        ClosedFormMethod::DualRandomProjection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClosedFormMethod::Original => "original",
            ClosedFormMethod::ClassicalSketch => "classical-sketch",
            ClosedFormMethod::RandomProjection => "random-projection",
            ClosedFormMethod::HessianSketch => "hessian-sketch",
            ClosedFormMethod::DualRandomProjection => "dual-random-projection",
        }
    }

    /// Which side of `X` the method's operator sketches.
    pub fn sketch_side(self) -> Option<SketchSide> {
        match self {
            ClosedFormMethod::Original => None,
            ClosedFormMethod::ClassicalSketch | ClosedFormMethod::HessianSketch => Some(SketchSide::LeftTranspose),
            ClosedFormMethod::RandomProjection | ClosedFormMethod::DualRandomProjection => Some(SketchSide::Right),
        }
    }
}

pub fn ridge_exact(prob: &RidgeProblem, form: ExactForm) -> Result<PrimalDualPair> {
    ridge_exact_with(prob, ExactOptions { form, ..ExactOptions::default() })
}

pub fn ridge_exact_with(prob: &RidgeProblem, opts: ExactOptions) -> Result<PrimalDualPair> {
    let (n, p) = (prob.n(), prob.p());
    let use_dual = match opts.form {
        ExactForm::Auto => p > n,
        ExactForm::Primal => false,
        ExactForm::Dual => true,
    };
    let inv_n = 1.0 / n as f64;
    let w = if use_dual {
        if n > DUAL_SIZE_GUARD && !opts.allow_large_dual {
            return Err(Error::TooLarge(format!("dual form would factor a {n}x{n} system (guard {DUAL_SIZE_GUARD})")));
        }
        let mut k = prob.x().outer_gram();
        k.scale_in_place(inv_n);
        k.add_diag(prob.lambda());
        let beta = spd_factor(&k)?.solve(prob.y())?;
        prob.x().t_matvec(&beta).into_iter().map(|v| v * inv_n).collect()
    } else {
        let mut h = prob.x().gram();
        h.scale_in_place(inv_n);
        h.add_diag(prob.lambda());
        spd_factor(&h)?.solve(&prob.xty_over_n())?
    };
    if w.iter().any(|v: &f64| !v.is_finite()) {
        return Err(Error::NonFinite("exact solution"));
    }
    let alpha = dual_from_primal(prob, &w)?;
    Ok(PrimalDualPair { w, alpha })
}

/// One-shot sketched estimator. `op` is `Π` (n→m) for the classical and
/// Hessian sketches and `R` (p→d) for the two random-projection methods.
pub fn sketched_closed_form(
    prob: &RidgeProblem,
    method: ClosedFormMethod,
    op: &SketchOperator,
) -> Result<PrimalDualPair> {
    let (n, p) = (prob.n(), prob.p());
    let inv_n = 1.0 / n as f64;
    let lambda = prob.lambda();
    let expected_input = match method.sketch_side() {
        None => return ridge_exact(prob, ExactForm::Auto),
        Some(SketchSide::LeftTranspose) => n,
        Some(SketchSide::Right) => p,
    };
    if op.input_dim() != expected_input {
        return Err(Error::SketchSide {
            method: method.name(),
            detail: format!("operator input dimension {} does not match the expected {expected_input}", op.input_dim()),
        });
    }

    let w = match method {
        ClosedFormMethod::Original => unreachable!(),
        ClosedFormMethod::ClassicalSketch | ClosedFormMethod::HessianSketch => {
            let sx = apply_sketch(prob.x(), op, SketchSide::LeftTranspose)?;
            let mut h = sx.gram();
            h.scale_in_place(inv_n);
            h.add_diag(lambda);
            let rhs = if method == ClosedFormMethod::ClassicalSketch {
                // 1/(2n) normalization kept on the sketched loss.
                let sy = op.matrix().t_matvec(prob.y());
                sx.t_matvec(&sy).into_iter().map(|v| v * inv_n).collect()
            } else {
                prob.xty_over_n()
            };
            spd_factor(&h)?.solve(&rhs)?
        }
        ClosedFormMethod::RandomProjection | ClosedFormMethod::DualRandomProjection => {
            let b = apply_sketch(prob.x(), op, SketchSide::Right)?;
            let mut g = b.gram();
            g.scale_in_place(inv_n);
            g.add_diag(lambda);
            let rhs: Vec<f64> = b.t_matvec(prob.y()).into_iter().map(|v| v * inv_n).collect();
            let z = spd_factor(&g)?.solve(&rhs)?;
            if method == ClosedFormMethod::RandomProjection {
                op.matrix().matvec(&z)
            } else {
                let alpha_hat = sub_vec(prob.y(), &b.matvec(&z));
                primal_from_dual(prob, &alpha_hat)?
            }
        }
    };
    let alpha = dual_from_primal(prob, &w)?;
    Ok(PrimalDualPair { w, alpha })
}

/// `α = y − Xw`
pub fn dual_from_primal(prob: &RidgeProblem, w: &[f64]) -> Result<Vec<f64>> {
    prob.check_w(w)?;
    Ok(sub_vec(prob.y(), &prob.x().matvec(w)))
}

/// `w = Xᵀα / (λn)`
pub fn primal_from_dual(prob: &RidgeProblem, alpha: &[f64]) -> Result<Vec<f64>> {
    prob.check_alpha(alpha)?;
    let c = 1.0 / (prob.lambda() * prob.n() as f64);
    Ok(prob.x().t_matvec(alpha).into_iter().map(|v| v * c).collect())
}
