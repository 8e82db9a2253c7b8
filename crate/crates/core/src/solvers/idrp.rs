use super::monitor::Monitor;
use super::{outer_runner_control, require_side, SolveReport, SolverConfig, SolverMethod};
use crate::closedform::{primal_from_dual, RidgeProblem, DUAL_SIZE_GUARD};
use crate::densela::{spd_factor, sub_vec, DenseMatrix, SpdFactorization};
use crate::error::{Error, Result};
use crate::pcg::{pcg_run_observed, FnOperator, FnPreconditioner, IterState, Preconditioner, Status, Verdict};
use crate::sketch::{apply_sketch, SketchOperator, SketchSide};

/// Preconditioner flavour for [`acc_idrp`]. Both give identical iterates;
/// they differ by the constant factor `λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AccIdrpVariant {
    /// `u = r − XRẑ` with `ẑ` from the projected primal problem.
    Primal,
    /// `u = (XRRᵀXᵀ/n + λI)⁻¹ r`, applied through the `d×d` factor.
    Dual,
}

/// `BᵀB/n + λI` for `B = XR`.
pub(super) fn projected_gram_factor(b: &DenseMatrix, n: usize, lambda: f64) -> Result<SpdFactorization> {
    let mut g = b.gram();
    g.scale_in_place(1.0 / n as f64);
    g.add_diag(lambda);
    spd_factor(&g)
}

/// Iterative dual random projection. Each step solves the `d`-dimensional
/// projected problem around the current iterate and maps back through the
/// dual variable.
pub fn idrp(prob: &RidgeProblem, r: &SketchOperator, cfg: &SolverConfig) -> Result<SolveReport> {
    let method = SolverMethod::Idrp;
    require_side(method, r, prob.p(), "feature")?;
    let (n, p) = (prob.n(), prob.p());
    let inv_n = 1.0 / n as f64;
    let lambda = prob.lambda();
    let b = apply_sketch(prob.x(), r, SketchSide::Right)?;
    let factor = projected_gram_factor(&b, n, lambda)?;
    let mut mon = Monitor::new(prob, cfg)?;

    let mut w = vec![0.0; p];
    let mut status = Status::MaxIters;
    if let Verdict::Stop(s) = mon.observe(0, &w, Some(&vec![0.0; n]), 0) {
        status = s;
    } else {
        for t in 1..=cfg.outer.max_iters {
            let c = sub_vec(prob.y(), &prob.x().matvec(&w));
            let rtw = r.matrix().t_matvec(&w);
            let rhs: Vec<f64> = b.t_matvec(&c).into_iter().zip(&rtw).map(|(v, q)| v * inv_n - lambda * q).collect();
            let z = factor.solve(&rhs)?;
            let alpha = sub_vec(&c, &b.matvec(&z));
            w = primal_from_dual(prob, &alpha)?;
            if let Verdict::Stop(s) = mon.observe(t, &w, Some(&alpha), t) {
                status = s;
                break;
            }
        }
    }
    let solution = mon.last_pair();
    Ok(mon.into_report(method, solution, status, r.sketch_dim(), None))
}

/// PCG on the dual system `(XXᵀ/n + λI)α = λy` preconditioned by the
/// projected dual Hessian `XRRᵀXᵀ/n + λI`.
pub fn acc_idrp(
    prob: &RidgeProblem,
    r: &SketchOperator,
    variant: AccIdrpVariant,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let method = match variant {
        AccIdrpVariant::Primal => SolverMethod::AccIdrp,
        AccIdrpVariant::Dual => SolverMethod::AccIdrpDual,
    };
    require_side(method, r, prob.p(), "feature")?;
    let n = prob.n();
    if variant == AccIdrpVariant::Dual && n > DUAL_SIZE_GUARD {
        return Err(Error::TooLarge(format!(
            "dual-version preconditioner on n = {n} exceeds the guard {DUAL_SIZE_GUARD}"
        )));
    }
    let inv_n = 1.0 / n as f64;
    let lambda = prob.lambda();
    let b = apply_sketch(prob.x(), r, SketchSide::Right)?;
    let factor = projected_gram_factor(&b, n, lambda)?;
    let scale = match variant {
        AccIdrpVariant::Primal => 1.0,
        AccIdrpVariant::Dual => 1.0 / lambda,
    };
    let mut pre = FnPreconditioner::new(n, |res: &[f64]| {
        let rhs: Vec<f64> = b.t_matvec(res).into_iter().map(|v| v * inv_n).collect();
        let z = factor.backward(&factor.forward(&rhs));
        let bz = b.matvec(&z);
        Ok(res.iter().zip(&bz).map(|(ri, bi)| scale * (ri - bi)).collect())
    });
    let (mon, status) = dual_pcg_run(prob, cfg, &mut pre, &|solves| solves)?;
    let solution = mon.last_pair();
    Ok(mon.into_report(method, solution, status, r.sketch_dim(), None))
}

/// Outer dual PCG shared by the accelerated dual solvers. `count` maps the
/// number of preconditioner applications to the subproblem count.
pub(super) fn dual_pcg_run<'a>(
    prob: &'a RidgeProblem,
    cfg: &SolverConfig,
    pre: &mut dyn Preconditioner,
    count: &dyn Fn(usize) -> usize,
) -> Result<(Monitor<'a>, Status)> {
    let n = prob.n();
    let a = FnOperator::new(n, |alpha: &[f64]| prob.apply_dual_hessian(alpha));
    let rhs: Vec<f64> = prob.y().iter().map(|v| prob.lambda() * v).collect();
    let x0 = vec![0.0; n];
    let ctl = outer_runner_control(cfg);
    let mut mon = Monitor::new(prob, cfg)?;
    let mut observer = |s: &IterState<'_>| {
        let w = primal_from_dual(prob, s.x).expect("dual iterate has length n");
        mon.observe(s.iteration, &w, Some(s.x), count(s.precond_solves))
    };
    let out = pcg_run_observed(&a, pre, &rhs, &x0, &ctl, &mut observer)?;
    let w = primal_from_dual(prob, &out.x)?;
    let status =
        mon.catch_up(out.trace.iterations(), &w, Some(&out.x), count(out.trace.precond_solves), out.trace.status);
    Ok((mon, status))
}
