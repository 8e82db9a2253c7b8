use super::monitor::Monitor;
use super::{outer_runner_control, require_side, SolveReport, SolverConfig, SolverMethod};
use crate::closedform::RidgeProblem;
use crate::densela::spd_factor;
use crate::error::Result;
use crate::pcg::{fixed_point_run_observed, pcg_run_observed, FnOperator, IterState};
use crate::sketch::{apply_sketch, SketchOperator, SketchSide};

/// Iterative Hessian sketch: `w ← w + H̃⁻¹(Xᵀ(y − Xw)/n − λw)` with
/// `H̃ = XᵀΠΠᵀX/n + λI` factored once.
pub fn ihs(prob: &RidgeProblem, pi: &SketchOperator, cfg: &SolverConfig) -> Result<SolveReport> {
    hessian_sketch_run(prob, pi, cfg, false)
}

/// Conjugate-gradient acceleration of [`ihs`]: PCG on `H w = Xᵀy/n`
/// preconditioned by the same sketched Hessian.
pub fn acc_ihs(prob: &RidgeProblem, pi: &SketchOperator, cfg: &SolverConfig) -> Result<SolveReport> {
    hessian_sketch_run(prob, pi, cfg, true)
}

fn hessian_sketch_run(
    prob: &RidgeProblem,
    pi: &SketchOperator,
    cfg: &SolverConfig,
    accelerated: bool,
) -> Result<SolveReport> {
    let method = if accelerated { SolverMethod::AccIhs } else { SolverMethod::Ihs };
    require_side(method, pi, prob.n(), "sample")?;
    let p = prob.p();
    let sx = apply_sketch(prob.x(), pi, SketchSide::LeftTranspose)?;
    let mut h = sx.gram();
    drop(sx);
    h.scale_in_place(1.0 / prob.n() as f64);
    h.add_diag(prob.lambda());
    let mut factor = spd_factor(&h)?;
    drop(h);

    let a = FnOperator::new(p, |w: &[f64]| prob.apply_primal_hessian(w));
    let b = prob.xty_over_n();
    let x0 = vec![0.0; p];
    let ctl = outer_runner_control(cfg);
    let mut mon = Monitor::new(prob, cfg)?;
    let mut observer = |s: &IterState<'_>| mon.observe(s.iteration, s.x, None, s.precond_solves);
    let out = if accelerated {
        pcg_run_observed(&a, &mut factor, &b, &x0, &ctl, &mut observer)?
    } else {
        fixed_point_run_observed(&a, &mut factor, &b, &x0, &ctl, &mut observer)?
    };
    let status = mon.catch_up(out.trace.iterations(), &out.x, None, out.trace.precond_solves, out.trace.status);
    let solution = mon.last_pair();
    Ok(mon.into_report(method, solution, status, p, None))
}
