use std::cell::Cell;

use super::idrp::dual_pcg_run;
use super::monitor::Monitor;
use super::{require_side, SolveReport, SolverConfig, SolverMethod};
use crate::closedform::{primal_from_dual, RidgeProblem};
use crate::densela::{spd_factor, sub_vec, DenseMatrix, SpdFactorization};
use crate::error::Result;
use crate::pcg::{fixed_point_run, pcg_run, FnOperator, FnPreconditioner, Status, Verdict};
use crate::sketch::{apply_sketch, SketchOperator, SketchSide};

/// Data shared by both primal-dual sketch solvers: `B = XR` for the
/// matrix-free projected Hessian and the factor of the doubly sketched
/// Hessian `(ΠᵀB)ᵀ(ΠᵀB)/n + λI_d`.
struct DoubleSketch {
    b: DenseMatrix,
    factor: SpdFactorization,
    shape: (usize, usize),
}

impl DoubleSketch {
    fn new(prob: &RidgeProblem, pi: &SketchOperator, r: &SketchOperator, method: SolverMethod) -> Result<Self> {
        require_side(method, pi, prob.n(), "sample")?;
        require_side(method, r, prob.p(), "feature")?;
        let b = apply_sketch(prob.x(), r, SketchSide::Right)?;
        let s = apply_sketch(&b, pi, SketchSide::LeftTranspose)?;
        let shape = s.shape();
        let mut g = s.gram();
        g.scale_in_place(1.0 / prob.n() as f64);
        g.add_diag(prob.lambda());
        let factor = spd_factor(&g)?;
        Ok(Self { b, factor, shape })
    }

    /// `BᵀB z / n + λz`
    fn projected_hessian(&self, z: &[f64], inv_n: f64, lambda: f64) -> Vec<f64> {
        let bz = self.b.matvec(z);
        self.b.t_matvec(&bz).into_iter().zip(z).map(|(v, zi)| v * inv_n + lambda * zi).collect()
    }

    fn dim(&self) -> usize {
        self.b.cols()
    }
}

/// Iterative primal-dual sketch. The outer loop is the dual random
/// projection step; its `d`-dimensional subproblem is solved by a Hessian
/// sketch fixed-point loop whose factored matrix is only `d×d`, built from
/// the `m×d` doubly sketched data.
pub fn ipds(prob: &RidgeProblem, pi: &SketchOperator, r: &SketchOperator, cfg: &SolverConfig) -> Result<SolveReport> {
    let method = SolverMethod::Ipds;
    let ds = DoubleSketch::new(prob, pi, r, method)?;
    let inner_ctl = cfg.inner;
    inner_ctl.validate()?;
    let (n, p, d) = (prob.n(), prob.p(), ds.dim());
    let inv_n = 1.0 / n as f64;
    let lambda = prob.lambda();
    let a_in = FnOperator::new(d, |z: &[f64]| ds.projected_hessian(z, inv_n, lambda));
    let mut mon = Monitor::new(prob, cfg)?;

    let mut w = vec![0.0; p];
    let mut subproblems = 0;
    let mut status = Status::MaxIters;
    if let Verdict::Stop(s) = mon.observe(0, &w, Some(&vec![0.0; n]), 0) {
        status = s;
    } else {
        let mut factor = ds.factor.clone();
        for t in 1..=cfg.outer.max_iters {
            let c = sub_vec(prob.y(), &prob.x().matvec(&w));
            let rtw = r.matrix().t_matvec(&w);
            let rhs: Vec<f64> = ds.b.t_matvec(&c).into_iter().zip(&rtw).map(|(v, q)| v * inv_n - lambda * q).collect();
            let inner = fixed_point_run(&a_in, &mut factor, &rhs, &vec![0.0; d], &inner_ctl)?;
            subproblems += inner.trace.precond_solves;
            if inner.trace.status.is_failure() {
                status = Status::Diverged;
                break;
            }
            let alpha = sub_vec(&c, &ds.b.matvec(&inner.x));
            w = primal_from_dual(prob, &alpha)?;
            if let Verdict::Stop(s) = mon.observe(t, &w, Some(&alpha), subproblems) {
                status = s;
                break;
            }
        }
    }
    let solution = mon.last_pair();
    Ok(mon.into_report(method, solution, status, d, Some(ds.shape)))
}

/// Accelerated primal-dual sketch: dual PCG whose preconditioner solve is
/// itself a PCG on the projected system, preconditioned by the doubly
/// sketched Hessian.
pub fn acc_ipds(
    prob: &RidgeProblem,
    pi: &SketchOperator,
    r: &SketchOperator,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let method = SolverMethod::AccIpds;
    let ds = DoubleSketch::new(prob, pi, r, method)?;
    let inner_ctl = cfg.inner;
    inner_ctl.validate()?;
    let (n, d) = (prob.n(), ds.dim());
    let inv_n = 1.0 / n as f64;
    let lambda = prob.lambda();
    let a_in = FnOperator::new(d, |z: &[f64]| ds.projected_hessian(z, inv_n, lambda));
    let inner_solves = Cell::new(0usize);
    let mut factor = ds.factor.clone();
    let zeros = vec![0.0; d];
    let mut pre = FnPreconditioner::new(n, |res: &[f64]| {
        let rhs: Vec<f64> = ds.b.t_matvec(res).into_iter().map(|v| v * inv_n).collect();
        let inner = pcg_run(&a_in, &mut factor, &rhs, &zeros, &inner_ctl).map_err(|_| Status::Breakdown)?;
        inner_solves.set(inner_solves.get() + inner.trace.precond_solves);
        if inner.trace.status.is_failure() {
            return Err(inner.trace.status);
        }
        let bz = ds.b.matvec(&inner.x);
        Ok(res.iter().zip(&bz).map(|(ri, bi)| ri - bi).collect())
    });
    let (mon, status) = dual_pcg_run(prob, cfg, &mut pre, &|_| inner_solves.get())?;
    let solution = mon.last_pair();
    Ok(mon.into_report(method, solution, status, d, Some(ds.shape)))
}
