//! Generic iteration engines: the preconditioned fixed-point iteration
//! `x ← x − M⁻¹(Ax − b)` and preconditioned conjugate gradient.
//!
//! Residuals follow the gradient convention `r = Ax − b`, so the search
//! direction is `p = −M⁻¹r` and step lengths are positive.

use std::time::Instant;

use crate::densela::{axpy, dot, norm2, norm_inf, DenseMatrix, SpdFactorization};
use crate::error::{Error, Result};

/// Curvature `⟨p, Ap⟩` at or below this ends PCG with [`Status::Breakdown`].
pub const BREAKDOWN_CURVATURE: f64 = 1e-300;
const REORTH_CANCELLATION: f64 = 1e-8;
const ROUNDING_RESIDUAL: f64 = 16.0 * f64::EPSILON;

pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

/// Approximate inverse `M⁻¹`. Takes `&mut self` so implementations may keep
/// counters or scratch state. An `Err` aborts the enclosing run with that
/// status (used when the solve is itself iterative and fails).
pub trait Preconditioner {
    fn dim(&self) -> usize;
    fn solve(&mut self, r: &[f64]) -> std::result::Result<Vec<f64>, Status>;
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matvec(x)
    }
}

impl Preconditioner for SpdFactorization {
    fn dim(&self) -> usize {
        SpdFactorization::dim(self)
    }

    fn solve(&mut self, r: &[f64]) -> std::result::Result<Vec<f64>, Status> {
        Ok(self.backward(&self.forward(r)))
    }
}

/// Operator defined by a closure.
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> Vec<f64>> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64]) -> Vec<f64>> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }
}

/// Preconditioner defined by a closure.
pub struct FnPreconditioner<F> {
    dim: usize,
    f: F,
}

impl<F: FnMut(&[f64]) -> std::result::Result<Vec<f64>, Status>> FnPreconditioner<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: FnMut(&[f64]) -> std::result::Result<Vec<f64>, Status>> Preconditioner for FnPreconditioner<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn solve(&mut self, r: &[f64]) -> std::result::Result<Vec<f64>, Status> {
        (self.f)(r)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IdentityPreconditioner(pub usize);

impl Preconditioner for IdentityPreconditioner {
    fn dim(&self) -> usize {
        self.0
    }

    fn solve(&mut self, r: &[f64]) -> std::result::Result<Vec<f64>, Status> {
        Ok(r.to_vec())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TolMetric {
    /// `‖Ax − b‖₂ ≤ tol·‖b‖₂`
    ResidualL2,
    /// `‖x_{t+1} − x_t‖∞ ≤ tol`
    StepLinf,
    /// `‖x_{t+1} − x_t‖∞ ≤ tol·‖x_{t+1}‖∞`
    StepLinfRelative,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterControl {
    pub max_iters: usize,
    pub tol: f64,
    pub tol_metric: TolMetric,
    pub divergence_factor: f64,
    /// Conjugate each new PCG direction against every earlier one instead of
    /// only the last. Same iterates in exact arithmetic, but keeps finite
    /// termination in floating point when the preconditioned spectrum is
    /// spread. Costs two stored vectors per iteration.
    pub full_conjugation: bool,
}

impl Default for IterControl {
    fn default() -> Self {
        Self {
            max_iters: 100,
            tol: 1e-10,
            tol_metric: TolMetric::ResidualL2,
            divergence_factor: 1e6,
            full_conjugation: true,
        }
    }
}

impl IterControl {
    pub fn new(max_iters: usize, tol: f64, tol_metric: TolMetric) -> Self {
        Self { max_iters, tol, tol_metric, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be nonnegative, got {}", self.tol)));
        }
        if !(self.divergence_factor > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "divergence factor must exceed 1, got {}",
                self.divergence_factor
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    MaxIters,
    Diverged,
    Breakdown,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Converged => "Converged",
            Status::MaxIters => "MaxIters",
            Status::Diverged => "Diverged",
            Status::Breakdown => "Breakdown",
        }
    }

    pub fn is_failure(self) -> bool {
        matches!(self, Status::Diverged | Status::Breakdown)
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterRecord {
    pub iteration: usize,
    pub residual: f64,
    /// `None` at iteration 0.
    pub step_linf: Option<f64>,
    /// Cumulative since the run started.
    pub wall_ns: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterTrace {
    pub records: Vec<IterRecord>,
    pub status: Status,
    /// Number of preconditioner solves performed.
    pub precond_solves: usize,
}

impl IterTrace {
    /// Iterations actually taken (the index of the last record).
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iteration)
    }
}

#[derive(Clone, Debug)]
pub struct IterOutcome {
    pub x: Vec<f64>,
    pub trace: IterTrace,
}

/// What an observer sees after each recorded iterate.
pub struct IterState<'a> {
    pub iteration: usize,
    pub x: &'a [f64],
    pub residual: &'a [f64],
    pub precond_solves: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Continue,
    Stop(Status),
}

fn no_observer(_: &IterState<'_>) -> Verdict {
    Verdict::Continue
}

fn check_dims(a: &dyn LinearOperator, m: &dyn Preconditioner, b: &[f64], x0: &[f64]) -> Result<()> {
    let n = a.dim();
    if m.dim() != n || b.len() != n || x0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "operator {n}, preconditioner {}, rhs {}, start {}",
            m.dim(),
            b.len(),
            x0.len()
        )));
    }
    Ok(())
}

fn residual(a: &dyn LinearOperator, x: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = a.apply(x);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri -= bi;
    }
    r
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

struct Recorder {
    start: Instant,
    records: Vec<IterRecord>,
}

impl Recorder {
    fn new() -> Self {
        Self { start: Instant::now(), records: Vec::new() }
    }

    fn push(&mut self, iteration: usize, residual: f64, step_linf: Option<f64>) {
        let wall_ns = self.start.elapsed().as_nanos().min(u64::MAX as u128) as u64;
        self.records.push(IterRecord { iteration, residual, step_linf, wall_ns });
    }
}

fn tol_met(ctl: &IterControl, res: f64, b_norm: f64, step: Option<f64>, x: &[f64]) -> bool {
    match ctl.tol_metric {
        TolMetric::ResidualL2 => res <= ctl.tol * b_norm,
        TolMetric::StepLinf => step.is_some_and(|s| s <= ctl.tol),
        TolMetric::StepLinfRelative => step.is_some_and(|s| s <= ctl.tol * norm_inf(x)),
    }
}

pub fn fixed_point_run(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    b: &[f64],
    x0: &[f64],
    ctl: &IterControl,
) -> Result<IterOutcome> {
    fixed_point_run_observed(a, m, b, x0, ctl, &mut no_observer)
}

/// [`fixed_point_run`] with a callback consulted after every iterate.
pub fn fixed_point_run_observed(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    b: &[f64],
    x0: &[f64],
    ctl: &IterControl,
    observer: &mut dyn FnMut(&IterState<'_>) -> Verdict,
) -> Result<IterOutcome> {
    check_dims(a, m, b, x0)?;
    ctl.validate()?;
    let mut rec = Recorder::new();
    let b_norm = norm2(b);
    let mut x = x0.to_vec();
    let mut r = residual(a, &x, b);
    let r0 = norm2(&r);
    let mut solves = 0;
    rec.push(0, r0, None);

    let finish = |x: Vec<f64>, rec: Recorder, status, solves| IterOutcome {
        x,
        trace: IterTrace { records: rec.records, status, precond_solves: solves },
    };

    if !r0.is_finite() {
        return Ok(finish(x, rec, Status::Diverged, solves));
    }
    if tol_met(ctl, r0, b_norm, None, &x) {
        return Ok(finish(x, rec, Status::Converged, solves));
    }
    let state = IterState { iteration: 0, x: &x, residual: &r, precond_solves: 0 };
    if let Verdict::Stop(s) = observer(&state) {
        return Ok(finish(x, rec, s, solves));
    }

    for t in 1..=ctl.max_iters {
        let u = match m.solve(&r) {
            Ok(u) => u,
            Err(s) => return Ok(finish(x, rec, s, solves)),
        };
        solves += 1;
        axpy(-1.0, &u, &mut x);
        let step = norm_inf(&u);
        r = residual(a, &x, b);
        let res = norm2(&r);
        rec.push(t, res, Some(step));
        if !res.is_finite() || !all_finite(&x) {
            return Ok(finish(x, rec, Status::Diverged, solves));
        }
        if tol_met(ctl, res, b_norm, Some(step), &x) {
            return Ok(finish(x, rec, Status::Converged, solves));
        }
        let state = IterState { iteration: t, x: &x, residual: &r, precond_solves: solves };
        if let Verdict::Stop(s) = observer(&state) {
            return Ok(finish(x, rec, s, solves));
        }
        if res > ctl.divergence_factor * r0 {
            return Ok(finish(x, rec, Status::Diverged, solves));
        }
    }
    Ok(finish(x, rec, Status::MaxIters, solves))
}

pub fn pcg_run(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    b: &[f64],
    x0: &[f64],
    ctl: &IterControl,
) -> Result<IterOutcome> {
    pcg_run_observed(a, m, b, x0, ctl, &mut no_observer)
}

/// [`pcg_run`] with a callback consulted after every iterate.
pub fn pcg_run_observed(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    b: &[f64],
    x0: &[f64],
    ctl: &IterControl,
    observer: &mut dyn FnMut(&IterState<'_>) -> Verdict,
) -> Result<IterOutcome> {
    check_dims(a, m, b, x0)?;
    ctl.validate()?;
    let mut rec = Recorder::new();
    let b_norm = norm2(b);
    let mut x = x0.to_vec();
    let mut r = residual(a, &x, b);
    let r0 = norm2(&r);
    let mut solves = 0;
    rec.push(0, r0, None);

    let finish = |x: Vec<f64>, rec: Recorder, status, solves| IterOutcome {
        x,
        trace: IterTrace { records: rec.records, status, precond_solves: solves },
    };

    if !r0.is_finite() {
        return Ok(finish(x, rec, Status::Diverged, solves));
    }
    if r0 == 0.0 || tol_met(ctl, r0, b_norm, None, &x) {
        return Ok(finish(x, rec, Status::Converged, solves));
    }
    let state = IterState { iteration: 0, x: &x, residual: &r, precond_solves: 0 };
    if let Verdict::Stop(s) = observer(&state) {
        return Ok(finish(x, rec, s, solves));
    }

    let u = match m.solve(&r) {
        Ok(u) => u,
        Err(s) => return Ok(finish(x, rec, s, solves)),
    };
    solves += 1;
    let mut ru = dot(&r, &u);
    let mut p: Vec<f64> = u.iter().map(|v| -v).collect();
    // Earlier directions with their images and curvatures.
    let mut history: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();

    for t in 1..=ctl.max_iters {
        if ctl.full_conjugation {
            let mut projected = p.clone();
            for (q, aq, c) in &history {
                axpy(-dot(&projected, aq) / c, q, &mut projected);
            }
            // Almost nothing left once the earlier directions are removed: the
            // explored subspace is numerically invariant, so keep the short
            // recurrence direction and start a fresh history.
            if norm2(&projected) > REORTH_CANCELLATION * norm2(&p) {
                p = projected;
            } else {
                history.clear();
            }
        }
        let ap = a.apply(&p);
        let curvature = dot(&p, &ap);
        if !(curvature > BREAKDOWN_CURVATURE) {
            let status = if curvature.is_nan() { Status::Diverged } else { Status::Breakdown };
            return Ok(finish(x, rec, status, solves));
        }
        let alpha = ru / curvature;
        if ctl.full_conjugation {
            history.push((p.clone(), ap.clone(), curvature));
        }
        axpy(alpha, &p, &mut x);
        axpy(alpha, &ap, &mut r);
        let step = alpha.abs() * norm_inf(&p);
        let res = norm2(&r);
        rec.push(t, res, Some(step));
        if !res.is_finite() || !all_finite(&x) {
            return Ok(finish(x, rec, Status::Diverged, solves));
        }
        // With full conjugation a residual at rounding level leaves only noise
        // to conjugate against, which would blow up the next step.
        let exhausted = ctl.full_conjugation && res <= ROUNDING_RESIDUAL * b_norm;
        if res == 0.0 || exhausted || tol_met(ctl, res, b_norm, Some(step), &x) {
            return Ok(finish(x, rec, Status::Converged, solves));
        }
        let state = IterState { iteration: t, x: &x, residual: &r, precond_solves: solves };
        if let Verdict::Stop(s) = observer(&state) {
            return Ok(finish(x, rec, s, solves));
        }
        if res > ctl.divergence_factor * r0 {
            return Ok(finish(x, rec, Status::Diverged, solves));
        }
        if t == ctl.max_iters {
            break;
        }
        let u = match m.solve(&r) {
            Ok(u) => u,
            Err(s) => return Ok(finish(x, rec, s, solves)),
        };
        solves += 1;
        let ru_new = dot(&r, &u);
        let mut beta = ru_new / ru;
        ru = ru_new;
        // A full set of conjugate directions spans the space; restart.
        if ctl.full_conjugation && history.len() == b.len() {
            history.clear();
            beta = 0.0;
        }
        for (pi, ui) in p.iter_mut().zip(&u) {
            *pi = -ui + beta * *pi;
        }
    }
    Ok(finish(x, rec, Status::MaxIters, solves))
}
