//! Iterative sketched solvers built on [`crate::pcg`]: the iterative Hessian
//! sketch and its accelerated form, iterative dual random projection (plain
//! and accelerated, two preconditioner variants), and the iterative
//! primal-dual sketch (plain and accelerated).
//!
//! Every solver returns a [`SolveReport`] whose trace holds one record per
//! outer iteration, starting from the zero initial iterate.

mod idrp;
mod ihs;
mod ipds;
mod monitor;

pub use idrp::{acc_idrp, idrp, AccIdrpVariant};
pub use ihs::{acc_ihs, ihs};
pub use ipds::{acc_ipds, ipds};

use crate::closedform::{ridge_exact, sketched_closed_form, ClosedFormMethod, ExactForm, PrimalDualPair, RidgeProblem};
use crate::error::{Error, Result};
use crate::pcg::{IterControl, Status, TolMetric};
use crate::sketch::SketchOperator;

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Outer stopping rule. With a reference the tolerance applies to
    /// `‖w − w*‖_X / ‖w*‖_X`, otherwise to the relative primal gradient norm.
    pub outer: IterControl,
    /// Inner loop of the primal-dual sketch solvers.
    pub inner: IterControl,
    pub reference: Option<PrimalDualPair>,
    /// Store every `(w, α)` iterate in the report.
    pub keep_iterates: bool,
    /// When false every `wall_ns` is reported as 0.
    pub timing: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            outer: IterControl::default(),
            inner: IterControl::new(200, 1e-10, TolMetric::StepLinfRelative),
            reference: None,
            keep_iterates: false,
            timing: true,
        }
    }
}

impl SolverConfig {
    pub fn with_reference(mut self, reference: PrimalDualPair) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.outer.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.outer.tol = tol;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolverMethod {
    Exact,
    ClassicalSketch,
    RandomProjection,
    HessianSketch,
    DualRandomProjection,
    Ihs,
    AccIhs,
    Idrp,
    AccIdrp,
    AccIdrpDual,
    Ipds,
    AccIpds,
}

impl SolverMethod {
    pub const ALL: [SolverMethod; 12] = [
        SolverMethod::Exact,
        SolverMethod::ClassicalSketch,
        SolverMethod::RandomProjection,
        SolverMethod::HessianSketch,
        SolverMethod::DualRandomProjection,
        SolverMethod::Ihs,
        SolverMethod::AccIhs,
        SolverMethod::Idrp,
        SolverMethod::AccIdrp,
        SolverMethod::AccIdrpDual,
        SolverMethod::Ipds,
        SolverMethod::AccIpds,
    ];

    /// Command-line tag.
    pub fn tag(self) -> &'static str {
        match self {
            SolverMethod::Exact => "exact",
            SolverMethod::ClassicalSketch => "cs",
            SolverMethod::RandomProjection => "rp",
            SolverMethod::HessianSketch => "hs",
            SolverMethod::DualRandomProjection => "drp",
            SolverMethod::Ihs => "ihs",
            SolverMethod::AccIhs => "acc-ihs",
            SolverMethod::Idrp => "idrp",
            SolverMethod::AccIdrp => "acc-idrp",
            SolverMethod::AccIdrpDual => "acc-idrp-dual",
            SolverMethod::Ipds => "ipds",
            SolverMethod::AccIpds => "acc-ipds",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.tag() == tag)
    }

    pub fn is_iterative(self) -> bool {
        self.closed_form().is_none()
    }

    pub fn closed_form(self) -> Option<ClosedFormMethod> {
        match self {
            SolverMethod::Exact => Some(ClosedFormMethod::Original),
            SolverMethod::ClassicalSketch => Some(ClosedFormMethod::ClassicalSketch),
            SolverMethod::RandomProjection => Some(ClosedFormMethod::RandomProjection),
            SolverMethod::HessianSketch => Some(ClosedFormMethod::HessianSketch),
            SolverMethod::DualRandomProjection => Some(ClosedFormMethod::DualRandomProjection),
            _ => None,
        }
    }

    /// Whether the method takes a sample-side operator `Π` (n→m).
    pub fn uses_sample_sketch(self) -> bool {
        matches!(
            self,
            SolverMethod::ClassicalSketch
                | SolverMethod::HessianSketch
                | SolverMethod::Ihs
                | SolverMethod::AccIhs
                | SolverMethod::Ipds
                | SolverMethod::AccIpds
        )
    }

    /// Whether the method takes a feature-side operator `R` (p→d).
    pub fn uses_feature_sketch(self) -> bool {
        matches!(
            self,
            SolverMethod::RandomProjection
                | SolverMethod::DualRandomProjection
                | SolverMethod::Idrp
                | SolverMethod::AccIdrp
                | SolverMethod::AccIdrpDual
                | SolverMethod::Ipds
                | SolverMethod::AccIpds
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Cumulative count of sketched subproblem solves.
    pub subproblems: usize,
    /// `‖w − w*‖_X`, present only with a reference.
    pub err_x: Option<f64>,
    /// `‖w − w*‖₂`, present only with a reference.
    pub err_2: Option<f64>,
    pub objective: f64,
    /// Cumulative wall time.
    pub wall_ns: u64,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub method: SolverMethod,
    pub solution: PrimalDualPair,
    pub trace: Vec<TraceRecord>,
    pub status: Status,
    pub iterates: Option<Vec<PrimalDualPair>>,
    /// Dimension of the largest matrix factored during the solve.
    pub largest_factored_dim: usize,
    /// Shape of the doubly sketched data for the primal-dual sketch solvers.
    pub subproblem_shape: Option<(usize, usize)>,
}

impl SolveReport {
    pub fn iterations(&self) -> usize {
        self.trace.last().map_or(0, |r| r.iteration)
    }

    pub fn total_subproblems(&self) -> usize {
        self.trace.last().map_or(0, |r| r.subproblems)
    }

    pub fn final_err_x(&self) -> Option<f64> {
        self.trace.last().and_then(|r| r.err_x)
    }

    /// First iteration whose `err_X` is at or below `threshold`.
    pub fn iterations_to(&self, threshold: f64) -> Option<usize> {
        self.trace.iter().find(|r| r.err_x.is_some_and(|e| e <= threshold)).map(|r| r.iteration)
    }
}

pub(crate) fn require_side(method: SolverMethod, op: &SketchOperator, expected: usize, what: &str) -> Result<()> {
    if op.input_dim() != expected {
        return Err(Error::SketchSide {
            method: method.tag(),
            detail: format!("{what} operator maps {} dimensions, expected {expected}", op.input_dim()),
        });
    }
    Ok(())
}

/// Runs any method by tag. Closed forms produce a single trace record.
pub fn run_method(
    prob: &RidgeProblem,
    method: SolverMethod,
    pi: Option<&SketchOperator>,
    r: Option<&SketchOperator>,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    if !method.is_iterative() {
        return closed_form_report(prob, method, pi, r, cfg);
    }
    let missing = |what: &str| Error::InvalidArgument(format!("method {} requires a {what} sketch", method.tag()));
    let sample = || pi.ok_or_else(|| missing("sample"));
    let feature = || r.ok_or_else(|| missing("feature"));
    match method {
        SolverMethod::Ihs => ihs(prob, sample()?, cfg),
        SolverMethod::AccIhs => acc_ihs(prob, sample()?, cfg),
        SolverMethod::Idrp => idrp(prob, feature()?, cfg),
        SolverMethod::AccIdrp => acc_idrp(prob, feature()?, AccIdrpVariant::Primal, cfg),
        SolverMethod::AccIdrpDual => acc_idrp(prob, feature()?, AccIdrpVariant::Dual, cfg),
        SolverMethod::Ipds => ipds(prob, sample()?, feature()?, cfg),
        SolverMethod::AccIpds => acc_ipds(prob, sample()?, feature()?, cfg),
        _ => unreachable!("closed forms handled above"),
    }
}

fn closed_form_report(
    prob: &RidgeProblem,
    method: SolverMethod,
    pi: Option<&SketchOperator>,
    r: Option<&SketchOperator>,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let cf = method.closed_form().expect("closed-form method");
    let mut mon = monitor::Monitor::new(prob, cfg)?;
    let (pair, factored) = match cf {
        ClosedFormMethod::Original => {
            let pair = ridge_exact(prob, ExactForm::Auto)?;
            (pair, prob.n().min(prob.p()))
        }
        _ => {
            let op = if method.uses_sample_sketch() { pi } else { r };
            let op = op
                .ok_or_else(|| Error::InvalidArgument(format!("method {} requires a sketch operator", method.tag())))?;
            let dim = if method.uses_sample_sketch() { prob.p() } else { op.sketch_dim() };
            (sketched_closed_form(prob, cf, op)?, dim)
        }
    };
    mon.observe(0, &pair.w, Some(&pair.alpha), 1);
    let status = if pair.w.iter().all(|v| v.is_finite()) { Status::Converged } else { Status::Diverged };
    Ok(mon.into_report(method, pair, status, factored, None))
}

/// Control handed to an outer PCG or fixed-point runner: the monitor owns
/// the stopping rule, so the runner only stops on exact convergence,
/// non-finite values, breakdown or the iteration cap.
pub(crate) fn outer_runner_control(cfg: &SolverConfig) -> IterControl {
    IterControl {
        max_iters: cfg.outer.max_iters,
        tol: 0.0,
        tol_metric: TolMetric::ResidualL2,
        divergence_factor: f64::INFINITY,
        ..IterControl::default()
    }
}
