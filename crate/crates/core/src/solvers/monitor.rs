use std::time::Instant;

use super::{SolveReport, SolverConfig, SolverMethod, TraceRecord};
use crate::closedform::{PrimalDualPair, RidgeProblem};
use crate::densela::{norm2, sub_vec, xnorm};
use crate::error::{Error, Result};
use crate::pcg::{Status, Verdict};

/// Records the outer trace and applies the outer stopping rule.
pub(crate) struct Monitor<'a> {
    prob: &'a RidgeProblem,
    reference: Option<Reference>,
    tol: f64,
    divergence_factor: f64,
    start: Instant,
    timing: bool,
    records: Vec<TraceRecord>,
    iterates: Option<Vec<PrimalDualPair>>,
    /// Scale the stopping tolerance is relative to.
    scale: f64,
    initial_metric: Option<f64>,
    last_w: Vec<f64>,
    last_alpha: Option<Vec<f64>>,
}

struct Reference {
    w: Vec<f64>,
    xw: Vec<f64>,
}

impl<'a> Monitor<'a> {
    pub(crate) fn new(prob: &'a RidgeProblem, cfg: &SolverConfig) -> Result<Self> {
        cfg.outer.validate()?;
        let (reference, scale) = match &cfg.reference {
            Some(pair) => {
                if pair.w.len() != prob.p() {
                    return Err(Error::DimensionMismatch(format!(
                        "reference of length {} for p = {}",
                        pair.w.len(),
                        prob.p()
                    )));
                }
                let scale = xnorm(prob.x(), &pair.w)?;
                let xw = prob.x().matvec(&pair.w);
                (Some(Reference { w: pair.w.clone(), xw }), scale)
            }
            None => (None, norm2(&prob.xty_over_n())),
        };
        Ok(Self {
            prob,
            reference,
            tol: cfg.outer.tol,
            divergence_factor: cfg.outer.divergence_factor,
            start: Instant::now(),
            timing: cfg.timing,
            records: Vec::new(),
            iterates: cfg.keep_iterates.then(Vec::new),
            scale,
            initial_metric: None,
            last_w: vec![0.0; prob.p()],
            last_alpha: None,
        })
    }

    pub(crate) fn last_iteration(&self) -> Option<usize> {
        self.records.last().map(|r| r.iteration)
    }

    /// Records iterate `w` (with its dual companion when the method carries
    /// one) and decides whether the outer loop continues.
    pub(crate) fn observe(
        &mut self,
        iteration: usize,
        w: &[f64],
        alpha: Option<&[f64]>,
        subproblems: usize,
    ) -> Verdict {
        let n = self.prob.n() as f64;
        let xw = self.prob.x().matvec(w);
        let resid = sub_vec(self.prob.y(), &xw);
        let rn = norm2(&resid);
        let wn = norm2(w);
        let objective = rn * rn / (2.0 * n) + 0.5 * self.prob.lambda() * wn * wn;
        let (err_x, err_2, metric) = match &self.reference {
            Some(r) => {
                let ex = norm2(&sub_vec(&xw, &r.xw)) / n.sqrt();
                let e2 = norm2(&sub_vec(w, &r.w));
                (Some(ex), Some(e2), ex)
            }
            None => {
                // ∇P(w) = Xᵀ(Xw − y)/n + λw
                let g: Vec<f64> = self
                    .prob
                    .x()
                    .t_matvec(&resid)
                    .into_iter()
                    .zip(w)
                    .map(|(v, wi)| -v / n + self.prob.lambda() * wi)
                    .collect();
                (None, None, norm2(&g))
            }
        };
        let wall_ns = if self.timing { self.start.elapsed().as_nanos().min(u64::MAX as u128) as u64 } else { 0 };
        self.records.push(TraceRecord { iteration, subproblems, err_x, err_2, objective, wall_ns });
        let alpha_vec = alpha.map(|a| a.to_vec());
        if let Some(store) = &mut self.iterates {
            let a = alpha_vec.clone().unwrap_or(resid);
            store.push(PrimalDualPair { w: w.to_vec(), alpha: a });
        }
        self.last_w = w.to_vec();
        self.last_alpha = alpha_vec;

        if !metric.is_finite() || !objective.is_finite() {
            return Verdict::Stop(Status::Diverged);
        }
        let initial = *self.initial_metric.get_or_insert(metric);
        if metric <= self.tol * self.scale {
            return Verdict::Stop(Status::Converged);
        }
        if metric > self.divergence_factor * initial {
            return Verdict::Stop(Status::Diverged);
        }
        Verdict::Continue
    }

    /// Records the runner's terminal iterate when the observer did not see it
    /// (the runner can stop on its own criteria before consulting it).
    pub(crate) fn catch_up(
        &mut self,
        iteration: usize,
        w: &[f64],
        alpha: Option<&[f64]>,
        subproblems: usize,
        status: Status,
    ) -> Status {
        if self.last_iteration() == Some(iteration) || w.iter().any(|v| !v.is_finite()) {
            return status;
        }
        match self.observe(iteration, w, alpha, subproblems) {
            Verdict::Stop(s) if status == Status::MaxIters => s,
            _ => status,
        }
    }

    pub(crate) fn into_report(
        self,
        method: SolverMethod,
        solution: PrimalDualPair,
        status: Status,
        largest_factored_dim: usize,
        subproblem_shape: Option<(usize, usize)>,
    ) -> SolveReport {
        SolveReport {
            method,
            solution,
            trace: self.records,
            status,
            iterates: self.iterates,
            largest_factored_dim,
            subproblem_shape,
        }
    }

    /// Final pair from the last observed iterate.
    pub(crate) fn last_pair(&self) -> PrimalDualPair {
        let alpha = match &self.last_alpha {
            Some(a) => a.clone(),
            None => sub_vec(self.prob.y(), &self.prob.x().matvec(&self.last_w)),
        };
        PrimalDualPair { w: self.last_w.clone(), alpha }
    }
}
