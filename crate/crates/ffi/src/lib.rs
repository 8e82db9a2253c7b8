//! C ABI for the ridgesketch solvers.
//!
//! Objects cross the boundary as opaque handles that the caller releases
//! with the matching `*_free`. Every fallible call returns an [`RsStatus`];
//! on failure a message is kept per thread and can be read with
//! [`rs_last_error_message`]. Matrices are dense, row-major `double`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use ridgesketch::closedform::{ridge_exact, ExactForm, RidgeProblem};
use ridgesketch::dataio::{load_dataset, write_trace, DataFormat};
use ridgesketch::densela::DenseMatrix;
use ridgesketch::pcg::Status;
use ridgesketch::sketch::{make_sketch, SketchKind, SketchOperator};
use ridgesketch::solvers::{run_method, SolveReport, SolverConfig, SolverMethod};
use ridgesketch::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotPositiveDefinite = 4,
    TooLarge = 5,
    Io = 6,
    Parse = 7,
    NonFinite = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Terminal state of an iterative solve.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RsSolveStatus {
    Converged = 0,
    MaxIters = 1,
    Diverged = 2,
    Breakdown = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RsSketchKind {
    Gaussian = 0,
    Rademacher = 1,
    Identity = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RsDataFormat {
    /// Chosen from the file extension.
    Auto = 0,
    Libsvm = 1,
    Csv = 2,
}

/// Options of [`rs_solve`]; start from [`rs_solve_options_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RsSolveOptions {
    pub max_iters: usize,
    pub tol: f64,
    pub inner_tol: f64,
    /// Nonzero computes the exact solution first so error columns are filled
    /// and the stopping rule is on the X-norm error.
    pub with_reference: u8,
    /// Nonzero records wall-clock time in the trace.
    pub timing: u8,
}

/// One row of a convergence trace. Error fields are NaN without a reference.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RsTraceRecord {
    pub iteration: usize,
    pub subproblems: usize,
    pub err_x: f64,
    pub err_2: f64,
    pub objective: f64,
    pub wall_ns: u64,
}

/// Opaque ridge problem.
pub struct RsProblem(RidgeProblem);

/// Opaque sketching operator.
pub struct RsSketch(SketchOperator);

/// Opaque result of a solve.
pub struct RsReport(SolveReport);

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into().into_bytes());
}

fn code_of(e: &Error) -> RsStatus {
    match e {
        Error::DimensionMismatch(_) | Error::IdentityDimMismatch { .. } => RsStatus::DimensionMismatch,
        Error::NotPositiveDefinite { .. } => RsStatus::NotPositiveDefinite,
        Error::NotSymmetric { .. } | Error::InvalidArgument(_) | Error::SketchSide { .. } => RsStatus::InvalidArgument,
        Error::TooLarge(_) => RsStatus::TooLarge,
        Error::NonFinite(_) => RsStatus::NonFinite,
        Error::Parse { .. } | Error::EmptyFile(_) | Error::Csv(_) => RsStatus::Parse,
        Error::Io(_) => RsStatus::Io,
    }
}

struct Fail(RsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(code_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(RsStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> RsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| e.borrow_mut().clear());
            RsStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            RsStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(RsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn get<'a, T>(h: *const T, what: &str) -> Result<&'a T, Fail> {
    h.as_ref().ok_or_else(|| null(what))
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length
/// without the terminator; 0 when the last call succeeded.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn rs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a problem from a row-major `n × p` design, `n` responses and the
/// regularization strength.
///
/// # Safety
/// `x` must hold `n * p` doubles, `y` `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_problem_new(
    x: *const f64,
    n: usize,
    p: usize,
    y: *const f64,
    lambda: f64,
    out: *mut *mut RsProblem,
) -> RsStatus {
    guard(|| {
        let len = n.checked_mul(p).ok_or_else(|| Fail(RsStatus::InvalidArgument, "n * p overflows".into()))?;
        let x = DenseMatrix::from_row_major(n, p, slice(x, len, "x")?.to_vec())?;
        let prob = RidgeProblem::new(x, slice(y, n, "y")?.to_vec(), lambda)?;
        put(out, RsProblem(prob))
    })
}

/// Loads a dataset. A `lambda` that is not positive selects `1/sqrt(n)`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_problem_load(
    path: *const c_char,
    format: RsDataFormat,
    lambda: f64,
    out: *mut *mut RsProblem,
) -> RsStatus {
    guard(|| {
        let path = PathBuf::from(c_str(path, "path")?);
        let format = match format {
            RsDataFormat::Auto => DataFormat::from_path(&path),
            RsDataFormat::Libsvm => DataFormat::LibsvmText,
            RsDataFormat::Csv => DataFormat::DenseCsv,
        };
        let (x, y) = load_dataset(&path, format)?;
        let lambda = if lambda > 0.0 { lambda } else { 1.0 / (x.rows() as f64).sqrt() };
        put(out, RsProblem(RidgeProblem::new(x, y, lambda)?))
    })
}

/// # Safety
/// `prob` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rs_problem_free(prob: *mut RsProblem) {
    if !prob.is_null() {
        drop(Box::from_raw(prob));
    }
}

/// # Safety
/// `prob` must be a live handle; `n` and `p` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn rs_problem_dims(prob: *const RsProblem, n: *mut usize, p: *mut usize) -> RsStatus {
    guard(|| {
        let prob = &get(prob, "problem")?.0;
        if !n.is_null() {
            *n = prob.n();
        }
        if !p.is_null() {
            *p = prob.p();
        }
        Ok(())
    })
}

/// Exact solution. `w_out` receives `p` values; `alpha_out` (may be null)
/// receives the `n` dual values.
///
/// # Safety
/// `prob` must be a live handle; buffers must hold the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn rs_ridge_exact(
    prob: *const RsProblem,
    w_out: *mut f64,
    w_len: usize,
    alpha_out: *mut f64,
    alpha_len: usize,
) -> RsStatus {
    guard(|| {
        let prob = &get(prob, "problem")?.0;
        let pair = ridge_exact(prob, ExactForm::Auto)?;
        copy_out(&pair.w, w_out, w_len, "w_out")?;
        if !alpha_out.is_null() {
            copy_out(&pair.alpha, alpha_out, alpha_len, "alpha_out")?;
        }
        Ok(())
    })
}

unsafe fn copy_out(src: &[f64], dst: *mut f64, len: usize, what: &str) -> Result<(), Fail> {
    if len < src.len() {
        return Err(Fail(RsStatus::BufferTooSmall, format!("{what} holds {len}, need {}", src.len())));
    }
    slice_mut(dst, src.len(), what)?.copy_from_slice(src);
    Ok(())
}

/// Draws an `input_dim × sketch_dim` sketching matrix.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rs_sketch_new(
    kind: RsSketchKind,
    input_dim: usize,
    sketch_dim: usize,
    seed: u64,
    out: *mut *mut RsSketch,
) -> RsStatus {
    guard(|| {
        let kind = match kind {
            RsSketchKind::Gaussian => SketchKind::Gaussian,
            RsSketchKind::Rademacher => SketchKind::Rademacher,
            RsSketchKind::Identity => SketchKind::Identity,
        };
        put(out, RsSketch(make_sketch(kind, input_dim, sketch_dim, seed)?))
    })
}

/// # Safety
/// `sketch` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rs_sketch_free(sketch: *mut RsSketch) {
    if !sketch.is_null() {
        drop(Box::from_raw(sketch));
    }
}

#[no_mangle]
pub extern "C" fn rs_solve_options_default() -> RsSolveOptions {
    let cfg = SolverConfig::default();
    RsSolveOptions {
        max_iters: cfg.outer.max_iters,
        tol: cfg.outer.tol,
        inner_tol: cfg.inner.tol,
        with_reference: 0,
        timing: 0,
    }
}

/// Runs the method named by `method` (`exact`, `ihs`, `acc-ipds`, …).
/// `sample_sketch` is used by sample-side methods, `feature_sketch` by
/// feature-side ones; either may be null when unused. `options` may be
/// null for defaults. A solve that ends diverged still returns `RS_STATUS_OK`
/// with the terminal state available from [`rs_report_status`].
///
/// # Safety
/// Handles must be live or null; `method` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rs_solve(
    prob: *const RsProblem,
    method: *const c_char,
    sample_sketch: *const RsSketch,
    feature_sketch: *const RsSketch,
    options: *const RsSolveOptions,
    out: *mut *mut RsReport,
) -> RsStatus {
    guard(|| {
        let prob = &get(prob, "problem")?.0;
        let tag = c_str(method, "method")?;
        let method = SolverMethod::from_tag(tag)
            .ok_or_else(|| Fail(RsStatus::InvalidArgument, format!("unknown method '{tag}'")))?;
        let opts = options.as_ref().copied().unwrap_or_else(|| rs_solve_options_default());
        let mut cfg = SolverConfig::default().with_max_iters(opts.max_iters).with_tol(opts.tol);
        cfg.inner.tol = opts.inner_tol;
        cfg.timing = opts.timing != 0;
        if opts.with_reference != 0 {
            cfg = cfg.with_reference(ridge_exact(prob, ExactForm::Auto)?);
        }
        let pi = sample_sketch.as_ref().map(|s| &s.0);
        let r = feature_sketch.as_ref().map(|s| &s.0);
        put(out, RsReport(run_method(prob, method, pi, r, &cfg)?))
    })
}

/// # Safety
/// `report` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rs_report_free(report: *mut RsReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rs_report_status(report: *const RsReport, out: *mut RsSolveStatus) -> RsStatus {
    guard(|| {
        let rep = &get(report, "report")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = match rep.status {
            Status::Converged => RsSolveStatus::Converged,
            Status::MaxIters => RsSolveStatus::MaxIters,
            Status::Diverged => RsSolveStatus::Diverged,
            Status::Breakdown => RsSolveStatus::Breakdown,
        };
        Ok(())
    })
}

/// Number of trace rows (0 for a null handle).
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rs_report_trace_len(report: *const RsReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.trace.len())
}

/// # Safety
/// `report` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rs_report_trace_record(
    report: *const RsReport,
    index: usize,
    out: *mut RsTraceRecord,
) -> RsStatus {
    guard(|| {
        let rep = &get(report, "report")?.0;
        let rec = rep.trace.get(index).ok_or_else(|| {
            Fail(RsStatus::InvalidArgument, format!("trace index {index} out of range ({})", rep.trace.len()))
        })?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = RsTraceRecord {
            iteration: rec.iteration,
            subproblems: rec.subproblems,
            err_x: rec.err_x.unwrap_or(f64::NAN),
            err_2: rec.err_2.unwrap_or(f64::NAN),
            objective: rec.objective,
            wall_ns: rec.wall_ns,
        };
        Ok(())
    })
}

/// Copies the primal solution (`p` values) and, when `alpha_out` is not
/// null, the dual solution (`n` values).
///
/// # Safety
/// `report` must be a live handle; buffers must hold the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn rs_report_solution(
    report: *const RsReport,
    w_out: *mut f64,
    w_len: usize,
    alpha_out: *mut f64,
    alpha_len: usize,
) -> RsStatus {
    guard(|| {
        let rep = &get(report, "report")?.0;
        copy_out(&rep.solution.w, w_out, w_len, "w_out")?;
        if !alpha_out.is_null() {
            copy_out(&rep.solution.alpha, alpha_out, alpha_len, "alpha_out")?;
        }
        Ok(())
    })
}

/// Writes the trace as CSV.
///
/// # Safety
/// `report` must be a live handle; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rs_report_write_trace(report: *const RsReport, path: *const c_char) -> RsStatus {
    guard(|| {
        let rep = &get(report, "report")?.0;
        let path = PathBuf::from(c_str(path, "path")?);
        Ok(write_trace(rep, &path)?)
    })
}
