#ifndef RIDGESKETCH_H
#define RIDGESKETCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum RsStatus {
  RS_STATUS_OK = 0,
  RS_STATUS_NULL_POINTER = 1,
  RS_STATUS_INVALID_ARGUMENT = 2,
  RS_STATUS_DIMENSION_MISMATCH = 3,
  RS_STATUS_NOT_POSITIVE_DEFINITE = 4,
  RS_STATUS_TOO_LARGE = 5,
  RS_STATUS_IO = 6,
  RS_STATUS_PARSE = 7,
  RS_STATUS_NON_FINITE = 8,
  RS_STATUS_BUFFER_TOO_SMALL = 9,
  RS_STATUS_PANIC = 10,
} RsStatus;

typedef enum RsDataFormat {
  // Chosen from the file extension.
  RS_DATA_FORMAT_AUTO = 0,
  RS_DATA_FORMAT_LIBSVM = 1,
  RS_DATA_FORMAT_CSV = 2,
} RsDataFormat;

typedef enum RsSketchKind {
  RS_SKETCH_KIND_GAUSSIAN = 0,
  RS_SKETCH_KIND_RADEMACHER = 1,
  RS_SKETCH_KIND_IDENTITY = 2,
} RsSketchKind;

// Terminal state of an iterative solve.
typedef enum RsSolveStatus {
  RS_SOLVE_STATUS_CONVERGED = 0,
  RS_SOLVE_STATUS_MAX_ITERS = 1,
  RS_SOLVE_STATUS_DIVERGED = 2,
  RS_SOLVE_STATUS_BREAKDOWN = 3,
} RsSolveStatus;

// Opaque ridge problem.
typedef struct RsProblem RsProblem;

// Opaque result of a solve.
typedef struct RsReport RsReport;

// Opaque sketching operator.
typedef struct RsSketch RsSketch;

// Options of [`rs_solve`]; start from [`rs_solve_options_default`].
typedef struct RsSolveOptions {
  size_t max_iters;
  double tol;
  double inner_tol;
  // Nonzero computes the exact solution first so error columns are filled
  // and the stopping rule is on the X-norm error.
  uint8_t with_reference;
  // Nonzero records wall-clock time in the trace.
  uint8_t timing;
} RsSolveOptions;

// One row of a convergence trace. Error fields are NaN without a reference.
typedef struct RsTraceRecord {
  size_t iteration;
  size_t subproblems;
  double err_x;
  double err_2;
  double objective;
  uint64_t wall_ns;
} RsTraceRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL
// terminated, truncated to `len`). Returns the full message length
// without the terminator; 0 when the last call succeeded.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t rs_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *rs_version(void);

// Builds a problem from a row-major `n × p` design, `n` responses and the
// regularization strength.
//
// # Safety
// `x` must hold `n * p` doubles, `y` `n` doubles; `out` must be writable.
enum RsStatus rs_problem_new(const double *x,
                             size_t n,
                             size_t p,
                             const double *y,
                             double lambda,
                             struct RsProblem **out);

// Loads a dataset. A `lambda` that is not positive selects `1/sqrt(n)`.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum RsStatus rs_problem_load(const char *path,
                              enum RsDataFormat format,
                              double lambda,
                              struct RsProblem **out);

// # Safety
// `prob` must be null or a handle from this library, not yet freed.
void rs_problem_free(struct RsProblem *prob);

// # Safety
// `prob` must be a live handle; `n` and `p` must be writable or null.
enum RsStatus rs_problem_dims(const struct RsProblem *prob, size_t *n, size_t *p);

// Exact solution. `w_out` receives `p` values; `alpha_out` (may be null)
// receives the `n` dual values.
//
// # Safety
// `prob` must be a live handle; buffers must hold the stated lengths.
enum RsStatus rs_ridge_exact(const struct RsProblem *prob,
                             double *w_out,
                             size_t w_len,
                             double *alpha_out,
                             size_t alpha_len);

// Draws an `input_dim × sketch_dim` sketching matrix.
//
// # Safety
// `out` must be writable.
enum RsStatus rs_sketch_new(enum RsSketchKind kind,
                            size_t input_dim,
                            size_t sketch_dim,
                            uint64_t seed,
                            struct RsSketch **out);

// # Safety
// `sketch` must be null or a handle from this library, not yet freed.
void rs_sketch_free(struct RsSketch *sketch);

struct RsSolveOptions rs_solve_options_default(void);

// Runs the method named by `method` (`exact`, `ihs`, `acc-ipds`, …).
// `sample_sketch` is used by sample-side methods, `feature_sketch` by
// feature-side ones; either may be null when unused. `options` may be
// null for defaults. A solve that ends diverged still returns `RS_STATUS_OK`
// with the terminal state available from [`rs_report_status`].
//
// # Safety
// Handles must be live or null; `method` NUL-terminated; `out` writable.
enum RsStatus rs_solve(const struct RsProblem *prob,
                       const char *method,
                       const struct RsSketch *sample_sketch,
                       const struct RsSketch *feature_sketch,
                       const struct RsSolveOptions *options,
                       struct RsReport **out);

// # Safety
// `report` must be null or a handle from this library, not yet freed.
void rs_report_free(struct RsReport *report);

// # Safety
// `report` must be a live handle; `out` writable.
enum RsStatus rs_report_status(const struct RsReport *report, enum RsSolveStatus *out);

// Number of trace rows (0 for a null handle).
//
// # Safety
// `report` must be null or a live handle.
size_t rs_report_trace_len(const struct RsReport *report);

// # Safety
// `report` must be a live handle; `out` writable.
enum RsStatus rs_report_trace_record(const struct RsReport *report,
                                     size_t index,
                                     struct RsTraceRecord *out);

// Copies the primal solution (`p` values) and, when `alpha_out` is not
// null, the dual solution (`n` values).
//
// # Safety
// `report` must be a live handle; buffers must hold the stated lengths.
enum RsStatus rs_report_solution(const struct RsReport *report,
                                 double *w_out,
                                 size_t w_len,
                                 double *alpha_out,
                                 size_t alpha_len);

// Writes the trace as CSV.
//
// # Safety
// `report` must be a live handle; `path` NUL-terminated.
enum RsStatus rs_report_write_trace(const struct RsReport *report, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RIDGESKETCH_H */
