//! Command-line front end: `gen`, `run` and `verify`.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on runtime errors and on
//! solves that end diverged or broken down (after the trace is written).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::closedform::{ridge_exact, ExactForm, RidgeProblem};
use crate::dataio::{gen_synthetic, load_dataset, write_dense_csv, write_trace, DataFormat, SyntheticSpec};
use crate::dataio::{SyntheticKind, ILL_CONDITIONED_DIVISOR};
use crate::densela::{norm2, scale_vec, xnorm};
use crate::error::Error;
use crate::pcg::Status;
use crate::sketch::{derive_seed, make_sketch, SketchKind, SketchOperator};
use crate::solvers::{run_method, SolveReport, SolverConfig, SolverMethod};
use crate::theory::{
    recovery_constants, tail_geometry, theory_report, BoundSide, RecoveryInputs, TheoryReport, DEFAULT_WIDTH_TRIALS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ridgesketch", version, about = "Sketched solvers for ridge regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic dataset as dense CSV.
    Gen(GenArgs),
    /// Run one solver and write its convergence trace.
    Run(RunArgs),
    /// Print sketch-quality quantities and recovery-bound constants.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    Ar1,
    Ar1Ill,
    Lowrank,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Libsvm,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SketchArg {
    Gaussian,
    Rademacher,
    Identity,
}

impl SketchArg {
    fn kind(self) -> SketchKind {
        match self {
            SketchArg::Gaussian => SketchKind::Gaussian,
            SketchArg::Rademacher => SketchKind::Rademacher,
            SketchArg::Identity => SketchKind::Identity,
        }
    }
}

#[derive(clap::Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    /// Rank of the low-rank design (required for `lowrank`).
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    noise_std: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args, Debug)]
struct DataArgs {
    #[arg(long)]
    data: PathBuf,
    /// Defaults to csv for `.csv` files and libsvm otherwise.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Regularization strength; defaults to 1/sqrt(n).
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum, default_value = "gaussian")]
    sketch: SketchArg,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    #[arg(long, value_parser = parse_method)]
    method: SolverMethod,
    #[command(flatten)]
    data: DataArgs,
    /// Sample sketch size.
    #[arg(long)]
    m: Option<usize>,
    /// Feature sketch size.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 0, conflicts_with = "seeds")]
    seed: u64,
    /// Half-open seed range `a..b`; one solve per seed, traces go to
    /// `<trace stem>.<seed>.<ext>`.
    #[arg(long, value_parser = parse_seed_range)]
    seeds: Option<(u64, u64)>,
    #[arg(long, default_value_t = 100)]
    iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Relative step tolerance of inner solves.
    #[arg(long, default_value_t = 1e-10)]
    inner_tol: f64,
    /// Compute the exact solution first so error columns are filled.
    #[arg(long)]
    reference: bool,
    /// Record wall-clock time in the trace (traces are then no longer
    /// byte-reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    trace: PathBuf,
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    seed: u64,
    /// Monte-Carlo draws for the Gaussian width.
    #[arg(long, default_value_t = DEFAULT_WIDTH_TRIALS)]
    trials: usize,
    /// Failure probability of the recovery bound.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Rank cut-off of the recovery bound; defaults to the numerical rank,
    /// capped below each ambient dimension.
    #[arg(long)]
    rank: Option<usize>,
}

fn parse_method(s: &str) -> Result<SolverMethod, String> {
    SolverMethod::from_tag(s).ok_or_else(|| {
        let tags: Vec<&str> = SolverMethod::ALL.iter().map(|m| m.tag()).collect();
        format!("unknown method '{s}' (expected one of {})", tags.join(", "))
    })
}

fn parse_seed_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got '{s}'"))?;
    let a: u64 = a.trim().parse().map_err(|_| format!("invalid seed '{a}'"))?;
    let b: u64 = b.trim().parse().map_err(|_| format!("invalid seed '{b}'"))?;
    if a >= b {
        return Err(format!("empty seed range '{s}'"));
    }
    Ok((a, b))
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Runs the command line `args` (without the program name), writing
/// summaries to `out` and diagnostics to `err`. Returns the exit code.
pub fn run_cli<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv = std::iter::once("ridgesketch".to_string()).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Run(a) => cmd_run(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_RUNTIME
        }
    }
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let kind = match a.kind {
        GenKind::Ar1 => SyntheticKind::Ar1 { divisor: 1.0 },
        GenKind::Ar1Ill => SyntheticKind::Ar1 { divisor: ILL_CONDITIONED_DIVISOR },
        GenKind::Lowrank => {
            let rank = a.rank.ok_or_else(|| Failure::Usage("--kind lowrank requires --rank".into()))?;
            SyntheticKind::LowRank { rank }
        }
    };
    if a.rank.is_some() && !matches!(a.kind, GenKind::Lowrank) {
        return Err(Failure::Usage("--rank only applies to --kind lowrank".into()));
    }
    let spec = SyntheticSpec { kind, n: a.n, p: a.p, noise_std: a.noise_std, seed: a.seed };
    let data = gen_synthetic(&spec)?;
    write_dense_csv(&a.out, &data.x, &data.y)?;
    let _ = writeln!(out, "wrote {} ({}x{})", a.out.display(), a.n, a.p);
    Ok(EXIT_OK)
}

fn load_problem(a: &DataArgs) -> Result<RidgeProblem, Failure> {
    let format = match a.format {
        Some(FormatArg::Libsvm) => DataFormat::LibsvmText,
        Some(FormatArg::Csv) => DataFormat::DenseCsv,
        None => DataFormat::from_path(&a.data),
    };
    let (x, y) = load_dataset(&a.data, format)?;
    let lambda = a.lambda.unwrap_or(1.0 / (x.rows() as f64).sqrt());
    Ok(RidgeProblem::new(x, y, lambda)?)
}

fn trace_path_for(base: &Path, seed: u64) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{seed}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{seed}"),
    };
    base.with_file_name(name)
}

fn sketches(
    prob: &RidgeProblem,
    a: &RunArgs,
    seed: u64,
) -> Result<(Option<SketchOperator>, Option<SketchOperator>), Failure> {
    let kind = a.data.sketch.kind();
    let pi = if a.method.uses_sample_sketch() {
        let m = a.m.ok_or_else(|| Failure::Usage(format!("--method {} requires --m", a.method.tag())))?;
        Some(make_sketch(kind, prob.n(), m, seed)?)
    } else {
        None
    };
    let r = if a.method.uses_feature_sketch() {
        let d = a.d.ok_or_else(|| Failure::Usage(format!("--method {} requires --d", a.method.tag())))?;
        Some(make_sketch(kind, prob.p(), d, derive_seed(seed, 1))?)
    } else {
        None
    };
    Ok((pi, r))
}

fn summary(report: &SolveReport, seed: u64) -> String {
    let mut line = format!(
        "method={} seed={} status={} iterations={} subproblems={} objective={:.16e}",
        report.method.tag(),
        seed,
        report.status.name(),
        report.iterations(),
        report.total_subproblems(),
        report.trace.last().map_or(f64::NAN, |r| r.objective),
    );
    if let Some(e) = report.final_err_x() {
        line.push_str(&format!(" err_X={e:.16e}"));
    }
    line
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let seeds: Vec<u64> = match a.seeds {
        Some((lo, hi)) => (lo..hi).collect(),
        None => vec![a.seed],
    };
    // Usage errors surface before any solve starts.
    if a.method.uses_sample_sketch() && a.m.is_none() {
        return Err(Failure::Usage(format!("--method {} requires --m", a.method.tag())));
    }
    if a.method.uses_feature_sketch() && a.d.is_none() {
        return Err(Failure::Usage(format!("--method {} requires --d", a.method.tag())));
    }
    let prob = load_problem(&a.data)?;
    let mut cfg = SolverConfig::default().with_max_iters(a.iters).with_tol(a.tol);
    cfg.inner.tol = a.inner_tol;
    cfg.timing = a.timing;
    if a.reference {
        cfg = cfg.with_reference(ridge_exact(&prob, ExactForm::Auto)?);
    }
    let solve = |seed: u64| -> Result<(SolveReport, PathBuf), Failure> {
        let (pi, r) = sketches(&prob, a, seed)?;
        let report = run_method(&prob, a.method, pi.as_ref(), r.as_ref(), &cfg)?;
        let path = if a.seeds.is_some() { trace_path_for(&a.trace, seed) } else { a.trace.clone() };
        write_trace(&report, &path)?;
        Ok((report, path))
    };
    let results: Vec<_> = seeds.par_iter().map(|&s| solve(s)).collect();
    let mut failed = Vec::new();
    for (seed, res) in seeds.iter().zip(results) {
        let (report, path) = res?;
        let _ = writeln!(out, "{} trace={}", summary(&report, *seed), path.display());
        if matches!(report.status, Status::Diverged | Status::Breakdown) {
            failed.push(format!("seed {seed}: {}", report.status.name()));
        }
    }
    if !failed.is_empty() {
        return Err(Failure::Runtime(format!("solver did not converge ({})", failed.join(", "))));
    }
    Ok(EXIT_OK)
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_theory(out: &mut dyn Write, prefix: &str, rep: &TheoryReport) -> std::io::Result<()> {
    writeln!(out, "{prefix}.rho1={}", real(rep.rho1))?;
    writeln!(out, "{prefix}.rho2={}", real(rep.rho2))?;
    writeln!(out, "{prefix}.width_sq={}", real(rep.width_sq_estimate))?;
    match rep.kappa {
        Some(k) => writeln!(out, "{prefix}.kappa={}", real(k))?,
        None => writeln!(out, "{prefix}.kappa=n/a")?,
    }
    if let Some(env) = rep.envelope {
        writeln!(out, "{prefix}.rate={}", real(env.ratio()))?;
    }
    Ok(())
}

fn unit(v: &[f64]) -> Vec<f64> {
    let nv = norm2(v);
    if nv > 0.0 {
        scale_vec(v, 1.0 / nv)
    } else {
        v.to_vec()
    }
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if !(a.delta > 0.0 && a.delta < 1.0) {
        return Err(Failure::Usage(format!("--delta must lie in (0, 1), got {}", a.delta)));
    }
    let prob = load_problem(&a.data)?;
    let (n, p) = (prob.n(), prob.p());
    let kind = a.data.sketch.kind();
    let pi = make_sketch(kind, n, a.m, a.seed)?;
    let r = make_sketch(kind, p, a.d, derive_seed(a.seed, 1))?;
    let star = ridge_exact(&prob, ExactForm::Auto)?;
    let w_norm = xnorm(prob.x(), &star.w)?;
    let width_seed = derive_seed(a.seed, 2);
    let hs = theory_report(&prob, &pi, &unit(&star.alpha), w_norm, a.trials, width_seed)?;
    let drp = theory_report(&prob, &r, &unit(&star.w), w_norm, a.trials, width_seed)?;

    let mut lines: Vec<u8> = Vec::new();
    let w = &mut lines as &mut dyn Write;
    let io = |e: std::io::Error| Failure::Runtime(e.to_string());
    writeln!(w, "n={n}\np={p}\nlambda={}\nm={}\nd={}\nseed={}", real(prob.lambda()), a.m, a.d, a.seed).map_err(io)?;
    writeln!(w, "w_star.xnorm={}", real(w_norm)).map_err(io)?;
    write_theory(w, "hs", &hs).map_err(io)?;
    write_theory(w, "drp", &drp).map_err(io)?;

    let numerical_rank = crate::densela::thin_svd(prob.x(), n.min(p))?.numerical_rank(crate::theory::RANK_TOL);
    for (prefix, side, k, ambient) in
        [("hs", BoundSide::HessianSketch, a.m, n), ("drp", BoundSide::DualRandomProjection, a.d, p)]
    {
        let cutoff = a.rank.unwrap_or(numerical_rank).clamp(1, ambient.saturating_sub(1).max(1));
        if cutoff >= ambient {
            writeln!(w, "{prefix}.bound=n/a").map_err(io)?;
            continue;
        }
        let (sigma_tail, rho_orth) = tail_geometry(prob.x(), cutoff.min(n.min(p)), side, &star.w)?;
        let c = recovery_constants(&RecoveryInputs {
            sketch_dim: k,
            r: cutoff,
            ambient,
            delta: a.delta,
            sigma_tail,
            lambda: prob.lambda(),
            n,
            side,
            rho_orth,
        })?;
        writeln!(w, "{prefix}.rank_cutoff={cutoff}").map_err(io)?;
        writeln!(w, "{prefix}.sigma_tail={}", real(sigma_tail)).map_err(io)?;
        writeln!(w, "{prefix}.rho_orth={}", real(rho_orth)).map_err(io)?;
        writeln!(w, "{prefix}.eps={}", real(c.eps)).map_err(io)?;
        writeln!(w, "{prefix}.tau={}", real(c.tau)).map_err(io)?;
        writeln!(w, "{prefix}.upsilon={}", real(c.upsilon)).map_err(io)?;
        writeln!(w, "{prefix}.bound={}", real(c.bound)).map_err(io)?;
        writeln!(w, "{prefix}.threshold={}", real(c.threshold)).map_err(io)?;
        writeln!(w, "{prefix}.thresholds_met={}", c.thresholds_met).map_err(io)?;
    }
    out.write_all(&lines).map_err(io)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_cli(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seed_range("3..6"), Ok((3, 6)));
        assert!(parse_seed_range("6..6").is_err());
        assert!(parse_seed_range("3-6").is_err());
    }

    #[test]
    fn per_seed_trace_names() {
        assert_eq!(trace_path_for(Path::new("out/t.csv"), 4), PathBuf::from("out/t.4.csv"));
        assert_eq!(trace_path_for(Path::new("t"), 4), PathBuf::from("t.4"));
    }

    #[test]
    fn usage_errors_exit_one() {
        let (code, _, err) = run(&["run", "--method", "bogus", "--data", "x.csv", "--trace", "t.csv"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("bogus"));
        assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(
            run(&["gen", "--kind", "ar1", "--n", "5", "--p", "2", "--seed", "1", "--out", "o", "--x"]).0,
            EXIT_USAGE
        );
        let (code, _, err) = run(&["run", "--method", "ihs", "--data", "x.csv", "--trace", "t.csv"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--m"));
    }

    #[test]
    fn missing_data_is_runtime_error() {
        let (code, _, err) = run(&["run", "--method", "exact", "--data", "/nonexistent/x.csv", "--trace", "t.csv"]);
        assert_eq!(code, EXIT_RUNTIME);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("verify"));
    }
}
