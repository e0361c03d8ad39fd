//! The `tangle` command line front end.
//!
//! Exit codes: 0 verified or found, 1 not perfect or nothing found, 2 usage or
//! parse error, 3 numerical failure. Machine JSON goes to stdout with `--json`
//! (and to `--out` when given); the human report goes to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::construct::{self, Braiding, TopRule};
use crate::cubic::{self, Branch, CubicElement, CubicParams, ParamsSpec, Preset};
use crate::error::{Error, Result};
use crate::pairing::{enumerate_basis, Pairing};
use crate::perfect::{self, perfect_report, Sign};
use crate::solver::{self, AnsatzKind, SolveConfig};
use crate::tensor::{self, DenseTensor};
use crate::tl::{TLContext, TLElement};

/// Every numeric default of the tool.
pub mod defaults {
    /// Off-identity bound in perfectness checks (`verify`).
    pub const TOL_ZERO: f64 = crate::perfect::TOL_ZERO;
    /// Lower bound on `|lambda|` and on cubic nondegeneracy values.
    pub const TOL_NONDEGEN: f64 = crate::perfect::TOL_NONDEGEN;
    /// Bound on the six cubic equation values (`cubic verify`).
    pub const TOL_CUBIC: f64 = 1e-9;
    /// Relative isometry tolerance (`tensor check`).
    pub const TOL_TENSOR: f64 = crate::tensor::TOL;
    /// Absolute floor on `lambda` in tensor checks.
    pub const TOL_TENSOR_ABS: f64 = crate::tensor::TOL_ABS;
    /// Residual norm accepted as a solution (`search`, `cubic search`).
    pub const TOL_RESIDUAL: f64 = 1e-9;
    pub const RESTARTS: usize = 50;
    pub const SEED: u64 = 0;
    pub const MAX_ITERS: usize = 400;
    pub const THREADS: usize = 1;
}

#[derive(Parser, Debug)]
#[command(name = "tangle", version, about = "Perfect tangles and planar-perfect tensors")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Main tolerance of the command (see the defaults table).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Lower bound on |lambda| / nondegeneracy values.
    #[arg(long, global = true)]
    tol_nondegen: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print machine JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON result to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for solver restarts (default: TANGLE_THREADS or 1).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the noncrossing pairings of a k-box.
    Basis {
        #[arg(long)]
        k: usize,
    },
    /// Check an element file for perfectness.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Loop value; overrides a "q" field in the file.
        #[arg(long)]
        q: Option<f64>,
    },
    /// Numerically search for perfect tangles.
    Search {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value = "full")]
        ansatz: AnsatzKind,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Build an inductive or horizontal tangle.
    Construct(ConstructArgs),
    /// Perfect morphisms in cubic categories.
    Cubic {
        #[command(subcommand)]
        command: CubicCommand,
    },
    /// Tensor checks.
    Tensor {
        #[command(subcommand)]
        command: TensorCommand,
    },
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Solver configuration JSON; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    /// Construction spec JSON.
    #[arg(long, conflicts_with_all = ["q", "sign", "n", "perm"])]
    spec: Option<PathBuf>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    sign: Option<Sign>,
    /// Build A_n.
    #[arg(long, conflicts_with = "perm")]
    n: Option<usize>,
    /// Horizontal composition: bottom permutation, comma separated.
    #[arg(long, value_delimiter = ',', requires = "blocks")]
    perm: Option<Vec<usize>>,
    /// Leg counts of the two blocks, e.g. 2,2.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    blocks: Option<Vec<usize>>,
    #[arg(long)]
    top_rule: Option<TopRule>,
}

#[derive(Args, Debug)]
struct CubicParamArgs {
    #[arg(long, conflicts_with_all = ["d", "t"])]
    preset: Option<Preset>,
    #[arg(long, requires = "t", allow_hyphen_values = true)]
    d: Option<f64>,
    #[arg(long, requires = "d", allow_hyphen_values = true)]
    t: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum CubicCommand {
    /// Evaluate the six equations on an element file.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        params: CubicParamArgs,
    },
    /// Search for solutions on one normalization branch.
    Search {
        #[command(flatten)]
        params: CubicParamArgs,
        #[arg(long, default_value = "alpha-one")]
        branch: Branch,
        #[command(flatten)]
        solve: SolveArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Perfect,
    Planar,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Builtin {
    Bell,
    Ghz,
    Ame43,
    Steane,
}

#[derive(Subcommand, Debug)]
enum TensorCommand {
    /// Perfect / planar-perfect check of a tensor file or a built-in state.
    Check {
        #[arg(long, required_unless_present = "builtin", conflicts_with = "builtin")]
        input: Option<PathBuf>,
        #[arg(long)]
        builtin: Option<Builtin>,
        /// Legs of the built-in GHZ state.
        #[arg(long, default_value_t = 3)]
        legs: usize,
        /// Leg dimension of the built-in GHZ state.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Leg ordering of the built-in Steane tensor; searched when absent.
        #[arg(long, value_delimiter = ',')]
        ordering: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
    },
}

/// Element file: TL element JSON with an optional loop value.
#[derive(Serialize, Deserialize)]
pub struct ElementFile {
    #[serde(flatten)]
    pub element: TLElement,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

#[derive(Deserialize)]
struct CubicFile {
    #[serde(flatten)]
    element: CubicElement,
    #[serde(default)]
    params: Option<ParamsSpec>,
}

/// Construction spec as read by `construct --spec`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructSpec {
    pub base: String,
    pub q: f64,
    pub sign: Sign,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub horizontal: Option<HorizontalSpec>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HorizontalSpec {
    #[serde(flatten)]
    pub braiding: Braiding,
    #[serde(default)]
    pub top_rule: TopRule,
}

/// Process-level outcome before conversion to an exit code.
enum Outcome {
    Ok,
    Negative,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::ZeroElement | Error::DegenerateSquare => 3,
        _ => 2,
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::from(0),
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Usage(format!("{}: {e}", path.display()))
    })
}

fn emit<T: Serialize>(common: &Common, value: &T) -> Result<()> {
    let text = serde_json::to_string(value)?;
    if let Some(path) = &common.out {
        fs::write(path, format!("{text}\n"))
            .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if common.json {
        let mut stdout = std::io::stdout().lock();
        writeln!(stdout, "{text}")?;
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Usage(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn threads(common: &Common) -> Result<usize> {
    let n = match common.threads {
        Some(n) => n,
        None => match std::env::var("TANGLE_THREADS") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("TANGLE_THREADS must be a positive integer, got {v:?}")))?,
            Err(_) => defaults::THREADS,
        },
    };
    if n == 0 {
        return Err(Error::Usage("thread count must be positive".into()));
    }
    Ok(n)
}

fn solve_config(common: &Common, args: &SolveArgs) -> Result<SolveConfig> {
    let mut cfg = match &args.config {
        Some(path) => read_json(path)?,
        None => SolveConfig {
            restarts: defaults::RESTARTS,
            seed: defaults::SEED,
            max_iters: defaults::MAX_ITERS,
            tol_residual: defaults::TOL_RESIDUAL,
            tol_nondegen: defaults::TOL_NONDEGEN,
            ..SolveConfig::default()
        },
    };
    if let Some(r) = args.restarts {
        cfg.restarts = r;
    }
    if let Some(m) = args.max_iters {
        cfg.max_iters = m;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(t) = common.tol {
        cfg.tol_residual = t;
    }
    if let Some(t) = common.tol_nondegen {
        cfg.tol_nondegen = t;
    }
    if args.config.is_none() || common.threads.is_some() || std::env::var_os("TANGLE_THREADS").is_some() {
        cfg.threads = threads(common)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let common = &cli.common;
    for (name, v) in [("tol", common.tol), ("tol-nondegen", common.tol_nondegen)] {
        if let Some(v) = v {
            check_positive(name, v)?;
        }
    }
    match &cli.command {
        Command::Basis { k } => cmd_basis(common, *k),
        Command::Verify { input, q } => cmd_verify(common, input, *q),
        Command::Search { k, q, ansatz, solve } => cmd_search(common, *k, *q, *ansatz, solve),
        Command::Construct(args) => cmd_construct(common, args),
        Command::Cubic { command } => match command {
            CubicCommand::Verify { input, params } => cmd_cubic_verify(common, input, params),
            CubicCommand::Search { params, branch, solve } => cmd_cubic_search(common, params, *branch, solve),
        },
        Command::Tensor { command } => match command {
            TensorCommand::Check { input, builtin, legs, dim, ordering, mode } => {
                cmd_tensor_check(common, input.as_deref(), *builtin, *legs, *dim, ordering.as_deref(), *mode)
            }
        },
    }
}

#[derive(Serialize)]
struct BasisListing {
    k: usize,
    count: usize,
    diagrams: Vec<Pairing>,
}

fn cmd_basis(common: &Common, k: usize) -> Result<Outcome> {
    let diagrams = enumerate_basis(k)?;
    eprintln!("k = {k}: {} noncrossing pairings", diagrams.len());
    if !common.json {
        for d in &diagrams {
            eprintln!("  {d:?}");
        }
    }
    emit(common, &BasisListing { k, count: diagrams.len(), diagrams })?;
    Ok(Outcome::Ok)
}

fn print_report(r: &perfect::PerfectnessReport) {
    eprintln!(
        "k = {}: {} (max off-identity {:.3e}, min |lambda| {:.3e}, tol {:.1e})",
        r.k,
        if r.verdict { "perfect" } else { "not perfect" },
        r.max_off_identity(),
        r.min_lambda(),
        r.tol_zero
    );
    for c in &r.conditions {
        eprintln!(
            "  n={} {:?}: lambda = {:.6} {:+.6}i, off-identity {:.3e}",
            c.n, c.order, c.lambda.re, c.lambda.im, c.off_identity_norm
        );
    }
}

/// Perfectness report of an element file; shared by `verify` and the round-trip tests.
pub fn verify_element(file: &ElementFile, q: Option<f64>, tol: f64, tol_nondegen: f64) -> Result<perfect::PerfectnessReport> {
    let q = q
        .or(file.q)
        .ok_or_else(|| Error::Usage("no loop value: pass --q or add a \"q\" field".into()))?;
    let ctx = TLContext::new(q).map_err(|e| Error::Usage(e.to_string()))?;
    let report = perfect_report(&file.element, &ctx, tol, tol_nondegen)?;
    let finite = report
        .conditions
        .iter()
        .all(|c| c.off_identity_norm.is_finite() && c.lambda.re.is_finite() && c.lambda.im.is_finite());
    if !finite {
        return Err(Error::Domain("non-finite values in the perfectness products".into()));
    }
    Ok(report)
}

fn cmd_verify(common: &Common, input: &Path, q: Option<f64>) -> Result<Outcome> {
    let file: ElementFile = read_json(input)?;
    let report = verify_element(
        &file,
        q,
        common.tol.unwrap_or(defaults::TOL_ZERO),
        common.tol_nondegen.unwrap_or(defaults::TOL_NONDEGEN),
    )?;
    print_report(&report);
    emit(common, &report)?;
    Ok(if report.verdict { Outcome::Ok } else { Outcome::Negative })
}

#[derive(Serialize)]
struct SearchFile<'a> {
    k: usize,
    q: f64,
    ansatz: AnsatzKind,
    config: &'a SolveConfig,
    min_residual: f64,
    best_restart: usize,
    solutions: &'a [solver::Solution<TLElement>],
}

fn cmd_search(common: &Common, k: usize, q: f64, ansatz: AnsatzKind, args: &SolveArgs) -> Result<Outcome> {
    let ctx = TLContext::new(q).map_err(|e| Error::Usage(e.to_string()))?;
    let cfg = solve_config(common, args)?;
    let out = solver::run_search(k, &ctx, ansatz, &cfg)?;
    eprintln!(
        "k = {k}, q = {q}, ansatz {ansatz}: {} solution(s) from {} restarts, min residual {:.3e} (restart {})",
        out.solutions.len(),
        cfg.restarts,
        out.min_residual,
        out.best_restart
    );
    for s in &out.solutions {
        eprintln!("  residual {:.3e}, restart {}: {}", s.residual_norm, s.restart, serde_json::to_string(&s.element)?);
    }
    emit(
        common,
        &SearchFile {
            k,
            q,
            ansatz,
            config: &cfg,
            min_residual: out.min_residual,
            best_restart: out.best_restart,
            solutions: &out.solutions,
        },
    )?;
    Ok(if out.solutions.is_empty() { Outcome::Negative } else { Outcome::Ok })
}

/// Element described by a construction spec.
pub fn build_from_spec(spec: &ConstructSpec) -> Result<TLElement> {
    if spec.base != "tl2" {
        return Err(Error::Usage(format!("unknown base {:?}; only \"tl2\" is available", spec.base)));
    }
    let ctx = TLContext::new(spec.q).map_err(|e| Error::Usage(e.to_string()))?;
    let t = perfect::tl2_perfect(spec.q, spec.sign)?;
    match (&spec.n, &spec.horizontal) {
        (Some(n), None) => construct::build_a(&t, *n, &ctx).map_err(|e| match e {
            Error::Domain(m) => Error::Usage(m),
            e => e,
        }),
        (None, Some(h)) => {
            let (n, m) = h.braiding.blocks();
            if n < 2 || m < 2 {
                return Err(Error::Usage("horizontal blocks need at least two legs each".into()));
            }
            let a = construct::build_a(&t, n, &ctx)?;
            let b = construct::build_a(&t, m, &ctx)?;
            let out = construct::horizontal(&a, &b, &h.braiding, &t, h.top_rule, &ctx)?;
            Ok(out.element)
        }
        _ => Err(Error::Usage("give exactly one of \"n\" or \"horizontal\"".into())),
    }
}

fn cmd_construct(common: &Common, args: &ConstructArgs) -> Result<Outcome> {
    let spec = match &args.spec {
        Some(path) => read_json(path)?,
        None => {
            let q = args.q.ok_or_else(|| Error::Usage("--q is required without --spec".into()))?;
            let horizontal = match (&args.perm, &args.blocks) {
                (Some(perm), Some(blocks)) => {
                    let [n, m] = blocks[..] else {
                        return Err(Error::Usage("--blocks takes two counts".into()));
                    };
                    Some(HorizontalSpec {
                        braiding: Braiding::new((n, m), perm.clone())?,
                        top_rule: args.top_rule.unwrap_or_default(),
                    })
                }
                _ => None,
            };
            ConstructSpec { base: "tl2".into(), q, sign: args.sign.unwrap_or(Sign::Plus), n: args.n, horizontal }
        }
    };
    let element = build_from_spec(&spec)?;
    let ctx = TLContext::new(spec.q)?;
    let report = perfect_report(&element, &ctx, defaults::TOL_ZERO, defaults::TOL_NONDEGEN)?;
    eprintln!("built a {}-box with {} terms", element.box_size(), element.n_terms());
    print_report(&report);
    emit(common, &ElementFile { element, q: Some(spec.q) })?;
    Ok(Outcome::Ok)
}

fn cubic_params(args: &CubicParamArgs, from_file: Option<&ParamsSpec>) -> Result<(CubicParams, bool)> {
    let spec = match (args.preset, args.d, args.t) {
        (Some(preset), _, _) => ParamsSpec::Preset { preset },
        (None, Some(d), Some(t)) => ParamsSpec::Values { d, t },
        _ => from_file
            .cloned()
            .ok_or_else(|| Error::Usage("give --preset, or --d and --t, or a \"params\" field".into()))?,
    };
    let haagerup = matches!(spec, ParamsSpec::Preset { preset: Preset::Haagerup });
    let params = spec.resolve().map_err(|e| match e {
        Error::DegenerateSquare => Error::Usage(e.to_string()),
        e => e,
    })?;
    Ok((params, haagerup))
}

#[derive(Serialize)]
struct CubicVerifyOut {
    params: CubicParams,
    element: CubicElement,
    residual: cubic::CubicResidual,
    verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    discrepancy: Option<cubic::DiscrepancyReport>,
}

fn cmd_cubic_verify(common: &Common, input: &Path, args: &CubicParamArgs) -> Result<Outcome> {
    let file: CubicFile = read_json(input)?;
    let (params, haagerup) = cubic_params(args, file.params.as_ref())?;
    let residual = cubic::cubic_residual(&file.element, &params);
    if residual.eq.iter().chain(&residual.nondegen).any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite equation values".into()));
    }
    let tol = common.tol.unwrap_or(defaults::TOL_CUBIC);
    let tol_nondegen = common.tol_nondegen.unwrap_or(defaults::TOL_NONDEGEN);
    let verdict = residual.max_eq() <= tol && residual.min_nondegen() >= tol_nondegen;
    eprintln!(
        "d = {}, t = {}, A = {}, B = {}: {} (max equation {:.3e}, min nondegeneracy {:.3e})",
        params.d,
        params.t,
        params.a,
        params.b,
        if verdict { "perfect" } else { "not perfect" },
        residual.max_eq(),
        residual.min_nondegen()
    );
    for (i, v) in residual.eq.iter().enumerate() {
        eprintln!("  equation {}: {v:.6e}", i + 1);
    }
    let discrepancy = haagerup.then(cubic::haagerup_discrepancy);
    if let Some(d) = &discrepancy {
        eprintln!(
            "  square coefficients used (A, B) = ({:.12}, {:.12}); literal formulas give ({:.12}, {:.12})",
            d.square_coeffs.0, d.square_coeffs.1, d.square_coeffs_as_printed.0, d.square_coeffs_as_printed.1
        );
        for p in &d.printed {
            eprintln!(
                "  printed {} solution: max equation {:.3e} (literal formulas: {:.3e})",
                p.sign,
                p.residual.max_eq(),
                p.residual_as_printed.max_eq()
            );
        }
    }
    emit(common, &CubicVerifyOut { params, element: file.element, residual, verdict, discrepancy })?;
    Ok(if verdict { Outcome::Ok } else { Outcome::Negative })
}

#[derive(Serialize)]
struct CubicSearchFile<'a> {
    params: CubicParams,
    branch: Branch,
    config: &'a SolveConfig,
    min_residual: f64,
    solutions: &'a [solver::Solution<CubicElement>],
}

fn cmd_cubic_search(common: &Common, args: &CubicParamArgs, branch: Branch, solve: &SolveArgs) -> Result<Outcome> {
    let (params, _) = cubic_params(args, None)?;
    let cfg = solve_config(common, solve)?;
    let out = cubic::run_cubic_search(&params, branch, &cfg)?;
    eprintln!(
        "d = {}, t = {}, branch {branch}: {} solution(s) from {} restarts, min residual {:.3e}",
        params.d,
        params.t,
        out.solutions.len(),
        cfg.restarts,
        out.min_residual
    );
    for s in &out.solutions {
        eprintln!("  residual {:.3e}: {}", s.residual_norm, serde_json::to_string(&s.element)?);
    }
    emit(
        common,
        &CubicSearchFile { params, branch, config: &cfg, min_residual: out.min_residual, solutions: &out.solutions },
    )?;
    Ok(if out.solutions.is_empty() { Outcome::Negative } else { Outcome::Ok })
}

#[derive(Serialize)]
struct TensorOut {
    mode: Mode,
    verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    ordering: Option<Vec<usize>>,
    #[serde(flatten)]
    check: tensor::TensorCheck,
}

fn cmd_tensor_check(
    common: &Common,
    input: Option<&Path>,
    builtin: Option<Builtin>,
    legs: usize,
    dim: usize,
    ordering: Option<&[usize]>,
    mode: Mode,
) -> Result<Outcome> {
    let tol = common.tol.unwrap_or(defaults::TOL_TENSOR);
    let tol_abs = defaults::TOL_TENSOR_ABS;
    let mut used_ordering = None;
    let t: DenseTensor = match (input, builtin) {
        (Some(path), _) => read_json(path)?,
        (None, Some(Builtin::Bell)) => tensor::ghz(2, 2)?,
        (None, Some(Builtin::Ghz)) => tensor::ghz(legs, dim).map_err(|e| Error::Usage(e.to_string()))?,
        (None, Some(Builtin::Ame43)) => tensor::ame43(),
        (None, Some(Builtin::Steane)) => {
            let o = match ordering {
                Some(o) => o.to_vec(),
                None => tensor::find_steane_ordering(tol, tol_abs)?
                    .ok_or_else(|| Error::Domain("no planar-perfect Steane ordering".into()))?,
            };
            let t = tensor::steane_tensor(&o)?;
            used_ordering = Some(o);
            t
        }
        (None, None) => return Err(Error::Usage("give --input or --builtin".into())),
    };
    if t.n_legs() < 2 {
        return Err(Error::Usage("tensor needs at least two legs".into()));
    }
    let check = tensor::check_tensor(&t, tol, tol_abs)?;
    let verdict = match mode {
        Mode::Perfect => check.perfect.verdict,
        Mode::Planar => check.planar_perfect.verdict,
        Mode::Both => check.perfect.verdict && check.planar_perfect.verdict,
    };
    eprintln!(
        "{} legs, d = {}: perfect {}, planar-perfect {}",
        t.n_legs(),
        t.dim(),
        check.perfect.verdict,
        check.planar_perfect.verdict
    );
    if let Some(o) = &used_ordering {
        eprintln!("  leg ordering {o:?}");
    }
    for c in check.perfect.conditions.iter().filter(|c| !c.isometry) {
        eprintln!("  A = {:?}: not proportional to an isometry (deviation {:.3e})", c.subset, c.deviation);
    }
    emit(common, &TensorOut { mode, verdict, ordering: used_ordering, check })?;
    Ok(if verdict { Outcome::Ok } else { Outcome::Negative })
}
