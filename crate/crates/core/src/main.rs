//! Command-line front end: point evaluation, envelope values, verification
//! suites, ratio sweeps, and Monte Carlo cross-checks.
//!
//! Exit codes: 0 success / suite pass, 1 suite fail, 2 usage or validation,
//! 3 numerical (quadrature) failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use besselheat::verify::{full_config, run_suite, smoke_config, PointOutcome};
use besselheat::{
    mc_kernel, p2, p2_gaussian_envelope, p2_zeta1_closed, p_alpha, p_alpha1_closed,
    regime_envelope, sharp_envelope, Axis, EnvelopeForm, Error, GridSpec, KernelParams,
    QuadratureConfig, Spacing, SuiteConfig,
};

#[derive(Parser)]
#[command(
    name = "besselheat",
    version,
    about = "Bessel heat kernels, stable subordination, and envelope verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate p_zeta^(alpha)(t,r,s) by one or all available routes.
    Eval(EvalArgs),
    /// Evaluate a comparison function (envelope) at a point.
    Envelope(EnvelopeArgs),
    /// Run a verification suite and write its report.
    Verify(VerifyArgs),
    /// Stream a ratio check over a grid as CSV.
    Sweep(SweepArgs),
    /// Monte Carlo estimate with quadrature cross-check.
    Mc(McArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Quadrature,
    ClosedForm,
    Alpha2,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long, allow_negative_numbers = true)]
    zeta: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    r: f64,
    #[arg(long)]
    s: f64,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    #[arg(long, default_value_t = 1e-8)]
    rel_tol: f64,
    #[arg(long, value_enum, default_value = "plain")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnvelopeKind {
    Sharp,
    Regime,
    GaussianProduct,
    GaussianFactored,
}

#[derive(Args)]
struct EnvelopeArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, value_enum)]
    kind: EnvelopeKind,
    #[arg(long, default_value_t = 4.0)]
    c_exp: f64,
    #[arg(long, value_enum, default_value = "plain")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Built-in suite to run when no --config is given.
    #[arg(long, default_value = "smoke")]
    suite: String,
    /// JSON config document; overrides --suite.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Keep only checks whose id or kind contains this substring.
    #[arg(long)]
    only: Option<String>,
    /// Report destination (JSON); stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the flat CSV summary here.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Ratio pair to sweep (a verify check kind).
    #[arg(long)]
    check: String,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    zeta: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Axes as name=min:max:count:spacing, comma separated.
    #[arg(long)]
    grid: Option<String>,
    /// Emit only slice k of m (k/m, 1-based), deterministically.
    #[arg(long)]
    chunk: Option<String>,
    #[arg(long, default_value_t = 1e-7)]
    rel_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 1e-7)]
    rel_tol: f64,
    #[arg(long, value_enum, default_value = "plain")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

const EXIT_VERIFY_FAIL: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_NUMERICAL: i32 = 3;

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Quadrature { .. } => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn fail(err: Error) -> ! {
    eprintln!("error: {err}");
    std::process::exit(exit_code_for(&err));
}

fn write_output(out: &Option<PathBuf>, text: &str) {
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                std::process::exit(EXIT_USAGE);
            }
        }
        None => {
            print!("{text}");
            let _ = std::io::stdout().flush();
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match cli.command {
        Command::Eval(args) => run_eval(args),
        Command::Envelope(args) => run_envelope(args),
        Command::Verify(args) => run_verify(args),
        Command::Sweep(args) => run_sweep(args),
        Command::Mc(args) => run_mc(args),
    }
}

#[derive(serde::Serialize)]
struct EvalRecord {
    method: &'static str,
    value: f64,
}

fn eval_route(
    method: Method,
    params: &KernelParams,
    p: &PointArgs,
    cfg: &QuadratureConfig,
) -> Result<EvalRecord, Error> {
    let value = match method {
        Method::Alpha2 => {
            if params.alpha() != 2.0 {
                return Err(Error::Domain {
                    op: "eval",
                    reason: format!("method alpha2 requires --alpha 2, got {}", params.alpha()),
                });
            }
            p2(p.zeta, p.t, p.r, p.s)?
        }
        Method::ClosedForm => {
            if params.alpha() != 1.0 {
                return Err(Error::Domain {
                    op: "eval",
                    reason: format!(
                        "method closed-form requires --alpha 1, got {}",
                        params.alpha()
                    ),
                });
            }
            p_alpha1_closed(p.zeta, p.t, p.r, p.s)?
        }
        Method::Quadrature => {
            if params.alpha() >= 2.0 {
                return Err(Error::Domain {
                    op: "eval",
                    reason: "method quadrature requires alpha in (0,2)".into(),
                });
            }
            p_alpha(params, p.t, p.r, p.s, cfg)?
        }
        Method::Auto | Method::All => unreachable!("dispatched by caller"),
    };
    Ok(EvalRecord {
        method: match method {
            Method::Alpha2 => "alpha2",
            Method::ClosedForm => "closed-form",
            Method::Quadrature => "quadrature",
            _ => unreachable!(),
        },
        value,
    })
}

fn run_eval(args: EvalArgs) {
    let p = &args.point;
    let params = match KernelParams::new(p.zeta, p.alpha) {
        Ok(k) => k,
        Err(e) => fail(e),
    };
    let cfg = QuadratureConfig::with_rel_tol(args.rel_tol);
    let methods: Vec<Method> = match args.method {
        Method::Auto => {
            if p.alpha == 2.0 {
                vec![Method::Alpha2]
            } else if p.alpha == 1.0 {
                vec![Method::ClosedForm]
            } else {
                vec![Method::Quadrature]
            }
        }
        Method::All => {
            if p.alpha == 2.0 {
                vec![Method::Alpha2]
            } else if p.alpha == 1.0 {
                vec![Method::ClosedForm, Method::Quadrature]
            } else {
                vec![Method::Quadrature]
            }
        }
        m => vec![m],
    };
    let mut records = Vec::new();
    for m in methods {
        match eval_route(m, &params, p, &cfg) {
            Ok(rec) => records.push(rec),
            Err(e) => fail(e),
        }
    }
    let max_dev = if records.len() > 1 {
        let mut dev = 0.0f64;
        for i in 0..records.len() {
            for j in i + 1..records.len() {
                let (a, b) = (records[i].value, records[j].value);
                dev = dev.max((a - b).abs() / a.abs().max(b.abs()));
            }
        }
        Some(dev)
    } else {
        None
    };
    let text = match args.format {
        Format::Plain => {
            let mut s = String::new();
            for rec in &records {
                s.push_str(&format!("{:.16e} ({})\n", rec.value, rec.method));
            }
            if let Some(d) = max_dev {
                s.push_str(&format!("max pairwise relative deviation: {d:.3e}\n"));
            }
            s
        }
        Format::Json => {
            let doc = serde_json::json!({
                "zeta": p.zeta, "alpha": p.alpha, "t": p.t, "r": p.r, "s": p.s,
                "results": records.iter().map(|r| serde_json::json!({
                    "method": r.method, "value": r.value
                })).collect::<Vec<_>>(),
                "max_pairwise_relative_deviation": max_dev,
            });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("zeta,alpha,t,r,s,method,value\n");
            for rec in &records {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{:e}\n",
                    p.zeta, p.alpha, p.t, p.r, p.s, rec.method, rec.value
                ));
            }
            s
        }
    };
    write_output(&args.out, &text);
}

fn run_envelope(args: EnvelopeArgs) {
    let p = &args.point;
    let params = match KernelParams::new(p.zeta, p.alpha) {
        Ok(k) => k,
        Err(e) => fail(e),
    };
    let result: Result<(f64, Option<&'static str>), Error> = match args.kind {
        EnvelopeKind::Sharp => sharp_envelope(&params, p.t, p.r, p.s).map(|v| (v, None)),
        EnvelopeKind::Regime => regime_envelope(&params, p.r, p.s).map(|ev| {
            let tag = match ev.regime_tag {
                besselheat::Regime::NearDiagSmall => "near-diag-small",
                besselheat::Regime::NearDiagLarge => "near-diag-large",
                besselheat::Regime::OffDiagSmall => "off-diag-small",
                besselheat::Regime::OffDiagLargeA => "off-diag-large-a",
                besselheat::Regime::OffDiagLargeB => "off-diag-large-b",
            };
            (ev.value, Some(tag))
        }),
        EnvelopeKind::GaussianProduct => {
            p2_gaussian_envelope(p.zeta, p.t, p.r, p.s, args.c_exp, EnvelopeForm::ProductRate)
                .map(|v| (v, None))
        }
        EnvelopeKind::GaussianFactored => p2_gaussian_envelope(
            p.zeta,
            p.t,
            p.r,
            p.s,
            args.c_exp,
            EnvelopeForm::FactoredRate,
        )
        .map(|v| (v, None)),
    };
    let (value, tag) = match result {
        Ok(v) => v,
        Err(e) => fail(e),
    };
    let text = match args.format {
        Format::Plain => match tag {
            Some(tag) => format!("{value:.16e} ({tag})\n"),
            None => format!("{value:.16e}\n"),
        },
        Format::Json => {
            serde_json::to_string_pretty(&serde_json::json!({
                "zeta": p.zeta, "alpha": p.alpha, "t": p.t, "r": p.r, "s": p.s,
                "value": value, "regime": tag,
            }))
            .expect("json")
                + "\n"
        }
        Format::Csv => format!(
            "zeta,alpha,t,r,s,value,regime\n{},{},{},{},{},{:e},{}\n",
            p.zeta,
            p.alpha,
            p.t,
            p.r,
            p.s,
            value,
            tag.unwrap_or("")
        ),
    };
    write_output(&args.out, &text);
}

fn run_verify(args: VerifyArgs) {
    let mut config: SuiteConfig = if let Some(path) = &args.config {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => fail(Error::Io(e)),
        };
        match SuiteConfig::from_json(&text) {
            Ok(c) => c,
            Err(e) => fail(e),
        }
    } else {
        match args.suite.as_str() {
            "smoke" => smoke_config(),
            "full" => full_config(),
            other => fail(Error::Config {
                field: "--suite".into(),
                reason: format!("unknown suite `{other}` (expected smoke or full)"),
            }),
        }
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(rt) = args.rel_tol {
        config.rel_tol = Some(rt);
    }
    if let Some(filter) = &args.only {
        config
            .checks
            .retain(|c| c.id.contains(filter) || c.kind.contains(filter));
    }
    let report = match run_suite(&config) {
        Ok(r) => r,
        Err(e) => fail(e),
    };
    for check in &report.checks {
        let status = match check.status {
            besselheat::CheckStatus::Pass => "pass",
            besselheat::CheckStatus::Fail => "FAIL",
            besselheat::CheckStatus::InsufficientPrecision => "insufficient",
        };
        eprintln!(
            "{status:12} {} sup={:.6e} inf={:.6e} points={} skipped={}{}",
            check.check_id,
            check.sup_ratio,
            check.inf_ratio,
            check.n_points,
            check.n_skipped,
            check
                .refinement_drift
                .map(|d| format!(" drift={d:.3e}"))
                .unwrap_or_default(),
        );
    }
    write_output(&args.out, &report.to_json());
    if let Some(path) = &args.csv {
        if let Err(e) = std::fs::write(path, report.to_csv()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            std::process::exit(EXIT_USAGE);
        }
    }
    eprintln!(
        "suite `{}`: {}/{} checks passed",
        report.suite.name, report.suite.n_pass, report.suite.n_checks
    );
    std::process::exit(if report.suite.pass {
        0
    } else {
        EXIT_VERIFY_FAIL
    });
}

fn parse_grid(spec: &str) -> Result<GridSpec, Error> {
    let mut axes = Vec::new();
    for part in spec.split(',') {
        let bad = |reason: &str| Error::Config {
            field: format!("--grid `{part}`"),
            reason: reason.to_string(),
        };
        let (name, rest) = part
            .split_once('=')
            .ok_or_else(|| bad("expected name=min:max:count:spacing"))?;
        let fields: Vec<&str> = rest.split(':').collect();
        if fields.len() != 4 {
            return Err(bad("expected min:max:count:spacing"));
        }
        let min: f64 = fields[0].parse().map_err(|_| bad("bad min"))?;
        let max: f64 = fields[1].parse().map_err(|_| bad("bad max"))?;
        let count: usize = fields[2].parse().map_err(|_| bad("bad count"))?;
        let spacing = match fields[3] {
            "log" => Spacing::Log,
            "linear" => Spacing::Linear,
            _ => return Err(bad("spacing must be log or linear")),
        };
        axes.push(Axis::new(name, min, max, count, spacing));
    }
    let grid = GridSpec::new(axes);
    grid.validate()?;
    Ok(grid)
}

fn parse_chunk(spec: &str, total: usize) -> Result<(usize, usize), Error> {
    let bad = |reason: String| Error::Config {
        field: format!("--chunk `{spec}`"),
        reason,
    };
    let (k, m) = spec
        .split_once('/')
        .ok_or_else(|| bad("expected k/m".into()))?;
    let k: usize = k.parse().map_err(|_| bad("bad k".into()))?;
    let m: usize = m.parse().map_err(|_| bad("bad m".into()))?;
    if m == 0 || k == 0 || k > m {
        return Err(bad(format!("need 1 <= k <= m, got {k}/{m}")));
    }
    let size = total.div_ceil(m);
    let lo = (k - 1) * size;
    let hi = (k * size).min(total);
    Ok((lo, hi))
}

fn run_sweep(args: SweepArgs) {
    let params = match KernelParams::new(args.zeta, args.alpha) {
        Ok(k) => k,
        Err(e) => fail(e),
    };
    let cfg = QuadratureConfig::with_rel_tol(args.rel_tol);
    let zeta = args.zeta;
    type PairFn<'a> = Box<dyn Fn(&[f64]) -> Result<PointOutcome, Error> + Sync + 'a>;
    let (axis_names, pair): (Vec<&str>, PairFn) = match args.check.as_str() {
        "p2_self_identity" => (
            vec!["t", "r", "s"],
            Box::new(move |p: &[f64]| {
                let v = p2(zeta, p[0], p[1], p[2])?;
                Ok(PointOutcome::Ratio {
                    numerator: v,
                    denominator: v,
                })
            }),
        ),
        "p2_vs_zeta1_closed" => (
            vec!["t", "r", "s"],
            Box::new(move |p: &[f64]| {
                let closed = p2_zeta1_closed(p[0], p[1], p[2])?;
                if closed < 1e-280 {
                    return Ok(PointOutcome::Skip);
                }
                Ok(PointOutcome::Ratio {
                    numerator: p2(1.0, p[0], p[1], p[2])?,
                    denominator: closed,
                })
            }),
        ),
        "p_alpha_vs_sharp_envelope" => {
            let cfg = cfg.clone();
            (
                vec!["t", "r", "s"],
                Box::new(move |p: &[f64]| {
                    let env = sharp_envelope(&params, p[0], p[1], p[2])?;
                    let v = if params.alpha() == 1.0 {
                        p_alpha1_closed(params.zeta(), p[0], p[1], p[2])?
                    } else {
                        p_alpha(&params, p[0], p[1], p[2], &cfg)?
                    };
                    Ok(PointOutcome::Ratio {
                        numerator: v,
                        denominator: env,
                    })
                }),
            )
        }
        "p_alpha_vs_closed_alpha1" => {
            let cfg = cfg.clone();
            (
                vec!["t", "r", "s"],
                Box::new(move |p: &[f64]| {
                    let closed = p_alpha1_closed(zeta, p[0], p[1], p[2])?;
                    let quadv = p_alpha(&params, p[0], p[1], p[2], &cfg)?;
                    Ok(PointOutcome::Ratio {
                        numerator: quadv,
                        denominator: closed,
                    })
                }),
            )
        }
        "p2_vs_gaussian_envelope_product" => (
            vec!["t", "r", "s"],
            Box::new(move |p: &[f64]| {
                let env =
                    p2_gaussian_envelope(zeta, p[0], p[1], p[2], 4.0, EnvelopeForm::ProductRate)?;
                if env < 1e-280 {
                    return Ok(PointOutcome::Skip);
                }
                Ok(PointOutcome::Ratio {
                    numerator: p2(zeta, p[0], p[1], p[2])?,
                    denominator: env,
                })
            }),
        ),
        "sharp_vs_regime_envelope" => (
            vec!["r", "s"],
            Box::new(move |p: &[f64]| {
                let sharp = sharp_envelope(&params, 1.0, p[0], p[1])?;
                let regime = regime_envelope(&params, p[0], p[1])?;
                Ok(PointOutcome::Ratio {
                    numerator: sharp,
                    denominator: regime.value,
                })
            }),
        ),
        other => fail(Error::Config {
            field: "--check".into(),
            reason: format!("`{other}` is not a sweepable ratio pair"),
        }),
    };
    let grid = match &args.grid {
        Some(spec) => match parse_grid(spec) {
            Ok(g) => g,
            Err(e) => fail(e),
        },
        None => {
            let mut axes = Vec::new();
            for name in &axis_names {
                axes.push(Axis::new(name, 1e-2, 1e2, 5, Spacing::Log));
            }
            GridSpec::new(axes)
        }
    };
    if grid.axes.len() != axis_names.len() {
        fail(Error::Config {
            field: "--grid".into(),
            reason: format!("check `{}` needs axes {:?}", args.check, axis_names),
        });
    }
    let total = grid.total_points();
    let (lo, hi) = match &args.chunk {
        Some(spec) => match parse_chunk(spec, total) {
            Ok(r) => r,
            Err(e) => fail(e),
        },
        None => (0, total),
    };
    let mut text = String::new();
    text.push_str(
        &grid
            .axes
            .iter()
            .map(|a| a.name.clone())
            .collect::<Vec<_>>()
            .join(","),
    );
    text.push_str(",numerator,denominator,ratio,status\n");
    let mut coords = Vec::new();
    for idx in lo..hi {
        grid.point(idx, &mut coords);
        for c in &coords {
            text.push_str(&format!("{c:e},"));
        }
        match pair(&coords) {
            Ok(PointOutcome::Ratio {
                numerator,
                denominator,
            }) => {
                text.push_str(&format!(
                    "{numerator:e},{denominator:e},{:e},ok\n",
                    numerator / denominator
                ));
            }
            Ok(PointOutcome::Skip) => text.push_str(",,,skip\n"),
            Ok(PointOutcome::Insufficient) => text.push_str(",,,insufficient-precision\n"),
            Err(e) => fail(e),
        }
    }
    write_output(&args.out, &text);
}

fn run_mc(args: McArgs) {
    let p = &args.point;
    let params = match KernelParams::new(p.zeta, p.alpha) {
        Ok(k) => k,
        Err(e) => fail(e),
    };
    if p.alpha >= 2.0 {
        fail(Error::Domain {
            op: "mc",
            reason: "Monte Carlo route requires alpha in (0,2)".into(),
        });
    }
    let est = match mc_kernel(&params, p.t, p.r, p.s, args.n, args.seed) {
        Ok(e) => e,
        Err(e) => fail(e),
    };
    let cfg = QuadratureConfig::with_rel_tol(args.rel_tol);
    let reference = match p_alpha(&params, p.t, p.r, p.s, &cfg) {
        Ok(v) => v,
        Err(e) => fail(e),
    };
    let z = est.z_score(reference);
    let status = if est.insufficient_precision {
        "insufficient-precision"
    } else {
        "ok"
    };
    let text = match args.format {
        Format::Plain => format!(
            "mean       {:.16e}\nstd_error  {:.16e}\nn          {}\nseed       {}\nquadrature {:.16e}\nz          {:.6}\nstatus     {status}\n",
            est.mean, est.std_error, est.n, est.seed, reference, z
        ),
        Format::Json => {
            serde_json::to_string_pretty(&serde_json::json!({
                "zeta": p.zeta, "alpha": p.alpha, "t": p.t, "r": p.r, "s": p.s,
                "mean": est.mean, "std_error": est.std_error, "n": est.n,
                "seed": est.seed, "quadrature": reference, "z": z, "status": status,
            }))
            .expect("json")
                + "\n"
        }
        Format::Csv => format!(
            "zeta,alpha,t,r,s,mean,std_error,n,seed,quadrature,z,status\n{},{},{},{},{},{:e},{:e},{},{},{:e},{},{status}\n",
            p.zeta, p.alpha, p.t, p.r, p.s, est.mean, est.std_error, est.n, est.seed, reference, z
        ),
    };
    write_output(&args.out, &text);
}
