mod config;
mod plot;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use affine_flow::exec::{init_threads, map_slice};
use affine_flow::field::{integrate, FieldParams, FieldTermination, IntegrateOptions};
use affine_flow::geodesics::{trace, PhasePoint};
use affine_flow::interval::{
    lambda_accumulation, plateau_endpoints, rotation_of_theta, t_theta_from_tan, theta_tilde, transl_estimate,
    EndpointKind, RotationValue, START_POINT,
};
use affine_flow::renorm::{
    alternating_word, box_dimension_estimate, cantor_covers, cover_stats, rv_step, t_theta_to_model, tan_following_word, ModelMap, RenormState,
    RenormStatus,
};
use affine_flow::surface::{build_model, validate, Edge};
use affine_flow::verify::{run_all, run_criterion, Backend, Report, VerifyConfig};
use affine_flow::{parse_rational, Execution, Rational, Scalar};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use config::{usage, Config, UsageError};

pub const THREADS_ENV: &str = "AFFINE_FLOW_THREADS";

#[derive(Parser, Debug)]
#[command(name = "affine-flow", version, about = "Geodesic flow, interval maps and the associated vector field")]
struct Cli {
    /// Worker threads (default: $AFFINE_FLOW_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// key=value file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Surface consistency checks.
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// Ray tracing on the quadrilateral.
    #[command(subcommand)]
    Geodesic(GeodesicCmd),
    /// Rotation numbers of T_θ.
    #[command(subcommand)]
    Rot(RotCmd),
    /// Accumulation sets of λⁿ/(xₙ − s).
    #[command(subcommand)]
    Limits(LimitsCmd),
    /// Induction on the model family I(λ, μ).
    #[command(subcommand)]
    Renorm(RenormCmd),
    /// The homogeneous vector field on C².
    #[command(subcommand)]
    Field(FieldCmd),
    /// Acceptance suite.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// SVG plot of two CSV columns.
    Plot(PlotArgs),
}

#[derive(Subcommand, Debug)]
enum SurfaceCmd {
    Validate,
}

#[derive(Subcommand, Debug)]
enum GeodesicCmd {
    Trace(TraceArgs),
}

#[derive(Args, Debug)]
struct TraceArgs {
    /// Starting edge (AB, BC, CD, AD).
    #[arg(long)]
    edge: Option<String>,
    /// Arclength fraction on the edge.
    #[arg(long)]
    s: Option<f64>,
    /// Direction angle.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum RotCmd {
    Sweep(SweepArgs),
    Plateau(PlateauArgs),
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Lift iterations per sample.
    #[arg(long)]
    iters: Option<usize>,
}

#[derive(Args, Debug)]
struct PlateauArgs {
    /// Rotation value p/q.
    #[arg(long)]
    value: Option<String>,
}

#[derive(Subcommand, Debug)]
enum LimitsCmd {
    Lambda(LambdaArgs),
}

#[derive(Args, Debug)]
struct LambdaArgs {
    /// tan θ.
    #[arg(long)]
    tan: Option<String>,
    #[arg(long)]
    x0: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    backend: Option<String>,
}

#[derive(Subcommand, Debug)]
enum RenormCmd {
    Run(RunArgs),
    Cantor(CantorArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Start from the model of T_θ with this tan θ instead of λ, μ, s.
    #[arg(long)]
    tan: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    /// Normalized singularity l_A/(l_A + l_B).
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    backend: Option<String>,
}

#[derive(Args, Debug)]
struct CantorArgs {
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    backend: Option<String>,
}

#[derive(Subcommand, Debug)]
enum FieldCmd {
    Integrate(IntegrateArgs),
    Verify(SeedArgs),
}

#[derive(Args, Debug)]
struct IntegrateArgs {
    /// Initial γ₁ as re,im.
    #[arg(long, allow_hyphen_values = true)]
    g1: Option<String>,
    /// Initial γ₂ as re,im.
    #[arg(long, allow_hyphen_values = true)]
    g2: Option<String>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    /// Uniform output spacing (default: every accepted step).
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args, Debug)]
struct SeedArgs {
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    All(VerifyAllArgs),
}

#[derive(Args, Debug)]
struct VerifyAllArgs {
    #[arg(long)]
    json: bool,
    /// Backend of the Cantor-cover check.
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    renorm_depth: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// CSV produced by another subcommand.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    #[arg(long)]
    title: Option<String>,
    #[arg(long)]
    scatter: bool,
}

/// What a subcommand produced: text and whether its checks passed.
struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, ok: true }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.downcast_ref::<UsageError>().is_some() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let env_threads = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| usage(format!("{THREADS_ENV}={v:?} is not a count")))?),
        Err(_) => None,
    };
    if let Some(n) = cfg.pick_opt("threads", cli.threads)?.or(env_threads) {
        if n == 0 {
            return Err(usage("--threads must be positive"));
        }
        init_threads(n).map_err(anyhow::Error::msg)?;
    }
    let output = cfg.pick_opt("output", cli.output.clone())?;
    let out = match cli.cmd {
        Cmd::Surface(SurfaceCmd::Validate) => surface_validate()?,
        Cmd::Geodesic(GeodesicCmd::Trace(a)) => geodesic_trace(&cfg, a)?,
        Cmd::Rot(RotCmd::Sweep(a)) => rot_sweep(&cfg, a)?,
        Cmd::Rot(RotCmd::Plateau(a)) => rot_plateau(&cfg, a)?,
        Cmd::Limits(LimitsCmd::Lambda(a)) => limits_lambda(&cfg, a)?,
        Cmd::Renorm(RenormCmd::Run(a)) => renorm_run(&cfg, a)?,
        Cmd::Renorm(RenormCmd::Cantor(a)) => renorm_cantor(&cfg, a)?,
        Cmd::Field(FieldCmd::Integrate(a)) => field_integrate(&cfg, a)?,
        Cmd::Field(FieldCmd::Verify(a)) => field_verify(&cfg, a)?,
        Cmd::Verify(VerifyCmd::All(a)) => verify_all(&cfg, a)?,
        Cmd::Plot(a) => plot_cmd(a)?,
    };
    match output {
        Some(p) => std::fs::write(&p, &out.text).map_err(|e| anyhow::anyhow!("cannot write {}: {e}", p.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(out.text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(out.ok)
}

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn rational_arg(key: &str, v: &str) -> anyhow::Result<Rational> {
    parse_rational(v).ok_or_else(|| usage(format!("{key}: {v:?} is not a rational (use p/q or a decimal)")))
}

fn backend_arg(cfg: &Config, flag: Option<String>) -> anyhow::Result<Backend> {
    match cfg.pick("backend", flag, "rational".to_string())?.as_str() {
        "rational" => Ok(Backend::Rational),
        "float" => Ok(Backend::Float),
        other => Err(usage(format!("backend must be float or rational, got {other:?}"))),
    }
}

fn positive(key: &str, v: f64) -> anyhow::Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("{key} must be positive, got {v}")))
    }
}

fn surface_validate() -> anyhow::Result<Outcome> {
    let model = build_model();
    Ok(match validate(&model) {
        Ok(r) => Outcome::ok(format!("{}consistent=true\n", r.to_key_values())),
        Err(e) => Outcome {
            text: format!("consistent=false\nerror={e}\n"),
            ok: false,
        },
    })
}

fn geodesic_trace(cfg: &Config, a: TraceArgs) -> anyhow::Result<Outcome> {
    let edge_name = cfg.pick("edge", a.edge, "AB".to_string())?;
    let edge = Edge::ALL
        .into_iter()
        .find(|e| e.name().eq_ignore_ascii_case(&edge_name))
        .ok_or_else(|| usage(format!("unknown edge {edge_name:?}")))?;
    let s = cfg.pick("s", a.s, START_POINT)?;
    let theta = cfg.pick("theta", a.theta, 0.7)?;
    let steps = cfg.pick("steps", a.steps, 30usize)?;
    if !(0.0..=1.0).contains(&s) {
        return Err(usage("s must lie in [0, 1]"));
    }
    let model = build_model();
    let rec = trace(&model, PhasePoint::new(edge, s, theta), steps).map_err(|e| usage(e.to_string()))?;
    let mut rows = vec![vec![
        "0".into(),
        edge.name().into(),
        f(s),
        f(theta),
        f(0.0),
        f(0.0),
        f(0.0),
    ]];
    for (i, st) in rec.steps.iter().enumerate() {
        rows.push(vec![
            (i + 1).to_string(),
            st.point.edge.name().into(),
            f(st.point.s),
            f(st.point.theta),
            f(st.segment_length),
            f(st.log_speed),
            f(st.cumulative_length),
        ]);
    }
    eprintln!("termination={:?}", rec.termination);
    Ok(Outcome::ok(csv(
        &["step", "edge", "s", "theta", "segment_length", "log_speed", "cumulative_length"],
        rows,
    )))
}

fn rot_sweep(cfg: &Config, a: SweepArgs) -> anyhow::Result<Outcome> {
    let lo = theta_tilde();
    let hi = std::f64::consts::FRAC_PI_4;
    let from = cfg.pick("from", a.from, lo)?;
    let to = cfg.pick("to", a.to, hi)?;
    let n = cfg.pick("samples", a.samples, 1000usize)?;
    let iters = cfg.pick("iters", a.iters, 100_000usize)?;
    if !(from < to) || n == 0 || iters == 0 {
        return Err(usage("need from < to and positive samples, iters"));
    }
    if from < lo - 1e-15 || to > hi + 1e-15 {
        return Err(usage(format!("range must lie in [{lo}, {hi}] where T_θ has two branches")));
    }
    // Cell midpoints so that the two ends of the regime are never sampled.
    let thetas: Vec<f64> = (0..n).map(|i| from + (to - from) * (i as f64 + 0.5) / n as f64).collect();
    let rows = map_slice(Execution::Parallel, &thetas, |&th| {
        let e = transl_estimate(th, iters);
        let exact = match rotation_of_theta(th, 1) {
            RotationValue::Rational(fr) => format!("{}/{}", fr.p, fr.q),
            RotationValue::IrrationalEstimate(_) => String::new(),
        };
        vec![f(th), f(th.tan()), f(e.estimate), f(e.error_bound), exact]
    });
    Ok(Outcome::ok(csv(&["theta", "tan", "transl", "error_bound", "exact"], rows)))
}

fn parse_fraction(v: &str) -> anyhow::Result<(i64, i64)> {
    let bad = || usage(format!("value must be p/q, got {v:?}"));
    let (p, q) = v.split_once('/').unwrap_or((v, "1"));
    let p: i64 = p.trim().parse().map_err(|_| bad())?;
    let q: i64 = q.trim().parse().map_err(|_| bad())?;
    Ok((p, q))
}

fn rot_plateau(cfg: &Config, a: PlateauArgs) -> anyhow::Result<Outcome> {
    let v = cfg.pick("value", a.value, "1/2".to_string())?;
    let (p, q) = parse_fraction(&v)?;
    let plateau = plateau_endpoints(p, q).map_err(|e| usage(e.to_string()))?;
    let row = |end: &str, e: &affine_flow::interval::PlateauEndpoint| {
        let (kind, tan) = match &e.kind {
            EndpointKind::SaddleConnection { tan, side, .. } => (format!("saddle-connection-{side:?}").to_lowercase(), tan.to_string()),
            EndpointKind::DomainBoundary { tan } => ("domain-boundary".into(), tan.to_string()),
            EndpointKind::Bisected => ("bisected".into(), String::new()),
        };
        vec![format!("{}/{}", plateau.value.p, plateau.value.q), end.into(), f(e.theta), f(e.theta.tan()), kind, tan]
    };
    let rows = vec![row("lower", &plateau.lower), row("upper", &plateau.upper)];
    Ok(Outcome::ok(csv(&["value", "end", "theta", "tan", "kind", "exact_tan"], rows)))
}

fn limits_lambda(cfg: &Config, a: LambdaArgs) -> anyhow::Result<Outcome> {
    let tan = rational_arg("tan", &cfg.pick("tan", a.tan, "7/10".to_string())?)?;
    let x0 = match cfg.pick_opt("x0", a.x0)? {
        Some(v) => rational_arg("x0", &v)?,
        None => Rational::from_f64(START_POINT),
    };
    let depth = cfg.pick("depth", a.depth, 90usize)?;
    let set = match backend_arg(cfg, a.backend)? {
        Backend::Rational => lambda_accumulation(&t_theta_from_tan(tan), x0, depth),
        Backend::Float => lambda_accumulation(&t_theta_from_tan(tan.to_f64()), x0.to_f64(), depth),
    }
    .map_err(anyhow::Error::msg)?;
    let clusters: Vec<String> = set.finite.iter().map(|v| f(*v)).collect();
    Ok(Outcome::ok(csv(
        &["depth", "tail_start", "zero", "infinity", "finite"],
        [vec![
            set.depth.to_string(),
            set.tail_start.to_string(),
            set.zero.to_string(),
            set.infinity.to_string(),
            clusters.join(";"),
        ]],
    )))
}

fn renorm_rows<S: Scalar>(map: ModelMap<S>, steps: usize) -> (Vec<Vec<String>>, String) {
    let row = |i: usize, st: &RenormState<S>| {
        let m = &st.current;
        let (pa, pb) = st.predicted_lengths();
        vec![
            i.to_string(),
            st.word.last().map_or(String::new(), |l| l.to_string()),
            f(m.lambda.to_f64()),
            f(m.mu.to_f64()),
            f(m.l_a.to_f64()),
            f(m.l_b.to_f64()),
            f(m.start.to_f64()),
            f(pa.to_f64()),
            f(pb.to_f64()),
        ]
    };
    let mut st = RenormState::new(map);
    let mut rows = vec![row(0, &st)];
    for i in 1..=steps {
        let next = rv_step(&st);
        if next.is_stopped() {
            st = next;
            break;
        }
        st = next;
        rows.push(row(i, &st));
    }
    let status = match &st.status {
        RenormStatus::Running => "running".to_string(),
        RenormStatus::Stopped { period_two: (a, b) } => format!("stopped period_two=({}, {})", f(a.to_f64()), f(b.to_f64())),
    };
    (rows, status)
}

fn renorm_model<S: Scalar>(tan: Option<S>, lambda: S, mu: S, s: S) -> anyhow::Result<ModelMap<S>> {
    match tan {
        Some(t) => Ok(t_theta_to_model(t).map_err(|e| usage(e.to_string()))?.0),
        None => ModelMap::normalized(lambda, mu, s).map_err(|e| usage(e.to_string())),
    }
}

fn renorm_run(cfg: &Config, a: RunArgs) -> anyhow::Result<Outcome> {
    let mut tan = cfg.pick_opt("tan", a.tan)?.map(|v| rational_arg("tan", &v)).transpose()?;
    let explicit = a.lambda.is_some() || a.mu.is_some() || a.s.is_some();
    let explicit = explicit || ["lambda", "mu", "s"].iter().any(|k| cfg.raw(k).is_some());
    if tan.is_none() && !explicit {
        tan = Some(tan_following_word(&alternating_word(6)).map_err(anyhow::Error::msg)?);
    }
    let lambda = rational_arg("lambda", &cfg.pick("lambda", a.lambda, "1/16".to_string())?)?;
    let mu = rational_arg("mu", &cfg.pick("mu", a.mu, "1/16".to_string())?)?;
    let s = rational_arg("s", &cfg.pick("s", a.s, "3/7".to_string())?)?;
    let steps = cfg.pick("steps", a.steps, 20usize)?;
    let (rows, status) = match backend_arg(cfg, a.backend)? {
        Backend::Rational => renorm_rows(renorm_model(tan, lambda, mu, s)?, steps),
        Backend::Float => renorm_rows(
            renorm_model(tan.map(|t| t.to_f64()), lambda.to_f64(), mu.to_f64(), s.to_f64())?,
            steps,
        ),
    };
    eprintln!("status={status}");
    Ok(Outcome::ok(csv(
        &["step", "letter", "lambda", "mu", "l_a", "l_b", "start", "predicted_l_a", "predicted_l_b"],
        rows,
    )))
}

fn renorm_cantor(cfg: &Config, a: CantorArgs) -> anyhow::Result<Outcome> {
    let lambda = rational_arg("lambda", &cfg.pick("lambda", a.lambda, "1/16".to_string())?)?;
    let mu = rational_arg("mu", &cfg.pick("mu", a.mu, "1/16".to_string())?)?;
    let depth = cfg.pick("depth", a.depth, 12usize)?;
    if depth > 24 {
        return Err(usage("depth above 24 needs more than 2^25 intervals"));
    }
    let exec = Execution::Parallel;
    let stat_row = |s: affine_flow::renorm::CoverStats, dim: Option<f64>| {
        vec![
            s.depth.to_string(),
            s.count.to_string(),
            f(s.max_len),
            s.degenerate.to_string(),
            s.count_ok.to_string(),
            s.length_ok.to_string(),
            dim.map(f).unwrap_or_default(),
        ]
    };
    let (rows, ok) = match backend_arg(cfg, a.backend)? {
        Backend::Rational => {
            let covers = cantor_covers(lambda, mu, depth, exec);
            let dims = box_dimension_estimate(&covers, exec);
            let stats: Vec<_> = covers.iter().enumerate().map(|(d, c)| cover_stats(d, c)).collect();
            let ok = stats.iter().all(|s| s.count_ok && s.length_ok);
            (stats.into_iter().zip(&dims).map(|(s, d)| stat_row(s, d.estimate)).collect::<Vec<_>>(), ok)
        }
        Backend::Float => {
            let covers = cantor_covers(lambda.to_f64(), mu.to_f64(), depth, exec);
            let stats: Vec<_> = covers.iter().enumerate().map(|(d, c)| cover_stats(d, c)).collect();
            let ok = stats.iter().all(|s| s.count_ok && s.length_ok);
            (stats.into_iter().map(|s| stat_row(s, None)).collect(), ok)
        }
    };
    if !ok {
        eprintln!("warning: some covers are degenerate or too long (precision loss?)");
    }
    Ok(Outcome {
        text: csv(
            &["depth", "count", "max_len", "degenerate", "count_ok", "length_ok", "dimension_estimate"],
            rows,
        ),
        ok,
    })
}

fn complex_arg(key: &str, v: &str) -> anyhow::Result<Complex64> {
    let bad = || usage(format!("{key} must be re,im, got {v:?}"));
    let (re, im) = v.split_once(',').ok_or_else(bad)?;
    Ok(Complex64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?))
}

fn field_integrate(cfg: &Config, a: IntegrateArgs) -> anyhow::Result<Outcome> {
    let g1 = complex_arg("g1", &cfg.pick("g1", a.g1, "0.4,0.3".to_string())?)?;
    let g2 = complex_arg("g2", &cfg.pick("g2", a.g2, "0.8,-0.1".to_string())?)?;
    let t_end = positive("t_end", cfg.pick("t_end", a.t_end, 1.0)?)?;
    let rtol = positive("rtol", cfg.pick("rtol", a.rtol, 1e-10)?)?;
    let atol = cfg.pick("atol", a.atol, 1e-12)?;
    if !(atol >= 0.0) {
        return Err(usage("atol must be non-negative"));
    }
    let mut opts = IntegrateOptions {
        rtol,
        atol,
        ..IntegrateOptions::default()
    };
    if let Some(dt) = cfg.pick_opt("dt", a.dt)? {
        opts = opts.uniform(positive("dt", dt)?);
    }
    let traj = integrate(&FieldParams::canonical(), [g1, g2], t_end, &opts).map_err(|e| usage(e.to_string()))?;
    let rows = traj.samples.iter().map(|s| {
        vec![
            f(s.t),
            f(s.g1.re),
            f(s.g1.im),
            f(s.g2.re),
            f(s.g2.im),
            f(s.delta.re),
            f(s.delta.im),
            f(s.step_error),
        ]
    });
    let text = csv(&["t", "g1_re", "g1_im", "g2_re", "g2_im", "delta_re", "delta_im", "step_error"], rows);
    let term = match traj.termination {
        FieldTermination::BlowUp { t_star } => format!("blow-up t_star={}", f(t_star)),
        other => format!("{other:?}"),
    };
    eprintln!("termination={term} accepted={} rejected={}", traj.accepted_steps, traj.rejected_steps);
    Ok(Outcome::ok(text))
}

fn verify_config(cfg: &Config, seed: Option<u64>) -> anyhow::Result<VerifyConfig> {
    let d = VerifyConfig::default();
    Ok(VerifyConfig {
        seed: cfg.pick("seed", seed, d.seed)?,
        ..d
    })
}

fn field_verify(cfg: &Config, a: SeedArgs) -> anyhow::Result<Outcome> {
    let vc = verify_config(cfg, a.seed)?;
    let results: Vec<_> = (9..=13).map(|id| run_criterion(id, &vc)).collect();
    let ok = results.iter().all(|r| r.passed());
    let mut text = String::new();
    for r in &results {
        text.push_str(&r.line());
        text.push('\n');
    }
    Ok(Outcome { text, ok })
}

fn verify_all(cfg: &Config, a: VerifyAllArgs) -> anyhow::Result<Outcome> {
    let mut vc = verify_config(cfg, a.seed)?;
    vc.cover_backend = backend_arg(cfg, a.backend)?;
    vc.cover_depth = cfg.pick("renorm_depth", a.renorm_depth, vc.cover_depth)?;
    if vc.cover_depth > 24 {
        return Err(usage("renorm depth above 24 is not supported"));
    }
    let report: Report = run_all(&vc);
    let text = if a.json {
        let mut j = report.to_json();
        j.push('\n');
        j
    } else {
        report.to_text()
    };
    Ok(Outcome {
        ok: report.all_passed(),
        text,
    })
}

fn plot_cmd(a: PlotArgs) -> anyhow::Result<Outcome> {
    let text = std::fs::read_to_string(&a.input).map_err(|e| usage(format!("cannot read {}: {e}", a.input.display())))?;
    let series = plot::read_series(&text, &a.x, &a.y)?;
    let title = a.title.unwrap_or_else(|| format!("{} vs {}", a.y, a.x));
    Ok(Outcome::ok(plot::render(&series, &title, a.scatter)))
}
