//! The acceptance suite: one check per numbered criterion, with a plain text
//! and a JSON rendering. Everything is seeded, and the report carries no
//! timings, so two runs with the same configuration render identically.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exec::{map_range, map_slice, Execution};
use crate::field::{
    accumulation_check, detect_returns, developing_straightness, integrate, l0_exact, path_straightness,
    perturbed_path, projection_identity_residual, singular_distance, FieldParams, FieldTermination,
    IntegrateOptions, Trajectory,
};
use crate::geodesics::{first_return_ab, return_orbit, t_theta_oracle};
use crate::interval::{
    lambda_accumulation, plateau_endpoints, rotation_number_exact, t_theta, t_theta_from_tan, theta_tilde,
    transl_estimate, EndpointKind, Extension, Fraction, RotationValue, Witness, START_POINT,
};
use crate::renorm::{
    all_words, box_dimension_estimate, brute_first_return, cantor_cover, cantor_covers, cover_stats,
    middle_thirds_cover, rv_step, word_intervals, ModelMap, RenormState,
};
use crate::scalar::{Rational, Scalar};
use crate::surface::{build_model, SurfaceModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Backend {
    Rational,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub exec: Execution,
    /// Backend and depth of the Cantor-cover check.
    pub cover_backend: Backend,
    pub cover_depth: usize,
    /// Also rerun criteria 1–13 sequentially and compare the renderings.
    pub determinism_check: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            exec: Execution::default(),
            cover_backend: Backend::Rational,
            cover_depth: 12,
            determinism_check: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub status: Status,
    pub measured: String,
    pub bound: String,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: u8, name: &str, ok: bool, measured: String, bound: impl Into<String>, detail: String) -> Self {
        Self {
            id,
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            bound: bound.into(),
            detail,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn line(&self) -> String {
        format!(
            "C{:02} {} {} measured={} bound={} {}",
            self.id, self.status, self.name, self.measured, self.bound, self.detail
        )
        .trim_end()
        .to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub results: Vec<CriterionResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(CriterionResult::passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            out.push_str(&r.line());
            out.push('\n');
        }
        let passed = self.results.iter().filter(|r| r.passed()).count();
        out.push_str(&format!("{passed}/{} criteria passed\n", self.results.len()));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

pub const CRITERIA: [(u8, &str); 14] = [
    (1, "oracle-equivalence"),
    (2, "angle-return"),
    (3, "translation-special-cases"),
    (4, "monotone-continuous"),
    (5, "three-cycle-attraction"),
    (6, "renormalization-first-return"),
    (7, "word-interval-structure"),
    (8, "cantor-covers"),
    (9, "l0-exact-flow"),
    (10, "projection-identity"),
    (11, "developing-straightness"),
    (12, "lambda-case-structure"),
    (13, "origin-accumulation"),
    (14, "determinism"),
];

fn name(id: u8) -> &'static str {
    CRITERIA[id as usize - 1].1
}

fn rng(seed: u64, id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(id as u64 + 1)))
}

/// Runs one criterion (`1..=13`; 14 needs [`run_all`]).
pub fn run_criterion(id: u8, cfg: &VerifyConfig) -> CriterionResult {
    let model = build_model();
    match id {
        1 => c01_oracle(&model, cfg),
        2 => c02_angle_return(&model, cfg),
        3 => c03_special_cases(),
        4 => c04_monotone(cfg),
        5 => c05_three_cycle(&model, cfg),
        6 => c06_first_return(cfg),
        7 => c07_words(),
        8 => c08_covers(cfg),
        9 => c09_l0(),
        10 | 11 => {
            let trajs = regular_arcs(cfg);
            if id == 10 {
                c10_identity(&trajs, cfg)
            } else {
                c11_straightness(&trajs, cfg)
            }
        }
        12 => c12_lambda(),
        13 => c13_accumulation(),
        _ => CriterionResult::new(id, "unknown", false, "-".into(), "-", "no such criterion".into()),
    }
}

pub fn run_all(cfg: &VerifyConfig) -> Report {
    let mut results: Vec<CriterionResult> = (1..=13).map(|id| run_criterion(id, cfg)).collect();
    if cfg.determinism_check {
        let seq = VerifyConfig {
            exec: Execution::Sequential,
            determinism_check: false,
            ..cfg.clone()
        };
        let again: Vec<CriterionResult> = (1..=13).map(|id| run_criterion(id, &seq)).collect();
        let differing: Vec<String> = results
            .iter()
            .zip(&again)
            .filter(|(a, b)| a.line() != b.line())
            .map(|(a, _)| format!("C{:02}", a.id))
            .collect();
        results.push(CriterionResult::new(
            14,
            name(14),
            differing.is_empty(),
            format!("{}", differing.len()),
            "0",
            if differing.is_empty() {
                "rerun with one thread renders identically".into()
            } else {
                format!("differs: {}", differing.join(","))
            },
        ));
    }
    Report { results }
}

fn c01_oracle(model: &SurfaceModel, cfg: &VerifyConfig) -> CriterionResult {
    let start = Instant::now();
    let mut r = rng(cfg.seed, 1);
    let lo = theta_tilde();
    let samples: Vec<(f64, f64)> = (0..1000)
        .map(|_| (r.random_range(0.0..1.0), r.random_range(lo..FRAC_PI_4)))
        .collect();
    let errs = map_slice(cfg.exec, &samples, |&(x, th)| {
        let closed = t_theta(th).eval(&x, Extension::Strict).ok()?;
        let traced = t_theta_oracle(model, x, th).ok()?;
        Some((closed - traced).abs())
    });
    let skipped = errs.iter().filter(|e| e.is_none()).count();
    let worst = errs.iter().flatten().copied().fold(0.0, f64::max);
    let fast = start.elapsed().as_secs_f64() < 5.0;
    CriterionResult::new(
        1,
        name(1),
        worst < 1e-9 && skipped == 0 && fast,
        sci(worst),
        "1e-9",
        format!("samples=1000 singular={skipped} runtime<5s={fast}"),
    )
}

fn c02_angle_return(model: &SurfaceModel, cfg: &VerifyConfig) -> CriterionResult {
    let mut r = rng(cfg.seed, 2);
    let samples: Vec<(f64, f64)> = (0..1000)
        .map(|_| (r.random_range(0.0..1.0), r.random_range(0.0..FRAC_PI_4)))
        .collect();
    let errs = map_slice(cfg.exec, &samples, |&(x, th)| {
        first_return_ab(model, x, th).ok().map(|fr| (fr.theta - th).abs())
    });
    let skipped = errs.iter().filter(|e| e.is_none()).count();
    let worst = errs.iter().flatten().copied().fold(0.0, f64::max);
    CriterionResult::new(
        2,
        name(2),
        worst < 1e-12 && skipped == 0,
        sci(worst),
        "1e-12",
        format!("samples=1000 singular={skipped}"),
    )
}

/// Expected translation number of `T_θ` from the window thresholds alone.
fn window_value(t: &Rational) -> Option<Fraction> {
    let q = |a, b| Rational::from_ratio(a, b);
    if *t <= q(1, 2) || *t >= q(16, 17) {
        Some(Fraction::new(0, 1))
    } else if *t < q(13, 21) {
        Some(Fraction::new(1, 1))
    } else if *t > q(7, 11) && *t < q(11, 12) {
        Some(Fraction::new(1, 2))
    } else {
        None
    }
}

fn c03_special_cases() -> CriterionResult {
    let start = Instant::now();
    let tans = [(1, 4), (9, 16), (7, 10), (33, 34), (1, 1)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, b) in tans {
        let t = Rational::from_ratio(a, b);
        let expected = window_value(&t);
        let got = rotation_number_exact(&t_theta_from_tan(t), Extension::Strict);
        let (value, witnessed) = match &got {
            Ok(r) => match (&r.value, &r.witness) {
                (RotationValue::Rational(f), Witness::PeriodicOrbit { residual, .. }) => (Some(*f), *residual == 0.0),
                _ => (None, false),
            },
            Err(_) => (None, false),
        };
        let good = value.is_some() && value == expected && witnessed;
        ok &= good;
        parts.push(format!(
            "{a}/{b}:{}",
            value.map_or("none".to_string(), |f| f.to_string())
        ));
    }
    let fast = start.elapsed().as_secs_f64() < 10.0;
    CriterionResult::new(
        3,
        name(3),
        ok && fast,
        parts.join(","),
        "0,1,1/2,0,0",
        format!("exact witnesses; runtime<10s={fast}"),
    )
}

fn c04_monotone(cfg: &VerifyConfig) -> CriterionResult {
    const N: usize = 100_000;
    const POINTS: usize = 2000;
    let lo = theta_tilde();
    let thetas: Vec<f64> = (0..POINTS)
        .map(|i| lo + (FRAC_PI_4 - lo) * (i as f64 + 0.5) / POINTS as f64)
        .collect();
    let est = map_slice(cfg.exec, &thetas, |&th| transl_estimate(th, N).estimate);
    let slack = 2.0 / N as f64;
    let worst_rise = est.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let rot = |v: f64| (v - v.round()).abs();
    let near = |th: f64| rot(transl_estimate(th, N).estimate);
    let ends = near(lo + 1e-6).max(near(FRAC_PI_4 - 1e-6));
    CriterionResult::new(
        4,
        name(4),
        worst_rise <= slack && ends < 0.01,
        format!("rise={} ends={}", sci(worst_rise.max(0.0)), sci(ends)),
        format!("rise<={} ends<0.01", sci(slack)),
        format!("points={POINTS} n={N}"),
    )
}

fn c05_three_cycle(model: &SurfaceModel, cfg: &VerifyConfig) -> CriterionResult {
    let mut r = rng(cfg.seed, 5);
    let hi = theta_tilde();
    let samples: Vec<(f64, f64)> = (0..100)
        .map(|_| (r.random_range(0.0..1.0), r.random_range(1e-6..hi)))
        .collect();
    let rows = map_slice(cfg.exec, &samples, |&(x0, th)| -> Option<(f64, f64)> {
        let xs = return_orbit(model, x0, th, 4).ok()?;
        let d: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        // differences shrink by the slope of the single affine branch
        let factor_err = d
            .windows(2)
            .take(2)
            .map(|w| (w[1] / w[0] - 1.0 / 16.0).abs())
            .fold(0.0, f64::max);
        let limit = xs[1] + d[1] / (1.0 - d[1] / d[0]);
        let fr = first_return_ab(model, limit, th).ok()?;
        let interior = [limit, fr.intermediate[0].s, fr.intermediate[1].s]
            .iter()
            .all(|&s| s > 1e-9 && s < 1.0 - 1e-9);
        let closing = (fr.x - limit).abs();
        interior.then_some((factor_err, closing))
    });
    let failed = rows.iter().filter(|r| r.is_none()).count();
    let factor = rows.iter().flatten().map(|r| r.0).fold(0.0, f64::max);
    let closing = rows.iter().flatten().map(|r| r.1).fold(0.0, f64::max);
    CriterionResult::new(
        5,
        name(5),
        failed == 0 && factor < 1e-6 && closing < 1e-12,
        format!("factor={} closing={}", sci(factor), sci(closing)),
        "factor<1e-6 closing<1e-12",
        format!("samples=100 not-converged={failed}"),
    )
}

fn random_model_f64(r: &mut ChaCha8Rng) -> ModelMap<f64> {
    let lambda = r.random_range(0.02..0.5);
    let mu = r.random_range(0.02..0.5);
    let s = r.random_range(0.01..0.99);
    ModelMap::normalized(lambda, mu, s).expect("valid random map")
}

fn random_model_rational(r: &mut ChaCha8Rng) -> ModelMap<Rational> {
    let q = |a: i64, b: i64| Rational::from_ratio(a, b);
    let lambda = q(r.random_range(1..=15), 32);
    let mu = q(r.random_range(1..=15), 32);
    let s = q(r.random_range(1..=99), 100);
    ModelMap::normalized(lambda, mu, s).expect("valid random map")
}

/// Compares the induced map after each step with the literal first return,
/// at `points` positions of the induced domain.
fn check_first_returns<S: Scalar>(map: ModelMap<S>, steps: usize, points: &[S]) -> (f64, f64, bool) {
    let mut state = RenormState::new(map.clone());
    let (mut pointwise, mut lengths) = (0.0f64, 0.0f64);
    let mut exact = true;
    for _ in 0..steps {
        let next = rv_step(&state);
        if next.is_stopped() {
            break;
        }
        state = next;
        let cur = &state.current;
        for u in points {
            let x = cur.start.clone() + u.clone() * cur.length();
            if x == cur.singularity() {
                continue;
            }
            let induced = cur.eval(&x, Extension::Strict);
            let brute = brute_first_return(&map, &cur.start, &cur.end(), &x, 100_000);
            match (induced, brute) {
                (Ok(a), Some((b, _))) => {
                    pointwise = pointwise.max((a.clone() - b.clone()).abs().to_f64());
                    exact &= a == b;
                }
                _ => exact = false,
            }
        }
        let (a, b) = state.predicted_lengths();
        lengths = lengths
            .max((a.clone() - cur.l_a.clone()).abs().to_f64())
            .max((b.clone() - cur.l_b.clone()).abs().to_f64());
        exact &= a == cur.l_a && b == cur.l_b;
    }
    (pointwise, lengths, exact)
}

fn c06_first_return(cfg: &VerifyConfig) -> CriterionResult {
    let mut r = rng(cfg.seed, 6);
    let fmaps: Vec<ModelMap<f64>> = (0..200).map(|_| random_model_f64(&mut r)).collect();
    let rmaps: Vec<ModelMap<Rational>> = (0..200).map(|_| random_model_rational(&mut r)).collect();
    let fpoints: Vec<f64> = (1..10).map(|k| k as f64 / 10.0 + 0.0123).collect();
    let rpoints: Vec<Rational> = (1..8).map(|k| Rational::from_ratio(2 * k - 1, 14)).collect();
    let frows = map_slice(cfg.exec, &fmaps, |m| check_first_returns(m.clone(), 4, &fpoints));
    let rrows = map_slice(cfg.exec, &rmaps, |m| check_first_returns(m.clone(), 4, &rpoints));
    let fpoint = frows.iter().map(|r| r.0).fold(0.0, f64::max);
    let flen = frows.iter().map(|r| r.1).fold(0.0, f64::max);
    let rexact = rrows.iter().all(|r| r.2);
    CriterionResult::new(
        6,
        name(6),
        fpoint <= 1e-12 && flen <= 1e-12 && rexact,
        format!("float={} lengths={} rational-exact={rexact}", sci(fpoint), sci(flen)),
        "1e-12 and exact",
        "maps=200+200".into(),
    )
}

fn c07_words() -> CriterionResult {
    let l = Rational::from_ratio(1, 16);
    let (mut emin, mut emax, mut slack, mut gap) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, 0.0f64);
    let mut count = 0;
    let mut err = None;
    for n in 0..=6 {
        for w in all_words(n) {
            match word_intervals(l.clone(), l.clone(), &w) {
                Ok(wi) => {
                    count += 1;
                    emin = emin.min(wi.eta.0).min(wi.eta.1);
                    emax = emax.max(wi.eta.0).max(wi.eta.1);
                    slack = slack.min(wi.ratio - wi.ratio_bound);
                    gap = gap.max(wi.max_gap_ratio);
                }
                Err(e) => err = Some(e.to_string()),
            }
        }
    }
    let ok = err.is_none() && emin >= 1.0 - 1e-12 && emax <= 2.0 + 1e-12 && slack >= -1e-12 && gap <= 0.5;
    CriterionResult::new(
        7,
        name(7),
        ok,
        format!("eta=[{},{}] ratio-slack={} gap={}", sci(emin), sci(emax), sci(slack), sci(gap)),
        "eta in [1,2], slack>=0, gap<=1/2",
        format!("words={count}{}", err.map_or(String::new(), |e| format!(" error={e}"))),
    )
}

fn c08_covers(cfg: &VerifyConfig) -> CriterionResult {
    let target = 2f64.ln() / 3f64.ln();
    let mt: Vec<_> = (0..8).map(middle_thirds_cover).collect();
    let control = box_dimension_estimate(&mt, cfg.exec)
        .iter()
        .filter_map(|e| e.estimate)
        .map(|e| (e - target).abs())
        .fold(0.0, f64::max);
    let depth = cfg.cover_depth;
    match cfg.cover_backend {
        Backend::Float => {
            let cover = cantor_cover(1.0f64 / 16.0, 1.0 / 16.0, depth, cfg.exec);
            let st = cover_stats(depth, &cover);
            let ok = st.count_ok && st.length_ok && st.degenerate == 0;
            CriterionResult::new(
                8,
                name(8),
                ok,
                format!("count={} degenerate={}", st.count, st.degenerate),
                format!("count={} degenerate=0", 1usize << (depth + 1)),
                format!("float backend depth={depth}: intervals below f64 resolution"),
            )
        }
        Backend::Rational => {
            let l = Rational::from_ratio(1, 16);
            let covers = cantor_covers(l.clone(), l, depth, cfg.exec);
            let stats_ok = covers
                .iter()
                .enumerate()
                .all(|(d, c)| {
                    let st = cover_stats(d, c);
                    st.count_ok && st.length_ok && st.degenerate == 0
                });
            let est: Vec<f64> = box_dimension_estimate(&covers, cfg.exec)
                .iter()
                .filter_map(|e| e.estimate)
                .collect();
            let decreasing = est.len() >= 2 && est.windows(2).all(|w| w[1] < w[0]);
            let last = est.last().copied().unwrap_or(f64::NAN);
            CriterionResult::new(
                8,
                name(8),
                stats_ok && decreasing && control < 0.02,
                format!("last-estimate={} control-error={}", sci(last), sci(control)),
                "counts/lengths exact, decreasing, control<0.02",
                format!("depth={depth} estimates={} decreasing={decreasing}", est.len()),
            )
        }
    }
}

fn c09_l0() -> CriterionResult {
    let p = FieldParams::canonical();
    let w = Complex64::new(1.0, 0.0);
    let tr = integrate(&p, [Complex64::new(0.0, 0.0), w], 1.0, &IntegrateOptions::default().uniform(1e-3));
    let worst = match &tr {
        Ok(tr) => tr
            .samples
            .iter()
            .map(|s| {
                let e = l0_exact(&p, w, s.t);
                (s.g2 - e).norm() / e.norm()
            })
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    CriterionResult::new(9, name(9), worst < 1e-8, sci(worst), "1e-8", "t in [0,1], w=1".into())
}

/// Twenty seeded trajectory arcs whose projections stay at distance `≥ 0.1`
/// from `{0, 1, ∞}` (in `|z|`, `|z − 1|`, `1/|z|`).
pub fn regular_arcs(cfg: &VerifyConfig) -> Vec<Trajectory> {
    let p = FieldParams::canonical();
    let mut r = rng(cfg.seed, 10);
    let one = Complex64::new(1.0, 0.0);
    let far = |z: Complex64| z.norm().min((z - one).norm()).min(1.0 / z.norm()) >= 0.1;
    let mut candidates = Vec::new();
    while candidates.len() < 400 {
        let delta = Complex64::new(r.random_range(-1.5..2.5), r.random_range(-1.5..1.5));
        if !far(delta) || singular_distance(delta) < 0.2 {
            continue;
        }
        let g2 = Complex64::from_polar(r.random_range(0.3..1.0), r.random_range(0.0..std::f64::consts::TAU));
        candidates.push([delta * g2, g2]);
    }
    let opts = IntegrateOptions::default().uniform(1e-3);
    // an arc only counts if it runs its full length while staying away from
    // the singular directions
    let arcs = map_slice(cfg.exec, &candidates, |y0| {
        let tr = integrate(&p, *y0, 0.3, &opts).ok()?;
        (tr.termination == FieldTermination::TimeLimit && tr.samples.iter().all(|s| far(s.delta))).then_some(tr)
    });
    arcs.into_iter().flatten().take(20).collect()
}

fn c10_identity(trajs: &[Trajectory], cfg: &VerifyConfig) -> CriterionResult {
    let p = FieldParams::canonical();
    let res = map_slice(cfg.exec, trajs, |t| projection_identity_residual(&p, t).unwrap_or(f64::INFINITY));
    let worst = res.iter().copied().fold(0.0, f64::max);
    CriterionResult::new(
        10,
        name(10),
        trajs.len() == 20 && worst < 1e-6,
        sci(worst),
        "1e-6",
        format!("trajectories={} tol=1e-10", trajs.len()),
    )
}

fn c11_straightness(trajs: &[Trajectory], cfg: &VerifyConfig) -> CriterionResult {
    let p = FieldParams::canonical();
    let rows = map_slice(cfg.exec, trajs, |t| {
        let straight = developing_straightness(&p, t).unwrap_or(f64::INFINITY);
        let deltas = t.deltas();
        let extent = deltas
            .iter()
            .map(|z| (z - deltas[0]).norm())
            .fold(0.0, f64::max);
        let bumped = perturbed_path(&deltas, 0.1 * extent);
        let control = path_straightness(&p, &bumped).unwrap_or(f64::INFINITY);
        (straight, control)
    });
    let worst = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let control = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    CriterionResult::new(
        11,
        name(11),
        trajs.len() == 20 && worst < 1e-6 && control > 1e-2,
        format!("residual={} control={}", sci(worst), sci(control)),
        "residual<1e-6 control>1e-2",
        format!("trajectories={}", trajs.len()),
    )
}

/// `Λ` at one parameter, computed at two depths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaCase {
    pub label: String,
    /// Period of the saddle connection (`0` for a plateau interior).
    pub period: i64,
    pub zero: bool,
    pub infinity: bool,
    /// Nonzero clusters at the deeper depth.
    pub finite: Vec<f64>,
    /// Relative change of the nonzero cluster between the two depths.
    pub drift: Option<f64>,
}

impl LambdaCase {
    /// Matches the predicted `{0}` (interior) or `{0, l}` (endpoint).
    pub fn as_predicted(&self) -> bool {
        if self.period == 0 {
            self.zero && !self.infinity && self.finite.is_empty()
        } else {
            self.zero && !self.infinity && self.finite.len() == 1 && self.drift.is_some_and(|d| d < 0.01)
        }
    }

    fn render(&self) -> String {
        let mut set = Vec::new();
        if self.zero {
            set.push("0".to_string());
        }
        set.extend(self.finite.iter().map(|l| format!("{l:.6}")));
        if self.infinity {
            set.push("inf".to_string());
        }
        format!("{}:{{{}}}", self.label, set.join(","))
    }
}

pub const LAMBDA_DEPTHS: (usize, usize) = (60, 90);

/// `Λ` for `x₀ = START_POINT` at `tan θ = 7/10` and at every saddle-connection
/// endpoint of the plateaus `0`, `1/2` and `1`.
pub fn lambda_cases() -> Vec<LambdaCase> {
    let x0 = Rational::from_f64(START_POINT);
    let mut out = Vec::new();
    let run = |label: String, period: i64, tan: Rational| -> LambdaCase {
        let map = t_theta_from_tan(tan);
        let a = lambda_accumulation(&map, x0.clone(), LAMBDA_DEPTHS.0);
        let b = lambda_accumulation(&map, x0.clone(), LAMBDA_DEPTHS.1);
        match (a, b) {
            (Ok(a), Ok(b)) => LambdaCase {
                label,
                period,
                zero: b.zero,
                infinity: b.infinity,
                drift: (a.finite.len() == 1 && b.finite.len() == 1)
                    .then(|| ((a.finite[0] - b.finite[0]) / b.finite[0]).abs()),
                finite: b.finite,
            },
            _ => LambdaCase {
                label,
                period,
                zero: false,
                infinity: false,
                finite: Vec::new(),
                drift: None,
            },
        }
    };
    out.push(run("interior@7/10".into(), 0, Rational::from_ratio(7, 10)));
    for (p, q) in [(0, 1), (1, 2), (1, 1)] {
        let Ok(plateau) = plateau_endpoints(p, q) else {
            continue;
        };
        for end in [&plateau.lower, &plateau.upper] {
            if let EndpointKind::SaddleConnection { tan, itinerary, .. } = &end.kind {
                out.push(run(format!("{p}/{q}@{tan}"), itinerary.len() as i64, tan.clone()));
            }
        }
    }
    out
}

fn c12_lambda() -> CriterionResult {
    let cases = lambda_cases();
    let ok = cases.len() == 5 && cases.iter().all(LambdaCase::as_predicted);
    let drift = cases.iter().filter_map(|c| c.drift).fold(0.0, f64::max);
    let off: Vec<&str> = cases.iter().filter(|c| !c.as_predicted()).map(|c| c.label.as_str()).collect();
    let mut detail: Vec<String> = cases.iter().map(LambdaCase::render).collect();
    if !off.is_empty() {
        detail.push(format!("unlike-prediction={}", off.join(",")));
    }
    CriterionResult::new(
        12,
        name(12),
        ok,
        format!("drift={}", sci(drift)),
        "interior {0}, endpoints {0,l}, drift<0.01",
        detail.join(" "),
    )
}

fn c13_accumulation() -> CriterionResult {
    let p = FieldParams::canonical();
    let opts = IntegrateOptions {
        rtol: 1e-10,
        atol: 0.0,
        max_steps: 2_000_000,
        ..IntegrateOptions::default()
    };
    let y0 = [Complex64::new(0.4, 0.3), Complex64::new(0.8, -0.1)];
    let report = integrate(&p, y0, 1e60, &opts)
        .map_err(|e| e.to_string())
        .and_then(|tr| accumulation_check(&tr, &detect_returns(&tr), 50).map_err(|e| e.to_string()));
    match report {
        Ok(r) => CriterionResult::new(
            13,
            name(13),
            r.returns == 50 && r.min_norm < 1e-3,
            sci(r.min_norm),
            "1e-3",
            format!("returns={}", r.returns),
        ),
        Err(e) => CriterionResult::new(13, name(13), false, "-".into(), "1e-3", e),
    }
}

/// `n` evenly spaced `θ` in `(θ̃, π/4)` with their translation estimates.
pub fn rot_sweep(from: f64, to: f64, n: usize, iters: usize, exec: Execution) -> Vec<(f64, f64, f64, Option<Fraction>)> {
    map_range(exec, n, |i| {
        let th = if n == 1 {
            from
        } else {
            from + (to - from) * i as f64 / (n - 1) as f64
        };
        let e = transl_estimate(th, iters);
        let exact = match crate::interval::rotation_of_theta(th, 1) {
            RotationValue::Rational(f) => Some(f),
            RotationValue::IrrationalEstimate(_) => None,
        };
        (th, e.estimate, e.error_bound, exact)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_classify_the_test_tangents() {
        let q = Rational::from_ratio;
        assert_eq!(window_value(&q(1, 4)), Some(Fraction::new(0, 1)));
        assert_eq!(window_value(&q(9, 16)), Some(Fraction::new(1, 1)));
        assert_eq!(window_value(&q(7, 10)), Some(Fraction::new(1, 2)));
        assert_eq!(window_value(&q(33, 34)), Some(Fraction::new(0, 1)));
        assert_eq!(window_value(&q(5, 8)), None);
    }

    #[test]
    fn report_lines_are_stable() {
        let r = CriterionResult::new(3, "x", true, "1".into(), "2", String::new());
        assert_eq!(r.line(), "C03 PASS x measured=1 bound=2");
    }
}
