//! The homogeneous quadratic vector field `v = (v₁, v₂)` on `C²`
//!
//! ```text
//! v₁(x, y) = −α∞ x² + (α₁ + α∞) x y
//! v₂(x, y) = (α₀ + α₁) x y − α₀ y²
//! ```
//!
//! whose trajectories project under `δ = γ₁/γ₂` to geodesics of the surface,
//! with a Dormand–Prince 5(4) integrator and the cross-checks tying the two
//! pictures together.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::surface::{build_model, SurfaceModel};

pub type State = [Complex64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("initial point must be nonzero")]
    ZeroInitial,
    #[error("step size underflow at t = {t} (h = {h}) without blow-up")]
    StiffnessFailure { t: f64, h: f64 },
    #[error("sample at t = {t} is within {distance} of a singular direction")]
    TooCloseToSingularity { t: f64, distance: f64 },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("path passes within {distance} of a singularity at sample {index}")]
    BranchAmbiguity { index: usize, distance: f64 },
    #[error("consecutive samples {index} and {next} are {gap} apart", next = index + 1)]
    SamplingTooCoarse { index: usize, gap: f64 },
    #[error("l must be non-real or zero or infinite")]
    RealNonzeroL,
    #[error("need at least {0} samples")]
    TooFewSamples(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldParams {
    pub alpha0: Complex64,
    pub alpha1: Complex64,
    pub alpha_inf: Complex64,
}

impl FieldParams {
    pub fn from_model(model: &SurfaceModel) -> Self {
        let [alpha0, alpha1, alpha_inf] = model.alphas();
        Self {
            alpha0,
            alpha1,
            alpha_inf,
        }
    }

    pub fn canonical() -> Self {
        Self::from_model(&build_model())
    }

    pub fn mu0(&self) -> Complex64 {
        self.alpha0 / (2.0 * PI)
    }

    pub fn mu1(&self) -> Complex64 {
        self.alpha1 / (2.0 * PI)
    }

    /// `P(x, y) = x v₂ − y v₁`.
    pub fn p_homogeneous(&self, x: Complex64, y: Complex64) -> Complex64 {
        let (v1, v2) = eval_field(self, x, y);
        x * v2 - y * v1
    }

    /// `p(z) = P(z, 1)`, which is `2π z (z − 1)` when the angles sum to `2π`.
    pub fn p(&self, z: Complex64) -> Complex64 {
        self.p_homogeneous(z, Complex64::new(1.0, 0.0))
    }
}

impl Default for FieldParams {
    fn default() -> Self {
        Self::canonical()
    }
}

pub fn eval_field(params: &FieldParams, x: Complex64, y: Complex64) -> (Complex64, Complex64) {
    let v1 = -params.alpha_inf * x * x + (params.alpha1 + params.alpha_inf) * x * y;
    let v2 = (params.alpha0 + params.alpha1) * x * y - params.alpha0 * y * y;
    (v1, v2)
}

fn f(params: &FieldParams, y: &State) -> State {
    let (a, b) = eval_field(params, y[0], y[1]);
    [a, b]
}

pub fn state_norm(y: &State) -> f64 {
    (y[0].norm_sqr() + y[1].norm_sqr()).sqrt()
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += k[0] * (h * c);
        out[1] += k[1] * (h * c);
    }
    out
}

/// `δ = γ₁/γ₂`, infinite on `γ₂ = 0`.
pub fn projection(y: &State) -> Complex64 {
    if y[1] == Complex64::new(0.0, 0.0) {
        Complex64::new(f64::INFINITY, 0.0)
    } else {
        y[0] / y[1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub g1: Complex64,
    pub g2: Complex64,
    pub delta: Complex64,
    /// Local error estimate of the step that produced the sample.
    pub step_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FieldTermination {
    TimeLimit,
    BlowUp { t_star: f64 },
    NearSingularLine { t: f64 },
    StepLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: FieldTermination,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn deltas(&self) -> Vec<Complex64> {
        self.samples.iter().map(|s| s.delta).collect()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectories have an initial sample")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Record samples on the grid `t₀ + k·dt` (steps are clamped to land on it)
    /// instead of at every accepted step.
    pub output_dt: Option<f64>,
    pub max_steps: usize,
    /// Stop when `δ` comes within this chordal distance of `0`, `1` or `∞`.
    pub singular_line_distance: Option<f64>,
    pub initial_step: Option<f64>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            output_dt: None,
            max_steps: 5_000_000,
            singular_line_distance: None,
            initial_step: None,
        }
    }
}

impl IntegrateOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol * 1e-2,
            ..Self::default()
        }
    }

    pub fn uniform(mut self, dt: f64) -> Self {
        self.output_dt = Some(dt);
        self
    }
}

pub const BLOWUP_NORM: f64 = 1e8;
pub const BLOWUP_STEP: f64 = 1e-14;

// Dormand–Prince 5(4)
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct StepResult {
    y: State,
    k7: State,
    err: f64,
}

fn dopri_step(params: &FieldParams, y: &State, k1: &State, h: f64) -> StepResult {
    let _ = C;
    let k2 = f(params, &axpy(y, h, &[(A2[0], k1)]));
    let k3 = f(params, &axpy(y, h, &[(A3[0], k1), (A3[1], &k2)]));
    let k4 = f(params, &axpy(y, h, &[(A4[0], k1), (A4[1], &k2), (A4[2], &k3)]));
    let k5 = f(params, &axpy(y, h, &[(A5[0], k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)]));
    let k6 = f(
        params,
        &axpy(y, h, &[(A6[0], k1), (A6[1], &k2), (A6[2], &k3), (A6[3], &k4), (A6[4], &k5)]),
    );
    let ynew = axpy(y, h, &[(B[0], k1), (B[2], &k3), (B[3], &k4), (B[4], &k5), (B[5], &k6)]);
    let k7 = f(params, &ynew);
    let ks = [k1, &k2, &k3, &k4, &k5, &k6, &k7];
    let mut err = [Complex64::new(0.0, 0.0); 2];
    for (e, k) in E.iter().zip(ks) {
        err[0] += k[0] * (h * e);
        err[1] += k[1] * (h * e);
    }
    StepResult {
        y: ynew,
        k7,
        err: state_norm(&err),
    }
}

/// Chordal distance on the Riemann sphere.
pub fn chordal(a: Complex64, b: Complex64) -> f64 {
    let inf_a = !a.is_finite();
    let inf_b = !b.is_finite();
    match (inf_a, inf_b) {
        (true, true) => 0.0,
        (true, false) => 2.0 / (1.0 + b.norm_sqr()).sqrt(),
        (false, true) => 2.0 / (1.0 + a.norm_sqr()).sqrt(),
        (false, false) => 2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt()),
    }
}

/// Chordal distance from `z` to `{0, 1, ∞}`.
pub fn singular_distance(z: Complex64) -> f64 {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let inf = Complex64::new(f64::INFINITY, 0.0);
    chordal(z, zero).min(chordal(z, one)).min(chordal(z, inf))
}

/// Adaptive integration of `γ' = v(γ)` on `[0, t_end]`.
pub fn integrate(params: &FieldParams, y0: State, t_end: f64, opts: &IntegrateOptions) -> Result<Trajectory, FieldError> {
    if state_norm(&y0) == 0.0 {
        return Err(FieldError::ZeroInitial);
    }
    let mut t = 0.0f64;
    let mut y = y0;
    let mut k1 = f(params, &y);
    let mut samples = vec![Sample {
        t,
        g1: y[0],
        g2: y[1],
        delta: projection(&y),
        step_error: 0.0,
    }];
    let scale0 = opts.atol + opts.rtol * state_norm(&y);
    let mut h = opts.initial_step.unwrap_or_else(|| {
        let d = state_norm(&k1).max(1e-300);
        (0.01 * scale0.powf(0.2) / d.powf(0.2) * state_norm(&y).max(1e-300).powf(0.8) / d.powf(0.8)).clamp(1e-12, 0.1)
    });
    let mut next_grid = opts.output_dt.map(|dt| dt.min(t_end));
    let mut grid_index = 1usize;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut prev: Option<(f64, f64)> = None;
    let termination;
    loop {
        if t >= t_end {
            termination = FieldTermination::TimeLimit;
            break;
        }
        if accepted + rejected >= opts.max_steps {
            termination = FieldTermination::StepLimit;
            break;
        }
        let target = next_grid.unwrap_or(t_end).min(t_end);
        let clamped = h >= target - t;
        let step = if clamped { target - t } else { h };
        let res = dopri_step(params, &y, &k1, step);
        let ny = state_norm(&y).max(state_norm(&res.y));
        let scale = opts.atol + opts.rtol * ny;
        let ratio = if res.err.is_finite() { res.err / scale } else { f64::INFINITY };
        if ratio <= 1.0 {
            t = if clamped { target } else { t + step };
            y = res.y;
            k1 = res.k7;
            accepted += 1;
            let on_grid = match (opts.output_dt, clamped) {
                (Some(dt), true) if target < t_end || (target - t_end).abs() == 0.0 => {
                    grid_index += 1;
                    next_grid = Some((dt * grid_index as f64).min(t_end));
                    true
                }
                (Some(_), _) => false,
                (None, _) => true,
            };
            if on_grid {
                samples.push(Sample {
                    t,
                    g1: y[0],
                    g2: y[1],
                    delta: projection(&y),
                    step_error: res.err,
                });
            }
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            if !clamped || factor < 1.0 {
                h = step * factor;
            }
            let norm = state_norm(&y);
            if let Some(dmin) = opts.singular_line_distance {
                if singular_distance(projection(&y)) < dmin {
                    termination = FieldTermination::NearSingularLine { t };
                    break;
                }
            }
            if norm > BLOWUP_NORM && h < BLOWUP_STEP {
                termination = FieldTermination::BlowUp {
                    t_star: extrapolate_blowup(prev, (t, 1.0 / norm)),
                };
                break;
            }
            prev = Some((t, 1.0 / norm));
        } else {
            rejected += 1;
            h = step * (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
            if !h.is_finite() {
                h = step * 0.1;
            }
            if h < BLOWUP_STEP * t.abs().max(1.0) {
                let norm = state_norm(&y);
                if norm > BLOWUP_NORM {
                    termination = FieldTermination::BlowUp {
                        t_star: extrapolate_blowup(prev, (t, 1.0 / norm)),
                    };
                    break;
                }
                return Err(FieldError::StiffnessFailure { t, h });
            }
        }
    }
    Ok(Trajectory {
        samples,
        termination,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}

/// Zero of the line through the last two values of `1/‖γ‖`.
fn extrapolate_blowup(prev: Option<(f64, f64)>, last: (f64, f64)) -> f64 {
    match prev {
        Some((t1, r1)) if r1 != last.1 => last.0 + last.1 * (last.0 - t1) / (r1 - last.1),
        _ => last.0,
    }
}

/// Residual of `δ' = −γ₂ p(δ)` with `δ'` from 5-point central differences on
/// a uniform grid, relative to `|δ'|`.
pub fn projection_identity_residual(params: &FieldParams, traj: &Trajectory) -> Result<f64, FieldError> {
    let s = &traj.samples;
    if s.len() < 5 {
        return Err(FieldError::TooFewSamples(5));
    }
    if s.iter().all(|x| x.delta.norm() < 1e-12) {
        return Err(FieldError::NotApplicable("δ ≡ 0 on the line x = 0".into()));
    }
    let dt = s[1].t - s[0].t;
    for w in s.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.max(1.0) {
            return Err(FieldError::NotApplicable("samples are not uniformly spaced".into()));
        }
    }
    let one = Complex64::new(1.0, 0.0);
    for x in s {
        let d = x.delta.norm().min((x.delta - one).norm()).min(1.0 / x.delta.norm());
        if !(d >= 0.05) {
            return Err(FieldError::TooCloseToSingularity { t: x.t, distance: d });
        }
    }
    let mut worst: f64 = 0.0;
    for k in 2..s.len() - 2 {
        let d = (s[k - 2].delta - s[k - 1].delta * 8.0 + s[k + 1].delta * 8.0 - s[k + 2].delta) / (12.0 * dt);
        let predicted = -s[k].g2 * params.p(s[k].delta);
        let r = (d - predicted).norm() / d.norm().max(1e-300);
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Continuous logarithm along a path of points avoiding `0`.
fn continue_log(prev_log: Complex64, prev: Complex64, z: Complex64) -> Complex64 {
    prev_log + (z / prev).ln()
}

const GAUSS_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GAUSS_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_,
    0.362_683_783_378_362_,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Developing map `φ(z) = ∫ z^{μ₀−1} (z−1)^{μ₁−1} dz` along a path, with
/// `φ(path[0]) = 0` and branches continued along the path. Chords between
/// consecutive points are integrated by 8-point Gauss–Legendre.
pub fn develop_path(params: &FieldParams, path: &[Complex64]) -> Result<Vec<Complex64>, FieldError> {
    let one = Complex64::new(1.0, 0.0);
    let e0 = params.mu0() - one;
    let e1 = params.mu1() - one;
    let mut out = Vec::with_capacity(path.len());
    let Some(&first) = path.first() else {
        return Ok(out);
    };
    let check = |i: usize, z: Complex64| -> Result<(), FieldError> {
        let d = z.norm().min((z - one).norm()).min(1.0 / z.norm());
        if !(d >= 0.1) {
            return Err(FieldError::BranchAmbiguity { index: i, distance: d });
        }
        Ok(())
    };
    check(0, first)?;
    let mut log0 = first.ln();
    let mut log1 = (first - one).ln();
    let mut phi = Complex64::new(0.0, 0.0);
    out.push(phi);
    for i in 1..path.len() {
        let (za, zb) = (path[i - 1], path[i]);
        check(i, zb)?;
        let gap = (zb - za).norm();
        if gap > 0.05 {
            return Err(FieldError::SamplingTooCoarse { index: i - 1, gap });
        }
        let half = (zb - za) * 0.5;
        let mid = (za + zb) * 0.5;
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            let z = mid + half * *x;
            let l0 = continue_log(log0, za, z);
            let l1 = continue_log(log1, za - one, z - one);
            acc += (e0 * l0 + e1 * l1).exp() * w;
        }
        phi += acc * half;
        log0 = continue_log(log0, za, zb);
        log1 = continue_log(log1, za - one, zb - one);
        out.push(phi);
    }
    Ok(out)
}

/// Largest distance from the least-squares line, over the extent along it.
pub fn collinearity_residual(points: &[Complex64]) -> f64 {
    let n = points.len() as f64;
    let c = points.iter().sum::<Complex64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let d = p - c;
        sxx += d.re * d.re;
        syy += d.im * d.im;
        sxy += d.re * d.im;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let dir = Complex64::from_polar(1.0, angle);
    let (mut lo, mut hi, mut worst) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for p in points {
        let q = (p - c) * dir.conj();
        lo = lo.min(q.re);
        hi = hi.max(q.re);
        worst = worst.max(q.im.abs());
    }
    if hi > lo {
        worst / (hi - lo)
    } else {
        0.0
    }
}

/// Collinearity residual of `φ∘δ` along a trajectory.
pub fn developing_straightness(params: &FieldParams, traj: &Trajectory) -> Result<f64, FieldError> {
    path_straightness(params, &traj.deltas())
}

pub fn path_straightness(params: &FieldParams, path: &[Complex64]) -> Result<f64, FieldError> {
    if path.len() < 3 {
        return Err(FieldError::TooFewSamples(3));
    }
    Ok(collinearity_residual(&develop_path(params, path)?))
}

/// `path` with a bump `amplitude·sin(πk/n)` added perpendicular to its chord.
pub fn perturbed_path(path: &[Complex64], amplitude: f64) -> Vec<Complex64> {
    let n = path.len().saturating_sub(1).max(1) as f64;
    let chord = path[path.len() - 1] - path[0];
    let normal = if chord.norm() > 0.0 {
        Complex64::i() * chord / chord.norm()
    } else {
        Complex64::i()
    };
    path.iter()
        .enumerate()
        .map(|(k, z)| z + normal * (amplitude * (PI * k as f64 / n).sin()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LParam {
    Zero,
    Infinity,
    Finite(Complex64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CircleShape {
    Point { at: Complex64 },
    Line { through: Complex64, direction: Complex64 },
    Circle { center: Complex64, radius: f64 },
}

/// `{ l / (2πμ₀ (l t + 1)) : t ∈ R ∪ {∞} }` in the `γ₂`-plane of `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitCircle {
    pub l: LParam,
    pub alpha0: Complex64,
    pub shape: CircleShape,
}

impl LimitCircle {
    pub fn point(&self, t: f64) -> Complex64 {
        match self.l {
            LParam::Zero => Complex64::new(0.0, 0.0),
            LParam::Infinity => 1.0 / (self.alpha0 * t),
            LParam::Finite(l) => l / (self.alpha0 * (l * t + 1.0)),
        }
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        match self.shape {
            CircleShape::Point { at } => (z - at).norm(),
            CircleShape::Line { through, direction } => {
                let d = direction / direction.norm();
                ((z - through) * d.conj()).im.abs()
            }
            CircleShape::Circle { center, radius } => ((z - center).norm() - radius).abs(),
        }
    }
}

pub fn limit_circle(params: &FieldParams, l: LParam) -> Result<LimitCircle, FieldError> {
    let a0 = params.alpha0;
    let zero = Complex64::new(0.0, 0.0);
    let shape = match l {
        LParam::Zero => CircleShape::Point { at: zero },
        LParam::Infinity => CircleShape::Line {
            through: zero,
            direction: 1.0 / a0,
        },
        LParam::Finite(l) if l == zero => CircleShape::Point { at: zero },
        LParam::Finite(l) if l.im == 0.0 => return Err(FieldError::RealNonzeroL),
        LParam::Finite(l) => {
            // the points are 1/w for w on the line α₀(t + 1/l); inversion sends
            // a line at closest point m to the circle through 0 centered at 1/(2m)
            let base = a0 / l;
            let dir = a0 / a0.norm();
            let m = base - dir * (base * dir.conj()).re;
            let center = 1.0 / (2.0 * m);
            CircleShape::Circle {
                center,
                radius: center.norm(),
            }
        }
    };
    Ok(LimitCircle { l, alpha0: a0, shape })
}

/// Exact flow on `x = 0`: `γ₂(t) = 1/(w + α₀ t)`.
pub fn l0_exact(params: &FieldParams, w: Complex64, t: f64) -> Complex64 {
    1.0 / (w + params.alpha0 * t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccumulationReport {
    pub returns: usize,
    pub return_times: Vec<f64>,
    pub norms: Vec<f64>,
    pub min_norm: f64,
}

/// Sample indices where the chordal distance of `δ` to `{0, 1, ∞}` has a
/// strict local maximum.
pub fn detect_returns(traj: &Trajectory) -> Vec<usize> {
    let d: Vec<f64> = traj.samples.iter().map(|s| singular_distance(s.delta)).collect();
    (1..d.len().saturating_sub(1))
        .filter(|&i| d[i] > d[i - 1] && d[i] >= d[i + 1])
        .collect()
}

/// `min ‖γ(tₙ)‖` over the first `max_returns` return samples.
pub fn accumulation_check(traj: &Trajectory, returns: &[usize], max_returns: usize) -> Result<AccumulationReport, FieldError> {
    if matches!(traj.termination, FieldTermination::BlowUp { .. }) {
        return Err(FieldError::NotApplicable("trajectory blows up".into()));
    }
    let idx: Vec<usize> = returns.iter().copied().take(max_returns).collect();
    let norms: Vec<f64> = idx
        .iter()
        .map(|&i| state_norm(&[traj.samples[i].g1, traj.samples[i].g2]))
        .collect();
    Ok(AccumulationReport {
        returns: idx.len(),
        return_times: idx.iter().map(|&i| traj.samples[i].t).collect(),
        min_norm: norms.iter().copied().fold(f64::INFINITY, f64::min),
        norms,
    })
}

/// Winding numbers of `δ` around `0` and `1` (a diagnostic only).
pub fn winding_numbers(traj: &Trajectory) -> (f64, f64) {
    let one = Complex64::new(1.0, 0.0);
    let mut w0 = 0.0;
    let mut w1 = 0.0;
    for s in traj.samples.windows(2) {
        let (a, b) = (s[0].delta, s[1].delta);
        if a.is_finite() && b.is_finite() {
            w0 += (b / a).arg();
            w1 += ((b - one) / (a - one)).arg();
        }
    }
    (w0 / (2.0 * PI), w1 / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coefficients_and_p() {
        let p = FieldParams::canonical();
        // (α₁ + α∞) = 3π/4 − (i/2) log 2
        let s = p.alpha1 + p.alpha_inf;
        assert!((s - c(3.0 * PI / 4.0, -0.5 * 2f64.ln())).norm() < 1e-15);
        for z in [c(0.3, 0.2), c(-1.0, 2.0)] {
            assert!((p.p(z) - 2.0 * PI * z * (z - 1.0)).norm() < 1e-12);
        }
        let (v1, v2) = eval_field(&p, c(0.0, 0.0), c(1.5, 0.5));
        assert_eq!(v1, c(0.0, 0.0));
        assert!((v2 + p.alpha0 * c(1.5, 0.5) * c(1.5, 0.5)).norm() < 1e-14);
        let x = c(0.7, -0.2);
        let (a, b) = eval_field(&p, x, x);
        assert!((a - p.alpha1 * x * x).norm() < 1e-14 && (b - p.alpha1 * x * x).norm() < 1e-14);
    }

    #[test]
    fn l0_flow_matches_exact_solution() {
        let p = FieldParams::canonical();
        let tr = integrate(&p, [c(0.0, 0.0), c(1.0, 0.0)], 1.0, &IntegrateOptions::default().uniform(0.01)).unwrap();
        assert_eq!(tr.termination, FieldTermination::TimeLimit);
        assert_eq!(tr.samples.len(), 101);
        for s in &tr.samples {
            let e = l0_exact(&p, c(1.0, 0.0), s.t);
            assert!((s.g2 - e).norm() / e.norm() < 1e-8);
            assert_eq!(s.g1, c(0.0, 0.0));
        }
    }

    #[test]
    fn blow_up_on_l0_near_t_one() {
        let p = FieldParams::canonical();
        // 1/(w + α₀t) with w = −α₀ blows up at t = 1
        let y0 = [c(0.0, 0.0), 1.0 / (-p.alpha0)];
        let tr = integrate(&p, y0, 2.0, &IntegrateOptions::default()).unwrap();
        match tr.termination {
            FieldTermination::BlowUp { t_star } => assert!((t_star - 1.0).abs() < 1e-6, "{t_star}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn projection_identity_on_a_generic_arc() {
        let p = FieldParams::canonical();
        let tr = integrate(&p, [c(0.4, 0.3), c(0.8, -0.1)], 0.3, &IntegrateOptions::default().uniform(2e-3)).unwrap();
        let r = projection_identity_residual(&p, &tr).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn straightness_and_negative_control() {
        let p = FieldParams::canonical();
        let tr = integrate(&p, [c(0.4, 0.3), c(0.8, -0.1)], 0.3, &IntegrateOptions::default().uniform(2e-3)).unwrap();
        let r = developing_straightness(&p, &tr).unwrap();
        assert!(r < 1e-6, "{r}");
        let bumped = perturbed_path(&tr.deltas(), 0.02);
        assert!(path_straightness(&p, &bumped).unwrap() > 1e-2);
    }

    #[test]
    fn circles() {
        let p = FieldParams::canonical();
        let zero = limit_circle(&p, LParam::Zero).unwrap();
        assert_eq!(zero.point(3.0), c(0.0, 0.0));
        let ci = limit_circle(&p, LParam::Finite(c(0.0, 1.0))).unwrap();
        assert!((ci.point(0.0) - c(0.0, 1.0) / p.alpha0).norm() < 1e-15);
        for t in [-3.0, -0.5, 0.0, 0.7, 10.0, 1e6] {
            assert!(ci.distance(ci.point(t)) < 1e-12);
        }
        assert!(ci.distance(c(0.0, 0.0)) < 1e-15);
        let line = limit_circle(&p, LParam::Infinity).unwrap();
        assert!(line.distance(line.point(2.0)) < 1e-15);
        assert!(line.distance(1.0 / p.mu0()) < 1e-12);
        assert_eq!(limit_circle(&p, LParam::Finite(c(2.0, 0.0))), Err(FieldError::RealNonzeroL));
    }
}
