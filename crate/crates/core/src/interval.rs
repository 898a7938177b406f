//! The first-return maps `T_θ` on `[A,B] ≅ [0,1]`, their circle lifts,
//! translation and rotation numbers, plateaus, limit sets and the
//! accumulation sets `Λ_{x₀}`.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::exec::{map_slice, Execution};
use crate::scalar::{Rational, Scalar};

/// `tan θ̃ = 1/2`, i.e. `θ̃ = π/2 − arctan 2`.
pub fn theta_tilde() -> f64 {
    0.5f64.atan()
}

/// Transient iterations before looking for a cycle.
pub const TRANSIENT: usize = 200;
/// Largest period searched for.
pub const MAX_PERIOD: usize = 64;
/// Closing tolerance of a cycle in the float detector.
pub const CYCLE_TOLERANCE: f64 = 1e-12;
/// Iterations of the fallback translation-number estimate.
pub const ESTIMATE_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntervalError {
    #[error("orbit hits the singularity {singularity} at iterate {iterate}")]
    SingularOrbit { iterate: usize, singularity: f64 },
    #[error("{0} is outside the domain")]
    OutOfDomain(f64),
    #[error("rotation number {p}/{q} is not attained")]
    NotAttained { p: i64, q: i64 },
    #[error("gap iterate {step} contains the singularity")]
    GapHitsSingularity { step: usize },
    #[error("orbit dies at the singularity at iterate {iterate}")]
    OrbitDies { iterate: usize },
    #[error("parameter outside the admissible range: {0}")]
    BadParameter(String),
}

/// How a map is evaluated exactly at one of its singularities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Extension {
    Strict,
    /// Continuous extension from the left branch.
    Left,
    /// Continuous extension from the right branch.
    Right,
}

/// Affine branch `x ↦ slope·x + offset` on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<S> {
    pub lo: S,
    pub hi: S,
    pub slope: S,
    pub offset: S,
}

impl<S: Scalar> Branch<S> {
    pub fn apply(&self, x: &S) -> S {
        self.slope.clone() * x.clone() + self.offset.clone()
    }

    /// Image of the domain, as `(low, high)`.
    pub fn image(&self) -> (S, S) {
        (self.apply(&self.lo), self.apply(&self.hi))
    }
}

/// Piecewise-affine, orientation-preserving, injective interval map with gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct GaietMap<S> {
    pub branches: Vec<Branch<S>>,
}

impl<S: Scalar> GaietMap<S> {
    /// Interior branch endpoints.
    pub fn singularities(&self) -> Vec<S> {
        self.branches.iter().skip(1).map(|b| b.lo.clone()).collect()
    }

    pub fn domain(&self) -> (S, S) {
        (
            self.branches[0].lo.clone(),
            self.branches.last().expect("a branch").hi.clone(),
        )
    }

    /// Index of the branch used at `x`.
    pub fn branch_index(&self, x: &S, ext: Extension) -> Result<usize, IntervalError> {
        let tol = S::singular_tol();
        let (lo, hi) = self.domain();
        let edge_tol = if S::EXACT { S::zero() } else { S::from_f64(1e-12) };
        if *x < lo.clone() - edge_tol.clone() || *x > hi + edge_tol {
            return Err(IntervalError::OutOfDomain(x.to_f64()));
        }
        for i in 1..self.branches.len() {
            let s = &self.branches[i].lo;
            let d = (x.clone() - s.clone()).abs();
            if d <= tol {
                return match ext {
                    Extension::Strict => Err(IntervalError::SingularOrbit {
                        iterate: 0,
                        singularity: s.to_f64(),
                    }),
                    Extension::Left => Ok(i - 1),
                    Extension::Right => Ok(i),
                };
            }
            if *x < *s {
                return Ok(i - 1);
            }
        }
        Ok(self.branches.len() - 1)
    }

    pub fn eval(&self, x: &S, ext: Extension) -> Result<S, IntervalError> {
        let i = self.branch_index(x, ext)?;
        Ok(self.branches[i].apply(x))
    }

    /// Pairwise disjointness of the open branch images.
    pub fn is_injective(&self) -> bool {
        let mut images: Vec<(S, S)> = self.branches.iter().map(|b| b.image()).collect();
        if images.iter().any(|(a, b)| a > b) {
            return false;
        }
        images.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("ordered"));
        images.windows(2).all(|w| w[0].1 <= w[1].0)
    }

    pub fn to_f64_map(&self) -> GaietMap<f64> {
        GaietMap {
            branches: self
                .branches
                .iter()
                .map(|b| Branch {
                    lo: b.lo.to_f64(),
                    hi: b.hi.to_f64(),
                    slope: b.slope.to_f64(),
                    offset: b.offset.to_f64(),
                })
                .collect(),
        }
    }

    /// The singularity of a two-branch map.
    pub fn singularity(&self) -> Option<S> {
        (self.branches.len() == 2).then(|| self.branches[1].lo.clone())
    }
}

/// Snaps a float tangent to the exact regime boundaries 1/2 and 1.
pub fn snap_tan(t: f64) -> f64 {
    if (t - 0.5).abs() < 4e-16 {
        0.5
    } else if (t - 1.0).abs() < 4e-16 {
        1.0
    } else {
        t
    }
}

/// `T_θ` for `θ ∈ [0, π/4]`.
pub fn t_theta(theta: f64) -> GaietMap<f64> {
    t_theta_from_tan(snap_tan(theta.tan()))
}

/// `T_θ` from `t = tan θ ∈ [0, 1]`: branches `x/16 + (17−4t)/16` on `[0, 2t−1[`
/// and `x/16 + (11−12t)/16` on `]2t−1, 1]`; one branch when `2t−1 ∉ (0,1)`.
pub fn t_theta_from_tan<S: Scalar>(t: S) -> GaietMap<S> {
    let sixteenth = S::from_ratio(1, 16);
    let s = S::from_int(2) * t.clone() - S::one();
    let first = (S::from_int(17) - S::from_int(4) * t.clone()) / S::from_int(16);
    let second = (S::from_int(11) - S::from_int(12) * t) / S::from_int(16);
    let branch = |lo: S, hi: S, offset: S| Branch {
        lo,
        hi,
        slope: sixteenth.clone(),
        offset,
    };
    if s <= S::zero() {
        GaietMap {
            branches: vec![branch(S::zero(), S::one(), second)],
        }
    } else if s >= S::one() {
        GaietMap {
            branches: vec![branch(S::zero(), S::one(), first)],
        }
    } else {
        GaietMap {
            branches: vec![branch(S::zero(), s.clone(), first), branch(s, S::one(), second)],
        }
    }
}

/// Degree-one lift of a map of `[0,1]` seen as a circle: branch `i` is shifted
/// by `offsets[i]`, and `T̃(x + 1) = T̃(x) + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftMap<S> {
    pub map: GaietMap<S>,
    pub offsets: Vec<i64>,
}

/// Point of the line stored as integer part plus fractional part in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftPoint<S> {
    pub int: i64,
    pub frac: S,
}

impl<S: Scalar> LiftPoint<S> {
    pub fn new(x: S) -> Self {
        let k = x.floor_int();
        Self {
            int: k,
            frac: x - S::from_int(k),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.int as f64 + self.frac.to_f64()
    }
}

/// Right-continuous lift: offset 0 on the first branch and +1 on the second;
/// one-branch maps are their own lift.
pub fn lift<S: Scalar>(map: &GaietMap<S>) -> LiftMap<S> {
    let offsets = match map.branches.len() {
        1 => vec![0],
        n => (0..n as i64).map(|i| i.min(1)).collect(),
    };
    LiftMap {
        map: map.clone(),
        offsets,
    }
}

impl<S: Scalar> LiftMap<S> {
    /// One step; returns the new point and the branch used.
    pub fn step(&self, p: &LiftPoint<S>, ext: Extension) -> Result<(LiftPoint<S>, usize), IntervalError> {
        let i = self.map.branch_index(&p.frac, ext)?;
        let y = self.map.branches[i].apply(&p.frac);
        let k = y.floor_int();
        Ok((
            LiftPoint {
                int: p.int + self.offsets[i] + k,
                frac: y - S::from_int(k),
            },
            i,
        ))
    }

    /// `T̃(x)` for any real `x`.
    pub fn eval(&self, x: S, ext: Extension) -> Result<S, IntervalError> {
        let (p, _) = self.step(&LiftPoint::new(x), ext)?;
        Ok(S::from_int(p.int) + p.frac)
    }

    /// Set-valued value at the singularity: `[left limit, right value]` of the
    /// lift, which fills the gap.
    pub fn filled_value(&self) -> Option<(S, S)> {
        let s = self.map.singularity()?;
        Some((
            self.eval(s.clone(), Extension::Left).ok()?,
            self.eval(s, Extension::Right).ok()?,
        ))
    }
}

/// Estimate with the `1/n` bound valid for monotone degree-one lifts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IrrationalEstimate {
    pub estimate: f64,
    pub error_bound: f64,
}

/// `(T̃^n(x₀) − x₀)/n` with the right-continuous extension.
pub fn translation_number(lift: &LiftMap<f64>, x0: f64, n: usize) -> IrrationalEstimate {
    let mut p = LiftPoint::new(x0);
    let start = p.to_f64();
    for _ in 0..n {
        p = match lift.step(&p, Extension::Right) {
            Ok((q, _)) => q,
            Err(_) => {
                // rounding pushed the fractional part to the edge of [0,1]
                let frac = p.frac.clamp(0.0, 1.0);
                lift.step(&LiftPoint { int: p.int, frac }, Extension::Right)
                    .expect("clamped point is in the domain")
                    .0
            }
        };
    }
    IrrationalEstimate {
        estimate: (p.int as f64 + p.frac - start) / n.max(1) as f64,
        error_bound: 1.0 / n.max(1) as f64,
    }
}

/// Translation number of `T_θ` by iteration.
pub fn transl_estimate(theta: f64, n: usize) -> IrrationalEstimate {
    translation_number(&lift(&t_theta(theta)), START_POINT, n)
}

/// Default starting point of orbits (avoids the simple rationals where the
/// singularity sits for the usual parameters).
pub const START_POINT: f64 = 0.318_309_886_183_790_7;

/// Reduced fraction `p/q` with `q > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Fraction {
    pub p: i64,
    pub q: i64,
}

impl Fraction {
    pub fn new(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        let g = p.gcd(&q).max(1);
        let sign = if q < 0 { -1 } else { 1 };
        Self {
            p: sign * p / g,
            q: sign * q / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn cmp_f64(self, x: f64) -> std::cmp::Ordering {
        self.to_f64().total_cmp(&x)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        ((self.p as i128) * (other.q as i128)).cmp(&((other.p as i128) * (self.q as i128)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RotationValue {
    Rational(Fraction),
    IrrationalEstimate(IrrationalEstimate),
}

impl RotationValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            RotationValue::Rational(f) => f.to_f64(),
            RotationValue::IrrationalEstimate(e) => e.estimate,
        }
    }

    pub fn as_fraction(&self) -> Option<Fraction> {
        match self {
            RotationValue::Rational(f) => Some(*f),
            RotationValue::IrrationalEstimate(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness<S> {
    /// `T̃^q(x) = x + p` for the first point; `points` is the whole cycle of
    /// fractional parts and `itinerary` the branches used.
    PeriodicOrbit {
        p: i64,
        q: usize,
        points: Vec<S>,
        itinerary: Vec<usize>,
        /// `|T̃^q(x) − x − p|` (zero for exact backends).
        residual: f64,
    },
    LiftIterationTrace { x0: f64, xn: f64, n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationResult<S> {
    pub value: RotationValue,
    pub witness: Witness<S>,
    pub extension: Extension,
}

/// Detects an attracting periodic orbit of the lift and builds an exact
/// witness; falls back to a translation-number estimate.
pub fn rotation_number_exact<S: Scalar>(map: &GaietMap<S>, ext: Extension) -> Result<RotationResult<S>, IntervalError> {
    rotation_number_with_budget(map, ext, ESTIMATE_ITERATIONS)
}

pub fn rotation_number_with_budget<S: Scalar>(
    map: &GaietMap<S>,
    ext: Extension,
    estimate_iterations: usize,
) -> Result<RotationResult<S>, IntervalError> {
    let exact_lift = lift(map);
    let flift = lift(&map.to_f64_map());
    let mut p = LiftPoint::new(START_POINT);
    // float points within rounding of the singularity are pushed to the right;
    // whether the orbit really meets it is decided by the exact witness
    let near_hit = std::cell::Cell::new(None);
    let step = |p: &LiftPoint<f64>, n: usize| -> Result<(LiftPoint<f64>, usize), IntervalError> {
        match flift.step(p, ext) {
            Err(IntervalError::SingularOrbit { singularity, .. }) if ext == Extension::Strict => {
                if near_hit.get().is_none() {
                    near_hit.set(Some((n, singularity)));
                }
                flift.step(p, Extension::Right)
            }
            other => other,
        }
    };
    for n in 0..TRANSIENT {
        p = step(&p, n)?.0;
    }
    let base = p.clone();
    let mut orbit = vec![base.clone()];
    let mut itinerary = Vec::new();
    let mut found = None;
    for q in 1..=MAX_PERIOD {
        let (next, i) = step(orbit.last().expect("nonempty"), TRANSIENT + q)?;
        itinerary.push(i);
        let d = (next.frac - base.frac).abs();
        let circ = d.min(1.0 - d);
        if circ < CYCLE_TOLERANCE {
            // displacement, corrected when the two points straddle an integer
            let mut disp = next.int - base.int;
            if d > 0.5 {
                disp += if next.frac < base.frac { 1 } else { -1 };
            }
            found = Some((disp, q));
            break;
        }
        orbit.push(next);
    }

    if let Some((disp, q)) = found {
        if let Some(result) = exact_witness(&exact_lift, &itinerary[..q], disp, ext) {
            return Ok(result);
        }
        if let Some((iterate, singularity)) = near_hit.get() {
            let one_sided = [Extension::Left, Extension::Right]
                .into_iter()
                .any(|e| exact_witness(&exact_lift, &itinerary[..q], disp, e).is_some());
            if one_sided {
                return Err(IntervalError::SingularOrbit { iterate, singularity });
            }
        }
    }
    let est = translation_number(&flift, START_POINT, estimate_iterations);
    Ok(RotationResult {
        value: RotationValue::IrrationalEstimate(est),
        witness: Witness::LiftIterationTrace {
            x0: START_POINT,
            xn: START_POINT + est.estimate * estimate_iterations as f64,
            n: estimate_iterations,
        },
        extension: ext,
    })
}

/// Solves the composed affine map of `itinerary` for its lifted fixed point and
/// checks it against the actual map.
fn exact_witness<S: Scalar>(lift: &LiftMap<S>, itinerary: &[usize], disp: i64, ext: Extension) -> Option<RotationResult<S>> {
    let q = itinerary.len();
    // composite in fractional coordinates (images of T lie in [0,1)); the
    // lift displacement is checked on the actual orbit below
    let mut a = S::one();
    let mut b = S::zero();
    for &i in itinerary {
        let br = &lift.map.branches[i];
        a = br.slope.clone() * a;
        b = br.slope.clone() * b + br.offset.clone();
    }
    let x = b / (S::one() - a);
    let mut pt = LiftPoint::new(x.clone());
    let start_int = pt.int;
    let start = pt.frac.clone();
    let mut points = Vec::with_capacity(q);
    let mut used = Vec::with_capacity(q);
    for _ in 0..q {
        points.push(pt.frac.clone());
        let (next, i) = lift.step(&pt, ext).ok()?;
        used.push(i);
        pt = next;
    }
    let residual_s = (S::from_int(pt.int - start_int - disp) + pt.frac - start.clone()).abs();
    let residual = residual_s.to_f64();
    let ok = if S::EXACT { residual_s.is_zero() } else { residual < 1e-10 };
    if !ok || used != itinerary {
        return None;
    }
    let f = Fraction::new(disp, q as i64);
    Some(RotationResult {
        value: RotationValue::Rational(f),
        witness: Witness::PeriodicOrbit {
            p: disp,
            q,
            points,
            itinerary: used,
            residual,
        },
        extension: ext,
    })
}

/// Strict evaluation, retried with both one-sided extensions when the orbit
/// runs into the singularity.
pub fn rotation_number_robust<S: Scalar>(map: &GaietMap<S>) -> Result<Vec<RotationResult<S>>, IntervalError> {
    match rotation_number_exact(map, Extension::Strict) {
        Ok(r) => Ok(vec![r]),
        Err(IntervalError::SingularOrbit { .. }) => Ok(vec![
            rotation_number_exact(map, Extension::Left)?,
            rotation_number_exact(map, Extension::Right)?,
        ]),
        Err(e) => Err(e),
    }
}

/// Translation number of `T_θ` as an exact fraction when a cycle is found.
pub fn rotation_of_theta(theta: f64, estimate_iterations: usize) -> RotationValue {
    let map = t_theta(theta);
    let results = match rotation_number_with_budget(&map, Extension::Strict, estimate_iterations) {
        Ok(r) => vec![r],
        Err(_) => [Extension::Right, Extension::Left]
            .iter()
            .filter_map(|&e| rotation_number_with_budget(&map, e, estimate_iterations).ok())
            .collect(),
    };
    results
        .into_iter()
        .next()
        .map(|r| r.value)
        .unwrap_or_else(|| RotationValue::IrrationalEstimate(transl_estimate(theta, estimate_iterations)))
}

/// How a plateau endpoint was certified.
#[derive(Debug, Clone, PartialEq)]
pub enum EndpointKind {
    /// `s(θ)` is periodic under the one-sided extension `side`; `tan θ` exact.
    SaddleConnection {
        tan: Rational,
        side: Extension,
        itinerary: Vec<usize>,
    },
    /// End of the two-branch regime (`θ̃` or `π/4`).
    DomainBoundary { tan: Rational },
    /// Bisection only.
    Bisected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlateauEndpoint {
    pub theta: f64,
    pub kind: EndpointKind,
}

impl PlateauEndpoint {
    pub fn exact_tan(&self) -> Option<&Rational> {
        match &self.kind {
            EndpointKind::SaddleConnection { tan, .. } | EndpointKind::DomainBoundary { tan } => Some(tan),
            EndpointKind::Bisected => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plateau {
    pub value: Fraction,
    pub lower: PlateauEndpoint,
    pub upper: PlateauEndpoint,
}

/// Bisection width in `θ`.
pub const PLATEAU_TOLERANCE: f64 = 1e-12;

/// Endpoints of `{θ ∈ (θ̃, π/4) : transl(θ) = p/q}`.
pub fn plateau_endpoints(p: i64, q: i64) -> Result<Plateau, IntervalError> {
    if q <= 0 || p < 0 || p > q || q as usize > MAX_PERIOD {
        return Err(IntervalError::NotAttained { p, q });
    }
    let target = Fraction::new(p, q);
    let lo = theta_tilde();
    let hi = FRAC_PI_4;
    // rank(θ) compares transl(θ) to the target: Greater, Equal, Less,
    // non-increasing in θ
    use std::cmp::Ordering::*;
    let rank = |theta: f64| -> std::cmp::Ordering {
        match rotation_of_theta(theta, 200_000) {
            RotationValue::Rational(f) => f.cmp(&target),
            RotationValue::IrrationalEstimate(e) if (e.estimate - target.to_f64()).abs() <= e.error_bound => Equal,
            RotationValue::IrrationalEstimate(e) => target.cmp_f64(e.estimate).reverse(),
        }
    };
    // lower end: first θ with rank ≠ Greater
    let lower = if target == Fraction::new(1, 1) {
        PlateauEndpoint {
            theta: lo,
            kind: EndpointKind::DomainBoundary {
                tan: Rational::from_ratio(1, 2),
            },
        }
    } else {
        let theta = bisect(lo, hi, |th| rank(th) == Greater);
        snap_endpoint(theta, target, true)
    };
    let upper = if target == Fraction::new(0, 1) {
        PlateauEndpoint {
            theta: hi,
            kind: EndpointKind::DomainBoundary {
                tan: Rational::from_int(1),
            },
        }
    } else {
        let theta = bisect(lo, hi, |th| rank(th) != Less);
        snap_endpoint(theta, target, false)
    };
    if upper.theta < lower.theta {
        return Err(IntervalError::NotAttained { p, q });
    }
    Ok(Plateau {
        value: target,
        lower,
        upper,
    })
}

/// Boundary of a predicate that is true on `[lo, b)` and false on `(b, hi]`.
fn bisect(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > PLATEAU_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `x + y·t`, an affine function of the parameter `t = tan θ`.
#[derive(Debug, Clone)]
struct AffineInT {
    c0: Rational,
    c1: Rational,
}

/// Exact endpoint from the cycle itinerary found slightly inside the plateau:
/// solves `T^q(s(t)) = s(t)` along the itinerary starting next to `s`.
fn snap_endpoint(theta: f64, target: Fraction, lower: bool) -> PlateauEndpoint {
    let bisected = PlateauEndpoint {
        theta,
        kind: EndpointKind::Bisected,
    };
    let inside = if lower { theta + 1e-9 } else { theta - 1e-9 };
    let map = t_theta(inside);
    let Ok(res) = rotation_number_with_budget(&map, Extension::Strict, 1) else {
        return bisected;
    };
    let (RotationValue::Rational(f), Witness::PeriodicOrbit { points, itinerary, .. }) = (res.value, &res.witness) else {
        return bisected;
    };
    if f != target {
        return bisected;
    }
    let Some(s) = map.singularity() else {
        return bisected;
    };
    let q = points.len();
    let j = (0..q)
        .min_by(|&a, &b| (points[a] - s).abs().total_cmp(&(points[b] - s).abs()))
        .expect("nonempty cycle");
    let rotated: Vec<usize> = (0..q).map(|k| itinerary[(j + k) % q]).collect();
    let side = if rotated[0] == 0 { Extension::Left } else { Extension::Right };

    let r = |n: i64, d: i64| Rational::from_ratio(n, d);
    // s(t) = 2t − 1
    let mut x = AffineInT { c0: r(-1, 1), c1: r(2, 1) };
    for &i in &rotated {
        // branch 0: x/16 + 17/16 − t/4; branch 1: x/16 + 11/16 − 3t/4
        let (b0, b1) = if i == 0 { (r(17, 16), r(-1, 4)) } else { (r(11, 16), r(-3, 4)) };
        x = AffineInT {
            c0: x.c0 * r(1, 16) + b0,
            c1: x.c1 * r(1, 16) + b1,
        };
    }
    let c0 = x.c0 + r(1, 1);
    let c1 = x.c1 - r(2, 1);
    if Zero::is_zero(&c1) {
        return bisected;
    }
    let tan = -c0 / c1;
    let snapped_theta = Scalar::to_f64(&tan).atan();
    if (snapped_theta - theta).abs() > 1e-9 {
        return bisected;
    }
    // exact check: the singularity returns to itself along the itinerary
    let exact = t_theta_from_tan(tan.clone());
    let Some(s_exact) = exact.singularity() else {
        return bisected;
    };
    let mut y = s_exact.clone();
    for (k, &i) in rotated.iter().enumerate() {
        let ext = if k == 0 { side } else { Extension::Strict };
        match exact.branch_index(&y, ext) {
            Ok(b) if b == i => y = exact.branches[b].apply(&y),
            _ => return bisected,
        }
    }
    if y != s_exact {
        return bisected;
    }
    PlateauEndpoint {
        theta: snapped_theta,
        kind: EndpointKind::SaddleConnection {
            tan,
            side,
            itinerary: rotated,
        },
    }
}

/// Intervals of `T^n((0,1) ∖ {s})` for a two-branch map, sorted.
pub fn limit_set_cover<S: Scalar>(map: &GaietMap<S>, depth: usize) -> Result<Vec<(S, S)>, IntervalError> {
    let s = map
        .singularity()
        .ok_or_else(|| IntervalError::BadParameter("limit set cover needs two branches".into()))?;
    let (lo, hi) = map.domain();
    let mut intervals = vec![(lo, hi)];
    for step in 0..depth {
        let mut next = Vec::with_capacity(intervals.len() + 1);
        let mut split = false;
        for (a, b) in intervals {
            if a < s && s < b {
                split = true;
                next.push((map.branches[0].apply(&a), map.branches[0].apply(&s)));
                next.push((map.branches[1].apply(&s), map.branches[1].apply(&b)));
            } else {
                let i = if b <= s { 0 } else { 1 };
                next.push((map.branches[i].apply(&a), map.branches[i].apply(&b)));
            }
        }
        if !split {
            return Err(IntervalError::GapHitsSingularity { step });
        }
        next.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("ordered"));
        intervals = next;
    }
    Ok(intervals)
}

/// Cluster set estimate of `λⁿ/(xₙ − s)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaSet {
    pub zero: bool,
    pub infinity: bool,
    /// Finite nonzero cluster values.
    pub finite: Vec<f64>,
    /// Indices `n` of the tail that was clustered.
    pub tail_start: usize,
    pub depth: usize,
}

pub const LAMBDA_ZERO: f64 = 1e-6;
pub const LAMBDA_INFINITY: f64 = 1e6;
pub const LAMBDA_CLUSTER_TOLERANCE: f64 = 1e-3;

/// Clusters `λⁿ/(xₙ − s)` over the tail `n ∈ [N/2, N]` of the orbit of `x₀`.
pub fn lambda_accumulation<S: Scalar>(map: &GaietMap<S>, x0: S, depth: usize) -> Result<LambdaSet, IntervalError> {
    let s = map
        .singularity()
        .ok_or_else(|| IntervalError::BadParameter("Λ needs a two-branch map".into()))?;
    let lambda = map.branches[0].slope.clone();
    let mut x = x0;
    let mut lam_n = S::one();
    let tail_start = depth / 2;
    let mut values = Vec::new();
    for n in 0..=depth {
        let d = x.clone() - s.clone();
        if d.is_zero() || (!S::EXACT && d.abs() <= S::singular_tol()) {
            return Err(IntervalError::OrbitDies { iterate: n });
        }
        if n >= tail_start {
            values.push((lam_n.clone() / d).to_f64());
        }
        if n < depth {
            x = map.eval(&x, Extension::Strict).map_err(|_| IntervalError::OrbitDies { iterate: n })?;
            lam_n = lam_n * lambda.clone();
        }
    }
    Ok(cluster_values(&values, tail_start, depth))
}

fn cluster_values(values: &[f64], tail_start: usize, depth: usize) -> LambdaSet {
    let mut zero = false;
    let mut infinity = false;
    let mut finite: Vec<f64> = Vec::new();
    for &v in values {
        if v.abs() < LAMBDA_ZERO {
            zero = true;
        } else if v.abs() > LAMBDA_INFINITY || !v.is_finite() {
            infinity = true;
        } else if !finite
            .iter()
            .any(|&c| (c - v).abs() <= LAMBDA_CLUSTER_TOLERANCE * c.abs().max(v.abs()))
        {
            finite.push(v);
        }
    }
    finite.sort_by(f64::total_cmp);
    LambdaSet {
        zero,
        infinity,
        finite,
        tail_start,
        depth,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PreimageReport {
    /// The map has an attracting cycle; preimages of `s` are not dense.
    NotApplicable { rotation: Fraction },
    Distances(Vec<PreimageDistance>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PreimageDistance {
    pub depth: usize,
    pub preimages: usize,
    /// Hausdorff distance between the preimages and the cover.
    pub hausdorff: f64,
    /// Preimages outside every cover interval.
    pub outside: usize,
}

/// Backward orbit `s, T^{-1}(s), …` while it exists (at most one preimage per
/// point since the map is injective).
pub fn preimages_of_singularity<S: Scalar>(map: &GaietMap<S>, depth: usize) -> Vec<S> {
    let Some(s) = map.singularity() else {
        return Vec::new();
    };
    let mut out = vec![s];
    for _ in 0..depth {
        let y = out.last().expect("nonempty").clone();
        let pre = map.branches.iter().find_map(|b| {
            let x = (y.clone() - b.offset.clone()) / b.slope.clone();
            (x > b.lo && x < b.hi).then_some(x)
        });
        match pre {
            Some(x) => out.push(x),
            None => break,
        }
    }
    out
}

/// Compares the backward orbit of `s` with `limit_set_cover` at depths
/// `1..=depth`.
pub fn preimage_closure_check<S: Scalar>(map: &GaietMap<S>, depth: usize, exec: Execution) -> Result<PreimageReport, IntervalError> {
    if let Ok(r) = rotation_number_with_budget(map, Extension::Strict, 1) {
        if let RotationValue::Rational(f) = r.value {
            return Ok(PreimageReport::NotApplicable { rotation: f });
        }
    }
    let pre = preimages_of_singularity(map, depth);
    let depths: Vec<usize> = (1..=depth).collect();
    let rows = map_slice(exec, &depths, |&d| -> Result<PreimageDistance, IntervalError> {
        let cover = limit_set_cover(map, d)?;
        let pts: Vec<&S> = pre.iter().take(d + 1).collect();
        let outside = pts
            .iter()
            .filter(|&&x| !cover.iter().any(|(a, b)| a <= x && x <= b))
            .count();
        let fpts: Vec<f64> = pts.iter().map(|x| x.to_f64()).collect();
        let fcov: Vec<(f64, f64)> = cover.iter().map(|(a, b)| (a.to_f64(), b.to_f64())).collect();
        Ok(PreimageDistance {
            depth: d,
            preimages: pts.len(),
            hausdorff: hausdorff_points_intervals(&fpts, &fcov),
            outside,
        })
    });
    Ok(PreimageReport::Distances(rows.into_iter().collect::<Result<_, _>>()?))
}

/// Hausdorff distance between a finite set and a union of closed intervals.
pub fn hausdorff_points_intervals(points: &[f64], intervals: &[(f64, f64)]) -> f64 {
    if points.is_empty() || intervals.is_empty() {
        return f64::INFINITY;
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    let to_points = |x: f64| {
        let i = sorted.partition_point(|&p| p < x);
        let mut d = f64::INFINITY;
        if i < sorted.len() {
            d = d.min(sorted[i] - x);
        }
        if i > 0 {
            d = d.min(x - sorted[i - 1]);
        }
        d
    };
    let mut h: f64 = 0.0;
    for &p in &sorted {
        let d = intervals
            .iter()
            .map(|&(a, b)| if p < a { a - p } else if p > b { p - b } else { 0.0 })
            .fold(f64::INFINITY, f64::min);
        h = h.max(d);
    }
    for &(a, b) in intervals {
        // farthest point of [a,b] from the set: an endpoint or a midpoint
        let mut cands = vec![a, b];
        let i0 = sorted.partition_point(|&p| p < a);
        let i1 = sorted.partition_point(|&p| p <= b);
        for w in sorted[i0.saturating_sub(1)..(i1 + 1).min(sorted.len())].windows(2) {
            let m = 0.5 * (w[0] + w[1]);
            if m > a && m < b {
                cands.push(m);
            }
        }
        for c in cands {
            h = h.max(to_points(c));
        }
    }
    h
}

/// `θ` whose translation number is closest to `target`, by bisection on the
/// monotone float estimate (`n` iterations per evaluation).
pub fn theta_for_translation(target: f64, n: usize) -> f64 {
    bisect(theta_tilde(), FRAC_PI_4, |th| transl_estimate(th, n).estimate > target)
}

/// Exact rational with the same value as a float tangent.
pub fn exact_tan(t: f64) -> Rational {
    Rational::from_float(t).expect("finite tangent")
}

/// Rational `p/q` as a [`Rational`].
pub fn fraction_to_rational(f: Fraction) -> Rational {
    Rational::new(BigInt::from(f.p), BigInt::from(f.q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn closed_form_values() {
        let m = t_theta_from_tan(0.8);
        assert!((m.eval(&0.5, Extension::Strict).unwrap() - 0.89375).abs() < 1e-15);
        assert!((m.eval(&0.7, Extension::Strict).unwrap() - 0.13125).abs() < 1e-15);
        let diag = t_theta(FRAC_PI_4);
        assert_eq!(diag.branches.len(), 1);
        assert_eq!(diag.branches[0].offset, 13.0 / 16.0);
        let tilde = t_theta(theta_tilde());
        assert_eq!(tilde.branches.len(), 1);
        assert!(m.is_injective() && diag.is_injective());
    }

    #[test]
    fn one_sided_limits_at_the_singularity() {
        let t = q(4, 5);
        let m = t_theta_from_tan(t.clone());
        let s = m.singularity().unwrap();
        assert_eq!(s, q(3, 5));
        let left = m.eval(&s, Extension::Left).unwrap();
        let right = m.eval(&s, Extension::Right).unwrap();
        assert_eq!(left, (q(16, 1) - q(2, 1) * t.clone()) / q(16, 1));
        assert_eq!(right, (q(10, 1) - q(10, 1) * t) / q(16, 1));
        assert!(matches!(m.eval(&s, Extension::Strict), Err(IntervalError::SingularOrbit { .. })));
    }

    #[test]
    fn lift_is_degree_one_and_fills_the_gap() {
        let l = lift(&t_theta_from_tan(q(4, 5)));
        for x in [q(1, 10), q(7, 10), q(3, 5)] {
            let a = l.eval(x.clone(), Extension::Right).unwrap();
            let b = l.eval(x + q(1, 1), Extension::Right).unwrap();
            assert_eq!(b - a, q(1, 1));
        }
        let (lo, hi) = l.filled_value().unwrap();
        assert!(lo < hi);
        assert_eq!(hi, q(2, 16) + q(1, 1));
    }

    #[test]
    fn rotation_special_cases() {
        let cases = [(q(1, 4), (0, 1)), (q(9, 16), (1, 1)), (q(7, 10), (1, 2)), (q(33, 34), (0, 1)), (q(1, 1), (0, 1))];
        for (t, (p, d)) in cases {
            let r = rotation_number_exact(&t_theta_from_tan(t.clone()), Extension::Strict).unwrap();
            assert_eq!(r.value, RotationValue::Rational(Fraction::new(p, d)), "tan = {t}");
            match r.witness {
                Witness::PeriodicOrbit { residual, q: period, .. } => {
                    assert_eq!(residual, 0.0);
                    assert_eq!(period as i64, d);
                }
                other => panic!("no witness: {other:?}"),
            }
        }
        // one-branch maps: the fixed point
        let r = rotation_number_exact(&t_theta_from_tan(q(1, 1)), Extension::Strict).unwrap();
        if let Witness::PeriodicOrbit { points, .. } = r.witness {
            assert_eq!(points, vec![q(13, 15)]);
        }
    }

    #[test]
    fn translation_number_windows() {
        for (t, expected) in [(0.55, 1.0), (0.7, 0.5), (0.99, 0.0), (0.3, 0.0)] {
            let e = transl_estimate(f64::atan(t), 100_000);
            assert!((e.estimate - expected).abs() <= 2.0 * e.error_bound, "t={t}: {e:?}");
        }
    }

    #[test]
    fn plateau_of_one_half() {
        // the endpoints solve T²(s) = s: 224/353 < 7/11 and 11/12 < 269/293
        let p = plateau_endpoints(1, 2).unwrap();
        assert_eq!(p.lower.exact_tan(), Some(&q(224, 353)));
        assert_eq!(p.upper.exact_tan(), Some(&q(269, 293)));
        assert!(p.lower.theta < (7f64 / 11.0).atan() && (11f64 / 12.0).atan() < p.upper.theta);
    }

    #[test]
    fn plateaus_of_zero_and_one() {
        let zero = plateau_endpoints(0, 1).unwrap();
        assert_eq!(zero.lower.exact_tan(), Some(&q(16, 17)));
        assert!(matches!(zero.lower.kind, EndpointKind::SaddleConnection { side: Extension::Left, .. }));
        assert!(matches!(zero.upper.kind, EndpointKind::DomainBoundary { .. }));
        let one = plateau_endpoints(1, 1).unwrap();
        assert_eq!(one.upper.exact_tan(), Some(&q(13, 21)));
        assert!(matches!(one.upper.kind, EndpointKind::SaddleConnection { side: Extension::Right, .. }));
        assert!(plateau_endpoints(3, 2).is_err());
    }

    #[test]
    fn cover_counts_and_lengths() {
        let th = theta_for_translation((5f64.sqrt() - 1.0) / 2.0, 20_000);
        let m = t_theta_from_tan(exact_tan(th.tan()));
        for n in 0..=6 {
            let c = limit_set_cover(&m, n).unwrap();
            assert_eq!(c.len(), n + 1, "depth {n}");
            let bound = q(1, 16).powi(n as u32);
            assert!(c.iter().all(|(a, b)| b.clone() - a.clone() <= bound));
        }
    }

    #[test]
    fn lambda_inside_and_at_plateau_boundary() {
        let inside = lambda_accumulation(&t_theta_from_tan(q(7, 10)), q(1, 3), 40).unwrap();
        assert!(inside.zero && !inside.infinity && inside.finite.is_empty());
        let edge = t_theta_from_tan(q(13, 21));
        let a = lambda_accumulation(&edge, q(1, 3), 40).unwrap();
        let b = lambda_accumulation(&edge, q(1, 3), 60).unwrap();
        assert_eq!(a.finite.len(), 1);
        assert_eq!(a.finite, b.finite);
        // fixed point at s from the right: λⁿ/(xₙ − s) = 1/(x₀ − s)
        assert!((a.finite[0] - 1.0 / (1.0 / 3.0 - 5.0 / 21.0)).abs() < 1e-9);
    }

    #[test]
    fn hausdorff_helper() {
        assert_eq!(hausdorff_points_intervals(&[0.5], &[(0.0, 1.0)]), 0.5);
        assert_eq!(hausdorff_points_intervals(&[0.0, 1.0], &[(0.0, 1.0)]), 0.5);
        assert_eq!(hausdorff_points_intervals(&[2.0], &[(0.0, 1.0)]), 2.0);
    }
}
