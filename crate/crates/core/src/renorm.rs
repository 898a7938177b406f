//! Rauzy–Veech induction with gaps on the two-interval class `I(λ, μ)`.
//!
//! A model map on `[start, start + l_A + l_B]` sends the left interval `A`
//! (slope `λ`) to the right end and the right interval `B` (slope `μ`) to the
//! left end. Inducing on `A` or `B` gives a map of the same class; the
//! parameter intervals of the words `L`/`R` produced this way form the Cantor
//! set of parameters without periodic orbits.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::exec::{flat_map_slice, map_slice, Execution};
use crate::interval::{t_theta_from_tan, Branch, Extension, GaietMap, IntervalError};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenormError {
    #[error("induction did not stop within {steps} steps")]
    BudgetExhausted { steps: usize },
    #[error("word {0} is not realizable")]
    EmptyWord(String),
    #[error("parameter outside the renormalizable range: {0}")]
    NotApplicable(String),
    #[error("invalid model map: {0}")]
    InvalidMap(String),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Letter {
    L,
    R,
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Letter::L => "L",
            Letter::R => "R",
        })
    }
}

/// Parses a word such as `"RLR"`; `""` and `"-"` are the empty word.
pub fn parse_word(text: &str) -> Result<Vec<Letter>, String> {
    text.trim()
        .trim_matches('-')
        .chars()
        .map(|c| match c.to_ascii_uppercase() {
            'L' => Ok(Letter::L),
            'R' => Ok(Letter::R),
            other => Err(format!("bad letter `{other}`")),
        })
        .collect()
}

pub fn word_string(w: &[Letter]) -> String {
    if w.is_empty() {
        "-".to_string()
    } else {
        w.iter().map(|l| l.to_string()).collect()
    }
}

/// Element of `I(λ, μ)` on `[start, start + l_A + l_B]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelMap<S> {
    pub lambda: S,
    pub mu: S,
    pub l_a: S,
    pub l_b: S,
    pub start: S,
}

impl<S: Scalar> ModelMap<S> {
    pub fn new(lambda: S, mu: S, l_a: S, l_b: S) -> Result<Self, RenormError> {
        let half = S::from_ratio(1, 2);
        if !(lambda > S::zero() && lambda <= half && mu > S::zero() && mu <= half) {
            return Err(RenormError::InvalidMap(format!("factors ({lambda}, {mu}) outside (0, 1/2]")));
        }
        if !(l_a > S::zero() && l_b > S::zero()) {
            return Err(RenormError::InvalidMap(format!("lengths ({l_a}, {l_b}) must be positive")));
        }
        Ok(Self {
            lambda,
            mu,
            l_a,
            l_b,
            start: S::zero(),
        })
    }

    /// Normalized map on `[0, 1]` with singularity `s`.
    pub fn normalized(lambda: S, mu: S, s: S) -> Result<Self, RenormError> {
        let rest = S::one() - s.clone();
        Self::new(lambda, mu, s, rest)
    }

    pub fn length(&self) -> S {
        self.l_a.clone() + self.l_b.clone()
    }

    pub fn end(&self) -> S {
        self.start.clone() + self.length()
    }

    pub fn singularity(&self) -> S {
        self.start.clone() + self.l_a.clone()
    }

    /// Normalized singularity `l_A / (l_A + l_B)`.
    pub fn normalized_singularity(&self) -> S {
        self.l_a.clone() / self.length()
    }

    pub fn in_domain(&self, x: &S) -> bool {
        *x >= self.start && *x <= self.end()
    }

    pub fn eval(&self, x: &S, ext: Extension) -> Result<S, RenormError> {
        if !self.in_domain(x) {
            return Err(IntervalError::OutOfDomain(x.to_f64()).into());
        }
        let s = self.singularity();
        let use_a = if *x == s {
            match ext {
                Extension::Strict => {
                    return Err(IntervalError::SingularOrbit {
                        iterate: 0,
                        singularity: s.to_f64(),
                    }
                    .into())
                }
                Extension::Left => true,
                Extension::Right => false,
            }
        } else {
            *x < s
        };
        Ok(if use_a {
            self.end() - self.lambda.clone() * (s - x.clone())
        } else {
            self.start.clone() + self.mu.clone() * (x.clone() - s)
        })
    }

    /// Gap `]start + μ l_B, end − λ l_A[` between the two branch images.
    pub fn gap(&self) -> (S, S) {
        (
            self.start.clone() + self.mu.clone() * self.l_b.clone(),
            self.end() - self.lambda.clone() * self.l_a.clone(),
        )
    }

    pub fn to_gaiet(&self) -> GaietMap<S> {
        let s = self.singularity();
        GaietMap {
            branches: vec![
                Branch {
                    lo: self.start.clone(),
                    hi: s.clone(),
                    slope: self.lambda.clone(),
                    offset: self.end() - self.lambda.clone() * s.clone(),
                },
                Branch {
                    lo: s.clone(),
                    hi: self.end(),
                    slope: self.mu.clone(),
                    offset: self.start.clone() - self.mu.clone() * s,
                },
            ],
        }
    }

    /// Which induction step applies, if any.
    pub fn step_kind(&self) -> Option<Letter> {
        if self.l_b < self.lambda.clone() * self.l_a.clone() {
            Some(Letter::R)
        } else if self.l_a < self.mu.clone() * self.l_b.clone() {
            Some(Letter::L)
        } else {
            None
        }
    }

    /// The period-two orbit `(x, f(x))`, `x ∈ A`, of a map where induction stops.
    pub fn period_two_orbit(&self) -> (S, S) {
        let lm = self.lambda.clone() * self.mu.clone();
        let u = self.mu.clone() * (self.l_b.clone() - self.lambda.clone() * self.l_a.clone()) / (S::one() - lm);
        let x = self.start.clone() + u;
        let fx = self.end() - self.lambda.clone() * (self.singularity() - x.clone());
        (x, fx)
    }
}

pub type Matrix<S> = [[S; 2]; 2];

fn mat_mul<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    let e = |i: usize, j: usize| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone();
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn identity<S: Scalar>() -> Matrix<S> {
    [[S::one(), S::zero()], [S::zero(), S::one()]]
}

/// `R_{λ,μ} = [[1, −1/λ], [0, 1/λ]]`.
pub fn r_matrix<S: Scalar>(lambda: &S) -> Matrix<S> {
    let inv = S::one() / lambda.clone();
    [[S::one(), -inv.clone()], [S::zero(), inv]]
}

/// `L_{λ,μ} = [[1/μ, 0], [−1/μ, 1]]`.
pub fn l_matrix<S: Scalar>(mu: &S) -> Matrix<S> {
    let inv = S::one() / mu.clone();
    [[inv.clone(), S::zero()], [-inv, S::one()]]
}

#[derive(Debug, Clone, PartialEq)]
pub enum RenormStatus<S> {
    Running,
    Stopped { period_two: (S, S) },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenormState<S> {
    pub initial: ModelMap<S>,
    pub current: ModelMap<S>,
    pub word: Vec<Letter>,
    /// `(λ_i, μ_i)` for `i = 0..=n`.
    pub factors: Vec<(S, S)>,
    pub matrix: Matrix<S>,
    pub status: RenormStatus<S>,
}

impl<S: Scalar> RenormState<S> {
    pub fn new(map: ModelMap<S>) -> Self {
        Self {
            initial: map.clone(),
            factors: vec![(map.lambda.clone(), map.mu.clone())],
            current: map,
            word: Vec::new(),
            matrix: identity(),
            status: RenormStatus::Running,
        }
    }

    pub fn is_stopped(&self) -> bool {
        matches!(self.status, RenormStatus::Stopped { .. })
    }

    /// `M_n · (l_A, l_B)` of the initial map.
    pub fn predicted_lengths(&self) -> (S, S) {
        let m = &self.matrix;
        let (a, b) = (self.initial.l_a.clone(), self.initial.l_b.clone());
        (
            m[0][0].clone() * a.clone() + m[0][1].clone() * b.clone(),
            m[1][0].clone() * a + m[1][1].clone() * b,
        )
    }
}

/// One induction step (a no-op once stopped).
pub fn rv_step<S: Scalar>(state: &RenormState<S>) -> RenormState<S> {
    let mut next = state.clone();
    if state.is_stopped() {
        return next;
    }
    let m = &state.current;
    match m.step_kind() {
        Some(Letter::R) => {
            let l_a = m.l_a.clone() - m.l_b.clone() / m.lambda.clone();
            let l_b = m.l_b.clone() / m.lambda.clone();
            next.current = ModelMap {
                lambda: m.lambda.clone(),
                mu: m.lambda.clone() * m.mu.clone(),
                l_a,
                l_b,
                start: m.start.clone(),
            };
            next.matrix = mat_mul(&r_matrix(&m.lambda), &state.matrix);
            next.word.push(Letter::R);
        }
        Some(Letter::L) => {
            let l_a = m.l_a.clone() / m.mu.clone();
            let l_b = m.l_b.clone() - m.l_a.clone() / m.mu.clone();
            next.current = ModelMap {
                lambda: m.lambda.clone() * m.mu.clone(),
                mu: m.mu.clone(),
                l_a,
                l_b,
                start: m.start.clone() + m.l_a.clone(),
            };
            next.matrix = mat_mul(&l_matrix(&m.mu), &state.matrix);
            next.word.push(Letter::L);
        }
        None => {
            next.status = RenormStatus::Stopped {
                period_two: m.period_two_orbit(),
            };
            return next;
        }
    }
    next.factors.push((next.current.lambda.clone(), next.current.mu.clone()));
    next
}

/// Iterates [`rv_step`] until the induction stops.
pub fn rv_run<S: Scalar>(map: ModelMap<S>, max_steps: usize) -> Result<RenormState<S>, (RenormError, Box<RenormState<S>>)> {
    let mut state = RenormState::new(map);
    for _ in 0..=max_steps {
        state = rv_step(&state);
        if state.is_stopped() {
            return Ok(state);
        }
    }
    Err((RenormError::BudgetExhausted { steps: max_steps }, Box::new(state)))
}

/// First return of `x` to `[lo, hi]` under `map`, by iteration.
pub fn brute_first_return<S: Scalar>(map: &ModelMap<S>, lo: &S, hi: &S, x: &S, max_iter: usize) -> Option<(S, usize)> {
    let mut y = x.clone();
    for k in 1..=max_iter {
        y = map.eval(&y, Extension::Strict).ok()?;
        if y >= *lo && y <= *hi {
            return Some((y, k));
        }
    }
    None
}

/// `c0 + c1·s`.
#[derive(Debug, Clone, PartialEq)]
struct Linear<S> {
    c0: S,
    c1: S,
}

impl<S: Scalar> Linear<S> {
    fn sub(&self, o: &Self) -> Self {
        Self {
            c0: self.c0.clone() - o.c0.clone(),
            c1: self.c1.clone() - o.c1.clone(),
        }
    }

    fn scale(&self, k: &S) -> Self {
        Self {
            c0: self.c0.clone() * k.clone(),
            c1: self.c1.clone() * k.clone(),
        }
    }
}

/// Open interval `(lo, hi)`, possibly empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interval<S> {
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> Interval<S> {
    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn length(&self) -> S {
        self.hi.clone() - self.lo.clone()
    }

    pub fn midpoint(&self) -> S {
        (self.lo.clone() + self.hi.clone()) / S::from_int(2)
    }

    pub fn contains(&self, x: &S) -> bool {
        *x > self.lo && *x < self.hi
    }
}

/// Restricts `iv` to `{s : f(s) > 0}` (or `≥ 0`, which gives the same
/// closure).
fn restrict<S: Scalar>(iv: &Interval<S>, f: &Linear<S>) -> Interval<S> {
    if f.c1.is_zero() {
        return if f.c0 > S::zero() {
            iv.clone()
        } else {
            Interval {
                lo: iv.lo.clone(),
                hi: iv.lo.clone(),
            }
        };
    }
    let root = -f.c0.clone() / f.c1.clone();
    if f.c1 > S::zero() {
        Interval {
            lo: S::max_of(iv.lo.clone(), root),
            hi: iv.hi.clone(),
        }
    } else {
        Interval {
            lo: iv.lo.clone(),
            hi: S::min_of(iv.hi.clone(), root),
        }
    }
}

/// Symbolic induction state over the parameter `s = l_A` of the normalized map.
#[derive(Debug, Clone)]
struct Node<S> {
    l_a: Linear<S>,
    l_b: Linear<S>,
    lambda: S,
    mu: S,
    interval: Interval<S>,
}

impl<S: Scalar> Node<S> {
    fn root(lambda: S, mu: S) -> Self {
        Self {
            l_a: Linear { c0: S::zero(), c1: S::one() },
            l_b: Linear { c0: S::one(), c1: -S::one() },
            lambda,
            mu,
            interval: Interval { lo: S::zero(), hi: S::one() },
        }
    }

    fn child(&self, letter: Letter) -> Self {
        match letter {
            Letter::R => {
                // l_B < λ l_A
                let cond = self.l_a.scale(&self.lambda).sub(&self.l_b);
                let inv = S::one() / self.lambda.clone();
                Self {
                    l_a: self.l_a.sub(&self.l_b.scale(&inv)),
                    l_b: self.l_b.scale(&inv),
                    lambda: self.lambda.clone(),
                    mu: self.lambda.clone() * self.mu.clone(),
                    interval: restrict(&self.interval, &cond),
                }
            }
            Letter::L => {
                // l_A < μ l_B
                let cond = self.l_b.scale(&self.mu).sub(&self.l_a);
                let inv = S::one() / self.mu.clone();
                Self {
                    l_a: self.l_a.scale(&inv),
                    l_b: self.l_b.sub(&self.l_a.scale(&inv)),
                    lambda: self.lambda.clone() * self.mu.clone(),
                    mu: self.mu.clone(),
                    interval: restrict(&self.interval, &cond),
                }
            }
        }
    }

    /// Parameters where induction stops here: `λ l_A ≤ l_B ≤ l_A/μ`.
    fn stopping(&self) -> Interval<S> {
        let c1 = self.l_b.sub(&self.l_a.scale(&self.lambda));
        let c2 = self.l_a.scale(&(S::one() / self.mu.clone())).sub(&self.l_b);
        restrict(&restrict(&self.interval, &c1), &c2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordIntervals<S> {
    pub word: String,
    /// Parameters `s` whose induction starts with the word.
    pub i_w: Interval<S>,
    /// Parameters whose induction is exactly the word, then stops.
    pub h_w: Interval<S>,
    /// `(λ_n, μ_n)` after the word.
    pub factors: (S, S),
    /// `η` from the two endpoints of `H(w)`; equal up to rounding.
    pub eta: (f64, f64),
    /// `|H(w)|/|I(w)|` and the displayed lower bound.
    pub ratio: f64,
    pub ratio_bound: f64,
    /// Largest component of `I(w) ∖ H(w)` relative to `|I(w)|`.
    pub max_gap_ratio: f64,
}

/// For words ending in `L` the normalized `H(w)` formula holds with `I(w)`
/// read from its upper end and the roles of `λ_n`, `μ_n` exchanged.
fn reflected(w: &[Letter]) -> bool {
    w.last() == Some(&Letter::L)
}

/// `I(w)`, `H(w)` and `η(w)` from the exact linear constraints of the word.
pub fn word_intervals<S: Scalar>(lambda: S, mu: S, w: &[Letter]) -> Result<WordIntervals<S>, RenormError> {
    let mut node = Node::root(lambda, mu);
    for &l in w {
        node = node.child(l);
        if node.interval.is_empty() {
            return Err(RenormError::EmptyWord(word_string(w)));
        }
    }
    let i_w = node.interval.clone();
    let h_w = node.stopping();
    if h_w.is_empty() {
        return Err(RenormError::EmptyWord(word_string(w)));
    }
    let len = i_w.length();
    let reflect = reflected(w);
    let (lam, mu) = if reflect {
        (node.mu.clone(), node.lambda.clone())
    } else {
        (node.lambda.clone(), node.mu.clone())
    };
    // distances from the reading end of I(w) to the near and far ends of H(w)
    let (near, far) = if reflect {
        (i_w.hi.clone() - h_w.hi.clone(), i_w.hi.clone() - h_w.lo.clone())
    } else {
        (h_w.lo.clone() - i_w.lo.clone(), h_w.hi.clone() - i_w.lo.clone())
    };
    // H = [1/(1 + η/μ), 1/(1 + ηλ)] after normalizing I(w) to [0, 1]
    let eta_lo = (mu.clone() * (len.clone() - near.clone()) / near).to_f64();
    let eta_hi = ((len.clone() - far.clone()) / (far * lam.clone())).to_f64();
    let (lam, mu) = (lam.to_f64(), mu.to_f64());
    let ratio = (h_w.length() / len.clone()).to_f64();
    let ratio_bound = 1.0 / (1.0 + 2.0 * lam) - 1.0 / (1.0 + 1.0 / mu);
    let left = ((h_w.lo.clone() - i_w.lo.clone()) / len.clone()).to_f64();
    let right = ((i_w.hi.clone() - h_w.hi.clone()) / len).to_f64();
    Ok(WordIntervals {
        word: word_string(w),
        i_w,
        h_w,
        factors: (node.lambda, node.mu),
        eta: (eta_lo, eta_hi),
        ratio,
        ratio_bound,
        max_gap_ratio: left.max(right),
    })
}

/// All words of length `n` in lexicographic order (`L < R`).
pub fn all_words(n: usize) -> Vec<Vec<Letter>> {
    (0..1usize << n)
        .map(|bits| {
            (0..n)
                .map(|i| if bits >> (n - 1 - i) & 1 == 1 { Letter::R } else { Letter::L })
                .collect()
        })
        .collect()
}

/// `K_n`: the intervals `I(w)`, `|w| = n + 1`, sorted.
pub fn cantor_cover<S: Scalar>(lambda: S, mu: S, depth: usize, exec: Execution) -> Vec<Interval<S>> {
    cantor_covers(lambda, mu, depth, exec).pop().expect("depth 0 is always present")
}

/// `K_0, …, K_depth`.
pub fn cantor_covers<S: Scalar>(lambda: S, mu: S, depth: usize, exec: Execution) -> Vec<Vec<Interval<S>>> {
    let mut level = vec![Node::root(lambda, mu)];
    let mut covers = Vec::with_capacity(depth + 1);
    for _ in 0..=depth {
        level = flat_map_slice(exec, &level, |n| vec![n.child(Letter::L), n.child(Letter::R)]);
        let mut ivs: Vec<Interval<S>> = level.iter().map(|n| n.interval.clone()).collect();
        ivs.sort_by(|a, b| a.lo.partial_cmp(&b.lo).expect("ordered"));
        covers.push(ivs);
    }
    covers
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverStats {
    pub depth: usize,
    pub count: usize,
    pub max_len: f64,
    /// Intervals that are empty or out of order (precision loss).
    pub degenerate: usize,
    pub count_ok: bool,
    pub length_ok: bool,
}

pub fn cover_stats<S: Scalar>(depth: usize, cover: &[Interval<S>]) -> CoverStats {
    let bound = S::from_ratio(1, 2).powi(depth as u32 + 1);
    let mut degenerate = cover.iter().filter(|iv| iv.is_empty()).count();
    degenerate += cover.windows(2).filter(|w| w[0].hi > w[1].lo).count();
    let max = cover
        .iter()
        .map(|iv| iv.length())
        .fold(S::zero(), S::max_of);
    CoverStats {
        depth,
        count: cover.len(),
        max_len: max.to_f64(),
        degenerate,
        count_ok: cover.len() == 1usize << (depth + 1) && degenerate == 0,
        length_ok: max <= bound,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub depth: usize,
    pub count: usize,
    pub max_len: f64,
    /// Grid boxes of side `max_len` meeting the deepest cover.
    pub boxes: u64,
    /// Least-squares slope over depths `0..=depth`; `None` for depth 0 and for
    /// the two deepest covers, whose box counts are not resolved by the finest
    /// cover.
    pub estimate: Option<f64>,
}

/// Number of cells `[kε, (k+1)ε]` meeting the union of the open intervals.
fn grid_boxes(eps: &Rational, cover: &[Interval<Rational>]) -> u64 {
    let mut last: Option<BigInt> = None;
    let mut count: u64 = 0;
    for iv in cover {
        let first = (iv.lo.clone() / eps.clone()).floor().to_integer();
        let upper = (iv.hi.clone() / eps.clone()).ceil().to_integer() - BigInt::from(1);
        let begin = match &last {
            Some(l) if *l >= first => l.clone() + BigInt::from(1),
            _ => first,
        };
        if upper >= begin {
            let n: BigInt = upper.clone() - begin + BigInt::from(1);
            count += u64::try_from(n).unwrap_or(u64::MAX);
            last = Some(upper);
        }
    }
    count
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Box-counting dimension estimates from nested covers. At depth `n` the box
/// size is the largest interval length of `covers[n]` and boxes are counted
/// against the deepest cover; the estimate is the least-squares slope of
/// `log N` against `−log ε` over depths `0..=n`.
pub fn box_dimension_estimate(covers: &[Vec<Interval<Rational>>], exec: Execution) -> Vec<DimensionEstimate> {
    let Some(finest) = covers.last() else {
        return Vec::new();
    };
    let deepest = covers.len() - 1;
    let rows: Vec<(usize, usize, Rational, u64)> = map_slice(exec, &covers.iter().enumerate().collect::<Vec<_>>(), |(d, cover)| {
        let eps = cover
            .iter()
            .map(|iv| iv.length())
            .fold(<Rational as Zero>::zero(), |a, b| if b > a { b } else { a });
        let boxes = grid_boxes(&eps, finest);
        (*d, cover.len(), eps, boxes)
    });
    let xs: Vec<f64> = rows.iter().map(|r| -ln_rational(&r.2)).collect();
    let ys: Vec<f64> = rows.iter().map(|r| (r.3 as f64).ln()).collect();
    rows.iter()
        .map(|(d, count, eps, boxes)| DimensionEstimate {
            depth: *d,
            count: *count,
            max_len: Scalar::to_f64(eps),
            boxes: *boxes,
            estimate: (*d >= 1 && *d + 2 <= deepest).then(|| slope(&xs[..=*d], &ys[..=*d])),
        })
        .collect()
}

/// Natural log of a positive rational that may be far below `f64::MIN_POSITIVE`.
fn ln_rational(r: &Rational) -> f64 {
    let n = r.numer();
    let d = r.denom();
    let shift = d.bits() as i64 - n.bits() as i64;
    let scaled = if shift > 0 {
        Rational::new(n.clone() << (shift as usize), d.clone())
    } else {
        Rational::new(n.clone(), d.clone() << ((-shift) as usize))
    };
    Scalar::to_f64(&scaled).ln() - shift as f64 * std::f64::consts::LN_2
}

/// Level `k` of the middle-thirds construction: `2^k` intervals of length `3^-k`.
pub fn middle_thirds_cover(k: usize) -> Vec<Interval<Rational>> {
    let mut ivs = vec![Interval {
        lo: <Rational as Zero>::zero(),
        hi: Rational::from_int(1),
    }];
    let third = Rational::from_ratio(1, 3);
    for _ in 0..k {
        ivs = ivs
            .into_iter()
            .flat_map(|iv| {
                let l = iv.length() * third.clone();
                [
                    Interval {
                        lo: iv.lo.clone(),
                        hi: iv.lo.clone() + l.clone(),
                    },
                    Interval {
                        lo: iv.hi.clone() - l,
                        hi: iv.hi,
                    },
                ]
            })
            .collect();
    }
    ivs
}

/// Affine change of coordinates `u = (x − a)/(b − a)` from `[a, b]` to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization<S> {
    pub a: S,
    pub b: S,
}

impl<S: Scalar> Normalization<S> {
    pub fn to_model(&self, x: &S) -> S {
        (x.clone() - self.a.clone()) / (self.b.clone() - self.a.clone())
    }

    pub fn from_model(&self, u: &S) -> S {
        self.a.clone() + u.clone() * (self.b.clone() - self.a.clone())
    }
}

/// Parameter window `Θ = [arctan(13/21), arctan(16/17)]` in `tan θ`.
pub fn renormalizable_tan_range<S: Scalar>() -> (S, S) {
    (S::from_ratio(13, 21), S::from_ratio(16, 17))
}

/// `T_θ` restricted to `[T(s⁺), T(s⁻)]`, rescaled into `I(1/16, 1/16)`.
pub fn t_theta_to_model<S: Scalar>(tan: S) -> Result<(ModelMap<S>, Normalization<S>), RenormError> {
    let (lo, hi) = renormalizable_tan_range::<S>();
    if tan <= lo || tan >= hi {
        return Err(RenormError::NotApplicable(format!(
            "tan θ = {tan} is outside ]13/21, 16/17[ (rotation number 0 or 1 there)"
        )));
    }
    let map = t_theta_from_tan(tan);
    let s = map.singularity().expect("two branches inside Θ");
    let a = map.branches[1].apply(&s);
    let b = map.branches[0].apply(&s);
    let norm = Normalization { a, b };
    let sixteenth = S::from_ratio(1, 16);
    let u = norm.to_model(&s);
    let model = ModelMap::normalized(sixteenth.clone(), sixteenth, u)?;
    Ok((model, norm))
}

/// Inverse of the normalized singularity `l_A = (42t − 26)/(8t + 6)`.
pub fn tan_from_model_singularity<S: Scalar>(l_a: S) -> S {
    (S::from_int(26) + S::from_int(6) * l_a.clone()) / (S::from_int(42) - S::from_int(8) * l_a)
}

/// A parameter whose induction follows `word` (midpoint of `I(word)`), as an
/// exact `tan θ`. Long words give maps with no periodic orbit of small period.
pub fn tan_following_word(word: &[Letter]) -> Result<Rational, RenormError> {
    let sixteenth = Rational::from_ratio(1, 16);
    let mut node = Node::root(sixteenth.clone(), sixteenth);
    for &l in word {
        node = node.child(l);
    }
    if node.interval.is_empty() {
        return Err(RenormError::EmptyWord(word_string(word)));
    }
    Ok(tan_from_model_singularity(node.interval.midpoint()))
}

/// The word `RLRL…` of length `n`.
pub fn alternating_word(n: usize) -> Vec<Letter> {
    (0..n).map(|i| if i % 2 == 0 { Letter::R } else { Letter::L }).collect()
}

/// Raw and normalized endpoints of a gap iterate `T^k(G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapIterate<S> {
    pub k: usize,
    pub normalized: (S, S),
    pub raw: (S, S),
}

/// `G, T(G), …, T^{n−1}(G)` for `T_θ`, `θ ∈ Θ`.
pub fn gap_iterates<S: Scalar>(tan: S, n: usize) -> Result<Vec<GapIterate<S>>, RenormError> {
    let (model, norm) = t_theta_to_model(tan)?;
    let mut g = model.gap();
    let s = model.singularity();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        out.push(GapIterate {
            k,
            raw: (norm.from_model(&g.0), norm.from_model(&g.1)),
            normalized: g.clone(),
        });
        if g.0 <= s && s <= g.1 {
            return Err(IntervalError::GapHitsSingularity { step: k }.into());
        }
        g = (model.eval(&g.0, Extension::Strict)?, model.eval(&g.1, Extension::Strict)?);
    }
    Ok(out)
}
