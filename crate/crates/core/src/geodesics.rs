//! Geodesic flow on the glued quadrilateral and its Poincaré section.
//!
//! A phase point is an entry point on an edge together with the direction
//! angle in the chart of the quadrilateral. The speed is tracked separately as
//! a multiplicative scale (its logarithm, to survive `16^-n` decay).

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::surface::{glue, Edge, SurfaceError, SurfaceModel, Vertex, VERTEX_TOLERANCE};

/// Relative tolerance of ray/edge intersection and of the inward-direction test.
pub const INTERSECTION_TOLERANCE: f64 = 1e-12;

/// Consecutive exits through `]A,B[ ∪ ]A,D[` after which a geodesic is declared
/// trapped (tail length below `4√2·2^-40`).
pub const TRAPPED_EXITS: usize = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesicError {
    #[error("geodesic hits the singular vertex {vertex} at {point}")]
    SingularityHit { vertex: Vertex, point: Complex64 },
    #[error("({edge}, {s}, {theta}) does not point into the quadrilateral")]
    NotInPhaseSpace { edge: Edge, s: f64, theta: f64 },
    #[error("no exit point found from ({edge}, {s}, {theta})")]
    NoExit { edge: Edge, s: f64, theta: f64 },
    #[error("orbit entered {edge} instead of AB after three steps")]
    NoReturn { edge: Edge },
}

/// Point of the Poincaré section: edge fraction and direction angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub edge: Edge,
    pub s: f64,
    pub theta: f64,
}

impl PhasePoint {
    pub fn new(edge: Edge, s: f64, theta: f64) -> Self {
        Self { edge, s, theta }
    }

    /// Point at fraction `x` of `[A,B]` with angle `theta`.
    pub fn on_ab(x: f64, theta: f64) -> Self {
        Self::new(Edge::AB, x, theta)
    }

    pub fn direction(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

/// Outcome of one boundary crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub exit_edge: Edge,
    pub exit_fraction: f64,
    pub entry: PhasePoint,
    /// Euclidean length of the straight segment inside the quadrilateral.
    pub segment_length: f64,
    /// Modulus of the gluing derivative applied to the direction.
    pub speed_factor: f64,
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Inward unit normal of an edge (vertices are counter-clockwise).
fn inward_normal(model: &SurfaceModel, edge: Edge) -> Complex64 {
    let tangent = match edge {
        Edge::AB => model.b - model.a,
        Edge::BC => model.c - model.b,
        Edge::CD => model.d - model.c,
        Edge::AD => model.a - model.d,
    };
    Complex64::i() * tangent / tangent.norm()
}

/// One step of the Poincaré map with full bookkeeping.
pub fn cross_boundary(model: &SurfaceModel, p: &PhasePoint) -> Result<Crossing, GeodesicError> {
    let z = model.point_on(p.edge, p.s);
    let u = p.direction();
    let normal_component = (u * inward_normal(model, p.edge).conj()).re;
    if normal_component.abs() <= INTERSECTION_TOLERANCE {
        // a geodesic running along its edge reaches the next vertex
        let (v0, v1) = p.edge.endpoints();
        let e = model.vertex(v1) - model.vertex(v0);
        let vertex = if (u * e.conj()).re > 0.0 { v1 } else { v0 };
        return Err(GeodesicError::SingularityHit {
            vertex,
            point: model.vertex(vertex),
        });
    }
    if normal_component < 0.0 {
        return Err(GeodesicError::NotInPhaseSpace {
            edge: p.edge,
            s: p.s,
            theta: p.theta,
        });
    }

    let mut best: Option<(f64, Edge, f64)> = None;
    for edge in Edge::ALL {
        if edge == p.edge {
            continue;
        }
        let (v0, v1) = edge.endpoints();
        let p0 = model.vertex(v0);
        let e = model.vertex(v1) - p0;
        let denom = cross(u, e);
        if denom.abs() <= INTERSECTION_TOLERANCE * e.norm() {
            continue;
        }
        let w = p0 - z;
        let t = cross(w, e) / denom;
        let r = cross(w, u) / denom;
        let scale = e.norm().max(1.0);
        if t <= INTERSECTION_TOLERANCE * scale {
            continue;
        }
        if r < -INTERSECTION_TOLERANCE || r > 1.0 + INTERSECTION_TOLERANCE {
            continue;
        }
        if best.is_none_or(|(bt, _, _)| t < bt) {
            best = Some((t, edge, r.clamp(0.0, 1.0)));
        }
    }
    let Some((t, exit_edge, r)) = best else {
        return Err(GeodesicError::NoExit {
            edge: p.edge,
            s: p.s,
            theta: p.theta,
        });
    };
    let exit_point = z + u * t;
    let (vertex, dist) = model.nearest_vertex(exit_point);
    if dist < VERTEX_TOLERANCE {
        return Err(GeodesicError::SingularityHit {
            vertex,
            point: exit_point,
        });
    }
    let glued = glue(model, exit_edge, r, u).map_err(|e| match e {
        SurfaceError::VertexHit { vertex, .. } => GeodesicError::SingularityHit {
            vertex,
            point: exit_point,
        },
        _ => GeodesicError::NoExit {
            edge: p.edge,
            s: p.s,
            theta: p.theta,
        },
    })?;
    Ok(Crossing {
        exit_edge,
        exit_fraction: r,
        entry: PhasePoint::new(glued.edge, glued.fraction, glued.direction.arg()),
        segment_length: t,
        speed_factor: glued.direction.norm(),
    })
}

/// The Poincaré map `T(x, θ) = (z, θ')`.
pub fn poincare_step(model: &SurfaceModel, p: &PhasePoint) -> Result<PhasePoint, GeodesicError> {
    cross_boundary(model, p).map(|c| c.entry)
}

/// Result of [`first_return_ab`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstReturn {
    pub x: f64,
    pub theta: f64,
    /// Product of the three speed factors.
    pub contraction: f64,
    /// Entry points of steps 1 and 2.
    pub intermediate: [PhasePoint; 2],
}

/// Three Poincaré steps from `[A,B]`, which bring an angle in `[0, π/4]` back to
/// `[A,B]` with the same angle.
pub fn first_return_ab(model: &SurfaceModel, x: f64, theta: f64) -> Result<FirstReturn, GeodesicError> {
    let mut p = PhasePoint::on_ab(x, theta);
    let mut contraction = 1.0;
    let mut intermediate = [p; 2];
    for k in 0..3 {
        let c = cross_boundary(model, &p)?;
        contraction *= c.speed_factor;
        p = c.entry;
        if k < 2 {
            intermediate[k] = p;
        }
    }
    if p.edge != Edge::AB {
        return Err(GeodesicError::NoReturn { edge: p.edge });
    }
    Ok(FirstReturn {
        x: p.s,
        theta: p.theta,
        contraction,
        intermediate,
    })
}

/// `T_θ(x)` computed by ray tracing only.
pub fn t_theta_oracle(model: &SurfaceModel, x: f64, theta: f64) -> Result<f64, GeodesicError> {
    first_return_ab(model, x, theta).map(|r| r.x)
}

/// Positions of successive first returns `x_0, T_θ(x_0), …` (`n + 1` values).
pub fn return_orbit(model: &SurfaceModel, x0: f64, theta: f64, n: usize) -> Result<Vec<f64>, GeodesicError> {
    let mut xs = Vec::with_capacity(n + 1);
    let mut x = x0;
    let mut th = theta;
    xs.push(x);
    for _ in 0..n {
        let r = first_return_ab(model, x, th)?;
        x = r.x;
        th = r.theta;
        xs.push(x);
    }
    Ok(xs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitStep {
    /// Entry point after the crossing.
    pub point: PhasePoint,
    pub exit_edge: Edge,
    pub segment_length: f64,
    /// Speed after the crossing relative to the initial speed. Underflows to 0
    /// below `1e-300`; `log_speed` stays exact.
    pub speed_scale: f64,
    pub log_speed: f64,
    /// Length travelled in the unfolded picture, where each copy of the
    /// quadrilateral is rescaled by the inverse speed.
    pub cumulative_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Termination {
    Budget,
    SingularityHit { step: usize, vertex: Vertex },
    TrappedFiniteTime { step: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitRecord {
    pub start: PhasePoint,
    pub steps: Vec<OrbitStep>,
    pub termination: Termination,
}

impl OrbitRecord {
    pub fn total_length(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.cumulative_length)
    }
}

/// Traces up to `max_steps` crossings from `start`.
pub fn trace(model: &SurfaceModel, start: PhasePoint, max_steps: usize) -> Result<OrbitRecord, GeodesicError> {
    let first = cross_boundary(model, &start);
    if let Err(e @ GeodesicError::NotInPhaseSpace { .. }) = first {
        return Err(e);
    }
    let mut steps = Vec::with_capacity(max_steps.min(1 << 16));
    let mut p = start;
    let mut log_speed = 0.0f64;
    let mut length = 0.0f64;
    let mut trapped_run = 0usize;
    let mut termination = Termination::Budget;
    for step in 1..=max_steps {
        let c = match cross_boundary(model, &p) {
            Ok(c) => c,
            Err(GeodesicError::SingularityHit { vertex, .. }) => {
                termination = Termination::SingularityHit { step, vertex };
                break;
            }
            Err(e) => return Err(e),
        };
        length += c.segment_length * (-log_speed).exp();
        log_speed += c.speed_factor.ln();
        p = c.entry;
        steps.push(OrbitStep {
            point: p,
            exit_edge: c.exit_edge,
            segment_length: c.segment_length,
            speed_scale: if log_speed > 1e-300f64.ln() { log_speed.exp() } else { 0.0 },
            log_speed,
            cumulative_length: length,
        });
        if matches!(c.exit_edge, Edge::AB | Edge::AD) {
            trapped_run += 1;
            if trapped_run >= TRAPPED_EXITS {
                termination = Termination::TrappedFiniteTime { step };
                break;
            }
        } else {
            trapped_run = 0;
        }
    }
    Ok(OrbitRecord {
        start,
        steps,
        termination,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum IrregularReason {
    SingularityHit { step: usize, vertex: Vertex },
    /// Finite unfolded length: the geodesic only uses `]A,B[` and `]A,D[` exits.
    TrappedFiniteTime { step: usize, length: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Regularity {
    Regular { steps: usize, length: f64 },
    Irregular(IrregularReason),
}

/// Bound on the unfolded length of a geodesic that never leaves through
/// `]B,C[` or `]C,D[`.
pub const TRAPPED_LENGTH_BOUND: f64 = 4.0 * SQRT_2;

/// Classifies a geodesic. Exceeding `length_budget` (or running out of steps
/// while still leaving through `]B,C[ ∪ ]C,D[`) counts as sustained progress.
pub fn classify_regularity(
    model: &SurfaceModel,
    p: PhasePoint,
    step_budget: usize,
    length_budget: f64,
) -> Result<Regularity, GeodesicError> {
    let rec = trace(model, p, step_budget)?;
    let steps_done = rec.steps.len();
    if let Some(k) = rec.steps.iter().position(|s| s.cumulative_length > length_budget) {
        return Ok(Regularity::Regular {
            steps: k + 1,
            length: rec.steps[k].cumulative_length,
        });
    }
    Ok(match rec.termination {
        Termination::SingularityHit { step, vertex } => Regularity::Irregular(IrregularReason::SingularityHit { step, vertex }),
        Termination::TrappedFiniteTime { step } => Regularity::Irregular(IrregularReason::TrappedFiniteTime {
            step,
            length: rec.total_length(),
        }),
        Termination::Budget => Regularity::Regular {
            steps: steps_done,
            length: rec.total_length(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build_model;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn diagonal_return_is_x_over_16_plus_13_over_16() {
        let m = build_model();
        for x in [0.1, 0.33, 0.5, 0.9] {
            let r = first_return_ab(&m, x, FRAC_PI_4).unwrap();
            assert!((r.x - (x / 16.0 + 13.0 / 16.0)).abs() < 1e-13, "x={x} got {}", r.x);
            assert!((r.theta - FRAC_PI_4).abs() < 1e-13);
            assert!((r.contraction - 1.0 / 16.0).abs() < 1e-15);
            assert_eq!(r.intermediate[0].edge, Edge::AD);
            assert!((r.intermediate[0].theta + FRAC_PI_4).abs() < 1e-13);
            assert_eq!(r.intermediate[1].edge, Edge::AB);
            assert!(r.intermediate[1].theta.abs() < 1e-13);
        }
    }

    #[test]
    fn oracle_at_tan_0_8() {
        let m = build_model();
        let th = 0.8f64.atan();
        assert!((t_theta_oracle(&m, 0.5, th).unwrap() - 0.89375).abs() < 1e-12);
        assert!((t_theta_oracle(&m, 0.7, th).unwrap() - 0.13125).abs() < 1e-12);
        // the singular point is sent to C
        assert!(matches!(
            t_theta_oracle(&m, 0.6, th),
            Err(GeodesicError::SingularityHit { vertex: Vertex::C, .. })
        ));
        let below = t_theta_oracle(&m, 0.6 - 1e-9, th).unwrap();
        let above = t_theta_oracle(&m, 0.6 + 1e-9, th).unwrap();
        assert!(below - above > 0.5, "one-sided limits must differ");
    }

    #[test]
    fn first_step_angle_bookkeeping() {
        let m = build_model();
        for &(x, th) in &[(0.2, 0.1), (0.8, 0.7), (0.5, 0.3), (0.95, 0.78)] {
            let c = cross_boundary(&m, &PhasePoint::on_ab(x, th)).unwrap();
            let d1 = c.entry.theta - (th + FRAC_PI_4);
            let d2 = c.entry.theta - (th - FRAC_PI_2);
            assert!(d1.abs() < 1e-12 || d2.abs() < 1e-12, "θ1 = {}", c.entry.theta);
            assert!(matches!(c.entry.edge, Edge::AB | Edge::AD));
        }
    }

    #[test]
    fn aiming_at_c_is_singular() {
        let m = build_model();
        // from −0.25i towards C = 2+i
        let x = 0.25;
        let z = m.point_on(Edge::AB, x);
        let th = (m.c - z).arg();
        let reg = classify_regularity(&m, PhasePoint::on_ab(x, th), 100, 1e6).unwrap();
        assert!(matches!(
            reg,
            Regularity::Irregular(IrregularReason::SingularityHit { vertex: Vertex::C, step: 1 })
        ));
    }

    #[test]
    fn running_along_an_edge_is_singular() {
        let m = build_model();
        let p = PhasePoint::new(Edge::BC, 0.5, (m.c - m.b).arg());
        assert!(matches!(
            cross_boundary(&m, &p),
            Err(GeodesicError::SingularityHit { vertex: Vertex::C, .. })
        ));
    }

    #[test]
    fn direction_pointing_out_is_rejected() {
        let m = build_model();
        assert!(matches!(
            cross_boundary(&m, &PhasePoint::on_ab(0.5, 3.0)),
            Err(GeodesicError::NotInPhaseSpace { .. })
        ));
    }

    #[test]
    fn regular_geodesic_speed_decays_by_16_per_return() {
        let m = build_model();
        let rec = trace(&m, PhasePoint::on_ab(0.4, 0.3), 30).unwrap();
        assert_eq!(rec.termination, Termination::Budget);
        for k in (2..rec.steps.len()).step_by(3) {
            let expected = -(((k + 1) / 3) as f64) * 16f64.ln();
            assert!((rec.steps[k].log_speed - expected).abs() < 1e-9 * expected.abs());
        }
        for s in &rec.steps {
            assert!(matches!(s.point.edge, Edge::AB | Edge::AD));
        }
        let reg = classify_regularity(&m, PhasePoint::on_ab(0.4, 0.3), 60, 1e6).unwrap();
        assert!(matches!(reg, Regularity::Regular { .. }));
    }

    #[test]
    fn prefixes_with_only_ab_ad_exits_stay_short() {
        let m = build_model();
        let mut prefixes = 0;
        for edge in Edge::ALL {
            let n = inward_normal(&m, edge).arg();
            for i in 1..40 {
                for j in 1..40 {
                    let s = i as f64 / 40.0;
                    let th = n - FRAC_PI_2 + std::f64::consts::PI * j as f64 / 40.0;
                    let Ok(rec) = trace(&m, PhasePoint::new(edge, s, th), 60) else { continue };
                    for st in rec.steps.iter().take_while(|st| matches!(st.exit_edge, Edge::AB | Edge::AD)) {
                        prefixes += 1;
                        assert!(st.cumulative_length <= TRAPPED_LENGTH_BOUND);
                    }
                }
            }
        }
        assert!(prefixes > 100);
    }
}
