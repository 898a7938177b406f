//! Polygonal model of the affine surface: the quadrilateral `ABCD` with
//! `A = 0`, `B = -i`, `C = 2 + i`, `D = i`, the two edge gluings and the cone
//! data of its three singularities.
//!
//! `A` and `C` are identified and carry the singularity placed at `z = 0`,
//! `B` the one at `z = 1`, `D` the one at `z = ∞`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Absolute distance (model units) under which a boundary point counts as a vertex.
pub const VERTEX_TOLERANCE: f64 = 1e-10;

/// Tolerance of [`validate`].
pub const VALIDATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("inconsistent {field}: expected {expected}, got {got}")]
    Inconsistent {
        field: String,
        expected: f64,
        got: f64,
    },
    #[error("point at fraction {fraction} of edge {edge} is within {tolerance} of vertex {vertex}")]
    VertexHit {
        edge: Edge,
        fraction: f64,
        vertex: Vertex,
        tolerance: f64,
    },
    #[error("fraction {0} is outside [0, 1]")]
    OutsideEdge(f64),
}

/// Complex affine map `z ↦ ratio·z + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineMap {
    pub ratio: Complex64,
    pub offset: Complex64,
}

impl AffineMap {
    /// Panics if `ratio` is zero.
    pub fn new(ratio: Complex64, offset: Complex64) -> Self {
        assert!(ratio != Complex64::new(0.0, 0.0), "affine ratio must be nonzero");
        Self { ratio, offset }
    }

    /// The map `z ↦ fixed + ratio·(z − fixed)`.
    pub fn with_fixed_point(fixed: Complex64, ratio: Complex64) -> Self {
        Self::new(ratio, fixed - ratio * fixed)
    }

    pub fn identity() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.ratio * z + self.offset
    }

    pub fn inverse(&self) -> Self {
        let r = self.ratio.inv();
        Self::new(r, -self.offset * r)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(self.ratio * other.ratio, self.ratio * other.offset + self.offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Vertex {
    A,
    B,
    C,
    D,
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Vertex::A => "A",
            Vertex::B => "B",
            Vertex::C => "C",
            Vertex::D => "D",
        };
        f.write_str(s)
    }
}

/// Edges of the quadrilateral. Positions on an edge are arclength fractions in
/// `[0, 1]` measured from the first-named vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Edge {
    AB,
    BC,
    CD,
    AD,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::AB, Edge::BC, Edge::CD, Edge::AD];

    /// `(start, end)` in the fraction convention.
    pub fn endpoints(self) -> (Vertex, Vertex) {
        match self {
            Edge::AB => (Vertex::A, Vertex::B),
            Edge::BC => (Vertex::B, Vertex::C),
            Edge::CD => (Vertex::C, Vertex::D),
            Edge::AD => (Vertex::A, Vertex::D),
        }
    }

    /// Partner edge under the gluing.
    pub fn partner(self) -> Edge {
        match self {
            Edge::AB => Edge::BC,
            Edge::BC => Edge::AB,
            Edge::CD => Edge::AD,
            Edge::AD => Edge::CD,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Edge::AB => "AB",
            Edge::BC => "BC",
            Edge::CD => "CD",
            Edge::AD => "AD",
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Edge {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "AB" | "BA" => Ok(Edge::AB),
            "BC" | "CB" => Ok(Edge::BC),
            "CD" | "DC" => Ok(Edge::CD),
            "AD" | "DA" => Ok(Edge::AD),
            other => Err(format!("unknown edge `{other}`")),
        }
    }
}

/// Gluing identifying `source` with `target`; `map` sends source points to
/// target points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gluing {
    pub source: Edge,
    pub target: Edge,
    pub map: AffineMap,
}

/// Position of a singularity on the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SingularPoint {
    Zero,
    One,
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeDatum {
    pub point: SingularPoint,
    /// Total angle at the singularity.
    pub angle: f64,
    /// Logarithm of the scaling ratio around the singularity.
    pub ratio_log: f64,
    /// `angle + i·ratio_log`.
    pub alpha: Complex64,
    /// `alpha / 2π`.
    pub mu: Complex64,
}

impl ConeDatum {
    fn new(point: SingularPoint, angle: f64, ratio_log: f64) -> Self {
        let alpha = Complex64::new(angle, ratio_log);
        Self {
            point,
            angle,
            ratio_log,
            alpha,
            mu: alpha / (2.0 * PI),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceModel {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    /// `[AB → BC, CD → AD]`.
    pub gluings: [Gluing; 2],
    /// `[z = 0, z = 1, z = ∞]`.
    pub cone_data: [ConeDatum; 3],
}

/// Builds the canonical model. Gluings are solved from their constraints; cone
/// data is the closed form `α₀ = 5π/4 + (i/2)log 2`, `α₁ = π/4 − (3i/2)log 2`,
/// `α∞ = π/2 + i log 2`, which [`validate`] checks against the geometry.
pub fn build_model() -> SurfaceModel {
    let a = Complex64::new(0.0, 0.0);
    let b = Complex64::new(0.0, -1.0);
    let c = Complex64::new(2.0, 1.0);
    let d = Complex64::new(0.0, 1.0);
    // fixes B, sends A to C
    let g1 = AffineMap::with_fixed_point(b, (c - b) / (a - b));
    // fixes D, sends C to A
    let g2 = AffineMap::with_fixed_point(d, (a - d) / (c - d));
    SurfaceModel {
        a,
        b,
        c,
        d,
        gluings: [
            Gluing {
                source: Edge::AB,
                target: Edge::BC,
                map: g1,
            },
            Gluing {
                source: Edge::CD,
                target: Edge::AD,
                map: g2,
            },
        ],
        cone_data: [
            ConeDatum::new(SingularPoint::Zero, 5.0 * FRAC_PI_4, 0.5 * LN_2),
            ConeDatum::new(SingularPoint::One, FRAC_PI_4, -1.5 * LN_2),
            ConeDatum::new(SingularPoint::Infinity, FRAC_PI_2, LN_2),
        ],
    }
}

impl Default for SurfaceModel {
    fn default() -> Self {
        build_model()
    }
}

impl SurfaceModel {
    pub fn vertex(&self, v: Vertex) -> Complex64 {
        match v {
            Vertex::A => self.a,
            Vertex::B => self.b,
            Vertex::C => self.c,
            Vertex::D => self.d,
        }
    }

    pub fn vertices(&self) -> [(Vertex, Complex64); 4] {
        [
            (Vertex::A, self.a),
            (Vertex::B, self.b),
            (Vertex::C, self.c),
            (Vertex::D, self.d),
        ]
    }

    pub fn edge_length(&self, edge: Edge) -> f64 {
        let (s, e) = edge.endpoints();
        (self.vertex(e) - self.vertex(s)).norm()
    }

    /// Point at arclength fraction `s` of `edge`.
    pub fn point_on(&self, edge: Edge, s: f64) -> Complex64 {
        let (v0, v1) = edge.endpoints();
        let p0 = self.vertex(v0);
        p0 + (self.vertex(v1) - p0) * s
    }

    /// Fraction of the orthogonal projection of `z` on the line of `edge`.
    pub fn fraction_on(&self, edge: Edge, z: Complex64) -> f64 {
        let (v0, v1) = edge.endpoints();
        let p0 = self.vertex(v0);
        let e = self.vertex(v1) - p0;
        ((z - p0) * e.conj()).re / e.norm_sqr()
    }

    /// Gluing map carrying a point of `edge` to the partner edge.
    pub fn transition(&self, edge: Edge) -> AffineMap {
        match edge {
            Edge::AB => self.gluings[0].map,
            Edge::BC => self.gluings[0].map.inverse(),
            Edge::CD => self.gluings[1].map,
            Edge::AD => self.gluings[1].map.inverse(),
        }
    }

    /// Interior angle at a vertex (the quadrilateral is counter-clockwise).
    pub fn interior_angle(&self, v: Vertex) -> f64 {
        let (prev, next) = match v {
            Vertex::A => (Vertex::D, Vertex::B),
            Vertex::B => (Vertex::A, Vertex::C),
            Vertex::C => (Vertex::B, Vertex::D),
            Vertex::D => (Vertex::C, Vertex::A),
        };
        let p = self.vertex(v);
        let arg = ((self.vertex(prev) - p) / (self.vertex(next) - p)).arg();
        if arg <= 0.0 {
            arg + 2.0 * PI
        } else {
            arg
        }
    }

    /// Nearest vertex to `z` and its distance.
    pub fn nearest_vertex(&self, z: Complex64) -> (Vertex, f64) {
        self.vertices()
            .into_iter()
            .map(|(v, p)| (v, (z - p).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("four vertices")
    }

    pub fn mu0(&self) -> Complex64 {
        self.cone_data[0].mu
    }

    pub fn alphas(&self) -> [Complex64; 3] {
        [
            self.cone_data[0].alpha,
            self.cone_data[1].alpha,
            self.cone_data[2].alpha,
        ]
    }
}

/// One recomputed quantity of [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationEntry {
    pub key: String,
    pub expected: f64,
    pub got: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    pub fn max_deviation(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| (e.expected - e.got).abs())
            .fold(0.0, f64::max)
    }

    /// `key=value` lines, values with 17 significant digits.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!("{}={:.16e}\n", e.key, e.got));
        }
        out.push_str(&format!("max_deviation={:.16e}\n", self.max_deviation()));
        out
    }
}

/// Recomputes cone angles and scaling ratios from the vertex geometry and edge
/// lengths `a = |AB|`, `b = |BC|`, `c = |CD|`, `d = |DA|`, and checks them, the
/// gluing constraints and `Σα = 2π` against the model.
pub fn validate(model: &SurfaceModel) -> Result<ValidationReport, SurfaceError> {
    let la = model.edge_length(Edge::AB);
    let lb = model.edge_length(Edge::BC);
    let lc = model.edge_length(Edge::CD);
    let ld = model.edge_length(Edge::AD);
    let theta0 = model.interior_angle(Vertex::A) + model.interior_angle(Vertex::C);
    let theta1 = model.interior_angle(Vertex::B);
    let theta_inf = model.interior_angle(Vertex::D);
    let log0 = (lb * ld / (la * lc)).ln();
    let log1 = (la / lb).ln();
    let log_inf = (lc / ld).ln();

    let [z0, z1, zinf] = model.cone_data;
    let sum = z0.alpha + z1.alpha + zinf.alpha;
    let g1 = model.gluings[0].map;
    let g2 = model.gluings[1].map;

    let mut entries = Vec::new();
    let mut push = |key: &str, expected: f64, got: f64| {
        entries.push(ValidationEntry {
            key: key.to_string(),
            expected,
            got,
        })
    };
    push("edge_a", (model.b - model.a).norm(), la);
    push("theta0", z0.angle, theta0);
    push("theta1", z1.angle, theta1);
    push("theta_inf", zinf.angle, theta_inf);
    push("im_alpha0", z0.ratio_log, log0);
    push("im_alpha1", z1.ratio_log, log1);
    push("im_alpha_inf", zinf.ratio_log, log_inf);
    push("angle_sum", 2.0 * PI, theta0 + theta1 + theta_inf);
    push("re_alpha_sum", 2.0 * PI, sum.re);
    push("im_alpha_sum", 0.0, sum.im);
    push("gluing1_fixes_b", 0.0, (g1.apply(model.b) - model.b).norm());
    push("gluing1_a_to_c", 0.0, (g1.apply(model.a) - model.c).norm());
    push("gluing2_fixes_d", 0.0, (g2.apply(model.d) - model.d).norm());
    push("gluing2_c_to_a", 0.0, (g2.apply(model.c) - model.a).norm());
    push("gluing1_ratio_modulus", lb / la, g1.ratio.norm());
    push("gluing2_ratio_modulus", ld / lc, g2.ratio.norm());
    push("re_mu0", z0.mu.re, z0.alpha.re / (2.0 * PI));

    for e in &entries {
        if !((e.expected - e.got).abs() <= VALIDATION_TOLERANCE) {
            return Err(SurfaceError::Inconsistent {
                field: e.key.clone(),
                expected: e.expected,
                got: e.got,
            });
        }
    }
    if !(z0.mu.re > 0.0 && z0.mu.re < 1.0) {
        return Err(SurfaceError::Inconsistent {
            field: "re_mu0_in_unit_interval".into(),
            expected: 0.5,
            got: z0.mu.re,
        });
    }
    Ok(ValidationReport { entries })
}

/// Result of crossing an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Glued {
    pub edge: Edge,
    pub fraction: f64,
    pub direction: Complex64,
}

/// Identifies the point at fraction `s` of `edge` with its image on the partner
/// edge and transports `direction` by the gluing derivative.
pub fn glue(model: &SurfaceModel, edge: Edge, s: f64, direction: Complex64) -> Result<Glued, SurfaceError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(SurfaceError::OutsideEdge(s));
    }
    let len = model.edge_length(edge);
    let (v0, v1) = edge.endpoints();
    if s * len < VERTEX_TOLERANCE || (1.0 - s) * len < VERTEX_TOLERANCE {
        return Err(SurfaceError::VertexHit {
            edge,
            fraction: s,
            vertex: if s < 0.5 { v0 } else { v1 },
            tolerance: VERTEX_TOLERANCE,
        });
    }
    let map = model.transition(edge);
    let target = edge.partner();
    let image = map.apply(model.point_on(edge, s));
    Ok(Glued {
        edge: target,
        fraction: model.fraction_on(target, image),
        direction: direction * map.ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gluing_ratios_solve_the_constraints() {
        let m = build_model();
        let g1 = m.gluings[0].map;
        let g2 = m.gluings[1].map;
        assert!((g1.ratio - c(2.0, -2.0)).norm() < 1e-15);
        assert!((g2.ratio - c(0.0, -0.5)).norm() < 1e-15);
        // z ↦ −i + (2−2i)(z+i)
        let z = c(0.3, -0.7);
        assert!((g1.apply(z) - (c(0.0, -1.0) + c(2.0, -2.0) * (z + c(0.0, 1.0)))).norm() < 1e-15);
        assert!((g2.apply(z) - (c(0.0, 1.0) + c(0.0, -0.5) * (z - c(0.0, 1.0)))).norm() < 1e-15);
    }

    #[test]
    fn cone_data_matches_closed_form() {
        let m = build_model();
        let [a0, a1, ainf] = m.alphas();
        assert!((a0 - c(5.0 * PI / 4.0, 0.5 * LN_2)).norm() < 1e-15);
        assert!((a1 - c(PI / 4.0, -1.5 * LN_2)).norm() < 1e-15);
        assert!((ainf - c(PI / 2.0, LN_2)).norm() < 1e-15);
        let sum = a0 + a1 + ainf;
        assert!((sum.re - 2.0 * PI).abs() < 1e-15 && sum.im.abs() < 1e-15);
    }

    #[test]
    fn validate_recomputes_geometry() {
        let m = build_model();
        let report = validate(&m).expect("canonical model is consistent");
        assert!(report.max_deviation() < 1e-14);
        let lens: Vec<f64> = Edge::ALL.iter().map(|&e| m.edge_length(e)).collect();
        assert!((lens[0] - 1.0).abs() < 1e-15);
        assert!((lens[1] - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((lens[2] - 2.0).abs() < 1e-15);
        assert!((lens[3] - 1.0).abs() < 1e-15);
        assert!((m.interior_angle(Vertex::A) - PI).abs() < 1e-15);
        assert!((m.interior_angle(Vertex::C) - PI / 4.0).abs() < 1e-15);
        let kv = report.to_key_values();
        assert!(kv.contains("theta0=3.9269908169872414e0"));
    }

    #[test]
    fn validate_rejects_tampered_cone_data() {
        let mut m = build_model();
        m.cone_data[0].ratio_log += 1e-9;
        match validate(&m) {
            Err(SurfaceError::Inconsistent { field, .. }) => assert_eq!(field, "im_alpha0"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn glue_midpoint_of_ab() {
        let m = build_model();
        let g = glue(&m, Edge::AB, 0.5, c(-1.0, 0.0)).unwrap();
        assert_eq!(g.edge, Edge::BC);
        assert!((m.point_on(Edge::BC, g.fraction) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((g.direction.norm() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn glue_scales_speed_by_gluing_modulus() {
        let m = build_model();
        let dir = c(0.6, 0.8);
        let expected = [
            (Edge::AB, 2.0 * 2f64.sqrt()),
            (Edge::BC, 1.0 / (2.0 * 2f64.sqrt())),
            (Edge::CD, 0.5),
            (Edge::AD, 2.0),
        ];
        for (edge, factor) in expected {
            let g = glue(&m, edge, 0.37, dir).unwrap();
            assert_eq!(g.edge, edge.partner());
            assert!((g.direction.norm() - factor).abs() < 1e-14, "{edge}");
        }
    }

    #[test]
    fn gluings_fix_b_and_d_and_send_c_to_a() {
        let m = build_model();
        assert_eq!(m.gluings[0].map.apply(m.b), m.b);
        assert!((m.gluings[1].map.apply(m.d) - m.d).norm() < 1e-16);
        assert!((m.gluings[1].map.apply(m.c) - m.a).norm() < 1e-15);
        assert!(matches!(
            glue(&m, Edge::AB, 1.0, c(-1.0, 0.0)),
            Err(SurfaceError::VertexHit { vertex: Vertex::B, .. })
        ));
        assert!(matches!(
            glue(&m, Edge::CD, 1.0 - 1e-12, c(0.0, 1.0)),
            Err(SurfaceError::VertexHit { vertex: Vertex::D, .. })
        ));
    }

    #[test]
    fn gluing_inverse_roundtrip() {
        let m = build_model();
        for g in m.gluings {
            let id = g.map.compose(&g.map.inverse());
            assert!((id.ratio - c(1.0, 0.0)).norm() < 1e-15);
            assert!(id.offset.norm() < 1e-15);
        }
        // crossing back and forth returns to the same point
        for edge in Edge::ALL {
            let there = glue(&m, edge, 0.3, c(1.0, 0.0)).unwrap();
            let back = glue(&m, there.edge, there.fraction, there.direction).unwrap();
            assert_eq!(back.edge, edge);
            assert!((back.fraction - 0.3).abs() < 1e-15);
            assert!((back.direction - c(1.0, 0.0)).norm() < 1e-15);
        }
    }
}
