//! Worked examples, each checked against a value computed here from first
//! principles rather than by the library.

use std::f64::consts::{FRAC_PI_4, LN_2, PI, SQRT_2};

use affine_flow::field::{
    eval_field, integrate, limit_circle, projection_identity_residual, CircleShape, FieldParams, IntegrateOptions,
    LParam,
};
use affine_flow::geodesics::{first_return_ab, trace, PhasePoint};
use affine_flow::interval::{
    lambda_accumulation, preimage_closure_check, rotation_number_exact, t_theta_from_tan, theta_tilde, Extension,
    PreimageReport, RotationValue, Witness,
};
use affine_flow::renorm::{
    alternating_word, brute_first_return, rv_run, rv_step, t_theta_to_model, tan_following_word, word_intervals,
    Letter, ModelMap, RenormState,
};
use affine_flow::surface::{build_model, glue, validate, Edge};
use affine_flow::{Execution, Rational, Scalar};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Two-branch first-return formula with `t = tan θ`.
fn t_closed(t: f64, x: f64) -> f64 {
    if x < 2.0 * t - 1.0 {
        x / 16.0 + (17.0 - 4.0 * t) / 16.0
    } else {
        x / 16.0 + (11.0 - 12.0 * t) / 16.0
    }
}

#[test]
fn gluings_solve_the_vertex_constraints() {
    let m = build_model();
    let (a, b, cc, d) = (m.a, m.b, m.c, m.d);
    // g1 fixes B and sends A to C; g2 fixes D and sends C to A.
    let r1 = (cc - b) / (a - b);
    let r2 = (a - d) / (cc - d);
    assert!((r1 - c(2.0, -2.0)).norm() < 1e-15);
    assert!((r2 - c(0.0, -0.5)).norm() < 1e-15);
    assert!((m.gluings[0].map.ratio - r1).norm() < 1e-15);
    assert!((m.gluings[1].map.ratio - r2).norm() < 1e-15);
    assert!((r1.norm() - 2.0 * SQRT_2).abs() < 1e-15 && (r2.norm() - 0.5).abs() < 1e-15);
}

#[test]
fn cone_data_from_edge_lengths() {
    let m = build_model();
    let (la, lb, lc, ld) = (1.0, 2.0 * SQRT_2, 2.0, 1.0);
    for (e, l) in [(Edge::AB, la), (Edge::BC, lb), (Edge::CD, lc), (Edge::AD, ld)] {
        assert!((m.edge_length(e) - l).abs() < 1e-15);
    }
    let [a0, a1, ainf] = m.alphas();
    assert!((a0 - c(5.0 * PI / 4.0, (lb * ld / (la * lc)).ln())).norm() < 1e-15);
    assert!((a0.im - LN_2 / 2.0).abs() < 1e-15);
    assert!((a1 - c(PI / 4.0, -1.5 * LN_2)).norm() < 1e-15);
    assert!((ainf - c(PI / 2.0, LN_2)).norm() < 1e-15);
    let sum = a0 + a1 + ainf;
    assert!((sum.re - 2.0 * PI).abs() < 1e-15 && sum.im.abs() < 1e-15);
    assert!(validate(&m).is_ok());
}

#[test]
fn midpoint_of_ab_glues_to_one() {
    let m = build_model();
    let g = glue(&m, Edge::AB, 0.5, c(1.0, 0.0)).unwrap();
    assert_eq!(g.edge, Edge::BC);
    assert!((m.point_on(Edge::BC, g.fraction) - c(1.0, 0.0)).norm() < 1e-14);
    assert!((g.direction.norm() - 2.0 * SQRT_2).abs() < 1e-14);
}

#[test]
fn first_step_angles_and_three_step_return() {
    let m = build_model();
    for &th in &[0.1, 0.5, 0.6, 0.75] {
        let rec = trace(&m, PhasePoint::on_ab(0.37, th), 3).unwrap();
        let t1 = rec.steps[0].point.theta;
        assert!((t1 - (th + FRAC_PI_4)).abs() < 1e-12 || (t1 - (th - PI / 2.0)).abs() < 1e-12, "θ₁={t1}");
        let r = first_return_ab(&m, 0.37, th).unwrap();
        assert!((r.theta - th).abs() < 1e-12);
        assert!((r.contraction - 1.0 / 16.0).abs() < 1e-15);
    }
}

#[test]
fn closed_form_values() {
    let m = build_model();
    let map = t_theta_from_tan(0.8);
    for (x, want) in [(0.5, 0.89375), (0.7, 0.13125)] {
        assert!((map.eval(&x, Extension::Strict).unwrap() - want).abs() < 1e-15);
        assert!((t_closed(0.8, x) - want).abs() < 1e-15);
        assert!((first_return_ab(&m, x, 0.8f64.atan()).unwrap().x - want).abs() < 1e-9);
    }
    // tan θ = 1: x ↦ x/16 + 13/16, fixed point 13/15.
    let one = t_theta_from_tan(q(1, 1));
    assert_eq!(one.branches.len(), 1);
    let fp = q(13, 15);
    assert_eq!(one.eval(&fp, Extension::Strict).unwrap(), fp);
    for x in [0.1, 0.4, 0.9] {
        assert!((first_return_ab(&m, x, FRAC_PI_4 - 1e-13).unwrap().x - (x / 16.0 + 13.0 / 16.0)).abs() < 1e-9);
    }
    assert!((theta_tilde().tan() - 0.5).abs() < 1e-15);
}

#[test]
fn one_sided_limits_differ_at_the_singularity() {
    let map = t_theta_from_tan(q(4, 5));
    let s = map.singularity().unwrap();
    assert_eq!(s, q(3, 5));
    let left = map.eval(&s, Extension::Left).unwrap();
    let right = map.eval(&s, Extension::Right).unwrap();
    // (17 − 4t)/16 − (11 − 12t)/16 at t = 4/5
    assert_eq!(left - right, q(31, 40));
}

#[test]
fn rotation_values_in_the_windows() {
    for (t, p, qq) in [(q(7, 10), 1, 2), (q(9, 16), 1, 1), (q(33, 34), 0, 1), (q(1, 4), 0, 1)] {
        let r = rotation_number_exact(&t_theta_from_tan(t.clone()), Extension::Strict).unwrap();
        let RotationValue::Rational(f) = r.value else { panic!("{t}: {:?}", r.value) };
        assert_eq!((f.p.rem_euclid(f.q), f.q), (p % qq, qq), "tan {t}");
        assert!(matches!(r.witness, Witness::PeriodicOrbit { residual, .. } if residual == 0.0));
    }
}

#[test]
fn lambda_cases_at_constructed_parameters() {
    let x0 = q(1, 3);
    let inside = lambda_accumulation(&t_theta_from_tan(q(7, 10)), x0.clone(), 80).unwrap();
    assert!(inside.zero && inside.finite.is_empty() && !inside.infinity);
    // Boundary of the 1/2 plateau: a two-cycle through s.
    let edge = lambda_accumulation(&t_theta_from_tan(q(224, 353)), x0, 80).unwrap();
    assert!(edge.zero && edge.finite.len() == 1);
}

#[test]
fn preimages_approach_the_cover() {
    let tan = tan_following_word(&alternating_word(10)).unwrap();
    let PreimageReport::Distances(rows) = preimage_closure_check(&t_theta_from_tan(tan), 10, Execution::Parallel).unwrap()
    else {
        panic!("expected an aperiodic map");
    };
    assert!(rows.iter().all(|r| r.outside == 0));
    assert!(rows.windows(2).all(|w| w[1].hausdorff <= w[0].hausdorff));
    assert!(rows.last().unwrap().hausdorff < 1e-8);
}

#[test]
fn r_step_on_a_worked_vector() {
    let m = ModelMap::new(q(1, 4), q(1, 2), q(1, 1), q(1, 5)).unwrap();
    assert_eq!(m.step_kind(), Some(Letter::R));
    let st = rv_step(&RenormState::new(m.clone()));
    assert_eq!((st.current.l_a.clone(), st.current.l_b.clone()), (q(1, 5), q(4, 5)));
    assert_eq!((st.current.lambda.clone(), st.current.mu.clone()), (q(1, 4), q(1, 8)));
    // Induced map equals the first return to the A-interval, exactly.
    let (lo, hi) = (st.current.start.clone(), st.current.end());
    for k in 1..20 {
        let x = lo.clone() + (hi.clone() - lo.clone()) * q(k, 20);
        if x == st.current.singularity() {
            continue;
        }
        let (y, _) = brute_first_return(&m, &lo, &hi, &x, 100).unwrap();
        assert_eq!(st.current.eval(&x, Extension::Strict).unwrap(), y);
    }
}

#[test]
fn symmetric_map_has_a_two_cycle() {
    let st = rv_run(ModelMap::new(q(1, 2), q(1, 2), q(1, 1), q(1, 1)).unwrap(), 5).unwrap();
    assert!(st.word.is_empty());
    let m = &st.current;
    let affine_flow::renorm::RenormStatus::Stopped { period_two: (x, fx) } = &st.status else { unreachable!() };
    assert_eq!(m.eval(x, Extension::Strict).unwrap(), *fx);
    assert_eq!(m.eval(fx, Extension::Strict).unwrap(), *x);
}

#[test]
fn empty_word_interval_and_model_conjugacy() {
    let w = word_intervals(q(1, 16), q(1, 16), &[]).unwrap();
    assert_eq!((w.i_w.lo.clone(), w.i_w.hi.clone()), (q(0, 1), q(1, 1)));
    // T_θ restricted to [T(s⁺), T(s⁻)] is conjugate to the model map.
    let tan = q(7, 10);
    let (model, norm) = t_theta_to_model(tan.clone()).unwrap();
    assert_eq!((model.lambda.clone(), model.mu.clone()), (q(1, 16), q(1, 16)));
    let t = t_theta_from_tan(tan);
    let mut x = norm.a.clone() + (norm.b.clone() - norm.a.clone()) * q(2, 7);
    for _ in 0..30 {
        let y = t.eval(&x, Extension::Strict).unwrap();
        let u = model.eval(&norm.to_model(&x), Extension::Strict).unwrap();
        assert_eq!(norm.to_model(&y), u);
        x = y;
    }
}

#[test]
fn field_on_the_characteristic_lines() {
    let p = FieldParams::canonical();
    let z = c(0.3, -0.7);
    let zero = c(0.0, 0.0);
    let (v1, v2) = eval_field(&p, zero, z);
    assert_eq!(v1, zero);
    assert!((v2 + p.alpha0 * z * z).norm() < 1e-15);
    let (v1, v2) = eval_field(&p, z, zero);
    assert_eq!(v2, zero);
    assert!((v1 + p.alpha_inf * z * z).norm() < 1e-15);
    let (v1, v2) = eval_field(&p, z, z);
    assert!((v1 - p.alpha1 * z * z).norm() < 1e-15 && (v2 - p.alpha1 * z * z).norm() < 1e-15);
}

#[test]
fn l0_trajectory_and_decay() {
    let p = FieldParams::canonical();
    let traj = integrate(&p, [c(0.0, 0.0), c(1.0, 0.0)], 50.0, &IntegrateOptions::with_tol(1e-12)).unwrap();
    for s in &traj.samples {
        let exact = 1.0 / (1.0 + p.alpha0 * s.t);
        assert!((s.g2 - exact).norm() <= 1e-8 * exact.norm());
    }
    assert!(traj.last().g2.norm() < 0.03);
}

#[test]
fn projection_residual_shrinks_with_tolerance() {
    let p = FieldParams::canonical();
    let y0 = [c(0.4, 0.3), c(0.8, -0.1)];
    let res = |tol: f64| {
        let opts = IntegrateOptions::with_tol(tol).uniform(2e-3);
        projection_identity_residual(&p, &integrate(&p, y0, 0.3, &opts).unwrap()).unwrap()
    };
    let (coarse, fine) = (res(1e-6), res(1e-9));
    assert!(fine < coarse, "{fine} !< {coarse}");
    assert!(fine < 1e-6);
}

#[test]
fn limit_circles_and_lines() {
    let p = FieldParams::canonical();
    let i = c(0.0, 1.0);
    let circ = limit_circle(&p, LParam::Finite(i)).unwrap();
    assert!(matches!(circ.shape, CircleShape::Circle { .. }));
    // Through 0 (t = ∞) and i/(2πμ₀) = i/α₀ (t = 0).
    assert!(circ.distance(c(0.0, 0.0)) < 1e-14);
    assert!(circ.distance(i / p.alpha0) < 1e-14);
    for t in [-3.0, -0.2, 0.7, 11.0] {
        assert!(circ.distance(circ.point(t)) < 1e-12);
    }
    let line = limit_circle(&p, LParam::Infinity).unwrap();
    let CircleShape::Line { direction, .. } = line.shape else { panic!() };
    assert!((direction / direction.norm() - (1.0 / p.mu0()) / (1.0 / p.mu0()).norm()).norm() < 1e-14);
    assert!(limit_circle(&p, LParam::Finite(c(2.0, 0.0))).is_err());
}
