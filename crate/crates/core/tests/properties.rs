use std::f64::consts::FRAC_PI_4;

use affine_flow::field::{integrate, state_norm, FieldParams, IntegrateOptions, State};
use affine_flow::geodesics::{first_return_ab, trace, PhasePoint};
use affine_flow::interval::{
    lift, rotation_number_with_budget, t_theta, t_theta_from_tan, theta_tilde, transl_estimate, Extension, Witness,
};
use affine_flow::renorm::{cantor_covers, r_matrix, l_matrix, rv_step, Letter, ModelMap, RenormState};
use affine_flow::surface::{build_model, Edge};
use affine_flow::{Rational, Scalar};
use num_complex::Complex64;
use proptest::prelude::*;

fn theta_range() -> std::ops::Range<f64> {
    (theta_tilde() + 1e-3)..(FRAC_PI_4 - 1e-3)
}

fn small_rational(max_den: i64) -> impl Strategy<Value = Rational> {
    (2..max_den).prop_flat_map(move |q| (1..q, Just(q))).prop_map(|(p, q)| Rational::from_ratio(p, q))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gluing_roundtrip(re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let model = build_model();
        for g in &model.gluings {
            let z = c(re, im);
            let back = g.map.apply(g.map.inverse().apply(z));
            prop_assert!((back - z).norm() <= 4.0 * f64::EPSILON * (1.0 + z.norm() * 4.0));
        }
    }

    #[test]
    fn lift_has_degree_one_and_map_is_injective(th in theta_range(), x in 0.0..1.0f64, k in -3i64..3) {
        let map = t_theta(th);
        prop_assert!(map.is_injective());
        let l = lift(&map);
        if let (Ok(a), Ok(b)) = (l.eval(x, Extension::Strict), l.eval(x + k as f64, Extension::Strict)) {
            prop_assert!((b - a - k as f64).abs() < 1e-12);
        }
        if let (Ok(a), Ok(b)) = (l.eval(x, Extension::Strict), l.eval((x + 0.01).min(0.999), Extension::Strict)) {
            prop_assert!(b >= a);
        }
    }

    #[test]
    fn closed_form_matches_ray_tracing(th in theta_range(), x in 0.001..0.999f64) {
        let model = build_model();
        if let (Ok(a), Ok(r)) = (t_theta(th).eval(&x, Extension::Strict), first_return_ab(&model, x, th)) {
            prop_assert!((a - r.x).abs() < 1e-9);
            prop_assert!((r.theta - th).abs() < 1e-12);
        }
    }

    #[test]
    fn speed_contracts_by_a_sixteenth_per_return(th in theta_range(), x in 0.001..0.999f64, n in 1usize..6) {
        let model = build_model();
        let (mut x, mut scale) = (x, 1.0);
        for _ in 0..n {
            match first_return_ab(&model, x, th) {
                Ok(r) => {
                    x = r.x;
                    scale *= r.contraction;
                }
                Err(_) => return Ok(()),
            }
        }
        let want = 16f64.powi(-(n as i32));
        prop_assert!((scale - want).abs() <= 1e-9 * want);
    }

    #[test]
    fn entries_lie_on_open_ab_or_ad(th in theta_range(), x in 0.001..0.999f64) {
        let model = build_model();
        let rec = trace(&model, PhasePoint::on_ab(x, th), 30).unwrap();
        for st in &rec.steps {
            prop_assert!(matches!(st.point.edge, Edge::AB | Edge::AD));
            prop_assert!(st.point.s > 0.0 && st.point.s < 1.0);
        }
    }

    #[test]
    fn translation_number_is_non_increasing(a in theta_range(), b in theta_range()) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let n = 20_000;
        let (ea, eb) = (transl_estimate(lo, n), transl_estimate(hi, n));
        prop_assert!(eb.estimate <= ea.estimate + ea.error_bound + eb.error_bound);
    }

    #[test]
    fn r_and_l_steps_are_positive_iff_branch_condition(
        lam in small_rational(9), mu in small_rational(9), la in small_rational(30), lb in small_rational(30)
    ) {
        let half = Rational::from_ratio(1, 2);
        prop_assume!(lam <= half && mu <= half);
        let zero = Rational::zero();
        let apply = |m: [[Rational; 2]; 2]| {
            (
                m[0][0].clone() * la.clone() + m[0][1].clone() * lb.clone(),
                m[1][0].clone() * la.clone() + m[1][1].clone() * lb.clone(),
            )
        };
        let (ra, rb) = apply(r_matrix(&lam));
        prop_assert_eq!(ra > zero && rb > zero, lb < lam.clone() * la.clone());
        let (la2, lb2) = apply(l_matrix(&mu));
        prop_assert_eq!(la2 > zero && lb2 > zero, la < mu.clone() * lb.clone());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rational_witnesses_are_exact(t in (500i64..1000).prop_map(|p| Rational::from_ratio(p, 1000))) {
        let map = t_theta_from_tan(t);
        let Ok(res) = rotation_number_with_budget(&map, Extension::Strict, 20_000) else {
            return Ok(());
        };
        if let Witness::PeriodicOrbit { p, q, points, residual, .. } = &res.witness {
            prop_assert_eq!(*residual, 0.0);
            let l = lift(&map);
            let mut x = points[0].clone();
            for _ in 0..*q {
                x = l.eval(x, res.extension).unwrap();
            }
            prop_assert_eq!(x, points[0].clone() + Rational::from_int(*p));
        }
    }

    #[test]
    fn renormalized_lengths_follow_the_matrices(
        lam in small_rational(12), mu in small_rational(12), s in (1i64..9999).prop_map(|k| Rational::from_ratio(k, 10000))
    ) {
        let half = Rational::from_ratio(1, 2);
        prop_assume!(lam <= half && mu <= half);
        let mut st = RenormState::new(ModelMap::normalized(lam, mu, s).unwrap());
        for _ in 0..12 {
            st = rv_step(&st);
            let (a, b) = st.predicted_lengths();
            prop_assert_eq!(&a, &st.current.l_a);
            prop_assert_eq!(&b, &st.current.l_b);
            prop_assert!(st.current.l_a > Rational::zero() && st.current.l_b > Rational::zero());
        }
        // The factor multiplied in is the one of the letter's branch.
        for (i, l) in st.word.iter().enumerate() {
            let (prev, next) = (&st.factors[i], &st.factors[i + 1]);
            match l {
                Letter::R => prop_assert_eq!(next.1.clone(), prev.0.clone() * prev.1.clone()),
                Letter::L => prop_assert_eq!(next.0.clone(), prev.0.clone() * prev.1.clone()),
            }
        }
    }

    #[test]
    fn cantor_covers_are_nested(lam in small_rational(20), mu in small_rational(20)) {
        let half = Rational::from_ratio(1, 2);
        prop_assume!(lam <= half && mu <= half);
        let covers = cantor_covers(lam, mu, 5, affine_flow::Execution::Sequential);
        for (n, w) in covers.windows(2).enumerate() {
            prop_assert_eq!(w[1].len(), 1usize << (n + 2));
            for child in &w[1] {
                prop_assert!(w[0].iter().any(|p| p.lo <= child.lo && child.hi <= p.hi));
            }
        }
    }

    #[test]
    fn characteristic_lines_are_invariant(re in 0.2..1.0f64, im in -0.5..0.5f64, which in 0usize..3) {
        let p = FieldParams::canonical();
        let w = c(re, im);
        let zero = c(0.0, 0.0);
        let y0: State = match which {
            0 => [zero, w],
            1 => [w, w],
            _ => [w, zero],
        };
        let traj = integrate(&p, y0, 0.3, &IntegrateOptions::with_tol(1e-11)).unwrap();
        for s in &traj.samples {
            let y = [s.g1, s.g2];
            let off = match which {
                0 => s.g1.norm(),
                1 => (s.g1 - s.g2).norm(),
                _ => s.g2.norm(),
            };
            prop_assert!(off <= 1e-10 * state_norm(&y));
        }
    }

    #[test]
    fn homogeneity_covariance(a in -1.0..1.0f64, b in -1.0..1.0f64, d in -1.0..1.0f64, e in -1.0..1.0f64) {
        // γ̃(t) = cγ(ct) solves the same quadratic field from cγ(0).
        let p = FieldParams::canonical();
        let y0: State = [c(a, b), c(d, e)];
        prop_assume!(state_norm(&y0) > 0.2);
        let k = 2.0;
        let opts = IntegrateOptions::with_tol(1e-12);
        let (Ok(base), Ok(scaled)) = (
            integrate(&p, y0, 0.4 * k, &opts),
            integrate(&p, [y0[0] * k, y0[1] * k], 0.4, &opts),
        ) else {
            return Ok(());
        };
        let (lb, ls) = (base.last(), scaled.last());
        prop_assume!(lb.t == 0.4 * k && ls.t == 0.4);
        let want = [lb.g1 * k, lb.g2 * k];
        let err = ((ls.g1 - want[0]).norm_sqr() + (ls.g2 - want[1]).norm_sqr()).sqrt();
        prop_assert!(err <= 1e-8 * state_norm(&want).max(1.0), "err {err}");
    }
}
