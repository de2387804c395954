use goodwill_game::assumptions::AuditPoint;
use goodwill_game::lq::LqParams;
use goodwill_game::presets::{interaction_spec, InteractionDemand};
use goodwill_game::steady_state::residual;
use goodwill_game::*;
use proptest::prelude::*;

fn lq_params(spillover: bool) -> impl Strategy<Value = LqParams> {
    (
        2usize..=5,
        0.5..2.0f64,
        0.05..0.95f64,
        0.0..0.9f64,
        0.5..60.0f64,
        0.05..0.3f64,
        0.01..0.1f64,
        0.5..2.0f64,
        prop::option::of((1.0..3.0f64, 0.0..2.0f64)),
    )
        .prop_map(move |(n, b, dr, beta, alpha, delta, rho, c, affine)| {
            let beta = if spillover { beta } else { 0.0 };
            let p = LqParams::new(n, b, dr * b, beta, alpha, delta, rho, c);
            match affine {
                Some((margin, g1)) => p.with_intercept(c + margin).with_linear_ad_cost(g1),
                None => p,
            }
        })
}

fn interaction() -> impl Strategy<Value = ModelSpec> {
    (2usize..=3, 0.0..0.3f64, 0.2..0.6f64, 10.0..40.0f64)
        .prop_filter("unique stage equilibrium", |&(n, e, h, _)| {
            3.0 * h > 2.0 * (n as f64 - 1.0) * e
        })
        .prop_map(|(n, e, h, sigma)| {
            let demand = InteractionDemand {
                a: 2.0,
                b: 1.0,
                h,
                d: 0.5,
                e,
            };
            interaction_spec(n, demand, 1.0, 1.0, sigma, 0.1, 0.05).unwrap()
        })
}

fn any_spec() -> impl Strategy<Value = ModelSpec> {
    prop_oneof![
        lq_params(true).prop_map(|p| p.to_spec().unwrap()),
        interaction(),
    ]
}

fn d_residual(spec: &ModelSpec, concept: Concept, a: f64) -> f64 {
    let h = 1e-5 * a.max(1.0);
    let up = residual(spec, concept, a + h).unwrap();
    let down = residual(spec, concept, a - h).unwrap();
    (up - down) / (2.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn declared_partials_match_differences(
        spec in any_spec(),
        fa in 0.05..0.9f64,
        fq in 0.05..0.9f64,
        fk in 0.05..0.9f64,
    ) {
        let b = spec.bounds;
        let point = AuditPoint {
            goodwill: fa * b.a_max,
            output: fq * b.q_max.min(10.0),
            investment: fk * b.k_max,
        };
        let audit = finite_diff_audit(&spec, point, 1e-5).unwrap();
        prop_assert!(audit.max_discrepancy <= 1e-6, "{} off by {:e}", audit.worst, audit.max_discrepancy);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn one_firm_statics_sum_to_symmetric_response(p in lq_params(false), frac in 0.0..1.0f64) {
        let spec = p.to_spec().unwrap();
        // interior output needs goodwill above the cost margin
        let a = (p.c - p.a).max(0.0) + 0.1 + frac * 0.3 * spec.bounds.a_max;
        let q = solve_cournot(&spec, a).unwrap().q;
        prop_assume!(q > 1e-3);
        let cs = comparative_statics(&spec, a, q).unwrap();
        let h = 1e-4;
        let up = solve_cournot(&spec, a + h).unwrap().q;
        let down = solve_cournot(&spec, a - h).unwrap().q;
        let uniform = (up - down) / (2.0 * h);
        let chain = cs.dq_own_da + (p.n as f64 - 1.0) * cs.dq_other_da;
        prop_assert!((chain - uniform).abs() <= 1e-7 * uniform.abs().max(1.0), "{chain} vs {uniform}");
    }

    #[test]
    fn determinant_sign_tracks_residual_slope(p in lq_params(false)) {
        let spec = p.to_spec().unwrap();
        for concept in [Concept::OpenLoop, Concept::ClosedLoop] {
            let Ok(all) = solve_steady_state(&spec, concept) else { continue };
            for ss in all.states.iter().filter(|s| !s.degenerate) {
                let report = jacobian(&spec, ss).unwrap();
                prop_assert!((report.trace - p.rho).abs() <= 1e-9);
                let slope = d_residual(&spec, concept, ss.goodwill);
                prop_assume!(report.determinant.abs() > 1e-6 && slope.abs() > 1e-6);
                prop_assert_eq!(report.determinant.signum(), slope.signum());
            }
        }
    }

    #[test]
    fn feedback_and_closed_loop_residuals_agree(spec in interaction(), frac in 0.0..1.0f64) {
        let a = 0.05 + frac * 0.5 * spec.bounds.a_max;
        let closed = residual(&spec, Concept::ClosedLoop, a);
        let feedback = residual(&spec, Concept::Feedback, a);
        match (closed, feedback) {
            (Ok(c), Ok(f)) => prop_assert!((c - f).abs() <= 1e-10 * c.abs().max(1.0)),
            (c, f) => prop_assert_eq!(c.is_ok(), f.is_ok()),
        }
    }

    #[test]
    fn comparisons_are_self_consistent(p in lq_params(false)) {
        let report = check_propositions(&p.to_spec().unwrap());
        prop_assert!(report.self_consistent, "{p:?}");
        prop_assert_ne!(report.feedback_equivalence.verdict, Verdict::Reversed);
    }

    #[test]
    fn solved_states_are_roots(spec in any_spec()) {
        for concept in Concept::ALL {
            let Ok(all) = solve_steady_state(&spec, concept) else { continue };
            for ss in &all.states {
                prop_assert!(ss.residual.abs() <= 1e-9, "{concept}: {}", ss.residual);
                prop_assert!(ss.goodwill >= 0.0 && ss.output >= 0.0 && ss.advertising >= 0.0);
            }
        }
    }
}
