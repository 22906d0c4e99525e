use covert_watch_core::covertness::PowerBound;
use covert_watch_core::*;
use proptest::prelude::*;

fn inputs() -> impl Strategy<Value = DetectorInputs> {
    (0.0..5.0f64, 0.0..5.0f64, 0.01..10.0f64, 0.0..10.0f64, 0.1..3.0f64)
        .prop_map(|(x1, x2, la, lm, s)| DetectorInputs::new(x1, x2, la, lm, s).unwrap())
}

fn params() -> impl Strategy<Value = SystemParams> {
    (
        (-5.0..30.0f64, -5.0..30.0f64, -10.0..10.0f64, -10.0..10.0f64),
        (-10.0..10.0f64, -10.0..10.0f64, 0.05..0.95f64, 0.0..1.0f64),
        (0.0..1.0f64, 0.05..0.95f64),
    )
        .prop_map(|((pa, pj, ab, am), (mb, mm, rho_ab, rho_mb), (eta, delta))| SystemParams {
            p_a: db_to_linear(pa),
            p_j_max: db_to_linear(pj),
            sigma2_ab: db_to_linear(ab),
            sigma2_am: db_to_linear(am),
            sigma2_mb: db_to_linear(mb),
            sigma2_mm: db_to_linear(mm),
            rho_ab,
            rho_mb,
            eta,
            delta,
            ..SystemParams::default()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn min_dep_is_a_lower_bound(inp in inputs()) {
        let xi = min_dep(&inp).unwrap();
        prop_assert!((0.0..=1.0).contains(&xi));
        let gamma = optimal_threshold(&inp).unwrap();
        prop_assert!(gamma >= inp.x1 + inp.x2 + inp.sigma2_b);
        prop_assert!((dep_components(&inp, gamma).unwrap().xi - xi).abs() < 1e-12);
        let hi = inp.x1 + inp.x2 + inp.sigma2_b + 20.0 * (inp.lambda_a + inp.lambda_m);
        for i in 0..=10_000 {
            let d = dep_components(&inp, hi * i as f64 / 10_000.0).unwrap();
            prop_assert!(d.p_fa >= 0.0 && d.p_fa <= 1.0 && d.p_md >= 0.0 && d.p_md <= 1.0);
            prop_assert!(xi <= d.xi + 1e-12);
        }
    }

    #[test]
    fn dep_is_continuous_at_branch_edges(inp in inputs()) {
        for edge in [inp.x1 + inp.sigma2_b, inp.x1 + inp.x2 + inp.sigma2_b] {
            let eps = 1e-12 * edge.max(1.0);
            let l = dep_components(&inp, edge - eps).unwrap().xi;
            let r = dep_components(&inp, edge + eps).unwrap().xi;
            // both error terms have slope at most 1/λ_A
            prop_assert!((l - r).abs() < 1e-10 + 2.0 * 2.0 * eps / inp.lambda_a);
        }
    }

    #[test]
    fn known_suspicious_link_exposes_any_an(x1 in 0.0..5.0f64, x2 in 0.0..5.0f64, lm in 0.0..5.0f64, s in 0.1..3.0f64) {
        prop_assume!(x2 > 0.0 || lm > 0.0);
        let inp = DetectorInputs::new(x1, x2, 0.0, lm, s).unwrap();
        prop_assert_eq!(dep_components(&inp, x1 + s).unwrap().xi, 0.0);
        prop_assert_eq!(min_dep(&inp).unwrap(), 0.0);
    }

    #[test]
    fn known_jamming_reduction(x2 in 0.0..20.0f64, la in 0.01..10.0f64) {
        let inp = DetectorInputs::new(0.5, x2, la, 0.0, 1.0).unwrap();
        prop_assert!((min_dep(&inp).unwrap() - (-x2 / la).exp()).abs() < 1e-14);
    }

    #[test]
    fn rho_mb_does_not_change_non_outage(p in params(), pj in 0.0..100.0f64) {
        let base = ex_quadrature(&p, pj).unwrap().value;
        let closed = ex_closed(&p, pj).unwrap().value;
        for rho_mb in [0.0, 0.5, 1.0] {
            let q = SystemParams { rho_mb, ..p };
            prop_assert!((ex_quadrature(&q, pj).unwrap().value - base).abs() < 1e-12);
            prop_assert!((ex_closed(&q, pj).unwrap().value - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_quadrature(p in params(), pj_db in -10.0..30.0f64) {
        let pj = db_to_linear(pj_db);
        let c = ex_closed(&p, pj).unwrap();
        let q = ex_quadrature(&p, pj).unwrap();
        prop_assert!((c.value - q.value).abs() <= 1e-6, "{} vs {}", c.value, q.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn non_outage_grows_with_suspicious_uncertainty(p in params(), pj in 0.0..100.0f64) {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=20 {
            let q = SystemParams { rho_ab: i as f64 / 20.0, ..p };
            let v = ex_quadrature(&q, pj).unwrap().value;
            prop_assert!(v >= prev - 1e-9);
            prev = v;
        }
    }

    #[test]
    fn averaged_dep_falls_with_power(p in params()) {
        let mut prev = 1.0;
        for i in 0..20 {
            let pj = 10f64.powf(-2.0 + 5.0 * i as f64 / 19.0);
            let xi = avg_min_dep(&p, pj).unwrap();
            prop_assert!(xi < prev, "pj = {pj}: {xi} !< {prev}");
            prev = xi;
        }
        prop_assert!(avg_min_dep(&p, 1e-9).unwrap() > 1.0 - 1e-3);
    }

    #[test]
    fn averaged_dep_grows_with_suspicious_uncertainty(p in params(), pj_db in -10.0..30.0f64) {
        let pj = db_to_linear(pj_db);
        let mut prev = 0.0;
        for i in 1..=20 {
            let q = SystemParams { rho_ab: i as f64 / 20.0, ..p };
            let xi = avg_min_dep(&q, pj).unwrap();
            prop_assert!(xi > prev);
            prev = xi;
        }
    }

    #[test]
    fn reduced_form_agrees_where_defined(p in params(), pj_db in -10.0..30.0f64) {
        let pj = db_to_linear(pj_db);
        match avg_min_dep_closed(&p, pj) {
            Ok(c) => prop_assert!((c - avg_min_dep(&p, pj).unwrap()).abs() < 1e-4),
            Err(Error::ClosedFormDomain(_)) => prop_assert!(p.lambda_m(pj) >= p.lambda_a()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn budget_is_feasible(p in params()) {
        let b = covert_power(&p).unwrap();
        prop_assert!(b.p_j_allowed_max >= 0.0 && b.p_j_allowed_max <= p.p_j_max);
        match b.p_j_covert {
            PowerBound::Finite(pc) => {
                prop_assert!(avg_min_dep(&p, pc).unwrap() >= 1.0 - p.delta);
                prop_assert!(pc <= p.p_j_max);
            }
            PowerBound::Unconstrained => {
                prop_assert!(avg_min_dep(&p, p.p_j_max).unwrap() >= 1.0 - p.delta);
            }
        }
    }

    #[test]
    fn search_is_feasible_and_dominant(p in params()) {
        let r = algorithm1(&p, None, ExEvaluator::ClosedForm).unwrap();
        prop_assert!(r.p_j_star >= 0.0 && r.p_j_star <= r.budget.p_j_allowed_max);
        let passive = ex_closed(&p, 0.0).unwrap().value;
        let constant = ex_closed(&p, r.budget.p_j_allowed_max).unwrap().value;
        prop_assert!(r.ex_star >= passive.max(constant));
    }

    #[test]
    fn realization_power_is_feasible(p in params(), seed in 0u64..1000) {
        use rand::SeedableRng;
        let b = covert_power(&p).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let d = ChannelDraw::sample(&p, &mut rng);
            let pj = pj_star_realization(&p, &d, &b).unwrap();
            prop_assert!(pj >= 0.0 && pj <= b.p_j_allowed_max);
        }
    }
}
