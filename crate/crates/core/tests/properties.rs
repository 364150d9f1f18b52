use polymap::bifurcation::*;
use polymap::family::expr::{BinOp, Func};
use polymap::family::*;
use polymap::stability::*;
use polymap::*;
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = ParamExpr> {
    prop_oneof![
        (0.0f64..100.0).prop_map(ParamExpr::Num),
        Just(ParamExpr::Lambda),
        Just(ParamExpr::Pi),
        Just(ParamExpr::E),
    ]
}

fn expr() -> impl Strategy<Value = ParamExpr> {
    let ops = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div), Just(BinOp::Pow)];
    let funcs = prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Exp), Just(Func::Sqrt), Just(Func::Abs)];
    leaf().prop_recursive(4, 24, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| ParamExpr::Neg(Box::new(a))),
            (ops.clone(), inner.clone(), inner.clone()).prop_map(|(op, a, b)| ParamExpr::Bin(op, Box::new(a), Box::new(b))),
            (funcs.clone(), inner).prop_map(|(f, a)| ParamExpr::Call(f, Box::new(a))),
        ]
    })
}

fn distinct_roots(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-3.0f64..3.0, n).prop_filter("well separated", |r| {
        r.iter().enumerate().all(|(i, a)| r[i + 1..].iter().all(|b| (a - b).abs() > 1e-3))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printed_expressions_parse_back(e in expr()) {
        let text = e.to_string();
        let back = parse_param_expr(&text).unwrap();
        for i in 0..100 {
            let l = -2.0 + 4.0 * i as f64 / 99.0;
            match (e.eval(l), back.eval(l)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a.to_bits(), b.to_bits(), "{} at {}", text, l),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "{text} at {l}: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn multiplier_is_one_plus_pdf(
        n in 2usize..=6,
        xs in proptest::collection::vec(-3.0f64..3.0, 5),
        plus in any::<bool>(),
    ) {
        let s = if plus { Sign::Plus } else { Sign::Minus };
        let c = CanonicalMap::new(s, xs[..n - 1].to_vec()).unwrap();
        for k in 0..n {
            let x = c.fixed_point(k).unwrap();
            let pdf = c.pdf(k).unwrap();
            // derivative of the expanded polynomial is an independent route
            let direct = c.polynomial().derivative(1).eval(x);
            prop_assert!((direct - (1.0 + pdf)).abs() <= 1e-9 * (1.0 + pdf.abs()));
            prop_assert!((c.multiplier_fixed(k).unwrap() - (1.0 + pdf)).abs() <= 1e-12 * (1.0 + pdf.abs()));
        }
    }

    #[test]
    fn conjugacy_commutes(roots in (2usize..=5).prop_flat_map(distinct_roots), amp in 0.2f64..3.0, neg in any::<bool>()) {
        let lead = if neg { -amp } else { amp };
        let g = GeneralMap::from_fixed_points_polynomial(&Polynomial::from_roots(lead, &roots)).unwrap();
        let lff = to_linear_factors(&g, RootOptions::default()).unwrap();
        for anchor in 0..roots.len() {
            let (c, t) = to_canonical(&lff, anchor).unwrap();
            prop_assert!(verify_conjugacy(&lff, &c, &t, 64).max_error <= 1e-8);
        }
    }

    /// Multipliers of the original map survive conjugation whatever its amplitude.
    #[test]
    fn amplitude_does_not_change_multipliers(roots in (2usize..=4).prop_flat_map(distinct_roots), amp in 0.1f64..10.0) {
        let q = Polynomial::from_roots(amp, &roots);
        let g = GeneralMap::from_fixed_points_polynomial(&q).unwrap();
        let lff = to_linear_factors(&g, RootOptions::default()).unwrap();
        let (c, t) = to_canonical(&lff, 0).unwrap();
        let f = g.polynomial().derivative(1);
        for y in &lff.fixed_points {
            let x = t.invert(*y);
            let k = c.fixed_points().iter().position(|p| (p - x).abs() < 1e-7 * (1.0 + x.abs())).unwrap();
            let want = f.eval(*y);
            prop_assert!((c.multiplier_fixed(k).unwrap() - want).abs() <= 1e-7 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn cqm_two_cycle_closes(x1 in prop_oneof![2.0f64..6.0, -6.0f64..-2.0]) {
        let cyc = cqm_two_cycle(x1).unwrap();
        let c = CanonicalMap::quadratic(x1);
        let [p, q] = cyc.points;
        prop_assert!((c.eval(p) - q).abs() <= 1e-9 * (1.0 + q.abs()));
        prop_assert!((c.eval(q) - p).abs() <= 1e-9 * (1.0 + p.abs()));
        prop_assert!((cyc.multiplier - (5.0 - x1 * x1)).abs() <= 1e-9 * (1.0 + x1 * x1));
        let m = cycle_multiplier(&c, &cyc.points, 1e-9).unwrap();
        prop_assert!((m - cyc.multiplier).abs() <= 1e-9 * (1.0 + m.abs()));
    }

    #[test]
    fn bmap_matches_direct_construction(b in -5.0f64..5.0) {
        prop_assume!((b + 1.0).abs() > 1e-6);
        let fam = preset("bmap", Some(&format!("{b:?}"))).unwrap();
        let c = fam.at(0.0).unwrap();
        // f(y) = y^2 - b y has fixed points 0 and b + 1; with the anchor at 0
        // the canonical partner is -(b + 1) with s = -1
        let direct = CanonicalMap::new(Sign::Minus, vec![-(b + 1.0)]).unwrap();
        prop_assert!((c.fixed_point(1).unwrap() - direct.fixed_point(1).unwrap()).abs() <= 1e-9);
        prop_assert_eq!(c.sign(), Sign::Minus);
        // f'(0) = -b
        prop_assert!((c.multiplier_fixed(0).unwrap() + b).abs() <= 1e-9);
        let lff = general_at(&fam, 0.0).unwrap().unwrap();
        let (c2, t) = to_canonical(&lff, lff.anchor).unwrap();
        for i in 0..20 {
            let x = -2.0 + 0.2 * i as f64;
            let tx = t.apply(x);
            let lhs = tx * tx - b * tx;
            let rhs = t.apply(c2.eval(x));
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
        }
    }

    /// Attracting cycles found from any seeds never exceed the bound on maps
    /// whose Schwarzian is negative.
    #[test]
    fn census_respects_singer_bound(
        n in 2usize..=4,
        xs in proptest::collection::vec(-3.0f64..3.0, 3),
        extra in proptest::collection::vec(-4.0f64..4.0, 6),
    ) {
        let c = CanonicalMap::new(Sign::Plus, xs[..n - 1].to_vec()).unwrap();
        if let Some(bound) = singer_bound(&c) {
            let mut seeds = seeds_for(&c, &SeedPolicy::Default);
            seeds.extend(extra);
            let census = attractor_census(&c, &seeds, &OrbitParams::default());
            prop_assert!(census.cycles.len() <= bound, "{} cycles, bound {}", census.cycles.len(), bound);
        }
    }
}

#[test]
fn sweeps_do_not_depend_on_thread_count() {
    let fam = preset("logistic", None).unwrap();
    let grid = linspace(2.9, 3.6, 60);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| sweep(&fam, &grid, &SeedPolicy::Default, &OrbitParams::default()).unwrap())
    };
    let one = run(1);
    let many = run(4);
    assert_eq!(one.to_csv(), many.to_csv());
    assert_eq!(one.sidecar_json(), many.sidecar_json());
}

#[test]
fn sarkovskii_is_a_strict_total_order() {
    let n = 64u64;
    for k in 1..=n {
        assert!(!sarkovskii_precedes(k, k));
        for l in 1..=n {
            if k != l {
                assert_ne!(sarkovskii_precedes(k, l), sarkovskii_precedes(l, k), "{k} {l}");
            }
            for m in 1..=n {
                if sarkovskii_precedes(k, l) && sarkovskii_precedes(l, m) {
                    assert!(sarkovskii_precedes(k, m), "{k} {l} {m}");
                }
            }
        }
    }
    // 3 first, 1 last
    assert!((4..=n).all(|l| sarkovskii_precedes(3, l)));
    assert!((2..=n).all(|k| sarkovskii_precedes(k, 1)));
}

#[test]
fn double_zero_quadratic_is_semistable() {
    let c = CanonicalMap::quadratic(0.0);
    assert_eq!(classify_fixed_point(&c, 0, 1e-8).unwrap().kind, StabilityKind::SemistableRight);
    // from the right the orbit creeps down like 1/n
    let r = iterate_orbit(&c, 0.5, 10_000, 8, 1e6);
    assert!(r.tail.iter().all(|&x| x > 0.0 && x < 2e-4));
    assert!(r.tail.windows(2).all(|w| w[1] < w[0]));
    let l = iterate_orbit(&c, -0.05, 1_000, 8, 1e6);
    assert_eq!(l.status, OrbitStatus::Divergent);
}

#[test]
fn family_spec_round_trips() {
    for name in ["logistic", "quartic_demo", "ccm_slice", "cqm_quadratic"] {
        let fam = preset(name, None).unwrap();
        let spec = FamilySpec::of(&fam).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back = FamilySpec::from_json(&json).unwrap().build().unwrap();
        for l in linspace(fam.domain.0, fam.domain.1, 17) {
            assert_eq!(fam.at(l).unwrap().fixed_points(), back.at(l).unwrap().fixed_points());
        }
    }
}
