use gerbekit::cli::ModelId;
use gerbekit::cover::CoverModel;
use gerbekit::deligne::{DeligneComplex, Parts};
use gerbekit::models::hopf::HopfModel;
use gerbekit::models::loops::{loop_cocycle_c, LoopAlgebraElement};
use gerbekit::reduction::analytic::{compare_lambda_choices, integrality, Integrality};
use gerbekit::simplicial::{hexagon_arc_cover, sphere_boundary_of_simplex, GroupTable};
use gerbekit::smith::integer_cohomology;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hexagon(rotate: bool) -> CoverModel {
    let (k, sets) = hexagon_arc_cover();
    let gens = if rotate { vec![(0..6).map(|i| (i + 2) % 6).collect()] } else { vec![] };
    CoverModel::new(k, GroupTable::generated_by(6, &gens).unwrap(), sets).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn total_differential_squares_to_zero(seed in any::<u64>(), degree in 0usize..4, rotate in any::<bool>()) {
        let m = hexagon(rotate);
        let cx = DeligneComplex::new(&m, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = cx.random(degree, &mut rng);
        for parts in [Parts::ALL, Parts::GROUP, Parts::CECH, Parts::FORM] {
            let dd = cx.d_parts(&cx.d_parts(&c, parts).unwrap(), parts).unwrap();
            prop_assert!(cx.support(&dd).is_empty());
        }
    }

    #[test]
    fn d_is_linear(seed in any::<u64>(), degree in 0usize..3) {
        let m = hexagon(true);
        let cx = DeligneComplex::new(&m, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (cx.random(degree, &mut rng), cx.random(degree, &mut rng));
        let lhs = cx.d(&cx.add(&a, &b)).unwrap();
        let rhs = cx.add(&cx.d(&a).unwrap(), &cx.d(&b).unwrap());
        prop_assert!(cx.equal(&lhs, &rhs));
    }

    #[test]
    fn loop_cocycle_is_antisymmetric_and_closed(seed in any::<u64>(), level in -3i64..4, big_m in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<LoopAlgebraElement> = (0..3).map(|_| LoopAlgebraElement::random(level, big_m, &mut rng)).collect();
        let c = |a: &LoopAlgebraElement, b: &LoopAlgebraElement| loop_cocycle_c(a, b).unwrap();
        let scale = 1.0 + x.iter().map(|e| e.coordinates().iter().map(|v| v * v).sum::<f64>()).sum::<f64>();
        prop_assert!((c(&x[0], &x[1]) + c(&x[1], &x[0])).abs() < 1e-12 * scale);
        let cyc = c(&x[0].bracket(&x[1]), &x[2]) + c(&x[1].bracket(&x[2]), &x[0]) + c(&x[2].bracket(&x[0]), &x[1]);
        prop_assert!(cyc.abs() < 1e-11 * scale * scale);
    }

    #[test]
    fn loop_coordinates_round_trip(seed in any::<u64>(), big_m in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = LoopAlgebraElement::random(1, big_m, &mut rng);
        let y = LoopAlgebraElement::from_coordinates(1, &x.coordinates());
        prop_assert!(x.reality_residual() < 1e-12);
        for t in [0.0, 0.3, 1.7, 4.0] {
            prop_assert!((x.value_at(t) - y.value_at(t)).norm() < 1e-12);
        }
    }

    #[test]
    fn integrality_thresholds(n in -50i64..50, eps in -9e-4f64..9e-4, far in 0.011f64..0.989) {
        prop_assert_eq!(integrality(n as f64 + eps).0, Integrality::Integral);
        prop_assert_eq!(integrality(n as f64 + far).0, Integrality::NonIntegral);
        let (_, d) = integrality(n as f64 + 0.005);
        prop_assert!((d - 0.005).abs() < 1e-9);
    }

    #[test]
    fn model_ids_round_trip(n in 2usize..40, k in -20i64..20, m in 0usize..10) {
        for id in [ModelId::Hopf, ModelId::Lens(n), ModelId::Su2(k), ModelId::Loop { truncation: m, level: k }] {
            prop_assert_eq!(ModelId::parse(&id.to_string()).unwrap(), id);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn sphere_cohomology(d in 2usize..6) {
        let s = sphere_boundary_of_simplex(d);
        for k in 0..d {
            let h = integer_cohomology(&s, k).to_string();
            let expect = if k == 0 || k == d - 1 { "Z" } else { "0" };
            prop_assert_eq!(h, expect);
        }
    }

    #[test]
    fn lambda_shift_by_integer_is_stably_isomorphic(r in -3.0f64..3.0, n in -3i64..4, off in 0.05f64..0.95) {
        let model = HopfModel::new(3);
        let (samples, _) = model.samples(6, 11);
        let eg = model.trivial_gerbe();
        let cmp = |r2: f64| {
            compare_lambda_choices(&eg, &HopfModel::lambda(r), &HopfModel::lambda(r2), &model.xi, &model.charts, &samples)
                .unwrap()
                .stably_isomorphic()
        };
        prop_assert_eq!(cmp(r + n as f64), Some(true));
        prop_assert_eq!(cmp(r + n as f64 + off), Some(false));
    }
}
