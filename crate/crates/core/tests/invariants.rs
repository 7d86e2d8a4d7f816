use std::sync::OnceLock;

use proptest::prelude::*;
use windmill::group::{GraphProduct, GroupWord};
use windmill::ladder::calibrate_constants;
use windmill::metrics::{DerivedMetrics, Space};
use windmill::models::graph_product::{GraphProductModel, GraphProductParams};
use windmill::models::oracle::membership_oracle;
use windmill::models::tree::{gen_tree_segments, TreeParams};
use windmill::properties::{check_exact_equality, check_properties};
use windmill::rational;

fn raag() -> GraphProduct {
    GraphProduct::new(3, &[(1, 2)]).unwrap()
}

fn model() -> &'static GraphProductModel {
    static MODEL: OnceLock<GraphProductModel> = OnceLock::new();
    MODEL.get_or_init(|| GraphProductModel::new(GraphProductParams::free_product(2)).unwrap())
}

fn raw_word(m: usize, len: usize) -> impl Strategy<Value = Vec<(usize, i64)>> {
    prop::collection::vec((1..=m, prop_oneof![-3i64..=-1, 1i64..=3]), 0..len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(a in raw_word(3, 6), b in raw_word(3, 6), c in raw_word(3, 6)) {
        let g = raag();
        let (a, b, c) = (g.normal_form(&a), g.normal_form(&b), g.normal_form(&c));
        prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
    }

    #[test]
    fn inverses_cancel(a in raw_word(3, 8)) {
        let g = raag();
        let a = g.normal_form(&a);
        prop_assert!(g.mul(&a, &g.inv(&a)).is_empty());
        prop_assert!(g.mul(&g.inv(&a), &a).is_empty());
        prop_assert_eq!(g.normal_form(a.syllables()), a);
    }

    #[test]
    fn commuting_letters_reorder(a in 1i64..5, b in 1i64..5) {
        let g = raag();
        let x = g.normal_form(&[(1, a), (2, b)]);
        let y = g.normal_form(&[(2, b), (1, a)]);
        prop_assert_eq!(&x, &y);
        prop_assert!(!g.commutes(&GroupWord::letter(1, a), &GroupWord::letter(3, b)));
    }

    #[test]
    fn render_and_parse_round_trip(a in raw_word(3, 6)) {
        let g = raag();
        let w = g.normal_form(&a);
        prop_assert_eq!(GroupWord::parse(&w.render(7), 7).unwrap(), w);
    }

    #[test]
    fn rationals_round_trip(n in -10_000i64..10_000, d in 1i64..500) {
        let r = rational::Rational::new(n.into(), d.into());
        prop_assert_eq!(rational::parse(&rational::render(&r)).unwrap(), r);
    }

    #[test]
    fn action_is_a_left_action(a in raw_word(2, 4), b in raw_word(2, 4), i in 1usize..=2) {
        let m = model();
        let grp = m.group();
        let (a, b) = (grp.normal_form(&a), grp.normal_form(&b));
        let x = m.base(i);
        prop_assert_eq!(m.act(&a, &m.act(&b, &x)), m.act(&grp.mul(&a, &b), &x));
        prop_assert_eq!(m.act(&GroupWord::identity(), &x), x);
    }

    #[test]
    fn distances_are_equivariant(g in raw_word(2, 3), y in 0usize..20, x in 0usize..20, z in 0usize..20) {
        let m = model();
        let n = m.system().len();
        let (y, x, z) = (m.coset(y % n).clone(), m.coset(x % n).clone(), m.coset(z % n).clone());
        let g = m.group().normal_form(&g);
        let before = m.dist(&y, &x, &z);
        let after = m.dist(&m.act(&g, &y), &m.act(&g, &x), &m.act(&g, &z));
        prop_assert_eq!(before, after);
    }

    #[test]
    fn rotations_lie_in_the_kernel(i in 1usize..=2, k in -3i64..=3, c in raw_word(2, 4)) {
        let m = model();
        let grp = m.group();
        let y = m.act(&grp.normal_form(&c), &m.base(i));
        let r = m.rotation_power(&y, k);
        let v = membership_oracle(grp, m.q(), r.syllables());
        prop_assert!(v.in_kernel);
        prop_assert_eq!(v.trivial_in_group, k == 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tree_systems_satisfy_every_property(seed in any::<u64>(), vertices in 6usize..60, segments in 3usize..16, colors in 1usize..=3) {
        let params = TreeParams { vertices, segments, colors, overlap: 0 };
        let sys = gen_tree_segments(&params, seed).unwrap().system().unwrap();
        let metrics = DerivedMetrics::exact(&sys);
        let sp = Space::new(&sys, &metrics);
        let ladder = calibrate_constants(&sp).unwrap();
        let report = check_properties(&sp, &ladder);
        prop_assert!(report.passes(), "{:?}", report);
        prop_assert!(check_exact_equality(&sp).passes());
    }

    #[test]
    fn overlapping_segments_calibrate(seed in any::<u64>(), vertices in 6usize..40, segments in 3usize..14) {
        let params = TreeParams { vertices, segments, colors: 2, overlap: 1 };
        let sys = gen_tree_segments(&params, seed).unwrap().system().unwrap();
        let metrics = DerivedMetrics::exact(&sys);
        let sp = Space::new(&sys, &metrics);
        let ladder = calibrate_constants(&sp).unwrap();
        prop_assert!(check_properties(&sp, &ladder).passes());
    }
}
