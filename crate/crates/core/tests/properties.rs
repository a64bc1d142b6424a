//! Invariants over random quasi-symmetric tori and random CY models.

use proptest::prelude::*;
use rand::SeedableRng;
use wallcross::arrangement::Arrangement;
use wallcross::cy::CYModel;
use wallcross::mutation::check_periodicity;
use wallcross::verify::{bwb_failures, pairs, random_torus_rep};
use wallcross::windows::{check_crossing, wall_crossing, window};

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn crossings_on_random_tori(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let rep = random_torus_rep(&mut rng, 10);
        let arr = Arrangement::build(&rep).unwrap();
        let ps = pairs(&arr, 1);
        prop_assume!(!ps.is_empty());
        let (a, b) = &ps[pick.index(ps.len())];

        let c = check_crossing(&rep, &arr, a, b).unwrap();
        prop_assert!(c.ok(), "{:?}", c.failures);

        let x = wall_crossing(&rep, &arr, a, b).unwrap();
        let wa = window(&rep, &arr, a).unwrap();
        let wb = window(&rep, &arr, b).unwrap();
        prop_assert_eq!(wa.chars.len(), wb.chars.len());
        let lost: usize = x.faces.iter().map(|f| f.chars.len()).sum();
        prop_assert_eq!(x.common.len() + lost, wa.chars.len());

        let p = check_periodicity(&rep, &arr, a, b).unwrap();
        prop_assert!(p.ok(), "{:?}", p);

        let f = bwb_failures(&rep, &arr, a, b).unwrap();
        prop_assert!(f.is_empty(), "{:?}", f);
    }

    #[test]
    fn cy_reports_hold(ones in 0usize..4, twos in 0usize..3, split in any::<bool>(), m in -2i64..=2) {
        let mut a = vec![1; ones + 2];
        a.extend(vec![2; twos]);
        let total: i64 = a.iter().sum();
        let d = if split && total % 2 == 0 { vec![total / 2, total / 2] } else { vec![total] };
        prop_assume!(a.len() > d.len());
        let model = CYModel::build(&a, &d).unwrap();
        let r = model.report(m).unwrap();
        prop_assert!(r.ok(), "{}", r.to_json());
    }
}
