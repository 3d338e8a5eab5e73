mod common;

use proptest::prelude::*;
use rsponge::search::{detect_subcongruent_exact, Disjointness};
use rsponge::DyadicComplex;

fn complexes() -> impl Strategy<Value = (u32, Vec<[i64; 3]>)> {
    (1u32..=2).prop_flat_map(|l| {
        let side = 1i64 << l;
        (Just(l), prop::collection::vec(prop::array::uniform3(0..side), 1..=12))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn detector_matches_brute_force((level, cells) in complexes(), s in 0u32..=2, r in 0u32..=2, closed: bool) {
        let s = s.min(level);
        let r = r.min(level);
        let m = DyadicComplex::from_coords(level, cells).unwrap();
        let d = if closed { Disjointness::Closed } else { Disjointness::InteriorsOnly };
        let got = detect_subcongruent_exact(&m, s, r, d).unwrap();
        let want = common::first_witness(level, m.coords(), s, r, closed);
        match (got, want) {
            (None, None) => {}
            (Some(w), Some((a, g, t))) => {
                prop_assert!(w.verify(&m).all());
                prop_assert_eq!(w.a.coords(), a);
                prop_assert_eq!(w.motion.perm.index(), g);
                prop_assert_eq!(w.motion.translation_numerators(r), Some(t));
            }
            (got, want) => prop_assert!(false, "detector {:?}, oracle {:?}", got, want),
        }
    }
}
