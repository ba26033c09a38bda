mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dsttr::ttr::{meet_all, parse_rt, print_rt, AtomicFeature, RecordType};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn subtyping_is_reflexive(seed in any::<u64>()) {
        let r = common::random_rt(&mut rng(seed), 8);
        prop_assert!(r.is_subtype_of(&r));
        prop_assert!(r.is_equivalent(&r));
    }

    #[test]
    fn weakening_gives_a_supertype(seed in any::<u64>()) {
        let mut g = rng(seed);
        let r = common::random_rt(&mut g, 8);
        let w = common::weaken(&mut g, &r);
        prop_assert!(w.is_wellformed(), "{}", w);
        prop_assert!(r.is_subtype_of(&w), "{} !<= {}", r, w);
        prop_assert!(RecordType::empty().subsumes(&r));
    }

    #[test]
    fn subtyping_is_transitive(seed in any::<u64>()) {
        let mut g = rng(seed);
        let a = common::random_rt(&mut g, 8);
        let b = common::weaken(&mut g, &a);
        let c = common::weaken(&mut g, &b);
        prop_assert!(a.is_subtype_of(&b) && b.is_subtype_of(&c));
        prop_assert!(a.is_subtype_of(&c));
        let d = common::random_rt(&mut g, 8);
        if a.is_subtype_of(&d) && d.is_subtype_of(&c) {
            prop_assert!(a.is_subtype_of(&c));
        }
    }

    #[test]
    fn meet_is_a_lower_bound(seed in any::<u64>()) {
        let mut g = rng(seed);
        let a = common::random_rt(&mut g, 8);
        let b = common::weaken(&mut g, &a);
        let c = common::weaken(&mut g, &a);
        let m = b.meet(&c).unwrap();
        prop_assert!(m.is_wellformed(), "{}", m);
        prop_assert!(m.is_subtype_of(&b) && m.is_subtype_of(&c));
        prop_assert!(a.is_subtype_of(&m));
        let other = common::random_rt(&mut g, 8);
        if let Ok(m) = a.meet(&other) {
            prop_assert!(m.is_subtype_of(&a) && m.is_subtype_of(&other));
        }
    }

    #[test]
    fn meet_with_supertype_is_identity(seed in any::<u64>()) {
        let mut g = rng(seed);
        let a = common::random_rt(&mut g, 8);
        let b = common::weaken(&mut g, &a);
        prop_assert!(a.meet(&b).unwrap().is_equivalent(&a));
        prop_assert!(b.meet(&a).unwrap().is_equivalent(&a));
    }

    #[test]
    fn subtraction_and_meet_restore_the_goal(seed in any::<u64>()) {
        let mut g = rng(seed);
        let goal = common::random_rt(&mut g, 8);
        let cur = common::weaken(&mut g, &goal);
        let inc = goal.subtract(&cur);
        prop_assert!(inc.is_wellformed(), "{}", inc);
        prop_assert!(goal.is_subtype_of(&inc));
        let back = cur.meet(&inc).unwrap();
        prop_assert!(back.is_equivalent(&goal), "{} + {} = {} vs {}", cur, inc, back, goal);
        prop_assert!(goal.subtract(&goal).is_empty());
        prop_assert_eq!(goal.subtract(&RecordType::empty()), goal.clone());
    }

    #[test]
    fn decomposition_reconstructs(seed in any::<u64>()) {
        let r = common::random_rt(&mut rng(seed), 8);
        let atoms = r.decompose();
        prop_assert_eq!(atoms.len(), r.len());
        for a in &atoms {
            prop_assert!(r.is_subtype_of(a.record_type()));
            prop_assert_eq!(&AtomicFeature::parse(a.as_str()).unwrap(), a);
        }
        let rebuilt = meet_all(atoms.iter().map(AtomicFeature::record_type)).unwrap();
        prop_assert!(rebuilt.is_equivalent(&r), "{} vs {}", rebuilt, r);
    }

    #[test]
    fn canonical_atoms_are_stable(seed in any::<u64>()) {
        let r = common::random_rt(&mut rng(seed), 8);
        for a in r.decompose() {
            let c = a.canonical();
            prop_assert_eq!(c.canonical(), c.clone());
            prop_assert_eq!(c.record_type().len(), a.record_type().len());
        }
    }

    #[test]
    fn notation_round_trips(seed in any::<u64>()) {
        let r = common::random_rt(&mut rng(seed), 8);
        let text = print_rt(&r);
        prop_assert_eq!(parse_rt(&text).unwrap(), r.clone());
        prop_assert_eq!(r.to_string(), text);
    }
}
