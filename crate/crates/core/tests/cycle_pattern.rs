use orientcycle::pattern::{chop_cycle, find_long_runs, neutral_pair_count, spread_neutral_pairs, split_a_b};
use orientcycle::{Orientation, OrientationPattern};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn closed(bits: &[bool]) -> OrientationPattern {
    OrientationPattern::closed(bits.iter().map(|&b| if b { Orientation::B } else { Orientation::F }).collect()).unwrap()
}

proptest! {
    #[test]
    fn reversal_swaps_sinks_and_sources(bits in prop::collection::vec(any::<bool>(), 3..80)) {
        let p = closed(&bits);
        prop_assert_eq!(neutral_pair_count(&p.reversed_word()), p.source_positions().len());
        // walking the cycle backwards keeps the sinks
        prop_assert_eq!(neutral_pair_count(&p.traversed_backwards()), neutral_pair_count(&p));
    }

    #[test]
    fn parse_round_trips(bits in prop::collection::vec(any::<bool>(), 3..80)) {
        let p = closed(&bits);
        let back: OrientationPattern = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn spread_pairs_keep_their_spacing(bits in prop::collection::vec(any::<bool>(), 3..200)) {
        let p = closed(&bits);
        let q = spread_neutral_pairs(&p).unwrap();
        let n = p.len();
        for (i, &a) in q.selected.iter().enumerate() {
            for &b in &q.selected[i + 1..] {
                let d = a.abs_diff(b);
                prop_assert!(d.min(n - d) >= 3);
            }
        }
        prop_assert!(4 * q.selected.len() >= q.positions.len());
    }

    #[test]
    fn long_runs_contain_no_turns(bits in prop::collection::vec(any::<bool>(), 3..120), len in 1usize..6) {
        let p = closed(&bits);
        for dir in [Orientation::F, Orientation::B] {
            for s in find_long_runs(&p, len, dir).unwrap() {
                prop_assert!((0..len).all(|i| p.letter_mod(s + i) == dir));
            }
        }
    }
}

#[test]
fn chopped_random_patterns_glue_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let p = OrientationPattern::random_closed(65536, &mut rng).unwrap();
        let plan = chop_cycle(&p, 0.1).unwrap();
        assert_eq!((plan.s, plan.r, plan.t), (256, 24, 230));
        let n_b = p.len() / 2;
        let split = split_a_b(&p, &plan, n_b).unwrap();
        assert_eq!(split.glue(), p.rotated(plan.v_star));
    }
}
