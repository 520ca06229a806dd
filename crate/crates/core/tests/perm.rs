use papseries::perm::{count_avoiders, count_avoiders_naive, symmetry, PatternSet, Permutation, SymmetryOp};
use proptest::prelude::*;

fn perm_strategy(lo: usize, hi: usize) -> impl Strategy<Value = Permutation> {
    (lo..=hi)
        .prop_flat_map(|k| Just((1..=k as u8).collect::<Vec<u8>>()).prop_shuffle())
        .prop_map(|w| Permutation::new(w).unwrap())
}

fn op_strategy() -> impl Strategy<Value = SymmetryOp> {
    prop_oneof![Just(SymmetryOp::Reverse), Just(SymmetryOp::Complement), Just(SymmetryOp::Inverse)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn symmetric_patterns_are_equinumerous(p in perm_strategy(2, 5), op in op_strategy()) {
        let q = symmetry(&p, op);
        let a = count_avoiders(&PatternSet::single(p), 8);
        let b = count_avoiders(&PatternSet::single(q), 8);
        prop_assert_eq!(a.counts, b.counts);
    }

    #[test]
    fn search_matches_brute_force(mut ps in prop::collection::vec(perm_strategy(2, 4), 1..=3)) {
        ps.sort_by_key(|p| p.to_string());
        ps.dedup();
        let set = PatternSet::new(ps).unwrap();
        prop_assert_eq!(count_avoiders(&set, 7).counts, count_avoiders_naive(&set, 7).counts);
    }

    #[test]
    fn symmetry_ops_are_involutions(p in perm_strategy(1, 7), op in op_strategy()) {
        prop_assert_eq!(symmetry(&symmetry(&p, op), op), p);
    }
}

#[test]
fn printed_counts() {
    let single = |w: &str| PatternSet::single(w.parse().unwrap());
    assert_eq!(count_avoiders(&single("25314"), 7).counts[7], 4578);
    assert_eq!(count_avoiders(&single("123"), 5).counts[5], 42);
    assert_eq!(count_avoiders(&single("54321"), 4).counts[4], 24);
}
