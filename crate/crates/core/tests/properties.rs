use gwa_core::coeff::{parse_rational, Coeff};
use gwa_core::partition::{for_each_partition, partitions_of};
use gwa_core::rng::Stream;
use gwa_core::samplers::{sample_gw, DegreeSampler};
use gwa_core::scaling::size_biased_reorder;
use gwa_core::transforms::{check_tree, color_lifelines, hat, HittingRule};
use gwa_core::{DegreeSet, DfsQueue, OffspringDist, OrderedTree, Rational};
use proptest::prelude::*;

/// A GW tree under geometric(1/2) with at most 80 vertices.
fn random_tree(seed: u64) -> Option<OrderedTree> {
    let sampler = DegreeSampler::new(&OffspringDist::<f64>::geometric(0.5)).unwrap();
    sample_gw(&sampler, &mut Stream::new(seed), 80).ok()
}

fn degree_set() -> impl Strategy<Value = DegreeSet> {
    prop_oneof![
        proptest::collection::btree_set(1usize..6, 0..4)
            .prop_map(|s| DegreeSet::finite(std::iter::once(0).chain(s))),
        (0usize..4, 1usize..6).prop_map(|(k, from)| DegreeSet::with_tail(
            std::iter::once(0).chain(std::iter::once(k)),
            from
        )),
        Just(DegreeSet::all()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn queue_encoding_is_a_bijection(seed in any::<u64>()) {
        let Some(t) = random_tree(seed) else { return Ok(()) };
        let q = t.encode();
        prop_assert_eq!(q.len(), t.len());
        prop_assert_eq!(q.decode(), t.clone());
        let text = q.to_string();
        prop_assert_eq!(text.parse::<DfsQueue>().unwrap(), q);
        let parens = t.to_string();
        prop_assert_eq!(parens.parse::<OrderedTree>().unwrap(), t);
    }

    #[test]
    fn canonical_key_is_a_shape_invariant(seed in any::<u64>()) {
        let Some(t) = random_tree(seed) else { return Ok(()) };
        let key = t.canonical_key();
        let rebuilt = key.to_tree();
        prop_assert_eq!(rebuilt.len(), t.len());
        prop_assert_eq!(key.vertex_count(), t.len());
        prop_assert_eq!(rebuilt.canonical_key(), key);
    }

    #[test]
    fn star_augment_turns_a_counts_into_leaf_counts(seed in any::<u64>(), set in degree_set()) {
        let Some(t) = random_tree(seed) else { return Ok(()) };
        let n = t.count_in(&set).unwrap();
        let aug = t.star_augment(&set).unwrap();
        prop_assert_eq!(aug.leaves().len(), n);
        prop_assert_eq!(aug.count_in(&DegreeSet::leaves()).unwrap(), n);
    }

    #[test]
    fn root_partition_sums_to_count_below_root(seed in any::<u64>(), set in degree_set()) {
        let Some(t) = random_tree(seed) else { return Ok(()) };
        let lambda = t.root_partition(&set).unwrap();
        let own = usize::from(set.contains(t.degree(t.root())));
        prop_assert_eq!(lambda.total() + own, t.count_in(&set).unwrap());
        prop_assert_eq!(lambda.len(), t.degree(t.root()));
    }

    #[test]
    fn hat_maps_a_counted_queues_to_excursions_of_that_length(seed in any::<u64>(), set in degree_set()) {
        let Some(t) = random_tree(seed) else { return Ok(()) };
        let q = t.encode();
        let n = q.count_hits(&set);
        let h = hat(&q, HittingRule::new(&set).unwrap()).unwrap();
        prop_assert_eq!(h.len(), n);
    }

    #[test]
    fn check_tree_lives_on_the_leaves(seed in any::<u64>()) {
        let Some(t) = random_tree(seed) else { return Ok(()) };
        let coloring = color_lifelines(&t);
        prop_assert!(coloring.verify(&t).is_ok());
        prop_assert_eq!(coloring.leaf_count(), t.leaves().len());
        prop_assert_eq!(check_tree(&t).unwrap().len(), t.leaves().len());
    }

    #[test]
    fn restricted_partitions_have_the_requested_shape(total in 0usize..18, count in 0usize..8, modulus in 1usize..4) {
        let mut seen = 0;
        for_each_partition(total, count, |x| x % modulus == 0 || modulus == 1, |p| {
            assert_eq!(p.total(), total);
            assert_eq!(p.len(), count);
            assert!(p.parts().windows(2).all(|w| w[0] >= w[1]));
            assert!(p.parts().iter().all(|x| modulus == 1 || x % modulus == 0));
            seen += 1;
        });
        if modulus == 1 && count == 1 && total > 0 {
            prop_assert_eq!(seen, 1);
        }
    }

    #[test]
    fn arrangements_over_all_partitions_count_compositions(total in 1usize..12) {
        // sum over partitions of the multinomial arrangements is 2^(total - 1)
        let sum: Rational = Rational::sum_iter(partitions_of(total).iter().map(|p| p.arrangements::<Rational>()));
        prop_assert_eq!(sum, Rational::from_usize(1usize << (total - 1)));
    }

    #[test]
    fn size_biased_reorder_is_a_permutation(raw in proptest::collection::vec(0u32..10, 1..8), seed in any::<u64>()) {
        prop_assume!(raw.iter().any(|&x| x > 0));
        let total: u32 = raw.iter().sum();
        let mut s: Vec<f64> = raw.iter().map(|&x| x as f64 / total as f64).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        let mut out = size_biased_reorder(&s, &mut Stream::new(seed)).unwrap();
        let zeros = out.iter().rev().take_while(|&&x| x == 0.0).count();
        prop_assert_eq!(zeros, s.iter().filter(|&&x| x == 0.0).count());
        out.sort_by(|a, b| b.total_cmp(a));
        prop_assert_eq!(out, s);
    }

    #[test]
    fn degree_sets_round_trip_through_text(set in degree_set()) {
        let text = set.to_string();
        prop_assert_eq!(text.parse::<DegreeSet>().unwrap(), set);
    }

    #[test]
    fn rationals_round_trip_through_text(p in -1000i64..1000, q in 1i64..1000) {
        let r = gwa_core::coeff::ratio(p, q);
        prop_assert_eq!(parse_rational(&r.render()).unwrap(), r);
    }

    #[test]
    fn split_streams_ignore_parent_consumption(seed in any::<u64>(), skip in 0usize..50, index in 0u64..100) {
        let fresh = Stream::new(seed);
        let mut used = Stream::new(seed);
        for _ in 0..skip {
            used.uniform();
        }
        prop_assert_eq!(fresh.split(index).uniform(), used.split(index).uniform());
    }
}
