mod common;

use std::collections::BTreeSet;

use common::*;
use consortia::analysis::{theoretical_bounds, verify_winner_properties, BoundFamily};
use consortia::generators::{family_instance, GraphFamily};
use consortia::partition::Labeling;
use consortia::{
    ccc_report, distance, evaluate, find_sow, goldrush_outcome, goldrush_report, is_connected, is_eligible,
    magnet_closure, magnet_report, Consortium, Instance, PriceOfAnarchy, Rational,
};
use proptest::prelude::*;

fn instance_strategy(max_n: usize, max_t: i64) -> impl Strategy<Value = Instance> {
    (2..=max_n, 2..=max_t)
        .prop_flat_map(|(n, t)| {
            let pairs = n * (n - 1) / 2;
            (Just(n), Just(t), prop::collection::vec(any::<bool>(), pairs), prop::collection::vec(0..t, n))
        })
        .prop_filter_map("instance must validate", |(n, t, mask, values)| {
            let edges = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .zip(mask)
                .filter(|&(_, keep)| keep)
                .map(|(e, _)| e);
            Instance::new(n, edges, values.into_iter().map(r).collect(), r(t), r(1)).ok()
        })
}

fn connected_instance_strategy(max_n: usize, max_t: i64) -> impl Strategy<Value = Instance> {
    instance_strategy(max_n, max_t).prop_filter("graph must be connected", |inst| connected(inst, &all_players(inst)))
}

fn clique_strategy(max_n: usize, max_t: i64) -> impl Strategy<Value = Instance> {
    (2..=max_n, 2..=max_t)
        .prop_flat_map(|(n, t)| (Just(t), prop::collection::vec(0..t, n)))
        .prop_filter_map("instance must validate", |(t, values)| {
            family_instance(GraphFamily::Complete, values.into_iter().map(r).collect(), r(t), r(1)).ok()
        })
}

/// No two distinct connected sets share an average.
fn generic(inst: &Instance) -> bool {
    let sets: Vec<Set> = common::connected_subsets(inst).into_iter().collect();
    let avgs: BTreeSet<Rational> = sets.iter().map(|s| avg(inst, s)).collect();
    avgs.len() == sets.len()
}

fn subset_strategy(n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(any::<bool>(), n)
        .prop_map(|bits| bits.into_iter().enumerate().filter(|&(_, b)| b).map(|(i, _)| i).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn no_singleton_is_eligible(inst in instance_strategy(8, 30)) {
        for i in 0..inst.n() {
            prop_assert!(!is_eligible(&inst, &Consortium::new([i]).unwrap()));
        }
    }

    #[test]
    fn average_times_size_is_sum(
        (inst, ids) in instance_strategy(8, 30).prop_flat_map(|i| { let n = i.n(); (Just(i), subset_strategy(n)) })
    ) {
        prop_assume!(!ids.is_empty());
        let forward = evaluate(&inst, &Consortium::new(ids.iter().copied()).unwrap());
        let backward = evaluate(&inst, &Consortium::new(ids.iter().rev().copied()).unwrap());
        prop_assert_eq!(forward, backward);
        prop_assert_eq!(forward.avg * Rational::from(ids.len()), forward.sum);
    }

    #[test]
    fn sow_matches_exhaustive_filter(inst in instance_strategy(6, 20)) {
        match find_sow(&inst) {
            Ok(s) => prop_assert_eq!(Some(to_set(&s.consortium)), sow(&inst)),
            Err(e) => {
                prop_assert_eq!(e.name(), "NoEligibleConsortium");
                prop_assert_eq!(sow(&inst), None);
            }
        }
    }

    #[test]
    fn clique_sow_size_is_prefix_count(inst in clique_strategy(7, 30)) {
        let mut sorted = inst.values().to_vec();
        sorted.sort_by(|a, b| b.cmp(a));
        let k = find_sow(&inst).unwrap().size;
        let prefix = |j: usize| sorted[..j].iter().copied().sum::<Rational>();
        prop_assert!(prefix(k - 1) < inst.threshold());
        prop_assert!(inst.threshold() <= prefix(k));
    }

    #[test]
    fn enlarging_a_set_never_increases_distance(
        (inst, a, b, u) in instance_strategy(8, 20).prop_flat_map(|i| {
            let n = i.n();
            (Just(i), subset_strategy(n), subset_strategy(n), 0..n)
        })
    ) {
        prop_assume!(!a.is_empty());
        let small = Consortium::new(a.iter().copied()).unwrap();
        let big = Consortium::new(a.iter().chain(&b).copied()).unwrap();
        let (ds, db) = (distance(&inst, u, &small), distance(&inst, u, &big));
        match (ds, db) {
            (Some(x), Some(y)) => prop_assert!(y <= x),
            (Some(_), None) => prop_assert!(false, "reachable set became unreachable"),
            _ => {}
        }
    }

    #[test]
    fn renaming_labels_keeps_goldrush_outcome(
        (inst, labels, shift) in instance_strategy(6, 20).prop_flat_map(|i| {
            let n = i.n();
            (Just(i), prop::collection::vec(0..n, n), 1..50usize)
        })
    ) {
        let renamed: Vec<usize> = labels.iter().map(|l| (l * 7 + shift) % 1000).collect();
        prop_assert_eq!(
            goldrush_outcome(&inst, &Labeling::new(labels)),
            goldrush_outcome(&inst, &Labeling::new(renamed))
        );
    }

    #[test]
    fn closure_only_grows_and_each_appeal_improves(inst in connected_instance_strategy(7, 20)) {
        for start in subsets_of(&all_players(&inst)).into_iter().filter(|s| eligible(&inst, s)) {
            let cl = magnet_closure(&inst, &Consortium::new(start.iter().copied()).unwrap()).unwrap();
            let rounds = &cl.trace.rounds;
            prop_assert!(rounds.last().unwrap().accepted_appeals.is_empty());
            prop_assert_eq!(&rounds.last().unwrap().winner_after, &cl.final_winner);
            for round in rounds {
                let before = to_set(&round.winner_before);
                let after = to_set(&round.winner_after);
                prop_assert!(before.iter().all(|i| after.contains(i)));
                let base = avg(&inst, &before);
                for x in &round.accepted_appeals {
                    let mut joined = before.clone();
                    joined.extend(x.members());
                    joined.sort();
                    prop_assert!(avg(&inst, &joined) > base);
                    prop_assert!(is_connected(&inst, &Consortium::new(joined).unwrap()));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ccc_clique_bound_and_winner_size(inst in clique_strategy(5, 24)) {
        if let Ok(rep) = ccc_report(&inst, 6) {
            let k = rep.sow.size;
            prop_assert!(rep.spoa <= theoretical_bounds(k, BoundFamily::CccClique).unwrap());
            prop_assert!(rep.se_winners.iter().all(|w| w.len() == k));
        }
    }

    #[test]
    fn magnet_clique_bound_and_winner_size(inst in clique_strategy(5, 24)) {
        if let Ok(rep) = magnet_report(&inst, 6) {
            let k = rep.report.sow.size;
            prop_assert!(rep.report.spoa <= theoretical_bounds(k, BoundFamily::Clique).unwrap());
            prop_assert!(rep.report.se_winners.iter().all(|w| w.len() == k));
        }
    }

    #[test]
    fn magnet_winners_satisfy_structure(inst in connected_instance_strategy(5, 20)) {
        if let Ok(rep) = magnet_report(&inst, 6) {
            prop_assert!(rep.report.spoa <= r(2));
            for z in &rep.report.se_winners {
                prop_assert!(verify_winner_properties(&inst, z).unwrap().all_hold(), "winner {}", z);
                prop_assert_eq!(&magnet_closure(&inst, z).unwrap().final_winner, z);
            }
        }
    }

    #[test]
    fn equilibria_exist_without_average_ties(inst in connected_instance_strategy(5, 200)) {
        prop_assume!(generic(&inst));
        prop_assert!(ccc_report(&inst, 6).is_ok());
        prop_assert!(magnet_report(&inst, 6).is_ok());
    }

    #[test]
    fn goldrush_poa_at_most_half_n_on_distinct_cliques(inst in clique_strategy(5, 24)) {
        let distinct: BTreeSet<Rational> = inst.values().iter().copied().collect();
        prop_assume!(distinct.len() == inst.n());
        if let PriceOfAnarchy::Bounded(p) = goldrush_report(&inst, 6).unwrap().poa {
            prop_assert!(p <= q(inst.n() as i64, 2));
        }
    }
}
