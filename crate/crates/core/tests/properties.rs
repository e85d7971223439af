//! Cross-strategy and data-structure invariants, on the named corpus and on
//! randomly generated instances.

mod common;

use backjump::conflict::{conflict_union, culprit, merge_explanation, VarSet};
use backjump::engine::{SolveMode, Strategy, TraceEvent};
use backjump::model::{
    consistent, CheckPlan, ConsistencyVerdict, Constraint, CspInstance, Domain, PartialSolution,
    Value, VarId,
};
use backjump::oracle::enumerate_all;
use backjump::problems::{parse_instance, serialize_instance};
use proptest::prelude::*;
// the engine's Strategy enum shadows the proptest trait of the same name;
// keep the trait's methods reachable
use proptest::strategy::Strategy as _;

use common::{
    check_backjump_trace_invariants, corpus, independently_satisfied, render_trace, run, run_traced,
};

#[test]
fn solutions_are_sound_on_the_corpus() {
    for (name, instance) in corpus() {
        for strategy in Strategy::ALL {
            let outcome = run(&instance, strategy, SolveMode::All);
            for solution in &outcome.solutions {
                assert!(
                    independently_satisfied(&instance, solution),
                    "{name}/{strategy}: emitted an invalid solution {solution:?}"
                );
            }
        }
    }
}

#[test]
fn chrono_enumeration_equals_the_oracle() {
    for (name, instance) in corpus() {
        let expected = enumerate_all(&instance).unwrap();
        let outcome = run(&instance, Strategy::Chrono, SolveMode::All);
        assert_eq!(
            outcome.solutions, expected,
            "{name}: enumeration differs from the oracle"
        );
    }
}

#[test]
fn backjumping_enumerates_the_same_lists_in_the_same_order() {
    for (name, instance) in corpus() {
        let chrono = run(&instance, Strategy::Chrono, SolveMode::All);
        for strategy in [Strategy::Alg1, Strategy::Alg2] {
            let outcome = run(&instance, strategy, SolveMode::All);
            assert_eq!(
                outcome.solutions, chrono.solutions,
                "{name}/{strategy}: solution list differs from chronological search"
            );
        }
    }
}

#[test]
fn alg1_and_alg2_emit_identical_traces() {
    for (name, instance) in corpus() {
        for mode in [SolveMode::First, SolveMode::All] {
            let (o1, t1) = run_traced(&instance, Strategy::Alg1, mode);
            let (o2, t2) = run_traced(&instance, Strategy::Alg2, mode);
            assert_eq!(t1, t2, "{name}: traces diverge");
            assert_eq!(render_trace(&t1), render_trace(&t2));
            assert_eq!(o1.stats, o2.stats, "{name}: stats diverge");
            assert_eq!(o1.termination, o2.termination);
        }
    }
}

#[test]
fn backjumping_never_tries_more_values_than_chrono() {
    for (name, instance) in corpus() {
        for mode in [SolveMode::First, SolveMode::All] {
            let chrono = run(&instance, Strategy::Chrono, mode);
            let alg2 = run(&instance, Strategy::Alg2, mode);
            assert!(
                alg2.stats.trials <= chrono.stats.trials,
                "{name}: alg2 tried {} values, chrono only {}",
                alg2.stats.trials,
                chrono.stats.trials
            );
        }
    }
}

#[test]
fn backjump_traces_respect_conflicts_and_culprits() {
    for (_name, instance) in corpus() {
        for strategy in [Strategy::Alg1, Strategy::Alg2] {
            for mode in [SolveMode::First, SolveMode::All] {
                let (_, events) = run_traced(&instance, strategy, mode);
                check_backjump_trace_invariants(&instance, &events);
            }
        }
    }
}

#[test]
fn trace_counters_match_the_event_stream() {
    for (name, instance) in corpus() {
        for strategy in Strategy::ALL {
            let (outcome, events) = run_traced(&instance, strategy, SolveMode::All);
            let count =
                |pred: fn(&TraceEvent) -> bool| events.iter().filter(|e| pred(e)).count() as u64;
            assert_eq!(
                outcome.stats.trials,
                count(|e| matches!(e, TraceEvent::Assign { .. })),
                "{name}"
            );
            assert_eq!(
                outcome.stats.backjumps,
                count(|e| matches!(e, TraceEvent::Backjump { .. })),
                "{name}"
            );
            assert_eq!(
                outcome.stats.exhaustions,
                count(|e| matches!(e, TraceEvent::Exhaust { .. })),
                "{name}"
            );
            assert_eq!(
                outcome.stats.solutions,
                count(|e| matches!(e, TraceEvent::Solution(_))),
                "{name}"
            );
            assert_eq!(outcome.stats.solutions, outcome.solutions.len() as u64);
        }
    }
}

#[test]
fn every_solution_event_is_covered_by_assignments() {
    for (_, instance) in corpus() {
        for strategy in Strategy::ALL {
            let (_, events) = run_traced(&instance, strategy, SolveMode::All);
            let mut latest: Vec<Option<Value>> = vec![None; instance.var_count()];
            for event in &events {
                match event {
                    TraceEvent::Assign { var, value } => {
                        latest[var.0 as usize - 1] = Some(*value);
                    }
                    TraceEvent::Solution(solution) => {
                        for a in solution {
                            assert_eq!(latest[a.var.0 as usize - 1], Some(a.value));
                        }
                    }
                    _ => {}
                }
            }
        }
    }
}

#[test]
fn searches_are_deterministic() {
    for (name, instance) in corpus() {
        for strategy in Strategy::ALL {
            let (first_outcome, first_trace) = run_traced(&instance, strategy, SolveMode::All);
            let (second_outcome, second_trace) = run_traced(&instance, strategy, SolveMode::All);
            assert_eq!(first_outcome, second_outcome, "{name}/{strategy}");
            assert_eq!(first_trace, second_trace, "{name}/{strategy}");
        }
    }
}

#[test]
fn concurrent_searches_on_a_shared_instance_agree() {
    let instance = backjump::problems::paper_problem(6, 4);
    let baseline = run(&instance, Strategy::Alg2, SolveMode::All);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..4)
            .map(|_| scope.spawn(|| run(&instance, Strategy::Alg2, SolveMode::All)))
            .collect();
        for handle in handles {
            assert_eq!(handle.join().unwrap(), baseline);
        }
    });
}

#[test]
fn corpus_round_trips_through_the_text_format() {
    for (name, instance) in corpus() {
        let text = serialize_instance(&instance);
        let parsed = parse_instance(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parsed, instance, "{name}");
    }
}

// ---------------------------------------------------------------------------
// randomized instances

/// Instances with shuffled assignment orders, shuffled domains of up to four
/// values, and arbitrary (possibly duplicated) checks against earlier
/// variables. Small enough for the oracle.
fn arb_instance() -> impl proptest::strategy::Strategy<Value = CspInstance> {
    (0usize..=5)
        .prop_flat_map(|n| {
            let order = Just((1..=n as u32).map(VarId).collect::<Vec<_>>()).prop_shuffle();
            let domains = proptest::collection::vec(
                (
                    0usize..=4,
                    Just((1u32..=4).map(Value).collect::<Vec<_>>()).prop_shuffle(),
                ),
                n,
            );
            let checks = proptest::collection::vec(
                proptest::collection::vec((any::<u16>(), any::<bool>(), 1u32..=3), 0..=4),
                n,
            );
            (order, domains, checks)
        })
        .prop_map(|(order, raw_domains, raw_checks)| {
            let n = order.len();
            let mut ranks = vec![0usize; n];
            for (rank, &var) in order.iter().enumerate() {
                ranks[var.0 as usize - 1] = rank;
            }
            let domains: Vec<Domain> = raw_domains
                .into_iter()
                .map(|(size, values)| Domain::new(values.into_iter().take(size).collect()))
                .collect();
            let mut plans = Vec::with_capacity(n);
            for id in 1..=n {
                let rank = ranks[id - 1];
                let mut checks = Vec::new();
                if rank > 0 {
                    for &(seed, not_equal, divisor) in &raw_checks[id - 1] {
                        let partner = order[seed as usize % rank];
                        let constraint = if not_equal {
                            Constraint::NotEqual
                        } else {
                            Constraint::DiagDiff { divisor }
                        };
                        checks.push((partner, constraint));
                    }
                }
                plans.push(CheckPlan::new(checks));
            }
            CspInstance::new(order, domains, plans).expect("generated instance is valid")
        })
}

/// A prefix of the instance's order assigned arbitrary in-domain values
/// (consistency not required), as search engines would have built it.
fn arb_partial(
    instance: CspInstance,
) -> impl proptest::strategy::Strategy<Value = (CspInstance, PartialSolution)> {
    let n = instance.var_count();
    (
        Just(instance),
        0..=n,
        proptest::collection::vec(any::<u16>(), n),
    )
        .prop_map(|(instance, want, seeds)| {
            let mut partial = PartialSolution::new(instance.var_count());
            for rank in 0..want {
                let var = instance.order()[rank];
                let domain = instance.domain(var).trial_order();
                if domain.is_empty() {
                    break;
                }
                let value = domain[seeds[rank] as usize % domain.len()];
                partial.push(backjump::model::Assignment { var, value });
            }
            (instance, partial)
        })
}

proptest! {
    #[test]
    fn random_instances_round_trip(instance in arb_instance()) {
        let text = serialize_instance(&instance);
        prop_assert_eq!(parse_instance(&text).unwrap(), instance);
    }

    #[test]
    fn random_instances_agree_with_the_oracle(instance in arb_instance()) {
        let expected = enumerate_all(&instance).unwrap();
        let chrono = run(&instance, Strategy::Chrono, SolveMode::All);
        prop_assert_eq!(&chrono.solutions, &expected);
        for strategy in [Strategy::Alg1, Strategy::Alg2] {
            let outcome = run(&instance, strategy, SolveMode::All);
            prop_assert_eq!(&outcome.solutions, &expected);
            for solution in &outcome.solutions {
                prop_assert!(independently_satisfied(&instance, solution));
            }
            prop_assert!(outcome.stats.trials <= chrono.stats.trials);
        }
    }

    #[test]
    fn random_instances_produce_identical_backjump_traces(instance in arb_instance()) {
        let (_, t1) = run_traced(&instance, Strategy::Alg1, SolveMode::All);
        let (_, t2) = run_traced(&instance, Strategy::Alg2, SolveMode::All);
        prop_assert_eq!(&t1, &t2);
        check_backjump_trace_invariants(&instance, &t1);
    }

    #[test]
    fn consistent_returns_the_first_failing_check(
        (instance, partial) in arb_instance().prop_flat_map(arb_partial),
        value_seed in any::<u16>(),
    ) {
        // trial the next unassigned variable in order, if any
        let Some(&var) = instance.order().get(partial.len()) else { return Ok(()) };
        let domain = instance.domain(var).trial_order();
        if domain.is_empty() {
            return Ok(());
        }
        let value = domain[value_seed as usize % domain.len()];

        // reference: evaluate every check, keep the first assigned-partner
        // violation
        let mut expected: Option<VarId> = None;
        for &(partner, constraint) in instance.plan(var).checks() {
            let Some(pv) = partial.value_of(partner) else { continue };
            let ok = match constraint {
                Constraint::NotEqual => value != pv,
                Constraint::DiagDiff { divisor } => {
                    value.0.abs_diff(pv.0) != var.0.abs_diff(partner.0) / divisor
                }
            };
            if !ok {
                expected = Some(partner);
                break;
            }
        }

        match consistent(&instance, &partial, var, value) {
            ConsistencyVerdict::Satisfied => prop_assert_eq!(expected, None),
            ConsistencyVerdict::Violated(conflict) => {
                // binary conflict, newest first, owned by the trialed variable
                prop_assert_eq!(conflict.len(), 2);
                prop_assert!(conflict.contains(var));
                prop_assert_eq!(conflict.first(), Some(var));
                let partner = conflict.iter().nth(1);
                prop_assert_eq!(partner, expected);
            }
        }
    }

    #[test]
    fn culprit_is_the_first_of_the_recency_sorted_set(
        (instance, partial) in arb_instance().prop_flat_map(arb_partial),
        picks in proptest::collection::vec(any::<bool>(), 0..=5),
    ) {
        let assigned: Vec<VarId> = partial.entries().iter().map(|a| a.var).collect();
        let members: Vec<VarId> = assigned
            .iter()
            .zip(picks.iter().chain(std::iter::repeat(&false)))
            .filter_map(|(&var, &keep)| keep.then_some(var))
            .collect();
        let conflict = VarSet::sorted_by_recency(members.clone(), &instance);
        let found = culprit(&partial, &conflict);
        prop_assert_eq!(found, conflict.first());
        if let Some(c) = found {
            prop_assert!(conflict.contains(c));
            // no member is assigned later than the culprit
            let position = |v: VarId| assigned.iter().position(|&a| a == v).unwrap();
            prop_assert!(conflict.iter().all(|v| position(v) <= position(c)));
        }
    }

    #[test]
    fn merge_explanation_is_a_superset_union(
        (instance, partial) in arb_instance().prop_flat_map(arb_partial),
        picks_e in proptest::collection::vec(any::<bool>(), 0..=5),
        picks_c in proptest::collection::vec(any::<bool>(), 0..=5),
    ) {
        // the owner is the next variable in order; explanation and conflict
        // draw from the assigned prefix
        let Some(&owner) = instance.order().get(partial.len()) else { return Ok(()) };
        let pick = |picks: &[bool]| -> Vec<VarId> {
            partial
                .entries()
                .iter()
                .map(|a| a.var)
                .zip(picks.iter().chain(std::iter::repeat(&false)))
                .filter_map(|(var, &keep)| keep.then_some(var))
                .collect()
        };
        let explanation = VarSet::sorted_by_recency(pick(&picks_e), &instance);
        let mut conflict_members = pick(&picks_c);
        conflict_members.push(owner);
        let conflict = VarSet::sorted_by_recency(conflict_members.clone(), &instance);

        let merged = merge_explanation(&instance, &explanation, &conflict, owner);
        // no member is ever removed
        prop_assert!(explanation.iter().all(|v| merged.contains(v)));
        // exactly the union minus the owner
        let mut expected: Vec<VarId> = explanation
            .iter()
            .chain(conflict_members.into_iter().filter(|&v| v != owner))
            .collect();
        expected.sort_unstable_by_key(|v| std::cmp::Reverse(instance.rank(*v)));
        expected.dedup();
        prop_assert_eq!(merged.as_slice(), &expected[..]);
        prop_assert!(!merged.contains(owner));
    }

    #[test]
    fn union_equals_the_fold_of_merges(
        (instance, partial) in arb_instance().prop_flat_map(arb_partial),
        picks in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 0..=5), 0..=4),
    ) {
        // the two strategies compute the same union: folding each
        // explanation (plus the owner) through merge_explanation equals one
        // hyperresolution pass
        let Some(&owner) = instance.order().get(partial.len()) else { return Ok(()) };
        let explanations: Vec<VarSet> = picks
            .iter()
            .map(|p| {
                let members: Vec<VarId> = partial
                    .entries()
                    .iter()
                    .map(|a| a.var)
                    .zip(p.iter().chain(std::iter::repeat(&false)))
                    .filter_map(|(var, &keep)| keep.then_some(var))
                    .collect();
                VarSet::sorted_by_recency(members, &instance)
            })
            .collect();

        let union = conflict_union(&instance, &explanations);

        let mut folded = VarSet::empty();
        for explanation in &explanations {
            let mut with_owner: Vec<VarId> = explanation.iter().collect();
            with_owner.push(owner);
            let as_conflict = VarSet::sorted_by_recency(with_owner, &instance);
            folded = merge_explanation(&instance, &folded, &as_conflict, owner);
        }
        prop_assert_eq!(union, folded);
    }
}
