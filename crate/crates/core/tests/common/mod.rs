//! Helpers shared by the integration suites.

#![allow(dead_code)]

use backjump::engine::{solve, SearchLimits, SearchOutcome, SolveMode, Strategy, TraceEvent};
use backjump::model::{Assignment, Constraint, CspInstance, VarId};
use backjump::problems::{paper_problem, queens};

/// Named instances exercised by the cross-strategy tests. All small enough
/// for exhaustive enumeration.
pub fn corpus() -> Vec<(String, CspInstance)> {
    let mut instances = Vec::new();
    for (v, k) in [(4, 3), (6, 3), (6, 4), (8, 4), (4, 2), (5, 3), (3, 0)] {
        instances.push((format!("paper({v},{k})"), paper_problem(v, k)));
    }
    for n in 1..=6 {
        instances.push((format!("queens({n})"), queens(n)));
    }
    instances
}

pub fn run(instance: &CspInstance, strategy: Strategy, mode: SolveMode) -> SearchOutcome {
    solve(instance, strategy, mode, SearchLimits::default(), None)
}

pub fn run_traced(
    instance: &CspInstance,
    strategy: Strategy,
    mode: SolveMode,
) -> (SearchOutcome, Vec<TraceEvent>) {
    let mut events: Vec<TraceEvent> = Vec::new();
    let outcome = solve(
        instance,
        strategy,
        mode,
        SearchLimits::default(),
        Some(&mut events),
    );
    (outcome, events)
}

pub fn render_trace(events: &[TraceEvent]) -> String {
    let mut text = String::new();
    for event in events {
        text.push_str(&event.to_string());
        text.push('\n');
    }
    text
}

/// Full re-check of a claimed solution with logic owned by the test suite:
/// domain membership plus every constraint of every plan, independent of the
/// engines' incremental path and of the oracle.
pub fn independently_satisfied(instance: &CspInstance, solution: &[Assignment]) -> bool {
    if solution.len() != instance.var_count() {
        return false;
    }
    let mut values = vec![None; instance.var_count()];
    for a in solution {
        let slot = &mut values[a.var.0 as usize - 1];
        if slot.is_some() || !instance.domain(a.var).trial_order().contains(&a.value) {
            return false;
        }
        *slot = Some(a.value);
    }
    let value = |var: VarId| values[var.0 as usize - 1].expect("every variable assigned once");
    for &var in instance.order() {
        for &(partner, constraint) in instance.plan(var).checks() {
            let ok = match constraint {
                Constraint::NotEqual => value(var) != value(partner),
                Constraint::DiagDiff { divisor } => {
                    value(var).0.abs_diff(value(partner).0) != var.0.abs_diff(partner.0) / divisor
                }
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// Structural invariants of a backjumping trace:
///
/// * every saved conflict is sorted newest-assigned first;
/// * frames popped during resolution are never in the conflict;
/// * the first trial after a conflict happens at the culprit, the conflict's
///   first member;
/// * between a conflict save and that trial only backjumps and exhaustions
///   appear, so no popped frame is ever trialed.
pub fn check_backjump_trace_invariants(instance: &CspInstance, events: &[TraceEvent]) {
    let mut pending: Option<&backjump::conflict::ConflictSet> = None;
    for event in events {
        match event {
            TraceEvent::ConflictSaved(conflict) => {
                let ranks: Vec<usize> = conflict.iter().map(|v| instance.rank(v)).collect();
                assert!(
                    ranks.windows(2).all(|w| w[0] > w[1]),
                    "conflict {conflict:?} is not sorted newest-assigned first"
                );
                pending = Some(conflict);
            }
            TraceEvent::Backjump { var } => {
                let conflict = pending.expect("backjump without a saved conflict");
                assert!(
                    !conflict.contains(*var),
                    "frame {var} was popped although it is in the conflict {conflict:?}"
                );
            }
            TraceEvent::Assign { var, .. } => {
                if let Some(conflict) = pending.take() {
                    assert_eq!(
                        Some(*var),
                        conflict.first(),
                        "trial after conflict {conflict:?} did not land on the culprit"
                    );
                }
            }
            TraceEvent::Exhaust { var } => {
                // a frame that exhausts mid-resolution is the culprit whose
                // remaining values just ran out
                if let Some(conflict) = pending {
                    assert_eq!(
                        Some(*var),
                        conflict.first(),
                        "exhaustion after conflict {conflict:?} not at the culprit"
                    );
                }
            }
            TraceEvent::Solution(_) | TraceEvent::Fail => {}
        }
    }
}
