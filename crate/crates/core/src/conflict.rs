//! Look-back machinery shared by the backjumping strategies: conflict sets,
//! eliminating explanations, the conflict slot, culprit selection, and the
//! hyperresolution union.
//!
//! A conflict set names variables whose current assignments are jointly
//! inconsistent. An eliminating explanation owned by a variable `i` names
//! earlier-assigned variables whose assignments rule out one or more of
//! `i`'s values. Both are kept sorted by assignment recency, newest first,
//! so the culprit of a conflict is always the first element.

use crate::model::{CspInstance, PartialSolution, VarId};

/// A set of variables sorted by assignment recency, newest-assigned first.
/// Used both as a conflict set and as an eliminating explanation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VarSet {
    vars: Vec<VarId>,
}

/// Variables whose joint current assignments are inconsistent.
pub type ConflictSet = VarSet;

/// Earlier-assigned variables responsible for eliminating values of the
/// owning variable.
pub type Explanation = VarSet;

impl VarSet {
    pub fn empty() -> Self {
        VarSet::default()
    }

    /// The two endpoints of a violated binary constraint, newer first.
    pub fn pair(newer: VarId, older: VarId) -> Self {
        debug_assert_ne!(newer, older);
        VarSet {
            vars: vec![newer, older],
        }
    }

    /// Builds a set from arbitrary variables, sorting them newest-assigned
    /// first under `instance`'s static order and dropping duplicates.
    pub fn sorted_by_recency(mut vars: Vec<VarId>, instance: &CspInstance) -> Self {
        vars.sort_unstable_by_key(|&v| std::cmp::Reverse(instance.rank(v)));
        vars.dedup();
        VarSet { vars }
    }

    /// Members, newest-assigned first.
    pub fn iter(&self) -> impl Iterator<Item = VarId> + '_ {
        self.vars.iter().copied()
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.vars
    }

    pub fn contains(&self, var: VarId) -> bool {
        self.vars.contains(&var)
    }

    /// The newest-assigned member, i.e. the culprit when this is a conflict.
    pub fn first(&self) -> Option<VarId> {
        self.vars.first().copied()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    /// A copy with `var` removed. Removal preserves the recency sort.
    pub fn without(&self, var: VarId) -> VarSet {
        VarSet {
            vars: self.vars.iter().copied().filter(|&v| v != var).collect(),
        }
    }
}

/// The single mutable cell that carries the latest conflict across a failure
/// path. It is owned by one engine and overwritten on every save; it is never
/// cleared during a search.
#[derive(Debug, Default)]
pub struct ConflictSlot {
    current: Option<ConflictSet>,
}

impl ConflictSlot {
    pub fn new() -> Self {
        ConflictSlot::default()
    }

    /// Stores `conflict`, replacing any previous value. An empty conflict is
    /// legal and signals unsatisfiability downstream.
    pub fn save(&mut self, conflict: ConflictSet) {
        self.current = Some(conflict);
    }

    /// The most recently saved conflict.
    ///
    /// Panics if nothing was saved yet; a well-formed engine saves before
    /// every read.
    pub fn get(&self) -> &ConflictSet {
        self.current
            .as_ref()
            .expect("conflict slot read before any conflict was saved")
    }
}

/// The member of `conflict` assigned most recently in `partial`, or `None`
/// when the conflict is empty (the failure case: no choice can be revised).
///
/// Panics if the conflict is nonempty but none of its members is assigned.
pub fn culprit(partial: &PartialSolution, conflict: &ConflictSet) -> Option<VarId> {
    if conflict.is_empty() {
        return None;
    }
    debug_assert!(
        conflict.iter().all(|v| partial.is_assigned(v)),
        "conflict contains an unassigned variable"
    );
    let found = partial
        .entries()
        .iter()
        .rev()
        .map(|a| a.var)
        .find(|&v| conflict.contains(v));
    Some(found.expect("conflict contains no assigned variable"))
}

/// The culprit's bookkeeping step: extends `explanation` with
/// `conflict \ {var}`, keeping the newest-first sort.
///
/// Panics unless `var` is a member of `conflict`.
pub fn merge_explanation(
    instance: &CspInstance,
    explanation: &Explanation,
    conflict: &ConflictSet,
    var: VarId,
) -> Explanation {
    assert!(
        conflict.contains(var),
        "variable {var} is not part of the conflict {conflict:?}"
    );
    let merged: Vec<VarId> = explanation
        .iter()
        .chain(conflict.iter().filter(|&v| v != var))
        .collect();
    VarSet::sorted_by_recency(merged, instance)
}

/// The hyperresolution step: the union of all variables appearing in a
/// sequence of explanations. An empty union means no earlier choice is
/// responsible, i.e. the instance is unsatisfiable on this branch.
pub fn conflict_union<'a>(
    instance: &CspInstance,
    explanations: impl IntoIterator<Item = &'a Explanation>,
) -> ConflictSet {
    let all: Vec<VarId> = explanations.into_iter().flat_map(|e| e.iter()).collect();
    VarSet::sorted_by_recency(all, instance)
}

/// The conflict saved after emitting a solution in all-solutions mode: every
/// variable of the solution, so backtracking revises the newest choice and
/// enumeration stays complete.
pub fn solution_conflict(solution: &PartialSolution) -> ConflictSet {
    VarSet {
        vars: solution.entries().iter().rev().map(|a| a.var).collect(),
    }
}
