//! The CSP data model: variables, domains, binary constraints, per-variable
//! check plans, partial solutions, and single-assignment consistency checking.
//!
//! An instance fixes a static assignment order. Every constraint is binary and
//! is attached to the newer of its two variables as part of that variable's
//! [`CheckPlan`]; the plan's sequence is the exact order checks execute, and
//! the first violated check decides the conflict.

use std::fmt;

use crate::conflict::ConflictSet;

/// Identifier of a CSP variable. Ids in one instance are unique and lie in
/// `1..=var_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A domain value (a positive integer).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Value(pub u32);

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The values a variable may take, in trial order: values are tried front to
/// back and the order is significant for search effort and solution order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Domain {
    trial_order: Vec<Value>,
}

impl Domain {
    pub fn new(trial_order: Vec<Value>) -> Self {
        Domain { trial_order }
    }

    pub fn trial_order(&self) -> &[Value] {
        &self.trial_order
    }

    pub fn len(&self) -> usize {
        self.trial_order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trial_order.is_empty()
    }
}

/// One variable bound to one value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub var: VarId,
    pub value: Value,
}

/// A binary constraint over a newer variable `i` and an older partner `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    /// Satisfied iff `value(i) != value(j)`.
    NotEqual,
    /// Satisfied iff `|value(i) - value(j)| != |i - j| / divisor`
    /// (integer division). With divisor 1 this is the classic no-diagonal
    /// rule of n-queens.
    DiagDiff { divisor: u32 },
}

/// The ordered checks executed when a variable is assigned. Every partner is
/// assigned strictly before the owning variable; the first violated check
/// wins, so the sequence order determines which conflict gets reported.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CheckPlan {
    checks: Vec<(VarId, Constraint)>,
}

impl CheckPlan {
    pub fn new(checks: Vec<(VarId, Constraint)>) -> Self {
        CheckPlan { checks }
    }

    pub fn checks(&self) -> &[(VarId, Constraint)] {
        &self.checks
    }
}

/// Raised when instance data violates a structural invariant.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid instance: {message}")]
pub struct InvalidInstance {
    pub message: String,
}

impl InvalidInstance {
    fn new(message: impl Into<String>) -> Self {
        InvalidInstance {
            message: message.into(),
        }
    }
}

/// A finite-domain CSP: variables in a static assignment order, one domain
/// per variable, and one check plan per variable. Immutable after
/// construction and safely shareable across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CspInstance {
    order: Vec<VarId>,
    /// rank[id - 1] = position of the variable in `order` (0 = assigned first).
    ranks: Vec<usize>,
    domains: Vec<Domain>,
    plans: Vec<CheckPlan>,
}

impl CspInstance {
    /// Builds an instance, validating every structural invariant: `order` is
    /// a permutation of `1..=n`, domain values are positive and free of
    /// duplicates, and every plan references only variables assigned earlier
    /// in the order.
    ///
    /// `domains[k]` and `plans[k]` belong to the variable with id `k + 1`.
    pub fn new(
        order: Vec<VarId>,
        domains: Vec<Domain>,
        plans: Vec<CheckPlan>,
    ) -> Result<Self, InvalidInstance> {
        let n = order.len();
        if domains.len() != n || plans.len() != n {
            return Err(InvalidInstance::new(format!(
                "expected {n} domains and {n} plans to match the order length, got {} and {}",
                domains.len(),
                plans.len()
            )));
        }
        let mut ranks = vec![usize::MAX; n];
        for (rank, &var) in order.iter().enumerate() {
            let id = var.0 as usize;
            if id == 0 || id > n {
                return Err(InvalidInstance::new(format!(
                    "variable id {var} out of range 1..={n}"
                )));
            }
            if ranks[id - 1] != usize::MAX {
                return Err(InvalidInstance::new(format!(
                    "variable id {var} appears twice in the order"
                )));
            }
            ranks[id - 1] = rank;
        }
        for (idx, domain) in domains.iter().enumerate() {
            let mut seen = domain.trial_order.to_vec();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != domain.trial_order.len() {
                return Err(InvalidInstance::new(format!(
                    "domain of variable {} contains a duplicate value",
                    idx + 1
                )));
            }
            if domain.trial_order.iter().any(|v| v.0 == 0) {
                return Err(InvalidInstance::new(format!(
                    "domain of variable {} contains a non-positive value",
                    idx + 1
                )));
            }
        }
        for (idx, plan) in plans.iter().enumerate() {
            let var = VarId(idx as u32 + 1);
            for &(partner, constraint) in plan.checks() {
                let pid = partner.0 as usize;
                if pid == 0 || pid > n {
                    return Err(InvalidInstance::new(format!(
                        "check on variable {var} references unknown partner {partner}"
                    )));
                }
                if ranks[pid - 1] >= ranks[idx] {
                    return Err(InvalidInstance::new(format!(
                        "check on variable {var} references partner {partner}, \
                         which is not assigned earlier in the order"
                    )));
                }
                if let Constraint::DiagDiff { divisor: 0 } = constraint {
                    return Err(InvalidInstance::new(format!(
                        "check on variable {var} has divisor 0"
                    )));
                }
            }
        }
        Ok(CspInstance {
            order,
            ranks,
            domains,
            plans,
        })
    }

    pub fn var_count(&self) -> usize {
        self.order.len()
    }

    /// The static assignment order.
    pub fn order(&self) -> &[VarId] {
        &self.order
    }

    /// Position of `var` in the static order; 0 means assigned first.
    pub fn rank(&self, var: VarId) -> usize {
        self.ranks[var.0 as usize - 1]
    }

    pub fn domain(&self, var: VarId) -> &Domain {
        &self.domains[var.0 as usize - 1]
    }

    pub fn plan(&self, var: VarId) -> &CheckPlan {
        &self.plans[var.0 as usize - 1]
    }
}

/// A time-ordered sequence of assignments, oldest first, with no variable
/// assigned twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSolution {
    entries: Vec<Assignment>,
    values: Vec<Option<Value>>,
}

impl PartialSolution {
    pub fn new(var_count: usize) -> Self {
        PartialSolution {
            entries: Vec::with_capacity(var_count),
            values: vec![None; var_count],
        }
    }

    /// Appends an assignment as the newest entry.
    ///
    /// Panics if the variable is already assigned or its id is out of range.
    pub fn push(&mut self, assignment: Assignment) {
        let slot = &mut self.values[assignment.var.0 as usize - 1];
        assert!(
            slot.is_none(),
            "variable {} is already assigned",
            assignment.var
        );
        *slot = Some(assignment.value);
        self.entries.push(assignment);
    }

    /// Retracts and returns the newest entry.
    pub fn pop(&mut self) -> Option<Assignment> {
        let assignment = self.entries.pop()?;
        self.values[assignment.var.0 as usize - 1] = None;
        Some(assignment)
    }

    pub fn value_of(&self, var: VarId) -> Option<Value> {
        self.values.get(var.0 as usize - 1).copied().flatten()
    }

    pub fn is_assigned(&self, var: VarId) -> bool {
        self.value_of(var).is_some()
    }

    /// All entries, oldest-assigned first.
    pub fn entries(&self) -> &[Assignment] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Outcome of one or more binary checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsistencyVerdict {
    Satisfied,
    /// The two variables whose current values jointly violate a constraint,
    /// newest first.
    Violated(ConflictSet),
}

impl ConsistencyVerdict {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, ConsistencyVerdict::Satisfied)
    }
}

/// Evaluates one binary constraint between a newer and an older assignment.
/// A violation reports exactly the two endpoint variables.
pub fn check(constraint: Constraint, newer: Assignment, older: Assignment) -> ConsistencyVerdict {
    let holds = match constraint {
        Constraint::NotEqual => newer.value != older.value,
        Constraint::DiagDiff { divisor } => {
            let value_gap = newer.value.0.abs_diff(older.value.0);
            let index_gap = newer.var.0.abs_diff(older.var.0) / divisor;
            value_gap != index_gap
        }
    };
    if holds {
        ConsistencyVerdict::Satisfied
    } else {
        ConsistencyVerdict::Violated(ConflictSet::pair(newer.var, older.var))
    }
}

/// Runs `var`'s check plan against the partial solution extended notionally
/// with `value`. Returns the conflict of the first failing check; partners
/// not yet assigned are skipped, which supports prefix checking.
///
/// Pure: no state is observed or changed beyond the arguments.
///
/// Panics if `var` is already assigned.
pub fn consistent(
    instance: &CspInstance,
    partial: &PartialSolution,
    var: VarId,
    value: Value,
) -> ConsistencyVerdict {
    consistent_counted(instance, partial, var, value).0
}

/// Same as [`consistent`], also reporting how many binary checks executed.
pub(crate) fn consistent_counted(
    instance: &CspInstance,
    partial: &PartialSolution,
    var: VarId,
    value: Value,
) -> (ConsistencyVerdict, u64) {
    assert!(
        !partial.is_assigned(var),
        "variable {var} is already assigned"
    );
    let candidate = Assignment { var, value };
    let mut executed = 0;
    for &(partner, constraint) in instance.plan(var).checks() {
        let Some(partner_value) = partial.value_of(partner) else {
            continue;
        };
        executed += 1;
        let older = Assignment {
            var: partner,
            value: partner_value,
        };
        if let verdict @ ConsistencyVerdict::Violated(_) = check(constraint, candidate, older) {
            return (verdict, executed);
        }
    }
    (ConsistencyVerdict::Satisfied, executed)
}
