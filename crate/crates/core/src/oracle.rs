//! Ground-truth enumeration by exhaustive generate-and-test.
//!
//! The oracle walks the full Cartesian product of the domains in the
//! lexicographic order induced by the instance's variable order and the
//! domains' trial orders, and keeps the tuples that satisfy every constraint
//! of every plan. It evaluates constraints with its own code, deliberately
//! not the incremental path the engines use, so an agreement between the two
//! is a real cross-check.

use crate::engine::Solution;
use crate::model::{Assignment, Constraint, CspInstance, Value, VarId};

/// Default bound on the tuple-space size the oracle will walk.
pub const DEFAULT_TUPLE_CAP: u128 = 1_000_000;

/// The instance's tuple space is too large to enumerate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("tuple space holds {tuples} candidates, more than the oracle cap of {cap}")]
pub struct SpaceTooLarge {
    pub tuples: u128,
    pub cap: u128,
}

/// Every solution of `instance`, in enumeration order, with the cap of
/// [`DEFAULT_TUPLE_CAP`] candidate tuples.
pub fn enumerate_all(instance: &CspInstance) -> Result<Vec<Solution>, SpaceTooLarge> {
    enumerate_all_capped(instance, DEFAULT_TUPLE_CAP)
}

/// Like [`enumerate_all`] with an explicit candidate cap.
pub fn enumerate_all_capped(
    instance: &CspInstance,
    cap: u128,
) -> Result<Vec<Solution>, SpaceTooLarge> {
    let n = instance.var_count();
    let order = instance.order();
    let tuples = order.iter().fold(1u128, |acc, &var| {
        acc.saturating_mul(instance.domain(var).len() as u128)
    });
    if tuples > cap {
        return Err(SpaceTooLarge { tuples, cap });
    }

    let mut solutions = Vec::new();
    if tuples == 0 {
        return Ok(solutions);
    }
    let mut indices = vec![0usize; n];
    let mut values: Vec<Value> = vec![Value(0); n];
    'product: loop {
        for (pos, &var) in order.iter().enumerate() {
            values[var.0 as usize - 1] = instance.domain(var).trial_order()[indices[pos]];
        }
        if satisfies_all(instance, &values) {
            let tuple: Solution = order
                .iter()
                .map(|&var| Assignment {
                    var,
                    value: values[var.0 as usize - 1],
                })
                .collect();
            solutions.push(tuple);
        }
        // odometer: advance the last position, carrying leftwards
        let mut pos = n;
        loop {
            if pos == 0 {
                break 'product;
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < instance.domain(order[pos]).len() {
                break;
            }
            indices[pos] = 0;
        }
    }
    Ok(solutions)
}

fn satisfies_all(instance: &CspInstance, values: &[Value]) -> bool {
    for &var in instance.order() {
        let value = values[var.0 as usize - 1];
        for &(partner, constraint) in instance.plan(var).checks() {
            if !holds(
                constraint,
                var,
                value,
                partner,
                values[partner.0 as usize - 1],
            ) {
                return false;
            }
        }
    }
    true
}

// Independent re-statement of the constraint semantics; kept apart from
// model::check on purpose.
fn holds(constraint: Constraint, var: VarId, value: Value, partner: VarId, pvalue: Value) -> bool {
    match constraint {
        Constraint::NotEqual => value != pvalue,
        Constraint::DiagDiff { divisor } => {
            value.0.abs_diff(pvalue.0) != var.0.abs_diff(partner.0) / divisor
        }
    }
}
