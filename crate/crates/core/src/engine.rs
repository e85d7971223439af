//! The search engines: chronological backtracking and the two backjumping
//! strategies, all driving the same explicit choice-point stack.
//!
//! All three strategies take variables in the instance's static order and
//! values in domain trial order, so they visit candidate assignments in the
//! same sequence and emit the same solutions in the same order. They differ
//! only in how a failure is resolved:
//!
//! * `chrono` retries the next value of the most recent choice point,
//!   unconditionally.
//! * `alg2` derives a conflict set from every failure (the two endpoints of
//!   the first violated check, or an exhausted frame's accumulated
//!   explanation), saves it in the engine's conflict slot, and pops choice
//!   points until it reaches the culprit: the newest frame whose variable is
//!   in the conflict. Each frame keeps a single explanation, the running
//!   union of the conflicts it was culprit for.
//! * `alg1` is the same traversal, but each frame keeps one
//!   `(value, explanation)` pair per eliminated value and computes the union
//!   only at exhaustion, by hyperresolution over the pairs. The two
//!   bookkeeping routes save identical conflicts, so their traces are
//!   identical event for event.
//!
//! One trial is counted every time a value is taken from a frame's remaining
//! suffix and submitted to the consistency check, including the value that
//! ends up in a solution.

use std::fmt;

use crate::conflict::{
    conflict_union, merge_explanation, solution_conflict, ConflictSet, ConflictSlot, Explanation,
};
use crate::model::{
    consistent_counted, Assignment, ConsistencyVerdict, CspInstance, PartialSolution, Value, VarId,
};

/// How failures are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Chronological backtracking: always revise the most recent choice.
    Chrono,
    /// Backjumping with one eliminating explanation recorded per eliminated
    /// value; the conflict of an exhausted frame is the hyperresolution
    /// union over all recorded pairs.
    Alg1,
    /// Backjumping with a single per-frame explanation holding the running
    /// union; the conflict of an exhausted frame is that union directly.
    Alg2,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Chrono, Strategy::Alg1, Strategy::Alg2];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Chrono => "chrono",
            Strategy::Alg1 => "alg1",
            Strategy::Alg2 => "alg2",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How many solutions to emit before stopping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// Stop at the first solution.
    First,
    /// Enumerate every solution.
    All,
    /// Stop after `n` solutions.
    Limit(u64),
}

impl SolveMode {
    fn quota(self) -> Option<u64> {
        match self {
            SolveMode::First => Some(1),
            SolveMode::All => None,
            SolveMode::Limit(n) => Some(n),
        }
    }
}

/// Resource guards for one search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchLimits {
    /// Abort with [`Termination::LimitReached`] before exceeding this many
    /// trials. `None` means unlimited.
    pub max_trials: Option<u64>,
}

/// Why the search stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The requested number of solutions was found.
    FirstFound,
    /// The space was exhausted after emitting at least one solution.
    Exhausted,
    /// The space was exhausted without any solution.
    Unsatisfiable,
    /// The trial budget ran out.
    LimitReached,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::FirstFound => "FirstFound",
            Termination::Exhausted => "Exhausted",
            Termination::Unsatisfiable => "Unsatisfiable",
            Termination::LimitReached => "LimitReached",
        })
    }
}

/// Search-effort counters. All counters only ever increase during a search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Value selections submitted to the consistency check.
    pub trials: u64,
    /// Binary constraint checks executed.
    pub consistency_checks: u64,
    /// Trials rejected by a violated check.
    pub local_conflicts: u64,
    /// Frames that ran out of values.
    pub exhaustions: u64,
    /// Frames popped during conflict resolution whose variable was not in
    /// the conflict.
    pub backjumps: u64,
    /// Solutions emitted.
    pub solutions: u64,
}

/// A full assignment, in the instance's static order.
pub type Solution = Vec<Assignment>;

/// Everything a search run produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Solutions in emission order.
    pub solutions: Vec<Solution>,
    pub stats: SearchStats,
    pub termination: Termination,
}

impl SearchOutcome {
    /// The stats as a flat `key=value` record, one line per key, with
    /// `termination` last.
    pub fn stats_text(&self) -> String {
        let s = &self.stats;
        format!(
            "trials={}\nconsistency_checks={}\nlocal_conflicts={}\nexhaustions={}\n\
             backjumps={}\nsolutions={}\ntermination={}\n",
            s.trials,
            s.consistency_checks,
            s.local_conflicts,
            s.exhaustions,
            s.backjumps,
            s.solutions,
            self.termination
        )
    }
}

/// One record of the search, in the order things happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    /// A value was submitted to the consistency check.
    Assign { var: VarId, value: Value },
    /// The conflict slot was written (first violated check, exhausted frame,
    /// or solution conflict in all-solutions mode).
    ConflictSaved(ConflictSet),
    /// A frame outside the saved conflict was discarded during resolution.
    Backjump { var: VarId },
    /// A frame ran out of values.
    Exhaust { var: VarId },
    /// A full consistent assignment was emitted.
    Solution(Solution),
    /// The search space was exhausted with nothing (more) to emit.
    Fail,
}

impl fmt::Display for TraceEvent {
    /// One event per line: `A <var> <value>`, `C <v1>,<v2>,...` (recency
    /// order, `-` when empty), `J <var>`, `X <var>`, `S <val1>,...,<valN>`
    /// (values in instance variable order), `F`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Assign { var, value } => write!(f, "A {var} {value}"),
            TraceEvent::ConflictSaved(conflict) => {
                if conflict.is_empty() {
                    write!(f, "C -")
                } else {
                    write!(f, "C ")?;
                    for (i, v) in conflict.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{v}")?;
                    }
                    Ok(())
                }
            }
            TraceEvent::Backjump { var } => write!(f, "J {var}"),
            TraceEvent::Exhaust { var } => write!(f, "X {var}"),
            TraceEvent::Solution(solution) => {
                if solution.is_empty() {
                    write!(f, "S -")
                } else {
                    write!(f, "S ")?;
                    for (i, a) in solution.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{}", a.value)?;
                    }
                    Ok(())
                }
            }
            TraceEvent::Fail => write!(f, "F"),
        }
    }
}

/// Consumes trace events as the engine produces them. Sinks are called
/// synchronously on the engine's thread and must not affect the search.
pub trait TraceSink {
    fn event(&mut self, event: &TraceEvent);
}

impl TraceSink for Vec<TraceEvent> {
    fn event(&mut self, event: &TraceEvent) {
        self.push(event.clone());
    }
}

/// Runs one search over `instance`.
///
/// Variables are taken in the instance's static order and values in domain
/// trial order. In [`SolveMode::All`] and [`SolveMode::Limit`], the
/// backjumping strategies save a solution conflict over every assigned
/// variable after each emission, which keeps their enumeration complete and
/// in the same order as chronological backtracking.
pub fn solve(
    instance: &CspInstance,
    strategy: Strategy,
    mode: SolveMode,
    limits: SearchLimits,
    trace: Option<&mut dyn TraceSink>,
) -> SearchOutcome {
    let mut engine = Engine {
        instance,
        strategy,
        quota: mode.quota(),
        max_trials: limits.max_trials,
        partial: PartialSolution::new(instance.var_count()),
        stack: Vec::with_capacity(instance.var_count()),
        slot: ConflictSlot::new(),
        stats: SearchStats::default(),
        solutions: Vec::new(),
        sink: trace,
    };
    let termination = engine.run();
    SearchOutcome {
        solutions: engine.solutions,
        stats: engine.stats,
        termination,
    }
}

/// One live choice point: the owning variable, the untried suffix of its
/// domain, and the elimination state accumulated while it was the culprit.
struct Frame {
    var: VarId,
    /// Index into the domain's trial order; the remaining values are the
    /// suffix starting here.
    next_value: usize,
    /// The value taken by the latest trial of this frame.
    current: Option<Value>,
    /// Running union of eliminating explanations (alg2).
    explanation: Explanation,
    /// One explanation per eliminated value (alg1).
    elim_pairs: Vec<(Value, Explanation)>,
}

struct Engine<'i, 's> {
    instance: &'i CspInstance,
    strategy: Strategy,
    quota: Option<u64>,
    max_trials: Option<u64>,
    partial: PartialSolution,
    stack: Vec<Frame>,
    slot: ConflictSlot,
    stats: SearchStats,
    solutions: Vec<Solution>,
    sink: Option<&'s mut dyn TraceSink>,
}

impl Engine<'_, '_> {
    fn run(&mut self) -> Termination {
        if self.quota == Some(0) {
            return Termination::FirstFound;
        }
        if self.instance.var_count() == 0 {
            // the empty assignment is the one solution
            self.record_solution();
            if self.quota_met() {
                return Termination::FirstFound;
            }
            self.emit(|| TraceEvent::Fail);
            return Termination::Exhausted;
        }
        self.push_frame(0);
        loop {
            // Returning to the top frame retires its previous value, if any.
            if self.partial.len() == self.stack.len() {
                self.partial.pop();
            }
            let top = self.stack.last().expect("loop runs with a nonempty stack");
            let var = top.var;
            let domain = self.instance.domain(var);
            if top.next_value >= domain.len() {
                self.stats.exhaustions += 1;
                self.emit(|| TraceEvent::Exhaust { var });
                let dead = self.stack.pop().expect("exhausted frame is on the stack");
                match self.strategy {
                    Strategy::Chrono => {
                        if self.stack.is_empty() {
                            self.emit(|| TraceEvent::Fail);
                            break;
                        }
                    }
                    Strategy::Alg1 => {
                        let pairs = dead.elim_pairs.iter().map(|(_, e)| e);
                        let conflict = conflict_union(self.instance, pairs);
                        if !self.fail_with(conflict) {
                            break;
                        }
                    }
                    Strategy::Alg2 => {
                        if !self.fail_with(dead.explanation) {
                            break;
                        }
                    }
                }
                continue;
            }

            if self.max_trials.is_some_and(|max| self.stats.trials >= max) {
                return Termination::LimitReached;
            }
            let value = domain.trial_order()[top.next_value];
            let top = self
                .stack
                .last_mut()
                .expect("loop runs with a nonempty stack");
            top.next_value += 1;
            top.current = Some(value);
            self.stats.trials += 1;
            self.emit(|| TraceEvent::Assign { var, value });

            let (verdict, executed) = consistent_counted(self.instance, &self.partial, var, value);
            self.stats.consistency_checks += executed;
            match verdict {
                ConsistencyVerdict::Satisfied => {
                    self.partial.push(Assignment { var, value });
                    if self.partial.len() == self.instance.var_count() {
                        self.record_solution();
                        if self.quota_met() {
                            return Termination::FirstFound;
                        }
                        // keep enumerating: treat the solution as a failure
                        match self.strategy {
                            Strategy::Chrono => {}
                            Strategy::Alg1 | Strategy::Alg2 => {
                                let conflict = solution_conflict(&self.partial);
                                if !self.fail_with(conflict) {
                                    break;
                                }
                            }
                        }
                    } else {
                        let next = self.stack.len();
                        self.push_frame(next);
                    }
                }
                ConsistencyVerdict::Violated(conflict) => {
                    self.stats.local_conflicts += 1;
                    match self.strategy {
                        Strategy::Chrono => {}
                        Strategy::Alg1 | Strategy::Alg2 => {
                            if !self.fail_with(conflict) {
                                break;
                            }
                        }
                    }
                }
            }
        }
        if self.solutions.is_empty() {
            Termination::Unsatisfiable
        } else {
            Termination::Exhausted
        }
    }

    /// Saves `conflict` in the slot and resolves the failure: pops frames
    /// whose variable is outside the conflict, then folds the conflict into
    /// the culprit frame's elimination state so the main loop retries its
    /// next value. Returns `false` when the conflict is empty or no live
    /// frame matches it, meaning the search is over.
    fn fail_with(&mut self, conflict: ConflictSet) -> bool {
        self.emit(|| TraceEvent::ConflictSaved(conflict.clone()));
        self.slot.save(conflict);
        let conflict = self.slot.get().clone();
        if conflict.is_empty() {
            self.emit(|| TraceEvent::Fail);
            return false;
        }
        while let Some(top) = self.stack.last() {
            if conflict.contains(top.var) {
                // landing on the culprit: retire its assignment, record the
                // elimination, and let the main loop try its next value
                if self.partial.len() == self.stack.len() {
                    self.partial.pop();
                }
                let instance = self.instance;
                let strategy = self.strategy;
                let frame = self
                    .stack
                    .last_mut()
                    .expect("culprit frame is on the stack");
                match strategy {
                    Strategy::Alg2 => {
                        let merged =
                            merge_explanation(instance, &frame.explanation, &conflict, frame.var);
                        frame.explanation = merged;
                    }
                    Strategy::Alg1 => {
                        let eliminated = frame.current.expect("culprit frame has trialed a value");
                        frame
                            .elim_pairs
                            .push((eliminated, conflict.without(frame.var)));
                    }
                    Strategy::Chrono => {
                        unreachable!("chronological search never resolves conflicts")
                    }
                }
                return true;
            }
            let popped = self.stack.pop().expect("frame checked above");
            if self.partial.len() > self.stack.len() {
                self.partial.pop();
            }
            self.stats.backjumps += 1;
            self.emit(|| TraceEvent::Backjump { var: popped.var });
        }
        self.emit(|| TraceEvent::Fail);
        false
    }

    fn push_frame(&mut self, rank: usize) {
        self.stack.push(Frame {
            var: self.instance.order()[rank],
            next_value: 0,
            current: None,
            explanation: Explanation::empty(),
            elim_pairs: Vec::new(),
        });
    }

    fn record_solution(&mut self) {
        let solution: Solution = self.partial.entries().to_vec();
        self.emit(|| TraceEvent::Solution(solution.clone()));
        self.stats.solutions += 1;
        self.solutions.push(solution);
    }

    fn quota_met(&self) -> bool {
        self.quota.is_some_and(|q| self.solutions.len() as u64 >= q)
    }

    fn emit(&mut self, event: impl FnOnce() -> TraceEvent) {
        if let Some(sink) = self.sink.as_deref_mut() {
            sink.event(&event());
        }
    }
}

/// True iff `solution` is a full assignment of the two-interleaved-boards
/// benchmark family in which the odd-numbered variables form a valid
/// n-queens solution, the even-numbered variables form a valid n-queens
/// solution, and the two differ. Variable `2k-1` maps to queens column `k`,
/// likewise variable `2k`.
pub fn first_solution_contains_queens(solution: &[Assignment]) -> bool {
    let var_count = solution.len();
    if var_count == 0 || !var_count.is_multiple_of(2) {
        return false;
    }
    let n = var_count / 2;
    let mut by_id: Vec<Option<Value>> = vec![None; var_count];
    for a in solution {
        let id = a.var.0 as usize;
        if id == 0 || id > var_count || by_id[id - 1].is_some() {
            return false;
        }
        by_id[id - 1] = Some(a.value);
    }
    let odd: Vec<Value> = (1..=n).map(|k| by_id[2 * k - 2].unwrap()).collect();
    let even: Vec<Value> = (1..=n).map(|k| by_id[2 * k - 1].unwrap()).collect();
    valid_queens(&odd) && valid_queens(&even) && odd != even
}

/// Board validity: one value per column in `1..=n`, pairwise distinct rows,
/// no two on a common diagonal.
fn valid_queens(rows: &[Value]) -> bool {
    let n = rows.len() as u32;
    for (i, &a) in rows.iter().enumerate() {
        if a.0 < 1 || a.0 > n {
            return false;
        }
        for (j, &b) in rows.iter().enumerate().skip(i + 1) {
            if a == b || a.0.abs_diff(b.0) as usize == j - i {
                return false;
            }
        }
    }
    true
}
