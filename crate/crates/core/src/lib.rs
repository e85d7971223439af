//! Finite-domain constraint search with chronological backtracking and
//! conflict-directed backjumping.
//!
//! The crate solves binary CSPs whose consistency checking follows a fixed
//! per-variable check plan. Three interchangeable strategies drive the same
//! explicit choice-point stack and emit the same solutions in the same
//! order; the backjumping ones prune by recording eliminating explanations
//! and jumping straight to the culprit of each failure. Search effort is
//! fully instrumented (trials, checks, conflicts, backjumps) and every run
//! can stream a textual trace of its decisions.
//!
//! * [`model`]: variables, domains, constraints, check plans, and the
//!   consistency check.
//! * [`conflict`]: conflict sets, eliminating explanations, the conflict
//!   slot, culprits, and the hyperresolution union.
//! * [`engine`]: the three search strategies, statistics, and tracing.
//! * [`problems`]: benchmark generators and the instance file format.
//! * [`oracle`]: exhaustive generate-and-test enumeration, for
//!   cross-checking the engines.

pub mod conflict;
pub mod engine;
pub mod model;
pub mod oracle;
pub mod problems;

pub use conflict::{ConflictSet, ConflictSlot, Explanation, VarSet};
pub use engine::{
    first_solution_contains_queens, solve, SearchLimits, SearchOutcome, SearchStats, Solution,
    SolveMode, Strategy, Termination, TraceEvent, TraceSink,
};
pub use model::{
    check, consistent, Assignment, CheckPlan, ConsistencyVerdict, Constraint, CspInstance, Domain,
    PartialSolution, Value, VarId,
};
pub use problems::{paper_problem, parse_instance, queens, serialize_instance};
