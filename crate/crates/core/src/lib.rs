//! Core algorithms for unsplittable transshipment routing.
//!
//! A transshipment instance is a directed multigraph with rational arc
//! capacities and a balance function that designates sources (positive
//! balance) and sinks (negative balance). Given a feasible fractional
//! flow, the solver turns it into an *unsplittable* one: each
//! source--sink pair ships its amount along a single path. The price is
//! a bounded per-arc overshoot, strictly less than the maximum demand.
//!
//! The crate is `no_std` (with `alloc`); all arithmetic is exact over
//! arbitrary-precision rationals. IO, file formats and the command line
//! front end live in the companion `unsplit-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod flow;
pub mod fractional;
pub mod graph;
pub mod instances;
mod lp;
pub mod oracle;
pub mod rational;
pub mod rounds;
pub mod solver;
pub mod verify;

pub use flow::{
    cancel_cycles, decompose, excess, support_topological_order, CycleFlow, Decomposition, Flow,
    PathFlow, UnsplittableSolution,
};
pub use graph::{topological_order, validate_instance, Arc, ArcId, Instance, VertexId};
pub use oracle::{
    brute_force_feasible, min_violation, min_violation_confluent, Feasibility, ScaleGuard,
};
pub use rational::{parse_rational, rat, ratio, Rational};
pub use rounds::{
    best_round, build_copied_network, choose_n, classify_sinks, grid_groups_per_label,
    route_four_rounds, route_general_rounds, route_six_rounds, verify_round_plan, CopiedNetwork,
    PlanViolation, Round, RoundPlan, RoundsError, SinkClassification,
};
pub use solver::{
    derive_ssuf, solve_lower, solve_reversed, solve_single_source, solve_upper, Direction,
    SolveError, SolveEvent, SolveOptions, SolveRun, SolveStats, SolverState,
};
pub use verify::{
    check_bipartite_tree, check_confluence, check_load_bound, check_load_bound_with,
    check_unsplittable, solution_stats, CheckFailure, CheckReport, SolutionStats,
};
