//! Certificate checks for unsplittable solutions.
//!
//! Each check re-derives its verdict from the instance and the solution
//! alone, without trusting any solver bookkeeping. A failing check
//! always names a concrete witness: the arc, vertex, pair or cycle
//! where the property breaks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::flow::{Flow, UnsplittableSolution};
use crate::graph::{ArcId, Instance, VertexId};
use crate::rational::Rational;
use crate::solver::Direction;
use num_traits::Signed;

/// Summary numbers reported alongside every verdict.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolutionStats {
    pub paths: usize,
    /// Largest load/capacity ratio over positively capacitated arcs.
    pub congestion: Option<Rational>,
    /// Largest per-arc load minus reference flow, when a reference was given.
    pub max_increase: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckFailure {
    DuplicatePair { source: VertexId, sink: VertexId },
    NotASource(VertexId),
    NotASink(VertexId),
    NonpositiveValue { source: VertexId, sink: VertexId },
    EmptyPath { source: VertexId, sink: VertexId },
    UnknownArc(ArcId),
    BrokenChain { arc: ArcId, expected_tail: VertexId },
    RepeatedVertex { source: VertexId, sink: VertexId, vertex: VertexId },
    WrongEndpoint { arc: ArcId, sink: VertexId },
    ExcessMismatch { vertex: VertexId, expected: Rational, actual: Rational },
    LoadAboveBound { arc: ArcId, load: Rational, bound: Rational },
    LoadBelowBound { arc: ArcId, load: Rational, bound: Rational },
    ConfluenceViolation { sink: VertexId, vertex: VertexId, first: ArcId, second: ArcId },
    SinkReentered { sink: VertexId, arc: ArcId },
    TerminalCycle(Vec<VertexId>),
    TooManyPaths { count: usize, limit: usize },
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckFailure::DuplicatePair { source, sink } => {
                write!(f, "pair {source} -> {sink} is routed by more than one path")
            }
            CheckFailure::NotASource(v) => write!(f, "path starts at {v}, which has no supply"),
            CheckFailure::NotASink(v) => write!(f, "path ends at {v}, which has no demand"),
            CheckFailure::NonpositiveValue { source, sink } => {
                write!(f, "path {source} -> {sink} carries a nonpositive value")
            }
            CheckFailure::EmptyPath { source, sink } => {
                write!(f, "path {source} -> {sink} has no arcs")
            }
            CheckFailure::UnknownArc(a) => write!(f, "path uses arc {a} absent from the instance"),
            CheckFailure::BrokenChain { arc, expected_tail } => {
                write!(f, "arc {arc} does not continue the path at {expected_tail}")
            }
            CheckFailure::RepeatedVertex { source, sink, vertex } => {
                write!(f, "path {source} -> {sink} visits {vertex} twice")
            }
            CheckFailure::WrongEndpoint { arc, sink } => {
                write!(f, "path ends with arc {arc} instead of reaching {sink}")
            }
            CheckFailure::ExcessMismatch { vertex, expected, actual } => {
                write!(f, "superposed excess at {vertex} is {actual}, balance demands {expected}")
            }
            CheckFailure::LoadAboveBound { arc, load, bound } => {
                write!(f, "load {load} on arc {arc} reaches the upper bound {bound}")
            }
            CheckFailure::LoadBelowBound { arc, load, bound } => {
                write!(f, "load {load} on arc {arc} reaches the lower bound {bound}")
            }
            CheckFailure::ConfluenceViolation { sink, vertex, first, second } => {
                write!(
                    f,
                    "paths into {sink} leave {vertex} through both {first} and {second}"
                )
            }
            CheckFailure::SinkReentered { sink, arc } => {
                write!(f, "a path into {sink} leaves it again through {arc}")
            }
            CheckFailure::TerminalCycle(cycle) => {
                write!(f, "source-sink pairing closes a cycle:")?;
                for v in cycle {
                    write!(f, " {v}")?;
                }
                Ok(())
            }
            CheckFailure::TooManyPaths { count, limit } => {
                write!(f, "{count} paths exceed the tree limit of {limit}")
            }
        }
    }
}

/// Verdict of one check: pass/fail, the witnesses, and summary stats.
/// Bound checks additionally report the arc with the least slack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub passed: bool,
    pub failures: Vec<CheckFailure>,
    pub stats: SolutionStats,
    pub tight_arc: Option<ArcId>,
    pub slack: Option<Rational>,
}

impl CheckReport {
    fn from_failures(failures: Vec<CheckFailure>, stats: SolutionStats) -> Self {
        CheckReport {
            passed: failures.is_empty(),
            failures,
            stats,
            tight_arc: None,
            slack: None,
        }
    }
}

/// Per-arc loads, tolerating unknown arc ids (which other checks flag).
fn loads_of(inst: &Instance, sol: &UnsplittableSolution) -> Flow {
    let mut values: Vec<(ArcId, Rational)> = Vec::new();
    let mut index: BTreeMap<ArcId, usize> = BTreeMap::new();
    for path in &sol.paths {
        for &a in &path.arcs {
            if inst.arc_index(a).is_none() {
                continue;
            }
            match index.get(&a) {
                Some(&i) => values[i].1 += &path.value,
                None => {
                    index.insert(a, values.len());
                    values.push((a, path.value.clone()));
                }
            }
        }
    }
    Flow::from_pairs(inst, values).expect("known arcs cannot collide")
}

/// Stats shared by all checks; `reference` is the fractional flow the
/// increase is measured against, when one is at hand.
pub fn solution_stats(
    inst: &Instance,
    sol: &UnsplittableSolution,
    reference: Option<&Flow>,
) -> SolutionStats {
    let loads = loads_of(inst, sol);
    let congestion = inst
        .arcs()
        .iter()
        .filter(|arc| arc.capacity.is_positive())
        .map(|arc| loads.value(inst, arc.id) / &arc.capacity)
        .max();
    let max_increase = reference.and_then(|x| {
        inst.arcs()
            .iter()
            .map(|arc| loads.value(inst, arc.id) - x.value(inst, arc.id))
            .max()
    });
    SolutionStats {
        paths: sol.paths.len(),
        congestion,
        max_increase,
    }
}

/// Pair uniqueness, path simplicity, and exact superposition: the three
/// parts of being an unsplittable transshipment for this instance.
pub fn check_unsplittable(inst: &Instance, sol: &UnsplittableSolution) -> CheckReport {
    let mut failures = Vec::new();
    let mut pairs = BTreeSet::new();
    let mut arcs_known = true;
    for path in &sol.paths {
        if !pairs.insert((path.source, path.sink)) {
            failures.push(CheckFailure::DuplicatePair {
                source: path.source,
                sink: path.sink,
            });
        }
        if !inst
            .vertex_index(path.source)
            .map(|_| inst.balance(path.source).is_positive())
            .unwrap_or(false)
        {
            failures.push(CheckFailure::NotASource(path.source));
        }
        if !inst
            .vertex_index(path.sink)
            .map(|_| inst.balance(path.sink).is_negative())
            .unwrap_or(false)
        {
            failures.push(CheckFailure::NotASink(path.sink));
        }
        if !path.value.is_positive() {
            failures.push(CheckFailure::NonpositiveValue {
                source: path.source,
                sink: path.sink,
            });
        }
        if path.arcs.is_empty() {
            failures.push(CheckFailure::EmptyPath {
                source: path.source,
                sink: path.sink,
            });
            continue;
        }
        let mut at = path.source;
        let mut seen = BTreeSet::new();
        seen.insert(at);
        let mut intact = true;
        for &a in &path.arcs {
            let Some(idx) = inst.arc_index(a) else {
                failures.push(CheckFailure::UnknownArc(a));
                arcs_known = false;
                intact = false;
                break;
            };
            let arc = &inst.arcs()[idx];
            if arc.tail != at {
                failures.push(CheckFailure::BrokenChain {
                    arc: a,
                    expected_tail: at,
                });
                intact = false;
                break;
            }
            at = arc.head;
            if !seen.insert(at) {
                failures.push(CheckFailure::RepeatedVertex {
                    source: path.source,
                    sink: path.sink,
                    vertex: at,
                });
                intact = false;
                break;
            }
        }
        if intact && at != path.sink {
            failures.push(CheckFailure::WrongEndpoint {
                arc: *path.arcs.last().expect("nonempty"),
                sink: path.sink,
            });
        }
    }
    if arcs_known {
        let loads = loads_of(inst, sol);
        for &v in inst.vertex_ids() {
            let actual = crate::flow::excess(inst, &loads, v);
            if actual != *inst.balance(v) {
                failures.push(CheckFailure::ExcessMismatch {
                    vertex: v,
                    expected: inst.balance(v).clone(),
                    actual,
                });
            }
        }
    }
    CheckReport::from_failures(failures, solution_stats(inst, sol, None))
}

/// Strict per-arc comparison against the reference flow, with the
/// guarantee margin of the chosen direction: loads stay below
/// `x + d_max` (upper) or above `x - d_max` (lower).
pub fn check_load_bound(
    inst: &Instance,
    x: &Flow,
    sol: &UnsplittableSolution,
    direction: Direction,
) -> CheckReport {
    check_load_bound_with(inst, x, sol, direction, &inst.max_demand())
}

/// Same strict comparison with an explicit margin; the reversed
/// pipeline is checked this way with the largest supply as margin.
pub fn check_load_bound_with(
    inst: &Instance,
    x: &Flow,
    sol: &UnsplittableSolution,
    direction: Direction,
    margin: &Rational,
) -> CheckReport {
    let loads = loads_of(inst, sol);
    let mut failures = Vec::new();
    let mut tightest: Option<(ArcId, Rational)> = None;
    for arc in inst.arcs().iter() {
        let load = loads.value(inst, arc.id);
        let (slack, violated) = match direction {
            Direction::Upper => {
                let bound = x.value(inst, arc.id) + margin;
                (&bound - load, *load >= bound)
            }
            Direction::Lower => {
                let bound = x.value(inst, arc.id) - margin;
                (load - &bound, *load <= bound)
            }
        };
        if violated {
            let bound = match direction {
                Direction::Upper => x.value(inst, arc.id) + margin,
                Direction::Lower => x.value(inst, arc.id) - margin,
            };
            let failure = match direction {
                Direction::Upper => CheckFailure::LoadAboveBound {
                    arc: arc.id,
                    load: load.clone(),
                    bound,
                },
                Direction::Lower => CheckFailure::LoadBelowBound {
                    arc: arc.id,
                    load: load.clone(),
                    bound,
                },
            };
            failures.push(failure);
        }
        if tightest.as_ref().map(|(_, s)| slack < *s).unwrap_or(true) {
            tightest = Some((arc.id, slack));
        }
    }
    let mut report =
        CheckReport::from_failures(failures, solution_stats(inst, sol, Some(x)));
    if let Some((arc, slack)) = tightest {
        report.tight_arc = Some(arc);
        report.slack = Some(slack);
    }
    report
}

/// Confluence: per sink, the union of its paths' arcs must leave every
/// vertex through a single arc, so the union is an in-tree at the sink.
pub fn check_confluence(inst: &Instance, sol: &UnsplittableSolution) -> CheckReport {
    let mut failures = Vec::new();
    let mut choice: BTreeMap<(VertexId, VertexId), ArcId> = BTreeMap::new();
    for path in &sol.paths {
        for &a in &path.arcs {
            let Some(idx) = inst.arc_index(a) else { continue };
            let tail = inst.arcs()[idx].tail;
            if tail == path.sink {
                failures.push(CheckFailure::SinkReentered {
                    sink: path.sink,
                    arc: a,
                });
                continue;
            }
            match choice.get(&(path.sink, tail)) {
                Some(&prev) if prev != a => {
                    failures.push(CheckFailure::ConfluenceViolation {
                        sink: path.sink,
                        vertex: tail,
                        first: prev,
                        second: a,
                    });
                }
                Some(_) => {}
                None => {
                    choice.insert((path.sink, tail), a);
                }
            }
        }
    }
    failures.dedup();
    CheckReport::from_failures(failures, solution_stats(inst, sol, None))
}

/// Pairing structure: sources and sinks joined by an edge per path must
/// form a forest, hence at most |sources| + |sinks| - 1 paths.
pub fn check_bipartite_tree(inst: &Instance, sol: &UnsplittableSolution) -> CheckReport {
    let mut failures = Vec::new();
    let mut adjacency: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    let mut edges: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for path in &sol.paths {
        if !edges.insert((path.source, path.sink)) {
            continue;
        }
        if let Some(cycle) = terminal_cycle(&adjacency, path.source, path.sink) {
            failures.push(CheckFailure::TerminalCycle(cycle));
        }
        adjacency.entry(path.source).or_default().push(path.sink);
        adjacency.entry(path.sink).or_default().push(path.source);
    }
    let sources = inst.sources().len();
    let sinks = inst.sinks().len();
    if sources + sinks > 0 && sol.paths.len() + 1 > sources + sinks {
        failures.push(CheckFailure::TooManyPaths {
            count: sol.paths.len(),
            limit: sources + sinks - 1,
        });
    }
    CheckReport::from_failures(failures, solution_stats(inst, sol, None))
}

/// Path between two terminals in the pairing graph built so far; adding
/// the edge that prompted the query would close this into a cycle.
fn terminal_cycle(
    adjacency: &BTreeMap<VertexId, Vec<VertexId>>,
    from: VertexId,
    to: VertexId,
) -> Option<Vec<VertexId>> {
    let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut queue: Vec<VertexId> = Vec::new();
    parent.insert(from, from);
    queue.push(from);
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        if v == to {
            let mut cycle = Vec::new();
            let mut cur = to;
            while cur != from {
                cycle.push(cur);
                cur = parent[&cur];
            }
            cycle.push(from);
            cycle.reverse();
            return Some(cycle);
        }
        for &w in adjacency.get(&v).into_iter().flatten() {
            parent.entry(w).or_insert_with(|| {
                queue.push(w);
                v
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::PathFlow;
    use crate::instances::{gen_random, DemandRegime, RandomSize};
    use crate::rational::{rat, ratio};
    use crate::solver::{solve_lower, solve_reversed, solve_upper};
    use alloc::vec;

    fn v(n: u32) -> VertexId {
        VertexId(n)
    }

    fn a(n: u32) -> ArcId {
        ArcId(n)
    }

    fn inst(
        vertices: Vec<(u32, Rational)>,
        arcs: Vec<(u32, u32, u32, Rational)>,
    ) -> Instance {
        Instance::new(
            vertices.into_iter().map(|(id, b)| (v(id), b)).collect(),
            arcs.into_iter()
                .map(|(id, t, h, c)| (a(id), v(t), v(h), c))
                .collect(),
        )
        .unwrap()
    }

    fn path(source: u32, sink: u32, value: Rational, arcs: Vec<u32>) -> PathFlow {
        PathFlow {
            source: v(source),
            sink: v(sink),
            value,
            arcs: arcs.into_iter().map(a).collect(),
        }
    }

    fn unit_link() -> Instance {
        inst(
            vec![(0, rat(1)), (1, rat(-1))],
            vec![(0, 0, 1, rat(10))],
        )
    }

    #[test]
    fn accepts_a_direct_delivery() {
        let i = unit_link();
        let sol = UnsplittableSolution {
            paths: vec![path(0, 1, rat(1), vec![0])],
        };
        let report = check_unsplittable(&i, &sol);
        assert!(report.passed, "{:?}", report.failures);
        assert_eq!(report.stats.paths, 1);
        assert_eq!(report.stats.congestion, Some(ratio(1, 10)));
    }

    #[test]
    fn flags_a_duplicated_pair() {
        let i = inst(
            vec![(0, rat(2)), (1, rat(-2))],
            vec![(0, 0, 1, rat(5)), (1, 0, 1, rat(5))],
        );
        let sol = UnsplittableSolution {
            paths: vec![
                path(0, 1, rat(1), vec![0]),
                path(0, 1, rat(1), vec![1]),
            ],
        };
        let report = check_unsplittable(&i, &sol);
        assert!(!report.passed);
        assert!(report.failures.contains(&CheckFailure::DuplicatePair {
            source: v(0),
            sink: v(1),
        }));
    }

    #[test]
    fn flags_an_excess_mismatch() {
        let i = unit_link();
        let sol = UnsplittableSolution {
            paths: vec![path(0, 1, rat(2), vec![0])],
        };
        let report = check_unsplittable(&i, &sol);
        assert!(report.failures.iter().any(|f| matches!(
            f,
            CheckFailure::ExcessMismatch { vertex, .. } if *vertex == v(0)
        )));
    }

    #[test]
    fn flags_a_vertex_revisit() {
        let i = inst(
            vec![(0, rat(1)), (1, rat(0)), (2, rat(-1))],
            vec![
                (0, 0, 1, rat(5)),
                (1, 1, 0, rat(5)),
                (2, 0, 2, rat(5)),
            ],
        );
        let sol = UnsplittableSolution {
            paths: vec![path(0, 2, rat(1), vec![0, 1, 2])],
        };
        let report = check_unsplittable(&i, &sol);
        assert!(report.failures.contains(&CheckFailure::RepeatedVertex {
            source: v(0),
            sink: v(2),
            vertex: v(0),
        }));
    }

    #[test]
    fn bound_check_names_the_overloaded_arc() {
        let i = unit_link();
        let x = Flow::from_pairs(&i, vec![(a(0), rat(1))]).unwrap();
        let fine = UnsplittableSolution {
            paths: vec![path(0, 1, rat(1), vec![0])],
        };
        let report = check_load_bound(&i, &x, &fine, Direction::Upper);
        assert!(report.passed);
        assert_eq!(report.tight_arc, Some(a(0)));
        assert_eq!(report.slack, Some(rat(1)));

        let heavy = UnsplittableSolution {
            paths: vec![path(0, 1, rat(3), vec![0])],
        };
        let report = check_load_bound(&i, &x, &heavy, Direction::Upper);
        assert!(!report.passed);
        assert!(report.failures.contains(&CheckFailure::LoadAboveBound {
            arc: a(0),
            load: rat(3),
            bound: rat(2),
        }));
        assert_eq!(report.stats.max_increase, Some(rat(2)));
    }

    #[test]
    fn lower_bound_check_is_vacuous_at_zero_reference() {
        let i = unit_link();
        let x = Flow::from_pairs(&i, vec![(a(0), rat(0))]).unwrap();
        let sol = UnsplittableSolution { paths: vec![] };
        let report = check_load_bound(&i, &x, &sol, Direction::Lower);
        assert!(report.passed);
    }

    #[test]
    fn empty_instance_passes_vacuously() {
        let i = inst(vec![], vec![]);
        let x = Flow::from_pairs(&i, vec![]).unwrap();
        let sol = UnsplittableSolution { paths: vec![] };
        assert!(check_unsplittable(&i, &sol).passed);
        assert!(check_load_bound(&i, &x, &sol, Direction::Upper).passed);
        assert!(check_confluence(&i, &sol).passed);
        assert!(check_bipartite_tree(&i, &sol).passed);
    }

    #[test]
    fn confluence_check_finds_the_split_vertex() {
        let i = inst(
            vec![
                (0, rat(1)),
                (1, rat(0)),
                (2, rat(0)),
                (3, rat(-2)),
                (4, rat(1)),
            ],
            vec![
                (0, 0, 1, rat(5)),
                (1, 1, 3, rat(5)),
                (2, 4, 1, rat(5)),
                (3, 1, 2, rat(5)),
                (4, 2, 3, rat(5)),
            ],
        );
        let sol = UnsplittableSolution {
            paths: vec![
                path(0, 3, rat(1), vec![0, 1]),
                path(4, 3, rat(1), vec![2, 3, 4]),
            ],
        };
        let report = check_confluence(&i, &sol);
        assert!(!report.passed);
        assert!(report.failures.contains(&CheckFailure::ConfluenceViolation {
            sink: v(3),
            vertex: v(1),
            first: a(1),
            second: a(3),
        }));
        assert!(check_unsplittable(&i, &sol).passed);
    }

    #[test]
    fn complete_pairing_closes_a_cycle() {
        let i = inst(
            vec![(0, rat(2)), (1, rat(2)), (2, rat(-2)), (3, rat(-2))],
            vec![
                (0, 0, 2, rat(5)),
                (1, 0, 3, rat(5)),
                (2, 1, 2, rat(5)),
                (3, 1, 3, rat(5)),
            ],
        );
        let sol = UnsplittableSolution {
            paths: vec![
                path(0, 2, rat(1), vec![0]),
                path(0, 3, rat(1), vec![1]),
                path(1, 2, rat(1), vec![2]),
                path(1, 3, rat(1), vec![3]),
            ],
        };
        let report = check_bipartite_tree(&i, &sol);
        assert!(!report.passed);
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, CheckFailure::TerminalCycle(_))));
        assert!(report.failures.contains(&CheckFailure::TooManyPaths {
            count: 4,
            limit: 3,
        }));
    }

    #[test]
    fn single_source_pairings_are_stars() {
        let i = inst(
            vec![(0, rat(2)), (1, rat(-1)), (2, rat(-1))],
            vec![(0, 0, 1, rat(5)), (1, 0, 2, rat(5))],
        );
        let sol = UnsplittableSolution {
            paths: vec![
                path(0, 1, rat(1), vec![0]),
                path(0, 2, rat(1), vec![1]),
            ],
        };
        assert!(check_bipartite_tree(&i, &sol).passed);
    }

    #[test]
    fn solver_output_passes_every_check() {
        let size = RandomSize {
            vertices: 11,
            paths: 8,
            extra_arcs: 4,
        };
        for seed in 0..12 {
            let (i, x) = gen_random(seed, size, DemandRegime::Below);
            let d_max = i.max_demand();

            let up = solve_upper(&i, &x).unwrap();
            assert!(check_unsplittable(&i, &up.solution).passed);
            assert!(check_load_bound(&i, &x, &up.solution, Direction::Upper).passed);
            assert!(check_confluence(&i, &up.solution).passed);
            assert!(check_bipartite_tree(&i, &up.solution).passed);
            let report = check_load_bound(&i, &x, &up.solution, Direction::Upper);
            if let Some(increase) = report.stats.max_increase.clone() {
                assert!(increase < d_max);
            }

            let low = solve_lower(&i, &x).unwrap();
            assert!(check_unsplittable(&i, &low.solution).passed);
            assert!(check_load_bound(&i, &x, &low.solution, Direction::Lower).passed);
            assert!(check_confluence(&i, &low.solution).passed);
            assert!(check_bipartite_tree(&i, &low.solution).passed);

            let rev = solve_reversed(&i, &x).unwrap();
            let supply = i
                .sources()
                .iter()
                .map(|&s| i.balance(s).clone())
                .max()
                .unwrap_or_else(|| rat(0));
            assert!(check_unsplittable(&i, &rev.solution).passed);
            assert!(
                check_load_bound_with(&i, &x, &rev.solution, Direction::Upper, &supply).passed
            );
            assert!(check_bipartite_tree(&i, &rev.solution).passed);
        }
    }
}
