//! Unsplittable routing by iterative flow reduction.
//!
//! Starting from a fractional transshipment, the solver attaches a super
//! source feeding every original source, then repeatedly restructures the
//! remaining flow until every sink's demand has been walked back to the super
//! source along a single path. Each iteration either augments along an
//! alternating cycle or consumes a singular sub-digraph wholesale; both
//! strictly shrink the set of arcs carrying flow, so the process terminates.
//!
//! The headline guarantee of [`solve_upper`] is that the unsplittable paths
//! load every arc to strictly less than its fractional flow plus the largest
//! single demand. [`solve_lower`] mirrors the augmentation direction and keeps
//! every arc's load strictly above its fractional flow minus the largest
//! demand. [`solve_reversed`] runs the upper variant on the reversed network,
//! trading the demand term for the largest supply.

mod derive;
mod routing;
mod search;
mod state;

pub use derive::{derive_ssuf, SsufDerivation};
pub use search::{NiceCycle, SearchResult, SingularDigraph, WalkDir};
pub use state::SolverState;

use alloc::vec::Vec;

use crate::flow::{cancel_cycles, excess, Flow, UnsplittableSolution};
use crate::graph::{Arc, ArcId, Instance, VertexId};
use crate::rational::Rational;
use num_traits::{Signed, Zero};

/// Which side of the fractional flow the final loads must stay on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Loads stay strictly below `x_a + d_max`.
    Upper,
    /// Loads stay strictly above `x_a - d_max`.
    Lower,
}

/// Knobs for a solver run.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Re-check the internal invariants after every iteration. Expensive on
    /// large inputs, invaluable when changing the solver. Defaults to on for
    /// debug builds.
    pub check_invariants: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            check_invariants: cfg!(debug_assertions),
        }
    }
}

/// Identity of a sub-sink: the original sink vertex plus a split counter.
/// Counter zero is the sink as it entered the run; every split mints fresh
/// counters for the pieces that continue independently.
pub type SubSinkId = (VertexId, u32);

/// Why a sub-sink moved across an arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveRule {
    /// Demand-saturating arc consumed before the first labeling pass.
    Preliminary,
    /// Singular arc carrying exactly the sub-sink's demand.
    ExactSingular,
    /// Non-singular arc carrying at least the sub-sink's demand.
    NonSingular,
    /// Movement during the consumption of a singular sub-digraph.
    Peel,
}

/// Trace of one solver action, kept for replay checks and classification.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveEvent {
    /// A sub-sink moved one arc closer to the super source.
    SinkMove {
        sink: SubSinkId,
        arc: ArcId,
        rule: MoveRule,
    },
    /// Flow shifted around an alternating cycle.
    CycleAugment {
        delta: Rational,
        forward: Vec<ArcId>,
        backward: Vec<ArcId>,
    },
    /// The sink at the root of a singular sub-digraph split in two; `kept`
    /// stays behind to consume the entering arc, `routed` is served by the
    /// sub-digraph itself.
    RootSplit {
        sink: SubSinkId,
        junction: VertexId,
        entering: ArcId,
        kept: Rational,
        routed: Rational,
    },
    /// A sub-sink met along a peeling walk was larger than the walk's
    /// bottleneck and split; `routed` departed, `kept` stayed put.
    PeelSplit {
        sink: SubSinkId,
        at: VertexId,
        kept: Rational,
        routed: Rational,
    },
    /// A singular sub-digraph was consumed entirely.
    SdRouted {
        root: VertexId,
        entering: ArcId,
        arcs: Vec<ArcId>,
    },
    /// A sub-sink arrived at the super source. `path` lists the arcs of its
    /// journey in forward order, dummy arc first.
    Delivered {
        sink: SubSinkId,
        source: VertexId,
        value: Rational,
        path: Vec<ArcId>,
    },
}

/// Aggregate figures for a finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub paths: usize,
    /// Largest `load_a - x_a` over the original arcs.
    pub max_increase: Rational,
}

/// Everything a solver run produces.
#[derive(Debug, Clone)]
pub struct SolveRun {
    pub solution: UnsplittableSolution,
    pub stats: SolveStats,
    pub events: Vec<SolveEvent>,
    pub derivation: SsufDerivation,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    /// The input flow does not match the instance balances.
    NotTransshipment(VertexId),
    /// The input flow carries a negative value.
    NegativeArcValue(ArcId),
    /// `solve_single_source` was handed an instance with several sources.
    NotSingleSource,
    /// An internal invariant broke; indicates a solver bug, never bad input.
    Internal(&'static str),
}

impl core::fmt::Display for SolveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SolveError::NotTransshipment(v) => {
                write!(f, "flow does not meet the balance at vertex {v}")
            }
            SolveError::NegativeArcValue(a) => write!(f, "flow on arc {a} is negative"),
            SolveError::NotSingleSource => write!(f, "instance has more than one source"),
            SolveError::Internal(msg) => write!(f, "internal solver invariant broken: {msg}"),
        }
    }
}

/// Routes each source-sink pair along at most one path so that every arc
/// carries strictly less than `x_a + d_max`.
pub fn solve_upper(inst: &Instance, x: &Flow) -> Result<SolveRun, SolveError> {
    solve_with(inst, x, Direction::Upper, SolveOptions::default())
}

/// Routes each source-sink pair along at most one path so that every arc
/// carries strictly more than `x_a - d_max`.
pub fn solve_lower(inst: &Instance, x: &Flow) -> Result<SolveRun, SolveError> {
    solve_with(inst, x, Direction::Lower, SolveOptions::default())
}

/// Single-source front-end for [`solve_upper`]; rejects instances with more
/// than one source since the sharper classical guarantees only make sense
/// there.
pub fn solve_single_source(inst: &Instance, x: &Flow) -> Result<SolveRun, SolveError> {
    if inst.sources().len() > 1 {
        return Err(SolveError::NotSingleSource);
    }
    solve_upper(inst, x)
}

/// Runs the upper variant on the reversed network and maps the paths back,
/// so every arc carries strictly less than `x_a` plus the largest supply.
pub fn solve_reversed(inst: &Instance, x: &Flow) -> Result<SolveRun, SolveError> {
    let (rev, rx) = reverse_instance(inst, x)?;
    let mut run = solve_with(&rev, &rx, Direction::Upper, SolveOptions::default())?;
    for path in &mut run.solution.paths {
        core::mem::swap(&mut path.source, &mut path.sink);
        path.arcs.reverse();
    }
    run.solution
        .paths
        .sort_by_key(|p| (p.source, p.sink));
    run.stats.max_increase = max_increase(inst, x, &run.solution);
    Ok(run)
}

/// Full-control entry point shared by the public variants.
pub fn solve_with(
    inst: &Instance,
    x: &Flow,
    direction: Direction,
    options: SolveOptions,
) -> Result<SolveRun, SolveError> {
    check_is_transshipment(inst, x)?;
    let acyclic = cancel_cycles(inst, x);
    let derivation = derive_ssuf(inst, &acyclic)?;
    let mut state = SolverState::new(&derivation, direction, options);
    state.run_to_completion()?;
    let (solution, iterations, events) = state.finish()?;
    let stats = SolveStats {
        iterations,
        paths: solution.paths.len(),
        max_increase: max_increase(inst, x, &solution),
    };
    Ok(SolveRun {
        solution,
        stats,
        events,
        derivation,
    })
}

fn max_increase(inst: &Instance, x: &Flow, solution: &UnsplittableSolution) -> Rational {
    let loads = solution.arc_loads(inst);
    let mut worst = Rational::zero();
    let mut first = true;
    for arc in inst.arcs().iter() {
        let diff = loads.value(inst, arc.id) - x.value(inst, arc.id);
        if first || diff > worst {
            worst = diff;
            first = false;
        }
    }
    worst
}

fn reverse_instance(inst: &Instance, x: &Flow) -> Result<(Instance, Flow), SolveError> {
    let vertices: Vec<(VertexId, Rational)> = inst
        .vertex_ids()
        .iter()
        .map(|&v| (v, -inst.balance(v)))
        .collect();
    let arcs: Vec<(ArcId, VertexId, VertexId, Rational)> = inst
        .arcs()
        .iter()
        .map(|a: &Arc| (a.id, a.head, a.tail, a.capacity.clone()))
        .collect();
    let rev = Instance::new(vertices, arcs)
        .map_err(|_| SolveError::Internal("reversal rebuilt an invalid instance"))?;
    let pairs: Vec<(ArcId, Rational)> = inst
        .arcs()
        .iter()
        .map(|a| (a.id, x.value(inst, a.id).clone()))
        .collect();
    let rx = Flow::from_pairs(&rev, pairs)
        .map_err(|_| SolveError::Internal("reversal lost an arc"))?;
    Ok((rev, rx))
}

/// Checks that `x` respects the instance balances and is non-negative.
pub(crate) fn check_is_transshipment(inst: &Instance, x: &Flow) -> Result<(), SolveError> {
    for arc in inst.arcs().iter() {
        if x.value(inst, arc.id).is_negative() {
            return Err(SolveError::NegativeArcValue(arc.id));
        }
    }
    for &v in inst.vertex_ids() {
        if excess(inst, x, v) != *inst.balance(v) {
            return Err(SolveError::NotTransshipment(v));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ArcId, Instance, VertexId};
    use crate::instances::{gen_nonintegral, gen_random, DemandRegime, RandomSize};
    use crate::rational::{rat, ratio};
    use alloc::vec;
    use alloc::vec::Vec;
    use std::collections::{BTreeMap, BTreeSet};

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

    fn flow(i: &Instance, pairs: Vec<(u32, Rational)>) -> Flow {
        Flow::from_pairs(i, pairs.into_iter().map(|(id, x)| (a(id), x)).collect()).unwrap()
    }

    /// Chain with two sinks: 0 (+2) -> 1 (-1) -> 2 (-1).
    fn chain() -> (Instance, Flow) {
        let i = inst(
            vec![(0, rat(2)), (1, rat(-1)), (2, rat(-1))],
            vec![(0, 0, 1, rat(2)), (1, 1, 2, rat(1))],
        );
        let x = flow(&i, vec![(0, rat(2)), (1, rat(1))]);
        (i, x)
    }

    /// Two sources, two sinks, a shared middle: closing the walk needs both
    /// a forward merge and two backward escapes.
    fn merge() -> (Instance, Flow) {
        let i = inst(
            vec![
                (0, rat(2)),
                (1, rat(2)),
                (2, rat(0)),
                (3, rat(-2)),
                (4, rat(-2)),
            ],
            vec![
                (0, 0, 2, rat(1)),
                (1, 1, 2, rat(1)),
                (2, 2, 3, rat(2)),
                (3, 0, 4, rat(1)),
                (4, 1, 4, rat(1)),
            ],
        );
        let x = flow(
            &i,
            vec![(0, rat(1)), (1, rat(1)), (2, rat(2)), (3, rat(1)), (4, rat(1))],
        );
        (i, x)
    }

    /// One junction fed by a thin arc and a fat one; the probe finds no
    /// escape, so the fat side becomes a one-arc tree.
    fn basin() -> (Instance, Flow) {
        let i = inst(
            vec![(0, rat(1)), (1, rat(2)), (2, rat(-3))],
            vec![(0, 0, 2, rat(1)), (1, 1, 2, rat(2))],
        );
        let x = flow(&i, vec![(0, rat(1)), (1, rat(2))]);
        (i, x)
    }

    #[test]
    fn derivation_adds_one_dummy_arc_per_source() {
        let i = inst(
            vec![(0, rat(3)), (1, rat(-3))],
            vec![(0, 0, 1, rat(3))],
        );
        let x = flow(&i, vec![(0, rat(3))]);
        let d = derive_ssuf(&i, &x).unwrap();
        assert_eq!(d.super_source, v(2));
        assert_eq!(d.dummies.len(), 1);
        let dummy = d.dummies[&v(0)];
        assert_eq!(dummy, a(1));
        assert_eq!(*d.flow.value(&d.instance, dummy), rat(3));
        assert_eq!(d.demands[&v(1)], rat(3));
        assert_eq!(d.d_max, rat(3));
        assert!(d.is_dummy(dummy));
        assert!(!d.is_dummy(a(0)));
    }

    #[test]
    fn derivation_of_the_split_demand_instance() {
        let (i, x) = gen_nonintegral();
        let d = derive_ssuf(&i, &x).unwrap();
        assert_eq!(d.super_source, v(8));
        assert_eq!(*d.flow.value(&d.instance, d.dummies[&v(0)]), rat(5));
        assert_eq!(*d.flow.value(&d.instance, d.dummies[&v(1)]), rat(15));
        assert_eq!(d.demands[&v(6)], rat(8));
        assert_eq!(d.demands[&v(7)], rat(12));
        assert_eq!(d.d_max, rat(12));
    }

    #[test]
    fn preliminary_consumes_saturating_arcs_to_the_end() {
        let (i, x) = chain();
        let run = solve_upper(&i, &x).unwrap();
        assert_eq!(run.stats.iterations, 0);
        assert_eq!(run.stats.paths, 2);
        let p = &run.solution.paths;
        assert_eq!(p[0].source, v(0));
        assert_eq!(p[0].sink, v(1));
        assert_eq!(p[0].value, rat(1));
        assert_eq!(p[0].arcs, vec![a(0)]);
        assert_eq!(p[1].sink, v(2));
        assert_eq!(p[1].arcs, vec![a(0), a(1)]);
    }

    #[test]
    fn label_marks_funnels_and_singular_arcs() {
        let (i, x) = merge();
        let d = derive_ssuf(&i, &x).unwrap();
        let mut s = SolverState::new(&d, Direction::Upper, SolveOptions::default());
        s.run_preliminary().unwrap();
        s.label().unwrap();
        // The middle arc was consumed up front, so 2 and 4 are dead ends.
        assert!(s.is_funnel(v(2)));
        assert!(s.is_funnel(v(4)));
        assert!(!s.is_funnel(v(0)));
        assert!(!s.is_funnel(v(1)));
        assert!(s.is_singular(a(0)));
        assert!(s.is_singular(a(1)));
        assert!(s.is_singular(a(3)));
        assert!(s.is_singular(a(4)));
        // Dummies into branching sources are not singular.
        assert!(!s.is_singular(d.dummies[&v(0)]));
        assert!(!s.is_singular(d.dummies[&v(1)]));
    }

    #[test]
    fn move_rules_skip_oversized_singular_arcs() {
        let (i, x) = chain();
        let d = derive_ssuf(&i, &x).unwrap();
        let mut s = SolverState::new(&d, Direction::Upper, SolveOptions::default());
        s.label().unwrap();
        s.move_sinks().unwrap();
        // The back sink walked its exact singular arc; the front sink faces
        // an arc carrying twice its demand and must stay.
        assert!(!s.is_live(a(1)));
        assert!(s.is_live(a(0)));
        assert_eq!(*s.flow_value(a(0)).unwrap(), rat(2));
        let stuck = s.subsinks_at(v(1));
        assert_eq!(stuck.len(), 2);
        assert_eq!(stuck[0].0, (v(1), 0));
        assert_eq!(stuck[1].0, (v(2), 0));
    }

    #[test]
    fn walk_closes_into_an_alternating_cycle() {
        let (i, x) = merge();
        let d = derive_ssuf(&i, &x).unwrap();
        let mut s = SolverState::new(&d, Direction::Upper, SolveOptions::default());
        s.run_preliminary().unwrap();
        s.label().unwrap();
        match s.find_structure().unwrap() {
            SearchResult::NiceCycle(c) => {
                assert_eq!(
                    c.steps,
                    vec![
                        (a(0), WalkDir::Forward),
                        (a(1), WalkDir::Backward),
                        (a(4), WalkDir::Forward),
                        (a(3), WalkDir::Backward),
                    ]
                );
            }
            other => panic!("expected a cycle, found {other:?}"),
        }
    }

    #[test]
    fn augmentation_drains_the_forward_side() {
        let (i, x) = merge();
        let d = derive_ssuf(&i, &x).unwrap();
        let mut s = SolverState::new(&d, Direction::Upper, SolveOptions::default());
        s.run_preliminary().unwrap();
        s.label().unwrap();
        let cycle = match s.find_structure().unwrap() {
            SearchResult::NiceCycle(c) => c,
            other => panic!("expected a cycle, found {other:?}"),
        };
        s.augment_nice_cycle(&cycle).unwrap();
        assert!(!s.is_live(a(0)));
        assert!(!s.is_live(a(4)));
        assert_eq!(*s.flow_value(a(1)).unwrap(), rat(2));
        assert_eq!(*s.flow_value(a(3)).unwrap(), rat(2));
        // Both raised arcs now carry exactly the demands at their heads.
        s.move_sinks().unwrap();
        assert_eq!(s.undelivered_count(), 0);
        let (solution, _, _) = s.finish().unwrap();
        assert_eq!(solution.paths.len(), 2);
        assert_eq!(solution.paths[0].source, v(0));
        assert_eq!(solution.paths[0].sink, v(4));
        assert_eq!(solution.paths[0].arcs, vec![a(3)]);
        assert_eq!(solution.paths[1].source, v(1));
        assert_eq!(solution.paths[1].sink, v(3));
        assert_eq!(solution.paths[1].arcs, vec![a(1), a(2)]);
    }

    #[test]
    fn backward_probe_reports_the_singular_region() {
        let (i, x) = basin();
        let d = derive_ssuf(&i, &x).unwrap();
        let mut s = SolverState::new(&d, Direction::Upper, SolveOptions::default());
        s.run_preliminary().unwrap();
        s.label().unwrap();
        match s.find_structure().unwrap() {
            SearchResult::SingularDigraph(sd) => {
                assert_eq!(sd.root, v(2));
                assert_eq!(sd.entering, a(0));
                assert_eq!(sd.arcs, vec![a(1), a(3)]);
            }
            other => panic!("expected a region, found {other:?}"),
        }
    }

    #[test]
    fn junction_sink_splits_to_match_the_entering_arc() {
        let (i, x) = basin();
        let run = solve_upper(&i, &x).unwrap();
        assert_eq!(run.stats.iterations, 1);
        assert!(run.events.iter().any(|e| matches!(
            e,
            SolveEvent::RootSplit { sink, junction, entering, kept, routed }
                if *sink == (v(2), 0)
                    && *junction == v(2)
                    && *entering == a(0)
                    && *kept == rat(1)
                    && *routed == rat(2)
        )));
        let p = &run.solution.paths;
        assert_eq!(p.len(), 2);
        assert_eq!((p[0].source, p[0].sink, p[0].value.clone()), (v(0), v(2), rat(1)));
        assert_eq!(p[0].arcs, vec![a(0)]);
        assert_eq!((p[1].source, p[1].sink, p[1].value.clone()), (v(1), v(2), rat(2)));
        assert_eq!(p[1].arcs, vec![a(1)]);
        // The routed paths retrace the fractional flow exactly.
        assert_eq!(run.stats.max_increase, rat(0));
    }

    /// Which end of the paths the run promises to route as a tree: the
    /// forward pipeline merges per sink, the reversed one per source.
    enum TreeEnd {
        Sink,
        Source,
    }

    fn assert_valid(i: &Instance, run: &SolveRun, end: TreeEnd) {
        let loads = run.solution.arc_loads(i);
        for &vx in i.vertex_ids() {
            assert_eq!(excess(i, &loads, vx), *i.balance(vx), "superposition at {vx}");
        }
        let mut pairs = BTreeSet::new();
        for p in &run.solution.paths {
            assert!(pairs.insert((p.source, p.sink)), "pair routed twice");
            let mut at = p.source;
            for &ai in &p.arcs {
                let arc = i.arc(ai);
                assert_eq!(arc.tail, at, "path breaks at {ai}");
                at = arc.head;
            }
            assert_eq!(at, p.sink, "path misses its sink");
            assert!(p.value > rat(0));
        }
        // Paths sharing a terminal must traverse shared vertices together:
        // one outgoing arc per vertex toward a sink, or one incoming arc
        // per vertex away from a source.
        let mut choice: BTreeMap<(VertexId, VertexId), ArcId> = BTreeMap::new();
        for p in &run.solution.paths {
            for &ai in &p.arcs {
                let arc = i.arc(ai);
                let key = match end {
                    TreeEnd::Sink => (p.sink, arc.tail),
                    TreeEnd::Source => (p.source, arc.head),
                };
                match choice.entry(key) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(ai);
                    }
                    std::collections::btree_map::Entry::Occupied(e) => {
                        assert_eq!(*e.get(), ai, "paths at {} diverge", key.0);
                    }
                }
            }
        }
        let p_cnt = i.sources().len();
        let q_cnt = i.sinks().len();
        if p_cnt > 0 && q_cnt > 0 {
            assert!(run.solution.paths.len() <= p_cnt + q_cnt - 1);
        }
    }

    fn assert_upper_bound(i: &Instance, x: &Flow, run: &SolveRun) {
        let d_max = i.max_demand();
        let loads = run.solution.arc_loads(i);
        for arc in i.arcs().iter() {
            let diff = loads.value(i, arc.id) - x.value(i, arc.id);
            assert!(diff < d_max, "arc {} gained {diff}, cap {d_max}", arc.id);
        }
    }

    #[test]
    fn split_demands_route_within_the_guarantee() {
        let (i, x) = gen_nonintegral();
        let run = solve_upper(&i, &x).unwrap();
        assert_valid(&i, &run, TreeEnd::Sink);
        assert_upper_bound(&i, &x, &run);
        let p = &run.solution.paths;
        assert_eq!(p.len(), 3);
        assert_eq!((p[0].source, p[0].sink, p[0].value.clone()), (v(0), v(7), rat(5)));
        assert_eq!(p[0].arcs, vec![a(1), a(5), a(9)]);
        assert_eq!((p[1].source, p[1].sink, p[1].value.clone()), (v(1), v(6), rat(8)));
        assert_eq!(p[1].arcs, vec![a(2), a(4), a(7)]);
        assert_eq!((p[2].source, p[2].sink, p[2].value.clone()), (v(1), v(7), rat(7)));
        assert_eq!(p[2].arcs, vec![a(3), a(5), a(9)]);
        assert_eq!(run.stats.max_increase, ratio(7, 2));
        assert_eq!(run.stats.iterations, 4);
    }

    #[test]
    fn lower_variant_keeps_loads_near_the_flow() {
        let (i, x) = gen_nonintegral();
        let run = solve_lower(&i, &x).unwrap();
        assert_valid(&i, &run, TreeEnd::Sink);
        let d_max = i.max_demand();
        let loads = run.solution.arc_loads(&i);
        for arc in i.arcs().iter() {
            let diff = x.value(&i, arc.id) - loads.value(&i, arc.id);
            assert!(diff < d_max, "arc {} lost {diff}", arc.id);
        }
    }

    #[test]
    fn reversed_variant_bounds_by_largest_supply() {
        let (i, x) = gen_nonintegral();
        let run = solve_reversed(&i, &x).unwrap();
        assert_valid(&i, &run, TreeEnd::Source);
        let max_supply = rat(15);
        let loads = run.solution.arc_loads(&i);
        for arc in i.arcs().iter() {
            let diff = loads.value(&i, arc.id) - x.value(&i, arc.id);
            assert!(diff < max_supply, "arc {} gained {diff}", arc.id);
        }
    }

    #[test]
    fn replay_of_events_reconstructs_the_flow() {
        let (i, x) = gen_nonintegral();
        let run = solve_upper(&i, &x).unwrap();
        let net = &run.derivation.instance;
        let mut y: Vec<Rational> = run.derivation.flow.values().to_vec();
        for e in &run.events {
            match e {
                SolveEvent::CycleAugment { delta, forward, backward } => {
                    for id in forward {
                        y[net.arc_index(*id).unwrap()] -= delta;
                    }
                    for id in backward {
                        y[net.arc_index(*id).unwrap()] += delta;
                    }
                }
                SolveEvent::Delivered { value, path, .. } => {
                    for id in path {
                        y[net.arc_index(*id).unwrap()] -= value;
                    }
                }
                _ => {}
            }
        }
        assert!(y.iter().all(|r| r.is_zero()), "events do not add back up");
    }

    #[test]
    fn random_runs_hold_every_guarantee() {
        let size = RandomSize {
            vertices: 12,
            paths: 9,
            extra_arcs: 5,
        };
        for seed in 0..25 {
            for regime in [
                DemandRegime::Quarter,
                DemandRegime::Third,
                DemandRegime::Below,
                DemandRegime::Equal,
            ] {
                let (i, x) = gen_random(seed, size, regime);
                let run = solve_upper(&i, &x).unwrap();
                assert_valid(&i, &run, TreeEnd::Sink);
                assert_upper_bound(&i, &x, &run);

                let low = solve_lower(&i, &x).unwrap();
                assert_valid(&i, &low, TreeEnd::Sink);
                let d_max = i.max_demand();
                let loads = low.solution.arc_loads(&i);
                for arc in i.arcs().iter() {
                    let diff = x.value(&i, arc.id) - loads.value(&i, arc.id);
                    assert!(diff < d_max, "seed {seed}: arc {} lost {diff}", arc.id);
                }

                let rev = solve_reversed(&i, &x).unwrap();
                assert_valid(&i, &rev, TreeEnd::Source);
                let max_supply = i
                    .sources()
                    .iter()
                    .map(|&s| i.balance(s).clone())
                    .max()
                    .unwrap_or_else(|| rat(0));
                let loads = rev.solution.arc_loads(&i);
                for arc in i.arcs().iter() {
                    let diff = loads.value(&i, arc.id) - x.value(&i, arc.id);
                    assert!(diff < max_supply, "seed {seed}: arc {} gained {diff}", arc.id);
                }
            }
        }
    }

    #[test]
    fn rejects_unbalanced_flows() {
        let i = inst(
            vec![(0, rat(1)), (1, rat(-1))],
            vec![(0, 0, 1, rat(1))],
        );
        let x = flow(&i, vec![(0, rat(0))]);
        assert_eq!(
            solve_upper(&i, &x).unwrap_err(),
            SolveError::NotTransshipment(v(0))
        );
    }

    #[test]
    fn empty_demand_set_yields_no_paths() {
        let i = inst(
            vec![(0, rat(0)), (1, rat(0))],
            vec![(0, 0, 1, rat(1))],
        );
        let x = flow(&i, vec![(0, rat(0))]);
        let run = solve_upper(&i, &x).unwrap();
        assert!(run.solution.paths.is_empty());
        assert_eq!(run.stats.iterations, 0);
    }

    #[test]
    fn single_source_runs_accept_only_one_source() {
        let (i, x) = basin();
        assert_eq!(
            solve_single_source(&i, &x).unwrap_err(),
            SolveError::NotSingleSource
        );
        let (i, x) = chain();
        let run = solve_single_source(&i, &x).unwrap();
        assert_eq!(run.solution.paths.len(), 2);
    }
}

