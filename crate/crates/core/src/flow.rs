//! Flows, path decompositions and cycle cancellation.
//!
//! A [`Flow`] stores one rational per arc, in arc-id order. It carries
//! no back-reference to its instance; every operation takes the
//! [`Instance`] explicitly, which keeps flows cheap to clone and move
//! between derived networks that share arc ids.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::graph::{topological_order, ArcId, Instance, VertexId};
use crate::rational::Rational;

/// Per-arc flow values, indexed like `Instance::arcs()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    values: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowBuildError {
    UnknownArc(ArcId),
    DuplicateArc(ArcId),
}

impl fmt::Display for FlowBuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowBuildError::UnknownArc(a) => write!(f, "flow references unknown arc {a}"),
            FlowBuildError::DuplicateArc(a) => write!(f, "flow lists arc {a} twice"),
        }
    }
}

impl Flow {
    pub fn zero(inst: &Instance) -> Flow {
        Flow { values: vec![Rational::zero(); inst.arc_count()] }
    }

    /// Builds a flow from `(arc, value)` pairs; unlisted arcs carry 0.
    pub fn from_pairs(
        inst: &Instance,
        pairs: Vec<(ArcId, Rational)>,
    ) -> Result<Flow, FlowBuildError> {
        let mut flow = Flow::zero(inst);
        let mut seen = vec![false; inst.arc_count()];
        for (id, value) in pairs {
            let idx = inst.arc_index(id).ok_or(FlowBuildError::UnknownArc(id))?;
            if seen[idx] {
                return Err(FlowBuildError::DuplicateArc(id));
            }
            seen[idx] = true;
            flow.values[idx] = value;
        }
        Ok(flow)
    }

    pub fn value(&self, inst: &Instance, a: ArcId) -> &Rational {
        &self.values[inst.aindex(a)]
    }

    pub fn set(&mut self, inst: &Instance, a: ArcId, value: Rational) {
        let idx = inst.aindex(a);
        self.values[idx] = value;
    }

    /// Values in arc-id order, parallel to `Instance::arcs()`.
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub(crate) fn at(&self, idx: usize) -> &Rational {
        &self.values[idx]
    }

    pub(crate) fn at_mut(&mut self, idx: usize) -> &mut Rational {
        &mut self.values[idx]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Rational::is_zero)
    }

    /// True when every value lies in `[0, capacity]`.
    pub fn respects_capacities(&self, inst: &Instance) -> bool {
        self.values
            .iter()
            .zip(inst.arcs())
            .all(|(x, arc)| !x.is_negative() && *x <= arc.capacity)
    }
}

/// Outflow minus inflow of `v` under `flow`.
pub fn excess(inst: &Instance, flow: &Flow, v: VertexId) -> Rational {
    excess_vector(inst, flow)[inst.vindex(v)].clone()
}

pub(crate) fn excess_vector(inst: &Instance, flow: &Flow) -> Vec<Rational> {
    let mut e = vec![Rational::zero(); inst.vertex_count()];
    for (idx, arc) in inst.arcs().iter().enumerate() {
        let x = flow.at(idx);
        if x.is_zero() {
            continue;
        }
        e[inst.vindex(arc.tail)] += x;
        e[inst.vindex(arc.head)] -= x;
    }
    e
}

/// True when `excess(v) == balance(v)` for every vertex.
pub fn is_transshipment(inst: &Instance, flow: &Flow) -> bool {
    excess_vector(inst, flow)
        .iter()
        .zip(inst.vertex_ids())
        .all(|(e, &v)| e == inst.balance(v))
}

/// A source-to-sink path carrying `value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathFlow {
    pub source: VertexId,
    pub sink: VertexId,
    pub value: Rational,
    pub arcs: Vec<ArcId>,
}

/// A directed cycle carrying `value`, rotated so its lowest arc id
/// comes first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleFlow {
    pub value: Rational,
    pub arcs: Vec<ArcId>,
}

/// Result of [`decompose`]: paths plus leftover circulation cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub paths: Vec<PathFlow>,
    pub cycles: Vec<CycleFlow>,
}

impl Decomposition {
    /// Rebuilds the per-arc flow this decomposition represents.
    pub fn superposed(&self, inst: &Instance) -> Flow {
        let mut flow = Flow::zero(inst);
        for path in &self.paths {
            for &a in &path.arcs {
                *flow.at_mut(inst.aindex(a)) += &path.value;
            }
        }
        for cycle in &self.cycles {
            for &a in &cycle.arcs {
                *flow.at_mut(inst.aindex(a)) += &cycle.value;
            }
        }
        flow
    }
}

/// A set of source-to-sink paths, at most one per source–sink pair,
/// whose superposition routes every demand. Pair uniqueness is checked
/// by the verifiers, not enforced here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnsplittableSolution {
    pub paths: Vec<PathFlow>,
}

impl UnsplittableSolution {
    /// Per-arc load induced by the paths.
    pub fn arc_loads(&self, inst: &Instance) -> Flow {
        let mut flow = Flow::zero(inst);
        for path in &self.paths {
            for &a in &path.arcs {
                *flow.at_mut(inst.aindex(a)) += &path.value;
            }
        }
        flow
    }

    pub fn total_value(&self) -> Rational {
        self.paths.iter().map(|p| p.value.clone()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    /// Excess does not match the balance at the given vertex.
    NotTransshipment(VertexId),
    NegativeArcValue(ArcId),
}

impl fmt::Display for DecomposeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecomposeError::NotTransshipment(v) => {
                write!(f, "flow is not a transshipment: excess mismatch at vertex {v}")
            }
            DecomposeError::NegativeArcValue(a) => {
                write!(f, "flow value on arc {a} is negative")
            }
        }
    }
}

/// Rotates a cycle's arc list so the smallest arc id leads.
fn rotate_cycle(arcs: Vec<usize>, inst: &Instance) -> Vec<ArcId> {
    let min_pos = arcs
        .iter()
        .enumerate()
        .min_by_key(|(_, &i)| inst.arc_at(i).id)
        .map(|(p, _)| p)
        .unwrap_or(0);
    arcs[min_pos..]
        .iter()
        .chain(&arcs[..min_pos])
        .map(|&i| inst.arc_at(i).id)
        .collect()
}

fn subtract_along(x: &mut [Rational], arcs: &[usize], delta: &Rational) {
    for &i in arcs {
        x[i] -= delta;
    }
}

fn min_along(x: &[Rational], arcs: &[usize]) -> Rational {
    arcs.iter().map(|&i| x[i].clone()).min().expect("nonempty arc list")
}

/// Lowest-id positive out-arc of vertex index `vi`, if any.
fn first_positive_out(inst: &Instance, x: &[Rational], vi: usize) -> Option<usize> {
    inst.out_arc_indices(vi).iter().copied().find(|&i| x[i].is_positive())
}

/// Splits a transshipment into source-to-sink paths plus circulation
/// cycles. Deterministic: walks start at the lowest-id vertex with
/// positive remaining excess and always follow the lowest-id positive
/// arc; cycles met along the way are peeled immediately, so emitted
/// paths are simple.
///
/// The superposition of the result equals the input, and the number of
/// paths plus cycles never exceeds the arc count: every extraction
/// zeroes an arc of the support augmented with one virtual arc per
/// terminal, and that graph's cycle rank is at most the real arc count.
pub fn decompose(inst: &Instance, flow: &Flow) -> Result<Decomposition, DecomposeError> {
    for (idx, value) in flow.values().iter().enumerate() {
        if value.is_negative() {
            return Err(DecomposeError::NegativeArcValue(inst.arc_at(idx).id));
        }
    }
    let mut e = excess_vector(inst, flow);
    for (i, &v) in inst.vertex_ids().iter().enumerate() {
        if &e[i] != inst.balance(v) {
            return Err(DecomposeError::NotTransshipment(v));
        }
    }

    let mut x: Vec<Rational> = flow.values().to_vec();
    let mut paths = Vec::new();
    let mut cycles = Vec::new();
    let mut stack_pos: Vec<Option<usize>> = vec![None; inst.vertex_count()];

    while let Some(start) = (0..inst.vertex_count()).find(|&i| e[i].is_positive()) {
        let mut stack = vec![start];
        let mut taken: Vec<usize> = Vec::new();
        stack_pos[start] = Some(0);
        loop {
            let cur = *stack.last().expect("walk stack is never empty");
            if e[cur].is_negative() {
                let delta = min_along(&x, &taken)
                    .min(e[start].clone())
                    .min(-e[cur].clone());
                subtract_along(&mut x, &taken, &delta);
                e[start] -= &delta;
                e[cur] += &delta;
                paths.push(PathFlow {
                    source: inst.vertex_ids()[start],
                    sink: inst.vertex_ids()[cur],
                    value: delta,
                    arcs: taken.iter().map(|&i| inst.arc_at(i).id).collect(),
                });
                for &v in &stack {
                    stack_pos[v] = None;
                }
                break;
            }
            let arc_idx = first_positive_out(inst, &x, cur)
                .expect("positive excess or throughput leaves a positive out-arc");
            let head = inst.vindex(inst.arc_at(arc_idx).head);
            if let Some(pos) = stack_pos[head] {
                let mut cycle_arcs: Vec<usize> = taken[pos..].to_vec();
                cycle_arcs.push(arc_idx);
                let delta = min_along(&x, &cycle_arcs);
                subtract_along(&mut x, &cycle_arcs, &delta);
                cycles.push(CycleFlow { value: delta, arcs: rotate_cycle(cycle_arcs, inst) });
                for &v in &stack[pos + 1..] {
                    stack_pos[v] = None;
                }
                stack.truncate(pos + 1);
                taken.truncate(pos);
            } else {
                stack_pos[head] = Some(stack.len());
                stack.push(head);
                taken.push(arc_idx);
            }
        }
    }

    while let Some(cycle_arcs) = find_positive_cycle(inst, &x) {
        let delta = min_along(&x, &cycle_arcs);
        subtract_along(&mut x, &cycle_arcs, &delta);
        cycles.push(CycleFlow { value: delta, arcs: rotate_cycle(cycle_arcs, inst) });
    }

    debug_assert!(x.iter().all(Rational::is_zero));
    debug_assert!(paths.len() + cycles.len() <= inst.arc_count());
    Ok(Decomposition { paths, cycles })
}

/// Finds a directed cycle in the positive support of `x`: walk from the
/// lowest-id vertex with a positive out-arc, always taking the lowest-id
/// positive arc, until a vertex repeats. `None` when the support is
/// empty of cycles *and* of excess-free throughput, i.e. on a
/// circulation this returns `None` only for the zero flow.
fn find_positive_cycle(inst: &Instance, x: &[Rational]) -> Option<Vec<usize>> {
    let start = (0..inst.vertex_count()).find(|&i| first_positive_out(inst, x, i).is_some())?;
    let mut stack_pos: Vec<Option<usize>> = vec![None; inst.vertex_count()];
    let mut stack = vec![start];
    let mut taken: Vec<usize> = Vec::new();
    stack_pos[start] = Some(0);
    loop {
        let cur = *stack.last().expect("cycle walk stack is never empty");
        let arc_idx = first_positive_out(inst, x, cur)
            .expect("circulation throughput always continues");
        let head = inst.vindex(inst.arc_at(arc_idx).head);
        if let Some(pos) = stack_pos[head] {
            let mut cycle = taken[pos..].to_vec();
            cycle.push(arc_idx);
            return Some(cycle);
        }
        stack_pos[head] = Some(stack.len());
        stack.push(head);
        taken.push(arc_idx);
    }
}

/// Removes all circulation from a flow, keeping every vertex excess
/// intact: repeatedly finds a cycle in the positive support and
/// subtracts its bottleneck. No arc value ever increases.
pub fn cancel_cycles(inst: &Instance, flow: &Flow) -> Flow {
    let mut x: Vec<Rational> = flow.values().to_vec();
    let mut acyclic = false;
    while !acyclic {
        acyclic = true;
        if let Some(cycle) = find_cycle_dfs(inst, &x) {
            let delta = min_along(&x, &cycle);
            subtract_along(&mut x, &cycle, &delta);
            acyclic = false;
        }
    }
    Flow { values: x }
}

/// DFS-based cycle detection on the positive support. Unlike
/// [`find_positive_cycle`] this terminates on any nonnegative vector,
/// transshipment or not.
fn find_cycle_dfs(inst: &Instance, x: &[Rational]) -> Option<Vec<usize>> {
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let n = inst.vertex_count();
    let mut color = vec![WHITE; n];
    for root in 0..n {
        if color[root] != WHITE {
            continue;
        }
        // Iterative DFS; each frame remembers which out-arc to try next.
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        let mut taken: Vec<usize> = Vec::new();
        color[root] = GRAY;
        while let Some(frame) = stack.last_mut() {
            let (v, next) = *frame;
            let outs = inst.out_arc_indices(v);
            if next >= outs.len() {
                stack.pop();
                color[v] = BLACK;
                taken.pop();
                continue;
            }
            frame.1 += 1;
            let arc_idx = outs[next];
            if !x[arc_idx].is_positive() {
                continue;
            }
            let head = inst.vindex(inst.arc_at(arc_idx).head);
            match color[head] {
                GRAY => {
                    // Back arc: the cycle is the stack segment from `head`.
                    let pos = stack
                        .iter()
                        .position(|&(w, _)| w == head)
                        .expect("gray vertex sits on the DFS stack");
                    let mut cycle = taken[pos..].to_vec();
                    cycle.push(arc_idx);
                    return Some(cycle);
                }
                WHITE => {
                    color[head] = GRAY;
                    taken.push(arc_idx);
                    stack.push((head, 0));
                }
                _ => {}
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicSupport;

impl fmt::Display for CyclicSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "support digraph contains a cycle")
    }
}

/// Topological order of the vertices with respect to the arcs carrying
/// positive flow. Errors when that support has a directed cycle.
pub fn support_topological_order(
    inst: &Instance,
    flow: &Flow,
) -> Result<Vec<VertexId>, CyclicSupport> {
    topological_order(inst, |arc| flow.value(inst, arc.id).is_positive()).ok_or(CyclicSupport)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Instance;
    use crate::rational::{rat, ratio};

    fn v(n: u32) -> VertexId {
        VertexId(n)
    }

    fn a(n: u32) -> ArcId {
        ArcId(n)
    }

    /// s(0) → u(1) → t(2), extra arc ids in insertion order.
    fn chain() -> Instance {
        Instance::new(
            vec![(v(0), rat(2)), (v(1), rat(0)), (v(2), rat(-2))],
            vec![
                (a(0), v(0), v(1), rat(5)),
                (a(1), v(1), v(2), rat(5)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn excess_is_outflow_minus_inflow() {
        let inst = chain();
        let zero = Flow::zero(&inst);
        assert_eq!(excess(&inst, &zero, v(0)), rat(0));

        let flow = Flow::from_pairs(&inst, vec![(a(0), rat(2)), (a(1), rat(2))]).unwrap();
        assert_eq!(excess(&inst, &flow, v(0)), rat(2));
        assert_eq!(excess(&inst, &flow, v(1)), rat(0));
        assert_eq!(excess(&inst, &flow, v(2)), rat(-2));
        assert!(is_transshipment(&inst, &flow));
    }

    #[test]
    fn from_pairs_rejects_bad_arcs() {
        let inst = chain();
        assert_eq!(
            Flow::from_pairs(&inst, vec![(a(9), rat(1))]),
            Err(FlowBuildError::UnknownArc(a(9)))
        );
        assert_eq!(
            Flow::from_pairs(&inst, vec![(a(0), rat(1)), (a(0), rat(2))]),
            Err(FlowBuildError::DuplicateArc(a(0)))
        );
    }

    #[test]
    fn decomposes_single_chain_into_one_path() {
        let inst = chain();
        let flow = Flow::from_pairs(&inst, vec![(a(0), rat(2)), (a(1), rat(2))]).unwrap();
        let dec = decompose(&inst, &flow).unwrap();
        assert_eq!(dec.cycles, vec![]);
        assert_eq!(
            dec.paths,
            vec![PathFlow { source: v(0), sink: v(2), value: rat(2), arcs: vec![a(0), a(1)] }]
        );
        assert_eq!(dec.superposed(&inst), flow);
    }

    /// Path s→u→t with a circulation u→v→w→u on the side; the walk
    /// leaves u via the lower arc id and never touches the cycle.
    #[test]
    fn separates_trailing_circulation() {
        let inst = Instance::new(
            vec![
                (v(0), rat(1)),
                (v(1), rat(0)),
                (v(2), rat(0)),
                (v(3), rat(0)),
                (v(4), rat(-1)),
            ],
            vec![
                (a(0), v(0), v(1), rat(9)),
                (a(1), v(1), v(4), rat(9)),
                (a(2), v(1), v(2), rat(9)),
                (a(3), v(2), v(3), rat(9)),
                (a(4), v(3), v(1), rat(9)),
            ],
        )
        .unwrap();
        let flow = Flow::from_pairs(
            &inst,
            vec![
                (a(0), rat(1)),
                (a(1), rat(1)),
                (a(2), rat(1)),
                (a(3), rat(1)),
                (a(4), rat(1)),
            ],
        )
        .unwrap();
        let dec = decompose(&inst, &flow).unwrap();
        assert_eq!(dec.paths.len(), 1);
        assert_eq!(dec.paths[0].arcs, vec![a(0), a(1)]);
        assert_eq!(dec.cycles, vec![CycleFlow { value: rat(1), arcs: vec![a(2), a(3), a(4)] }]);
        assert_eq!(dec.superposed(&inst), flow);
    }

    /// Same shape, but arc ids force the walk into the cycle first; it
    /// must peel the cycle mid-walk and still emit a simple path.
    #[test]
    fn peels_cycles_met_during_the_walk() {
        let inst = Instance::new(
            vec![
                (v(0), rat(1)),
                (v(1), rat(0)),
                (v(2), rat(0)),
                (v(3), rat(0)),
                (v(4), rat(-1)),
            ],
            vec![
                (a(0), v(0), v(1), rat(9)),
                (a(1), v(1), v(2), rat(9)),
                (a(2), v(2), v(3), rat(9)),
                (a(3), v(3), v(1), rat(9)),
                (a(4), v(1), v(4), rat(9)),
            ],
        )
        .unwrap();
        let flow = Flow::from_pairs(
            &inst,
            vec![
                (a(0), rat(1)),
                (a(1), rat(1)),
                (a(2), rat(1)),
                (a(3), rat(1)),
                (a(4), rat(1)),
            ],
        )
        .unwrap();
        let dec = decompose(&inst, &flow).unwrap();
        assert_eq!(dec.paths.len(), 1);
        assert_eq!(dec.paths[0].arcs, vec![a(0), a(4)]);
        assert_eq!(dec.cycles, vec![CycleFlow { value: rat(1), arcs: vec![a(1), a(2), a(3)] }]);
        assert_eq!(dec.superposed(&inst), flow);
    }

    /// Two sources, two sinks, pass-through over drained terminals; the
    /// same pair may legitimately receive two paths.
    #[test]
    fn handles_excess_capped_extractions() {
        let inst = Instance::new(
            vec![
                (v(0), rat(3)),
                (v(1), rat(1)),
                (v(2), rat(-2)),
                (v(3), rat(-2)),
            ],
            vec![
                (a(0), v(0), v(2), ratio(5, 2)),
                (a(1), v(0), v(3), ratio(3, 2)),
                (a(2), v(2), v(3), ratio(1, 2)),
                (a(3), v(1), v(0), rat(1)),
            ],
        )
        .unwrap();
        let flow = Flow::from_pairs(
            &inst,
            vec![
                (a(0), ratio(5, 2)),
                (a(1), ratio(3, 2)),
                (a(2), ratio(1, 2)),
                (a(3), rat(1)),
            ],
        )
        .unwrap();
        let dec = decompose(&inst, &flow).unwrap();
        let expected = vec![
            PathFlow { source: v(0), sink: v(2), value: rat(2), arcs: vec![a(0)] },
            PathFlow { source: v(0), sink: v(3), value: ratio(1, 2), arcs: vec![a(0), a(2)] },
            PathFlow { source: v(0), sink: v(3), value: ratio(1, 2), arcs: vec![a(1)] },
            PathFlow { source: v(1), sink: v(3), value: rat(1), arcs: vec![a(3), a(1)] },
        ];
        assert_eq!(dec.paths, expected);
        assert_eq!(dec.cycles, vec![]);
        assert!(dec.paths.len() + dec.cycles.len() <= inst.arc_count());
        assert_eq!(dec.superposed(&inst), flow);
    }

    #[test]
    fn decompose_rejects_non_transshipments() {
        let inst = chain();
        let short = Flow::from_pairs(&inst, vec![(a(0), rat(1))]).unwrap();
        assert_eq!(decompose(&inst, &short), Err(DecomposeError::NotTransshipment(v(0))));

        let negative = Flow::from_pairs(&inst, vec![(a(0), rat(-1))]).unwrap();
        assert_eq!(decompose(&inst, &negative), Err(DecomposeError::NegativeArcValue(a(0))));
    }

    #[test]
    fn cancel_cycles_drops_exactly_the_circulation() {
        let inst = Instance::new(
            vec![
                (v(0), rat(1)),
                (v(1), rat(0)),
                (v(2), rat(0)),
                (v(3), rat(0)),
                (v(4), rat(-1)),
            ],
            vec![
                (a(0), v(0), v(1), rat(9)),
                (a(1), v(1), v(4), rat(9)),
                (a(2), v(1), v(2), rat(9)),
                (a(3), v(2), v(3), rat(9)),
                (a(4), v(3), v(1), rat(9)),
            ],
        )
        .unwrap();
        let flow = Flow::from_pairs(
            &inst,
            vec![
                (a(0), rat(1)),
                (a(1), rat(1)),
                (a(2), rat(2)),
                (a(3), rat(2)),
                (a(4), rat(2)),
            ],
        )
        .unwrap();
        let cleaned = cancel_cycles(&inst, &flow);
        let dec = decompose(&inst, &flow).unwrap();
        let paths_only =
            Decomposition { paths: dec.paths.clone(), cycles: vec![] }.superposed(&inst);
        assert_eq!(cleaned, paths_only);
        for (got, orig) in cleaned.values().iter().zip(flow.values()) {
            assert!(got <= orig);
        }
        assert!(is_transshipment(&inst, &cleaned));
        assert!(support_topological_order(&inst, &cleaned).is_ok());

        // Already-acyclic support passes through unchanged.
        assert_eq!(cancel_cycles(&inst, &cleaned), cleaned);
    }

    #[test]
    fn cancel_cycles_zeroes_a_pure_circulation() {
        let inst = Instance::new(
            vec![(v(0), rat(0)), (v(1), rat(0))],
            vec![
                (a(0), v(0), v(1), rat(5)),
                (a(1), v(1), v(0), rat(5)),
            ],
        )
        .unwrap();
        let flow = Flow::from_pairs(&inst, vec![(a(0), rat(3)), (a(1), rat(3))]).unwrap();
        assert!(cancel_cycles(&inst, &flow).is_zero());
        assert_eq!(support_topological_order(&inst, &flow), Err(CyclicSupport));
    }

    #[test]
    fn arc_loads_superpose_path_values() {
        let inst = chain();
        let sol = UnsplittableSolution {
            paths: vec![
                PathFlow { source: v(0), sink: v(2), value: ratio(3, 2), arcs: vec![a(0), a(1)] },
                PathFlow { source: v(0), sink: v(2), value: ratio(1, 2), arcs: vec![a(0), a(1)] },
            ],
        };
        let loads = sol.arc_loads(&inst);
        assert_eq!(*loads.value(&inst, a(0)), rat(2));
        assert_eq!(sol.total_value(), rat(2));
    }
}
