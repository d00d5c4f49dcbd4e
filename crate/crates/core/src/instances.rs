//! Deterministic instance generators.
//!
//! Three fixed families with known extremal behavior (tightness of the
//! overshoot bound, the price of confluence, fractional-but-not-integral
//! feasibility), a reduction from arc-disjoint paths, and seeded random
//! DAG instances that ship with a feasible fractional flow. Every
//! generator is a pure function of its parameters, so outputs are
//! byte-identical across runs.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::flow::Flow;
use crate::graph::{ArcId, BuildError, Instance, VertexId};
use crate::rational::{rat, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenError {
    /// Tightness family needs q ≥ 3, k ≥ 1 and q > k+1.
    TightnessParams { q: u32, k: u32 },
    /// Confluence family needs q ≥ 2.
    ConfluenceParams { q: u32 },
    TooFewPairs,
    DuplicateTerminal(VertexId),
    UnknownTerminal(VertexId),
    Structure(BuildError),
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::TightnessParams { q, k } => {
                write!(f, "tightness family needs q >= 3, k >= 1, q > k+1; got q={q}, k={k}")
            }
            GenError::ConfluenceParams { q } => {
                write!(f, "confluence family needs q >= 2; got q={q}")
            }
            GenError::TooFewPairs => write!(f, "reduction needs at least 2 terminal pairs"),
            GenError::DuplicateTerminal(v) => {
                write!(f, "vertex {v} appears twice among the terminal pairs")
            }
            GenError::UnknownTerminal(v) => {
                write!(f, "terminal {v} is not a vertex of the base digraph")
            }
            GenError::Structure(e) => write!(f, "{e}"),
        }
    }
}

impl From<BuildError> for GenError {
    fn from(e: BuildError) -> Self {
        GenError::Structure(e)
    }
}

/// Family showing the overshoot bound is tight: q unit-demand sinks,
/// each with a dedicated source feeding it through q−k parallel arcs,
/// plus k shared sources that reach every sink through a two-arc path.
/// All capacities are 1. The accompanying fractional flow puts 1/q on
/// every arc entering a sink and saturates each shared bottleneck arc.
///
/// Vertex ids: dedicated sources 0..q, shared sources q..q+k, the
/// shared sources' middle vertices q+k..q+2k, sinks q+2k..2q+2k.
pub fn gen_tightness(q: u32, k: u32) -> Result<(Instance, Flow), GenError> {
    if q < 3 || k < 1 || q <= k + 1 {
        return Err(GenError::TightnessParams { q, k });
    }
    let dedicated = |j: u32| VertexId(j);
    let shared = |i: u32| VertexId(q + i);
    let middle = |i: u32| VertexId(q + k + i);
    let sink = |j: u32| VertexId(q + 2 * k + j);

    let mut vertices = Vec::new();
    for j in 0..q {
        vertices.push((dedicated(j), ratio((q - k) as i64, q as i64)));
    }
    for i in 0..k {
        vertices.push((shared(i), rat(1)));
    }
    for i in 0..k {
        vertices.push((middle(i), rat(0)));
    }
    for j in 0..q {
        vertices.push((sink(j), rat(-1)));
    }

    let mut arcs = Vec::new();
    let mut values = Vec::new();
    let mut next = 0u32;
    let mut push = |arcs: &mut Vec<_>, values: &mut Vec<_>, tail, head, x: Rational| {
        arcs.push((ArcId(next), tail, head, rat(1)));
        values.push((ArcId(next), x));
        next += 1;
    };
    for j in 0..q {
        for _ in 0..(q - k) {
            push(&mut arcs, &mut values, dedicated(j), sink(j), ratio(1, q as i64));
        }
    }
    for i in 0..k {
        push(&mut arcs, &mut values, shared(i), middle(i), rat(1));
    }
    for i in 0..k {
        for j in 0..q {
            push(&mut arcs, &mut values, middle(i), sink(j), ratio(1, q as i64));
        }
    }

    let inst = Instance::new(vertices, arcs)?;
    let flow = Flow::from_pairs(&inst, values).expect("generated arc ids are valid");
    Ok((inst, flow))
}

/// Family separating confluent from general unsplittable routing: q
/// unit-supply sources feed a hub; behind the hub, q two-arc corridors
/// lead to q sinks of demand 1−1/q, and every corridor can also branch
/// to one extra sink of demand 1. All capacities are 1.
///
/// A non-confluent solution fits the capacities exactly, while any
/// confluent one must pull the extra sink's full demand through a
/// single corridor, overloading its first arc by 1−1/q.
///
/// Vertex ids: sources 0..q, hub q, corridor middles q+1..2q+1, forced
/// sinks 2q+1..3q+1, the extra sink 3q+1.
pub fn gen_cost_of_confluence(q: u32) -> Result<Instance, GenError> {
    if q < 2 {
        return Err(GenError::ConfluenceParams { q });
    }
    let source = |i: u32| VertexId(i);
    let hub = VertexId(q);
    let middle = |i: u32| VertexId(q + 1 + i);
    let sink = |i: u32| VertexId(2 * q + 1 + i);
    let extra = VertexId(3 * q + 1);

    let mut vertices = Vec::new();
    for i in 0..q {
        vertices.push((source(i), rat(1)));
    }
    vertices.push((hub, rat(0)));
    for i in 0..q {
        vertices.push((middle(i), rat(0)));
    }
    for i in 0..q {
        vertices.push((sink(i), ratio(-(q as i64 - 1), q as i64)));
    }
    vertices.push((extra, rat(-1)));

    let mut arcs = Vec::new();
    let mut next = 0u32;
    let mut push = |arcs: &mut Vec<_>, tail, head| {
        arcs.push((ArcId(next), tail, head, rat(1)));
        next += 1;
    };
    for i in 0..q {
        push(&mut arcs, source(i), hub);
    }
    for i in 0..q {
        push(&mut arcs, hub, middle(i));
    }
    for i in 0..q {
        push(&mut arcs, middle(i), sink(i));
    }
    for i in 0..q {
        push(&mut arcs, middle(i), extra);
    }

    Ok(Instance::new(vertices, arcs)?)
}

/// The fixed two-source/two-sink instance that is fractionally but not
/// integrally feasible: capacity constraints force one pair to ship
/// exactly 3/2. Returns the instance and its fractional witness.
pub fn gen_nonintegral() -> (Instance, Flow) {
    let v = |n: u32| VertexId(n);
    let a = |n: u32| ArcId(n);
    // 0,1 = sources; 2,3 = upper/lower relay; 4,5 = second relay; 6,7 = sinks.
    let vertices = vec![
        (v(0), rat(5)),
        (v(1), rat(15)),
        (v(2), rat(0)),
        (v(3), rat(0)),
        (v(4), rat(0)),
        (v(5), rat(0)),
        (v(6), rat(-8)),
        (v(7), rat(-12)),
    ];
    let arcs = vec![
        (a(0), v(0), v(2), rat(5)),
        (a(1), v(0), v(3), rat(5)),
        (a(2), v(1), v(2), rat(15)),
        (a(3), v(1), v(3), rat(9)),
        (a(4), v(2), v(4), rat(10)),
        (a(5), v(3), v(5), rat(10)),
        (a(6), v(4), v(7), rat(5)),
        (a(7), v(4), v(6), rat(8)),
        (a(8), v(5), v(6), rat(2)),
        (a(9), v(5), v(7), rat(12)),
    ];
    let values = vec![
        (a(0), ratio(7, 2)),
        (a(1), ratio(3, 2)),
        (a(2), ratio(13, 2)),
        (a(3), ratio(17, 2)),
        (a(4), rat(10)),
        (a(5), rat(10)),
        (a(6), ratio(7, 2)),
        (a(7), ratio(13, 2)),
        (a(8), ratio(3, 2)),
        (a(9), ratio(17, 2)),
    ];
    let inst = Instance::new(vertices, arcs).expect("fixed instance is well formed");
    let flow = Flow::from_pairs(&inst, values).expect("fixed witness is well formed");
    (inst, flow)
}

/// Reduction from arc-disjoint paths: given a base digraph and k ≥ 2
/// terminal pairs, assigns supply k to each pair source, demand k to
/// each pair sink, adds a direct arc between mismatched terminals, and
/// puts capacity 1 everywhere. The result admits an unsplittable
/// transshipment exactly when the base digraph has pairwise arc-disjoint
/// source-to-sink paths.
pub fn gen_from_disjoint_paths(
    vertices: &[VertexId],
    base_arcs: &[(ArcId, VertexId, VertexId)],
    pairs: &[(VertexId, VertexId)],
) -> Result<Instance, GenError> {
    let k = pairs.len();
    if k < 2 {
        return Err(GenError::TooFewPairs);
    }
    let mut terminals = Vec::new();
    for &(s, t) in pairs {
        for v in [s, t] {
            if terminals.contains(&v) {
                return Err(GenError::DuplicateTerminal(v));
            }
            if !vertices.contains(&v) {
                return Err(GenError::UnknownTerminal(v));
            }
            terminals.push(v);
        }
    }

    let mut rows = Vec::new();
    for &v in vertices {
        let balance = pairs.iter().fold(rat(0), |acc, &(s, t)| {
            if v == s {
                acc + rat(k as i64)
            } else if v == t {
                acc - rat(k as i64)
            } else {
                acc
            }
        });
        rows.push((v, balance));
    }

    let mut arcs: Vec<(ArcId, VertexId, VertexId, Rational)> = base_arcs
        .iter()
        .map(|&(id, tail, head)| (id, tail, head, rat(1)))
        .collect();
    let mut next = base_arcs.iter().map(|&(id, _, _)| id.0 + 1).max().unwrap_or(0);
    for &(s, _) in pairs {
        for &(_, t) in pairs {
            if s == t {
                continue;
            }
            // Skip the matched pair itself: only cross terminals get
            // direct arcs.
            if pairs.iter().any(|&(ps, pt)| ps == s && pt == t) {
                continue;
            }
            arcs.push((ArcId(next), s, t, rat(1)));
            next += 1;
        }
    }

    Ok(Instance::new(rows, arcs)?)
}

/// Shape parameters for [`gen_random`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSize {
    pub vertices: usize,
    /// Number of random source-to-sink paths superposed into the flow.
    pub paths: usize,
    /// Extra zero-flow arcs added for topology variety.
    pub extra_arcs: usize,
}

/// How the maximum demand relates to the minimum capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemandRegime {
    /// d_max ≤ c_min / 4
    Quarter,
    /// d_max ≤ c_min / 3
    Third,
    /// d_max < c_min
    Below,
    /// d_max = c_min exactly
    Equal,
}

impl DemandRegime {
    fn capacity_factor(self) -> Rational {
        match self {
            DemandRegime::Quarter => rat(4),
            DemandRegime::Third => rat(3),
            DemandRegime::Below => ratio(3, 2),
            DemandRegime::Equal => rat(1),
        }
    }
}

/// Seeded random DAG instance plus a feasible fractional flow.
///
/// Arcs always point from lower to higher vertex id, so the support is
/// acyclic by construction. The flow is a superposition of random
/// forward paths; balances are its excesses, capacities are chosen per
/// regime. Same arguments, same bytes.
pub fn gen_random(seed: u64, size: RandomSize, regime: DemandRegime) -> (Instance, Flow) {
    gen_random_inner(seed, size, regime, false)
}

/// Like [`gen_random`] but every path starts at vertex 0, making it the
/// unique source.
pub fn gen_random_single_source(
    seed: u64,
    size: RandomSize,
    regime: DemandRegime,
) -> (Instance, Flow) {
    gen_random_inner(seed, size, regime, true)
}

fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    debug_assert!(n > 0);
    (rng.next_u32() as usize) % n
}

fn gen_random_inner(
    seed: u64,
    size: RandomSize,
    regime: DemandRegime,
    single_source: bool,
) -> (Instance, Flow) {
    let n = size.vertices.max(2);
    let paths = size.paths.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Superpose random increasing-index paths; excesses become balances.
    let mut arc_flow: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    let mut excess = vec![Rational::zero(); n];
    for _ in 0..paths {
        let start = if single_source { 0 } else { below(&mut rng, n - 1) };
        let value = ratio(1 + below(&mut rng, 8) as i64, 1 + below(&mut rng, 4) as i64);
        let mut cur = start;
        loop {
            let next = cur + 1 + below(&mut rng, n - cur - 1);
            *arc_flow.entry((cur, next)).or_insert_with(Rational::zero) += &value;
            cur = next;
            if cur == n - 1 || below(&mut rng, 3) == 0 {
                break;
            }
        }
        excess[start] += &value;
        excess[cur] -= &value;
    }
    for _ in 0..size.extra_arcs {
        let tail = below(&mut rng, n - 1);
        let head = tail + 1 + below(&mut rng, n - tail - 1);
        arc_flow.entry((tail, head)).or_insert_with(Rational::zero);
    }

    let d_max = excess
        .iter()
        .filter(|e| e.is_negative())
        .map(|e| -e)
        .max()
        .expect("the highest path endpoint has strictly negative excess");
    let floor = regime.capacity_factor() * &d_max;

    let mut vertices = Vec::with_capacity(n);
    for (i, e) in excess.iter().enumerate() {
        vertices.push((VertexId(i as u32), e.clone()));
    }
    let mut arcs = Vec::with_capacity(arc_flow.len());
    let mut values = Vec::with_capacity(arc_flow.len());
    for (i, ((tail, head), x)) in arc_flow.iter().enumerate() {
        let id = ArcId(i as u32);
        let cap = x.clone().max(floor.clone());
        arcs.push((id, VertexId(*tail as u32), VertexId(*head as u32), cap));
        values.push((id, x.clone()));
    }
    // The "equal" regime pins min capacity to d_max exactly; add a
    // zero-flow witness arc if no existing capacity already sits there.
    if regime == DemandRegime::Equal && !arcs.iter().any(|(_, _, _, c)| *c == d_max) {
        arcs.push((ArcId(arcs.len() as u32), VertexId(0), VertexId(n as u32 - 1), d_max));
    }

    let inst = Instance::new(vertices, arcs).expect("generated ids are unique");
    let flow = Flow::from_pairs(&inst, values).expect("generated arc ids are valid");
    (inst, flow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{decompose, is_transshipment, support_topological_order};
    use crate::rational::Rational;

    fn v(n: u32) -> VertexId {
        VertexId(n)
    }

    fn a(n: u32) -> ArcId {
        ArcId(n)
    }

    #[test]
    fn tightness_family_matches_the_stated_shape() {
        let (inst, flow) = gen_tightness(3, 1).unwrap();
        assert_eq!(inst.vertex_count(), 8);
        // 3·2 parallel arcs + 1 shared bottleneck + 3 fan-out arcs.
        assert_eq!(inst.arc_count(), 10);
        assert!(inst.validate().is_empty());
        assert!(is_transshipment(&inst, &flow));
        assert!(flow.respects_capacities(&inst));
        // Dedicated sources supply (q−k)/q, shared sources 1.
        assert_eq!(*inst.balance(v(0)), ratio(2, 3));
        assert_eq!(*inst.balance(v(3)), rat(1));
        // The shared bottleneck arc is saturated: q·(1/q) = 1.
        assert_eq!(*flow.value(&inst, a(6)), rat(1));
        // Every arc entering a sink carries 1/q.
        for arc in inst.arcs() {
            if inst.balance(arc.head).is_negative() {
                assert_eq!(*flow.value(&inst, arc.id), ratio(1, 3));
            }
        }
    }

    #[test]
    fn tightness_family_rejects_bad_parameters() {
        assert!(gen_tightness(3, 2).is_err());
        assert!(gen_tightness(2, 1).is_err());
        assert!(gen_tightness(4, 3).is_err());
        assert!(gen_tightness(3, 0).is_err());
        assert!(gen_tightness(4, 1).is_ok());
        assert!(gen_tightness(5, 2).is_ok());
    }

    #[test]
    fn confluence_family_matches_the_stated_shape() {
        let q = 4;
        let inst = gen_cost_of_confluence(q).unwrap();
        assert_eq!(inst.vertex_count(), (3 * q + 2) as usize);
        assert_eq!(inst.arc_count(), (4 * q) as usize);
        assert!(inst.validate().is_empty());
        assert_eq!(inst.max_demand(), rat(1));
        assert!(inst.arcs().iter().all(|arc| arc.capacity == rat(1)));
        // Each forced sink has exactly one way in.
        for i in 0..q {
            assert_eq!(inst.in_arcs(v(2 * q + 1 + i)).count(), 1);
        }
        // The extra sink is reachable from every corridor.
        assert_eq!(inst.in_arcs(v(3 * q + 1)).count(), q as usize);
        assert!(gen_cost_of_confluence(1).is_err());
    }

    #[test]
    fn nonintegral_instance_ships_its_fractional_witness() {
        let (inst, flow) = gen_nonintegral();
        assert!(inst.validate().is_empty());
        assert!(is_transshipment(&inst, &flow));
        assert!(flow.respects_capacities(&inst));
        let total_demand: Rational =
            inst.sinks().iter().map(|&t| inst.demand(t)).sum();
        assert_eq!(total_demand, rat(20));

        let dec = decompose(&inst, &flow).unwrap();
        assert!(dec.cycles.is_empty());
        let mut values: Vec<Rational> = dec.paths.iter().map(|p| p.value.clone()).collect();
        values.sort();
        assert_eq!(values, vec![ratio(3, 2), ratio(7, 2), ratio(13, 2), ratio(17, 2)]);
    }

    #[test]
    fn reduction_adds_cross_arcs_and_terminal_balances() {
        let vertices: Vec<VertexId> = (0..6).map(v).collect();
        let base_arcs = vec![
            (a(0), v(0), v(2)),
            (a(1), v(2), v(4)),
            (a(2), v(1), v(3)),
            (a(3), v(3), v(5)),
        ];
        let pairs = vec![(v(0), v(4)), (v(1), v(5))];
        let inst = gen_from_disjoint_paths(&vertices, &base_arcs, &pairs).unwrap();
        assert!(inst.validate().is_empty());
        // Base arcs + k(k−1) direct cross arcs.
        assert_eq!(inst.arc_count(), 4 + 2);
        assert_eq!(*inst.balance(v(0)), rat(2));
        assert_eq!(*inst.balance(v(4)), rat(-2));
        assert!(inst.arcs().iter().all(|arc| arc.capacity == rat(1)));
        // Direct arcs connect mismatched terminals only.
        assert!(inst.arc_index(a(4)).is_some());
        assert_eq!(inst.arc(a(4)).tail, v(0));
        assert_eq!(inst.arc(a(4)).head, v(5));
        assert_eq!(inst.arc(a(5)).tail, v(1));
        assert_eq!(inst.arc(a(5)).head, v(4));

        assert_eq!(
            gen_from_disjoint_paths(&vertices, &base_arcs, &[(v(0), v(4))]),
            Err(GenError::TooFewPairs)
        );
        assert_eq!(
            gen_from_disjoint_paths(&vertices, &base_arcs, &[(v(0), v(4)), (v(0), v(5))]),
            Err(GenError::DuplicateTerminal(v(0)))
        );
        assert_eq!(
            gen_from_disjoint_paths(&vertices, &base_arcs, &[(v(0), v(4)), (v(1), v(9))]),
            Err(GenError::UnknownTerminal(v(9)))
        );
    }

    #[test]
    fn random_instances_are_deterministic_and_feasible() {
        let size = RandomSize { vertices: 12, paths: 8, extra_arcs: 3 };
        for regime in [
            DemandRegime::Quarter,
            DemandRegime::Third,
            DemandRegime::Below,
            DemandRegime::Equal,
        ] {
            for seed in 0..20 {
                let (inst, flow) = gen_random(seed, size, regime);
                let (again_inst, again_flow) = gen_random(seed, size, regime);
                assert_eq!(inst, again_inst);
                assert_eq!(flow, again_flow);
                assert!(inst.validate().is_empty(), "seed {seed}");
                assert!(is_transshipment(&inst, &flow), "seed {seed}");
                assert!(flow.respects_capacities(&inst), "seed {seed}");
                assert!(support_topological_order(&inst, &flow).is_ok());

                let d_max = inst.max_demand();
                let c_min = inst.min_capacity().unwrap();
                match regime {
                    DemandRegime::Quarter => assert!(d_max <= c_min / rat(4)),
                    DemandRegime::Third => assert!(d_max <= c_min / rat(3)),
                    DemandRegime::Below => assert!(d_max < c_min),
                    DemandRegime::Equal => assert_eq!(d_max, c_min),
                }
            }
        }
    }

    #[test]
    fn single_source_variant_has_one_source() {
        for seed in 0..20 {
            let size = RandomSize { vertices: 10, paths: 6, extra_arcs: 2 };
            let (inst, flow) = gen_random_single_source(seed, size, DemandRegime::Below);
            assert_eq!(inst.sources(), vec![v(0)]);
            assert!(is_transshipment(&inst, &flow));
            assert!(!inst.sinks().is_empty());
        }
    }
}
