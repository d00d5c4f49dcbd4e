//! Directed multigraph instances with balances and capacities.
//!
//! An [`Instance`] is immutable once built. Vertices and arcs are kept
//! sorted by their external ids, so "lowest id first" and "lowest
//! index first" coincide everywhere; every algorithm in this crate
//! relies on that for determinism.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub id: ArcId,
    pub tail: VertexId,
    pub head: VertexId,
    pub capacity: Rational,
}

/// Structural errors that make a vertex/arc list unusable as a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuildError {
    DuplicateVertex(VertexId),
    DuplicateArc(ArcId),
    UnknownEndpoint { arc: ArcId, vertex: VertexId },
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::DuplicateVertex(v) => write!(f, "duplicate vertex id {v}"),
            BuildError::DuplicateArc(a) => write!(f, "duplicate arc id {a}"),
            BuildError::UnknownEndpoint { arc, vertex } => {
                write!(f, "arc {arc} references unknown vertex {vertex}")
            }
        }
    }
}

/// Semantic problems that a structurally sound instance can still have.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Balances do not sum to zero; carries the actual sum.
    BalanceSum(Rational),
    NegativeCapacity(ArcId),
    SelfLoop(ArcId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BalanceSum(s) => write!(f, "balances sum to {s}, expected 0"),
            Violation::NegativeCapacity(a) => write!(f, "arc {a} has negative capacity"),
            Violation::SelfLoop(a) => write!(f, "arc {a} is a self-loop"),
        }
    }
}

/// A transshipment instance: directed multigraph, rational balances on
/// vertices, rational capacities on arcs.
///
/// Positive balance marks a source, negative a sink. Parallel arcs are
/// allowed and kept apart by their ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    vertices: Vec<VertexId>,
    balances: Vec<Rational>,
    arcs: Vec<Arc>,
    v_index: BTreeMap<VertexId, usize>,
    a_index: BTreeMap<ArcId, usize>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds an instance from `(id, balance)` vertices and
    /// `(id, tail, head, capacity)` arcs, in any order. Both lists are
    /// sorted by id internally.
    pub fn new(
        vertices: Vec<(VertexId, Rational)>,
        arcs: Vec<(ArcId, VertexId, VertexId, Rational)>,
    ) -> Result<Self, BuildError> {
        let mut vertex_rows = vertices;
        vertex_rows.sort_by_key(|(id, _)| *id);
        for pair in vertex_rows.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(BuildError::DuplicateVertex(pair[0].0));
            }
        }

        let mut arc_rows = arcs;
        arc_rows.sort_by_key(|(id, _, _, _)| *id);
        for pair in arc_rows.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(BuildError::DuplicateArc(pair[0].0));
            }
        }

        let mut v_index = BTreeMap::new();
        let mut ids = Vec::with_capacity(vertex_rows.len());
        let mut balances = Vec::with_capacity(vertex_rows.len());
        for (i, (id, balance)) in vertex_rows.into_iter().enumerate() {
            v_index.insert(id, i);
            ids.push(id);
            balances.push(balance);
        }

        let mut a_index = BTreeMap::new();
        let mut built = Vec::with_capacity(arc_rows.len());
        let mut out_arcs = vec![Vec::new(); ids.len()];
        let mut in_arcs = vec![Vec::new(); ids.len()];
        for (i, (id, tail, head, capacity)) in arc_rows.into_iter().enumerate() {
            let ti = *v_index
                .get(&tail)
                .ok_or(BuildError::UnknownEndpoint { arc: id, vertex: tail })?;
            let hi = *v_index
                .get(&head)
                .ok_or(BuildError::UnknownEndpoint { arc: id, vertex: head })?;
            a_index.insert(id, i);
            out_arcs[ti].push(i);
            in_arcs[hi].push(i);
            built.push(Arc { id, tail, head, capacity });
        }

        Ok(Instance {
            vertices: ids,
            balances,
            arcs: built,
            v_index,
            a_index,
            out_arcs,
            in_arcs,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Vertex ids in ascending order.
    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Arcs sorted by id.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn vertex_index(&self, v: VertexId) -> Option<usize> {
        self.v_index.get(&v).copied()
    }

    pub fn arc_index(&self, a: ArcId) -> Option<usize> {
        self.a_index.get(&a).copied()
    }

    pub(crate) fn vindex(&self, v: VertexId) -> usize {
        self.vertex_index(v).expect("vertex id belongs to instance")
    }

    pub(crate) fn aindex(&self, a: ArcId) -> usize {
        self.arc_index(a).expect("arc id belongs to instance")
    }

    pub fn balance(&self, v: VertexId) -> &Rational {
        &self.balances[self.vindex(v)]
    }

    pub fn arc(&self, a: ArcId) -> &Arc {
        &self.arcs[self.aindex(a)]
    }

    pub(crate) fn arc_at(&self, idx: usize) -> &Arc {
        &self.arcs[idx]
    }

    /// Outgoing arcs of `v`, ascending by arc id.
    pub fn out_arcs(&self, v: VertexId) -> impl Iterator<Item = &Arc> + '_ {
        self.out_arcs[self.vindex(v)].iter().map(move |&i| &self.arcs[i])
    }

    /// Incoming arcs of `v`, ascending by arc id.
    pub fn in_arcs(&self, v: VertexId) -> impl Iterator<Item = &Arc> + '_ {
        self.in_arcs[self.vindex(v)].iter().map(move |&i| &self.arcs[i])
    }

    pub(crate) fn out_arc_indices(&self, idx: usize) -> &[usize] {
        &self.out_arcs[idx]
    }

    pub(crate) fn in_arc_indices(&self, idx: usize) -> &[usize] {
        &self.in_arcs[idx]
    }

    /// Vertices with positive balance, ascending by id.
    pub fn sources(&self) -> Vec<VertexId> {
        self.vertices
            .iter()
            .zip(&self.balances)
            .filter(|(_, b)| b.is_positive())
            .map(|(v, _)| *v)
            .collect()
    }

    /// Vertices with negative balance, ascending by id.
    pub fn sinks(&self) -> Vec<VertexId> {
        self.vertices
            .iter()
            .zip(&self.balances)
            .filter(|(_, b)| b.is_negative())
            .map(|(v, _)| *v)
            .collect()
    }

    /// Demand of a sink: the negated balance.
    pub fn demand(&self, t: VertexId) -> Rational {
        -self.balance(t)
    }

    /// Largest sink demand, or zero when there are no sinks.
    pub fn max_demand(&self) -> Rational {
        self.balances
            .iter()
            .filter(|b| b.is_negative())
            .map(|b| -b)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Smallest arc capacity, or `None` on an arcless graph.
    pub fn min_capacity(&self) -> Option<Rational> {
        self.arcs.iter().map(|a| a.capacity.clone()).min()
    }

    /// Checks the semantic invariants: balances sum to zero, capacities
    /// are nonnegative, no self-loops. Returns every violation found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut found = Vec::new();
        let sum: Rational = self.balances.iter().sum();
        if !sum.is_zero() {
            found.push(Violation::BalanceSum(sum));
        }
        for arc in &self.arcs {
            if arc.capacity.is_negative() {
                found.push(Violation::NegativeCapacity(arc.id));
            }
            if arc.tail == arc.head {
                found.push(Violation::SelfLoop(arc.id));
            }
        }
        found
    }
}

pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    inst.validate()
}

/// Topological order of the subgraph spanned by arcs accepted by
/// `keep`, lowest vertex id first among the available. `None` if that
/// subgraph has a directed cycle.
pub fn topological_order<F>(inst: &Instance, keep: F) -> Option<Vec<VertexId>>
where
    F: Fn(&Arc) -> bool,
{
    let n = inst.vertex_count();
    let mut indegree = vec![0usize; n];
    let mut kept = Vec::with_capacity(inst.arc_count());
    for (i, arc) in inst.arcs().iter().enumerate() {
        if keep(arc) {
            indegree[inst.vindex(arc.head)] += 1;
            kept.push(i);
        }
    }
    let mut ready: alloc::collections::BTreeSet<usize> = (0..n)
        .filter(|&i| indegree[i] == 0)
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&i) = ready.iter().next() {
        ready.remove(&i);
        order.push(inst.vertex_ids()[i]);
        for &ai in inst.out_arc_indices(i) {
            let arc = inst.arc_at(ai);
            if !keep(arc) {
                continue;
            }
            let hi = inst.vindex(arc.head);
            indegree[hi] -= 1;
            if indegree[hi] == 0 {
                ready.insert(hi);
            }
        }
    }
    if order.len() == n {
        Some(order)
    } else {
        None
    }
}
