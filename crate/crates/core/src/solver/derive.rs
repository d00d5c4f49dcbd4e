use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::flow::Flow;
use crate::graph::{ArcId, Instance, VertexId};
use crate::rational::Rational;
use crate::solver::{check_is_transshipment, SolveError};
use num_traits::{Signed, Zero};

/// The single-source reformulation the solver actually runs on: the original
/// network plus a super source wired to every original source by a dummy arc
/// that carries the source's whole supply.
#[derive(Debug, Clone)]
pub struct SsufDerivation {
    /// Original network extended with the super source and its dummy arcs.
    /// The super source's balance is the total demand, original sources are
    /// rebalanced to zero, and sinks keep their balances.
    pub instance: Instance,
    /// Input flow extended with the dummy arc values, so it is again a
    /// transshipment on the derived instance.
    pub flow: Flow,
    /// The added vertex; its id is one past the largest original id, so it
    /// also sorts last internally.
    pub super_source: VertexId,
    /// Original source vertex to its dummy arc.
    pub dummies: BTreeMap<VertexId, ArcId>,
    /// Sink vertex to demand (the negated balance).
    pub demands: BTreeMap<VertexId, Rational>,
    /// Largest single demand; zero when there are no sinks.
    pub d_max: Rational,
}

impl SsufDerivation {
    /// True when the arc is one of the added dummies.
    pub fn is_dummy(&self, arc: ArcId) -> bool {
        self.dummies.values().any(|&a| a == arc)
    }
}

/// Builds the super-source reformulation of `(inst, x)`.
///
/// Demands of value zero never arise: only strictly positive balances get a
/// dummy arc and only strictly negative ones enter the demand map. The added
/// arcs all leave the super source, so the derived digraph is acyclic
/// whenever the support of `x` is.
pub fn derive_ssuf(inst: &Instance, x: &Flow) -> Result<SsufDerivation, SolveError> {
    check_is_transshipment(inst, x)?;

    let super_id = VertexId(inst.vertex_ids().iter().map(|v| v.0).max().map_or(0, |m| m + 1));
    let first_dummy = inst.arcs().iter().map(|a| a.id.0).max().map_or(0, |m| m + 1);

    let mut demands = BTreeMap::new();
    let mut total_demand = Rational::zero();
    for &t in inst.vertex_ids() {
        let b = inst.balance(t);
        if b.is_negative() {
            total_demand += -b;
            demands.insert(t, -b);
        }
    }
    let d_max = demands.values().max().cloned().unwrap_or_else(Rational::zero);

    let mut vertices: Vec<(VertexId, Rational)> = inst
        .vertex_ids()
        .iter()
        .map(|&v| {
            let b = inst.balance(v);
            let b = if b.is_positive() { Rational::zero() } else { b.clone() };
            (v, b)
        })
        .collect();
    vertices.push((super_id, total_demand));

    let mut arcs: Vec<(ArcId, VertexId, VertexId, Rational)> = inst
        .arcs()
        .iter()
        .map(|a| (a.id, a.tail, a.head, a.capacity.clone()))
        .collect();
    let mut values: Vec<(ArcId, Rational)> = inst
        .arcs()
        .iter()
        .map(|a| (a.id, x.value(inst, a.id).clone()))
        .collect();

    let mut dummies = BTreeMap::new();
    let mut next = first_dummy;
    for &s in inst.vertex_ids() {
        let b = inst.balance(s);
        if b.is_positive() {
            let id = ArcId(next);
            next += 1;
            arcs.push((id, super_id, s, b.clone()));
            values.push((id, b.clone()));
            dummies.insert(s, id);
        }
    }

    let instance = Instance::new(vertices, arcs)
        .map_err(|_| SolveError::Internal("derivation rebuilt an invalid instance"))?;
    let flow = Flow::from_pairs(&instance, values)
        .map_err(|_| SolveError::Internal("derivation lost an arc"))?;
    debug_assert_eq!(check_is_transshipment(&instance, &flow), Ok(()));

    Ok(SsufDerivation {
        instance,
        flow,
        super_source: super_id,
        dummies,
        demands,
        d_max,
    })
}
