//! Feasible fractional transshipments via maximum flow.
//!
//! Supplies become arcs out of a virtual super-source, demands arcs
//! into a virtual super-sink; the instance is feasible exactly when the
//! maximum flow saturates them all. Augmenting paths are found by BFS
//! (shortest first), so the number of augmentations is polynomial
//! regardless of the rational capacities involved.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::flow::{cancel_cycles, Flow};
use crate::graph::{Instance, VertexId};
use crate::rational::Rational;

/// Proof of infeasibility: a vertex set whose outgoing capacity,
/// together with the supplies it lacks and demands it holds, cannot
/// cover the total demand.
#[derive(Debug, Clone, PartialEq)]
pub struct CutWitness {
    /// Original vertices on the super-source side of the cut, ascending.
    pub side: Vec<VertexId>,
    /// Capacity of the cut in original terms: supplies outside `side`,
    /// demands inside it, and capacities of arcs leaving it.
    pub capacity: Rational,
    /// How much demand the cut leaves unroutable.
    pub deficiency: Rational,
}

/// Computes a feasible transshipment for the instance, or a cut
/// certifying that none exists. The returned flow has acyclic support.
pub fn solve_fractional(inst: &Instance) -> Result<Flow, CutWitness> {
    let n = inst.vertex_count();
    let sigma = n;
    let tau = n + 1;

    // Arc table of the augmented network: original arcs first (id
    // order), then super-source arcs, then super-sink arcs. Adjacency
    // lists inherit that order, which fixes the BFS tie-breaking.
    let mut arcs: Vec<(usize, usize, Rational)> = Vec::new();
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n + 2];
    let push = |arcs: &mut Vec<(usize, usize, Rational)>,
                    adj: &mut Vec<Vec<(usize, bool)>>,
                    tail: usize,
                    head: usize,
                    cap: Rational| {
        let idx = arcs.len();
        arcs.push((tail, head, cap));
        adj[tail].push((idx, true));
        adj[head].push((idx, false));
    };
    for arc in inst.arcs() {
        push(
            &mut arcs,
            &mut adj,
            inst.vindex(arc.tail),
            inst.vindex(arc.head),
            arc.capacity.clone(),
        );
    }
    let mut total_demand = Rational::zero();
    for (i, &v) in inst.vertex_ids().iter().enumerate() {
        let b = inst.balance(v);
        if b.is_positive() {
            push(&mut arcs, &mut adj, sigma, i, b.clone());
        } else if b.is_negative() {
            push(&mut arcs, &mut adj, i, tau, -b.clone());
            total_demand -= b;
        }
    }

    let mut flow = vec![Rational::zero(); arcs.len()];
    let residual = |flow: &[Rational], idx: usize, forward: bool| -> Rational {
        if forward {
            &arcs[idx].2 - &flow[idx]
        } else {
            flow[idx].clone()
        }
    };

    let mut value = Rational::zero();
    loop {
        // BFS from the super-source over positive-residual edges.
        let mut parent: Vec<Option<(usize, bool)>> = vec![None; n + 2];
        let mut seen = vec![false; n + 2];
        seen[sigma] = true;
        let mut queue = VecDeque::new();
        queue.push_back(sigma);
        while let Some(v) = queue.pop_front() {
            for &(idx, forward) in &adj[v] {
                let to = if forward { arcs[idx].1 } else { arcs[idx].0 };
                if seen[to] || !residual(&flow, idx, forward).is_positive() {
                    continue;
                }
                seen[to] = true;
                parent[to] = Some((idx, forward));
                queue.push_back(to);
            }
        }
        if !seen[tau] {
            if value == total_demand {
                break;
            }
            // Residual-reachable set = minimum cut; report it in
            // original terms.
            let side: Vec<VertexId> = (0..n).filter(|&i| seen[i]).map(|i| inst.vertex_ids()[i]).collect();
            let mut capacity = Rational::zero();
            for (i, &v) in inst.vertex_ids().iter().enumerate() {
                let b = inst.balance(v);
                if b.is_positive() && !seen[i] {
                    capacity += b;
                } else if b.is_negative() && seen[i] {
                    capacity -= b;
                }
            }
            for arc in inst.arcs() {
                if seen[inst.vindex(arc.tail)] && !seen[inst.vindex(arc.head)] {
                    capacity += &arc.capacity;
                }
            }
            debug_assert_eq!(capacity, value);
            return Err(CutWitness {
                side,
                deficiency: &total_demand - &capacity,
                capacity,
            });
        }

        // Walk the parent chain to find the bottleneck, then apply it.
        let mut bottleneck: Option<Rational> = None;
        let mut v = tau;
        while v != sigma {
            let (idx, forward) = parent[v].expect("BFS reached tau");
            let r = residual(&flow, idx, forward);
            bottleneck = Some(match bottleneck {
                Some(b) => b.min(r),
                None => r,
            });
            v = if forward { arcs[idx].0 } else { arcs[idx].1 };
        }
        let delta = bottleneck.expect("augmenting path has at least one edge");
        let mut v = tau;
        while v != sigma {
            let (idx, forward) = parent[v].expect("BFS reached tau");
            if forward {
                flow[idx] += &delta;
                v = arcs[idx].0;
            } else {
                flow[idx] -= &delta;
                v = arcs[idx].1;
            }
        }
        value += &delta;
    }

    let mut result = Flow::zero(inst);
    for (idx, arc) in inst.arcs().iter().enumerate() {
        result.set(inst, arc.id, flow[idx].clone());
    }
    Ok(cancel_cycles(inst, &result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{is_transshipment, support_topological_order};
    use crate::graph::{ArcId, Instance};
    use crate::rational::{rat, ratio};

    fn v(n: u32) -> VertexId {
        VertexId(n)
    }

    fn a(n: u32) -> ArcId {
        ArcId(n)
    }

    #[test]
    fn saturates_a_direct_arc() {
        let inst = Instance::new(
            vec![(v(0), rat(3)), (v(1), rat(-3))],
            vec![(a(0), v(0), v(1), rat(5))],
        )
        .unwrap();
        let flow = solve_fractional(&inst).unwrap();
        assert_eq!(*flow.value(&inst, a(0)), rat(3));
    }

    #[test]
    fn reports_a_cut_when_demand_exceeds_capacity() {
        let inst = Instance::new(
            vec![(v(0), rat(3)), (v(1), rat(0)), (v(2), rat(-3))],
            vec![
                (a(0), v(0), v(1), rat(5)),
                (a(1), v(1), v(2), rat(2)),
            ],
        )
        .unwrap();
        let witness = solve_fractional(&inst).unwrap_err();
        assert_eq!(witness.side, vec![v(0), v(1)]);
        assert_eq!(witness.capacity, rat(2));
        assert_eq!(witness.deficiency, rat(1));
    }

    #[test]
    fn splits_across_a_diamond_when_one_route_is_too_small() {
        let inst = Instance::new(
            vec![
                (v(0), ratio(7, 2)),
                (v(1), rat(0)),
                (v(2), rat(0)),
                (v(3), ratio(-7, 2)),
            ],
            vec![
                (a(0), v(0), v(1), rat(2)),
                (a(1), v(0), v(2), rat(2)),
                (a(2), v(1), v(3), rat(2)),
                (a(3), v(2), v(3), rat(2)),
            ],
        )
        .unwrap();
        let flow = solve_fractional(&inst).unwrap();
        assert!(is_transshipment(&inst, &flow));
        assert!(flow.respects_capacities(&inst));
        assert!(support_topological_order(&inst, &flow).is_ok());
    }

    #[test]
    fn zero_demand_instance_yields_zero_flow() {
        let inst = Instance::new(
            vec![(v(0), rat(0)), (v(1), rat(0))],
            vec![(a(0), v(0), v(1), rat(4))],
        )
        .unwrap();
        assert!(solve_fractional(&inst).unwrap().is_zero());
    }

    /// The first (shortest) augmenting path takes the middle arc; the
    /// second can only finish by pushing flow back across it. Checks
    /// that rerouting through backward residual edges works exactly.
    #[test]
    fn reroutes_through_backward_residual_edges() {
        let inst = Instance::new(
            vec![
                (v(0), rat(2)),
                (v(1), rat(0)),
                (v(2), rat(0)),
                (v(3), rat(0)),
                (v(4), rat(0)),
                (v(5), rat(-2)),
            ],
            vec![
                (a(0), v(0), v(1), rat(1)),
                (a(1), v(1), v(2), rat(1)),
                (a(2), v(2), v(5), rat(1)),
                (a(3), v(0), v(3), rat(1)),
                (a(4), v(3), v(2), rat(1)),
                (a(5), v(1), v(4), rat(1)),
                (a(6), v(4), v(5), rat(1)),
            ],
        )
        .unwrap();
        let flow = solve_fractional(&inst).unwrap();
        assert!(is_transshipment(&inst, &flow));
        assert!(flow.respects_capacities(&inst));
        assert_eq!(*flow.value(&inst, a(1)), rat(0));
        assert_eq!(*flow.value(&inst, a(6)), rat(1));
    }
}
