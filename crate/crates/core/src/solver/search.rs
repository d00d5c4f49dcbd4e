//! Structure search: alternating walks that close into augmentable cycles,
//! or bottom out in a singular sub-digraph.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::graph::{ArcId, VertexId};
use crate::rational::Rational;
use crate::solver::state::SolverState;
use crate::solver::{Direction, SolveError, SolveEvent};

/// Traversal direction of one walk step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkDir {
    Forward,
    Backward,
}

/// A closed alternating walk avoiding the super source. Forward steps follow
/// arcs, backward steps run against singular arcs; augmenting along it keeps
/// the flow feasible while draining at least one arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceCycle {
    pub steps: Vec<(ArcId, WalkDir)>,
}

/// A region whose every backward trail ends at the super source: removing the
/// super source leaves an in-tree rooted at the junction `root`. `arcs` holds
/// every live in-arc of the region's vertices except `entering`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularDigraph {
    pub root: VertexId,
    pub entering: ArcId,
    pub arcs: Vec<ArcId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult {
    NiceCycle(NiceCycle),
    SingularDigraph(SingularDigraph),
}

enum BackwardProbe {
    /// Arcs of a backward path from the junction to a vertex with at least
    /// two live outgoing arcs, in traversal order.
    Escape(Vec<usize>),
    /// Every trail ended at the super source; the explored arc set.
    Exhausted(Vec<usize>),
}

impl<'a> SolverState<'a> {
    /// Hunts for the next thing to act on: either a nice alternating cycle or
    /// a singular sub-digraph. Requires fresh labels.
    pub fn find_structure(&mut self) -> Result<SearchResult, SolveError> {
        if !self.labels_fresh {
            return Err(SolveError::Internal("structure search on stale labels"));
        }
        let n = self.net.vertex_count();
        let start = (0..n)
            .find(|&v| !self.funnel[v] && self.out_degree_live(v) > 0)
            .or_else(|| (0..n).find(|&v| self.out_degree_live(v) > 0))
            .ok_or(SolveError::Internal("no flow left to search"))?;

        let mut pos: Vec<Option<usize>> = vec![None; n];
        let mut verts = vec![start];
        pos[start] = Some(0);
        let mut steps: Vec<(usize, WalkDir)> = Vec::new();
        let mut cur = start;
        let mut skip_forward: Option<usize> = None;

        loop {
            // Forward phase: follow the lowest live out-arc until a junction.
            loop {
                let outs = self.out_live(cur);
                let pick = outs.into_iter().find(|&a| Some(a) != skip_forward);
                skip_forward = None;
                let a = match pick {
                    Some(a) => a,
                    None => break,
                };
                steps.push((a, WalkDir::Forward));
                let h = self.ends[a].1;
                if let Some(first) = pos[h] {
                    return Ok(SearchResult::NiceCycle(self.close_cycle(&steps, first)?));
                }
                pos[h] = Some(verts.len());
                verts.push(h);
                cur = h;
            }

            // cur is a junction; the arc that got us here enters the probe.
            let &(entering, dir) = steps
                .last()
                .ok_or(SolveError::Internal("walk started on a junction"))?;
            if dir != WalkDir::Forward {
                return Err(SolveError::Internal("junction reached walking backward"));
            }
            match self.backward_probe(cur, entering)? {
                BackwardProbe::Escape(path) => {
                    let mut last = 0;
                    for a in path {
                        steps.push((a, WalkDir::Backward));
                        let t = self.ends[a].0;
                        if let Some(first) = pos[t] {
                            return Ok(SearchResult::NiceCycle(self.close_cycle(&steps, first)?));
                        }
                        pos[t] = Some(verts.len());
                        verts.push(t);
                        cur = t;
                        last = a;
                    }
                    skip_forward = Some(last);
                }
                BackwardProbe::Exhausted(arcs) => {
                    return Ok(SearchResult::SingularDigraph(SingularDigraph {
                        root: self.net.vertex_ids()[cur],
                        entering: self.net.arc_at(entering).id,
                        arcs: arcs.iter().map(|&a| self.net.arc_at(a).id).collect(),
                    }));
                }
            }
        }
    }

    /// Depth-first probe against the arc directions, expanding funnel
    /// vertices only. Returns the first backward path that reaches a vertex
    /// with several live out-arcs, or the whole explored arc set when every
    /// trail dies at the super source.
    fn backward_probe(&self, w: usize, skip: usize) -> Result<BackwardProbe, SolveError> {
        struct Frame {
            ins: Vec<usize>,
            next: usize,
            via: Option<usize>,
        }
        let mut visited = vec![false; self.net.vertex_count()];
        visited[w] = true;
        let mut explored: Vec<usize> = Vec::new();
        let mut stack = vec![Frame {
            ins: self.in_live(w).into_iter().filter(|&a| a != skip).collect(),
            next: 0,
            via: None,
        }];
        if stack[0].ins.is_empty() {
            return Err(SolveError::Internal("junction had no second in-arc"));
        }
        while let Some(frame) = stack.last_mut() {
            if frame.next >= frame.ins.len() {
                stack.pop();
                continue;
            }
            let a = frame.ins[frame.next];
            frame.next += 1;
            let t = self.ends[a].0;
            if t == self.super_idx {
                explored.push(a);
                continue;
            }
            if visited[t] {
                return Err(SolveError::Internal(
                    "backward probe revisited a funnel vertex",
                ));
            }
            if self.funnel[t] {
                visited[t] = true;
                explored.push(a);
                stack.push(Frame {
                    ins: self.in_live(t),
                    next: 0,
                    via: Some(a),
                });
            } else {
                let mut path: Vec<usize> =
                    stack.iter().filter_map(|f| f.via).collect();
                path.push(a);
                return Ok(BackwardProbe::Escape(path));
            }
        }
        Ok(BackwardProbe::Exhausted(explored))
    }

    fn close_cycle(
        &self,
        steps: &[(usize, WalkDir)],
        first: usize,
    ) -> Result<NiceCycle, SolveError> {
        let cycle = &steps[first..];
        let fwd = cycle.iter().filter(|(_, d)| *d == WalkDir::Forward).count();
        if fwd == 0 || fwd == cycle.len() {
            return Err(SolveError::Internal("cycle closed without alternation"));
        }
        Ok(NiceCycle {
            steps: cycle
                .iter()
                .map(|&(a, d)| (self.net.arc_at(a).id, d))
                .collect(),
        })
    }

    /// Shifts flow around a nice cycle: in the upper variant forward arcs
    /// shrink and backward arcs grow, in the lower variant the roles swap.
    /// The step size drains an arc on the shrinking side or raises an arc on
    /// the growing side to exactly the demand of a sub-sink at its head,
    /// whichever is smaller.
    pub fn augment_nice_cycle(&mut self, cycle: &NiceCycle) -> Result<(), SolveError> {
        let mut forward = Vec::new();
        let mut backward = Vec::new();
        for &(id, d) in &cycle.steps {
            let idx = self
                .net
                .arc_index(id)
                .ok_or(SolveError::Internal("cycle over an unknown arc"))?;
            if !self.live[idx] {
                return Err(SolveError::Internal("cycle over a dead arc"));
            }
            match d {
                WalkDir::Forward => forward.push(idx),
                WalkDir::Backward => backward.push(idx),
            }
        }
        if forward.is_empty() || backward.is_empty() {
            return Err(SolveError::Internal("cycle does not alternate"));
        }
        let (shrink, grow) = match self.direction {
            Direction::Upper => (&forward, &backward),
            Direction::Lower => (&backward, &forward),
        };
        if self.direction == Direction::Upper {
            for &a in grow {
                if !self.singular[a] {
                    return Err(SolveError::Internal("flow pushed onto a non-singular arc"));
                }
            }
        }

        let mut delta: Option<Rational> = None;
        for &a in shrink {
            if delta.as_ref().map_or(true, |d| self.y[a] < *d) {
                delta = Some(self.y[a].clone());
            }
        }
        for &a in grow {
            let head = self.ends[a].1;
            for h in self.sinks_at_sorted(head) {
                let dem = self.demand_of(h);
                if *dem > self.y[a] {
                    let gap = dem - &self.y[a];
                    if delta.as_ref().map_or(true, |d| gap < *d) {
                        delta = Some(gap);
                    }
                }
            }
        }
        let delta = delta.ok_or(SolveError::Internal("empty cycle"))?;
        if delta <= Rational::zero() {
            return Err(SolveError::Internal("augmentation step was not positive"));
        }

        for &a in shrink {
            self.y[a] -= &delta;
            if self.y[a].is_zero() {
                self.live[a] = false;
            }
            if self.y[a] < Rational::zero() {
                return Err(SolveError::Internal("augmentation drained an arc negative"));
            }
        }
        for &a in grow {
            self.y[a] += &delta;
        }
        self.events.push(SolveEvent::CycleAugment {
            delta,
            forward: forward.iter().map(|&a| self.net.arc_at(a).id).collect(),
            backward: backward.iter().map(|&a| self.net.arc_at(a).id).collect(),
        });
        self.labels_fresh = false;
        Ok(())
    }
}
