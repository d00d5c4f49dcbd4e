//! Mutable solver state: the working flow, the wandering sub-sinks and the
//! bookkeeping that ties an entire run together.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::flow::{PathFlow, UnsplittableSolution};
use crate::graph::{ArcId, Instance, VertexId};
use crate::rational::Rational;
use crate::solver::derive::SsufDerivation;
use crate::solver::search::SearchResult;
use crate::solver::{Direction, MoveRule, SolveError, SolveEvent, SolveOptions, SubSinkId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SinkState {
    Active,
    /// Parked at a junction while its sub-digraph is consumed.
    Reserved,
    Delivered,
}

#[derive(Debug, Clone)]
pub(crate) struct SubSink {
    pub(crate) id: SubSinkId,
    pub(crate) demand: Rational,
    /// Vertex index of the current location.
    pub(crate) at: usize,
    /// Arc indices traversed so far, in the order the sub-sink moved.
    pub(crate) trace: Vec<usize>,
    pub(crate) state: SinkState,
}

/// One run of the solver over a derived single-source network.
///
/// The state can be driven step by step (label, search, act, move) or all the
/// way with [`SolverState::run_to_completion`]. Flow values, liveness and the
/// current labels are queryable throughout, which the operation-level tests
/// rely on.
pub struct SolverState<'a> {
    pub(crate) net: &'a Instance,
    /// Working flow per arc index.
    pub(crate) y: Vec<Rational>,
    /// False once an arc's flow hit zero; dead arcs never come back.
    pub(crate) live: Vec<bool>,
    /// `(tail, head)` vertex indices per arc index.
    pub(crate) ends: Vec<(usize, usize)>,
    pub(crate) super_idx: usize,
    /// Arc indices of the dummy arcs, indexed by source vertex index.
    dummy_at: BTreeMap<usize, usize>,
    subsinks: Vec<SubSink>,
    at_vertex: Vec<Vec<usize>>,
    next_counter: BTreeMap<u32, u32>,
    undelivered_of: BTreeMap<u32, usize>,
    pub(crate) singular: Vec<bool>,
    pub(crate) funnel: Vec<bool>,
    pub(crate) labels_fresh: bool,
    iterations: usize,
    pub(crate) events: Vec<SolveEvent>,
    pub(crate) direction: Direction,
    options: SolveOptions,
    pair_parent: Vec<usize>,
    terminal_slot: BTreeMap<u32, usize>,
    pair_edges: BTreeSet<(u32, u32)>,
}

impl<'a> SolverState<'a> {
    pub fn new(
        derivation: &'a SsufDerivation,
        direction: Direction,
        options: SolveOptions,
    ) -> SolverState<'a> {
        let net = &derivation.instance;
        let n = net.vertex_count();
        let m = net.arc_count();
        let y: Vec<Rational> = derivation.flow.values().to_vec();
        let live: Vec<bool> = y.iter().map(|v| !v.is_zero()).collect();
        let ends: Vec<(usize, usize)> = net
            .arcs()
            .iter()
            .map(|a| (net.vindex(a.tail), net.vindex(a.head)))
            .collect();
        let super_idx = net.vindex(derivation.super_source);

        let mut dummy_at = BTreeMap::new();
        for (&s, &a) in &derivation.dummies {
            dummy_at.insert(net.vindex(s), net.aindex(a));
        }

        let mut subsinks = Vec::new();
        let mut at_vertex = vec![Vec::new(); n];
        let mut next_counter = BTreeMap::new();
        let mut undelivered_of = BTreeMap::new();
        for (&t, d) in &derivation.demands {
            let handle = subsinks.len();
            subsinks.push(SubSink {
                id: (t, 0),
                demand: d.clone(),
                at: net.vindex(t),
                trace: Vec::new(),
                state: SinkState::Active,
            });
            at_vertex[net.vindex(t)].push(handle);
            next_counter.insert(t.0, 1);
            undelivered_of.insert(t.0, 1);
        }

        let mut terminal_slot = BTreeMap::new();
        for &s in derivation.dummies.keys() {
            let slot = terminal_slot.len();
            terminal_slot.insert(s.0, slot);
        }
        for &t in derivation.demands.keys() {
            let slot = terminal_slot.len();
            terminal_slot.insert(t.0, slot);
        }
        let pair_parent = (0..terminal_slot.len()).collect();

        SolverState {
            net,
            y,
            live,
            ends,
            super_idx,
            dummy_at,
            subsinks,
            at_vertex,
            next_counter,
            undelivered_of,
            singular: vec![false; m],
            funnel: vec![false; n],
            labels_fresh: false,
            iterations: 0,
            events: Vec::new(),
            direction,
            options,
            pair_parent,
            terminal_slot,
            pair_edges: BTreeSet::new(),
        }
    }

    pub(crate) fn out_live(&self, v: usize) -> Vec<usize> {
        self.net
            .out_arc_indices(v)
            .iter()
            .copied()
            .filter(|&a| self.live[a])
            .collect()
    }

    pub(crate) fn in_live(&self, v: usize) -> Vec<usize> {
        self.net
            .in_arc_indices(v)
            .iter()
            .copied()
            .filter(|&a| self.live[a])
            .collect()
    }

    pub(crate) fn out_degree_live(&self, v: usize) -> usize {
        self.net
            .out_arc_indices(v)
            .iter()
            .filter(|&&a| self.live[a])
            .count()
    }

    /// Handles of the active sub-sinks at a vertex, largest demand first and
    /// lowest id among equals.
    pub(crate) fn sinks_at_sorted(&self, v: usize) -> Vec<usize> {
        let mut hs: Vec<usize> = self.at_vertex[v]
            .iter()
            .copied()
            .filter(|&h| self.subsinks[h].state == SinkState::Active)
            .collect();
        hs.sort_by(|&a, &b| {
            self.subsinks[b]
                .demand
                .cmp(&self.subsinks[a].demand)
                .then(self.subsinks[a].id.cmp(&self.subsinks[b].id))
        });
        hs
    }

    pub(crate) fn demand_of(&self, h: usize) -> &Rational {
        &self.subsinks[h].demand
    }

    pub(crate) fn id_of(&self, h: usize) -> SubSinkId {
        self.subsinks[h].id
    }

    pub(crate) fn set_reserved(&mut self, h: usize, reserved: bool) {
        self.subsinks[h].state = if reserved {
            SinkState::Reserved
        } else {
            SinkState::Active
        };
    }

    /// Walks one sub-sink backward across `arc`, consuming its demand from
    /// the arc's flow. Arrival at the super source finalizes the sub-sink.
    pub(crate) fn move_subsink(
        &mut self,
        h: usize,
        arc: usize,
        rule: MoveRule,
    ) -> Result<(), SolveError> {
        let (tail, head) = self.ends[arc];
        if self.subsinks[h].at != head {
            return Err(SolveError::Internal("sub-sink moved along a distant arc"));
        }
        if !self.live[arc] {
            return Err(SolveError::Internal("sub-sink moved along a dead arc"));
        }
        let d = self.subsinks[h].demand.clone();
        if self.y[arc] < d {
            return Err(SolveError::Internal("move exceeded the arc's flow"));
        }
        self.y[arc] -= &d;
        if self.y[arc].is_zero() {
            self.live[arc] = false;
        }
        let pos = self.at_vertex[head]
            .iter()
            .position(|&x| x == h)
            .ok_or(SolveError::Internal("sub-sink missing from its vertex"))?;
        self.at_vertex[head].swap_remove(pos);
        self.at_vertex[tail].push(h);
        self.subsinks[h].at = tail;
        self.subsinks[h].trace.push(arc);
        self.events.push(SolveEvent::SinkMove {
            sink: self.subsinks[h].id,
            arc: self.net.arc_at(arc).id,
            rule,
        });
        if tail == self.super_idx {
            self.deliver(h)?;
        }
        Ok(())
    }

    fn deliver(&mut self, h: usize) -> Result<(), SolveError> {
        let pos = self.at_vertex[self.super_idx]
            .iter()
            .position(|&x| x == h)
            .ok_or(SolveError::Internal("delivered sub-sink left no handle"))?;
        self.at_vertex[self.super_idx].swap_remove(pos);
        self.subsinks[h].state = SinkState::Delivered;

        let trace = &self.subsinks[h].trace;
        if trace.len() < 2 {
            return Err(SolveError::Internal("delivery path shorter than two arcs"));
        }
        let dummy = *trace.last().expect("trace checked non-empty");
        if self.ends[dummy].0 != self.super_idx {
            return Err(SolveError::Internal("delivery did not end on a dummy arc"));
        }
        let source = self.net.arc_at(dummy).head;
        let sink = self.subsinks[h].id;
        let path: Vec<ArcId> = trace
            .iter()
            .rev()
            .map(|&a| self.net.arc_at(a).id)
            .collect();
        self.events.push(SolveEvent::Delivered {
            sink,
            source,
            value: self.subsinks[h].demand.clone(),
            path,
        });

        let left = self
            .undelivered_of
            .get_mut(&sink.0 .0)
            .ok_or(SolveError::Internal("delivery for an unknown sink"))?;
        *left -= 1;

        if self.pair_edges.insert((source.0, sink.0 .0)) {
            let a = self.terminal_slot[&source.0];
            let b = self.terminal_slot[&sink.0 .0];
            let (ra, rb) = (self.find_slot(a), self.find_slot(b));
            if ra == rb {
                return Err(SolveError::Internal("terminal pair graph closed a cycle"));
            }
            self.pair_parent[ra] = rb;
        }
        Ok(())
    }

    fn find_slot(&mut self, mut x: usize) -> usize {
        while self.pair_parent[x] != x {
            self.pair_parent[x] = self.pair_parent[self.pair_parent[x]];
            x = self.pair_parent[x];
        }
        x
    }

    /// Splits off `routed` of a sub-sink's demand into a fresh sub-sink at
    /// the same location, inheriting the trace. Returns the new handle.
    pub(crate) fn split_subsink(&mut self, h: usize, routed: Rational) -> Result<usize, SolveError> {
        if routed.is_zero() || routed >= self.subsinks[h].demand {
            return Err(SolveError::Internal("split does not partition the demand"));
        }
        let orig = self.subsinks[h].id.0;
        let ctr = self
            .next_counter
            .get_mut(&orig.0)
            .ok_or(SolveError::Internal("split of an unknown sink"))?;
        let id = (orig, *ctr);
        *ctr += 1;
        self.subsinks[h].demand -= &routed;
        let piece = SubSink {
            id,
            demand: routed,
            at: self.subsinks[h].at,
            trace: self.subsinks[h].trace.clone(),
            state: SinkState::Active,
        };
        let handle = self.subsinks.len();
        self.subsinks.push(piece);
        self.at_vertex[self.subsinks[handle].at].push(handle);
        *self.undelivered_of.entry(orig.0).or_insert(0) += 1;
        Ok(handle)
    }

    /// Consumes every arc that alone carries at least the demand of a
    /// sub-sink at its head, sweeping arcs in id order until none is left.
    pub fn run_preliminary(&mut self) -> Result<(), SolveError> {
        loop {
            let mut moved = false;
            for arc in 0..self.y.len() {
                loop {
                    if !self.live[arc] {
                        break;
                    }
                    let head = self.ends[arc].1;
                    let pick = self
                        .sinks_at_sorted(head)
                        .into_iter()
                        .find(|&h| self.subsinks[h].demand <= self.y[arc]);
                    match pick {
                        Some(h) => {
                            self.move_subsink(h, arc, MoveRule::Preliminary)?;
                            moved = true;
                        }
                        None => break,
                    }
                }
            }
            if !moved {
                return Ok(());
            }
        }
    }

    /// Recomputes funnel and singular labels over the live digraph.
    pub fn label(&mut self) -> Result<(), SolveError> {
        let n = self.net.vertex_count();
        let m = self.y.len();
        let mut indeg = vec![0usize; n];
        for a in 0..m {
            if self.live[a] {
                indeg[self.ends[a].1] += 1;
            }
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(&v) = ready.iter().next() {
            ready.remove(&v);
            order.push(v);
            for &a in self.net.out_arc_indices(v) {
                if self.live[a] {
                    let h = self.ends[a].1;
                    indeg[h] -= 1;
                    if indeg[h] == 0 {
                        ready.insert(h);
                    }
                }
            }
        }
        if order.len() != n {
            return Err(SolveError::Internal("live flow support became cyclic"));
        }

        let mut ok = vec![false; n];
        for &v in order.iter().rev() {
            let outs = self.out_live(v);
            ok[v] = match outs.len() {
                0 => true,
                1 => ok[self.ends[outs[0]].1],
                _ => false,
            };
            self.funnel[v] = outs.len() <= 1;
        }
        let fresh: Vec<bool> = (0..m).map(|a| self.live[a] && ok[self.ends[a].1]).collect();
        if self.options.check_invariants {
            for a in 0..m {
                if self.singular[a] && self.live[a] && !fresh[a] {
                    return Err(SolveError::Internal("a singular arc lost its label"));
                }
            }
        }
        self.singular = fresh;
        self.labels_fresh = true;
        Ok(())
    }

    /// Walks sub-sinks backward as far as the move rules allow: singular arcs
    /// carrying exactly the demand first, non-singular arcs carrying at least
    /// the demand otherwise. Sweeps until no sub-sink can move.
    pub fn move_sinks(&mut self) -> Result<(), SolveError> {
        'sweep: loop {
            for v in 0..self.net.vertex_count() {
                if v == self.super_idx {
                    continue;
                }
                for h in self.sinks_at_sorted(v) {
                    let d = self.subsinks[h].demand.clone();
                    let ins = self.in_live(v);
                    let exact = ins
                        .iter()
                        .copied()
                        .find(|&a| self.singular[a] && self.y[a] == d);
                    let chosen = exact.or_else(|| {
                        ins.iter()
                            .copied()
                            .find(|&a| !self.singular[a] && self.y[a] >= d)
                    });
                    if let Some(a) = chosen {
                        let rule = if exact.is_some() {
                            MoveRule::ExactSingular
                        } else {
                            MoveRule::NonSingular
                        };
                        self.move_subsink(h, a, rule)?;
                        continue 'sweep;
                    }
                }
            }
            return Ok(());
        }
    }

    pub fn undelivered_count(&self) -> usize {
        self.subsinks
            .iter()
            .filter(|s| s.state != SinkState::Delivered)
            .count()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn events(&self) -> &[SolveEvent] {
        &self.events
    }

    pub fn flow_value(&self, a: ArcId) -> Option<&Rational> {
        self.net.arc_index(a).map(|i| &self.y[i])
    }

    pub fn is_live(&self, a: ArcId) -> bool {
        self.net.arc_index(a).map_or(false, |i| self.live[i])
    }

    pub fn is_singular(&self, a: ArcId) -> bool {
        self.net.arc_index(a).map_or(false, |i| self.singular[i])
    }

    pub fn is_funnel(&self, v: VertexId) -> bool {
        self.net
            .vertex_index(v)
            .map_or(false, |i| self.funnel[i])
    }

    /// Active sub-sinks at a vertex with their demands, in move order.
    pub fn subsinks_at(&self, v: VertexId) -> Vec<(SubSinkId, Rational)> {
        match self.net.vertex_index(v) {
            None => Vec::new(),
            Some(i) => self
                .sinks_at_sorted(i)
                .into_iter()
                .map(|h| (self.subsinks[h].id, self.subsinks[h].demand.clone()))
                .collect(),
        }
    }

    /// Runs the full pipeline: preliminary consumption, then alternating
    /// search-and-act iterations until every sub-sink sits at the super
    /// source.
    pub fn run_to_completion(&mut self) -> Result<(), SolveError> {
        self.run_preliminary()?;
        if self.options.check_invariants {
            self.check_invariants()?;
        }
        let cap = self.y.len() + 2;
        while self.undelivered_count() > 0 {
            if self.iterations > cap {
                return Err(SolveError::Internal("iteration cap exceeded"));
            }
            self.label()?;
            match self.find_structure()? {
                SearchResult::NiceCycle(c) => self.augment_nice_cycle(&c)?,
                SearchResult::SingularDigraph(sd) => self.route_singular_digraph(&sd)?,
            }
            self.move_sinks()?;
            self.iterations += 1;
            if self.options.check_invariants {
                self.check_invariants()?;
            }
        }
        Ok(())
    }

    /// Verifies the run's working invariants; called between iterations when
    /// enabled. Failures signal solver bugs, never bad input.
    pub fn check_invariants(&mut self) -> Result<(), SolveError> {
        let n = self.net.vertex_count();
        if self.subsinks.iter().any(|s| s.state == SinkState::Reserved) {
            return Err(SolveError::Internal("a sub-sink stayed reserved"));
        }
        for &left in self.undelivered_of.values() {
            if left > 1 {
                return Err(SolveError::Internal("a sink has two traveling sub-sinks"));
            }
        }
        for v in 0..n {
            let mut net_in = Rational::zero();
            for &a in self.net.in_arc_indices(v) {
                net_in += &self.y[a];
            }
            for &a in self.net.out_arc_indices(v) {
                net_in -= &self.y[a];
            }
            let mut demand = Rational::zero();
            for &h in &self.at_vertex[v] {
                if self.subsinks[h].state == SinkState::Active {
                    demand += &self.subsinks[h].demand;
                }
            }
            if v == self.super_idx {
                if -net_in
                    != self
                        .subsinks
                        .iter()
                        .filter(|s| s.state == SinkState::Active)
                        .map(|s| s.demand.clone())
                        .sum::<Rational>()
                {
                    return Err(SolveError::Internal("super source outflow mismatch"));
                }
                continue;
            }
            if net_in != demand {
                return Err(SolveError::Internal("flow no longer serves the demands"));
            }
            let sinks = self.sinks_at_sorted(v);
            if sinks.is_empty() {
                continue;
            }
            let ins = self.in_live(v);
            if ins.len() < 2 {
                return Err(SolveError::Internal("sink vertex with fewer than two in-arcs"));
            }
            let irregular: Vec<usize> = sinks
                .iter()
                .copied()
                .filter(|&h| {
                    ins.iter()
                        .any(|&a| self.y[a] >= self.subsinks[h].demand)
                })
                .collect();
            if irregular.len() > 1 {
                return Err(SolveError::Internal("two irregular sub-sinks share a vertex"));
            }
            if irregular.len() == 1 {
                if self.out_degree_live(v) != 0 {
                    return Err(SolveError::Internal(
                        "irregular sub-sink at a vertex with outgoing flow",
                    ));
                }
                if sinks.len() < 2 {
                    return Err(SolveError::Internal("irregular sub-sink without a companion"));
                }
            }
        }
        self.check_pair_components()
    }

    /// Every component of the source-sink pairing forest may hold at most one
    /// terminal that is still active.
    fn check_pair_components(&mut self) -> Result<(), SolveError> {
        let mut active: BTreeMap<usize, usize> = BTreeMap::new();
        let sources: Vec<(u32, usize)> = self
            .dummy_at
            .iter()
            .map(|(&v, _)| (self.net.vertex_ids()[v].0, v))
            .collect();
        for (vid, v) in sources {
            if self.out_degree_live(v) > 0 {
                let slot = self.terminal_slot[&vid];
                let root = self.find_slot(slot);
                *active.entry(root).or_insert(0) += 1;
            }
        }
        let sinks: Vec<u32> = self
            .undelivered_of
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&t, _)| t)
            .collect();
        for t in sinks {
            let slot = self.terminal_slot[&t];
            let root = self.find_slot(slot);
            *active.entry(root).or_insert(0) += 1;
        }
        if active.values().any(|&c| c > 1) {
            return Err(SolveError::Internal(
                "a pairing component kept two active terminals",
            ));
        }
        Ok(())
    }

    /// Final assembly: merges the delivered sub-sinks into per-pair paths.
    pub fn finish(self) -> Result<(UnsplittableSolution, usize, Vec<SolveEvent>), SolveError> {
        if self.subsinks.iter().any(|s| s.state != SinkState::Delivered) {
            return Err(SolveError::Internal("finish before all demands arrived"));
        }
        if self.live.iter().any(|&l| l) {
            return Err(SolveError::Internal("flow remained after completion"));
        }
        let mut merged: BTreeMap<(u32, u32), PathFlow> = BTreeMap::new();
        for s in &self.subsinks {
            let dummy = *s.trace.last().expect("delivered sub-sinks moved");
            let source = self.net.arc_at(dummy).head;
            let arcs: Vec<ArcId> = s.trace[..s.trace.len() - 1]
                .iter()
                .rev()
                .map(|&a| self.net.arc_at(a).id)
                .collect();
            match merged.entry((source.0, s.id.0 .0)) {
                alloc::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(PathFlow {
                        source,
                        sink: s.id.0,
                        value: s.demand.clone(),
                        arcs,
                    });
                }
                alloc::collections::btree_map::Entry::Occupied(mut e) => {
                    if e.get().arcs != arcs {
                        return Err(SolveError::Internal(
                            "one source-sink pair produced two distinct paths",
                        ));
                    }
                    e.get_mut().value += &s.demand;
                }
            }
        }
        let solution = UnsplittableSolution {
            paths: merged.into_values().collect(),
        };
        Ok((solution, self.iterations, self.events))
    }

    /// Arc index of the dummy arc feeding `v`, if `v` is an original source.
    pub(crate) fn dummy_arc_at(&self, v: usize) -> Option<usize> {
        self.dummy_at.get(&v).copied()
    }
}
