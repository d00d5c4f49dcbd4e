//! Routing in rounds: serving every sink in a bounded number of waves, each
//! wave an unsplittable transshipment that fits the original capacities on
//! its own.
//!
//! The construction replicates the network into parallel layers, each layer
//! carrying an equal share of every capacity and of the fractional flow.
//! One collector vertex per sink and one dispatcher vertex per source tie
//! the layers together, and the path solver routes the layered network.
//! A sink whose demand lands in a single layer joins that layer's round;
//! demand that was split across layers is grouped by where its pieces
//! landed, finely enough that each group's combined load still fits.

use alloc::collections::btree_map::Entry;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::flow::{Flow, PathFlow, UnsplittableSolution};
use crate::graph::{ArcId, Instance, VertexId};
use crate::rational::{rat, Rational};
use crate::solver::{solve_upper, MoveRule, SolveError, SolveEvent, SolveRun, SubSinkId};

/// Why a round plan could not be produced.
#[derive(Debug, Clone, PartialEq)]
pub enum RoundsError {
    /// The largest demand exceeds the smallest capacity, so no layer count
    /// leaves room for the per-arc slack.
    DemandAboveCapacity { d_max: Rational, c_min: Rational },
    /// The largest demand equals the smallest capacity. No finite layer
    /// count closes the gap, and whether rounds still exist is unsettled.
    BoundaryOpen,
    /// The scheme needs more headroom between demands and capacities.
    DemandTooLarge { d_max: Rational, limit: Rational },
    /// The layered network would not fit the id space.
    NetworkTooLarge,
    /// The input flow does not fit the arc capacities.
    FlowOverCapacity(ArcId),
    /// The path solver rejected the layered network.
    Solve(SolveError),
}

impl fmt::Display for RoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundsError::DemandAboveCapacity { d_max, c_min } => {
                write!(f, "largest demand {d_max} exceeds smallest capacity {c_min}")
            }
            RoundsError::BoundaryOpen => write!(
                f,
                "largest demand equals smallest capacity; no layer count separates them"
            ),
            RoundsError::DemandTooLarge { d_max, limit } => {
                write!(f, "scheme needs every demand at most {limit}, found {d_max}")
            }
            RoundsError::NetworkTooLarge => {
                write!(f, "layered network would not fit the id space")
            }
            RoundsError::FlowOverCapacity(a) => {
                write!(f, "input flow exceeds the capacity of arc {a}")
            }
            RoundsError::Solve(e) => write!(f, "routing the layered network failed: {e}"),
        }
    }
}

/// Smallest layer parameter `n` that leaves room for one extra demand on
/// every arc: `n >= c_min / (c_min - d_max)`, and at least 2. The layered
/// network then uses `n + 1` layers.
pub fn choose_n(d_max: &Rational, c_min: &Rational) -> Result<u32, RoundsError> {
    if d_max.is_zero() {
        return Ok(2);
    }
    if d_max > c_min {
        return Err(RoundsError::DemandAboveCapacity {
            d_max: d_max.clone(),
            c_min: c_min.clone(),
        });
    }
    if d_max == c_min {
        return Err(RoundsError::BoundaryOpen);
    }
    let need = (c_min / (c_min - d_max)).ceil().to_integer();
    let n = need.to_u32().ok_or(RoundsError::NetworkTooLarge)?;
    Ok(n.max(2))
}

/// A network replicated into `copies` parallel layers, each carrying an
/// equal share of every capacity, plus relay vertices tying the layers to
/// the original terminals: one collector per sink (demand `d_t`, fed by one
/// arc of capacity `d_t / copies` from each layer) and one dispatcher per
/// source (supply `b_s`, feeding each layer through an arc of capacity
/// `b_s / copies`).
///
/// Layer `α` of vertex index `i` has id `α·V + i`, layer `α` of arc index
/// `k` has id `α·A + k`; collectors, dispatchers, and their relay arcs
/// follow in that order.
pub struct CopiedNetwork {
    pub instance: Instance,
    /// The input flow split evenly across the layers, with every relay arc
    /// saturated; a transshipment for the relay balances by construction.
    pub flow: Flow,
    pub copies: u32,
    base_vertices: u32,
    base_arcs: u32,
    relay_arcs: u32,
    base_vertex_ids: Vec<VertexId>,
    base_arc_ids: Vec<ArcId>,
    sinks: Vec<VertexId>,
    sources: Vec<VertexId>,
}

impl CopiedNetwork {
    /// Layer a copied arc belongs to; `None` for relay arcs.
    pub fn layer_of_arc(&self, a: ArcId) -> Option<u32> {
        (a.0 < self.copies * self.base_arcs).then(|| a.0 / self.base_arcs)
    }

    /// Original arc behind a layered copy; `None` for relay arcs.
    pub fn original_arc(&self, a: ArcId) -> Option<ArcId> {
        (a.0 < self.copies * self.base_arcs)
            .then(|| self.base_arc_ids[(a.0 % self.base_arcs) as usize])
    }

    /// Layer a relay arc serves; `None` for layered copies.
    pub fn layer_of_relay(&self, a: ArcId) -> Option<u32> {
        let rel = a.0.checked_sub(self.copies * self.base_arcs)?;
        (rel < self.relay_arcs).then_some(rel % self.copies)
    }

    /// Original vertex behind a layered copy; `None` for relays.
    pub fn original_vertex(&self, v: VertexId) -> Option<VertexId> {
        (v.0 < self.copies * self.base_vertices)
            .then(|| self.base_vertex_ids[(v.0 % self.base_vertices) as usize])
    }

    /// Original sink behind a collector vertex.
    pub fn original_sink(&self, v: VertexId) -> Option<VertexId> {
        let rel = v.0.checked_sub(self.copies * self.base_vertices)?;
        self.sinks.get(rel as usize).copied()
    }

    /// Original source behind a dispatcher vertex.
    pub fn original_source(&self, v: VertexId) -> Option<VertexId> {
        let base = self.copies * self.base_vertices + self.sinks.len() as u32;
        let rel = v.0.checked_sub(base)?;
        self.sources.get(rel as usize).copied()
    }
}

/// Splits `inst` into `copies` parallel layers, each with a `1/copies`
/// share of every capacity and of `x`, wired to collector and dispatcher
/// relays. Fails if `x` overloads an arc or the result would not fit the
/// id space.
pub fn build_copied_network(
    inst: &Instance,
    x: &Flow,
    copies: u32,
) -> Result<CopiedNetwork, RoundsError> {
    debug_assert!(copies >= 2);
    for arc in inst.arcs() {
        if x.value(inst, arc.id) > &arc.capacity {
            return Err(RoundsError::FlowOverCapacity(arc.id));
        }
    }

    let sources = inst.sources();
    let sinks = inst.sinks();
    let v = inst.vertex_count() as u64;
    let a = inst.arc_count() as u64;
    let q = u64::from(copies);
    let relays = (sources.len() + sinks.len()) as u64;
    if q * v + relays > u64::from(u32::MAX) || q * a + relays * q > u64::from(u32::MAX) {
        return Err(RoundsError::NetworkTooLarge);
    }
    let v = v as u32;
    let a = a as u32;

    let share = |r: &Rational| r / rat(i64::from(copies));
    let vindex: BTreeMap<VertexId, u32> = inst
        .vertex_ids()
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i as u32))
        .collect();

    let mut vertices = Vec::new();
    let mut arcs = Vec::new();
    for alpha in 0..copies {
        for i in 0..v {
            vertices.push((VertexId(alpha * v + i), Rational::zero()));
        }
        for (k, arc) in inst.arcs().iter().enumerate() {
            arcs.push((
                ArcId(alpha * a + k as u32),
                VertexId(alpha * v + vindex[&arc.tail]),
                VertexId(alpha * v + vindex[&arc.head]),
                share(&arc.capacity),
            ));
        }
    }
    for (j, &t) in sinks.iter().enumerate() {
        let collector = VertexId(copies * v + j as u32);
        vertices.push((collector, inst.balance(t).clone()));
        for alpha in 0..copies {
            arcs.push((
                ArcId(copies * a + j as u32 * copies + alpha),
                VertexId(alpha * v + vindex[&t]),
                collector,
                share(&inst.demand(t)),
            ));
        }
    }
    let dispatch_base = copies * a + sinks.len() as u32 * copies;
    for (i, &s) in sources.iter().enumerate() {
        let dispatcher = VertexId(copies * v + sinks.len() as u32 + i as u32);
        vertices.push((dispatcher, inst.balance(s).clone()));
        for alpha in 0..copies {
            arcs.push((
                ArcId(dispatch_base + i as u32 * copies + alpha),
                dispatcher,
                VertexId(alpha * v + vindex[&s]),
                share(inst.balance(s)),
            ));
        }
    }

    let instance =
        Instance::new(vertices, arcs).expect("layered ids are distinct by construction");
    let mut flow = Flow::zero(&instance);
    for alpha in 0..copies {
        for (k, value) in x.values().iter().enumerate() {
            flow.set(&instance, ArcId(alpha * a + k as u32), share(value));
        }
    }
    for arc in instance.arcs() {
        if arc.id.0 >= copies * a {
            let cap = arc.capacity.clone();
            flow.set(&instance, arc.id, cap);
        }
    }

    Ok(CopiedNetwork {
        instance,
        flow,
        copies,
        base_vertices: v,
        base_arcs: a,
        relay_arcs: relays as u32 * copies,
        base_vertex_ids: inst.vertex_ids().to_vec(),
        base_arc_ids: inst.arcs().iter().map(|arc| arc.id).collect(),
        sinks,
        sources,
    })
}

/// One delivered portion of an original sink's demand, mapped back from the
/// layered run: the original terminals, the original arcs of its journey,
/// the layer it crossed, and whether it was served while a singular region
/// was consumed.
struct Piece {
    source: VertexId,
    sink: VertexId,
    value: Rational,
    arcs: Vec<ArcId>,
    layer: u32,
    via_singular: bool,
}

fn run_pieces(net: &CopiedNetwork, run: &SolveRun) -> Vec<Piece> {
    let mut peeled: BTreeSet<SubSinkId> = BTreeSet::new();
    for ev in &run.events {
        if let SolveEvent::SinkMove {
            sink,
            rule: MoveRule::Peel,
            ..
        } = ev
        {
            peeled.insert(*sink);
        }
    }
    let mut out = Vec::new();
    for ev in &run.events {
        let SolveEvent::Delivered {
            sink,
            source,
            value,
            path,
        } = ev
        else {
            continue;
        };
        // The first arc is the solver's own dummy; the rest crosses the
        // layered instance as dispatcher arc, layer arcs, collector arc.
        let body = &path[1..];
        let last = *body.last().expect("a delivery crosses at least one arc");
        let layer = net
            .layer_of_relay(last)
            .expect("deliveries arrive through a collector arc");
        debug_assert_eq!(net.layer_of_relay(body[0]), Some(layer));
        let arcs = body[1..body.len() - 1]
            .iter()
            .map(|&id| {
                let original = net.original_arc(id);
                debug_assert_eq!(net.layer_of_arc(id), Some(layer));
                original.expect("the middle of a journey stays in one layer")
            })
            .collect();
        out.push(Piece {
            source: net
                .original_source(*source)
                .expect("deliveries end at a dispatcher"),
            sink: net
                .original_sink(sink.0)
                .expect("sub-sinks descend from collectors"),
            value: value.clone(),
            arcs,
            layer,
            via_singular: peeled.contains(sink),
        });
    }
    out
}

/// Where one original sink's demand landed after routing the layered
/// network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkClassification {
    pub sink: VertexId,
    /// Demand share delivered through each layer; the shares sum to one.
    pub shares: Vec<Rational>,
    /// True when the demand landed in two or more layers.
    pub split_across_layers: bool,
    /// The layer anchoring the sink's round: the layer of its heaviest
    /// direct delivery, or of its heaviest piece when everything traveled
    /// through singular regions.
    pub anchor_layer: u32,
    /// Demand total that was served while singular regions were consumed.
    pub singular_demand: Rational,
    pub demand: Rational,
}

/// Summarizes each original sink's landing pattern after a layered run, in
/// ascending sink order. Sinks with zero demand do not appear.
pub fn classify_sinks(net: &CopiedNetwork, run: &SolveRun) -> Vec<SinkClassification> {
    classify_pieces(net, &run_pieces(net, run))
}

fn classify_pieces(net: &CopiedNetwork, pieces: &[Piece]) -> Vec<SinkClassification> {
    let mut per_sink: BTreeMap<VertexId, Vec<&Piece>> = BTreeMap::new();
    for p in pieces {
        per_sink.entry(p.sink).or_default().push(p);
    }
    per_sink
        .into_iter()
        .map(|(sink, ps)| {
            let mut demand = Rational::zero();
            let mut singular = Rational::zero();
            let mut shares = vec![Rational::zero(); net.copies as usize];
            for p in &ps {
                demand += &p.value;
                shares[p.layer as usize] += &p.value;
                if p.via_singular {
                    singular += &p.value;
                }
            }
            let landed = shares.iter().filter(|s| !s.is_zero()).count();
            let anchor = heaviest_layer(&ps, true)
                .or_else(|| heaviest_layer(&ps, false))
                .expect("classified sinks received at least one piece");
            for s in &mut shares {
                *s /= &demand;
            }
            SinkClassification {
                sink,
                shares,
                split_across_layers: landed > 1,
                anchor_layer: anchor,
                singular_demand: singular,
                demand,
            }
        })
        .collect()
}

fn heaviest_layer(ps: &[&Piece], direct_only: bool) -> Option<u32> {
    let mut best: Option<(Rational, u32)> = None;
    for p in ps {
        if direct_only && p.via_singular {
            continue;
        }
        let better = match &best {
            None => true,
            Some((v, l)) => p.value > *v || (p.value == *v && p.layer < *l),
        };
        if better {
            best = Some((p.value.clone(), p.layer));
        }
    }
    best.map(|(_, layer)| layer)
}

/// One wave of a plan: a subset of the sinks, served completely by paths
/// that respect the original capacities on their own.
#[derive(Debug, Clone)]
pub struct Round {
    /// Original sinks served in this round, ascending.
    pub sinks: Vec<VertexId>,
    pub solution: UnsplittableSolution,
}

/// A partition of the sinks into rounds, with the supply each source spends
/// over the whole plan.
#[derive(Debug, Clone)]
pub struct RoundPlan {
    pub rounds: Vec<Round>,
    /// Source vertex to total value shipped across all rounds.
    pub ledger: BTreeMap<VertexId, Rational>,
}

fn assemble(bundles: Vec<Vec<Piece>>) -> RoundPlan {
    let mut rounds = Vec::new();
    let mut ledger: BTreeMap<VertexId, Rational> = BTreeMap::new();
    for bundle in bundles {
        if bundle.is_empty() {
            continue;
        }
        let mut sinks: Vec<VertexId> = bundle.iter().map(|p| p.sink).collect();
        sinks.sort_unstable();
        sinks.dedup();
        let mut paths: Vec<PathFlow> = bundle
            .into_iter()
            .map(|p| {
                *ledger.entry(p.source).or_insert_with(Rational::zero) += &p.value;
                PathFlow {
                    source: p.source,
                    sink: p.sink,
                    value: p.value,
                    arcs: p.arcs,
                }
            })
            .collect();
        paths.sort_by_key(|p| (p.sink, p.source));
        rounds.push(Round {
            sinks,
            solution: UnsplittableSolution { paths },
        });
    }
    RoundPlan { rounds, ledger }
}

fn singular_regions_disjoint(run: &SolveRun) -> bool {
    let mut seen = BTreeSet::new();
    for ev in &run.events {
        if let SolveEvent::SdRouted { arcs, .. } = ev {
            for &a in arcs {
                if !seen.insert(a) {
                    return false;
                }
            }
        }
    }
    true
}

/// Grid modulus for the general scheme: shares are cut into intervals of
/// width `1 / ((n² − 1)(n + 1))`.
fn grid_modulus(n: u32) -> u128 {
    let n = u128::from(n);
    (n * n - 1) * (n + 1)
}

fn grid_cell(share: &Rational, modulus: u128) -> u128 {
    let scaled = share * Rational::from_integer(modulus.into());
    let cell = scaled
        .floor()
        .to_integer()
        .to_u128()
        .expect("shares lie between zero and one");
    // A share of exactly one folds into the top interval.
    cell.min(modulus - 1)
}

/// Number of distinct share-vector groups a single anchor layer can spawn
/// in the general scheme: nonnegative integer vectors with `n + 1`
/// coordinates whose sum is within `n + 1` of the grid modulus.
pub fn grid_groups_per_label(n: u32) -> u128 {
    debug_assert!(n >= 2);
    let coords = u128::from(n) + 1;
    let modulus = grid_modulus(n);
    (0..=coords)
        .map(|gap| tuples_with_sum(modulus - gap, coords))
        .sum()
}

/// Nonnegative integer `coords`-tuples summing to exactly `total`.
fn tuples_with_sum(total: u128, coords: u128) -> u128 {
    binomial(total + coords - 1, coords - 1)
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 1..=k {
        out = out * (n - k + i) / i;
    }
    out
}

/// Routes every demand in at most `(n + 1) · (N + 1)` rounds, where `n` is
/// [`choose_n`] of the demand-capacity gap and `N` is
/// [`grid_groups_per_label`]`(n)`. Needs the largest demand strictly below
/// the smallest capacity.
pub fn route_general_rounds(inst: &Instance, x: &Flow) -> Result<RoundPlan, RoundsError> {
    let d_max = inst.max_demand();
    let c_min = inst.min_capacity().unwrap_or_else(Rational::zero);
    let n = choose_n(&d_max, &c_min)?;
    let copies = n.checked_add(1).ok_or(RoundsError::NetworkTooLarge)?;
    let net = build_copied_network(inst, x, copies)?;
    let run = solve_upper(&net.instance, &net.flow).map_err(RoundsError::Solve)?;
    debug_assert!(
        singular_regions_disjoint(&run),
        "an arc was consumed by two singular regions"
    );
    let pieces = run_pieces(&net, &run);
    let classes = classify_pieces(&net, &pieces);

    let modulus = grid_modulus(n);
    let mut slot_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut grid_slots: BTreeMap<(u32, Vec<u128>), usize> = BTreeMap::new();
    let mut bundles: Vec<Vec<Piece>> = (0..copies).map(|_| Vec::new()).collect();
    for class in &classes {
        if !class.split_across_layers {
            slot_of.insert(class.sink, class.anchor_layer as usize);
            continue;
        }
        let cells: Vec<u128> = class
            .shares
            .iter()
            .map(|s| grid_cell(s, modulus))
            .collect();
        debug_assert!({
            let total: u128 = cells.iter().sum();
            modulus - u128::from(copies) <= total && total <= modulus
        });
        let next = bundles.len();
        let slot = *grid_slots
            .entry((class.anchor_layer, cells))
            .or_insert(next);
        if slot == next {
            bundles.push(Vec::new());
        }
        slot_of.insert(class.sink, slot);
    }
    for p in pieces {
        let slot = slot_of[&p.sink];
        bundles[slot].push(p);
    }
    Ok(assemble(bundles))
}

/// How sinks that landed in both layers of a two-layer run are grouped.
enum SplitGrouping {
    /// By anchor layer and by whether at least half the demand traveled
    /// through singular regions: up to four groups.
    AnchorAndShare,
    /// By anchor layer alone: up to two groups.
    AnchorOnly,
}

fn two_layer_plan(
    inst: &Instance,
    x: &Flow,
    divisor: i64,
    grouping: SplitGrouping,
) -> Result<RoundPlan, RoundsError> {
    let d_max = inst.max_demand();
    if !d_max.is_zero() {
        let limit = inst.min_capacity().unwrap_or_else(Rational::zero) / rat(divisor);
        if d_max > limit {
            return Err(RoundsError::DemandTooLarge { d_max, limit });
        }
    }
    let net = build_copied_network(inst, x, 2)?;
    let run = solve_upper(&net.instance, &net.flow).map_err(RoundsError::Solve)?;
    debug_assert!(
        singular_regions_disjoint(&run),
        "an arc was consumed by two singular regions"
    );
    let pieces = run_pieces(&net, &run);
    let classes = classify_pieces(&net, &pieces);

    let slots = match grouping {
        SplitGrouping::AnchorAndShare => 6,
        SplitGrouping::AnchorOnly => 4,
    };
    let mut bundles: Vec<Vec<Piece>> = (0..slots).map(|_| Vec::new()).collect();
    let mut slot_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    for class in &classes {
        let slot = if !class.split_across_layers {
            class.anchor_layer as usize
        } else {
            match grouping {
                SplitGrouping::AnchorOnly => 2 + class.anchor_layer as usize,
                SplitGrouping::AnchorAndShare => {
                    let light = rat(2) * &class.singular_demand < class.demand;
                    2 + 2 * class.anchor_layer as usize + usize::from(light)
                }
            }
        };
        slot_of.insert(class.sink, slot);
    }
    for p in pieces {
        let slot = slot_of[&p.sink];
        bundles[slot].push(p);
    }
    Ok(assemble(bundles))
}

/// Routes every demand in at most six rounds. Needs the largest demand to
/// be at most a third of the smallest capacity.
pub fn route_six_rounds(inst: &Instance, x: &Flow) -> Result<RoundPlan, RoundsError> {
    let plan = two_layer_plan(inst, x, 3, SplitGrouping::AnchorAndShare)?;
    debug_assert!(plan.rounds.len() <= 6);
    Ok(plan)
}

/// Routes every demand in at most four rounds. Needs the largest demand to
/// be at most a quarter of the smallest capacity.
pub fn route_four_rounds(inst: &Instance, x: &Flow) -> Result<RoundPlan, RoundsError> {
    let plan = two_layer_plan(inst, x, 4, SplitGrouping::AnchorOnly)?;
    debug_assert!(plan.rounds.len() <= 4);
    Ok(plan)
}

/// One defect found in a round plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanViolation {
    /// An instance sink appears in no round.
    SinkUnrouted(VertexId),
    /// A sink appears in two rounds.
    SinkRepeated {
        sink: VertexId,
        first: usize,
        second: usize,
    },
    /// A round lists a vertex that is not a sink of the instance.
    ForeignSink { round: usize, vertex: VertexId },
    /// A path starts outside the sources or ends outside the round's sinks.
    PathAstray {
        round: usize,
        source: VertexId,
        sink: VertexId,
    },
    /// Two paths in one round share a source-sink pair.
    DuplicatePair {
        round: usize,
        source: VertexId,
        sink: VertexId,
    },
    /// A path is not a simple forward trail with positive value.
    BrokenPath {
        round: usize,
        source: VertexId,
        sink: VertexId,
    },
    /// A round delivers the wrong total to one of its sinks.
    DemandMismatch {
        round: usize,
        sink: VertexId,
        delivered: Rational,
        demand: Rational,
    },
    /// A round loads an arc beyond its capacity.
    OverCapacity {
        round: usize,
        arc: ArcId,
        load: Rational,
        capacity: Rational,
    },
    /// A source's shipments across the plan miss its supply.
    SupplyMismatch {
        source: VertexId,
        used: Rational,
        supply: Rational,
    },
    /// The plan's ledger disagrees with what its rounds spend.
    LedgerSkew {
        vertex: VertexId,
        recorded: Rational,
        used: Rational,
    },
}

impl fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanViolation::SinkUnrouted(t) => write!(f, "sink {t} is served by no round"),
            PlanViolation::SinkRepeated { sink, first, second } => {
                write!(f, "sink {sink} is claimed by rounds {first} and {second}")
            }
            PlanViolation::ForeignSink { round, vertex } => {
                write!(f, "round {round} claims {vertex}, which is not a sink")
            }
            PlanViolation::PathAstray { round, source, sink } => write!(
                f,
                "round {round} routes {source} to {sink}, outside its terminals"
            ),
            PlanViolation::DuplicatePair { round, source, sink } => {
                write!(f, "round {round} routes {source} to {sink} twice")
            }
            PlanViolation::BrokenPath { round, source, sink } => write!(
                f,
                "round {round} has a malformed path from {source} to {sink}"
            ),
            PlanViolation::DemandMismatch {
                round,
                sink,
                delivered,
                demand,
            } => write!(
                f,
                "round {round} delivers {delivered} to sink {sink}, whose demand is {demand}"
            ),
            PlanViolation::OverCapacity {
                round,
                arc,
                load,
                capacity,
            } => write!(
                f,
                "round {round} puts {load} on arc {arc} of capacity {capacity}"
            ),
            PlanViolation::SupplyMismatch { source, used, supply } => write!(
                f,
                "plan ships {used} from source {source}, whose supply is {supply}"
            ),
            PlanViolation::LedgerSkew {
                vertex,
                recorded,
                used,
            } => write!(
                f,
                "ledger records {recorded} for {vertex}, but the rounds spend {used}"
            ),
        }
    }
}

fn path_is_simple_trail(inst: &Instance, path: &PathFlow) -> bool {
    if !path.value.is_positive() || path.arcs.is_empty() {
        return false;
    }
    let mut visited: BTreeSet<VertexId> = BTreeSet::new();
    let mut at = path.source;
    visited.insert(at);
    for &a in &path.arcs {
        if inst.arc_index(a).is_none() {
            return false;
        }
        let arc = inst.arc(a);
        if arc.tail != at || !visited.insert(arc.head) {
            return false;
        }
        at = arc.head;
    }
    at == path.sink
}

/// Checks a plan against the instance: the rounds must partition the sinks,
/// serve each claimed sink's full demand over simple paths without reusing
/// a source-sink pair, fit every arc capacity round by round, and spend
/// each source's exact supply over the whole plan (matching the ledger).
/// Returns every defect found; an empty list means the plan is sound.
pub fn verify_round_plan(inst: &Instance, plan: &RoundPlan) -> Vec<PlanViolation> {
    let mut out = Vec::new();
    let sinks: BTreeSet<VertexId> = inst.sinks().into_iter().collect();
    let sources: BTreeSet<VertexId> = inst.sources().into_iter().collect();

    let mut claimed: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, round) in plan.rounds.iter().enumerate() {
        for &t in &round.sinks {
            if !sinks.contains(&t) {
                out.push(PlanViolation::ForeignSink { round: i, vertex: t });
                continue;
            }
            match claimed.entry(t) {
                Entry::Vacant(e) => {
                    e.insert(i);
                }
                Entry::Occupied(e) => out.push(PlanViolation::SinkRepeated {
                    sink: t,
                    first: *e.get(),
                    second: i,
                }),
            }
        }
    }
    for &t in &sinks {
        if !claimed.contains_key(&t) {
            out.push(PlanViolation::SinkUnrouted(t));
        }
    }

    let mut used: BTreeMap<VertexId, Rational> = BTreeMap::new();
    for (i, round) in plan.rounds.iter().enumerate() {
        let members: BTreeSet<VertexId> = round.sinks.iter().copied().collect();
        let mut pairs: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
        let mut delivered: BTreeMap<VertexId, Rational> = BTreeMap::new();
        let mut load: BTreeMap<ArcId, Rational> = BTreeMap::new();
        for path in &round.solution.paths {
            if !sources.contains(&path.source) || !members.contains(&path.sink) {
                out.push(PlanViolation::PathAstray {
                    round: i,
                    source: path.source,
                    sink: path.sink,
                });
                continue;
            }
            if !pairs.insert((path.source, path.sink)) {
                out.push(PlanViolation::DuplicatePair {
                    round: i,
                    source: path.source,
                    sink: path.sink,
                });
            }
            if !path_is_simple_trail(inst, path) {
                out.push(PlanViolation::BrokenPath {
                    round: i,
                    source: path.source,
                    sink: path.sink,
                });
                continue;
            }
            *delivered.entry(path.sink).or_insert_with(Rational::zero) += &path.value;
            *used.entry(path.source).or_insert_with(Rational::zero) += &path.value;
            for &a in &path.arcs {
                *load.entry(a).or_insert_with(Rational::zero) += &path.value;
            }
        }
        for &t in &members {
            if !sinks.contains(&t) {
                continue;
            }
            let got = delivered.remove(&t).unwrap_or_else(Rational::zero);
            let want = inst.demand(t);
            if got != want {
                out.push(PlanViolation::DemandMismatch {
                    round: i,
                    sink: t,
                    delivered: got,
                    demand: want,
                });
            }
        }
        for (a, l) in load {
            let cap = &inst.arc(a).capacity;
            if l > *cap {
                out.push(PlanViolation::OverCapacity {
                    round: i,
                    arc: a,
                    load: l,
                    capacity: cap.clone(),
                });
            }
        }
    }

    for &s in &sources {
        let u = used.get(&s).cloned().unwrap_or_else(Rational::zero);
        let supply = inst.balance(s).clone();
        if u != supply {
            out.push(PlanViolation::SupplyMismatch {
                source: s,
                used: u,
                supply,
            });
        }
    }
    let ledgered: BTreeSet<VertexId> = used.keys().chain(plan.ledger.keys()).copied().collect();
    for v in ledgered {
        let recorded = plan.ledger.get(&v).cloned().unwrap_or_else(Rational::zero);
        let actual = used.get(&v).cloned().unwrap_or_else(Rational::zero);
        if recorded != actual {
            out.push(PlanViolation::LedgerSkew {
                vertex: v,
                recorded,
                used: actual,
            });
        }
    }
    out
}

/// Index and shipped value of the round moving the most demand; ties go to
/// the earliest round. `None` on an empty plan.
pub fn best_round(plan: &RoundPlan) -> Option<(usize, Rational)> {
    let mut best: Option<(usize, Rational)> = None;
    for (i, round) in plan.rounds.iter().enumerate() {
        let total = round.solution.total_value();
        if best.as_ref().is_none_or(|(_, b)| total > *b) {
            best = Some((i, total));
        }
    }
    best
}
