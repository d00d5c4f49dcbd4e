//! Exhaustive feasibility and violation oracles for desk-scale
//! instances. Every answer is computed exactly: path menus are
//! enumerated in full, shipped amounts are settled by rational
//! elimination, and an instance that is too large makes the oracle
//! refuse rather than approximate.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::flow::{PathFlow, UnsplittableSolution};
use crate::graph::{ArcId, Instance, VertexId};
use crate::lp::{integral_feasible, solve_lp, LpOutcome, NodeBudget, Row};
use crate::rational::Rational;
use num_traits::{One, Signed, Zero};

/// Most simple paths enumerated for any one source-sink pair.
pub const MAX_PATHS_PER_PAIR: usize = 128;

/// Most path-choice structures examined in one oracle call.
pub const MAX_STRUCTURES: u64 = 1 << 20;

/// Most variables allowed in one exact system.
pub const MAX_LP_VARS: usize = 48;

/// Exploration allowance for the integer search, shared across a call.
pub const MAX_SEARCH_NODES: u64 = 5_000_000;

/// Why an oracle declined to answer. The instance was too large for an
/// exact sweep; nothing about its feasibility is implied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScaleGuard {
    Paths { source: VertexId, sink: VertexId, cap: usize },
    Structures { cap: u64 },
    Variables { count: usize, cap: usize },
    SearchNodes { cap: u64 },
}

impl fmt::Display for ScaleGuard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleGuard::Paths { source, sink, cap } => write!(
                f,
                "more than {cap} simple paths from vertex {source} to vertex {sink}"
            ),
            ScaleGuard::Structures { cap } => {
                write!(f, "more than {cap} path combinations to examine")
            }
            ScaleGuard::Variables { count, cap } => {
                write!(f, "{count} unknowns in one system, limit is {cap}")
            }
            ScaleGuard::SearchNodes { cap } => {
                write!(f, "integer search exceeded its allowance of {cap} nodes")
            }
        }
    }
}

/// Outcome of [`brute_force_feasible`]. A feasible verdict carries a
/// concrete solution; an infeasible one means the full sweep found
/// nothing.
#[derive(Debug, Clone)]
pub struct Feasibility {
    pub feasible: bool,
    pub witness: Option<UnsplittableSolution>,
}

/// All simple paths a pair may use, discovered in depth-first order
/// with arcs tried ascending by id.
struct PairMenu {
    source: VertexId,
    sink: VertexId,
    paths: Vec<Vec<ArcId>>,
}

/// One fixed path per pair, borrowed from a menu or a walk.
struct Route<'a> {
    source: VertexId,
    sink: VertexId,
    arcs: &'a [ArcId],
}

/// Decides whether the instance admits an unsplittable transshipment
/// within its capacities, by exhaustive search: every source-sink pair
/// gets a menu of simple paths, and each way of fixing one path per
/// pair is settled exactly over the shipped amounts. A pair may ship
/// zero, so the sweep covers every subset of pairs at once. With
/// `integral_only` the amounts are restricted to whole numbers.
pub fn brute_force_feasible(
    inst: &Instance,
    integral_only: bool,
) -> Result<Feasibility, ScaleGuard> {
    let menus = pair_menus(inst)?;
    if some_terminal_is_cut_off(inst, &menus) {
        return Ok(Feasibility { feasible: false, witness: None });
    }
    let radix: Vec<usize> = menus.iter().map(|m| m.paths.len()).collect();
    guard_structures(&radix)?;
    if menus.len() > MAX_LP_VARS {
        return Err(ScaleGuard::Variables { count: menus.len(), cap: MAX_LP_VARS });
    }

    let mut budget = NodeBudget { remaining: MAX_SEARCH_NODES };
    let mut choice = vec![0usize; menus.len()];
    loop {
        let routes: Vec<Route> = menus
            .iter()
            .zip(&choice)
            .map(|(m, &c)| Route { source: m.source, sink: m.sink, arcs: &m.paths[c] })
            .collect();
        if let Some(values) = routed_point(inst, &routes, integral_only, &mut budget)? {
            let paths = routes
                .iter()
                .zip(values)
                .filter(|(_, value)| value.is_positive())
                .map(|(r, value)| PathFlow {
                    source: r.source,
                    sink: r.sink,
                    value,
                    arcs: r.arcs.to_vec(),
                })
                .collect();
            return Ok(Feasibility {
                feasible: true,
                witness: Some(UnsplittableSolution { paths }),
            });
        }
        if !advance(&mut choice, &radix) {
            break;
        }
    }
    Ok(Feasibility { feasible: false, witness: None })
}

/// Minimum, over every unsplittable transshipment of the instance, of
/// the worst per-arc overshoot above `reference` (one value per arc, in
/// arc order). Capacities play no role here; the measure is purely how
/// far above the reference some arc must rise. `None` when the instance
/// admits no unsplittable transshipment at all.
pub fn min_violation(
    inst: &Instance,
    reference: &[Rational],
) -> Result<Option<Rational>, ScaleGuard> {
    debug_assert_eq!(reference.len(), inst.arc_count());
    let menus = pair_menus(inst)?;
    if some_terminal_is_cut_off(inst, &menus) {
        return Ok(None);
    }
    if inst.arc_count() == 0 {
        // Only possible with all balances zero: the empty solution
        // loads nothing and there is no arc to overshoot.
        return Ok(Some(Rational::zero()));
    }
    let radix: Vec<usize> = menus.iter().map(|m| m.paths.len()).collect();
    guard_structures(&radix)?;
    let vars = menus.len() + 2;
    if vars > MAX_LP_VARS {
        return Err(ScaleGuard::Variables { count: vars, cap: MAX_LP_VARS });
    }

    let mut best: Option<Rational> = None;
    let mut choice = vec![0usize; menus.len()];
    loop {
        let routes: Vec<Route> = menus
            .iter()
            .zip(&choice)
            .map(|(m, &c)| Route { source: m.source, sink: m.sink, arcs: &m.paths[c] })
            .collect();
        if let Some(value) = violation_lp(inst, &routes, reference) {
            if best.as_ref().is_none_or(|b| value < *b) {
                best = Some(value);
            }
        }
        if !advance(&mut choice, &radix) {
            break;
        }
    }
    Ok(best)
}

/// Like [`min_violation`], but restricted to solutions that are
/// confluent at every sink: per sink, the union of its paths must form
/// an in-tree. The sweep enumerates, for each sink, every way the
/// vertices can commit to a single outgoing arc toward it, then walks
/// each source along those commitments; a walk that loops simply drops
/// its pair. Every confluent solution arises from some commitment, so
/// the minimum is exact.
pub fn min_violation_confluent(
    inst: &Instance,
    reference: &[Rational],
) -> Result<Option<Rational>, ScaleGuard> {
    debug_assert_eq!(reference.len(), inst.arc_count());
    let sources = inst.sources();
    let sinks = inst.sinks();
    let fed = forward_closure(inst, &sources);
    let reaches: Vec<BTreeSet<VertexId>> =
        sinks.iter().map(|&t| backward_closure(inst, t)).collect();

    let sources_served = sources.iter().all(|&s| reaches.iter().any(|r| r.contains(&s)));
    let sinks_served = reaches.iter().all(|r| sources.iter().any(|s| r.contains(s)));
    if !sources_served || !sinks_served {
        return Ok(None);
    }
    if inst.arc_count() == 0 {
        return Ok(Some(Rational::zero()));
    }

    // One choice point per (sink, vertex) where the vertex lies on some
    // source-to-sink corridor; its options are the out-arcs that still
    // reach the sink.
    struct ChoicePoint {
        sink_pos: usize,
        vertex: VertexId,
        options: Vec<ArcId>,
    }
    let mut points: Vec<ChoicePoint> = Vec::new();
    for (pos, (&t, reach)) in sinks.iter().zip(&reaches).enumerate() {
        for &u in inst.vertex_ids() {
            if u == t || !reach.contains(&u) || !fed.contains(&u) {
                continue;
            }
            let options: Vec<ArcId> = inst
                .out_arcs(u)
                .filter(|arc| reach.contains(&arc.head))
                .map(|arc| arc.id)
                .collect();
            debug_assert!(!options.is_empty());
            points.push(ChoicePoint { sink_pos: pos, vertex: u, options });
        }
    }

    let radix: Vec<usize> = points.iter().map(|p| p.options.len()).collect();
    guard_structures(&radix)?;

    let mut best: Option<Rational> = None;
    let mut choice = vec![0usize; points.len()];
    loop {
        let mut commitments: Vec<BTreeMap<VertexId, ArcId>> =
            sinks.iter().map(|_| BTreeMap::new()).collect();
        for (p, &pick) in points.iter().zip(&choice) {
            commitments[p.sink_pos].insert(p.vertex, p.options[pick]);
        }

        let mut walked: Vec<(VertexId, VertexId, Vec<ArcId>)> = Vec::new();
        for &s in &sources {
            for (pos, &t) in sinks.iter().enumerate() {
                if let Some(arcs) = walk(inst, s, t, &commitments[pos]) {
                    walked.push((s, t, arcs));
                }
            }
        }
        let covered = sources.iter().all(|&s| walked.iter().any(|w| w.0 == s))
            && sinks.iter().all(|&t| walked.iter().any(|w| w.1 == t));
        if covered {
            let vars = walked.len() + 2;
            if vars > MAX_LP_VARS {
                return Err(ScaleGuard::Variables { count: vars, cap: MAX_LP_VARS });
            }
            let routes: Vec<Route> = walked
                .iter()
                .map(|(s, t, arcs)| Route { source: *s, sink: *t, arcs })
                .collect();
            if let Some(value) = violation_lp(inst, &routes, reference) {
                if best.as_ref().is_none_or(|b| value < *b) {
                    best = Some(value);
                }
            }
        }
        if !advance(&mut choice, &radix) {
            break;
        }
    }
    Ok(best)
}

/// Follows the per-vertex commitments from `s` until `t`. `None` when
/// the walk leaves committed ground or revisits a vertex.
fn walk(
    inst: &Instance,
    s: VertexId,
    t: VertexId,
    commitments: &BTreeMap<VertexId, ArcId>,
) -> Option<Vec<ArcId>> {
    let mut arcs = Vec::new();
    let mut seen = BTreeSet::new();
    let mut at = s;
    seen.insert(at);
    while at != t {
        let &next = commitments.get(&at)?;
        let head = inst.arc(next).head;
        if !seen.insert(head) {
            return None;
        }
        arcs.push(next);
        at = head;
    }
    Some(arcs)
}

fn pair_menus(inst: &Instance) -> Result<Vec<PairMenu>, ScaleGuard> {
    let mut menus = Vec::new();
    for &s in &inst.sources() {
        for &t in &inst.sinks() {
            let paths = simple_paths(inst, s, t)?;
            if !paths.is_empty() {
                menus.push(PairMenu { source: s, sink: t, paths });
            }
        }
    }
    Ok(menus)
}

/// A terminal with nonzero balance but no usable path can never be
/// served, whichever structure is chosen.
fn some_terminal_is_cut_off(inst: &Instance, menus: &[PairMenu]) -> bool {
    inst.sources().iter().any(|&s| !menus.iter().any(|m| m.source == s))
        || inst.sinks().iter().any(|&t| !menus.iter().any(|m| m.sink == t))
}

fn simple_paths(
    inst: &Instance,
    from: VertexId,
    to: VertexId,
) -> Result<Vec<Vec<ArcId>>, ScaleGuard> {
    let mut trail = Vec::new();
    let mut seen = BTreeSet::new();
    seen.insert(from);
    let mut found = Vec::new();
    grow(inst, from, from, to, &mut trail, &mut seen, &mut found)?;
    Ok(found)
}

fn grow(
    inst: &Instance,
    at: VertexId,
    from: VertexId,
    to: VertexId,
    trail: &mut Vec<ArcId>,
    seen: &mut BTreeSet<VertexId>,
    found: &mut Vec<Vec<ArcId>>,
) -> Result<(), ScaleGuard> {
    if at == to {
        if found.len() >= MAX_PATHS_PER_PAIR {
            return Err(ScaleGuard::Paths {
                source: from,
                sink: to,
                cap: MAX_PATHS_PER_PAIR,
            });
        }
        found.push(trail.clone());
        return Ok(());
    }
    for arc in inst.out_arcs(at) {
        if seen.contains(&arc.head) {
            continue;
        }
        seen.insert(arc.head);
        trail.push(arc.id);
        grow(inst, arc.head, from, to, trail, seen, found)?;
        trail.pop();
        seen.remove(&arc.head);
    }
    Ok(())
}

/// Caps the product of the per-pair menu sizes before any sweep runs.
fn guard_structures(radix: &[usize]) -> Result<(), ScaleGuard> {
    let mut total: u128 = 1;
    for &r in radix {
        total = total.saturating_mul(r as u128);
        if total > u128::from(MAX_STRUCTURES) {
            return Err(ScaleGuard::Structures { cap: MAX_STRUCTURES });
        }
    }
    Ok(())
}

/// Steps the odometer to the next structure; `false` once exhausted.
fn advance(choice: &mut [usize], radix: &[usize]) -> bool {
    for i in (0..choice.len()).rev() {
        choice[i] += 1;
        if choice[i] < radix[i] {
            return true;
        }
        choice[i] = 0;
    }
    false
}

/// Exact supply and demand rows: per source, its routes ship the whole
/// balance; per sink, arriving routes cover the whole demand.
fn balance_rows(inst: &Instance, routes: &[Route<'_>], vars: usize) -> Vec<Row> {
    let mut rows = Vec::new();
    for &s in &inst.sources() {
        let mut coeffs = vec![Rational::zero(); vars];
        for (i, r) in routes.iter().enumerate() {
            if r.source == s {
                coeffs[i] = Rational::one();
            }
        }
        rows.push(Row::eq(coeffs, inst.balance(s).clone()));
    }
    for &t in &inst.sinks() {
        let mut coeffs = vec![Rational::zero(); vars];
        for (i, r) in routes.iter().enumerate() {
            if r.sink == t {
                coeffs[i] = Rational::one();
            }
        }
        rows.push(Row::eq(coeffs, inst.demand(t)));
    }
    rows
}

/// Which routes load each arc, keyed by arc index.
fn arc_users(inst: &Instance, routes: &[Route<'_>]) -> BTreeMap<usize, Vec<usize>> {
    let mut users: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, r) in routes.iter().enumerate() {
        for &aid in r.arcs {
            users.entry(inst.aindex(aid)).or_default().push(i);
        }
    }
    users
}

/// Shipped amounts making the fixed routes a capacity-feasible
/// transshipment, if any exist for this structure.
fn routed_point(
    inst: &Instance,
    routes: &[Route<'_>],
    integral_only: bool,
    budget: &mut NodeBudget,
) -> Result<Option<Vec<Rational>>, ScaleGuard> {
    let vars = routes.len();
    let mut rows = balance_rows(inst, routes, vars);
    for (aidx, users) in arc_users(inst, routes) {
        let mut coeffs = vec![Rational::zero(); vars];
        for i in users {
            coeffs[i] = Rational::one();
        }
        rows.push(Row::le(coeffs, inst.arcs()[aidx].capacity.clone()));
    }
    if integral_only {
        integral_feasible(vars, &rows, budget)
            .map_err(|_| ScaleGuard::SearchNodes { cap: MAX_SEARCH_NODES })
    } else {
        match solve_lp(vars, &rows, &vec![Rational::zero(); vars]) {
            LpOutcome::Optimal { point, .. } => Ok(Some(point)),
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => unreachable!("a zero objective is never unbounded"),
        }
    }
}

/// Least worst-arc overshoot above `reference` attainable with the
/// fixed routes, or `None` when they cannot carry the balances. The
/// overshoot variable is split into two signed halves so the minimum
/// may come out negative.
fn violation_lp(
    inst: &Instance,
    routes: &[Route<'_>],
    reference: &[Rational],
) -> Option<Rational> {
    let vars = routes.len() + 2;
    let up = routes.len();
    let down = up + 1;
    let mut rows = balance_rows(inst, routes, vars);
    let users = arc_users(inst, routes);
    for aidx in 0..inst.arc_count() {
        let mut coeffs = vec![Rational::zero(); vars];
        if let Some(routes_here) = users.get(&aidx) {
            for &i in routes_here {
                coeffs[i] = Rational::one();
            }
        }
        coeffs[up] = -Rational::one();
        coeffs[down] = Rational::one();
        rows.push(Row::le(coeffs, reference[aidx].clone()));
    }
    let mut objective = vec![Rational::zero(); vars];
    objective[up] = Rational::one();
    objective[down] = -Rational::one();
    match solve_lp(vars, &rows, &objective) {
        LpOutcome::Optimal { value, .. } => Some(value),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => {
            unreachable!("the emptiest arc keeps the overshoot bounded below")
        }
    }
}

fn forward_closure(inst: &Instance, seeds: &[VertexId]) -> BTreeSet<VertexId> {
    let mut seen: BTreeSet<VertexId> = seeds.iter().copied().collect();
    let mut queue: Vec<VertexId> = seeds.to_vec();
    while let Some(u) = queue.pop() {
        for arc in inst.out_arcs(u) {
            if seen.insert(arc.head) {
                queue.push(arc.head);
            }
        }
    }
    seen
}

fn backward_closure(inst: &Instance, seed: VertexId) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::new();
    seen.insert(seed);
    let mut queue = vec![seed];
    while let Some(u) = queue.pop() {
        for arc in inst.in_arcs(u) {
            if seen.insert(arc.tail) {
                queue.push(arc.tail);
            }
        }
    }
    seen
}
