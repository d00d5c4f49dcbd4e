//! Consumption of singular sub-digraphs: the junction sink splits, the
//! in-tree is peeled leaf by leaf, and every drop of flow inside the region
//! turns into finished deliveries.

use alloc::collections::BTreeSet;
use alloc::vec;

use crate::solver::search::SingularDigraph;
use crate::solver::state::SolverState;
use crate::solver::{MoveRule, SolveError, SolveEvent};

impl<'a> SolverState<'a> {
    /// Eliminates a singular sub-digraph. The sink chosen at the root is
    /// split so that one part exactly matches the entering arc; the rest of
    /// the region's demand is walked out through the tree, leaf by leaf,
    /// until every arc of the region is drained. Finally the matching part
    /// consumes the entering arc itself.
    pub fn route_singular_digraph(&mut self, sd: &SingularDigraph) -> Result<(), SolveError> {
        let root = self
            .net
            .vertex_index(sd.root)
            .ok_or(SolveError::Internal("junction outside the instance"))?;
        let entering = self
            .net
            .arc_index(sd.entering)
            .ok_or(SolveError::Internal("entering arc outside the instance"))?;
        if !self.live[entering] || self.ends[entering].1 != root {
            return Err(SolveError::Internal("entering arc does not reach the junction"));
        }
        let carried = self.y[entering].clone();

        let mut arc_set = BTreeSet::new();
        let mut verts = BTreeSet::new();
        verts.insert(root);
        for &id in &sd.arcs {
            let idx = self
                .net
                .arc_index(id)
                .ok_or(SolveError::Internal("region arc outside the instance"))?;
            arc_set.insert(idx);
            verts.insert(self.ends[idx].0);
            verts.insert(self.ends[idx].1);
        }

        // Split the root sink: the kept part will consume the entering arc,
        // the routed part is served by the region.
        let target = self
            .sinks_at_sorted(root)
            .into_iter()
            .find(|&h| *self.demand_of(h) > carried)
            .ok_or(SolveError::Internal("no junction sink exceeds the entering flow"))?;
        let parent_id = self.id_of(target);
        let routed_total = self.demand_of(target) - &carried;
        let spread = self.split_subsink(target, routed_total.clone())?;
        self.set_reserved(target, true);
        self.events.push(SolveEvent::RootSplit {
            sink: parent_id,
            junction: sd.root,
            entering: sd.entering,
            kept: carried.clone(),
            routed: routed_total,
        });

        // Peel: pick the lowest leaf whose live in-arcs all come from the
        // super source, deliver the sinks sitting on it, then walk its
        // outgoing flow toward the root sink by sink.
        loop {
            let leaf = verts
                .iter()
                .copied()
                .find(|&v| {
                    v != self.super_idx
                        && v != root
                        && self.out_degree_live(v) > 0
                        && self
                            .in_live(v)
                            .iter()
                            .all(|&a| self.ends[a].0 == self.super_idx)
                });
            let leaf = match leaf {
                Some(v) => v,
                None => break,
            };
            let dummy = self
                .dummy_arc_at(leaf)
                .filter(|&a| self.live[a])
                .ok_or(SolveError::Internal("tree leaf without a live dummy arc"))?;

            for h in self.sinks_at_sorted(leaf) {
                self.move_subsink(h, dummy, MoveRule::Peel)?;
            }

            while let Some(&first) = self.out_live(leaf).first() {
                if self.out_degree_live(leaf) != 1 {
                    return Err(SolveError::Internal("tree leaf with two outgoing arcs"));
                }
                if !arc_set.contains(&first) {
                    return Err(SolveError::Internal("tree walk left the region"));
                }
                let bottleneck = self.y[first].clone();
                let mut path = vec![first];
                let mut cur = self.ends[first].1;
                let chosen = loop {
                    let sinks = self.sinks_at_sorted(cur);
                    let pick = if cur == root {
                        sinks.iter().copied().find(|&h| h != spread).or_else(|| {
                            sinks.iter().copied().find(|&h| h == spread)
                        })
                    } else {
                        sinks.first().copied()
                    };
                    if let Some(h) = pick {
                        break h;
                    }
                    let outs = self.out_live(cur);
                    let a = match outs.first() {
                        Some(&a) if outs.len() == 1 && arc_set.contains(&a) => a,
                        _ => return Err(SolveError::Internal("tree walk hit a dead end")),
                    };
                    path.push(a);
                    cur = self.ends[a].1;
                };
                let demand = self.demand_of(chosen).clone();
                let mover = if demand <= bottleneck {
                    chosen
                } else {
                    let piece = self.split_subsink(chosen, bottleneck.clone())?;
                    self.events.push(SolveEvent::PeelSplit {
                        sink: self.id_of(chosen),
                        at: self.net.vertex_ids()[cur],
                        kept: self.demand_of(chosen).clone(),
                        routed: bottleneck,
                    });
                    piece
                };
                for &a in path.iter().rev() {
                    self.move_subsink(mover, a, MoveRule::Peel)?;
                }
                self.move_subsink(mover, dummy, MoveRule::Peel)?;
            }
        }

        // A root that is itself a source absorbs its remaining sinks through
        // its own dummy arc; tree arcs cannot reach them.
        if let Some(dummy) = self.dummy_arc_at(root).filter(|&a| self.live[a] && arc_set.contains(&a)) {
            for h in self.sinks_at_sorted(root) {
                self.move_subsink(h, dummy, MoveRule::Peel)?;
            }
        }

        for &a in &arc_set {
            if self.live[a] {
                return Err(SolveError::Internal("region flow survived the peel"));
            }
        }

        // The kept part matches the entering arc exactly and consumes it.
        self.set_reserved(target, false);
        if *self.demand_of(target) != carried {
            return Err(SolveError::Internal("kept sink no longer matches the entering arc"));
        }
        self.move_subsink(target, entering, MoveRule::ExactSingular)?;

        self.events.push(SolveEvent::SdRouted {
            root: sd.root,
            entering: sd.entering,
            arcs: sd.arcs.clone(),
        });
        self.labels_fresh = false;
        Ok(())
    }
}
