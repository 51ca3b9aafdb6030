use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::SteinerTree;
use crate::instance::{Instance, Solution};
use crate::plane_graph::{copy_parent, Dart, EdgeId, PlaneGraph, VertexId};

/// Walks given as dart sequences. A walk whose last dart ends where its
/// first dart starts is closed and also turns at that vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakLinkage {
    pub walks: Vec<Vec<Dart>>,
}

impl WeakLinkage {
    pub fn new(walks: Vec<Vec<Dart>>) -> WeakLinkage {
        WeakLinkage { walks }
    }

    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.walks.iter().flatten().map(|d| d.edge())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinkageViolation {
    #[error("walk {walk} uses dart {step} of an edge outside the graph")]
    UnknownEdge { walk: usize, step: usize },
    #[error("walk {walk} breaks between steps {step} and {}", step + 1)]
    Discontiguous { walk: usize, step: usize },
    #[error("edge {edge} is used more than once")]
    ReusedEdge { edge: EdgeId },
    #[error("walks cross at vertex {vertex}")]
    Crossing { vertex: VertexId },
}

/// A walk passing through a vertex, as the two darts leaving that vertex
/// along the arriving and departing edges.
type Chord = [Dart; 2];

fn is_closed(g: &PlaneGraph, walk: &[Dart]) -> bool {
    walk.len() >= 2 && g.target(walk[walk.len() - 1]) == g.origin(walk[0])
}

/// Transit chords grouped by vertex. Assumes every dart is in range and
/// walks are contiguous.
fn chords(w: &WeakLinkage, g: &PlaneGraph) -> BTreeMap<VertexId, Vec<Chord>> {
    let mut out: BTreeMap<VertexId, Vec<Chord>> = BTreeMap::new();
    for walk in &w.walks {
        let mut turns: Vec<(Dart, Dart)> = walk.windows(2).map(|p| (p[0], p[1])).collect();
        if is_closed(g, walk) {
            turns.push((walk[walk.len() - 1], walk[0]));
        }
        for (arrive, depart) in turns {
            out.entry(g.origin(depart))
                .or_default()
                .push([arrive.twin(), depart]);
        }
    }
    out
}

fn interleave(g: &PlaneGraph, a: Chord, b: Chord) -> bool {
    let (a0, a1) = (g.position(a[0]), g.position(a[1]));
    let (lo, hi) = (a0.min(a1), a0.max(a1));
    let inside = |d: Dart| (lo + 1..hi).contains(&g.position(d));
    let shares = a.iter().any(|d| b.contains(d));
    !shares && inside(b[0]) != inside(b[1])
}

/// Every pair of transit chords at the same vertex whose ends alternate
/// around the rotation, by direct pairwise comparison.
pub fn interleaving_chords(w: &WeakLinkage, g: &PlaneGraph) -> Vec<(VertexId, Chord, Chord)> {
    let mut out = Vec::new();
    for (v, list) in chords(w, g) {
        for (i, &a) in list.iter().enumerate() {
            for &b in &list[i + 1..] {
                if interleave(g, a, b) {
                    out.push((v, a, b));
                }
            }
        }
    }
    out
}

/// Chords are laminar iff a stack sweep around the rotation closes each
/// chord while it is on top.
fn laminar(g: &PlaneGraph, v: VertexId, list: &[Chord]) -> bool {
    let mut owner: BTreeMap<Dart, usize> = BTreeMap::new();
    for (i, c) in list.iter().enumerate() {
        for &d in c {
            if owner.insert(d, i).is_some() {
                return false;
            }
        }
    }
    let mut stack: Vec<usize> = Vec::new();
    let mut open = vec![false; list.len()];
    for d in g.rotation(v) {
        let Some(&c) = owner.get(d) else { continue };
        if open[c] {
            if stack.pop() != Some(c) {
                return false;
            }
        } else {
            open[c] = true;
            stack.push(c);
        }
    }
    true
}

/// First reason the walks fail to form a weak linkage, if any.
pub fn linkage_violation(w: &WeakLinkage, g: &PlaneGraph) -> Option<LinkageViolation> {
    for (walk, darts) in w.walks.iter().enumerate() {
        if let Some(step) = darts.iter().position(|d| d.edge() >= g.edge_count()) {
            return Some(LinkageViolation::UnknownEdge { walk, step });
        }
        if let Some(step) = darts
            .windows(2)
            .position(|p| g.target(p[0]) != g.origin(p[1]))
        {
            return Some(LinkageViolation::Discontiguous { walk, step });
        }
    }
    let mut used = BTreeSet::new();
    if let Some(edge) = w.edges().find(|&e| !used.insert(e)) {
        return Some(LinkageViolation::ReusedEdge { edge });
    }
    chords(w, g)
        .into_iter()
        .find(|(v, list)| !laminar(g, *v, list))
        .map(|(vertex, _)| LinkageViolation::Crossing { vertex })
}

/// Edge-disjoint walks that never cross at a vertex.
pub fn validate_weak_linkage(w: &WeakLinkage, g: &PlaneGraph) -> bool {
    linkage_violation(w, g).is_none()
}

/// Whether every walk runs along parallel copies of tree edges with no copy
/// used twice. `gr_multiplied` comes from `multiply_edges(copies)` on the
/// graph the tree lives in.
pub fn is_pushed_onto(
    w: &WeakLinkage,
    tree: &SteinerTree,
    gr_multiplied: &PlaneGraph,
    copies: usize,
) -> bool {
    let mut used = BTreeSet::new();
    w.edges().all(|e| {
        e < gr_multiplied.edge_count()
            && tree.edges.contains(&copy_parent(e, copies))
            && used.insert(e)
    })
}

/// The paths of a solution as walks in the instance graph.
pub fn solution_walks(inst: &Instance, sol: &Solution) -> WeakLinkage {
    let g = &inst.graph;
    let walks = sol
        .paths
        .iter()
        .map(|p| {
            p.windows(2)
                .map(|s| {
                    g.dart_between(s[0], s[1])
                        .expect("solution steps follow edges")
                })
                .collect()
        })
        .collect();
    WeakLinkage { walks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_grid, gen_random_planar};
    use crate::oracle::{for_each_solution, OracleLimits};
    use crate::plane_graph::tests::cycle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::ops::ControlFlow;

    /// Centre 4 of a 3x3 grid with its arms towards 1 (N), 5 (E), 7 (S), 3 (W).
    fn plus() -> (PlaneGraph, [Dart; 4]) {
        let inst = gen_grid(3, 3, &[((1, 1), (3, 3))]).unwrap();
        let g = inst.graph;
        let c = 4;
        let arm = |v| g.dart_between(v, c).unwrap();
        let inward = [arm(1), arm(5), arm(7), arm(3)];
        (g, inward)
    }

    #[test]
    fn transversal_crossing_rejected() {
        let (g, inward) = plus();
        // north to south and east to west
        let ns = vec![inward[0], inward[2].twin()];
        let ew = vec![inward[1], inward[3].twin()];
        let w = WeakLinkage::new(vec![ns.clone(), ew]);
        assert!(matches!(
            linkage_violation(&w, &g),
            Some(LinkageViolation::Crossing { vertex: 4 })
        ));
        assert_eq!(interleaving_chords(&w, &g).len(), 1);
        // north to east and south to west only touch
        let ne = vec![inward[0], inward[1].twin()];
        let sw = vec![inward[2], inward[3].twin()];
        assert!(validate_weak_linkage(&WeakLinkage::new(vec![ne, sw]), &g));
    }

    #[test]
    fn structural_violations() {
        let g = cycle(4);
        let d = |u, v| g.dart_between(u, v).unwrap();
        let broken = WeakLinkage::new(vec![vec![d(0, 1), d(2, 3)]]);
        assert_eq!(
            linkage_violation(&broken, &g),
            Some(LinkageViolation::Discontiguous { walk: 0, step: 0 })
        );
        let reused = WeakLinkage::new(vec![vec![d(0, 1)], vec![d(1, 0)]]);
        assert_eq!(
            linkage_violation(&reused, &g),
            Some(LinkageViolation::ReusedEdge {
                edge: d(0, 1).edge()
            })
        );
        let outside = WeakLinkage::new(vec![vec![Dart::new(9, 0)]]);
        assert!(matches!(
            linkage_violation(&outside, &g),
            Some(LinkageViolation::UnknownEdge { .. })
        ));
        let closed = WeakLinkage::new(vec![vec![d(0, 1), d(1, 2), d(2, 3), d(3, 0)]]);
        assert!(validate_weak_linkage(&closed, &g));
    }

    #[test]
    fn pushed_onto_tree_copies() {
        let g = cycle(4);
        let copies = 3;
        let gm = g.multiply_edges(copies);
        let tree = SteinerTree {
            edges: [0, 1].into_iter().collect(),
        };
        assert!(is_pushed_onto(&WeakLinkage::default(), &tree, &gm, copies));
        let along = WeakLinkage::new(vec![vec![Dart::new(1, 0), Dart::new(4, 0)]]);
        assert!(is_pushed_onto(&along, &tree, &gm, copies));
        let twice = WeakLinkage::new(vec![vec![Dart::new(1, 0)], vec![Dart::new(1, 1)]]);
        assert!(!is_pushed_onto(&twice, &tree, &gm, copies));
        let off_tree = WeakLinkage::new(vec![vec![Dart::new(7, 0)]]);
        assert!(!is_pushed_onto(&off_tree, &tree, &gm, copies));
    }

    #[test]
    fn solutions_are_weak_linkages() {
        for seed in 0..25u64 {
            let inst = gen_random_planar(9 + (seed % 4) as usize, 2, seed).unwrap();
            let mut seen = 0;
            let _ = for_each_solution(&inst, OracleLimits::default(), |sol| {
                let w = solution_walks(&inst, sol);
                assert!(validate_weak_linkage(&w, &inst.graph), "seed {seed}");
                let gr = inst.graph.radial_completion().graph;
                assert!(
                    validate_weak_linkage(&w, &gr),
                    "seed {seed} in radial completion"
                );
                seen += 1;
                if seen == 20 {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
        }
    }

    /// Random walks through a graph, stopping at the first reused edge.
    fn random_linkage(g: &PlaneGraph, rng: &mut ChaCha8Rng) -> WeakLinkage {
        let mut used = BTreeSet::new();
        let mut walks = Vec::new();
        for _ in 0..rng.gen_range(2..5) {
            let mut v = rng.gen_range(0..g.vertex_count());
            let mut walk = Vec::new();
            for _ in 0..rng.gen_range(3..12) {
                let rot = g.rotation(v);
                if rot.is_empty() {
                    break;
                }
                let d = rot[rng.gen_range(0..rot.len())];
                if !used.insert(d.edge()) {
                    break;
                }
                walk.push(d);
                v = g.target(d);
            }
            walks.push(walk);
        }
        WeakLinkage::new(walks)
    }

    fn reversed(walk: &[Dart]) -> Vec<Dart> {
        walk.iter().rev().map(|d| d.twin()).collect()
    }

    #[test]
    fn stack_sweep_agrees_with_pairwise_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut crossing = 0;
        for seed in 0..300u64 {
            let g = gen_random_planar(8, 0, seed).unwrap().graph;
            let w = random_linkage(&g, &mut rng);
            let pairwise = interleaving_chords(&w, &g).is_empty();
            assert_eq!(validate_weak_linkage(&w, &g), pairwise, "seed {seed}");
            crossing += usize::from(!pairwise);

            // reversing a walk or rotating a closed one changes nothing
            let mut flipped = w.clone();
            let i = rng.gen_range(0..flipped.len());
            flipped.walks[i] = reversed(&flipped.walks[i]);
            assert_eq!(validate_weak_linkage(&flipped, &g), pairwise);
            for walk in flipped.walks.iter_mut().filter(|x| is_closed(&g, x)) {
                walk.rotate_left(1);
            }
            assert_eq!(validate_weak_linkage(&flipped, &g), pairwise);
        }
        assert!(
            crossing >= 5,
            "random linkages should include crossings, got {crossing}"
        );
    }
}
