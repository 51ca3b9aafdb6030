//! Flows as words on arcs, and homology of flows.
//!
//! Each edge `e` yields two opposite arcs, its darts. In the directed graph
//! the two arcs of an edge bound a digon, so a face labeling assigns a word
//! to every face of the plane graph and to every edge's digon. The left face
//! of an arc is the face of its dart; its right face is the edge's digon.
//! Around a vertex the clockwise order within one rotation slot is the
//! outgoing arc, then the incoming one.

mod format;
mod word;

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{verify_solution, Instance, Side, Solution, SolutionError};
use crate::plane_graph::{Dart, EdgeId, FaceId, PlaneGraph, VertexId};

pub use format::{parse_flow, serialize_flow, FlowParseError};
pub use word::{concat, invert, reduce_word, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("invalid solution: {0}")]
    InvalidSolution(#[from] SolutionError),
    #[error("face labeling has {faces} face and {digons} digon words, graph needs {want_faces} and {want_digons}")]
    LabelingShape {
        faces: usize,
        digons: usize,
        want_faces: usize,
        want_digons: usize,
    },
    #[error("face labeling is not the empty word on the outer face")]
    OuterNotEmpty,
}

/// Sparse assignment of reduced words to arcs; missing arcs carry the empty word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flow {
    words: BTreeMap<Dart, Word>,
}

impl Flow {
    pub fn new() -> Flow {
        Flow::default()
    }

    pub fn word(&self, arc: Dart) -> Word {
        self.words.get(&arc).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, arc: Dart, w: Word) {
        if w.is_empty() {
            self.words.remove(&arc);
        } else {
            self.words.insert(arc, w);
        }
    }

    /// Arcs with a nonempty word, in dart order.
    pub fn support(&self) -> impl Iterator<Item = (Dart, &Word)> {
        self.words.iter().map(|(&d, w)| (d, w))
    }
}

/// Words on the faces of a plane graph and on the digon of each edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceLabeling {
    pub faces: Vec<Word>,
    pub digons: Vec<Word>,
}

impl FaceLabeling {
    pub fn identity(g: &PlaneGraph) -> FaceLabeling {
        FaceLabeling {
            faces: vec![Word::empty(); g.face_count()],
            digons: vec![Word::empty(); g.edge_count()],
        }
    }

    pub fn new(
        g: &PlaneGraph,
        faces: Vec<Word>,
        digons: Vec<Word>,
    ) -> Result<FaceLabeling, FlowError> {
        if faces.len() != g.face_count() || digons.len() != g.edge_count() {
            return Err(FlowError::LabelingShape {
                faces: faces.len(),
                digons: digons.len(),
                want_faces: g.face_count(),
                want_digons: g.edge_count(),
            });
        }
        if !faces[g.outer_face()].is_empty() {
            return Err(FlowError::OuterNotEmpty);
        }
        Ok(FaceLabeling { faces, digons })
    }

    pub fn left(&self, g: &PlaneGraph, arc: Dart) -> &Word {
        &self.faces[g.face_of(arc)]
    }

    pub fn right(&self, arc: Dart) -> &Word {
        &self.digons[arc.edge()]
    }

    pub fn is_identity(&self) -> bool {
        self.faces.iter().chain(&self.digons).all(Word::is_empty)
    }

    /// Facewise inverse.
    pub fn inverse(&self) -> FaceLabeling {
        FaceLabeling {
            faces: self.faces.iter().map(Word::inverse).collect(),
            digons: self.digons.iter().map(Word::inverse).collect(),
        }
    }

    /// Facewise product `self(f) . other(f)`.
    pub fn compose(&self, other: &FaceLabeling) -> FaceLabeling {
        FaceLabeling {
            faces: self
                .faces
                .iter()
                .zip(&other.faces)
                .map(|(a, b)| a.concat(b))
                .collect(),
            digons: self
                .digons
                .iter()
                .zip(&other.digons)
                .map(|(a, b)| a.concat(b))
                .collect(),
        }
    }
}

/// Clockwise concatenation at `v` starting at the rotation's first dart:
/// the outgoing arc's word, then the incoming arc's word inverted.
pub fn vertex_trace(g: &PlaneGraph, flow: &Flow, v: VertexId) -> Word {
    let mut out = Word::empty();
    for &d in g.rotation(v) {
        out = out
            .concat(&flow.word(d))
            .concat(&flow.word(d.twin()).inverse());
    }
    out
}

/// Trace required at `v`: empty off terminals, the request letter at a
/// source and its inverse at a sink.
pub fn expected_trace(inst: &Instance, v: VertexId) -> Word {
    match inst.role(v) {
        None => Word::empty(),
        Some((i, Side::Source)) => Word::letter(i as Letter + 1),
        Some((i, Side::Sink)) => Word::letter(-(i as Letter + 1)),
    }
}

/// First vertex whose trace is wrong, with that trace. Terminal traces are
/// compared up to conjugacy.
pub fn flow_violation(inst: &Instance, flow: &Flow) -> Option<(VertexId, Word)> {
    (0..inst.graph.vertex_count()).find_map(|v| {
        let trace = vertex_trace(&inst.graph, flow, v);
        let want = expected_trace(inst, v);
        let ok = if inst.is_terminal(v) {
            trace.cyclic_reduce() == want
        } else {
            trace.is_empty()
        };
        (!ok).then_some((v, trace))
    })
}

pub fn is_flow(inst: &Instance, flow: &Flow) -> bool {
    flow_violation(inst, flow).is_none()
}

/// Puts letter `i + 1` on every arc path `i` traverses; between two vertices
/// joined by parallel edges the smallest edge is used.
pub fn flow_from_solution(inst: &Instance, solution: &Solution) -> Result<Flow, FlowError> {
    verify_solution(inst, solution)?;
    let mut flow = Flow::new();
    for (i, path) in solution.paths.iter().enumerate() {
        for w in path.windows(2) {
            let d = inst
                .graph
                .dart_between(w[0], w[1])
                .expect("verified paths follow edges");
            flow.set(d, Word::letter(i as Letter + 1));
        }
    }
    Ok(flow)
}

/// `psi(a) = h(left a)^-1 . phi(a) . h(right a)` on every arc.
pub fn apply_face_labeling(g: &PlaneGraph, flow: &Flow, h: &FaceLabeling) -> Flow {
    let mut out = Flow::new();
    for a in g.darts() {
        out.set(
            a,
            h.left(g, a)
                .inverse()
                .concat(&flow.word(a))
                .concat(h.right(a)),
        );
    }
    out
}

#[derive(Clone, Copy)]
enum Region {
    Face(FaceId),
    Digon(EdgeId),
}

/// The face labeling witnessing `psi ~ phi`, if any. It is propagated from
/// the outer face across arcs and then checked on every arc.
pub fn are_homologous(g: &PlaneGraph, phi: &Flow, psi: &Flow) -> Option<FaceLabeling> {
    let mut faces: Vec<Option<Word>> = vec![None; g.face_count()];
    let mut digons: Vec<Option<Word>> = vec![None; g.edge_count()];
    faces[g.outer_face()] = Some(Word::empty());
    let mut queue = VecDeque::from([Region::Face(g.outer_face())]);
    while let Some(region) = queue.pop_front() {
        match region {
            Region::Face(f) => {
                let hf = faces[f].clone().expect("queued regions are labeled");
                for &a in g.face(f).boundary().iter() {
                    let e = a.edge();
                    if digons[e].is_none() {
                        digons[e] = Some(phi.word(a).inverse().concat(&hf).concat(&psi.word(a)));
                        queue.push_back(Region::Digon(e));
                    }
                }
            }
            Region::Digon(e) => {
                let hd = digons[e].clone().expect("queued regions are labeled");
                for a in [Dart::new(e, 0), Dart::new(e, 1)] {
                    let f = g.face_of(a);
                    if faces[f].is_none() {
                        faces[f] = Some(phi.word(a).concat(&hd).concat(&psi.word(a).inverse()));
                        queue.push_back(Region::Face(f));
                    }
                }
            }
        }
    }
    let h = FaceLabeling {
        faces: faces.into_iter().map(|w| w.unwrap_or_default()).collect(),
        digons: digons
            .into_iter()
            .map(|w| w.expect("every edge borders a labeled face"))
            .collect(),
    };
    g.darts()
        .all(|a| {
            h.left(g, a)
                .inverse()
                .concat(&phi.word(a))
                .concat(h.right(a))
                == psi.word(a)
        })
        .then_some(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_grid, gen_random_planar};
    use crate::oracle::{for_each_solution, OracleLimits};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::ops::ControlFlow;

    fn c4(pairs: Vec<(usize, usize)>) -> Instance {
        let g = PlaneGraph::build(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], None, None).unwrap();
        Instance::new(g, pairs).unwrap()
    }

    fn random_word(rng: &mut ChaCha8Rng, k: i32) -> Word {
        let len = rng.gen_range(0..5);
        Word::reduce((0..len).map(|_| {
            let l = rng.gen_range(1..=k.max(1));
            if rng.gen_bool(0.5) {
                l
            } else {
                -l
            }
        }))
    }

    fn random_labeling(g: &PlaneGraph, k: i32, rng: &mut ChaCha8Rng) -> FaceLabeling {
        let mut faces: Vec<Word> = (0..g.face_count()).map(|_| random_word(rng, k)).collect();
        faces[g.outer_face()] = Word::empty();
        let digons = (0..g.edge_count()).map(|_| random_word(rng, k)).collect();
        FaceLabeling::new(g, faces, digons).unwrap()
    }

    #[test]
    fn empty_flow_traces() {
        let inst = c4(vec![]);
        assert!(is_flow(&inst, &Flow::new()));
        assert!((0..4).all(|v| vertex_trace(&inst.graph, &Flow::new(), v).is_empty()));
        assert!(!is_flow(&c4(vec![(0, 2)]), &Flow::new()));
    }

    #[test]
    fn four_cycle_path_flow() {
        let inst = c4(vec![(0, 2)]);
        let flow = flow_from_solution(
            &inst,
            &Solution {
                paths: vec![vec![0, 1, 2]],
            },
        )
        .unwrap();
        let support: Vec<_> = flow
            .support()
            .map(|(d, w)| (inst.graph.origin(d), inst.graph.target(d), w.clone()))
            .collect();
        assert_eq!(
            support,
            vec![(0, 1, Word::letter(1)), (1, 2, Word::letter(1))]
        );
        assert!(vertex_trace(&inst.graph, &flow, 1).is_empty());
        assert_eq!(vertex_trace(&inst.graph, &flow, 0), Word::letter(1));
        assert_eq!(vertex_trace(&inst.graph, &flow, 2), Word::letter(-1));
        assert!(is_flow(&inst, &flow));
        assert!(matches!(
            flow_from_solution(
                &inst,
                &Solution {
                    paths: vec![vec![0, 2]]
                }
            ),
            Err(FlowError::InvalidSolution(_))
        ));
    }

    #[test]
    fn single_face_labeling_by_hand() {
        let inst = c4(vec![(0, 2)]);
        let g = &inst.graph;
        let flow = flow_from_solution(
            &inst,
            &Solution {
                paths: vec![vec![0, 1, 2]],
            },
        )
        .unwrap();
        let inner = 1 - g.outer_face();
        let mut h = FaceLabeling::identity(g);
        h.faces[inner] = Word::letter(1);
        let psi = apply_face_labeling(g, &flow, &h);
        for a in g.darts() {
            let expected = if g.face_of(a) == inner {
                Word::letter(-1).concat(&flow.word(a))
            } else {
                flow.word(a)
            };
            assert_eq!(psi.word(a), expected, "arc {a:?}");
        }
        assert!(is_flow(&inst, &psi));
        assert_eq!(are_homologous(g, &flow, &psi), Some(h));
    }

    #[test]
    fn identity_labeling_is_neutral() {
        let inst = gen_grid(3, 3, &[((1, 1), (3, 3))]).unwrap();
        let sol = Solution {
            paths: vec![vec![0, 1, 2, 5, 8]],
        };
        let flow = flow_from_solution(&inst, &sol).unwrap();
        let id = FaceLabeling::identity(&inst.graph);
        assert_eq!(apply_face_labeling(&inst.graph, &flow, &id), flow);
        assert!(are_homologous(&inst.graph, &flow, &flow)
            .unwrap()
            .is_identity());
    }

    #[test]
    fn replaced_arc_breaks_homology() {
        let inst = c4(vec![(0, 2)]);
        let g = &inst.graph;
        let flow = flow_from_solution(
            &inst,
            &Solution {
                paths: vec![vec![0, 1, 2]],
            },
        )
        .unwrap();
        for a in g.darts() {
            let mut other = flow.clone();
            other.set(a, Word::letter(2));
            assert_eq!(are_homologous(g, &flow, &other), None, "arc {a:?}");
        }
    }

    #[test]
    fn labeling_shape_checked() {
        let g = c4(vec![]).graph;
        assert!(matches!(
            FaceLabeling::new(&g, vec![], vec![]),
            Err(FlowError::LabelingShape { .. })
        ));
        let mut faces = vec![Word::empty(); 2];
        faces[g.outer_face()] = Word::letter(1);
        assert_eq!(
            FaceLabeling::new(&g, faces, vec![Word::empty(); 4]),
            Err(FlowError::OuterNotEmpty)
        );
    }

    #[test]
    fn oracle_solutions_give_flows() {
        for seed in 0..30 {
            let inst = gen_random_planar(9, 1 + seed as usize % 3, seed).unwrap();
            let mut seen = 0;
            for_each_solution(&inst, OracleLimits::default(), |s| {
                let flow = flow_from_solution(&inst, s).unwrap();
                assert!(is_flow(&inst, &flow), "seed {seed}");
                seen += 1;
                if seen < 20 {
                    ControlFlow::Continue(())
                } else {
                    ControlFlow::Break(())
                }
            })
            .unwrap();
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn labeling_preserves_flow_and_is_recovered(n in 6usize..14, k in 1usize..3, seed in any::<u64>()) {
            let inst = gen_random_planar(n, k, seed).unwrap();
            let Some(sol) = crate::oracle::solve_bruteforce(&inst, OracleLimits::default()).unwrap() else {
                return Ok(());
            };
            let g = &inst.graph;
            let flow = flow_from_solution(&inst, &sol).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_labeling(g, k as i32, &mut rng);
            let psi = apply_face_labeling(g, &flow, &h);
            prop_assert!(is_flow(&inst, &psi));
            prop_assert_eq!(are_homologous(g, &flow, &psi), Some(h.clone()));

            // symmetry and transitivity
            prop_assert_eq!(are_homologous(g, &psi, &flow), Some(h.inverse()));
            let h2 = random_labeling(g, k as i32, &mut rng);
            let chi = apply_face_labeling(g, &psi, &h2);
            prop_assert_eq!(are_homologous(g, &flow, &chi), Some(h.compose(&h2)));
        }
    }
}
