use serde::{Deserialize, Serialize};

use super::{Dart, EdgeId, FaceId, PlaneGraph, VertexId};

/// Where a vertex of a radial completion came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadialOrigin {
    Vertex(VertexId),
    Face(FaceId),
}

/// Radial completion: the original graph plus one vertex per face, joined
/// to every vertex incidence on that face's boundary.
///
/// Original vertices and edges keep their ids; face `f` becomes vertex
/// `n + f` and radial edges are numbered after the original ones.
#[derive(Clone, Debug)]
pub struct RadialCompletion {
    pub graph: PlaneGraph,
    pub origin: Vec<RadialOrigin>,
    pub original_vertices: usize,
    pub original_edges: usize,
}

impl RadialCompletion {
    pub fn face_vertex(&self, f: FaceId) -> VertexId {
        self.original_vertices + f
    }

    pub fn is_original_edge(&self, e: EdgeId) -> bool {
        e < self.original_edges
    }
}

/// Original edge of a copy produced by [`PlaneGraph::multiply_edges`].
pub fn copy_parent(copy: EdgeId, copies: usize) -> EdgeId {
    copy / copies
}

impl PlaneGraph {
    pub fn dual(&self) -> PlaneGraph {
        let edges: Vec<[VertexId; 2]> = (0..self.edge_count())
            .map(|e| [self.face_of(Dart::new(e, 0)), self.face_of(Dart::new(e, 1))])
            .collect();
        let mut rotation = vec![Vec::new(); self.face_count()];
        for f in self.faces() {
            for walk in &f.walks {
                rotation[f.id].extend(walk.iter().rev().copied());
            }
        }
        PlaneGraph::assemble(self.face_count(), edges, rotation, None)
            .expect("dual of a plane graph is plane")
    }

    pub fn radial_completion(&self) -> RadialCompletion {
        let n = self.vertex_count();
        let m = self.edge_count();
        let mut edges: Vec<[VertexId; 2]> = self.edges().to_vec();
        // radial edge of the corner entered by dart x
        let mut corner_edge = vec![usize::MAX; 2 * m];
        let mut isolated_edge = vec![usize::MAX; n];
        let mut face_rot: Vec<Vec<Dart>> = vec![Vec::new(); self.face_count()];
        for f in self.faces() {
            let fv = n + f.id;
            for walk in &f.walks {
                let mut corners = Vec::with_capacity(walk.len());
                for &x in walk {
                    let e = edges.len();
                    edges.push([self.target(x), fv]);
                    corner_edge[x.index()] = e;
                    corners.push(Dart::new(e, 1));
                }
                face_rot[f.id].extend(corners.into_iter().rev());
            }
            for &v in &f.isolated {
                let e = edges.len();
                edges.push([v, fv]);
                isolated_edge[v] = e;
                face_rot[f.id].push(Dart::new(e, 1));
            }
        }
        let mut rotation: Vec<Vec<Dart>> = Vec::with_capacity(n + self.face_count());
        for (v, &iso) in isolated_edge.iter().enumerate() {
            let rot = self.rotation(v);
            if rot.is_empty() {
                rotation.push(vec![Dart::new(iso, 0)]);
                continue;
            }
            let mut out = Vec::with_capacity(2 * rot.len());
            for &d in rot {
                out.push(d);
                out.push(Dart::new(corner_edge[d.twin().index()], 0));
            }
            rotation.push(out);
        }
        rotation.extend(face_rot);
        let origin = (0..n)
            .map(RadialOrigin::Vertex)
            .chain((0..self.face_count()).map(RadialOrigin::Face))
            .collect();
        let graph = PlaneGraph::assemble(n + self.face_count(), edges, rotation, None)
            .expect("radial completion of a plane graph is plane");
        RadialCompletion {
            graph,
            origin,
            original_vertices: n,
            original_edges: m,
        }
    }

    /// Replaces every edge by `copies` parallel edges in consecutive rotation
    /// positions. Edge `e` becomes `e * copies .. (e + 1) * copies`.
    pub fn multiply_edges(&self, copies: usize) -> PlaneGraph {
        assert!(copies >= 1, "edge multiplicity must be positive");
        let c = copies;
        let edges: Vec<[VertexId; 2]> = self
            .edges()
            .iter()
            .flat_map(|&ends| std::iter::repeat_n(ends, c))
            .collect();
        let rotation = (0..self.vertex_count())
            .map(|v| {
                let mut out = Vec::with_capacity(self.degree(v) * c);
                for &d in self.rotation(v) {
                    let base = d.edge() * c;
                    if d.end() == 0 {
                        out.extend((0..c).map(|j| Dart::new(base + j, 0)));
                    } else {
                        out.extend((0..c).rev().map(|j| Dart::new(base + j, 1)));
                    }
                }
                out
            })
            .collect();
        let outer = self.outer_dart().map(|d| {
            let j = if d.end() == 0 { 0 } else { c - 1 };
            Dart::new(d.edge() * c + j, d.end())
        });
        PlaneGraph::assemble(self.vertex_count(), edges, rotation, outer)
            .expect("edge multiplication keeps planarity")
    }

    /// Deletes a vertex set with all incident edges, keeping the induced
    /// rotation. Returns the new graph, the kept vertices (new id -> old id)
    /// and the kept edges (new id -> old id).
    pub fn delete_vertices(&self, removed: &[bool]) -> (PlaneGraph, Vec<VertexId>, Vec<EdgeId>) {
        let n = self.vertex_count();
        let mut new_id = vec![usize::MAX; n];
        let mut kept = Vec::new();
        for v in 0..n {
            if !removed[v] {
                new_id[v] = kept.len();
                kept.push(v);
            }
        }
        let mut new_edge = vec![usize::MAX; self.edge_count()];
        let mut kept_edges = Vec::new();
        let mut edges = Vec::new();
        for (e, &[a, b]) in self.edges().iter().enumerate() {
            if !removed[a] && !removed[b] {
                new_edge[e] = kept_edges.len();
                kept_edges.push(e);
                edges.push([new_id[a], new_id[b]]);
            }
        }
        let map_dart = |d: Dart| Dart::new(new_edge[d.edge()], d.end());
        let rotation = kept
            .iter()
            .map(|&v| {
                self.rotation(v)
                    .iter()
                    .filter(|d| new_edge[d.edge()] != usize::MAX)
                    .map(|&d| map_dart(d))
                    .collect()
            })
            .collect();
        let outer = self
            .face(self.outer_face())
            .boundary()
            .iter()
            .find(|d| new_edge[d.edge()] != usize::MAX)
            .map(|&d| map_dart(d));
        let g = PlaneGraph::assemble(kept.len(), edges, rotation, outer)
            .expect("subgraph of a plane graph is plane");
        (g, kept, kept_edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_graph::tests::cycle;

    fn grid(r: usize, c: usize) -> PlaneGraph {
        crate::instance::gen_grid(r, c, &[]).unwrap().graph
    }

    #[test]
    fn dual_of_four_cycle() {
        let d = cycle(4).dual();
        assert_eq!(d.vertex_count(), 2);
        assert_eq!(d.edge_count(), 4);
        d.check_invariants().unwrap();
        assert!(d.edges().iter().all(|e| e[0] != e[1]));
    }

    #[test]
    fn dual_of_k4() {
        let k4 = PlaneGraph::build(
            4,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            None,
            None,
        )
        .unwrap();
        let d = k4.dual();
        assert_eq!((d.vertex_count(), d.edge_count()), (4, 6));
        assert_eq!(d.dual().vertex_count(), 4);
    }

    #[test]
    fn dual_of_grid_twice() {
        let g = grid(3, 4);
        let dd = g.dual().dual();
        dd.check_invariants().unwrap();
        assert_eq!(dd.vertex_count(), g.vertex_count());
        assert_eq!(dd.edge_count(), g.edge_count());
    }

    #[test]
    fn radial_completion_counts() {
        let rc = cycle(4).radial_completion();
        assert_eq!(rc.graph.vertex_count(), 6);
        assert_eq!(rc.graph.edge_count(), 12);
        rc.graph.check_invariants().unwrap();

        let single = PlaneGraph::build(1, &[], None, None)
            .unwrap()
            .radial_completion();
        assert_eq!(
            (single.graph.vertex_count(), single.graph.edge_count()),
            (2, 1)
        );

        let k4 = PlaneGraph::build(
            4,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            None,
            None,
        )
        .unwrap();
        let rk = k4.radial_completion();
        assert_eq!((rk.graph.vertex_count(), rk.graph.edge_count()), (8, 18));
        rk.graph.check_invariants().unwrap();
    }

    #[test]
    fn radial_edges_join_original_to_face_vertices() {
        let rc = grid(3, 3).radial_completion();
        for e in rc.original_edges..rc.graph.edge_count() {
            let [a, b] = rc.graph.endpoints(e);
            assert!(matches!(rc.origin[a], RadialOrigin::Vertex(_)));
            assert!(matches!(rc.origin[b], RadialOrigin::Face(_)));
        }
    }

    #[test]
    fn radial_completion_of_disconnected_graph() {
        let g = PlaneGraph::build(6, &[(0, 1), (1, 2), (2, 0), (3, 4)], None, None).unwrap();
        let rc = g.radial_completion();
        rc.graph.check_invariants().unwrap();
        assert_eq!(rc.graph.component_count(), 1);
    }

    #[test]
    fn multiply_edges_counts() {
        let c4 = cycle(4);
        assert_eq!(c4.multiply_edges(1), c4);
        let m = c4.multiply_edges(2);
        assert_eq!((m.edge_count(), m.face_count()), (8, 6));
        m.check_invariants().unwrap();

        let e = PlaneGraph::build(2, &[(0, 1)], None, None)
            .unwrap()
            .multiply_edges(3);
        assert_eq!((e.edge_count(), e.face_count()), (3, 3));
        assert_eq!(copy_parent(5, 3), 1);
    }

    #[test]
    fn multiply_edges_with_loop() {
        let g = PlaneGraph::build(2, &[(0, 1), (1, 1)], None, None).unwrap();
        let m = g.multiply_edges(3);
        m.check_invariants().unwrap();
        assert_eq!(m.face_count(), g.face_count() + 2 * g.edge_count());
    }

    #[test]
    fn multiply_edges_keeps_outer_face() {
        let g = grid(3, 3);
        let m = g.multiply_edges(2);
        assert_eq!(m.face(m.outer_face()).len(), g.face(g.outer_face()).len());
    }

    #[test]
    fn delete_vertices_keeps_embedding() {
        let g = grid(3, 3);
        let mut removed = vec![false; 9];
        removed[4] = true;
        let (h, kept, kept_edges) = g.delete_vertices(&removed);
        h.check_invariants().unwrap();
        assert_eq!(kept.len(), 8);
        assert_eq!(kept_edges.len(), 8);
        // the centre's four faces merge into one 8-cycle
        assert_eq!(h.face_count(), 2);
    }
}
