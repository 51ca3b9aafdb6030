//! Embedded planar multigraphs.
//!
//! A [`PlaneGraph`] is a combinatorial embedding: every edge has two darts
//! (edge ends) and every vertex stores its darts in clockwise order. Faces
//! are the orbits of the permutation `next(d) = cw_succ(twin(d))`, so the
//! face of a dart always lies on its left-hand side.

mod derived;
mod planarity;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use derived::{copy_parent, RadialCompletion, RadialOrigin};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;

/// One end of an edge. Dart `2e` leaves `edges[e][0]`, dart `2e + 1`
/// leaves `edges[e][1]`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dart(usize);

impl Dart {
    pub fn new(edge: EdgeId, end: usize) -> Dart {
        debug_assert!(end < 2);
        Dart(2 * edge + end)
    }

    pub fn from_index(index: usize) -> Dart {
        Dart(index)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn edge(self) -> EdgeId {
        self.0 / 2
    }

    /// 0 for the tail end, 1 for the head end.
    pub fn end(self) -> usize {
        self.0 & 1
    }

    pub fn twin(self) -> Dart {
        Dart(self.0 ^ 1)
    }

    /// `true` when the dart runs from the edge's first endpoint to its second.
    pub fn is_forward(self) -> bool {
        self.end() == 0
    }
}

impl fmt::Debug for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.is_forward() { '+' } else { '-' };
        write!(f, "{}{}", sign, self.edge())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error("graph is not planar")]
    NonPlanar,
    #[error("rotation system is not planar (face count {faces}, Euler requires {expected})")]
    NonPlanarRotation { faces: usize, expected: usize },
    #[error("malformed rotation: {0}")]
    MalformedRotation(String),
    #[error("edge {edge} has endpoint {vertex} out of range (n = {n})")]
    VertexOutOfRange {
        edge: EdgeId,
        vertex: VertexId,
        n: usize,
    },
    #[error("outer face designation refers to unknown dart {0:?}")]
    BadOuterDart(Dart),
}

/// A face of the embedding.
///
/// Faces of a connected graph have exactly one boundary walk. When the graph
/// has several components, the outer walks of all components are merged into
/// the single outer face, which also holds the isolated vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub id: FaceId,
    /// Closed dart walks; `walks[0]` is the primary boundary.
    pub walks: Vec<Vec<Dart>>,
    pub isolated: Vec<VertexId>,
}

impl Face {
    pub fn boundary(&self) -> &[Dart] {
        self.walks.first().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of darts on the boundary.
    pub fn len(&self) -> usize {
        self.walks.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneGraph {
    vertex_count: usize,
    edges: Vec<[VertexId; 2]>,
    rotation: Vec<Vec<Dart>>,
    position: Vec<usize>,
    face_of: Vec<FaceId>,
    faces: Vec<Face>,
    outer_face: FaceId,
    components: usize,
}

impl PlaneGraph {
    /// Builds an embedded graph. With `rotations` the embedding is checked
    /// against Euler's formula; without, a planar embedding is computed.
    ///
    /// `outer` designates the outer face as the face left of that dart;
    /// when absent the longest face wins, ties going to the smallest dart.
    pub fn build(
        vertex_count: usize,
        edges: &[(VertexId, VertexId)],
        rotations: Option<Vec<Vec<Dart>>>,
        outer: Option<Dart>,
    ) -> Result<PlaneGraph, EmbedError> {
        let edges: Vec<[VertexId; 2]> = edges.iter().map(|&(u, v)| [u, v]).collect();
        for (e, ends) in edges.iter().enumerate() {
            for &v in ends {
                if v >= vertex_count {
                    return Err(EmbedError::VertexOutOfRange {
                        edge: e,
                        vertex: v,
                        n: vertex_count,
                    });
                }
            }
        }
        let rotation = match rotations {
            Some(rot) => {
                validate_rotation(vertex_count, &edges, &rot)?;
                rot
            }
            None => planarity::embed(vertex_count, &edges).ok_or(EmbedError::NonPlanar)?,
        };
        if let Some(d) = outer {
            if d.index() >= 2 * edges.len() {
                return Err(EmbedError::BadOuterDart(d));
            }
        }
        Self::assemble(vertex_count, edges, rotation, outer)
    }

    /// Builds from a rotation that is already known to be well formed.
    pub(crate) fn assemble(
        vertex_count: usize,
        edges: Vec<[VertexId; 2]>,
        rotation: Vec<Vec<Dart>>,
        outer: Option<Dart>,
    ) -> Result<PlaneGraph, EmbedError> {
        let darts = 2 * edges.len();
        let mut position = vec![0; darts];
        for list in &rotation {
            for (i, d) in list.iter().enumerate() {
                position[d.index()] = i;
            }
        }
        let mut g = PlaneGraph {
            vertex_count,
            edges,
            rotation,
            position,
            face_of: vec![usize::MAX; darts],
            faces: Vec::new(),
            outer_face: 0,
            components: 0,
        };
        g.compute_faces(outer)?;
        Ok(g)
    }

    fn compute_faces(&mut self, outer: Option<Dart>) -> Result<(), EmbedError> {
        let darts = 2 * self.edges.len();
        // Components over vertices.
        let mut comp = vec![usize::MAX; self.vertex_count];
        let mut ncomp = 0;
        for s in 0..self.vertex_count {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = ncomp;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &d in &self.rotation[v] {
                    let w = self.target(d);
                    if comp[w] == usize::MAX {
                        comp[w] = ncomp;
                        stack.push(w);
                    }
                }
            }
            ncomp += 1;
        }
        self.components = ncomp;

        // Walks in order of their smallest dart.
        let mut walk_of = vec![usize::MAX; darts];
        let mut walks: Vec<Vec<Dart>> = Vec::new();
        for start in 0..darts {
            if walk_of[start] != usize::MAX {
                continue;
            }
            let id = walks.len();
            let mut walk = Vec::new();
            let mut d = Dart(start);
            loop {
                walk_of[d.index()] = id;
                walk.push(d);
                d = self.next_in_face(d);
                if d.index() == start {
                    break;
                }
            }
            walks.push(walk);
        }

        // Euler per component: a connected plane graph has 2 - V + E faces.
        let mut comp_v = vec![0usize; ncomp];
        let mut comp_e = vec![0usize; ncomp];
        let mut comp_w = vec![0usize; ncomp];
        for v in 0..self.vertex_count {
            comp_v[comp[v]] += 1;
        }
        for e in &self.edges {
            comp_e[comp[e[0]]] += 1;
        }
        for w in &walks {
            comp_w[comp[self.origin(w[0])]] += 1;
        }
        for c in 0..ncomp {
            if comp_e[c] == 0 {
                continue;
            }
            let expected = 2 + comp_e[c] - comp_v[c];
            if comp_w[c] != expected {
                return Err(EmbedError::NonPlanarRotation {
                    faces: comp_w[c],
                    expected,
                });
            }
        }

        let better =
            |a: &Vec<Dart>, b: &Vec<Dart>| a.len() > b.len() || (a.len() == b.len() && a[0] < b[0]);
        let outer_walk = match outer {
            Some(d) => Some(walk_of[d.index()]),
            None => {
                let mut best: Option<usize> = None;
                for (i, w) in walks.iter().enumerate() {
                    if best.is_none_or(|b| better(w, &walks[b])) {
                        best = Some(i);
                    }
                }
                best
            }
        };

        // Every other component contributes its own outer walk to the outer face.
        let mut merged = vec![false; walks.len()];
        let mut extra = Vec::new();
        if let Some(ow) = outer_walk {
            let oc = comp[self.origin(walks[ow][0])];
            let mut best_per_comp: Vec<Option<usize>> = vec![None; ncomp];
            for (i, w) in walks.iter().enumerate() {
                let c = comp[self.origin(w[0])];
                if c == oc {
                    continue;
                }
                if best_per_comp[c].is_none_or(|b| better(w, &walks[b])) {
                    best_per_comp[c] = Some(i);
                }
            }
            for b in best_per_comp.into_iter().flatten() {
                merged[b] = true;
                extra.push(b);
            }
        }
        let isolated: Vec<VertexId> = (0..self.vertex_count)
            .filter(|&v| self.rotation[v].is_empty())
            .collect();

        let mut faces = Vec::new();
        let mut face_of_walk = vec![usize::MAX; walks.len()];
        for i in 0..walks.len() {
            if merged[i] {
                continue;
            }
            face_of_walk[i] = faces.len();
            faces.push(Face {
                id: faces.len(),
                walks: vec![walks[i].clone()],
                isolated: Vec::new(),
            });
        }
        let outer_face = match outer_walk {
            Some(ow) => {
                let f = face_of_walk[ow];
                extra.sort_by_key(|&w| walks[w][0]);
                for w in extra {
                    face_of_walk[w] = f;
                    faces[f].walks.push(walks[w].clone());
                }
                faces[f].isolated = isolated;
                f
            }
            None => {
                faces.push(Face {
                    id: 0,
                    walks: Vec::new(),
                    isolated,
                });
                0
            }
        };
        for d in 0..darts {
            self.face_of[d] = face_of_walk[walk_of[d]];
        }
        self.faces = faces;
        self.outer_face = outer_face;
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn edges(&self) -> &[[VertexId; 2]] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e]
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> {
        (0..2 * self.edges.len()).map(Dart)
    }

    pub fn origin(&self, d: Dart) -> VertexId {
        self.edges[d.edge()][d.end()]
    }

    pub fn target(&self, d: Dart) -> VertexId {
        self.edges[d.edge()][1 - d.end()]
    }

    /// Clockwise rotation at `v`.
    pub fn rotation(&self, v: VertexId) -> &[Dart] {
        &self.rotation[v]
    }

    pub fn rotations(&self) -> &[Vec<Dart>] {
        &self.rotation
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.rotation[v].len()
    }

    /// Index of `d` inside the rotation of its origin.
    pub fn position(&self, d: Dart) -> usize {
        self.position[d.index()]
    }

    pub fn cw_succ(&self, d: Dart) -> Dart {
        let rot = &self.rotation[self.origin(d)];
        rot[(self.position(d) + 1) % rot.len()]
    }

    pub fn cw_pred(&self, d: Dart) -> Dart {
        let rot = &self.rotation[self.origin(d)];
        rot[(self.position(d) + rot.len() - 1) % rot.len()]
    }

    /// Successor of `d` on the boundary of the face left of `d`.
    pub fn next_in_face(&self, d: Dart) -> Dart {
        self.cw_succ(d.twin())
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f]
    }

    /// Face on the left of `d`.
    pub fn face_of(&self, d: Dart) -> FaceId {
        self.face_of[d.index()]
    }

    pub fn left_face(&self, d: Dart) -> FaceId {
        self.face_of(d)
    }

    pub fn right_face(&self, d: Dart) -> FaceId {
        self.face_of(d.twin())
    }

    pub fn outer_face(&self) -> FaceId {
        self.outer_face
    }

    /// Smallest dart on the primary walk of the outer face, if any.
    pub fn outer_dart(&self) -> Option<Dart> {
        self.faces[self.outer_face].boundary().iter().copied().min()
    }

    /// Neighbours of `v` in rotation order, with repetitions for parallel edges.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.rotation[v].iter().map(move |&d| self.target(d))
    }

    /// Smallest-id dart from `u` to `v`, if the two are adjacent.
    pub fn dart_between(&self, u: VertexId, v: VertexId) -> Option<Dart> {
        self.rotation[u]
            .iter()
            .copied()
            .filter(|&d| self.target(d) == v && u != v)
            .min()
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|e| e[0] == e[1])
    }

    /// |V| - |E| + |F| - components; always 1 for a valid plane graph.
    pub fn euler_defect(&self) -> isize {
        self.vertex_count as isize - self.edges.len() as isize + self.faces.len() as isize
            - self.components as isize
    }

    /// Checks the structural invariants: every dart sits once in its origin's
    /// rotation, faces partition the darts, face lengths sum to 2|E| and
    /// Euler's formula holds.
    pub fn check_invariants(&self) -> Result<(), String> {
        let darts = 2 * self.edges.len();
        let mut seen = vec![false; darts];
        for (v, list) in self.rotation.iter().enumerate() {
            for &d in list {
                if d.index() >= darts || seen[d.index()] {
                    return Err(format!("dart {d:?} repeated or out of range"));
                }
                if self.origin(d) != v {
                    return Err(format!(
                        "dart {d:?} listed at {v} but leaves {}",
                        self.origin(d)
                    ));
                }
                seen[d.index()] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err("dart missing from rotation".into());
        }
        let mut covered = vec![0usize; darts];
        for f in &self.faces {
            for w in &f.walks {
                for (i, &d) in w.iter().enumerate() {
                    covered[d.index()] += 1;
                    if self.face_of(d) != f.id {
                        return Err(format!("dart {d:?} mislabelled"));
                    }
                    if self.next_in_face(d) != w[(i + 1) % w.len()] {
                        return Err(format!("walk of face {} broken at {d:?}", f.id));
                    }
                }
            }
        }
        if covered.iter().any(|&c| c != 1) {
            return Err("faces do not partition the darts".into());
        }
        let total: usize = self.faces.iter().map(Face::len).sum();
        if total != darts {
            return Err(format!("face lengths sum to {total}, expected {darts}"));
        }
        if self.euler_defect() != 1 {
            return Err(format!(
                "Euler's formula fails (defect {})",
                self.euler_defect()
            ));
        }
        Ok(())
    }
}

fn validate_rotation(
    n: usize,
    edges: &[[VertexId; 2]],
    rot: &[Vec<Dart>],
) -> Result<(), EmbedError> {
    if rot.len() != n {
        return Err(EmbedError::MalformedRotation(format!(
            "expected {n} rotation lists, got {}",
            rot.len()
        )));
    }
    let mut seen = vec![false; 2 * edges.len()];
    for (v, list) in rot.iter().enumerate() {
        for &d in list {
            if d.index() >= seen.len() {
                return Err(EmbedError::MalformedRotation(format!(
                    "unknown dart {d:?} at vertex {v}"
                )));
            }
            if edges[d.edge()][d.end()] != v {
                return Err(EmbedError::MalformedRotation(format!(
                    "dart {d:?} does not leave vertex {v}"
                )));
            }
            if std::mem::replace(&mut seen[d.index()], true) {
                return Err(EmbedError::MalformedRotation(format!(
                    "dart {d:?} listed twice"
                )));
            }
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(EmbedError::MalformedRotation(format!(
            "dart {:?} missing",
            Dart(i)
        )));
    }
    Ok(())
}
