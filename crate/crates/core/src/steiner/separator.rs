use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{host_adjacency, tree_component, DegreeTwoPath, SteinerError, SteinerTree};
use crate::plane_graph::{EdgeId, PlaneGraph, VertexId};

pub const DEFAULT_D_NEAR: usize = 2;
pub const DEFAULT_D_FAR: usize = 8;

/// Which endpoint of a degree-2 path the cut distances are measured from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathEnd {
    First,
    Last,
}

/// Minimum vertex separator with a matching set of vertex-disjoint paths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separator {
    pub vertices: Vec<VertexId>,
    /// As many pairwise vertex-disjoint paths from the near side to the far side.
    pub paths: Vec<Vec<VertexId>>,
    pub near_side: BTreeSet<VertexId>,
    pub far_side: BTreeSet<VertexId>,
}

/// Separates the subtree holding the chosen end once the path vertex at
/// distance `d_near` from it is removed, from the subtree holding the other
/// end once the vertex at distance `d_far` is removed.
pub fn separator(
    tree: &SteinerTree,
    gr: &PlaneGraph,
    path: &DegreeTwoPath,
    end: PathEnd,
    d_near: usize,
    d_far: usize,
) -> Result<Separator, SteinerError> {
    let len = path.len();
    if !(d_near >= 1 && d_near < d_far && d_far < len) {
        return Err(SteinerError::PathTooShort { len, d_near, d_far });
    }
    let adj = tree.adjacency(gr);
    let on_tree = path.edges.iter().all(|e| tree.edges.contains(e));
    let inner_degree_two = path.vertices[1..len]
        .iter()
        .all(|v| adj.get(v).map_or(0, Vec::len) == 2);
    if !on_tree || !inner_degree_two {
        return Err(SteinerError::NotATreePath);
    }
    let (vertices, edges): (Vec<VertexId>, Vec<EdgeId>) = match end {
        PathEnd::First => (path.vertices.clone(), path.edges.clone()),
        PathEnd::Last => (
            path.vertices.iter().rev().copied().collect(),
            path.edges.iter().rev().copied().collect(),
        ),
    };
    // removing the inner vertex at distance d removes path edges d-1 and d
    let without = |d: usize| -> BTreeSet<EdgeId> { [edges[d - 1], edges[d]].into_iter().collect() };
    let near_side = tree_component(&adj, vertices[0], &without(d_near));
    let far_side = tree_component(&adj, vertices[len], &without(d_far));
    let (cut, paths) = min_vertex_cut(gr, &near_side, &far_side);
    Ok(Separator {
        vertices: cut,
        paths,
        near_side,
        far_side,
    })
}

const INF: i32 = i32::MAX / 2;

struct Network {
    head: Vec<usize>,
    cap: Vec<i32>,
    out: Vec<Vec<usize>>,
}

impl Network {
    fn new(nodes: usize) -> Network {
        Network {
            head: Vec::new(),
            cap: Vec::new(),
            out: vec![Vec::new(); nodes],
        }
    }

    /// Arc `a` and its residual twin `a ^ 1`.
    fn arc(&mut self, from: usize, to: usize, cap: i32) {
        self.out[from].push(self.head.len());
        self.head.push(to);
        self.cap.push(cap);
        self.out[to].push(self.head.len());
        self.head.push(from);
        self.cap.push(0);
    }

    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut via: Vec<Option<usize>> = vec![None; self.out.len()];
        let mut seen = vec![false; self.out.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &a in &self.out[x] {
                let y = self.head[a];
                if self.cap[a] > 0 && !seen[y] {
                    seen[y] = true;
                    via[y] = Some(a);
                    if y == t {
                        let mut cur = t;
                        while let Some(a) = via[cur] {
                            self.cap[a] -= 1;
                            self.cap[a ^ 1] += 1;
                            cur = self.head[a ^ 1];
                        }
                        return true;
                    }
                    queue.push_back(y);
                }
            }
        }
        false
    }

    fn residual_reach(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.out.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &a in &self.out[x] {
                let y = self.head[a];
                if self.cap[a] > 0 && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }
}

/// Smallest vertex set meeting every path from `from` to `to` (vertices of
/// either set may be chosen), plus as many vertex-disjoint such paths.
pub(crate) fn min_vertex_cut(
    g: &PlaneGraph,
    from: &BTreeSet<VertexId>,
    to: &BTreeSet<VertexId>,
) -> (Vec<VertexId>, Vec<Vec<VertexId>>) {
    let n = g.vertex_count();
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = Network::new(2 * n + 2);
    let mut split_arc = vec![0; n];
    for (v, arc) in split_arc.iter_mut().enumerate() {
        *arc = net.head.len();
        net.arc(2 * v, 2 * v + 1, 1);
    }
    for (v, list) in host_adjacency(g).iter().enumerate() {
        for &(w, _) in list {
            net.arc(2 * v + 1, 2 * w, INF);
        }
    }
    for &a in from {
        net.arc(s, 2 * a, INF);
    }
    for &b in to {
        net.arc(2 * b + 1, t, INF);
    }
    while net.augment(s, t) {}

    let reach = net.residual_reach(s);
    let cut: Vec<VertexId> = (0..n)
        .filter(|&v| reach[2 * v] && !reach[2 * v + 1])
        .collect();

    // peel unit paths off the flow; an arc carries flow when its twin has residual
    let mut used = vec![0i32; net.head.len()];
    let mut paths = Vec::new();
    for &a in from {
        if net.cap[split_arc[a] ^ 1] == 0 {
            continue;
        }
        let mut path = vec![a];
        let mut node = 2 * a + 1;
        while node != t {
            let next = net.out[node]
                .iter()
                .copied()
                .find(|&arc| arc % 2 == 0 && net.cap[arc ^ 1] - used[arc] > 0)
                .expect("flow is conserved");
            used[next] += 1;
            let y = net.head[next];
            if y == t {
                break;
            }
            // y is an in-node; move through its split arc
            path.push(y / 2);
            node = y + 1;
        }
        paths.push(path);
    }
    (cut, paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::gen_random_planar;
    use crate::plane_graph::tests::cycle;
    use crate::steiner::degree2_paths;

    /// Smallest separating set by trying all subsets in size order.
    fn brute_force_cut(g: &PlaneGraph, from: &BTreeSet<usize>, to: &BTreeSet<usize>) -> usize {
        let n = g.vertex_count();
        let adj = host_adjacency(g);
        let separates = |mask: u32| {
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = from
                .iter()
                .copied()
                .filter(|&a| mask & (1 << a) == 0)
                .collect();
            for &a in &stack {
                seen[a] = true;
            }
            while let Some(x) = stack.pop() {
                if to.contains(&x) {
                    return false;
                }
                for &(w, _) in &adj[x] {
                    if !seen[w] && mask & (1 << w) == 0 {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            true
        };
        (0u32..1 << n)
            .filter(|&m| separates(m))
            .map(u32::count_ones)
            .min()
            .unwrap() as usize
    }

    fn check_certificate(g: &PlaneGraph, from: &BTreeSet<usize>, to: &BTreeSet<usize>) -> usize {
        let (cut, paths) = min_vertex_cut(g, from, to);
        assert_eq!(cut.len(), paths.len());
        let mut seen = BTreeSet::new();
        for p in &paths {
            assert!(from.contains(&p[0]) && to.contains(p.last().unwrap()));
            for w in p.windows(2) {
                assert!(g.dart_between(w[0], w[1]).is_some());
            }
            for &v in p {
                assert!(seen.insert(v), "paths share {v}");
            }
            assert_eq!(p.iter().filter(|v| cut.contains(v)).count(), 1);
        }
        cut.len()
    }

    #[test]
    fn path_graph_single_cut_vertex() {
        let edges: Vec<(usize, usize)> = (0..11).map(|i| (i, i + 1)).collect();
        let g = PlaneGraph::build(12, &edges, None, None).unwrap();
        let tree = SteinerTree {
            edges: (0..11).collect(),
        };
        let path = degree2_paths(&tree, &g).remove(0);
        let sep = separator(&tree, &g, &path, PathEnd::First, 2, 8).unwrap();
        assert_eq!(sep.vertices.len(), 1);
        assert!((1..=9).contains(&sep.vertices[0]));
        assert_eq!(sep.near_side, BTreeSet::from([0, 1]));
        assert_eq!(sep.far_side, BTreeSet::from([9, 10, 11]));
        let back = separator(&tree, &g, &path, PathEnd::Last, 2, 8).unwrap();
        assert_eq!(back.near_side, BTreeSet::from([10, 11]));
    }

    #[test]
    fn three_disjoint_connections() {
        // near side 0-1-2 and far side 3-4-5, joined by three two-edge paths
        let edges = [
            (0, 1),
            (1, 2),
            (3, 4),
            (4, 5),
            (0, 6),
            (6, 3),
            (1, 7),
            (7, 4),
            (2, 8),
            (8, 5),
        ];
        let g = PlaneGraph::build(9, &edges, None, None).unwrap();
        let from = BTreeSet::from([0, 1, 2]);
        let to = BTreeSet::from([3, 4, 5]);
        assert_eq!(check_certificate(&g, &from, &to), 3);
        assert_eq!(brute_force_cut(&g, &from, &to), 3);
    }

    #[test]
    fn too_short_paths_rejected() {
        let g = cycle(6);
        let tree = SteinerTree {
            edges: (0..5).collect(),
        };
        let path = degree2_paths(&tree, &g).remove(0);
        assert_eq!(
            separator(&tree, &g, &path, PathEnd::First, 2, 8),
            Err(SteinerError::PathTooShort {
                len: 5,
                d_near: 2,
                d_far: 8
            })
        );
        assert!(separator(&tree, &g, &path, PathEnd::First, 0, 3).is_err());
        assert!(separator(&tree, &g, &path, PathEnd::First, 1, 3).is_ok());
    }

    #[test]
    fn cut_matches_brute_force_on_random_graphs() {
        for seed in 0..40u64 {
            let g = gen_random_planar(11, 0, seed).unwrap().graph;
            let from: BTreeSet<usize> = [0, (seed as usize % 3) + 1].into_iter().collect();
            let to: BTreeSet<usize> = [10, 9 - (seed as usize % 2)].into_iter().collect();
            assert_eq!(
                check_certificate(&g, &from, &to),
                brute_force_cut(&g, &from, &to),
                "seed {seed}"
            );
        }
    }
}
