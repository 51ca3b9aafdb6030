//! Disjoint-paths instances, solutions and their verification.

mod format;
mod generate;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_graph::{EmbedError, PlaneGraph, VertexId};

pub use format::{
    parse_instance, parse_solution, serialize_instance, serialize_solution, ParseError,
};
pub use generate::{gen_grid, gen_onion, gen_random_planar, grid_vertex, CellPair, GenError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("terminal {vertex} of pair {pair} is not a vertex")]
    TerminalOutOfRange { pair: usize, vertex: VertexId },
    #[error("vertex {0} is used as a terminal more than once")]
    TerminalReused(VertexId),
    #[error("edge {0} is a loop")]
    Loop(usize),
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

/// Which end of a request a terminal is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Source,
    Sink,
}

/// A Disjoint Paths instance: a plane graph and `k` terminal pairs
/// `(s_i, t_i)`; the bijection S -> T is given by the pair index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: PlaneGraph,
    pairs: Vec<(VertexId, VertexId)>,
    roles: Vec<Option<(usize, Side)>>,
}

impl Instance {
    pub fn new(
        graph: PlaneGraph,
        pairs: Vec<(VertexId, VertexId)>,
    ) -> Result<Instance, InstanceError> {
        let n = graph.vertex_count();
        if let Some(e) = graph.edges().iter().position(|e| e[0] == e[1]) {
            return Err(InstanceError::Loop(e));
        }
        let mut roles = vec![None; n];
        for (i, &(s, t)) in pairs.iter().enumerate() {
            for (v, side) in [(s, Side::Source), (t, Side::Sink)] {
                if v >= n {
                    return Err(InstanceError::TerminalOutOfRange { pair: i, vertex: v });
                }
                if roles[v].is_some() {
                    return Err(InstanceError::TerminalReused(v));
                }
                roles[v] = Some((i, side));
            }
        }
        Ok(Instance {
            graph,
            pairs,
            roles,
        })
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.pairs
    }

    pub fn source(&self, i: usize) -> VertexId {
        self.pairs[i].0
    }

    pub fn sink(&self, i: usize) -> VertexId {
        self.pairs[i].1
    }

    /// Request index and side if `v` is a terminal.
    pub fn role(&self, v: VertexId) -> Option<(usize, Side)> {
        self.roles.get(v).copied().flatten()
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.role(v).is_some()
    }

    pub fn terminals(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.pairs.iter().flat_map(|&(s, t)| [s, t])
    }

    /// Simple adjacency lists (parallel edges collapsed), sorted by vertex id.
    pub fn simple_adjacency(&self) -> Vec<Vec<VertexId>> {
        simple_adjacency(&self.graph)
    }
}

pub(crate) fn simple_adjacency(g: &PlaneGraph) -> Vec<Vec<VertexId>> {
    let mut adj = vec![Vec::new(); g.vertex_count()];
    for &[u, v] in g.edges() {
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// One path per request, path `i` running from `s_i` to `t_i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Solution {
    pub paths: Vec<Vec<VertexId>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolutionError {
    #[error("expected {expected} paths, got {got}")]
    WrongPathCount { expected: usize, got: usize },
    #[error("path {0} is empty")]
    EmptyPath(usize),
    #[error("path {path} has endpoints ({start}, {end}), expected ({want_start}, {want_end})")]
    WrongEndpoints {
        path: usize,
        start: VertexId,
        end: VertexId,
        want_start: VertexId,
        want_end: VertexId,
    },
    #[error("path {path} steps from {from} to {to}, which are not adjacent")]
    NotAdjacent {
        path: usize,
        from: VertexId,
        to: VertexId,
    },
    #[error("vertex {vertex} appears twice (paths {first} and {second})")]
    VertexReused {
        vertex: VertexId,
        first: usize,
        second: usize,
    },
    #[error("vertex {0} does not exist")]
    UnknownVertex(VertexId),
}

impl SolutionError {
    /// The same error with path and vertex ids shifted to the 1-based file numbering.
    pub fn one_based(self) -> Self {
        use SolutionError::*;
        match self {
            WrongPathCount { .. } => self,
            EmptyPath(p) => EmptyPath(p + 1),
            WrongEndpoints {
                path,
                start,
                end,
                want_start,
                want_end,
            } => WrongEndpoints {
                path: path + 1,
                start: start + 1,
                end: end + 1,
                want_start: want_start + 1,
                want_end: want_end + 1,
            },
            NotAdjacent { path, from, to } => NotAdjacent {
                path: path + 1,
                from: from + 1,
                to: to + 1,
            },
            VertexReused {
                vertex,
                first,
                second,
            } => VertexReused {
                vertex: vertex + 1,
                first: first + 1,
                second: second + 1,
            },
            UnknownVertex(v) => UnknownVertex(v + 1),
        }
    }
}

/// Checks that `solution` solves `instance`; the error names the first violation.
pub fn verify_solution(instance: &Instance, solution: &Solution) -> Result<(), SolutionError> {
    let k = instance.k();
    if solution.paths.len() != k {
        return Err(SolutionError::WrongPathCount {
            expected: k,
            got: solution.paths.len(),
        });
    }
    let n = instance.graph.vertex_count();
    let adj: Vec<HashSet<VertexId>> = instance
        .simple_adjacency()
        .into_iter()
        .map(|l| l.into_iter().collect())
        .collect();
    let mut owner = vec![usize::MAX; n];
    for (i, path) in solution.paths.iter().enumerate() {
        let (Some(&start), Some(&end)) = (path.first(), path.last()) else {
            return Err(SolutionError::EmptyPath(i));
        };
        if let Some(&v) = path.iter().find(|&&v| v >= n) {
            return Err(SolutionError::UnknownVertex(v));
        }
        let (s, t) = instance.pairs()[i];
        if start != s || end != t {
            return Err(SolutionError::WrongEndpoints {
                path: i,
                start,
                end,
                want_start: s,
                want_end: t,
            });
        }
        for w in path.windows(2) {
            if !adj[w[0]].contains(&w[1]) {
                return Err(SolutionError::NotAdjacent {
                    path: i,
                    from: w[0],
                    to: w[1],
                });
            }
        }
        for &v in path {
            if owner[v] != usize::MAX {
                return Err(SolutionError::VertexReused {
                    vertex: v,
                    first: owner[v],
                    second: i,
                });
            }
            owner[v] = i;
        }
    }
    Ok(())
}

pub fn is_valid_solution(instance: &Instance, solution: &Solution) -> bool {
    verify_solution(instance, solution).is_ok()
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_solution(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4(pairs: Vec<(usize, usize)>) -> Instance {
        let g = PlaneGraph::build(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], None, None).unwrap();
        Instance::new(g, pairs).unwrap()
    }

    #[test]
    fn valid_path_on_four_cycle() {
        let inst = c4(vec![(0, 2)]);
        assert!(is_valid_solution(
            &inst,
            &Solution {
                paths: vec![vec![0, 1, 2]]
            }
        ));
        assert!(is_valid_solution(
            &inst,
            &Solution {
                paths: vec![vec![0, 3, 2]]
            }
        ));
    }

    #[test]
    fn non_edge_step_rejected() {
        let inst = c4(vec![(0, 2)]);
        assert!(matches!(
            verify_solution(
                &inst,
                &Solution {
                    paths: vec![vec![0, 2]]
                }
            ),
            Err(SolutionError::NotAdjacent { .. })
        ));
    }

    #[test]
    fn shared_vertex_rejected() {
        let g = PlaneGraph::build(5, &[(0, 4), (4, 1), (2, 4), (4, 3)], None, None).unwrap();
        let inst = Instance::new(g, vec![(0, 1), (2, 3)]).unwrap();
        let sol = Solution {
            paths: vec![vec![0, 4, 1], vec![2, 4, 3]],
        };
        assert!(matches!(
            verify_solution(&inst, &sol),
            Err(SolutionError::VertexReused { vertex: 4, .. })
        ));
    }

    #[test]
    fn other_violations() {
        let inst = c4(vec![(0, 2)]);
        assert!(matches!(
            verify_solution(&inst, &Solution { paths: vec![] }),
            Err(SolutionError::WrongPathCount { .. })
        ));
        assert!(matches!(
            verify_solution(
                &inst,
                &Solution {
                    paths: vec![vec![2, 1, 0]]
                }
            ),
            Err(SolutionError::WrongEndpoints { .. })
        ));
        assert!(matches!(
            verify_solution(
                &inst,
                &Solution {
                    paths: vec![vec![0, 1, 0, 1, 2]]
                }
            ),
            Err(SolutionError::VertexReused { .. })
        ));
        assert!(matches!(
            verify_solution(
                &inst,
                &Solution {
                    paths: vec![vec![]]
                }
            ),
            Err(SolutionError::EmptyPath(0))
        ));
    }

    #[test]
    fn instance_invariants() {
        let g = PlaneGraph::build(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], None, None).unwrap();
        assert_eq!(
            Instance::new(g.clone(), vec![(0, 2), (1, 0)]),
            Err(InstanceError::TerminalReused(0))
        );
        assert!(matches!(
            Instance::new(g.clone(), vec![(0, 9)]),
            Err(InstanceError::TerminalOutOfRange { .. })
        ));
        let looped = PlaneGraph::build(2, &[(0, 1), (1, 1)], None, None).unwrap();
        assert_eq!(Instance::new(looped, vec![]), Err(InstanceError::Loop(1)));
        let inst = Instance::new(g, vec![(0, 2)]).unwrap();
        assert_eq!(inst.role(2), Some((0, Side::Sink)));
        assert_eq!(inst.role(1), None);
    }
}
