use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{Instance, InstanceError};
use crate::plane_graph::{Dart, PlaneGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("grid must have at least 2 rows and 2 columns, got {rows}x{cols}")]
    GridTooSmall { rows: usize, cols: usize },
    #[error("terminal ({0}, {1}) is not a grid vertex")]
    InvalidTerminal(usize, usize),
    #[error("need n >= 2k + 2, got n = {n}, k = {k}")]
    TooFewVertices { n: usize, k: usize },
    #[error("onion needs at least one ring of 3 or more vertices and room for {k} pairs, got {rings} rings of {ring_len}")]
    OnionTooSmall {
        rings: usize,
        ring_len: usize,
        k: usize,
    },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Vertex id of the 1-indexed grid cell `(row, col)`.
pub fn grid_vertex(cols: usize, row: usize, col: usize) -> VertexId {
    (row - 1) * cols + (col - 1)
}

/// A terminal pair of grid cells, each given as 1-based `(row, col)`.
pub type CellPair = ((usize, usize), (usize, usize));

/// `rows x cols` grid. Edges are numbered row-major, east edge before south
/// edge; each rotation lists neighbours north, east, south, west.
pub fn gen_grid(rows: usize, cols: usize, pairs: &[CellPair]) -> Result<Instance, GenError> {
    if rows < 2 || cols < 2 {
        return Err(GenError::GridTooSmall { rows, cols });
    }
    let n = rows * cols;
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    let mut east = vec![usize::MAX; n];
    let mut south = vec![usize::MAX; n];
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                east[id(r, c)] = edges.len();
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                south[id(r, c)] = edges.len();
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    let mut rotation = vec![Vec::new(); n];
    for r in 0..rows {
        for c in 0..cols {
            let rot = &mut rotation[id(r, c)];
            if r > 0 {
                rot.push(Dart::new(south[id(r - 1, c)], 1));
            }
            if c + 1 < cols {
                rot.push(Dart::new(east[id(r, c)], 0));
            }
            if r + 1 < rows {
                rot.push(Dart::new(south[id(r, c)], 0));
            }
            if c > 0 {
                rot.push(Dart::new(east[id(r, c - 1)], 1));
            }
        }
    }
    let graph = PlaneGraph::build(n, &edges, Some(rotation), Some(Dart::new(0, 0)))
        .map_err(InstanceError::from)?;
    let cell = |(r, c): (usize, usize)| {
        if (1..=rows).contains(&r) && (1..=cols).contains(&c) {
            Ok(grid_vertex(cols, r, c))
        } else {
            Err(GenError::InvalidTerminal(r, c))
        }
    };
    let pairs = pairs
        .iter()
        .map(|&(s, t)| Ok((cell(s)?, cell(t)?)))
        .collect::<Result<Vec<_>, GenError>>()?;
    Ok(Instance::new(graph, pairs)?)
}

type Point = (i64, i64);

fn orient(a: Point, b: Point, c: Point) -> i64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Proper crossing of two segments without shared endpoints; points are in
/// general position so touching cannot occur.
fn crosses(a: Point, b: Point, c: Point, d: Point) -> bool {
    orient(a, b, c).signum() * orient(a, b, d).signum() < 0
        && orient(c, d, a).signum() * orient(c, d, b).signum() < 0
}

fn random_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let span = (4 * n as i64).max(16);
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = (rng.gen_range(0..span), rng.gen_range(0..span));
        let clash = pts.contains(&p)
            || pts
                .iter()
                .enumerate()
                .any(|(i, &a)| pts[i + 1..].iter().any(|&b| orient(a, b, p) == 0));
        if !clash {
            pts.push(p);
        }
    }
    pts
}

fn connected(n: usize, edges: &[(usize, usize)], alive: &[bool]) -> bool {
    let mut adj = vec![Vec::new(); n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        if alive[e] {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == n
}

/// Rotation of a straight-line drawing: clockwise is decreasing angle with
/// the y axis pointing up.
fn straight_line_rotation(edges: &[(usize, usize)], coords: &[(f64, f64)]) -> Vec<Vec<Dart>> {
    let angle = |a: usize, b: usize| (coords[b].1 - coords[a].1).atan2(coords[b].0 - coords[a].0);
    let mut rotation: Vec<Vec<(f64, Dart)>> = vec![Vec::new(); coords.len()];
    for (e, &(u, v)) in edges.iter().enumerate() {
        rotation[u].push((angle(u, v), Dart::new(e, 0)));
        rotation[v].push((angle(v, u), Dart::new(e, 1)));
    }
    rotation
        .into_iter()
        .map(|mut r| {
            r.sort_by(|a, b| b.0.total_cmp(&a.0));
            r.into_iter().map(|(_, d)| d).collect()
        })
        .collect()
}

/// Seeded random connected plane graph: a greedy triangulation of random
/// points in general position, thinned by random edge deletions that keep
/// the graph connected, with `k` random terminal pairs on distinct vertices.
pub fn gen_random_planar(n: usize, k: usize, seed: u64) -> Result<Instance, GenError> {
    if n < 2 * k + 2 {
        return Err(GenError::TooFewVertices { n, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = random_points(n, &mut rng);

    let mut candidates: Vec<(i64, usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .map(|(u, v)| {
            let (dx, dy) = (pts[u].0 - pts[v].0, pts[u].1 - pts[v].1);
            (dx * dx + dy * dy, u, v)
        })
        .collect();
    candidates.sort_unstable();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (_, u, v) in candidates {
        let free = edges.iter().all(|&(a, b)| {
            a == u || a == v || b == u || b == v || !crosses(pts[u], pts[v], pts[a], pts[b])
        });
        if free {
            edges.push((u, v));
        }
    }

    let keep_ratio = rng.gen_range(0.45..1.0);
    let mut alive = vec![true; edges.len()];
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.shuffle(&mut rng);
    for e in order {
        if rng.gen_bool(1.0 - keep_ratio) {
            alive[e] = false;
            if !connected(n, &edges, &alive) {
                alive[e] = true;
            }
        }
    }
    let edges: Vec<(usize, usize)> = edges
        .into_iter()
        .zip(alive)
        .filter_map(|(e, a)| a.then_some(e))
        .collect();

    let coords: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x as f64, y as f64)).collect();
    let rotation = straight_line_rotation(&edges, &coords);
    let graph = PlaneGraph::build(n, &edges, Some(rotation), None).map_err(InstanceError::from)?;

    let mut verts: Vec<VertexId> = (0..n).collect();
    verts.shuffle(&mut rng);
    let pairs = verts[..2 * k].chunks(2).map(|c| (c[0], c[1])).collect();
    Ok(Instance::new(graph, pairs)?)
}

/// Centre vertex 0 inside `rings` nested cycles of `ring_len` vertices,
/// consecutive rings joined by spokes and some random diagonals, with `2k`
/// pendant terminals hanging off the outermost ring.
pub fn gen_onion(rings: usize, ring_len: usize, k: usize, seed: u64) -> Result<Instance, GenError> {
    if rings == 0 || ring_len < 3 || ring_len < 2 * k {
        return Err(GenError::OnionTooSmall { rings, ring_len, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ring = |j: usize, i: usize| 1 + (j - 1) * ring_len + i % ring_len;
    let step = std::f64::consts::TAU / ring_len as f64;
    let mut coords = vec![(0.0, 0.0)];
    for j in 1..=rings {
        coords.extend((0..ring_len).map(|i| {
            let a = step * i as f64;
            (j as f64 * a.cos(), j as f64 * a.sin())
        }));
    }
    let mut edges = Vec::new();
    for i in 0..ring_len {
        edges.push((0, ring(1, i)));
    }
    for j in 1..=rings {
        for i in 0..ring_len {
            edges.push((ring(j, i), ring(j, i + 1)));
            if j < rings {
                edges.push((ring(j, i), ring(j + 1, i)));
                if rng.gen_bool(0.3) {
                    edges.push((ring(j, i), ring(j + 1, i + 1)));
                }
            }
        }
    }
    let mut spots: Vec<usize> = (0..ring_len).collect();
    spots.shuffle(&mut rng);
    let mut pendants = Vec::new();
    for &i in &spots[..2 * k] {
        let v = coords.len();
        let a = step * i as f64;
        let r = rings as f64 + 1.0;
        coords.push((r * a.cos(), r * a.sin()));
        edges.push((ring(rings, i), v));
        pendants.push(v);
    }
    let rotation = straight_line_rotation(&edges, &coords);
    let graph = PlaneGraph::build(coords.len(), &edges, Some(rotation), None)
        .map_err(InstanceError::from)?;
    pendants.shuffle(&mut rng);
    let pairs = pendants.chunks(2).map(|c| (c[0], c[1])).collect();
    Ok(Instance::new(graph, pairs)?)
}
