//! Exact disjoint paths by dynamic programming over a nice tree decomposition.
//!
//! A partial solution below a node is a set of already-decided edges forming
//! vertex-disjoint path fragments. Edges are decided at the `Forget` node of
//! their first-forgotten endpoint. The profile records one slot per bag
//! vertex:
//!
//! * `FREE`: no decided edge touches the vertex;
//! * `SAT`: the vertex is finished (a non-terminal with two edges or a
//!   terminal with one);
//! * `REQ + i`: a non-terminal fragment end whose other end is a terminal of
//!   request `i`;
//! * `mate(v)`: a non-terminal fragment end whose other end is bag vertex `v`.
//!
//! A forgotten vertex must be finished or untouched, so every fragment end
//! not in the bag is a terminal.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{simple_adjacency, verify_solution, Instance, Solution, SolutionError};
use crate::plane_graph::VertexId;
use crate::treewidth::{NiceKind, NiceTreeDecomposition};

pub const DEFAULT_STATE_LIMIT: usize = 20_000_000;

const FREE: u32 = 0;
const SAT: u32 = 1;
const REQ: u32 = 2;

type Profile = Box<[u32]>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DpError {
    #[error("decomposition is not a valid nice decomposition of the graph: {0}")]
    InvalidDecomposition(String),
    #[error("node {node} holds {profiles} profiles, above the cap of {cap}")]
    ProfileCapExceeded {
        node: usize,
        profiles: usize,
        cap: u128,
    },
    #[error("state tables exceed the limit of {limit} profiles")]
    ResourceLimit { limit: usize },
    #[error("reconstructed solution failed verification: {0}")]
    Reconstruction(#[from] SolutionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DpLimits {
    /// Total profiles kept over all tables.
    pub max_states: usize,
}

impl Default for DpLimits {
    fn default() -> Self {
        DpLimits {
            max_states: DEFAULT_STATE_LIMIT,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DpStats {
    pub width: usize,
    pub nodes: usize,
    pub total_profiles: usize,
    pub max_profiles: usize,
    /// `(w+1)^(w+1) * 4^k`, saturating.
    pub profile_cap: u128,
}

/// Per-bag profile cap `(w+1)^(w+1) * 4^k`.
pub fn profile_cap(width: usize, k: usize) -> u128 {
    let b = width as u128 + 1;
    let mut cap: u128 = 1;
    for _ in 0..=width {
        cap = cap.saturating_mul(b);
    }
    for _ in 0..k {
        cap = cap.saturating_mul(4);
    }
    cap
}

#[derive(Clone, Debug)]
enum Back {
    Leaf,
    One {
        child: usize,
    },
    /// `edges` are the other endpoints of the edges chosen at the forgotten vertex.
    Forget {
        child: usize,
        edges: Vec<VertexId>,
    },
    Join {
        left: usize,
        right: usize,
    },
}

struct Table {
    profiles: Vec<Profile>,
    backs: Vec<Back>,
}

impl Table {
    fn from_map(map: BTreeMap<Profile, Back>) -> Table {
        let (profiles, backs) = map.into_iter().unzip();
        Table { profiles, backs }
    }
}

struct Ctx<'a> {
    inst: &'a Instance,
    adj: Vec<Vec<VertexId>>,
    mate_base: u32,
}

impl Ctx<'_> {
    fn request(&self, v: VertexId) -> Option<u32> {
        self.inst.role(v).map(|(i, _)| i as u32)
    }

    fn mate(&self, v: VertexId) -> u32 {
        self.mate_base + v as u32
    }

    fn mate_of(&self, slot: u32) -> Option<VertexId> {
        (slot >= self.mate_base).then(|| (slot - self.mate_base) as VertexId)
    }

    /// Edges already decided at `v`, from its slot.
    fn degree(&self, v: VertexId, slot: u32) -> usize {
        match (slot, self.inst.is_terminal(v)) {
            (FREE, _) => 0,
            (SAT, true) => 1,
            (SAT, false) => 2,
            _ => 1,
        }
    }

    /// Adds edge `a`-`b` between bag vertices; `false` if that breaks a rule.
    fn add_edge(&self, bag: &[VertexId], p: &mut [u32], a: VertexId, b: VertexId) -> bool {
        enum Far {
            Closed(u32),
            Open(VertexId),
        }
        let pos = |v: VertexId| bag.binary_search(&v).expect("endpoint in bag");
        let (pa, pb) = (pos(a), pos(b));
        if self.mate_of(p[pa]) == Some(b) {
            return false;
        }
        let mut far = |x: VertexId, px: usize| -> Option<Far> {
            let slot = p[px];
            let out = match slot {
                FREE => match self.request(x) {
                    Some(i) => Far::Closed(i),
                    None => return Some(Far::Open(x)),
                },
                SAT => return None,
                s => match self.mate_of(s) {
                    Some(y) => Far::Open(y),
                    None => Far::Closed(s - REQ),
                },
            };
            p[px] = SAT;
            Some(out)
        };
        let (Some(fa), Some(fb)) = (far(a, pa), far(b, pb)) else {
            return false;
        };
        match (fa, fb) {
            (Far::Closed(i), Far::Closed(j)) => i == j,
            (Far::Closed(i), Far::Open(y)) | (Far::Open(y), Far::Closed(i)) => {
                p[pos(y)] = REQ + i;
                true
            }
            (Far::Open(y), Far::Open(z)) => {
                p[pos(y)] = self.mate(z);
                p[pos(z)] = self.mate(y);
                true
            }
        }
    }

    /// Merges profiles of two subtrees sharing `bag`.
    fn join(&self, bag: &[VertexId], a: &[u32], b: &[u32]) -> Option<Profile> {
        let n = bag.len();
        let pos = |v: VertexId| bag.binary_search(&v).expect("mate in bag");
        let mut out = vec![FREE; n];
        // handles 0..n are bag positions, n.. are terminal tokens
        let mut parent: Vec<usize> = (0..n).collect();
        let mut token_req: Vec<u32> = Vec::new();
        let mut link_deg: Vec<u8> = vec![0; n];
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for x in 0..n {
            let (sa, sb) = (a[x], b[x]);
            let v = bag[x];
            if sa != FREE && sb != FREE && (sa == SAT || sb == SAT || self.inst.is_terminal(v)) {
                return None;
            }
            out[x] = if sa == SAT || sb == SAT { SAT } else { FREE };
        }
        for side in [a, b] {
            for x in 0..n {
                let s = side[x];
                if s == FREE || s == SAT {
                    continue;
                }
                let other = match self.mate_of(s) {
                    Some(y) => {
                        let py = pos(y);
                        if py < x {
                            continue;
                        }
                        py
                    }
                    None => {
                        token_req.push(s - REQ);
                        parent.push(parent.len());
                        link_deg.push(0);
                        parent.len() - 1
                    }
                };
                let (rx, ro) = (find(&mut parent, x), find(&mut parent, other));
                if rx == ro {
                    return None;
                }
                parent[rx] = ro;
                link_deg[x] += 1;
                link_deg[other] += 1;
            }
        }
        // ends of each merged fragment, by root
        let mut ends: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for h in 0..parent.len() {
            if link_deg[h] == 1 {
                let r = find(&mut parent, h);
                ends.entry(r).or_default().push(h);
            } else if h < n && link_deg[h] == 2 {
                out[h] = SAT;
            }
        }
        for pair in ends.values() {
            let &[x, y] = pair.as_slice() else {
                unreachable!("fragments are paths with two ends");
            };
            match (x < n, y < n) {
                (true, true) => {
                    out[x] = self.mate(bag[y]);
                    out[y] = self.mate(bag[x]);
                }
                (true, false) => out[x] = REQ + token_req[y - n],
                (false, true) => out[y] = REQ + token_req[x - n],
                (false, false) => {
                    if token_req[x - n] != token_req[y - n] {
                        return None;
                    }
                }
            }
        }
        Some(out.into_boxed_slice())
    }
}

/// Bitmasks of finished and touched positions, for join pre-filtering.
fn masks(p: &[u32]) -> (u64, u64) {
    let mut sat = 0u64;
    let mut touched = 0u64;
    for (x, &s) in p.iter().enumerate() {
        if s == SAT {
            sat |= 1 << x;
        }
        if s != FREE {
            touched |= 1 << x;
        }
    }
    (sat, touched)
}

/// Solves `inst` over `nice`; see [`solve_dp_with`].
pub fn solve_dp(
    inst: &Instance,
    nice: &NiceTreeDecomposition,
) -> Result<Option<Solution>, DpError> {
    solve_dp_with(inst, nice, DpLimits::default()).map(|(s, _)| s)
}

/// Returns a solution iff one exists, plus table statistics. Among several
/// derivations of a profile the first in (child profile, edge choice) order
/// is kept, which makes the result deterministic.
pub fn solve_dp_with(
    inst: &Instance,
    nice: &NiceTreeDecomposition,
    limits: DpLimits,
) -> Result<(Option<Solution>, DpStats), DpError> {
    let adj = simple_adjacency(&inst.graph);
    nice.check_shape().map_err(DpError::InvalidDecomposition)?;
    nice.to_decomposition()
        .check(&adj)
        .map_err(DpError::InvalidDecomposition)?;
    let width = nice.width();
    let k = inst.k();
    let cap = profile_cap(width, k);
    let mut stats = DpStats {
        width,
        nodes: nice.len(),
        profile_cap: cap,
        ..DpStats::default()
    };
    if k == 0 {
        return Ok((Some(Solution::default()), stats));
    }
    if nice.nodes.iter().any(|x| x.bag.len() > 64) {
        return Err(DpError::ResourceLimit {
            limit: limits.max_states,
        });
    }
    let ctx = Ctx {
        inst,
        adj,
        mate_base: REQ + k as u32,
    };

    let mut tables: Vec<Table> = Vec::with_capacity(nice.len());
    for (t, node) in nice.nodes.iter().enumerate() {
        let mut map: BTreeMap<Profile, Back> = BTreeMap::new();
        match node.kind {
            NiceKind::Leaf => {
                map.insert(Box::new([]), Back::Leaf);
            }
            NiceKind::Introduce(v) => {
                let c = node.children[0];
                let at = node
                    .bag
                    .binary_search(&v)
                    .expect("introduced vertex in bag");
                for (i, p) in tables[c].profiles.iter().enumerate() {
                    let mut q = p.to_vec();
                    q.insert(at, FREE);
                    map.entry(q.into_boxed_slice())
                        .or_insert(Back::One { child: i });
                }
            }
            NiceKind::Forget(u) => {
                let c = node.children[0];
                let child_bag = &nice.nodes[c].bag;
                let at = child_bag
                    .binary_search(&u)
                    .expect("forgotten vertex in child bag");
                let nbrs: Vec<VertexId> = ctx.adj[u]
                    .iter()
                    .copied()
                    .filter(|w| child_bag.binary_search(w).is_ok())
                    .collect();
                let terminal = inst.is_terminal(u);
                for (i, p) in tables[c].profiles.iter().enumerate() {
                    let deg = ctx.degree(u, p[at]);
                    // edges still needed so that u ends untouched or finished
                    let wanted: &[usize] = match (terminal, deg) {
                        (true, 0) => &[1],
                        (true, _) => &[0],
                        (false, 0) => &[0, 2],
                        (false, 1) => &[1],
                        (false, _) => &[0],
                    };
                    for &count in wanted {
                        for_each_subset(&nbrs, count, |chosen| {
                            let mut q = p.to_vec();
                            if chosen
                                .iter()
                                .all(|&w| ctx.add_edge(child_bag, &mut q, u, w))
                            {
                                debug_assert!(q[at] == SAT || (count == 0 && q[at] == FREE));
                                q.remove(at);
                                map.entry(q.into_boxed_slice())
                                    .or_insert_with(|| Back::Forget {
                                        child: i,
                                        edges: chosen.to_vec(),
                                    });
                            }
                        });
                    }
                }
            }
            NiceKind::Join => {
                let (l, r) = (node.children[0], node.children[1]);
                let mut groups: BTreeMap<(u64, u64), Vec<usize>> = BTreeMap::new();
                for (j, p) in tables[r].profiles.iter().enumerate() {
                    groups.entry(masks(p)).or_default().push(j);
                }
                for (i, pa) in tables[l].profiles.iter().enumerate() {
                    let (sat_a, touched_a) = masks(pa);
                    for (&(sat_b, touched_b), members) in &groups {
                        if sat_a & touched_b != 0 || sat_b & touched_a != 0 {
                            continue;
                        }
                        for &j in members {
                            if let Some(q) = ctx.join(&node.bag, pa, &tables[r].profiles[j]) {
                                map.entry(q).or_insert(Back::Join { left: i, right: j });
                            }
                        }
                    }
                }
            }
        }
        stats.total_profiles += map.len();
        stats.max_profiles = stats.max_profiles.max(map.len());
        if map.len() as u128 > cap {
            return Err(DpError::ProfileCapExceeded {
                node: t,
                profiles: map.len(),
                cap,
            });
        }
        if stats.total_profiles > limits.max_states {
            return Err(DpError::ResourceLimit {
                limit: limits.max_states,
            });
        }
        tables.push(Table::from_map(map));
    }

    let root = nice.root();
    let Some(entry) = tables[root].profiles.iter().position(|p| p.is_empty()) else {
        return Ok((None, stats));
    };
    let solution = reconstruct(inst, nice, &tables, root, entry);
    verify_solution(inst, &solution)?;
    Ok((Some(solution), stats))
}

/// Calls `f` on every `count`-subset of `items` in lexicographic order.
fn for_each_subset(items: &[VertexId], count: usize, mut f: impl FnMut(&[VertexId])) {
    match count {
        0 => f(&[]),
        1 => items.iter().for_each(|&a| f(&[a])),
        2 => {
            for (i, &a) in items.iter().enumerate() {
                for &b in &items[i + 1..] {
                    f(&[a, b]);
                }
            }
        }
        _ => unreachable!("at most two edges are chosen per vertex"),
    }
}

fn reconstruct(
    inst: &Instance,
    nice: &NiceTreeDecomposition,
    tables: &[Table],
    root: usize,
    entry: usize,
) -> Solution {
    let n = inst.graph.vertex_count();
    let mut chosen: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    let mut stack = vec![(root, entry)];
    while let Some((t, e)) = stack.pop() {
        let node = &nice.nodes[t];
        match &tables[t].backs[e] {
            Back::Leaf => {}
            Back::One { child } => stack.push((node.children[0], *child)),
            Back::Forget { child, edges } => {
                let NiceKind::Forget(u) = node.kind else {
                    unreachable!("edges are chosen at forget nodes")
                };
                for &w in edges {
                    chosen[u].push(w);
                    chosen[w].push(u);
                }
                stack.push((node.children[0], *child));
            }
            Back::Join { left, right } => {
                stack.push((node.children[0], *left));
                stack.push((node.children[1], *right));
            }
        }
    }
    let paths = inst
        .pairs()
        .iter()
        .map(|&(s, t)| {
            let mut path = vec![s];
            let mut prev = usize::MAX;
            let mut cur = s;
            while cur != t {
                let next = chosen[cur].iter().copied().find(|&w| w != prev);
                let Some(next) = next else { break };
                prev = cur;
                cur = next;
                path.push(cur);
                if path.len() > n {
                    break;
                }
            }
            path
        })
        .collect();
    Solution { paths }
}
