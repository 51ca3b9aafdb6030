//! Left-right planarity test with embedding extraction.
//!
//! Runs on the underlying simple graph; parallel edges are re-inserted as
//! consecutive bundles and loops as adjacent dart pairs afterwards.

use std::collections::{BTreeMap, HashMap};

use super::{Dart, VertexId};

type E = usize;

#[derive(Clone, Copy, Default, Debug)]
struct Interval {
    low: Option<E>,
    high: Option<E>,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy, Debug)]
struct ConflictPair {
    id: usize,
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct LrState {
    n: usize,
    // oriented simple edges
    tail: Vec<VertexId>,
    head: Vec<VertexId>,
    adj: Vec<Vec<VertexId>>,
    oriented: HashMap<(VertexId, VertexId), E>,
    out_edges: Vec<Vec<E>>,
    roots: Vec<VertexId>,
    height: Vec<usize>,
    parent_edge: Vec<Option<E>>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<i64>,
    ordered: Vec<Vec<E>>,
    reference: Vec<Option<E>>,
    side: Vec<i64>,
    stack: Vec<ConflictPair>,
    next_pair: usize,
    stack_bottom: Vec<Option<usize>>,
    lowpt_edge: Vec<Option<E>>,
    left_ref: Vec<VertexId>,
    right_ref: Vec<VertexId>,
    emb: Embedding,
}

const NONE: usize = usize::MAX;

/// Half-edge embedding with clockwise/counter-clockwise links.
#[derive(Default)]
struct Embedding {
    links: HashMap<(VertexId, VertexId), (VertexId, VertexId)>,
    first: HashMap<VertexId, VertexId>,
}

impl Embedding {
    fn add_half_edge_cw(&mut self, v: VertexId, w: VertexId, reference: Option<VertexId>) {
        match reference {
            None => {
                self.links.insert((v, w), (w, w));
                self.first.insert(v, w);
            }
            Some(r) => {
                let cw_ref = self.links[&(v, r)].0;
                self.links.get_mut(&(v, r)).unwrap().0 = w;
                self.links.insert((v, w), (cw_ref, r));
                self.links.get_mut(&(v, cw_ref)).unwrap().1 = w;
            }
        }
    }

    fn add_half_edge_ccw(&mut self, v: VertexId, w: VertexId, reference: Option<VertexId>) {
        match reference {
            None => self.add_half_edge_cw(v, w, None),
            Some(r) => {
                let ccw_ref = self.links[&(v, r)].1;
                self.add_half_edge_cw(v, w, Some(ccw_ref));
                if self.first.get(&v) == Some(&r) {
                    self.first.insert(v, w);
                }
            }
        }
    }

    fn add_half_edge_first(&mut self, v: VertexId, w: VertexId) {
        let reference = self.first.get(&v).copied();
        self.add_half_edge_ccw(v, w, reference);
    }

    fn cyclic_order(&self, v: VertexId) -> Vec<VertexId> {
        let Some(&start) = self.first.get(&v) else {
            return Vec::new();
        };
        let mut out = vec![start];
        let mut cur = self.links[&(v, start)].0;
        while cur != start {
            out.push(cur);
            cur = self.links[&(v, cur)].0;
        }
        out
    }
}

impl LrState {
    fn new(n: usize, adj: Vec<Vec<VertexId>>) -> Self {
        LrState {
            n,
            tail: Vec::new(),
            head: Vec::new(),
            adj,
            oriented: HashMap::new(),
            out_edges: vec![Vec::new(); n],
            roots: Vec::new(),
            height: vec![NONE; n],
            parent_edge: vec![None; n],
            lowpt: Vec::new(),
            lowpt2: Vec::new(),
            nesting_depth: Vec::new(),
            ordered: vec![Vec::new(); n],
            reference: Vec::new(),
            side: Vec::new(),
            stack: Vec::new(),
            next_pair: 0,
            stack_bottom: Vec::new(),
            lowpt_edge: Vec::new(),
            left_ref: vec![NONE; n],
            right_ref: vec![NONE; n],
            emb: Embedding::default(),
        }
    }

    fn orient(&mut self, v: VertexId, w: VertexId) -> E {
        let e = self.tail.len();
        self.tail.push(v);
        self.head.push(w);
        self.oriented.insert((v, w), e);
        self.out_edges[v].push(e);
        self.lowpt.push(0);
        self.lowpt2.push(0);
        self.nesting_depth.push(0);
        self.reference.push(None);
        self.side.push(1);
        self.stack_bottom.push(None);
        self.lowpt_edge.push(None);
        e
    }

    fn dfs_orientation(&mut self, v: VertexId) {
        let e = self.parent_edge[v];
        let nbrs = self.adj[v].clone();
        for w in nbrs {
            if self.oriented.contains_key(&(v, w)) || self.oriented.contains_key(&(w, v)) {
                continue;
            }
            let vw = self.orient(v, w);
            self.lowpt[vw] = self.height[v];
            self.lowpt2[vw] = self.height[v];
            if self.height[w] == NONE {
                self.parent_edge[w] = Some(vw);
                self.height[w] = self.height[v] + 1;
                self.dfs_orientation(w);
            } else {
                self.lowpt[vw] = self.height[w];
            }
            self.nesting_depth[vw] = 2 * self.lowpt[vw] as i64;
            if self.lowpt2[vw] < self.height[v] {
                self.nesting_depth[vw] += 1;
            }
            if let Some(e) = e {
                if self.lowpt[vw] < self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                    self.lowpt[e] = self.lowpt[vw];
                } else if self.lowpt[vw] > self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
                } else {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
                }
            }
        }
    }

    fn conflicting(&self, i: &Interval, b: E) -> bool {
        match i.high {
            Some(h) if !i.is_empty() => self.lowpt[h] > self.lowpt[b],
            _ => false,
        }
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        match (p.left.low, p.right.low) {
            (None, Some(r)) => self.lowpt[r],
            (Some(l), None) => self.lowpt[l],
            (Some(l), Some(r)) => self.lowpt[l].min(self.lowpt[r]),
            (None, None) => NONE,
        }
    }

    fn top_id(&self) -> Option<usize> {
        self.stack.last().map(|p| p.id)
    }

    fn new_pair(&mut self) -> ConflictPair {
        self.next_pair += 1;
        ConflictPair {
            id: self.next_pair,
            left: Interval::default(),
            right: Interval::default(),
        }
    }

    fn dfs_testing(&mut self, v: VertexId) -> bool {
        let e = self.parent_edge[v];
        let ordered = self.ordered[v].clone();
        for (idx, &ei) in ordered.iter().enumerate() {
            let w = self.head[ei];
            self.stack_bottom[ei] = self.top_id();
            if Some(ei) == self.parent_edge[w] {
                if !self.dfs_testing(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[ei] = Some(ei);
                let mut p = self.new_pair();
                p.right = Interval {
                    low: Some(ei),
                    high: Some(ei),
                };
                self.stack.push(p);
            }
            if self.lowpt[ei] < self.height[v] {
                let e = e.expect("return edge below the root");
                if idx == 0 {
                    self.lowpt_edge[e] = self.lowpt_edge[ei];
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if let Some(e) = e {
            self.remove_back_edges(e);
        }
        true
    }

    fn add_constraints(&mut self, ei: E, e: E) -> bool {
        let mut p = self.new_pair();
        loop {
            let mut q = self.stack.pop().expect("conflict stack underflow");
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let qlow = q.right.low.expect("non-empty interval");
            if self.lowpt[qlow] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else if let Some(pl) = p.right.low {
                    self.reference[pl] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                self.reference[qlow] = self.lowpt_edge[e];
            }
            if self.top_id() == self.stack_bottom[ei] {
                break;
            }
        }
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if let Some(pl) = p.right.low {
                self.reference[pl] = q.right.high;
            }
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else if let Some(pl) = p.left.low {
                self.reference[pl] = q.left.high;
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: E) {
        let u = self.tail[e];
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != self.height[u] {
                break;
            }
            let p = self.stack.pop().unwrap();
            if let Some(l) = p.left.low {
                self.side[l] = -1;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high {
                if self.head[h] != u {
                    break;
                }
                p.left.high = self.reference[h];
            }
            if p.left.high.is_none() {
                if let Some(l) = p.left.low {
                    self.reference[l] = p.right.low;
                    self.side[l] = -1;
                    p.left.low = None;
                }
            }
            while let Some(h) = p.right.high {
                if self.head[h] != u {
                    break;
                }
                p.right.high = self.reference[h];
            }
            if p.right.high.is_none() {
                if let Some(r) = p.right.low {
                    self.reference[r] = p.left.low;
                    self.side[r] = -1;
                    p.right.low = None;
                }
            }
            self.stack.push(p);
        }
        if self.lowpt[e] < self.height[u] {
            let top = self
                .stack
                .last()
                .expect("return edge without conflict pair");
            let (hl, hr) = (top.left.high, top.right.high);
            self.reference[e] = match (hl, hr) {
                (Some(l), None) => Some(l),
                (Some(l), Some(r)) if self.lowpt[l] > self.lowpt[r] => Some(l),
                _ => hr,
            };
        }
    }

    fn sign(&mut self, e: E) -> i64 {
        // iterative resolution of the reference chain
        let mut chain = vec![e];
        while let Some(r) = self.reference[*chain.last().unwrap()] {
            chain.push(r);
        }
        for i in (0..chain.len() - 1).rev() {
            let (x, r) = (chain[i], chain[i + 1]);
            self.side[x] *= self.side[r];
            self.reference[x] = None;
        }
        self.side[e]
    }

    fn dfs_embedding(&mut self, v: VertexId) {
        let ordered = self.ordered[v].clone();
        for ei in ordered {
            let w = self.head[ei];
            if Some(ei) == self.parent_edge[w] {
                self.emb.add_half_edge_first(w, v);
                self.left_ref[v] = w;
                self.right_ref[v] = w;
                self.dfs_embedding(w);
            } else if self.side[ei] == 1 {
                let r = self.right_ref[w];
                self.emb.add_half_edge_cw(w, v, Some(r));
            } else {
                let r = self.left_ref[w];
                self.emb.add_half_edge_ccw(w, v, Some(r));
                self.left_ref[w] = v;
            }
        }
    }

    fn sort_out_edges(&mut self) {
        for v in 0..self.n {
            let mut list = self.out_edges[v].clone();
            list.sort_by_key(|&e| self.nesting_depth[e]);
            self.ordered[v] = list;
        }
    }

    fn run(mut self) -> Option<Vec<Vec<VertexId>>> {
        let m = self.adj.iter().map(Vec::len).sum::<usize>() / 2;
        if self.n > 2 && m > 3 * self.n - 6 {
            return None;
        }
        for v in 0..self.n {
            if self.height[v] == NONE {
                self.height[v] = 0;
                self.roots.push(v);
                self.dfs_orientation(v);
            }
        }
        self.sort_out_edges();
        for r in self.roots.clone() {
            if !self.dfs_testing(r) {
                return None;
            }
        }
        for e in 0..self.tail.len() {
            let s = self.sign(e);
            self.nesting_depth[e] *= s;
        }
        self.sort_out_edges();
        for v in 0..self.n {
            let mut prev = None;
            for &e in &self.ordered[v] {
                let w = self.head[e];
                self.emb.add_half_edge_cw(v, w, prev);
                prev = Some(w);
            }
        }
        for r in self.roots.clone() {
            self.dfs_embedding(r);
        }
        Some((0..self.n).map(|v| self.emb.cyclic_order(v)).collect())
    }
}

/// Computes a planar rotation system for a multigraph, or `None` if the
/// graph is not planar.
pub(super) fn embed(n: usize, edges: &[[VertexId; 2]]) -> Option<Vec<Vec<Dart>>> {
    // parallel bundles keyed by unordered pair
    let mut bundles: BTreeMap<(VertexId, VertexId), Vec<usize>> = BTreeMap::new();
    let mut loops: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &[u, v]) in edges.iter().enumerate() {
        if u == v {
            loops[u].push(e);
        } else {
            bundles.entry((u.min(v), u.max(v))).or_default().push(e);
        }
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in bundles.keys() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let order = LrState::new(n, adj).run()?;

    let dart_at = |e: usize, v: VertexId| Dart::new(e, if edges[e][0] == v { 0 } else { 1 });
    let mut rotation = Vec::with_capacity(n);
    for (v, nbrs) in order.iter().enumerate() {
        let mut rot = Vec::new();
        for &e in &loops[v] {
            rot.push(Dart::new(e, 0));
            rot.push(Dart::new(e, 1));
        }
        for &w in nbrs {
            let bundle = &bundles[&(v.min(w), v.max(w))];
            if v < w {
                rot.extend(bundle.iter().map(|&e| dart_at(e, v)));
            } else {
                rot.extend(bundle.iter().rev().map(|&e| dart_at(e, v)));
            }
        }
        rotation.push(rot);
    }
    Some(rotation)
}
