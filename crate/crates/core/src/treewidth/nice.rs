use serde::{Deserialize, Serialize};

use super::TreeDecomposition;
use crate::plane_graph::VertexId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NiceKind {
    Leaf,
    Introduce(VertexId),
    Forget(VertexId),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceNode {
    pub kind: NiceKind,
    /// Sorted.
    pub bag: Vec<VertexId>,
    pub children: Vec<usize>,
}

/// Nodes are stored in post-order: children precede parents and the root,
/// which has an empty bag, is last.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|x| x.bag.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Checks node-type rules and post-order storage.
    pub fn check_shape(&self) -> Result<(), String> {
        let Some(root) = self.nodes.last() else {
            return Err("no nodes".into());
        };
        if !root.bag.is_empty() {
            return Err("root bag is not empty".into());
        }
        let mut has_parent = vec![false; self.nodes.len()];
        for (t, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                if c >= t || std::mem::replace(&mut has_parent[c], true) {
                    return Err(format!("node {t}: child {c} out of order or shared"));
                }
            }
            let child_bag = |i: usize| &self.nodes[node.children[i]].bag;
            let ok = match node.kind {
                NiceKind::Leaf => node.children.is_empty() && node.bag.is_empty(),
                NiceKind::Introduce(v) => {
                    node.children.len() == 1
                        && !child_bag(0).contains(&v)
                        && with(child_bag(0), v) == node.bag
                }
                NiceKind::Forget(v) => {
                    node.children.len() == 1
                        && !node.bag.contains(&v)
                        && with(&node.bag, v) == *child_bag(0)
                }
                NiceKind::Join => {
                    node.children.len() == 2
                        && *child_bag(0) == node.bag
                        && *child_bag(1) == node.bag
                }
            };
            if !ok {
                return Err(format!("node {t} ({:?}) violates its type", node.kind));
            }
        }
        if has_parent.iter().filter(|&&p| !p).count() != 1 {
            return Err("more than one root".into());
        }
        Ok(())
    }

    pub fn to_decomposition(&self) -> TreeDecomposition {
        let mut parent = vec![None; self.nodes.len()];
        for (t, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                parent[c] = Some(t);
            }
        }
        TreeDecomposition {
            bags: self.nodes.iter().map(|x| x.bag.clone()).collect(),
            parent,
        }
    }
}

fn with(bag: &[VertexId], v: VertexId) -> Vec<VertexId> {
    let mut out = bag.to_vec();
    let at = out.binary_search(&v).unwrap_or_else(|i| i);
    out.insert(at, v);
    out
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NiceKind, bag: Vec<VertexId>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode {
            kind,
            bag,
            children,
        });
        self.nodes.len() - 1
    }

    /// Forget then introduce single vertices until node `from` reaches `target`.
    fn morph(&mut self, mut from: usize, target: &[VertexId]) -> usize {
        let start = self.nodes[from].bag.clone();
        for &v in start.iter().filter(|v| target.binary_search(v).is_err()) {
            let mut bag = self.nodes[from].bag.clone();
            bag.retain(|&x| x != v);
            from = self.push(NiceKind::Forget(v), bag, vec![from]);
        }
        for &v in target.iter().filter(|v| start.binary_search(v).is_err()) {
            let bag = with(&self.nodes[from].bag, v);
            from = self.push(NiceKind::Introduce(v), bag, vec![from]);
        }
        from
    }
}

/// Converts a valid decomposition into nice form of the same width.
pub fn make_nice(td: &TreeDecomposition) -> NiceTreeDecomposition {
    let children = td.children();
    let root = td.root().expect("decomposition has a root");
    let mut b = Builder { nodes: Vec::new() };
    let mut result = vec![usize::MAX; td.node_count()];

    // iterative post-order over the original tree
    let mut stack = vec![(root, false)];
    while let Some((t, expanded)) = stack.pop() {
        if !expanded {
            stack.push((t, true));
            stack.extend(children[t].iter().rev().map(|&c| (c, false)));
            continue;
        }
        let bag = &td.bags[t];
        let mut branches = children[t]
            .iter()
            .map(|&c| b.morph(result[c], bag))
            .collect::<Vec<_>>()
            .into_iter();
        let node = match branches.next() {
            None => {
                let leaf = b.push(NiceKind::Leaf, Vec::new(), Vec::new());
                b.morph(leaf, bag)
            }
            Some(first) => branches.fold(first, |acc, x| {
                b.push(NiceKind::Join, bag.clone(), vec![acc, x])
            }),
        };
        result[t] = node;
    }
    b.morph(result[root], &[]);
    NiceTreeDecomposition { nodes: b.nodes }
}
