//! Exhaustive backtracking solver and solution counter.
//!
//! Requests are routed in index order; at each vertex the neighbours are
//! tried in order of the smallest connecting edge id. After every step each
//! unfinished request must still be connectable through free non-terminal
//! vertices, otherwise the branch is cut.

use std::collections::VecDeque;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::instance::{Instance, Solution};
use crate::plane_graph::VertexId;

pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub node_budget: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

struct Search<'a> {
    inst: &'a Instance,
    /// Neighbours ordered by smallest connecting edge id.
    nbrs: Vec<Vec<VertexId>>,
    used: Vec<bool>,
    paths: Vec<Vec<VertexId>>,
    nodes: u64,
    budget: u64,
    // scratch for the connectivity check
    mark: Vec<u32>,
    stamp: u32,
    queue: VecDeque<VertexId>,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, limits: OracleLimits) -> Self {
        let g = &inst.graph;
        let n = g.vertex_count();
        let nbrs = (0..n)
            .map(|v| {
                let mut darts: Vec<_> = g.rotation(v).to_vec();
                darts.sort_by_key(|d| d.edge());
                let mut out: Vec<VertexId> = Vec::new();
                for d in darts {
                    let w = g.target(d);
                    if w != v && !out.contains(&w) {
                        out.push(w);
                    }
                }
                out
            })
            .collect();
        let mut used = vec![false; n];
        for s in inst.pairs().iter().map(|p| p.0) {
            used[s] = true;
        }
        Search {
            inst,
            nbrs,
            used,
            paths: inst.pairs().iter().map(|&(s, _)| vec![s]).collect(),
            nodes: 0,
            budget: limits.node_budget,
            mark: vec![0; n],
            stamp: 0,
            queue: VecDeque::new(),
        }
    }

    /// Whether `from` can reach `to` through unused non-terminal vertices.
    fn reachable(&mut self, from: VertexId, to: VertexId) -> bool {
        self.stamp += 1;
        let stamp = self.stamp;
        self.queue.clear();
        self.queue.push_back(from);
        self.mark[from] = stamp;
        while let Some(x) = self.queue.pop_front() {
            for &w in &self.nbrs[x] {
                if w == to {
                    return true;
                }
                if self.mark[w] != stamp && !self.used[w] && !self.inst.is_terminal(w) {
                    self.mark[w] = stamp;
                    self.queue.push_back(w);
                }
            }
        }
        false
    }

    fn feasible(&mut self, current: usize) -> bool {
        for j in current..self.inst.k() {
            let from = *self.paths[j].last().expect("paths start at their source");
            if !self.reachable(from, self.inst.sink(j)) {
                return false;
            }
        }
        true
    }

    fn run<F>(&mut self, current: usize, visit: &mut F) -> Result<ControlFlow<()>, OracleError>
    where
        F: FnMut(&Solution) -> ControlFlow<()>,
    {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::BudgetExceeded(self.budget));
        }
        if current == self.inst.k() {
            return Ok(visit(&Solution {
                paths: self.paths.clone(),
            }));
        }
        if !self.feasible(current) {
            return Ok(ControlFlow::Continue(()));
        }
        let end = *self.paths[current].last().expect("nonempty path");
        let sink = self.inst.sink(current);
        for idx in 0..self.nbrs[end].len() {
            let w = self.nbrs[end][idx];
            let flow = if w == sink {
                self.used[w] = true;
                self.paths[current].push(w);
                let r = self.run(current + 1, visit);
                self.paths[current].pop();
                self.used[w] = false;
                r?
            } else if !self.used[w] && !self.inst.is_terminal(w) {
                self.used[w] = true;
                self.paths[current].push(w);
                let r = self.run(current, visit);
                self.paths[current].pop();
                self.used[w] = false;
                r?
            } else {
                continue;
            };
            if flow.is_break() {
                return Ok(flow);
            }
        }
        Ok(ControlFlow::Continue(()))
    }
}

/// Calls `visit` on every solution in canonical search order until it
/// breaks. Returns the number of search nodes spent.
pub fn for_each_solution<F>(
    inst: &Instance,
    limits: OracleLimits,
    mut visit: F,
) -> Result<u64, OracleError>
where
    F: FnMut(&Solution) -> ControlFlow<()>,
{
    let mut search = Search::new(inst, limits);
    let _ = search.run(0, &mut visit)?;
    Ok(search.nodes)
}

/// First solution in canonical order, or `None` if the instance is infeasible.
pub fn solve_bruteforce(
    inst: &Instance,
    limits: OracleLimits,
) -> Result<Option<Solution>, OracleError> {
    let mut found = None;
    for_each_solution(inst, limits, |s| {
        found = Some(s.clone());
        ControlFlow::Break(())
    })?;
    Ok(found)
}

/// Number of distinct solutions.
pub fn count_solutions(inst: &Instance, limits: OracleLimits) -> Result<u64, OracleError> {
    let mut count = 0;
    for_each_solution(inst, limits, |_| {
        count += 1;
        ControlFlow::Continue(())
    })?;
    Ok(count)
}
