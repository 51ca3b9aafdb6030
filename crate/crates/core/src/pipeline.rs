//! End-to-end solving: reduce, decompose, run the DP, and fall back to the
//! brute-force search when the decomposition is too wide.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dp::{solve_dp_with, DpError, DpLimits, DpStats, DEFAULT_STATE_LIMIT};
use crate::instance::{verify_solution, Instance, Solution, SolutionError};
use crate::oracle::{solve_bruteforce, OracleError, OracleLimits, DEFAULT_NODE_BUDGET};
use crate::plane_graph::VertexId;
use crate::reduction::{reduce_instance, ReduceMode};
use crate::treewidth::{decompose, make_nice, Strategy, TreewidthError};

pub const DEFAULT_WIDTH_CAP: usize = 12;
pub const DEFAULT_UNSAFE_BOUND: usize = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// DP when the width is within the cap, otherwise the oracle.
    #[default]
    Auto,
    Dp,
    Oracle,
}

impl FromStr for Method {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Method, ConfigError> {
        match s {
            "auto" => Ok(Method::Auto),
            "dp" => Ok(Method::Dp),
            "oracle" => Ok(Method::Oracle),
            _ => Err(ConfigError::BadValue {
                key: "solve.method".into(),
                value: s.into(),
            }),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Auto => "auto",
            Method::Dp => "dp",
            Method::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub method: Method,
    pub reduce: ReduceMode,
    /// Bound used when `reduce.mode` is switched to `unsafe` without one.
    pub unsafe_bound: usize,
    pub strategy: Strategy,
    pub dp_width_cap: usize,
    pub dp_max_states: usize,
    pub oracle_node_budget: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            method: Method::Auto,
            reduce: ReduceMode::Safe,
            unsafe_bound: DEFAULT_UNSAFE_BOUND,
            strategy: Strategy::MinFill,
            dp_width_cap: DEFAULT_WIDTH_CAP,
            dp_max_states: DEFAULT_STATE_LIMIT,
            oracle_node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl Config {
    /// Sets one `key=value` entry.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue {
            key: key.into(),
            value: value.into(),
        };
        match key {
            "dp.width_cap" => self.dp_width_cap = value.parse().map_err(|_| bad())?,
            "dp.max_states" => self.dp_max_states = value.parse().map_err(|_| bad())?,
            "oracle.node_budget" => self.oracle_node_budget = value.parse().map_err(|_| bad())?,
            "solve.method" => self.method = value.parse().map_err(|_| bad())?,
            "treewidth.strategy" => self.strategy = value.parse().map_err(|_| bad())?,
            "reduce.mode" => {
                self.reduce = match value {
                    "unsafe" => ReduceMode::Unsafe(self.unsafe_bound),
                    _ => value.parse().map_err(|_| bad())?,
                };
                if let ReduceMode::Unsafe(n) = self.reduce {
                    self.unsafe_bound = n;
                }
            }
            "reduce.unsafe_bound" => {
                let n: usize = value.parse().ok().filter(|&n| n >= 1).ok_or_else(bad)?;
                self.unsafe_bound = n;
                if let ReduceMode::Unsafe(_) = self.reduce {
                    self.reduce = ReduceMode::Unsafe(n);
                }
            }
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Applies a `key=value` string.
    pub fn apply(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::BadValue {
                key: assignment.into(),
                value: String::new(),
            })?;
        self.set(key.trim(), value.trim())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Solvable,
    Unsolvable,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub reduce_ms: f64,
    pub decompose_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionStage {
    pub mode: String,
    pub depth_bound: Option<usize>,
    /// Input ids of deleted vertices.
    pub removed: Vec<VertexId>,
    pub vertices_before: usize,
    pub vertices_after: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub answer: Answer,
    /// Paths in the ids of the input instance.
    pub solution: Option<Solution>,
    /// `dp` or `oracle`.
    pub method: Method,
    pub reduction: ReductionStage,
    /// Width of the decomposition handed to the DP, when one was built.
    pub width: Option<usize>,
    pub dp: Option<DpStats>,
    /// Why the DP was skipped or abandoned in favour of the oracle.
    pub fallback: Option<String>,
    pub timings: Timings,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error(transparent)]
    Decomposition(#[from] TreewidthError),
    #[error(transparent)]
    Dp(DpError),
    #[error("solution does not verify on the input instance: {0}")]
    Unsound(#[from] SolutionError),
}

fn millis(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Solves `inst` as configured. Any returned solution has been verified
/// against `inst` itself.
pub fn solve(inst: &Instance, config: &Config) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let red = reduce_instance(inst, config.reduce);
    let reduction = ReductionStage {
        mode: config.reduce.to_string(),
        depth_bound: red.depth_bound,
        removed: red.removed.clone(),
        vertices_before: inst.graph.vertex_count(),
        vertices_after: red.instance.graph.vertex_count(),
    };
    let mut timings = Timings {
        reduce_ms: millis(start),
        ..Timings::default()
    };
    let work = &red.instance;
    let oracle = |why: Option<String>| -> Result<Option<Solution>, SolveError> {
        let limits = OracleLimits {
            node_budget: config.oracle_node_budget,
        };
        solve_bruteforce(work, limits).map_err(|OracleError::BudgetExceeded(b)| {
            let dp_part = why.map(|w| format!("{w}; ")).unwrap_or_default();
            SolveError::ResourceLimit(format!("{dp_part}oracle exceeded its budget of {b} nodes"))
        })
    };

    let mut width = None;
    let mut dp = None;
    let mut fallback = None;
    let (found, method) = if config.method == Method::Oracle {
        let t = Instant::now();
        let found = oracle(None)?;
        timings.solve_ms = millis(t);
        (found, Method::Oracle)
    } else {
        let t = Instant::now();
        let nice = make_nice(&decompose(&work.graph, config.strategy)?);
        timings.decompose_ms = millis(t);
        width = Some(nice.width());
        let t = Instant::now();
        let forced = config.method == Method::Dp;
        let outcome = if forced || nice.width() <= config.dp_width_cap {
            let limits = DpLimits {
                max_states: config.dp_max_states,
            };
            match solve_dp_with(work, &nice, limits) {
                Ok((found, stats)) => {
                    dp = Some(stats);
                    Ok(found)
                }
                Err(e @ (DpError::ProfileCapExceeded { .. } | DpError::ResourceLimit { .. })) => {
                    if forced {
                        return Err(SolveError::ResourceLimit(e.to_string()));
                    }
                    Err(format!("dp gave up: {e}"))
                }
                Err(e) => return Err(SolveError::Dp(e)),
            }
        } else {
            Err(format!(
                "width {} exceeds the dp cap of {}",
                nice.width(),
                config.dp_width_cap
            ))
        };
        let result = match outcome {
            Ok(found) => (found, Method::Dp),
            Err(why) => {
                fallback = Some(why.clone());
                (oracle(Some(why))?, Method::Oracle)
            }
        };
        timings.solve_ms = millis(t);
        result
    };

    let solution = found.map(|s| red.lift(&s));
    if let Some(sol) = &solution {
        verify_solution(inst, sol)?;
    }
    timings.total_ms = millis(start);
    Ok(SolveReport {
        answer: if solution.is_some() {
            Answer::Solvable
        } else {
            Answer::Unsolvable
        },
        solution,
        method,
        reduction,
        width,
        dp,
        fallback,
        timings,
    })
}
