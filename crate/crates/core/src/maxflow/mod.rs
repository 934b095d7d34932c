//! Maximum flow with a min-cut witness.
//!
//! Three engines share one residual representation: Ford-Fulkerson with
//! depth-first path search, Edmonds-Karp (breadth-first, shortest paths) and
//! Dinic (level graph plus blocking flows). Flow starts at zero on every arc.
//! Wherever a search must pick among neighbors it takes the smallest node id
//! first, so runs are reproducible bit for bit.

mod brute;
mod dinic;
mod residual;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{FlowAssignment, FlowNetwork, GraphError, NodeId};
use residual::Residual;

pub use brute::{brute_force_min_cut, MAX_ENUMERABLE_NODES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverEngine {
    /// Augment along depth-first paths.
    FordFulkersonDfs,
    /// Augment along breadth-first (shortest) paths.
    #[default]
    EdmondsKarpBfs,
    Dinic,
}

impl SolverEngine {
    pub const ALL: [SolverEngine; 3] = [
        SolverEngine::FordFulkersonDfs,
        SolverEngine::EdmondsKarpBfs,
        SolverEngine::Dinic,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            SolverEngine::FordFulkersonDfs => "ff",
            SolverEngine::EdmondsKarpBfs => "ek",
            SolverEngine::Dinic => "dinic",
        }
    }
}

impl fmt::Display for SolverEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverEngine::FordFulkersonDfs => "ford-fulkerson-dfs",
            SolverEngine::EdmondsKarpBfs => "edmonds-karp-bfs",
            SolverEngine::Dinic => "dinic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown engine `{0}` (expected ff, ek or dinic)")]
pub struct UnknownEngine(String);

impl FromStr for SolverEngine {
    type Err = UnknownEngine;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ff" | "ford-fulkerson" | "ford-fulkerson-dfs" => Ok(SolverEngine::FordFulkersonDfs),
            "ek" | "edmonds-karp" | "edmonds-karp-bfs" => Ok(SolverEngine::EdmondsKarpBfs),
            "dinic" => Ok(SolverEngine::Dinic),
            other => Err(UnknownEngine(other.to_string())),
        }
    }
}

/// Path search order for [`augmenting_path`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchStrategy {
    Dfs,
    Bfs,
}

/// Work counters from one solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SolveStats {
    /// Augmenting paths pushed.
    pub augmentations: u64,
    /// Level-graph phases (Dinic); equals `augmentations + 1` search rounds
    /// for the path-based engines.
    pub phases: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaxFlowError {
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Maximum flow from source to sink.
///
/// The returned cut is the set of nodes reachable from the source in the
/// final residual graph.
pub fn max_flow(net: &FlowNetwork, engine: SolverEngine) -> FlowAssignment {
    max_flow_with_stats(net, engine).0
}

pub fn max_flow_with_stats(
    net: &FlowNetwork,
    engine: SolverEngine,
) -> (FlowAssignment, SolveStats) {
    let mut residual = Residual::new(net);
    let stats = match engine {
        SolverEngine::FordFulkersonDfs => augment_until_blocked(&mut residual, SearchStrategy::Dfs),
        SolverEngine::EdmondsKarpBfs => augment_until_blocked(&mut residual, SearchStrategy::Bfs),
        SolverEngine::Dinic => dinic::run(&mut residual),
    };
    (residual.into_assignment(net), stats)
}

fn augment_until_blocked(residual: &mut Residual, strategy: SearchStrategy) -> SolveStats {
    let mut stats = SolveStats::default();
    loop {
        stats.phases += 1;
        let Some(path) = find_path(residual, strategy) else {
            return stats;
        };
        let pushed = residual.augment(&path);
        debug_assert!(pushed > 0);
        stats.augmentations += 1;
    }
}

/// A simple source-to-sink path with positive residual capacity on every
/// step under `assign`, or `None` when the flow is already maximum.
pub fn augmenting_path(
    net: &FlowNetwork,
    assign: &FlowAssignment,
    strategy: SearchStrategy,
) -> Result<Option<Vec<NodeId>>, MaxFlowError> {
    if assign.flows().len() != net.arcs().len() {
        return Err(GraphError::ArcCountMismatch {
            expected: net.arcs().len(),
            actual: assign.flows().len(),
        }
        .into());
    }
    let residual = Residual::with_assignment(net, assign);
    Ok(find_path(&residual, strategy).map(|edges| residual.path_nodes(&edges)))
}

fn find_path(r: &Residual, strategy: SearchStrategy) -> Option<Vec<usize>> {
    match strategy {
        SearchStrategy::Bfs => bfs_path(r),
        SearchStrategy::Dfs => dfs_path(r),
    }
}

fn bfs_path(r: &Residual) -> Option<Vec<usize>> {
    let n = r.node_count();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[r.source] = true;
    let mut queue = std::collections::VecDeque::from([r.source]);
    while let Some(u) = queue.pop_front() {
        for &e in &r.adjacency[u] {
            let v = r.head[e];
            if r.residual[e] == 0 || seen[v] {
                continue;
            }
            seen[v] = true;
            parent[v] = Some(e);
            if v == r.sink {
                return Some(r.trace_back(&parent));
            }
            queue.push_back(v);
        }
    }
    None
}

fn dfs_path(r: &Residual) -> Option<Vec<usize>> {
    let n = r.node_count();
    let mut seen = vec![false; n];
    seen[r.source] = true;
    // (node, position in its adjacency list)
    let mut stack = vec![(r.source, 0usize)];
    let mut path: Vec<usize> = Vec::new();
    while let Some(top) = stack.len().checked_sub(1) {
        let (u, mut pos) = stack[top];
        if u == r.sink {
            return Some(path);
        }
        let adj = &r.adjacency[u];
        let mut next = None;
        while pos < adj.len() {
            let e = adj[pos];
            pos += 1;
            if r.residual[e] > 0 && !seen[r.head[e]] {
                next = Some(e);
                break;
            }
        }
        stack[top].1 = pos;
        if let Some(e) = next {
            let v = r.head[e];
            seen[v] = true;
            path.push(e);
            stack.push((v, 0));
        } else {
            stack.pop();
            path.pop();
        }
    }
    None
}
