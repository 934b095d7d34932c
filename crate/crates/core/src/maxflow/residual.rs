use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::graph::{FlowAssignment, FlowNetwork, NodeId};
use crate::units::CapacityKbps;

/// Residual graph with parallel arcs coalesced per unordered node pair.
///
/// Pair `p` owns residual edges `2p` (low -> high node) and `2p + 1`
/// (high -> low). Each edge is the other's reverse, and
/// `initial[e] - residual[e]` is the net flow along `e`.
#[derive(Debug, Clone)]
pub(crate) struct Residual {
    pub(crate) source: usize,
    pub(crate) sink: usize,
    /// Outgoing residual edge ids per node, ordered by head node id.
    pub(crate) adjacency: Vec<Vec<usize>>,
    pub(crate) head: Vec<usize>,
    pub(crate) residual: Vec<u64>,
    initial: Vec<u64>,
    pair_of_arc: Vec<usize>,
}

impl Residual {
    pub(crate) fn new(net: &FlowNetwork) -> Self {
        let mut pair_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut head = Vec::new();
        let mut initial = Vec::new();
        let mut pair_of_arc = Vec::with_capacity(net.arcs().len());
        for arc in net.arcs() {
            let (u, v) = (arc.from.0, arc.to.0);
            let key = (u.min(v), u.max(v));
            let pair = *pair_index.entry(key).or_insert_with(|| {
                head.push(key.1);
                head.push(key.0);
                initial.push(0);
                initial.push(0);
                head.len() / 2 - 1
            });
            let edge = if u < v { 2 * pair } else { 2 * pair + 1 };
            initial[edge] += arc.capacity.kbps();
            pair_of_arc.push(pair);
        }
        let mut adjacency = vec![Vec::new(); net.node_count()];
        for edge in 0..head.len() {
            let tail = head[edge ^ 1];
            adjacency[tail].push(edge);
        }
        for out in &mut adjacency {
            out.sort_by_key(|&e| head[e]);
        }
        Residual {
            source: net.source().0,
            sink: net.sink().0,
            adjacency,
            head,
            residual: initial.clone(),
            initial,
            pair_of_arc,
        }
    }

    /// Residual graph of `net` after `assign` has been pushed.
    pub(crate) fn with_assignment(net: &FlowNetwork, assign: &FlowAssignment) -> Self {
        let mut r = Residual::new(net);
        for ((arc, flow), &pair) in net.arcs().iter().zip(assign.flows()).zip(&r.pair_of_arc) {
            let edge = if arc.from.0 < arc.to.0 {
                2 * pair
            } else {
                2 * pair + 1
            };
            let f = flow.kbps().min(arc.capacity.kbps());
            r.residual[edge] -= f;
            r.residual[edge ^ 1] += f;
        }
        r
    }

    pub(crate) fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub(crate) fn push(&mut self, edge: usize, amount: u64) {
        self.residual[edge] -= amount;
        self.residual[edge ^ 1] += amount;
    }

    /// Augments along a path of residual edges by its bottleneck; returns the
    /// amount pushed.
    pub(crate) fn augment(&mut self, path: &[usize]) -> u64 {
        let bottleneck = path.iter().map(|&e| self.residual[e]).min().unwrap_or(0);
        for &e in path {
            self.push(e, bottleneck);
        }
        bottleneck
    }

    /// Reconstructs the path's edges from a parent-edge table filled by a search.
    pub(crate) fn trace_back(&self, parent: &[Option<usize>]) -> Vec<usize> {
        let mut path = Vec::new();
        let mut node = self.sink;
        while node != self.source {
            let edge = parent[node].expect("search reached sink without a parent chain");
            path.push(edge);
            node = self.head[edge ^ 1];
        }
        path.reverse();
        path
    }

    pub(crate) fn path_nodes(&self, path: &[usize]) -> Vec<NodeId> {
        let mut nodes = vec![NodeId(self.source)];
        nodes.extend(path.iter().map(|&e| NodeId(self.head[e])));
        nodes
    }

    pub(crate) fn reachable_from_source(&self) -> BTreeSet<NodeId> {
        let mut seen = vec![false; self.node_count()];
        seen[self.source] = true;
        let mut queue = VecDeque::from([self.source]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adjacency[u] {
                let v = self.head[e];
                if self.residual[e] > 0 && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| NodeId(i))
            .collect()
    }

    /// Projects the pairwise net flow back onto the original arcs.
    ///
    /// Opposite flows cancel; the remaining net flow of each pair is handed to
    /// the arcs in its direction greedily, in input order.
    pub(crate) fn into_assignment(self, net: &FlowNetwork) -> FlowAssignment {
        let mut remaining: Vec<i128> = (0..self.initial.len() / 2)
            .map(|p| self.initial[2 * p] as i128 - self.residual[2 * p] as i128)
            .collect();
        let mut flows = Vec::with_capacity(net.arcs().len());
        for (arc, &pair) in net.arcs().iter().zip(&self.pair_of_arc) {
            // Positive remaining means net flow from the lower to the higher node.
            let forward = arc.from.0 < arc.to.0;
            let along = if forward {
                remaining[pair]
            } else {
                -remaining[pair]
            };
            let take = along.clamp(0, arc.capacity.kbps() as i128);
            if forward {
                remaining[pair] -= take;
            } else {
                remaining[pair] += take;
            }
            flows.push(CapacityKbps::from_kbps(take as u64));
        }
        debug_assert!(remaining.iter().all(|&r| r == 0));
        let total: u64 = self.adjacency[self.source]
            .iter()
            .map(|&e| self.initial[e] as i128 - self.residual[e] as i128)
            .sum::<i128>()
            .max(0) as u64;
        let min_cut = self.reachable_from_source();
        FlowAssignment::from_parts(flows, CapacityKbps::from_kbps(total), min_cut)
    }
}
