//! Flow networks and flow assignments.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{CapacityError, CapacityKbps};

/// Dense node index, `0..node_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub const fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i)
    }
}

/// A directed arc with its capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub from: NodeId,
    pub to: NodeId,
    pub capacity: CapacityKbps,
}

impl Arc {
    pub fn new(from: impl Into<NodeId>, to: impl Into<NodeId>, capacity: CapacityKbps) -> Self {
        Arc {
            from: from.into(),
            to: to.into(),
            capacity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("network must have at least two nodes, got {0}")]
    TooFewNodes(usize),
    #[error("node {node} out of range for a network of {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("arc {0} -> {0} is a loop")]
    Loop(NodeId),
    #[error("source and sink are both node {0}")]
    SourceIsSink(NodeId),
    #[error("total capacity does not fit in 64 bits")]
    CapacityOverflow,
    #[error("enumeration needs at most {max} nodes, network has {actual}")]
    TooLargeForEnumeration { max: usize, actual: usize },
    #[error("assignment has {actual} arc flows, network has {expected} arcs")]
    ArcCountMismatch { expected: usize, actual: usize },
}

impl From<CapacityError> for GraphError {
    fn from(_: CapacityError) -> Self {
        GraphError::CapacityOverflow
    }
}

/// A validated single-source single-sink directed network.
///
/// Parallel arcs are allowed and add up. An undirected link is stored as two
/// independent arcs, each carrying the full link capacity. The sum of all arc
/// capacities is guaranteed to fit in a `u64`, so flow arithmetic on a valid
/// network cannot overflow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    node_count: usize,
    arcs: Vec<Arc>,
    source: NodeId,
    sink: NodeId,
}

impl FlowNetwork {
    pub fn new(
        node_count: usize,
        arcs: Vec<Arc>,
        source: NodeId,
        sink: NodeId,
    ) -> Result<Self, GraphError> {
        if node_count < 2 {
            return Err(GraphError::TooFewNodes(node_count));
        }
        let in_range = |node: NodeId| {
            if node.0 < node_count {
                Ok(())
            } else {
                Err(GraphError::NodeOutOfRange { node, node_count })
            }
        };
        in_range(source)?;
        in_range(sink)?;
        if source == sink {
            return Err(GraphError::SourceIsSink(source));
        }
        for arc in &arcs {
            in_range(arc.from)?;
            in_range(arc.to)?;
            if arc.from == arc.to {
                return Err(GraphError::Loop(arc.from));
            }
        }
        CapacityKbps::checked_sum(arcs.iter().map(|a| a.capacity))?;
        Ok(FlowNetwork {
            node_count,
            arcs,
            source,
            sink,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count).map(NodeId)
    }

    pub fn total_capacity(&self) -> CapacityKbps {
        // Checked at construction.
        CapacityKbps::from_kbps(self.arcs.iter().map(|a| a.capacity.kbps()).sum())
    }

    /// Forward capacity crossing from `side` to its complement.
    pub fn cut_capacity(&self, side: &BTreeSet<NodeId>) -> CapacityKbps {
        CapacityKbps::from_kbps(
            self.arcs
                .iter()
                .filter(|a| side.contains(&a.from) && !side.contains(&a.to))
                .map(|a| a.capacity.kbps())
                .sum(),
        )
    }

    pub(crate) fn check_node(&self, node: NodeId) -> Result<(), GraphError> {
        if node.0 < self.node_count {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                node,
                node_count: self.node_count,
            })
        }
    }
}

/// Ways a flow assignment can fail to be a valid flow on its network.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowViolation {
    #[error(transparent)]
    Shape(#[from] GraphError),
    #[error("arc {arc} carries {flow} kbps over its capacity {capacity} kbps")]
    OverCapacity {
        arc: usize,
        flow: u64,
        capacity: u64,
    },
    #[error("node {node} has inflow {inflow} kbps but outflow {outflow} kbps")]
    Conservation {
        node: NodeId,
        inflow: u64,
        outflow: u64,
    },
    #[error("reported total {reported} kbps differs from net source outflow {actual} kbps")]
    TotalMismatch { reported: u64, actual: i128 },
    #[error("min cut must contain the source and exclude the sink")]
    CutSides,
    #[error("min cut capacity {cut} kbps differs from total {total} kbps")]
    CutMismatch { cut: u64, total: u64 },
}

/// Per-arc flow with its total value and a min-cut witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowAssignment {
    flows: Vec<CapacityKbps>,
    total: CapacityKbps,
    min_cut: BTreeSet<NodeId>,
}

impl FlowAssignment {
    /// The all-zero flow. Its cut witness is the source alone.
    pub fn zero(net: &FlowNetwork) -> Self {
        FlowAssignment {
            flows: vec![CapacityKbps::ZERO; net.arcs().len()],
            total: CapacityKbps::ZERO,
            min_cut: BTreeSet::from([net.source()]),
        }
    }

    /// Builds an assignment from raw per-arc flows, deriving the total from
    /// the source balance and the cut from residual reachability. Feasibility
    /// is not checked here; see [`FlowAssignment::verify`].
    pub fn from_arc_flows(net: &FlowNetwork, flows: Vec<CapacityKbps>) -> Result<Self, GraphError> {
        if flows.len() != net.arcs().len() {
            return Err(GraphError::ArcCountMismatch {
                expected: net.arcs().len(),
                actual: flows.len(),
            });
        }
        let balance = source_balance(net, &flows);
        let total = CapacityKbps::from_kbps(balance.clamp(0, u64::MAX as i128) as u64);
        let min_cut = residual_reachable(net, &flows);
        Ok(FlowAssignment {
            flows,
            total,
            min_cut,
        })
    }

    pub(crate) fn from_parts(
        flows: Vec<CapacityKbps>,
        total: CapacityKbps,
        min_cut: BTreeSet<NodeId>,
    ) -> Self {
        FlowAssignment {
            flows,
            total,
            min_cut,
        }
    }

    pub fn flows(&self) -> &[CapacityKbps] {
        &self.flows
    }

    pub fn flow(&self, arc: usize) -> CapacityKbps {
        self.flows[arc]
    }

    pub fn total(&self) -> CapacityKbps {
        self.total
    }

    /// Source side of the minimum cut.
    pub fn min_cut(&self) -> &BTreeSet<NodeId> {
        &self.min_cut
    }

    /// Checks capacity, conservation and total against `net`.
    pub fn verify_feasible(&self, net: &FlowNetwork) -> Result<(), FlowViolation> {
        if self.flows.len() != net.arcs().len() {
            return Err(GraphError::ArcCountMismatch {
                expected: net.arcs().len(),
                actual: self.flows.len(),
            }
            .into());
        }
        for (i, (arc, flow)) in net.arcs().iter().zip(&self.flows).enumerate() {
            if flow > &arc.capacity {
                return Err(FlowViolation::OverCapacity {
                    arc: i,
                    flow: flow.kbps(),
                    capacity: arc.capacity.kbps(),
                });
            }
        }
        let mut inflow = vec![0u64; net.node_count()];
        let mut outflow = vec![0u64; net.node_count()];
        for (arc, flow) in net.arcs().iter().zip(&self.flows) {
            outflow[arc.from.0] += flow.kbps();
            inflow[arc.to.0] += flow.kbps();
        }
        for node in net.nodes() {
            if node != net.source() && node != net.sink() && inflow[node.0] != outflow[node.0] {
                return Err(FlowViolation::Conservation {
                    node,
                    inflow: inflow[node.0],
                    outflow: outflow[node.0],
                });
            }
        }
        let actual = source_balance(net, &self.flows);
        if actual != self.total.kbps() as i128 {
            return Err(FlowViolation::TotalMismatch {
                reported: self.total.kbps(),
                actual,
            });
        }
        Ok(())
    }

    /// Feasibility plus the max-flow certificate: the cut separates source
    /// from sink and its forward capacity equals the total.
    pub fn verify_maximum(&self, net: &FlowNetwork) -> Result<(), FlowViolation> {
        self.verify_feasible(net)?;
        if !self.min_cut.contains(&net.source()) || self.min_cut.contains(&net.sink()) {
            return Err(FlowViolation::CutSides);
        }
        let cut = net.cut_capacity(&self.min_cut);
        if cut != self.total {
            return Err(FlowViolation::CutMismatch {
                cut: cut.kbps(),
                total: self.total.kbps(),
            });
        }
        Ok(())
    }
}

fn source_balance(net: &FlowNetwork, flows: &[CapacityKbps]) -> i128 {
    net.arcs()
        .iter()
        .zip(flows)
        .map(|(arc, f)| {
            let f = f.kbps() as i128;
            match (arc.from == net.source(), arc.to == net.source()) {
                (true, _) => f,
                (_, true) => -f,
                _ => 0,
            }
        })
        .sum()
}

fn residual_reachable(net: &FlowNetwork, flows: &[CapacityKbps]) -> BTreeSet<NodeId> {
    let mut residual = vec![vec![0u128; net.node_count()]; net.node_count()];
    for (arc, f) in net.arcs().iter().zip(flows) {
        let c = arc.capacity.kbps() as u128;
        let f = (f.kbps() as u128).min(c);
        residual[arc.from.0][arc.to.0] += c - f;
        residual[arc.to.0][arc.from.0] += f;
    }
    let mut seen = BTreeSet::from([net.source()]);
    let mut queue = VecDeque::from([net.source().0]);
    while let Some(u) = queue.pop_front() {
        for (v, &r) in residual[u].iter().enumerate() {
            if r > 0 && seen.insert(NodeId(v)) {
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Remaining capacity from `from` to `to` under `assign`:
/// `c(from,to) - f(from,to) + f(to,from)`, summed over parallel arcs.
pub fn residual_capacity(
    net: &FlowNetwork,
    assign: &FlowAssignment,
    from: NodeId,
    to: NodeId,
) -> Result<CapacityKbps, GraphError> {
    net.check_node(from)?;
    net.check_node(to)?;
    if assign.flows.len() != net.arcs().len() {
        return Err(GraphError::ArcCountMismatch {
            expected: net.arcs().len(),
            actual: assign.flows.len(),
        });
    }
    let mut residual: u128 = 0;
    for (arc, f) in net.arcs().iter().zip(&assign.flows) {
        if arc.from == from && arc.to == to {
            residual += (arc.capacity.kbps() - f.kbps().min(arc.capacity.kbps())) as u128;
        } else if arc.from == to && arc.to == from {
            residual += f.kbps() as u128;
        }
    }
    u64::try_from(residual)
        .map(CapacityKbps::from_kbps)
        .map_err(|_| GraphError::CapacityOverflow)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kbps(v: u64) -> CapacityKbps {
        CapacityKbps::from_kbps(v)
    }

    fn single(cap: u64) -> FlowNetwork {
        FlowNetwork::new(2, vec![Arc::new(0, 1, kbps(cap))], NodeId(0), NodeId(1)).unwrap()
    }

    #[test]
    fn rejects_invalid_shapes() {
        assert_eq!(
            FlowNetwork::new(2, vec![], NodeId(1), NodeId(1)),
            Err(GraphError::SourceIsSink(NodeId(1)))
        );
        assert_eq!(
            FlowNetwork::new(2, vec![Arc::new(1, 1, kbps(1))], NodeId(0), NodeId(1)),
            Err(GraphError::Loop(NodeId(1)))
        );
        assert!(matches!(
            FlowNetwork::new(2, vec![Arc::new(0, 2, kbps(1))], NodeId(0), NodeId(1)),
            Err(GraphError::NodeOutOfRange { .. })
        ));
        assert_eq!(
            FlowNetwork::new(
                2,
                vec![Arc::new(0, 1, kbps(u64::MAX)), Arc::new(1, 0, kbps(1))],
                NodeId(0),
                NodeId(1)
            ),
            Err(GraphError::CapacityOverflow)
        );
    }

    #[test]
    fn residual_of_zero_flow_is_capacity() {
        let net = single(5);
        let zero = FlowAssignment::zero(&net);
        assert_eq!(
            residual_capacity(&net, &zero, NodeId(0), NodeId(1)).unwrap(),
            kbps(5)
        );
        assert_eq!(
            residual_capacity(&net, &zero, NodeId(1), NodeId(0)).unwrap(),
            kbps(0)
        );
    }

    #[test]
    fn residual_of_saturated_arc() {
        let net = single(5);
        let full = FlowAssignment::from_arc_flows(&net, vec![kbps(5)]).unwrap();
        assert_eq!(
            residual_capacity(&net, &full, NodeId(0), NodeId(1)).unwrap(),
            kbps(0)
        );
        assert_eq!(
            residual_capacity(&net, &full, NodeId(1), NodeId(0)).unwrap(),
            kbps(5)
        );
        assert_eq!(full.total(), kbps(5));
        full.verify_maximum(&net).unwrap();
    }

    #[test]
    fn residual_rejects_unknown_nodes() {
        let net = single(5);
        let zero = FlowAssignment::zero(&net);
        assert!(residual_capacity(&net, &zero, NodeId(0), NodeId(7)).is_err());
    }

    #[test]
    fn verify_catches_violations() {
        let net = FlowNetwork::new(
            3,
            vec![Arc::new(0, 1, kbps(3)), Arc::new(1, 2, kbps(3))],
            NodeId(0),
            NodeId(2),
        )
        .unwrap();
        let over = FlowAssignment::from_arc_flows(&net, vec![kbps(4), kbps(4)]).unwrap();
        assert!(matches!(
            over.verify_feasible(&net),
            Err(FlowViolation::OverCapacity { .. })
        ));
        let leaky = FlowAssignment::from_arc_flows(&net, vec![kbps(3), kbps(1)]).unwrap();
        assert!(matches!(
            leaky.verify_feasible(&net),
            Err(FlowViolation::Conservation { .. })
        ));
        let partial = FlowAssignment::from_arc_flows(&net, vec![kbps(1), kbps(1)]).unwrap();
        partial.verify_feasible(&net).unwrap();
        assert!(partial.verify_maximum(&net).is_err());
    }

    #[test]
    fn undirected_expansion_preserves_declared_capacity() {
        let link = kbps(2200);
        let net = FlowNetwork::new(
            2,
            vec![Arc::new(0, 1, link), Arc::new(1, 0, link)],
            NodeId(0),
            NodeId(1),
        )
        .unwrap();
        assert_eq!(net.total_capacity().kbps(), 2 * link.kbps());
    }
}
