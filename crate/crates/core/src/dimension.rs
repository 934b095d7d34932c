//! Uniform link dimensioning by binary search over a max-flow feasibility
//! predicate.
//!
//! Every eNB in the mesh offers its own traffic and relays traffic of the
//! others toward one sink node. A dummy super-source (node 0) feeds each
//! offering node `i` through an arc of capacity `C_i`, every mesh link gets
//! the same capacity `M`, and `M` is feasible when the max flow from node 0 to
//! the sink carries the whole demand `Y = sum C_i`. The smallest feasible `M`
//! is found by bisection; each link is then provisioned at the flow it
//! actually carries at that `M`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Arc, FlowAssignment, FlowNetwork, GraphError, NodeId};
use crate::maxflow::{max_flow, SolverEngine};
use crate::units::CapacityKbps;

/// The super-source of the augmented network.
pub const SUPER_SOURCE: NodeId = NodeId(0);

/// Default search step: 1 Mbps.
pub const DEFAULT_GRANULARITY: CapacityKbps = CapacityKbps::from_kbps(1000);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeshLink {
    pub a: NodeId,
    pub b: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeshError {
    #[error("mesh needs at least two eNBs, got {0}")]
    TooFewNodes(usize),
    #[error("node {node} outside the mesh range 1..={node_count}")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("link {0}-{0} is a loop")]
    Loop(NodeId),
    #[error("sink {0} cannot offer traffic")]
    SinkOffers(NodeId),
    #[error("node {0} has more than one offer")]
    DuplicateOffer(NodeId),
    #[error("total offered load does not fit in 64 bits")]
    DemandOverflow,
}

/// An undirected eNB mesh with per-node offered load and one sink.
///
/// Nodes are numbered `1..=node_count`; node 0 is reserved for the
/// super-source of the augmented network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshSpec {
    node_count: usize,
    links: Vec<MeshLink>,
    offered: BTreeMap<NodeId, CapacityKbps>,
    sink: NodeId,
}

impl MeshSpec {
    pub fn new(
        node_count: usize,
        links: Vec<MeshLink>,
        offers: Vec<(NodeId, CapacityKbps)>,
        sink: NodeId,
    ) -> Result<Self, MeshError> {
        if node_count < 2 {
            return Err(MeshError::TooFewNodes(node_count));
        }
        let in_range = |node: NodeId| {
            if (1..=node_count).contains(&node.0) {
                Ok(())
            } else {
                Err(MeshError::NodeOutOfRange { node, node_count })
            }
        };
        in_range(sink)?;
        for link in &links {
            in_range(link.a)?;
            in_range(link.b)?;
            if link.a == link.b {
                return Err(MeshError::Loop(link.a));
            }
        }
        let mut offered = BTreeMap::new();
        for (node, load) in offers {
            in_range(node)?;
            if node == sink {
                return Err(MeshError::SinkOffers(node));
            }
            if offered.insert(node, load).is_some() {
                return Err(MeshError::DuplicateOffer(node));
            }
        }
        CapacityKbps::checked_sum(offered.values().copied())
            .map_err(|_| MeshError::DemandOverflow)?;
        Ok(MeshSpec {
            node_count,
            links,
            offered,
            sink,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn links(&self) -> &[MeshLink] {
        &self.links
    }

    pub fn offered(&self) -> &BTreeMap<NodeId, CapacityKbps> {
        &self.offered
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    /// Total offered load `Y`.
    pub fn demand(&self) -> CapacityKbps {
        CapacityKbps::from_kbps(self.offered.values().map(|c| c.kbps()).sum())
    }

    /// The same mesh with every offered load multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self, MeshError> {
        let offers = self
            .offered
            .iter()
            .map(|(&n, c)| {
                c.kbps()
                    .checked_mul(factor)
                    .map(|k| (n, CapacityKbps::from_kbps(k)))
                    .ok_or(MeshError::DemandOverflow)
            })
            .collect::<Result<_, _>>()?;
        MeshSpec::new(self.node_count, self.links.clone(), offers, self.sink)
    }

    /// Offering nodes (`C_i > 0`) with no mesh path to the sink.
    pub fn stranded_nodes(&self) -> Vec<NodeId> {
        let mut adjacent = vec![Vec::new(); self.node_count + 1];
        for link in &self.links {
            adjacent[link.a.0].push(link.b.0);
            adjacent[link.b.0].push(link.a.0);
        }
        let mut seen = BTreeSet::from([self.sink.0]);
        let mut queue = VecDeque::from([self.sink.0]);
        while let Some(u) = queue.pop_front() {
            for &v in &adjacent[u] {
                if seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        self.offered
            .iter()
            .filter(|(n, c)| c.kbps() > 0 && !seen.contains(&n.0))
            .map(|(&n, _)| n)
            .collect()
    }
}

/// Index of the first mesh arc in a network built by [`build_augmented`].
/// Mesh link `j` occupies arcs `offset + 2j` (a -> b) and `offset + 2j + 1`.
pub fn mesh_arc_offset(spec: &MeshSpec) -> usize {
    spec.offered.len()
}

/// Super-source network with every mesh link at uniform capacity `link_capacity`.
pub fn build_augmented(spec: &MeshSpec, link_capacity: CapacityKbps) -> FlowNetwork {
    let uniform = vec![link_capacity; spec.links.len()];
    build_with_link_capacities(spec, &uniform)
        .expect("a valid mesh at one uniform capacity forms a valid network")
}

/// Super-source network with per-link capacities (one per mesh link, in order).
pub fn build_with_link_capacities(
    spec: &MeshSpec,
    capacities: &[CapacityKbps],
) -> Result<FlowNetwork, GraphError> {
    assert_eq!(
        capacities.len(),
        spec.links.len(),
        "one capacity per mesh link"
    );
    let mut arcs = Vec::with_capacity(spec.offered.len() + 2 * spec.links.len());
    for (&node, &load) in &spec.offered {
        arcs.push(Arc::new(SUPER_SOURCE, node, load));
    }
    for (link, &cap) in spec.links.iter().zip(capacities) {
        arcs.push(Arc::new(link.a, link.b, cap));
        arcs.push(Arc::new(link.b, link.a, cap));
    }
    FlowNetwork::new(spec.node_count + 1, arcs, SUPER_SOURCE, spec.sink)
}

/// Whether uniform link capacity `link_capacity` carries the full demand.
///
/// The super-source arcs cap the flow at `Y`, so reaching `Y` and exceeding
/// it are the same test.
pub fn feasible(
    spec: &MeshSpec,
    link_capacity: CapacityKbps,
    engine: SolverEngine,
) -> (bool, FlowAssignment) {
    let net = build_augmented(spec, link_capacity);
    let flow = max_flow(&net, engine);
    (flow.total() >= spec.demand(), flow)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimensionError {
    #[error("total offered load is zero")]
    ZeroDemand,
    #[error("offering nodes {0:?} have no path to the sink")]
    InfeasibleAtY(Vec<NodeId>),
    #[error("granularity must be positive")]
    ZeroGranularity,
}

/// One probe of the binary search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStep {
    pub lower: CapacityKbps,
    pub upper: CapacityKbps,
    pub probe: CapacityKbps,
    pub flow: CapacityKbps,
    pub feasible: bool,
}

/// A link's provisioned capacity: the net flow it carries at the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvisionedLink {
    pub a: NodeId,
    pub b: NodeId,
    pub capacity: CapacityKbps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensioningResult {
    /// Minimal uniform link capacity carrying the whole demand.
    pub optimal_m: CapacityKbps,
    pub demand: CapacityKbps,
    pub achieved_flow: CapacityKbps,
    pub granularity: CapacityKbps,
    pub link_capacities: Vec<ProvisionedLink>,
    /// Loop probes (excludes the exit check and the final provisioning run).
    pub iterations: usize,
    pub trace: Vec<SearchStep>,
    /// The loop exited on an infeasible value and was stepped up one unit.
    pub exit_adjusted: bool,
    /// Max over mean provisioned link capacity; `None` when no link carries flow.
    pub load_balance_ratio: Option<f64>,
}

/// Binary-search dimensioner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dimensioner {
    pub granularity: CapacityKbps,
    pub engine: SolverEngine,
}

impl Default for Dimensioner {
    fn default() -> Self {
        Dimensioner {
            granularity: DEFAULT_GRANULARITY,
            engine: SolverEngine::default(),
        }
    }
}

impl Dimensioner {
    pub fn with_granularity(granularity: CapacityKbps) -> Self {
        Dimensioner {
            granularity,
            ..Dimensioner::default()
        }
    }

    pub fn engine(mut self, engine: SolverEngine) -> Self {
        self.engine = engine;
        self
    }

    /// Smallest multiple of the granularity at which the mesh carries its
    /// whole demand, plus per-link provisioning at that capacity.
    ///
    /// The search works in granularity units with `L = 1` and `R = ceil(Y/g)`,
    /// probes `M = floor((L + R) / 2)`, sets `R = M - 1` on success and
    /// `L = M + 1` on failure, and stops once `L >= R`. That loop can stop on
    /// an infeasible `L` (when the last success moved `R` below it), so `L` is
    /// checked once more and bumped by one unit if needed.
    pub fn dimension(&self, spec: &MeshSpec) -> Result<DimensioningResult, DimensionError> {
        let g = self.granularity.kbps();
        if g == 0 {
            return Err(DimensionError::ZeroGranularity);
        }
        let demand = spec.demand();
        if demand.kbps() == 0 {
            return Err(DimensionError::ZeroDemand);
        }
        let stranded = spec.stranded_nodes();
        if !stranded.is_empty() {
            return Err(DimensionError::InfeasibleAtY(stranded));
        }
        let units = |u: u64| CapacityKbps::from_kbps(u * g);
        let probe = |u: u64| feasible(spec, units(u), self.engine);

        let mut lower: u64 = 1;
        let mut upper: u64 = demand.kbps().div_ceil(g);
        let mut trace = Vec::new();
        while lower < upper {
            let mid = lower + (upper - lower) / 2;
            let (ok, flow) = probe(mid);
            trace.push(SearchStep {
                lower: units(lower),
                upper: units(upper),
                probe: units(mid),
                flow: flow.total(),
                feasible: ok,
            });
            if ok {
                upper = mid - 1;
            } else {
                lower = mid + 1;
            }
        }
        let iterations = trace.len();

        let (mut ok, mut flow) = probe(lower);
        let mut exit_adjusted = false;
        if !ok {
            lower += 1;
            exit_adjusted = true;
            (ok, flow) = probe(lower);
        }
        // Connectivity guarantees feasibility at ceil(Y/g) units.
        debug_assert!(ok);
        if !ok {
            return Err(DimensionError::InfeasibleAtY(Vec::new()));
        }

        let offset = mesh_arc_offset(spec);
        let link_capacities: Vec<ProvisionedLink> = spec
            .links
            .iter()
            .enumerate()
            .map(|(j, link)| {
                let forward = flow.flow(offset + 2 * j).kbps();
                let backward = flow.flow(offset + 2 * j + 1).kbps();
                ProvisionedLink {
                    a: link.a,
                    b: link.b,
                    capacity: CapacityKbps::from_kbps(forward.abs_diff(backward)),
                }
            })
            .collect();

        Ok(DimensioningResult {
            optimal_m: units(lower),
            demand,
            achieved_flow: flow.total(),
            granularity: self.granularity,
            load_balance_ratio: load_balance(&link_capacities),
            link_capacities,
            iterations,
            trace,
            exit_adjusted,
        })
    }
}

/// Dimensions with the default engine.
pub fn dimension(
    spec: &MeshSpec,
    granularity: CapacityKbps,
) -> Result<DimensioningResult, DimensionError> {
    Dimensioner::with_granularity(granularity).dimension(spec)
}

fn load_balance(links: &[ProvisionedLink]) -> Option<f64> {
    if links.is_empty() {
        return None;
    }
    let max = links.iter().map(|l| l.capacity.kbps()).max()? as f64;
    let mean = links.iter().map(|l| l.capacity.kbps() as f64).sum::<f64>() / links.len() as f64;
    (mean > 0.0).then(|| max / mean)
}
