//! Link dimensioning and teletraffic analysis for interconnected LTE eNB
//! meshes.
//!
//! - [`maxflow`]: maximum flow and min cut (Ford-Fulkerson, Edmonds-Karp, Dinic).
//! - [`dimension`]: minimal uniform link capacity by binary search over max flow.
//! - [`teletraffic`]: resource-block arithmetic and Erlang-B blocking.
//! - [`sim`]: seeded Monte-Carlo loss-system simulation.
//! - [`sweep`] and [`chart`]: parameter sweeps with CSV/JSON/SVG output.

pub mod chart;
pub mod dimension;
pub mod format;
pub mod generate;
pub mod graph;
pub mod maxflow;
pub mod sim;
pub mod sweep;
pub mod teletraffic;
pub mod units;

pub use dimension::{
    build_augmented, dimension, feasible, DimensionError, Dimensioner, DimensioningResult,
    MeshLink, MeshSpec, ProvisionedLink,
};
pub use format::{
    parse_mesh, parse_network, serialize_mesh, serialize_network, Format, ParseError,
};
pub use graph::{residual_capacity, Arc, FlowAssignment, FlowNetwork, GraphError, NodeId};
pub use maxflow::{augmenting_path, brute_force_min_cut, max_flow, SearchStrategy, SolverEngine};
pub use sim::{simulate, LossSystem, SimConfig, SimResult};
pub use sweep::{run_sweep, CurvePoint, SweepSpec};
pub use teletraffic::{erlang_b, Modulation, TrafficScenario};
pub use units::CapacityKbps;
