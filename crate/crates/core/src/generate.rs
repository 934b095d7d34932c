//! Seeded random instances for tests and benchmarks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dimension::{MeshLink, MeshSpec};
use crate::graph::{Arc, FlowNetwork, NodeId};
use crate::units::CapacityKbps;

/// Random directed network: `nodes` nodes, `arcs` loop-free arcs with
/// capacities uniform in `0..=max_capacity_kbps`, source 0, sink `nodes - 1`.
pub fn random_network(seed: u64, nodes: usize, arcs: usize, max_capacity_kbps: u64) -> FlowNetwork {
    assert!(nodes >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let list = (0..arcs)
        .map(|_| {
            let from = rng.random_range(0..nodes);
            let mut to = rng.random_range(0..nodes - 1);
            if to >= from {
                to += 1;
            }
            let cap = rng.random_range(0..=max_capacity_kbps);
            Arc::new(from, to, CapacityKbps::from_kbps(cap))
        })
        .collect();
    FlowNetwork::new(nodes, list, NodeId(0), NodeId(nodes - 1)).expect("generated network is valid")
}

/// Layered network with `width` nodes per layer, fully connected between
/// consecutive layers. Used for benchmarks.
pub fn layered_network(
    seed: u64,
    layers: usize,
    width: usize,
    max_capacity_kbps: u64,
) -> FlowNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let node_count = layers * width + 2;
    let source = 0;
    let sink = node_count - 1;
    let id = |layer: usize, i: usize| 1 + layer * width + i;
    let mut arcs = Vec::new();
    let cap =
        |rng: &mut ChaCha8Rng| CapacityKbps::from_kbps(rng.random_range(1..=max_capacity_kbps));
    for i in 0..width {
        arcs.push(Arc::new(source, id(0, i), cap(&mut rng)));
        arcs.push(Arc::new(id(layers - 1, i), sink, cap(&mut rng)));
    }
    for layer in 0..layers - 1 {
        for i in 0..width {
            for j in 0..width {
                arcs.push(Arc::new(id(layer, i), id(layer + 1, j), cap(&mut rng)));
            }
        }
    }
    FlowNetwork::new(node_count, arcs, NodeId(source), NodeId(sink))
        .expect("generated network is valid")
}

/// Random connected mesh over `1..=nodes` with sink `nodes`.
///
/// A random spanning tree keeps every node connected to the sink; `extra`
/// additional random links are added on top. Every non-sink node offers a
/// load uniform in `1..=max_offer_kbps`.
pub fn random_mesh(seed: u64, nodes: usize, extra: usize, max_offer_kbps: u64) -> MeshSpec {
    assert!(nodes >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut links = Vec::new();
    for v in 2..=nodes {
        let u = rng.random_range(1..v);
        links.push(MeshLink {
            a: NodeId(u),
            b: NodeId(v),
        });
    }
    for _ in 0..extra {
        let a = rng.random_range(1..=nodes);
        let mut b = rng.random_range(1..nodes);
        if b >= a {
            b += 1;
        }
        links.push(MeshLink {
            a: NodeId(a),
            b: NodeId(b),
        });
    }
    let offers = (1..nodes)
        .map(|n| {
            (
                NodeId(n),
                CapacityKbps::from_kbps(rng.random_range(1..=max_offer_kbps)),
            )
        })
        .collect();
    MeshSpec::new(nodes, links, offers, NodeId(nodes)).expect("generated mesh is valid")
}
