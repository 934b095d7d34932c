//! Fixed benchmark inputs shared by the bench targets.

use meshplan_core::generate::{layered_network, random_mesh, random_network};
use meshplan_core::{FlowNetwork, MeshSpec};

/// Named flow networks of increasing size.
pub fn networks() -> Vec<(&'static str, FlowNetwork)> {
    vec![
        ("random-10x25", random_network(1, 10, 25, 10_000)),
        ("random-60x600", random_network(12, 60, 600, 10_000)),
        ("layered-4x8", layered_network(13, 4, 8, 10_000)),
        ("layered-8x24", layered_network(14, 8, 24, 10_000)),
    ]
}

/// Named meshes for the dimensioner.
pub fn meshes() -> Vec<(&'static str, MeshSpec)> {
    vec![
        ("mesh-8", random_mesh(21, 8, 6, 4000)),
        ("mesh-30", random_mesh(22, 30, 40, 4000)),
        ("mesh-100", random_mesh(23, 100, 150, 4000)),
    ]
}
