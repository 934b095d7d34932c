use crate::graph::{FlowNetwork, GraphError};
use crate::units::CapacityKbps;

/// Largest network [`brute_force_min_cut`] will enumerate.
pub const MAX_ENUMERABLE_NODES: usize = 20;

/// Minimum source/sink cut by exhaustive enumeration of all `2^(n-2)`
/// partitions. Independent of the residual machinery; used as a test oracle.
pub fn brute_force_min_cut(net: &FlowNetwork) -> Result<CapacityKbps, GraphError> {
    let n = net.node_count();
    if n > MAX_ENUMERABLE_NODES {
        return Err(GraphError::TooLargeForEnumeration {
            max: MAX_ENUMERABLE_NODES,
            actual: n,
        });
    }
    let (s, t) = (net.source().0, net.sink().0);
    let free: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
    let mut best = u64::MAX;
    for mask in 0u32..(1u32 << free.len()) {
        let mut source_side = vec![false; n];
        source_side[s] = true;
        for (bit, &v) in free.iter().enumerate() {
            source_side[v] = mask & (1 << bit) != 0;
        }
        let cut: u64 = net
            .arcs()
            .iter()
            .filter(|a| source_side[a.from.0] && !source_side[a.to.0])
            .map(|a| a.capacity.kbps())
            .sum();
        best = best.min(cut);
    }
    Ok(CapacityKbps::from_kbps(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Arc, NodeId};

    fn mbps(v: u64) -> CapacityKbps {
        CapacityKbps::from_mbps(v).unwrap()
    }

    #[test]
    fn single_arc() {
        let net = FlowNetwork::new(2, vec![Arc::new(0, 1, mbps(5))], NodeId(0), NodeId(1)).unwrap();
        assert_eq!(brute_force_min_cut(&net).unwrap().kbps(), 5000);
    }

    #[test]
    fn diamond() {
        let net = FlowNetwork::new(
            4,
            vec![
                Arc::new(0, 1, mbps(3)),
                Arc::new(0, 2, mbps(2)),
                Arc::new(1, 3, mbps(2)),
                Arc::new(2, 3, mbps(3)),
                Arc::new(1, 2, mbps(1)),
            ],
            NodeId(0),
            NodeId(3),
        )
        .unwrap();
        assert_eq!(brute_force_min_cut(&net).unwrap().kbps(), 5000);
    }

    #[test]
    fn parallel_links_add() {
        let net = FlowNetwork::new(
            2,
            vec![
                Arc::new(0, 1, mbps(2)),
                Arc::new(1, 0, mbps(2)),
                Arc::new(0, 1, mbps(3)),
                Arc::new(1, 0, mbps(3)),
            ],
            NodeId(0),
            NodeId(1),
        )
        .unwrap();
        assert_eq!(brute_force_min_cut(&net).unwrap().kbps(), 5000);
    }

    #[test]
    fn refuses_large_networks() {
        let net = FlowNetwork::new(21, vec![], NodeId(0), NodeId(20)).unwrap();
        assert!(matches!(
            brute_force_min_cut(&net),
            Err(GraphError::TooLargeForEnumeration { .. })
        ));
    }
}
