use std::collections::VecDeque;

use super::residual::Residual;
use super::SolveStats;

pub(super) fn run(r: &mut Residual) -> SolveStats {
    let n = r.node_count();
    let mut stats = SolveStats::default();
    let mut level = vec![usize::MAX; n];
    let mut next_arc = vec![0usize; n];
    loop {
        stats.phases += 1;
        if !build_levels(r, &mut level) {
            return stats;
        }
        next_arc.iter_mut().for_each(|p| *p = 0);
        while let Some(path) = blocking_path(r, &level, &mut next_arc) {
            r.augment(&path);
            stats.augmentations += 1;
        }
    }
}

fn build_levels(r: &Residual, level: &mut [usize]) -> bool {
    level.iter_mut().for_each(|l| *l = usize::MAX);
    level[r.source] = 0;
    let mut queue = VecDeque::from([r.source]);
    while let Some(u) = queue.pop_front() {
        for &e in &r.adjacency[u] {
            let v = r.head[e];
            if r.residual[e] > 0 && level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    level[r.sink] != usize::MAX
}

/// Next source-sink path in the level graph, advancing per-node arc pointers
/// past dead ends so each phase does O(VE) work.
fn blocking_path(r: &Residual, level: &[usize], next_arc: &mut [usize]) -> Option<Vec<usize>> {
    let mut path: Vec<usize> = Vec::new();
    let mut u = r.source;
    loop {
        if u == r.sink {
            return Some(path);
        }
        let adj = &r.adjacency[u];
        let mut advanced = false;
        while next_arc[u] < adj.len() {
            let e = adj[next_arc[u]];
            let v = r.head[e];
            if r.residual[e] > 0 && level[v] == level[u] + 1 {
                path.push(e);
                u = v;
                advanced = true;
                break;
            }
            next_arc[u] += 1;
        }
        if !advanced {
            // Dead end: retreat and retire the arc that led here.
            let e = path.pop()?;
            u = r.head[e ^ 1];
            next_arc[u] += 1;
        }
    }
}
