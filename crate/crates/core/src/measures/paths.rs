//! Distance-based measures on the unweighted skeleton: BFS distances,
//! Brandes betweenness, closeness, eccentricity, diameter, average distance.

use std::collections::VecDeque;

use crate::graph::ConversationGraph;

pub(crate) const UNREACHABLE: u32 = u32::MAX;

/// BFS hop distances from `source`; `UNREACHABLE` marks other components.
pub(crate) fn bfs_distances(g: &ConversationGraph, source: usize) -> Vec<u32> {
    let n = g.vertex_count();
    let mut dist = vec![UNREACHABLE; n];
    dist[source] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        for &(u, _) in g.neighbors(v) {
            if dist[u] == UNREACHABLE {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Betweenness centrality by Brandes' algorithm over unweighted shortest
/// paths, normalized by (n-1)(n-2)/2 pairs; zero for n < 3.
pub fn betweenness(g: &ConversationGraph) -> Vec<f64> {
    let n = g.vertex_count();
    let mut centrality = vec![0.0; n];
    if n < 3 {
        return centrality;
    }
    let mut sigma = vec![0.0_f64; n];
    let mut dist = vec![-1_i64; n];
    let mut delta = vec![0.0_f64; n];
    let mut predecessors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        let mut stack: Vec<usize> = Vec::with_capacity(n);
        for v in 0..n {
            sigma[v] = 0.0;
            dist[v] = -1;
            delta[v] = 0.0;
            predecessors[v].clear();
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &(u, _) in g.neighbors(v) {
                if dist[u] < 0 {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
                if dist[u] == dist[v] + 1 {
                    sigma[u] += sigma[v];
                    predecessors[u].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &predecessors[w] {
                delta[v] += (sigma[v] / sigma[w]) * (1.0 + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    // The accumulation visits each unordered pair from both endpoints.
    let scale = ((n - 1) * (n - 2)) as f64;
    for c in &mut centrality {
        *c /= scale;
    }
    centrality
}

/// Closeness as |R(v)| / sum of distances to the reachable set R(v)
/// (excluding v itself); 0 for isolated vertices.
pub fn closeness(g: &ConversationGraph) -> Vec<f64> {
    let n = g.vertex_count();
    (0..n)
        .map(|v| {
            let dist = bfs_distances(g, v);
            let mut reachable = 0u32;
            let mut total = 0u64;
            for (u, &d) in dist.iter().enumerate() {
                if u != v && d != UNREACHABLE {
                    reachable += 1;
                    total += u64::from(d);
                }
            }
            if reachable == 0 {
                0.0
            } else {
                f64::from(reachable) / total as f64
            }
        })
        .collect()
}

/// Greatest finite BFS distance from each vertex; 0 for isolated vertices.
pub fn eccentricity(g: &ConversationGraph) -> Vec<f64> {
    let n = g.vertex_count();
    (0..n)
        .map(|v| {
            bfs_distances(g, v)
                .into_iter()
                .filter(|&d| d != UNREACHABLE)
                .max()
                .unwrap_or(0) as f64
        })
        .collect()
}

/// Diameter and mean distance over finite-distance unordered pairs (both 0
/// when no such pair exists).
pub(crate) fn distance_stats(g: &ConversationGraph) -> (f64, f64) {
    let n = g.vertex_count();
    let mut diameter = 0u32;
    let mut total = 0u64;
    let mut pairs = 0u64;
    for v in 0..n {
        let dist = bfs_distances(g, v);
        for u in (v + 1)..n {
            let d = dist[u];
            if d != UNREACHABLE {
                diameter = diameter.max(d);
                total += u64::from(d);
                pairs += 1;
            }
        }
    }
    let average = if pairs == 0 {
        0.0
    } else {
        total as f64 / pairs as f64
    };
    (f64::from(diameter), average)
}
