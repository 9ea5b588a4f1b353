//! k-core decomposition by iterative minimum-degree peeling.

use crate::graph::ConversationGraph;

/// Coreness of each vertex: the largest k such that the vertex belongs to an
/// induced subgraph with minimum degree k. Peels the minimum-degree vertex
/// on the unweighted skeleton until the graph is empty; quadratic, which is
/// plenty for conversation-sized graphs.
pub fn coreness(g: &ConversationGraph) -> Vec<f64> {
    let n = g.vertex_count();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut core = vec![0usize; n];
    let mut k = 0usize;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (degree[v], v))
            .expect("a vertex remains");
        k = k.max(degree[v]);
        core[v] = k;
        removed[v] = true;
        for &(u, _) in g.neighbors(v) {
            if !removed[u] {
                degree[u] -= 1;
            }
        }
    }
    core.into_iter().map(|c| c as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_a_two_core() {
        let g = ConversationGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], 0);
        assert_eq!(coreness(&g), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn star_peels_to_ones() {
        let edges: Vec<(usize, usize, f64)> = (1..5).map(|i| (0, i, 1.0)).collect();
        let g = ConversationGraph::from_edges(5, &edges, 0);
        assert_eq!(coreness(&g), vec![1.0; 5]);
    }

    #[test]
    fn k4_plus_pendant() {
        let mut edges = vec![(4, 0, 1.0)];
        for u in 0..4 {
            for v in (u + 1)..4 {
                edges.push((u, v, 1.0));
            }
        }
        let g = ConversationGraph::from_edges(5, &edges, 0);
        let core = coreness(&g);
        assert_eq!(core[4], 1.0);
        for v in 0..4 {
            assert_eq!(core[v], 3.0);
        }
    }

    #[test]
    fn isolated_vertices_have_core_zero() {
        let g = ConversationGraph::from_edges(3, &[(0, 1, 1.0)], 0);
        assert_eq!(coreness(&g), vec![1.0, 1.0, 0.0]);
    }
}
