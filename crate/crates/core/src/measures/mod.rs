//! Topological measures of conversational graphs.
//!
//! Local measures characterize one vertex (the target author, for features);
//! global measures describe the whole graph, including the per-graph average
//! of every local measure. Spectral measures (eigenvector, PageRank, HITS)
//! use edge weights; path-, degree-, and subgraph-based measures operate on
//! the unweighted skeleton so hop counts stay well-defined.
//!
//! Conversational graphs are frequently disconnected, so every measure is
//! defined to return a finite number on any graph: closeness is taken over
//! the reachable set, eccentricity within the component, distance averages
//! over finite pairs only, and assortativity is 0 under degenerate variance.

mod cliques;
mod kcore;
mod paths;
mod spectral;

pub use cliques::maximal_clique_count;
pub use kcore::coreness;
pub use paths::{betweenness, closeness, eccentricity};
pub use spectral::{
    eigenvector_centrality, eigenvector_power, hits, hits_power, pagerank, PowerResult,
};

use crate::error::{Error, Result};
use crate::graph::ConversationGraph;
use crate::util::mean;

pub const PAGERANK_DAMPING: f64 = 0.85;

/// Local measure names, in canonical feature order.
pub const LOCAL_MEASURE_NAMES: [&str; 9] = [
    "degree_centrality",
    "eigenvector",
    "pagerank",
    "hub",
    "authority",
    "betweenness",
    "closeness",
    "eccentricity",
    "coreness",
];

/// Scalar global measure names, in canonical feature order.
pub const GLOBAL_MEASURE_NAMES: [&str; 7] = [
    "vertex_count",
    "edge_count",
    "density",
    "diameter",
    "average_distance",
    "clique_count",
    "degree_assortativity",
];

/// Normalized degree of `v`: deg(v)/(n-1), or 0 on a single-vertex graph.
pub fn degree_centrality(g: &ConversationGraph, v: usize) -> Result<f64> {
    check_vertex(g, v)?;
    Ok(degree_centrality_all(g)[v])
}

pub fn degree_centrality_all(g: &ConversationGraph) -> Vec<f64> {
    let n = g.vertex_count();
    if n <= 1 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|v| g.degree(v) as f64 / (n - 1) as f64)
        .collect()
}

/// Pearson correlation of endpoint degrees over the edge list taken in both
/// orientations; 0 when either variance vanishes.
pub fn degree_assortativity(g: &ConversationGraph) -> f64 {
    if g.edge_count() == 0 {
        return 0.0;
    }
    let mut xs = Vec::with_capacity(2 * g.edge_count());
    let mut ys = Vec::with_capacity(2 * g.edge_count());
    for &(u, v, _) in g.edges() {
        let (du, dv) = (g.degree(u) as f64, g.degree(v) as f64);
        xs.push(du);
        ys.push(dv);
        xs.push(dv);
        ys.push(du);
    }
    let mx = mean(&xs);
    let my = mean(&ys);
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys.iter()) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    if vx <= 0.0 || vy <= 0.0 {
        0.0
    } else {
        cov / (vx.sqrt() * vy.sqrt())
    }
}

/// The nine local measures of a single vertex, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMeasures {
    pub degree_centrality: f64,
    pub eigenvector: f64,
    pub pagerank: f64,
    pub hub: f64,
    pub authority: f64,
    pub betweenness: f64,
    pub closeness: f64,
    pub eccentricity: f64,
    pub coreness: f64,
}

impl LocalMeasures {
    pub fn to_array(self) -> [f64; 9] {
        [
            self.degree_centrality,
            self.eigenvector,
            self.pagerank,
            self.hub,
            self.authority,
            self.betweenness,
            self.closeness,
            self.eccentricity,
            self.coreness,
        ]
    }
}

/// All nine local measures for every vertex of a graph.
#[derive(Debug, Clone)]
pub struct LocalVectors {
    pub degree_centrality: Vec<f64>,
    pub eigenvector: Vec<f64>,
    pub pagerank: Vec<f64>,
    pub hub: Vec<f64>,
    pub authority: Vec<f64>,
    pub betweenness: Vec<f64>,
    pub closeness: Vec<f64>,
    pub eccentricity: Vec<f64>,
    pub coreness: Vec<f64>,
}

impl LocalVectors {
    pub fn at(&self, v: usize) -> LocalMeasures {
        LocalMeasures {
            degree_centrality: self.degree_centrality[v],
            eigenvector: self.eigenvector[v],
            pagerank: self.pagerank[v],
            hub: self.hub[v],
            authority: self.authority[v],
            betweenness: self.betweenness[v],
            closeness: self.closeness[v],
            eccentricity: self.eccentricity[v],
            coreness: self.coreness[v],
        }
    }

    /// Arithmetic mean of each measure over all vertices, canonical order.
    pub fn averages(&self) -> [f64; 9] {
        [
            mean(&self.degree_centrality),
            mean(&self.eigenvector),
            mean(&self.pagerank),
            mean(&self.hub),
            mean(&self.authority),
            mean(&self.betweenness),
            mean(&self.closeness),
            mean(&self.eccentricity),
            mean(&self.coreness),
        ]
    }
}

pub fn local_vectors(g: &ConversationGraph) -> LocalVectors {
    let (hub, authority) = hits(g);
    LocalVectors {
        degree_centrality: degree_centrality_all(g),
        eigenvector: eigenvector_centrality(g),
        pagerank: pagerank(g, PAGERANK_DAMPING).expect("valid default damping"),
        hub,
        authority,
        betweenness: betweenness(g),
        closeness: closeness(g),
        eccentricity: eccentricity(g),
        coreness: coreness(g),
    }
}

/// Local measures of one vertex.
pub fn local_measures(g: &ConversationGraph, v: usize) -> Result<LocalMeasures> {
    check_vertex(g, v)?;
    Ok(local_vectors(g).at(v))
}

/// Whole-graph measures, including the averages of the local measures.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalMeasures {
    pub vertex_count: f64,
    pub edge_count: f64,
    pub density: f64,
    pub diameter: f64,
    pub average_distance: f64,
    pub clique_count: f64,
    pub degree_assortativity: f64,
    /// Mean of each local measure over all vertices, canonical order.
    pub avg_local: [f64; 9],
}

impl GlobalMeasures {
    pub fn scalars(&self) -> [f64; 7] {
        [
            self.vertex_count,
            self.edge_count,
            self.density,
            self.diameter,
            self.average_distance,
            self.clique_count,
            self.degree_assortativity,
        ]
    }
}

pub fn global_measures(g: &ConversationGraph) -> GlobalMeasures {
    global_from_locals(g, &local_vectors(g))
}

fn global_from_locals(g: &ConversationGraph, locals: &LocalVectors) -> GlobalMeasures {
    let n = g.vertex_count();
    let m = g.edge_count();
    let density = if n >= 2 {
        2.0 * m as f64 / (n * (n - 1)) as f64
    } else {
        0.0
    };
    let (diameter, average_distance) = paths::distance_stats(g);
    GlobalMeasures {
        vertex_count: n as f64,
        edge_count: m as f64,
        density,
        diameter,
        average_distance,
        clique_count: maximal_clique_count(g) as f64,
        degree_assortativity: degree_assortativity(g),
        avg_local: locals.averages(),
    }
}

/// Every measure of one graph, computed in a single pass.
#[derive(Debug, Clone)]
pub struct GraphMeasures {
    pub local: LocalVectors,
    pub global: GlobalMeasures,
}

pub fn compute_all(g: &ConversationGraph) -> GraphMeasures {
    let local = local_vectors(g);
    let global = global_from_locals(g, &local);
    GraphMeasures { local, global }
}

/// The 25 per-graph feature values: target-vertex locals, global scalars,
/// averaged locals.
pub fn feature_block(g: &ConversationGraph) -> [f64; 25] {
    let measures = compute_all(g);
    let mut block = [0.0; 25];
    block[..9].copy_from_slice(&measures.local.at(g.target()).to_array());
    block[9..16].copy_from_slice(&measures.global.scalars());
    block[16..].copy_from_slice(&measures.global.avg_local);
    block
}

/// Named rows for the `measures` CLI subcommand: target locals, global
/// scalars, then averaged locals.
pub fn measure_report(g: &ConversationGraph) -> Vec<(String, f64)> {
    let block = feature_block(g);
    block_names().into_iter().zip(block).collect()
}

/// The 25 per-graph measure names in block order.
pub fn block_names() -> Vec<String> {
    LOCAL_MEASURE_NAMES
        .iter()
        .map(|n| n.to_string())
        .chain(GLOBAL_MEASURE_NAMES.iter().map(|n| n.to_string()))
        .chain(LOCAL_MEASURE_NAMES.iter().map(|n| format!("avg_{n}")))
        .collect()
}

fn check_vertex(g: &ConversationGraph, v: usize) -> Result<()> {
    if v >= g.vertex_count() {
        Err(Error::UnknownVertex(format!("index {v} out of range")))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(n: usize) -> ConversationGraph {
        let edges: Vec<(usize, usize, f64)> = (1..n).map(|i| (0, i, 1.0)).collect();
        ConversationGraph::from_edges(n, &edges, 0)
    }

    fn complete(n: usize) -> ConversationGraph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v, 1.0));
            }
        }
        ConversationGraph::from_edges(n, &edges, 0)
    }

    #[test]
    fn star_degree_centrality() {
        let g = star(5);
        assert_eq!(degree_centrality(&g, 0).unwrap(), 1.0);
        assert_eq!(degree_centrality(&g, 1).unwrap(), 0.25);
    }

    #[test]
    fn single_vertex_degree_centrality_is_zero() {
        let g = ConversationGraph::from_edges(1, &[], 0);
        assert_eq!(degree_centrality(&g, 0).unwrap(), 0.0);
    }

    #[test]
    fn unknown_vertex_is_an_error() {
        let g = star(3);
        assert!(matches!(
            degree_centrality(&g, 3),
            Err(Error::UnknownVertex(_))
        ));
        assert!(matches!(
            local_measures(&g, 9),
            Err(Error::UnknownVertex(_))
        ));
    }

    #[test]
    fn star_assortativity_is_minus_one() {
        // Every edge joins degree 4 to degree 1; direct Pearson gives -1.
        assert!((degree_assortativity(&star(5)) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn regular_graph_assortativity_is_zero() {
        // All degrees equal: variance 0 => defined as 0.
        assert_eq!(degree_assortativity(&complete(4)), 0.0);
    }

    #[test]
    fn k4_global_measures() {
        let g = complete(4);
        let gm = global_measures(&g);
        assert_eq!(gm.density, 1.0);
        assert_eq!(gm.diameter, 1.0);
        assert_eq!(gm.clique_count, 1.0);
        assert_eq!(gm.avg_local[0], 1.0);
    }

    #[test]
    fn single_vertex_conventions() {
        let g = ConversationGraph::from_edges(1, &[], 0);
        let lm = local_measures(&g, 0).unwrap();
        assert_eq!(lm.pagerank, 1.0);
        let rest = [
            lm.degree_centrality,
            lm.eigenvector,
            lm.hub,
            lm.authority,
            lm.betweenness,
            lm.closeness,
            lm.eccentricity,
            lm.coreness,
        ];
        assert_eq!(rest, [0.0; 8]);
        let gm = global_measures(&g);
        assert_eq!(gm.vertex_count, 1.0);
        assert_eq!(gm.edge_count, 0.0);
        assert_eq!(gm.density, 0.0);
        assert_eq!(gm.degree_assortativity, 0.0);
    }

    #[test]
    fn k3_local_measures() {
        let g = complete(3);
        let lm = local_measures(&g, g.target()).unwrap();
        assert_eq!(lm.degree_centrality, 1.0);
        assert_eq!(lm.betweenness, 0.0);
        assert_eq!(lm.closeness, 1.0);
        assert_eq!(lm.coreness, 2.0);
    }

    #[test]
    fn local_measures_match_vectors() {
        let g = star(6);
        let vectors = local_vectors(&g);
        for v in 0..g.vertex_count() {
            assert_eq!(local_measures(&g, v).unwrap(), vectors.at(v));
        }
    }

    #[test]
    fn block_names_are_unique_and_25() {
        let names = block_names();
        assert_eq!(names.len(), 25);
        let mut dedup = names.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 25);
    }
}
