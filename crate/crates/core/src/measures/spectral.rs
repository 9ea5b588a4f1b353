//! Spectral measures: eigenvector centrality, PageRank, and HITS
//! hub/authority scores. These are the measures that use edge weights.

use crate::error::{Error, Result};
use crate::graph::ConversationGraph;

const TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 10_000;

/// Outcome of a power iteration; `converged` is diagnostic only, the last
/// iterate is always returned.
#[derive(Debug, Clone)]
pub struct PowerResult {
    pub values: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

fn power_iteration<F>(n: usize, mut matvec: F) -> PowerResult
where
    F: FnMut(&[f64], &mut [f64]),
{
    let mut x = vec![1.0; n];
    let mut next = vec![0.0; n];
    for iteration in 1..=MAX_ITERATIONS {
        matvec(&x, &mut next);
        let max = next.iter().fold(0.0_f64, |m, &v| m.max(v));
        if max <= 0.0 {
            return PowerResult {
                values: vec![0.0; n],
                converged: true,
                iterations: iteration,
            };
        }
        for v in next.iter_mut() {
            *v /= max;
        }
        let diff = x
            .iter()
            .zip(next.iter())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        std::mem::swap(&mut x, &mut next);
        if diff < TOLERANCE {
            return PowerResult {
                values: x,
                converged: true,
                iterations: iteration,
            };
        }
    }
    PowerResult {
        values: x,
        converged: false,
        iterations: MAX_ITERATIONS,
    }
}

/// Weighted eigenvector centrality, scaled so the maximum entry is exactly 1;
/// all-zeros on edgeless graphs.
///
/// Iterates on A + cI with c the maximum weighted degree: the shift leaves
/// eigenvectors unchanged but keeps the iteration from oscillating on
/// bipartite graphs, and because c scales with the weights the iterate
/// trajectory is invariant under uniform weight scaling.
pub fn eigenvector_power(g: &ConversationGraph) -> PowerResult {
    let n = g.vertex_count();
    if !g.has_edges() {
        return PowerResult {
            values: vec![0.0; n],
            converged: true,
            iterations: 0,
        };
    }
    let shift = (0..n)
        .map(|v| g.neighbors(v).iter().map(|&(_, w)| w).sum::<f64>())
        .fold(0.0_f64, f64::max);
    power_iteration(n, |x, out| {
        for v in 0..n {
            out[v] = shift * x[v];
            for &(u, w) in g.neighbors(v) {
                out[v] += w * x[u];
            }
        }
    })
}

pub fn eigenvector_centrality(g: &ConversationGraph) -> Vec<f64> {
    eigenvector_power(g).values
}

/// HITS scores via power iteration on A·Aᵀ (= A² for an undirected graph),
/// scaled so the maximum entry is exactly 1; all-zeros on edgeless graphs.
/// The same vector is returned for hubs and authorities.
pub fn hits_power(g: &ConversationGraph) -> PowerResult {
    let n = g.vertex_count();
    if !g.has_edges() {
        return PowerResult {
            values: vec![0.0; n],
            converged: true,
            iterations: 0,
        };
    }
    let mut mid = vec![0.0; n];
    power_iteration(n, |x, out| {
        for v in 0..n {
            mid[v] = g.neighbors(v).iter().map(|&(u, w)| w * x[u]).sum();
        }
        for v in 0..n {
            out[v] = g.neighbors(v).iter().map(|&(u, w)| w * mid[u]).sum();
        }
    })
}

/// `(hub, authority)` score vectors; identical on undirected graphs.
pub fn hits(g: &ConversationGraph) -> (Vec<f64>, Vec<f64>) {
    let values = hits_power(g).values;
    (values.clone(), values)
}

/// Weighted PageRank: the walker follows an incident edge with probability
/// proportional to its weight, teleporting with probability 1 - damping.
/// Mass on strength-0 (isolated) vertices is redistributed uniformly. Entries
/// sum to 1.
pub fn pagerank(g: &ConversationGraph, damping: f64) -> Result<Vec<f64>> {
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "damping must be in (0,1), got {damping}"
        )));
    }
    let n = g.vertex_count();
    if n == 0 {
        return Ok(Vec::new());
    }
    let inv_n = 1.0 / n as f64;
    let strength: Vec<f64> = (0..n)
        .map(|v| g.neighbors(v).iter().map(|&(_, w)| w).sum())
        .collect();
    let teleport = (1.0 - damping) * inv_n;
    let mut p = vec![inv_n; n];
    let mut next = vec![0.0; n];
    for _ in 0..MAX_ITERATIONS {
        let dangling: f64 = (0..n).filter(|&v| strength[v] <= 0.0).map(|v| p[v]).sum();
        let base = teleport + damping * dangling * inv_n;
        for slot in next.iter_mut() {
            *slot = base;
        }
        for v in 0..n {
            if strength[v] > 0.0 {
                let share = damping * p[v] / strength[v];
                for &(u, w) in g.neighbors(v) {
                    next[u] += share * w;
                }
            }
        }
        let delta: f64 = p.iter().zip(next.iter()).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut p, &mut next);
        if delta < 1e-12 {
            break;
        }
    }
    let sum: f64 = p.iter().sum();
    for v in p.iter_mut() {
        *v /= sum;
    }
    Ok(p)
}
