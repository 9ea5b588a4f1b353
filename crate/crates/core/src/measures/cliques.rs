//! Maximal-clique counting via Bron–Kerbosch with pivoting.

use crate::graph::ConversationGraph;

/// Fixed-capacity bitset over vertex indices.
#[derive(Clone)]
struct VertexSet {
    words: Vec<u64>,
}

impl VertexSet {
    fn empty(n: usize) -> Self {
        VertexSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn full(n: usize) -> Self {
        let mut set = Self::empty(n);
        for v in 0..n {
            set.insert(v);
        }
        set
    }

    fn insert(&mut self, v: usize) {
        self.words[v / 64] |= 1 << (v % 64);
    }

    fn remove(&mut self, v: usize) {
        self.words[v / 64] &= !(1 << (v % 64));
    }

    fn contains(&self, v: usize) -> bool {
        self.words[v / 64] >> (v % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    fn intersection_len(&self, other: &VertexSet) -> u32 {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            (0..64)
                .filter(move |b| word >> b & 1 == 1)
                .map(move |b| i * 64 + b)
        })
    }
}

/// Number of maximal cliques with at least two vertices.
pub fn maximal_clique_count(g: &ConversationGraph) -> usize {
    let n = g.vertex_count();
    if n == 0 {
        return 0;
    }
    let neighbors: Vec<VertexSet> = (0..n)
        .map(|v| {
            let mut set = VertexSet::empty(n);
            for &(u, _) in g.neighbors(v) {
                set.insert(u);
            }
            set
        })
        .collect();
    let mut count = 0usize;
    expand(
        0,
        VertexSet::full(n),
        VertexSet::empty(n),
        &neighbors,
        &mut count,
    );
    count
}

fn expand(
    clique_size: usize,
    mut candidates: VertexSet,
    mut excluded: VertexSet,
    neighbors: &[VertexSet],
    count: &mut usize,
) {
    if candidates.is_empty() {
        if excluded.is_empty() && clique_size >= 2 {
            *count += 1;
        }
        return;
    }
    // Pivot on the vertex covering the most candidates.
    let pivot = candidates
        .iter()
        .chain(excluded.iter())
        .max_by_key(|&v| {
            (
                neighbors[v].intersection_len(&candidates),
                std::cmp::Reverse(v),
            )
        })
        .expect("candidates is non-empty");
    let todo: Vec<usize> = candidates
        .iter()
        .filter(|&v| !neighbors[pivot].contains(v))
        .collect();
    for v in todo {
        expand(
            clique_size + 1,
            candidates.intersection(&neighbors[v]),
            excluded.intersection(&neighbors[v]),
            neighbors,
            count,
        );
        candidates.remove(v);
        excluded.insert(v);
    }
}
