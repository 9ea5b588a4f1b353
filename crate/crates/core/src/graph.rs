//! Weighted undirected conversation graph.
//!
//! Vertices are usernames; edge weights accumulate the interaction scores
//! assigned during extraction. The graph is simple (no self-loops, no
//! multi-edges) and immutable once built, with vertex indices assigned in
//! insertion order so downstream computations are reproducible.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::util::fmt_f64;

#[derive(Debug, Clone)]
pub struct ConversationGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    /// Symmetric adjacency; neighbor lists sorted by vertex index.
    adj: Vec<Vec<(usize, f64)>>,
    /// Canonical edge list with u < v, sorted.
    edges: Vec<(usize, usize, f64)>,
    target: usize,
}

impl ConversationGraph {
    /// Test/CLI constructor over numbered vertices named `u0..u{n-1}`.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)], target: usize) -> Self {
        let mut builder = GraphBuilder::new();
        for i in 0..n {
            builder.add_vertex(&format!("u{i}"));
        }
        for &(u, v, w) in edges {
            builder.add_edge_weight(&format!("u{u}"), &format!("u{v}"), w);
        }
        builder.set_target(&format!("u{target}"));
        builder.build().expect("valid edge list")
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Neighbors of `v` with edge weights, ordered by vertex index.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    /// Unweighted degree.
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as `(u, v, weight)` with `u < v`, sorted by `(u, v)`.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.adj[u]
            .binary_search_by(|(n, _)| n.cmp(&v))
            .ok()
            .map(|i| self.adj[u][i].1)
    }

    pub fn total_edge_weight(&self) -> f64 {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }

    pub fn has_edges(&self) -> bool {
        !self.edges.is_empty()
    }

    /// Serialize as CSV: a vertex block of `#vertex,<name>,<0|1>` rows (1
    /// marks the target author) followed by `u,v,weight` edge rows, weights
    /// at 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for (i, name) in self.names.iter().enumerate() {
            let flag = if i == self.target { "1" } else { "0" };
            w.write_record(["#vertex", name, flag])?;
        }
        for &(u, v, weight) in &self.edges {
            w.write_record([&self.names[u], &self.names[v], &fmt_f64(weight)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_reader(reader);
        let mut builder = GraphBuilder::new();
        let mut target: Option<String> = None;
        for record in r.records() {
            let record = record?;
            if record.len() != 3 {
                return Err(Error::GraphFormat(format!(
                    "expected 3 fields, got {}",
                    record.len()
                )));
            }
            if &record[0] == "#vertex" {
                let name = record[1].to_string();
                builder.add_vertex(&name);
                match &record[2] {
                    "1" => {
                        if target.replace(name).is_some() {
                            return Err(Error::GraphFormat("multiple target vertices".into()));
                        }
                    }
                    "0" => {}
                    other => {
                        return Err(Error::GraphFormat(format!("bad is_target flag '{other}'")))
                    }
                }
            } else {
                let (u, v) = (&record[0], &record[1]);
                for name in [u, v] {
                    if builder.vertex(name).is_none() {
                        return Err(Error::GraphFormat(format!(
                            "edge references unknown vertex '{name}'"
                        )));
                    }
                }
                let weight: f64 = record[2]
                    .parse()
                    .map_err(|_| Error::GraphFormat(format!("bad weight '{}'", &record[2])))?;
                builder.add_edge_weight(u, v, weight);
            }
        }
        let target = target.ok_or_else(|| Error::GraphFormat("no target vertex".into()))?;
        builder.set_target(&target);
        builder.build()
    }
}

/// Accumulates vertices and edge weights; vertices keep insertion order.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    weights: BTreeMap<(usize, usize), f64>,
    target: Option<usize>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a vertex if new; returns its index either way.
    pub fn add_vertex(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Add `weight` to the undirected edge `{u, v}`, creating it if absent.
    /// Self-loops are ignored; weights must be positive.
    pub fn add_edge_weight(&mut self, u: &str, v: &str, weight: f64) {
        debug_assert!(weight > 0.0, "edge weights must be positive");
        let ui = self.add_vertex(u);
        let vi = self.add_vertex(v);
        if ui == vi {
            return;
        }
        let key = (ui.min(vi), ui.max(vi));
        *self.weights.entry(key).or_insert(0.0) += weight;
    }

    pub fn set_target(&mut self, name: &str) {
        let i = self.add_vertex(name);
        self.target = Some(i);
    }

    pub fn build(self) -> Result<ConversationGraph> {
        let target = self
            .target
            .ok_or_else(|| Error::GraphFormat("graph has no target vertex".into()))?;
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.names.len()];
        let mut edges = Vec::with_capacity(self.weights.len());
        for (&(u, v), &w) in &self.weights {
            adj[u].push((v, w));
            adj[v].push((u, w));
            edges.push((u, v, w));
        }
        for list in &mut adj {
            list.sort_by_key(|&(n, _)| n);
        }
        Ok(ConversationGraph {
            names: self.names,
            index: self.index,
            adj,
            edges,
            target,
        })
    }
}
