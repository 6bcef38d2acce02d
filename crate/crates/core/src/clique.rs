//! k-clique enumeration and the long-edge clique statistics.
//!
//! Enumeration orients every edge along a degeneracy order and extends
//! partial cliques by intersecting sorted out-neighbour lists, so each
//! k-clique is produced exactly once from its lowest-ranked vertex.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SpatialGraph;

/// A k-clique with its vertices in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Clique {
    pub vertices: Vec<u32>,
    /// Lengths of the `k(k-1)/2` clique edges in lexicographic pair order.
    pub edge_lengths: Vec<f64>,
    pub max_edge_length: f64,
}

impl Clique {
    fn from_vertices(graph: &SpatialGraph, mut vertices: Vec<u32>) -> Self {
        vertices.sort_unstable();
        let mut edge_lengths = Vec::with_capacity(vertices.len() * (vertices.len() - 1) / 2);
        for (a, &u) in vertices.iter().enumerate() {
            for &v in &vertices[a + 1..] {
                edge_lengths.push(graph.edge_length(u, v).expect("clique pair is an edge"));
            }
        }
        let max_edge_length = edge_lengths.iter().copied().fold(0.0, f64::max);
        Clique {
            vertices,
            edge_lengths,
            max_edge_length,
        }
    }

    /// Number of clique edges with length `>= r`.
    pub fn long_edge_count(&self, r: f64) -> usize {
        self.edge_lengths.iter().filter(|&&l| l >= r).count()
    }
}

/// Orientation of a graph along a degeneracy order.
pub struct Oriented {
    offsets: Vec<usize>,
    out: Vec<u32>,
}

impl Oriented {
    pub fn new(graph: &SpatialGraph) -> Self {
        let rank = degeneracy_rank(graph);
        let n = graph.num_vertices();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut out = Vec::with_capacity(graph.num_edges());
        for v in 0..n as u32 {
            out.extend(
                graph
                    .neighbors(v)
                    .iter()
                    .copied()
                    .filter(|&w| rank[w as usize] > rank[v as usize]),
            );
            offsets.push(out.len());
        }
        Oriented { offsets, out }
    }

    #[inline]
    pub fn out(&self, v: u32) -> &[u32] {
        &self.out[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }
}

/// Position of every vertex in a smallest-last (degeneracy) ordering.
pub fn degeneracy_rank(graph: &SpatialGraph) -> Vec<u32> {
    let n = graph.num_vertices();
    let mut degree: Vec<usize> = (0..n as u32).map(|v| graph.degree(v)).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); max_deg + 1];
    for (v, &d) in degree.iter().enumerate() {
        buckets[d].push(v as u32);
    }
    let mut removed = vec![false; n];
    let mut rank = vec![0u32; n];
    let mut next = 0u32;
    let mut cursor = 0usize;
    while (next as usize) < n {
        cursor = cursor.min(max_deg);
        while buckets[cursor].is_empty() {
            cursor += 1;
        }
        let v = buckets[cursor].pop().unwrap();
        // stale bucket entries are skipped lazily
        if removed[v as usize] || degree[v as usize] != cursor {
            continue;
        }
        removed[v as usize] = true;
        rank[v as usize] = next;
        next += 1;
        for &w in graph.neighbors(v) {
            let w = w as usize;
            if !removed[w] {
                degree[w] -= 1;
                buckets[degree[w]].push(w as u32);
                cursor = cursor.min(degree[w]);
            }
        }
    }
    rank
}

fn intersect_into(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

fn extend(
    dag: &Oriented,
    k: usize,
    stack: &mut Vec<u32>,
    candidates: &[u32],
    buffers: &mut [Vec<u32>],
    visit: &mut impl FnMut(&[u32]),
) {
    if stack.len() + 1 == k {
        for &c in candidates {
            stack.push(c);
            visit(stack);
            stack.pop();
        }
        return;
    }
    let (head, tail) = buffers.split_first_mut().expect("buffer per depth");
    for &c in candidates {
        intersect_into(candidates, dag.out(c), head);
        if head.len() + stack.len() + 1 < k {
            continue;
        }
        stack.push(c);
        let next = std::mem::take(head);
        extend(dag, k, stack, &next, tail, visit);
        *head = next;
        stack.pop();
    }
}

fn cliques_rooted_at(dag: &Oriented, root: u32, k: usize, visit: &mut impl FnMut(&[u32])) {
    let mut stack = Vec::with_capacity(k);
    let mut buffers = vec![Vec::new(); k];
    stack.push(root);
    extend(dag, k, &mut stack, dag.out(root), &mut buffers, visit);
}

/// Calls `visit` once per k-clique with its vertices in degeneracy order.
pub fn for_each_k_clique(graph: &SpatialGraph, k: usize, mut visit: impl FnMut(&[u32])) {
    assert!(k >= 2, "clique size must be at least 2");
    let dag = Oriented::new(graph);
    for root in 0..graph.num_vertices() as u32 {
        cliques_rooted_at(&dag, root, k, &mut visit);
    }
}

/// Every k-clique exactly once, sorted lexicographically.
pub fn enumerate_k_cliques(graph: &SpatialGraph, k: usize) -> Vec<Clique> {
    let mut cliques = Vec::new();
    for_each_k_clique(graph, k, |c| {
        cliques.push(Clique::from_vertices(graph, c.to_vec()))
    });
    cliques.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    cliques
}

/// Per-graph clique counts at a threshold `r` and localisation radius `1/epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CliqueStatistics {
    pub k: usize,
    pub r: f64,
    pub epsilon: f64,
    /// Cliques with at least one edge of length `>= r`.
    pub w: u64,
    /// Cliques with exactly `k-1` edges `>= r` and every other edge `<= 1/epsilon`.
    pub w_localized: u64,
    /// `w_localized` with the long edges additionally sharing one endpoint.
    pub w_localized_shared: u64,
    /// Total number of k-cliques.
    pub k_total: u64,
    /// Cliques whose pairwise distances are all `<= 1/epsilon`.
    pub k_compact: u64,
    /// Largest edge length over all k-cliques; `None` without any clique.
    pub e_star: Option<f64>,
}

impl CliqueStatistics {
    pub fn new(k: usize, r: f64, epsilon: f64) -> Self {
        CliqueStatistics {
            k,
            r,
            epsilon,
            w: 0,
            w_localized: 0,
            w_localized_shared: 0,
            k_total: 0,
            k_compact: 0,
            e_star: None,
        }
    }

    /// Long-edge cliques that are not localised.
    pub fn w_bar(&self) -> u64 {
        self.w - self.w_localized
    }

    /// Folds one clique from its edge lengths in lexicographic pair order.
    fn record(&mut self, lengths: &[f64], scratch: &mut [usize]) {
        let k = self.k;
        let radius = 1.0 / self.epsilon;
        let mut long = 0;
        let mut max_len = 0.0f64;
        let mut short_ok = true;
        let mut compact = true;
        scratch.iter_mut().for_each(|s| *s = 0);
        let mut p = 0;
        for a in 0..k {
            for b in a + 1..k {
                let len = lengths[p];
                p += 1;
                max_len = max_len.max(len);
                if len > radius {
                    compact = false;
                }
                if len >= self.r {
                    long += 1;
                    scratch[a] += 1;
                    scratch[b] += 1;
                } else if len > radius {
                    short_ok = false;
                }
            }
        }
        self.k_total += 1;
        if compact {
            self.k_compact += 1;
        }
        if long > 0 {
            self.w += 1;
        }
        if long == k - 1 && short_ok {
            self.w_localized += 1;
            if scratch.iter().any(|&c| c == k - 1) {
                self.w_localized_shared += 1;
            }
        }
        self.e_star = Some(self.e_star.map_or(max_len, |e| e.max(max_len)));
    }

    /// Sum of counts and max of `e_star`.
    pub fn merge(&mut self, other: &CliqueStatistics) {
        self.w += other.w;
        self.w_localized += other.w_localized;
        self.w_localized_shared += other.w_localized_shared;
        self.k_total += other.k_total;
        self.k_compact += other.k_compact;
        self.e_star = match (self.e_star, other.e_star) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }

    pub fn check_invariants(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Experiment(format!("clique statistics: {m}")));
        if !(self.w_localized <= self.w && self.w <= self.k_total) {
            return bad(format!(
                "expected w_localized <= w <= k_total, got {} {} {}",
                self.w_localized, self.w, self.k_total
            ));
        }
        if self.w_localized_shared > self.w_localized || self.k_compact > self.k_total {
            return bad("refined count exceeds its parent".into());
        }
        match self.e_star {
            Some(e) if self.w >= 1 && e < self.r => bad(format!("e_star {e} < r with w >= 1")),
            Some(e) if self.w == 0 && e >= self.r => bad(format!("e_star {e} >= r with w = 0")),
            None if self.k_total > 0 => bad("missing e_star".into()),
            _ => Ok(()),
        }
    }
}

fn gather_lengths(
    graph: &SpatialGraph,
    vertices: &[u32],
    sorted: &mut Vec<u32>,
    lengths: &mut Vec<f64>,
) {
    sorted.clear();
    sorted.extend_from_slice(vertices);
    sorted.sort_unstable();
    lengths.clear();
    for (a, &u) in sorted.iter().enumerate() {
        for &v in &sorted[a + 1..] {
            lengths.push(graph.edge_length(u, v).expect("clique pair is an edge"));
        }
    }
}

fn validate_thresholds(r: f64, epsilon: f64) {
    assert!(r > 0.0 && epsilon > 0.0, "r and epsilon must be positive");
}

/// All clique statistics in one pass over the k-cliques.
pub fn clique_statistics(graph: &SpatialGraph, k: usize, r: f64, epsilon: f64) -> CliqueStatistics {
    validate_thresholds(r, epsilon);
    let mut stats = CliqueStatistics::new(k, r, epsilon);
    let mut sorted = Vec::with_capacity(k);
    let mut lengths = Vec::new();
    let mut scratch = vec![0usize; k];
    for_each_k_clique(graph, k, |c| {
        gather_lengths(graph, c, &mut sorted, &mut lengths);
        stats.record(&lengths, &mut scratch);
    });
    stats
}

/// Same as [`clique_statistics`], partitioned over root vertices with rayon.
pub fn clique_statistics_par(
    graph: &SpatialGraph,
    k: usize,
    r: f64,
    epsilon: f64,
) -> CliqueStatistics {
    validate_thresholds(r, epsilon);
    let dag = Oriented::new(graph);
    (0..graph.num_vertices() as u32)
        .into_par_iter()
        .fold(
            || {
                (
                    CliqueStatistics::new(k, r, epsilon),
                    Vec::new(),
                    Vec::new(),
                    vec![0usize; k],
                )
            },
            |(mut stats, mut sorted, mut lengths, mut scratch), root| {
                cliques_rooted_at(&dag, root, k, &mut |c| {
                    gather_lengths(graph, c, &mut sorted, &mut lengths);
                    stats.record(&lengths, &mut scratch);
                });
                (stats, sorted, lengths, scratch)
            },
        )
        .map(|(s, ..)| s)
        .reduce(
            || CliqueStatistics::new(k, r, epsilon),
            |mut a, b| {
                a.merge(&b);
                a
            },
        )
}

/// Edge lengths of every k-clique, `k(k-1)/2` values per clique in
/// lexicographic pair order, for re-use across thresholds.
pub fn clique_edge_lengths(graph: &SpatialGraph, k: usize) -> Vec<f64> {
    let mut flat = Vec::new();
    let mut sorted = Vec::with_capacity(k);
    let mut lengths = Vec::new();
    for_each_k_clique(graph, k, |c| {
        gather_lengths(graph, c, &mut sorted, &mut lengths);
        flat.extend_from_slice(&lengths);
    });
    flat
}

/// Statistics from the output of [`clique_edge_lengths`].
pub fn statistics_from_lengths(k: usize, r: f64, epsilon: f64, flat: &[f64]) -> CliqueStatistics {
    validate_thresholds(r, epsilon);
    let stride = k * (k - 1) / 2;
    let mut stats = CliqueStatistics::new(k, r, epsilon);
    let mut scratch = vec![0usize; k];
    for lengths in flat.chunks_exact(stride) {
        stats.record(lengths, &mut scratch);
    }
    stats
}

/// Counts the k-cliques containing the edge `{u, v}`.
pub fn per_edge_clique_count(graph: &SpatialGraph, u: u32, v: u32, k: usize) -> Result<u64> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("clique size {k} < 2")));
    }
    if !graph.has_edge(u, v) {
        return Err(Error::MissingEdge(u, v));
    }
    let mut common = Vec::new();
    intersect_into(graph.neighbors(u), graph.neighbors(v), &mut common);
    Ok(count_cliques_within(graph, &common, k - 2))
}

/// Number of `size`-cliques inside the candidate set (sorted vertex ids).
fn count_cliques_within(graph: &SpatialGraph, candidates: &[u32], size: usize) -> u64 {
    match size {
        0 => 1,
        1 => candidates.len() as u64,
        _ => {
            let mut next = Vec::new();
            let mut total = 0;
            for (i, &c) in candidates.iter().enumerate() {
                intersect_into(&candidates[i + 1..], graph.neighbors(c), &mut next);
                if next.len() + 1 >= size {
                    total += count_cliques_within(graph, &next.clone(), size - 1);
                }
            }
            total
        }
    }
}

/// Largest distance within any k-clique, `None` if the graph has no k-clique.
pub fn max_clique_distance(graph: &SpatialGraph, k: usize) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut sorted = Vec::with_capacity(k);
    let mut lengths = Vec::new();
    for_each_k_clique(graph, k, |c| {
        gather_lengths(graph, c, &mut sorted, &mut lengths);
        let m = lengths.iter().copied().fold(0.0, f64::max);
        best = Some(best.map_or(m, |b| b.max(m)));
    });
    best
}

/// Writes `v1,...,vk,max_len,long_edge_count` rows, one per clique.
pub fn write_clique_csv<W: Write>(graph: &SpatialGraph, k: usize, r: f64, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=k).map(|i| format!("v{i}")).collect();
    header.push("max_len".into());
    header.push("long_edge_count".into());
    w.write_record(&header)?;
    for clique in enumerate_k_cliques(graph, k) {
        let mut row: Vec<String> = clique.vertices.iter().map(|v| v.to_string()).collect();
        row.push(clique.max_edge_length.to_string());
        row.push(clique.long_edge_count(r).to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
