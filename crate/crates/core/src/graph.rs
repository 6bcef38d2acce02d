//! Soft random geometric graph construction.
//!
//! Each unordered pair of points `{x, y}` is joined independently with
//! probability `g(x, y) = 1 - exp(-|x - y|_T^{-α})`. Two builders produce
//! the same law: [`build_graph_allpairs`] draws one uniform per pair, and
//! [`build_graph_tiered`] only evaluates nearby pairs directly and samples
//! the sparse long-range edges from a hierarchical grid by binomial
//! thinning.

use std::io::{BufRead, Write};

use log::warn;
use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::point_process::{PointCloud, RngStream};

/// Default cutoff between direct and thinned sampling.
pub const DEFAULT_CUTOFF: f64 = 2.0;

/// Upper limit on the number of grid cells at the finest level.
const MAX_CELLS: usize = 1 << 22;

/// `1 - exp(-dist^{-α})`, with the continuous extension `1` at `dist = 0`.
///
/// Panics on a negative or NaN distance.
#[inline]
pub fn connection_prob(dist: f64, alpha: f64) -> f64 {
    assert!(dist >= 0.0, "connection_prob: negative distance {dist}");
    if dist == 0.0 {
        return 1.0;
    }
    -(-dist.powf(-alpha)).exp_m1()
}

/// Immutable graph over a point cloud in CSR form.
///
/// Neighbour lists are strictly increasing and carry the cached torus length
/// of every realised edge in a parallel array.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGraph {
    cloud: PointCloud,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    lengths: Vec<f64>,
}

impl SpatialGraph {
    /// Builds the graph from an unordered edge list. Duplicates and self-loops are dropped.
    pub fn from_edges(cloud: PointCloud, edges: &[(u32, u32)]) -> Self {
        let n = cloud.len();
        let mut degree = vec![0usize; n + 1];
        for &(u, v) in edges {
            if u != v {
                degree[u as usize] += 1;
                degree[v as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        offsets.push(0);
        for d in &degree[..n] {
            acc += d;
            offsets.push(acc);
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; acc];
        for &(u, v) in edges {
            if u != v {
                neighbors[fill[u as usize]] = v;
                fill[u as usize] += 1;
                neighbors[fill[v as usize]] = u;
                fill[v as usize] += 1;
            }
        }
        let mut lengths = Vec::with_capacity(acc);
        let mut compact_offsets = Vec::with_capacity(n + 1);
        compact_offsets.push(0);
        let mut write = 0;
        for i in 0..n {
            let (lo, hi) = (offsets[i], offsets[i + 1]);
            neighbors[lo..hi].sort_unstable();
            let mut last = None;
            for r in lo..hi {
                let v = neighbors[r];
                if last == Some(v) {
                    continue;
                }
                last = Some(v);
                neighbors[write] = v;
                lengths.push(cloud.distance(i, v as usize));
                write += 1;
            }
            compact_offsets.push(write);
        }
        neighbors.truncate(write);
        SpatialGraph {
            cloud,
            offsets: compact_offsets,
            neighbors,
            lengths,
        }
    }

    /// Graph without edges.
    pub fn empty(cloud: PointCloud) -> Self {
        SpatialGraph::from_edges(cloud, &[])
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn num_vertices(&self) -> usize {
        self.cloud.len()
    }

    pub fn num_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn neighbor_lengths(&self, v: u32) -> &[f64] {
        let v = v as usize;
        &self.lengths[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.neighbors(v).len()
    }

    /// Cached length of edge `{u, v}`, or `None` when absent.
    #[inline]
    pub fn edge_length(&self, u: u32, v: u32) -> Option<f64> {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a)
            .binary_search(&b)
            .ok()
            .map(|i| self.neighbor_lengths(a)[i])
    }

    #[inline]
    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.edge_length(u, v).is_some()
    }

    /// Torus distance between any two vertices (edge or not).
    #[inline]
    pub fn distance(&self, u: u32, v: u32) -> f64 {
        self.cloud.distance(u as usize, v as usize)
    }

    /// Edges `(u, v, length)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.num_vertices() as u32).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .zip(self.neighbor_lengths(u))
                .filter(move |(&v, _)| v > u)
                .map(move |(&v, &len)| (u, v, len))
        })
    }

    /// Returns a copy with edge `{u, v}` forced present.
    pub fn with_edge(&self, u: u32, v: u32) -> Self {
        let mut edges: Vec<(u32, u32)> = self.edges().map(|(a, b, _)| (a, b)).collect();
        edges.push((u.min(v), u.max(v)));
        SpatialGraph::from_edges(self.cloud.clone(), &edges)
    }
}

/// One Bernoulli(g) edge draw per unordered pair, `O(N^2)`.
pub fn build_graph_allpairs(cloud: PointCloud, stream: RngStream) -> SpatialGraph {
    let alpha = cloud.params().alpha;
    let n = cloud.len();
    let mut rng = stream.rng();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = connection_prob(cloud.distance(i, j), alpha);
            if rng.random::<f64>() < p {
                edges.push((i as u32, j as u32));
            }
        }
    }
    SpatialGraph::from_edges(cloud, &edges)
}

/// Points grouped by cell at one grid level.
struct Level {
    cells_per_dim: usize,
    cell_side: f64,
    starts: Vec<u32>,
    order: Vec<u32>,
}

impl Level {
    fn members(&self, cell: usize) -> &[u32] {
        &self.order[self.starts[cell] as usize..self.starts[cell + 1] as usize]
    }
}

struct Grid {
    levels: Vec<Level>,
}

impl Grid {
    /// `finest` cells per dimension must be a power of two, at least 4.
    fn new(cloud: &PointCloud, finest: usize) -> Self {
        let params = cloud.params();
        let dim = params.dim;
        let s0 = params.side / finest as f64;
        let base: Vec<usize> = cloud
            .coords()
            .iter()
            .map(|&c| ((c / s0) as usize).min(finest - 1))
            .collect();
        let mut levels = Vec::new();
        let mut m = finest;
        let mut shift = 0;
        while m >= 2 {
            let ncells = m.pow(dim as u32);
            let cell_of = |i: usize| {
                base[i * dim..(i + 1) * dim]
                    .iter()
                    .fold(0usize, |acc, &b| acc * m + (b >> shift))
            };
            let mut counts = vec![0u32; ncells + 1];
            for i in 0..cloud.len() {
                counts[cell_of(i) + 1] += 1;
            }
            for c in 0..ncells {
                counts[c + 1] += counts[c];
            }
            let mut fill = counts.clone();
            let mut order = vec![0u32; cloud.len()];
            for i in 0..cloud.len() {
                let c = cell_of(i);
                order[fill[c] as usize] = i as u32;
                fill[c] += 1;
            }
            levels.push(Level {
                cells_per_dim: m,
                cell_side: params.side / m as f64,
                starts: counts,
                order,
            });
            m /= 2;
            shift += 1;
        }
        Grid { levels }
    }

    fn decode(&self, mut cell: usize, m: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = cell % m;
            cell /= m;
        }
    }

    fn encode(idx: &[usize], m: usize) -> usize {
        idx.iter().fold(0, |acc, &i| acc * m + i)
    }
}

#[inline]
fn cyclic_offset(a: usize, b: usize, m: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(m - d)
}

/// Iterates the cartesian product of per-dimension candidate lists.
fn for_each_product(lists: &[Vec<usize>], scratch: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    let depth = scratch.len();
    if depth == lists.len() {
        f(scratch);
        return;
    }
    for &v in &lists[depth] {
        scratch.push(v);
        for_each_product(lists, scratch, f);
        scratch.pop();
    }
}

fn dedup_sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Distribution-equivalent builder with direct sampling only for pairs in
/// adjacent cells of side at least `cutoff`.
///
/// Far pairs are covered by a hierarchical grid: at each level, a pair of
/// non-adjacent cells whose parents are adjacent receives
/// `Binomial(n_a·n_b, g(D))` candidate pairs, `D` being the minimal torus
/// distance between the two cells, and each candidate is kept with
/// probability `g(actual)/g(D)`. Every far pair lies in exactly one such
/// cell pair.
pub fn build_graph_tiered(cloud: PointCloud, cutoff: f64, stream: RngStream) -> SpatialGraph {
    assert!(cutoff > 0.0, "cutoff must be positive");
    let params = *cloud.params();
    let dim = params.dim;
    if cutoff >= params.side / 2.0 {
        warn!(
            "cutoff {cutoff} >= half the torus side {}; using all-pairs sampling",
            params.side
        );
    }
    let mut finest = 1usize;
    while (finest * 2) as f64 * cutoff <= params.side
        && (finest * 2)
            .checked_pow(dim as u32)
            .is_some_and(|c| c <= MAX_CELLS)
    {
        finest *= 2;
    }
    if finest < 4 {
        return build_graph_allpairs(cloud, stream);
    }

    let alpha = params.alpha;
    let grid = Grid::new(&cloud, finest);
    let mut rng = stream.rng();
    let mut edges = Vec::new();

    // near pairs: same or adjacent finest cells
    let level0 = &grid.levels[0];
    let m0 = level0.cells_per_dim;
    let ncells0 = m0.pow(dim as u32);
    let mut idx = vec![0usize; dim];
    let mut scratch = Vec::with_capacity(dim);
    for a in 0..ncells0 {
        let members_a = level0.members(a);
        if members_a.is_empty() {
            continue;
        }
        grid.decode(a, m0, &mut idx);
        let lists: Vec<Vec<usize>> = idx
            .iter()
            .map(|&i| dedup_sorted(vec![(i + m0 - 1) % m0, i, (i + 1) % m0]))
            .collect();
        for_each_product(&lists, &mut scratch, &mut |bidx| {
            let b = Grid::encode(bidx, m0);
            if b < a {
                return;
            }
            let members_b = level0.members(b);
            for (ia, &i) in members_a.iter().enumerate() {
                let rest = if a == b {
                    &members_b[ia + 1..]
                } else {
                    members_b
                };
                for &j in rest {
                    let p = connection_prob(cloud.distance(i as usize, j as usize), alpha);
                    if rng.random::<f64>() < p {
                        edges.push((i.min(j), i.max(j)));
                    }
                }
            }
        });
    }

    // far pairs, level by level
    for lvl in 0..grid.levels.len() - 1 {
        let level = &grid.levels[lvl];
        let m = level.cells_per_dim;
        let mp = m / 2;
        let s = level.cell_side;
        let ncells = m.pow(dim as u32);
        for a in 0..ncells {
            let members_a = level.members(a);
            if members_a.is_empty() {
                continue;
            }
            grid.decode(a, m, &mut idx);
            let lists: Vec<Vec<usize>> = idx
                .iter()
                .map(|&i| {
                    let p = i / 2;
                    let parents = dedup_sorted(vec![(p + mp - 1) % mp, p, (p + 1) % mp]);
                    dedup_sorted(parents.iter().flat_map(|&q| [2 * q, 2 * q + 1]).collect())
                })
                .collect();
            for_each_product(&lists, &mut scratch, &mut |bidx| {
                let b = Grid::encode(bidx, m);
                if b <= a {
                    return;
                }
                let mut adjacent = true;
                let mut gap2 = 0.0;
                for (&ia, &ib) in idx.iter().zip(bidx) {
                    let off = cyclic_offset(ia, ib, m);
                    if off > 1 {
                        adjacent = false;
                        let gap = (off - 1) as f64 * s;
                        gap2 += gap * gap;
                    }
                }
                if adjacent {
                    return;
                }
                let members_b = level.members(b);
                if members_b.is_empty() {
                    return;
                }
                let p_ub = connection_prob(gap2.sqrt(), alpha);
                let total = members_a.len() * members_b.len();
                let count = Binomial::new(total as u64, p_ub)
                    .expect("valid binomial parameters")
                    .sample(&mut rng) as usize;
                if count == 0 {
                    return;
                }
                for t in index::sample(&mut rng, total, count).iter() {
                    let i = members_a[t / members_b.len()];
                    let j = members_b[t % members_b.len()];
                    let g = connection_prob(cloud.distance(i as usize, j as usize), alpha);
                    let ratio = g / p_ub;
                    assert!(
                        ratio <= 1.0 + 1e-9,
                        "thinning bound violated: g={g} > p_ub={p_ub}"
                    );
                    if rng.random::<f64>() < ratio {
                        edges.push((i.min(j), i.max(j)));
                    }
                }
            });
        }
    }
    SpatialGraph::from_edges(cloud, &edges)
}

/// `(i, j, length)` with `i < j`.
pub type WeightedEdge = (u32, u32, f64);

/// Header of the plain-text edge-list dump.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeListHeader {
    pub dim: usize,
    pub side: f64,
    pub alpha: f64,
    pub seed: u64,
}

/// Writes `d n alpha seed` followed by one `i j length` line per edge.
pub fn write_edge_list<W: Write>(graph: &SpatialGraph, seed: u64, mut out: W) -> Result<()> {
    let p = graph.cloud().params();
    writeln!(out, "{} {} {} {}", p.dim, p.side, p.alpha, seed)?;
    for (u, v, len) in graph.edges() {
        writeln!(out, "{u} {v} {len}")?;
    }
    Ok(())
}

/// Parses the format written by [`write_edge_list`].
pub fn read_edge_list<R: BufRead>(input: R) -> Result<(EdgeListHeader, Vec<WeightedEdge>)> {
    let mut lines = input.lines();
    let bad = |what: &str| Error::InvalidArgument(format!("edge list: {what}"));
    let header_line = lines.next().ok_or_else(|| bad("missing header"))??;
    let fields: Vec<&str> = header_line.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(bad("header must be `d n alpha seed`"));
    }
    let header = EdgeListHeader {
        dim: fields[0].parse().map_err(|_| bad("dimension"))?,
        side: fields[1].parse().map_err(|_| bad("side"))?,
        alpha: fields[2].parse().map_err(|_| bad("alpha"))?,
        seed: fields[3].parse().map_err(|_| bad("seed"))?,
    };
    let mut edges = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(bad("edge lines must be `i j length`"));
        }
        edges.push((
            f[0].parse().map_err(|_| bad("vertex"))?,
            f[1].parse().map_err(|_| bad("vertex"))?,
            f[2].parse().map_err(|_| bad("length"))?,
        ));
    }
    Ok((header, edges))
}
