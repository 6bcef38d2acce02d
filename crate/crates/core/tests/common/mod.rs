#![allow(dead_code)]

use rand::Rng;
use srgg_core::point_process::{sample_fixed_cloud, RngStream};
use srgg_core::{CliqueStatistics, ModelParams, SpatialGraph};

/// Random-edge graph on `m <= 30` uniform points of a small 2-torus.
pub fn random_graph(trial: u64) -> SpatialGraph {
    let mut rng = RngStream::new(0xC11C, trial).rng();
    let m = rng.random_range(0..=30usize);
    let side = rng.random_range(2.0..12.0);
    let params = ModelParams::new(2, side, 3.0, 3).unwrap();
    let cloud = sample_fixed_cloud(m, &params, RngStream::new(0xC10D, trial));
    let p = rng.random_range(0.1..0.9);
    let mut edges = Vec::new();
    for u in 0..m as u32 {
        for v in u + 1..m as u32 {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    SpatialGraph::from_edges(cloud, &edges)
}

/// Every k-subset that is a clique, by exhaustive subset enumeration.
pub fn brute_force_cliques(graph: &SpatialGraph, k: usize) -> Vec<Vec<u32>> {
    let m = graph.num_vertices() as u32;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(
        g: &SpatialGraph,
        m: u32,
        k: usize,
        start: u32,
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if cur.len() == k {
            let all = cur
                .iter()
                .enumerate()
                .all(|(a, &u)| cur[a + 1..].iter().all(|&v| g.has_edge(u, v)));
            if all {
                out.push(cur.clone());
            }
            return;
        }
        for v in start..m {
            cur.push(v);
            rec(g, m, k, v + 1, cur, out);
            cur.pop();
        }
    }
    if k as u32 <= m {
        rec(graph, m, k, 0, &mut current, &mut out);
    }
    out
}

/// Statistics recomputed from the brute-force clique list and raw torus distances.
pub fn brute_force_statistics(
    graph: &SpatialGraph,
    k: usize,
    r: f64,
    eps: f64,
) -> CliqueStatistics {
    let mut s = CliqueStatistics::new(k, r, eps);
    for c in brute_force_cliques(graph, k) {
        let mut pairs = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                pairs.push((a, b, graph.distance(c[a], c[b])));
            }
        }
        let long: Vec<_> = pairs.iter().filter(|p| p.2 >= r).collect();
        let max = pairs.iter().map(|p| p.2).fold(0.0, f64::max);
        s.k_total += 1;
        if pairs.iter().all(|p| p.2 <= 1.0 / eps) {
            s.k_compact += 1;
        }
        if !long.is_empty() {
            s.w += 1;
        }
        if long.len() == k - 1 && pairs.iter().filter(|p| p.2 < r).all(|p| p.2 <= 1.0 / eps) {
            s.w_localized += 1;
            let hub = (0..k).any(|v| long.iter().filter(|p| p.0 == v || p.1 == v).count() == k - 1);
            if hub {
                s.w_localized_shared += 1;
            }
        }
        s.e_star = Some(s.e_star.map_or(max, |e: f64| e.max(max)));
    }
    s
}
