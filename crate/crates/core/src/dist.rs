//! Exact shortest-path machinery: the verification oracle.
//!
//! Single-source distances are computed with Dijkstra over exact rationals.
//! Parents are canonicalized afterwards so that every vertex has a unique
//! deterministic shortest path to the source: among tight predecessors the
//! one with the smallest (distance, id) wins.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::GraphError;
use crate::graph::{Graph, Port, VertexId};
use crate::weight::{w_zero, W};

#[derive(Debug, Clone)]
pub struct DistanceField {
    pub source: VertexId,
    pub dist: Vec<W>,
    /// Canonical predecessor towards the source; None at the source.
    pub parent: Vec<Option<VertexId>>,
}

impl DistanceField {
    /// Canonical shortest path source -> v, inclusive of both endpoints.
    pub fn path_to(&self, v: VertexId) -> Vec<VertexId> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur as usize] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        debug_assert_eq!(path[0], self.source);
        path
    }

    /// First hop of the canonical path source -> v; None when v is the source.
    pub fn first_hop(&self, v: VertexId) -> Option<VertexId> {
        let mut cur = v;
        let mut hop = None;
        while let Some(p) = self.parent[cur as usize] {
            hop = Some(cur);
            cur = p;
        }
        hop
    }
}

/// Exact single-source shortest paths with canonical parents.
pub fn shortest_paths_from(g: &Graph, source: VertexId) -> DistanceField {
    let n = g.n();
    let mut dist: Vec<Option<W>> = vec![None; n];
    let mut heap: BinaryHeap<Reverse<(W, VertexId)>> = BinaryHeap::new();
    dist[source as usize] = Some(w_zero());
    heap.push(Reverse((w_zero(), source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        match &dist[v as usize] {
            Some(best) if *best < d => continue,
            _ => {}
        }
        for &(u, ref w) in g.neighbors(v) {
            let cand = d.clone() + w.clone();
            let better = match &dist[u as usize] {
                None => true,
                Some(cur) => cand < *cur,
            };
            if better {
                dist[u as usize] = Some(cand.clone());
                heap.push(Reverse((cand, u)));
            }
        }
    }
    let dist: Vec<W> = dist
        .into_iter()
        .map(|d| d.expect("graph is connected"))
        .collect();

    // Canonicalize parents: smallest (dist, id) among tight predecessors.
    let mut parent: Vec<Option<VertexId>> = vec![None; n];
    for v in 0..n as VertexId {
        if v == source {
            continue;
        }
        let dv = &dist[v as usize];
        let mut best: Option<(W, VertexId)> = None;
        for &(u, ref w) in g.neighbors(v) {
            let du = &dist[u as usize];
            if du.clone() + w.clone() == *dv {
                let key = (du.clone(), u);
                if best.as_ref().map_or(true, |b| key < *b) {
                    best = Some(key);
                }
            }
        }
        parent[v as usize] = Some(best.expect("every non-source vertex has a tight predecessor").1);
    }
    DistanceField { source, dist, parent }
}

/// All-pairs exact distances (one Dijkstra per source, parallelized by callers
/// when needed; this sequential form is used for small oracles).
pub fn all_pairs(g: &Graph) -> Vec<Vec<W>> {
    use rayon::prelude::*;
    (0..g.n() as VertexId)
        .into_par_iter()
        .map(|s| shortest_paths_from(g, s).dist)
        .collect()
}

/// Normalized diameter: max pairwise distance over min positive pairwise
/// distance.
pub fn normalized_diameter(g: &Graph) -> Result<W, GraphError> {
    if g.n() < 2 {
        return Err(GraphError::DiameterUndefined);
    }
    let mut max_d: Option<W> = None;
    let mut min_d: Option<W> = None;
    for s in 0..g.n() as VertexId {
        let f = shortest_paths_from(g, s);
        for v in 0..g.n() as VertexId {
            if v == s {
                continue;
            }
            let d = &f.dist[v as usize];
            if max_d.as_ref().map_or(true, |m| d > m) {
                max_d = Some(d.clone());
            }
            if min_d.as_ref().map_or(true, |m| d < m) {
                min_d = Some(d.clone());
            }
        }
    }
    Ok(max_d.unwrap() / min_d.unwrap())
}

/// Restriction of g to edges that realize the distance between their
/// endpoints, with weights rescaled by the minimum such weight so the result
/// has weights in [1, M]. Distances are preserved up to the scale factor and
/// every shortest path of the result is a shortest path of g.
pub fn shortest_path_subgraph(g: &Graph) -> Result<Graph, GraphError> {
    let (edges, w_min) = tight_edges(g);
    let rescaled: Vec<_> = edges
        .into_iter()
        .map(|(u, v, w)| (u, v, w / w_min.clone()))
        .collect();
    Graph::from_edges(g.n(), &rescaled)
}

/// Tight edges of g (weight equals endpoint distance) and the minimum tight
/// weight. Every shortest path uses only tight edges, so the restriction
/// stays connected and preserves all distances.
pub fn tight_edges(g: &Graph) -> (Vec<(VertexId, VertexId, W)>, W) {
    let mut keep = Vec::new();
    for s in 0..g.n() as VertexId {
        let f = shortest_paths_from(g, s);
        for &(v, ref w) in g.neighbors(s) {
            if s < v && f.dist[v as usize] == *w {
                keep.push((s, v, w.clone()));
            }
        }
    }
    let w_min = keep
        .iter()
        .map(|(_, _, w)| w.clone())
        .min()
        .expect("connected graph with n >= 2 has a tight edge");
    (keep, w_min)
}

/// First hops of canonical paths from the source to every vertex, as ports at
/// the source. Entry for the source itself is None.
pub fn first_hop_ports(g: &Graph, f: &DistanceField) -> Vec<Option<Port>> {
    let n = g.n();
    // Propagate in order of increasing (dist, id): a vertex's first hop is
    // inherited from its canonical parent.
    let mut order: Vec<VertexId> = (0..n as VertexId).collect();
    order.sort_by(|&a, &b| {
        (&f.dist[a as usize], a).cmp(&(&f.dist[b as usize], b))
    });
    let mut first: Vec<Option<VertexId>> = vec![None; n];
    for &v in &order {
        if v == f.source {
            continue;
        }
        let p = f.parent[v as usize].unwrap();
        first[v as usize] = if p == f.source { Some(v) } else { first[p as usize] };
    }
    first
        .into_iter()
        .map(|h| h.map(|x| g.port_to(f.source, x).expect("first hop is a neighbor")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate_graph, GraphSpec};
    use crate::weight::{w_int, w_one};

    fn path5() -> Graph {
        generate_graph(&GraphSpec::Path { n: 5 }, 0).unwrap()
    }

    #[test]
    fn line_graph_distances() {
        let g = generate_graph(&GraphSpec::Path { n: 3 }, 0).unwrap();
        let f = shortest_paths_from(&g, 0);
        assert_eq!(f.dist, vec![w_int(0), w_int(1), w_int(2)]);
    }

    #[test]
    fn source_distance_is_zero() {
        let g = path5();
        for s in 0..5 {
            assert_eq!(shortest_paths_from(&g, s).dist[s as usize], w_int(0));
        }
    }

    /// Independent oracle: Bellman-Ford, coded without touching the Dijkstra
    /// path, cross-checks distances on a seeded random graph.
    fn bellman_ford(g: &Graph, s: VertexId) -> Vec<W> {
        let n = g.n();
        let big = w_int(i64::MAX / 4);
        let mut d = vec![big; n];
        d[s as usize] = w_int(0);
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n as VertexId {
                for &(v, ref w) in g.neighbors(u) {
                    let cand = d[u as usize].clone() + w.clone();
                    if cand < d[v as usize] {
                        d[v as usize] = cand;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        d
    }

    #[test]
    fn dijkstra_matches_bellman_ford() {
        let g = generate_graph(
            &GraphSpec::RandomWeighted { n: 50, m: 120, w_min: 1, w_max: 9 },
            7,
        )
        .unwrap();
        for s in [0u32, 13, 49] {
            assert_eq!(shortest_paths_from(&g, s).dist, bellman_ford(&g, s));
        }
    }

    #[test]
    fn canonical_parents_deterministic_and_tight() {
        let g = generate_graph(&GraphSpec::GnmRandom { n: 40, m: 100 }, 3).unwrap();
        let f = shortest_paths_from(&g, 5);
        let f2 = shortest_paths_from(&g, 5);
        assert_eq!(f.parent, f2.parent);
        for v in 0..40u32 {
            if v == 5 {
                continue;
            }
            let p = f.parent[v as usize].unwrap();
            let w = g.edge_weight(p, v).unwrap().clone();
            assert_eq!(f.dist[p as usize].clone() + w, f.dist[v as usize]);
        }
    }

    #[test]
    fn diameter_of_path_and_clique() {
        assert_eq!(normalized_diameter(&path5()).unwrap(), w_int(4));
        let mut edges = Vec::new();
        for u in 0..6u32 {
            for v in u + 1..6 {
                edges.push((u, v, w_one()));
            }
        }
        let k6 = Graph::from_edges(6, &edges).unwrap();
        assert_eq!(normalized_diameter(&k6).unwrap(), w_int(1));
        let single = Graph::from_edges(1, &[]).unwrap();
        assert!(matches!(normalized_diameter(&single), Err(GraphError::DiameterUndefined)));
    }

    #[test]
    fn diameter_of_weighted_triangle() {
        let g = Graph::from_edges(3, &[(0, 1, w_int(1)), (1, 2, w_int(2)), (0, 2, w_int(3))])
            .unwrap();
        // Brute force over the all-pairs oracle.
        let ap = all_pairs(&g);
        let mut max = w_int(0);
        let mut min = w_int(i64::MAX / 4);
        for u in 0..3 {
            for v in 0..3 {
                if u == v {
                    continue;
                }
                max = max.max(ap[u][v].clone());
                min = min.min(ap[u][v].clone());
            }
        }
        assert_eq!(normalized_diameter(&g).unwrap(), max / min);
    }

    #[test]
    fn subgraph_drops_slack_edge() {
        let g = Graph::from_edges(3, &[(0, 1, w_int(1)), (1, 2, w_int(1)), (0, 2, w_int(3))])
            .unwrap();
        let sub = shortest_path_subgraph(&g).unwrap();
        assert_eq!(sub.m(), 2);
        assert!(!sub.has_edge(0, 2));
    }

    #[test]
    fn subgraph_of_unit_graph_is_identity() {
        let g = generate_graph(&GraphSpec::GnmRandom { n: 30, m: 70 }, 11).unwrap();
        assert_eq!(shortest_path_subgraph(&g).unwrap(), g);
    }

    #[test]
    fn subgraph_preserves_distances_up_to_scale() {
        let g = generate_graph(
            &GraphSpec::RandomWeighted { n: 40, m: 90, w_min: 2, w_max: 8 },
            5,
        )
        .unwrap();
        let (_, w_min) = tight_edges(&g);
        let sub = shortest_path_subgraph(&g).unwrap();
        let a = all_pairs(&g);
        let b = all_pairs(&sub);
        for u in 0..40 {
            for v in 0..40 {
                assert_eq!(b[u][v].clone() * w_min.clone(), a[u][v]);
            }
        }
    }

    #[test]
    fn first_hops_point_along_canonical_paths() {
        let g = generate_graph(&GraphSpec::GnmRandom { n: 30, m: 80 }, 9).unwrap();
        let f = shortest_paths_from(&g, 0);
        let hops = first_hop_ports(&g, &f);
        assert!(hops[0].is_none());
        for v in 1..30u32 {
            let p = hops[v as usize].unwrap();
            let (next, _) = g.port_target(0, p).unwrap().clone();
            assert_eq!(f.path_to(v)[1], next);
        }
    }
}
