//! Center sets with bounded clusters, pivots, bunches and cluster trees.
//!
//! A center set A induces, for every vertex v, a pivot (nearest center) and a
//! bunch (vertices strictly closer to v than the pivot); dually, every vertex
//! w owns the cluster of vertices to which it is closer than their pivots.
//! Clusters are path-closed, so each carries a shortest-path tree rooted at
//! its owner. The center-growing loop resamples from overloaded clusters
//! until every cluster is within 4n/s.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::BuildError;
use crate::graph::{Graph, VertexId};
use crate::tree::{build_tree_routing, TreeRouting, TreeTopology};
use crate::weight::{w_zero, W};

const GROW_ROUNDS_CAP: usize = 200;

/// Nearest-source assignment: per vertex the pivot (smallest id among nearest
/// sources), its distance, and the parent on the canonical path toward it.
pub struct PivotField {
    pub pivot: Vec<VertexId>,
    pub dist: Vec<W>,
    pub parent: Vec<Option<VertexId>>,
}

impl PivotField {
    /// Neighbor of the pivot on the canonical v -> pivot path (the other end
    /// of the first edge out of the pivot towards v). None when v is its own
    /// pivot.
    pub fn last_edge_from_pivot(&self, v: VertexId) -> Option<VertexId> {
        let mut cur = v;
        let mut prev = None;
        while let Some(p) = self.parent[cur as usize] {
            prev = Some(cur);
            cur = p;
        }
        prev
    }
}

/// Multi-source Dijkstra with lexicographic (distance, source id) keys.
pub fn multi_source(g: &Graph, sources: &[VertexId]) -> PivotField {
    assert!(!sources.is_empty(), "pivot field needs at least one source");
    let n = g.n();
    let mut best: Vec<Option<(W, VertexId)>> = vec![None; n];
    let mut parent: Vec<Option<VertexId>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(W, VertexId, VertexId, Option<VertexId>)>> = BinaryHeap::new();
    let mut sorted = sources.to_vec();
    sorted.sort();
    for &s in &sorted {
        heap.push(Reverse((w_zero(), s, s, None)));
    }
    while let Some(Reverse((d, pv, v, par))) = heap.pop() {
        if done[v as usize] {
            continue;
        }
        done[v as usize] = true;
        best[v as usize] = Some((d.clone(), pv));
        parent[v as usize] = par;
        for &(u, ref w) in g.neighbors(v) {
            if done[u as usize] {
                continue;
            }
            let cand = (d.clone() + w.clone(), pv);
            let better = match &best[u as usize] {
                None => true,
                Some(cur) => cand < *cur,
            };
            if better {
                best[u as usize] = Some(cand.clone());
                heap.push(Reverse((cand.0, cand.1, u, Some(v))));
            }
        }
    }
    let mut pivot = Vec::with_capacity(n);
    let mut dist = Vec::with_capacity(n);
    for b in best {
        let (d, p) = b.expect("graph is connected");
        dist.push(d);
        pivot.push(p);
    }
    PivotField { pivot, dist, parent }
}

/// One cluster member: vertex, distance from the owner, canonical parent
/// toward the owner (None at the owner itself).
pub type ClusterMember = (VertexId, W, Option<VertexId>);

/// Grows the cluster of w under the strict pivot-distance limit. The owner is
/// always the first member; when the owner is itself a center the cluster is
/// just the owner.
pub fn grow_cluster(g: &Graph, w: VertexId, limit: &[W]) -> Vec<ClusterMember> {
    let mut dist: Vec<Option<W>> = vec![None; g.n()];
    let mut parent: Vec<Option<VertexId>> = vec![None; g.n()];
    let mut done = vec![false; g.n()];
    let mut heap: BinaryHeap<Reverse<(W, VertexId, Option<VertexId>)>> = BinaryHeap::new();
    heap.push(Reverse((w_zero(), w, None)));
    dist[w as usize] = Some(w_zero());
    let mut members = Vec::new();
    while let Some(Reverse((d, v, par))) = heap.pop() {
        if done[v as usize] {
            continue;
        }
        if v != w && d >= limit[v as usize] {
            continue;
        }
        done[v as usize] = true;
        parent[v as usize] = par;
        members.push((v, d.clone(), par));
        for &(u, ref x) in g.neighbors(v) {
            if done[u as usize] {
                continue;
            }
            let cand = d.clone() + x.clone();
            // Prune eagerly: a candidate at or beyond its pivot distance can
            // never join the cluster.
            if cand >= limit[u as usize] {
                continue;
            }
            let better = match &dist[u as usize] {
                None => true,
                Some(cur) => cand < *cur,
            };
            if better {
                dist[u as usize] = Some(cand.clone());
                heap.push(Reverse((cand, u, Some(v))));
            }
        }
    }
    // Canonicalize parents: smallest (dist, id) tight predecessor inside the
    // cluster, so trees are independent of heap order.
    let in_cluster: std::collections::HashMap<VertexId, W> =
        members.iter().map(|(v, d, _)| (*v, d.clone())).collect();
    for m in members.iter_mut() {
        let (v, dv, _) = (m.0, m.1.clone(), m.2);
        if v == w {
            continue;
        }
        let mut bst: Option<(W, VertexId)> = None;
        for &(u, ref x) in g.neighbors(v) {
            if let Some(du) = in_cluster.get(&u) {
                if du.clone() + x.clone() == dv {
                    let key = (du.clone(), u);
                    if bst.as_ref().map_or(true, |b| key < *b) {
                        bst = Some(key);
                    }
                }
            }
        }
        m.2 = Some(bst.expect("cluster is path-closed").1);
    }
    members
}

#[derive(Debug, Clone)]
pub struct CenterStructure {
    pub s: usize,
    pub seed: u64,
    /// The center set, sorted.
    pub a: Vec<VertexId>,
    /// Per vertex: nearest center (ties to the smallest id) and its distance.
    pub pivot: Vec<VertexId>,
    pub dist_a: Vec<W>,
    pub pivot_parent: Vec<Option<VertexId>>,
    /// Closed clusters indexed by owner: the owner first, then members in
    /// settle order, each with distance and canonical parent.
    pub clusters: Vec<Vec<ClusterMember>>,
    /// Rounds the growing loop took (recorded for reports).
    pub rounds: usize,
}

impl CenterStructure {
    pub fn is_center(&self, v: VertexId) -> bool {
        self.a.binary_search(&v).is_ok()
    }

    /// Members of the strict cluster (v with d(w,v) < d(v,A)). Excludes the
    /// owner exactly when the owner is a center.
    pub fn open_cluster(&self, w: VertexId) -> &[ClusterMember] {
        let c = &self.clusters[w as usize];
        if self.is_center(w) {
            &c[1..]
        } else {
            c
        }
    }

    pub fn open_cluster_size(&self, w: VertexId) -> usize {
        self.open_cluster(w).len()
    }

    /// Strict bunches by duality: w is in the bunch of v iff v is in the
    /// open cluster of w.
    pub fn bunches(&self) -> Vec<Vec<VertexId>> {
        let mut bunches: Vec<Vec<VertexId>> = vec![Vec::new(); self.pivot.len()];
        for w in 0..self.clusters.len() as VertexId {
            for &(v, _, _) in self.open_cluster(w) {
                bunches[v as usize].push(w);
            }
        }
        for b in &mut bunches {
            b.sort();
        }
        bunches
    }

    /// Shortest-path trees spanning each closed cluster, with heavy-path
    /// routing. Indexed by owner.
    pub fn build_cluster_trees(&self, g: &Graph) -> Result<Vec<TreeRouting>, BuildError> {
        use rayon::prelude::*;
        (0..g.n() as VertexId)
            .into_par_iter()
            .map(|w| {
                let members: Vec<VertexId> =
                    self.clusters[w as usize].iter().map(|&(v, _, _)| v).collect();
                let parent = |v: VertexId| {
                    self.clusters[w as usize]
                        .iter()
                        .find(|&&(x, _, _)| x == v)
                        .and_then(|&(_, _, p)| p)
                };
                let topo = TreeTopology::from_parent_map(g, w, &members, &parent)?;
                build_tree_routing(&topo)
            })
            .collect()
    }
}

/// Grows a center set with every open cluster within 4n/s: sample uniformly,
/// recompute clusters, then resample from the owners of overloaded clusters
/// until none remain.
pub fn tz_centers(g: &Graph, s: usize, seed: u64) -> Result<CenterStructure, BuildError> {
    let n = g.n();
    if s < 1 || s > n {
        return Err(BuildError::InvalidParam(format!("center parameter s={s} outside 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a: Vec<bool> = vec![false; n];
    let mut overloaded: Vec<VertexId> = (0..n as VertexId).collect();
    let cap4n = 4 * n;
    for round in 0..GROW_ROUNDS_CAP {
        for &w in &overloaded {
            if (rng.gen_range(0..n) as usize) < s {
                a[w as usize] = true;
            }
        }
        let centers: Vec<VertexId> =
            (0..n as VertexId).filter(|&v| a[v as usize]).collect();
        if centers.is_empty() {
            continue;
        }
        let field = multi_source(g, &centers);
        let clusters: Vec<Vec<ClusterMember>> = {
            use rayon::prelude::*;
            (0..n as VertexId)
                .into_par_iter()
                .map(|w| grow_cluster(g, w, &field.dist))
                .collect()
        };
        let is_center = |w: VertexId| a[w as usize];
        overloaded = (0..n as VertexId)
            .filter(|&w| {
                let open = clusters[w as usize].len() - usize::from(is_center(w));
                open * s > cap4n
            })
            .collect();
        if overloaded.is_empty() {
            return Ok(CenterStructure {
                s,
                seed,
                a: centers,
                pivot: field.pivot,
                dist_a: field.dist,
                pivot_parent: field.parent,
                clusters,
                rounds: round + 1,
            });
        }
    }
    Err(BuildError::CentersDiverged(GROW_ROUNDS_CAP))
}

/// Exact check of the strict membership rule against an oracle, used in tests
/// and the acceptance suite.
pub fn duality_holds(g: &Graph, cs: &CenterStructure) -> bool {
    let ap = crate::dist::all_pairs(g);
    let n = g.n();
    let bunches = cs.bunches();
    for w in 0..n {
        let members: std::collections::HashSet<VertexId> =
            cs.open_cluster(w as VertexId).iter().map(|&(v, _, _)| v).collect();
        for v in 0..n {
            let strict = ap[w][v] < cs.dist_a[v];
            if strict != members.contains(&(v as VertexId)) {
                return false;
            }
            let in_bunch = bunches[v].binary_search(&(w as VertexId)).is_ok();
            if strict != in_bunch {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::all_pairs;
    use crate::gen::{generate_graph, GraphSpec};

    #[test]
    fn s_equals_n_is_a_fixed_point() {
        let g = generate_graph(&GraphSpec::GnmRandom { n: 30, m: 60 }, 2).unwrap();
        let cs = tz_centers(&g, 30, 1).unwrap();
        assert_eq!(cs.a.len(), 30);
        for w in 0..30u32 {
            assert_eq!(cs.open_cluster_size(w), 0);
            assert_eq!(cs.clusters[w as usize].len(), 1);
        }
    }

    #[test]
    fn path_clusters_respect_bound() {
        let g = generate_graph(&GraphSpec::Path { n: 50 }, 0).unwrap();
        let cs = tz_centers(&g, 5, 3).unwrap();
        for w in 0..50u32 {
            assert!(cs.open_cluster_size(w) <= 40, "cluster of {w} too large");
        }
    }

    #[test]
    fn duality_exhaustive() {
        let g = generate_graph(&GraphSpec::RandomWeighted { n: 80, m: 200, w_min: 1, w_max: 6 }, 5)
            .unwrap();
        let cs = tz_centers(&g, 9, 7).unwrap();
        assert!(duality_holds(&g, &cs));
    }

    #[test]
    fn pivots_are_nearest_with_id_ties() {
        let g = generate_graph(&GraphSpec::GnmRandom { n: 60, m: 150 }, 8).unwrap();
        let cs = tz_centers(&g, 8, 11).unwrap();
        let ap = all_pairs(&g);
        for v in 0..60usize {
            let best = cs
                .a
                .iter()
                .map(|&a| (ap[v][a as usize].clone(), a))
                .min()
                .unwrap();
            assert_eq!((cs.dist_a[v].clone(), cs.pivot[v]), best);
        }
    }

    #[test]
    fn cluster_trees_realize_distances() {
        let g = generate_graph(&GraphSpec::GnmRandom { n: 100, m: 250 }, 4).unwrap();
        let cs = tz_centers(&g, 10, 2).unwrap();
        let trees = cs.build_cluster_trees(&g).unwrap();
        let ap = all_pairs(&g);
        for w in 0..100u32 {
            let tree = &trees[w as usize];
            // Tree vertex set equals the closed cluster.
            let tree_vs: std::collections::HashSet<u32> =
                tree.tables.iter().map(|&(v, _)| v).collect();
            let cluster_vs: std::collections::HashSet<u32> =
                cs.clusters[w as usize].iter().map(|&(v, _, _)| v).collect();
            assert_eq!(tree_vs, cluster_vs);
            // Root paths realize graph distances.
            for &(v, ref d, _) in &cs.clusters[w as usize] {
                assert_eq!(*d, ap[w as usize][v as usize]);
            }
        }
    }

    #[test]
    fn singleton_cluster_single_node_tree() {
        let g = generate_graph(&GraphSpec::Path { n: 10 }, 0).unwrap();
        let cs = tz_centers(&g, 10, 0).unwrap();
        let trees = cs.build_cluster_trees(&g).unwrap();
        for w in 0..10u32 {
            assert_eq!(trees[w as usize].tables.len(), 1);
        }
    }

    #[test]
    fn rejects_bad_s() {
        let g = generate_graph(&GraphSpec::Path { n: 5 }, 0).unwrap();
        assert!(tz_centers(&g, 0, 0).is_err());
        assert!(tz_centers(&g, 6, 0).is_err());
    }
}
