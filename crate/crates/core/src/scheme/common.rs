//! Shared preprocessing helpers for the scheme family.

use rayon::prelude::*;

use crate::coloring::Coloring;
use crate::error::BuildError;
use crate::fnv::Fnv;
use crate::graph::{Graph, VertexId};
use crate::local::LocalTable;
use crate::t1::TreeTableSet;
use crate::table::{LabelCache, VertexTable};
use crate::tree::{TreeLabel, TreeRouting};
use crate::vicinity::{vicinity, Vicinity};
use crate::weight::{to_f64, W};

/// ceil(n^(num/den)) by exact integer search.
pub fn ceil_root(n: usize, num: u32, den: u32) -> usize {
    let target = (n as u128).pow(num);
    let mut q = (n as f64).powf(num as f64 / den as f64).round() as u128;
    q = q.max(1);
    while q.pow(den) >= target && q > 1 && (q - 1).pow(den) >= target {
        q -= 1;
    }
    while q.pow(den) < target {
        q += 1;
    }
    q as usize
}

/// Vicinity size ceil(alpha * x * log2 n), clamped to n and floored at 1.
pub fn vicinity_size(n: usize, x: usize, alpha: &W) -> usize {
    let raw = to_f64(alpha) * x as f64 * (n as f64).log2();
    (raw.ceil() as usize).clamp(1, n)
}

pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    let mut h = Fnv::new();
    h.write_u64(seed);
    h.write_str(tag);
    h.finish()
}

pub fn build_vicinities(g: &Graph, size: usize) -> Vec<Vicinity> {
    (0..g.n() as VertexId)
        .into_par_iter()
        .map(|u| vicinity(g, u, size))
        .collect()
}

pub fn locals_from(vics: &[Vicinity]) -> Vec<LocalTable> {
    vics.iter().map(LocalTable::from_vicinity).collect()
}

/// Member id lists restricted to the given nested size, in (dist, id) order.
pub fn member_sets(vics: &[Vicinity], size: usize) -> Vec<Vec<VertexId>> {
    vics.iter()
        .map(|v| v.members.iter().take(size).map(|&(x, _, _)| x).collect())
        .collect()
}

/// Closure radius of the nested vicinity of the given size.
pub fn nested_radius(vic: &Vicinity, size: usize) -> W {
    let size = size.min(vic.members.len());
    let cutoff = vic.members.get(size).map(|(_, d, _)| d.clone());
    let mut radius = crate::weight::w_zero();
    for (_, d, _) in &vic.members[..size] {
        let within = cutoff.as_ref().map_or(true, |c| d < c);
        if within && *d > radius {
            radius = d.clone();
        }
    }
    radius
}

/// Nearest vicinity member of each color, per vertex, using the first `size`
/// members.
pub fn color_reps(
    vics: &[Vicinity],
    coloring: &Coloring,
    size: usize,
) -> Result<Vec<Vec<(VertexId, W)>>, BuildError> {
    vics.iter()
        .map(|vic| {
            let mut reps: Vec<Option<(VertexId, W)>> = vec![None; coloring.q];
            let mut found = 0;
            for (v, d, _) in vic.members.iter().take(size) {
                let c = coloring.color_of(*v) as usize;
                if reps[c].is_none() {
                    reps[c] = Some((*v, d.clone()));
                    found += 1;
                    if found == coloring.q {
                        break;
                    }
                }
            }
            reps.into_iter()
                .enumerate()
                .map(|(c, r)| {
                    r.ok_or_else(|| {
                        BuildError::InvalidParam(format!(
                            "vicinity of {} misses color {c}",
                            vic.center
                        ))
                    })
                })
                .collect()
        })
        .collect()
}

/// Deterministic near-equal partition: sort by id, deal round-robin. Returns
/// the sets and the set index per member.
pub fn round_robin(ids: &[VertexId], q: usize, n: usize) -> (Vec<Vec<VertexId>>, Vec<Option<u16>>) {
    let mut sorted = ids.to_vec();
    sorted.sort();
    let mut sets = vec![Vec::new(); q];
    let mut index: Vec<Option<u16>> = vec![None; n];
    for (i, v) in sorted.into_iter().enumerate() {
        sets[i % q].push(v);
        index[v as usize] = Some((i % q) as u16);
    }
    (sets, index)
}

/// Best witness w among the first `prefix` vicinity members with the
/// destination in w's closed cluster, minimizing d(u,w) + d(w,v); ties go to
/// the smallest witness id.
pub fn intersection_table(
    vic: &Vicinity,
    prefix: usize,
    clusters: &[Vec<crate::centers::ClusterMember>],
) -> crate::table::IntersectionTable {
    let mut best: std::collections::HashMap<VertexId, (W, VertexId)> =
        std::collections::HashMap::new();
    for (w, du, _) in vic.members.iter().take(prefix) {
        for (v, dwv, _) in &clusters[*w as usize] {
            let cand = (du.clone() + dwv.clone(), *w);
            match best.entry(*v) {
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    if cand < *e.get() {
                        e.insert(cand);
                    }
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(cand);
                }
            }
        }
    }
    let mut entries: Vec<(VertexId, VertexId)> =
        best.into_iter().map(|(v, (_, w))| (v, w)).collect();
    entries.sort();
    crate::table::IntersectionTable { entries }
}

/// Distributes one level of cluster trees: node tables onto members, member
/// labels onto roots.
pub fn scatter_clusters(
    trees: &[TreeRouting],
    level: usize,
    tables: &mut [VertexTable],
    cache_roots: Option<&dyn Fn(VertexId) -> bool>,
) {
    for t in tables.iter_mut() {
        while t.cluster_tables.len() <= level {
            t.cluster_tables.push(TreeTableSet::default());
        }
        while t.label_caches.len() <= level {
            t.label_caches.push(LabelCache::default());
        }
    }
    for tr in trees {
        for (v, nt) in &tr.tables {
            tables[*v as usize].cluster_tables[level].insert(tr.root, nt.clone());
        }
        if cache_roots.map_or(true, |f| f(tr.root)) {
            let mut entries: Vec<(VertexId, TreeLabel)> = tr.labels.clone();
            entries.sort_by_key(|&(v, _)| v);
            tables[tr.root as usize].label_caches[level] = LabelCache { entries };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::w_one;

    #[test]
    fn exact_roots() {
        assert_eq!(ceil_root(64, 1, 3), 4);
        assert_eq!(ceil_root(65, 1, 3), 5);
        assert_eq!(ceil_root(125, 2, 3), 25);
        assert_eq!(ceil_root(100, 1, 2), 10);
        assert_eq!(ceil_root(101, 1, 2), 11);
        assert_eq!(ceil_root(243, 1, 5), 3);
        assert_eq!(ceil_root(244, 1, 5), 4);
    }

    #[test]
    fn vicinity_size_clamps() {
        assert_eq!(vicinity_size(4, 100, &w_one()), 4);
        assert!(vicinity_size(1024, 1, &w_one()) == 10);
    }
}
