//! The per-vertex routing table blob.
//!
//! Every scheme composes the same building blocks: a vicinity table, closure
//! radii, per-color representatives, cluster-tree node tables and label
//! caches, global spanning trees, intersection tables, and stored waypoint
//! sequences. Absent pieces cost nothing; the simulator hands each vertex
//! exactly its own blob.

use crate::bits::{dist_bits, id_bits, port_bits, width};
use crate::graph::VertexId;
use crate::local::LocalTable;
use crate::t1::TreeTableSet;
use crate::tree::TreeLabel;
use crate::waypoint::SequenceTable;
use crate::weight::W;

/// Labels of cluster members, stored at the cluster root.
#[derive(Debug, Clone, Default)]
pub struct LabelCache {
    pub entries: Vec<(VertexId, TreeLabel)>,
}

impl LabelCache {
    pub fn get(&self, v: VertexId) -> Option<&TreeLabel> {
        self.entries
            .binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.get(v).is_some()
    }

    pub fn bits(&self, n: usize, max_deg: usize) -> u64 {
        self.entries
            .iter()
            .map(|(_, l)| id_bits(n) + l.bits(n, max_deg))
            .sum()
    }
}

/// Per-destination best intersection witness.
#[derive(Debug, Clone, Default)]
pub struct IntersectionTable {
    pub entries: Vec<(VertexId, VertexId)>,
}

impl IntersectionTable {
    pub fn get(&self, dest: VertexId) -> Option<VertexId> {
        self.entries
            .binary_search_by_key(&dest, |&(d, _)| d)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn bits(&self, n: usize) -> u64 {
        self.entries.len() as u64 * 2 * id_bits(n)
    }
}

#[derive(Debug, Clone, Default)]
pub struct VertexTable {
    pub vertex: VertexId,
    /// Vicinity table at the largest level size; nested levels use ranks.
    pub local: Option<LocalTable>,
    /// Closure radius per level.
    pub radii: Vec<W>,
    /// Per level, indexed by color: nearest vicinity member of that color
    /// and its distance.
    pub color_reps: Vec<Vec<(VertexId, W)>>,
    /// Per level: node tables of the cluster trees this vertex belongs to.
    pub cluster_tables: Vec<TreeTableSet>,
    /// Per level: member labels of the cluster this vertex roots.
    pub label_caches: Vec<LabelCache>,
    /// Node tables of global spanning trees (one per center, when a scheme
    /// routes on them).
    pub global_tables: TreeTableSet,
    /// Per level: destination -> intersection witness.
    pub intersections: Vec<IntersectionTable>,
    /// Intra-class waypoint sequences and their hitting-set trees.
    pub t1_seqs: Option<SequenceTable>,
    pub t1_trees: TreeTableSet,
    /// Per level: class-to-target relay sequences.
    pub t2_seqs: Vec<SequenceTable>,
    /// Bunch membership (sorted), for pivot lookups.
    pub bunch: Vec<VertexId>,
}

impl VertexTable {
    pub fn new(vertex: VertexId) -> Self {
        VertexTable { vertex, ..Default::default() }
    }

    pub fn in_bunch(&self, v: VertexId) -> bool {
        self.bunch.binary_search(&v).is_ok()
    }

    /// Total stored bits under the information-theoretic accounting.
    pub fn bits(&self, n: usize, max_deg: usize) -> u64 {
        let mut b = 0u64;
        if let Some(local) = &self.local {
            b += local.len() as u64 * (id_bits(n) + port_bits(max_deg));
            if self.radii.len() > 1 {
                // Nested levels also need the member ranks.
                b += local.len() as u64 * width(local.len().max(2) as u64);
            }
        }
        b += self.radii.iter().map(dist_bits).sum::<u64>();
        for reps in &self.color_reps {
            b += reps
                .iter()
                .map(|(_, d)| id_bits(n) + dist_bits(d))
                .sum::<u64>();
        }
        for set in &self.cluster_tables {
            b += set.bits(n, max_deg);
        }
        for cache in &self.label_caches {
            b += cache.bits(n, max_deg);
        }
        b += self.global_tables.bits(n, max_deg);
        for t in &self.intersections {
            b += t.bits(n);
        }
        if let Some(s) = &self.t1_seqs {
            b += s.bits(n, max_deg);
        }
        b += self.t1_trees.bits(n, max_deg);
        for s in &self.t2_seqs {
            b += s.bits(n, max_deg);
        }
        b += self.bunch.len() as u64 * id_bits(n);
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate_graph, GraphSpec};
    use crate::local::build_local_table;

    #[test]
    fn empty_table_is_zero_bits() {
        let t = VertexTable::new(0);
        assert_eq!(t.bits(100, 10), 0);
    }

    #[test]
    fn local_table_bit_formula() {
        let g = generate_graph(&GraphSpec::GnmRandom { n: 64, m: 160 }, 2).unwrap();
        let local = build_local_table(&g, 0, 10);
        let t_entries = local.len() as u64;
        let mut table = VertexTable::new(0);
        table.local = Some(local);
        assert_eq!(
            table.bits(64, g.max_degree()),
            t_entries * (id_bits(64) + port_bits(g.max_degree()))
        );
    }
}
