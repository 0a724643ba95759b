//! Destination labels: the short string a sender is given about a
//! destination. One record covers every scheme; absent fields cost no bits.

use crate::bits::{dist_bits, id_bits, port_bits, width};
use crate::graph::{Port, VertexId};
use crate::tree::TreeLabel;
use crate::weight::W;

/// Per-level pivot information inside a label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelPivot {
    pub pivot: VertexId,
    /// Index of the target-partition set containing the pivot.
    pub alpha: Option<u16>,
    /// Distance from the labeled vertex to the pivot.
    pub dist: Option<W>,
    /// First edge on a shortest path from the pivot back to the vertex, as
    /// (other endpoint, port at the pivot).
    pub edge: Option<(VertexId, Port)>,
    /// The vertex's label in the tree rooted at (or associated with) the
    /// pivot.
    pub tree_label: Option<TreeLabel>,
}

impl LabelPivot {
    pub fn just_pivot(pivot: VertexId) -> Self {
        LabelPivot { pivot, alpha: None, dist: None, edge: None, tree_label: None }
    }

    fn bits(&self, n: usize, max_deg: usize, q: usize) -> u64 {
        let mut b = id_bits(n);
        if self.alpha.is_some() {
            b += width(q.max(2) as u64);
        }
        if let Some(d) = &self.dist {
            b += dist_bits(d);
        }
        if self.edge.is_some() {
            b += id_bits(n) + port_bits(max_deg);
        }
        if let Some(t) = &self.tree_label {
            b += t.bits(n, max_deg);
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Label {
    pub vertex: VertexId,
    pub color: Option<u16>,
    pub pivots: Vec<LabelPivot>,
}

impl Label {
    pub fn plain(vertex: VertexId) -> Self {
        Label { vertex, color: None, pivots: Vec::new() }
    }

    pub fn bits(&self, n: usize, max_deg: usize, q: usize) -> u64 {
        let mut b = id_bits(n);
        if self.color.is_some() {
            b += width(q.max(2) as u64);
        }
        b + self.pivots.iter().map(|p| p.bits(n, max_deg, q)).sum::<u64>()
    }
}
