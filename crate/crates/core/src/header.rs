//! Message headers: the mutable routing state carried with a message.
//!
//! A header is written at the source and afterwards only advances a cursor
//! or is rewritten at designated vertices (relays, cluster roots). Bit
//! accounting covers exactly the fields a phase carries.

use crate::bits::{id_bits, width};
use crate::graph::VertexId;
use crate::tree::TreeLabel;
use crate::waypoint::SeqState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeSpace {
    /// Cluster trees of the given level.
    Cluster(u8),
    /// Global spanning trees rooted at centers.
    Global,
    /// Spanning trees rooted at hitting-set vertices.
    Hitting,
}

/// What to do once a relay-sequence target (a pivot) is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AfterT2 {
    /// The target is the destination itself.
    Arrive,
    /// Forward along the label's stored pivot edge, then fetch the
    /// destination's tree label from the new vertex's cluster cache.
    EdgeThenCache { pivot_idx: u8, cache_level: u8 },
    /// Route on the pivot's tree using the tree label embedded in the
    /// destination label.
    LabelTree { pivot_idx: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartKind {
    T1,
    T2 { level: u8, target: VertexId, after: AfterT2 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Phase {
    /// Vicinity-walk straight to the destination.
    Local,
    /// Vicinity-walk to a cluster root; it looks up the destination's tree
    /// label in its cache and switches to tree routing.
    ViaRoot { target: VertexId, level: u8 },
    /// Vicinity-walk to a representative; it starts a stored sequence.
    ViaRep { target: VertexId, then: StartKind },
    /// Intra-class sequence, with the terminal tree label when present.
    T1 { state: SeqState, vlab: Option<TreeLabel> },
    /// Relay sequence at a level, with the follow-up action.
    T2 { state: SeqState, level: u8, after: AfterT2 },
    /// Tree routing with an explicit label (fetched from a cache or a stored
    /// sequence).
    Tree { space: TreeSpace, root: VertexId, label: TreeLabel },
    /// Tree routing with the label embedded in the destination label.
    LabelTree { space: TreeSpace, pivot_idx: u8 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub branch: &'static str,
    pub phase: Phase,
}

impl Header {
    pub fn new(branch: &'static str, phase: Phase) -> Self {
        Header { branch, phase }
    }

    pub fn bits(&self, n: usize, max_deg: usize) -> u64 {
        let tag = 3;
        tag + match &self.phase {
            Phase::Local => 0,
            Phase::ViaRoot { .. } => id_bits(n) + 4,
            Phase::ViaRep { then, .. } => {
                id_bits(n)
                    + match then {
                        StartKind::T1 => 1,
                        StartKind::T2 { .. } => 1 + 4 + id_bits(n) + 8,
                    }
            }
            Phase::T1 { state, vlab } => {
                state.bits(n, max_deg)
                    + vlab.as_ref().map_or(0, |l| l.bits(n, max_deg))
            }
            Phase::T2 { state, .. } => state.bits(n, max_deg) + 4 + 8,
            Phase::Tree { label, .. } => 2 + id_bits(n) + label.bits(n, max_deg),
            Phase::LabelTree { .. } => 2 + width(8),
        }
    }
}
