//! Waypoint sequences: per-destination lists of intermediate targets that
//! let a vertex forward with only its vicinity table, a few direct edges and
//! (for some terminals) one tree.

use crate::bits::{id_bits, port_bits};
use crate::error::RouteError;
use crate::graph::{Port, VertexId};
use crate::local::LocalTable;
use crate::tree::TreeLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopMode {
    /// Reachable through the predecessor's vicinity table.
    Vicinity,
    /// One direct edge; the port belongs to the predecessor waypoint.
    Edge(Port),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Waypoint {
    pub vertex: VertexId,
    pub mode: HopMode,
}

impl Waypoint {
    pub fn vicinity(vertex: VertexId) -> Self {
        Waypoint { vertex, mode: HopMode::Vicinity }
    }

    pub fn edge(vertex: VertexId, port: Port) -> Self {
        Waypoint { vertex, mode: HopMode::Edge(port) }
    }

    pub fn bits(&self, n: usize, max_deg: usize) -> u64 {
        1 + id_bits(n)
            + match self.mode {
                HopMode::Vicinity => 0,
                HopMode::Edge(_) => port_bits(max_deg),
            }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalKind {
    /// The last waypoint is the destination itself.
    Destination,
    /// The last waypoint names a spanning tree; the final leg runs on that
    /// tree from the second-to-last waypoint.
    HittingTree,
    /// The last waypoint is a relay that swaps in its own stored sequence.
    Relay,
}

/// One stored sequence.
#[derive(Debug, Clone)]
struct SeqEntry {
    dest: VertexId,
    start: u32,
    len: u16,
    terminal: TerminalKind,
    label: Option<TreeLabel>,
}

/// Per-vertex keyed store of sequences, flattened into one arena.
#[derive(Debug, Clone, Default)]
pub struct SequenceTable {
    entries: Vec<SeqEntry>,
    arena: Vec<Waypoint>,
}

pub struct SeqView<'a> {
    pub wps: &'a [Waypoint],
    pub terminal: TerminalKind,
    pub label: Option<&'a TreeLabel>,
}

impl SequenceTable {
    pub fn push(
        &mut self,
        dest: VertexId,
        wps: &[Waypoint],
        terminal: TerminalKind,
        label: Option<TreeLabel>,
    ) {
        let start = self.arena.len() as u32;
        self.arena.extend_from_slice(wps);
        self.entries.push(SeqEntry { dest, start, len: wps.len() as u16, terminal, label });
    }

    pub fn finalize(&mut self) {
        self.entries.sort_by_key(|e| e.dest);
    }

    pub fn get(&self, dest: VertexId) -> Option<SeqView<'_>> {
        let i = self.entries.binary_search_by_key(&dest, |e| e.dest).ok()?;
        let e = &self.entries[i];
        Some(SeqView {
            wps: &self.arena[e.start as usize..e.start as usize + e.len as usize],
            terminal: e.terminal,
            label: e.label.as_ref(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, SeqView<'_>)> {
        self.entries.iter().map(move |e| {
            (
                e.dest,
                SeqView {
                    wps: &self.arena[e.start as usize..e.start as usize + e.len as usize],
                    terminal: e.terminal,
                    label: e.label.as_ref(),
                },
            )
        })
    }

    pub fn bits(&self, n: usize, max_deg: usize) -> u64 {
        let mut total = 0;
        for (dest, view) in self.iter() {
            let _ = dest;
            total += id_bits(n) + 2; // key and terminal tag
            total += view.wps.iter().map(|w| w.bits(n, max_deg)).sum::<u64>();
            if let Some(l) = view.label {
                total += l.bits(n, max_deg);
            }
        }
        total
    }

    pub(crate) fn corrupt_first_port_for_tests(&mut self) {
        for wp in &mut self.arena {
            if let HopMode::Edge(p) = wp.mode {
                wp.mode = HopMode::Edge(p ^ 1);
                return;
            }
        }
    }

    pub(crate) fn raw_parts(&self) -> (Vec<(VertexId, u32, u16, u8, Option<&TreeLabel>)>, &[Waypoint]) {
        (
            self.entries
                .iter()
                .map(|e| (e.dest, e.start, e.len, terminal_tag(e.terminal), e.label.as_ref()))
                .collect(),
            &self.arena,
        )
    }

    pub(crate) fn from_raw_parts(
        entries: Vec<(VertexId, u32, u16, u8, Option<TreeLabel>)>,
        arena: Vec<Waypoint>,
    ) -> Self {
        SequenceTable {
            entries: entries
                .into_iter()
                .map(|(dest, start, len, tag, label)| SeqEntry {
                    dest,
                    start,
                    len,
                    terminal: terminal_from_tag(tag),
                    label,
                })
                .collect(),
            arena,
        }
    }
}

pub(crate) fn terminal_tag(t: TerminalKind) -> u8 {
    match t {
        TerminalKind::Destination => 0,
        TerminalKind::HittingTree => 1,
        TerminalKind::Relay => 2,
    }
}

pub(crate) fn terminal_from_tag(tag: u8) -> TerminalKind {
    match tag {
        0 => TerminalKind::Destination,
        1 => TerminalKind::HittingTree,
        _ => TerminalKind::Relay,
    }
}

/// Mutable per-message sequence cursor carried in headers.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqState {
    pub wps: Vec<Waypoint>,
    pub cursor: u16,
    pub terminal: TerminalKind,
    /// Vertex this sequence heads to (the last waypoint for destination
    /// terminals; the stored key in general).
    pub target: VertexId,
}

impl SeqState {
    pub fn from_view(view: &SeqView<'_>, target: VertexId) -> Self {
        SeqState { wps: view.wps.to_vec(), cursor: 0, terminal: view.terminal, target }
    }

    pub fn bits(&self, n: usize, max_deg: usize) -> u64 {
        id_bits(n)
            + 2
            + crate::bits::width(self.wps.len().max(1) as u64)
            + self.wps.iter().map(|w| w.bits(n, max_deg)).sum::<u64>()
    }
}

pub enum SeqOutcome {
    Forward(Port),
    /// Cursor sits on a hitting-tree terminal: switch to tree routing on the
    /// named tree from the current vertex.
    SwitchToTree { root: VertexId },
    /// The sequence target was reached (destination terminals only).
    TargetReached,
    /// A relay terminal was reached; the relay swaps in its own sequence.
    RelayReached { relay: VertexId },
}

/// One forwarding decision inside a sequence. Uses only the current vertex's
/// vicinity table and the state carried in the header.
pub fn seq_step(
    at: VertexId,
    local: &LocalTable,
    state: &mut SeqState,
) -> Result<SeqOutcome, RouteError> {
    loop {
        let last = state.wps.len() as u16 - 1;
        if state.terminal == TerminalKind::HittingTree && state.cursor == last {
            return Ok(SeqOutcome::SwitchToTree { root: state.wps[last as usize].vertex });
        }
        let wp = state.wps[state.cursor as usize];
        if at == wp.vertex {
            if state.cursor == last {
                return Ok(match state.terminal {
                    TerminalKind::Destination => SeqOutcome::TargetReached,
                    TerminalKind::Relay => SeqOutcome::RelayReached { relay: at },
                    TerminalKind::HittingTree => unreachable!("handled above"),
                });
            }
            state.cursor += 1;
            continue;
        }
        return Ok(match wp.mode {
            HopMode::Vicinity => SeqOutcome::Forward(local.next_hop(wp.vertex)?),
            HopMode::Edge(port) => SeqOutcome::Forward(port),
        });
    }
}
