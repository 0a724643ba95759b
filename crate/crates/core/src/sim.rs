//! Fixed-port message forwarding.
//!
//! [`deliver`] moves a message hop by hop. Each decision sees a
//! [`VertexView`] exposing only the current vertex's own table, plus the
//! destination label and the mutable header; reading any other vertex's
//! state is structurally impossible. The per-hop decision itself is shared
//! by all schemes.

use crate::error::RouteError;
use crate::graph::{Graph, Port, VertexId};
use crate::header::{AfterT2, Header, Phase, StartKind, TreeSpace};
use crate::label::Label;
use crate::scheme::SchemeInstance;
use crate::table::VertexTable;
use crate::tree::{tree_next_hop, TreeLabel, TreeNodeTable, TreeStep};
use crate::waypoint::{seq_step, SeqOutcome, SeqState};
use crate::weight::{w_zero, W};

/// The only state a hop decision may read besides the label and header.
pub struct VertexView<'a> {
    pub vertex: VertexId,
    pub table: &'a VertexTable,
}

pub enum Decision {
    Arrived,
    Forward(Port),
}

fn local_of<'a>(view: &VertexView<'a>) -> Result<&'a crate::local::LocalTable, RouteError> {
    view.table.local.as_ref().ok_or(RouteError::Protocol {
        at: view.vertex,
        msg: "vertex has no vicinity table".into(),
    })
}

fn tree_table<'a>(
    view: &VertexView<'a>,
    space: TreeSpace,
    root: VertexId,
) -> Result<&'a TreeNodeTable, RouteError> {
    let set = match space {
        TreeSpace::Cluster(level) => view.table.cluster_tables.get(level as usize),
        TreeSpace::Global => Some(&view.table.global_tables),
        TreeSpace::Hitting => Some(&view.table.t1_trees),
    };
    set.and_then(|s| s.get(root)).ok_or(RouteError::Protocol {
        at: view.vertex,
        msg: format!("no node table for tree {root}"),
    })
}

fn label_pivot<'a>(
    label: &'a Label,
    idx: u8,
    at: VertexId,
) -> Result<&'a crate::label::LabelPivot, RouteError> {
    label.pivots.get(idx as usize).ok_or(RouteError::Protocol {
        at,
        msg: format!("label has no pivot entry {idx}"),
    })
}

/// One forwarding decision: a pure function of the view, label and header.
pub fn step(view: &VertexView, label: &Label, header: &mut Header) -> Result<Decision, RouteError> {
    let at = view.vertex;
    if at == label.vertex {
        return Ok(Decision::Arrived);
    }
    loop {
        match &mut header.phase {
            Phase::Local => {
                let port = local_of(view)?.next_hop(label.vertex)?;
                return Ok(Decision::Forward(port));
            }
            Phase::ViaRoot { target, level } => {
                if at == *target {
                    let level = *level;
                    let cache = view.table.label_caches.get(level as usize).ok_or(
                        RouteError::Protocol { at, msg: format!("no label cache {level}") },
                    )?;
                    let tl = cache.get(label.vertex).ok_or(RouteError::Protocol {
                        at,
                        msg: format!("cluster cache misses {}", label.vertex),
                    })?;
                    header.phase = Phase::Tree {
                        space: TreeSpace::Cluster(level),
                        root: at,
                        label: tl.clone(),
                    };
                    continue;
                }
                let port = local_of(view)?.next_hop(*target)?;
                return Ok(Decision::Forward(port));
            }
            Phase::ViaRep { target, then } => {
                if at == *target {
                    match start_phase(view, label, *then)? {
                        Followup::Switch(phase) => {
                            header.phase = phase;
                            continue;
                        }
                        Followup::Emit(phase, port) => {
                            header.phase = phase;
                            return Ok(Decision::Forward(port));
                        }
                    }
                }
                let port = local_of(view)?.next_hop(*target)?;
                return Ok(Decision::Forward(port));
            }
            Phase::T1 { state, vlab } => match seq_step(at, local_of(view)?, state)? {
                SeqOutcome::Forward(port) => return Ok(Decision::Forward(port)),
                SeqOutcome::SwitchToTree { root } => {
                    let tl = vlab.take().ok_or(RouteError::Protocol {
                        at,
                        msg: "hitting terminal without a tree label".into(),
                    })?;
                    header.phase = Phase::Tree { space: TreeSpace::Hitting, root, label: tl };
                    continue;
                }
                SeqOutcome::TargetReached | SeqOutcome::RelayReached { .. } => {
                    return Err(RouteError::Protocol {
                        at,
                        msg: "intra-class sequence ended away from the destination".into(),
                    });
                }
            },
            Phase::T2 { state, level, after } => {
                let target = state.target;
                match seq_step(at, local_of(view)?, state)? {
                    SeqOutcome::Forward(port) => return Ok(Decision::Forward(port)),
                    SeqOutcome::RelayReached { relay } => {
                        debug_assert_eq!(relay, at);
                        let seqs = view.table.t2_seqs.get(*level as usize).ok_or(
                            RouteError::Protocol { at, msg: format!("no sequences {level}") },
                        )?;
                        let next = seqs.get(target).ok_or(RouteError::Protocol {
                            at,
                            msg: format!("relay has no sequence for {target}"),
                        })?;
                        *state = SeqState::from_view(&next, target);
                        continue;
                    }
                    SeqOutcome::TargetReached => {
                        let after = *after;
                        match pivot_followup(view, label, after)? {
                            Followup::Switch(phase) => {
                                header.phase = phase;
                                continue;
                            }
                            Followup::Emit(phase, port) => {
                                header.phase = phase;
                                return Ok(Decision::Forward(port));
                            }
                        }
                    }
                    SeqOutcome::SwitchToTree { .. } => {
                        return Err(RouteError::Protocol {
                            at,
                            msg: "tree terminal in a relay sequence".into(),
                        });
                    }
                }
            }
            Phase::Tree { space, root, label: tl } => {
                let table = tree_table(view, *space, *root)?;
                match tree_next_hop(at, *root, table, tl)? {
                    TreeStep::Arrived => {
                        return Err(RouteError::Protocol {
                            at,
                            msg: "tree label matched away from the destination".into(),
                        });
                    }
                    TreeStep::Forward(port) => return Ok(Decision::Forward(port)),
                }
            }
            Phase::LabelTree { space, pivot_idx } => {
                let lp = label_pivot(label, *pivot_idx, at)?;
                let tl: &TreeLabel = lp.tree_label.as_ref().ok_or(RouteError::Protocol {
                    at,
                    msg: format!("label pivot {pivot_idx} carries no tree label"),
                })?;
                let table = tree_table(view, *space, lp.pivot)?;
                match tree_next_hop(at, lp.pivot, table, tl)? {
                    TreeStep::Arrived => {
                        return Err(RouteError::Protocol {
                            at,
                            msg: "tree label matched away from the destination".into(),
                        });
                    }
                    TreeStep::Forward(port) => return Ok(Decision::Forward(port)),
                }
            }
        }
    }
}

fn start_phase(view: &VertexView, label: &Label, then: StartKind) -> Result<Followup, RouteError> {
    let at = view.vertex;
    match then {
        StartKind::T1 => {
            let seqs = view.table.t1_seqs.as_ref().ok_or(RouteError::Protocol {
                at,
                msg: "representative has no sequences".into(),
            })?;
            let v = seqs.get(label.vertex).ok_or(RouteError::Protocol {
                at,
                msg: format!("no sequence for {}", label.vertex),
            })?;
            let vlab = v.label.cloned();
            Ok(Followup::Switch(Phase::T1 { state: SeqState::from_view(&v, label.vertex), vlab }))
        }
        StartKind::T2 { level, target, after } => {
            if at == target {
                // The representative is the pivot itself.
                return pivot_followup(view, label, after);
            }
            let seqs = view
                .table
                .t2_seqs
                .get(level as usize)
                .ok_or(RouteError::Protocol { at, msg: format!("no sequences {level}") })?;
            let v = seqs.get(target).ok_or(RouteError::Protocol {
                at,
                msg: format!("no sequence for {target}"),
            })?;
            Ok(Followup::Switch(Phase::T2 { state: SeqState::from_view(&v, target), level, after }))
        }
    }
}

enum Followup {
    Switch(Phase),
    Emit(Phase, Port),
}

/// Action at the pivot once a relay sequence finishes.
fn pivot_followup(view: &VertexView, label: &Label, after: AfterT2) -> Result<Followup, RouteError> {
    let at = view.vertex;
    match after {
        AfterT2::Arrive => Err(RouteError::Protocol {
            at,
            msg: "relay sequence target reached away from the destination".into(),
        }),
        AfterT2::EdgeThenCache { pivot_idx, cache_level } => {
            let lp = label_pivot(label, pivot_idx, at)?;
            let (z, port) = lp.edge.ok_or(RouteError::Protocol {
                at,
                msg: format!("label pivot {pivot_idx} carries no edge"),
            })?;
            Ok(Followup::Emit(
                Phase::ViaRoot { target: z, level: cache_level },
                port,
            ))
        }
        AfterT2::LabelTree { pivot_idx } => Ok(Followup::Switch(Phase::LabelTree {
            space: TreeSpace::Cluster(0),
            pivot_idx,
        })),
    }
}

/// Record of one delivery.
#[derive(Debug, Clone)]
pub struct RouteTrace {
    pub source: VertexId,
    pub dest: VertexId,
    pub hops: Vec<VertexId>,
    pub length: W,
    pub max_header_bits: u64,
    pub branch: &'static str,
}

pub const HOP_BUDGET_FACTOR: usize = 16;

/// Delivers one message, enforcing the locality discipline and a hop budget
/// of 16n.
pub fn deliver(
    g: &Graph,
    inst: &SchemeInstance,
    u: VertexId,
    v: VertexId,
) -> Result<RouteTrace, RouteError> {
    let label = &inst.labels[v as usize];
    let mut header = inst.init_header(&inst.tables[u as usize], label)?;
    let mut hops = vec![u];
    let mut length = w_zero();
    let mut at = u;
    let mut max_header_bits = header.bits(inst.n, inst.max_degree);
    let budget = HOP_BUDGET_FACTOR * g.n();
    loop {
        let view = VertexView { vertex: at, table: &inst.tables[at as usize] };
        match step(&view, label, &mut header)? {
            Decision::Arrived => {
                if at != v {
                    return Err(RouteError::Protocol {
                        at,
                        msg: "arrival signaled away from the destination".into(),
                    });
                }
                return Ok(RouteTrace {
                    source: u,
                    dest: v,
                    hops,
                    length,
                    max_header_bits,
                    branch: header.branch,
                });
            }
            Decision::Forward(port) => {
                let &(next, ref w) = g.port_target(at, port).ok_or(RouteError::Protocol {
                    at,
                    msg: format!("port {port} out of range"),
                })?;
                length += w.clone();
                at = next;
                hops.push(at);
                max_header_bits = max_header_bits.max(header.bits(inst.n, inst.max_degree));
                if hops.len() > budget {
                    return Err(RouteError::RoutingLoop { src: u, dst: v, budget });
                }
            }
        }
    }
}
