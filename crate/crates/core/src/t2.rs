//! Class-to-target routing by doubling-threshold relay sequences.
//!
//! Given a partition of V whose classes meet every vicinity, and a partition
//! of a target set, each vertex of class j stores one sequence per target of
//! the j-th target set. A sequence walks the canonical shortest path in
//! subsequences of at most 2b waypoints whose stop thresholds double round by
//! round; a subsequence that stalls under its threshold ends at a same-class
//! relay, which swaps in its own stored sequence. Relays strictly approach
//! the target, and the full route stays within (1 + 2/(b-1)) of the distance.
//!
//! Weighted graphs are handled on the restriction to distance-realizing
//! edges, rescaled so the smallest such weight is 1; vicinities, canonical
//! paths and distances are unchanged by the rescale.

use rayon::prelude::*;

use crate::dist::{shortest_paths_from, tight_edges, DistanceField};
use crate::error::{BuildError, RouteError};
use crate::graph::{Graph, VertexId};
use crate::local::LocalTable;
use crate::waypoint::{seq_step, SeqOutcome, SeqState, SequenceTable, TerminalKind, Waypoint};
use crate::weight::{ceil_int, ceil_log2, w_int, w_one, w_ratio, W};

pub struct T2Build {
    pub size: usize,
    pub b: i64,
    /// Minimum distance-realizing edge weight; thresholds are measured in
    /// units of this scale.
    pub scale: W,
    /// Cap on subsequences per sequence: ceil(log2(n * M)).
    pub cap_subseq: usize,
    /// Cap on total waypoints per sequence: 2b * cap_subseq + 2.
    pub cap_total: usize,
    pub seqs: Vec<SequenceTable>,
}

/// b = ceil(2 / epsilon) + 1 for the doubling construction.
pub fn relay_rounds(epsilon: &W) -> i64 {
    ceil_int(&(w_int(2) / epsilon.clone())) + 1
}

enum SubStop {
    Dest,
    Relay,
    Cap(usize),
}

/// One subsequence: walks the canonical path from path[start] toward the
/// target, stopping at the target, at a same-class relay when the next jump
/// falls under the threshold, or at the 2b length cap.
fn build_subsequence(
    g: &Graph,
    field: &DistanceField,
    path: &[VertexId],
    start: usize,
    target: VertexId,
    threshold_raw: &W,
    b: i64,
    locals: &[LocalTable],
    size: usize,
    class: &[VertexId],
    out: &mut Vec<Waypoint>,
) -> Result<SubStop, BuildError> {
    let mut i = start;
    let mut len = 0usize;
    loop {
        let x = path[i];
        if locals[x as usize].contains_within(target, size) {
            out.push(Waypoint::vicinity(target));
            return Ok(SubStop::Dest);
        }
        let mut j = i + 1;
        while locals[x as usize].contains_within(path[j], size) {
            j += 1;
        }
        let y = path[j - 1];
        let z = path[j];
        if z == target {
            out.push(Waypoint::vicinity(y));
            out.push(Waypoint::edge(target, g.port_to(y, target).unwrap()));
            return Ok(SubStop::Dest);
        }
        let jump = field.dist[z as usize].clone() - field.dist[x as usize].clone();
        if jump < *threshold_raw {
            let relay = class
                .iter()
                .copied()
                .find(|&r| locals[x as usize].contains_within(r, size))
                .ok_or_else(|| {
                    BuildError::InvalidParam(format!("class misses the vicinity of {x}"))
                })?;
            out.push(Waypoint::vicinity(relay));
            return Ok(SubStop::Relay);
        }
        out.push(Waypoint::vicinity(y));
        out.push(Waypoint::edge(z, g.port_to(y, z).unwrap()));
        len += 2;
        i = j;
        if len >= 2 * b as usize {
            return Ok(SubStop::Cap(i));
        }
    }
}

/// Full sequence stored at u for a target: the first two path vertices, then
/// subsequences with thresholds 2/b, 4/b, 8/b, ... in scale units.
pub fn build_sequence(
    g: &Graph,
    field: &DistanceField,
    target: VertexId,
    b: i64,
    locals: &[LocalTable],
    size: usize,
    class: &[VertexId],
    scale: &W,
    cap_subseq: usize,
    cap_total: usize,
) -> Result<(Vec<Waypoint>, TerminalKind), BuildError> {
    let u = field.source;
    debug_assert_ne!(u, target);
    let path = field.path_to(target);
    let mut wps = Vec::new();
    let u1 = path[1];
    wps.push(Waypoint::edge(u1, g.port_to(u, u1).unwrap()));
    if u1 == target {
        return Ok((wps, TerminalKind::Destination));
    }
    let u2 = path[2];
    wps.push(Waypoint::edge(u2, g.port_to(u1, u2).unwrap()));
    if u2 == target {
        return Ok((wps, TerminalKind::Destination));
    }
    let mut idx = 2usize;
    let mut threshold = w_ratio(2, b) * scale.clone();
    let mut subs = 0usize;
    loop {
        subs += 1;
        if subs > cap_subseq.max(1) {
            return Err(BuildError::SequenceOverflow(format!(
                "{u} -> {target}: subsequence count exceeded {cap_subseq}"
            )));
        }
        let stop = build_subsequence(
            g, field, &path, idx, target, &threshold, b, locals, size, class, &mut wps,
        )?;
        if wps.len() > cap_total {
            return Err(BuildError::SequenceOverflow(format!(
                "{u} -> {target}: {} waypoints (cap {cap_total})",
                wps.len()
            )));
        }
        match stop {
            SubStop::Dest => return Ok((wps, TerminalKind::Destination)),
            SubStop::Relay => return Ok((wps, TerminalKind::Relay)),
            SubStop::Cap(new_idx) => {
                idx = new_idx;
                threshold = threshold * w_int(2);
            }
        }
    }
}

/// Builds all class-to-target sequences. `classes` partitions V and must meet
/// every vicinity of the given size (verified); `targets[j]` lists the
/// destinations served from class j.
pub fn t2_preprocess(
    g: &Graph,
    classes: &[Vec<VertexId>],
    targets: &[Vec<VertexId>],
    epsilon: &W,
    locals: &[LocalTable],
    size: usize,
) -> Result<T2Build, BuildError> {
    assert_eq!(classes.len(), targets.len());
    let n = g.n();
    let b = relay_rounds(epsilon);
    // Hitting property: every class intersects every vicinity.
    for x in 0..n as VertexId {
        let mut seen = vec![false; classes.len()];
        let mut found = 0;
        for &(v, _, rank) in locals[x as usize].entries() {
            if (rank as usize) < size {
                for (j, class) in classes.iter().enumerate() {
                    if !seen[j] && class.binary_search(&v).is_ok() {
                        seen[j] = true;
                        found += 1;
                    }
                }
            }
            if found == classes.len() {
                break;
            }
        }
        if found < classes.len() {
            return Err(BuildError::InvalidParam(format!(
                "class {} misses the vicinity of {x}",
                seen.iter().position(|&s| !s).unwrap()
            )));
        }
    }
    let (scale, m_ratio) = if g.is_unit_weight() {
        (w_one(), w_one())
    } else {
        let (edges, w_min) = tight_edges(g);
        let w_max = edges.iter().map(|(_, _, w)| w.clone()).max().unwrap();
        (w_min.clone(), w_max / w_min)
    };
    let cap_subseq = ceil_log2(&(w_int(n as i64) * m_ratio)).max(1) as usize;
    let cap_total = 2 * b as usize * cap_subseq + 2;

    let mut class_of: Vec<Option<u16>> = vec![None; n];
    for (j, class) in classes.iter().enumerate() {
        for &v in class {
            class_of[v as usize] = Some(j as u16);
        }
    }
    let seqs: Vec<SequenceTable> = (0..n as VertexId)
        .into_par_iter()
        .map(|u| {
            let mut table = SequenceTable::default();
            let Some(j) = class_of[u as usize] else {
                return Ok(table);
            };
            if targets[j as usize].is_empty() {
                return Ok(table);
            }
            let field = shortest_paths_from(g, u);
            for &w in &targets[j as usize] {
                if w == u {
                    continue;
                }
                let (wps, terminal) = build_sequence(
                    g,
                    &field,
                    w,
                    b,
                    locals,
                    size,
                    &classes[j as usize],
                    &scale,
                    cap_subseq,
                    cap_total,
                )?;
                table.push(w, &wps, terminal, None);
            }
            table.finalize();
            Ok(table)
        })
        .collect::<Result<_, BuildError>>()?;

    Ok(T2Build { size, b, scale, cap_subseq, cap_total, seqs })
}

pub struct T2Trace {
    pub hops: Vec<VertexId>,
    pub length: W,
    pub relays: Vec<VertexId>,
    pub header_bits: u64,
}

/// Standalone delivery through relay handoffs; each hop uses only the current
/// vertex's tables plus the carried state.
pub fn route(
    g: &Graph,
    build: &T2Build,
    locals: &[LocalTable],
    u: VertexId,
    w: VertexId,
) -> Result<T2Trace, RouteError> {
    let mut hops = vec![u];
    let mut length = crate::weight::w_zero();
    let mut relays = Vec::new();
    if u == w {
        return Ok(T2Trace { hops, length, relays, header_bits: 0 });
    }
    let view = build.seqs[u as usize]
        .get(w)
        .ok_or(RouteError::Protocol { at: u, msg: format!("no sequence for {w}") })?;
    let mut state = SeqState::from_view(&view, w);
    let mut header_bits = state.bits(g.n(), g.max_degree());
    let mut at = u;
    let budget = 16 * g.n();
    loop {
        if hops.len() > budget {
            return Err(RouteError::RoutingLoop { src: u, dst: w, budget });
        }
        match seq_step(at, &locals[at as usize], &mut state)? {
            SeqOutcome::Forward(port) => {
                let &(next, ref wt) = g
                    .port_target(at, port)
                    .ok_or(RouteError::Protocol { at, msg: format!("bad port {port}") })?;
                length += wt.clone();
                at = next;
                hops.push(at);
                if at == w {
                    return Ok(T2Trace { hops, length, relays, header_bits });
                }
            }
            SeqOutcome::TargetReached => {
                return Err(RouteError::Protocol {
                    at,
                    msg: "sequence target reached away from the destination".into(),
                });
            }
            SeqOutcome::RelayReached { relay } => {
                let view = build.seqs[relay as usize].get(w).ok_or(RouteError::Protocol {
                    at: relay,
                    msg: format!("relay has no sequence for {w}"),
                })?;
                relays.push(relay);
                state = SeqState::from_view(&view, w);
                header_bits = header_bits.max(state.bits(g.n(), g.max_degree()));
            }
            SeqOutcome::SwitchToTree { .. } => {
                return Err(RouteError::Protocol {
                    at,
                    msg: "tree terminal in a relay sequence".into(),
                });
            }
        }
    }
}

/// Relay chain determined by the tables alone: r0 = u, then the last vertex
/// of each stored sequence until one terminates at the target. Returns
/// (relay, predecessor-in-sequence) per handoff.
pub fn relay_chain(build: &T2Build, u: VertexId, w: VertexId) -> Vec<(VertexId, VertexId)> {
    let mut chain = Vec::new();
    let mut r = u;
    loop {
        let Some(view) = build.seqs[r as usize].get(w) else {
            break;
        };
        if view.terminal != TerminalKind::Relay {
            break;
        }
        let next = view.wps.last().unwrap().vertex;
        let prev = if view.wps.len() >= 2 {
            view.wps[view.wps.len() - 2].vertex
        } else {
            r
        };
        chain.push((next, prev));
        r = next;
    }
    chain
}
