//! Intra-class routing by single-threshold waypoint sequences.
//!
//! For a partition of V into q balanced classes, every vertex stores one
//! short sequence per same-class destination. A sequence walks the canonical
//! shortest path in vicinity-sized jumps and either reaches the destination
//! or hands over to a spanning tree rooted at a hitting-set vertex once the
//! remaining jump falls under d(u,v)/b. Routing the sequence costs at most
//! (1 + 2/b) times the distance.

use rayon::prelude::*;

use crate::dist::{shortest_paths_from, DistanceField};
use crate::error::{BuildError, RouteError};
use crate::graph::{Graph, VertexId};
use crate::hitting::greedy_hitting_set;
use crate::local::LocalTable;
use crate::tree::{build_tree_routing, tree_next_hop, TreeLabel, TreeNodeTable, TreeRouting, TreeStep, TreeTopology};
use crate::waypoint::{seq_step, SeqOutcome, SeqState, SequenceTable, TerminalKind, Waypoint};
use crate::weight::{ceil_int, w_int, W};

/// Sorted (root, node table) pairs for a family of trees this vertex belongs
/// to.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeTableSet {
    pub entries: Vec<(VertexId, TreeNodeTable)>,
}

impl TreeTableSet {
    pub fn get(&self, root: VertexId) -> Option<&TreeNodeTable> {
        self.entries
            .binary_search_by_key(&root, |&(r, _)| r)
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn insert(&mut self, root: VertexId, table: TreeNodeTable) {
        match self.entries.binary_search_by_key(&root, |&(r, _)| r) {
            Ok(i) => self.entries[i] = (root, table),
            Err(i) => self.entries.insert(i, (root, table)),
        }
    }

    pub fn bits(&self, n: usize, max_deg: usize) -> u64 {
        self.entries
            .iter()
            .map(|(_, t)| crate::bits::id_bits(n) + t.bits(n, max_deg))
            .sum()
    }
}

/// Distributes tree routing state onto per-vertex sets.
pub fn scatter_tree_tables(trees: &[TreeRouting], n: usize) -> Vec<TreeTableSet> {
    let mut sets = vec![TreeTableSet::default(); n];
    for tr in trees {
        for (v, t) in &tr.tables {
            sets[*v as usize].insert(tr.root, t.clone());
        }
    }
    sets
}

pub struct T1Build {
    /// Vicinity size the sequences were built against.
    pub size: usize,
    pub b: i64,
    pub hitting: Vec<VertexId>,
    /// Per-vertex sequences for same-class destinations.
    pub seqs: Vec<SequenceTable>,
    /// Per-vertex node tables for the hitting-set spanning trees.
    pub tree_tables: Vec<TreeTableSet>,
}

/// b = ceil(2 / epsilon); sequences have at most 2b + 1 waypoints.
pub fn stretch_rounds(epsilon: &W) -> i64 {
    ceil_int(&(w_int(2) / epsilon.clone()))
}

/// Builds the single-threshold sequence from u to v. All waypoints except
/// possibly the last lie on the canonical shortest path from u to v.
pub fn build_sequence(
    g: &Graph,
    field: &DistanceField,
    v: VertexId,
    b: i64,
    locals: &[LocalTable],
    size: usize,
    hitting: &[VertexId],
) -> Result<(Vec<Waypoint>, TerminalKind), BuildError> {
    let u = field.source;
    debug_assert_ne!(u, v);
    let path = field.path_to(v);
    let threshold = field.dist[v as usize].clone() / w_int(b);
    let cap = (2 * b + 1) as usize;
    let mut wps: Vec<Waypoint> = Vec::new();
    let mut i = 0usize;
    loop {
        let x = path[i];
        if locals[x as usize].contains_within(v, size) {
            wps.push(Waypoint::vicinity(v));
            return Ok((wps, TerminalKind::Destination));
        }
        // Membership along the path is a prefix, so the first non-member
        // after x is the boundary.
        let mut j = i + 1;
        while locals[x as usize].contains_within(path[j], size) {
            j += 1;
        }
        let y = path[j - 1];
        let z = path[j];
        if z == v {
            wps.push(Waypoint::vicinity(y));
            wps.push(Waypoint::edge(v, g.port_to(y, v).unwrap()));
            ensure_cap(&wps, cap, u, v)?;
            return Ok((wps, TerminalKind::Destination));
        }
        let jump = field.dist[z as usize].clone() - field.dist[x as usize].clone();
        if jump < threshold {
            let h = hitting
                .iter()
                .copied()
                .find(|&h| locals[x as usize].contains_within(h, size))
                .ok_or_else(|| {
                    BuildError::InvalidParam(format!("hitting set misses the vicinity of {x}"))
                })?;
            wps.push(Waypoint::vicinity(h));
            ensure_cap(&wps, cap, u, v)?;
            return Ok((wps, TerminalKind::HittingTree));
        }
        wps.push(Waypoint::vicinity(y));
        wps.push(Waypoint::edge(z, g.port_to(y, z).unwrap()));
        ensure_cap(&wps, cap, u, v)?;
        i = j;
    }
}

fn ensure_cap(wps: &[Waypoint], cap: usize, u: VertexId, v: VertexId) -> Result<(), BuildError> {
    if wps.len() > cap {
        return Err(BuildError::SequenceOverflow(format!(
            "{u} -> {v} produced {} waypoints (cap {cap})",
            wps.len()
        )));
    }
    Ok(())
}

/// Builds the hitting set over all vicinities, one spanning tree per hitting
/// vertex, and all intra-class sequences.
pub fn t1_preprocess(
    g: &Graph,
    classes: &[Vec<VertexId>],
    locals: &[LocalTable],
    size: usize,
    epsilon: &W,
) -> Result<T1Build, BuildError> {
    let n = g.n();
    let b = stretch_rounds(epsilon);
    let sets: Vec<Vec<VertexId>> = locals
        .iter()
        .map(|t| {
            t.entries()
                .iter()
                .filter(|&&(_, _, rank)| (rank as usize) < size)
                .map(|&(v, _, _)| v)
                .collect()
        })
        .collect();
    let hitting = greedy_hitting_set(&sets, n)?;

    let trees: Vec<TreeRouting> = hitting
        .par_iter()
        .map(|&h| {
            let f = shortest_paths_from(g, h);
            let members: Vec<VertexId> = (0..n as VertexId).collect();
            let topo = TreeTopology::from_parent_map(g, h, &members, &|v| f.parent[v as usize])?;
            build_tree_routing(&topo)
        })
        .collect::<Result<_, _>>()?;
    let tree_tables = scatter_tree_tables(&trees, n);
    // Spanning-tree labels indexed by (tree, vertex) for sequence terminals.
    let tree_labels: Vec<Vec<TreeLabel>> = trees
        .iter()
        .map(|tr| {
            let mut by_vertex: Vec<Option<TreeLabel>> = vec![None; n];
            for (v, l) in &tr.labels {
                by_vertex[*v as usize] = Some(l.clone());
            }
            by_vertex.into_iter().map(Option::unwrap).collect()
        })
        .collect();
    let tree_index: std::collections::HashMap<VertexId, usize> =
        hitting.iter().enumerate().map(|(i, &h)| (h, i)).collect();

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
            let Some(cu) = class_of[u as usize] else {
                return Ok(table);
            };
            let field = shortest_paths_from(g, u);
            for &v in &classes[cu as usize] {
                if v == u {
                    continue;
                }
                let (wps, terminal) = build_sequence(g, &field, v, b, locals, size, &hitting)?;
                let label = match terminal {
                    TerminalKind::HittingTree => {
                        let root = wps.last().unwrap().vertex;
                        Some(tree_labels[tree_index[&root]][v as usize].clone())
                    }
                    _ => None,
                };
                table.push(v, &wps, terminal, label);
            }
            table.finalize();
            Ok(table)
        })
        .collect::<Result<_, BuildError>>()?;

    Ok(T1Build { size, b, hitting, seqs, tree_tables })
}

/// Standalone trace of an intra-class delivery (also used by the acceptance
/// suite). Every hop consults only the current vertex's tables and the
/// mutable state below.
pub struct T1Trace {
    pub hops: Vec<VertexId>,
    pub length: W,
    pub max_waypoints: usize,
    pub header_bits: u64,
}

enum T1Phase {
    Seq(SeqState),
    Tree { root: VertexId, label: TreeLabel },
}

pub fn route(
    g: &Graph,
    build: &T1Build,
    locals: &[LocalTable],
    u: VertexId,
    v: VertexId,
) -> Result<T1Trace, RouteError> {
    let mut hops = vec![u];
    let mut length = crate::weight::w_zero();
    if u == v {
        return Ok(T1Trace { hops, length, max_waypoints: 0, header_bits: 0 });
    }
    let view = build.seqs[u as usize]
        .get(v)
        .ok_or(RouteError::Protocol { at: u, msg: format!("no sequence for {v}") })?;
    let state = SeqState::from_view(&view, v);
    let max_waypoints = state.wps.len();
    let mut header_bits = state.bits(g.n(), g.max_degree());
    if let Some(l) = view.label {
        header_bits += l.bits(g.n(), g.max_degree());
    }
    let terminal_label = view.label.cloned();
    let mut phase = T1Phase::Seq(state);
    let mut at = u;
    let budget = 16 * g.n();
    while at != v {
        if hops.len() > budget {
            return Err(RouteError::RoutingLoop { src: u, dst: v, budget });
        }
        let port = match &mut phase {
            T1Phase::Seq(state) => match seq_step(at, &locals[at as usize], state)? {
                SeqOutcome::Forward(p) => p,
                SeqOutcome::SwitchToTree { root } => {
                    let label = terminal_label.clone().ok_or(RouteError::Protocol {
                        at,
                        msg: "hitting terminal without a tree label".into(),
                    })?;
                    phase = T1Phase::Tree { root, label };
                    continue;
                }
                SeqOutcome::TargetReached => {
                    return Err(RouteError::Protocol {
                        at,
                        msg: "sequence target reached away from the destination".into(),
                    })
                }
                SeqOutcome::RelayReached { .. } => {
                    return Err(RouteError::Protocol {
                        at,
                        msg: "relay terminal in an intra-class sequence".into(),
                    })
                }
            },
            T1Phase::Tree { root, label } => {
                let table = build.tree_tables[at as usize].get(*root).ok_or(
                    RouteError::Protocol { at, msg: format!("no node table for tree {root}") },
                )?;
                match tree_next_hop(at, *root, table, label)? {
                    TreeStep::Arrived => {
                        return Err(RouteError::Protocol {
                            at,
                            msg: "tree arrival away from the destination".into(),
                        })
                    }
                    TreeStep::Forward(p) => p,
                }
            }
        };
        let &(next, ref w) = g
            .port_target(at, port)
            .ok_or(RouteError::Protocol { at, msg: format!("bad port {port}") })?;
        length += w.clone();
        at = next;
        hops.push(at);
    }
    Ok(T1Trace { hops, length, max_waypoints, header_bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::compute_coloring;
    use crate::dist::all_pairs;
    use crate::gen::{generate_graph, GraphSpec};
    use crate::local::build_local_table;
    use crate::weight::{w_ratio, w_one};

    fn locals_for(g: &Graph, size: usize) -> Vec<LocalTable> {
        (0..g.n() as u32).map(|u| build_local_table(g, u, size)).collect()
    }

    #[test]
    fn in_vicinity_destination_is_single_waypoint() {
        let g = generate_graph(&GraphSpec::Path { n: 10 }, 0).unwrap();
        let locals = locals_for(&g, 4);
        let field = shortest_paths_from(&g, 0);
        let (wps, term) = build_sequence(&g, &field, 2, 2, &locals, 4, &[0]).unwrap();
        assert_eq!(wps, vec![Waypoint::vicinity(2)]);
        assert_eq!(term, TerminalKind::Destination);
    }

    #[test]
    fn long_path_sequence_stays_on_path_within_cap() {
        let g = generate_graph(&GraphSpec::Path { n: 21 }, 0).unwrap();
        let locals = locals_for(&g, 7);
        let hitting: Vec<u32> = (0..21).collect(); // every vicinity trivially hit
        let field = shortest_paths_from(&g, 0);
        let b = 2; // epsilon = 1
        let (wps, term) = build_sequence(&g, &field, 20, b, &locals, 7, &hitting).unwrap();
        assert!(wps.len() <= (2 * b + 1) as usize);
        let path = field.path_to(20);
        for (i, wp) in wps.iter().enumerate() {
            if i + 1 < wps.len() || term == TerminalKind::Destination {
                assert!(path.contains(&wp.vertex), "waypoint {wp:?} off the canonical path");
            }
        }
    }

    /// Replaying the three-case loop independently reproduces the stored
    /// sequence exactly.
    #[test]
    fn replay_matches_construction() {
        let g = generate_graph(&GraphSpec::GnmRandom { n: 60, m: 150 }, 13).unwrap();
        let size = 12;
        let locals = locals_for(&g, size);
        let sets: Vec<Vec<u32>> = locals
            .iter()
            .map(|t| t.entries().iter().map(|&(v, _, _)| v).collect())
            .collect();
        let hitting = greedy_hitting_set(&sets, 60).unwrap();
        let b = 3;
        for u in [0u32, 17, 42] {
            let field = shortest_paths_from(&g, u);
            for v in 0..60u32 {
                if v == u {
                    continue;
                }
                let (wps, term) =
                    build_sequence(&g, &field, v, b, &locals, size, &hitting).unwrap();
                // Independent replay straight from the rules.
                let path = field.path_to(v);
                let member = |x: u32, t: u32| locals[x as usize].contains_within(t, size);
                let mut expect: Vec<u32> = Vec::new();
                let mut i = 0;
                let s = field.dist[v as usize].clone() / w_int(b);
                let expect_term = loop {
                    let x = path[i];
                    if member(x, v) {
                        expect.push(v);
                        break TerminalKind::Destination;
                    }
                    let j = (i + 1..path.len()).find(|&j| !member(x, path[j])).unwrap();
                    if path[j] == v {
                        expect.push(path[j - 1]);
                        expect.push(v);
                        break TerminalKind::Destination;
                    }
                    if field.dist[path[j] as usize].clone() - field.dist[x as usize].clone() < s {
                        expect.push(
                            hitting.iter().copied().find(|&h| member(x, h)).unwrap(),
                        );
                        break TerminalKind::HittingTree;
                    }
                    expect.push(path[j - 1]);
                    expect.push(path[j]);
                    i = j;
                };
                assert_eq!(wps.iter().map(|w| w.vertex).collect::<Vec<_>>(), expect);
                assert_eq!(term, expect_term);
            }
        }
    }

    #[test]
    fn all_same_class_pairs_within_stretch() {
        let g = generate_graph(&GraphSpec::GnmRandom { n: 120, m: 360 }, 23).unwrap();
        let n = 120;
        let q = 11;
        let size = 76; // ceil(q * log2 n)
        let locals = locals_for(&g, size);
        let sets: Vec<Vec<u32>> = locals
            .iter()
            .map(|t| t.entries().iter().map(|&(v, _, _)| v).collect())
            .collect();
        let coloring = compute_coloring(&sets, n, q, 5, &w_int(4)).unwrap();
        let eps = w_ratio(1, 2);
        let build = t1_preprocess(&g, &coloring.classes, &locals, size, &eps).unwrap();
        let oracle = all_pairs(&g);
        let bound_factor = w_one() + w_int(2) / w_int(build.b);
        let mut pairs = 0;
        for class in &coloring.classes {
            for &u in class {
                for &v in class {
                    if u == v {
                        continue;
                    }
                    let tr = route(&g, &build, &locals, u, v).unwrap();
                    let d = &oracle[u as usize][v as usize];
                    assert!(
                        tr.length <= bound_factor.clone() * d.clone(),
                        "pair ({u},{v}): routed {} vs d {}",
                        tr.length,
                        d
                    );
                    assert!(tr.max_waypoints <= (2 * build.b + 1) as usize);
                    pairs += 1;
                }
            }
        }
        assert!(pairs > 500, "coloring should leave nontrivial classes");
    }

    #[test]
    fn source_equals_destination_is_noop() {
        let g = generate_graph(&GraphSpec::Path { n: 5 }, 0).unwrap();
        let locals = locals_for(&g, 2);
        let build = t1_preprocess(&g, &[vec![0, 1, 2, 3, 4]], &locals, 2, &w_one()).unwrap();
        let tr = route(&g, &build, &locals, 3, 3).unwrap();
        assert_eq!(tr.hops, vec![3]);
    }
}
