//! (3+2e)-stretch scheme for weighted graphs.
//!
//! Color the graph so every vicinity is rainbow, route locally when the
//! destination is near, and otherwise hop to the in-vicinity representative
//! of the destination's color, which shares its class and finishes with an
//! intra-class sequence.

use crate::bits::id_bits;
use crate::coloring::compute_coloring;
use crate::error::{BuildError, RouteError};
use crate::graph::Graph;
use crate::header::{Header, Phase, StartKind};
use crate::label::Label;
use crate::scheme::common::{
    build_vicinities, ceil_root, color_reps, derive_seed, locals_from, member_sets, vicinity_size,
};
use crate::scheme::{BuildStats, SchemeInstance, SchemeKind, SchemeParams};
use crate::t1::{t1_preprocess, stretch_rounds};
use crate::table::VertexTable;

pub fn preprocess(g: &Graph, params: &SchemeParams) -> Result<SchemeInstance, BuildError> {
    let epsilon = params.epsilon()?.clone();
    let n = g.n();
    let q = ceil_root(n, 1, 2);
    let size = vicinity_size(n, q, &params.alpha);
    let vics = build_vicinities(g, size);
    let locals = locals_from(&vics);
    let sets = member_sets(&vics, size);
    let coloring = compute_coloring(&sets, n, q, derive_seed(params.seed, "coloring"), &params.beta)?;
    let reps = color_reps(&vics, &coloring, size)?;
    let t1 = t1_preprocess(g, &coloring.classes, &locals, size, &epsilon)?;

    let mut tables: Vec<VertexTable> = locals
        .into_iter()
        .zip(reps)
        .zip(t1.seqs)
        .zip(t1.tree_tables)
        .enumerate()
        .map(|(v, (((local, reps), seqs), trees))| {
            let mut t = VertexTable::new(v as u32);
            t.local = Some(local);
            t.color_reps = vec![reps];
            t.t1_seqs = Some(seqs);
            t.t1_trees = trees;
            t
        })
        .collect();
    tables.shrink_to_fit();

    let labels = (0..n as u32)
        .map(|v| Label {
            vertex: v,
            color: Some(coloring.color_of(v)),
            pivots: Vec::new(),
        })
        .collect();

    let b = stretch_rounds(&epsilon);
    let header_bound = t1_header_bound(n, g.max_degree(), b);
    Ok(SchemeInstance {
        kind: SchemeKind::Warmup3,
        params: params.clone(),
        graph_digest: g.digest(),
        n,
        max_degree: g.max_degree(),
        q,
        tables,
        labels,
        header_bound_bits: header_bound,
        stats: BuildStats {
            q,
            vicinity_sizes: vec![size],
            coloring_attempts: vec![coloring.attempt],
            hitting_size: t1.hitting.len(),
            ..Default::default()
        },
    })
}

/// Worst-case header bits: a full sequence of 2b+1 waypoints plus one tree
/// label with a light entry per halving of n.
pub fn t1_header_bound(n: usize, max_deg: usize, b: i64) -> u64 {
    let id = id_bits(n);
    let port = crate::bits::port_bits(max_deg);
    let wps = (2 * b + 1) as u64;
    3 + id + 2 + 8 + wps * (1 + id + port) + 2 * id + id * (id + port)
}

pub fn init(source: &VertexTable, label: &Label) -> Result<Header, RouteError> {
    let local = source.local.as_ref().expect("vicinity tables are built");
    if local.contains(label.vertex) {
        return Ok(Header::new("local", Phase::Local));
    }
    let color = label.color.expect("labels carry colors") as usize;
    let (rep, _) = source.color_reps[0][color];
    Ok(Header::new("t1", Phase::ViaRep { target: rep, then: StartKind::T1 }))
}
