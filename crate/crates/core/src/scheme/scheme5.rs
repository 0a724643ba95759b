//! (5+3e)-stretch scheme for weighted graphs.
//!
//! Near destinations route locally or down the source's own cluster tree.
//! Everything else hops to the representative of the color owning the
//! destination's pivot, relays to the pivot with doubling-threshold
//! sequences, crosses the pivot's stored first edge, and descends the
//! receiving cluster tree.

use rayon::prelude::*;

use crate::bits::{id_bits, port_bits};
use crate::centers::tz_centers;
use crate::coloring::compute_coloring;
use crate::error::{BuildError, RouteError};
use crate::graph::Graph;
use crate::header::{AfterT2, Header, Phase, StartKind, TreeSpace};
use crate::label::{Label, LabelPivot};
use crate::scheme::common::{
    build_vicinities, ceil_root, color_reps, derive_seed, locals_from, member_sets, round_robin,
    scatter_clusters, vicinity_size,
};
use crate::scheme::{BuildStats, SchemeInstance, SchemeKind, SchemeParams};
use crate::t2::{relay_rounds, t2_preprocess};
use crate::table::VertexTable;

pub fn preprocess(g: &Graph, params: &SchemeParams) -> Result<SchemeInstance, BuildError> {
    let epsilon = params.epsilon()?.clone();
    let n = g.n();
    let q = ceil_root(n, 1, 3);
    let size = vicinity_size(n, q, &params.alpha);
    let vics = build_vicinities(g, size);
    let locals = locals_from(&vics);

    let s = ceil_root(n, 2, 3);
    let cs = tz_centers(g, s, derive_seed(params.seed, "centers"))?;
    let cluster_trees = cs.build_cluster_trees(g)?;

    let sets = member_sets(&vics, size);
    let coloring =
        compute_coloring(&sets, n, q, derive_seed(params.seed, "coloring"), &params.beta)?;
    let reps = color_reps(&vics, &coloring, size)?;
    let (target_sets, alpha_of) = round_robin(&cs.a, q, n);
    let t2 = t2_preprocess(g, &coloring.classes, &target_sets, &epsilon, &locals, size)?;

    let mut tables: Vec<VertexTable> = locals
        .into_par_iter()
        .zip(reps)
        .zip(t2.seqs)
        .enumerate()
        .map(|(v, ((local, reps_v), seqs))| {
            let mut t = VertexTable::new(v as u32);
            t.local = Some(local);
            t.color_reps = vec![reps_v];
            t.t2_seqs = vec![seqs];
            t
        })
        .collect();
    scatter_clusters(&cluster_trees, 0, &mut tables, None);

    let field = crate::centers::PivotField {
        pivot: cs.pivot.clone(),
        dist: cs.dist_a.clone(),
        parent: cs.pivot_parent.clone(),
    };
    let labels = (0..n as u32)
        .map(|v| {
            let pivot = cs.pivot[v as usize];
            let edge = field.last_edge_from_pivot(v).map(|z| {
                (z, g.port_to(pivot, z).expect("pivot edge exists in the graph"))
            });
            Label {
                vertex: v,
                color: None,
                pivots: vec![LabelPivot {
                    pivot,
                    alpha: alpha_of[pivot as usize],
                    dist: None,
                    edge,
                    tree_label: None,
                }],
            }
        })
        .collect();

    let b = relay_rounds(&epsilon);
    Ok(SchemeInstance {
        kind: SchemeKind::Scheme5,
        params: params.clone(),
        graph_digest: g.digest(),
        n,
        max_degree: g.max_degree(),
        q,
        tables,
        labels,
        header_bound_bits: t2_header_bound(n, g.max_degree(), b, t2.cap_total),
        stats: BuildStats {
            q,
            vicinity_sizes: vec![size],
            center_sizes: vec![cs.a.len()],
            coloring_attempts: vec![coloring.attempt],
            ..Default::default()
        },
    })
}

/// Worst-case header bits for a relay sequence plus one tree label.
pub fn t2_header_bound(n: usize, max_deg: usize, _b: i64, cap_total: usize) -> u64 {
    let id = id_bits(n);
    let port = port_bits(max_deg);
    3 + id + 2 + 16 + cap_total as u64 * (1 + id + port) + 2 * id + id * (id + port)
}

pub fn init(source: &VertexTable, label: &Label) -> Result<Header, RouteError> {
    let dest = label.vertex;
    let local = source.local.as_ref().expect("vicinity tables are built");
    if local.contains(dest) {
        return Ok(Header::new("local", Phase::Local));
    }
    if let Some(tl) = source.label_caches[0].get(dest) {
        return Ok(Header::new(
            "own-cluster",
            Phase::Tree { space: TreeSpace::Cluster(0), root: source.vertex, label: tl.clone() },
        ));
    }
    let pivot = &label.pivots[0];
    let alpha = pivot.alpha.expect("pivots carry their partition index") as usize;
    let (rep, _) = source.color_reps[0][alpha];
    Ok(Header::new(
        "t2",
        Phase::ViaRep {
            target: rep,
            then: StartKind::T2 {
                level: 0,
                target: pivot.pivot,
                after: AfterT2::EdgeThenCache { pivot_idx: 0, cache_level: 0 },
            },
        },
    ))
}
