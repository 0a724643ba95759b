//! (2+2e, +1)-stretch scheme for unweighted graphs.
//!
//! Four routes, picked at the source: an intersection witness between the
//! source's vicinity and the destination's bunch gives an exact shortest
//! path through a cluster tree; otherwise the destination's pivot distance
//! (from its label) is compared against the distance to the in-vicinity
//! color representative, choosing between the pivot's global spanning tree
//! and an intra-class sequence.

use rayon::prelude::*;

use crate::centers::tz_centers;
use crate::coloring::compute_coloring;
use crate::dist::shortest_paths_from;
use crate::error::{BuildError, RouteError};
use crate::graph::{Graph, VertexId};
use crate::header::{Header, Phase, StartKind, TreeSpace};
use crate::label::{Label, LabelPivot};
use crate::scheme::common::{
    build_vicinities, ceil_root, color_reps, derive_seed, intersection_table, locals_from,
    member_sets, scatter_clusters, vicinity_size,
};
use crate::scheme::warmup3::t1_header_bound;
use crate::scheme::{BuildStats, SchemeInstance, SchemeKind, SchemeParams};
use crate::t1::{scatter_tree_tables, stretch_rounds, t1_preprocess};
use crate::table::{IntersectionTable, VertexTable};
use crate::tree::{build_tree_routing, TreeLabel, TreeRouting, TreeTopology};

pub fn preprocess(g: &Graph, params: &SchemeParams) -> Result<SchemeInstance, BuildError> {
    if !g.is_unit_weight() {
        return Err(BuildError::RequiresUnweighted);
    }
    let epsilon = params.epsilon()?.clone();
    let n = g.n();
    let q = ceil_root(n, 1, 3);
    let size = vicinity_size(n, q, &params.alpha);
    let vics = build_vicinities(g, size);
    let locals = locals_from(&vics);

    let s = ceil_root(n, 2, 3);
    let cs = tz_centers(g, s, derive_seed(params.seed, "centers"))?;
    let cluster_trees = cs.build_cluster_trees(g)?;

    // Global spanning trees for every center, plus each vertex's label in the
    // tree of its own pivot.
    let global: Vec<(TreeRouting, Vec<(VertexId, TreeLabel)>)> = cs
        .a
        .par_iter()
        .map(|&a| {
            let f = shortest_paths_from(g, a);
            let members: Vec<VertexId> = (0..n as VertexId).collect();
            let topo = TreeTopology::from_parent_map(g, a, &members, &|v| f.parent[v as usize])?;
            let tr = build_tree_routing(&topo)?;
            let pivot_labels: Vec<(VertexId, TreeLabel)> = tr
                .labels
                .iter()
                .filter(|(v, _)| cs.pivot[*v as usize] == a)
                .map(|(v, l)| (*v, l.clone()))
                .collect();
            Ok((tr, pivot_labels))
        })
        .collect::<Result<_, BuildError>>()?;
    let mut pivot_tree_labels: Vec<Option<TreeLabel>> = vec![None; n];
    for (_, labels) in &global {
        for (v, l) in labels {
            pivot_tree_labels[*v as usize] = Some(l.clone());
        }
    }
    let global_trees: Vec<TreeRouting> = global.into_iter().map(|(tr, _)| tr).collect();
    let global_sets = scatter_tree_tables(&global_trees, n);

    let sets = member_sets(&vics, size);
    let coloring =
        compute_coloring(&sets, n, q, derive_seed(params.seed, "coloring"), &params.beta)?;
    let reps = color_reps(&vics, &coloring, size)?;
    let t1 = t1_preprocess(g, &coloring.classes, &locals, size, &epsilon)?;

    let intersections: Vec<IntersectionTable> = vics
        .par_iter()
        .map(|vic| intersection_table(vic, size, &cs.clusters))
        .collect();

    let mut tables: Vec<VertexTable> = Vec::with_capacity(n);
    for (v, (((local, reps_v), seqs), t1_trees)) in locals
        .into_iter()
        .zip(reps)
        .zip(t1.seqs)
        .zip(t1.tree_tables)
        .enumerate()
    {
        let mut t = VertexTable::new(v as u32);
        t.local = Some(local);
        t.color_reps = vec![reps_v];
        t.t1_seqs = Some(seqs);
        t.t1_trees = t1_trees;
        t.global_tables = global_sets[v].clone();
        t.intersections = vec![intersections[v].clone()];
        tables.push(t);
    }
    scatter_clusters(&cluster_trees, 0, &mut tables, None);

    let labels = (0..n as u32)
        .map(|v| Label {
            vertex: v,
            color: Some(coloring.color_of(v)),
            pivots: vec![LabelPivot {
                pivot: cs.pivot[v as usize],
                alpha: None,
                dist: Some(cs.dist_a[v as usize].clone()),
                edge: None,
                tree_label: pivot_tree_labels[v as usize].clone(),
            }],
        })
        .collect();

    let b = stretch_rounds(&epsilon);
    Ok(SchemeInstance {
        kind: SchemeKind::Scheme21,
        params: params.clone(),
        graph_digest: g.digest(),
        n,
        max_degree: g.max_degree(),
        q,
        tables,
        labels,
        header_bound_bits: t1_header_bound(n, g.max_degree(), b),
        stats: BuildStats {
            q,
            vicinity_sizes: vec![size],
            center_sizes: vec![cs.a.len()],
            coloring_attempts: vec![coloring.attempt],
            hitting_size: t1.hitting.len(),
            ..Default::default()
        },
    })
}

pub fn init(source: &VertexTable, label: &Label) -> Result<Header, RouteError> {
    let dest = label.vertex;
    if let Some(via) = source.intersections[0].get(dest) {
        return Ok(Header::new("intersection", Phase::ViaRoot { target: via, level: 0 }));
    }
    let pivot = &label.pivots[0];
    let dv = pivot.dist.as_ref().expect("labels carry pivot distances");
    let color = label.color.expect("labels carry colors") as usize;
    let (rep, du) = &source.color_reps[0][color];
    if dv <= du {
        Ok(Header::new("pivot-tree", Phase::LabelTree { space: TreeSpace::Global, pivot_idx: 0 }))
    } else {
        Ok(Header::new("t1", Phase::ViaRep { target: *rep, then: StartKind::T1 }))
    }
}
