//! Level-sampled landmark schemes on weighted graphs: the classic (4k-5)
//! baseline and the (4k-7+e(2k-3)) variant that replaces the last tree hop
//! with colored relay sequences into the (k-2)-level center set.
//!
//! Level sets A_0 .. A_{k-1} shrink geometrically; A_1 comes from the
//! bounded-cluster center construction so bottom-ring vertices own small
//! clusters and can cache their members' tree labels. When the distance to
//! two consecutive level pivots ties, the lower pivot collapses onto the
//! higher one so every vertex sits in its own pivots' clusters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::centers::{grow_cluster, multi_source, tz_centers};
use crate::coloring::compute_coloring;
use crate::error::{BuildError, RouteError};
use crate::graph::{Graph, VertexId};
use crate::header::{AfterT2, Header, Phase, StartKind, TreeSpace};
use crate::label::{Label, LabelPivot};
use crate::scheme::common::{
    build_vicinities, ceil_root, color_reps, derive_seed, locals_from, member_sets, round_robin,
    scatter_clusters, vicinity_size,
};
use crate::scheme::scheme5::t2_header_bound;
use crate::scheme::{BuildStats, SchemeInstance, SchemeKind, SchemeParams};
use crate::t2::{relay_rounds, t2_preprocess};
use crate::table::VertexTable;
use crate::tree::{build_tree_routing, TreeLabel, TreeRouting, TreeTopology};
use crate::weight::{w_int, W};

const SAMPLE_RETRY_CAP: usize = 64;

struct TzCore {
    k: usize,
    /// A_0 .. A_{k-1}, each sorted.
    levels: Vec<Vec<VertexId>>,
    /// pivots[i][v] with tie-collapse onto higher levels.
    pivots: Vec<Vec<VertexId>>,
    /// Label of v in the tree of pivots[i][v].
    pivot_labels: Vec<Vec<TreeLabel>>,
    bunches: Vec<Vec<VertexId>>,
    cluster_trees: Vec<TreeRouting>,
    ring: Vec<usize>,
    sample_attempts: usize,
}

fn build_core(g: &Graph, k: usize, seed: u64) -> Result<TzCore, BuildError> {
    let n = g.n();
    // Bounded clusters for the bottom ring: centers at density n^((k-1)/k).
    let s1 = ceil_root(n, (k - 1) as u32, k as u32).clamp(1, n);
    let cs1 = tz_centers(g, s1, derive_seed(seed, "centers"))?;

    let q = ceil_root(n, 1, k as u32).max(1);
    let mut levels: Vec<Vec<VertexId>> = Vec::new();
    let mut sample_attempts = 0;
    for attempt in 0..SAMPLE_RETRY_CAP {
        sample_attempts = attempt + 1;
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(seed, &format!("levels-{attempt}")));
        let mut ls: Vec<Vec<VertexId>> = vec![(0..n as VertexId).collect(), cs1.a.clone()];
        for _ in 2..k {
            let prev = ls.last().unwrap();
            let next: Vec<VertexId> =
                prev.iter().copied().filter(|_| rng.gen_range(0..q) == 0).collect();
            ls.push(next);
        }
        if !ls[k - 1].is_empty() {
            levels = ls;
            break;
        }
    }
    if levels.is_empty() {
        return Err(BuildError::InvalidParam(format!(
            "could not sample a nonempty level {} in {SAMPLE_RETRY_CAP} attempts",
            k - 1
        )));
    }

    let fields: Vec<_> = levels.iter().map(|a| multi_source(g, a)).collect();
    let mut pivots: Vec<Vec<VertexId>> = fields.iter().map(|f| f.pivot.clone()).collect();
    for i in (0..k - 1).rev() {
        for v in 0..n {
            if fields[i].dist[v] == fields[i + 1].dist[v] {
                pivots[i][v] = pivots[i + 1][v];
            }
        }
    }

    let mut ring = vec![0usize; n];
    for (i, a) in levels.iter().enumerate() {
        for &v in a {
            ring[v as usize] = i;
        }
    }

    // Cluster of w: vertices strictly closer to w than to the level above
    // w's ring.
    let inf = vec![w_int(i64::MAX / 4); n];
    let limit_for = |w: VertexId| -> &[W] {
        let r = ring[w as usize];
        if r + 1 < k {
            &fields[r + 1].dist
        } else {
            &inf
        }
    };
    let clusters: Vec<_> = (0..n as VertexId)
        .into_par_iter()
        .map(|w| grow_cluster(g, w, limit_for(w)))
        .collect();
    let cluster_trees: Vec<TreeRouting> = (0..n as VertexId)
        .into_par_iter()
        .map(|w| {
            let members: Vec<VertexId> = clusters[w as usize].iter().map(|&(v, _, _)| v).collect();
            let by_id: std::collections::HashMap<VertexId, Option<VertexId>> =
                clusters[w as usize].iter().map(|&(v, _, p)| (v, p)).collect();
            let topo =
                TreeTopology::from_parent_map(g, w, &members, &|v| by_id.get(&v).copied().flatten())?;
            build_tree_routing(&topo)
        })
        .collect::<Result<_, _>>()?;

    let mut bunches: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for (w, cluster) in clusters.iter().enumerate() {
        for &(v, _, _) in cluster {
            bunches[v as usize].push(w as VertexId);
        }
    }
    for b in &mut bunches {
        b.sort();
    }

    let mut pivot_labels: Vec<Vec<Option<TreeLabel>>> = vec![vec![None; n]; k];
    for tr in &cluster_trees {
        for (v, lbl) in &tr.labels {
            for i in 0..k {
                if pivots[i][*v as usize] == tr.root {
                    pivot_labels[i][*v as usize] = Some(lbl.clone());
                }
            }
        }
    }
    let pivot_labels: Vec<Vec<TreeLabel>> = pivot_labels
        .into_iter()
        .enumerate()
        .map(|(i, level)| {
            level
                .into_iter()
                .enumerate()
                .map(|(v, l)| {
                    l.ok_or_else(|| {
                        BuildError::InvalidParam(format!(
                            "vertex {v} missing from the cluster of its level-{i} pivot"
                        ))
                    })
                })
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;

    Ok(TzCore { k, levels, pivots, pivot_labels, bunches, cluster_trees, ring, sample_attempts })
}

fn core_tables(g: &Graph, core: &TzCore) -> Vec<VertexTable> {
    let mut tables: Vec<VertexTable> = (0..g.n() as u32)
        .map(|v| {
            let mut t = VertexTable::new(v);
            t.bunch = core.bunches[v as usize].clone();
            t
        })
        .collect();
    // Member-label caches only at bottom-ring roots (their clusters are
    // size-bounded by construction).
    let ring = core.ring.clone();
    scatter_clusters(&core.cluster_trees, 0, &mut tables, Some(&move |w| ring[w as usize] == 0));
    tables
}

fn core_labels(core: &TzCore, n: usize, with_alpha: Option<&[Option<u16>]>) -> Vec<Label> {
    (0..n as u32)
        .map(|v| {
            let pivots = (0..core.k)
                .map(|i| LabelPivot {
                    pivot: core.pivots[i][v as usize],
                    alpha: with_alpha.and_then(|a| {
                        if i == core.k - 2 {
                            a[core.pivots[i][v as usize] as usize]
                        } else {
                            None
                        }
                    }),
                    dist: None,
                    edge: None,
                    tree_label: Some(core.pivot_labels[i][v as usize].clone()),
                })
                .collect();
            Label { vertex: v, color: None, pivots }
        })
        .collect()
}

pub fn preprocess_tz45(g: &Graph, params: &SchemeParams) -> Result<SchemeInstance, BuildError> {
    let k = params.k.unwrap_or(0) as usize;
    if k < 2 {
        return Err(BuildError::InvalidParam("k must be at least 2".into()));
    }
    let core = build_core(g, k, params.seed)?;
    let tables = core_tables(g, &core);
    let labels = core_labels(&core, g.n(), None);
    Ok(SchemeInstance {
        kind: SchemeKind::Tz,
        params: params.clone(),
        graph_digest: g.digest(),
        n: g.n(),
        max_degree: g.max_degree(),
        q: 1,
        tables,
        labels,
        header_bound_bits: tree_header_bound(g.n(), g.max_degree()),
        stats: BuildStats {
            q: 1,
            center_sizes: core.levels.iter().map(Vec::len).collect(),
            sample_attempts: core.sample_attempts,
            ..Default::default()
        },
    })
}

pub fn preprocess_4k7(g: &Graph, params: &SchemeParams) -> Result<SchemeInstance, BuildError> {
    let k = params.k.unwrap_or(0) as usize;
    if k < 3 {
        return Err(BuildError::InvalidParam(
            "k must be at least 3 (the k=2 bound is vacuous)".into(),
        ));
    }
    let epsilon = params.epsilon()?.clone();
    let n = g.n();
    let core = build_core(g, k, params.seed)?;

    let q = ceil_root(n, 1, k as u32);
    let size = vicinity_size(n, q, &params.alpha);
    let vics = build_vicinities(g, size);
    let locals = locals_from(&vics);
    let sets = member_sets(&vics, size);
    let coloring =
        compute_coloring(&sets, n, q, derive_seed(params.seed, "coloring"), &params.beta)?;
    let reps = color_reps(&vics, &coloring, size)?;
    let (target_sets, alpha_of) = round_robin(&core.levels[k - 2], q, n);
    let t2 = t2_preprocess(g, &coloring.classes, &target_sets, &epsilon, &locals, size)?;

    let mut tables = core_tables(g, &core);
    for (v, ((local, reps_v), seqs)) in
        locals.into_iter().zip(reps).zip(t2.seqs).enumerate()
    {
        tables[v].local = Some(local);
        tables[v].color_reps = vec![reps_v];
        tables[v].t2_seqs = vec![seqs];
    }
    let labels = core_labels(&core, n, Some(&alpha_of));

    let b = relay_rounds(&epsilon);
    Ok(SchemeInstance {
        kind: SchemeKind::Tz4k7,
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
            center_sizes: core.levels.iter().map(Vec::len).collect(),
            coloring_attempts: vec![coloring.attempt],
            sample_attempts: core.sample_attempts,
            ..Default::default()
        },
    })
}

/// Worst-case header bits when a cached tree label rides in the header.
fn tree_header_bound(n: usize, max_deg: usize) -> u64 {
    let id = crate::bits::id_bits(n);
    let port = crate::bits::port_bits(max_deg);
    3 + 2 + id + 2 * id + id * (id + port)
}

fn bunch_scan(source: &VertexTable, label: &Label, k: usize) -> Option<usize> {
    (0..k).find(|&i| source.in_bunch(label.pivots[i].pivot))
}

pub fn init_tz(
    inst: &SchemeInstance,
    source: &VertexTable,
    label: &Label,
) -> Result<Header, RouteError> {
    let k = inst.params.k.unwrap_or(2) as usize;
    if source.label_caches[0].contains(label.vertex) {
        let tl = source.label_caches[0].get(label.vertex).unwrap().clone();
        return Ok(Header::new(
            "own-cluster",
            Phase::Tree { space: TreeSpace::Cluster(0), root: source.vertex, label: tl },
        ));
    }
    let i = bunch_scan(source, label, k).ok_or(RouteError::Protocol {
        at: source.vertex,
        msg: "no pivot of the destination in the bunch".into(),
    })?;
    Ok(Header::new(
        "pivot-tree",
        Phase::LabelTree { space: TreeSpace::Cluster(0), pivot_idx: i as u8 },
    ))
}

pub fn init_4k7(
    inst: &SchemeInstance,
    source: &VertexTable,
    label: &Label,
) -> Result<Header, RouteError> {
    let k = inst.params.k.unwrap_or(3) as usize;
    let dest = label.vertex;
    let local = source.local.as_ref().expect("vicinity tables are built");
    if local.contains(dest) {
        return Ok(Header::new("local", Phase::Local));
    }
    if source.label_caches[0].contains(dest) {
        let tl = source.label_caches[0].get(dest).unwrap().clone();
        return Ok(Header::new(
            "own-cluster",
            Phase::Tree { space: TreeSpace::Cluster(0), root: source.vertex, label: tl },
        ));
    }
    let i = bunch_scan(source, label, k).ok_or(RouteError::Protocol {
        at: source.vertex,
        msg: "no pivot of the destination in the bunch".into(),
    })?;
    if i <= k - 2 {
        return Ok(Header::new(
            "pivot-tree",
            Phase::LabelTree { space: TreeSpace::Cluster(0), pivot_idx: i as u8 },
        ));
    }
    let lp = &label.pivots[k - 2];
    let alpha = lp.alpha.expect("level k-2 pivots carry alpha") as usize;
    let (rep, _) = source.color_reps[0][alpha];
    Ok(Header::new(
        "t2",
        Phase::ViaRep {
            target: rep,
            then: StartKind::T2 {
                level: 0,
                target: lp.pivot,
                after: AfterT2::LabelTree { pivot_idx: (k - 2) as u8 },
            },
        },
    ))
}
