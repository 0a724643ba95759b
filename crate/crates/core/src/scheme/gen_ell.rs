//! The level-parameterized schemes for unweighted graphs: additive-2 stretch
//! 3 - 2/l + e (minus) and 3 + 2/l + e (plus).
//!
//! Level i keeps a nested vicinity, a center structure whose clusters hold
//! O(q^i) vertices, per-destination intersection witnesses, and (on the
//! paired levels) a coloring with q^i classes relaying to a partition of the
//! level-k center set. Routing takes the first intersecting level (exact);
//! otherwise an index rule on vicinity radii and pivot distances picks which
//! coloring/center pair to relay through.

use rayon::prelude::*;

use crate::centers::{tz_centers, CenterStructure};
use crate::coloring::compute_coloring;
use crate::error::{BuildError, RouteError};
use crate::graph::Graph;
use crate::header::{AfterT2, Header, Phase, StartKind};
use crate::label::{Label, LabelPivot};
use crate::scheme::common::{
    build_vicinities, ceil_root, color_reps, derive_seed, intersection_table, locals_from,
    member_sets, nested_radius, round_robin, scatter_clusters, vicinity_size,
};
use crate::scheme::scheme5::t2_header_bound;
use crate::scheme::{BuildStats, SchemeInstance, SchemeKind, SchemeParams};
use crate::t2::{relay_rounds, t2_preprocess};
use crate::table::VertexTable;
use crate::waypoint::SequenceTable;
use crate::weight::{w_int, w_one, w_zero, W};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Minus,
    Plus,
}

pub fn preprocess_minus(g: &Graph, params: &SchemeParams) -> Result<SchemeInstance, BuildError> {
    preprocess(g, params, Sign::Minus)
}

pub fn preprocess_plus(g: &Graph, params: &SchemeParams) -> Result<SchemeInstance, BuildError> {
    preprocess(g, params, Sign::Plus)
}

fn preprocess(g: &Graph, params: &SchemeParams, sign: Sign) -> Result<SchemeInstance, BuildError> {
    if !g.is_unit_weight() {
        return Err(BuildError::RequiresUnweighted);
    }
    let epsilon = params.epsilon()?.clone();
    let ell = params.ell.unwrap_or(0) as usize;
    if ell < 2 {
        return Err(BuildError::InvalidParam("ell must be at least 2".into()));
    }
    let n = g.n();
    let denom = match sign {
        Sign::Minus => 2 * ell - 1,
        Sign::Plus => 2 * ell + 1,
    } as u32;
    let q = ceil_root(n, 1, denom);
    let q_pow: Vec<usize> = (0..=ell)
        .map(|i| {
            q.checked_pow(i as u32)
                .filter(|&p| p <= u16::MAX as usize)
                .ok_or_else(|| BuildError::InvalidParam(format!("q^{i} overflows color space")))
        })
        .collect::<Result<_, _>>()?;
    let sizes: Vec<usize> = q_pow.iter().map(|&p| vicinity_size(n, p, &params.alpha)).collect();

    let vics = build_vicinities(g, sizes[ell]);
    let locals = locals_from(&vics);

    // Per-level center structures; level 0 has every vertex as a center.
    let structures: Vec<CenterStructure> = (0..=ell)
        .map(|i| {
            let s_i = n.div_ceil(q_pow[i]).clamp(1, n);
            tz_centers(g, s_i, derive_seed(params.seed, &format!("centers-{i}")))
        })
        .collect::<Result<_, _>>()?;

    let mut tables: Vec<VertexTable> = (0..n as u32)
        .map(|v| {
            let mut t = VertexTable::new(v);
            t.local = Some(locals[v as usize].clone());
            t.radii = (0..=ell).map(|i| nested_radius(&vics[v as usize], sizes[i])).collect();
            t.color_reps = vec![Vec::new(); ell + 1];
            t.t2_seqs = vec![SequenceTable::default(); ell + 1];
            t
        })
        .collect();
    for (i, cs) in structures.iter().enumerate() {
        let trees = cs.build_cluster_trees(g)?;
        scatter_clusters(&trees, i, &mut tables, None);
    }

    // Intersection witnesses: level slot i pairs the level-i vicinity with
    // the level-(ell-i) clusters.
    for i in 0..=ell {
        let cs = &structures[ell - i];
        let per_vertex: Vec<_> = vics
            .par_iter()
            .map(|vic| intersection_table(vic, sizes[i], &cs.clusters))
            .collect();
        for (v, table) in per_vertex.into_iter().enumerate() {
            tables[v].intersections.push(table);
        }
    }

    // Colorings and relay sequences on the paired levels.
    let color_levels: Vec<usize> = match sign {
        Sign::Minus => (0..ell).collect(),
        Sign::Plus => (1..=ell).collect(),
    };
    let mut alpha_maps: Vec<Option<Vec<Option<u16>>>> = vec![None; ell + 1];
    let mut coloring_attempts = Vec::new();
    for &i in &color_levels {
        let sets = member_sets(&vics, sizes[i]);
        let coloring = compute_coloring(
            &sets,
            n,
            q_pow[i],
            derive_seed(params.seed, &format!("coloring-{i}")),
            &params.beta,
        )?;
        coloring_attempts.push(coloring.attempt);
        let reps = color_reps(&vics, &coloring, sizes[i])?;
        let k = match sign {
            Sign::Minus => ell - i - 1,
            Sign::Plus => ell - i + 1,
        };
        let (target_sets, alpha_of) = round_robin(&structures[k].a, q_pow[i], n);
        let t2 = t2_preprocess(g, &coloring.classes, &target_sets, &epsilon, &locals, sizes[i])?;
        alpha_maps[k] = Some(alpha_of);
        for (v, (reps_v, seqs)) in reps.into_iter().zip(t2.seqs).enumerate() {
            tables[v].color_reps[i] = reps_v;
            tables[v].t2_seqs[i] = seqs;
        }
    }

    // Labels carry one pivot record per partitioned center level.
    let label_levels: Vec<usize> = match sign {
        Sign::Minus => (0..ell).collect(),
        Sign::Plus => (1..=ell).collect(),
    };
    let labels: Vec<Label> = (0..n as u32)
        .map(|v| {
            let pivots = label_levels
                .iter()
                .map(|&i| {
                    let cs = &structures[i];
                    let pivot = cs.pivot[v as usize];
                    let field = crate::centers::PivotField {
                        pivot: cs.pivot.clone(),
                        dist: cs.dist_a.clone(),
                        parent: cs.pivot_parent.clone(),
                    };
                    let edge = field
                        .last_edge_from_pivot(v)
                        .map(|z| (z, g.port_to(pivot, z).expect("pivot edge in graph")));
                    LabelPivot {
                        pivot,
                        alpha: alpha_maps[i].as_ref().and_then(|m| m[pivot as usize]),
                        dist: Some(cs.dist_a[v as usize].clone()),
                        edge,
                        tree_label: None,
                    }
                })
                .collect();
            Label { vertex: v, color: None, pivots }
        })
        .collect();

    let b = relay_rounds(&epsilon);
    let cap_total = 2 * b as usize * crate::weight::ceil_log2(&w_int(n as i64)).max(1) as usize + 2;
    Ok(SchemeInstance {
        kind: match sign {
            Sign::Minus => SchemeKind::GenMinus,
            Sign::Plus => SchemeKind::GenPlus,
        },
        params: params.clone(),
        graph_digest: g.digest(),
        n,
        max_degree: g.max_degree(),
        q: q_pow[ell].min(u16::MAX as usize),
        tables,
        labels,
        header_bound_bits: t2_header_bound(n, g.max_degree(), b, cap_total),
        stats: BuildStats {
            q,
            vicinity_sizes: sizes,
            center_sizes: structures.iter().map(|cs| cs.a.len()).collect(),
            coloring_attempts,
            ..Default::default()
        },
    })
}

/// Label slot for a center level.
fn pivot_idx(sign: Sign, level: usize) -> usize {
    match sign {
        Sign::Minus => level,
        Sign::Plus => level - 1,
    }
}

pub fn init(
    inst: &SchemeInstance,
    source: &VertexTable,
    label: &Label,
    sign: Sign,
) -> Result<Header, RouteError> {
    let ell = inst.params.ell.unwrap_or(2) as usize;
    let dest = label.vertex;
    for i in 0..=ell {
        if let Some(via) = source.intersections[i].get(dest) {
            return Ok(Header::new(
                "intersection",
                Phase::ViaRoot { target: via, level: (ell - i) as u8 },
            ));
        }
    }
    // Pivot-distance terms: one step short of the pivot, floored at zero.
    let b_at = |level: usize| -> W {
        let d = label.pivots[pivot_idx(sign, level)]
            .dist
            .clone()
            .expect("labels carry pivot distances");
        if d <= w_one() {
            w_zero()
        } else {
            d - w_one()
        }
    };
    let candidates: Vec<usize> = match sign {
        Sign::Minus => (0..ell).collect(),
        Sign::Plus => (1..=ell).collect(),
    };
    let mut best: Option<(W, usize)> = None;
    for &j in &candidates {
        let k = match sign {
            Sign::Minus => ell - j - 1,
            Sign::Plus => ell - j + 1,
        };
        let value = source.radii[j].clone() + b_at(k);
        // Ties go to the larger index, so a matching value replaces.
        if best.as_ref().map_or(true, |(bv, _)| value <= *bv) {
            best = Some((value, j));
        }
    }
    let (_, j) = best.expect("candidate set is nonempty");
    let k = match sign {
        Sign::Minus => ell - j - 1,
        Sign::Plus => ell - j + 1,
    };
    let lp = &label.pivots[pivot_idx(sign, k)];
    let alpha = lp.alpha.expect("partitioned levels carry alpha") as usize;
    let (rep, _) = source.color_reps[j][alpha];
    Ok(Header::new(
        "t2",
        Phase::ViaRep {
            target: rep,
            then: StartKind::T2 {
                level: j as u8,
                target: lp.pivot,
                after: AfterT2::EdgeThenCache {
                    pivot_idx: pivot_idx(sign, k) as u8,
                    cache_level: k as u8,
                },
            },
        },
    ))
}
