//! Vertex vicinities: the ell closest vertices under (distance, id) order.
//!
//! Membership is a prefix of the sorted order, so one vicinity serves every
//! smaller size as well; schemes with nested vicinities store only the
//! largest and remember per-member ranks.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::dist::DistanceField;
use crate::graph::{Graph, Port, VertexId};
use crate::weight::{w_zero, W};

#[derive(Debug, Clone)]
pub struct Vicinity {
    pub center: VertexId,
    pub ell: usize,
    /// Members in (distance, id) order: (vertex, distance, port of the first
    /// edge on the canonical shortest path from the center). The center itself
    /// is first with no port.
    pub members: Vec<(VertexId, W, Option<Port>)>,
    /// Largest r such that every vertex within distance r is a member.
    pub radius: W,
}

impl Vicinity {
    pub fn contains(&self, v: VertexId) -> bool {
        self.members.iter().any(|&(x, _, _)| x == v)
    }

    pub fn member_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.members.iter().map(|&(v, _, _)| v)
    }
}

/// The ell closest vertices of u (clamped to n), their canonical first-hop
/// ports, and the closure radius.
pub fn vicinity(g: &Graph, u: VertexId, ell: usize) -> Vicinity {
    let ell = ell.max(1).min(g.n());
    let (order, field) = closest_order(g, u, ell);
    build_vicinity(g, u, ell, &order, &field)
}

/// Vicinity computed from a full distance field (used when the field is
/// already available for other work).
pub fn vicinity_from_field(g: &Graph, field: &DistanceField, ell: usize) -> Vicinity {
    let u = field.source;
    let ell = ell.max(1).min(g.n());
    let mut order: Vec<VertexId> = (0..g.n() as VertexId).collect();
    order.sort_by(|&a, &b| (&field.dist[a as usize], a).cmp(&(&field.dist[b as usize], b)));
    build_vicinity(g, u, ell, &order, field)
}

fn build_vicinity(
    g: &Graph,
    u: VertexId,
    ell: usize,
    order: &[VertexId],
    field: &DistanceField,
) -> Vicinity {
    let members_ids = &order[..ell];
    // First non-member distance bounds the closure radius from above.
    let cutoff = order.get(ell).map(|&v| field.dist[v as usize].clone());
    let mut radius = w_zero();
    let mut members = Vec::with_capacity(ell);
    for &v in members_ids {
        let d = field.dist[v as usize].clone();
        let within = cutoff.as_ref().map_or(true, |c| d < *c);
        if within && d > radius {
            radius = d.clone();
        }
        let port = field
            .first_hop(v)
            .map(|h| g.port_to(u, h).expect("first hop is a neighbor of the center"));
        members.push((v, d, port));
    }
    Vicinity { center: u, ell, members, radius }
}

/// Dijkstra that settles only as far as needed to identify the ell closest
/// vertices (plus distance ties), then canonicalizes parents inside the
/// settled region. Falls back to the full field for parent propagation on the
/// settled set only.
fn closest_order(g: &Graph, u: VertexId, ell: usize) -> (Vec<VertexId>, DistanceField) {
    let n = g.n();
    let mut dist: Vec<Option<W>> = vec![None; n];
    let mut settled: Vec<VertexId> = Vec::new();
    let mut heap: BinaryHeap<Reverse<(W, VertexId)>> = BinaryHeap::new();
    dist[u as usize] = Some(w_zero());
    heap.push(Reverse((w_zero(), u)));
    let mut done = vec![false; n];
    while let Some(Reverse((d, v))) = heap.pop() {
        if done[v as usize] {
            continue;
        }
        // Stop once ell vertices are settled and the next candidate is
        // strictly farther than the ell-th (ties must be gathered for the
        // id-order tie-break).
        if settled.len() >= ell {
            let kth = dist[settled[ell - 1] as usize].clone().unwrap();
            if d > kth {
                break;
            }
        }
        done[v as usize] = true;
        settled.push(v);
        for &(x, ref w) in g.neighbors(v) {
            let cand = d.clone() + w.clone();
            let better = match &dist[x as usize] {
                None => true,
                Some(cur) => cand < *cur,
            };
            if better {
                dist[x as usize] = Some(cand.clone());
                heap.push(Reverse((cand, x)));
            }
        }
    }
    settled.sort_by(|&a, &b| {
        (dist[a as usize].as_ref().unwrap(), a).cmp(&(dist[b as usize].as_ref().unwrap(), b))
    });
    // Canonical parents within the settled region. A settled vertex's tight
    // predecessors on shortest paths are themselves settled (strictly closer).
    let mut parent: Vec<Option<VertexId>> = vec![None; n];
    for &v in &settled {
        if v == u {
            continue;
        }
        let dv = dist[v as usize].clone().unwrap();
        let mut best: Option<(W, VertexId)> = None;
        for &(x, ref w) in g.neighbors(v) {
            if !done[x as usize] {
                continue;
            }
            if let Some(dx) = &dist[x as usize] {
                if dx.clone() + w.clone() == dv {
                    let key = (dx.clone(), x);
                    if best.as_ref().map_or(true, |b| key < *b) {
                        best = Some(key);
                    }
                }
            }
        }
        parent[v as usize] = Some(best.expect("settled vertex has a settled tight predecessor").1);
    }
    let dist: Vec<W> = dist.into_iter().map(|d| d.unwrap_or_else(w_zero)).collect();
    (settled, DistanceField { source: u, dist, parent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::shortest_paths_from;
    use crate::gen::{generate_graph, GraphSpec};
    use crate::weight::w_int;

    #[test]
    fn singleton_vicinity() {
        let g = generate_graph(&GraphSpec::GnmRandom { n: 20, m: 50 }, 1).unwrap();
        for u in [0u32, 7, 19] {
            let vic = vicinity(&g, u, 1);
            assert_eq!(vic.members.len(), 1);
            assert_eq!(vic.members[0].0, u);
            assert_eq!(vic.radius, w_int(0));
        }
    }

    #[test]
    fn star_vicinity_prefers_small_ids() {
        let g = generate_graph(&GraphSpec::Star { n: 7 }, 0).unwrap();
        let vic = vicinity(&g, 0, 3);
        let ids: Vec<u32> = vic.member_ids().collect();
        assert_eq!(ids, vec![0, 1, 2]);
        assert_eq!(vic.radius, w_int(0));
    }

    #[test]
    fn path_vicinity_and_radius() {
        let g = generate_graph(&GraphSpec::Path { n: 5 }, 0).unwrap();
        let vic = vicinity(&g, 2, 3);
        let ids: Vec<u32> = vic.member_ids().collect();
        assert_eq!(ids, vec![2, 1, 3]);
        assert_eq!(vic.radius, w_int(1));
    }

    #[test]
    fn ell_clamps_to_n() {
        let g = generate_graph(&GraphSpec::Path { n: 4 }, 0).unwrap();
        let vic = vicinity(&g, 0, 99);
        assert_eq!(vic.members.len(), 4);
        assert_eq!(vic.radius, w_int(3));
    }

    #[test]
    fn matches_full_field_version() {
        let g = generate_graph(&GraphSpec::RandomWeighted { n: 60, m: 150, w_min: 1, w_max: 5 }, 9)
            .unwrap();
        for u in [0u32, 31, 59] {
            let f = shortest_paths_from(&g, u);
            let a = vicinity(&g, u, 12);
            let b = vicinity_from_field(&g, &f, 12);
            let ids_a: Vec<_> = a.member_ids().collect();
            let ids_b: Vec<_> = b.member_ids().collect();
            assert_eq!(ids_a, ids_b);
            assert_eq!(a.radius, b.radius);
        }
    }

    /// Closure: every vertex on a canonical shortest path from u to a member
    /// keeps that member in its own vicinity of the same size.
    #[test]
    fn vicinity_closure_holds() {
        let g = generate_graph(&GraphSpec::GnmRandom { n: 120, m: 300 }, 4).unwrap();
        let ell = 15;
        let vics: Vec<Vicinity> = (0..g.n() as u32).map(|u| vicinity(&g, u, ell)).collect();
        for u in 0..g.n() as u32 {
            let f = shortest_paths_from(&g, u);
            for v in vics[u as usize].member_ids() {
                for w in f.path_to(v) {
                    assert!(
                        vics[w as usize].contains(v),
                        "closure violated: {v} in B({u}) but not in B({w})"
                    );
                }
            }
        }
    }

    /// Unweighted graphs: members sit within radius + 1.
    #[test]
    fn unweighted_radius_bound() {
        let g = generate_graph(&GraphSpec::GnmRandom { n: 80, m: 160 }, 6).unwrap();
        for u in 0..g.n() as u32 {
            let vic = vicinity(&g, u, 10);
            let bound = vic.radius.clone() + w_int(1);
            for (_, d, _) in &vic.members {
                assert!(*d <= bound);
            }
        }
    }
}
