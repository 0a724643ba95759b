//! Vicinity routing tables.
//!
//! A vertex stores, for each member of its vicinity, the port of the first
//! edge on the canonical shortest path to it. Vicinity closure guarantees a
//! message forwarded hop by hop through these tables follows an exact
//! shortest path.

use crate::error::RouteError;
use crate::graph::{Graph, Port, VertexId};
use crate::vicinity::{vicinity, Vicinity};
use crate::weight::W;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalTable {
    pub owner: VertexId,
    pub ell: usize,
    /// Sorted by vertex id: (member, first-hop port, rank in (dist, id)
    /// order). The owner itself is rank 0 and carries its own port slot
    /// unused (port 0).
    entries: Vec<(VertexId, Port, u32)>,
}

impl LocalTable {
    pub fn from_vicinity(vic: &Vicinity) -> Self {
        let mut entries: Vec<(VertexId, Port, u32)> = vic
            .members
            .iter()
            .enumerate()
            .map(|(rank, &(v, _, port))| (v, port.unwrap_or(0), rank as u32))
            .collect();
        entries.sort_by_key(|&(v, _, _)| v);
        LocalTable { owner: vic.center, ell: vic.ell, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.rank(v).is_some()
    }

    /// Rank of v in (distance, id) order, if a member. Rank r means v belongs
    /// to every nested vicinity of size > r.
    pub fn rank(&self, v: VertexId) -> Option<u32> {
        self.entries
            .binary_search_by_key(&v, |&(x, _, _)| x)
            .ok()
            .map(|i| self.entries[i].2)
    }

    /// Membership in the nested vicinity of the given size.
    pub fn contains_within(&self, v: VertexId, size: usize) -> bool {
        self.rank(v).map_or(false, |r| (r as usize) < size)
    }

    pub fn entries(&self) -> &[(VertexId, Port, u32)] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut Vec<(VertexId, Port, u32)> {
        &mut self.entries
    }

    pub fn from_raw(owner: VertexId, ell: usize, entries: Vec<(VertexId, Port, u32)>) -> Self {
        LocalTable { owner, ell, entries }
    }

    /// Port of the first edge on a shortest path to dest.
    pub fn next_hop(&self, dest: VertexId) -> Result<Port, RouteError> {
        if dest == self.owner {
            return Err(RouteError::Protocol {
                at: self.owner,
                msg: "local next hop queried for the owner itself".into(),
            });
        }
        match self.entries.binary_search_by_key(&dest, |&(x, _, _)| x) {
            Ok(i) => Ok(self.entries[i].1),
            Err(_) => Err(RouteError::NotInVicinity { at: self.owner, dest }),
        }
    }
}

/// Builds the vicinity table of u for the ell closest vertices.
pub fn build_local_table(g: &Graph, u: VertexId, ell: usize) -> LocalTable {
    LocalTable::from_vicinity(&vicinity(g, u, ell))
}

/// Test and harness helper: forwards from u to dest through the given tables,
/// returning the visited vertices. Each hop consults only the current
/// vertex's own table.
pub fn route_local(
    g: &Graph,
    tables: &[LocalTable],
    u: VertexId,
    dest: VertexId,
) -> Result<(Vec<VertexId>, W), RouteError> {
    let mut at = u;
    let mut hops = vec![u];
    let mut total = crate::weight::w_zero();
    let budget = 16 * g.n().max(1);
    while at != dest {
        if hops.len() > budget {
            return Err(RouteError::RoutingLoop { src: u, dst: dest, budget });
        }
        let port = tables[at as usize].next_hop(dest)?;
        let &(next, ref w) = g
            .port_target(at, port)
            .ok_or_else(|| RouteError::Protocol { at, msg: format!("bad port {port}") })?;
        total += w.clone();
        at = next;
        hops.push(at);
    }
    Ok((hops, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::all_pairs;
    use crate::gen::{generate_graph, GraphSpec};

    #[test]
    fn self_route_is_empty() {
        let g = generate_graph(&GraphSpec::Path { n: 4 }, 0).unwrap();
        let tables: Vec<_> = (0..4).map(|u| build_local_table(&g, u, 2)).collect();
        let (hops, len) = route_local(&g, &tables, 1, 1).unwrap();
        assert_eq!(hops, vec![1]);
        assert_eq!(len, crate::weight::w_zero());
    }

    #[test]
    fn outside_vicinity_errors() {
        let g = generate_graph(&GraphSpec::Path { n: 10 }, 0).unwrap();
        let t = build_local_table(&g, 0, 3);
        assert!(matches!(t.next_hop(9), Err(RouteError::NotInVicinity { .. })));
    }

    #[test]
    fn iterated_routes_are_exact_shortest_paths() {
        let g = generate_graph(
            &GraphSpec::RandomWeighted { n: 150, m: 450, w_min: 1, w_max: 9 },
            21,
        )
        .unwrap();
        let ell = 20;
        let tables: Vec<_> = (0..g.n() as u32).map(|u| build_local_table(&g, u, ell)).collect();
        let oracle = all_pairs(&g);
        for u in 0..g.n() as u32 {
            for &(v, _, _) in tables[u as usize].entries() {
                let (_, len) = route_local(&g, &tables, u, v).unwrap();
                assert_eq!(len, oracle[u as usize][v as usize]);
            }
        }
    }

    #[test]
    fn nested_membership_by_rank() {
        let g = generate_graph(&GraphSpec::Path { n: 6 }, 0).unwrap();
        let t = build_local_table(&g, 2, 5);
        assert!(t.contains_within(2, 1));
        assert!(t.contains_within(1, 2));
        assert!(!t.contains_within(3, 2));
        assert!(t.contains_within(3, 3));
    }
}
