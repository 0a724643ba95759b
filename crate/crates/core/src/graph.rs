//! Undirected graphs in the fixed-port model.
//!
//! Each vertex numbers its incident links 0..deg(v)-1; forwarding decisions
//! name ports, never global edges. Ports are assigned in neighbor-id order at
//! construction and never change afterwards.

use crate::error::GraphError;
use crate::weight::{w_one, W};
use num_traits::Signed;

pub type VertexId = u32;
pub type Port = u16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    /// adj[v] is sorted by neighbor id; the index of an entry is the port.
    adj: Vec<Vec<(VertexId, W)>>,
    m: usize,
    unit_weights: bool,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Rejects self-loops,
    /// parallel edges, nonpositive weights and disconnected inputs.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId, W)]) -> Result<Self, GraphError> {
        let mut adj: Vec<Vec<(VertexId, W)>> = vec![Vec::new(); n];
        let mut unit_weights = true;
        for &(u, v, ref w) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::Invalid(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(GraphError::Invalid(format!("self-loop at {u}")));
            }
            if !w.is_positive() {
                return Err(GraphError::Invalid(format!(
                    "nonpositive weight on edge ({u},{v})"
                )));
            }
            if *w != w_one() {
                unit_weights = false;
            }
            adj[u as usize].push((v, w.clone()));
            adj[v as usize].push((u, w.clone()));
        }
        for (v, nbrs) in adj.iter_mut().enumerate() {
            nbrs.sort_by_key(|&(u, _)| u);
            if nbrs.windows(2).any(|p| p[0].0 == p[1].0) {
                return Err(GraphError::Invalid(format!("parallel edge at vertex {v}")));
            }
            if nbrs.len() > Port::MAX as usize {
                return Err(GraphError::Invalid(format!("degree of {v} exceeds the port range")));
            }
        }
        let g = Graph { adj, m: edges.len(), unit_weights };
        if n > 0 && !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_unit_weight(&self) -> bool {
        self.unit_weights
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, W)] {
        &self.adj[v as usize]
    }

    /// Endpoint and weight of the given port at v.
    pub fn port_target(&self, v: VertexId, p: Port) -> Option<&(VertexId, W)> {
        self.adj[v as usize].get(p as usize)
    }

    /// Port at u leading to neighbor v, if the edge exists.
    pub fn port_to(&self, u: VertexId, v: VertexId) -> Option<Port> {
        self.adj[u as usize]
            .binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| i as Port)
    }

    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<&W> {
        self.port_to(u, v).map(|p| &self.adj[u as usize][p as usize].1)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.port_to(u, v).is_some()
    }

    /// Edges as (u, v, w) with u < v, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId, W)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n() as VertexId {
            for &(v, ref w) in self.neighbors(u) {
                if u < v {
                    out.push((u, v, w.clone()));
                }
            }
        }
        out
    }

    fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(u, _) in self.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }

    /// Stable fingerprint of the structure, used to pair serialized scheme
    /// instances with the graph they were built for.
    pub fn digest(&self) -> u64 {
        let mut h = crate::fnv::Fnv::new();
        h.write_u64(self.n() as u64);
        h.write_u64(self.m as u64);
        for u in 0..self.n() as VertexId {
            for &(v, ref w) in self.neighbors(u) {
                if u < v {
                    h.write_u64(u as u64);
                    h.write_u64(v as u64);
                    h.write_u64(*w.numer() as u64);
                    h.write_u64(*w.denom() as u64);
                }
            }
        }
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::w_int;

    fn unit(edges: &[(u32, u32)]) -> Vec<(u32, u32, W)> {
        edges.iter().map(|&(u, v)| (u, v, w_one())).collect()
    }

    #[test]
    fn ports_follow_neighbor_id_order() {
        let g = Graph::from_edges(4, &unit(&[(2, 0), (0, 3), (1, 0)])).unwrap();
        assert_eq!(g.neighbors(0).iter().map(|&(v, _)| v).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(g.port_to(0, 2), Some(1));
        assert_eq!(g.port_target(0, 2).unwrap().0, 3);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            Graph::from_edges(2, &[(0, 0, w_one())]),
            Err(GraphError::Invalid(_))
        ));
        assert!(matches!(
            Graph::from_edges(2, &[(0, 1, w_int(0))]),
            Err(GraphError::Invalid(_))
        ));
        assert!(matches!(
            Graph::from_edges(3, &unit(&[(0, 1)])),
            Err(GraphError::Disconnected)
        ));
        assert!(matches!(
            Graph::from_edges(2, &unit(&[(0, 1), (1, 0)])),
            Err(GraphError::Invalid(_))
        ));
    }

    #[test]
    fn unit_weight_flag() {
        let g = Graph::from_edges(2, &unit(&[(0, 1)])).unwrap();
        assert!(g.is_unit_weight());
        let g = Graph::from_edges(2, &[(0, 1, w_int(2))]).unwrap();
        assert!(!g.is_unit_weight());
    }
}
