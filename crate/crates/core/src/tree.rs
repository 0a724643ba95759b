//! Tree routing by heavy-path intervals.
//!
//! Nodes are numbered by a DFS that always descends into the heavy child
//! first. A node's table holds its interval, parent port and heavy-child
//! port; a destination label holds the destination's DFS number plus one
//! (tail, port) pair per light edge on its root path. Both stay polylog-sized
//! per node: the table never lists children, and a root path crosses at most
//! log2(n) light edges.

use std::collections::HashMap;

use crate::bits::{id_bits, port_bits};
use crate::error::{BuildError, RouteError};
use crate::graph::{Graph, Port, VertexId};

/// A rooted tree over a subset of graph vertices, with tree edges annotated
/// by the graph ports in both directions.
#[derive(Debug, Clone)]
pub struct TreeTopology {
    pub root: VertexId,
    pub nodes: Vec<VertexId>,
    /// parent[i] indexes into nodes; None for the root. Ports are (at child
    /// towards parent, at parent towards child).
    parent: Vec<Option<(usize, Port, Port)>>,
    index: HashMap<VertexId, usize>,
}

impl TreeTopology {
    /// Builds a topology from parent pointers (e.g. canonical shortest-path
    /// parents restricted to a cluster). Rejects inputs that are not trees.
    pub fn from_parent_map(
        g: &Graph,
        root: VertexId,
        members: &[VertexId],
        parent_of: &dyn Fn(VertexId) -> Option<VertexId>,
    ) -> Result<Self, BuildError> {
        let nodes: Vec<VertexId> = members.to_vec();
        let index: HashMap<VertexId, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        if !index.contains_key(&root) {
            return Err(BuildError::NotATree(format!("root {root} not among members")));
        }
        let mut parent = vec![None; nodes.len()];
        for (i, &v) in nodes.iter().enumerate() {
            if v == root {
                continue;
            }
            let p = parent_of(v)
                .ok_or_else(|| BuildError::NotATree(format!("{v} has no parent")))?;
            let pi = *index
                .get(&p)
                .ok_or_else(|| BuildError::NotATree(format!("parent {p} of {v} outside tree")))?;
            let up = g
                .port_to(v, p)
                .ok_or_else(|| BuildError::NotATree(format!("tree edge ({v},{p}) not in graph")))?;
            let down = g.port_to(p, v).unwrap();
            parent[i] = Some((pi, up, down));
        }
        let topo = TreeTopology { root, nodes, parent, index };
        topo.validate_acyclic()?;
        Ok(topo)
    }

    /// Interprets a whole graph as a tree rooted at `root` (BFS orientation).
    pub fn from_tree_graph(g: &Graph, root: VertexId) -> Result<Self, BuildError> {
        if g.m() != g.n().saturating_sub(1) {
            return Err(BuildError::NotATree(format!(
                "graph has {} edges, a tree on {} vertices needs {}",
                g.m(),
                g.n(),
                g.n().saturating_sub(1)
            )));
        }
        let mut parent_map: HashMap<VertexId, VertexId> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([root]);
        let mut seen = vec![false; g.n()];
        seen[root as usize] = true;
        while let Some(v) = queue.pop_front() {
            for &(u, _) in g.neighbors(v) {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    parent_map.insert(u, v);
                    queue.push_back(u);
                }
            }
        }
        let members: Vec<VertexId> = (0..g.n() as VertexId).collect();
        Self::from_parent_map(g, root, &members, &|v| parent_map.get(&v).copied())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    pub fn parent_of(&self, v: VertexId) -> Option<VertexId> {
        let i = *self.index.get(&v)?;
        self.parent[i].map(|(pi, _, _)| self.nodes[pi])
    }

    /// The unique tree path between two members, inclusive.
    pub fn tree_path(&self, a: VertexId, b: VertexId) -> Vec<VertexId> {
        let mut up_a = vec![a];
        let mut cur = a;
        while let Some(p) = self.parent_of(cur) {
            up_a.push(p);
            cur = p;
        }
        let pos: HashMap<VertexId, usize> = up_a.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut up_b = vec![b];
        let mut cur = b;
        let meet;
        loop {
            if let Some(&i) = pos.get(&cur) {
                meet = i;
                break;
            }
            let p = self.parent_of(cur).expect("paths meet at the root");
            up_b.push(p);
            cur = p;
        }
        let mut path: Vec<VertexId> = up_a[..=meet].to_vec();
        up_b.pop();
        while let Some(v) = up_b.pop() {
            path.push(v);
        }
        path
    }

    fn validate_acyclic(&self) -> Result<(), BuildError> {
        // Every node must reach the root through parents within len steps.
        for (i, _) in self.nodes.iter().enumerate() {
            let mut cur = i;
            let mut steps = 0;
            while let Some((pi, _, _)) = self.parent[cur] {
                cur = pi;
                steps += 1;
                if steps > self.len() {
                    return Err(BuildError::NotATree("cycle in parent pointers".into()));
                }
            }
            if self.nodes[cur] != self.root {
                return Err(BuildError::NotATree(format!(
                    "{} does not reach the root",
                    self.nodes[i]
                )));
            }
        }
        Ok(())
    }
}

/// Per-node routing state: DFS interval plus the two ports every node needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNodeTable {
    pub enter: u32,
    pub exit: u32,
    pub parent_port: Option<Port>,
    pub heavy_port: Option<Port>,
}

impl TreeNodeTable {
    pub fn bits(&self, n: usize, max_deg: usize) -> u64 {
        let mut b = 2 * id_bits(n);
        if self.parent_port.is_some() {
            b += port_bits(max_deg);
        }
        if self.heavy_port.is_some() {
            b += port_bits(max_deg);
        }
        b
    }
}

/// Destination label: DFS number plus the light edges of the root path as
/// (tail DFS number, port at tail) pairs, in root-to-node order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeLabel {
    pub root: VertexId,
    pub enter: u32,
    pub lights: Vec<(u32, Port)>,
}

impl TreeLabel {
    pub fn bits(&self, n: usize, max_deg: usize) -> u64 {
        id_bits(n) + id_bits(n) + self.lights.len() as u64 * (id_bits(n) + port_bits(max_deg))
    }
}

/// Tables and labels for one tree.
#[derive(Debug, Clone)]
pub struct TreeRouting {
    pub root: VertexId,
    pub tables: Vec<(VertexId, TreeNodeTable)>,
    pub labels: Vec<(VertexId, TreeLabel)>,
}

/// Heavy-path interval tables and labels for the given tree.
pub fn build_tree_routing(topo: &TreeTopology) -> Result<TreeRouting, BuildError> {
    let len = topo.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); len];
    for (i, p) in topo.parent.iter().enumerate() {
        if let Some((pi, _, _)) = p {
            children[*pi].push(i);
        }
    }
    for ch in &mut children {
        ch.sort_by_key(|&i| topo.nodes[i]);
    }
    let root_i = topo.index[&topo.root];

    // Subtree sizes bottom-up over a DFS order.
    let order = {
        let mut order = Vec::with_capacity(len);
        let mut stack = vec![root_i];
        while let Some(i) = stack.pop() {
            order.push(i);
            stack.extend(children[i].iter().copied());
        }
        order
    };
    if order.len() != len {
        return Err(BuildError::NotATree("disconnected members".into()));
    }
    let mut size = vec![1u32; len];
    for &i in order.iter().rev() {
        for &c in &children[i] {
            size[i] += size[c];
        }
    }
    // Heavy child: max subtree size, ties to the smallest vertex id (children
    // are already id-sorted, so the first maximum wins).
    let heavy: Vec<Option<usize>> = (0..len)
        .map(|i| {
            children[i]
                .iter()
                .copied()
                .max_by_key(|&c| (size[c], std::cmp::Reverse(topo.nodes[c])))
        })
        .collect();

    // DFS enter/exit, heavy child first.
    let mut enter = vec![0u32; len];
    let mut exit = vec![0u32; len];
    let mut timer = 0u32;
    let mut stack: Vec<(usize, bool)> = vec![(root_i, false)];
    while let Some((i, processed)) = stack.pop() {
        if processed {
            exit[i] = timer - 1;
            continue;
        }
        enter[i] = timer;
        timer += 1;
        stack.push((i, true));
        // Push light children (reverse id order) then the heavy child so the
        // heavy child is visited first.
        let mut lights: Vec<usize> =
            children[i].iter().copied().filter(|&c| Some(c) != heavy[i]).collect();
        lights.reverse();
        for c in lights {
            stack.push((c, false));
        }
        if let Some(h) = heavy[i] {
            stack.push((h, false));
        }
    }

    let mut tables = Vec::with_capacity(len);
    let mut labels = Vec::with_capacity(len);
    for i in 0..len {
        let parent_port = topo.parent[i].map(|(_, up, _)| up);
        let heavy_port = heavy[i].map(|h| topo.parent[h].unwrap().2);
        tables.push((
            topo.nodes[i],
            TreeNodeTable { enter: enter[i], exit: exit[i], parent_port, heavy_port },
        ));
        // Light edges on the root path, collected bottom-up then reversed.
        let mut lights = Vec::new();
        let mut cur = i;
        while let Some((pi, _, down)) = topo.parent[cur] {
            if heavy[pi] != Some(cur) {
                lights.push((enter[pi], down));
            }
            cur = pi;
        }
        lights.reverse();
        labels.push((topo.nodes[i], TreeLabel { root: topo.root, enter: enter[i], lights }));
    }
    Ok(TreeRouting { root: topo.root, tables, labels })
}

pub enum TreeStep {
    Arrived,
    Forward(Port),
}

/// One forwarding decision on a tree: uses only the current node's table and
/// the destination label.
pub fn tree_next_hop(
    at: VertexId,
    tree_root: VertexId,
    table: &TreeNodeTable,
    label: &TreeLabel,
) -> Result<TreeStep, RouteError> {
    if label.root != tree_root {
        return Err(RouteError::ForeignLabel { expected: tree_root, got: label.root });
    }
    let t = label.enter;
    if t == table.enter {
        return Ok(TreeStep::Arrived);
    }
    if t < table.enter || t > table.exit {
        let p = table.parent_port.ok_or(RouteError::Protocol {
            at,
            msg: "destination outside the tree interval at the root".into(),
        })?;
        return Ok(TreeStep::Forward(p));
    }
    // Destination is strictly below: take the light port recorded for this
    // node, or the heavy edge.
    if let Ok(i) = label.lights.binary_search_by_key(&table.enter, |&(e, _)| e) {
        return Ok(TreeStep::Forward(label.lights[i].1));
    }
    table
        .heavy_port
        .map(TreeStep::Forward)
        .ok_or(RouteError::Protocol { at, msg: "leaf claims the destination below itself".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate_graph, GraphSpec};
    use crate::weight::w_one;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn route_on_tree(
        g: &Graph,
        routing: &TreeRouting,
        from: VertexId,
        label: &TreeLabel,
    ) -> Result<Vec<VertexId>, RouteError> {
        let table_of = |v: VertexId| {
            routing
                .tables
                .iter()
                .find(|&&(x, _)| x == v)
                .map(|(_, t)| t)
                .expect("vertex in tree")
        };
        let mut at = from;
        let mut hops = vec![at];
        for _ in 0..g.n() * 4 {
            match tree_next_hop(at, routing.root, table_of(at), label)? {
                TreeStep::Arrived => return Ok(hops),
                TreeStep::Forward(p) => {
                    at = g.port_target(at, p).unwrap().0;
                    hops.push(at);
                }
            }
        }
        Err(RouteError::RoutingLoop { src: from, dst: 0, budget: g.n() * 4 })
    }

    #[test]
    fn routes_path_tree() {
        let g = generate_graph(&GraphSpec::Path { n: 3 }, 0).unwrap();
        let topo = TreeTopology::from_tree_graph(&g, 0).unwrap();
        let routing = build_tree_routing(&topo).unwrap();
        let label = &routing.labels.iter().find(|&&(v, _)| v == 2).unwrap().1;
        assert_eq!(route_on_tree(&g, &routing, 0, label).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn self_route_is_empty() {
        let g = generate_graph(&GraphSpec::Path { n: 5 }, 0).unwrap();
        let topo = TreeTopology::from_tree_graph(&g, 2).unwrap();
        let routing = build_tree_routing(&topo).unwrap();
        let label = &routing.labels.iter().find(|&&(v, _)| v == 3).unwrap().1;
        assert_eq!(route_on_tree(&g, &routing, 3, label).unwrap(), vec![3]);
    }

    fn random_tree(n: usize, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges: Vec<_> = (1..n as u32)
            .map(|v| (rng.gen_range(0..v), v, w_one()))
            .collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn all_pairs_follow_unique_tree_paths() {
        let g = random_tree(200, 17);
        let topo = TreeTopology::from_tree_graph(&g, 0).unwrap();
        let routing = build_tree_routing(&topo).unwrap();
        let labels: std::collections::HashMap<u32, &TreeLabel> =
            routing.labels.iter().map(|(v, l)| (*v, l)).collect();
        for a in 0..200u32 {
            for b in 0..200u32 {
                let hops = route_on_tree(&g, &routing, a, labels[&b]).unwrap();
                assert_eq!(hops, topo.tree_path(a, b), "pair ({a},{b})");
            }
        }
    }

    #[test]
    fn root_to_leaf_hops_equal_depth() {
        let g = random_tree(120, 3);
        let topo = TreeTopology::from_tree_graph(&g, 0).unwrap();
        let routing = build_tree_routing(&topo).unwrap();
        for (v, label) in &routing.labels {
            let mut depth = 0;
            let mut cur = *v;
            while let Some(p) = topo.parent_of(cur) {
                depth += 1;
                cur = p;
            }
            let hops = route_on_tree(&g, &routing, 0, label).unwrap();
            assert_eq!(hops.len() - 1, depth);
        }
    }

    #[test]
    fn sibling_routes_start_with_parent_port() {
        // Star rooted at the center: every leaf-to-leaf route goes through 0.
        let g = generate_graph(&GraphSpec::Star { n: 8 }, 0).unwrap();
        let topo = TreeTopology::from_tree_graph(&g, 0).unwrap();
        let routing = build_tree_routing(&topo).unwrap();
        let labels: std::collections::HashMap<u32, &TreeLabel> =
            routing.labels.iter().map(|(v, l)| (*v, l)).collect();
        for a in 1..8u32 {
            for b in 1..8u32 {
                if a == b {
                    continue;
                }
                let hops = route_on_tree(&g, &routing, a, labels[&b]).unwrap();
                assert_eq!(hops, vec![a, 0, b]);
            }
        }
    }

    #[test]
    fn foreign_label_rejected() {
        let g = generate_graph(&GraphSpec::Path { n: 4 }, 0).unwrap();
        let t0 = build_tree_routing(&TreeTopology::from_tree_graph(&g, 0).unwrap()).unwrap();
        let t3 = build_tree_routing(&TreeTopology::from_tree_graph(&g, 3).unwrap()).unwrap();
        let foreign = &t3.labels[0].1;
        let table = &t0.tables.iter().find(|&&(v, _)| v == 1).unwrap().1;
        assert!(matches!(
            tree_next_hop(1, t0.root, table, foreign),
            Err(RouteError::ForeignLabel { .. })
        ));
    }

    #[test]
    fn cycle_input_rejected() {
        let g = Graph::from_edges(3, &[(0, 1, w_one()), (1, 2, w_one()), (0, 2, w_one())]).unwrap();
        assert!(matches!(
            TreeTopology::from_tree_graph(&g, 0),
            Err(BuildError::NotATree(_))
        ));
    }

    /// Table and label sizes stay within 4 log^2 n bits per node.
    #[test]
    fn polylog_size_bound() {
        for (n, seed) in [(2usize, 0u64), (17, 1), (300, 2), (500, 3)] {
            let g = random_tree(n, seed);
            let topo = TreeTopology::from_tree_graph(&g, 0).unwrap();
            let routing = build_tree_routing(&topo).unwrap();
            let log = id_bits(n);
            let cap = 4 * log * log;
            for (_, t) in &routing.tables {
                assert!(t.bits(n, g.max_degree()) <= cap);
            }
            for (_, l) in &routing.labels {
                assert!(l.bits(n, g.max_degree()) <= cap, "label bits for n={n}");
            }
        }
    }
}
