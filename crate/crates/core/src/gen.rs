//! Deterministic graph generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

use crate::error::GraphError;
use crate::graph::{Graph, VertexId};
use crate::weight::{w_int, w_one, W};

const CONNECT_RETRIES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphSpec {
    Path { n: usize },
    Star { n: usize },
    Grid { rows: usize, cols: usize },
    GnmRandom { n: usize, m: usize },
    RandomWeighted { n: usize, m: usize, w_min: i64, w_max: i64 },
}

impl GraphSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            GraphSpec::Path { .. } => "path",
            GraphSpec::Star { .. } => "star",
            GraphSpec::Grid { .. } => "grid",
            GraphSpec::GnmRandom { .. } => "gnm-random",
            GraphSpec::RandomWeighted { .. } => "random-weighted",
        }
    }
}

/// Deterministic for a fixed (spec, seed). Random kinds retry with an
/// incremented seed until connected, up to a fixed cap.
pub fn generate_graph(spec: &GraphSpec, seed: u64) -> Result<Graph, GraphError> {
    match *spec {
        GraphSpec::Path { n } => {
            let edges: Vec<_> = (1..n as VertexId).map(|v| (v - 1, v, w_one())).collect();
            Graph::from_edges(n, &edges)
        }
        GraphSpec::Star { n } => {
            if n < 2 {
                return Err(GraphError::Invalid("star needs n >= 2".into()));
            }
            let edges: Vec<_> = (1..n as VertexId).map(|v| (0, v, w_one())).collect();
            Graph::from_edges(n, &edges)
        }
        GraphSpec::Grid { rows, cols } => {
            let at = |r: usize, c: usize| (r * cols + c) as VertexId;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((at(r, c), at(r, c + 1), w_one()));
                    }
                    if r + 1 < rows {
                        edges.push((at(r, c), at(r + 1, c), w_one()));
                    }
                }
            }
            Graph::from_edges(rows * cols, &edges)
        }
        GraphSpec::GnmRandom { n, m } => connected_gnm(n, m, seed, |_| w_one()),
        GraphSpec::RandomWeighted { n, m, w_min, w_max } => {
            if w_min < 1 || w_max < w_min {
                return Err(GraphError::Invalid("weight range must satisfy 1 <= min <= max".into()));
            }
            connected_gnm(n, m, seed, move |rng| w_int(rng.gen_range(w_min..=w_max)))
        }
    }
}

fn connected_gnm(
    n: usize,
    m: usize,
    seed: u64,
    mut weight: impl FnMut(&mut ChaCha8Rng) -> W,
) -> Result<Graph, GraphError> {
    if n < 1 {
        return Err(GraphError::Invalid("n must be >= 1".into()));
    }
    let max_m = n * (n - 1) / 2;
    if m > max_m || (n > 1 && m < n - 1) {
        return Err(GraphError::GenerationFailed(0));
    }
    for attempt in 0..CONNECT_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        let mut chosen: HashSet<(VertexId, VertexId)> = HashSet::with_capacity(m);
        while chosen.len() < m {
            let u = rng.gen_range(0..n as u32);
            let v = rng.gen_range(0..n as u32);
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            chosen.insert(key);
        }
        let mut pairs: Vec<_> = chosen.into_iter().collect();
        pairs.sort();
        let edges: Vec<_> = pairs.into_iter().map(|(u, v)| (u, v, weight(&mut rng))).collect();
        match Graph::from_edges(n, &edges) {
            Ok(g) => return Ok(g),
            Err(GraphError::Disconnected) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GraphError::GenerationFailed(CONNECT_RETRIES))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_has_expected_shape() {
        let g = generate_graph(&GraphSpec::Path { n: 5 }, 0).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.m(), 4);
        assert!(g.has_edge(2, 3));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn gnm_is_deterministic() {
        let a = generate_graph(&GraphSpec::GnmRandom { n: 100, m: 300 }, 7).unwrap();
        let b = generate_graph(&GraphSpec::GnmRandom { n: 100, m: 300 }, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_graph(&GraphSpec::GnmRandom { n: 100, m: 300 }, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn grid_counts() {
        let g = generate_graph(&GraphSpec::Grid { rows: 8, cols: 8 }, 0).unwrap();
        assert_eq!(g.n(), 64);
        assert_eq!(g.m(), 112);
    }

    #[test]
    fn impossible_gnm_fails() {
        assert!(matches!(
            generate_graph(&GraphSpec::GnmRandom { n: 10, m: 5 }, 0),
            Err(GraphError::GenerationFailed(_))
        ));
    }

    #[test]
    fn random_weights_in_range() {
        let g = generate_graph(
            &GraphSpec::RandomWeighted { n: 30, m: 80, w_min: 1, w_max: 8 },
            3,
        )
        .unwrap();
        for (_, _, w) in g.edges() {
            assert!(w >= w_int(1) && w <= w_int(8));
        }
    }
}
