//! Greedy hitting sets.
//!
//! Deterministic greedy set cover: repeatedly pick the vertex hitting the
//! most unhit sets (ties to the smallest id). With sets of size >= s this
//! stays within the usual (1 + ln k) * n/s guarantee.

use crate::error::BuildError;
use crate::graph::VertexId;

pub fn greedy_hitting_set(sets: &[Vec<VertexId>], universe: usize) -> Result<Vec<VertexId>, BuildError> {
    for (i, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(BuildError::EmptySet(i));
        }
    }
    let mut containing: Vec<Vec<u32>> = vec![Vec::new(); universe];
    for (i, s) in sets.iter().enumerate() {
        for &v in s {
            containing[v as usize].push(i as u32);
        }
    }
    let mut gain: Vec<usize> = containing.iter().map(Vec::len).collect();
    let mut hit = vec![false; sets.len()];
    let mut remaining = sets.len();
    let mut chosen = Vec::new();
    while remaining > 0 {
        let best = (0..universe)
            .max_by_key(|&v| (gain[v], std::cmp::Reverse(v)))
            .expect("nonempty universe");
        debug_assert!(gain[best] > 0);
        chosen.push(best as VertexId);
        for &si in &containing[best] {
            if !hit[si as usize] {
                hit[si as usize] = true;
                remaining -= 1;
                for &v in &sets[si as usize] {
                    gain[v as usize] -= 1;
                }
            }
        }
    }
    chosen.sort();
    Ok(chosen)
}

/// Greedy guarantee used in assertions: (1 + ln(max|S| * k)) * n / min|S|.
pub fn greedy_bound(sets: &[Vec<VertexId>], universe: usize) -> f64 {
    let s_min = sets.iter().map(Vec::len).min().unwrap_or(1) as f64;
    let s_max = sets.iter().map(Vec::len).max().unwrap_or(1) as f64;
    let k = sets.len() as f64;
    (1.0 + (s_max * k).ln()) * universe as f64 / s_min
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shared_vertex_gives_singleton() {
        let sets = vec![vec![0, 3], vec![0, 5], vec![0, 9]];
        assert_eq!(greedy_hitting_set(&sets, 10).unwrap(), vec![0]);
    }

    #[test]
    fn disjoint_singletons_forced() {
        let sets = vec![vec![0], vec![1], vec![2]];
        assert_eq!(greedy_hitting_set(&sets, 3).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn empty_set_rejected() {
        assert!(matches!(
            greedy_hitting_set(&[vec![1], vec![]], 3),
            Err(BuildError::EmptySet(1))
        ));
    }

    #[test]
    fn random_sets_hit_within_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let universe = 200;
        let sets: Vec<Vec<u32>> = (0..100)
            .map(|_| {
                let mut s: Vec<u32> = Vec::new();
                while s.len() < 20 {
                    let v = rng.gen_range(0..universe as u32);
                    if !s.contains(&v) {
                        s.push(v);
                    }
                }
                s
            })
            .collect();
        let h = greedy_hitting_set(&sets, universe).unwrap();
        for s in &sets {
            assert!(s.iter().any(|v| h.binary_search(v).is_ok()));
        }
        assert!((h.len() as f64) <= greedy_bound(&sets, universe));
    }
}
