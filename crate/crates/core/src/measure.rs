//! Size accounting for built scheme instances.

use serde::{Deserialize, Serialize};

use crate::scheme::SchemeInstance;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SizeReport {
    pub scheme: String,
    pub n: usize,
    /// Per-vertex routing table bits.
    pub table_bits_max: u64,
    pub table_bits_mean: f64,
    pub table_bits_p50: u64,
    pub table_bits_p95: u64,
    /// Per-vertex label bits.
    pub label_bits_max: u64,
    pub label_bits_mean: f64,
    /// Structural bound on header bits.
    pub header_bound_bits: u64,
}

fn percentile(sorted: &[u64], p: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let idx = ((sorted.len() - 1) as f64 * p).round() as usize;
    sorted[idx]
}

/// Information-theoretic bit sizes of every vertex's table and label.
pub fn measure(inst: &SchemeInstance) -> SizeReport {
    let n = inst.n;
    let deg = inst.max_degree;
    let mut table_bits: Vec<u64> = inst.tables.iter().map(|t| t.bits(n, deg)).collect();
    let label_bits: Vec<u64> = inst.labels.iter().map(|l| l.bits(n, deg, inst.q)).collect();
    let table_sum: u64 = table_bits.iter().sum();
    let label_sum: u64 = label_bits.iter().sum();
    table_bits.sort_unstable();
    SizeReport {
        scheme: inst.kind.id().to_string(),
        n,
        table_bits_max: *table_bits.last().unwrap_or(&0),
        table_bits_mean: table_sum as f64 / n.max(1) as f64,
        table_bits_p50: percentile(&table_bits, 0.5),
        table_bits_p95: percentile(&table_bits, 0.95),
        label_bits_max: label_bits.iter().copied().max().unwrap_or(0),
        label_bits_mean: label_sum as f64 / n.max(1) as f64,
        header_bound_bits: inst.header_bound_bits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate_graph, GraphSpec};
    use crate::scheme::{by_name, SchemeParams};
    use crate::weight::w_ratio;

    #[test]
    fn measures_are_positive_and_stable() {
        let g = generate_graph(&GraphSpec::GnmRandom { n: 60, m: 150 }, 3).unwrap();
        let p = SchemeParams { epsilon: Some(w_ratio(1, 2)), seed: 1, ..Default::default() };
        let inst = by_name("warmup3").unwrap().preprocess(&g, &p).unwrap();
        let a = measure(&inst);
        let b = measure(&inst);
        assert_eq!(a, b);
        assert!(a.table_bits_max > 0);
        assert!(a.label_bits_max > 0);
        assert!(a.table_bits_p50 <= a.table_bits_p95);
        assert!(a.table_bits_p95 <= a.table_bits_max);
    }
}
