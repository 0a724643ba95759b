//! Information-theoretic bit accounting.
//!
//! Size reports count field widths, not in-memory representation: a vertex id
//! costs ceil(log2 n) bits, a port ceil(log2 max_degree) bits, and a rational
//! distance the widths of its numerator and denominator.

use crate::weight::W;

/// ceil(log2 x) for integer x >= 1, with a 1-bit floor so a field is never free.
pub fn width(x: u64) -> u64 {
    if x <= 2 {
        1
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// Bit cost of one vertex id in an n-vertex graph.
pub fn id_bits(n: usize) -> u64 {
    width(n as u64)
}

/// Bit cost of one port number given the maximum degree.
pub fn port_bits(max_deg: usize) -> u64 {
    width(max_deg.max(1) as u64)
}

/// Exact bit cost of a rational distance: numerator width plus denominator
/// width (denominator omitted when 1).
pub fn dist_bits(w: &W) -> u64 {
    let num = w.numer().unsigned_abs().max(1);
    let den = *w.denom() as u64;
    if den == 1 {
        width(num)
    } else {
        width(num) + width(den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::{w_int, w_ratio};

    #[test]
    fn widths() {
        assert_eq!(width(1), 1);
        assert_eq!(width(2), 1);
        assert_eq!(width(3), 2);
        assert_eq!(width(4), 2);
        assert_eq!(width(5), 3);
        assert_eq!(width(1024), 10);
        assert_eq!(width(1025), 11);
    }

    #[test]
    fn dist_bit_costs() {
        assert_eq!(dist_bits(&w_int(0)), 1);
        assert_eq!(dist_bits(&w_int(7)), 3);
        assert_eq!(dist_bits(&w_ratio(7, 2)), 3 + 1);
    }
}
