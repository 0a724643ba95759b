//! Exact rational edge weights and distances.
//!
//! All distances and stretch comparisons in this crate are exact: weights are
//! rationals over `i64`, never floats. At the graph sizes this crate targets
//! (a few thousand vertices, small integer weights) path sums stay far from
//! overflow.

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type W = Ratio<i64>;

pub fn w_int(x: i64) -> W {
    Ratio::from_integer(x)
}

pub fn w_ratio(num: i64, den: i64) -> W {
    Ratio::new(num, den)
}

pub fn w_zero() -> W {
    W::zero()
}

pub fn w_one() -> W {
    W::one()
}

/// Parses a weight from a token: integer (`3`), fraction (`3/2`) or
/// decimal (`1.5`). Must be strictly positive for edge weights; callers
/// validate sign themselves where zero is legal.
pub fn parse_weight(tok: &str) -> Result<W, String> {
    let tok = tok.trim();
    if let Some((n, d)) = tok.split_once('/') {
        let num: i64 = n.trim().parse().map_err(|_| format!("bad numerator in {tok:?}"))?;
        let den: i64 = d.trim().parse().map_err(|_| format!("bad denominator in {tok:?}"))?;
        if den == 0 {
            return Err(format!("zero denominator in {tok:?}"));
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((int, frac)) = tok.split_once('.') {
        let int_part: i64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| format!("bad number {tok:?}"))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad number {tok:?}"));
        }
        let scale = 10i64
            .checked_pow(frac.len() as u32)
            .ok_or_else(|| format!("too many decimals in {tok:?}"))?;
        let frac_part: i64 = frac.parse().map_err(|_| format!("bad number {tok:?}"))?;
        let neg = int.trim_start().starts_with('-');
        let mag = Ratio::new(int_part.abs() * scale + frac_part, scale);
        return Ok(if neg { -mag } else { mag });
    }
    let num: i64 = tok.parse().map_err(|_| format!("bad number {tok:?}"))?;
    Ok(Ratio::from_integer(num))
}

/// Renders a weight in the same form `parse_weight` accepts.
pub fn format_weight(w: &W) -> String {
    if w.denom() == &1 {
        w.numer().to_string()
    } else {
        format!("{}/{}", w.numer(), w.denom())
    }
}

pub fn to_f64(w: &W) -> f64 {
    *w.numer() as f64 / *w.denom() as f64
}

/// Smallest integer k >= 0 with 2^k >= w. Exact; w must be positive.
pub fn ceil_log2(w: &W) -> u32 {
    assert!(w.is_positive(), "ceil_log2 needs a positive value");
    let mut k = 0u32;
    let mut pow = w_one();
    let two = w_int(2);
    while pow < *w {
        pow *= two;
        k += 1;
    }
    k
}

/// ceil(w) as i64 for positive rationals.
pub fn ceil_int(w: &W) -> i64 {
    w.ceil().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integer_fraction_decimal() {
        assert_eq!(parse_weight("3").unwrap(), w_int(3));
        assert_eq!(parse_weight("3/2").unwrap(), w_ratio(3, 2));
        assert_eq!(parse_weight("1.5").unwrap(), w_ratio(3, 2));
        assert_eq!(parse_weight("0.25").unwrap(), w_ratio(1, 4));
        assert!(parse_weight("1/0").is_err());
        assert!(parse_weight("abc").is_err());
    }

    #[test]
    fn round_trips_format() {
        for s in ["7", "3/2", "12/7"] {
            let w = parse_weight(s).unwrap();
            assert_eq!(parse_weight(&format_weight(&w)).unwrap(), w);
        }
    }

    #[test]
    fn ceil_log2_exact() {
        assert_eq!(ceil_log2(&w_int(1)), 0);
        assert_eq!(ceil_log2(&w_int(2)), 1);
        assert_eq!(ceil_log2(&w_int(3)), 2);
        assert_eq!(ceil_log2(&w_ratio(9, 2)), 3);
        assert_eq!(ceil_log2(&w_int(1024)), 10);
    }
}
