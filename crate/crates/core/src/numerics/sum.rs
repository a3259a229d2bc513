//! Fixed-order pairwise reductions.
//!
//! Every quadrature in the crate funnels through these so that repeated runs, and runs
//! with a different thread count, produce bitwise identical sums.

use crate::C64;

const LEAF: usize = 8;

/// Pairwise (tree) sum with a fixed split: halves are summed recursively down to
/// blocks of eight, which are summed left to right.
pub fn pairwise_sum(values: &[C64]) -> C64 {
    if values.len() <= LEAF {
        let mut acc = C64::new(0.0, 0.0);
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_real(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().fold(0.0, |a, v| a + v);
    }
    let mid = values.len() / 2;
    pairwise_sum_real(&values[..mid]) + pairwise_sum_real(&values[mid..])
}

/// `Σ wᵢ·f(i)` evaluated into a buffer and reduced pairwise.
pub fn weighted_sum<F>(weights: &[f64], mut f: F) -> C64
where
    F: FnMut(usize) -> C64,
{
    let terms: Vec<C64> = weights.iter().enumerate().map(|(i, &w)| f(i) * w).collect();
    pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_on_exact_values() {
        let v: Vec<C64> = (0..1000).map(|i| C64::new(i as f64, -(i as f64))).collect();
        let s = pairwise_sum(&v);
        assert_eq!(s, C64::new(499500.0, -499500.0));
        assert_eq!(pairwise_sum(&[]), C64::new(0.0, 0.0));
    }

    #[test]
    fn repeated_runs_are_bitwise_equal() {
        let v: Vec<C64> = (0..4097).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let a = pairwise_sum(&v);
        let b = pairwise_sum(&v);
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
}
