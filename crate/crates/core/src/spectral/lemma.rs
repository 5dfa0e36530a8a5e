//! Sharp coefficient inequalities and their extremal sequences.

use crate::{Error, Result};

/// `x_n = scale/(Kn − α/n)` for `n = 1..=n_max`.
pub fn extremal_sequence(k: f64, alpha: f64, scale: f64, n_max: usize) -> Result<Vec<f64>> {
    if !(k > alpha) {
        return Err(Error::param("K", "must exceed alpha so every denominator is positive"));
    }
    Ok((1..=n_max)
        .map(|n| {
            let n = n as f64;
            scale / (k * n - alpha / n)
        })
        .collect())
}

/// `(α Σ x_n²/n² + β (Σ x_n/n)², K Σ x_n²)` for a finite sequence.
pub fn single_sides(alpha: f64, beta: f64, k: f64, x: &[f64]) -> (f64, f64) {
    let s = sums(x);
    (alpha * s.sq_over_n2 + beta * s.over_n * s.over_n, k * s.sq)
}

/// `(α Σ (x_n+y_n)²/n² + β (Σ (x_n+y_n)/n)², K̃ (Σ x_n² + Σ y_n²))`.
pub fn paired_sides(alpha: f64, beta: f64, ktilde: f64, x: &[f64], y: &[f64]) -> (f64, f64) {
    let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let s = sums(&z);
    let norm: f64 = x.iter().chain(y).map(|v| v * v).sum();
    (alpha * s.sq_over_n2 + beta * s.over_n * s.over_n, ktilde * norm)
}

/// The three sums entering the inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceSums {
    pub sq: f64,
    pub over_n: f64,
    pub sq_over_n2: f64,
}

fn sums(x: &[f64]) -> SequenceSums {
    let mut out = SequenceSums { sq: 0.0, over_n: 0.0, sq_over_n2: 0.0 };
    for (i, v) in x.iter().enumerate().rev() {
        let n = (i + 1) as f64;
        out.sq += v * v;
        out.over_n += v / n;
        out.sq_over_n2 += (v / n).powi(2);
    }
    out
}

/// `Σ_{n>N} n^{-s}` by Euler–Maclaurin; accurate to `O(N^{-s-5})`.
fn power_tail(s: f64, n: f64) -> f64 {
    n.powf(1.0 - s) / (s - 1.0) - 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0
}

/// Sums of the infinite extremal sequence `x_n = 1/(Kn − α/n)`: explicit
/// partial sums up to `n_max` plus the analytic tail obtained by expanding
/// `x_n` in powers of `α/(K n²)`.
pub fn extremal_sums(k: f64, alpha: f64, n_max: usize) -> Result<SequenceSums> {
    let x = extremal_sequence(k, alpha, 1.0, n_max)?;
    let mut s = sums(&x);
    let n = n_max as f64;
    let r = alpha / k;
    let mut pow = 1.0;
    for j in 0..6 {
        let jf = j as f64;
        s.over_n += pow / k * power_tail(2.0 + 2.0 * jf, n);
        s.sq += (jf + 1.0) * pow / (k * k) * power_tail(2.0 + 2.0 * jf, n);
        s.sq_over_n2 += (jf + 1.0) * pow / (k * k) * power_tail(4.0 + 2.0 * jf, n);
        pow *= r;
        if pow * n.powf(-2.0 * (jf + 1.0)) < 1e-30 {
            break;
        }
    }
    Ok(s)
}

/// Relative gap `|lhs − rhs| / rhs` of the single inequality at its
/// extremal sequence, with tail-corrected sums.
pub fn single_equality_gap(alpha: f64, beta: f64, k: f64, n_max: usize) -> Result<f64> {
    let s = extremal_sums(k, alpha, n_max)?;
    let lhs = alpha * s.sq_over_n2 + beta * s.over_n * s.over_n;
    let rhs = k * s.sq;
    Ok((lhs - rhs).abs() / rhs)
}

/// Relative gap of the paired inequality at `x_n = y_n = 1/(K̃n − 2α/n)`.
pub fn paired_equality_gap(alpha: f64, beta: f64, ktilde: f64, n_max: usize) -> Result<f64> {
    let s = extremal_sums(ktilde, 2.0 * alpha, n_max)?;
    // (x+y) = 2x, Σ x² + Σ y² = 2 Σ x²
    let lhs = 4.0 * (alpha * s.sq_over_n2 + beta * s.over_n * s.over_n);
    let rhs = 2.0 * ktilde * s.sq;
    Ok((lhs - rhs).abs() / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::solve_series_constant;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn extremal_examples() {
        let x = extremal_sequence(2.0, 1.0, 1.0, 2).unwrap();
        assert_eq!(x[0], 1.0);
        assert!((x[1] - 2.0 / 7.0).abs() < 1e-15);
        assert!(extremal_sequence(2.0, 1.0, 0.0, 5).unwrap().iter().all(|v| *v == 0.0));
        assert!(extremal_sequence(1.0, 1.0, 1.0, 5).is_err());
    }

    #[test]
    fn power_tail_matches_brute_force() {
        for s in [2.0, 4.0, 6.0] {
            let n = 200.0;
            let brute: f64 = (201..2_000_000).rev().map(|k| (k as f64).powf(-s)).sum::<f64>()
                + 2_000_000f64.powf(1.0 - s) / (s - 1.0)
                + 0.5 * 2_000_000f64.powf(-s);
            assert!((power_tail(s, n) - brute).abs() < 1e-12 * brute, "{s}");
        }
    }

    #[test]
    fn tails_match_long_partial_sums() {
        let (k, alpha) = (2.5, 1.0);
        let short = extremal_sums(k, alpha, 200).unwrap();
        let long = extremal_sums(k, alpha, 400_000).unwrap();
        assert!((short.over_n - long.over_n).abs() < 1e-13);
        assert!((short.sq - long.sq).abs() < 1e-13);
        assert!((short.sq_over_n2 - long.sq_over_n2).abs() < 1e-15);
    }

    #[test]
    fn equality_cases() {
        for (alpha, beta) in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.1)] {
            let k = solve_series_constant(alpha, beta).unwrap().k;
            assert!(single_equality_gap(alpha, beta, k, 100_000).unwrap() < 1e-12);
            let kt = solve_series_constant(2.0 * alpha, 2.0 * beta).unwrap().k;
            assert!(paired_equality_gap(alpha, beta, kt, 100_000).unwrap() < 1e-12);
        }
    }

    #[test]
    fn random_sequences_respect_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let alpha = rng.gen_range(0.01..5.0);
            let beta = rng.gen_range(0.01..5.0);
            let k = solve_series_constant(alpha, beta).unwrap().k;
            let x: Vec<f64> = (0..1000).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (lhs, rhs) = single_sides(alpha, beta, k, &x);
            assert!(lhs <= rhs);
        }
    }

    proptest! {
        #[test]
        fn paired_bound(
            alpha in 0.01f64..5.0,
            beta in 0.01f64..5.0,
            x in prop::collection::vec(-1.0f64..1.0, 1..200),
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y: Vec<f64> = x.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
            let kt = solve_series_constant(2.0 * alpha, 2.0 * beta).unwrap().k;
            let (lhs, rhs) = paired_sides(alpha, beta, kt, &x, &y);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}
