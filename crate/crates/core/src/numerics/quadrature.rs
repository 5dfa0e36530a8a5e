/// Composite trapezoid over arbitrary nodes.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// Component-wise trapezoid of vector samples.
pub fn trapezoid_vec(times: &[f64], values: &[Vec<f64>]) -> Vec<f64> {
    let dim = values.first().map_or(0, Vec::len);
    let mut acc = vec![0.0; dim];
    for (t, v) in times.windows(2).zip(values.windows(2)) {
        let h = 0.5 * (t[1] - t[0]);
        for k in 0..dim {
            acc[k] += h * (v[0][k] + v[1][k]);
        }
    }
    acc
}

/// Composite Simpson on a uniform grid with an even number of intervals.
/// Falls back to trapezoid when the interval count is odd.
pub fn simpson_uniform(h: f64, values: &[f64]) -> f64 {
    let n = values.len().saturating_sub(1);
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        let times: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        return trapezoid(&times, values);
    }
    let mut s = values[0] + values[n];
    for (i, v) in values.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

/// Tail integrals `∫_{t_i}^{t_N} f` using the derivative-corrected trapezoid
/// rule, fourth-order accurate when `derivs` are exact.
pub fn tail_integrals_hermite(times: &[f64], values: &[f64], derivs: &[f64]) -> Vec<f64> {
    let n = times.len();
    let mut out = vec![0.0; n];
    for i in (0..n.saturating_sub(1)).rev() {
        let h = times[i + 1] - times[i];
        let piece = 0.5 * h * (values[i] + values[i + 1]) + h * h / 12.0 * (derivs[i] - derivs[i + 1]);
        out[i] = out[i + 1] + piece;
    }
    out
}

/// Fourth-order finite-difference derivative on a uniform grid
/// (five-point stencils, one-sided near the ends).
pub fn differentiate_uniform(h: f64, values: &[f64]) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "need at least five samples");
    let f = values;
    (0..n)
        .map(|i| {
            if i >= 2 && i + 2 < n {
                (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h)
            } else if i < 2 {
                let d = match i {
                    0 => -25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4],
                    _ => -3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4],
                };
                d / (12.0 * h)
            } else {
                let d = if i == n - 1 {
                    25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]
                } else {
                    3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]
                };
                d / (12.0 * h)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let h = 0.1;
        let v: Vec<f64> = (0..=10).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson_uniform(h, &v) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_linear() {
        let t = [0.0, 0.5, 2.0];
        assert!((trapezoid(&t, &[0.0, 0.5, 2.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn hermite_tails() {
        let times: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
        let v: Vec<f64> = times.iter().map(|t| t.sin()).collect();
        let d: Vec<f64> = times.iter().map(|t| t.cos()).collect();
        let tails = tail_integrals_hermite(&times, &v, &d);
        for (t, tail) in times.iter().zip(&tails) {
            let exact = t.cos() - 1f64.cos();
            assert!((tail - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn derivative_fourth_order() {
        let h = 0.01;
        let v: Vec<f64> = (0..100).map(|i| (i as f64 * h).exp()).collect();
        let d = differentiate_uniform(h, &v);
        for (i, di) in d.iter().enumerate() {
            assert!((di - (i as f64 * h).exp()).abs() < 1e-8, "{i}");
        }
    }
}
