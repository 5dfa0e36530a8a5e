//! The constant `K` of the sharp inequality
//! `α Σ x_n²/n² + β (Σ x_n/n)² ≤ K Σ x_n²`, defined by `β Σ 1/(Kn² − α) = 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::CircuitParams;
use crate::numerics::find_root;
use crate::{tolerances, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConstant {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl SeriesConstant {
    /// `β Σ 1/(Kn² − α) − 1`, evaluated in closed form.
    pub fn residual(&self) -> f64 {
        self.beta * reciprocal_series(self.k, self.alpha) - 1.0
    }
}

// ζ(2), ζ(4), …, ζ(16)
const ZETA_EVEN: [f64; 8] = [
    1.644_934_066_848_226_4,
    1.082_323_233_711_138_2,
    1.017_343_061_984_449_1,
    1.004_077_356_197_944_4,
    1.000_994_575_127_818_1,
    1.000_246_086_553_308_1,
    1.000_061_248_135_058_7,
    1.000_015_282_259_408_7,
];

/// `Σ_{n≥1} 1/(Kn² − α)` for `K > α ≥ 0`.
///
/// Uses `(1 − πy·cot πy)/(2α)` with `y = √(α/K)`; for small `y` the closed
/// form cancels badly, so the power series in `α/K` over even zeta values is
/// used instead.
pub fn reciprocal_series(k: f64, alpha: f64) -> f64 {
    let r = alpha / k;
    if r < 0.01 {
        let mut acc = 0.0;
        let mut pow = 1.0 / k;
        for z in ZETA_EVEN {
            acc += pow * z;
            pow *= r;
        }
        acc
    } else {
        let py = PI * r.sqrt();
        (1.0 - py / py.tan()) / (2.0 * alpha)
    }
}

/// Solves `β Σ_{n≥1} 1/(Kn² − α) = 1` for `K > α + β`.
///
/// The left side decreases strictly in `K`; it exceeds 1 at `K = α + β` and
/// is below 1 at `K = α + 2β`, so the root is always bracketed there.
pub fn solve_series_constant(alpha: f64, beta: f64) -> Result<SeriesConstant> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::param("alpha", "must be finite and non-negative"));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::param("beta", "must be finite and positive"));
    }
    let lo = alpha + beta;
    let hi = alpha + 2.0 * beta;
    let f = |k: f64| beta * reciprocal_series(k, alpha) - 1.0;
    let k = find_root(f, lo, hi, 4.0 * f64::EPSILON * hi)?;
    let out = SeriesConstant { alpha, beta, k };
    let res = out.residual();
    if res.abs() > tolerances::SERIES_RESIDUAL {
        return Err(Error::NonConvergence {
            iterations: 0,
            defect: res,
        });
    }
    Ok(out)
}

/// `K(C1)` and `K̃(C2)` for the circuit horizon.
pub fn circuit_constants(params: &CircuitParams) -> Result<(SeriesConstant, SeriesConstant)> {
    params.validate()?;
    let t2 = params.horizon().powi(2);
    let (alpha1, beta1) = coefficients(t2, params.c1);
    let (alpha2, beta2) = coefficients(t2, params.c2);
    let k = solve_series_constant(alpha1, beta1)?;
    let ktilde = solve_series_constant(2.0 * alpha2, 2.0 * beta2)?;
    Ok((k, ktilde))
}

/// `(T²/(4π²C), T²/(2π²C))`.
pub fn coefficients(t_squared: f64, c: f64) -> (f64, f64) {
    let alpha = t_squared / (4.0 * PI * PI * c);
    (alpha, 2.0 * alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_series(k: f64, alpha: f64) -> f64 {
        let n_max = 200_000u64;
        let mut s = 0.0;
        for n in (1..=n_max).rev() {
            let n = n as f64;
            s += 1.0 / (k * n * n - alpha);
        }
        // ∫_{N+1/2}^∞ dn/(Kn²) tail
        s + 1.0 / (k * (n_max as f64 + 0.5))
    }

    #[test]
    fn zeta_anchor() {
        let c = solve_series_constant(0.0, 6.0 / (PI * PI)).unwrap();
        assert!((c.k - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_agrees_with_brute_force() {
        for (k, a) in [(2.0, 1.0), (4.0, 1.0), (5.0, 0.01), (1.0, 0.999), (3.0, 0.0)] {
            let exact = reciprocal_series(k, a);
            assert!((exact - brute_series(k, a)).abs() < 1e-10 * exact, "{k} {a}");
        }
    }

    #[test]
    fn branch_switch_is_continuous() {
        let k = 1.0;
        let below = reciprocal_series(k, 0.01 * (1.0 - 1e-12));
        let above = reciprocal_series(k, 0.01 * (1.0 + 1e-12));
        assert!((below - above).abs() < 1e-12);
    }

    #[test]
    fn unit_alpha_beta() {
        let c = solve_series_constant(1.0, 1.0).unwrap();
        assert!((c.k - 2.397_945_586_114_436).abs() < 1e-12);
        assert!(c.k > 2.0);
    }

    #[test]
    fn circuit_anchor() {
        let p = CircuitParams { t1: 2.0 * PI, ..CircuitParams::unit() };
        let (k, kt) = circuit_constants(&p).unwrap();
        assert!((k.k - 4.0).abs() < 1e-12);
        assert!((kt.k - 8.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(solve_series_constant(-1.0, 1.0).is_err());
        assert!(solve_series_constant(1.0, 0.0).is_err());
        assert!(solve_series_constant(f64::NAN, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn homogeneous_of_degree_one(alpha in 0.0f64..50.0, beta in 0.01f64..50.0, c in 0.1f64..10.0) {
            let k = solve_series_constant(alpha, beta).unwrap().k;
            let kc = solve_series_constant(c * alpha, c * beta).unwrap().k;
            prop_assert!((kc - c * k).abs() <= 1e-10 * kc);
        }

        #[test]
        fn root_is_in_bracket(alpha in 0.0f64..100.0, beta in 1e-3f64..100.0) {
            let s = solve_series_constant(alpha, beta).unwrap();
            prop_assert!(s.k > alpha + beta && s.k < alpha + 2.0 * beta);
            prop_assert!(s.residual().abs() <= 1e-10);
        }

        #[test]
        fn equal_capacitances_double(c in 0.05f64..20.0, t in 0.1f64..20.0) {
            let p = CircuitParams { c1: c, c2: c, t1: t, ..CircuitParams::unit() };
            let (k, kt) = circuit_constants(&p).unwrap();
            prop_assert!((kt.k - 2.0 * k.k).abs() <= 1e-10 * kt.k);
            prop_assert!(k.k > 3.0 * t * t / (4.0 * PI * PI * c));
            prop_assert!(kt.k > 3.0 * t * t / (2.0 * PI * PI * c));
        }
    }
}
