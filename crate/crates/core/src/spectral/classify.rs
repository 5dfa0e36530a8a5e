//! Minimum / no-extremum classification of the constrained action and the
//! explicit rays that witness it.

use serde::{Deserialize, Serialize};

use super::fourier::{evaluate_functional, FourierCurrents};
use super::series::{circuit_constants, coefficients};
use crate::circuit::{build_stability_matrices, CircuitParams, StabilityMatrices};
use crate::numerics::{classify_values, sym_eig, Definiteness, Matrix};
use crate::{tolerances, Error, Result};

/// Truncation order used for witness rays by [`classify_critical_structure`].
pub const WITNESS_TRUNCATION: usize = 4096;

/// Ray parameters at which witness values are reported.
pub const RAY_STEPS: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    UniqueMinimum,
    NoExtremum,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DescentMode {
    /// All three channels on their own extremal profiles; needs `S2 < 0`.
    CaseII,
    /// Equal capacitances: one shared profile weighted by `(x, y, z)`.
    CaseIII { direction: [f64; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayPoint {
    pub h: f64,
    #[serde(rename = "J")]
    pub j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    #[serde(rename = "K_C1")]
    pub k_c1: f64,
    #[serde(rename = "Ktilde_C2")]
    pub ktilde_c2: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(rename = "S1_eigenvalues")]
    pub s1_eigenvalues: Vec<f64>,
    #[serde(rename = "S2_eigenvalues")]
    pub s2_eigenvalues: Vec<f64>,
    #[serde(rename = "S1_definite")]
    pub s1_definite: bool,
    #[serde(rename = "S2_negative_definite")]
    pub s2_negative_definite: bool,
    #[serde(rename = "S2_has_negative_eigenvalue")]
    pub s2_has_negative_eigenvalue: bool,
    pub equal_capacitance_case: bool,
    /// Eigenvalues of `M − K(C1)·C1·N`, the exact quadratic form along the
    /// shared-profile ray. Present only when capacitances are equal.
    pub ray_form_eigenvalues: Option<Vec<f64>>,
    pub mode: Option<DescentMode>,
    pub witness_ray: Vec<RayPoint>,
    pub ascending_ray: Vec<RayPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<FourierCurrents>,
}

fn equal_capacitances(params: &CircuitParams) -> bool {
    (params.c1 - params.c2).abs() <= 1e-12 * params.c1.max(params.c2)
}

/// `M − K·C·N` for `C1 = C2 = C`: the quadratic form of the action along
/// `(x, y, z)·s_n`, where `s_n` is the extremal profile of `K(C1)`.
pub fn ray_form_matrix(params: &CircuitParams, k_c1: f64) -> Matrix {
    let m = params.inductance_matrix();
    let shift = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, 1.0]]);
    &m - &shift.scale(k_c1)
}

/// `4π²C n/(4π²C K n² − T²)`, i.e. `1/(K n − α/n)` with `α = T²/(4π²C)`.
pub fn descent_coefficient(c: f64, k: f64, horizon: f64, n: usize) -> f64 {
    let n = n as f64;
    let four_pi2_c = 4.0 * std::f64::consts::PI.powi(2) * c;
    four_pi2_c * n / (four_pi2_c * k * n * n - horizon * horizon)
}

fn normalize_and_orient(params: &CircuitParams, mut dir: FourierCurrents, descend: bool) -> Result<FourierCurrents> {
    let norm = dir.coefficient_norm_sq().sqrt();
    if !(norm > 0.0) {
        return Err(Error::Classification("direction has zero norm".into()));
    }
    dir = dir.scaled_modes(1.0 / norm);
    let base = FourierCurrents::for_params(params, dir.ntrunc());
    let slope = evaluate_functional(params, &base.along(&dir, 1.0)?)?.linear;
    if (descend && slope > 0.0) || (!descend && slope < 0.0) {
        dir = dir.scaled_modes(-1.0);
    }
    Ok(dir)
}

/// Unit sine-coefficient direction along which the action tends to `−∞`.
/// The sign is chosen so the linear part of the action is non-positive.
pub fn descent_direction(params: &CircuitParams, mode: DescentMode, ntrunc: usize) -> Result<FourierCurrents> {
    if ntrunc == 0 {
        return Err(Error::param("ntrunc", "must be at least 1"));
    }
    let (k, ktilde) = circuit_constants(params)?;
    let stab = build_stability_matrices(params, k.k, ktilde.k);
    let t = params.horizon();
    let mut dir = FourierCurrents::mean_only(params.t0, t, [0.0; 3], ntrunc);
    match mode {
        DescentMode::CaseII => {
            let class = classify_values(&sym_eig(&stab.s2)?.values, tolerances::DEFINITENESS);
            if class != Definiteness::NegativeDefinite {
                return Err(Error::Classification(format!(
                    "S2 must be negative definite for the separate-profile ray, found {class:?}"
                )));
            }
            let (alpha2, _) = coefficients(t * t, params.c2);
            for n in 1..=ntrunc {
                dir.b[0][n - 1] = descent_coefficient(params.c1, k.k, t, n);
                let nf = n as f64;
                let shared = 1.0 / (ktilde.k * nf - 2.0 * alpha2 / nf);
                dir.b[1][n - 1] = shared;
                dir.b[2][n - 1] = shared;
            }
        }
        DescentMode::CaseIII { direction } => {
            if !equal_capacitances(params) {
                return Err(Error::Classification(
                    "shared-profile ray requires C1 = C2".into(),
                ));
            }
            let v = direction;
            if !(stab.s2.quadratic_form(&v) < 0.0) {
                return Err(Error::Classification(
                    "(x, y, z) is not a negative direction of S2".into(),
                ));
            }
            if !(ray_form_matrix(params, k.k).quadratic_form(&v) < 0.0) {
                return Err(Error::Classification(
                    "(x, y, z) is not a negative direction of M − K(C1)·C1·N; the action is bounded below along this ray".into(),
                ));
            }
            for n in 1..=ntrunc {
                let s = descent_coefficient(params.c1, k.k, t, n);
                for ch in 0..3 {
                    dir.b[ch][n - 1] = v[ch] * s;
                }
            }
        }
    }
    normalize_and_orient(params, dir, true)
}

/// Unit cosine direction on a single high mode of `i3`, along which the
/// action tends to `+∞`. Uses the highest mode `n = ntrunc`.
pub fn ascending_direction(params: &CircuitParams, ntrunc: usize) -> Result<FourierCurrents> {
    if ntrunc == 0 {
        return Err(Error::param("ntrunc", "must be at least 1"));
    }
    let mut dir = FourierCurrents::mean_only(params.t0, params.horizon(), [0.0; 3], ntrunc);
    dir.a[0][ntrunc - 1] = 1.0;
    let dir = normalize_and_orient(params, dir, false)?;
    let q = evaluate_functional(params, &FourierCurrents::for_params(params, ntrunc).along(&dir, 1.0)?)?.quadratic;
    if !(q > 0.0) {
        return Err(Error::Classification(format!(
            "mode {ntrunc} is not yet dominated by the inductive term; raise the truncation"
        )));
    }
    Ok(dir)
}

/// Action values at `base + h·dir` for each `h` in [`RAY_STEPS`].
pub fn ray_values(params: &CircuitParams, dir: &FourierCurrents) -> Result<Vec<RayPoint>> {
    let base = FourierCurrents::for_params(params, dir.ntrunc());
    RAY_STEPS
        .iter()
        .map(|&h| {
            Ok(RayPoint {
                h,
                j: evaluate_functional(params, &base.along(dir, h)?)?.total,
            })
        })
        .collect()
}

pub fn strictly_decreasing(ray: &[RayPoint]) -> bool {
    ray.windows(2).all(|w| w[1].j < w[0].j)
}

pub fn strictly_increasing(ray: &[RayPoint]) -> bool {
    ray.windows(2).all(|w| w[1].j > w[0].j)
}

pub fn classify_critical_structure(params: &CircuitParams) -> Result<ClassificationReport> {
    classify_with_truncation(params, WITNESS_TRUNCATION)
}

/// Classification with an explicit truncation order for the witness rays.
pub fn classify_with_truncation(params: &CircuitParams, ntrunc: usize) -> Result<ClassificationReport> {
    let (k, ktilde) = circuit_constants(params)?;
    let StabilityMatrices { s1, s2, k1, k2 } = build_stability_matrices(params, k.k, ktilde.k);
    let tol = tolerances::DEFINITENESS;
    let e1 = sym_eig(&s1)?.values;
    let e2 = sym_eig(&s2)?;
    let s1_definite = classify_values(&e1, tol) == Definiteness::PositiveDefinite;
    let s2_negative_definite = classify_values(&e2.values, tol) == Definiteness::NegativeDefinite;
    let s2_has_negative_eigenvalue = e2.values[0] < -tol;
    let equal = equal_capacitances(params);

    let ray_eig = if equal { Some(sym_eig(&ray_form_matrix(params, k.k))?) } else { None };

    let mode = if s1_definite {
        None
    } else if s2_negative_definite {
        Some(DescentMode::CaseII)
    } else if let (true, Some(eig)) = (s2_has_negative_eigenvalue, &ray_eig) {
        (eig.values[0] < -tol).then(|| {
            let v = eig.vector(0);
            DescentMode::CaseIII { direction: [v[0], v[1], v[2]] }
        })
    } else {
        None
    };

    let mut report = ClassificationReport {
        verdict: if s1_definite { Verdict::UniqueMinimum } else { Verdict::Inconclusive },
        k_c1: k.k,
        ktilde_c2: ktilde.k,
        k1,
        k2,
        s1_eigenvalues: e1,
        s2_eigenvalues: e2.values.clone(),
        s1_definite,
        s2_negative_definite,
        s2_has_negative_eigenvalue,
        equal_capacitance_case: equal,
        ray_form_eigenvalues: ray_eig.map(|e| e.values),
        mode,
        witness_ray: Vec::new(),
        ascending_ray: Vec::new(),
        witness: None,
    };

    if let Some(mode) = mode {
        let dir = descent_direction(params, mode, ntrunc)?;
        let ray = ray_values(params, &dir)?;
        if strictly_decreasing(&ray) {
            report.verdict = Verdict::NoExtremum;
        }
        report.witness_ray = ray;
        report.witness = Some(dir);
        if let Ok(up) = ascending_direction(params, ntrunc) {
            report.ascending_ray = ray_values(params, &up)?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    use crate::spectral::fourier::evaluate_functional;
    use proptest::prelude::*;

    pub(crate) fn minimum_params() -> CircuitParams {
        CircuitParams { l3: 10.0, l4: 1.0, l5: 10.0, l6: 10.0, c1: 1.0, c2: 2.0, ..CircuitParams::unit() }
    }

    pub(crate) fn case_two_params() -> CircuitParams {
        CircuitParams { l3: 1e-3, l4: 1e-3, l5: 1e-3, l6: 1e-3, c1: 1.0, c2: 2.0, t1: 2.0 * PI, ..CircuitParams::unit() }
    }

    pub(crate) fn case_three_params() -> CircuitParams {
        CircuitParams { l3: 8.0, l4: 1.0, l5: 2.0, l6: 8.0, t1: 2.0 * PI, ..CircuitParams::unit() }
    }

    #[test]
    fn unnormalized_coefficient() {
        assert!((descent_coefficient(1.0, 4.0, 2.0 * PI, 1) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn minimum_case() {
        let r = classify_critical_structure(&minimum_params()).unwrap();
        assert_eq!(r.verdict, Verdict::UniqueMinimum);
        assert!(r.s1_eigenvalues[0] > 9.0);
        assert!(r.witness.is_none());
    }

    #[test]
    fn case_two() {
        let r = classify_with_truncation(&case_two_params(), 512).unwrap();
        assert_eq!(r.verdict, Verdict::NoExtremum);
        assert_eq!(r.mode, Some(DescentMode::CaseII));
        assert!(strictly_decreasing(&r.witness_ray));
        assert!(strictly_increasing(&r.ascending_ray));
    }

    #[test]
    fn case_three() {
        let r = classify_with_truncation(&case_three_params(), 512).unwrap();
        assert_eq!(r.verdict, Verdict::NoExtremum);
        assert!(matches!(r.mode, Some(DescentMode::CaseIII { .. })));
        assert!(!r.s2_negative_definite);
        assert!(strictly_decreasing(&r.witness_ray));
    }

    #[test]
    fn negative_s2_direction_with_bounded_ray_is_inconclusive() {
        let p = CircuitParams { l3: 10.0, l4: 10.0, l5: 6.0, l6: 6.0, t1: 2.0 * PI, ..CircuitParams::unit() };
        let r = classify_with_truncation(&p, 256).unwrap();
        assert!(r.s2_has_negative_eigenvalue);
        assert!(r.ray_form_eigenvalues.unwrap()[0] > 0.0);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn preconditions_are_named() {
        let err = descent_direction(&minimum_params(), DescentMode::CaseII, 16).unwrap_err();
        assert!(err.to_string().contains("S2"));
        let err = descent_direction(&case_two_params(), DescentMode::CaseIII { direction: [1.0, 0.0, 0.0] }, 16)
            .unwrap_err();
        assert!(err.to_string().contains("C1 = C2"));
    }

    #[test]
    fn shared_profile_quadratic_matches_ray_form() {
        let p = case_three_params();
        let r = classify_with_truncation(&p, 64).unwrap();
        let Some(DescentMode::CaseIII { direction }) = r.mode else { panic!() };
        let (k, _) = circuit_constants(&p).unwrap();
        let n = 100_000;
        let dir = descent_direction(&p, DescentMode::CaseIII { direction }, n).unwrap();
        let q = evaluate_functional(&p, &FourierCurrents::for_params(&p, n).along(&dir, 1.0).unwrap())
            .unwrap()
            .quadratic;
        // unit norm: Σ_n |v|² s_n² = 1, so (4/T)·Q = vᵀ(M − K·C·N)v
        let expected = ray_form_matrix(&p, k.k).quadratic_form(&direction) * p.horizon() / 4.0;
        assert!((q - expected).abs() < 1e-4 * expected.abs(), "{q} {expected}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn sine_block_is_bounded_by_s1(
            l in prop::array::uniform4(0.1f64..5.0),
            c in prop::array::uniform2(0.1f64..5.0),
            t in 0.2f64..7.0,
            b in prop::array::uniform3(prop::collection::vec(-1.0f64..1.0, 12)),
        ) {
            let p = CircuitParams { l3: l[0], l4: l[1], l5: l[2], l6: l[3], c1: c[0], c2: c[1], t1: t, ..CircuitParams::unit() };
            let (k, kt) = circuit_constants(&p).unwrap();
            let s1 = build_stability_matrices(&p, k.k, kt.k).s1;
            let mut cur = FourierCurrents::for_params(&p, 12);
            cur.b = b.clone();
            let q2 = evaluate_functional(&p, &cur).unwrap().quadratic_sin;
            let bound: f64 = (0..12).map(|n| s1.quadratic_form(&[b[0][n], b[1][n], b[2][n]])).sum();
            prop_assert!(4.0 / t * q2 >= bound - 1e-10 * bound.abs().max(1.0));
        }

        #[test]
        fn high_cosine_modes_ascend(
            l in prop::array::uniform4(0.01f64..5.0),
            c in prop::array::uniform2(0.1f64..5.0),
            t in 0.2f64..7.0,
            q0 in prop::array::uniform2(-1.0f64..1.0),
            lambda in prop::array::uniform3(-1.0f64..1.0),
        ) {
            let p = CircuitParams {
                l3: l[0], l4: l[1], l5: l[2], l6: l[3], c1: c[0], c2: c[1], t1: t,
                q1_0: q0[0], q2_0: q0[1], lambda3: lambda[0], lambda5: lambda[1], lambda6: lambda[2],
                ..CircuitParams::unit()
            };
            let up = ascending_direction(&p, 256).unwrap();
            prop_assert!(strictly_increasing(&ray_values(&p, &up).unwrap()));
        }
    }
}
