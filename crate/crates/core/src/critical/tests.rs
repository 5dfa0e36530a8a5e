use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;
use crate::circuit::{build_matrices, CircuitParams};
use crate::numerics::quadrature::simpson_uniform;
use crate::Error;

fn decoupled(t1: f64) -> CircuitParams {
    CircuitParams { l4: 0.0, t1, ..CircuitParams::unit() }
}

#[test]
fn zero_data_gives_zero_solution() {
    let p = CircuitParams::unit();
    let s = solve_critical_point(&p, 64).unwrap();
    assert!(s.grid.states.iter().flatten().all(|v| v.abs() < 1e-15));
    assert_eq!(s.stationarity_constants, [0.0; 3]);
    let r = stationarity_residual(&p, &s).unwrap();
    assert_eq!(r.max_deviation, 0.0);
    assert_eq!(r.constants, [0.0; 3]);
}

#[test]
fn resonance_detection() {
    let r = uniqueness_check(&decoupled(PI)).unwrap();
    assert!(r.resonant);
    assert_eq!(r.resonant_modes, vec![ResonantMode { channel: 1, k: 1 }]);
    assert!(r.family_dimension >= 1);

    let r = uniqueness_check(&decoupled(1.0)).unwrap();
    assert!(!r.resonant && r.solvable && r.family_dimension == 0);

    let r = uniqueness_check(&decoupled(2.0 * PI / 2f64.sqrt())).unwrap();
    assert!(r.resonant);
    assert!(r.resonant_modes.contains(&ResonantMode { channel: 2, k: 2 }));

    assert!(matches!(
        solve_critical_point(&decoupled(PI), 16),
        Err(Error::Resonant { channel: 1, k: 1 })
    ));
}

#[test]
fn forcing_integral_matches_quadrature() {
    let p = CircuitParams { q1_0: 0.7, q2_0: -0.4, t1: 1.3, ..CircuitParams::unit() };
    let pair = propagators(&build_matrices(&p).unwrap());
    let forcing = pair.matrices.m_inv.mul_vec(&pair.matrices.a);
    let n = 1000;
    let h = p.horizon() / n as f64;
    for k in 0..3 {
        // ∫ Φ(t1 − t) M⁻¹a dt
        let vals: Vec<f64> = (0..=n)
            .map(|i| pair.phi(p.horizon() - h * i as f64).mul_vec(&forcing)[k])
            .collect();
        let closed = pair.phi_integral(p.horizon()).mul_vec(&forcing)[k];
        assert!((simpson_uniform(h, &vals) - closed).abs() < 1e-12);
    }
}

fn random_circuit() -> impl Strategy<Value = CircuitParams> {
    (
        prop::array::uniform4(0.2f64..3.0),
        prop::array::uniform2(0.2f64..3.0),
        0.3f64..4.0,
        prop::array::uniform2(-1.0f64..1.0),
        prop::array::uniform3(-1.0f64..1.0),
    )
        .prop_map(|(l, c, t, q, lam)| CircuitParams {
            l3: l[0],
            l4: l[1],
            l5: l[2],
            l6: l[3],
            c1: c[0],
            c2: c[1],
            t0: 0.5,
            t1: 0.5 + t,
            q1_0: q[0],
            q2_0: q[1],
            lambda3: lam[0],
            lambda5: lam[1],
            lambda6: lam[2],
        })
        .prop_filter("near resonance", |p| !uniqueness_check(p).unwrap().near_resonant)
}

#[test]
fn family_members_are_critical() {
    // h1 = 1 resonant at T = π; choose λ so the right-hand side lies in the range
    let mut p = decoupled(PI);
    p.q1_0 = 0.3;
    p.q2_0 = -0.2;
    let pair = propagators(&build_matrices(&p).unwrap());
    let phi_t = pair.phi(PI);
    let target = phi_t.mul_vec(&[0.4, -0.1, 0.25]);
    let g = crate::numerics::sub(&p.lambda(), &boundary_rhs(&p, &pair));
    p.lambda3 = target[0] + g[0];
    p.lambda5 = target[1] + g[1];
    p.lambda6 = target[2] + g[2];
    let (report, family) = resonance_analysis(&p, 2048).unwrap();
    assert!(report.resonant && report.solvable);
    assert_eq!(report.family_dimension, 1);
    let family = family.unwrap();
    for theta in [0.0, 1.5] {
        let s = family.member(&[theta], 2048).unwrap();
        assert!(s.boundary_defect < 1e-8, "{}", s.boundary_defect);
        let r = stationarity_residual(&p, &s).unwrap();
        assert!(r.relative_deviation() < 1e-6, "{r:?}");
    }

    // push the right-hand side off the range
    let left = crate::numerics::sym_eig(&(&phi_t * &phi_t.transpose())).unwrap();
    let u = left.vector(0);
    let mut q = p;
    q.lambda3 += 0.5 * u[0];
    q.lambda5 += 0.5 * u[1];
    q.lambda6 += 0.5 * u[2];
    let (report, family) = resonance_analysis(&q, 64).unwrap();
    assert!(report.resonant && !report.solvable);
    assert!(family.is_none());
}

#[test]
fn perturbation_breaks_stationarity() {
    let p = CircuitParams { q1_0: 0.5, lambda3: 0.3, lambda5: -0.2, t1: 1.7, ..CircuitParams::unit() };
    let s = solve_critical_point(&p, 2048).unwrap();
    let good = stationarity_residual(&p, &s).unwrap();
    let w = 2.0 * PI / p.horizon();
    let eps = 0.1;
    let mut q = s.charges();
    let mut i = s.currents();
    for (k, &t) in s.times().iter().enumerate() {
        let tau = t - p.t0;
        i[k][0] += eps * (w * tau).sin();
        q[k][0] += eps * (1.0 - (w * tau).cos()) / w;
    }
    let bad = stationarity_report(&p, s.times(), &q, &i).unwrap();
    assert!(bad.relative_deviation() > 10.0 * 1e-6);
    assert!(bad.relative_deviation() > 1e3 * good.relative_deviation());
}

#[test]
fn non_resonant_phi_is_invertible() {
    let p = decoupled(1.0);
    let r = uniqueness_check(&p).unwrap();
    assert!(r.condition_number < 1e3);
    let r = uniqueness_check(&decoupled(PI)).unwrap();
    assert!(r.condition_number > 1e9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solved_points_are_stationary(p in random_circuit()) {
        let s = solve_critical_point(&p, 2048).unwrap();
        let lam = p.lambda();
        prop_assert!(s.boundary_defect <= 1e-8 * (1.0 + crate::numerics::norm2(&lam)));
        let r = stationarity_residual(&p, &s).unwrap();
        prop_assert!(r.relative_deviation() <= 1e-6, "{:?}", r);
        for k in 0..3 {
            prop_assert!((r.constants[k] - s.stationarity_constants[k]).abs() <= 1e-6 * r.scale.max(1e-12));
        }
    }

    #[test]
    fn grid_matches_closed_form(p in random_circuit()) {
        let s = solve_critical_point(&p, 16).unwrap();
        let (x0, _) = s.evaluate(p.t0).unwrap();
        prop_assert!(x0.iter().all(|v| v.abs() < 1e-14));
        let (x, v) = s.evaluate(s.times()[7]).unwrap();
        let st = &s.grid.states[7];
        prop_assert!((x[0] - st[0]).abs() < 1e-13 && (v[2] - st[5]).abs() < 1e-12);
    }

    #[test]
    fn uniqueness_matches_invertibility(l in prop::array::uniform4(0.2f64..3.0), t in 0.3f64..8.0) {
        let p = CircuitParams { l3: l[0], l4: l[1], l5: l[2], l6: l[3], t1: t, ..CircuitParams::unit() };
        let r = uniqueness_check(&p).unwrap();
        let pair = propagators(&build_matrices(&p).unwrap());
        let invertible = pair.phi(t).inverse().is_ok() && r.condition_number < 1e8;
        if !r.near_resonant {
            prop_assert!(invertible);
        }
        if r.resonant {
            prop_assert!(r.condition_number > 1e7);
        }
    }
}
