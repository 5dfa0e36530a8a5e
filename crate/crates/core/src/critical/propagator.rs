use serde::{Deserialize, Serialize};

use crate::circuit::CircuitMatrices;
use crate::numerics::Matrix;

/// Closed-form propagators of `x'' = −M⁻¹N x`: `Φ` with `Φ(0) = 0`,
/// `Φ'(0) = I`, and `Ψ = Φ'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagatorPair {
    pub matrices: CircuitMatrices,
}

/// `(sin(√h t)/√h, cos(√h t), (1 − cos(√h t))/h)`, with series near `h t² = 0`.
fn channel(h: f64, t: f64) -> (f64, f64, f64) {
    let z = h * t * t;
    if z.abs() < 1e-6 {
        let t2 = t * t;
        let s = t * (1.0 - z / 6.0 + z * z / 120.0);
        let c = 1.0 - z / 2.0 + z * z / 24.0;
        let i = t2 * (0.5 - z / 24.0 + z * z / 720.0);
        (s, c, i)
    } else {
        let w = h.sqrt();
        let (s, c) = (w * t).sin_cos();
        (s / w, c, (1.0 - c) / h)
    }
}

impl PropagatorPair {
    fn diag(&self, t: f64, pick: impl Fn((f64, f64, f64)) -> f64) -> [f64; 3] {
        self.matrices.modal_values().map(|h| pick(channel(h, t)))
    }

    pub fn phi(&self, t: f64) -> Matrix {
        self.matrices.modal_conjugate(self.diag(t, |c| c.0))
    }

    pub fn psi(&self, t: f64) -> Matrix {
        self.matrices.modal_conjugate(self.diag(t, |c| c.1))
    }

    /// `∫₀ᵗ Φ(s) ds`.
    pub fn phi_integral(&self, t: f64) -> Matrix {
        self.matrices.modal_conjugate(self.diag(t, |c| c.2))
    }

    /// `−M⁻¹N`, the generator of the second-order system.
    pub fn generator(&self) -> Matrix {
        -&(&self.matrices.m_inv * &self.matrices.n)
    }
}

pub fn propagators(matrices: &CircuitMatrices) -> PropagatorPair {
    PropagatorPair { matrices: matrices.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_matrices, CircuitParams};
    use proptest::prelude::*;

    fn unit_pair() -> PropagatorPair {
        propagators(&build_matrices(&CircuitParams::unit()).unwrap())
    }

    #[test]
    fn origin_values() {
        let p = unit_pair();
        assert!(p.phi(0.0).max_abs() < 1e-15);
        assert!((&p.psi(0.0) - &Matrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn no_capacitive_coupling_is_free_flight() {
        let base = build_matrices(&CircuitParams::unit()).unwrap();
        let m = CircuitMatrices::from_parts(base.m.clone(), Matrix::zeros(3, 3), [0.0; 3]).unwrap();
        let p = propagators(&m);
        for t in [0.3, 1.0, 4.0] {
            assert!((&p.phi(t) - &Matrix::identity(3).scale(t)).max_abs() < 1e-13);
            assert!((&p.psi(t) - &Matrix::identity(3)).max_abs() < 1e-13);
        }
    }

    #[test]
    fn short_time_series() {
        let p = unit_pair();
        let g = p.generator();
        for t in [1e-2, 2e-2, 4e-2] {
            let approx = &Matrix::identity(3).scale(t) + &g.scale(t * t * t / 6.0);
            let err = (&p.phi(t) - &approx).max_abs();
            assert!(err < 0.1 * t.powi(5), "{t}: {err}");
        }
    }

    #[test]
    fn integral_matches_quadrature() {
        let p = unit_pair();
        let t = 2.3;
        let n = 2000;
        let h = t / n as f64;
        let mut acc = Matrix::zeros(3, 3);
        for i in 0..=n {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc = &acc + &p.phi(h * i as f64).scale(w * h / 3.0);
        }
        assert!((&acc - &p.phi_integral(t)).max_abs() < 1e-11);
    }

    fn circuit() -> impl Strategy<Value = CircuitParams> {
        (prop::array::uniform4(0.1f64..4.0), prop::array::uniform2(0.1f64..4.0)).prop_map(|(l, c)| CircuitParams {
            l3: l[0],
            l4: l[1],
            l5: l[2],
            l6: l[3],
            c1: c[0],
            c2: c[1],
            ..CircuitParams::unit()
        })
    }

    proptest! {
        #[test]
        fn psi_is_derivative_of_phi(p in circuit(), t in 0.1f64..5.0) {
            let pair = propagators(&build_matrices(&p).unwrap());
            let d = 1e-4;
            let fd = (&pair.phi(t + d) - &pair.phi(t - d)).scale(0.5 / d);
            prop_assert!((&fd - &pair.psi(t)).max_abs() < 1e-6 * pair.psi(t).max_abs().max(1.0));
        }

        #[test]
        fn phi_solves_second_order_system(p in circuit(), t in 0.1f64..5.0) {
            let pair = propagators(&build_matrices(&p).unwrap());
            let d = 1e-3;
            let dd = (&(&pair.phi(t + d) + &pair.phi(t - d)) - &pair.phi(t).scale(2.0)).scale(1.0 / (d * d));
            let rhs = &pair.generator() * &pair.phi(t);
            prop_assert!((&dd - &rhs).max_abs() < 1e-4 * rhs.max_abs().max(1.0));
            // spectral form of the same identity
            let psi_dot = {
                let e = 1e-5;
                (&pair.psi(t + e) - &pair.psi(t - e)).scale(0.5 / e)
            };
            prop_assert!((&psi_dot - &rhs).max_abs() < 1e-5 * rhs.max_abs().max(1.0));
        }
    }
}
