//! The worked LC circuit: two capacitors, four inductors, three independent
//! loop currents `(i3, i5, i6)` and charges `q1' = i3`, `q2' = i5 + i6`.

use serde::{Deserialize, Serialize};

use crate::numerics::{sqrt_spd, sym_eig, Matrix};
use crate::{Error, Result};

/// Physical description of the circuit. Units: henry, farad, second, coulomb.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    #[serde(rename = "L3")]
    pub l3: f64,
    #[serde(rename = "L4")]
    pub l4: f64,
    #[serde(rename = "L5")]
    pub l5: f64,
    #[serde(rename = "L6")]
    pub l6: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    pub t0: f64,
    pub t1: f64,
    pub q1_0: f64,
    pub q2_0: f64,
    pub lambda3: f64,
    pub lambda5: f64,
    pub lambda6: f64,
}

impl CircuitParams {
    /// Unit inductances and capacitances on `[0, 1]`, uncharged, no transfer.
    pub fn unit() -> Self {
        Self {
            l3: 1.0,
            l4: 1.0,
            l5: 1.0,
            l6: 1.0,
            c1: 1.0,
            c2: 1.0,
            t0: 0.0,
            t1: 1.0,
            q1_0: 0.0,
            q2_0: 0.0,
            lambda3: 0.0,
            lambda5: 0.0,
            lambda6: 0.0,
        }
    }

    /// Checks positivity and the horizon. `L4 = 0` is accepted: the
    /// inductance matrix stays positive definite as long as the others are
    /// positive.
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("L3", self.l3),
            ("L4", self.l4),
            ("L5", self.l5),
            ("L6", self.l6),
            ("C1", self.c1),
            ("C2", self.c2),
            ("t0", self.t0),
            ("t1", self.t1),
            ("q1_0", self.q1_0),
            ("q2_0", self.q2_0),
            ("lambda3", self.lambda3),
            ("lambda5", self.lambda5),
            ("lambda6", self.lambda6),
        ];
        for (name, v) in all {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        for (name, v) in [("L3", self.l3), ("L5", self.l5), ("L6", self.l6), ("C1", self.c1), ("C2", self.c2)] {
            if v <= 0.0 {
                return Err(Error::param(name, "must be strictly positive"));
            }
        }
        if self.l4 < 0.0 {
            return Err(Error::param("L4", "must be non-negative"));
        }
        if !(self.t1 > self.t0) {
            return Err(Error::param("t1", "horizon must satisfy t1 > t0"));
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn lambda(&self) -> [f64; 3] {
        [self.lambda3, self.lambda5, self.lambda6]
    }

    /// Inductance matrix of the kinetic (magnetic co-energy) form.
    pub fn inductance_matrix(&self) -> Matrix {
        let (l3, l4, l5, l6) = (self.l3, self.l4, self.l5, self.l6);
        Matrix::from_rows(&[
            [l4 + l3, -l4, -l4],
            [-l4, l4 + l5, l4],
            [-l4, l4, l4 + l6],
        ])
    }

    /// Rank-2 elastance matrix coupling the loop charges.
    pub fn elastance_matrix(&self) -> Matrix {
        let (e1, e2) = (1.0 / self.c1, 1.0 / self.c2);
        Matrix::from_rows(&[[e1, 0.0, 0.0], [0.0, e2, e2], [0.0, e2, e2]])
    }

    /// Charges `(q1, q2)` for loop charges `x = (∫i3, ∫i5, ∫i6)`.
    pub fn charges(&self, x: &[f64]) -> [f64; 2] {
        [self.q1_0 + x[0], self.q2_0 + x[1] + x[2]]
    }
}

/// Initial-charge forcing `a = −(q1_0/C1, q2_0/C2, q2_0/C2)`.
pub fn initial_charge_vector(params: &CircuitParams) -> [f64; 3] {
    let v2 = -params.q2_0 / params.c2;
    [-params.q1_0 / params.c1, v2, v2]
}

/// Matrices and spectral data of the circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitMatrices {
    pub m: Matrix,
    pub n: Matrix,
    pub m_half: Matrix,
    pub m_neg_half: Matrix,
    pub m_inv: Matrix,
    /// Orthogonal `P` with `M^{-1/2} N M^{-1/2} = Pᵀ diag(h1, h2, 0) P`.
    pub p: Matrix,
    pub h1: f64,
    pub h2: f64,
    pub a: [f64; 3],
}

impl CircuitMatrices {
    /// Decomposes an arbitrary `(M, N, a)` triple. `M` must be SPD and `N`
    /// symmetric positive semidefinite; the least eigenvalue of
    /// `M^{-1/2} N M^{-1/2}` is taken as the structural zero.
    pub fn from_parts(m: Matrix, n: Matrix, a: [f64; 3]) -> Result<Self> {
        if m.rows() != 3 || n.rows() != 3 || !m.is_square() || !n.is_square() {
            return Err(Error::dim("circuit matrices must be 3x3"));
        }
        let (m_half, m_neg_half) = sqrt_spd(&m)?;
        let reduced = (&(&m_neg_half * &n) * &m_neg_half).symmetrized();
        let eig = sym_eig(&reduced)?;
        // ascending: index 0 is the null direction of N
        let rows = [eig.vector(1), eig.vector(2), eig.vector(0)];
        let p = Matrix::from_rows(&rows);
        let m_inv = &m_neg_half * &m_neg_half;
        Ok(Self {
            m,
            n,
            m_half,
            m_neg_half,
            m_inv,
            p,
            h1: eig.values[1].max(0.0),
            h2: eig.values[2].max(0.0),
            a,
        })
    }

    /// The three modal eigenvalues `(h1, h2, 0)` in the order of `P`'s rows.
    pub fn modal_values(&self) -> [f64; 3] {
        [self.h1, self.h2, 0.0]
    }

    /// `M^{-1/2} Pᵀ diag(d) P M^{1/2}`.
    pub fn modal_conjugate(&self, d: [f64; 3]) -> Matrix {
        let pt = self.p.transpose();
        let mid = &(&pt * &Matrix::from_diagonal(&d)) * &self.p;
        &(&self.m_neg_half * &mid) * &self.m_half
    }

    /// `M^{-1/2} Pᵀ diag(d) P M^{-1/2}`.
    pub fn modal_symmetric(&self, d: [f64; 3]) -> Matrix {
        let pt = self.p.transpose();
        let mid = &(&pt * &Matrix::from_diagonal(&d)) * &self.p;
        &(&self.m_neg_half * &mid) * &self.m_neg_half
    }
}

pub fn build_matrices(params: &CircuitParams) -> Result<CircuitMatrices> {
    params.validate()?;
    CircuitMatrices::from_parts(
        params.inductance_matrix(),
        params.elastance_matrix(),
        initial_charge_vector(params),
    )
}

/// Shifted inductance matrices bounding the quadratic part of the action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityMatrices {
    pub s1: Matrix,
    pub s2: Matrix,
    pub k1: f64,
    pub k2: f64,
}

/// `S = M − K·diag(1, 2, 2)` with `K1 = max{K(C1), K̃(C2)/2}` for `S1` and
/// `K2 = min{…}` for `S2`.
pub fn build_stability_matrices(params: &CircuitParams, k_c1: f64, ktilde_c2: f64) -> StabilityMatrices {
    let k1 = k_c1.max(0.5 * ktilde_c2);
    let k2 = k_c1.min(0.5 * ktilde_c2);
    let m = params.inductance_matrix();
    let shift = |k: f64| &m - &Matrix::from_diagonal(&[k, 2.0 * k, 2.0 * k]);
    StabilityMatrices {
        s1: shift(k1),
        s2: shift(k2),
        k1,
        k2,
    }
}
