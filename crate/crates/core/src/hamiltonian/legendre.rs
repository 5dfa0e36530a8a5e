use std::fmt;
use std::sync::Arc;

use super::system::QuadraticLagrangianSystem;
use crate::numerics::{add, dot, Matrix};
use crate::variational::ControlSystem;
use crate::{Error, Result};

type VecFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
type ScalarFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// A Hamiltonian `H(x, p)` with its feedback law and gradients, for a fixed
/// multiplier `μ`.
#[derive(Clone)]
pub struct HamiltonianSpec {
    pub state_dim: usize,
    pub control_dim: usize,
    pub mu: Vec<f64>,
    /// Constant `μᵀα` included in `h`.
    pub offset: f64,
    /// True when the canonical equations are linear in `(x, p)`.
    pub linear: bool,
    phi: VecFn,
    h: ScalarFn,
    grad_x: VecFn,
    grad_p: VecFn,
}

impl fmt::Debug for HamiltonianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSpec")
            .field("state_dim", &self.state_dim)
            .field("control_dim", &self.control_dim)
            .field("mu", &self.mu)
            .field("offset", &self.offset)
            .field("linear", &self.linear)
            .finish_non_exhaustive()
    }
}

impl HamiltonianSpec {
    /// Optimal control `u = φ(x, p)`.
    pub fn phi(&self, x: &[f64], p: &[f64]) -> Vec<f64> {
        (self.phi)(x, p)
    }

    pub fn value(&self, x: &[f64], p: &[f64]) -> f64 {
        (self.h)(x, p)
    }

    /// `H − μᵀα`.
    pub fn value_without_offset(&self, x: &[f64], p: &[f64]) -> f64 {
        (self.h)(x, p) - self.offset
    }

    pub fn grad_x(&self, x: &[f64], p: &[f64]) -> Vec<f64> {
        (self.grad_x)(x, p)
    }

    pub fn grad_p(&self, x: &[f64], p: &[f64]) -> Vec<f64> {
        (self.grad_p)(x, p)
    }

    /// `(∇ₚH, −∇ₓH)` on the stacked vector `z = (x, p)`.
    pub fn canonical_field(&self, z: &[f64]) -> Vec<f64> {
        let (x, p) = z.split_at(self.state_dim);
        let mut out = self.grad_p(x, p);
        out.extend(self.grad_x(x, p).into_iter().map(|g| -g));
        out
    }

    /// Builds `H(x, p) = pᵀf(x, φ) − L(x, φ) + μᵀg(x, φ)` for an arbitrary
    /// system and a user-supplied maximizer `φ`. Gradients follow from the
    /// envelope identity, which holds when `φ` is the true stationary point.
    pub fn with_feedback<S, F>(sys: Arc<S>, mu: Vec<f64>, phi: F) -> Result<Self>
    where
        S: ControlSystem + 'static,
        F: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        let l = sys.constraint().dim();
        if !mu.is_empty() && mu.len() != l {
            return Err(Error::dim(format!("mu has length {} but the constraint dimension is {l}", mu.len())));
        }
        let phi: VecFn = Arc::new(phi);
        let (s1, f1, m1) = (sys.clone(), phi.clone(), mu.clone());
        let h: ScalarFn = Arc::new(move |x, p| {
            let u = f1(x, p);
            pseudo_hamiltonian(&*s1, x, p, &u, &m1)
        });
        let (s2, f2) = (sys.clone(), phi.clone());
        let grad_p: VecFn = Arc::new(move |x, p| s2.f(x, &f2(x, p)));
        let (s3, f3, m3) = (sys.clone(), phi.clone(), mu.clone());
        let grad_x: VecFn = Arc::new(move |x, p| {
            let u = f3(x, p);
            let mut g = s3.f_x(x, &u).vec_mul(p);
            let lx = s3.l_x(x, &u);
            g.iter_mut().zip(&lx).for_each(|(a, b)| *a -= b);
            if !m3.is_empty() {
                let gx = s3.constraint().g_x(x, &u).vec_mul(&m3);
                g.iter_mut().zip(&gx).for_each(|(a, b)| *a += b);
            }
            g
        });
        Ok(Self {
            state_dim: sys.state_dim(),
            control_dim: sys.control_dim(),
            mu,
            offset: 0.0,
            linear: false,
            phi,
            h,
            grad_x,
            grad_p,
        })
    }
}

/// `pᵀf(x, u) − L(x, u) + μᵀg(x, u)`; an empty `mu` drops the last term.
pub fn pseudo_hamiltonian<S: ControlSystem + ?Sized>(sys: &S, x: &[f64], p: &[f64], u: &[f64], mu: &[f64]) -> f64 {
    let mut h = dot(p, &sys.f(x, u)) - sys.lagrangian(x, u);
    if !mu.is_empty() {
        h += dot(mu, &sys.constraint().g(x, u));
    }
    h
}

/// Exact Legendre transform of `L = ½uᵀRu − V(x)` under `x' = A u` and
/// `∫ (B u + α) = 0`: with `w = Aᵀp + Bᵀμ`,
/// `φ = R⁻¹w` and `H = ½wᵀR⁻¹w + V(x) + μᵀα`.
/// An empty `mu` gives the unconstrained Hamiltonian.
pub fn legendre_transform(sys: &QuadraticLagrangianSystem, mu: &[f64]) -> Result<HamiltonianSpec> {
    let l = sys.constraint_dim();
    let (b, alpha) = match (&sys.constraint, mu.is_empty()) {
        (_, true) => (Matrix::zeros(0, sys.a.cols()), Vec::new()),
        (Some((b, alpha)), false) if mu.len() == l => (b.clone(), alpha.clone()),
        _ => {
            return Err(Error::dim(format!(
                "mu has length {} but the constraint dimension is {l}",
                mu.len()
            )))
        }
    };
    let offset = if mu.is_empty() { 0.0 } else { dot(mu, &alpha) };
    let bt_mu = if mu.is_empty() { vec![0.0; sys.a.cols()] } else { b.vec_mul(mu) };
    let a = Arc::new(sys.a.clone());
    let r_inv = Arc::new(sys.r_inv().clone());
    let potential = sys.potential.clone();

    let momentum = {
        let a = a.clone();
        let bt_mu = bt_mu.clone();
        move |p: &[f64]| add(&a.vec_mul(p), &bt_mu)
    };
    let momentum = Arc::new(momentum);

    let (m1, ri1) = (momentum.clone(), r_inv.clone());
    let phi: VecFn = Arc::new(move |_, p| ri1.mul_vec(&m1(p)));
    let (m2, ri2, v2) = (momentum.clone(), r_inv.clone(), potential.clone());
    let h: ScalarFn = Arc::new(move |x, p| 0.5 * ri2.quadratic_form(&m2(p)) + v2.value(x) + offset);
    let v3 = potential.clone();
    let grad_x: VecFn = Arc::new(move |x, _| v3.gradient(x));
    let (m4, ri4, a4) = (momentum, r_inv, a);
    let grad_p: VecFn = Arc::new(move |_, p| a4.mul_vec(&ri4.mul_vec(&m4(p))));

    Ok(HamiltonianSpec {
        state_dim: sys.a.rows(),
        control_dim: sys.a.cols(),
        mu: mu.to_vec(),
        offset,
        linear: potential.is_quadratic(),
        phi,
        h,
        grad_x,
        grad_p,
    })
}
