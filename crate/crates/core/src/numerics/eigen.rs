//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Every matrix in this crate is at most 6×6, so the quadratic cost per sweep
//! is irrelevant and Jacobi's unconditional accuracy is what matters.

use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::{tolerances, Error, Result};

const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenDecomposition {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthogonal matrix whose columns are the matching unit eigenvectors.
    pub vectors: Matrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    /// `V·diag(f(λ))·Vᵀ`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let mut out = Matrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)];
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.map_values(|v| v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    Semidefinite,
}

pub fn sym_eig(a: &Matrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::dim(format!(
            "eigendecomposition of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let asym = a.asymmetry();
    if asym > tolerances::SYMMETRY * a.max_abs().max(1.0) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let n = a.rows();
    let mut m = a.symmetrized();
    let mut v = Matrix::identity(n);
    let scale = m.frobenius();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut m, &mut v, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values: Vec<f64> = order.iter().map(|&k| m[(k, k)]).collect();
    let columns: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| {
            let mut col = v.column(k);
            // deterministic sign: largest component positive
            let lead = col
                .iter()
                .copied()
                .fold(0.0_f64, |best, x| if x.abs() > best.abs() { x } else { best });
            if lead < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
            col
        })
        .collect();
    Ok(EigenDecomposition {
        values,
        vectors: Matrix::from_columns(&columns),
    })
}

fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = m.rows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = c * mkp - s * mkq;
        m[(k, q)] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = c * mpk - s * mqk;
        m[(q, k)] = s * mpk + c * mqk;
    }
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Principal square root and inverse square root of a symmetric
/// positive-definite matrix.
pub fn sqrt_spd(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let eig = sym_eig(a)?;
    let least = eig.values[0];
    let largest = eig.values[eig.values.len() - 1];
    if !(least > 0.0) || least <= 1e-14 * largest.abs() {
        return Err(Error::NotPositiveDefinite { least });
    }
    Ok((eig.map_values(f64::sqrt), eig.map_values(|v| 1.0 / v.sqrt())))
}

pub fn definiteness(a: &Matrix, tol: f64) -> Result<Definiteness> {
    Ok(classify_values(&sym_eig(a)?.values, tol))
}

pub fn classify_values(values: &[f64], tol: f64) -> Definiteness {
    let positive = values.iter().any(|&v| v > tol);
    let negative = values.iter().any(|&v| v < -tol);
    let null = values.iter().any(|&v| v.abs() <= tol);
    match (positive, negative, null) {
        (true, true, _) => Definiteness::Indefinite,
        (_, _, true) => Definiteness::Semidefinite,
        (true, false, false) => Definiteness::PositiveDefinite,
        (false, true, false) => Definiteness::NegativeDefinite,
        (false, false, false) => Definiteness::Semidefinite,
    }
}

/// Numerical rank from the eigenvalues of `AᵀA`.
pub fn rank(a: &Matrix, rel_tol: f64) -> Result<usize> {
    let gram = &a.transpose() * a;
    let eig = sym_eig(&gram)?;
    let largest = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    if largest == 0.0 {
        return Ok(0);
    }
    let cutoff = (rel_tol * largest.sqrt()).powi(2);
    Ok(eig.values.iter().filter(|&&v| v > cutoff).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn identity_values() {
        let e = sym_eig(&Matrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn diagonal_is_permutation() {
        let e = sym_eig(&Matrix::from_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        let expected = Matrix::from_rows(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        assert_eq!(e.vectors, expected);
    }

    #[test]
    fn two_by_two() {
        let e = sym_eig(&Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]])).unwrap();
        assert!(close(e.values[0], 1.0, 1e-14));
        assert!(close(e.values[1], 3.0, 1e-14));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            sym_eig(&Matrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            sym_eig(&Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]])),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn square_roots() {
        let (h, nh) = sqrt_spd(&Matrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert!((&h - &Matrix::from_diagonal(&[2.0, 3.0])).max_abs() < 1e-14);
        assert!((&nh - &Matrix::from_diagonal(&[0.5, 1.0 / 3.0])).max_abs() < 1e-14);
        let (h, nh) = sqrt_spd(&Matrix::identity(3)).unwrap();
        assert_eq!(h, Matrix::identity(3));
        assert_eq!(nh, Matrix::identity(3));
        assert!(matches!(
            sqrt_spd(&Matrix::from_diagonal(&[1.0, -1.0])),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn definiteness_cases() {
        let t = tolerances::DEFINITENESS;
        assert_eq!(
            definiteness(&Matrix::identity(2), t).unwrap(),
            Definiteness::PositiveDefinite
        );
        assert_eq!(
            definiteness(&Matrix::identity(2).scale(-1.0), t).unwrap(),
            Definiteness::NegativeDefinite
        );
        assert_eq!(
            definiteness(&Matrix::from_diagonal(&[1.0, -1.0]), t).unwrap(),
            Definiteness::Indefinite
        );
        assert_eq!(
            definiteness(&Matrix::from_diagonal(&[1.0, 0.0]), t).unwrap(),
            Definiteness::Semidefinite
        );
    }

    #[test]
    fn ranks() {
        let a = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 1.0]]);
        assert_eq!(rank(&a, 1e-10).unwrap(), 2);
        assert_eq!(rank(&Matrix::identity(3), 1e-10).unwrap(), 3);
        assert_eq!(rank(&Matrix::zeros(2, 2), 1e-10).unwrap(), 0);
    }
}
