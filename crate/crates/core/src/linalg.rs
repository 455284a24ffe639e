//! Dense complex linear algebra shared by every module.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn diag(values: impl IntoIterator<Item = C64>) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_vec(values.into_iter().collect()))
}

pub fn real_diag(values: &[f64]) -> CMatrix {
    diag(values.iter().map(|&x| C64::new(x, 0.0)))
}

/// `D^{1/2} M D^{1/2}` for a positive diagonal `D`: the matrix of a kernel in an
/// orthonormalized representation of the Jackson measure.
pub fn weighted(m: &CMatrix, weights: &[f64]) -> CMatrix {
    let s: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (s[i] * s[j]))
}

/// Largest entrywise difference of two kernels in the Jackson-orthonormal
/// representation.
pub fn weighted_max_diff(a: &CMatrix, b: &CMatrix, weights: &[f64]) -> f64 {
    max_abs(&weighted(&(a - b), weights))
}

/// Spectral radius via a complex Schur form.
pub fn spectral_radius(m: &CMatrix) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Diagonalization("Schur iteration did not converge".into()))?;
    let eigs = schur
        .eigenvalues()
        .ok_or_else(|| Error::Diagonalization("non-triangular Schur form".into()))?;
    Ok(eigs.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves `A X = B`, refusing systems whose condition estimate exceeds `1e13`.
pub fn solve_checked(a: &CMatrix, b: &CMatrix) -> Result<(CMatrix, f64)> {
    let condition = condition_number(a);
    if !condition.is_finite() || condition > 1e13 {
        return Err(Error::SingularSystem { condition });
    }
    let x = a
        .clone()
        .lu()
        .solve(b)
        .ok_or(Error::SingularSystem { condition })?;
    Ok((x, condition))
}

/// `H^{-1/2}` of a Hermitian positive-definite matrix.
pub fn hermitian_inv_sqrt(h: &CMatrix) -> Result<CMatrix> {
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Diagonalization("Hermitian eigen-solve did not converge".into()))?;
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 1e-14 {
        return Err(Error::SingularSystem {
            condition: eig.eigenvalues.max() / min.max(f64::MIN_POSITIVE),
        });
    }
    let d = real_diag(&eig.eigenvalues.iter().map(|e| e.powf(-0.5)).collect::<Vec<_>>());
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// `(e^{zτ} - 1)/z`, with the `z → 0` limit handled by its series.
pub fn phi1(z: C64, tau: f64) -> C64 {
    let x = z * tau;
    if x.norm() < 1e-5 {
        C64::new(tau, 0.0) * (ONE + x / 2.0 + x * x / 6.0 + x * x * x / 24.0)
    } else {
        (x.exp() - ONE) / z
    }
}

/// `max(‖A A† − I‖_F, ‖A† A − I‖_F)`.
pub fn unitarity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let id = identity(n);
    let left = frobenius(&(a * a.adjoint() - &id));
    let right = frobenius(&(a.adjoint() * a - &id));
    left.max(right)
}
