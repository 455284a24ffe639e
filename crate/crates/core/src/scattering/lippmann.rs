use crate::basis::CoefficientVector;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, I, ZERO};

use super::potential::ChannelSpace;

/// Solution of `T = V + V R₀(z) T` at the complex energy `z`.
#[derive(Debug, Clone)]
pub struct TMatrix {
    pub matrix: CMatrix,
    pub energy: C64,
    /// Spectral radius of the Born iteration operator `R₀(z) V`.
    pub spectral_radius: f64,
    pub condition: f64,
}

/// `R₀(z) = diag 1/(z − E_p)` over the channel energies.
pub fn free_resolvent(ch: &ChannelSpace, z: C64) -> CMatrix {
    linalg::diag(ch.energies.iter().map(|&e| (z - e).inv()))
}

/// Born iteration operator `R₀(z) V`.
pub fn born_operator(ch: &ChannelSpace, z: C64) -> CMatrix {
    free_resolvent(ch, z) * &ch.potential
}

/// T-matrix at an arbitrary complex energy off the real axis.
pub fn resolvent_t(ch: &ChannelSpace, z: C64) -> Result<TMatrix> {
    if z.im == 0.0 {
        return Err(Error::NonPositiveEpsilon(0.0));
    }
    let n = ch.len();
    let r0 = free_resolvent(ch, z);
    let a = linalg::identity(n) - &ch.potential * &r0;
    let (matrix, condition) = linalg::solve_checked(&a, &ch.potential)?;
    let spectral_radius = linalg::spectral_radius(&(r0 * &ch.potential))?;
    Ok(TMatrix {
        matrix,
        energy: z,
        spectral_radius,
        condition,
    })
}

/// T-matrix on the retarded side `E + iε`.
pub fn lippmann_schwinger_solve(ch: &ChannelSpace, energy: f64, eps: f64) -> Result<TMatrix> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    resolvent_t(ch, C64::new(energy, eps))
}

fn check_incoming(phi: &CoefficientVector, ch: &ChannelSpace) -> Result<()> {
    if !std::sync::Arc::ptr_eq(phi.basis(), ch.basis()) && **phi.basis() != **ch.basis() {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

/// Mode energy with the branch `σ = ±1` (retarded for the first geometry,
/// advanced for the second).
fn branch(ch: &ChannelSpace) -> f64 {
    ch.basis().phase_sign()
}

/// Order-`N` Born series for the scattering state grown from `phi`, sampled
/// at `times`.
///
/// Each incoming channel `p′` contributes `Σ_{n≤N} (R₀(E_p′ ± iε) V)ⁿ e_p′`
/// with the state's phase `e^{∓iE_p′ t}`; modes outside the channel space
/// propagate freely.
pub fn born_wavefunction(
    phi: &CoefficientVector,
    ch: &ChannelSpace,
    eps: f64,
    order: usize,
    times: &[f64],
) -> Result<Vec<CoefficientVector>> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    check_incoming(phi, ch)?;
    let sigma = branch(ch);
    let columns: Vec<CVector> = (0..ch.len())
        .map(|k| {
            let op = born_operator(ch, C64::new(ch.energies[k], sigma * eps));
            let mut term = CVector::zeros(ch.len());
            term[k] = C64::new(1.0, 0.0);
            let mut sum = term.clone();
            for _ in 0..order {
                term = &op * term;
                sum += &term;
            }
            sum
        })
        .collect();
    Ok(assemble(phi, ch, &columns, times))
}

/// Scattering state from the solved T-matrix: `e_p′ + R₀ T e_p′`.
pub fn exact_wavefunction(
    phi: &CoefficientVector,
    ch: &ChannelSpace,
    eps: f64,
    times: &[f64],
) -> Result<Vec<CoefficientVector>> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    check_incoming(phi, ch)?;
    let sigma = branch(ch);
    let mut columns = Vec::with_capacity(ch.len());
    for k in 0..ch.len() {
        let z = C64::new(ch.energies[k], sigma * eps);
        let t = resolvent_t(ch, z)?;
        let mut col = free_resolvent(ch, z) * t.matrix.column(k);
        col[k] += C64::new(1.0, 0.0);
        columns.push(col);
    }
    Ok(assemble(phi, ch, &columns, times))
}

fn assemble(
    phi: &CoefficientVector,
    ch: &ChannelSpace,
    columns: &[CVector],
    times: &[f64],
) -> Vec<CoefficientVector> {
    let basis = ch.basis();
    let sigma = branch(ch);
    let n = ch.len();
    times
        .iter()
        .map(|&t| {
            let dt = t - phi.time;
            let mut values = CVector::from_element(basis.len(), ZERO);
            for (k, col) in columns.iter().enumerate() {
                let c = phi.values[k] * (-I * (sigma * ch.energies[k] * dt)).exp();
                if c != ZERO {
                    for p in 0..n {
                        values[p] += col[p] * c;
                    }
                }
            }
            for p in n..basis.len() {
                let e = basis.energies()[p] * ch.scale;
                values[p] = phi.values[p] * (-I * (sigma * e * dt)).exp();
            }
            CoefficientVector::new(basis.clone(), values, t).expect("sized to the basis")
        })
        .collect()
}
