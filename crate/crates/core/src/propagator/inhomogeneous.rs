use std::sync::Arc;

use super::{build, Causality, KernelVariant};
use crate::basis::WaveBasis;
use crate::error::{Error, Result};
use crate::linalg::{CVector, C64, I};
use crate::qcalc::LatticeFunction;

/// Source `ρ(t_k, x)` sampled on the uniform grid `t_k = t0 + k·dt`.
#[derive(Debug, Clone)]
pub struct TimeSource {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<LatticeFunction>,
}

impl TimeSource {
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.samples.len().saturating_sub(1))
    }
}

/// Trapezoid weights of `∫_{t0}^{min(t, t_end)}` on the source grid, for the
/// retarded case (`forward`) or `∫_{max(t, t0)}^{t_end}` for the advanced one.
/// An evaluation time inside the window must lie on the grid for second order;
/// a single-sample window gets weight `dt`.
fn weights(src: &TimeSource, t: f64, forward: bool) -> Vec<f64> {
    let n = src.samples.len();
    if n == 1 {
        let inside = if forward { t >= src.t0 } else { t <= src.t0 };
        return vec![if inside { src.dt } else { 0.0 }];
    }
    let eps = 1e-9 * src.dt;
    let mut w = vec![0.0; n];
    let included: Vec<usize> = (0..n)
        .filter(|&k| {
            let tk = src.time(k);
            if forward {
                tk <= t + eps
            } else {
                tk >= t - eps
            }
        })
        .collect();
    if included.len() < 2 {
        return w;
    }
    for &k in &included {
        w[k] = src.dt;
    }
    w[included[0]] *= 0.5;
    w[*included.last().unwrap()] *= 0.5;
    w
}

/// `ψ(t) = ∓i Σ_k c_k dt K_±(t_k → t) Γ ρ(t_k)`, the trapezoid realization of
/// `∓i ∫ dt_y ∫ d_q y K_±(x, y) ρ(y)`.
///
/// The result solves `(i∂_t ∓ H₀)ψ = ρ` up to the time-quadrature error.
pub fn solve_inhomogeneous(
    basis: &Arc<WaveBasis>,
    variant: KernelVariant,
    causality: Causality,
    source: &TimeSource,
    times: &[f64],
) -> Result<Vec<LatticeFunction>> {
    if source.samples.is_empty() {
        return Err(Error::EmptyTimeWindow);
    }
    if !(source.dt.is_finite() && source.dt > 0.0) {
        return Err(Error::invalid("dt", "time step must be positive"));
    }
    if causality == Causality::None {
        return Err(Error::invalid("causality", "need a retarded or advanced kernel"));
    }
    variant.check_geometry(basis.ctx())?;
    if variant.tilde {
        return Err(Error::invalid("variant", "tilde kernels act from the right"));
    }
    let lattice = basis.lattice();
    for s in &source.samples {
        if **s.lattice() != **lattice {
            return Err(Error::LatticeMismatch);
        }
    }
    let forward = causality == Causality::Retarded;
    let sign = if forward { -I } else { I };
    let gamma = super::gamma(basis, variant);
    let rho: Vec<CVector> = source.samples.iter().map(|s| &gamma * s.to_vector()).collect();
    let orientation = basis.ctx().orientation;
    times
        .iter()
        .map(|&t| {
            let w = weights(source, t, forward);
            let mut acc = CVector::zeros(lattice.len());
            for (k, &wk) in w.iter().enumerate() {
                if wk == 0.0 {
                    continue;
                }
                let kernel = build(basis, variant, causality, source.time(k), t, orientation);
                acc += &kernel.matrix * &rho[k] * C64::new(wk, 0.0);
            }
            LatticeFunction::from_vector(lattice.clone(), &(acc * sign), t)
        })
        .collect()
}
