//! Interaction picture: time-dependent potential `V_I(t)`, Dyson series and
//! direct ODE integration of the evolution operator, coefficient extraction
//! and the interaction-picture S-matrix.
//!
//! The first geometry evolves forward with `i∂U = V_I U`; the second
//! integrates the right-multiplication equation `i∂Z = −Z V_I`, which
//! reproduces the `₋` amplitudes of the momentum-basis construction.

mod ode;
mod quadrature;

use serde::{Deserialize, Serialize};

pub use quadrature::GaussLegendre;

use crate::basis::{project, CoefficientVector, WaveBasis};
use crate::error::{Error, Result};
use crate::export;
use crate::linalg::{CMatrix, CVector, C64, I};
use crate::qcalc::{Geometry, LatticeFunction};
use crate::scattering::{ChannelSpace, HamiltonianVariant, Provenance, Route, SFamily, SMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ordering {
    Left,
    Right,
}

impl Ordering {
    pub fn for_geometry(g: Geometry) -> Self {
        match g {
            Geometry::G1 => Ordering::Left,
            Geometry::G2 => Ordering::Right,
        }
    }
}

/// `V_I(t)_pp′ = e^{i(E_p − E_p′)t − ε|t|} V_pp′` over a channel space.
#[derive(Debug, Clone)]
pub struct InteractionPotential {
    channels: ChannelSpace,
    pub eps: f64,
    pub ordering: Ordering,
}

impl InteractionPotential {
    pub fn new(channels: ChannelSpace, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::invalid("eps", "must be non-negative"));
        }
        let ordering = Ordering::for_geometry(channels.basis().ctx().geometry);
        Ok(Self {
            channels,
            eps,
            ordering,
        })
    }

    pub fn channels(&self) -> &ChannelSpace {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn at(&self, t: f64) -> CMatrix {
        let e = &self.channels.energies;
        let env = (-self.eps * t.abs()).exp();
        let phases: Vec<C64> = e.iter().map(|&x| (I * (x * t)).exp()).collect();
        CMatrix::from_fn(e.len(), e.len(), |p, q| {
            self.channels.potential[(p, q)] * phases[p] * phases[q].conj() * env
        })
    }

    /// Largest Bohr frequency `|E_p − E_p′|` in the channel space.
    pub fn max_frequency(&self) -> f64 {
        let e = &self.channels.energies;
        let hi = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = e.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        out.channels.potential *= C64::new(lambda, 0.0);
        out
    }
}

fn picture_phase(basis: &WaveBasis, variant: HamiltonianVariant, sign: f64, t: f64) -> Vec<C64> {
    let scale = variant.scale(basis.ctx());
    let sigma = basis.phase_sign();
    basis
        .energies()
        .iter()
        .map(|&e| (I * (sign * sigma * scale * e * t)).exp())
        .collect()
}

/// Multiplies `c_p(t)` by `e^{+iσE_p t}`, removing the free phase.
pub fn to_interaction_picture(c: &CoefficientVector, variant: HamiltonianVariant) -> CoefficientVector {
    let ph = picture_phase(c.basis(), variant, 1.0, c.time);
    let values = CVector::from_iterator(ph.len(), c.values.iter().zip(&ph).map(|(v, p)| v * p));
    CoefficientVector::new(c.basis().clone(), values, c.time).expect("same basis")
}

pub fn from_interaction_picture(c: &CoefficientVector, variant: HamiltonianVariant) -> CoefficientVector {
    let ph = picture_phase(c.basis(), variant, -1.0, c.time);
    let values = CVector::from_iterator(ph.len(), c.values.iter().zip(&ph).map(|(v, p)| v * p));
    CoefficientVector::new(c.basis().clone(), values, c.time).expect("same basis")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dyson { order: usize, panels: usize },
    Ode { steps: usize },
}

#[derive(Debug, Clone)]
pub struct EvolutionOperator {
    pub matrix: CMatrix,
    pub t_from: f64,
    pub t_to: f64,
    pub ordering: Ordering,
    pub tol: f64,
    pub method: Method,
    /// `(t, ‖U†U − I‖)` at every accepted step.
    pub drift: Vec<(f64, f64)>,
    /// Order-resolved terms for the Dyson series.
    pub terms: Vec<CMatrix>,
}

impl EvolutionOperator {
    pub fn max_drift(&self) -> f64 {
        self.drift.iter().map(|d| d.1).fold(0.0, f64::max)
    }

    pub fn drift_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self.drift.iter().map(|&(t, d)| vec![t, d]).collect();
        export::table(&["t", "unitarity_drift"], rows)
    }
}

/// Order-`N` Dyson series with panel Gauss-Legendre quadrature.
pub fn dyson_evolution(
    vi: &InteractionPotential,
    t_from: f64,
    t_to: f64,
    order: usize,
    tol: f64,
) -> Result<EvolutionOperator> {
    if !(t_from.is_finite() && t_to.is_finite()) {
        return Err(Error::invalid("time", "must be finite"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let (terms, panels) = quadrature::dyson(vi, t_from, t_to, order, tol)?;
    let n = vi.len();
    let matrix = terms.iter().fold(CMatrix::zeros(n, n), |acc, t| acc + t);
    Ok(EvolutionOperator {
        matrix,
        t_from,
        t_to,
        ordering: vi.ordering,
        tol,
        method: Method::Dyson { order, panels },
        drift: Vec::new(),
        terms,
    })
}

/// Direct adaptive integration of the evolution equation.
pub fn ode_evolution(vi: &InteractionPotential, t_from: f64, t_to: f64, tol: f64) -> Result<EvolutionOperator> {
    if !(t_from.is_finite() && t_to.is_finite()) {
        return Err(Error::invalid("time", "must be finite"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let run = ode::integrate(vi, t_from, t_to, tol)?;
    Ok(EvolutionOperator {
        matrix: run.matrix,
        t_from,
        t_to,
        ordering: vi.ordering,
        tol,
        method: Method::Ode { steps: run.steps },
        drift: run.drift,
        terms: Vec::new(),
    })
}

/// `U(t₂, t₀)` from two segments, in the ordering of the evolution.
pub fn chain(first: &EvolutionOperator, second: &EvolutionOperator) -> CMatrix {
    match first.ordering {
        Ordering::Left => &second.matrix * &first.matrix,
        Ordering::Right => &first.matrix * &second.matrix,
    }
}

/// Interaction-picture coefficients `C_p(t)` of a state sampled in time.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeries {
    pub times: Vec<f64>,
    pub values: Vec<CVector>,
}

impl CoefficientSeries {
    pub fn norms(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_squared()).collect()
    }

    /// Columns `t, C0_re, C0_im, …, norm`.
    pub fn to_csv(&self) -> String {
        let n = self.values.first().map_or(0, |v| v.len());
        let mut names = vec!["t".to_string()];
        for p in 0..n {
            names.push(format!("c{p}_re"));
            names.push(format!("c{p}_im"));
        }
        names.push("norm".into());
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let rows: Vec<Vec<f64>> = self
            .times
            .iter()
            .zip(&self.values)
            .map(|(&t, v)| {
                let mut row = vec![t];
                for z in v.iter() {
                    row.push(z.re);
                    row.push(z.im);
                }
                row.push(v.norm_squared());
                row
            })
            .collect();
        export::table(&refs, rows)
    }
}

/// Projects each sample onto the `t = 0` modes and strips the free phase.
pub fn interaction_coefficients(
    psi: &[LatticeFunction],
    basis: &std::sync::Arc<WaveBasis>,
    variant: HamiltonianVariant,
) -> Result<CoefficientSeries> {
    let mut times = Vec::with_capacity(psi.len());
    let mut values = Vec::with_capacity(psi.len());
    for f in psi {
        let c = to_interaction_picture(&project(f, basis)?, variant);
        times.push(c.time);
        values.push(c.values);
    }
    Ok(CoefficientSeries { times, values })
}

/// Applies a channel-space evolution to interaction coefficients, sampling
/// `C(t) = U(t, t₀) C(t₀)` on a grid.
pub fn evolve_coefficients(
    vi: &InteractionPotential,
    c0: &CVector,
    t0: f64,
    times: &[f64],
    tol: f64,
) -> Result<CoefficientSeries> {
    if c0.len() != vi.len() {
        return Err(Error::invalid("coefficients", "one entry per channel"));
    }
    let mut values = Vec::with_capacity(times.len());
    let mut from = t0;
    let mut state = c0.clone();
    for &t in times {
        let u = ode_evolution(vi, from, t, tol)?;
        state = match vi.ordering {
            Ordering::Left => &u.matrix * &state,
            Ordering::Right => u.matrix.transpose() * &state,
        };
        values.push(state.clone());
        from = t;
    }
    Ok(CoefficientSeries {
        times: times.to_vec(),
        values,
    })
}

/// `e^{-εT}` must not exceed this for a window to count as asymptotic.
pub const WINDOW_RESIDUAL: f64 = 1e-8;

/// Smallest window satisfying the asymptotic condition for `eps`.
pub fn window_for(eps: f64) -> f64 {
    -WINDOW_RESIDUAL.ln() / eps
}

/// `S = U(T, −T)` in the family's ordering.
pub fn smatrix_interaction(
    vi: &InteractionPotential,
    family: SFamily,
    window: f64,
    tol: f64,
) -> Result<SMatrix> {
    let eps = vi.eps;
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let residual = (-eps * window).exp();
    if !(residual <= WINDOW_RESIDUAL * (1.0 + 1e-12)) {
        return Err(Error::InsufficientWindow { window, eps, residual });
    }
    if family.tilde {
        return Err(Error::invalid("family", "tilde partners are built on the resolvent route"));
    }
    if family.base.hamiltonian() != vi.channels.variant {
        return Err(Error::invalid("family", "channel space built for another Hamiltonian version"));
    }
    let u = ode_evolution(vi, -window, window, tol)?;
    let past = ode_evolution(vi, -2.0 * window, -window, tol)?;
    let overlap = (0..vi.len())
        .map(|p| past.matrix[(p, p)].norm())
        .fold(f64::INFINITY, f64::min);
    let provenance = Provenance {
        window,
        eps,
        tol,
        remote_past_overlap: overlap,
    };
    SMatrix::new(&vi.channels, family, Route::Interaction, eps, u.matrix, Some(provenance))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::linalg;
    use crate::scattering::fixtures::{barrier, basis, crossed_basis};
    use crate::scattering::{smatrix_momentum, unitarity_defect, SMatrixFamily};

    fn vi(b: &Arc<WaveBasis>, strength: f64, family: SMatrixFamily, eps: f64) -> InteractionPotential {
        let ch = ChannelSpace::new(b, &barrier(b, strength), 8, family.hamiltonian()).unwrap();
        InteractionPotential::new(ch, eps).unwrap()
    }

    #[test]
    fn order_zero_and_zero_potential_are_identity() {
        let b = basis(0.9);
        let v = vi(&b, 0.0, SMatrixFamily::S1StarPlus, 0.1);
        assert_eq!(dyson_evolution(&v, -3.0, 4.0, 0, 1e-10).unwrap().matrix, linalg::identity(8));
        assert_eq!(ode_evolution(&v, -3.0, 4.0, 1e-10).unwrap().matrix, linalg::identity(8));
        let s = smatrix_interaction(&v, SFamily::plain(SMatrixFamily::S1StarPlus), window_for(0.1), 1e-10).unwrap();
        assert_eq!(s.matrix, linalg::identity(8));
        let u = ode_evolution(&vi(&b, 0.1, SMatrixFamily::S1StarPlus, 0.1), 2.0, 2.0, 1e-10).unwrap();
        assert_eq!(u.matrix, linalg::identity(8));
    }

    #[test]
    fn commuting_generator_has_closed_form() {
        let b = basis(0.9);
        let mut v = vi(&b, 0.0, SMatrixFamily::S1StarPlus, 0.2);
        let d: Vec<f64> = (0..8).map(|k| 0.05 * (k as f64 + 1.0)).collect();
        v.channels = v.channels.with_potential(linalg::real_diag(&d));
        let (a, c) = (-2.0, 3.0);
        // ∫ e^{-ε|t|} dt over [a, c] with a < 0 < c
        let integral = ((1.0 - (v.eps * a).exp()) + (1.0 - (-v.eps * c).exp())) / v.eps;
        let exact = linalg::diag(d.iter().map(|&x| (-I * (x * integral)).exp()));
        let dys = dyson_evolution(&v, a, c, 20, 1e-13).unwrap();
        let ode = ode_evolution(&v, a, c, 1e-12).unwrap();
        assert!(linalg::max_abs(&(&dys.matrix - &exact)) < 1e-11);
        assert!(linalg::max_abs(&(&ode.matrix - &exact)) < 1e-10);
    }

    #[test]
    fn dyson_truncation_error_is_third_order() {
        for b in [basis(0.9), crossed_basis(0.9)] {
            let f = if b.ctx().geometry == Geometry::G1 {
                SMatrixFamily::S1StarPlus
            } else {
                SMatrixFamily::S2Minus
            };
            let base = vi(&b, 0.2, f, 0.3);
            let errs: Vec<f64> = [1.0, 0.5, 0.25]
                .iter()
                .map(|&l| {
                    let v = base.scaled(l);
                    let d = dyson_evolution(&v, -10.0, 10.0, 2, 1e-12).unwrap();
                    let o = ode_evolution(&v, -10.0, 10.0, 1e-12).unwrap();
                    linalg::max_abs(&(d.matrix - o.matrix))
                })
                .collect();
            for w in errs.windows(2) {
                let slope = (w[0] / w[1]).log2();
                assert!((slope - 3.0).abs() < 0.3, "{errs:?}");
            }
        }
    }

    #[test]
    fn ode_is_unitary_and_composes() {
        for b in [basis(0.9), crossed_basis(0.9)] {
            let f = if b.ctx().geometry == Geometry::G1 {
                SMatrixFamily::S1PrimePlus
            } else {
                SMatrixFamily::S2StarPrimeMinus
            };
            let v = vi(&b, 0.3, f, 0.1);
            let tol = 1e-9;
            let whole = ode_evolution(&v, -20.0, 15.0, tol).unwrap();
            let a = ode_evolution(&v, -20.0, 3.0, tol).unwrap();
            let c = ode_evolution(&v, 3.0, 15.0, tol).unwrap();
            assert!(whole.max_drift() <= tol);
            assert!(linalg::max_abs(&(chain(&a, &c) - &whole.matrix)) <= 10.0 * tol);
        }
    }

    #[test]
    fn picture_maps_are_inverse_isometries() {
        let b = basis(0.9);
        let mut c = CoefficientVector::unit(b.clone(), 3, 1.7);
        c.values[5] = C64::new(0.3, -0.4);
        for var in [HamiltonianVariant::H, HamiltonianVariant::HPrime] {
            let there = to_interaction_picture(&c, var);
            let back = from_interaction_picture(&there, var);
            assert!((&back.values - &c.values).norm() < 1e-15);
            assert!((there.norm_sqr() - c.norm_sqr()).abs() < 1e-14);
        }
        let mut zero = c.clone();
        zero.time = 0.0;
        let at_zero = to_interaction_picture(&zero, HamiltonianVariant::H);
        assert_eq!(at_zero.values, c.values);
    }

    #[test]
    fn free_state_has_constant_coefficients() {
        for b in [basis(0.9), crossed_basis(0.9)] {
            let mut c = CoefficientVector::unit(b.clone(), 0, 0.0);
            c.values[4] = C64::new(0.0, 0.5);
            let psi: Vec<LatticeFunction> = [0.0, 0.8, 2.5].iter().map(|&t| crate::basis::expand(&c, t)).collect();
            let series = interaction_coefficients(&psi, &b, HamiltonianVariant::H).unwrap();
            for v in &series.values {
                assert!((v - &c.values).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn coefficients_keep_their_norm() {
        let b = basis(0.9);
        let v = vi(&b, 0.3, SMatrixFamily::S1StarPlus, 0.1);
        let mut c0 = CVector::zeros(8);
        c0[0] = C64::new(1.0, 0.0);
        let series = evolve_coefficients(&v, &c0, -30.0, &[-10.0, 0.0, 10.0, 30.0], 1e-10).unwrap();
        for n in series.norms() {
            assert!((n - 1.0).abs() < 1e-9);
        }
        let free = evolve_coefficients(&v.scaled(0.0), &c0, -30.0, &[0.0, 5.0], 1e-10).unwrap();
        assert!(free.values.iter().all(|x| *x == c0));
    }

    #[test]
    fn interaction_route_matches_momentum_route() {
        let cases = [
            (basis(0.9), SMatrixFamily::S1StarPlus),
            (basis(0.9), SMatrixFamily::S1PrimePlus),
            (crossed_basis(0.9), SMatrixFamily::S2Minus),
            (crossed_basis(0.9), SMatrixFamily::S2StarPrimeMinus),
        ];
        for (b, f) in cases {
            let eps = 0.1;
            let v = vi(&b, 3e-3, f, eps);
            let si = smatrix_interaction(&v, SFamily::plain(f), window_for(eps), 1e-10).unwrap();
            let sm = smatrix_momentum(&b, &barrier(&b, 3e-3), SFamily::plain(f), eps, 8).unwrap();
            assert!(linalg::max_abs(&(&si.matrix - &sm.matrix)) < 1e-6, "{f:?}");
            assert!(unitarity_defect(&si) < 1e-8);
            let p = si.provenance.unwrap();
            assert!((p.remote_past_overlap - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn short_window_is_rejected() {
        let b = basis(0.9);
        let v = vi(&b, 1e-3, SMatrixFamily::S1StarPlus, 0.1);
        assert!(matches!(
            smatrix_interaction(&v, SFamily::plain(SMatrixFamily::S1StarPlus), 50.0, 1e-10),
            Err(Error::InsufficientWindow { .. })
        ));
    }
}
