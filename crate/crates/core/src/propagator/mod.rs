//! Free-particle propagators, causal wrapping, composition, conjugation and
//! Schrödinger-equation checks.
//!
//! Matrices are stored as `[target, source]` and act with the Jackson
//! weights: `(K f)(x) = Σ_y K(x, y) w(y) f(y)`. Starred kernels carry the
//! argument dilation `f(κ^m y)` of their source slot as the exact cyclic
//! dilation of the lattice, tilde partners carry it on the target slot.

mod inhomogeneous;
mod variant;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use inhomogeneous::{solve_inhomogeneous, TimeSource};
pub use variant::{KernelFamily, KernelVariant, TimeScaling};

use crate::basis::{delta_kernel, WaveBasis};
use crate::error::{Error, Result};
use crate::export;
use crate::linalg::{self, CMatrix, C64, I, ZERO};
use crate::qcalc::{LatticeFunction, Orientation, QContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Causality {
    None,
    Retarded,
    Advanced,
}

/// `θ(t) = 1` for `t ≥ 0`.
pub fn heaviside(t: f64) -> f64 {
    if t >= 0.0 {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone)]
pub struct PropagatorKernel {
    basis: Arc<WaveBasis>,
    pub variant: KernelVariant,
    pub t_source: f64,
    pub t_target: f64,
    pub causality: Causality,
    pub orientation: Orientation,
    pub matrix: CMatrix,
}

impl PropagatorKernel {
    pub fn basis(&self) -> &Arc<WaveBasis> {
        &self.basis
    }

    pub fn ctx(&self) -> &QContext {
        self.basis.ctx()
    }

    /// Sign `s` of the exponent `e^{-i s E Δ}`: the variant's energy sign for
    /// the bare kernel, `+1` once retarded, `-1` once advanced (the retarded
    /// negative-energy kernels are defined on reflected times).
    pub fn phase_sign(&self) -> f64 {
        phase_sign(self.variant, self.causality)
    }

    /// `Δ = t_target − t_source`, or `t_source − t_target` for tilde kernels.
    pub fn delta_eff(&self) -> f64 {
        delta_eff(self.variant, self.t_source, self.t_target)
    }

    /// `κ^m` for starred kernels, 1 otherwise.
    pub fn prefactor(&self) -> f64 {
        prefactor(self.variant, self.ctx())
    }

    /// Metric that turns [`PropagatorKernel::matrix`] into the operator it
    /// represents: `W`, `W C_m` for starred, `C_mᵀ W` for starred tilde kernels.
    pub fn gamma(&self) -> CMatrix {
        gamma(&self.basis, self.variant)
    }

    /// The kernel acting on a wave function, `K Γ f`.
    pub fn apply(&self, f: &LatticeFunction) -> Result<LatticeFunction> {
        if **f.lattice() != **self.basis.lattice() {
            return Err(Error::LatticeMismatch);
        }
        let v = &self.matrix * self.gamma() * f.to_vector();
        LatticeFunction::from_vector(self.basis.lattice().clone(), &v, self.t_target)
    }

    /// The dilated delta kernel `L Δ R` of this variant, without `κ^m`.
    pub fn variant_delta(&self) -> CMatrix {
        dress(&self.basis, self.variant, delta_kernel(&self.basis)) / C64::new(self.prefactor(), 0.0)
    }

    /// `±i κ^m / vol`: coefficient of the delta source at the slice.
    pub fn delta_prefactor(&self) -> C64 {
        let sign = match self.causality {
            Causality::Advanced => -1.0,
            _ => 1.0,
        };
        I * (sign * self.prefactor() / self.basis.vol())
    }

    /// Largest weighted entrywise distance to another kernel on the same basis.
    pub fn distance(&self, other: &PropagatorKernel) -> f64 {
        linalg::weighted_max_diff(&self.matrix, &other.matrix, self.basis.lattice().weights())
    }

    pub fn distance_to(&self, m: &CMatrix) -> f64 {
        linalg::weighted_max_diff(&self.matrix, m, self.basis.lattice().weights())
    }
}

fn phase_sign(variant: KernelVariant, causality: Causality) -> f64 {
    match causality {
        Causality::None => variant.energy_sign(),
        Causality::Retarded => 1.0,
        Causality::Advanced => -1.0,
    }
}

fn delta_eff(variant: KernelVariant, t_source: f64, t_target: f64) -> f64 {
    if variant.tilde {
        t_source - t_target
    } else {
        t_target - t_source
    }
}

fn prefactor(variant: KernelVariant, ctx: &QContext) -> f64 {
    variant.dilation().map_or(1.0, |m| ctx.kappa.powi(m))
}

pub(crate) fn gamma(basis: &WaveBasis, variant: KernelVariant) -> CMatrix {
    let w = basis.lattice().weight_matrix();
    match variant.dilation() {
        None => w,
        Some(m) => {
            let c = basis.lattice().cyclic_dilation(m);
            if variant.tilde {
                c.transpose() * w
            } else {
                w * c
            }
        }
    }
}

/// `pre · L · core · R` with the dilation on the variant's slot.
pub(crate) fn dress(basis: &WaveBasis, variant: KernelVariant, core: CMatrix) -> CMatrix {
    match variant.dilation() {
        None => core,
        Some(m) => {
            let pre = C64::new(basis.ctx().kappa.powi(m), 0.0);
            let c = basis.lattice().cyclic_dilation(m);
            if variant.tilde {
                c * core * pre
            } else {
                core * c.transpose() * pre
            }
        }
    }
}

/// Per-mode factors `mask · e^{-i s E_p Δ τ}` (`τ = -1` for tilde kernels).
fn spectral_factors(
    basis: &WaveBasis,
    variant: KernelVariant,
    causality: Causality,
    t_source: f64,
    t_target: f64,
) -> Vec<C64> {
    let d = delta_eff(variant, t_source, t_target);
    let mask = match causality {
        Causality::None => 1.0,
        Causality::Retarded => heaviside(d),
        Causality::Advanced => heaviside(-d),
    };
    if mask == 0.0 {
        return vec![ZERO; basis.len()];
    }
    let s = phase_sign(variant, causality);
    let tau = if variant.tilde { -1.0 } else { 1.0 };
    basis
        .energies()
        .iter()
        .map(|&e| (-I * (s * e * d * tau)).exp() * mask)
        .collect()
}

fn build(
    basis: &Arc<WaveBasis>,
    variant: KernelVariant,
    causality: Causality,
    t_source: f64,
    t_target: f64,
    orientation: Orientation,
) -> PropagatorKernel {
    let factors = spectral_factors(basis, variant, causality, t_source, t_target);
    let core = basis.spectral_kernel(&factors);
    PropagatorKernel {
        basis: basis.clone(),
        variant,
        t_source,
        t_target,
        causality,
        orientation,
        matrix: dress(basis, variant, core),
    }
}

/// Free propagator of a variant between two time slices.
pub fn free_propagator(
    basis: &Arc<WaveBasis>,
    variant: KernelVariant,
    t_source: f64,
    t_target: f64,
) -> Result<PropagatorKernel> {
    variant.check_geometry(basis.ctx())?;
    let orientation = if variant.tilde {
        basis.ctx().orientation.flipped()
    } else {
        basis.ctx().orientation
    };
    Ok(build(basis, variant, Causality::None, t_source, t_target, orientation))
}

fn wrap(kernel: &PropagatorKernel, causality: Causality) -> Result<PropagatorKernel> {
    if kernel.causality != Causality::None {
        return Err(Error::AlreadyCausal(format!("{:?}", kernel.causality)));
    }
    Ok(build(
        &kernel.basis,
        kernel.variant,
        causality,
        kernel.t_source,
        kernel.t_target,
        kernel.orientation,
    ))
}

/// `θ(t_target − t_source)` times the kernel (for tilde partners the slots
/// swap roles).
pub fn make_retarded(kernel: &PropagatorKernel) -> Result<PropagatorKernel> {
    wrap(kernel, Causality::Retarded)
}

/// Time reflection of the retarded kernel, `K₋(t_s, t_t) = K₊(−t_s, −t_t)`.
pub fn make_advanced(kernel: &PropagatorKernel) -> Result<PropagatorKernel> {
    wrap(kernel, Causality::Advanced)
}

pub fn retarded(
    basis: &Arc<WaveBasis>,
    variant: KernelVariant,
    t_source: f64,
    t_target: f64,
) -> Result<PropagatorKernel> {
    make_retarded(&free_propagator(basis, variant, t_source, t_target)?)
}

pub fn advanced(
    basis: &Arc<WaveBasis>,
    variant: KernelVariant,
    t_source: f64,
    t_target: f64,
) -> Result<PropagatorKernel> {
    make_advanced(&free_propagator(basis, variant, t_source, t_target)?)
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// `k2 ∘ k1` for `k1: t0 → t1`, `k2: t1 → t2`, i.e. `k2 Γ k1`.
pub fn compose(k1: &PropagatorKernel, k2: &PropagatorKernel) -> Result<PropagatorKernel> {
    if !Arc::ptr_eq(&k1.basis, &k2.basis) && *k1.basis != *k2.basis {
        return Err(Error::BasisMismatch);
    }
    if k1.variant != k2.variant || k1.causality != k2.causality {
        return Err(Error::VariantMismatch(
            format!("{} {:?}", k1.variant, k1.causality),
            format!("{} {:?}", k2.variant, k2.causality),
        ));
    }
    if !same_time(k1.t_target, k2.t_source) {
        return Err(Error::TimeMismatch {
            expected: k1.t_target,
            found: k2.t_source,
        });
    }
    Ok(PropagatorKernel {
        basis: k1.basis.clone(),
        variant: k1.variant,
        t_source: k1.t_source,
        t_target: k2.t_target,
        causality: k1.causality,
        orientation: k1.orientation,
        matrix: &k2.matrix * k1.gamma() * &k1.matrix,
    })
}

/// `‖i ∂_t K − s H₀ K‖_F` in the Jackson-orthonormal representation, with the
/// time derivative taken analytically on the target slot (source slot and
/// `K H₀ᵀ` for tilde kernels).
pub fn schrodinger_residual(kernel: &PropagatorKernel) -> Result<f64> {
    if kernel.causality != Causality::None && kernel.t_source == kernel.t_target {
        return Err(Error::OnSourceSlice(kernel.t_source));
    }
    let b = &kernel.basis;
    let s = kernel.phase_sign();
    let factors = spectral_factors(b, kernel.variant, kernel.causality, kernel.t_source, kernel.t_target);
    let (lhs, rhs) = if kernel.variant.tilde {
        let d: Vec<C64> = factors
            .iter()
            .zip(b.energies())
            .map(|(&f, &e)| f * (-s * e))
            .collect();
        let lhs = dress(b, kernel.variant, b.spectral_kernel(&d));
        let rhs = &kernel.matrix * b.hamiltonian().transpose() * C64::new(-s, 0.0);
        (lhs, rhs)
    } else {
        let d: Vec<C64> = factors
            .iter()
            .zip(b.energies())
            .map(|(&f, &e)| f * (s * e))
            .collect();
        let lhs = dress(b, kernel.variant, b.spectral_kernel(&d));
        let rhs = b.hamiltonian() * &kernel.matrix * C64::new(s, 0.0);
        (lhs, rhs)
    };
    Ok(linalg::frobenius(&linalg::weighted(&(lhs - rhs), b.lattice().weights())))
}

/// Defect of the delta source at the slice: `i·(K(t⁺) − K(t⁻))` against the
/// stored prefactor times the variant delta kernel.
pub fn slice_jump_defect(kernel: &PropagatorKernel) -> Result<f64> {
    if kernel.causality == Causality::None {
        return Err(Error::invalid("causality", "the bare kernel has no jump"));
    }
    let t = kernel.t_source;
    let on = build(&kernel.basis, kernel.variant, kernel.causality, t, t, kernel.orientation);
    let expected = on_slice_expected(&on);
    let jump = match kernel.causality {
        Causality::Advanced => -on.matrix,
        _ => on.matrix,
    };
    Ok(linalg::weighted_max_diff(
        &(jump * I),
        &expected,
        kernel.basis.lattice().weights(),
    ))
}

fn on_slice_expected(k: &PropagatorKernel) -> CMatrix {
    k.variant_delta() * k.delta_prefactor()
}

/// Entrywise conjugate with source/target transposed: the tilde partner with
/// toggled prime, swapped time slots and flipped conjugation orientation.
pub fn conjugate_kernel(kernel: &PropagatorKernel) -> PropagatorKernel {
    PropagatorKernel {
        basis: kernel.basis.clone(),
        variant: kernel.variant.conjugate(),
        t_source: kernel.t_target,
        t_target: kernel.t_source,
        causality: kernel.causality,
        orientation: kernel.orientation.flipped(),
        matrix: kernel.matrix.adjoint(),
    }
}

/// Image of a kernel under the crossing substitutions: relabelled variant,
/// times rescaled by `κ⁻¹`, matrix `κ P K Pᵀ` on the crossed lattice (and
/// entrywise conjugated for bare kernels, whose energy direction flips).
pub fn crossing_transform_kernel(
    kernel: &PropagatorKernel,
    crossed_basis: &Arc<WaveBasis>,
    perm: &[usize],
) -> Result<PropagatorKernel> {
    let ctx = kernel.ctx();
    if *crossed_basis.ctx() != ctx.crossing_transform() {
        return Err(Error::invalid("crossed_basis", "not built in the crossed context"));
    }
    let k = ctx.kappa;
    let n = kernel.matrix.nrows();
    let mut matrix = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let z = kernel.matrix[(i, j)] * k;
            matrix[(perm[i], perm[j])] = if kernel.causality == Causality::None {
                z.conj()
            } else {
                z
            };
        }
    }
    Ok(PropagatorKernel {
        basis: crossed_basis.clone(),
        variant: kernel.variant.crossed(),
        t_source: kernel.t_source / k,
        t_target: kernel.t_target / k,
        causality: kernel.causality,
        orientation: kernel.orientation.flipped(),
        matrix,
    })
}

/// Header of the kernel dump format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelHeader {
    pub variant: String,
    pub causality: Causality,
    pub t_source: f64,
    pub t_target: f64,
    pub orientation: Orientation,
    pub ctx: QContext,
    pub x0: f64,
    pub j_min: i32,
    pub j_max: i32,
    pub mass: f64,
}

impl PropagatorKernel {
    /// JSON header line plus one CSV matrix block.
    pub fn to_dump(&self) -> String {
        let (j_min, j_max) = self.basis.lattice().j_range();
        let header = KernelHeader {
            variant: self.variant.to_string(),
            causality: self.causality,
            t_source: self.t_source,
            t_target: self.t_target,
            orientation: self.orientation,
            ctx: *self.ctx(),
            x0: self.basis.lattice().x0(),
            j_min,
            j_max,
            mass: self.basis.mass(),
        };
        export::header_line(&header) + &export::matrix_block(&self.matrix)
    }

    /// Reads a dump back onto a basis built with the same parameters.
    pub fn from_dump(text: &str, basis: &Arc<WaveBasis>) -> Result<Self> {
        let (header, body): (KernelHeader, _) = export::split_header(text)?;
        let lat = basis.lattice();
        if header.ctx != *basis.ctx()
            || header.x0 != lat.x0()
            || (header.j_min, header.j_max) != lat.j_range()
            || header.mass != basis.mass()
        {
            return Err(Error::BasisMismatch);
        }
        let matrix = export::parse_matrix_block(body)?;
        if matrix.nrows() != lat.len() || matrix.ncols() != lat.len() {
            return Err(Error::Parse("matrix shape does not match the lattice".into()));
        }
        Ok(Self {
            basis: basis.clone(),
            variant: KernelVariant::parse(&header.variant)?,
            t_source: header.t_source,
            t_target: header.t_target,
            causality: header.causality,
            orientation: header.orientation,
            matrix,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_hamiltonian_basis;
    use crate::qcalc::{Geometry, QLattice};

    fn basis() -> Arc<WaveBasis> {
        let ctx = QContext::braided_line(0.9).unwrap();
        Arc::new(build_hamiltonian_basis(Arc::new(QLattice::with_defaults(&ctx).unwrap()), 1.0).unwrap())
    }

    #[test]
    fn equal_times_give_the_delta_kernel() {
        let b = basis();
        let k = free_propagator(&b, KernelVariant::K1_PRIME, 0.4, 0.4).unwrap();
        assert!(k.distance_to(&delta_kernel(&b)) < 1e-12);
        let w = b.lattice().weight_matrix();
        assert!(linalg::max_abs(&(&k.matrix * w - linalg::identity(50))) < 1e-12);
    }

    #[test]
    fn retarded_support_and_reflection() {
        let b = basis();
        let r = retarded(&b, KernelVariant::K1_STAR, 1.0, 0.5).unwrap();
        assert_eq!(linalg::max_abs(&r.matrix), 0.0);
        let a = advanced(&b, KernelVariant::K1_STAR, 0.7, 0.2).unwrap();
        let reflected = retarded(&b, KernelVariant::K1_STAR, -0.7, -0.2).unwrap();
        assert!(a.distance(&reflected) < 1e-12);
        assert!(linalg::max_abs(&retarded(&b, KernelVariant::K1_STAR, 0.3, 0.3).unwrap().matrix) > 0.0);
        assert!(linalg::max_abs(&advanced(&b, KernelVariant::K1_STAR, 0.3, 0.3).unwrap().matrix) > 0.0);
        assert!(matches!(make_retarded(&r), Err(Error::AlreadyCausal(_))));
    }

    #[test]
    fn composition_is_exact_for_starred_kernels() {
        let b = basis();
        let v = KernelVariant::K1_STAR;
        let k01 = retarded(&b, v, 0.1, 0.35).unwrap();
        let k12 = retarded(&b, v, 0.35, 0.9).unwrap();
        let k02 = retarded(&b, v, 0.1, 0.9).unwrap();
        assert!(compose(&k01, &k12).unwrap().distance(&k02) < 1e-12);
        let bad = retarded(&b, v, 0.4, 0.9).unwrap();
        assert!(matches!(compose(&k01, &bad), Err(Error::TimeMismatch { .. })));
    }

    #[test]
    fn norm_is_preserved() {
        let b = basis();
        let f = LatticeFunction::from_fn(b.lattice().clone(), 0.0, |x| C64::new((-x * x).exp(), x));
        for v in KernelVariant::all_for(crate::qcalc::Geometry::G1).into_iter().filter(|v| !v.tilde) {
            let k = free_propagator(&b, v, 0.0, 1.3).unwrap();
            let g = k.apply(&f).unwrap();
            assert!((g.norm() - f.norm()).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn conjugate_matches_tilde_partner() {
        let b = basis();
        for v in [KernelVariant::K1_PRIME, KernelVariant::K1_STAR] {
            let k = retarded(&b, v, 0.2, 0.8).unwrap();
            let c = conjugate_kernel(&k);
            let t = retarded(&b, v.conjugate(), 0.8, 0.2).unwrap();
            assert!(c.distance(&t) < 1e-12);
            let cc = conjugate_kernel(&c);
            assert_eq!(cc.matrix, k.matrix);
            assert_eq!(cc.variant, k.variant);
        }
    }

    #[test]
    fn residual_and_jump() {
        let b = basis();
        for v in KernelVariant::all_for(crate::qcalc::Geometry::G1) {
            let (ts, tt) = if v.tilde { (0.7, 0.2) } else { (0.2, 0.7) };
            let r = retarded(&b, v, ts, tt).unwrap();
            assert!(schrodinger_residual(&r).unwrap() < 1e-10, "{v}");
            let a = advanced(&b, v, tt, ts).unwrap();
            assert!(schrodinger_residual(&a).unwrap() < 1e-10, "{v}");
            assert!(slice_jump_defect(&r).unwrap() < 1e-10);
            assert!(slice_jump_defect(&a).unwrap() < 1e-10);
        }
        let on = retarded(&b, KernelVariant::K1_PRIME, 0.5, 0.5).unwrap();
        assert!(matches!(schrodinger_residual(&on), Err(Error::OnSourceSlice(_))));
    }

    #[test]
    fn dump_roundtrip() {
        let b = basis();
        let k = retarded(&b, KernelVariant::K1_STAR, 0.0, 0.25).unwrap();
        let back = PropagatorKernel::from_dump(&k.to_dump(), &b).unwrap();
        assert_eq!(back.matrix, k.matrix);
        assert_eq!(back.variant, k.variant);
        assert_eq!(back.t_target, 0.25);
    }

    #[test]
    fn crossing_maps_geometry_one_onto_two() {
        let b1 = basis();
        let (lat2, perm) = b1.lattice().crossed().unwrap();
        let b2 = Arc::new(build_hamiltonian_basis(Arc::new(lat2), 1.0).unwrap());
        let k = b1.ctx().kappa;
        for v in KernelVariant::all_for(Geometry::G1) {
            for causality in [Causality::None, Causality::Retarded, Causality::Advanced] {
                let (ts, tt) = if v.tilde == (causality == Causality::Advanced) { (0.1, 0.4) } else { (0.4, 0.1) };
                let bare = free_propagator(&b1, v, ts, tt).unwrap();
                let k1 = match causality {
                    Causality::None => bare,
                    Causality::Retarded => make_retarded(&bare).unwrap(),
                    Causality::Advanced => make_advanced(&bare).unwrap(),
                };
                let image = crossing_transform_kernel(&k1, &b2, &perm).unwrap();
                let bare2 = free_propagator(&b2, v.crossed(), ts / k, tt / k).unwrap();
                let k2 = match causality {
                    Causality::None => bare2,
                    Causality::Retarded => make_retarded(&bare2).unwrap(),
                    Causality::Advanced => make_advanced(&bare2).unwrap(),
                };
                assert!(linalg::max_abs(&k2.matrix) > 0.0);
                assert!(image.distance(&k2) < 1e-10, "{v} {causality:?} {}", image.distance(&k2));
            }
        }
    }
}
