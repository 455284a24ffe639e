use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::WaveBasis;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ZERO};
use crate::propagator::{self, heaviside, Causality, KernelVariant};
use crate::qcalc::Geometry;

use super::potential::{HamiltonianVariant, Potential};

/// The four interacting Green's functions `G₁′₊, G₂₋, G₁*₊, G₂*₋′`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GreenFamily {
    G1PrimePlus,
    G2Minus,
    G1StarPlus,
    G2StarPrimeMinus,
}

impl GreenFamily {
    pub const ALL: [Self; 4] = [
        Self::G1PrimePlus,
        Self::G2Minus,
        Self::G1StarPlus,
        Self::G2StarPrimeMinus,
    ];

    pub fn kernel(self) -> KernelVariant {
        match self {
            Self::G1PrimePlus => KernelVariant::K1_PRIME,
            Self::G2Minus => KernelVariant::K2,
            Self::G1StarPlus => KernelVariant::K1_STAR,
            Self::G2StarPrimeMinus => KernelVariant::K2_STAR_PRIME,
        }
    }

    pub fn geometry(self) -> Geometry {
        self.kernel().label
    }

    pub fn causality(self) -> Causality {
        match self.geometry() {
            Geometry::G1 => Causality::Retarded,
            Geometry::G2 => Causality::Advanced,
        }
    }

    pub fn hamiltonian(self) -> HamiltonianVariant {
        match self {
            Self::G1PrimePlus => HamiltonianVariant::HPrime,
            Self::G2Minus => HamiltonianVariant::HDoublePrime,
            Self::G1StarPlus | Self::G2StarPrimeMinus => HamiltonianVariant::H,
        }
    }
}

impl fmt::Display for GreenFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::G1PrimePlus => "G1'+",
            Self::G2Minus => "G2-",
            Self::G1StarPlus => "G1*+",
            Self::G2StarPrimeMinus => "G2*-'",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GreenOrder {
    Born(usize),
    Exact,
}

/// Interacting Green's function between two time slices.
///
/// `terms` holds the Born orders `0..=N` separately (a single entry for the
/// exact function); `matrix` is their sum. Both are position kernels in the
/// same storage convention as [`propagator::PropagatorKernel`].
#[derive(Debug, Clone)]
pub struct FullGreen {
    basis: Arc<WaveBasis>,
    potential: Potential,
    pub family: GreenFamily,
    pub tilde: bool,
    pub variant: KernelVariant,
    pub causality: Causality,
    pub order: GreenOrder,
    pub t_source: f64,
    pub t_target: f64,
    pub terms: Vec<CMatrix>,
    pub matrix: CMatrix,
    energy_terms: Vec<CMatrix>,
}

impl FullGreen {
    pub fn basis(&self) -> &Arc<WaveBasis> {
        &self.basis
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn gamma(&self) -> CMatrix {
        propagator::gamma(&self.basis, self.variant)
    }

    /// Weighted max-entry distance to another kernel matrix.
    pub fn distance_to(&self, m: &CMatrix) -> f64 {
        linalg::weighted_max_diff(&self.matrix, m, self.basis.lattice().weights())
    }

    /// Generator pieces `(A₀, V)` in the energy basis.
    fn generator(&self) -> (CMatrix, CMatrix) {
        generator(&self.basis, &self.potential, self.family, self.tilde)
            .expect("validated at construction")
    }
}

fn generator(
    basis: &WaveBasis,
    potential: &Potential,
    family: GreenFamily,
    tilde: bool,
) -> Result<(CMatrix, CMatrix)> {
    let scale = family.hamiltonian().scale(basis.ctx());
    let a0 = linalg::real_diag(&basis.energies().iter().map(|e| e * scale).collect::<Vec<_>>());
    let v = potential.energy_matrix(basis)?;
    Ok((a0, if tilde { v.adjoint() } else { v }))
}

/// `exp` of the upper block-bidiagonal matrix with `x` on the diagonal and
/// `y` above it; block `(0, n)` is the order-`n` term of `exp(x + y)`.
fn born_terms(x: &CMatrix, y: &CMatrix, order: usize) -> Vec<CMatrix> {
    let n = x.nrows();
    let size = n * (order + 1);
    let mut m = CMatrix::zeros(size, size);
    for b in 0..=order {
        m.view_mut((b * n, b * n), (n, n)).copy_from(x);
        if b < order {
            m.view_mut((b * n, (b + 1) * n), (n, n)).copy_from(y);
        }
    }
    let e = m.exp();
    (0..=order)
        .map(|b| e.view((0, b * n), (n, n)).into_owned())
        .collect()
}

/// `G = K + (−i)∫ K V G` in the family's causal direction, evaluated to a
/// given Born order or exactly.
///
/// With `tilde` the conjugate partner is built from `V†` and the tilde
/// kernel's time convention.
pub fn full_green(
    basis: &Arc<WaveBasis>,
    potential: &Potential,
    family: GreenFamily,
    tilde: bool,
    order: GreenOrder,
    t_source: f64,
    t_target: f64,
) -> Result<FullGreen> {
    let kernel = family.kernel();
    let variant = if tilde { kernel.conjugate() } else { kernel };
    variant.check_geometry(basis.ctx())?;
    let (a0, v) = generator(basis, potential, family, tilde)?;
    let causality = family.causality();
    let s = if causality == Causality::Retarded { 1.0 } else { -1.0 };
    let (d, tau) = if tilde {
        (t_source - t_target, -1.0)
    } else {
        (t_target - t_source, 1.0)
    };
    let mask = match causality {
        Causality::Advanced => heaviside(-d),
        _ => heaviside(d),
    };
    let c = C64::new(0.0, -s * d * tau);
    let n = basis.len();
    let energy_terms: Vec<CMatrix> = if mask == 0.0 {
        let count = match order {
            GreenOrder::Born(k) => k + 1,
            GreenOrder::Exact => 1,
        };
        vec![CMatrix::from_element(n, n, ZERO); count]
    } else {
        match order {
            GreenOrder::Born(k) => born_terms(&(&a0 * c), &(&v * c), k),
            GreenOrder::Exact => vec![((a0 + v) * c).exp()],
        }
    };
    let u = basis.vectors();
    let terms: Vec<CMatrix> = energy_terms
        .iter()
        .map(|g| propagator::dress(basis, variant, u * g * u.adjoint()))
        .collect();
    let matrix = terms
        .iter()
        .fold(CMatrix::zeros(n, n), |acc, t| acc + t);
    Ok(FullGreen {
        basis: basis.clone(),
        potential: potential.clone(),
        family,
        tilde,
        variant,
        causality,
        order,
        t_source,
        t_target,
        terms,
        matrix,
        energy_terms,
    })
}

/// Off-slice residual of the equation of motion.
///
/// The left form `i∂G = (sH₀ + V)G` and the right form `i∂G = G(sH₀ + V)`
/// must agree order by order: `A₀gₙ + Vgₙ₋₁ = gₙA₀ + gₙ₋₁V`. Returns the
/// largest Frobenius defect in the Jackson-orthonormal representation.
pub fn characteristic_residual(g: &FullGreen) -> f64 {
    let (a0, v) = g.generator();
    let scale = 1.0 + linalg::max_abs(&a0) + linalg::max_abs(&v);
    let t = &g.energy_terms;
    let defect = match g.order {
        GreenOrder::Exact => {
            let a = &a0 + &v;
            linalg::frobenius(&(&a * &t[0] - &t[0] * &a))
        }
        GreenOrder::Born(_) => (0..t.len())
            .map(|k| {
                let mut d = &a0 * &t[k] - &t[k] * &a0;
                if k > 0 {
                    d += &v * &t[k - 1] - &t[k - 1] * &v;
                }
                linalg::frobenius(&d)
            })
            .fold(0.0, f64::max),
    };
    defect / scale
}

/// Distance between `G(t, t)` on the causal side and the free kernel at the
/// same slice, whose jump is the delta source.
pub fn green_slice_defect(g: &FullGreen) -> Result<f64> {
    let t = g.t_source;
    let on = full_green(&g.basis, &g.potential, g.family, g.tilde, g.order, t, t)?;
    let free = propagator::free_propagator(&g.basis, g.variant, t, t)?;
    let free = match g.causality {
        Causality::Advanced => propagator::make_advanced(&free)?,
        _ => propagator::make_retarded(&free)?,
    };
    Ok(on.distance_to(&free.matrix))
}

/// `g2 ∘ g1` for `g1: t_y → t_z`, `g2: t_z → t_x`, truncated at the smaller
/// Born order (Cauchy product of the order-resolved terms).
pub fn compose_green(g1: &FullGreen, g2: &FullGreen) -> Result<FullGreen> {
    if *g1.basis != *g2.basis {
        return Err(Error::BasisMismatch);
    }
    if g1.family != g2.family || g1.tilde != g2.tilde {
        return Err(Error::VariantMismatch(g1.family.to_string(), g2.family.to_string()));
    }
    if (g1.t_target - g2.t_source).abs() > 1e-12 * g1.t_target.abs().max(1.0) {
        return Err(Error::TimeMismatch {
            expected: g1.t_target,
            found: g2.t_source,
        });
    }
    let gamma = g1.gamma();
    let (order, terms, energy_terms) = match (g1.order, g2.order) {
        (GreenOrder::Exact, GreenOrder::Exact) => (
            GreenOrder::Exact,
            vec![&g2.terms[0] * &gamma * &g1.terms[0]],
            vec![&g2.energy_terms[0] * &g1.energy_terms[0]],
        ),
        (GreenOrder::Born(na), GreenOrder::Born(nb)) => {
            let n = na.min(nb);
            let terms = (0..=n)
                .map(|k| {
                    (0..=k).fold(CMatrix::zeros(g1.matrix.nrows(), g1.matrix.ncols()), |acc, a| {
                        acc + &g2.terms[k - a] * &gamma * &g1.terms[a]
                    })
                })
                .collect();
            let energy_terms = (0..=n)
                .map(|k| {
                    (0..=k).fold(CMatrix::zeros(g1.basis.len(), g1.basis.len()), |acc, a| {
                        acc + &g2.energy_terms[k - a] * &g1.energy_terms[a]
                    })
                })
                .collect();
            (GreenOrder::Born(n), terms, energy_terms)
        }
        _ => return Err(Error::invalid("order", "cannot mix Born and exact terms")),
    };
    let n = g1.matrix.nrows();
    let matrix = terms.iter().fold(CMatrix::zeros(n, n), |acc, t| acc + t);
    Ok(FullGreen {
        basis: g1.basis.clone(),
        potential: g1.potential.clone(),
        family: g1.family,
        tilde: g1.tilde,
        variant: g1.variant,
        causality: g1.causality,
        order,
        t_source: g1.t_source,
        t_target: g2.t_target,
        terms,
        matrix,
        energy_terms,
    })
}

/// Entrywise conjugate with transposed slots of an interacting Green's
/// function.
pub fn conjugate_green(g: &FullGreen) -> FullGreen {
    FullGreen {
        basis: g.basis.clone(),
        potential: g.potential.adjoint(),
        family: g.family,
        tilde: !g.tilde,
        variant: g.variant.conjugate(),
        causality: g.causality,
        order: g.order,
        t_source: g.t_target,
        t_target: g.t_source,
        terms: g.terms.iter().map(|t| t.adjoint()).collect(),
        matrix: g.matrix.adjoint(),
        energy_terms: g.energy_terms.iter().map(|t| t.adjoint()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::fixtures::{barrier, basis, crossed_basis};

    fn cases() -> Vec<(Arc<WaveBasis>, GreenFamily)> {
        let (b1, b2) = (basis(0.9), crossed_basis(0.9));
        GreenFamily::ALL
            .iter()
            .map(|&f| {
                let b = if f.geometry() == Geometry::G1 { &b1 } else { &b2 };
                (b.clone(), f)
            })
            .collect()
    }

    fn forward(f: GreenFamily, a: f64, b: f64) -> (f64, f64) {
        if f.causality() == Causality::Retarded {
            (a, b)
        } else {
            (b, a)
        }
    }

    #[test]
    fn zero_potential_reduces_to_free_kernel_at_scaled_time() {
        for (b, f) in cases() {
            let v = barrier(&b, 0.0);
            let scale = f.hamiltonian().scale(b.ctx());
            for tilde in [false, true] {
                let (ts, tt) = forward(f, 0.1, 0.35);
                let (ts, tt) = if tilde { (tt, ts) } else { (ts, tt) };
                let g = full_green(&b, &v, f, tilde, GreenOrder::Exact, ts, tt).unwrap();
                let variant = if tilde { f.kernel().conjugate() } else { f.kernel() };
                let free = propagator::free_propagator(&b, variant, scale * ts, scale * tt).unwrap();
                let free = match f.causality() {
                    Causality::Advanced => propagator::make_advanced(&free).unwrap(),
                    _ => propagator::make_retarded(&free).unwrap(),
                };
                assert!(linalg::max_abs(&free.matrix) > 0.0);
                assert!(g.distance_to(&free.matrix) < 1e-12, "{f} {tilde}");
            }
        }
    }

    #[test]
    fn equation_of_motion_and_slice() {
        for (b, f) in cases() {
            let v = barrier(&b, 0.5);
            let (ts, tt) = forward(f, -0.2, 0.3);
            for order in [GreenOrder::Born(3), GreenOrder::Exact] {
                let g = full_green(&b, &v, f, false, order, ts, tt).unwrap();
                assert!(characteristic_residual(&g) < 1e-10, "{f} {order:?}");
                assert!(green_slice_defect(&g).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn composition_holds_at_matched_order() {
        for (b, f) in cases() {
            let v = barrier(&b, 0.5);
            let (ty, tz, tx) = if f.causality() == Causality::Retarded {
                (-0.3, 0.1, 0.4)
            } else {
                (0.4, 0.1, -0.3)
            };
            for order in [GreenOrder::Born(3), GreenOrder::Exact] {
                let g1 = full_green(&b, &v, f, false, order, ty, tz).unwrap();
                let g2 = full_green(&b, &v, f, false, order, tz, tx).unwrap();
                let direct = full_green(&b, &v, f, false, order, ty, tx).unwrap();
                let composed = compose_green(&g1, &g2).unwrap();
                assert!(direct.distance_to(&composed.matrix) < 1e-8, "{f} {order:?}");
            }
        }
    }

    #[test]
    fn conjugate_equals_tilde_build() {
        for (b, f) in cases() {
            let v = barrier(&b, 0.5);
            let (ts, tt) = forward(f, 0.0, 0.45);
            for order in [GreenOrder::Born(2), GreenOrder::Exact] {
                let g = full_green(&b, &v, f, false, order, ts, tt).unwrap();
                let c = conjugate_green(&g);
                let t = full_green(&b, &v, f, true, order, c.t_source, c.t_target).unwrap();
                assert!(t.distance_to(&c.matrix) < 1e-10, "{f} {order:?}");
            }
        }
    }

    #[test]
    fn born_orders_approach_exact() {
        let b = basis(0.9);
        let v = barrier(&b, 0.5);
        let f = GreenFamily::G1StarPlus;
        let exact = full_green(&b, &v, f, false, GreenOrder::Exact, 0.0, 0.5).unwrap();
        let errs: Vec<f64> = [1, 3, 5]
            .iter()
            .map(|&n| {
                exact.distance_to(&full_green(&b, &v, f, false, GreenOrder::Born(n), 0.0, 0.5).unwrap().matrix)
            })
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2] && errs[2] < 1e-6, "{errs:?}");
    }
}
