use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::WaveBasis;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::qcalc::{QContext, QLattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialShape {
    GaussianWell,
    Barrier,
    Point,
    /// `-i` times a gaussian: a non-Hermitian control.
    Absorptive,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialSpec {
    pub shape: PotentialShape,
    pub strength: f64,
    pub width: f64,
    pub center: f64,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self {
            shape: PotentialShape::Barrier,
            strength: 3e-3,
            width: 0.5,
            center: 0.0,
        }
    }
}

/// Multiplication operator `V(x)` with adiabatic switching `e^{-ε|t|}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    lattice: Arc<QLattice>,
    pub values: Vec<C64>,
    pub epsilon: f64,
    pub strength: f64,
}

impl Potential {
    pub fn new(lattice: Arc<QLattice>, values: Vec<C64>, epsilon: f64) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::invalid("potential", "one value per lattice point"));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::invalid("potential.epsilon", "must be non-negative"));
        }
        let strength = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok(Self {
            lattice,
            values,
            epsilon,
            strength,
        })
    }

    pub fn from_spec(lattice: Arc<QLattice>, spec: &PotentialSpec, epsilon: f64) -> Result<Self> {
        if !spec.strength.is_finite() {
            return Err(Error::invalid("potential.strength", "must be finite"));
        }
        if !(spec.width.is_finite() && spec.width > 0.0) {
            return Err(Error::invalid("potential.width", "must be positive"));
        }
        let gauss = |x: f64| (-(x - spec.center).powi(2) / (2.0 * spec.width * spec.width)).exp();
        let s = spec.strength;
        let values: Vec<C64> = match spec.shape {
            PotentialShape::GaussianWell => lattice.points().iter().map(|&x| C64::new(-s * gauss(x), 0.0)).collect(),
            PotentialShape::Barrier => lattice.points().iter().map(|&x| C64::new(s * gauss(x), 0.0)).collect(),
            PotentialShape::Absorptive => lattice.points().iter().map(|&x| C64::new(0.0, -s * gauss(x))).collect(),
            PotentialShape::Zero => vec![C64::new(0.0, 0.0); lattice.len()],
            PotentialShape::Point => {
                let nearest = (0..lattice.len())
                    .min_by(|&a, &b| {
                        (lattice.points()[a] - spec.center)
                            .abs()
                            .total_cmp(&(lattice.points()[b] - spec.center).abs())
                    })
                    .expect("lattice is non-empty");
                let mut v = vec![C64::new(0.0, 0.0); lattice.len()];
                // Jackson delta at the nearest point, mirrored to keep parity
                for i in [nearest, lattice.mirror(nearest)] {
                    v[i] = C64::new(s / lattice.weights()[i], 0.0);
                }
                v
            }
        };
        let mut pot = Self::new(lattice, values, epsilon)?;
        pot.strength = s;
        Ok(pot)
    }

    pub fn lattice(&self) -> &Arc<QLattice> {
        &self.lattice
    }

    pub fn ctx(&self) -> &QContext {
        self.lattice.ctx()
    }

    pub fn is_hermitian(&self) -> bool {
        self.values.iter().all(|z| z.im == 0.0)
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            lattice: self.lattice.clone(),
            values: self.values.iter().map(|z| z * lambda).collect(),
            epsilon: self.epsilon,
            strength: self.strength * lambda,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            values: self.values.iter().map(|z| z.conj()).collect(),
            ..self.clone()
        }
    }

    /// The same function of `x` sampled on the crossed lattice.
    pub fn crossed(&self, lattice: Arc<QLattice>, perm: &[usize]) -> Result<Self> {
        if lattice.len() != self.lattice.len() || perm.len() != lattice.len() {
            return Err(Error::LatticeMismatch);
        }
        let mut values = vec![C64::new(0.0, 0.0); lattice.len()];
        for (i, &k) in perm.iter().enumerate() {
            values[k] = self.values[i];
        }
        Ok(Self {
            lattice,
            values,
            epsilon: self.epsilon,
            strength: self.strength,
        })
    }

    /// `⟨u_p, V u_p'⟩` over the full basis.
    pub fn energy_matrix(&self, basis: &WaveBasis) -> Result<CMatrix> {
        if **basis.lattice() != *self.lattice {
            return Err(Error::LatticeMismatch);
        }
        Ok(basis.operator_matrix(&self.values))
    }
}

/// Free-energy scale of the Hamiltonian versions `H = H₀ + V`,
/// `H′ = q^{-ζ}H₀ + V`, `H″ = q^{ζ}H₀ + V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HamiltonianVariant {
    H,
    HPrime,
    HDoublePrime,
}

impl HamiltonianVariant {
    pub fn scale(self, ctx: &QContext) -> f64 {
        match self {
            HamiltonianVariant::H => 1.0,
            HamiltonianVariant::HPrime => ctx.q.powi(-ctx.zeta),
            HamiltonianVariant::HDoublePrime => ctx.q.powi(ctx.zeta),
        }
    }
}

/// The lowest `n` modes of a basis with the potential projected onto them.
///
/// Energies are already multiplied by the Hamiltonian-variant scale.
#[derive(Debug, Clone)]
pub struct ChannelSpace {
    basis: Arc<WaveBasis>,
    pub variant: HamiltonianVariant,
    pub scale: f64,
    pub energies: Vec<f64>,
    pub potential: CMatrix,
}

impl ChannelSpace {
    pub fn new(
        basis: &Arc<WaveBasis>,
        potential: &Potential,
        n_channels: usize,
        variant: HamiltonianVariant,
    ) -> Result<Self> {
        if n_channels == 0 || n_channels > basis.len() {
            return Err(Error::invalid(
                "scattering.n_channels",
                format!("must lie in 1..={}", basis.len()),
            ));
        }
        let full = potential.energy_matrix(basis)?;
        let scale = variant.scale(basis.ctx());
        Ok(Self {
            basis: basis.clone(),
            variant,
            scale,
            energies: basis.energies()[..n_channels].iter().map(|e| e * scale).collect(),
            potential: full.view((0, 0), (n_channels, n_channels)).into_owned(),
        })
    }

    pub fn basis(&self) -> &Arc<WaveBasis> {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn with_potential(&self, potential: CMatrix) -> Self {
        Self {
            potential,
            ..self.clone()
        }
    }
}
