use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcalc::{Geometry, QContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelFamily {
    Plain,
    Star,
}

/// One of the four free-particle kernels `K₁′, K₂, K₁*, K₂*′` or a tilde
/// partner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KernelVariant {
    pub family: KernelFamily,
    pub label: Geometry,
    pub primed: bool,
    pub tilde: bool,
}

impl KernelVariant {
    pub const K1_PRIME: Self = Self::new(KernelFamily::Plain, Geometry::G1, true);
    pub const K2: Self = Self::new(KernelFamily::Plain, Geometry::G2, false);
    pub const K1_STAR: Self = Self::new(KernelFamily::Star, Geometry::G1, false);
    pub const K2_STAR_PRIME: Self = Self::new(KernelFamily::Star, Geometry::G2, true);

    pub const DISPLAYED: [Self; 4] = [Self::K1_PRIME, Self::K2, Self::K1_STAR, Self::K2_STAR_PRIME];

    const fn new(family: KernelFamily, label: Geometry, primed: bool) -> Self {
        Self {
            family,
            label,
            primed,
            tilde: false,
        }
    }

    /// The displayed kernels of a geometry, followed by their tilde partners.
    pub fn all_for(geometry: Geometry) -> Vec<Self> {
        let base: Vec<Self> = Self::DISPLAYED
            .into_iter()
            .filter(|v| v.label == geometry)
            .collect();
        base.iter().copied().chain(base.iter().map(|v| v.conjugate())).collect()
    }

    pub fn parse(name: &str) -> Result<Self> {
        let (tilde, rest) = match name.strip_prefix('~') {
            Some(r) => (true, r),
            None => (false, name),
        };
        let base = Self::DISPLAYED
            .into_iter()
            .find(|v| v.to_string() == rest)
            .ok_or_else(|| Error::invalid("variant", format!("unknown kernel `{name}`")))?;
        Ok(if tilde { base.conjugate() } else { base })
    }

    /// `overline{K}` is the tilde partner with the prime toggled.
    pub fn conjugate(self) -> Self {
        Self {
            primed: !self.primed,
            tilde: !self.tilde,
            ..self
        }
    }

    /// `K₁′ ↔ K₂`, `K₁* ↔ K₂*′`.
    pub fn crossed(self) -> Self {
        Self {
            label: self.label.crossed(),
            primed: !self.primed,
            ..self
        }
    }

    /// The non-tilde kernel whose adjoint this variant is (itself if not tilde).
    pub fn base(self) -> Self {
        if self.tilde {
            self.conjugate()
        } else {
            self
        }
    }

    /// `+1` for the positive-energy kernels `K₁′, K₁*`, `-1` for `K₂, K₂*′`;
    /// a tilde partner inherits the sign of the kernel it conjugates.
    pub fn energy_sign(self) -> f64 {
        let b = self.base();
        let positive = match b.family {
            KernelFamily::Plain => b.primed,
            KernelFamily::Star => !b.primed,
        };
        if positive {
            1.0
        } else {
            -1.0
        }
    }

    /// Exponent `m` of the argument dilation `κ^m` carried by starred kernels.
    pub fn dilation(self) -> Option<i32> {
        match self.family {
            KernelFamily::Plain => None,
            KernelFamily::Star => Some(match self.label {
                Geometry::G1 => 1,
                Geometry::G2 => -1,
            }),
        }
    }

    pub fn check_geometry(self, ctx: &QContext) -> Result<()> {
        if self.label != ctx.geometry || !Self::DISPLAYED.contains(&self.base()) {
            return Err(Error::VariantGeometryMismatch {
                variant: self.to_string(),
                geometry: format!("{:?}", ctx.geometry),
            });
        }
        Ok(())
    }

    /// Time-argument bookkeeping of the source plane wave as written in the
    /// kernel definitions.
    pub fn time_scaling(self, ctx: &QContext) -> TimeScaling {
        let k = ctx.kappa;
        let qz = ctx.q_zeta();
        let b = self.base();
        let (literal, label) = match (b.family, b.label) {
            (KernelFamily::Plain, Geometry::G1) => (-qz / (k * k), k * k),
            (KernelFamily::Plain, Geometry::G2) => (-k * k / qz, 1.0 / (k * k)),
            (KernelFamily::Star, Geometry::G1) => (-1.0 / qz, 1.0),
            (KernelFamily::Star, Geometry::G2) => (-qz, 1.0),
        };
        TimeScaling {
            literal_source: literal,
            label_energy: label,
            compensation: -1.0 / (literal * label),
        }
    }
}

/// Source-slot time scaling of a kernel.
///
/// `literal_source` is the factor on `t_y` (e.g. `-q^ζ κ⁻²` for `K₁′`),
/// `label_energy` the energy factor of the momentum label (`κ²` for `u_{κp}`),
/// and `compensation` the free-energy scale that the finite model folds into
/// the spectrum so the net source phase is the conjugate of the target phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeScaling {
    pub literal_source: f64,
    pub label_energy: f64,
    pub compensation: f64,
}

impl TimeScaling {
    /// `-literal · label · compensation`, equal to 1 for every variant.
    pub fn net(&self) -> f64 {
        -self.literal_source * self.label_energy * self.compensation
    }
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.base();
        let body = match (b.family, b.label, b.primed) {
            (KernelFamily::Plain, Geometry::G1, true) => "K1'",
            (KernelFamily::Plain, Geometry::G2, false) => "K2",
            (KernelFamily::Star, Geometry::G1, false) => "K1*",
            (KernelFamily::Star, Geometry::G2, true) => "K2*'",
            _ => "K?",
        };
        if self.tilde {
            write!(f, "~{body}")
        } else {
            f.write_str(body)
        }
    }
}
