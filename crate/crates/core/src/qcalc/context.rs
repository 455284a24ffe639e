use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The two braided geometries related by crossing symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Geometry {
    G1,
    G2,
}

impl Geometry {
    pub fn label(self) -> u8 {
        match self {
            Geometry::G1 => 1,
            Geometry::G2 => 2,
        }
    }

    pub fn crossed(self) -> Self {
        match self {
            Geometry::G1 => Geometry::G2,
            Geometry::G2 => Geometry::G1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Unbarred,
    Barred,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Unbarred => Orientation::Barred,
            Orientation::Barred => Orientation::Unbarred,
        }
    }
}

/// Deformation parameters shared by every computation.
///
/// On the braided line `κ = q` and `ζ = -1` in geometry 1. The crossing image
/// stores `q⁻¹` as its deformation parameter, so `κ = q` holds in both
/// geometries while `ζ` flips sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QContext {
    pub q: f64,
    pub kappa: f64,
    pub zeta: i32,
    pub geometry: Geometry,
    pub orientation: Orientation,
}

impl QContext {
    /// Geometry-1 braided line with `κ = q`, `ζ = -1`.
    pub fn braided_line(q: f64) -> Result<Self> {
        validate_q(q)?;
        Ok(Self {
            q,
            kappa: q,
            zeta: -1,
            geometry: Geometry::G1,
            orientation: Orientation::Unbarred,
        })
    }

    pub fn new(
        q: f64,
        kappa: f64,
        zeta: i32,
        geometry: Geometry,
        orientation: Orientation,
    ) -> Result<Self> {
        validate_q(q)?;
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::invalid("ctx.kappa", format!("must be positive, got {kappa}")));
        }
        Ok(Self {
            q,
            kappa,
            zeta,
            geometry,
            orientation,
        })
    }

    /// Unvalidated constructor, used to probe the self-dual point `q = 1`.
    #[allow(dead_code)]
    pub(crate) fn raw(q: f64, kappa: f64, zeta: i32, geometry: Geometry) -> Self {
        Self {
            q,
            kappa,
            zeta,
            geometry,
            orientation: Orientation::Unbarred,
        }
    }

    /// `q ↔ q⁻¹`, `κ ↔ κ⁻¹`, `ζ ↔ -ζ`, label `1 ↔ 2`, barred ↔ unbarred.
    pub fn crossing_transform(&self) -> Self {
        Self {
            q: 1.0 / self.q,
            kappa: 1.0 / self.kappa,
            zeta: -self.zeta,
            geometry: self.geometry.crossed(),
            orientation: self.orientation.flipped(),
        }
    }

    /// `q^ζ`.
    pub fn q_zeta(&self) -> f64 {
        self.q.powi(self.zeta)
    }

    /// Exponent `m` for which `κ^m` is the star-variant argument dilation.
    pub fn star_dilation(&self) -> i32 {
        match self.geometry {
            Geometry::G1 => 1,
            Geometry::G2 => -1,
        }
    }
}

fn validate_q(q: f64) -> Result<()> {
    if !q.is_finite() || q <= 0.0 {
        return Err(Error::invalid("ctx.q", format!("q must be positive, got {q}")));
    }
    if q == 1.0 {
        return Err(Error::invalid("ctx.q", "q = 1 is the undeformed point"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_of_canonical_context() {
        let ctx = QContext::braided_line(0.9).unwrap();
        let crossed = ctx.crossing_transform();
        assert!((crossed.q - 1.0 / 0.9).abs() < 1e-15);
        assert!((crossed.kappa - 1.0 / 0.9).abs() < 1e-15);
        assert_eq!(crossed.zeta, 1);
        assert_eq!(crossed.geometry, Geometry::G2);
        assert_eq!(crossed.orientation, Orientation::Barred);
        let back = crossed.crossing_transform();
        assert!((back.q - ctx.q).abs() < 1e-15 && (back.kappa - ctx.kappa).abs() < 1e-15);
        assert_eq!((back.zeta, back.geometry, back.orientation), (ctx.zeta, ctx.geometry, ctx.orientation));
    }

    #[test]
    fn self_dual_point_only_swaps_labels() {
        let ctx = QContext::raw(1.0, 1.0, -1, Geometry::G1);
        let crossed = ctx.crossing_transform();
        assert_eq!(crossed.q, 1.0);
        assert_eq!(crossed.kappa, 1.0);
        assert_eq!(crossed.q_zeta(), ctx.q_zeta());
        assert_eq!(crossed.geometry, Geometry::G2);
    }

    #[test]
    fn rejects_invalid_q() {
        for q in [0.0, -0.5, 1.0, f64::NAN] {
            match QContext::braided_line(q) {
                Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "ctx.q"),
                other => panic!("expected ctx.q error, got {other:?}"),
            }
        }
    }
}
