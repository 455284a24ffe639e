use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::WaveBasis;
use crate::error::{Error, Result};
use crate::export;
use crate::linalg::{self, CMatrix, C64, I};
use crate::qcalc::{Geometry, QContext};

use super::lippmann::{resolvent_t, TMatrix};
use super::potential::{ChannelSpace, HamiltonianVariant, Potential};

/// The four S-matrices `(S₂)₋, (S₁*)₊, (S₁)₊′, (S₂*)₋′`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SMatrixFamily {
    S2Minus,
    S1StarPlus,
    S1PrimePlus,
    S2StarPrimeMinus,
}

impl SMatrixFamily {
    pub const ALL: [Self; 4] = [
        Self::S2Minus,
        Self::S1StarPlus,
        Self::S1PrimePlus,
        Self::S2StarPrimeMinus,
    ];

    pub fn geometry(self) -> Geometry {
        match self {
            Self::S1StarPlus | Self::S1PrimePlus => Geometry::G1,
            Self::S2Minus | Self::S2StarPrimeMinus => Geometry::G2,
        }
    }

    /// `+1` for the `₊` families (states free in the remote past), `-1` for `₋`.
    pub fn sign(self) -> f64 {
        match self.geometry() {
            Geometry::G1 => 1.0,
            Geometry::G2 => -1.0,
        }
    }

    pub fn hamiltonian(self) -> HamiltonianVariant {
        match self {
            Self::S1PrimePlus => HamiltonianVariant::HPrime,
            Self::S2Minus => HamiltonianVariant::HDoublePrime,
            Self::S1StarPlus | Self::S2StarPrimeMinus => HamiltonianVariant::H,
        }
    }

    fn primed(self) -> bool {
        matches!(self, Self::S1PrimePlus | Self::S2StarPrimeMinus)
    }
}

/// A family together with its tilde flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SFamily {
    pub base: SMatrixFamily,
    pub tilde: bool,
}

impl SFamily {
    pub const fn plain(base: SMatrixFamily) -> Self {
        Self { base, tilde: false }
    }

    pub const fn tilde(base: SMatrixFamily) -> Self {
        Self { base, tilde: true }
    }

    /// All eight families living in a geometry.
    pub fn all_for(geometry: Geometry) -> Vec<Self> {
        SMatrixFamily::ALL
            .iter()
            .filter(|f| f.geometry() == geometry)
            .flat_map(|&f| [Self::plain(f), Self::tilde(f)])
            .collect()
    }

    pub fn conjugate(self) -> Self {
        Self {
            tilde: !self.tilde,
            ..self
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        let (tilde, body) = match name.strip_prefix('~') {
            Some(rest) => (true, rest),
            None => (false, name),
        };
        SMatrixFamily::ALL
            .iter()
            .map(|&b| Self { base: b, tilde })
            .find(|f| f.to_string().trim_start_matches('~') == body)
            .ok_or_else(|| Error::invalid("family", format!("unknown S-matrix family `{name}`")))
    }
}

impl fmt::Display for SFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = match self.base {
            SMatrixFamily::S2Minus => "S2-",
            SMatrixFamily::S1StarPlus => "S1*+",
            SMatrixFamily::S1PrimePlus => "S1+",
            SMatrixFamily::S2StarPrimeMinus => "S2*-",
        };
        let primed = self.base.primed() != self.tilde;
        write!(
            f,
            "{}{}{}",
            if self.tilde { "~" } else { "" },
            body,
            if primed { "'" } else { "" }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Resolvent,
    Interaction,
}

/// Window, switching rate and tolerance of an interaction-picture S.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub window: f64,
    pub eps: f64,
    pub tol: f64,
    /// `min_p |U(−T, −2T)_pp|`: how free the state is at the start.
    pub remote_past_overlap: f64,
}

#[derive(Debug, Clone)]
pub struct SMatrix {
    basis: Arc<WaveBasis>,
    pub family: SFamily,
    pub hamiltonian: HamiltonianVariant,
    pub route: Route,
    pub epsilon: f64,
    pub energies: Vec<f64>,
    pub matrix: CMatrix,
    pub provenance: Option<Provenance>,
}

impl SMatrix {
    pub fn new(
        channels: &ChannelSpace,
        family: SFamily,
        route: Route,
        epsilon: f64,
        matrix: CMatrix,
        provenance: Option<Provenance>,
    ) -> Result<Self> {
        check_family(channels.basis().ctx(), family)?;
        if !matrix.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::invalid("smatrix", "non-finite entries"));
        }
        Ok(Self {
            basis: channels.basis().clone(),
            family,
            hamiltonian: channels.variant,
            route,
            epsilon,
            energies: channels.energies.clone(),
            matrix,
            provenance,
        })
    }

    pub fn basis(&self) -> &Arc<WaveBasis> {
        &self.basis
    }

    pub fn ctx(&self) -> &QContext {
        self.basis.ctx()
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }
}

fn check_family(ctx: &QContext, family: SFamily) -> Result<()> {
    if family.base.geometry() != ctx.geometry {
        return Err(Error::VariantGeometryMismatch {
            variant: family.to_string(),
            geometry: format!("{:?}", ctx.geometry),
        });
    }
    Ok(())
}

/// `(ε/π) / (ω² + ε²)`.
pub fn lorentzian(omega: f64, eps: f64) -> f64 {
    eps / std::f64::consts::PI / (omega * omega + eps * eps)
}

/// Momentum-basis S-matrix with the on-shell delta smeared to a Lorentzian.
///
/// `S_pp′ = δ_pp′ − 2πiσ δ_ε(E_p − E_p′) T_pp′(E_p′ + iσε)`; the tilde
/// partner is built from `V†` on the opposite side of the real axis at the
/// row energy, `S̃_pp′ = δ_pp′ + 2πiσ δ_ε(E_p − E_p′) T̃_pp′(E_p − iσε)`.
pub fn smatrix_momentum(
    basis: &Arc<WaveBasis>,
    potential: &Potential,
    family: SFamily,
    eps: f64,
    n_channels: usize,
) -> Result<SMatrix> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    check_family(basis.ctx(), family)?;
    let v = if family.tilde {
        potential.adjoint()
    } else {
        potential.clone()
    };
    let ch = ChannelSpace::new(basis, &v, n_channels, family.base.hamiltonian())?;
    let sigma = family.base.sign();
    let n = ch.len();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut s = linalg::identity(n);
    for k in 0..n {
        let e = ch.energies[k];
        if family.tilde {
            let t = resolvent_t(&ch, C64::new(e, -sigma * eps))?;
            for j in 0..n {
                let d = lorentzian(e - ch.energies[j], eps);
                s[(k, j)] += I * (two_pi * sigma * d) * t.matrix[(k, j)];
            }
        } else {
            let t = resolvent_t(&ch, C64::new(e, sigma * eps))?;
            for p in 0..n {
                let d = lorentzian(ch.energies[p] - e, eps);
                s[(p, k)] -= I * (two_pi * sigma * d) * t.matrix[(p, k)];
            }
        }
    }
    SMatrix::new(&ch, family, Route::Resolvent, eps, s, None)
}

/// `ω(p, p′) = |S_pp′|²`; tilde families are read transposed so that each
/// family and its partner describe the same transition.
pub fn transition_probability(s: &SMatrix, p: usize, p_prime: usize) -> f64 {
    let z = if s.family.tilde {
        s.matrix[(p_prime, p)]
    } else {
        s.matrix[(p, p_prime)]
    };
    (z.conj() * z).re
}

pub fn transition_table(s: &SMatrix) -> Vec<Vec<f64>> {
    (0..s.len())
        .map(|p| (0..s.len()).map(|pp| transition_probability(s, p, pp)).collect())
        .collect()
}

/// `max(‖S S† − I‖_F, ‖S† S − I‖_F)`.
pub fn unitarity_defect(s: &SMatrix) -> f64 {
    linalg::unitarity_defect(&s.matrix)
}

/// `[S]_{p(κp′)}`: columns relabelled by one momentum shell in the
/// direction of `κ`, with columns that leave the channel range flagged.
#[derive(Debug, Clone)]
pub struct KappaShifted {
    pub matrix: CMatrix,
    pub edge: Vec<bool>,
}

pub fn kappa_shifted(s: &SMatrix) -> KappaShifted {
    let n = s.len();
    let shell: isize = if s.ctx().kappa < 1.0 { -2 } else { 2 };
    let mut matrix = CMatrix::zeros(n, n);
    let mut edge = vec![false; n];
    for j in 0..n {
        let src = j as isize + shell;
        if (0..n as isize).contains(&src) {
            matrix.set_column(j, &s.matrix.column(src as usize));
        } else {
            edge[j] = true;
        }
    }
    KappaShifted { matrix, edge }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SMatrixHeader {
    pub family: String,
    pub route: Route,
    pub eps: f64,
    pub hamiltonian: HamiltonianVariant,
    pub ctx: QContext,
    pub x0: f64,
    pub j_min: i32,
    pub j_max: i32,
    pub mass: f64,
    pub energies: Vec<f64>,
    pub provenance: Option<Provenance>,
}

impl SMatrix {
    pub fn header(&self) -> SMatrixHeader {
        let lat = self.basis.lattice();
        let (j_min, j_max) = lat.j_range();
        SMatrixHeader {
            family: self.family.to_string(),
            route: self.route,
            eps: self.epsilon,
            hamiltonian: self.hamiltonian,
            ctx: *self.ctx(),
            x0: lat.x0(),
            j_min,
            j_max,
            mass: self.basis.mass(),
            energies: self.energies.clone(),
            provenance: self.provenance,
        }
    }

    pub fn to_csv(&self) -> String {
        export::header_line(&self.header()) + &export::matrix_block(&self.matrix)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TMatrixHeader {
    pub energy_re: f64,
    pub energy_im: f64,
    pub hamiltonian: HamiltonianVariant,
    pub spectral_radius: f64,
    pub condition: f64,
    pub ctx: QContext,
    pub energies: Vec<f64>,
}

pub fn tmatrix_csv(ch: &ChannelSpace, t: &TMatrix) -> String {
    let header = TMatrixHeader {
        energy_re: t.energy.re,
        energy_im: t.energy.im,
        hamiltonian: ch.variant,
        spectral_radius: t.spectral_radius,
        condition: t.condition,
        ctx: *ch.basis().ctx(),
        energies: ch.energies.clone(),
    };
    export::header_line(&header) + &export::matrix_block(&t.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::fixtures::{barrier, basis, crossed_basis};
    use crate::scattering::{PotentialShape, PotentialSpec};

    fn both() -> [Arc<WaveBasis>; 2] {
        [basis(0.9), crossed_basis(0.9)]
    }

    #[test]
    fn names_round_trip() {
        for g in [Geometry::G1, Geometry::G2] {
            for f in SFamily::all_for(g) {
                assert_eq!(SFamily::parse(&f.to_string()).unwrap(), f);
            }
        }
        assert_eq!(SFamily::tilde(SMatrixFamily::S2Minus).to_string(), "~S2-'");
        assert_eq!(SFamily::plain(SMatrixFamily::S1PrimePlus).to_string(), "S1+'");
    }

    #[test]
    fn zero_potential_is_identity() {
        for b in both() {
            for f in SFamily::all_for(b.ctx().geometry) {
                let s = smatrix_momentum(&b, &barrier(&b, 0.0), f, 0.1, 8).unwrap();
                assert_eq!(s.matrix, linalg::identity(8));
                assert_eq!(unitarity_defect(&s), 0.0);
            }
        }
    }

    #[test]
    fn family_must_match_geometry() {
        let b = basis(0.9);
        let f = SFamily::plain(SMatrixFamily::S2Minus);
        assert!(matches!(
            smatrix_momentum(&b, &barrier(&b, 0.1), f, 0.1, 8),
            Err(Error::VariantGeometryMismatch { .. })
        ));
    }

    #[test]
    fn tilde_partner_is_the_hermitian_conjugate() {
        for b in both() {
            let v = barrier(&b, 0.3);
            for f in SMatrixFamily::ALL.iter().filter(|f| f.geometry() == b.ctx().geometry) {
                let s = smatrix_momentum(&b, &v, SFamily::plain(*f), 0.05, 8).unwrap();
                let st = smatrix_momentum(&b, &v, SFamily::tilde(*f), 0.05, 8).unwrap();
                assert!(linalg::max_abs(&(s.matrix.adjoint() - &st.matrix)) < 1e-10);
                for p in 0..8 {
                    for pp in 0..8 {
                        let w = transition_probability(&s, p, pp);
                        let wt = transition_probability(&st, p, pp);
                        assert!(w >= 0.0 && (w - wt).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn defect_shrinks_with_eps() {
        let b = basis(0.9);
        let v = barrier(&b, 0.05);
        let f = SFamily::plain(SMatrixFamily::S1StarPlus);
        let d: Vec<f64> = [0.1, 0.03, 0.01]
            .iter()
            .map(|&e| unitarity_defect(&smatrix_momentum(&b, &v, f, e, 8).unwrap()))
            .collect();
        assert!(d[1] <= 1.2 * d[0] && d[2] <= 1.2 * d[1], "{d:?}");
    }

    #[test]
    fn absorptive_potential_breaks_unitarity() {
        let b = basis(0.9);
        let spec = PotentialSpec {
            shape: PotentialShape::Absorptive,
            strength: 0.05,
            width: 0.5,
            center: 0.0,
        };
        let v = Potential::from_spec(b.lattice().clone(), &spec, 0.1).unwrap();
        assert!(!v.is_hermitian());
        let s = smatrix_momentum(&b, &v, SFamily::plain(SMatrixFamily::S1StarPlus), 0.1, 8).unwrap();
        assert!(unitarity_defect(&s) > 1e-2);
    }

    #[test]
    fn kappa_shift_flags_the_edge() {
        let b = basis(0.9);
        let s = smatrix_momentum(&b, &barrier(&b, 0.1), SFamily::plain(SMatrixFamily::S1StarPlus), 0.1, 8)
            .unwrap();
        let k = kappa_shifted(&s);
        assert_eq!(k.edge, [true, true, false, false, false, false, false, false]);
        assert_eq!(k.matrix.column(2), s.matrix.column(0));
    }
}
