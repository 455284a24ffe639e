//! Orthonormal energy eigenbases over the Jackson lattice.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64, I, ZERO};
use crate::qcalc::{q_exponential, Geometry, LatticeFunction, QContext, QLattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisKind {
    Spectral,
    QExponential,
}

/// Momentum/energy eigenmodes `u_p` with `E = p²/(2m)` and `vol = 1`.
///
/// Mode vectors are the columns of [`WaveBasis::vectors`]. For the spectral
/// basis modes come in exactly degenerate parity pairs: index `2k` is even with
/// `p > 0`, index `2k + 1` is odd with `p < 0`, and `⊖p` is index `k ^ 1`.
#[derive(Debug, Clone)]
pub struct WaveBasis {
    kind: BasisKind,
    lattice: Arc<QLattice>,
    mass: f64,
    vol: f64,
    momenta: Vec<f64>,
    energies: Vec<f64>,
    vectors: CMatrix,
    hamiltonian: CMatrix,
}

impl PartialEq for WaveBasis {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.mass == other.mass
            && *self.lattice == *other.lattice
            && self.momenta == other.momenta
            && self.vectors == other.vectors
    }
}

impl WaveBasis {
    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn ctx(&self) -> &QContext {
        self.lattice.ctx()
    }

    pub fn lattice(&self) -> &Arc<QLattice> {
        &self.lattice
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn vol(&self) -> f64 {
        self.vol
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn max_energy(&self) -> f64 {
        self.energies.iter().cloned().fold(0.0, f64::max)
    }

    /// Columns are the mode vectors `u_p(x)`.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn mode(&self, k: usize) -> LatticeFunction {
        LatticeFunction::from_vector(self.lattice.clone(), &self.vectors.column(k).into_owned(), 0.0)
            .expect("mode length matches lattice")
    }

    /// Position-space free Hamiltonian acting on sample vectors.
    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    /// Index of the `⊖p` partner.
    pub fn inverse_momentum(&self, k: usize) -> usize {
        match self.kind {
            BasisKind::Spectral => k ^ 1,
            BasisKind::QExponential => {
                let p = self.momenta[k];
                (0..self.len())
                    .min_by(|&a, &b| {
                        (self.momenta[a] + p).abs().total_cmp(&(self.momenta[b] + p).abs())
                    })
                    .unwrap_or(k)
            }
        }
    }

    /// Direction of the free phase: `e^{-iσEt}` with `σ = +1` in geometry 1 and
    /// `σ = -1` for the negative-energy convention of geometry 2.
    pub fn phase_sign(&self) -> f64 {
        match self.ctx().geometry {
            Geometry::G1 => 1.0,
            Geometry::G2 => -1.0,
        }
    }

    pub fn gram(&self) -> CMatrix {
        let w = self.lattice.weight_matrix();
        self.vectors.adjoint() * w * &self.vectors
    }

    /// `‖Uᴴ W U − I‖_max`.
    pub fn gram_defect(&self) -> f64 {
        let n = self.len();
        linalg::max_abs(&(self.gram() - linalg::identity(n)))
    }

    /// `‖Δ W − I‖_max` with `Δ = U Uᴴ` the delta kernel.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.lattice.len();
        let dw = delta_kernel(self) * self.lattice.weight_matrix();
        linalg::max_abs(&(dw - linalg::identity(n)))
    }

    /// `U diag(e^{-iσ E_p τ}) Uᴴ`.
    pub fn evolution_kernel(&self, sigma: f64, tau: f64) -> CMatrix {
        let phases: Vec<C64> = self
            .energies
            .iter()
            .map(|&e| (-I * (sigma * e * tau)).exp())
            .collect();
        self.spectral_kernel(&phases)
    }

    /// `U diag(d) Uᴴ` for arbitrary per-mode factors.
    pub fn spectral_kernel(&self, d: &[C64]) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &f) in d.iter().enumerate() {
            let mut col = scaled.column_mut(k);
            col *= f;
        }
        scaled * self.vectors.adjoint()
    }

    /// Matrix of a multiplication operator `V(x)` in the energy basis,
    /// `⟨u_p, V u_p'⟩`.
    pub fn operator_matrix(&self, values: &[C64]) -> CMatrix {
        let w = self.lattice.weights();
        let mut weighted = self.vectors.clone();
        for i in 0..weighted.nrows() {
            let f = values[i] * w[i];
            let mut row = weighted.row_mut(i);
            row *= f;
        }
        self.vectors.adjoint() * weighted
    }
}

/// `DᵀΩD/(2m)` on one half of the lattice (both halves are identical).
fn half_form(lattice: &QLattice, mass: f64) -> DMatrix<f64> {
    let nh = lattice.n_half();
    let q = lattice.q();
    let (j_min, _) = lattice.j_range();
    let x0 = lattice.x0();
    let mut a_half = DMatrix::<f64>::zeros(nh, nh);
    for r in 0..=nh {
        // difference row between x_{j} and x_{j+1} with j = j_min - 1 + r
        let x_r = x0 * q.powi(j_min - 1 + r as i32);
        let omega = (1.0 - q).abs() * x_r;
        let c = 1.0 / ((1.0 - q) * x_r);
        let mut entries = Vec::with_capacity(2);
        if r >= 1 {
            entries.push((r - 1, c));
        }
        if r < nh {
            entries.push((r, -c));
        }
        for &(a, ca) in &entries {
            for &(b, cb) in &entries {
                a_half[(a, b)] += omega * ca * cb / (2.0 * mass);
            }
        }
    }
    a_half
}

/// Free Hamiltonian `H₀ = D†D/(2m)` and its energy eigenbasis.
///
/// `D` is the Jackson derivative on each half of the lattice; both ends are
/// closed by vanishing ghost samples, so the form `⟨Df, Df⟩` is positive
/// definite and the two halves decouple into exact parity pairs.
pub fn build_hamiltonian_basis(lattice: Arc<QLattice>, mass: f64) -> Result<WaveBasis> {
    if lattice.len() < 4 {
        return Err(Error::invalid("lattice", "need at least 4 points"));
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid("mass", format!("must be positive, got {mass}")));
    }
    let nh = lattice.n_half();
    let n = lattice.len();
    let a_half = half_form(&lattice, mass);

    let w_half: Vec<f64> = lattice.weights()[..nh].to_vec();
    let s: Vec<f64> = w_half.iter().map(|w| w.sqrt()).collect();
    let b = DMatrix::from_fn(nh, nh, |i, j| a_half[(i, j)] / (s[i] * s[j]));
    let eig = SymmetricEigen::try_new(b, f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Diagonalization("free Hamiltonian".into()))?;
    let mut order: Vec<usize> = (0..nh).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));

    let mut vectors = CMatrix::zeros(n, n);
    let mut momenta = Vec::with_capacity(n);
    let mut energies = Vec::with_capacity(n);
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    for (k, &idx) in order.iter().enumerate() {
        let mut v: Vec<f64> = (0..nh).map(|i| eig.eigenvectors[(i, idx)] / s[i]).collect();
        let lead = v
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if v[lead] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let e = eig.eigenvalues[idx].max(0.0);
        let p = (2.0 * mass * e).sqrt();
        for i in 0..nh {
            vectors[(i, 2 * k)] = C64::new(v[i] * r2, 0.0);
            vectors[(i + nh, 2 * k)] = C64::new(v[i] * r2, 0.0);
            vectors[(i, 2 * k + 1)] = C64::new(v[i] * r2, 0.0);
            vectors[(i + nh, 2 * k + 1)] = C64::new(-v[i] * r2, 0.0);
        }
        momenta.extend([p, -p]);
        energies.extend([p * p / (2.0 * mass), p * p / (2.0 * mass)]);
    }

    let w = lattice.weights();
    let mut hamiltonian = CMatrix::zeros(n, n);
    for base in [0, nh] {
        for i in 0..nh {
            for j in 0..nh {
                hamiltonian[(base + i, base + j)] = C64::new(a_half[(i, j)] / w[base + i], 0.0);
            }
        }
    }

    Ok(WaveBasis {
        kind: BasisKind::Spectral,
        lattice,
        mass,
        vol: 1.0,
        momenta,
        energies,
        vectors,
        hamiltonian,
    })
}

/// Ratio of the ordinary node measure (half the distance between the
/// neighbours `x/q` and `qx`) to the Jackson weight `|1 − q||x|`.
pub fn classical_weight_ratio(q: f64) -> f64 {
    (1.0 + q) / (2.0 * q)
}

/// `e^{-iHt}` acting on node values, with the same difference operator but
/// the ordinary calculus measure on the nodes.
pub fn classical_evolution(lattice: &QLattice, mass: f64, t: f64) -> Result<CMatrix> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid("mass", format!("must be positive, got {mass}")));
    }
    let nh = lattice.n_half();
    let a = half_form(lattice, mass);
    let ratio = classical_weight_ratio(lattice.q());
    let s: Vec<f64> = lattice.weights()[..nh].iter().map(|w| (w * ratio).sqrt()).collect();
    let b = DMatrix::from_fn(nh, nh, |i, j| a[(i, j)] / (s[i] * s[j]));
    let eig = SymmetricEigen::try_new(b, f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Diagonalization("classical Hamiltonian".into()))?;
    let v = eig.eigenvectors.map(|x| C64::new(x, 0.0));
    let phases = linalg::diag(eig.eigenvalues.iter().map(|&e| (-I * (e * t)).exp()));
    let core = &v * phases * v.adjoint();
    let mut out = CMatrix::zeros(2 * nh, 2 * nh);
    for base in [0, nh] {
        for i in 0..nh {
            for j in 0..nh {
                out[(base + i, base + j)] = core[(i, j)] * (s[j] / s[i]);
            }
        }
    }
    Ok(out)
}

/// Diagnostics for the truncated q-exponential basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    /// `‖G − I‖_F` of the unit-normalized q-exponentials before orthonormalization.
    pub orthogonality_defect: f64,
    /// `max |e_q(ipx) − e^{ipx}|` over accepted modes and lattice points.
    pub plane_wave_defect: f64,
    pub accepted: Vec<f64>,
    /// Momenta whose series diverged on some lattice point.
    pub rejected: Vec<f64>,
    pub n_trunc: u32,
}

/// Truncated q-exponentials `e_q(i p x)`, Löwdin-orthonormalized.
pub fn build_qexp_basis(
    lattice: Arc<QLattice>,
    mass: f64,
    momenta: &[f64],
    n_trunc: u32,
) -> Result<(WaveBasis, DeviationReport)> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid("mass", format!("must be positive, got {mass}")));
    }
    let q = lattice.q();
    let n = lattice.len();
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    let mut columns: Vec<Vec<C64>> = Vec::new();
    let mut plane_wave_defect: f64 = 0.0;
    for &p in momenta {
        let mut col = Vec::with_capacity(n);
        let mut ok = true;
        for &x in lattice.points() {
            let s = q_exponential(I * (p * x), q, n_trunc)?;
            if s.diverged {
                ok = false;
                break;
            }
            col.push(s.value);
        }
        if !ok {
            rejected.push(p);
            continue;
        }
        for (z, &x) in col.iter().zip(lattice.points()) {
            plane_wave_defect = plane_wave_defect.max((z - (I * (p * x)).exp()).norm());
        }
        accepted.push(p);
        columns.push(col);
    }
    let m = columns.len();
    if m == 0 {
        return Err(Error::invalid("momentum_grid", "every requested mode diverged"));
    }
    let w = lattice.weights();
    let mut v = CMatrix::from_fn(n, m, |i, k| columns[k][i]);
    for k in 0..m {
        let norm: f64 = (0..n).map(|i| v[(i, k)].norm_sqr() * w[i]).sum::<f64>().sqrt();
        let mut col = v.column_mut(k);
        col /= C64::new(norm, 0.0);
    }
    let gram = v.adjoint() * lattice.weight_matrix() * &v;
    let orthogonality_defect = linalg::frobenius(&(&gram - linalg::identity(m)));
    let vectors = &v * linalg::hermitian_inv_sqrt(&gram)?;

    let energies: Vec<f64> = accepted.iter().map(|p| p * p / (2.0 * mass)).collect();
    let winv: Vec<C64> = w.iter().map(|&x| C64::new(x, 0.0)).collect();
    let mut scaled = vectors.clone();
    for (k, &e) in energies.iter().enumerate() {
        let mut col = scaled.column_mut(k);
        col *= C64::new(e, 0.0);
    }
    let hamiltonian = scaled * vectors.adjoint() * linalg::diag(winv);

    let report = DeviationReport {
        orthogonality_defect,
        plane_wave_defect,
        accepted: accepted.clone(),
        rejected,
        n_trunc,
    };
    Ok((
        WaveBasis {
            kind: BasisKind::QExponential,
            lattice,
            mass,
            vol: 1.0,
            momenta: accepted,
            energies,
            vectors,
            hamiltonian,
        },
        report,
    ))
}

/// Expansion coefficients `c_p` of a lattice function at a time stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    basis: Arc<WaveBasis>,
    pub values: CVector,
    pub time: f64,
}

impl CoefficientVector {
    pub fn new(basis: Arc<WaveBasis>, values: CVector, time: f64) -> Result<Self> {
        if values.len() != basis.len() {
            return Err(Error::invalid(
                "coefficients",
                format!("expected {} modes, got {}", basis.len(), values.len()),
            ));
        }
        Ok(Self {
            basis,
            values,
            time,
        })
    }

    pub fn unit(basis: Arc<WaveBasis>, k: usize, time: f64) -> Self {
        let mut values = CVector::zeros(basis.len());
        values[k] = C64::new(1.0, 0.0);
        Self {
            basis,
            values,
            time,
        }
    }

    pub fn basis(&self) -> &Arc<WaveBasis> {
        &self.basis
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// `c_p = ⟨u_p, f⟩`.
pub fn project(f: &LatticeFunction, basis: &Arc<WaveBasis>) -> Result<CoefficientVector> {
    if **f.lattice() != *basis.lattice {
        return Err(Error::LatticeMismatch);
    }
    let w = basis.lattice.weights();
    let wf = CVector::from_iterator(
        w.len(),
        (0..w.len()).map(|i| if f.is_valid(i) { f.values()[i] * w[i] } else { ZERO }),
    );
    Ok(CoefficientVector {
        basis: basis.clone(),
        values: basis.vectors.adjoint() * wf,
        time: f.time,
    })
}

/// `f(x) = Σ_p c_p e^{-iσE_p(t − t_c)} u_p(x)`.
pub fn expand(c: &CoefficientVector, t: f64) -> LatticeFunction {
    let b = &c.basis;
    let sigma = b.phase_sign();
    let evolved = CVector::from_iterator(
        b.len(),
        b.energies
            .iter()
            .zip(c.values.iter())
            .map(|(&e, &v)| v * (-I * (sigma * e * (t - c.time))).exp()),
    );
    LatticeFunction::from_vector(b.lattice.clone(), &(&b.vectors * evolved), t)
        .expect("basis vectors live on the basis lattice")
}

/// `Δ(x, y) = Σ_p u_p(x) conj(u_p(y))`, the reproducing kernel of the Jackson
/// measure: `Δ W = I`.
pub fn delta_kernel(basis: &WaveBasis) -> CMatrix {
    &basis.vectors * basis.vectors.adjoint()
}

/// Header of the basis CSV export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisHeader {
    pub kind: BasisKind,
    pub ctx: QContext,
    pub x0: f64,
    pub j_min: i32,
    pub j_max: i32,
    pub mass: f64,
    pub vol: f64,
    pub momenta: Vec<f64>,
    pub energies: Vec<f64>,
}

impl WaveBasis {
    /// Basis export: one JSON header line prefixed by `#`, then a CSV table with
    /// columns `x, weight, u0_re, u0_im, u1_re, …`.
    pub fn to_csv(&self) -> String {
        let (j_min, j_max) = self.lattice.j_range();
        let header = BasisHeader {
            kind: self.kind,
            ctx: *self.ctx(),
            x0: self.lattice.x0(),
            j_min,
            j_max,
            mass: self.mass,
            vol: self.vol,
            momenta: self.momenta.clone(),
            energies: self.energies.clone(),
        };
        let mut out = String::new();
        out.push_str("# ");
        out.push_str(&serde_json::to_string(&header).expect("header serializes"));
        out.push('\n');
        out.push_str("x,weight");
        for k in 0..self.len() {
            out.push_str(&format!(",u{k}_re,u{k}_im"));
        }
        out.push('\n');
        for i in 0..self.lattice.len() {
            out.push_str(&crate::export::fmt(self.lattice.points()[i]));
            out.push(',');
            out.push_str(&crate::export::fmt(self.lattice.weights()[i]));
            for k in 0..self.len() {
                let z = self.vectors[(i, k)];
                out.push(',');
                out.push_str(&crate::export::fmt(z.re));
                out.push(',');
                out.push_str(&crate::export::fmt(z.im));
            }
            out.push('\n');
        }
        out
    }

    /// Reads a basis written by [`WaveBasis::to_csv`].
    pub fn from_csv(text: &str) -> Result<WaveBasis> {
        let mut lines = text.lines();
        let header: BasisHeader = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| Error::Parse("missing JSON header".into()))
            .and_then(|l| serde_json::from_str(l).map_err(|e| Error::Parse(e.to_string())))?;
        lines.next();
        let lattice = Arc::new(QLattice::new(&header.ctx, header.x0, header.j_min, header.j_max)?);
        let m = header.momenta.len();
        let mut vectors = CMatrix::zeros(lattice.len(), m);
        let mut rows = 0;
        for (i, line) in lines.enumerate() {
            let cols: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
                .collect::<Result<_>>()?;
            if cols.len() != 2 + 2 * m || i >= lattice.len() {
                return Err(Error::Parse(format!("bad row {i}")));
            }
            for k in 0..m {
                vectors[(i, k)] = C64::new(cols[2 + 2 * k], cols[3 + 2 * k]);
            }
            rows += 1;
        }
        if rows != lattice.len() {
            return Err(Error::Parse(format!("expected {} rows, got {rows}", lattice.len())));
        }
        let winv: Vec<C64> = lattice.weights().iter().map(|&x| C64::new(x, 0.0)).collect();
        let mut scaled = vectors.clone();
        for (k, &e) in header.energies.iter().enumerate() {
            let mut col = scaled.column_mut(k);
            col *= C64::new(e, 0.0);
        }
        let hamiltonian = scaled * vectors.adjoint() * linalg::diag(winv);
        Ok(WaveBasis {
            kind: header.kind,
            lattice,
            mass: header.mass,
            vol: header.vol,
            momenta: header.momenta,
            energies: header.energies,
            vectors,
            hamiltonian,
        })
    }
}
