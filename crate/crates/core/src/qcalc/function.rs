use std::sync::Arc;

use super::lattice::QLattice;
use crate::error::{Error, Result};
use crate::linalg::{CVector, C64, ZERO};

/// Complex samples on a [`QLattice`] at a fixed time.
///
/// Points whose value could not be computed (shifted past the truncation) are
/// zero-filled and flagged; every norm and integral skips them.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFunction {
    lattice: Arc<QLattice>,
    values: Vec<C64>,
    valid: Vec<bool>,
    pub time: f64,
}

impl LatticeFunction {
    pub fn new(lattice: Arc<QLattice>, values: Vec<C64>, time: f64) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::invalid(
                "values",
                format!("expected {} samples, got {}", lattice.len(), values.len()),
            ));
        }
        let valid = vec![true; values.len()];
        Ok(Self {
            lattice,
            values,
            valid,
            time,
        })
    }

    pub fn from_fn(lattice: Arc<QLattice>, time: f64, f: impl Fn(f64) -> C64) -> Self {
        let values = lattice.points().iter().map(|&x| f(x)).collect();
        let valid = vec![true; lattice.len()];
        Self {
            lattice,
            values,
            valid,
            time,
        }
    }

    pub fn zeros(lattice: Arc<QLattice>, time: f64) -> Self {
        Self::from_fn(lattice, time, |_| ZERO)
    }

    pub fn from_vector(lattice: Arc<QLattice>, v: &CVector, time: f64) -> Result<Self> {
        Self::new(lattice, v.iter().copied().collect(), time)
    }

    pub fn lattice(&self) -> &Arc<QLattice> {
        &self.lattice
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn is_valid(&self, i: usize) -> bool {
        self.valid[i]
    }

    pub fn interior_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_column_slice(&self.values)
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn same_lattice(&self, other: &LatticeFunction) -> bool {
        Arc::ptr_eq(&self.lattice, &other.lattice) || *self.lattice == *other.lattice
    }

    /// `a·self + b·other`; validity is the intersection.
    pub fn combine(&self, a: C64, other: &LatticeFunction, b: C64) -> Result<Self> {
        if !self.same_lattice(other) {
            return Err(Error::LatticeMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&f, &g)| a * f + b * g)
            .collect();
        let valid = self.valid.iter().zip(&other.valid).map(|(&u, &v)| u && v).collect();
        Ok(Self {
            lattice: self.lattice.clone(),
            values,
            valid,
            time: self.time,
        })
    }

    pub fn norm(&self) -> f64 {
        sesquilinear(self, self).map(|z| z.re.sqrt()).unwrap_or(0.0)
    }
}

/// `(f(x) − f(qx)) / ((1 − q)·x)`; the point where `qx` leaves the lattice is
/// flagged invalid.
pub fn jackson_derivative(f: &LatticeFunction) -> LatticeFunction {
    let lat = f.lattice();
    let q = lat.q();
    let mut values = vec![ZERO; lat.len()];
    let mut valid = vec![false; lat.len()];
    for i in 0..lat.len() {
        if let Some(k) = lat.shifted(i, 1) {
            if f.valid[i] && f.valid[k] {
                let x = lat.points()[i];
                values[i] = (f.values[i] - f.values[k]) / ((1.0 - q) * x);
                valid[i] = true;
            }
        }
    }
    LatticeFunction {
        lattice: lat.clone(),
        values,
        valid,
        time: f.time,
    }
}

/// `Σ w(x)·f(x)` over valid points.
pub fn jackson_integral(f: &LatticeFunction) -> C64 {
    f.lattice
        .weights()
        .iter()
        .zip(&f.values)
        .zip(&f.valid)
        .filter(|(_, &v)| v)
        .map(|((&w, &z), _)| z * w)
        .sum()
}

/// `g(x) = f(κ^m x)`, zero-filled where `κ^m x` leaves the lattice.
pub fn kappa_scale(f: &LatticeFunction, m: i32) -> LatticeFunction {
    let lat = f.lattice();
    let s = m * lat.kappa_step();
    let mut values = vec![ZERO; lat.len()];
    let mut valid = vec![false; lat.len()];
    for i in 0..lat.len() {
        if let Some(k) = lat.shifted(i, s) {
            values[i] = f.values[k];
            valid[i] = f.valid[k];
        }
    }
    LatticeFunction {
        lattice: lat.clone(),
        values,
        valid,
        time: f.time,
    }
}

/// `Σ w(x)·conj(f(x))·g(x)` over points valid in both.
pub fn sesquilinear(f: &LatticeFunction, g: &LatticeFunction) -> Result<C64> {
    if !f.same_lattice(g) {
        return Err(Error::LatticeMismatch);
    }
    let w = f.lattice.weights();
    Ok((0..w.len())
        .filter(|&i| f.valid[i] && g.valid[i])
        .map(|i| f.values[i].conj() * g.values[i] * w[i])
        .sum())
}
