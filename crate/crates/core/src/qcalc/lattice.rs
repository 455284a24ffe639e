use nalgebra::DMatrix;

use super::context::QContext;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

pub const DEFAULT_X0: f64 = 1.0;
pub const DEFAULT_J_MIN: i32 = -12;
pub const DEFAULT_J_MAX: i32 = 12;

/// Truncated bilateral Jackson lattice `{±x0·q^j : j_min ≤ j ≤ j_max}`.
///
/// Indices `0..n_half` hold the positive points in increasing `j`, indices
/// `n_half..2·n_half` the mirrored negative points in the same order, so that
/// multiplication by `q` is the index step `j → j + 1` on both halves.
#[derive(Debug, Clone, PartialEq)]
pub struct QLattice {
    ctx: QContext,
    x0: f64,
    j_min: i32,
    j_max: i32,
    kappa_step: i32,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl QLattice {
    pub fn new(ctx: &QContext, x0: f64, j_min: i32, j_max: i32) -> Result<Self> {
        if !(x0.is_finite() && x0 > 0.0) {
            return Err(Error::invalid("lattice.x0", format!("must be positive, got {x0}")));
        }
        if j_max < j_min {
            return Err(Error::invalid(
                "lattice.j_max",
                format!("j_max = {j_max} < j_min = {j_min}"),
            ));
        }
        let q = ctx.q;
        let kappa_step = if (ctx.kappa - q).abs() <= 1e-12 * q {
            1
        } else if (ctx.kappa * q - 1.0).abs() <= 1e-12 {
            -1
        } else {
            return Err(Error::invalid(
                "ctx.kappa",
                "kappa must be q or 1/q for an exact lattice shift",
            ));
        };
        let half: Vec<f64> = (j_min..=j_max).map(|j| x0 * q.powi(j)).collect();
        let points: Vec<f64> = half.iter().copied().chain(half.iter().map(|x| -x)).collect();
        let weights = points.iter().map(|x| (1.0 - q).abs() * x.abs()).collect();
        Ok(Self {
            ctx: *ctx,
            x0,
            j_min,
            j_max,
            kappa_step,
            points,
            weights,
        })
    }

    pub fn with_defaults(ctx: &QContext) -> Result<Self> {
        Self::new(ctx, DEFAULT_X0, DEFAULT_J_MIN, DEFAULT_J_MAX)
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn q(&self) -> f64 {
        self.ctx.q
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn j_range(&self) -> (i32, i32) {
        (self.j_min, self.j_max)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n_half(&self) -> usize {
        self.points.len() / 2
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Lattice exponent `e` with `κ = q^e`.
    pub fn kappa_step(&self) -> i32 {
        self.kappa_step
    }

    pub fn j_of(&self, i: usize) -> i32 {
        self.j_min + (i % self.n_half()) as i32
    }

    pub fn is_negative(&self, i: usize) -> bool {
        i >= self.n_half()
    }

    pub fn index(&self, j: i32, negative: bool) -> Option<usize> {
        if j < self.j_min || j > self.j_max {
            return None;
        }
        let k = (j - self.j_min) as usize;
        Some(if negative { k + self.n_half() } else { k })
    }

    /// Index of `q^s·x_i`, if it stays on the lattice.
    pub fn shifted(&self, i: usize, s: i32) -> Option<usize> {
        self.index(self.j_of(i) + s, self.is_negative(i))
    }

    /// Index of `-x_i`.
    pub fn mirror(&self, i: usize) -> usize {
        let n = self.n_half();
        if i < n {
            i + n
        } else {
            i - n
        }
    }

    pub fn weight_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.len(),
            self.weights.iter().map(|&w| C64::new(w, 0.0)),
        ))
    }

    /// The same point set seen from the crossed geometry, together with the
    /// permutation `perm[i]` sending an index of `self` to the index of the same
    /// point in the crossed lattice.
    pub fn crossed(&self) -> Result<(QLattice, Vec<usize>)> {
        let ctx = self.ctx.crossing_transform();
        let lattice = QLattice::new(&ctx, self.x0, -self.j_max, -self.j_min)?;
        let perm = (0..self.len())
            .map(|i| {
                lattice
                    .index(-self.j_of(i), self.is_negative(i))
                    .expect("crossed lattice covers the same points")
            })
            .collect();
        Ok((lattice, perm))
    }

    /// Exact cyclic realization of the argument dilation `f ↦ f(κ^m ·)`.
    ///
    /// On interior points `(C f)(x) = f(κ^m x)`; the points pushed past the
    /// truncation are wrapped around with a coefficient chosen so that
    /// `Cᵀ W C = κ^{-m} W` holds exactly, which is the finite form of the
    /// substitution rule of the Jackson integral.
    pub fn cyclic_dilation(&self, m: i32) -> CMatrix {
        let n = self.len();
        let s = m * self.kappa_step;
        let step = self.unit_dilation(s >= 0);
        let mut out = DMatrix::<f64>::identity(n, n);
        for _ in 0..s.unsigned_abs() {
            out = &step * out;
        }
        out.map(|v| C64::new(v, 0.0))
    }

    fn unit_dilation(&self, forward: bool) -> DMatrix<f64> {
        let n = self.len();
        let nh = self.n_half();
        let q = self.q();
        let w = &self.weights;
        let c = (w[0] / (q * w[nh - 1])).sqrt();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for base in [0, nh] {
            for k in 0..nh - 1 {
                if forward {
                    m[(base + k, base + k + 1)] = 1.0;
                } else {
                    m[(base + k + 1, base + k)] = 1.0;
                }
            }
            if forward {
                m[(base + nh - 1, base)] = c;
            } else {
                m[(base, base + nh - 1)] = 1.0 / c;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::weighted_max_diff;

    fn lattice(q: f64) -> QLattice {
        QLattice::with_defaults(&QContext::braided_line(q).unwrap()).unwrap()
    }

    #[test]
    fn default_lattice_shape() {
        let l = lattice(0.9);
        assert_eq!(l.len(), 50);
        assert!(l.weights().iter().all(|&w| w > 0.0));
        for i in 0..l.len() {
            assert_eq!(l.points()[l.mirror(i)], -l.points()[i]);
            if let Some(k) = l.shifted(i, 1) {
                assert!((l.points()[k] - 0.9 * l.points()[i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn cyclic_dilation_rescales_the_measure() {
        let l = lattice(0.8);
        let w = l.weight_matrix();
        for m in [-2, -1, 1, 2] {
            let c = l.cyclic_dilation(m);
            let lhs = c.transpose() * &w * &c;
            let rhs = &w * C64::new(l.ctx().kappa.powi(-m), 0.0);
            let unit = vec![1.0; l.len()];
            assert!(weighted_max_diff(&lhs, &rhs, &unit) < 1e-14);
        }
        let roundtrip = l.cyclic_dilation(1) * l.cyclic_dilation(-1);
        assert!((roundtrip - CMatrix::identity(50, 50)).norm() < 1e-13);
    }

    #[test]
    fn crossed_lattice_is_a_relabelling() {
        let l = lattice(0.9);
        let (c, perm) = l.crossed().unwrap();
        for i in 0..l.len() {
            assert!((c.points()[perm[i]] - l.points()[i]).abs() < 1e-13);
            assert!((c.weights()[perm[i]] * 0.9 - l.weights()[i]).abs() < 1e-14);
        }
    }
}
