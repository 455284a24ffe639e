use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};

/// `[n]_q = (1 − qⁿ)/(1 − q)`, evaluated without cancellation near `q = 1`.
pub fn q_number(n: u32, q: f64) -> Result<f64> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::invalid("q", format!("must be positive, got {q}")));
    }
    if q == 1.0 {
        return Err(Error::ClassicalPoint);
    }
    if n == 0 {
        return Ok(0.0);
    }
    let lq = (q - 1.0).ln_1p();
    Ok((n as f64 * lq).exp_m1() / lq.exp_m1())
}

/// `[n]_q! = [1]_q·[2]_q⋯[n]_q`.
pub fn q_factorial(n: u32, q: f64) -> Result<f64> {
    (1..=n).try_fold(1.0, |acc, k| Ok(acc * q_number(k, q)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QExpSum {
    pub value: C64,
    /// `|zⁿ/[n]_q!|` of the last retained term.
    pub last_term: f64,
    /// Set when a partial term overflowed or the terms stopped decreasing.
    pub diverged: bool,
}

/// Partial sum `Σ_{n=0}^{n_trunc} zⁿ/[n]_q!` of the q-exponential.
pub fn q_exponential(z: C64, q: f64, n_trunc: u32) -> Result<QExpSum> {
    if n_trunc < 1 {
        return Err(Error::invalid("n_trunc", "must be at least 1"));
    }
    q_number(1, q)?;
    let mut term = ONE;
    let mut value = ONE;
    let mut diverged = false;
    for n in 1..=n_trunc {
        term = term * z / q_number(n, q)?;
        if !(term.re.is_finite() && term.im.is_finite()) {
            diverged = true;
            break;
        }
        value += term;
    }
    let last_term = term.norm();
    // for q < 1 the ratio of consecutive terms tends to |z|(1 - q)
    if q < 1.0 && z.norm() * (1.0 - q) >= 1.0 {
        diverged = true;
    }
    if !value.re.is_finite() || !value.im.is_finite() {
        diverged = true;
        value = ZERO;
    }
    Ok(QExpSum {
        value,
        last_term,
        diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_numbers() {
        assert_eq!(q_number(0, 0.3).unwrap(), 0.0);
        let oracle: f64 = (0..4).map(|k| 2f64.powi(k)).sum();
        assert!((q_number(4, 2.0).unwrap() - oracle).abs() < 1e-12);
        let near = q_number(5, 1.0 - 1e-8).unwrap();
        assert!((near - 5.0).abs() / 5.0 < 1e-6);
        assert_eq!(q_number(3, 1.0), Err(Error::ClassicalPoint));
    }

    #[test]
    fn q_factorials() {
        assert_eq!(q_factorial(0, 0.5).unwrap(), 1.0);
        assert!((q_factorial(3, 2.0).unwrap() - 21.0).abs() < 1e-12);
        assert!((q_factorial(4, 1.0 - 1e-10).unwrap() - 24.0).abs() < 1e-6);
    }

    #[test]
    fn classical_exponential_limit() {
        let s = q_exponential(ONE, 1.0 - 1e-12, 30).unwrap();
        assert!((s.value.re - std::f64::consts::E).abs() < 1e-10);
        assert!(!s.diverged);
        assert_eq!(q_exponential(ZERO, 0.5, 5).unwrap().value, ONE);
    }

    #[test]
    fn outside_the_radius_is_flagged() {
        let s = q_exponential(C64::new(0.0, 20.0), 0.9, 60).unwrap();
        assert!(s.diverged);
    }
}
