use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, I};

use super::{InteractionPotential, Ordering};

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rhs(vi: &InteractionPotential, t: f64, u: &CMatrix) -> CMatrix {
    let v = vi.at(t);
    match vi.ordering {
        Ordering::Left => v * u * (-I),
        Ordering::Right => u * v * I,
    }
}

pub(super) struct OdeRun {
    pub matrix: CMatrix,
    pub drift: Vec<(f64, f64)>,
    pub steps: usize,
}

/// Adaptive DOPRI5 for `U' = -iV_I U` (or `U' = iU V_I`), landing exactly on
/// the switching kink and on `t_to`.
pub(super) fn integrate(vi: &InteractionPotential, t_from: f64, t_to: f64, tol: f64) -> Result<OdeRun> {
    let n = vi.len();
    let mut u = linalg::identity(n);
    let mut drift = vec![(t_from, 0.0)];
    if t_from == t_to {
        return Ok(OdeRun {
            matrix: u,
            drift,
            steps: 0,
        });
    }
    let dir = (t_to - t_from).signum();
    let mut stops = Vec::new();
    if t_from.min(t_to) < 0.0 && t_from.max(t_to) > 0.0 {
        stops.push(0.0);
    }
    stops.push(t_to);
    let atol = tol * 1e-2;
    let mut t = t_from;
    let mut h = dir * (0.1 / (vi.max_frequency() + 1.0)).min((t_to - t_from).abs());
    let mut steps = 0;
    for &stop in &stops {
        let mut k1 = rhs(vi, t, &u);
        while (stop - t) * dir > 0.0 {
            let last = (t + h - stop) * dir >= 0.0;
            let step = if last { stop - t } else { h };
            if step.abs() < 1e-13 * t.abs().max(1.0) && !last {
                return Err(Error::StepSizeUnderflow { t, h: step });
            }
            let mut k: Vec<CMatrix> = Vec::with_capacity(7);
            k.push(k1.clone());
            for s in 1..7 {
                let mut y = u.clone();
                for (j, kj) in k.iter().enumerate() {
                    if A[s][j] != 0.0 {
                        y += kj * C64::new(step * A[s][j], 0.0);
                    }
                }
                k.push(rhs(vi, t + C[s] * step, &y));
            }
            let mut y5 = u.clone();
            let mut err = CMatrix::zeros(n, n);
            for s in 0..7 {
                if B5[s] != 0.0 {
                    y5 += &k[s] * C64::new(step * B5[s], 0.0);
                }
                err += &k[s] * C64::new(step * (B5[s] - B4[s]), 0.0);
            }
            let scaled = err
                .iter()
                .zip(y5.iter().zip(u.iter()))
                .map(|(e, (a, b))| e.norm() / (atol + atol * a.norm().max(b.norm())))
                .fold(0.0, f64::max);
            if scaled <= 1.0 {
                t = if last { stop } else { t + step };
                u = y5;
                k1 = k.swap_remove(6);
                steps += 1;
                drift.push((t, linalg::unitarity_defect(&u)));
            }
            let factor = if scaled == 0.0 {
                5.0
            } else {
                (0.9 * scaled.powf(-0.2)).clamp(0.2, 5.0)
            };
            if !(scaled <= 1.0 && last) {
                h = step * factor;
            }
            if h.abs() < 1e-13 * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t, h });
            }
        }
    }
    Ok(OdeRun {
        matrix: u,
        drift,
        steps,
    })
}
