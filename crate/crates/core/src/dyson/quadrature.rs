use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, I};

use super::{InteractionPotential, Ordering};

/// Gauss-Legendre rule on `[-1, 1]` with its spectral integration matrix:
/// `integral[i][j] = ∫_{-1}^{x_i} ℓ_j(x) dx` for the Lagrange basis `ℓ_j`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub integral: Vec<Vec<f64>>,
}

/// `P_0(x), …, P_n(x)` by the three-term recurrence.
fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0; n + 1];
    if n >= 1 {
        p[1] = x;
    }
    for k in 1..n {
        p[k + 1] = ((2 * k + 1) as f64 * x * p[k] - k as f64 * p[k - 1]) / (k + 1) as f64;
    }
    p
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let p = legendre_all(n, x);
                let dp = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
                let dx = p[n] / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let p = legendre_all(n, x);
            let dp = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        let pj: Vec<Vec<f64>> = nodes.iter().map(|&x| legendre_all(n, x)).collect();
        let integral = nodes
            .iter()
            .map(|&xi| {
                let pi = legendre_all(n, xi);
                (0..n)
                    .map(|j| {
                        let mut s = (xi + 1.0) / 2.0;
                        for k in 1..n {
                            s += pj[j][k] * (pi[k + 1] - pi[k - 1]) / 2.0;
                        }
                        weights[j] * s
                    })
                    .collect()
            })
            .collect();
        Self {
            nodes,
            weights,
            integral,
        }
    }
}

const NODES: usize = 16;
const MAX_REFINEMENTS: usize = 14;

/// Panel breakpoints covering `[a, b]`, split at the switching kink `t = 0`.
fn breakpoints(a: f64, b: f64, per_unit: f64, factor: usize) -> Vec<f64> {
    let mut cuts = vec![a];
    if a.min(b) < 0.0 && a.max(b) > 0.0 {
        cuts.push(0.0);
    }
    cuts.push(b);
    let mut out = vec![a];
    for w in cuts.windows(2) {
        let len = (w[1] - w[0]).abs();
        let panels = ((len * per_unit).ceil() as usize).max(1) * factor;
        for k in 1..=panels {
            out.push(w[0] + (w[1] - w[0]) * k as f64 / panels as f64);
        }
    }
    out
}

/// Order-resolved Dyson terms `U⁽⁰⁾ … U⁽ᴺ⁾` at `t_to` on a fixed panel grid.
fn dyson_terms(vi: &InteractionPotential, edges: &[f64], order: usize, gl: &GaussLegendre) -> Vec<Vec<CMatrix>> {
    let n = vi.len();
    // carry[k] is U⁽ᵏ⁾ at the current panel start; per-panel end values kept
    let mut carry: Vec<CMatrix> = (0..=order)
        .map(|k| if k == 0 { linalg::identity(n) } else { CMatrix::zeros(n, n) })
        .collect();
    let mut history = vec![carry.clone()];
    let m = gl.nodes.len();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = (b - a) / 2.0;
        let ts: Vec<f64> = gl.nodes.iter().map(|x| a + half * (x + 1.0)).collect();
        let vs: Vec<CMatrix> = ts.iter().map(|&t| vi.at(t)).collect();
        // values of the previous order at the nodes; order 0 is I throughout
        let mut prev: Vec<CMatrix> = vec![linalg::identity(n); m];
        let mut next_carry = carry.clone();
        for k in 1..=order {
            let f: Vec<CMatrix> = (0..m)
                .map(|j| match vi.ordering {
                    Ordering::Left => &vs[j] * &prev[j] * (-I),
                    Ordering::Right => &prev[j] * &vs[j] * I,
                })
                .collect();
            let cur: Vec<CMatrix> = (0..m)
                .map(|i| {
                    let mut acc = carry[k].clone();
                    for j in 0..m {
                        acc += &f[j] * C64::new(half * gl.integral[i][j], 0.0);
                    }
                    acc
                })
                .collect();
            let mut end = carry[k].clone();
            for j in 0..m {
                end += &f[j] * C64::new(half * gl.weights[j], 0.0);
            }
            next_carry[k] = end;
            prev = cur;
        }
        carry = next_carry;
        history.push(carry.clone());
    }
    history
}

/// Returns the order-resolved terms at `t_to` after global panel refinement
/// until every order changes by at most `tol / order` under halving.
pub(super) fn dyson(vi: &InteractionPotential, t_from: f64, t_to: f64, order: usize, tol: f64) -> Result<(Vec<CMatrix>, usize)> {
    let n = vi.len();
    if order == 0 || t_from == t_to {
        let mut terms = vec![linalg::identity(n)];
        terms.extend((0..order).map(|_| CMatrix::zeros(n, n)));
        return Ok((terms, 0));
    }
    let gl = GaussLegendre::new(NODES);
    let per_unit = (vi.max_frequency() + vi.eps + 1.0) / 4.0;
    let budget = tol / order as f64;
    let mut coarse_edges = breakpoints(t_from, t_to, per_unit, 1);
    let mut coarse = dyson_terms(vi, &coarse_edges, order, &gl);
    for r in 0..MAX_REFINEMENTS {
        let fine_edges = breakpoints(t_from, t_to, per_unit, 2 << r);
        let fine = dyson_terms(vi, &fine_edges, order, &gl);
        let last_c = coarse.last().expect("non-empty");
        let last_f = fine.last().expect("non-empty");
        let worst = (1..=order)
            .map(|k| linalg::max_abs(&(&last_c[k] - &last_f[k])))
            .fold(0.0, f64::max);
        if worst <= budget {
            let terms = last_f.clone();
            return Ok((terms, fine_edges.len() - 1));
        }
        if r + 1 == MAX_REFINEMENTS {
            // locate the coarse panel whose increment disagrees most
            let mut bad = (t_from, t_to, worst);
            let mut best = 0.0;
            for p in 0..coarse_edges.len() - 1 {
                let dc = &coarse[p + 1][order] - &coarse[p][order];
                let df = &fine[2 * p + 2][order] - &fine[2 * p][order];
                let d = linalg::max_abs(&(dc - df));
                if d > best {
                    best = d;
                    bad = (coarse_edges[p], coarse_edges[p + 1], d);
                }
            }
            return Err(Error::QuadratureFailure {
                start: bad.0,
                end: bad.1,
                estimate: bad.2,
            });
        }
        coarse_edges = fine_edges;
        coarse = fine;
    }
    unreachable!()
}
