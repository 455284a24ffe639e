//! The invariant suite behind `qscatter verify`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qscatter::basis::{build_hamiltonian_basis, classical_evolution, CoefficientVector};
use qscatter::dyson::{
    chain, dyson_evolution, ode_evolution, smatrix_interaction, window_for, InteractionPotential,
};
use qscatter::linalg::{self, CMatrix};
use qscatter::propagator::{
    self, compose, conjugate_kernel, crossing_transform_kernel, free_propagator, schrodinger_residual,
    slice_jump_defect,
};
use qscatter::scattering::{
    characteristic_residual, compose_green, conjugate_green, exact_wavefunction, full_green,
    born_wavefunction, lippmann_schwinger_solve, smatrix_momentum, transition_probability,
    unitarity_defect, ChannelSpace, GreenFamily, GreenOrder, PotentialShape, SFamily,
};
use qscatter::{
    Causality, Geometry, HamiltonianVariant, KernelVariant, PropagatorKernel, QContext, QLattice,
    SMatrixFamily, WaveBasis,
};

use crate::config::Scenario;
use crate::report::{Bound, Provenance, Recorder, RunReport};

pub const GROUPS: [&str; 13] = [
    "basis",
    "composition",
    "residual",
    "boundary",
    "conjugation",
    "crossing",
    "classical",
    "green",
    "born",
    "unitarity",
    "transition",
    "crossfm",
    "dyson",
];

const GEOMETRIES: [Geometry; 2] = [Geometry::G1, Geometry::G2];

fn causal(k: PropagatorKernel, c: Causality) -> qscatter::Result<PropagatorKernel> {
    match c {
        Causality::None => Ok(k),
        Causality::Retarded => propagator::make_retarded(&k),
        Causality::Advanced => propagator::make_advanced(&k),
    }
}

/// Slot times `(source, target)` on the side where a causal kernel is nonzero.
fn live_times(v: KernelVariant, c: Causality, early: f64, late: f64) -> (f64, f64) {
    let forward = (c != Causality::Advanced) != v.tilde;
    if forward {
        (early, late)
    } else {
        (late, early)
    }
}

fn plain_families(g: Geometry) -> Vec<SMatrixFamily> {
    SMatrixFamily::ALL.iter().copied().filter(|f| f.geometry() == g).collect()
}

fn basis_checks(scn: &Scenario, r: &mut Recorder) {
    for g in GEOMETRIES {
        let b = scn.basis(g);
        r.record("basis", format!("basis.gram.{g:?}"), b.gram_defect(), 1e-12, Bound::AtMost);
        r.record("basis", format!("basis.completeness.{g:?}"), b.completeness_defect(), 1e-12, Bound::AtMost);
    }
}

fn composition_checks(scn: &Scenario, r: &mut Recorder) {
    let mut rng = ChaCha8Rng::seed_from_u64(scn.config.seed);
    let triples: Vec<[f64; 3]> = (0..5)
        .map(|_| {
            let mut t = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            t.sort_by(f64::total_cmp);
            t
        })
        .collect();
    for g in GEOMETRIES {
        let b = scn.basis(g);
        for v in KernelVariant::all_for(g) {
            for c in [Causality::None, Causality::Retarded, Causality::Advanced] {
                let name = format!("composition.{v}.{c:?}");
                let result = (|| -> qscatter::Result<f64> {
                    let mut worst: f64 = 0.0;
                    for t in &triples {
                        let forward = (c != Causality::Advanced) != v.tilde;
                        let [t0, t1, t2] = if forward || c == Causality::None {
                            *t
                        } else {
                            [t[2], t[1], t[0]]
                        };
                        let k01 = causal(free_propagator(b, v, t0, t1)?, c)?;
                        let k12 = causal(free_propagator(b, v, t1, t2)?, c)?;
                        let k02 = causal(free_propagator(b, v, t0, t2)?, c)?;
                        worst = worst.max(compose(&k01, &k12)?.distance(&k02));
                    }
                    Ok(worst)
                })();
                match result {
                    Ok(m) => r.record("composition", name, m, 1e-12, Bound::AtMost),
                    Err(e) => r.error("composition", name, e),
                }
            }
        }
    }
}

fn residual_checks(scn: &Scenario, r: &mut Recorder) {
    for g in GEOMETRIES {
        let b = scn.basis(g);
        for v in KernelVariant::all_for(g) {
            for c in [Causality::Retarded, Causality::Advanced] {
                let (ts, tt) = live_times(v, c, 0.1, 0.35);
                let res = free_propagator(b, v, ts, tt).and_then(|k| causal(k, c)).and_then(|k| {
                    Ok((schrodinger_residual(&k)?, slice_jump_defect(&k)?))
                });
                match res {
                    Ok((off, jump)) => {
                        r.record("residual", format!("residual.{v}.{c:?}"), off, 1e-10, Bound::AtMost);
                        r.record("residual", format!("jump.{v}.{c:?}"), jump, 1e-10, Bound::AtMost);
                    }
                    Err(e) => r.error("residual", format!("residual.{v}.{c:?}"), e),
                }
            }
        }
    }
}

fn boundary_checks(scn: &Scenario, r: &mut Recorder) {
    for g in GEOMETRIES {
        let b = scn.basis(g);
        for v in KernelVariant::all_for(g) {
            let name = format!("boundary.{v}");
            match free_propagator(b, v, 0.3, 0.3) {
                Ok(k) => {
                    let expected = k.variant_delta() * linalg::C64::new(k.prefactor(), 0.0);
                    r.record("boundary", name, k.distance_to(&expected), 1e-12, Bound::AtMost);
                }
                Err(e) => r.error("boundary", name, e),
            }
        }
    }
}

fn conjugation_checks(scn: &Scenario, r: &mut Recorder) {
    let eps = scn.config.eps[0];
    for g in GEOMETRIES {
        let b = scn.basis(g);
        let pot = scn.potential(g);
        for v in KernelVariant::all_for(g) {
            for c in [Causality::None, Causality::Retarded, Causality::Advanced] {
                let (ts, tt) = live_times(v, c, -0.2, 0.45);
                let name = format!("conjugation.kernel.{v}.{c:?}");
                let res = (|| -> qscatter::Result<f64> {
                    let k = causal(free_propagator(b, v, ts, tt)?, c)?;
                    let conj = conjugate_kernel(&k);
                    let tilde = causal(free_propagator(b, v.conjugate(), conj.t_source, conj.t_target)?, c)?;
                    Ok(conj.distance(&tilde))
                })();
                match res {
                    Ok(m) => r.record("conjugation", name, m, 1e-10, Bound::AtMost),
                    Err(e) => r.error("conjugation", name, e),
                }
            }
        }
        for f in GreenFamily::ALL.iter().filter(|f| f.geometry() == g) {
            let name = format!("conjugation.green.{f}");
            let (ts, tt) = live_times(f.kernel(), f.causality(), 0.0, 0.4);
            let res = (|| -> qscatter::Result<f64> {
                let gf = full_green(b, pot, *f, false, GreenOrder::Exact, ts, tt)?;
                let conj = conjugate_green(&gf);
                let tilde = full_green(b, pot, *f, true, GreenOrder::Exact, conj.t_source, conj.t_target)?;
                Ok(tilde.distance_to(&conj.matrix))
            })();
            match res {
                Ok(m) => r.record("conjugation", name, m, 1e-10, Bound::AtMost),
                Err(e) => r.error("conjugation", name, e),
            }
        }
        for f in plain_families(g) {
            let name = format!("conjugation.smatrix.{}", SFamily::plain(f));
            let res = (|| -> qscatter::Result<f64> {
                let s = smatrix_momentum(b, pot, SFamily::plain(f), eps, scn.config.n_channels)?;
                let st = smatrix_momentum(b, pot, SFamily::tilde(f), eps, scn.config.n_channels)?;
                Ok(linalg::max_abs(&(s.matrix.adjoint() - &st.matrix)))
            })();
            match res {
                Ok(m) => r.record("conjugation", name, m, 1e-10, Bound::AtMost),
                Err(e) => r.error("conjugation", name, e),
            }
        }
    }
}

fn crossing_checks(scn: &Scenario, r: &mut Recorder) {
    let b1 = scn.basis(Geometry::G1);
    let b2 = scn.basis(Geometry::G2);
    let kappa = b1.ctx().kappa;
    for v in KernelVariant::all_for(Geometry::G1) {
        for c in [Causality::None, Causality::Retarded, Causality::Advanced] {
            let name = format!("crossing.{v}.{c:?}");
            let (ts, tt) = live_times(v, c, 0.05, 0.4);
            let res = (|| -> qscatter::Result<f64> {
                let k1 = causal(free_propagator(b1, v, ts, tt)?, c)?;
                let image = crossing_transform_kernel(&k1, b2, &scn.perm)?;
                let k2 = causal(free_propagator(b2, v.crossed(), ts / kappa, tt / kappa)?, c)?;
                Ok(image.distance(&k2))
            })();
            match res {
                Ok(m) => r.record("crossing", name, m, 1e-10, Bound::AtMost),
                Err(e) => r.error("crossing", name, e),
            }
        }
    }
}

/// Relative distance between the q-propagator and the ordinary-calculus
/// propagator on the same nodes, at `t = 1/E_max`.
pub fn classical_defect(q: f64, lattice: (f64, i32, i32), mass: f64) -> qscatter::Result<f64> {
    let ctx = QContext::braided_line(q)?;
    let lat = Arc::new(QLattice::new(&ctx, lattice.0, lattice.1, lattice.2)?);
    let b = Arc::new(build_hamiltonian_basis(lat.clone(), mass)?);
    let t = 1.0 / b.max_energy();
    let k = propagator::retarded(&b, KernelVariant::K1_PRIME, 0.0, t)?;
    let jackson = &k.matrix * k.gamma();
    let classical = classical_evolution(&lat, mass, t)?;
    let w = lat.weights();
    let sim = |m: &CMatrix| CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (w[i] / w[j]).sqrt());
    Ok(linalg::frobenius(&sim(&(jackson - &classical))) / linalg::frobenius(&sim(&classical)))
}

fn classical_checks(scn: &Scenario, r: &mut Recorder) {
    let l = &scn.config.lattice;
    let res: qscatter::Result<Vec<f64>> = [1e-3, 5e-4, 2.5e-4]
        .iter()
        .map(|d| classical_defect(1.0 - d, (l.x0, l.j_min, l.j_max), scn.config.mass))
        .collect();
    match res {
        Ok(e) => {
            r.record("classical", "classical.relative_error", e[0], 1e-2, Bound::AtMost);
            let order = (e[0] / e[1]).log2().min((e[1] / e[2]).log2());
            r.record("classical", "classical.order", order, 0.8, Bound::AtLeast);
        }
        Err(e) => r.error("classical", "classical.relative_error", e),
    }
}

fn green_checks(scn: &Scenario, r: &mut Recorder) {
    for f in GreenFamily::ALL {
        let g = f.geometry();
        let b = scn.basis(g);
        let pot = scn.potential(g);
        let (ty, tx) = live_times(f.kernel(), f.causality(), -0.3, 0.4);
        let tz = 0.1;
        let res = (|| -> qscatter::Result<(f64, f64, f64)> {
            let zero = pot.scaled(0.0);
            let g0 = full_green(b, &zero, f, false, GreenOrder::Exact, ty, tx)?;
            let scale = f.hamiltonian().scale(b.ctx());
            let free = causal(free_propagator(b, f.kernel(), scale * ty, scale * tx)?, f.causality())?;
            let free_limit = g0.distance_to(&free.matrix);
            let order = GreenOrder::Born(2);
            let g1 = full_green(b, pot, f, false, order, ty, tz)?;
            let g2 = full_green(b, pot, f, false, order, tz, tx)?;
            let direct = full_green(b, pot, f, false, order, ty, tx)?;
            let exact = full_green(b, pot, f, false, GreenOrder::Exact, ty, tx)?;
            let residual = characteristic_residual(&direct).max(characteristic_residual(&exact));
            let comp = direct.distance_to(&compose_green(&g1, &g2)?.matrix);
            Ok((free_limit, residual, comp))
        })();
        match res {
            Ok((a, b_, c)) => {
                r.record("green", format!("green.free_limit.{f}"), a, 1e-12, Bound::AtMost);
                r.record("green", format!("green.residual.{f}"), b_, 1e-10, Bound::AtMost);
                r.record("green", format!("green.composition.{f}"), c, 1e-8, Bound::AtMost);
            }
            Err(e) => r.error("green", format!("green.{f}"), e),
        }
    }
}

/// Born-series errors `‖ψ_N − ψ_exact‖` for `N = 0..=order` at `t = 0`, and
/// the spectral radius of the iteration operator.
pub fn born_errors(b: &Arc<WaveBasis>, ch: &ChannelSpace, eps: f64, order: usize) -> qscatter::Result<(Vec<f64>, f64)> {
    let phi = CoefficientVector::unit(b.clone(), 0, 0.0);
    let exact = exact_wavefunction(&phi, ch, eps, &[0.0])?.remove(0);
    let errs = (0..=order)
        .map(|n| {
            let psi = born_wavefunction(&phi, ch, eps, n, &[0.0])?.remove(0);
            Ok((&psi.values - &exact.values).norm())
        })
        .collect::<qscatter::Result<Vec<f64>>>()?;
    let radius = lippmann_schwinger_solve(ch, ch.energies[0], eps)?.spectral_radius;
    Ok((errs, radius))
}

/// Least-squares slope of `ln err` against order, as a geometric base.
pub fn fitted_base(errs: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = errs.iter().enumerate().map(|(n, e)| (n as f64, e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy / sxx).exp()
}

fn born_checks(scn: &Scenario, r: &mut Recorder) {
    let b = scn.basis(Geometry::G1);
    let eps = scn.config.eps[0];
    let order = scn.config.born_order.max(4);
    let res = (|| -> qscatter::Result<()> {
        let unit = scn.potential_with(Geometry::G1, PotentialShape::Barrier, 1.0)?;
        let ch = ChannelSpace::new(b, &unit, scn.config.n_channels, HamiltonianVariant::H)?;
        let r1 = lippmann_schwinger_solve(&ch, ch.energies[0], eps)?.spectral_radius;
        // weakest strength puts the iteration radius at 0.02
        let lambda = 0.02 / r1;
        for m in [1.0, 2.0, 4.0] {
            let ch = ChannelSpace::new(b, &unit.scaled(lambda * m), scn.config.n_channels, HamiltonianVariant::H)?;
            let (errs, radius) = born_errors(b, &ch, eps, order)?;
            let base = fitted_base(&errs[..=4]);
            r.record_note(
                "born",
                format!("born.base.x{m}"),
                (base / radius - 1.0).abs(),
                0.3,
                Bound::AtMost,
                format!("fitted base {base:.6e}, radius {radius:.6e}"),
            );
            r.record("born", format!("born.radius.x{m}"), radius, 0.5, Bound::AtMost);
            if m == 1.0 {
                r.record("born", "born.order4", errs[4], 1e-8, Bound::AtMost);
            }
        }
        Ok(())
    })();
    if let Err(e) = res {
        r.error("born", "born", e);
    }
}

fn vi_for(scn: &Scenario, f: SMatrixFamily, eps: f64) -> qscatter::Result<InteractionPotential> {
    let g = f.geometry();
    let ch = ChannelSpace::new(scn.basis(g), scn.potential(g), scn.config.n_channels, f.hamiltonian())?;
    InteractionPotential::new(ch, eps)
}

fn window_at(scn: &Scenario, eps: f64) -> f64 {
    scn.config.window.unwrap_or_else(|| window_for(eps)).max(window_for(eps))
}

fn unitarity_checks(scn: &Scenario, r: &mut Recorder) {
    let eps0 = scn.config.eps[0];
    let tol = scn.config.tol;
    for f in SMatrixFamily::ALL {
        let fam = SFamily::plain(f);
        let b = scn.basis(f.geometry());
        let pot = scn.potential(f.geometry());
        match vi_for(scn, f, eps0).and_then(|vi| smatrix_interaction(&vi, fam, window_at(scn, eps0), tol)) {
            Ok(s) => r.record("unitarity", format!("unitarity.interaction.{fam}"), unitarity_defect(&s), 1e-6, Bound::AtMost),
            Err(e) => r.error("unitarity", format!("unitarity.interaction.{fam}"), e),
        }
        let defects: qscatter::Result<Vec<f64>> = scn
            .config
            .eps
            .iter()
            .map(|&e| Ok(unitarity_defect(&smatrix_momentum(b, pot, fam, e, scn.config.n_channels)?)))
            .collect();
        match defects {
            Ok(d) => {
                let worst = d
                    .windows(2)
                    .map(|w| if w[1] == 0.0 { 0.0 } else { w[1] / w[0] })
                    .fold(0.0, f64::max);
                r.record_note(
                    "unitarity",
                    format!("unitarity.resolvent_trend.{fam}"),
                    worst,
                    1.2,
                    Bound::AtMost,
                    format!("defects {}", sci(&d)),
                );
            }
            Err(e) => r.error("unitarity", format!("unitarity.resolvent_trend.{fam}"), e),
        }
    }
    let control = (|| -> qscatter::Result<f64> {
        let b = scn.basis(Geometry::G1);
        let v = scn.potential_with(Geometry::G1, PotentialShape::Absorptive, 0.05)?;
        let s = smatrix_momentum(b, &v, SFamily::plain(SMatrixFamily::S1StarPlus), eps0, scn.config.n_channels)?;
        Ok(unitarity_defect(&s))
    })();
    match control {
        Ok(d) => r.record("unitarity", "unitarity.absorptive_control", d, 1e-2, Bound::AtLeast),
        Err(e) => r.error("unitarity", "unitarity.absorptive_control", e),
    }
}

fn transition_checks(scn: &Scenario, r: &mut Recorder) {
    let eps = scn.config.eps[0];
    for f in SMatrixFamily::ALL {
        let g = f.geometry();
        let b = scn.basis(g);
        let pot = scn.potential(g);
        let fam = SFamily::plain(f);
        let res = (|| -> qscatter::Result<()> {
            let s = smatrix_momentum(b, pot, fam, eps, scn.config.n_channels)?;
            let st = smatrix_momentum(b, pot, fam.conjugate(), eps, scn.config.n_channels)?;
            let n = s.len();
            let mut min: f64 = f64::INFINITY;
            let mut pair: f64 = 0.0;
            let mut row: f64 = 0.0;
            for p in 0..n {
                let mut sum = 0.0;
                for pp in 0..n {
                    let w = transition_probability(&s, p, pp);
                    let wt = transition_probability(&st, p, pp);
                    min = min.min(w).min(wt);
                    pair = pair.max((w - wt).abs());
                    sum += w;
                }
                row = row.max((sum - 1.0).abs());
            }
            r.record("transition", format!("transition.nonnegative.{fam}"), min, 0.0, Bound::AtLeast);
            r.record("transition", format!("transition.pairs.{fam}"), pair, 1e-10, Bound::AtMost);
            let defect = unitarity_defect(&s);
            r.record("transition", format!("transition.row_sums.{fam}"), row, defect + 1e-15, Bound::AtMost);
            Ok(())
        })();
        if let Err(e) = res {
            r.error("transition", format!("transition.{fam}"), e);
        }
    }
}

fn crossfm_checks(scn: &Scenario, r: &mut Recorder) {
    let eps = scn.config.eps[0];
    for f in SMatrixFamily::ALL {
        let fam = SFamily::plain(f);
        let g = f.geometry();
        let res = (|| -> qscatter::Result<(f64, f64)> {
            let vi = vi_for(scn, f, eps)?;
            let si = smatrix_interaction(&vi, fam, window_at(scn, eps), scn.config.tol)?;
            let sm = smatrix_momentum(scn.basis(g), scn.potential(g), fam, eps, scn.config.n_channels)?;
            let overlap = si.provenance.map_or(0.0, |p| p.remote_past_overlap);
            Ok((linalg::max_abs(&(&si.matrix - &sm.matrix)), (overlap - 1.0).abs()))
        })();
        match res {
            Ok((d, o)) => {
                r.record("crossfm", format!("crossfm.{fam}"), d, 1e-6, Bound::AtMost);
                r.record("crossfm", format!("crossfm.remote_past.{fam}"), o, 1e-6, Bound::AtMost);
            }
            Err(e) => r.error("crossfm", format!("crossfm.{fam}"), e),
        }
    }
}

fn dyson_checks(scn: &Scenario, r: &mut Recorder) {
    let tol = scn.config.tol;
    for f in [SMatrixFamily::S1StarPlus, SMatrixFamily::S2Minus] {
        let g = f.geometry();
        let label = SFamily::plain(f);
        let res = (|| -> qscatter::Result<()> {
            let shaped = scn.potential_with(g, PotentialShape::Barrier, 0.2)?;
            let ch = ChannelSpace::new(scn.basis(g), &shaped, scn.config.n_channels, f.hamiltonian())?;
            let base = InteractionPotential::new(ch, 0.3)?;
            let errs = [1.0, 0.5, 0.25]
                .iter()
                .map(|&l| {
                    let v = base.scaled(l);
                    let d = dyson_evolution(&v, -10.0, 10.0, 2, 1e-12)?;
                    let o = ode_evolution(&v, -10.0, 10.0, 1e-12)?;
                    Ok(linalg::max_abs(&(d.matrix - o.matrix)))
                })
                .collect::<qscatter::Result<Vec<f64>>>()?;
            let slope = (errs[0] / errs[1]).log2().min((errs[1] / errs[2]).log2());
            let slope_hi = (errs[0] / errs[1]).log2().max((errs[1] / errs[2]).log2());
            let dev = (slope - 3.0).abs().max((slope_hi - 3.0).abs());
            r.record_note("dyson", format!("dyson.order2_scaling.{label}"), dev, 0.3, Bound::AtMost, format!("errors {}", sci(&errs)));

            let vi = vi_for(scn, f, scn.config.eps[0])?;
            let whole = ode_evolution(&vi, -20.0, 15.0, tol)?;
            let a = ode_evolution(&vi, -20.0, 3.0, tol)?;
            let c = ode_evolution(&vi, 3.0, 15.0, tol)?;
            let group = linalg::max_abs(&(chain(&a, &c) - &whole.matrix));
            r.record("dyson", format!("dyson.group.{label}"), group, 10.0 * tol, Bound::AtMost);
            r.record("dyson", format!("dyson.drift.{label}"), whole.max_drift(), tol, Bound::AtMost);
            let zero = vi.scaled(0.0);
            let window = window_at(scn, zero.eps);
            let s0 = smatrix_interaction(&zero, label, window, tol)?;
            let id = linalg::max_abs(&(s0.matrix - linalg::identity(vi.len())));
            r.record("dyson", format!("dyson.zero_potential.{label}"), id, 0.0, Bound::AtMost);
            Ok(())
        })();
        if let Err(e) = res {
            r.error("dyson", format!("dyson.{label}"), e);
        }
    }
}

/// Runs the selected groups (all when `only` is `None`).
pub fn run(scn: &Scenario, only: Option<&str>) -> RunReport {
    let hermitian = scn.potentials.iter().all(|p| p.is_hermitian());
    let expected_fail = if hermitian {
        Vec::new()
    } else {
        vec!["unitarity".to_string(), "dyson".to_string(), "transition".to_string()]
    };
    let mut r = Recorder::new(expected_fail);
    type Group = fn(&Scenario, &mut Recorder);
    let groups: [(&str, Group); 13] = [
        ("basis", basis_checks),
        ("composition", composition_checks),
        ("residual", residual_checks),
        ("boundary", boundary_checks),
        ("conjugation", conjugation_checks),
        ("crossing", crossing_checks),
        ("classical", classical_checks),
        ("green", green_checks),
        ("born", born_checks),
        ("unitarity", unitarity_checks),
        ("transition", transition_checks),
        ("crossfm", crossfm_checks),
        ("dyson", dyson_checks),
    ];
    for (name, f) in groups {
        if only.is_none_or(|o| o == name) {
            f(scn, &mut r);
        }
    }
    r.finish(Provenance {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: scn.config.hash(),
    })
}

fn sci(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(" ")
}
