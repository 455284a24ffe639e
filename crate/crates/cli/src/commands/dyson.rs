use serde::Serialize;

use qscatter::dyson::{evolve_coefficients, ode_evolution, smatrix_interaction, window_for, InteractionPotential};
use qscatter::linalg::{self, C64};
use qscatter::scattering::{smatrix_momentum, unitarity_defect, ChannelSpace, SFamily};
use qscatter::{CVector, SMatrixFamily};

use super::{eps_tag, selected, slug, Output};
use crate::config::Scenario;
use crate::CliError;

#[derive(Serialize)]
struct DysonSummary {
    family: String,
    eps: f64,
    window: f64,
    unitarity_defect: f64,
    remote_past_overlap: f64,
    /// Largest entrywise distance to the resolvent-route S-matrix.
    resolvent_distance: f64,
}

pub fn run(scn: &Scenario, only: Option<&str>, out: &mut Output) -> Result<(), CliError> {
    let cfg = &scn.config;
    let mut summary = Vec::new();
    let mut traced = false;
    for f in SMatrixFamily::ALL {
        let fam = SFamily::plain(f);
        if !selected(only, &fam.to_string()) {
            continue;
        }
        let g = f.geometry();
        let ch = ChannelSpace::new(scn.basis(g), scn.potential(g), cfg.n_channels, f.hamiltonian())?;
        let name = slug(&fam.to_string());
        for (k, &eps) in cfg.eps.iter().enumerate() {
            let vi = InteractionPotential::new(ch.clone(), eps)?;
            let window = cfg.window.unwrap_or_else(|| window_for(eps)).max(window_for(eps));
            let s = smatrix_interaction(&vi, fam, window, cfg.tol)?;
            out.write(&format!("dyson_smatrix_{name}_{}.csv", eps_tag(k)), &s.to_csv())?;
            let sm = smatrix_momentum(scn.basis(g), scn.potential(g), fam, eps, cfg.n_channels)?;
            summary.push(DysonSummary {
                family: fam.to_string(),
                eps,
                window,
                unitarity_defect: unitarity_defect(&s),
                remote_past_overlap: s.provenance.map_or(f64::NAN, |p| p.remote_past_overlap),
                resolvent_distance: linalg::max_abs(&(&s.matrix - &sm.matrix)),
            });
            if !traced && g == cfg.ctx.geometry && k == 0 {
                traced = true;
                let samples = cfg.times.samples;
                let times: Vec<f64> = (0..samples)
                    .map(|i| -window + 2.0 * window * i as f64 / (samples - 1) as f64)
                    .collect();
                let mut c0 = CVector::zeros(vi.len());
                c0[0] = C64::new(1.0, 0.0);
                let series = evolve_coefficients(&vi, &c0, -window, &times, cfg.tol)?;
                out.write("coefficients.csv", &series.to_csv())?;
                let u = ode_evolution(&vi, -window, window, cfg.tol)?;
                out.write("drift.csv", &u.drift_csv())?;
            }
        }
    }
    out.write_json("dyson_report.json", &summary)?;
    Ok(())
}
