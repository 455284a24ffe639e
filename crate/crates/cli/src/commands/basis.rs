use std::sync::Arc;

use serde::Serialize;

use qscatter::basis::build_qexp_basis;
use qscatter::export;
use qscatter::Geometry;

use super::{selected, Output};
use crate::config::Scenario;
use crate::CliError;

#[derive(Serialize)]
struct BasisSummary {
    geometry: Geometry,
    modes: usize,
    vol: f64,
    gram_defect: f64,
    completeness_defect: f64,
    min_energy: f64,
    max_energy: f64,
}

pub fn run(scn: &Scenario, only: Option<&str>, qexp: bool, out: &mut Output) -> Result<(), CliError> {
    let mut summary = Vec::new();
    let mut rows = Vec::new();
    for g in [Geometry::G1, Geometry::G2] {
        if !selected(only, &format!("{g:?}")) {
            continue;
        }
        let b = scn.basis(g);
        out.write(&format!("basis_{g:?}.csv"), &b.to_csv())?;
        for (k, (&p, &e)) in b.momenta().iter().zip(b.energies()).enumerate() {
            rows.push(vec![g.label() as f64, k as f64, p, e]);
        }
        summary.push(BasisSummary {
            geometry: g,
            modes: b.len(),
            vol: b.vol(),
            gram_defect: b.gram_defect(),
            completeness_defect: b.completeness_defect(),
            min_energy: b.energies().iter().cloned().fold(f64::INFINITY, f64::min),
            max_energy: b.max_energy(),
        });
    }
    out.write("spectrum.csv", &export::table(&["geometry", "k", "momentum", "energy"], rows))?;
    out.write_json("basis_report.json", &summary)?;
    if qexp {
        let g = scn.config.ctx.geometry;
        let b = scn.basis(g);
        let (qb, report) = build_qexp_basis(
            Arc::clone(b.lattice()),
            scn.config.mass,
            &scn.config.qexp.momenta,
            scn.config.qexp.n_trunc,
        )?;
        out.write(&format!("qexp_basis_{g:?}.csv"), &qb.to_csv())?;
        out.write_json("qexp_report.json", &report)?;
    }
    Ok(())
}
