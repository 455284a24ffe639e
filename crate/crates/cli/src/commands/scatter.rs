use serde::Serialize;

use qscatter::export;
use qscatter::scattering::{
    kappa_shifted, lippmann_schwinger_solve, smatrix_momentum, tmatrix_csv, transition_table,
    unitarity_defect, ChannelSpace,
};

use super::{all_sfamilies, eps_tag, selected, slug, Output};
use crate::config::Scenario;
use crate::CliError;

#[derive(Serialize)]
struct ScatterSummary {
    family: String,
    eps: f64,
    unitarity_defect: f64,
    max_transition: f64,
    kappa_edge_columns: Vec<usize>,
}

pub fn run(scn: &Scenario, only: Option<&str>, out: &mut Output) -> Result<(), CliError> {
    let n = scn.config.n_channels;
    let families: Vec<_> = all_sfamilies().into_iter().filter(|f| selected(only, &f.to_string())).collect();
    let mut summary = Vec::new();
    let mut trend: Vec<Vec<f64>> = Vec::new();
    for (k, &eps) in scn.config.eps.iter().enumerate() {
        let mut row = vec![eps];
        for fam in &families {
            let g = fam.base.geometry();
            let b = scn.basis(g);
            let s = smatrix_momentum(b, scn.potential(g), *fam, eps, n)?;
            let name = slug(&fam.to_string());
            out.write(&format!("smatrix_{name}_{}.csv", eps_tag(k)), &s.to_csv())?;
            let omega = transition_table(&s);
            let cols: Vec<String> = (0..s.len()).map(|p| format!("to{p}")).collect();
            let refs: Vec<&str> = cols.iter().map(|c| c.as_str()).collect();
            out.write(&format!("omega_{name}_{}.csv", eps_tag(k)), &export::table(&refs, omega.clone()))?;
            let shifted = kappa_shifted(&s);
            let defect = unitarity_defect(&s);
            row.push(defect);
            summary.push(ScatterSummary {
                family: fam.to_string(),
                eps,
                unitarity_defect: defect,
                max_transition: omega.iter().flatten().cloned().fold(0.0, f64::max),
                kappa_edge_columns: shifted.edge.iter().enumerate().filter(|e| *e.1).map(|e| e.0).collect(),
            });
            if !fam.tilde {
                let ch = ChannelSpace::new(b, scn.potential(g), n, fam.base.hamiltonian())?;
                let t = lippmann_schwinger_solve(&ch, ch.energies[0], eps)?;
                out.write(&format!("tmatrix_{name}_{}.csv", eps_tag(k)), &tmatrix_csv(&ch, &t))?;
            }
        }
        trend.push(row);
    }
    let mut cols = vec!["eps".to_string()];
    cols.extend(families.iter().map(|f| slug(&f.to_string())));
    let refs: Vec<&str> = cols.iter().map(|c| c.as_str()).collect();
    out.write("eps_trend.csv", &export::table(&refs, trend))?;
    out.write_json("scatter_report.json", &summary)?;
    Ok(())
}
