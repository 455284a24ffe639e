use serde::Serialize;

use qscatter::propagator::{self, schrodinger_residual, slice_jump_defect};
use qscatter::{Causality, KernelVariant};

use super::{all_variants, selected, slug, Output};
use crate::config::Scenario;
use crate::CliError;

#[derive(Serialize)]
struct KernelSummary {
    file: String,
    variant: String,
    causality: Causality,
    t_source: f64,
    t_target: f64,
    /// Off-slice Schrödinger residual; absent on the source slice or outside
    /// the causal support.
    residual: Option<f64>,
    slice_jump: Option<f64>,
}

fn causal(b: &std::sync::Arc<qscatter::WaveBasis>, v: KernelVariant, c: Causality, ts: f64, tt: f64) -> qscatter::Result<qscatter::PropagatorKernel> {
    match c {
        Causality::None => propagator::free_propagator(b, v, ts, tt),
        Causality::Retarded => propagator::retarded(b, v, ts, tt),
        Causality::Advanced => propagator::advanced(b, v, ts, tt),
    }
}

pub fn run(scn: &Scenario, only: Option<&str>, out: &mut Output) -> Result<(), CliError> {
    let ts = scn.config.times.t_source;
    let tt = scn.config.times.t_target;
    let mut summary = Vec::new();
    for v in all_variants() {
        if !selected(only, &v.to_string()) {
            continue;
        }
        let b = scn.basis(v.label);
        for c in [Causality::None, Causality::Retarded, Causality::Advanced] {
            let k = causal(b, v, c, ts, tt)?;
            let file = format!("kernel_{}_{c:?}.csv", slug(&v.to_string())).to_lowercase();
            out.write(&file, &k.to_dump())?;
            let live = c != Causality::None && qscatter::linalg::max_abs(&k.matrix) > 0.0 && ts != tt;
            summary.push(KernelSummary {
                file,
                variant: v.to_string(),
                causality: c,
                t_source: ts,
                t_target: tt,
                residual: live.then(|| schrodinger_residual(&k)).transpose()?,
                slice_jump: (c != Causality::None).then(|| slice_jump_defect(&k)).transpose()?,
            });
        }
    }
    out.write_json("propagate_report.json", &summary)?;
    Ok(())
}
