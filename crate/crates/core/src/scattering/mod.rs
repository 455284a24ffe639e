//! Potentials, Lippmann-Schwinger solves, Born series, interacting Green's
//! functions and momentum-basis S-matrices.
//!
//! Scattering quantities live in a channel space: the lowest modes of a
//! spectral basis with the potential projected onto them. The high end of a
//! finite lattice spectrum is dominated by lattice artefacts, so truncation
//! keeps the physical low-energy block.

mod green;
mod lippmann;
mod potential;
mod smatrix;

pub use green::{
    characteristic_residual, compose_green, conjugate_green, full_green, green_slice_defect,
    FullGreen, GreenFamily, GreenOrder,
};
pub use lippmann::{
    born_operator, born_wavefunction, exact_wavefunction, free_resolvent, lippmann_schwinger_solve,
    resolvent_t, TMatrix,
};
pub use potential::{ChannelSpace, HamiltonianVariant, Potential, PotentialShape, PotentialSpec};
pub use smatrix::{
    kappa_shifted, lorentzian, smatrix_momentum, tmatrix_csv, transition_probability,
    transition_table, unitarity_defect, KappaShifted, Provenance, Route, SFamily, SMatrix,
    SMatrixFamily, SMatrixHeader, TMatrixHeader,
};

#[cfg(test)]
pub(crate) mod fixtures {
    use std::sync::Arc;

    use crate::basis::{build_hamiltonian_basis, WaveBasis};
    use crate::qcalc::{QContext, QLattice};

    use super::{Potential, PotentialShape, PotentialSpec};

    pub fn basis(q: f64) -> Arc<WaveBasis> {
        let ctx = QContext::braided_line(q).unwrap();
        let lattice = Arc::new(QLattice::with_defaults(&ctx).unwrap());
        Arc::new(build_hamiltonian_basis(lattice, 1.0).unwrap())
    }

    pub fn crossed_basis(q: f64) -> Arc<WaveBasis> {
        let ctx = QContext::braided_line(q).unwrap();
        let (lattice, _) = QLattice::with_defaults(&ctx).unwrap().crossed().unwrap();
        Arc::new(build_hamiltonian_basis(Arc::new(lattice), 1.0).unwrap())
    }

    pub fn barrier(b: &WaveBasis, strength: f64) -> Potential {
        let spec = PotentialSpec {
            shape: PotentialShape::Barrier,
            strength,
            width: 0.5,
            center: 0.0,
        };
        Potential::from_spec(b.lattice().clone(), &spec, 0.1).unwrap()
    }
}
