//! Finite operator calculus for q-deformed non-relativistic scattering on the
//! braided line.
//!
//! Everything lives on a truncated bilateral Jackson lattice `±x0·q^j`:
//!
//! * [`qcalc`]: q-numbers, Jackson derivative and integral, q-exponential,
//!   κ-scalings, the crossing map between the two braided geometries.
//! * [`basis`]: orthonormal energy eigenbases of the free Hamiltonian, expansion
//!   and projection, the q-delta kernel.
//! * [`propagator`]: free propagator kernels, causal wrapping, composition,
//!   conjugation and Schrödinger-residual checks.
//! * [`scattering`]: potentials, Lippmann-Schwinger solves, Born series, full
//!   Green's functions, momentum-basis S-matrices.
//! * [`dyson`]: interaction picture, Dyson series and ODE evolution operators,
//!   interaction-picture S-matrices.

pub mod basis;
pub mod dyson;
pub mod error;
pub mod export;
pub mod linalg;
pub mod propagator;
pub mod qcalc;
pub mod scattering;

pub use basis::{CoefficientVector, WaveBasis};
pub use dyson::{EvolutionOperator, InteractionPotential};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use propagator::{Causality, KernelFamily, KernelVariant, PropagatorKernel};
pub use qcalc::{Geometry, LatticeFunction, Orientation, QContext, QLattice};
pub use scattering::{FullGreen, HamiltonianVariant, Potential, SFamily, SMatrix, SMatrixFamily};
