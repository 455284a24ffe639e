//! q-numbers, Jackson calculus on the truncated lattice, the q-exponential and
//! the crossing map.

mod context;
mod function;
mod lattice;
mod series;

pub use context::{Geometry, Orientation, QContext};
pub use function::{jackson_derivative, jackson_integral, kappa_scale, sesquilinear, LatticeFunction};
pub use lattice::{QLattice, DEFAULT_J_MAX, DEFAULT_J_MIN, DEFAULT_X0};
pub use series::{q_exponential, q_factorial, q_number, QExpSum};
