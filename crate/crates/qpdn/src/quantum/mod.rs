//! Quantum-probabilistic primitives: polar complex arithmetic, unit states,
//! density matrices, Born-rule measurement, and validation.

mod density;
mod eigen;
mod polar;
mod random;
mod state;
mod validate;

pub use density::{
    born_probability, born_probability_factored, mix, pure_projector, HermitianMatrix,
    MixtureWeights,
};
pub use eigen::{hermitian_eigenvalues, symmetric_eigenvalues};
pub use polar::{canonical_phase, interference_probability, polar_add, Polar};
pub use random::{orthonormal_states, random_state};
pub use state::{superpose, PolarState};
pub use validate::{validate_density, DensityReport};
