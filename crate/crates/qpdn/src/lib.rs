//! Quantum probability driven text classification.
//!
//! Words are unit-norm complex vectors stored in amplitude/phase form.
//! A sentence is the mixture (density matrix) of its word projectors under
//! softmax term weights, classified by trainable projective measurements
//! followed by a dense softmax layer. Gradients are derived by hand against
//! the polar parametrization; nothing here depends on an autodiff framework.
//!
//! The numeric core (`quantum`, `model`, `grad`) is generic over the scalar
//! type through [`scalar::Real`]; the data and training layers fix `f64`.

pub mod data;
pub mod error;
pub mod grad;
pub mod mat;
pub mod model;
pub mod quantum;
pub mod scalar;
pub mod tol;
pub mod train;

pub use error::{Error, Result};

/// Default-precision aliases for the generic core types.
pub type Polar64 = quantum::Polar<f64>;
pub type PolarState64 = quantum::PolarState<f64>;
pub type DensityMatrix64 = quantum::HermitianMatrix<f64>;
pub type MixtureWeights64 = quantum::MixtureWeights<f64>;
pub type Mat64 = mat::Mat<f64>;
pub type ParamSet64 = model::ParamSet<f64>;
pub type GradSet64 = grad::GradSet<f64>;
pub type ForwardCache64 = model::ForwardCache<f64>;
pub type OptimizerState64 = grad::OptimizerState<f64>;
