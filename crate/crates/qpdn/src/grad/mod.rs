//! Hand-derived gradients, their numeric verification, and the optimizer.

mod adam;
mod backward;
mod fdcheck;

pub use adam::{adam_step, OptimizerState};
pub use backward::{add_l2_gradient, backward, backward_into, cross_entropy, l2_penalty, GradSet};
pub use fdcheck::{finite_difference_check, FdReport};
