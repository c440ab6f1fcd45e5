//! Adam with bias correction and optional decoupled L2 decay.

use crate::error::{Error, Result};
use crate::grad::backward::GradSet;
use crate::model::{ParamSet, PARAM_BLOCKS};
use crate::scalar::Real;

/// First and second moment accumulators plus hyperparameters. Frozen
/// blocks are masked out at construction so neither the update nor the
/// decoupled decay can move them.
#[derive(Clone, Debug)]
pub struct OptimizerState<T> {
    pub step: u64,
    pub learning_rate: T,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
    /// Decoupled decay strength; each decayed entry shrinks by
    /// lr · 2 · l2_ratio · θ per step, matching the gradient of
    /// l2_ratio · Σθ². Training that folds L2 into the gradient instead
    /// must leave this at zero.
    pub l2_ratio: T,
    m: GradSet<T>,
    v: GradSet<T>,
    trains: [bool; PARAM_BLOCKS.len()],
    decays: [bool; PARAM_BLOCKS.len()],
}

impl<T: Real> OptimizerState<T> {
    pub fn new(params: &ParamSet<T>, learning_rate: T, l2_ratio: T) -> Self {
        let variant = params.variant;
        let mut trains = [false; PARAM_BLOCKS.len()];
        let mut decays = [false; PARAM_BLOCKS.len()];
        for (i, &block) in PARAM_BLOCKS.iter().enumerate() {
            trains[i] = block.trains(variant);
            decays[i] = trains[i] && block.regularized(variant);
        }
        Self {
            step: 0,
            learning_rate,
            beta1: T::of(0.9),
            beta2: T::of(0.999),
            epsilon: T::of(1e-8),
            l2_ratio,
            m: GradSet::zeros_like(params),
            v: GradSet::zeros_like(params),
            trains,
            decays,
        }
    }
}

/// One Adam update. Returns a divergence error on non-finite gradients so
/// callers can abort a blown-up run instead of silently poisoning the
/// moment accumulators.
pub fn adam_step<T: Real>(
    params: &mut ParamSet<T>,
    grads: &GradSet<T>,
    state: &mut OptimizerState<T>,
) -> Result<()> {
    if !grads.matches(params) {
        return Err(Error::DimensionMismatch {
            expected: params.total_len(),
            actual: PARAM_BLOCKS.iter().map(|&b| grads.block(b).len()).sum(),
        });
    }
    state.step += 1;
    let t = state.step as i32;
    let bc1 = T::one() - state.beta1.powi(t);
    let bc2 = T::one() - state.beta2.powi(t);
    let lr = state.learning_rate;
    let (b1, b2) = (state.beta1, state.beta2);
    let one = T::one();
    let decay_factor = T::two() * state.l2_ratio * lr;

    for (i, &block) in PARAM_BLOCKS.iter().enumerate() {
        if !state.trains[i] {
            continue;
        }
        let g_slice = grads.block(block);
        for &g in g_slice {
            if !g.is_finite() {
                return Err(Error::Divergence {
                    context: format!("non-finite gradient in block {}", block.name()),
                });
            }
        }
        let m_slice = state.m.block_mut(block);
        for (&g, m) in g_slice.iter().zip(m_slice.iter_mut()) {
            *m = b1 * *m + (one - b1) * g;
        }
        let v_slice = state.v.block_mut(block);
        for (&g, v) in g_slice.iter().zip(v_slice.iter_mut()) {
            *v = b2 * *v + (one - b2) * g * g;
        }
        let m_slice = state.m.block(block);
        let v_slice = state.v.block(block);
        let theta = params.block_mut(block);
        let decays = state.decays[i];
        for j in 0..theta.len() {
            let m_hat = m_slice[j] / bc1;
            let v_hat = v_slice[j] / bc2;
            theta[j] -= lr * m_hat / (v_hat.sqrt() + state.epsilon);
            if decays {
                theta[j] -= decay_factor * theta[j];
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VariantTag;
    use crate::tol::TOL;

    fn tiny_params() -> ParamSet<f64> {
        let mut p = ParamSet::zeros(2, 2, 1, 2, VariantTag::Full);
        p.amplitude.row_mut(0).copy_from_slice(&[0.6, 0.8]);
        p.amplitude.row_mut(1).copy_from_slice(&[1.0, 0.0]);
        p.meas_amplitude.row_mut(0).copy_from_slice(&[1.0, 0.0]);
        p.dense_weight.set(0, 0, 0.5);
        p
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        // With bias correction, step one moves each coordinate by exactly
        // lr·g/(|g| + ε·√(1-β2)/... ) ≈ lr·sign(g) for any gradient scale.
        let mut p = tiny_params();
        let mut grads = GradSet::zeros_like(&p);
        grads.dense_bias[0] = 0.3;
        let mut opt = OptimizerState::new(&p, 0.01, 0.0);
        adam_step(&mut p, &grads, &mut opt).unwrap();
        assert!((p.dense_bias[0] + 0.01).abs() < 1e-6);
        assert_eq!(opt.step, 1);
    }

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut p = tiny_params();
        let before = p.clone();
        let grads = GradSet::zeros_like(&p);
        let mut opt = OptimizerState::new(&p, 0.05, 0.0);
        for _ in 0..3 {
            adam_step(&mut p, &grads, &mut opt).unwrap();
        }
        assert_eq!(p, before);
    }

    #[test]
    fn decoupled_decay_shrinks_zero_gradient_weight() {
        let mut p = tiny_params();
        let grads = GradSet::zeros_like(&p);
        let mut opt = OptimizerState::new(&p, 0.1, 0.01);
        adam_step(&mut p, &grads, &mut opt).unwrap();
        let expected = 0.5 * (1.0 - 2.0 * 0.01 * 0.1);
        assert!((p.dense_weight.get(0, 0) - expected).abs() < TOL.arithmetic);
        // Amplitudes decay too (regularized), bias does not.
        assert!(p.amplitude.get(0, 0) < 0.6);
        assert_eq!(p.dense_bias[0], 0.0);
    }

    #[test]
    fn frozen_blocks_never_move_even_with_nonzero_gradient() {
        let mut p = tiny_params();
        p.variant = VariantTag::FixedAmplitude;
        let mut grads = GradSet::zeros_like(&p);
        grads.amplitude.row_mut(0).copy_from_slice(&[1.0, 1.0]);
        let mut opt = OptimizerState::new(&p, 0.1, 0.05);
        let before = p.amplitude.clone();
        adam_step(&mut p, &grads, &mut opt).unwrap();
        assert_eq!(p.amplitude, before);
    }

    #[test]
    fn non_finite_gradient_reports_divergence() {
        let mut p = tiny_params();
        let mut grads = GradSet::zeros_like(&p);
        grads.dense_bias[0] = f64::NAN;
        let mut opt = OptimizerState::new(&p, 0.1, 0.0);
        let err = adam_step(&mut p, &grads, &mut opt).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn adam_matches_scalar_reference_for_three_steps() {
        // Hand-rolled scalar Adam over a constant gradient.
        let mut p = tiny_params();
        let mut grads = GradSet::zeros_like(&p);
        grads.dense_bias[1] = 0.2;
        let mut opt = OptimizerState::new(&p, 0.01, 0.0);
        let (mut m, mut v, mut theta) = (0.0f64, 0.0f64, 0.0f64);
        for t in 1..=3 {
            adam_step(&mut p, &grads, &mut opt).unwrap();
            m = 0.9 * m + 0.1 * 0.2;
            v = 0.999 * v + 0.001 * 0.04;
            let m_hat = m / (1.0 - 0.9f64.powi(t));
            let v_hat = v / (1.0 - 0.999f64.powi(t));
            theta -= 0.01 * m_hat / (v_hat.sqrt() + 1e-8);
            assert!((p.dense_bias[1] - theta).abs() < 1e-15, "step {t}");
        }
    }
}
