//! Trainable parameter tables and the projection that keeps them on the
//! state manifold.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::model::variant::VariantTag;
use crate::quantum::canonical_phase;
use crate::scalar::Real;

/// Canonical enumeration of the parameter blocks. Optimizer updates,
/// gradient storage, finite differences, and the checkpoint codec all
/// traverse blocks in this order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamBlock {
    /// Word amplitudes R, vocab × n.
    Amplitude,
    /// Word phases Phi, vocab × n.
    Phase,
    /// Term-weight logits Pi, vocab.
    TermLogit,
    /// Measurement amplitudes, k × n.
    MeasAmplitude,
    /// Measurement phases, k × n.
    MeasPhase,
    /// Dense weights W, feature_dim × labels.
    DenseWeight,
    /// Dense bias b, labels.
    DenseBias,
}

pub const PARAM_BLOCKS: [ParamBlock; 7] = [
    ParamBlock::Amplitude,
    ParamBlock::Phase,
    ParamBlock::TermLogit,
    ParamBlock::MeasAmplitude,
    ParamBlock::MeasPhase,
    ParamBlock::DenseWeight,
    ParamBlock::DenseBias,
];

impl ParamBlock {
    pub fn name(self) -> &'static str {
        match self {
            ParamBlock::Amplitude => "R",
            ParamBlock::Phase => "Phi",
            ParamBlock::TermLogit => "Pi",
            ParamBlock::MeasAmplitude => "V_amplitudes",
            ParamBlock::MeasPhase => "V_phases",
            ParamBlock::DenseWeight => "W",
            ParamBlock::DenseBias => "b",
        }
    }

    /// Whether the optimizer moves this block under the given variant.
    pub fn trains(self, variant: VariantTag) -> bool {
        match self {
            ParamBlock::Amplitude => variant.trains_amplitudes(),
            ParamBlock::Phase => variant.trains_phases(),
            ParamBlock::TermLogit => variant.trains_term_weights(),
            ParamBlock::MeasAmplitude | ParamBlock::MeasPhase => variant.trains_measurements(),
            ParamBlock::DenseWeight | ParamBlock::DenseBias => true,
        }
    }

    /// Whether the forward pass reads this block under the given variant.
    /// A frozen block that is still read has a nonzero loss sensitivity,
    /// which matters when checking gradients numerically.
    pub fn used(self, variant: VariantTag) -> bool {
        match self {
            ParamBlock::Amplitude | ParamBlock::Phase => true,
            ParamBlock::TermLogit => variant.is_quantum(),
            ParamBlock::MeasAmplitude | ParamBlock::MeasPhase => variant.uses_measurements(),
            ParamBlock::DenseWeight | ParamBlock::DenseBias => true,
        }
    }

    /// Whether the L2 term covers this block. Regularization reaches the
    /// amplitude table and the dense weights only, and never a frozen block.
    pub fn regularized(self, variant: VariantTag) -> bool {
        match self {
            ParamBlock::Amplitude => variant.trains_amplitudes(),
            ParamBlock::DenseWeight => true,
            _ => false,
        }
    }
}

/// All trainable tables of one model. Word tables are stored one row per
/// vocabulary entry; measurement tables one row per measurement state.
///
/// Invariants maintained through `renormalize` (not enforced on every
/// mutation, since gradient steps intentionally leave the manifold):
/// amplitude rows unit-norm and non-negative, phases in [-π, π].
#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet<T> {
    pub embedding_dim: usize,
    pub vocab_size: usize,
    pub measurement_count: usize,
    pub label_count: usize,
    pub variant: VariantTag,
    /// R: vocab × n amplitudes.
    pub amplitude: Mat<T>,
    /// Phi: vocab × n phases.
    pub phase: Mat<T>,
    /// Pi: per-word term-weight logits.
    pub term_logit: Vec<T>,
    /// Measurement amplitudes: k × n.
    pub meas_amplitude: Mat<T>,
    /// Measurement phases: k × n.
    pub meas_phase: Mat<T>,
    /// W: feature_dim × labels.
    pub dense_weight: Mat<T>,
    /// b: labels.
    pub dense_bias: Vec<T>,
}

impl<T: Real> ParamSet<T> {
    pub fn zeros(
        embedding_dim: usize,
        vocab_size: usize,
        measurement_count: usize,
        label_count: usize,
        variant: VariantTag,
    ) -> Self {
        let feature_dim = variant.feature_dim(embedding_dim, measurement_count);
        Self {
            embedding_dim,
            vocab_size,
            measurement_count,
            label_count,
            variant,
            amplitude: Mat::zeros(vocab_size, embedding_dim),
            phase: Mat::zeros(vocab_size, embedding_dim),
            term_logit: vec![T::zero(); vocab_size],
            meas_amplitude: Mat::zeros(measurement_count, embedding_dim),
            meas_phase: Mat::zeros(measurement_count, embedding_dim),
            dense_weight: Mat::zeros(feature_dim, label_count),
            dense_bias: vec![T::zero(); label_count],
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.dense_weight.rows()
    }

    /// Total number of scalar parameters.
    pub fn total_len(&self) -> usize {
        PARAM_BLOCKS.iter().map(|&b| self.block(b).len()).sum()
    }

    pub fn block(&self, block: ParamBlock) -> &[T] {
        match block {
            ParamBlock::Amplitude => self.amplitude.data(),
            ParamBlock::Phase => self.phase.data(),
            ParamBlock::TermLogit => &self.term_logit,
            ParamBlock::MeasAmplitude => self.meas_amplitude.data(),
            ParamBlock::MeasPhase => self.meas_phase.data(),
            ParamBlock::DenseWeight => self.dense_weight.data(),
            ParamBlock::DenseBias => &self.dense_bias,
        }
    }

    pub fn block_mut(&mut self, block: ParamBlock) -> &mut [T] {
        match block {
            ParamBlock::Amplitude => self.amplitude.data_mut(),
            ParamBlock::Phase => self.phase.data_mut(),
            ParamBlock::TermLogit => &mut self.term_logit,
            ParamBlock::MeasAmplitude => self.meas_amplitude.data_mut(),
            ParamBlock::MeasPhase => self.meas_phase.data_mut(),
            ParamBlock::DenseWeight => self.dense_weight.data_mut(),
            ParamBlock::DenseBias => &mut self.dense_bias,
        }
    }

    pub fn check_token(&self, id: usize) -> Result<()> {
        if id >= self.vocab_size {
            return Err(Error::TokenOutOfRange {
                id,
                vocab_size: self.vocab_size,
            });
        }
        Ok(())
    }
}

/// Clamp one amplitude row to the non-negative unit sphere. An all-zero row
/// snaps to the uniform state rather than dividing by zero.
fn project_amplitude_row<T: Real>(row: &mut [T]) {
    for r in row.iter_mut() {
        if *r < T::zero() {
            *r = T::zero();
        }
    }
    let norm = row.iter().map(|&r| r * r).sum::<T>().sqrt();
    if norm == T::zero() {
        let uniform = (T::one() / T::of(row.len() as f64)).sqrt();
        row.fill(uniform);
    } else {
        for r in row.iter_mut() {
            *r /= norm;
        }
    }
}

fn wrap_phase_rows<T: Real>(m: &mut Mat<T>) {
    for p in m.data_mut() {
        *p = canonical_phase(*p);
    }
}

/// Project parameters back onto the state manifold after gradient steps:
/// clamp amplitudes non-negative, renormalize rows to unit L2 norm, wrap
/// phases into [-π, π]. Frozen blocks are left untouched so they stay
/// bit-identical to initialization, and the classical baseline skips the
/// projection entirely because its tables are unconstrained reals.
pub fn renormalize<T: Real>(params: &mut ParamSet<T>, variant: VariantTag) {
    if !variant.is_quantum() {
        return;
    }
    if variant.trains_amplitudes() {
        for w in 0..params.vocab_size {
            project_amplitude_row(params.amplitude.row_mut(w));
        }
    }
    wrap_phase_rows(&mut params.phase);
    if variant.trains_measurements() {
        for j in 0..params.measurement_count {
            project_amplitude_row(params.meas_amplitude.row_mut(j));
        }
        wrap_phase_rows(&mut params.meas_phase);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_params() -> ParamSet<f64> {
        let mut p = ParamSet::zeros(2, 3, 2, 2, VariantTag::Full);
        for w in 0..3 {
            p.amplitude.row_mut(w).copy_from_slice(&[0.6, 0.8]);
        }
        for j in 0..2 {
            p.meas_amplitude.row_mut(j).copy_from_slice(&[1.0, 0.0]);
        }
        p
    }

    #[test]
    fn renormalize_clamps_and_rescales() {
        let mut p = small_params();
        p.amplitude.row_mut(0).copy_from_slice(&[-0.3, 2.0]);
        p.phase.row_mut(0)[0] = 7.0;
        renormalize(&mut p, VariantTag::Full);
        assert_eq!(p.amplitude.row(0), &[0.0, 1.0]);
        let wrapped = p.phase.row(0)[0];
        assert!((-std::f64::consts::PI..=std::f64::consts::PI).contains(&wrapped));
        // Untouched unit rows stay unit.
        let n: f64 = p.amplitude.row(1).iter().map(|r| r * r).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn renormalize_snaps_zero_row_to_uniform() {
        let mut p = small_params();
        p.amplitude.row_mut(1).copy_from_slice(&[0.0, 0.0]);
        renormalize(&mut p, VariantTag::Full);
        let u = (0.5f64).sqrt();
        assert_eq!(p.amplitude.row(1), &[u, u]);
    }

    #[test]
    fn renormalize_is_idempotent_within_arithmetic_tolerance() {
        let mut p = small_params();
        p.amplitude.row_mut(0).copy_from_slice(&[0.2, 1.7]);
        renormalize(&mut p, VariantTag::Full);
        let once = p.clone();
        renormalize(&mut p, VariantTag::Full);
        for (a, b) in once.amplitude.data().iter().zip(p.amplitude.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn renormalize_leaves_frozen_blocks_bit_identical() {
        let mut p = small_params();
        p.amplitude.row_mut(0).copy_from_slice(&[0.5, 0.5]); // off-manifold
        let before = p.amplitude.clone();
        renormalize(&mut p, VariantTag::FixedAmplitude);
        assert_eq!(p.amplitude, before);

        let mut p = small_params();
        p.meas_amplitude.row_mut(0).copy_from_slice(&[0.4, 0.4]);
        let before = p.meas_amplitude.clone();
        renormalize(&mut p, VariantTag::FixedOrthogonalProjectors);
        assert_eq!(p.meas_amplitude, before);
    }

    #[test]
    fn renormalize_skips_classical_baseline() {
        let mut p = ParamSet::zeros(2, 3, 2, 2, VariantTag::RealDoubleDim);
        p.amplitude.row_mut(0).copy_from_slice(&[-5.0, 9.0]);
        p.phase.row_mut(0).copy_from_slice(&[88.0, -42.0]);
        let (amp, ph) = (p.amplitude.clone(), p.phase.clone());
        renormalize(&mut p, VariantTag::RealDoubleDim);
        assert_eq!(p.amplitude, amp);
        assert_eq!(p.phase, ph);
    }

    #[test]
    fn total_len_matches_block_sum() {
        let p = small_params();
        // 3*2 + 3*2 + 3 + 2*2 + 2*2 + 2*2 + 2
        assert_eq!(p.total_len(), 6 + 6 + 3 + 4 + 4 + 4 + 2);
    }
}
