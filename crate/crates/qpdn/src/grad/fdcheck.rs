//! Central-difference verification of the analytic gradients.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grad::backward::{backward, cross_entropy, l2_penalty, GradSet};
use crate::model::{forward, ParamBlock, ParamSet, VariantTag, PARAM_BLOCKS};
use crate::scalar::Real;

/// Outcome of one finite-difference sweep.
#[derive(Clone, Debug)]
pub struct FdReport<T> {
    pub max_relative_error: T,
    pub worst_block: &'static str,
    pub worst_index: usize,
    pub worst_analytic: T,
    pub worst_numeric: T,
    /// Coordinates compared.
    pub checked: usize,
    /// Blocks excluded because they are frozen yet still read by the
    /// forward pass: the loss is sensitive to them but the optimizer never
    /// moves them, so they are outside the differentiated parameter space.
    pub skipped_blocks: Vec<&'static str>,
}

/// Compare the analytic gradient of (cross-entropy + L2) against central
/// differences at the given epsilon, over every optimizable coordinate
/// (or a seeded sample of `max_coords` of them when the model is larger).
///
/// The relative error denominator is floored at 1e-6: central differences
/// of an O(1) loss at ε = 1e-5 carry absolute noise around 1e-11, so
/// ratios against smaller gradients would measure noise, not correctness.
#[allow(clippy::too_many_arguments)]
pub fn finite_difference_check<T: Real>(
    params: &ParamSet<T>,
    tokens: &[usize],
    label: usize,
    variant: VariantTag,
    l2_ratio: T,
    epsilon: T,
    max_coords: usize,
    seed: u64,
) -> Result<FdReport<T>> {
    let cache = forward(params, tokens, variant)?;
    let analytic: GradSet<T> = backward(params, &cache, label, l2_ratio)?;

    let mut skipped_blocks = Vec::new();
    let mut active: Vec<(ParamBlock, usize)> = Vec::new();
    for block in PARAM_BLOCKS {
        if !block.trains(variant) && block.used(variant) {
            skipped_blocks.push(block.name());
            continue;
        }
        active.push((block, params.block(block).len()));
    }
    let total: usize = active.iter().map(|&(_, len)| len).sum();

    let coords: Vec<usize> = if total <= max_coords {
        (0..total).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = rand::seq::index::sample(&mut rng, total, max_coords).into_vec();
        picked.sort_unstable();
        picked
    };

    let mut work = params.clone();
    let mut report = FdReport {
        max_relative_error: T::zero(),
        worst_block: "",
        worst_index: 0,
        worst_analytic: T::zero(),
        worst_numeric: T::zero(),
        checked: 0,
        skipped_blocks,
    };
    let floor = T::of(1e-6);

    for flat in coords {
        let (block, index) = locate(&active, flat);
        let original = work.block(block)[index];

        work.block_mut(block)[index] = original + epsilon;
        let plus = objective(&work, tokens, label, variant, l2_ratio)?;
        work.block_mut(block)[index] = original - epsilon;
        let minus = objective(&work, tokens, label, variant, l2_ratio)?;
        work.block_mut(block)[index] = original;

        let numeric = (plus - minus) / (T::two() * epsilon);
        let a = analytic.block(block)[index];
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(floor);
        report.checked += 1;
        if rel > report.max_relative_error {
            report.max_relative_error = rel;
            report.worst_block = block.name();
            report.worst_index = index;
            report.worst_analytic = a;
            report.worst_numeric = numeric;
        }
    }
    Ok(report)
}

fn locate(active: &[(ParamBlock, usize)], mut flat: usize) -> (ParamBlock, usize) {
    for &(block, len) in active {
        if flat < len {
            return (block, flat);
        }
        flat -= len;
    }
    unreachable!("coordinate {flat} beyond active parameter space");
}

fn objective<T: Real>(
    params: &ParamSet<T>,
    tokens: &[usize],
    label: usize,
    variant: VariantTag,
    l2_ratio: T,
) -> Result<T> {
    let cache = forward(params, tokens, variant)?;
    Ok(cross_entropy(&cache.probabilities, label)? + l2_penalty(params, variant, l2_ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::Mat;
    use crate::model::renormalize;
    use crate::quantum::random_state;
    use rand::Rng;

    fn random_params(variant: VariantTag, seed: u64) -> ParamSet<f64> {
        let (n, vocab, k, labels) = (3usize, 5usize, 2usize, 2usize);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = ParamSet::zeros(n, vocab, k, labels, variant);
        for w in 0..vocab {
            let s = random_state::<f64, _>(n, &mut rng);
            p.amplitude.row_mut(w).copy_from_slice(s.amplitudes());
            p.phase.row_mut(w).copy_from_slice(s.phases());
            p.term_logit[w] = rng.gen_range(-0.5..0.5);
        }
        for j in 0..k {
            let s = random_state::<f64, _>(n, &mut rng);
            p.meas_amplitude.row_mut(j).copy_from_slice(s.amplitudes());
            p.meas_phase.row_mut(j).copy_from_slice(s.phases());
        }
        let feature_dim = variant.feature_dim(n, k);
        p.dense_weight = Mat::zeros(feature_dim, labels);
        for j in 0..feature_dim {
            for l in 0..labels {
                p.dense_weight.set(j, l, rng.gen_range(-0.5..0.5));
            }
        }
        for l in 0..labels {
            p.dense_bias[l] = rng.gen_range(-0.5..0.5);
        }
        renormalize(&mut p, variant);
        p
    }

    #[test]
    fn full_variant_gradient_passes_at_1e4() {
        let p = random_params(VariantTag::Full, 5);
        let report = finite_difference_check(
            &p,
            &[0, 3, 1, 3],
            1,
            VariantTag::Full,
            1e-4,
            1e-5,
            10_000,
            0,
        )
        .unwrap();
        assert!(
            report.max_relative_error < 1e-4,
            "worst {} at {}: analytic {} vs numeric {}",
            report.worst_block,
            report.worst_index,
            report.worst_analytic,
            report.worst_numeric
        );
        assert_eq!(report.checked, p.total_len());
        assert!(report.skipped_blocks.is_empty());
    }

    #[test]
    fn frozen_used_blocks_are_excluded() {
        let p = random_params(VariantTag::FixedAmplitude, 6);
        let report = finite_difference_check(
            &p,
            &[2, 4],
            0,
            VariantTag::FixedAmplitude,
            0.0,
            1e-5,
            10_000,
            0,
        )
        .unwrap();
        assert_eq!(report.skipped_blocks, vec!["R"]);
        assert!(report.max_relative_error < 1e-4);
    }

    #[test]
    fn sampling_caps_the_coordinate_count() {
        let p = random_params(VariantTag::Full, 7);
        let report =
            finite_difference_check(&p, &[1, 2], 0, VariantTag::Full, 0.0, 1e-5, 10, 42).unwrap();
        assert_eq!(report.checked, 10);
    }
}
