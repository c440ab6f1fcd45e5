//! Forward pass: sentence → mixture → measurement probabilities → class
//! distribution, with the intermediates each variant's backward pass needs.
//!
//! The pass reads the parameter tables as-is and never renormalizes them:
//! projection back onto the state manifold happens between optimizer steps,
//! so the loss stays smooth in the raw tables and numeric derivative checks
//! are meaningful.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::model::params::ParamSet;
use crate::model::variant::VariantTag;
use crate::quantum::{mix, HermitianMatrix, MixtureWeights, PolarState};
use crate::scalar::Real;

/// Numerically stable softmax (max-subtracted).
pub fn softmax<T: Real>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// The word state |w_t⟩ read straight from the parameter tables.
pub fn embed_word<T: Real>(params: &ParamSet<T>, token: usize) -> Result<PolarState<T>> {
    params.check_token(token)?;
    Ok(PolarState::from_raw(
        params.amplitude.row(token).to_vec(),
        params.phase.row(token).to_vec(),
    ))
}

/// Softmax term weights over the sentence's Pi logits.
pub fn term_weights<T: Real>(params: &ParamSet<T>, tokens: &[usize]) -> Result<MixtureWeights<T>> {
    if tokens.is_empty() {
        return Err(Error::EmptySentence);
    }
    for &t in tokens {
        params.check_token(t)?;
    }
    let logits: Vec<T> = tokens.iter().map(|&t| params.term_logit[t]).collect();
    MixtureWeights::new(softmax(&logits))
}

/// The sentence density matrix ρ = Σ_i p_i |w_i⟩⟨w_i|.
pub fn sentence_rho<T: Real>(params: &ParamSet<T>, tokens: &[usize]) -> Result<HermitianMatrix<T>> {
    let weights = term_weights(params, tokens)?;
    let states: Vec<PolarState<T>> = tokens
        .iter()
        .map(|&t| embed_word(params, t))
        .collect::<Result<_>>()?;
    mix(&states, &weights)
}

/// Measurement probabilities q_j = tr(ρ|v_j⟩⟨v_j|) through the factored
/// route, never forming ρ.
pub fn measure_sentence<T: Real>(params: &ParamSet<T>, tokens: &[usize]) -> Result<Vec<T>> {
    let weights = term_weights(params, tokens)?;
    let (word_cos, word_sin) = trig_rows(&params.phase, tokens);
    let meas_rows: Vec<usize> = (0..params.measurement_count).collect();
    let (meas_cos, meas_sin) = trig_rows(&params.meas_phase, &meas_rows);
    let (overlap_re, overlap_im) =
        overlaps(params, tokens, &word_cos, &word_sin, &meas_cos, &meas_sin);
    Ok(born_from_overlaps(
        &overlap_re,
        &overlap_im,
        weights.as_slice(),
    ))
}

/// Dense head on any feature vector: logits z = Wᵀx + b, probabilities
/// softmax(z).
pub fn classify<T: Real>(params: &ParamSet<T>, features: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    if features.len() != params.feature_dim() {
        return Err(Error::DimensionMismatch {
            expected: params.feature_dim(),
            actual: features.len(),
        });
    }
    let mut logits = params.dense_bias.clone();
    for (j, &x) in features.iter().enumerate() {
        let row = params.dense_weight.row(j);
        for (l, &w) in row.iter().enumerate() {
            logits[l] += x * w;
        }
    }
    let probabilities = softmax(&logits);
    Ok((logits, probabilities))
}

/// Everything the backward pass needs, captured during one forward pass.
/// `features` holds the measurement probabilities q for the measurement
/// variants, the mean 2n-vector for the classical baseline, and the
/// flattened (Re ρ, Im ρ) for the dense-on-rho variant.
#[derive(Clone, Debug)]
pub struct ForwardCache<T> {
    pub variant: VariantTag,
    pub tokens: Vec<usize>,
    /// Softmax term weights p_i (uniform 1/m for the classical baseline).
    pub weights: Vec<T>,
    /// cos/sin of each sentence word's phases, m × n.
    pub word_cos: Mat<T>,
    pub word_sin: Mat<T>,
    /// cos/sin of each measurement state's phases, k × n (empty when the
    /// variant has no measurement layer).
    pub meas_cos: Mat<T>,
    pub meas_sin: Mat<T>,
    /// Overlaps ⟨v_j|w_i⟩ as (re, im), k × m.
    pub overlap_re: Mat<T>,
    pub overlap_im: Mat<T>,
    /// Sentence density matrix, kept only by the dense-on-rho variant.
    pub rho: Option<HermitianMatrix<T>>,
    /// Input to the dense head.
    pub features: Vec<T>,
    pub logits: Vec<T>,
    pub probabilities: Vec<T>,
}

impl<T: Real> ForwardCache<T> {
    /// Born-rule outputs; only meaningful for measurement variants.
    pub fn measurement_probabilities(&self) -> &[T] {
        &self.features
    }

    /// Cheap consistency check between a cache and a parameter set. Shape
    /// and variant only: value-level staleness cannot be detected here.
    pub fn check_against(&self, params: &ParamSet<T>) -> Result<()> {
        if self.variant != params.variant {
            return Err(Error::CacheMismatch {
                reason: format!(
                    "cache built for variant {}, parameters are {}",
                    self.variant, params.variant
                ),
            });
        }
        if self.word_cos.cols() != params.embedding_dim
            || self.features.len() != params.feature_dim()
            || self.logits.len() != params.label_count
        {
            return Err(Error::CacheMismatch {
                reason: "cache shapes do not match parameter shapes".into(),
            });
        }
        Ok(())
    }
}

/// cos/sin tables for the given rows of a phase matrix.
fn trig_rows<T: Real>(phases: &Mat<T>, rows: &[usize]) -> (Mat<T>, Mat<T>) {
    let n = phases.cols();
    let mut cos = Mat::zeros(rows.len(), n);
    let mut sin = Mat::zeros(rows.len(), n);
    for (i, &r) in rows.iter().enumerate() {
        for j in 0..n {
            let (s, c) = phases.get(r, j).sin_cos();
            cos.set(i, j, c);
            sin.set(i, j, s);
        }
    }
    (cos, sin)
}

/// Overlap matrices A = Re⟨v_j|w_i⟩, B = Im⟨v_j|w_i⟩ (k × m) in rectangular
/// intermediates: A_ji = Σ_s (e·c + f·d), B_ji = Σ_s (e·d - f·c) with
/// c = r cos φ, d = r sin φ, e = a cos θ, f = a sin θ.
fn overlaps<T: Real>(
    params: &ParamSet<T>,
    tokens: &[usize],
    word_cos: &Mat<T>,
    word_sin: &Mat<T>,
    meas_cos: &Mat<T>,
    meas_sin: &Mat<T>,
) -> (Mat<T>, Mat<T>) {
    let k = params.measurement_count;
    let n = params.embedding_dim;
    let m = tokens.len();
    let mut re = Mat::zeros(k, m);
    let mut im = Mat::zeros(k, m);
    for j in 0..k {
        let a = params.meas_amplitude.row(j);
        let (ec, es) = (meas_cos.row(j), meas_sin.row(j));
        for (i, &t) in tokens.iter().enumerate() {
            let r = params.amplitude.row(t);
            let (wc, ws) = (word_cos.row(i), word_sin.row(i));
            let mut acc_re = T::zero();
            let mut acc_im = T::zero();
            for s in 0..n {
                let e = a[s] * ec[s];
                let f = a[s] * es[s];
                let c = r[s] * wc[s];
                let d = r[s] * ws[s];
                acc_re += e * c + f * d;
                acc_im += e * d - f * c;
            }
            re.set(j, i, acc_re);
            im.set(j, i, acc_im);
        }
    }
    (re, im)
}

fn born_from_overlaps<T: Real>(re: &Mat<T>, im: &Mat<T>, weights: &[T]) -> Vec<T> {
    let mut q = Vec::with_capacity(re.rows());
    for j in 0..re.rows() {
        let (re_row, im_row) = (re.row(j), im.row(j));
        let mut acc = T::zero();
        for (i, &p) in weights.iter().enumerate() {
            acc += p * (re_row[i] * re_row[i] + im_row[i] * im_row[i]);
        }
        q.push(acc);
    }
    q
}

/// One full forward pass under the given variant.
pub fn forward<T: Real>(
    params: &ParamSet<T>,
    tokens: &[usize],
    variant: VariantTag,
) -> Result<ForwardCache<T>> {
    if tokens.is_empty() {
        return Err(Error::EmptySentence);
    }
    for &t in tokens {
        params.check_token(t)?;
    }
    let m = tokens.len();
    let n = params.embedding_dim;

    if variant == VariantTag::RealDoubleDim {
        // Mean-pooled 2n-dimensional real embedding straight into the head.
        let inv_m = T::one() / T::of(m as f64);
        let mut features = vec![T::zero(); 2 * n];
        for &t in tokens {
            let (amp, ph) = (params.amplitude.row(t), params.phase.row(t));
            for s in 0..n {
                features[s] += amp[s] * inv_m;
                features[n + s] += ph[s] * inv_m;
            }
        }
        let (logits, probabilities) = classify(params, &features)?;
        return Ok(ForwardCache {
            variant,
            tokens: tokens.to_vec(),
            weights: vec![inv_m; m],
            word_cos: Mat::zeros(0, n),
            word_sin: Mat::zeros(0, n),
            meas_cos: Mat::zeros(0, n),
            meas_sin: Mat::zeros(0, n),
            overlap_re: Mat::zeros(0, 0),
            overlap_im: Mat::zeros(0, 0),
            rho: None,
            features,
            logits,
            probabilities,
        });
    }

    let weights = term_weights(params, tokens)?;
    let (word_cos, word_sin) = trig_rows(&params.phase, tokens);

    if variant == VariantTag::DenseOnRho {
        let states: Vec<PolarState<T>> = tokens
            .iter()
            .map(|&t| embed_word(params, t))
            .collect::<Result<_>>()?;
        let rho = mix(&states, &weights)?;
        let mut features = Vec::with_capacity(2 * n * n);
        features.extend_from_slice(rho.re_data());
        features.extend_from_slice(rho.im_data());
        let (logits, probabilities) = classify(params, &features)?;
        return Ok(ForwardCache {
            variant,
            tokens: tokens.to_vec(),
            weights: weights.as_slice().to_vec(),
            word_cos,
            word_sin,
            meas_cos: Mat::zeros(0, n),
            meas_sin: Mat::zeros(0, n),
            overlap_re: Mat::zeros(0, 0),
            overlap_im: Mat::zeros(0, 0),
            rho: Some(rho),
            features,
            logits,
            probabilities,
        });
    }

    let meas_rows: Vec<usize> = (0..params.measurement_count).collect();
    let (meas_cos, meas_sin) = trig_rows(&params.meas_phase, &meas_rows);
    let (overlap_re, overlap_im) =
        overlaps(params, tokens, &word_cos, &word_sin, &meas_cos, &meas_sin);
    let features = born_from_overlaps(&overlap_re, &overlap_im, weights.as_slice());
    let (logits, probabilities) = classify(params, &features)?;
    Ok(ForwardCache {
        variant,
        tokens: tokens.to_vec(),
        weights: weights.as_slice().to_vec(),
        word_cos,
        word_sin,
        meas_cos,
        meas_sin,
        overlap_re,
        overlap_im,
        rho: None,
        features,
        logits,
        probabilities,
    })
}
