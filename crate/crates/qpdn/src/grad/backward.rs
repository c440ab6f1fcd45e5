//! Reverse-mode gradients of cross-entropy loss through the polar
//! parametrization, derived by hand.
//!
//! The chain runs through rectangular intermediates. With word components
//! c = r·cos φ, d = r·sin φ and measurement components e = a·cos θ,
//! f = a·sin θ, the overlap ⟨v_j|w_i⟩ = A_ji + i·B_ji has
//!
//!   A_ji = Σ_s (e_js c_is + f_js d_is)
//!   B_ji = Σ_s (e_js d_is - f_js c_is)
//!
//! and q_j = Σ_i p_i (A_ji² + B_ji²). Rectangular adjoints convert back to
//! polar by dr = dc·cos φ + dd·sin φ and dφ = -dc·d + dd·c; the same shape
//! applies on the measurement side. Term weights close over the softmax
//! Jacobian dπ_i = p_i (dp_i - Σ_l p_l dp_l).

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::model::{ForwardCache, ParamBlock, ParamSet, VariantTag, PARAM_BLOCKS};
use crate::scalar::Real;

/// Cross-entropy of a class distribution against the true label. The
/// probability is floored to keep the loss finite when a class collapses.
pub fn cross_entropy<T: Real>(probabilities: &[T], label: usize) -> Result<T> {
    if label >= probabilities.len() {
        return Err(Error::LabelOutOfRange {
            index: label,
            count: probabilities.len(),
        });
    }
    Ok(-probabilities[label].max(T::of(1e-12)).ln())
}

/// Gradient storage, one dense array per parameter block.
#[derive(Clone, Debug, PartialEq)]
pub struct GradSet<T> {
    pub amplitude: Mat<T>,
    pub phase: Mat<T>,
    pub term_logit: Vec<T>,
    pub meas_amplitude: Mat<T>,
    pub meas_phase: Mat<T>,
    pub dense_weight: Mat<T>,
    pub dense_bias: Vec<T>,
}

impl<T: Real> GradSet<T> {
    pub fn zeros_like(params: &ParamSet<T>) -> Self {
        Self {
            amplitude: Mat::zeros(params.vocab_size, params.embedding_dim),
            phase: Mat::zeros(params.vocab_size, params.embedding_dim),
            term_logit: vec![T::zero(); params.vocab_size],
            meas_amplitude: Mat::zeros(params.measurement_count, params.embedding_dim),
            meas_phase: Mat::zeros(params.measurement_count, params.embedding_dim),
            dense_weight: Mat::zeros(params.feature_dim(), params.label_count),
            dense_bias: vec![T::zero(); params.label_count],
        }
    }

    pub fn zero(&mut self) {
        for block in PARAM_BLOCKS {
            self.block_mut(block).fill(T::zero());
        }
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

    pub fn matches(&self, params: &ParamSet<T>) -> bool {
        PARAM_BLOCKS
            .iter()
            .all(|&b| self.block(b).len() == params.block(b).len())
    }

    pub fn max_abs(&self) -> T {
        PARAM_BLOCKS
            .iter()
            .flat_map(|&b| self.block(b).iter())
            .fold(T::zero(), |acc, &g| acc.max(g.abs()))
    }
}

/// The L2 penalty value: ratio · Σ θ² over the regularized blocks (the
/// amplitude table when it trains, and the dense weights). Frozen blocks
/// are excluded so the penalty and its gradient describe the same
/// objective over the trainable coordinates.
pub fn l2_penalty<T: Real>(params: &ParamSet<T>, variant: VariantTag, ratio: T) -> T {
    if ratio == T::zero() {
        return T::zero();
    }
    let mut sum = T::zero();
    for block in PARAM_BLOCKS {
        if block.regularized(variant) {
            sum += params.block(block).iter().map(|&x| x * x).sum();
        }
    }
    ratio * sum
}

/// Add the gradient of the L2 penalty (2·ratio·θ per regularized entry).
pub fn add_l2_gradient<T: Real>(
    params: &ParamSet<T>,
    variant: VariantTag,
    ratio: T,
    grads: &mut GradSet<T>,
) {
    if ratio == T::zero() {
        return;
    }
    let two_ratio = T::two() * ratio;
    for block in PARAM_BLOCKS {
        if block.regularized(variant) {
            for (g, &x) in grads.block_mut(block).iter_mut().zip(params.block(block)) {
                *g += two_ratio * x;
            }
        }
    }
}

/// Full gradient of cross-entropy plus L2 penalty for one example.
pub fn backward<T: Real>(
    params: &ParamSet<T>,
    cache: &ForwardCache<T>,
    label: usize,
    l2_ratio: T,
) -> Result<GradSet<T>> {
    let mut grads = GradSet::zeros_like(params);
    backward_into(params, cache, label, T::one(), &mut grads)?;
    add_l2_gradient(params, cache.variant, l2_ratio, &mut grads);
    Ok(grads)
}

/// Accumulate `scale` times the cross-entropy gradient of one example into
/// `grads`. The L2 term is not included here; batching code adds it once
/// per batch. Frozen blocks receive nothing.
pub fn backward_into<T: Real>(
    params: &ParamSet<T>,
    cache: &ForwardCache<T>,
    label: usize,
    scale: T,
    grads: &mut GradSet<T>,
) -> Result<()> {
    cache.check_against(params)?;
    if label >= params.label_count {
        return Err(Error::LabelOutOfRange {
            index: label,
            count: params.label_count,
        });
    }
    if !grads.matches(params) {
        return Err(Error::DimensionMismatch {
            expected: params.total_len(),
            actual: PARAM_BLOCKS.iter().map(|&b| grads.block(b).len()).sum(),
        });
    }

    let label_count = params.label_count;
    // dz = y - onehot(label), scaled once here.
    let mut dz = Vec::with_capacity(label_count);
    for (l, &y) in cache.probabilities.iter().enumerate() {
        let target = if l == label { T::one() } else { T::zero() };
        dz.push(scale * (y - target));
    }
    for (l, &g) in dz.iter().enumerate() {
        grads.dense_bias[l] += g;
    }
    let feature_dim = cache.features.len();
    let mut dfeat = vec![T::zero(); feature_dim];
    for (j, &x) in cache.features.iter().enumerate() {
        let w_row = params.dense_weight.row(j);
        let g_row = grads.dense_weight.row_mut(j);
        let mut acc = T::zero();
        for l in 0..label_count {
            g_row[l] += x * dz[l];
            acc += w_row[l] * dz[l];
        }
        dfeat[j] = acc;
    }

    match cache.variant {
        VariantTag::RealDoubleDim => backward_real_double_dim(params, cache, &dfeat, grads),
        VariantTag::DenseOnRho => backward_dense_on_rho(params, cache, &dfeat, grads),
        _ => backward_measurements(params, cache, &dfeat, grads),
    }
    Ok(())
}

/// Mean-pooled real baseline: the feature vector is (1/m) Σ_i (R_i ++ Φ_i).
fn backward_real_double_dim<T: Real>(
    params: &ParamSet<T>,
    cache: &ForwardCache<T>,
    dfeat: &[T],
    grads: &mut GradSet<T>,
) {
    let n = params.embedding_dim;
    let inv_m = T::one() / T::of(cache.tokens.len() as f64);
    for &t in &cache.tokens {
        let da = grads.amplitude.row_mut(t);
        for s in 0..n {
            da[s] += dfeat[s] * inv_m;
        }
        let dp = grads.phase.row_mut(t);
        for s in 0..n {
            dp[s] += dfeat[n + s] * inv_m;
        }
    }
}

/// Measurement variants: head adjoint → q → (A, B) → rectangular word and
/// measurement components → polar tables and term logits.
fn backward_measurements<T: Real>(
    params: &ParamSet<T>,
    cache: &ForwardCache<T>,
    dq: &[T],
    grads: &mut GradSet<T>,
) {
    let n = params.embedding_dim;
    let k = params.measurement_count;
    let m = cache.tokens.len();
    let variant = cache.variant;
    let train_pi = variant.trains_term_weights();
    let train_meas = variant.trains_measurements();
    let train_amp = variant.trains_amplitudes();

    // dp_i = Σ_j dq_j (A_ji² + B_ji²), then the softmax Jacobian.
    if train_pi {
        let mut dp = vec![T::zero(); m];
        for (j, &gq) in dq.iter().enumerate() {
            let (a_row, b_row) = (cache.overlap_re.row(j), cache.overlap_im.row(j));
            for i in 0..m {
                dp[i] += gq * (a_row[i] * a_row[i] + b_row[i] * b_row[i]);
            }
        }
        let dot: T = cache.weights.iter().zip(&dp).map(|(&p, &g)| p * g).sum();
        for (i, &t) in cache.tokens.iter().enumerate() {
            grads.term_logit[t] += cache.weights[i] * (dp[i] - dot);
        }
    }

    let mut de: Option<(Mat<T>, Mat<T>)> = if train_meas {
        Some((Mat::zeros(k, n), Mat::zeros(k, n)))
    } else {
        None
    };
    let mut dc = vec![T::zero(); n];
    let mut dd = vec![T::zero(); n];

    for (i, &t) in cache.tokens.iter().enumerate() {
        dc.fill(T::zero());
        dd.fill(T::zero());
        let p_i = cache.weights[i];
        let r = params.amplitude.row(t);
        let (wc, ws) = (cache.word_cos.row(i), cache.word_sin.row(i));
        for (j, &gq) in dq.iter().enumerate() {
            let g = gq * p_i;
            if g == T::zero() {
                continue;
            }
            let d_a = T::two() * cache.overlap_re.get(j, i) * g;
            let d_b = T::two() * cache.overlap_im.get(j, i) * g;
            let a = params.meas_amplitude.row(j);
            let (ec, es) = (cache.meas_cos.row(j), cache.meas_sin.row(j));
            if let Some((de_re, de_im)) = de.as_mut() {
                let der = de_re.row_mut(j);
                let dei = de_im.row_mut(j);
                for s in 0..n {
                    let e = a[s] * ec[s];
                    let f = a[s] * es[s];
                    let c = r[s] * wc[s];
                    let d = r[s] * ws[s];
                    dc[s] += d_a * e - d_b * f;
                    dd[s] += d_a * f + d_b * e;
                    der[s] += d_a * c + d_b * d;
                    dei[s] += d_a * d - d_b * c;
                }
            } else {
                for s in 0..n {
                    let e = a[s] * ec[s];
                    let f = a[s] * es[s];
                    dc[s] += d_a * e - d_b * f;
                    dd[s] += d_a * f + d_b * e;
                }
            }
        }
        // Rectangular adjoints back to the polar word tables.
        if train_amp {
            let da = grads.amplitude.row_mut(t);
            for s in 0..n {
                da[s] += dc[s] * wc[s] + dd[s] * ws[s];
            }
        }
        let dphi = grads.phase.row_mut(t);
        for s in 0..n {
            let c = r[s] * wc[s];
            let d = r[s] * ws[s];
            dphi[s] += -dc[s] * d + dd[s] * c;
        }
    }

    if let Some((de_re, de_im)) = de {
        for j in 0..k {
            let a = params.meas_amplitude.row(j);
            let (ec, es) = (cache.meas_cos.row(j), cache.meas_sin.row(j));
            let da = grads.meas_amplitude.row_mut(j);
            let (der, dei) = (de_re.row(j), de_im.row(j));
            for s in 0..n {
                da[s] += der[s] * ec[s] + dei[s] * es[s];
            }
            let dth = grads.meas_phase.row_mut(j);
            for s in 0..n {
                let e = a[s] * ec[s];
                let f = a[s] * es[s];
                dth[s] += -der[s] * f + dei[s] * e;
            }
        }
    }
}

/// Dense head on the flattened density matrix: features are
/// (Re ρ row-major, Im ρ row-major) with ρ_su = Σ_i p_i w_is conj(w_iu).
fn backward_dense_on_rho<T: Real>(
    params: &ParamSet<T>,
    cache: &ForwardCache<T>,
    dfeat: &[T],
    grads: &mut GradSet<T>,
) {
    let n = params.embedding_dim;
    let m = cache.tokens.len();
    let (dre, dim_) = dfeat.split_at(n * n);

    // Word rectangular components from the cached trig tables.
    let mut c = Mat::zeros(m, n);
    let mut d = Mat::zeros(m, n);
    for (i, &t) in cache.tokens.iter().enumerate() {
        let r = params.amplitude.row(t);
        let (wc, ws) = (cache.word_cos.row(i), cache.word_sin.row(i));
        for s in 0..n {
            c.set(i, s, r[s] * wc[s]);
            d.set(i, s, r[s] * ws[s]);
        }
    }

    // dp_i = Σ_su dρ_su · ∂ρ_su/∂p_i, then the softmax Jacobian.
    let mut dp = vec![T::zero(); m];
    for (i, slot) in dp.iter_mut().enumerate() {
        let (ci, di) = (c.row(i), d.row(i));
        let mut acc = T::zero();
        for s in 0..n {
            for u in 0..n {
                let re_su = ci[s] * ci[u] + di[s] * di[u];
                let im_su = di[s] * ci[u] - ci[s] * di[u];
                acc += dre[s * n + u] * re_su + dim_[s * n + u] * im_su;
            }
        }
        *slot = acc;
    }
    let dot: T = cache.weights.iter().zip(&dp).map(|(&p, &g)| p * g).sum();
    for (i, &t) in cache.tokens.iter().enumerate() {
        grads.term_logit[t] += cache.weights[i] * (dp[i] - dot);
    }

    let train_amp = cache.variant.trains_amplitudes();
    for (i, &t) in cache.tokens.iter().enumerate() {
        let p_i = cache.weights[i];
        let (ci, di) = (c.row(i), d.row(i));
        let r = params.amplitude.row(t);
        let (wc, ws) = (cache.word_cos.row(i), cache.word_sin.row(i));
        for a in 0..n {
            let mut dc_a = T::zero();
            let mut dd_a = T::zero();
            for u in 0..n {
                // Row a of dρ hits the left factor, column a the right one.
                let dre_au = dre[a * n + u];
                let dre_ua = dre[u * n + a];
                let dim_au = dim_[a * n + u];
                let dim_ua = dim_[u * n + a];
                dc_a += dre_au * ci[u] + dre_ua * ci[u] + dim_ua * di[u] - dim_au * di[u];
                dd_a += dre_au * di[u] + dre_ua * di[u] + dim_au * ci[u] - dim_ua * ci[u];
            }
            dc_a *= p_i;
            dd_a *= p_i;
            if train_amp {
                grads.amplitude.row_mut(t)[a] += dc_a * wc[a] + dd_a * ws[a];
            }
            let c_a = r[a] * wc[a];
            let d_a = r[a] * ws[a];
            grads.phase.row_mut(t)[a] += -dc_a * d_a + dd_a * c_a;
        }
    }
}
