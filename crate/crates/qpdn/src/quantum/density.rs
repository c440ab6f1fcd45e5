//! Density matrices as mixtures of pure-state projectors, and the Born rule
//! in both its explicit-matrix and factored forms.

use crate::error::{Error, Result};
use crate::quantum::state::PolarState;
use crate::scalar::Real;
use crate::tol::TOL;

/// Convex mixture weights: non-negative, summing to 1 within the
/// structural tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureWeights<T>(Vec<T>);

impl<T: Real> MixtureWeights<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyMixture);
        }
        for (i, &p) in weights.iter().enumerate() {
            if p < T::zero() {
                return Err(Error::InvalidWeights {
                    reason: format!("negative weight at index {i}"),
                });
            }
        }
        let sum: T = weights.iter().copied().sum();
        if (sum - T::one()).abs() > T::of(TOL.structural) {
            return Err(Error::InvalidWeights {
                reason: format!("weights sum to {sum}, not 1"),
            });
        }
        Ok(Self(weights))
    }

    pub fn uniform(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyMixture);
        }
        let p = T::one() / T::of(count as f64);
        Ok(Self(vec![p; count]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }
}

/// Hermitian matrix stored as separate real and imaginary parts, row-major.
/// Construction through `mix`/`pure_projector` fills the upper triangle and
/// mirrors it, so Hermiticity is exact by construction and the imaginary
/// diagonal is exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    dim: usize,
    re: Vec<T>,
    im: Vec<T>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            re: vec![T::zero(); dim * dim],
            im: vec![T::zero(); dim * dim],
        }
    }

    /// Assemble from raw parts. Only the shape is checked here; use
    /// `validate_density` to measure how far the contents are from an
    /// admissible density matrix.
    pub fn from_parts(dim: usize, re: Vec<T>, im: Vec<T>) -> Result<Self> {
        if re.len() != dim * dim || im.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: re.len().max(im.len()),
            });
        }
        Ok(Self { dim, re, im })
    }

    /// The maximally mixed state I/n.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        let p = T::one() / T::of(dim as f64);
        for j in 0..dim {
            m.re[j * dim + j] = p;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn re(&self, j: usize, k: usize) -> T {
        self.re[j * self.dim + k]
    }

    pub fn im(&self, j: usize, k: usize) -> T {
        self.im[j * self.dim + k]
    }

    pub fn re_data(&self) -> &[T] {
        &self.re
    }

    pub fn im_data(&self) -> &[T] {
        &self.im
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|j| self.re(j, j)).sum()
    }

    /// Largest entry-wise magnitude of ρ - ρ†.
    pub fn hermitian_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for j in 0..self.dim {
            for k in j..self.dim {
                let dr = self.re(j, k) - self.re(k, j);
                let di = self.im(j, k) + self.im(k, j);
                worst = worst.max(dr.hypot(di));
            }
        }
        worst
    }

    /// Accumulate weight·|w⟩⟨w| into the upper triangle.
    fn add_weighted_projector(&mut self, re_w: &[T], im_w: &[T], weight: T) {
        let n = self.dim;
        for j in 0..n {
            let (cj, dj) = (re_w[j], im_w[j]);
            for k in j..n {
                let (ck, dk) = (re_w[k], im_w[k]);
                // w_j conj(w_k) = (c_j c_k + d_j d_k) + i(d_j c_k - c_j d_k)
                self.re[j * n + k] += weight * (cj * ck + dj * dk);
                self.im[j * n + k] += weight * (dj * ck - cj * dk);
            }
        }
    }

    /// Mirror the accumulated upper triangle into the lower one.
    fn mirror_upper(&mut self) {
        let n = self.dim;
        for j in 0..n {
            self.im[j * n + j] = T::zero();
            for k in (j + 1)..n {
                self.re[k * n + j] = self.re[j * n + k];
                self.im[k * n + j] = -self.im[j * n + k];
            }
        }
    }
}

/// Projector |w⟩⟨w| of a unit state. Rejects states whose squared norm
/// deviates from 1 beyond the structural tolerance, since the result
/// would not have unit trace.
pub fn pure_projector<T: Real>(state: &PolarState<T>) -> Result<HermitianMatrix<T>> {
    let norm_sq = state.norm_sq();
    if (norm_sq - T::one()).abs() > T::of(TOL.structural) {
        return Err(Error::NotNormalized {
            norm_sq: norm_sq.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut rho = HermitianMatrix::zeros(state.dim());
    let (re_w, im_w) = state.to_rect();
    rho.add_weighted_projector(&re_w, &im_w, T::one());
    rho.mirror_upper();
    Ok(rho)
}

/// ρ = Σ_i p_i |w_i⟩⟨w_i|. All states must share one dimension and the
/// weight count must match the state count.
pub fn mix<T: Real>(
    states: &[PolarState<T>],
    weights: &MixtureWeights<T>,
) -> Result<HermitianMatrix<T>> {
    if states.is_empty() {
        return Err(Error::EmptyMixture);
    }
    if states.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: states.len(),
            actual: weights.len(),
        });
    }
    let dim = states[0].dim();
    for s in states.iter().skip(1) {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: s.dim(),
            });
        }
    }
    let mut rho = HermitianMatrix::zeros(dim);
    for (state, &p) in states.iter().zip(weights.as_slice()) {
        let (re_w, im_w) = state.to_rect();
        rho.add_weighted_projector(&re_w, &im_w, p);
    }
    rho.mirror_upper();
    Ok(rho)
}

/// Born rule through the explicit matrix: q = ⟨v|ρ|v⟩ = tr(ρ|v⟩⟨v|).
/// The value is real for Hermitian ρ; rounding negatives are clamped.
pub fn born_probability<T: Real>(rho: &HermitianMatrix<T>, v: &PolarState<T>) -> Result<T> {
    if v.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: v.dim(),
        });
    }
    let (c, d) = v.to_rect();
    let n = rho.dim();
    let mut acc = T::zero();
    for j in 0..n {
        for k in 0..n {
            // Re[ conj(v_j) v_k ρ_jk ]
            let re_vjvk = c[j] * c[k] + d[j] * d[k];
            let im_vjvk = c[j] * d[k] - d[j] * c[k];
            acc += re_vjvk * rho.re(j, k) - im_vjvk * rho.im(j, k);
        }
    }
    Ok(acc.max(T::zero()))
}

/// Born rule without forming ρ: q = Σ_i p_i |⟨v|w_i⟩|². Algebraically
/// identical to `born_probability` on `mix(states, weights)` but costs
/// O(k·m·n) instead of O(n²) per measurement.
pub fn born_probability_factored<T: Real>(
    states: &[PolarState<T>],
    weights: &MixtureWeights<T>,
    v: &PolarState<T>,
) -> Result<T> {
    if states.is_empty() {
        return Err(Error::EmptyMixture);
    }
    if states.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: states.len(),
            actual: weights.len(),
        });
    }
    let mut q = T::zero();
    for (state, &p) in states.iter().zip(weights.as_slice()) {
        q += p * v.overlap_sq(state)?;
    }
    Ok(q)
}
