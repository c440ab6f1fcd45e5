//! Unit-norm superposition states in the amplitude/phase parametrization.

use crate::error::{Error, Result};
use crate::quantum::polar::{canonical_phase, Polar};
use crate::scalar::Real;
use crate::tol::TOL;

/// A state |w⟩ = Σ_j r_j e^{iφ_j} |j⟩ with r_j ≥ 0, Σ r_j² = 1, and
/// φ_j in [-π, π]. The validating constructor enforces the invariants;
/// `from_raw` is for callers that maintain them structurally (the model's
/// forward pass, which must stay smooth in the raw parameter tables).
#[derive(Clone, Debug, PartialEq)]
pub struct PolarState<T> {
    amplitudes: Vec<T>,
    phases: Vec<T>,
}

impl<T: Real> PolarState<T> {
    /// Validating constructor: amplitudes non-negative, unit squared norm
    /// within the structural tolerance, phases canonicalized.
    pub fn new(amplitudes: Vec<T>, phases: Vec<T>) -> Result<Self> {
        if amplitudes.len() != phases.len() {
            return Err(Error::DimensionMismatch {
                expected: amplitudes.len(),
                actual: phases.len(),
            });
        }
        if amplitudes.is_empty() {
            return Err(Error::DegenerateState);
        }
        for (j, &r) in amplitudes.iter().enumerate() {
            if r < T::zero() {
                return Err(Error::NegativeAmplitude {
                    index: j,
                    value: r.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        let norm_sq: T = amplitudes.iter().map(|&r| r * r).sum();
        if (norm_sq - T::one()).abs() > T::of(TOL.structural) {
            return Err(Error::NotNormalized {
                norm_sq: norm_sq.to_f64().unwrap_or(f64::NAN),
            });
        }
        let phases = phases.into_iter().map(canonical_phase).collect();
        Ok(Self { amplitudes, phases })
    }

    /// Build without validation. Callers are responsible for the invariants.
    pub fn from_raw(amplitudes: Vec<T>, phases: Vec<T>) -> Self {
        debug_assert_eq!(amplitudes.len(), phases.len());
        Self { amplitudes, phases }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[T] {
        &self.amplitudes
    }

    pub fn phases(&self) -> &[T] {
        &self.phases
    }

    pub fn component(&self, j: usize) -> Polar<T> {
        Polar::new(self.amplitudes[j], self.phases[j])
    }

    pub fn norm_sq(&self) -> T {
        self.amplitudes.iter().map(|&r| r * r).sum()
    }

    /// Rectangular coordinates (re, im) of every component.
    pub fn to_rect(&self) -> (Vec<T>, Vec<T>) {
        let mut re = Vec::with_capacity(self.dim());
        let mut im = Vec::with_capacity(self.dim());
        for j in 0..self.dim() {
            let (c, d) = self.component(j).to_rect();
            re.push(c);
            im.push(d);
        }
        (re, im)
    }

    /// ⟨self|other⟩ = Σ_j conj(self_j)·other_j, returned as (re, im).
    pub fn inner_product(&self, other: &Self) -> Result<(T, T)> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        let mut re = T::zero();
        let mut im = T::zero();
        for j in 0..self.dim() {
            let rr = self.amplitudes[j] * other.amplitudes[j];
            let dphi = other.phases[j] - self.phases[j];
            re += rr * dphi.cos();
            im += rr * dphi.sin();
        }
        Ok((re, im))
    }

    /// |⟨self|other⟩|².
    pub fn overlap_sq(&self, other: &Self) -> Result<T> {
        let (re, im) = self.inner_product(other)?;
        Ok(re * re + im * im)
    }

    /// Standard basis state |j⟩.
    pub fn basis(dim: usize, j: usize) -> Self {
        let mut amplitudes = vec![T::zero(); dim];
        amplitudes[j] = T::one();
        Self {
            amplitudes,
            phases: vec![T::zero(); dim],
        }
    }
}

/// Normalize an amplitude/phase pair into a unit state. The amplitude
/// vector is scaled by its L2 norm; phases are canonicalized untouched.
/// A zero amplitude vector has no direction and is rejected.
pub fn superpose<T: Real>(amplitudes: &[T], phases: &[T]) -> Result<PolarState<T>> {
    if amplitudes.len() != phases.len() {
        return Err(Error::DimensionMismatch {
            expected: amplitudes.len(),
            actual: phases.len(),
        });
    }
    if amplitudes.is_empty() {
        return Err(Error::DegenerateState);
    }
    for (j, &r) in amplitudes.iter().enumerate() {
        if r < T::zero() {
            return Err(Error::NegativeAmplitude {
                index: j,
                value: r.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let norm = amplitudes.iter().map(|&r| r * r).sum::<T>().sqrt();
    if norm == T::zero() {
        return Err(Error::DegenerateState);
    }
    let scaled: Vec<T> = amplitudes.iter().map(|&r| r / norm).collect();
    let wrapped: Vec<T> = phases.iter().map(|&p| canonical_phase(p)).collect();
    Ok(PolarState::from_raw(scaled, wrapped))
}
