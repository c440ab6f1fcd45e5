//! Seeded sampling of unit states and orthonormal state sets.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::quantum::polar::Polar;
use crate::quantum::state::PolarState;
use crate::scalar::Real;

/// Draw rectangular complex components from the standard normal.
fn gaussian_vector<T: Real, R: Rng>(dim: usize, rng: &mut R) -> (Vec<T>, Vec<T>) {
    let mut re = Vec::with_capacity(dim);
    let mut im = Vec::with_capacity(dim);
    for _ in 0..dim {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        re.push(T::of(x));
        im.push(T::of(y));
    }
    (re, im)
}

fn rect_to_state<T: Real>(re: &[T], im: &[T]) -> PolarState<T> {
    let norm = re
        .iter()
        .zip(im)
        .map(|(&c, &d)| c * c + d * d)
        .sum::<T>()
        .sqrt();
    let mut amplitudes = Vec::with_capacity(re.len());
    let mut phases = Vec::with_capacity(re.len());
    for (&c, &d) in re.iter().zip(im) {
        let p = Polar::from_rect(c / norm, d / norm);
        amplitudes.push(p.amplitude);
        phases.push(p.phase);
    }
    PolarState::from_raw(amplitudes, phases)
}

/// A unit state drawn uniformly from the sphere (Gaussian direction).
pub fn random_state<T: Real, R: Rng>(dim: usize, rng: &mut R) -> PolarState<T> {
    let (re, im) = gaussian_vector(dim, rng);
    rect_to_state(&re, &im)
}

/// `count` mutually orthonormal unit states in dimension `dim`, built by
/// modified Gram-Schmidt with one re-orthogonalization pass.
pub fn orthonormal_states<T: Real, R: Rng>(
    dim: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<PolarState<T>>> {
    if count > dim {
        return Err(Error::OrthonormalCount {
            requested: count,
            dim,
        });
    }
    let mut basis_re: Vec<Vec<T>> = Vec::with_capacity(count);
    let mut basis_im: Vec<Vec<T>> = Vec::with_capacity(count);
    while basis_re.len() < count {
        let (mut re, mut im) = gaussian_vector::<T, R>(dim, rng);
        for _ in 0..2 {
            for (br, bi) in basis_re.iter().zip(&basis_im) {
                // proj = ⟨b|v⟩; v -= proj · b
                let mut pr = T::zero();
                let mut pi = T::zero();
                for j in 0..dim {
                    pr += br[j] * re[j] + bi[j] * im[j];
                    pi += br[j] * im[j] - bi[j] * re[j];
                }
                for j in 0..dim {
                    re[j] -= pr * br[j] - pi * bi[j];
                    im[j] -= pr * bi[j] + pi * br[j];
                }
            }
        }
        let norm = re
            .iter()
            .zip(&im)
            .map(|(&c, &d)| c * c + d * d)
            .sum::<T>()
            .sqrt();
        if norm < T::of(1e-6) {
            // Degenerate draw; retry with a fresh vector.
            continue;
        }
        for j in 0..dim {
            re[j] /= norm;
            im[j] /= norm;
        }
        basis_re.push(re);
        basis_im.push(im);
    }
    Ok(basis_re
        .iter()
        .zip(&basis_im)
        .map(|(re, im)| rect_to_state(re, im))
        .collect())
}
