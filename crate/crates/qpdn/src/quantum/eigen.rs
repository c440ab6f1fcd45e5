//! Eigenvalues for validation reports.
//!
//! A Hermitian matrix H = A + iB embeds into the real symmetric matrix
//! [[A, -B], [B, A]] whose spectrum is that of H with every eigenvalue
//! doubled. A cyclic Jacobi sweep on the embedding is ample for the small
//! dimensions this crate validates; this path is diagnostic only and never
//! sits on the training loop.

use crate::quantum::density::HermitianMatrix;
use crate::scalar::Real;

/// Eigenvalues of a real symmetric matrix (row-major, dim×dim), ascending.
/// Cyclic Jacobi with a fixed sweep cap; convergence is quadratic once the
/// off-diagonal mass is small, so the cap is never reached in practice.
pub fn symmetric_eigenvalues<T: Real>(matrix: &[T], dim: usize) -> Vec<T> {
    assert_eq!(matrix.len(), dim * dim, "matrix shape mismatch");
    let mut a = matrix.to_vec();
    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        let mut off = T::zero();
        for p in 0..dim {
            for q in (p + 1)..dim {
                off += a[p * dim + q] * a[p * dim + q];
            }
        }
        let scale: T = (0..dim).map(|j| a[j * dim + j] * a[j * dim + j]).sum::<T>() + off;
        if off <= T::epsilon() * T::epsilon() * scale.max(T::min_positive_value()) {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p * dim + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = (aqq - app) / (T::two() * apq);
                // Smaller-angle root of t² + 2θt - 1 = 0.
                let t = if theta >= T::zero() {
                    T::one() / (theta + (theta * theta + T::one()).sqrt())
                } else {
                    -T::one() / (-theta + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                a[p * dim + p] = app - t * apq;
                a[q * dim + q] = aqq + t * apq;
                a[p * dim + q] = T::zero();
                a[q * dim + p] = T::zero();
                for i in 0..dim {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[i * dim + p];
                    let aiq = a[i * dim + q];
                    a[i * dim + p] = c * aip - s * aiq;
                    a[p * dim + i] = a[i * dim + p];
                    a[i * dim + q] = s * aip + c * aiq;
                    a[q * dim + i] = a[i * dim + q];
                }
            }
        }
    }
    let mut eigs: Vec<T> = (0..dim).map(|j| a[j * dim + j]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("non-finite eigenvalue"));
    eigs
}

/// Eigenvalues of a Hermitian matrix, ascending. Works through the real
/// symmetric embedding; the doubled spectrum collapses back by taking
/// every second value of the sorted 2n results.
pub fn hermitian_eigenvalues<T: Real>(h: &HermitianMatrix<T>) -> Vec<T> {
    let n = h.dim();
    let m = 2 * n;
    let mut emb = vec![T::zero(); m * m];
    for j in 0..n {
        for k in 0..n {
            let re = h.re(j, k);
            let im = h.im(j, k);
            emb[j * m + k] = re;
            emb[(j + n) * m + (k + n)] = re;
            emb[j * m + (k + n)] = -im;
            emb[(j + n) * m + k] = im;
        }
    }
    let doubled = symmetric_eigenvalues(&emb, m);
    doubled.into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{mix, MixtureWeights, PolarState};
    use crate::tol::TOL;

    #[test]
    fn diagonal_matrix_returns_sorted_diagonal() {
        let m = vec![3.0f64, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0];
        let eigs = symmetric_eigenvalues(&m, 3);
        assert_eq!(eigs, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_symmetric_matches_closed_form() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
        let eigs = symmetric_eigenvalues(&[2.0f64, 1.0, 1.0, 2.0], 2);
        assert!((eigs[0] - 1.0).abs() < TOL.arithmetic);
        assert!((eigs[1] - 3.0).abs() < TOL.arithmetic);
    }

    #[test]
    fn hermitian_fixture_matches_oracle() {
        let w1 = PolarState::<f64>::new(vec![0.6, 0.8], vec![0.3, -1.1]).unwrap();
        let w2 = PolarState::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        let p = MixtureWeights::new(vec![0.25, 0.75]).unwrap();
        let rho = mix(&[w1, w2], &p).unwrap();
        let eigs = hermitian_eigenvalues(&rho);
        // Spectrum of this fixture computed independently.
        assert!((eigs[0] - 0.13944487245360107).abs() < 1e-10);
        assert!((eigs[1] - 0.860555127546399).abs() < 1e-10);
    }

    #[test]
    fn eigenvalue_sum_equals_trace() {
        let states: Vec<PolarState<f64>> = (0..4).map(|j| PolarState::basis(4, j)).collect();
        let p = MixtureWeights::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let rho = mix(&states, &p).unwrap();
        let eigs = hermitian_eigenvalues(&rho);
        let sum: f64 = eigs.iter().sum();
        assert!((sum - rho.trace()).abs() < 1e-10);
    }
}
