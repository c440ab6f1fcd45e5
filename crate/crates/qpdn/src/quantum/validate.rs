//! Density matrix validation: trace, Hermiticity, positive semidefiniteness.

use crate::quantum::density::HermitianMatrix;
use crate::quantum::eigen::hermitian_eigenvalues;
use crate::scalar::Real;
use crate::tol::TOL;

/// Measured deviations of a candidate density matrix, plus the thresholds
/// they were judged against.
#[derive(Clone, Debug)]
pub struct DensityReport<T> {
    pub trace_deviation: T,
    pub max_asymmetry: T,
    pub min_eigenvalue: T,
    pub tolerance: T,
    pub psd_floor: T,
    pub passed: bool,
}

/// Check trace 1 and Hermiticity against `tolerance`, and the smallest
/// eigenvalue against the fixed PSD floor. The eigenvalue floor is an
/// absolute bound, not scaled by `tolerance`: rounding noise in a mixture
/// of projectors is orders of magnitude below it regardless of how loose
/// the structural checks are.
pub fn validate_density<T: Real>(rho: &HermitianMatrix<T>, tolerance: T) -> DensityReport<T> {
    let trace_deviation = (rho.trace() - T::one()).abs();
    let max_asymmetry = rho.hermitian_asymmetry();
    let min_eigenvalue = hermitian_eigenvalues(rho)
        .into_iter()
        .fold(T::infinity(), T::min);
    let psd_floor = T::of(TOL.psd_floor);
    let passed =
        trace_deviation <= tolerance && max_asymmetry <= tolerance && min_eigenvalue >= psd_floor;
    DensityReport {
        trace_deviation,
        max_asymmetry,
        min_eigenvalue,
        tolerance,
        psd_floor,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{mix, MixtureWeights, PolarState};

    #[test]
    fn valid_mixture_passes() {
        let w1 = PolarState::new(vec![0.6, 0.8], vec![0.3, -1.1]).unwrap();
        let w2 = PolarState::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        let p = MixtureWeights::new(vec![0.25, 0.75]).unwrap();
        let rho = mix(&[w1, w2], &p).unwrap();
        let report = validate_density(&rho, 1e-6);
        assert!(report.passed);
        assert!(report.trace_deviation < 1e-12);
        assert_eq!(report.max_asymmetry, 0.0);
        assert!(report.min_eigenvalue > 0.0);
    }

    #[test]
    fn scaled_matrix_fails_on_trace() {
        let mut rho = HermitianMatrix::<f64>::maximally_mixed(3);
        // Double one diagonal entry: trace becomes 4/3.
        let bumped = rho.re(0, 0) * 2.0;
        let re: Vec<f64> = {
            let mut v = rho.re_data().to_vec();
            v[0] = bumped;
            v
        };
        rho = HermitianMatrix::from_parts(3, re, rho.im_data().to_vec()).unwrap();
        let report = validate_density(&rho, 1e-6);
        assert!(!report.passed);
        assert!(report.trace_deviation > 0.3);
    }

    #[test]
    fn asymmetric_matrix_fails_on_hermiticity() {
        let re = vec![0.5f64, 0.2, 0.1, 0.5];
        let im = vec![0.0, 0.0, 0.0, 0.0];
        let rho = HermitianMatrix::from_parts(2, re, im).unwrap();
        let report = validate_density(&rho, 1e-6);
        assert!(!report.passed);
        assert!((report.max_asymmetry - 0.1).abs() < 1e-12);
    }

    #[test]
    fn indefinite_matrix_fails_on_psd() {
        // Trace 1 and symmetric, but with a negative eigenvalue.
        let re = vec![0.5f64, 0.8, 0.8, 0.5];
        let im = vec![0.0; 4];
        let rho = HermitianMatrix::from_parts(2, re, im).unwrap();
        let report = validate_density(&rho, 1e-6);
        assert!(!report.passed);
        assert!((report.min_eigenvalue + 0.3).abs() < 1e-10);
    }
}
