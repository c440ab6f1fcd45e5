//! Complex weights in polar form and their interference arithmetic.
//!
//! A weight is r·e^{iφ} with r ≥ 0 and φ in [-π, π]. Addition is non-linear
//! in this parametrization; the squared magnitude of a sum picks up the
//! cross term 2·r₁·r₂·cos(φ₁-φ₂) that separates the model from a bag of
//! non-negative real weights.

use crate::scalar::Real;

/// One complex weight in polar form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Polar<T> {
    pub amplitude: T,
    pub phase: T,
}

impl<T: Real> Polar<T> {
    pub fn new(amplitude: T, phase: T) -> Self {
        Self { amplitude, phase }
    }

    /// Rectangular coordinates (re, im).
    pub fn to_rect(self) -> (T, T) {
        (
            self.amplitude * self.phase.cos(),
            self.amplitude * self.phase.sin(),
        )
    }

    /// Build from rectangular coordinates. The zero vector gets phase 0 by
    /// convention so the result is always canonical.
    pub fn from_rect(re: T, im: T) -> Self {
        let amplitude = re.hypot(im);
        let phase = if amplitude == T::zero() {
            T::zero()
        } else {
            im.atan2(re)
        };
        Self { amplitude, phase }
    }
}

/// Wrap a phase into [-π, π]. Values already in range pass through
/// unchanged; wrapping is idempotent.
pub fn canonical_phase<T: Real>(phi: T) -> T {
    let pi = T::PI();
    if (-pi..=pi).contains(&phi) {
        return phi;
    }
    let two_pi = pi + pi;
    let t = (phi + pi) / two_pi;
    (t - t.floor()) * two_pi - pi
}

/// Sum of two polar weights, computed exactly through rectangular
/// coordinates. Postcondition: amplitude ≥ 0, phase in [-π, π].
pub fn polar_add<T: Real>(a: Polar<T>, b: Polar<T>) -> Polar<T> {
    let (ar, ai) = a.to_rect();
    let (br, bi) = b.to_rect();
    Polar::from_rect(ar + br, ai + bi)
}

/// Squared magnitude of the sum of two polar weights, computed through the
/// interference expansion r₁² + r₂² + 2·r₁·r₂·cos(φ₁-φ₂) rather than
/// through `polar_add`. Clamped at zero against cancellation rounding.
pub fn interference_probability<T: Real>(a: Polar<T>, b: Polar<T>) -> T {
    let cross = T::two() * a.amplitude * b.amplitude * (a.phase - b.phase).cos();
    let raw = a.amplitude * a.amplitude + b.amplitude * b.amplitude + cross;
    raw.max(T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::TOL;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn adds_aligned_phases_like_reals() {
        let s = polar_add(Polar::new(0.5, 0.2), Polar::new(0.5, 0.2));
        assert!(close(s.amplitude, 1.0, TOL.arithmetic));
        assert!(close(s.phase, 0.2, TOL.arithmetic));
    }

    #[test]
    fn general_sum_matches_rectangular_oracle() {
        // (0.6, 0.3) + (0.8, -1.1), components computed independently.
        let s = polar_add(Polar::new(0.6, 0.3), Polar::new(0.8, -1.1));
        assert!(close(s.amplitude, 1.0785028776893604, TOL.arithmetic));
        assert!(close(s.phase, -0.5197511843399228, TOL.arithmetic));
    }

    #[test]
    fn opposite_phases_cancel() {
        let s = polar_add(
            Polar::new(0.7, 1.2),
            Polar::new(0.7, 1.2 - std::f64::consts::PI),
        );
        assert!(s.amplitude.abs() < TOL.arithmetic);
    }

    #[test]
    fn zero_vector_gets_zero_phase() {
        let s = Polar::<f64>::from_rect(0.0, 0.0);
        assert_eq!(s.amplitude, 0.0);
        assert_eq!(s.phase, 0.0);
    }

    #[test]
    fn interference_matches_sum_magnitude() {
        let a = Polar::new(0.6, 0.3);
        let b = Polar::new(0.8, -1.1);
        let direct = interference_probability(a, b);
        assert!(close(direct, 1.1631684571842311, TOL.arithmetic));
        let s = polar_add(a, b);
        assert!(close(direct, s.amplitude * s.amplitude, TOL.arithmetic));
    }

    #[test]
    fn interference_classical_case_drops_cross_term() {
        // Equal phases reduce to (r1 + r2)^2.
        let q = interference_probability(Polar::new(0.3, 0.0), Polar::new(0.4, 0.0));
        assert!(close(q, 0.49, TOL.arithmetic));
    }

    #[test]
    fn interference_never_negative() {
        // Near-total cancellation would go slightly negative in raw
        // arithmetic; the clamp keeps the output a probability mass.
        let q =
            interference_probability(Polar::new(0.5, 0.0), Polar::new(0.5, std::f64::consts::PI));
        assert!((0.0..TOL.arithmetic).contains(&q));
    }

    #[test]
    fn canonical_phase_wraps_and_is_idempotent() {
        let pi = std::f64::consts::PI;
        assert!(close(canonical_phase(3.0 * pi), -pi, 1e-12));
        assert!(close(canonical_phase(-3.0 * pi), -pi, 1e-12));
        assert_eq!(canonical_phase(0.5), 0.5);
        assert_eq!(canonical_phase(-pi), -pi);
        assert_eq!(canonical_phase(pi), pi);
        let w = canonical_phase(17.3);
        assert_eq!(canonical_phase(w), w);
        assert!((-pi..=pi).contains(&w));
    }
}
