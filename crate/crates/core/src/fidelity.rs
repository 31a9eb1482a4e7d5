//! Qubit fidelity after a swap whose interaction deviates from the identity
//! on the internal state, `(1 + eps Z) V`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Qubit amplitudes `a|0> + b|1>` riding on a coherent molecular motion with
/// mean occupation `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitPhononInput {
    pub a: Complex64,
    pub b: Complex64,
    pub n: f64,
    pub epsilon: f64,
}

impl QubitPhononInput {
    /// Real amplitudes with `|a|^2 = a2` and `b = sqrt(1 - a2)`.
    pub fn from_population(a2: f64, n: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a2) {
            return Err(Error::invalid(format!("|a|^2 = {a2} is not a probability")));
        }
        let input = QubitPhononInput {
            a: Complex64::new(a2.sqrt(), 0.0),
            b: Complex64::new((1.0 - a2).sqrt(), 0.0),
            n,
            epsilon,
        };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.a.re, self.a.im, self.b.re, self.b.im, self.n, self.epsilon];
        if !vals.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("qubit-phonon input".into()));
        }
        let norm = self.a.norm_sqr() + self.b.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("|a|^2 + |b|^2 = {norm}, expected 1")));
        }
        if self.n < 0.0 {
            return Err(Error::invalid(format!("phonon number {} is negative", self.n)));
        }
        Ok(())
    }

    /// Coherence factor `exp(-2 n eps^2)`.
    pub fn coherence(&self) -> f64 {
        (-2.0 * self.n * self.epsilon * self.epsilon).exp()
    }
}

/// Qubit density matrix after tracing out both motional modes.
pub fn reduced_density_matrix(input: &QubitPhononInput) -> Result<Matrix2<Complex64>> {
    input.validate()?;
    let d = input.coherence();
    let (a, b) = (input.a, input.b);
    Ok(Matrix2::new(
        Complex64::new(a.norm_sqr(), 0.0),
        a * b.conj() * d,
        a.conj() * b * d,
        Complex64::new(b.norm_sqr(), 0.0),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FidelityReport {
    pub exact: f64,
    /// Leading order in `eps`: `1 - 4|a|^2 (1 - |a|^2) n eps^2`.
    pub linearized: f64,
    /// `exact - linearized`.
    pub difference: f64,
}

/// Overlap `<psi|rho|psi>` with the ideal state, in closed form.
pub fn fidelity(input: &QubitPhononInput) -> Result<FidelityReport> {
    input.validate()?;
    let p = input.a.norm_sqr();
    let x = input.n * input.epsilon * input.epsilon;
    let w = 4.0 * p * (1.0 - p);
    let exact = 1.0 + 0.5 * w * (-2.0 * x).exp_m1();
    let linearized = 1.0 - w * x;
    Ok(FidelityReport { exact, linearized, difference: exact - linearized })
}

/// Overlap `<psi|rho|psi>` for an arbitrary qubit density matrix.
pub fn state_fidelity(rho: &Matrix2<Complex64>, a: Complex64, b: Complex64) -> f64 {
    let psi = nalgebra::Vector2::new(a, b);
    (psi.adjoint() * rho * psi)[(0, 0)].re
}

/// `<alpha|beta>` for coherent states.
pub fn coherent_overlap(alpha: Complex64, beta: Complex64) -> Complex64 {
    let arg = Complex64::new(-0.5 * (alpha - beta).norm_sqr(), (alpha.conj() * beta).im);
    arg.exp()
}

/// Reduced density matrix built from the post-swap motional states.
///
/// The molecular mode carries `+eps sqrt(n)` or `-eps sqrt(n)` depending on
/// the qubit state; the atomic mode carries `sqrt((1 - eps) n)` for both.
pub fn coherent_oracle(input: &QubitPhononInput) -> Result<Matrix2<Complex64>> {
    input.validate()?;
    let shift = input.epsilon * input.n.sqrt();
    let molecule = [Complex64::new(shift, 0.0), Complex64::new(-shift, 0.0)];
    let atom = Complex64::new((1.0 - input.epsilon) * input.n, 0.0).sqrt();
    let amps = [input.a, input.b];
    Ok(Matrix2::from_fn(|i, j| {
        amps[i] * amps[j].conj() * coherent_overlap(molecule[j], molecule[i]) * coherent_overlap(atom, atom)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn half() -> QubitPhononInput {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        QubitPhononInput { a: Complex64::new(r, 0.0), b: Complex64::new(r, 0.0), n: 20.0, epsilon: 0.05 }
    }

    #[test]
    fn worked_example() {
        let rho = reduced_density_matrix(&half()).unwrap();
        assert!((rho[(0, 1)].re - 0.5 * (-0.1f64).exp()).abs() < 1e-15);
        assert!((rho[(0, 1)].re - 0.45242).abs() < 5e-6);
        let f = fidelity(&half()).unwrap();
        assert!((f.exact - 0.952419).abs() < 5e-7, "{}", f.exact);
        assert!((f.linearized - 0.95).abs() < 1e-12);
        // Same value through the hyperbolic form.
        let x: f64 = 0.05;
        assert!((f.exact - (1.0 - (-x).exp() * x.sinh())).abs() < 1e-15);
    }

    #[test]
    fn trivial_limits() {
        let mut input = half();
        input.epsilon = 0.0;
        assert_eq!(fidelity(&input).unwrap().exact, 1.0);
        input.epsilon = 0.3;
        input.n = 0.0;
        assert_eq!(fidelity(&input).unwrap().exact, 1.0);
        let pure = QubitPhononInput::from_population(1.0, 50.0, 0.2).unwrap();
        assert_eq!(fidelity(&pure).unwrap().exact, 1.0);
        let rho = reduced_density_matrix(&pure).unwrap();
        assert_eq!(rho[(1, 1)].re, 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut input = half();
        input.a *= 1.01;
        assert!(fidelity(&input).is_err());
        let mut input = half();
        input.n = -1.0;
        assert!(reduced_density_matrix(&input).is_err());
        assert!(QubitPhononInput::from_population(1.2, 1.0, 0.0).is_err());
    }

    #[test]
    fn coherent_overlap_identity() {
        for (n, e) in [(1.0, 0.1), (20.0, 0.05), (300.0, 0.01)] {
            let s = Complex64::new(e * f64::sqrt(n), 0.0);
            let o = coherent_overlap(s, -s);
            assert!((o.re - (-2.0 * n * e * e).exp()).abs() < 1e-15);
            assert_eq!(o.im, 0.0);
        }
    }

    // Overlap formula against a truncated Fock expansion.
    #[test]
    fn coherent_overlap_fock_sum() {
        let fock = |z: Complex64| -> Vec<Complex64> {
            let mut c = vec![(-0.5 * z.norm_sqr()).exp() * Complex64::new(1.0, 0.0)];
            for k in 1..80 {
                let prev = c[k - 1];
                c.push(prev * z / (k as f64).sqrt());
            }
            c
        };
        let (x, y) = (Complex64::new(0.7, -1.1), Complex64::new(-0.4, 0.9));
        let s: Complex64 = fock(x).iter().zip(fock(y)).map(|(p, q)| p.conj() * q).sum();
        assert!((s - coherent_overlap(x, y)).norm() < 1e-13);
    }

    #[test]
    fn oracle_agrees_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p: f64 = rng.random();
            let (pa, pb) = (rng.random_range(0.0..std::f64::consts::TAU), rng.random_range(0.0..std::f64::consts::TAU));
            let input = QubitPhononInput {
                a: Complex64::from_polar(p.sqrt(), pa),
                b: Complex64::from_polar((1.0 - p).sqrt(), pb),
                n: rng.random_range(0.0..200.0),
                epsilon: rng.random_range(0.0..0.3),
            };
            let closed = reduced_density_matrix(&input).unwrap();
            let oracle = coherent_oracle(&input).unwrap();
            assert!((closed - oracle).iter().all(|d| d.norm() < 1e-12));
            let f = fidelity(&input).unwrap().exact;
            assert!((f - state_fidelity(&oracle, input.a, input.b)).abs() < 1e-12);
        }
    }

    #[test]
    fn limiting_slope() {
        for a2 in [0.1, 0.5, 0.8] {
            for n in [1.0, 20.0, 500.0] {
                let input = QubitPhononInput::from_population(a2, n, 1e-4).unwrap();
                let f = fidelity(&input).unwrap();
                let slope = (1.0 - f.exact) / (n * 1e-8);
                let expected = 4.0 * a2 * (1.0 - a2);
                assert!((slope / expected - 1.0).abs() < 1e-3);
            }
        }
    }

    proptest! {
        #[test]
        fn density_matrix_is_physical(a2 in 0.0f64..=1.0, n in 0.0f64..1e3, e in -1.0f64..1.0) {
            let input = QubitPhononInput::from_population(a2, n, e).unwrap();
            let rho = reduced_density_matrix(&input).unwrap();
            prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
            let det = (rho[(0, 0)] * rho[(1, 1)] - rho[(0, 1)] * rho[(1, 0)]).re;
            prop_assert!(det >= -1e-15);
            let f = fidelity(&input).unwrap();
            prop_assert!((0.0..=1.0).contains(&f.exact));
            prop_assert!(f.difference >= -1e-15);
        }

        #[test]
        fn balanced_superposition_is_worst(a2 in 0.0f64..=1.0, n in 0.0f64..100.0, e in 0.0f64..0.5) {
            let f = fidelity(&QubitPhononInput::from_population(a2, n, e).unwrap()).unwrap().exact;
            let worst = fidelity(&QubitPhononInput::from_population(0.5, n, e).unwrap()).unwrap().exact;
            prop_assert!(f >= worst - 1e-15);
        }
    }
}
