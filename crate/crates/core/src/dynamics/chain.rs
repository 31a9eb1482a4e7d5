use nalgebra::DMatrix;

use super::state::{GaussianState, QuadraticForm};
use crate::error::{Error, Result};

/// Which Hamiltonian to assemble from the chain couplings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ChainModel {
    /// All quadratic terms, counter-rotating ones included.
    #[default]
    Full,
    /// Number-conserving part only.
    RotatingWave,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InitialState {
    /// Zero-mean molecules with covariance `(n̄ + ½) I`.
    #[default]
    Thermal,
    /// Molecules displaced along X to occupation `n̄`.
    Coherent,
}

/// A 1D chain of `n` atom-molecule pairs with power-law couplings.
///
/// The Hamiltonian is
/// `Σ ω_z (a†a + m†m) + Σ_{i<j} K_ij (X_ai − X_aj)² + Σ_{i<j} L_ij (X_mi − X_mj)² + Σ_ij F_ij (X_ai − X_mj)²`
/// with `K_ij = G_aa/(η|i−j|)^{α+2}`, `L_ij` likewise with `G_mm`, and
/// `F_ij = G_am/[η²(i−j)² + 1]^{(α+2)/2}`. Negative couplings flip the sign
/// of the corresponding curvature.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    pub n: usize,
    pub g_aa: f64,
    pub g_mm: f64,
    pub g_am: f64,
    /// Ratio of intra-species spacing to atom-molecule separation.
    pub eta: f64,
    pub alpha: f64,
    pub omega_z: f64,
    pub initial_molecule_occupation: f64,
    pub model: ChainModel,
    pub initial: InitialState,
}

impl ChainSpec {
    /// Single pair with `ω_z = ratio · G_am` and 20 initial phonons.
    pub fn pair(g_am: f64, omega_over_g: f64) -> Self {
        ChainSpec {
            n: 1,
            g_aa: 0.0,
            g_mm: 0.0,
            g_am,
            eta: 1.0,
            alpha: 6.0,
            omega_z: omega_over_g * g_am.abs(),
            initial_molecule_occupation: 20.0,
            model: ChainModel::Full,
            initial: InitialState::Thermal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("chain needs at least one pair"));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.omega_z > 0.0 && self.omega_z.is_finite()) {
            return Err(Error::invalid(format!("omega_z must be positive, got {}", self.omega_z)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.g_am == 0.0 || ![self.g_aa, self.g_mm, self.g_am].iter().all(|g| g.is_finite()) {
            return Err(Error::invalid("couplings must be finite with G_am ≠ 0"));
        }
        if !(self.initial_molecule_occupation > 0.0 && self.initial_molecule_occupation.is_finite()) {
            return Err(Error::invalid("initial molecular occupation must be positive"));
        }
        Ok(())
    }

    pub fn k(&self, i: usize, j: usize) -> f64 {
        self.intra(self.g_aa, i, j)
    }

    pub fn l(&self, i: usize, j: usize) -> f64 {
        self.intra(self.g_mm, i, j)
    }

    pub fn f(&self, i: usize, j: usize) -> f64 {
        let d = i.abs_diff(j) as f64;
        self.g_am / ((self.eta * d).powi(2) + 1.0).powf((self.alpha + 2.0) / 2.0)
    }

    fn intra(&self, g: f64, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        g / (self.eta * i.abs_diff(j) as f64).powf(self.alpha + 2.0)
    }

    /// Modes `0..n` are atoms, `n..2n` molecules.
    pub fn initial_state(&self) -> GaussianState {
        let mut st = GaussianState::vacuum(2 * self.n);
        let n0 = self.initial_molecule_occupation;
        for i in self.n..2 * self.n {
            match self.initial {
                InitialState::Thermal => st.set_thermal(i, n0),
                InitialState::Coherent => st.mean[i] = (2.0 * n0).sqrt(),
            }
        }
        st
    }
}

/// Coupling part `W` of the position matrix, `H_int = ½ Xᵀ W X`.
pub(crate) fn coupling_matrix(spec: &ChainSpec) -> DMatrix<f64> {
    let n = spec.n;
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    let spring = |w: &mut DMatrix<f64>, p: usize, q: usize, c: f64| {
        w[(p, p)] += 2.0 * c;
        w[(q, q)] += 2.0 * c;
        w[(p, q)] -= 2.0 * c;
        w[(q, p)] -= 2.0 * c;
    };
    for i in 0..n {
        for j in 0..n {
            if i < j {
                spring(&mut w, i, j, spec.k(i, j));
                spring(&mut w, n + i, n + j, spec.l(i, j));
            }
            spring(&mut w, i, n + j, spec.f(i, j));
        }
    }
    w
}

/// Assembles the chain's quadratic form; instability is flagged on the result.
pub fn build_chain(spec: &ChainSpec) -> Result<QuadraticForm> {
    spec.validate()?;
    let omegas = vec![spec.omega_z; 2 * spec.n];
    let w = coupling_matrix(spec);
    match spec.model {
        ChainModel::Full => QuadraticForm::with_couplings(&omegas, &w),
        ChainModel::RotatingWave => QuadraticForm::rotating_wave(&omegas, &w),
    }
}
