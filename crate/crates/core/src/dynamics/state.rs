use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::expm::expm;
use crate::error::{Error, Result};

/// Eigenvalue floor below which a quadratic form counts as unstable.
pub const STABILITY_FLOOR: f64 = 1e-12;

/// `H = ½ Xᵀ V X + ½ Pᵀ T P + lᵀ X` over `modes` bosonic modes.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    position: DMatrix<f64>,
    momentum: DMatrix<f64>,
    linear: DVector<f64>,
    min_position_eigenvalue: f64,
    min_momentum_eigenvalue: f64,
}

fn check_symmetric(m: &DMatrix<f64>, what: &str) -> Result<()> {
    let scale = m.amax().max(1.0);
    if (m - m.transpose()).amax() > 1e-12 * scale {
        return Err(Error::invalid(format!("{what} matrix is not symmetric")));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("{what} matrix")));
    }
    Ok(())
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

impl QuadraticForm {
    pub fn new(position: DMatrix<f64>, momentum: DMatrix<f64>, linear: DVector<f64>) -> Result<Self> {
        let n = position.nrows();
        if !position.is_square() || momentum.shape() != (n, n) || linear.len() != n {
            return Err(Error::invalid("quadratic form blocks have inconsistent sizes"));
        }
        check_symmetric(&position, "position")?;
        check_symmetric(&momentum, "momentum")?;
        if linear.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("linear terms".into()));
        }
        let min_position_eigenvalue = min_eigenvalue(&position);
        let min_momentum_eigenvalue = min_eigenvalue(&momentum);
        Ok(QuadraticForm { position, momentum, linear, min_position_eigenvalue, min_momentum_eigenvalue })
    }

    /// `V = diag(ω) + W`, `T = diag(ω)`.
    pub fn with_couplings(omegas: &[f64], coupling: &DMatrix<f64>) -> Result<Self> {
        let d = DMatrix::from_diagonal(&DVector::from_row_slice(omegas));
        if coupling.shape() != d.shape() {
            return Err(Error::invalid("coupling matrix size does not match mode count"));
        }
        Self::new(&d + coupling, d.clone(), DVector::zeros(omegas.len()))
    }

    /// Number-conserving part of [`QuadraticForm::with_couplings`]:
    /// `V = T = diag(ω) + W/2`.
    pub fn rotating_wave(omegas: &[f64], coupling: &DMatrix<f64>) -> Result<Self> {
        let d = DMatrix::from_diagonal(&DVector::from_row_slice(omegas));
        if coupling.shape() != d.shape() {
            return Err(Error::invalid("coupling matrix size does not match mode count"));
        }
        let m = &d + coupling * 0.5;
        Self::new(m.clone(), m, DVector::zeros(omegas.len()))
    }

    pub fn modes(&self) -> usize {
        self.position.nrows()
    }

    pub fn position_matrix(&self) -> &DMatrix<f64> {
        &self.position
    }

    pub fn momentum_matrix(&self) -> &DMatrix<f64> {
        &self.momentum
    }

    pub fn linear_positions(&self) -> &DVector<f64> {
        &self.linear
    }

    pub fn min_position_eigenvalue(&self) -> f64 {
        self.min_position_eigenvalue
    }

    pub fn is_stable(&self) -> bool {
        self.min_position_eigenvalue > STABILITY_FLOOR && self.min_momentum_eigenvalue > STABILITY_FLOOR
    }

    /// Hamiltonian flow matrix `[[0, T], [−V, 0]]`, per unit angular time.
    pub fn generator(&self) -> DMatrix<f64> {
        let n = self.modes();
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        a.view_mut((0, n), (n, n)).copy_from(&self.momentum);
        a.view_mut((n, 0), (n, n)).copy_from(&(-&self.position));
        a
    }

    /// Symplectic propagator over time `t` (ms).
    pub fn propagator(&self, t: f64) -> Result<Propagator> {
        if !t.is_finite() {
            return Err(Error::NonFinite("evolution time".into()));
        }
        if !self.is_stable() {
            return Err(Error::Unstable(format!(
                "minimum eigenvalues {:.3e} (position), {:.3e} (momentum) below floor {STABILITY_FLOOR:e}",
                self.min_position_eigenvalue, self.min_momentum_eigenvalue
            )));
        }
        let n = self.modes();
        let matrix = expm(&(self.generator() * (2.0 * PI * t)))?;
        let mut equilibrium = DVector::zeros(2 * n);
        if self.linear.iter().any(|&x| x != 0.0) {
            let x_eq = self
                .position
                .clone()
                .lu()
                .solve(&(-&self.linear))
                .ok_or_else(|| Error::NonFinite("singular position matrix".into()))?;
            equilibrium.rows_mut(0, n).copy_from(&x_eq);
        }
        Ok(Propagator { matrix, equilibrium })
    }

    /// `⟨H⟩` in the state.
    pub fn energy(&self, state: &GaussianState) -> f64 {
        let n = self.modes();
        let cx = state.covariance.view((0, 0), (n, n));
        let cp = state.covariance.view((n, n), (n, n));
        let mx = state.mean.rows(0, n);
        let mp = state.mean.rows(n, n);
        let tr_v = self.position.component_mul(&cx).sum();
        let tr_t = self.momentum.component_mul(&cp).sum();
        0.5 * (tr_v + tr_t) + 0.5 * (mx.dot(&(&self.position * mx)) + mp.dot(&(&self.momentum * mp))) + self.linear.dot(&mx)
    }
}

/// Affine symplectic map `r ↦ S (r − r*) + r*`.
#[derive(Clone, Debug, PartialEq)]
pub struct Propagator {
    pub matrix: DMatrix<f64>,
    pub equilibrium: DVector<f64>,
}

impl Propagator {
    /// `max |S J Sᵀ − J|`.
    pub fn symplectic_defect(&self) -> f64 {
        let j = symplectic_form(self.matrix.nrows() / 2);
        (&self.matrix * &j * self.matrix.transpose() - j).amax()
    }

    pub fn apply(&self, state: &GaussianState) -> GaussianState {
        let mean = &self.matrix * (&state.mean - &self.equilibrium) + &self.equilibrium;
        let covariance = &self.matrix * &state.covariance * self.matrix.transpose();
        GaussianState { mean, covariance: (&covariance + covariance.transpose()) * 0.5 }
    }
}

/// `J = [[0, I], [−I, 0]]`.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * modes, 2 * modes);
    for i in 0..modes {
        j[(i, modes + i)] = 1.0;
        j[(modes + i, i)] = -1.0;
    }
    j
}

/// Mean vector (positions then momenta) and covariance `½⟨{Δr, Δrᵀ}⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl GaussianState {
    pub fn vacuum(modes: usize) -> Self {
        GaussianState { mean: DVector::zeros(2 * modes), covariance: DMatrix::identity(2 * modes, 2 * modes) * 0.5 }
    }

    pub fn modes(&self) -> usize {
        self.mean.len() / 2
    }

    /// Replaces mode `k` by a thermal state with occupation `n`.
    pub fn set_thermal(&mut self, k: usize, n: f64) {
        let m = self.modes();
        for idx in [k, m + k] {
            self.covariance.row_mut(idx).fill(0.0);
            self.covariance.column_mut(idx).fill(0.0);
        }
        self.covariance[(k, k)] = n + 0.5;
        self.covariance[(m + k, m + k)] = n + 0.5;
    }

    /// `n̄_k = (Σ_xx + Σ_pp + μ_x² + μ_p² − 1)/2` per mode.
    pub fn mode_occupations(&self) -> Vec<f64> {
        let m = self.modes();
        (0..m)
            .map(|k| {
                let c = self.covariance[(k, k)] + self.covariance[(m + k, m + k)];
                let mu = self.mean[k].powi(2) + self.mean[m + k].powi(2);
                (c + mu - 1.0) / 2.0
            })
            .collect()
    }

    /// Smallest eigenvalue of `Σ + (i/2) J`; non-negative for physical states.
    pub fn uncertainty_margin(&self) -> f64 {
        let m = self.modes();
        let j = symplectic_form(m);
        let h = DMatrix::from_fn(2 * m, 2 * m, |r, c| Complex64::new(self.covariance[(r, c)], 0.5 * j[(r, c)]));
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.mean.len();
        if n % 2 != 0 || self.covariance.shape() != (n, n) {
            return Err(Error::invalid("state dimensions are inconsistent"));
        }
        check_symmetric(&self.covariance, "covariance")?;
        if self.uncertainty_margin() < -1e-9 {
            return Err(Error::Constraint("covariance violates the uncertainty relation".into()));
        }
        Ok(())
    }
}

/// Evolves `state` under `form` for time `t` (ms).
pub fn evolve(form: &QuadraticForm, state: &GaussianState, t: f64) -> Result<GaussianState> {
    if state.modes() != form.modes() || state.covariance.nrows() != 2 * form.modes() {
        return Err(Error::invalid("state and quadratic form have different mode counts"));
    }
    Ok(form.propagator(t)?.apply(state))
}
