//! Bialkali hyperfine and Zeeman structure on a single rotational manifold.
//!
//! The basis is the uncoupled product `|N m_N> (x) |I1 m_I1> (x) |I2 m_I2>`,
//! ordered with `m_N` outermost and `m_I2` innermost, each projection
//! ascending. All matrices are real symmetric and in kHz.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::angular::{w3j_twice, HalfInt};
use crate::error::{Error, Result};
use crate::units::{BOHR_MAGNETON_KHZ_PER_MT, ELECTRON_G, NUCLEAR_MAGNETON_KHZ_PER_MT};

const NACS_TOML: &str = include_str!("../data/nacs.toml");
const LICS_TOML: &str = include_str!("../data/lics.toml");

/// Hyperfine and nuclear Zeeman constants of a bialkali molecule.
///
/// Quadrupole constants are in MHz, spin-rotation, tensor and scalar
/// couplings in Hz, the rotational constant in GHz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperfineSpec {
    #[serde(default)]
    pub name: String,
    pub i1: HalfInt,
    pub i2: HalfInt,
    pub eqq_mhz: [f64; 2],
    pub c_hz: [f64; 4],
    pub g: [f64; 2],
    pub sigma: [f64; 2],
    pub b0_ghz: f64,
}

impl HyperfineSpec {
    pub fn nacs() -> Self {
        Self::from_toml_str(NACS_TOML).expect("bundled NaCs table parses")
    }

    pub fn lics() -> Self {
        Self::from_toml_str(LICS_TOML).expect("bundled LiCs table parses")
    }

    /// Bundled table by molecule name (case-insensitive).
    pub fn named(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "nacs" => Some(Self::nacs()),
            "lics" => Some(Self::lics()),
            _ => None,
        }
    }

    /// Spins only, every coupling zero.
    pub fn bare(i1: HalfInt, i2: HalfInt) -> Self {
        HyperfineSpec {
            name: String::new(),
            i1,
            i2,
            eqq_mhz: [0.0; 2],
            c_hz: [0.0; 4],
            g: [0.0; 2],
            sigma: [0.0; 2],
            b0_ghz: 0.0,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: HyperfineSpec =
            toml::from_str(text).map_err(|e| Error::invalid(format!("hyperfine table: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (k, spin) in [self.i1, self.i2].into_iter().enumerate() {
            if spin.twice() < 0 {
                return Err(Error::invalid(format!("nuclear spin I{} must be non-negative", k + 1)));
            }
            if spin.twice() < 2 && self.eqq_mhz[k] != 0.0 {
                return Err(Error::Constraint(format!(
                    "I{} = {spin} cannot carry a quadrupole moment (eQq = {} MHz)",
                    k + 1,
                    self.eqq_mhz[k]
                )));
            }
        }
        let all = self.eqq_mhz.iter().chain(&self.c_hz).chain(&self.g).chain(&self.sigma);
        if !all.chain([&self.b0_ghz]).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("hyperfine constants".into()));
        }
        Ok(())
    }

    /// Quadrupole constants in kHz.
    pub fn eqq_khz(&self) -> [f64; 2] {
        self.eqq_mhz.map(|v| v * 1e3)
    }

    /// `c1..c4` in kHz.
    pub fn c_khz(&self) -> [f64; 4] {
        self.c_hz.map(|v| v * 1e-3)
    }

    /// Rigid-rotor energy `B0 N(N+1)` in kHz.
    pub fn rotational_energy(&self, n: u32) -> f64 {
        self.b0_ghz * 1e6 * f64::from(n * (n + 1))
    }

    /// Shielded nuclear Zeeman slopes `g_i (1 - sigma_i) mu_N` in kHz/mT.
    pub fn nuclear_slopes(&self) -> [f64; 2] {
        [0, 1].map(|k| self.g[k] * (1.0 - self.sigma[k]) * NUCLEAR_MAGNETON_KHZ_PER_MT)
    }
}

/// One uncoupled basis state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RotBasisState {
    pub n: u32,
    pub m_n: i32,
    pub m_i1: HalfInt,
    pub m_i2: HalfInt,
}

impl RotBasisState {
    pub fn total_projection(&self) -> HalfInt {
        HalfInt::integer(self.m_n) + self.m_i1 + self.m_i2
    }

    pub fn label(&self) -> String {
        format!("|{},{};{},{}>", self.n, self.m_n, self.m_i1, self.m_i2)
    }
}

/// Basis of the rotational manifold `N` in matrix order.
pub fn hyperfine_basis(n: u32, spec: &HyperfineSpec) -> Vec<RotBasisState> {
    let n_i = n as i32;
    let mut out = Vec::with_capacity((2 * n as usize + 1) * spec.i1.multiplicity() * spec.i2.multiplicity());
    for m_n in -n_i..=n_i {
        for m_i1 in spec.i1.projections() {
            for m_i2 in spec.i2.projections() {
                out.push(RotBasisState { n, m_n, m_i1, m_i2 });
            }
        }
    }
    out
}

/// Spherical components `[J_-1, J_0, J_+1]` of an angular momentum.
fn spherical_spin(j: HalfInt) -> [DMatrix<f64>; 3] {
    let ms: Vec<HalfInt> = j.projections().collect();
    let d = ms.len();
    let jj = j.value() * (j.value() + 1.0);
    let mut raise = DMatrix::zeros(d, d);
    for k in 0..d.saturating_sub(1) {
        let m = ms[k].value();
        raise[(k + 1, k)] = (jj - m * (m + 1.0)).sqrt();
    }
    let lower = raise.transpose();
    let z = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, ms.iter().map(|m| m.value())));
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [lower * r, z, raise * -r]
}

fn sign(p: i32) -> f64 {
    if p.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Rank-2 coupling `T^2_q(A, B)` for `q = -2..=2`, operators on a common space.
fn rank_two(a: &[DMatrix<f64>; 3], b: &[DMatrix<f64>; 3]) -> [DMatrix<f64>; 5] {
    let d = a[0].nrows();
    std::array::from_fn(|k| {
        let q = k as i32 - 2;
        let mut out = DMatrix::zeros(d, d);
        for q1 in -1..=1 {
            let q2 = q - q1;
            if q2.abs() > 1 {
                continue;
            }
            let cg = sign(q) * 5f64.sqrt() * w3j_twice([2, 2, 4, 2 * q1, 2 * q2, -2 * q]);
            if cg != 0.0 {
                out += (&a[(q1 + 1) as usize] * &b[(q2 + 1) as usize]) * cg;
            }
        }
        out
    })
}

/// `<N m|C^2_p|N m'>` for `p = -2..=2`.
fn rotational_c2(n: u32) -> [DMatrix<f64>; 5] {
    let tn = 2 * n as i32;
    let d = (tn + 1) as usize;
    let reduced = f64::from(tn + 1) * w3j_twice([tn, 4, tn, 0, 0, 0]);
    std::array::from_fn(|k| {
        let p = k as i32 - 2;
        DMatrix::from_fn(d, d, |i, j| {
            let m = i as i32 - n as i32;
            let mp = j as i32 - n as i32;
            if m != p + mp || reduced == 0.0 {
                return 0.0;
            }
            sign(m) * reduced * w3j_twice([tn, 4, tn, -2 * m, 2 * p, 2 * mp])
        })
    })
}

struct NuclearOps {
    i1: [DMatrix<f64>; 3],
    i2: [DMatrix<f64>; 3],
    dim: usize,
}

impl NuclearOps {
    fn new(spec: &HyperfineSpec) -> Self {
        let (d1, d2) = (spec.i1.multiplicity(), spec.i2.multiplicity());
        let (e1, e2) = (DMatrix::<f64>::identity(d1, d1), DMatrix::<f64>::identity(d2, d2));
        let s1 = spherical_spin(spec.i1);
        let s2 = spherical_spin(spec.i2);
        NuclearOps {
            i1: std::array::from_fn(|k| s1[k].kronecker(&e2)),
            i2: std::array::from_fn(|k| e1.kronecker(&s2[k])),
            dim: d1 * d2,
        }
    }
}

/// Scalar product `A.B = sum_p (-1)^p A_p B_-p` of operators on a common space.
fn dot(a: &[DMatrix<f64>; 3], b: &[DMatrix<f64>; 3]) -> DMatrix<f64> {
    &a[1] * &b[1] - &a[2] * &b[0] - &a[0] * &b[2]
}

/// Hyperfine Hamiltonian `H_Q + H_IN + H_t + H_sc` on manifold `N`, in kHz.
///
/// Couplings between different `N` are neglected.
pub fn build_hyperfine(n: u32, spec: &HyperfineSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let nuc = NuclearOps::new(spec);
    let dr = 2 * n as usize + 1;
    let dim = dr * nuc.dim;
    let eqq = spec.eqq_khz();
    let c = spec.c_khz();

    // Nuclear rank-2 operator contracted against T^2(C).
    let mut tensor: [DMatrix<f64>; 5] = std::array::from_fn(|_| DMatrix::zeros(nuc.dim, nuc.dim));
    for (k, (spin, ops)) in [(spec.i1, &nuc.i1), (spec.i2, &nuc.i2)].into_iter().enumerate() {
        if spin.twice() < 2 || eqq[k] == 0.0 {
            continue;
        }
        let i = spin.value();
        let coef = eqq[k] * 6f64.sqrt() / (4.0 * i * (2.0 * i - 1.0));
        for (t, x) in tensor.iter_mut().zip(rank_two(ops, ops)) {
            *t += x * coef;
        }
    }
    if c[2] != 0.0 {
        let coef = -c[2] * 6f64.sqrt();
        for (t, x) in tensor.iter_mut().zip(rank_two(&nuc.i1, &nuc.i2)) {
            *t += x * coef;
        }
    }

    let mut h = DMatrix::zeros(dim, dim);
    if n > 0 {
        let c2 = rotational_c2(n);
        for p in -2i32..=2 {
            h += c2[(p + 2) as usize].kronecker(&tensor[(2 - p) as usize]) * sign(p);
        }
        let rot = spherical_spin(HalfInt::integer(n as i32));
        let spin_rotation: [DMatrix<f64>; 3] = std::array::from_fn(|k| &nuc.i1[k] * c[0] + &nuc.i2[k] * c[1]);
        for p in -1i32..=1 {
            h += rot[(p + 1) as usize].kronecker(&spin_rotation[(1 - p) as usize]) * sign(p);
        }
    }
    if c[3] != 0.0 {
        h += DMatrix::<f64>::identity(dr, dr).kronecker(&(dot(&nuc.i1, &nuc.i2) * c[3]));
    }
    Ok(h)
}

/// Diagonal nuclear Zeeman term `-sum_i g_i mu_N B (1 - sigma_i) m_Ii` on manifold `N`.
///
/// Rotational and electronic g-factors are neglected.
pub fn build_zeeman_molecule(n: u32, spec: &HyperfineSpec, b_mt: f64) -> DMatrix<f64> {
    let slopes = spec.nuclear_slopes();
    let diag = hyperfine_basis(n, spec)
        .iter()
        .map(|s| -b_mt * (slopes[0] * s.m_i1.value() + slopes[1] * s.m_i2.value()))
        .collect::<Vec<_>>();
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
}

/// Atomic basis `|m_L, m_S>` with `m_L` outermost.
pub fn atom_basis(l: u32, s: HalfInt) -> Vec<(i32, HalfInt)> {
    let l = l as i32;
    (-l..=l).flat_map(|ml| s.projections().map(move |ms| (ml, ms))).collect()
}

/// Diagonal atomic Zeeman term `mu_B B (g_L m_L + g_s m_S)` with `g_L = 1`.
pub fn build_zeeman_atom(l: u32, s: HalfInt, b_mt: f64) -> DMatrix<f64> {
    let diag = atom_basis(l, s)
        .into_iter()
        .map(|(ml, ms)| BOHR_MAGNETON_KHZ_PER_MT * b_mt * (f64::from(ml) + ELECTRON_G * ms.value()))
        .collect::<Vec<_>>();
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
}

/// Options for [`spectrum`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpectrumOptions {
    /// Field in mT.
    pub b_mt: f64,
    /// Keep only this `m_N` block, modelling light shifts that isolate it.
    pub m_n: Option<i32>,
}

/// Eigen-decomposition of a manifold with per-state labels.
#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub n: u32,
    pub basis: Vec<RotBasisState>,
    /// Ascending, in kHz, relative to the rigid-rotor energy.
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors in the `basis` order.
    pub eigenvectors: DMatrix<f64>,
    pub dominant: Vec<RotBasisState>,
    pub dominant_weight: Vec<f64>,
    /// `1 - dominant_weight`.
    pub mixing: Vec<f64>,
    pub total_projection: Vec<HalfInt>,
    pub rotational_energy: f64,
}

impl SpectrumReport {
    /// Largest `|V^T V - 1|` entry.
    pub fn unitarity_defect(&self) -> f64 {
        let v = &self.eigenvectors;
        let g = v.transpose() * v - DMatrix::<f64>::identity(v.ncols(), v.ncols());
        g.amax()
    }
}

/// Rows and columns of `h` whose basis states carry the given `m_N`.
pub fn restrict_to_m_n(
    h: &DMatrix<f64>,
    basis: &[RotBasisState],
    m_n: i32,
) -> Result<(DMatrix<f64>, Vec<RotBasisState>)> {
    let idx: Vec<usize> = (0..basis.len()).filter(|&i| basis[i].m_n == m_n).collect();
    if idx.is_empty() {
        return Err(Error::invalid(format!("no basis states with m_N = {m_n}")));
    }
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| h[(idx[i], idx[j])]);
    Ok((sub, idx.iter().map(|&i| basis[i]).collect()))
}

/// Diagonalizes a real symmetric matrix block by block in total projection.
fn block_eigen(h: &DMatrix<f64>, basis: &[RotBasisState]) -> (Vec<f64>, DMatrix<f64>) {
    let mut blocks: BTreeMap<HalfInt, Vec<usize>> = BTreeMap::new();
    for (i, s) in basis.iter().enumerate() {
        blocks.entry(s.total_projection()).or_default().push(i);
    }
    let dim = basis.len();
    let mut pairs: Vec<(f64, Vec<(usize, f64)>)> = Vec::with_capacity(dim);
    for idx in blocks.values() {
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| h[(idx[i], idx[j])]);
        let eig = SymmetricEigen::new(sub);
        for k in 0..idx.len() {
            let col = eig.eigenvectors.column(k);
            // Fix the overall sign so the largest component is positive.
            let imax = col.iamax();
            let s = if col[imax] < 0.0 { -1.0 } else { 1.0 };
            pairs.push((eig.eigenvalues[k], idx.iter().zip(col.iter()).map(|(&i, &v)| (i, s * v)).collect()));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut vecs = DMatrix::zeros(dim, dim);
    let mut vals = Vec::with_capacity(dim);
    for (k, (e, col)) in pairs.into_iter().enumerate() {
        vals.push(e);
        for (i, v) in col {
            vecs[(i, k)] = v;
        }
    }
    (vals, vecs)
}

fn report(n: u32, h: &DMatrix<f64>, basis: Vec<RotBasisState>, spec: &HyperfineSpec) -> SpectrumReport {
    let (eigenvalues, eigenvectors) = block_eigen(h, &basis);
    let mut dominant = Vec::with_capacity(basis.len());
    let mut dominant_weight = Vec::with_capacity(basis.len());
    for col in eigenvectors.column_iter() {
        let i = col.iamax();
        dominant.push(basis[i]);
        dominant_weight.push(col[i] * col[i]);
    }
    SpectrumReport {
        n,
        total_projection: dominant.iter().map(RotBasisState::total_projection).collect(),
        mixing: dominant_weight.iter().map(|w| 1.0 - w).collect(),
        dominant,
        dominant_weight,
        eigenvalues,
        eigenvectors,
        basis,
        rotational_energy: spec.rotational_energy(n),
    }
}

/// Hyperfine plus nuclear Zeeman spectrum of manifold `N`.
pub fn spectrum(n: u32, spec: &HyperfineSpec, options: SpectrumOptions) -> Result<SpectrumReport> {
    if !options.b_mt.is_finite() {
        return Err(Error::NonFinite("magnetic field".into()));
    }
    let h = build_hyperfine(n, spec)? + build_zeeman_molecule(n, spec, options.b_mt);
    let basis = hyperfine_basis(n, spec);
    match options.m_n {
        None => Ok(report(n, &h, basis, spec)),
        Some(m) => {
            if m.unsigned_abs() > n {
                return Err(Error::invalid(format!("|m_N| = {} exceeds N = {n}", m.abs())));
            }
            let (sub, b) = restrict_to_m_n(&h, &basis, m)?;
            Ok(report(n, &sub, b, spec))
        }
    }
}

/// Purity of an eigenstate nearest a stretched basis state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StretchedPurity {
    pub state: RotBasisState,
    pub purity: f64,
    /// kHz, relative to the rigid-rotor energy.
    pub energy: f64,
}

/// Overlap of each stretched state with its nearest eigenvector, at zero field.
pub fn stretched_state_purity(n: u32, spec: &HyperfineSpec) -> Result<Vec<StretchedPurity>> {
    stretched_state_purity_at(n, spec, 0.0)
}

pub fn stretched_state_purity_at(n: u32, spec: &HyperfineSpec, b_mt: f64) -> Result<Vec<StretchedPurity>> {
    let rep = spectrum(n, spec, SpectrumOptions { b_mt, m_n: None })?;
    let stretched = [1, -1].map(|s| RotBasisState {
        n,
        m_n: s * n as i32,
        m_i1: if s > 0 { spec.i1 } else { -spec.i1 },
        m_i2: if s > 0 { spec.i2 } else { -spec.i2 },
    });
    let count = if n == 0 && spec.i1.twice() == 0 && spec.i2.twice() == 0 { 1 } else { 2 };
    stretched[..count]
        .iter()
        .map(|state| {
            let i = rep.basis.iter().position(|b| b == state).expect("stretched state is in the basis");
            let (k, overlap) = rep
                .eigenvectors
                .row(i)
                .iter()
                .map(|v| v * v)
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty basis");
            Ok(StretchedPurity { state: *state, purity: overlap, energy: rep.eigenvalues[k] })
        })
        .collect()
}

/// Detuning spread between matched nuclear states of two rotational manifolds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DressingReport {
    pub n_low: u32,
    pub n_high: u32,
    pub m_n: i32,
    pub b_mt: f64,
    pub rabi: f64,
    /// Transition detunings of matched pairs relative to the bare rotational gap, kHz.
    pub detunings: Vec<f64>,
    /// `max - min` of `detunings`.
    pub range: f64,
    /// `range / (2 rabi)`.
    pub epsilon: f64,
    /// `epsilon^2`.
    pub deviation: f64,
    /// Population standard deviation of `detunings` over `rabi`.
    pub epsilon_std: f64,
}

/// `epsilon^2` for a given full detuning range and Rabi frequency.
pub fn deviation_from_range(range: f64, rabi: f64) -> Result<f64> {
    if !(rabi > 0.0) || !rabi.is_finite() {
        return Err(Error::invalid("Rabi frequency must be positive"));
    }
    let eps = range / (2.0 * rabi);
    Ok(eps * eps)
}

/// Greedy maximum-overlap pairing of two orthonormal column sets.
///
/// Returns `(i, j)` pairs of column indices, ties broken by index.
pub fn match_states(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let overlap = (a.transpose() * b).map(|v| v * v);
    let mut order: Vec<(usize, usize)> =
        (0..overlap.nrows()).flat_map(|i| (0..overlap.ncols()).map(move |j| (i, j))).collect();
    order.sort_by(|x, y| overlap[*y].total_cmp(&overlap[*x]).then(x.cmp(y)));
    let mut used_a = vec![false; overlap.nrows()];
    let mut used_b = vec![false; overlap.ncols()];
    let mut out = Vec::with_capacity(overlap.nrows().min(overlap.ncols()));
    for (i, j) in order {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            out.push((i, j));
        }
    }
    out.sort_unstable();
    out
}

/// Dressing deviation with both manifolds restricted to `m_N = N_low`.
pub fn dressing_deviation(
    n_low: u32,
    n_high: u32,
    spec: &HyperfineSpec,
    b_mt: f64,
    rabi: f64,
) -> Result<DressingReport> {
    dressing_deviation_with(n_low, n_high, spec, b_mt, rabi, None)
}

/// As [`dressing_deviation`], choosing the retained `m_N`.
pub fn dressing_deviation_with(
    n_low: u32,
    n_high: u32,
    spec: &HyperfineSpec,
    b_mt: f64,
    rabi: f64,
    m_n: Option<i32>,
) -> Result<DressingReport> {
    if !(rabi > 0.0) || !rabi.is_finite() {
        return Err(Error::invalid("Rabi frequency must be positive"));
    }
    if n_high.abs_diff(n_low) != 1 {
        return Err(Error::Constraint(format!(
            "manifolds N = {n_low} and N = {n_high} are not coupled by a single microwave photon"
        )));
    }
    let m = m_n.unwrap_or(n_low.min(n_high) as i32);
    let options = SpectrumOptions { b_mt, m_n: Some(m) };
    let low = spectrum(n_low, spec, options)?;
    let high = spectrum(n_high, spec, options)?;
    let detunings: Vec<f64> = match_states(&low.eigenvectors, &high.eigenvectors)
        .into_iter()
        .map(|(i, j)| high.eigenvalues[j] - low.eigenvalues[i])
        .collect();
    let max = detunings.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = detunings.iter().copied().fold(f64::INFINITY, f64::min);
    let range = max - min;
    let mean = detunings.iter().sum::<f64>() / detunings.len() as f64;
    let var = detunings.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / detunings.len() as f64;
    let epsilon = range / (2.0 * rabi);
    Ok(DressingReport {
        n_low,
        n_high,
        m_n: m,
        b_mt,
        rabi,
        detunings,
        range,
        epsilon,
        deviation: epsilon * epsilon,
        epsilon_std: var.sqrt() / rabi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    fn eigen_sorted(h: &DMatrix<f64>) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn bundled_tables() {
        let nacs = HyperfineSpec::nacs();
        assert_eq!(nacs.i1, HalfInt::from_twice(3));
        assert_eq!(nacs.i2, HalfInt::from_twice(7));
        assert_eq!(nacs.c_hz[3], 3941.8);
        let lics = HyperfineSpec::lics();
        assert_eq!(lics.i1, HalfInt::ONE);
        assert_eq!(lics.b0_ghz, 6.520);
        assert_eq!(HyperfineSpec::named("NaCs"), Some(nacs));
        assert!(HyperfineSpec::named("KRb").is_none());
    }

    #[test]
    fn quadrupole_needs_spin_one() {
        let mut spec = HyperfineSpec::bare(HalfInt::HALF, HalfInt::ONE);
        spec.eqq_mhz = [0.1, 0.0];
        assert!(matches!(build_hyperfine(1, &spec), Err(Error::Constraint(_))));
        spec.eqq_mhz = [0.0, 0.1];
        assert!(build_hyperfine(1, &spec).is_ok());
    }

    #[test]
    fn rotational_tensor_elements() {
        let c2 = rotational_c2(1);
        let diag: Vec<f64> = (0..3).map(|i| c2[2][(i, i)]).collect();
        assert_close(diag[0], -0.2, 1e-15);
        assert_close(diag[1], 0.4, 1e-15);
        assert_close(diag[2], -0.2, 1e-15);
        assert!(rotational_c2(0)[2][(0, 0)] == 0.0);
    }

    #[test]
    fn zero_constants_give_zero_matrix() {
        let spec = HyperfineSpec::bare(HalfInt::from_twice(3), HalfInt::from_twice(7));
        for n in 0..3 {
            assert_eq!(build_hyperfine(n, &spec).unwrap().amax(), 0.0);
        }
    }

    #[test]
    fn scalar_spin_spin_spectrum() {
        let mut spec = HyperfineSpec::bare(HalfInt::from_twice(3), HalfInt::from_twice(7));
        spec.c_hz[3] = 3941.8;
        let c4 = spec.c_khz()[3];
        let (i1, i2) = (1.5, 3.5);
        let mut expected = Vec::new();
        for f in 2..=5 {
            let f = f as f64;
            let e = c4 * (f * (f + 1.0) - i1 * (i1 + 1.0) - i2 * (i2 + 1.0)) / 2.0;
            expected.extend(std::iter::repeat_n(e, (2.0 * f + 1.0) as usize));
        }
        expected.sort_by(f64::total_cmp);
        let got = eigen_sorted(&build_hyperfine(0, &spec).unwrap());
        for (g, e) in got.iter().zip(&expected) {
            assert_close(*g, *e, 1e-10);
        }
    }

    #[test]
    fn n_zero_reduces_to_scalar_term() {
        let full = HyperfineSpec::nacs();
        let mut scalar = HyperfineSpec::bare(full.i1, full.i2);
        scalar.c_hz[3] = full.c_hz[3];
        let a = build_hyperfine(0, &full).unwrap();
        let b = build_hyperfine(0, &scalar).unwrap();
        assert!((a - b).amax() < 1e-12);
    }

    // Extremes and a low-lying level from an independent Cartesian construction
    // with spherical-harmonic quadrature for the rotational matrix elements.
    #[test]
    fn spectra_match_cartesian_oracle() {
        let cases = [
            (HyperfineSpec::nacs(), 1, 0.0, [-41.937648571429, 42.608366704894, -39.836646594181]),
            (HyperfineSpec::nacs(), 1, 1.0, [-58.417919029214, 72.553044535702, -48.786248982542]),
            (HyperfineSpec::nacs(), 2, 0.0, [-51.110347396376, 35.042274481639, -43.640261879751]),
            (HyperfineSpec::nacs(), 2, 1.0, [-64.526806894241, 69.510998342032, -49.460656768754]),
            (HyperfineSpec::lics(), 1, 0.0, [-37.921587142857, 24.298729420427, -35.846692137440]),
            (HyperfineSpec::lics(), 1, 1.0, [-57.332950996913, 49.163780649391, -43.529092091543]),
            (HyperfineSpec::lics(), 2, 0.0, [-61.904753061224, 24.694300133667, -60.163207526278]),
            (HyperfineSpec::lics(), 2, 1.0, [-79.249508314954, 49.111404299770, -61.263304673324]),
        ];
        for (spec, n, b, [lo, hi, fifth]) in cases {
            let rep = spectrum(n, &spec, SpectrumOptions { b_mt: b, m_n: None }).unwrap();
            let e = &rep.eigenvalues;
            assert_close(e[0], lo, 1e-9);
            assert_close(e[e.len() - 1], hi, 1e-9);
            assert_close(e[5], fifth, 1e-9);
            assert!(rep.unitarity_defect() < 1e-10);
        }
    }

    #[test]
    fn structure_hermitian_block_diagonal_trace() {
        for spec in [HyperfineSpec::nacs(), HyperfineSpec::lics()] {
            for n in 0..=3 {
                let h = build_hyperfine(n, &spec).unwrap();
                let basis = hyperfine_basis(n, &spec);
                assert!((&h - h.transpose()).amax() <= 1e-12);
                for i in 0..basis.len() {
                    for j in 0..basis.len() {
                        if basis[i].total_projection() != basis[j].total_projection() {
                            assert_eq!(h[(i, j)], 0.0);
                        }
                    }
                }
                let rep = spectrum(n, &spec, SpectrumOptions::default()).unwrap();
                let sum: f64 = rep.eigenvalues.iter().sum();
                assert!((sum - h.trace()).abs() <= 1e-9 * h.amax() * basis.len() as f64);
            }
        }
    }

    #[test]
    fn individual_projections_conserved_without_spin_spin() {
        let mut spec = HyperfineSpec::nacs();
        spec.c_hz[2] = 0.0;
        spec.c_hz[3] = 0.0;
        let h = build_hyperfine(2, &spec).unwrap();
        let basis = hyperfine_basis(2, &spec);
        for m in -2..=2 {
            let (sub, b) = restrict_to_m_n(&h, &basis, m).unwrap();
            for i in 0..b.len() {
                for j in 0..b.len() {
                    if b[i].m_i1 != b[j].m_i1 || b[i].m_i2 != b[j].m_i2 {
                        assert_eq!(sub[(i, j)], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn molecular_zeeman() {
        let spec = HyperfineSpec::nacs();
        assert_eq!(build_zeeman_molecule(1, &spec, 0.0).amax(), 0.0);
        let z = build_zeeman_molecule(0, &spec, 100.0);
        let basis = hyperfine_basis(0, &spec);
        let a = basis.iter().position(|s| s.m_i1 == HalfInt::HALF && s.m_i2 == HalfInt::HALF).unwrap();
        let b = basis.iter().position(|s| s.m_i1 == -HalfInt::HALF && s.m_i2 == HalfInt::HALF).unwrap();
        let split = (z[(a, a)] - z[(b, b)]).abs();
        assert_close(split, 1.478 * (1.0 - 6.392e-4) * NUCLEAR_MAGNETON_KHZ_PER_MT * 100.0, 1e-9);
        assert_close(split / 1e3, 1.12, 0.01);
        let flipped = build_zeeman_molecule(0, &spec, -100.0);
        assert!((z + flipped).amax() == 0.0);
    }

    #[test]
    fn atomic_zeeman() {
        assert_eq!(build_zeeman_atom(0, HalfInt::HALF, 0.0).amax(), 0.0);
        let z = build_zeeman_atom(0, HalfInt::HALF, 100.0);
        assert_close(z[(1, 1)], ELECTRON_G / 2.0 * BOHR_MAGNETON_KHZ_PER_MT * 100.0, 1e-6);
        assert_close(z[(0, 0)], -z[(1, 1)], 1e-9);
        assert_close(z[(1, 1)] / 1e6, 1.4, 0.01);
        // m_L = -2 m_S nearly cancels.
        let basis = atom_basis(1, HalfInt::HALF);
        let z = build_zeeman_atom(1, HalfInt::HALF, 100.0);
        let k = basis.iter().position(|&(ml, ms)| ml == -1 && ms == HalfInt::HALF).unwrap();
        assert!(z[(k, k)].abs() < 2e-3 * BOHR_MAGNETON_KHZ_PER_MT * 100.0);
    }

    #[test]
    fn stretched_states_are_pure() {
        for spec in [HyperfineSpec::nacs(), HyperfineSpec::lics()] {
            for n in 0..=3 {
                for b in [0.0, 50.0] {
                    for p in stretched_state_purity_at(n, &spec, b).unwrap() {
                        assert!((1.0 - p.purity).abs() <= 1e-10, "{:?}", p);
                    }
                }
            }
        }
        let p = stretched_state_purity(2, &HyperfineSpec::nacs()).unwrap();
        assert_eq!(p[0].state.m_n, 2);
        assert_eq!(p[0].state.m_i1, HalfInt::from_twice(3));
        assert_eq!(p[0].state.m_i2, HalfInt::from_twice(7));
    }

    #[test]
    fn non_stretched_states_mix() {
        let rep = spectrum(2, &HyperfineSpec::nacs(), SpectrumOptions::default()).unwrap();
        assert!(rep.mixing.iter().cloned().fold(0.0, f64::max) > 0.1);
    }

    // Frozen from an independent Cartesian construction with the same pairing rule.
    #[test]
    fn dressing_matches_oracle() {
        let cases = [
            (HyperfineSpec::nacs(), 2, 100.0, 32.3704438859, 9.8558680724),
            (HyperfineSpec::nacs(), 0, 100.0, 45.3191064738, 13.7979400774),
            (HyperfineSpec::lics(), 2, 100.0, 22.3297328494, 8.4628228333),
            (HyperfineSpec::lics(), 0, 100.0, 31.2607579899, 11.8473551034),
            (HyperfineSpec::nacs(), 2, 0.0, 23.9645266431, 6.6910070075),
            (HyperfineSpec::lics(), 2, 0.0, 22.7535505783, 8.4618542531),
        ];
        for (spec, n, b, range, std) in cases {
            let r = dressing_deviation(n, n + 1, &spec, b, 1000.0).unwrap();
            assert_close(r.range, range, 1e-8);
            assert_close(r.epsilon_std * 1000.0, std, 1e-8);
            assert!(r.deviation < 0.0025);
        }
    }

    #[test]
    fn dressing_edge_cases() {
        let spec = HyperfineSpec::bare(HalfInt::from_twice(3), HalfInt::from_twice(7));
        let r = dressing_deviation(1, 2, &spec, 10.0, 1000.0).unwrap();
        assert!(r.epsilon.abs() < 1e-12);
        assert!(dressing_deviation(1, 2, &spec, 0.0, 0.0).is_err());
        assert!(matches!(dressing_deviation(1, 3, &spec, 0.0, 1.0), Err(Error::Constraint(_))));
        assert_close(deviation_from_range(100.0, 1000.0).unwrap(), 0.0025, 1e-15);
    }

    #[test]
    fn dressing_scales_inverse_square() {
        let spec = HyperfineSpec::nacs();
        let a = dressing_deviation(1, 2, &spec, 20.0, 500.0).unwrap();
        let b = dressing_deviation(1, 2, &spec, 20.0, 1500.0).unwrap();
        assert_close(a.deviation / b.deviation, 9.0, 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn scaled_tensor_keeps_stretched_purity(scale in -20.0f64..20.0, n in 1u32..4) {
            let mut spec = HyperfineSpec::nacs();
            spec.c_hz[2] *= scale;
            for p in stretched_state_purity(n, &spec).unwrap() {
                prop_assert!((1.0 - p.purity).abs() <= 1e-10);
            }
        }

        #[test]
        fn zeeman_commutes_with_projection(b in -200.0f64..200.0, n in 0u32..3) {
            let spec = HyperfineSpec::lics();
            let h = build_hyperfine(n, &spec).unwrap() + build_zeeman_molecule(n, &spec, b);
            let basis = hyperfine_basis(n, &spec);
            for i in 0..basis.len() {
                for j in 0..basis.len() {
                    if basis[i].total_projection() != basis[j].total_projection() {
                        prop_assert_eq!(h[(i, j)], 0.0);
                    }
                }
            }
        }
    }
}
