//! Van der Waals channels between a rotational molecular state and a Rydberg
//! atom: channel coefficients, angular matrices, the symmetrized
//! identity-plus-asymmetry decomposition and perturbative pair-state mixing.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::{dipole_angular_matrix, w3j_twice, HalfInt};
use crate::error::{Error, Result};
use crate::units::{DEBYE_SQ_KHZ_UM3, EA0_IN_DEBYE};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DipoleUnit {
    #[default]
    Debye,
    /// Atomic units, e·a₀.
    #[serde(alias = "ea0")]
    AtomicUnits,
}

impl DipoleUnit {
    pub fn to_debye(self, value: f64) -> f64 {
        match self {
            DipoleUnit::Debye => value,
            DipoleUnit::AtomicUnits => value * EA0_IN_DEBYE,
        }
    }
}

/// Which stretched rotational state `|N, ±N⟩` the molecule occupies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MolecularSign {
    #[default]
    Plus,
    Minus,
}

impl MolecularSign {
    fn as_i32(self) -> i32 {
        match self {
            MolecularSign::Plus => 1,
            MolecularSign::Minus => -1,
        }
    }
}

/// One virtual intermediate manifold `(Ñ; ñ L̃ J̃)` of the second-order interaction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    #[serde(default)]
    pub label: Option<String>,
    pub molecule_n: u32,
    pub molecule_ntilde: u32,
    pub atom_j: HalfInt,
    #[serde(default)]
    pub atom_ltilde: u32,
    pub atom_jtilde: HalfInt,
    /// Reduced molecular dipole `⟨N‖d‖Ñ⟩` in Debye.
    pub d_mol: f64,
    /// Reduced atomic dipole in `d_atom_unit`.
    pub d_atom: f64,
    #[serde(default)]
    pub d_atom_unit: DipoleUnit,
    /// `(E_N + E_nLJ) − (E_Ñ + E_ñL̃J̃)` in kHz.
    pub energy_defect: f64,
}

impl ChannelSpec {
    pub fn validate(&self) -> Result<()> {
        let (n, nt) = (self.molecule_n as i64, self.molecule_ntilde as i64);
        if (n - nt).abs() != 1 {
            return Err(Error::invalid(format!("channel requires |Ñ − N| = 1, got N = {n}, Ñ = {nt}")));
        }
        let (j, jt) = (self.atom_j, self.atom_jtilde);
        if j.twice() < 0 || jt.twice() < 0 {
            return Err(Error::invalid("atomic J and J̃ must be non-negative"));
        }
        let dj = (jt - j).twice();
        if dj % 2 != 0 || dj.abs() > 2 {
            return Err(Error::invalid(format!("channel requires J̃ − J ∈ {{−1, 0, 1}}, got J = {j}, J̃ = {jt}")));
        }
        if j.twice() == 0 && jt.twice() == 0 {
            return Err(Error::invalid("J = J̃ = 0 has no dipole coupling"));
        }
        if !(self.d_mol.is_finite() && self.d_atom.is_finite() && self.energy_defect.is_finite()) {
            return Err(Error::invalid("channel dipoles and energy defect must be finite"));
        }
        Ok(())
    }

    pub fn tag(&self) -> String {
        match &self.label {
            Some(l) => l.clone(),
            None => format!("({};{})", self.atom_jtilde, self.molecule_ntilde),
        }
    }

    /// First-order scale `κ d_mol d_atom` in kHz·μm³.
    pub fn c3(&self) -> f64 {
        DEBYE_SQ_KHZ_UM3 * self.d_mol * self.d_atom_unit.to_debye(self.d_atom)
    }

    /// `(−1)^{Ñ−N+J̃−J}`, the phase relating squared first-order amplitudes to
    /// the angular matrix of this channel.
    pub fn phase(&self) -> f64 {
        let twice = 2 * (self.molecule_ntilde as i32 - self.molecule_n as i32) + (self.atom_jtilde - self.atom_j).twice();
        if (twice / 2).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Channel coefficient `C₆^(p)` in kHz·μm⁶.
///
/// Carries the channel phase [`ChannelSpec::phase`] so that the interaction is
/// `−Σ C₆^(p) 𝒟^(p) / r⁶` with the angular matrices of [`angular_matrix`].
pub fn c6_channel(channel: &ChannelSpec) -> Result<f64> {
    channel.validate()?;
    if channel.energy_defect == 0.0 {
        return Err(Error::Resonance(channel.tag()));
    }
    let c3 = channel.c3();
    Ok(channel.phase() * c3 * c3 / channel.energy_defect)
}

/// Angular dependence `𝒟^(J̃;Ñ)` over atomic `m_J` (rows `m_J`, columns `m_J'`, ascending).
#[derive(Clone, Debug, PartialEq)]
pub struct AngularMatrix {
    pub entries: DMatrix<Complex64>,
    pub m_values: Vec<HalfInt>,
    pub jtilde: HalfInt,
    pub ntilde: u32,
    pub sign: MolecularSign,
    pub theta: f64,
    pub phi: f64,
}

impl AngularMatrix {
    /// `c† 𝒟 c` for a normalized atomic state `c` over `m_values`.
    pub fn expectation(&self, state: &[Complex64]) -> Result<f64> {
        if state.len() != self.m_values.len() {
            return Err(Error::invalid(format!(
                "atomic state has {} amplitudes, expected {}",
                state.len(),
                self.m_values.len()
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, ci) in state.iter().enumerate() {
            for (k, ck) in state.iter().enumerate() {
                acc += ci.conj() * self.entries[(i, k)] * ck;
            }
        }
        Ok(acc.re)
    }
}

#[derive(Clone, Debug)]
struct Term {
    coef: f64,
    qa: i32,
    qm: i32,
    qa2: i32,
}

/// Precomputed 3j products of one channel, evaluated cheaply at any angle.
#[derive(Clone, Debug)]
pub struct ChannelAngular {
    m_values: Vec<HalfInt>,
    terms: Vec<Vec<Vec<Term>>>,
    jtilde: HalfInt,
    ntilde: u32,
    sign: MolecularSign,
}

impl ChannelAngular {
    pub fn new(channel: &ChannelSpec, sign: MolecularSign) -> Result<Self> {
        channel.validate()?;
        let s = sign.as_i32();
        let n2 = 2 * channel.molecule_n as i32;
        let nt2 = 2 * channel.molecule_ntilde as i32;
        let j2 = channel.atom_j.twice();
        let jt2 = channel.atom_jtilde.twice();
        let m_values: Vec<HalfInt> = channel.atom_j.projections().collect();
        let mut terms = vec![vec![Vec::new(); m_values.len()]; m_values.len()];
        for (i, mj) in m_values.iter().enumerate() {
            for (k, mjp) in m_values.iter().enumerate() {
                let m2 = mj.twice();
                let dm2 = mjp.twice() - m2;
                for qm in -1..=1i32 {
                    for qa in -1..=1i32 {
                        let qa2 = -qa - dm2 / 2;
                        if qa2.abs() > 1 {
                            continue;
                        }
                        let phase_twice = n2 + nt2 - s * 2 * n2 + 2 * qm + j2 + jt2 - 2 * m2 + 2 * qa;
                        let phase = if (phase_twice / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                        let w = w3j_twice([n2, 2, nt2, -s * n2, 2 * qm, s * n2 - 2 * qm])
                            * w3j_twice([j2, 2, jt2, -m2, 2 * qa, m2 - 2 * qa])
                            * w3j_twice([nt2, 2, n2, -s * n2 + 2 * qm, -2 * qm, s * n2])
                            * w3j_twice([jt2, 2, j2, 2 * qa - m2, -2 * qa - dm2, m2 + dm2]);
                        if w != 0.0 {
                            terms[i][k].push(Term { coef: phase * w, qa, qm, qa2 });
                        }
                    }
                }
            }
        }
        Ok(ChannelAngular { m_values, terms, jtilde: channel.atom_jtilde, ntilde: channel.molecule_ntilde, sign })
    }

    pub fn evaluate(&self, theta: f64, phi: f64) -> AngularMatrix {
        let d = dipole_angular_matrix(theta, phi);
        let n = self.m_values.len();
        let entries = DMatrix::from_fn(n, n, |i, k| {
            self.terms[i][k]
                .iter()
                .map(|t| d.get(t.qa, t.qm) * d.get(t.qa2, -t.qm) * t.coef)
                .sum()
        });
        AngularMatrix {
            entries,
            m_values: self.m_values.clone(),
            jtilde: self.jtilde,
            ntilde: self.ntilde,
            sign: self.sign,
            theta,
            phi,
        }
    }
}

/// `𝒟^(J̃;Ñ)` for the molecule in `|N, ±N⟩`.
pub fn angular_matrix(channel: &ChannelSpec, sign: MolecularSign, theta: f64, phi: f64) -> Result<AngularMatrix> {
    Ok(ChannelAngular::new(channel, sign)?.evaluate(theta, phi))
}

/// Angular matrices of a J = 1/2 atom rotated into the symmetric state
/// `(|−½⟩ + |½⟩)/√2` and antisymmetric state `(|½⟩ − |−½⟩)/√2`, split into an
/// identity part and the asymmetry `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetrizedDecomposition {
    /// Scalar `𝒟^(1;Ñ)` multiplying the identity in the weighted channel sum.
    pub identity_coefficient: f64,
    pub asymmetry: Matrix2<Complex64>,
    /// `𝒟̃^(1/2;Ñ)` in the symmetrized basis.
    pub rotated_half: Matrix2<Complex64>,
    /// `𝒟̃^(3/2;Ñ)` in the symmetrized basis.
    pub rotated_three_half: Matrix2<Complex64>,
    pub theta: f64,
    pub phi: f64,
}

impl SymmetrizedDecomposition {
    pub fn reconstruct_half(&self) -> Matrix2<Complex64> {
        self.asymmetry * Complex64::new(2.0, 0.0) - Matrix2::identity() * Complex64::new(self.identity_coefficient / 2.0, 0.0)
    }

    pub fn reconstruct_three_half(&self) -> Matrix2<Complex64> {
        self.asymmetry + Matrix2::identity() * Complex64::new(self.identity_coefficient / 2.0, 0.0)
    }
}

/// Channel weights for which the `J̃ = 1/2` and `J̃ = 3/2` matrices of an
/// S₁/₂ atom combine into a multiple of the identity.
pub const WEIGHT_HALF: f64 = -2.0 / 3.0;
pub const WEIGHT_THREE_HALF: f64 = 4.0 / 3.0;

pub fn symmetrize(d_half: &AngularMatrix, d_three_half: &AngularMatrix) -> Result<SymmetrizedDecomposition> {
    if d_half.theta != d_three_half.theta || d_half.phi != d_three_half.phi {
        return Err(Error::invalid("angular matrices evaluated at different angles"));
    }
    if d_half.sign != d_three_half.sign || d_half.ntilde != d_three_half.ntilde {
        return Err(Error::invalid("angular matrices belong to different molecular channels"));
    }
    if d_half.jtilde != HalfInt::HALF || d_three_half.jtilde != HalfInt::from_twice(3) {
        return Err(Error::invalid("expected J̃ = 1/2 and J̃ = 3/2 channels"));
    }
    let two = |m: &AngularMatrix| -> Result<Matrix2<Complex64>> {
        if m.entries.nrows() != 2 {
            return Err(Error::invalid("symmetrization requires a J = 1/2 atom"));
        }
        Ok(Matrix2::from_fn(|i, k| m.entries[(i, k)]))
    };
    let a = two(d_half)?;
    let b = two(d_three_half)?;
    let combo = a * Complex64::new(WEIGHT_HALF, 0.0) + b * Complex64::new(WEIGHT_THREE_HALF, 0.0);
    let scale = combo.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    if combo[(0, 1)].norm() > 1e-10 * scale
        || combo[(1, 0)].norm() > 1e-10 * scale
        || (combo[(0, 0)] - combo[(1, 1)]).norm() > 1e-10 * scale
    {
        return Err(Error::Constraint("weighted channel sum is not proportional to the identity".into()));
    }
    let identity_coefficient = 0.5 * (combo[(0, 0)].re + combo[(1, 1)].re);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let u = Matrix2::new(r, -r, r, r).map(|x| Complex64::new(x, 0.0));
    let rotated_half = u.adjoint() * a * u;
    let rotated_three_half = u.adjoint() * b * u;
    let asymmetry = rotated_three_half - Matrix2::identity() * Complex64::new(identity_coefficient / 2.0, 0.0);
    Ok(SymmetrizedDecomposition {
        identity_coefficient,
        asymmetry,
        rotated_half,
        rotated_three_half,
        theta: d_half.theta,
        phi: d_half.phi,
    })
}

/// `C₆ = Σ_p C₆^(p) 𝒟^(p)` from `(C₆^(p), 𝒟^(p))` pairs, typically taken at θ = π/2.
pub fn total_c6(terms: &[(f64, f64)]) -> Result<f64> {
    if terms.is_empty() {
        return Err(Error::invalid("total C6 needs at least one channel"));
    }
    Ok(terms.iter().map(|(c, d)| c * d).sum())
}

/// Per-channel row of a [`MixingReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelMixing {
    pub tag: String,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingReport {
    pub f_mix: f64,
    pub per_channel: Vec<ChannelMixing>,
    pub r: f64,
    pub theta: f64,
}

/// Settings for [`mixing_fraction_with`].
#[derive(Clone, Debug, Default)]
pub struct MixingOptions {
    pub phi: f64,
    pub sign: MolecularSign,
    /// Initial atomic amplitudes over ascending `m_J`; defaults to the
    /// equal-weight symmetric superposition.
    pub atomic_state: Option<Vec<Complex64>>,
}

/// First-order admixture of other pair states at separation `r` and polar angle `θ`.
pub fn mixing_fraction(channels: &[ChannelSpec], r: f64, theta: f64) -> Result<MixingReport> {
    mixing_fraction_with(channels, r, theta, &MixingOptions::default())
}

pub fn mixing_fraction_with(channels: &[ChannelSpec], r: f64, theta: f64, opts: &MixingOptions) -> Result<MixingReport> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("separation must be positive, got {r}")));
    }
    let d = dipole_angular_matrix(theta, opts.phi);
    let s = opts.sign.as_i32();
    let mut per_channel = Vec::with_capacity(channels.len());
    for ch in channels {
        ch.validate()?;
        if ch.energy_defect == 0.0 {
            return Err(Error::Resonance(ch.tag()));
        }
        let ms: Vec<HalfInt> = ch.atom_j.projections().collect();
        let state = match &opts.atomic_state {
            Some(c) => {
                if c.len() != ms.len() {
                    return Err(Error::invalid(format!(
                        "atomic state has {} amplitudes, channel {} needs {}",
                        c.len(),
                        ch.tag(),
                        ms.len()
                    )));
                }
                let norm: f64 = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(Error::invalid("atomic state has zero norm"));
                }
                c.iter().map(|z| z / norm).collect()
            }
            None => vec![Complex64::new((ms.len() as f64).sqrt().recip(), 0.0); ms.len()],
        };
        let scale = ch.c3() / (r.powi(3) * ch.energy_defect);
        let n2 = 2 * ch.molecule_n as i32;
        let nt2 = 2 * ch.molecule_ntilde as i32;
        let mn2 = s * n2;
        let (j2, jt2) = (ch.atom_j.twice(), ch.atom_jtilde.twice());
        let mut frac = 0.0;
        for mnt in -(ch.molecule_ntilde as i32)..=(ch.molecule_ntilde as i32) {
            let qm = mnt - s * ch.molecule_n as i32;
            if qm.abs() > 1 {
                continue;
            }
            let mol = sign_of((nt2 - 2 * mnt) / 2) * w3j_twice([nt2, 2, n2, -2 * mnt, 2 * qm, mn2]);
            if mol == 0.0 {
                continue;
            }
            for mjt in ch.atom_jtilde.projections() {
                let mut amp = Complex64::new(0.0, 0.0);
                for (mj, c) in ms.iter().zip(&state) {
                    let qa2 = mjt.twice() - mj.twice();
                    if qa2.abs() > 2 {
                        continue;
                    }
                    let atom = sign_of((jt2 - mjt.twice()) / 2) * w3j_twice([jt2, 2, j2, -mjt.twice(), qa2, mj.twice()]);
                    amp += c * d.get(qa2 / 2, qm) * (mol * atom);
                }
                frac += (amp * scale).norm_sqr();
            }
        }
        per_channel.push(ChannelMixing { tag: ch.tag(), fraction: frac });
    }
    let f_mix = per_channel.iter().map(|c| c.fraction).sum();
    Ok(MixingReport { f_mix, per_channel, r, theta })
}

fn sign_of(n: i32) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Detuning that holds a two-level pair-state admixture at `f_target` for
/// first-order coupling `c3_eff / r³`, with the resulting effective `C₆`.
///
/// Returns `(δ_am, C₆,eff)` in kHz and kHz·μm⁶. At fixed `f_target` the
/// effective interaction `C₆,eff / r⁶ = √f |c3_eff| / r³` scales like a dipolar one.
pub fn delta_for_target_mixing(c3_eff: f64, r: f64, f_target: f64) -> Result<(f64, f64)> {
    if !(f_target > 0.0 && f_target < 1.0) {
        return Err(Error::invalid(format!("target mixing must lie in (0, 1), got {f_target}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("separation must be positive, got {r}")));
    }
    if !c3_eff.is_finite() || c3_eff == 0.0 {
        return Err(Error::invalid("effective C3 must be finite and non-zero"));
    }
    let delta = c3_eff.abs() / r.powi(3) / f_target.sqrt();
    Ok((delta, c3_eff * c3_eff / delta))
}
