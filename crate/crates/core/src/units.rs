//! Physical constants and the internal unit system.
//!
//! Internally every frequency-like quantity is an *ordinary* frequency in kHz,
//! i.e. the number stored for `2π × 25 kHz` is `25.0`. Lengths are in μm,
//! masses in unified atomic mass units, and ħ = 1. Decay rates (γ) are plain
//! rates in 1/ms, which is why ratios against couplings pick up a 2π.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Unified atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Bohr radius, m.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

/// One Debye in C·m.
pub const DEBYE: f64 = 1e-21 / SPEED_OF_LIGHT;
/// One e·a₀ expressed in Debye (≈ 2.5417).
pub const EA0_IN_DEBYE: f64 = ELEMENTARY_CHARGE * BOHR_RADIUS / DEBYE;

/// ħ/(u·μm²) as an ordinary frequency in kHz (≈ 10.108).
///
/// This is the single conversion between curvatures (kHz/μm²) and phonon
/// rates: a zero-point length squared is `HBAR_OVER_AMU_UM2_KHZ / (2 M ω)`.
pub const HBAR_OVER_AMU_UM2_KHZ: f64 = HBAR / (AMU * 1e-12) / (2.0 * PI) / 1e3;

/// d₁d₂/(4πε₀ h) for d₁ = d₂ = 1 D, in kHz·μm³ (≈ 0.1509).
pub const DEBYE_SQ_KHZ_UM3: f64 = DEBYE * DEBYE / (4.0 * PI * EPSILON_0 * PLANCK) * 1e18 / 1e3;

/// Nuclear magneton μ_N/h in kHz/mT.
pub const NUCLEAR_MAGNETON_KHZ_PER_MT: f64 = 7.622_593_218_8;
/// Bohr magneton μ_B/h in kHz/mT.
pub const BOHR_MAGNETON_KHZ_PER_MT: f64 = 13_996.244_936;
/// Free-electron g-factor magnitude.
pub const ELECTRON_G: f64 = 2.002_319_304_36;

/// Isotope masses in u.
pub mod mass {
    pub const LI6: f64 = 6.015_122_887_4;
    pub const NA23: f64 = 22.989_769_282;
    pub const RB87: f64 = 86.909_180_531;
    pub const CS133: f64 = 132.905_451_961;
    pub const CA40: f64 = 39.962_590_863;
    pub const F19: f64 = 18.998_403_163;

    pub const NACS: f64 = NA23 + CS133;
    pub const LICS: f64 = LI6 + CS133;
    pub const CAF: f64 = CA40 + F19;
}
