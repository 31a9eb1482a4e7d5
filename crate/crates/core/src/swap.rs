//! Dissipative phonon swap: fraction of molecular phonons left behind when
//! the Rydberg admixture decays during the swap, and the resulting range.
//!
//! Functions taking `(g, gamma)` expect both as angular rates in the same
//! units. Ratios built from an internal coupling `G` (ordinary kHz) and a
//! decay rate `γ` (1/ms) are `2πG/γ`, see [`coupling_decay_ratio`].

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default fraction of phonons allowed to remain after a swap.
pub const DEFAULT_TARGET: f64 = 0.05;

/// Fraction of phonons left on the molecule after a swap of duration `π/2G`
/// with exponential decay at rate `gamma` interrupting it.
pub fn surviving_fraction(g: f64, gamma: f64) -> Result<f64> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::invalid(format!("coupling must be positive, got {g}")));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("decay rate must be non-negative, got {gamma}")));
    }
    Ok(surviving_ratio(g / gamma))
}

/// [`surviving_fraction`] as a function of `x = G/γ` alone.
fn surviving_ratio(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    let decayed = -(-PI / (2.0 * x)).exp_m1();
    (1.0 + 2.0 * x * x * decayed) / (1.0 + 4.0 * x * x)
}

/// `G/γ` at which [`surviving_fraction`] equals `target`.
pub fn critical_ratio(target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::invalid(format!("target fraction must lie in (0, 1), got {target}")));
    }
    let f = |x: f64| surviving_ratio(x) - target;
    let mut lo = 1e-6;
    let mut hi = 1.0;
    if f(lo) <= 0.0 {
        return Err(Error::NoBracket(format!("target {target} too close to 1")));
    }
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoBracket(format!("target {target} too close to 0")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Dimensionless `2πG/γ` for a coupling in kHz and a decay rate in 1/ms.
pub fn coupling_decay_ratio(g: f64, gamma_r: f64) -> f64 {
    2.0 * PI * g / gamma_r
}

/// Off-resonant Rydberg dressing with Rabi frequency `rabi` and detuning `detuning` (kHz).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressingSpec {
    pub rabi: f64,
    pub detuning: f64,
}

impl DressingSpec {
    /// Rydberg fraction `Ω²/4Δ²`.
    pub fn fraction(&self) -> Result<f64> {
        if self.detuning == 0.0 || !self.detuning.is_finite() || !self.rabi.is_finite() {
            return Err(Error::invalid("dressing detuning must be finite and non-zero"));
        }
        let f = self.rabi * self.rabi / (4.0 * self.detuning * self.detuning);
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::DressingRegime(f));
        }
        Ok(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DressedRates {
    pub fraction: f64,
    /// Dressed exchange rate, kHz.
    pub g: f64,
    /// Dressed decay rate, 1/ms.
    pub gamma: f64,
    /// `2πG/γ`, independent of the dressing fraction.
    pub ratio: f64,
}

/// Scales a bare coupling and decay rate by the dressing fraction.
pub fn dressed_rates(dress: &DressingSpec, g_bare: f64, gamma_r: f64) -> Result<DressedRates> {
    let f = dress.fraction()?;
    if !(gamma_r > 0.0) {
        return Err(Error::invalid(format!("decay rate must be positive, got {gamma_r}")));
    }
    let g = f * g_bare;
    let gamma = f * gamma_r;
    let ratio = coupling_decay_ratio(g_bare, gamma_r);
    debug_assert!((coupling_decay_ratio(g, gamma) - ratio).abs() <= 1e-12 * ratio.abs());
    Ok(DressedRates { fraction: f, g, gamma, ratio })
}

/// Power-law range input: `ratio(r) = ratio_ref (r_ref/r)^p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RangeSpec {
    pub label: String,
    pub ratio_ref: f64,
    pub r_ref: f64,
    pub power: f64,
    /// Half the LeRoy radius, μm.
    pub leroy_half: f64,
}

impl RangeSpec {
    /// From a coupling in kHz and a bare decay rate in 1/ms at `r_ref`.
    pub fn from_rates(label: &str, g_ref: f64, gamma_r: f64, r_ref: f64, power: f64, leroy_half: f64) -> Self {
        RangeSpec { label: label.to_string(), ratio_ref: coupling_decay_ratio(g_ref, gamma_r), r_ref, power, leroy_half }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("ratio", self.ratio_ref), ("r_ref", self.r_ref), ("power", self.power), ("leroy_half", self.leroy_half)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn ratio_at(&self, r: f64) -> f64 {
        self.ratio_ref * (self.r_ref / r).powf(self.power)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RangeReport {
    pub label: String,
    pub r_095: f64,
    pub leroy_half: f64,
    /// False when the range falls inside half the LeRoy radius, where no swap is possible.
    pub feasible: bool,
    pub threshold: f64,
}

/// Largest separation at which the coupling-to-decay ratio reaches `threshold`.
pub fn swap_range(spec: &RangeSpec, threshold: f64) -> Result<RangeReport> {
    spec.validate()?;
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(Error::invalid(format!("threshold must be positive, got {threshold}")));
    }
    let r = spec.r_ref * (spec.ratio_ref / threshold).powf(1.0 / spec.power);
    Ok(RangeReport { label: spec.label.clone(), r_095: r, leroy_half: spec.leroy_half, feasible: r >= spec.leroy_half, threshold })
}

/// Separation at which a power law through `(r_ref, g_ref)` reaches `g_other`.
pub fn power_law_distance(g_ref: f64, r_ref: f64, g_other: f64, power: f64) -> Result<f64> {
    if !(g_ref > 0.0 && g_other > 0.0 && r_ref > 0.0 && power > 0.0) {
        return Err(Error::invalid("power-law inversion needs positive inputs"));
    }
    Ok(r_ref * (g_ref / g_other).powf(1.0 / power))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingKind {
    /// Ratio ∝ n⁷/r⁸.
    Vdw,
    /// Ratio ∝ n⁵/r⁵.
    Dipolar,
    /// vdW at fixed admixture, which scales like a dipolar interaction.
    HyperfineVdw,
}

impl ScalingKind {
    /// `(a, p)` with ratio ∝ nᵃ/rᵖ.
    pub fn exponents(self) -> (f64, f64) {
        match self {
            ScalingKind::Vdw => (7.0, 8.0),
            ScalingKind::Dipolar | ScalingKind::HyperfineVdw => (5.0, 5.0),
        }
    }
}

impl FromStr for ScalingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vdw" => Ok(ScalingKind::Vdw),
            "dipolar" => Ok(ScalingKind::Dipolar),
            "hyperfine-vdw" | "hyperfine_vdw" => Ok(ScalingKind::HyperfineVdw),
            other => Err(Error::invalid(format!("unknown scaling kind {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingMode {
    /// Project the ratio at a fixed separation.
    FixedRadius,
    /// Project `r₀.₉₅`.
    Range,
}

/// Projects a ratio (fixed radius) or `r₀.₉₅` (range mode) from principal quantum number `n0` to `n`.
pub fn scaling_project(value0: f64, n0: f64, n: f64, kind: ScalingKind, mode: ScalingMode) -> Result<f64> {
    if !(n0 >= 1.0 && n >= 1.0) {
        return Err(Error::invalid("principal quantum numbers must be at least 1"));
    }
    let (a, p) = kind.exponents();
    let s = n / n0;
    Ok(match mode {
        ScalingMode::FixedRadius => value0 * s.powf(a),
        ScalingMode::Range => value0 * s.powf(a / p),
    })
}

/// Monte-Carlo estimate of [`surviving_fraction`]: decay at an exponential
/// time `τ` freezes the swap, leaving `cos²(Gτ)` behind; surviving past the
/// swap time leaves nothing. Returns `(mean, standard error)`.
pub fn surviving_fraction_monte_carlo(g: f64, gamma: f64, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if !(g > 0.0 && gamma > 0.0) || samples < 2 {
        return Err(Error::invalid("Monte-Carlo estimate needs positive rates and at least two samples"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_swap = PI / (2.0 * g);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let u: f64 = rng.random();
        let tau = -(-u).ln_1p() / gamma;
        let v = if tau < t_swap { (g * tau).cos().powi(2) } else { 0.0 };
        sum += v;
        sum_sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn surviving_fraction_limits() {
        assert_eq!(surviving_fraction(1.0, 0.0).unwrap(), 0.0);
        assert!((surviving_fraction(15.24, 1.0).unwrap() - 0.05).abs() < 5e-4);
        assert!(surviving_fraction(1.0, 1e6).unwrap() > 0.999_99);
        assert!(surviving_fraction(0.0, 1.0).is_err());
        assert!(surviving_fraction(1.0, -1.0).is_err());
    }

    #[test]
    fn critical_ratio_values() {
        let x = critical_ratio(0.05).unwrap();
        assert!((x - 15.24).abs() < 0.01, "{x}");
        let half = critical_ratio(0.5).unwrap();
        assert!(half > 0.0 && half < 2.0);
        assert!(critical_ratio(0.999).unwrap() < critical_ratio(0.99).unwrap());
        assert!(critical_ratio(1.0).is_err());
        assert!(critical_ratio(0.0).is_err());
    }

    #[test]
    fn dressing() {
        let d = DressingSpec { rabi: 1.0, detuning: 5.0 };
        assert!((d.fraction().unwrap() - 0.01).abs() < 1e-15);
        let g = 182.0 / (2.0 * PI) * 3.0;
        let r = dressed_rates(&d, g, 3.0).unwrap();
        assert!((r.ratio - 182.0).abs() < 1e-12);
        let half = dressed_rates(&DressingSpec { rabi: 1.0 / 2f64.sqrt(), detuning: 5.0 }, g, 3.0).unwrap();
        assert_eq!(half.ratio, r.ratio);
        assert!(matches!(DressingSpec { rabi: 3.0, detuning: 1.0 }.fraction(), Err(Error::DressingRegime(_))));
        assert!(DressingSpec { rabi: 1.0, detuning: 0.0 }.fraction().is_err());
    }

    #[test]
    fn range_examples() {
        let th = critical_ratio(0.05).unwrap();
        let na = RangeSpec { label: "Na 70S".into(), ratio_ref: 182.0, r_ref: 1.0, power: 8.0, leroy_half: 0.79 };
        assert!((swap_range(&na, th).unwrap().r_095 - 1.36).abs() < 0.01);
        let cs = RangeSpec { label: "Cs 73S".into(), ratio_ref: 5.36, ..na.clone() };
        let rep = swap_range(&cs, th).unwrap();
        assert!((rep.r_095 - 0.88).abs() < 0.01);
        let at = RangeSpec { ratio_ref: th, r_ref: 0.7, ..na.clone() };
        assert!((swap_range(&at, th).unwrap().r_095 - 0.7).abs() < 1e-15);
        let weak = RangeSpec { ratio_ref: 0.01, leroy_half: 0.5, ..na };
        assert!(!swap_range(&weak, th).unwrap().feasible);
        let from_rates = RangeSpec::from_rates("Na", 66.2, 2.285, 1.0, 8.0, 0.79);
        assert!((from_rates.ratio_ref - 182.0).abs() < 0.1);
    }

    #[test]
    fn scaling() {
        let v = scaling_project(3.0, 50.0, 100.0, ScalingKind::Vdw, ScalingMode::FixedRadius).unwrap();
        assert!((v - 3.0 * 128.0).abs() < 1e-12);
        let r = scaling_project(1.1, 40.0, 80.0, ScalingKind::Dipolar, ScalingMode::Range).unwrap();
        assert!((r - 2.2).abs() < 1e-12);
        assert_eq!(scaling_project(1.1, 40.0, 40.0, ScalingKind::HyperfineVdw, ScalingMode::Range).unwrap(), 1.1);
        assert!("quadrupolar".parse::<ScalingKind>().is_err());
        assert_eq!("hyperfine-vdw".parse::<ScalingKind>().unwrap(), ScalingKind::HyperfineVdw);
    }

    #[test]
    fn monte_carlo_oracle() {
        for (g, gamma, seed) in [(1.0, 1.0, 1u64), (3.0, 0.5, 2), (15.24, 1.0, 3)] {
            let (m, se) = surviving_fraction_monte_carlo(g, gamma, 1_000_000, seed).unwrap();
            let exact = surviving_fraction(g, gamma).unwrap();
            assert!((m - exact).abs() <= 3.0 * se, "g={g}: {m} ± {se} vs {exact}");
        }
        let a = surviving_fraction_monte_carlo(2.0, 1.0, 1000, 9).unwrap();
        let b = surviving_fraction_monte_carlo(2.0, 1.0, 1000, 9).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn monotone_and_inverse(t in 0.01..0.95f64, x in 0.01..100.0f64, dx in 0.001..10.0f64) {
            prop_assert!(surviving_ratio(x + dx) < surviving_ratio(x));
            let r = critical_ratio(t).unwrap();
            prop_assert!((surviving_ratio(r) - t).abs() <= 1e-8 * t);
        }

        #[test]
        fn range_inverts_power_law(ratio in 1.0..1e4f64, p in prop::sample::select(vec![5.0, 8.0]), r_ref in 0.3..3.0f64) {
            let th = critical_ratio(0.05).unwrap();
            let spec = RangeSpec { label: String::new(), ratio_ref: ratio, r_ref, power: p, leroy_half: 0.1 };
            let r = swap_range(&spec, th).unwrap().r_095;
            let s = surviving_ratio(spec.ratio_at(r));
            prop_assert!((s - 0.05).abs() <= 1e-6);
        }

        #[test]
        fn dressed_ratio_is_fraction_independent(rabi in 0.01..1.0f64, det in 1.0..100.0f64, g in 0.1..1e3f64, gamma in 0.1..10.0f64) {
            let r = dressed_rates(&DressingSpec { rabi, detuning: det }, g, gamma).unwrap();
            prop_assert!((coupling_decay_ratio(r.g, r.gamma) - r.ratio).abs() <= 1e-12 * r.ratio);
        }
    }
}
