//! Second-order expansion of a state-independent interaction in the relative
//! displacement of an atom and a molecule, and the resulting phonon rates.
//!
//! Geometry: the two traps are separated by `r` along +y and the quantization
//! axis is z, so the evaluation point sits at θ = π/2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{mass, HBAR_OVER_AMU_UM2_KHZ};

/// `V(r, θ) = C (a + b cos²θ + c cos⁴θ) / r^α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialAngularPotential {
    /// `C` in kHz·μm^α.
    pub amplitude: f64,
    pub alpha: f64,
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub c: f64,
}

impl RadialAngularPotential {
    pub fn new(amplitude: f64, alpha: f64, a: f64, b: f64, c: f64) -> Self {
        RadialAngularPotential { amplitude, alpha, a, b, c }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.amplitude, self.alpha, self.a, self.b, self.c];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("potential parameters must be finite"));
        }
        if self.alpha <= 0.0 {
            return Err(Error::invalid(format!("radial power must be positive, got {}", self.alpha)));
        }
        Ok(())
    }

    /// Value at the Cartesian point `(x, y, z)` in μm.
    pub fn at(&self, x: f64, y: f64, z: f64) -> f64 {
        let r2 = x * x + y * y + z * z;
        let cos2 = z * z / r2;
        self.amplitude * (self.a + cos2 * (self.b + self.c * cos2)) / r2.powf(self.alpha / 2.0)
    }

    pub fn eval(&self, r: f64, theta: f64) -> f64 {
        let cos2 = theta.cos().powi(2);
        self.amplitude * (self.a + cos2 * (self.b + self.c * cos2)) / r.powf(self.alpha)
    }
}

/// Coefficients of `V ≈ V₀ + y_linear·δy + x·δx² + y·δy² + z·δz² + xz·δx δz`,
/// with `δ = r_atom − r_molecule`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Coefficients {
    pub x: f64,
    pub y_linear: f64,
    pub y: f64,
    pub z: f64,
    /// Cross term; off-resonant whenever the x and z trap frequencies differ.
    pub xz: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Expansion {
    pub r: f64,
    pub potential: f64,
    /// Physical coefficients: kHz/μm for the linear term, kHz/μm² otherwise.
    pub coefficients: Coefficients,
    /// Coefficients per unit `C/r^{α+2}` (linear term per unit `C/r^{α+1}`).
    pub normalized: Coefficients,
}

impl Expansion {
    fn from_normalized(pot: &RadialAngularPotential, r: f64, n: Coefficients) -> Self {
        let s2 = pot.amplitude / r.powf(pot.alpha + 2.0);
        let s1 = pot.amplitude / r.powf(pot.alpha + 1.0);
        let coefficients = Coefficients { x: n.x * s2, y_linear: n.y_linear * s1, y: n.y * s2, z: n.z * s2, xz: n.xz * s2 };
        Expansion { r, potential: pot.at(0.0, r, 0.0), coefficients, normalized: n }
    }

    fn from_physical(pot: &RadialAngularPotential, r: f64, p: Coefficients) -> Self {
        let s2 = pot.amplitude / r.powf(pot.alpha + 2.0);
        let s1 = pot.amplitude / r.powf(pot.alpha + 1.0);
        let normalized = if pot.amplitude == 0.0 {
            Coefficients::default()
        } else {
            Coefficients { x: p.x / s2, y_linear: p.y_linear / s1, y: p.y / s2, z: p.z / s2, xz: p.xz / s2 }
        };
        Expansion { r, potential: pot.at(0.0, r, 0.0), coefficients: p, normalized }
    }

    /// Second derivative `∂²V/∂α²` along `axis`, in kHz/μm².
    pub fn second_derivative(&self, axis: Axis) -> f64 {
        2.0 * match axis {
            Axis::X => self.coefficients.x,
            Axis::Y => self.coefficients.y,
            Axis::Z => self.coefficients.z,
        }
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("separation must be positive, got {r}")))
    }
}

/// Closed-form expansion at θ = π/2.
pub fn expand_closed_form(pot: &RadialAngularPotential, r: f64) -> Result<Expansion> {
    pot.validate()?;
    check_r(r)?;
    let (al, a, b) = (pot.alpha, pot.a, pot.b);
    let n = Coefficients {
        x: -al / 2.0 * a,
        y_linear: -al * a,
        y: al * (al + 1.0) / 2.0 * a,
        z: -al / 2.0 * a + b,
        xz: 0.0,
    };
    Ok(Expansion::from_normalized(pot, r, n))
}

/// Central finite differences around `(0, r, 0)` with step `h`.
pub fn expand_finite_difference(pot: &RadialAngularPotential, r: f64, h: f64) -> Result<Expansion> {
    pot.validate()?;
    check_r(r)?;
    if !(h > 0.0) || h >= r / 10.0 {
        return Err(Error::StepSize { h, r });
    }
    let v = |x: f64, dy: f64, z: f64| pot.at(x, r + dy, z);
    let v0 = v(0.0, 0.0, 0.0);
    let h2 = h * h;
    let p = Coefficients {
        x: 0.5 * (v(h, 0.0, 0.0) - 2.0 * v0 + v(-h, 0.0, 0.0)) / h2,
        y_linear: (v(0.0, h, 0.0) - v(0.0, -h, 0.0)) / (2.0 * h),
        y: 0.5 * (v(0.0, h, 0.0) - 2.0 * v0 + v(0.0, -h, 0.0)) / h2,
        z: 0.5 * (v(0.0, 0.0, h) - 2.0 * v0 + v(0.0, 0.0, -h)) / h2,
        xz: (v(h, 0.0, h) - v(h, 0.0, -h) - v(-h, 0.0, h) + v(-h, 0.0, -h)) / (4.0 * h2),
    };
    Ok(Expansion::from_physical(pot, r, p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// A trapped particle: mass in u and trap frequencies (kHz) along x, y, z.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub mass: f64,
    pub trap: [f64; 3],
}

impl SpeciesSpec {
    pub fn new(mass: f64, trap: [f64; 3]) -> Self {
        SpeciesSpec { name: None, mass, trap }
    }

    /// Known species with an isotropic trap frequency `omega` (kHz).
    pub fn named(name: &str, omega: f64) -> Option<Self> {
        let m = known_mass(name)?;
        Some(SpeciesSpec { name: Some(name.to_string()), mass: m, trap: [omega; 3] })
    }

    pub fn omega(&self, axis: Axis) -> f64 {
        self.trap[axis.index()]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::invalid(format!("mass must be positive, got {}", self.mass)));
        }
        if self.trap.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::invalid(format!("trap frequencies must be positive, got {:?}", self.trap)));
        }
        Ok(())
    }

    /// Zero-point length `√(ħ / 2Mω)` along `axis`, in μm.
    pub fn zero_point_length(&self, axis: Axis) -> f64 {
        (HBAR_OVER_AMU_UM2_KHZ / (2.0 * self.mass * self.omega(axis))).sqrt()
    }
}

/// Mass in u of a species label such as `"Na"`, `"Cs133"` or `"NaCs"`.
pub fn known_mass(name: &str) -> Option<f64> {
    Some(match name {
        "Li" | "Li6" | "6Li" => mass::LI6,
        "Na" | "Na23" | "23Na" => mass::NA23,
        "Rb" | "Rb87" | "87Rb" => mass::RB87,
        "Cs" | "Cs133" | "133Cs" => mass::CS133,
        "NaCs" => mass::NACS,
        "LiCs" => mass::LICS,
        "CaF" => mass::CAF,
        _ => return None,
    })
}

/// Phonon rates from one curvature along one axis, in kHz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AxisCouplings {
    pub axis: Axis,
    pub second_derivative: f64,
    /// Exchange rate multiplying `(a + a†)(m + m†)`, up to the overall sign of the curvature.
    pub g_am: f64,
    /// Self term multiplying `(a + a†)²`.
    pub g_a: f64,
    /// Self term multiplying `(m + m†)²`.
    pub g_m: f64,
}

/// `G_am = ∂²V/√(4 M_a M_m ω_a ω_m)`, `G_a = ∂²V/(4 M_a ω_a)` and `G_m` likewise (ħ = 1).
pub fn coupling_rates(second_derivative: f64, molecule: &SpeciesSpec, atom: &SpeciesSpec, axis: Axis) -> Result<AxisCouplings> {
    molecule.validate()?;
    atom.validate()?;
    let (ma, wa) = (atom.mass, atom.omega(axis));
    let (mm, wm) = (molecule.mass, molecule.omega(axis));
    let hb = HBAR_OVER_AMU_UM2_KHZ;
    Ok(AxisCouplings {
        axis,
        second_derivative,
        g_am: second_derivative * hb / (2.0 * (ma * mm * wa * wm).sqrt()),
        g_a: second_derivative * hb / (4.0 * ma * wa),
        g_m: second_derivative * hb / (4.0 * mm * wm),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhononCouplings {
    pub expansion: Expansion,
    /// Linear force along y, in kHz per relative zero-point length `√(x_a² + x_m²)`.
    pub linear_y: f64,
    pub axes: [AxisCouplings; 3],
}

impl PhononCouplings {
    pub fn axis(&self, axis: Axis) -> &AxisCouplings {
        &self.axes[axis.index()]
    }
}

/// Closed-form expansion plus rates on every axis.
pub fn phonon_couplings(pot: &RadialAngularPotential, r: f64, molecule: &SpeciesSpec, atom: &SpeciesSpec) -> Result<PhononCouplings> {
    let expansion = expand_closed_form(pot, r)?;
    let axes = [Axis::X, Axis::Y, Axis::Z].map(|ax| coupling_rates(expansion.second_derivative(ax), molecule, atom, ax));
    let [x, y, z] = axes;
    let rel = (atom.zero_point_length(Axis::Y).powi(2) + molecule.zero_point_length(Axis::Y).powi(2)).sqrt();
    Ok(PhononCouplings { expansion, linear_y: expansion.coefficients.y_linear * rel, axes: [x?, y?, z?] })
}

/// Small parameter `ħ / (√(M₁M₂ω₁ω₂) r²)` controlling the neglected quartic terms.
pub fn anharmonicity(first: &SpeciesSpec, second: &SpeciesSpec, r: f64, axis: Axis) -> Result<f64> {
    first.validate()?;
    second.validate()?;
    check_r(r)?;
    let denom = (first.mass * second.mass * first.omega(axis) * second.omega(axis)).sqrt() * r * r;
    Ok(HBAR_OVER_AMU_UM2_KHZ / denom)
}
