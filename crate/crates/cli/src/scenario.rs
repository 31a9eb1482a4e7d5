//! Scenario documents (TOML).
//!
//! ```toml
//! kind = "range"          # expand | swap-chain | range | hyperfine | fidelity | interactions
//! name = "r095-NaCs"      # optional, defaults to the file stem
//! output = "r095.csv"     # optional, defaults to "<name>.csv"
//!
//! [parameters]
//! ...                     # kind-specific, unknown keys rejected
//! ```

use std::path::Path;

use rydswap_core::hyperfine::HyperfineSpec;
use rydswap_core::interactions::{DipoleUnit, MolecularSign};
use rydswap_core::HalfInt;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::CliError;
use crate::quantity::{Angle, Field, Frequency, Grid, Length, OneOrMany, Rate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Expand,
    SwapChain,
    Range,
    Hyperfine,
    Fidelity,
    Interactions,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Expand => "expand",
            Kind::SwapChain => "swap-chain",
            Kind::Range => "range",
            Kind::Hyperfine => "hyperfine",
            Kind::Fidelity => "fidelity",
            Kind::Interactions => "interactions",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub output: String,
    pub params: Params,
}

impl Scenario {
    pub fn kind(&self) -> Kind {
        match self.params {
            Params::Expand(_) => Kind::Expand,
            Params::SwapChain(_) => Kind::SwapChain,
            Params::Range(_) => Kind::Range,
            Params::Hyperfine(_) => Kind::Hyperfine,
            Params::Fidelity(_) => Kind::Fidelity,
            Params::Interactions(_) => Kind::Interactions,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Params {
    Expand(ExpandParams),
    SwapChain(SwapChainParams),
    Range(RangeParams),
    Hyperfine(HyperfineParams),
    Fidelity(FidelityParams),
    Interactions(InteractionsParams),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope<P> {
    #[allow(dead_code)]
    kind: Kind,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    output: Option<String>,
    parameters: P,
}

fn schema(source: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Schema(format!("{source}: {e}"))
}

/// Parses and validates a scenario document; `source` names it in diagnostics.
pub fn parse_scenario(text: &str, source: &str, default_name: &str) -> Result<Scenario, CliError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| schema(source, e))?;
    let kind: Kind = match table.get("kind") {
        None => return Err(schema(source, "missing field `kind`")),
        Some(v) => v.clone().try_into().map_err(|e| schema(source, format!("field `kind`: {e}")))?,
    };
    fn load<P: DeserializeOwned>(text: &str, source: &str) -> Result<(Option<String>, Option<String>, P), CliError> {
        let env: Envelope<P> = toml::from_str(text).map_err(|e| schema(source, e))?;
        Ok((env.name, env.output, env.parameters))
    }
    let (name, output, params) = match kind {
        Kind::Expand => {
            let (n, o, p) = load(text, source)?;
            (n, o, Params::Expand(p))
        }
        Kind::SwapChain => {
            let (n, o, p) = load(text, source)?;
            (n, o, Params::SwapChain(p))
        }
        Kind::Range => {
            let (n, o, p) = load(text, source)?;
            (n, o, Params::Range(p))
        }
        Kind::Hyperfine => {
            let (n, o, p) = load(text, source)?;
            (n, o, Params::Hyperfine(p))
        }
        Kind::Fidelity => {
            let (n, o, p) = load(text, source)?;
            (n, o, Params::Fidelity(p))
        }
        Kind::Interactions => {
            let (n, o, p) = load(text, source)?;
            (n, o, Params::Interactions(p))
        }
    };
    let name = name.unwrap_or_else(|| default_name.to_string());
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(schema(source, format!("invalid scenario name `{name}`")));
    }
    let output = output.unwrap_or_else(|| format!("{name}.csv"));
    if Path::new(&output).is_absolute() || output.contains("..") {
        return Err(schema(source, format!("output `{output}` must be a relative path inside the output directory")));
    }
    let scenario = Scenario { name, output, params };
    validate(&scenario).map_err(|e| schema(source, e))?;
    Ok(scenario)
}

/// Reads a scenario file, naming it after its stem by default.
pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    parse_scenario(&text, &path.display().to_string(), stem)
}

fn validate(s: &Scenario) -> Result<(), String> {
    match &s.params {
        Params::Range(p) => {
            for row in &p.rows {
                if row.ratio.is_none() {
                    if row.g.is_none() {
                        return Err(format!("row `{}`: missing field `g` (or give `ratio`)", row.label));
                    }
                    if row.gamma_r.is_none() {
                        return Err(format!("row `{}`: missing field `gamma_r` (or give `ratio`)", row.label));
                    }
                }
            }
            if p.rows.is_empty() {
                return Err("range scenario needs at least one row".into());
            }
        }
        Params::SwapChain(p) => {
            if p.cases.is_empty() || p.eta.0.is_empty() {
                return Err("swap-chain scenario needs at least one case and one eta".into());
            }
        }
        Params::Expand(p) => {
            if p.potential.is_none() && p.anharmonicity.is_empty() {
                return Err("expand scenario needs `potential` or `anharmonicity`".into());
            }
            if p.potential.is_some() && (p.molecule.is_none() || p.atom.is_none()) {
                return Err("`potential` needs both `molecule` and `atom`".into());
            }
        }
        Params::Hyperfine(p) => {
            if p.n.0.is_empty() {
                return Err("hyperfine scenario needs at least one N".into());
            }
        }
        Params::Interactions(p) => {
            if p.channels.is_empty() {
                return Err("interactions scenario needs at least one channel".into());
            }
        }
        Params::Fidelity(_) => {}
    }
    Ok(())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialInput {
    /// `C` in kHz·μm^α.
    pub amplitude: f64,
    pub alpha: f64,
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub c: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum TrapInput {
    Isotropic(Frequency),
    Axes([Frequency; 3]),
}

impl TrapInput {
    pub fn axes(&self) -> [f64; 3] {
        match self {
            TrapInput::Isotropic(f) => [f.get(); 3],
            TrapInput::Axes(a) => a.map(|f| f.get()),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesInput {
    #[serde(default)]
    pub name: Option<String>,
    /// Mass in u; looked up from `name` when absent.
    #[serde(default)]
    pub mass: Option<f64>,
    pub trap: TrapInput,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnharmonicityBlock {
    pub species: Vec<String>,
    pub trap: Frequency,
    #[serde(default = "default_axis")]
    pub axis: String,
}

fn default_axis() -> String {
    "z".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpandParams {
    pub r: Length,
    #[serde(default)]
    pub potential: Option<PotentialInput>,
    #[serde(default)]
    pub molecule: Option<SpeciesInput>,
    #[serde(default)]
    pub atom: Option<SpeciesInput>,
    /// Finite-difference step for a cross-check of the closed form.
    #[serde(default)]
    pub step: Option<Length>,
    #[serde(default)]
    pub anharmonicity: Vec<AnharmonicityBlock>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelInput {
    #[default]
    Full,
    #[serde(alias = "rotating-wave")]
    Rwa,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialInput {
    #[default]
    Thermal,
    Coherent,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainCase {
    pub label: String,
    pub alpha: f64,
    pub omega_over_g: f64,
    #[serde(default = "one")]
    pub g_aa_over_g_am: f64,
    #[serde(default = "one")]
    pub g_mm_over_g_am: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwapChainParams {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default = "unit_frequency")]
    pub g_am: Frequency,
    #[serde(default = "twenty")]
    pub occupation: f64,
    #[serde(default)]
    pub model: ModelInput,
    #[serde(default)]
    pub initial: InitialInput,
    pub eta: Grid,
    pub cases: Vec<ChainCase>,
}

fn unit_frequency() -> Frequency {
    Frequency::new(1.0)
}

fn twenty() -> f64 {
    20.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeRow {
    pub label: String,
    /// Exchange rate at `r_ref`.
    #[serde(default)]
    pub g: Option<Frequency>,
    #[serde(default)]
    pub gamma_r: Option<Rate>,
    /// `2πG/γ` at `r_ref`; overrides `g` and `gamma_r`.
    #[serde(default)]
    pub ratio: Option<f64>,
    #[serde(default = "unit_length")]
    pub r_ref: Length,
    pub power: f64,
    #[serde(default)]
    pub leroy_half: Option<Length>,
    /// Exchange rate and ratio quoted at `leroy_half`, for consistency checks.
    #[serde(default)]
    pub g_lr: Option<Frequency>,
    #[serde(default)]
    pub ratio_lr: Option<f64>,
}

fn unit_length() -> Length {
    Length::new(1.0)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloInput {
    pub samples: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeParams {
    /// Tolerated loss; the threshold ratio follows from it.
    #[serde(default = "default_target")]
    pub target: f64,
    #[serde(default)]
    pub monte_carlo: Option<MonteCarloInput>,
    pub rows: Vec<RangeRow>,
}

fn default_target() -> f64 {
    rydswap_core::swap::DEFAULT_TARGET
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MoleculeInput {
    Named(String),
    Table(HyperfineSpec),
}

impl MoleculeInput {
    pub fn spec(&self) -> Result<HyperfineSpec, String> {
        match self {
            MoleculeInput::Named(n) => HyperfineSpec::named(n).ok_or_else(|| format!("no bundled constants for `{n}`")),
            MoleculeInput::Table(s) => Ok(s.clone()),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DressingInput {
    pub n_low: u32,
    pub n_high: u32,
    pub rabi: Frequency,
    #[serde(default)]
    pub m_n: Option<i32>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperfineParams {
    pub molecule: MoleculeInput,
    #[serde(rename = "N")]
    pub n: OneOrMany<u32>,
    #[serde(default = "zero_field")]
    pub b: Field,
    #[serde(default)]
    pub m_n: Option<i32>,
    #[serde(default)]
    pub dressing: Vec<DressingInput>,
}

fn zero_field() -> Field {
    Field::new(0.0)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FidelityParams {
    pub a2: Grid,
    pub n: Grid,
    pub epsilon: Grid,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelInput {
    #[serde(default)]
    pub label: Option<String>,
    pub molecule_n: u32,
    pub molecule_ntilde: u32,
    pub atom_j: HalfInt,
    #[serde(default)]
    pub atom_ltilde: u32,
    pub atom_jtilde: HalfInt,
    pub d_mol: f64,
    pub d_atom: f64,
    #[serde(default)]
    pub d_atom_unit: DipoleUnit,
    pub energy_defect: Frequency,
}

impl ChannelInput {
    pub fn to_spec(&self) -> rydswap_core::ChannelSpec {
        rydswap_core::ChannelSpec {
            label: self.label.clone(),
            molecule_n: self.molecule_n,
            molecule_ntilde: self.molecule_ntilde,
            atom_j: self.atom_j,
            atom_ltilde: self.atom_ltilde,
            atom_jtilde: self.atom_jtilde,
            d_mol: self.d_mol,
            d_atom: self.d_atom,
            d_atom_unit: self.d_atom_unit,
            energy_defect: self.energy_defect.get(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionsParams {
    pub channels: Vec<ChannelInput>,
    pub r: OneOrMany<Length>,
    #[serde(default = "right_angle")]
    pub theta: Angle,
    #[serde(default = "zero_angle")]
    pub phi: Angle,
    #[serde(default)]
    pub sign: MolecularSign,
    /// Real amplitudes over ascending `m_J`; the symmetric superposition by default.
    #[serde(default)]
    pub atomic_state: Option<Vec<f64>>,
}

fn right_angle() -> Angle {
    Angle::new(std::f64::consts::FRAC_PI_2)
}

fn zero_angle() -> Angle {
    Angle::new(0.0)
}
