//! Numerical kernels for phonon-swap sympathetic cooling of trapped polar
//! molecules by Rydberg atoms.
//!
//! Unit conventions are described in [`units`].

pub mod angular;
pub mod dynamics;
pub mod error;
pub mod expansion;
pub mod fidelity;
pub mod hyperfine;
pub mod interactions;
pub mod swap;
pub mod units;

pub use angular::{dipole_angular_matrix, wigner_3j, wigner_3j_exact, DipoleAngularMatrix, Exact3j, HalfInt};
pub use dynamics::{build_chain, simulate_swap, swap_efficiency, ChainModel, ChainSpec, GaussianState, InitialState, QuadraticForm, SwapRun};
pub use error::{Error, ErrorCategory, Result};
pub use expansion::{phonon_couplings, Axis, Coefficients, Expansion, PhononCouplings, RadialAngularPotential, SpeciesSpec};
pub use fidelity::{coherent_oracle, fidelity, reduced_density_matrix, FidelityReport, QubitPhononInput};
pub use hyperfine::{build_hyperfine, dressing_deviation, stretched_state_purity, HyperfineSpec, RotBasisState, SpectrumReport};
pub use interactions::{angular_matrix, c6_channel, mixing_fraction, symmetrize, total_c6, ChannelSpec};
pub use swap::{critical_ratio, dressed_rates, surviving_fraction, swap_range, DressingSpec, RangeReport, RangeSpec};
