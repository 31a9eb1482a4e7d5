//! Scenario-driven front-end: TOML scenarios in, CSV tables and run manifests out.

pub mod app;
pub mod error;
pub mod output;
pub mod quantity;
pub mod run;
pub mod scenario;
pub mod verify;

pub use error::CliError;
pub use scenario::{load_scenario, parse_scenario, Kind, Scenario};
