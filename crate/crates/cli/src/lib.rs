//! Scenario files, report generation and trajectory output for the `ncmech`
//! binary.

pub mod config;
pub mod run;

use ncmech::darboux::DarbouxError;
use ncmech::dynamics::DynamicsError;
use ncmech::gauge::GaugeError;
use ncmech::polyalg::PolyError;
use ncmech::structure::StructureError;
use thiserror::Error;

pub use config::{resolve, resolve_mode, ConfigFile, Overrides, Setup};
pub use run::{run, Artifact, Command, Outcome, SeriesDump};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("schema: {0}")]
    Schema(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Darboux(#[from] DarbouxError),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}
