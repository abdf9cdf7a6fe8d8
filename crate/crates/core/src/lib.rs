//! Collision-driven amplification without inversion (AWI) in a three-level
//! V-scheme alkali vapor.
//!
//! Level |1> is the S1/2 ground state, |2> the P3/2 level coupled to it by a
//! strong drive on the D2 line, and |3> the P1/2 level probed on the D1 line.
//! A buffer gas transfers population between the fine-structure levels and
//! broadens both optical transitions. The crate covers:
//!
//! * [`species`]: atomic and collision data, catalog ingestion, unit conversion.
//! * [`rates`]: relaxation, transfer and dephasing rates; saturation parameters.
//! * [`steady`]: closed-form steady-state populations and the probe line shape.
//! * [`transient`]: time-domain integration of the density-matrix equations,
//!   used as an independent check on [`steady`].
//! * [`doppler`]: Maxwell-Boltzmann velocity averaging of the line shape.
//! * [`threshold`]: inversion/AWI thresholds, their pressure minima and the
//!   optimal-gain operating point.
//! * [`config`], [`commands`], [`output`] and [`validation`]: the
//!   command-line front end and its self-check suite.

pub mod commands;
pub mod config;
pub mod constants;
pub mod doppler;
mod error;
pub mod output;
pub mod quad;
pub mod rates;
pub mod species;
pub mod steady;
pub mod threshold;
pub mod transient;
pub mod validation;

pub use error::{Error, Result};
pub use rates::{DriveField, RateSet};
pub use species::{AtomSystem, BathConditions, SpeciesCatalog};
pub use steady::{Degeneracies, PopulationState, SpectrumSample};
