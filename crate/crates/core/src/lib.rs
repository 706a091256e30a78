//! Design and verification toolkit for nonlinearity-engineered multi-loop
//! SQUID circuits.
//!
//! The crate is organised bottom-up:
//!
//! - [`circuit`] holds the circuit data model, JSON ingestion and presets.
//! - [`potential`] evaluates the inductive potential and its exact Taylor
//!   coefficients about the static minimum.
//! - [`wao`] decides whether a circuit is a weakly anharmonic oscillator.
//! - [`quantize`] turns Taylor coefficients into bosonic Hamiltonian
//!   coefficients and computes spectra on a phase grid.
//! - [`designer`] solves the inverse problem (target nonlinearity to
//!   branch parameters).
//! - [`drivetools`] handles strong-drive Bessel corrections.
//! - [`dynamics`] simulates Kerr-cat and four-cat scenarios.
//! - [`fixtures`] carries the published comparison tables as regression data.
//!
//! Energies are frequencies in GHz, angles are radians and drive amplitudes
//! are dimensionless throughout.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod designer;
pub mod drivetools;
pub mod dynamics;
pub mod error;
pub mod fixtures;
pub mod potential;
pub mod quantize;
pub mod wao;

pub use circuit::{CircuitSpec, DriveSpec, Inductor, InductorModel, JosephsonBranch, NormalizationPolicy};
pub use designer::{DesignProblem, DesignSolution, Parity};
pub use error::{NemsError, Result};
pub use potential::PotentialSeries;
pub use quantize::{ModeQuantization, SpectrumSweep};
pub use wao::WaoReport;

/// Default Taylor order used by the analysis paths.
pub const DEFAULT_ORDER: usize = 8;
