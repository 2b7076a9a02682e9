//! Simulation core for a flux-tunable quantum heat valve: two superconducting
//! LC resonators, each terminated by a resistive bath at its own temperature,
//! exchanging heat through a SQUID-based coupler whose strength is set by an
//! external flux bias.
//!
//! The pipeline runs in five stages, one module each:
//!
//! 1. [`circuit`] reduces the lumped-element network to two bare mode
//!    frequencies and a flux-dependent coupling rate.
//! 2. [`hopfield`] diagonalizes the resulting quadratic Hamiltonian into two
//!    polariton modes via a Bogoliubov transformation.
//! 3. [`bath`] evaluates resistor admittances, coupling-weighted damping
//!    rates, and thermal occupations per polariton.
//! 4. [`steady_state`] solves the secular rate equations for mode
//!    occupations and bath heat currents.
//! 5. [`gaussian`] builds the lab-frame covariance matrix and computes the
//!    logarithmic negativity between the two resonators.
//!
//! [`oracle`] provides an independent check of stage 4/5 results by solving
//! the full Lindblad master equation in a truncated Fock space. [`sweep`]
//! drives the pipeline over flux and temperature grids, and [`config`] holds
//! the device parameters and the plain-text file format that feeds them in.
//!
//! Unit conventions: all internal frequencies and rates are angular (rad/s),
//! inductances are in henry, capacitances in farad, temperatures in kelvin.
//! Heat currents are natural (rad^2/s^2) unless a `_watts` name says
//! otherwise. Conversions to and from bench units (nH, fF, GHz) live in
//! [`units`] and the config accessors.

pub mod bath;
pub mod circuit;
pub mod config;
pub mod error;
pub mod gaussian;
pub mod hopfield;
pub mod oracle;
pub mod point;
pub mod steady_state;
pub mod sweep;
pub mod units;

pub use bath::{BathSpec, ModeRates, RateSet};
pub use circuit::{CircuitParams, ModeParams};
pub use config::SweepConfig;
pub use error::{Error, Result};
pub use gaussian::logarithmic_negativity;
pub use hopfield::{ModeCoefficients, PolaritonBasis};
pub use point::{evaluate_flux, evaluate_modes, PointReport};
pub use steady_state::SteadyStateReport;
pub use sweep::{sweep_flux, sweep_temperature, write_csv, SweepRow};
