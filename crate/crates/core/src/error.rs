//! Failure modes shared across the workspace.
//!
//! Physics failures (pole passage, instability, isolated modes) are ordinary
//! outcomes at some grid points and are mapped to row statuses by the sweep
//! layer; the rest indicate bad input or a numerical breakdown worth
//! surfacing loudly.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Flux bias too close to the junction-inductance pole at cos(phi) = delta.
    #[error("flux bias phi/2pi = {phi_over_2pi:.6} sits within the guard band of the junction inductance pole")]
    PolePassage { phi_over_2pi: f64 },

    /// The quadratic Hamiltonian has no stable normal-mode decomposition.
    #[error("unstable mode Hamiltonian: {reason}")]
    Instability { reason: String },

    /// No flux bias solves the zero-coupling condition for these parameters.
    #[error("zero-coupling condition has no solution: required cos(phi) = {arg:.6} lies outside [-1, 1]")]
    NoRoot { arg: f64 },

    /// The normal-mode basis is not unique (degenerate uncoupled modes).
    #[error("degenerate normal-mode basis: coupling and detuning both vanish")]
    DegenerateBasis,

    /// A normal mode couples to neither bath, so its occupation is undefined.
    #[error("polariton mode {mode} is decoupled from both baths")]
    IsolatedMode { mode: char },

    /// Iterative solver hit its budget or a diagnostic exceeded tolerance.
    #[error("solver did not converge: {reason}")]
    NotConverged { reason: String },

    /// The Liouvillian kernel is not one-dimensional.
    #[error("steady state is not unique: kernel dimension {dim}")]
    DegenerateKernel { dim: usize },

    /// A state or covariance matrix violates the uncertainty principle.
    #[error("unphysical state: {reason}")]
    Unphysical { reason: String },

    /// A symplectic-eigenvalue discriminant went negative beyond tolerance.
    #[error("symplectic eigenvalue discriminant {value:.3e} is negative beyond round-off")]
    NumericalBranch { value: f64 },

    /// Config text could not be parsed.
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Config parsed but the values are out of domain, or a cross-check failed.
    #[error("{message}")]
    Validation { message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
