//! One-stop evaluation of the whole pipeline at a single operating point.

use crate::bath::{rate_set, BathSpec, RateSet};
use crate::circuit::{CircuitParams, ModeParams};
use crate::error::Result;
use crate::gaussian::{
    lab_covariance, logarithmic_negativity, polariton_covariance, transform_matrix,
};
use crate::hopfield::{hopfield_coefficients, PolaritonBasis};
use crate::steady_state::{steady_state, SteadyStateReport};
use nalgebra::Matrix4;

/// Everything the pipeline produces at one flux/temperature point.
#[derive(Debug, Clone)]
pub struct PointReport {
    pub mode: ModeParams,
    pub basis: PolaritonBasis,
    pub rates: RateSet,
    pub steady: SteadyStateReport,
    /// Quadrature transformation from polariton to lab basis.
    pub transform: Matrix4<f64>,
    /// Lab-frame covariance matrix of the steady state.
    pub gamma_lab: Matrix4<f64>,
    pub log_negativity: f64,
}

/// Run the pipeline from already-reduced mode parameters.
pub fn evaluate_modes(
    mode: ModeParams,
    left: &BathSpec,
    right: &BathSpec,
) -> Result<PointReport> {
    let basis = hopfield_coefficients(&mode)?;
    let rates = rate_set(&basis, left, right);
    let steady = steady_state(&rates)?;
    let transform = transform_matrix(&basis);
    let gamma_pol = polariton_covariance(steady.occ_plus, steady.occ_minus)?;
    let gamma_lab = lab_covariance(&gamma_pol, &transform);
    let log_negativity = logarithmic_negativity(&gamma_lab)?;
    Ok(PointReport {
        mode,
        basis,
        rates,
        steady,
        transform,
        gamma_lab,
        log_negativity,
    })
}

/// Run the pipeline from the circuit at reduced flux `phi` (radians).
pub fn evaluate_flux(
    circuit: &CircuitParams,
    phi: f64,
    left: &BathSpec,
    right: &BathSpec,
) -> Result<PointReport> {
    evaluate_modes(circuit.mode_params(phi)?, left, right)
}
