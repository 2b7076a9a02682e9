//! Grid sweeps over flux and bath temperatures, CSV serialization,
//! zero-coupling root finding, and the master-equation check harness.
//!
//! Sweeps never abort on a physics failure: a grid point that lands on the
//! junction-inductance pole, in the unstable coupling regime, or on a
//! decoupled mode produces a row with a status flag and no payload. Grid
//! points are evaluated in parallel; row order is restored on collection,
//! so output is byte-identical regardless of thread count.

use crate::bath::BathSpec;
use crate::circuit::CircuitParams;
use crate::config::SweepConfig;
use crate::error::{Error, Result};
use crate::oracle::{
    build_liouvillian, compare, oracle_observables, steady_state_density, ComparisonReport,
    OracleConfig,
};
use crate::point::{evaluate_flux, evaluate_modes, PointReport};
use crate::units::angular_to_ghz;
use rayon::prelude::*;
use std::f64::consts::TAU;
use std::fmt;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// Flux lands inside the guard band of the junction-inductance pole.
    Pole,
    /// Coupling too strong for a stable normal-mode decomposition; also the
    /// catch-all for numerical breakdowns, which are never marked ok.
    Unstable,
    /// A mode decoupled from both baths, or a degenerate mode basis.
    Isolated,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Pole => "pole",
            RowStatus::Unstable => "unstable",
            RowStatus::Isolated => "isolated",
        }
    }

    fn from_error(err: &Error) -> RowStatus {
        match err {
            Error::PolePassage { .. } => RowStatus::Pole,
            Error::Instability { .. } => RowStatus::Unstable,
            Error::IsolatedMode { .. } | Error::DegenerateBasis => RowStatus::Isolated,
            _ => RowStatus::Unstable,
        }
    }
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sweep coordinate: either a flux bias or a bath temperature pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPoint {
    Flux { phi_over_2pi: f64 },
    Temperature { t_left: f64, t_right: f64 },
}

/// Numeric payload of a successful row, in output units.
#[derive(Debug, Clone, Copy)]
pub struct RowValues {
    pub omega_plus_ghz: f64,
    pub omega_minus_ghz: f64,
    pub g_ghz: f64,
    pub q_left_natural: f64,
    pub q_left_watts: f64,
    pub e_n: f64,
    pub occ_plus: f64,
    pub occ_minus: f64,
    pub secular_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub coord: GridPoint,
    pub status: RowStatus,
    pub values: Option<RowValues>,
}

fn row_values(point: &PointReport) -> RowValues {
    RowValues {
        omega_plus_ghz: angular_to_ghz(point.basis.omega_plus),
        omega_minus_ghz: angular_to_ghz(point.basis.omega_minus),
        g_ghz: angular_to_ghz(point.mode.g),
        q_left_natural: point.steady.q_left,
        q_left_watts: point.steady.q_left_watts,
        e_n: point.log_negativity,
        occ_plus: point.steady.occ_plus,
        occ_minus: point.steady.occ_minus,
        secular_ratio: point.steady.secular_ratio,
    }
}

fn row_from_result(coord: GridPoint, result: Result<PointReport>) -> SweepRow {
    match result {
        Ok(point) => SweepRow {
            coord,
            status: RowStatus::Ok,
            values: Some(row_values(&point)),
        },
        Err(err) => SweepRow {
            coord,
            status: RowStatus::from_error(&err),
            values: None,
        },
    }
}

/// Evaluate the pipeline over the config's flux grid.
pub fn sweep_flux(cfg: &SweepConfig) -> Vec<SweepRow> {
    let circuit = cfg.circuit();
    let left = cfg.left_bath();
    let right = cfg.right_bath();
    cfg.flux_grid()
        .par_iter()
        .map(|&u| {
            let coord = GridPoint::Flux { phi_over_2pi: u };
            row_from_result(coord, evaluate_flux(&circuit, u * TAU, &left, &right))
        })
        .collect()
}

/// Temperature grid: rows iterate the left-bath values (outer) against the
/// right-bath values (inner).
#[derive(Debug, Clone)]
pub struct TempGrid {
    pub t_left: Vec<f64>,
    pub t_right: Vec<f64>,
}

pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|k| lo + k as f64 * step).collect()
}

/// Evaluate the pipeline over a temperature grid at a fixed flux bias.
pub fn sweep_temperature(cfg: &SweepConfig, phi_over_2pi: f64, grid: &TempGrid) -> Vec<SweepRow> {
    let mode = cfg.circuit().mode_params(phi_over_2pi * TAU);
    let left = cfg.left_bath();
    let right = cfg.right_bath();
    let pairs: Vec<(f64, f64)> = grid
        .t_left
        .iter()
        .flat_map(|&tl| grid.t_right.iter().map(move |&tr| (tl, tr)))
        .collect();
    pairs
        .par_iter()
        .map(|&(tl, tr)| {
            let coord = GridPoint::Temperature {
                t_left: tl,
                t_right: tr,
            };
            let result = match &mode {
                Ok(m) => evaluate_modes(
                    *m,
                    &BathSpec {
                        temperature: tl,
                        ..left
                    },
                    &BathSpec {
                        temperature: tr,
                        ..right
                    },
                ),
                Err(e) => Err(clone_error(e)),
            };
            row_from_result(coord, result)
        })
        .collect()
}

// Error carries io::Error and so cannot derive Clone; the sweep only needs
// to replicate the physics variants a shared mode reduction can produce.
fn clone_error(e: &Error) -> Error {
    match e {
        Error::PolePassage { phi_over_2pi } => Error::PolePassage {
            phi_over_2pi: *phi_over_2pi,
        },
        Error::Instability { reason } => Error::Instability {
            reason: reason.clone(),
        },
        other => Error::Validation {
            message: other.to_string(),
        },
    }
}

const CSV_PAYLOAD_HEADER: &str = "omega_plus_GHz,omega_minus_GHz,g_GHz,Q_L_natural,Q_L_watts,\
E_N,occ_plus,occ_minus,secular_ratio,status";

/// Serialize rows to CSV with 12 significant digits, enough for the text
/// round-trip to preserve 1e-9 relative comparisons.
pub fn write_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> std::io::Result<()> {
    let temperature_grid = matches!(
        rows.first(),
        Some(SweepRow {
            coord: GridPoint::Temperature { .. },
            ..
        })
    );
    if temperature_grid {
        writeln!(out, "T_L_K,T_R_K,{CSV_PAYLOAD_HEADER}")?;
    } else {
        writeln!(out, "phi_over_2pi,{CSV_PAYLOAD_HEADER}")?;
    }
    for row in rows {
        match row.coord {
            GridPoint::Flux { phi_over_2pi } => write!(out, "{phi_over_2pi:.11e}")?,
            GridPoint::Temperature { t_left, t_right } => {
                write!(out, "{t_left:.11e},{t_right:.11e}")?
            }
        }
        match &row.values {
            Some(v) => write!(
                out,
                ",{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
                v.omega_plus_ghz,
                v.omega_minus_ghz,
                v.g_ghz,
                v.q_left_natural,
                v.q_left_watts,
                v.e_n,
                v.occ_plus,
                v.occ_minus,
                v.secular_ratio
            )?,
            None => write!(out, ",,,,,,,,,")?,
        }
        writeln!(out, ",{}", row.status)?;
    }
    Ok(())
}

/// Zero-coupling flux biases found by scanning the effective mutual
/// inductance for sign changes, cross-checked against the closed form.
#[derive(Debug, Clone, Copy)]
pub struct ZeroCouplingReport {
    /// Bisected roots, radians, ascending.
    pub roots: [f64; 2],
    /// Closed-form predictions, radians, ascending.
    pub closed_form: [f64; 2],
    /// Worst |root - closed_form|, radians.
    pub max_deviation: f64,
}

pub fn find_zero_coupling(circuit: &CircuitParams) -> Result<ZeroCouplingReport> {
    let (c1, c2) = circuit.zero_coupling_flux()?;
    const PANELS: usize = 4096;
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=PANELS {
        let phi = TAU * k as f64 / PANELS as f64;
        let m = match circuit.effective_mutual(phi) {
            Ok(m) => m,
            Err(_) => {
                prev = None; // pole panel: restart the bracket
                continue;
            }
        };
        if let Some((p0, m0)) = prev {
            if m0 * m < 0.0 {
                roots.push(bisect_mutual(circuit, p0, phi, m0));
            } else if m == 0.0 && m0 != 0.0 {
                roots.push(phi);
            }
        }
        prev = Some((phi, m));
    }
    if roots.len() != 2 {
        return Err(Error::Validation {
            message: format!(
                "expected two zero-coupling fluxes in one period, scan found {}",
                roots.len()
            ),
        });
    }
    roots.sort_by(f64::total_cmp);
    let closed = [c1, c2];
    let max_deviation = (roots[0] - closed[0]).abs().max((roots[1] - closed[1]).abs());
    if max_deviation > 1e-9 * TAU {
        return Err(Error::Validation {
            message: format!(
                "zero-coupling scan and closed form disagree by {max_deviation:.3e} rad"
            ),
        });
    }
    Ok(ZeroCouplingReport {
        roots: [roots[0], roots[1]],
        closed_form: closed,
        max_deviation,
    })
}

fn bisect_mutual(circuit: &CircuitParams, mut lo: f64, mut hi: f64, m_lo: f64) -> f64 {
    // 60 halvings of a TAU/4096 panel: interval ~ 1e-21, converged in f64
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let m = circuit
            .effective_mutual(mid)
            .expect("bracket cannot contain the pole: the mutual is finite at both ends");
        if m == 0.0 {
            return mid;
        }
        if (m > 0.0) == (m_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One point of the master-equation check matrix.
#[derive(Debug, Clone, Copy)]
pub struct OracleCase {
    pub phi_over_2pi: f64,
    pub t_left: f64,
    pub t_right: f64,
}

impl OracleCase {
    pub fn equal_temperature(&self) -> bool {
        self.t_left == self.t_right
    }
}

/// Default check matrix: three flux biases crossed with three temperature
/// pairs, one of them at equal temperatures where the net current must
/// vanish and the comparison tightens to 0.1 percent.
pub fn default_oracle_cases() -> Vec<OracleCase> {
    let mut cases = Vec::with_capacity(9);
    for &phi_over_2pi in &[0.30, 0.50, 0.70] {
        for &(t_left, t_right) in &[(0.2, 0.1), (0.3, 0.1), (0.15, 0.15)] {
            cases.push(OracleCase {
                phi_over_2pi,
                t_left,
                t_right,
            });
        }
    }
    cases
}

pub struct OracleCaseReport {
    pub case: OracleCase,
    pub rel_tol: f64,
    pub report: ComparisonReport,
}

/// Run the Lindblad comparison over a case matrix. `rel_tol` of `None`
/// selects 1% for unequal temperatures and 0.1% for equal ones. Cases run
/// serially: each holds a multi-megabyte superoperator.
pub fn oracle_check(
    cfg: &SweepConfig,
    cases: &[OracleCase],
    rel_tol: Option<f64>,
    cutoff: usize,
) -> Result<Vec<OracleCaseReport>> {
    let circuit = cfg.circuit();
    let left = cfg.left_bath();
    let right = cfg.right_bath();
    let oracle_cfg = OracleConfig::with_cutoff(cutoff);
    cases
        .iter()
        .map(|&case| {
            let point = evaluate_flux(
                &circuit,
                case.phi_over_2pi * TAU,
                &BathSpec {
                    temperature: case.t_left,
                    ..left
                },
                &BathSpec {
                    temperature: case.t_right,
                    ..right
                },
            )?;
            let liouvillian = build_liouvillian(&point.rates, cutoff)?;
            let sol = steady_state_density(&liouvillian, &oracle_cfg)?;
            let obs = oracle_observables(&liouvillian, &sol);
            let tol =
                rel_tol.unwrap_or(if case.equal_temperature() { 1e-3 } else { 1e-2 });
            let report = compare(&point, &obs, tol)?;
            Ok(OracleCaseReport {
                case,
                rel_tol: tol,
                report,
            })
        })
        .collect()
}
