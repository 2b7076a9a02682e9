//! Command-line driver for the heat valve simulator.
//!
//! Exit codes: 0 on success, 1 on physics or validation failures (including
//! a failed oracle check), 2 on usage errors.

use clap::{Parser, Subcommand};
use heatvalve_core::config::SweepConfig;
use heatvalve_core::error::Error;
use heatvalve_core::point::evaluate_flux;
use heatvalve_core::sweep::{
    default_oracle_cases, find_zero_coupling, linspace, oracle_check, sweep_flux,
    sweep_temperature, write_csv, OracleCase, SweepRow, TempGrid,
};
use heatvalve_core::units::angular_to_ghz;
use std::f64::consts::TAU;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "heatvalve",
    version,
    about = "Flux-tunable quantum heat valve: polariton spectra, steady-state \
             heat currents, and two-mode entanglement"
)]
struct Cli {
    /// Parameter file (flat `key = value` lines, `#` comments); every key
    /// has a built-in default, so the flag is optional
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Grid size override: flux points for sweep-flux, left-temperature
    /// points for sweep-temp
    #[arg(long, global = true, value_name = "N")]
    points: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the flux bias over the configured grid, one CSV row per point
    SweepFlux,

    /// Sweep bath temperatures at a fixed flux bias
    SweepTemp {
        /// Flux bias in units of phi/2pi
        #[arg(long, default_value_t = 0.5)]
        phi: f64,
        /// Left-bath temperature range, kelvin
        #[arg(long, default_value_t = 0.1)]
        tl_min: f64,
        #[arg(long, default_value_t = 0.4)]
        tl_max: f64,
        /// Right-bath temperature range; defaults to the configured T_R_K
        #[arg(long)]
        tr_min: Option<f64>,
        #[arg(long)]
        tr_max: Option<f64>,
        /// Number of right-bath temperatures
        #[arg(long, default_value_t = 1)]
        tr_points: usize,
    },

    /// Evaluate one operating point and print its observables
    SteadyState {
        /// Flux bias in units of phi/2pi
        #[arg(long)]
        phi: f64,
    },

    /// Locate the two flux biases where the resonator coupling vanishes
    ZeroCoupling,

    /// Check the rate-equation results against a truncated-Fock Lindblad
    /// solve; nonzero exit if any case disagrees
    OracleCheck {
        /// Relative tolerance for all cases; default 1% (0.1% when the
        /// bath temperatures are equal)
        #[arg(long)]
        rel_tol: Option<f64>,
        /// Fock states kept per mode
        #[arg(long)]
        cutoff: Option<usize>,
        /// Flux bias to check, phi/2pi (repeatable; default 0.30 0.50 0.70)
        #[arg(long = "phi", value_name = "V")]
        phis: Vec<f64>,
        /// Temperature pair to check, T_L:T_R in kelvin (repeatable;
        /// default 0.2:0.1 0.3:0.1 0.15:0.15)
        #[arg(long = "temps", value_name = "TL:TR", value_parser = parse_temp_pair)]
        temps: Vec<TempPair>,
    },
}

// clap needs a named type for the parsed pair
type TempPair = (f64, f64);

fn parse_temp_pair(s: &str) -> Result<TempPair, String> {
    let (l, r) = s
        .split_once(':')
        .ok_or_else(|| format!("expected TL:TR, got '{s}'"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|e| format!("bad temperature '{v}': {e}"))
    };
    Ok((parse(l)?, parse(r)?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let mut cfg = match &cli.config {
        Some(path) => SweepConfig::from_path(path)?,
        None => SweepConfig::default(),
    };

    match cli.command {
        Command::SweepFlux => {
            if let Some(n) = cli.points {
                cfg.flux_points = n;
                cfg.validate()?;
            }
            emit_rows(&cli.out, &sweep_flux(&cfg))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::SweepTemp {
            phi,
            tl_min,
            tl_max,
            tr_min,
            tr_max,
            tr_points,
        } => {
            let tl_points = cli.points.unwrap_or(31);
            if tl_points == 0 || tr_points == 0 {
                return Err(Error::Validation {
                    message: "temperature grids need at least one point".into(),
                });
            }
            let tr_lo = tr_min.unwrap_or(cfg.t_r_k);
            let tr_hi = tr_max.unwrap_or(tr_lo);
            let grid = TempGrid {
                t_left: linspace(tl_min, tl_max, tl_points),
                t_right: linspace(tr_lo, tr_hi, tr_points),
            };
            for &t in grid.t_left.iter().chain(grid.t_right.iter()) {
                if !(t.is_finite() && t >= 0.0) {
                    return Err(Error::Validation {
                        message: format!("temperatures must be finite and non-negative, got {t}"),
                    });
                }
            }
            emit_rows(&cli.out, &sweep_temperature(&cfg, phi, &grid))?;
            Ok(ExitCode::SUCCESS)
        }

        Command::SteadyState { phi } => {
            let point = evaluate_flux(
                &cfg.circuit(),
                phi * TAU,
                &cfg.left_bath(),
                &cfg.right_bath(),
            )?;
            let mut text = String::new();
            let mut kv = |k: &str, v: String| {
                text.push_str(&format!("{k:<16} = {v}\n"));
            };
            kv("phi_over_2pi", format!("{phi:.12}"));
            kv(
                "omega_L_GHz",
                format!("{:.12e}", angular_to_ghz(point.mode.omega_l)),
            );
            kv(
                "omega_R_GHz",
                format!("{:.12e}", angular_to_ghz(point.mode.omega_r)),
            );
            kv("g_GHz", format!("{:.12e}", angular_to_ghz(point.mode.g)));
            kv(
                "omega_plus_GHz",
                format!("{:.12e}", angular_to_ghz(point.basis.omega_plus)),
            );
            kv(
                "omega_minus_GHz",
                format!("{:.12e}", angular_to_ghz(point.basis.omega_minus)),
            );
            kv("occ_plus", format!("{:.12e}", point.steady.occ_plus));
            kv("occ_minus", format!("{:.12e}", point.steady.occ_minus));
            kv("Q_L_natural", format!("{:.12e}", point.steady.q_left));
            kv("Q_R_natural", format!("{:.12e}", point.steady.q_right));
            kv("Q_L_watts", format!("{:.12e}", point.steady.q_left_watts));
            kv("E_N", format!("{:.12e}", point.log_negativity));
            kv(
                "secular_ratio",
                format!("{:.12e}", point.steady.secular_ratio),
            );
            emit_text(&cli.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::ZeroCoupling => {
            let report = find_zero_coupling(&cfg.circuit())?;
            let mut text = String::new();
            for (k, (root, closed)) in report
                .roots
                .iter()
                .zip(report.closed_form.iter())
                .enumerate()
            {
                text.push_str(&format!(
                    "root {} phi_over_2pi = {:.9}  closed_form = {:.9}  difference = {:.3e}\n",
                    k + 1,
                    root / TAU,
                    closed / TAU,
                    (root - closed) / TAU
                ));
            }
            emit_text(&cli.out, &text)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::OracleCheck {
            rel_tol,
            cutoff,
            phis,
            temps,
        } => {
            let cutoff = cutoff.unwrap_or(cfg.oracle_cutoff);
            let cases = if phis.is_empty() && temps.is_empty() {
                default_oracle_cases()
            } else {
                let phis = if phis.is_empty() {
                    vec![0.30, 0.50, 0.70]
                } else {
                    phis
                };
                let temps = if temps.is_empty() {
                    vec![(0.2, 0.1), (0.3, 0.1), (0.15, 0.15)]
                } else {
                    temps
                };
                phis.iter()
                    .flat_map(|&phi_over_2pi| {
                        temps.iter().map(move |&(t_left, t_right)| OracleCase {
                            phi_over_2pi,
                            t_left,
                            t_right,
                        })
                    })
                    .collect()
            };
            let reports = oracle_check(&cfg, &cases, rel_tol, cutoff)?;
            let mut text = String::new();
            let mut failures = 0usize;
            for r in &reports {
                for row in &r.report.rows {
                    text.push_str(&format!(
                        "case phi={:.3} TL={:.3} TR={:.3} tol={:.1e} {} analytic={:.6e} \
                         oracle={:.6e} rel={:.3e} {}\n",
                        r.case.phi_over_2pi,
                        r.case.t_left,
                        r.case.t_right,
                        r.rel_tol,
                        row.name,
                        row.analytic,
                        row.oracle,
                        row.rel_diff,
                        if row.pass { "pass" } else { "FAIL" }
                    ));
                }
                if !r.report.pass {
                    failures += 1;
                }
            }
            text.push_str(&format!(
                "oracle-check: {}/{} cases pass (cutoff {})\n",
                reports.len() - failures,
                reports.len(),
                cutoff
            ));
            emit_text(&cli.out, &text)?;
            if failures > 0 {
                eprintln!(
                    "error: {failures} oracle case(s) exceeded tolerance; if the \
                     differences are small, truncation error may dominate: raise \
                     --cutoff or loosen --rel-tol"
                );
                Ok(ExitCode::FAILURE)
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
    }
}

fn emit_rows(out: &Option<PathBuf>, rows: &[SweepRow]) -> io::Result<()> {
    match out {
        Some(path) => write_csv(BufWriter::new(File::create(path)?), rows),
        None => write_csv(io::stdout().lock(), rows),
    }
}

fn emit_text(out: &Option<PathBuf>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}
