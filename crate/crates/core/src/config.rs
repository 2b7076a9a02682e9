//! Device parameters, sweep settings, and the plain-text format that feeds
//! them in.
//!
//! The format is one `key = value` pair per line, `#` comments, blank lines
//! ignored. Keys carry their units in the name (nH, fF, GHz, K); values are
//! stored exactly as parsed and only converted in the typed accessors, so a
//! parse/serialize round trip is the identity. Unknown and duplicate keys
//! are hard errors: silently ignoring a typo in a physics parameter is how
//! wrong plots get published.
//!
//! Frequency keys are ordinary frequency in GHz (a 7.0 here is an angular
//! 2 pi x 7e9 rad/s internally).

use crate::bath::BathSpec;
use crate::circuit::CircuitParams;
use crate::error::{Error, Result};
use crate::units::{ghz_to_angular, FEMTO, NANO};
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Left resonator inductance, nH.
    pub l_a_nh: f64,
    /// Right resonator inductance, nH.
    pub l_b_nh: f64,
    /// Left resonator capacitance, fF.
    pub c_a_ff: f64,
    /// Right resonator capacitance, fF.
    pub c_b_ff: f64,
    /// Junction shunt inductance, nH.
    pub l_sh_nh: f64,
    /// Junction inductance scale, nH.
    pub l_j0_nh: f64,
    /// Static mutual inductance, nH.
    pub m_0_nh: f64,
    /// Coupler stray inductance, nH.
    pub l_0_nh: f64,
    /// SQUID asymmetry offset.
    pub delta: f64,
    /// Bath resistances (normalized units).
    pub r_l: f64,
    pub r_r: f64,
    /// Bath filter quality factors.
    pub q_l: f64,
    pub q_r: f64,
    /// Bath filter center frequencies, ordinary GHz.
    pub omega_lc_l_ghz: f64,
    pub omega_lc_r_ghz: f64,
    /// Bath temperatures, K.
    pub t_l_k: f64,
    pub t_r_k: f64,
    /// Flux sweep bounds in flux quanta (phi / 2 pi) and point count.
    pub flux_start: f64,
    pub flux_stop: f64,
    pub flux_points: usize,
    /// Fock-space cutoff per mode for the master-equation check.
    pub oracle_cutoff: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            l_a_nh: 2.023,
            l_b_nh: 2.023,
            c_a_ff: 42.3,
            c_b_ff: 18.27,
            l_sh_nh: 0.446,
            l_j0_nh: 1.210,
            m_0_nh: 0.381,
            l_0_nh: 0.177,
            delta: 0.053,
            r_l: 1.0,
            r_r: 1.0,
            q_l: 5.0,
            q_r: 5.0,
            // 1e10 rad/s angular, expressed as ordinary GHz.
            omega_lc_l_ghz: 10.0 / std::f64::consts::TAU,
            omega_lc_r_ghz: 10.0 / std::f64::consts::TAU,
            t_l_k: 0.2,
            t_r_k: 0.1,
            flux_start: 0.0,
            flux_stop: 1.0,
            flux_points: 1001,
            oracle_cutoff: 12,
        }
    }
}

/// Canonical key order for serialization; also the complete key list.
const KEYS: [&str; 21] = [
    "L_a_nH",
    "L_b_nH",
    "C_a_fF",
    "C_b_fF",
    "L_sh_nH",
    "L_J0_nH",
    "M_0_nH",
    "L_0_nH",
    "delta",
    "R_L",
    "R_R",
    "Q_L",
    "Q_R",
    "omega_LC_L_GHz",
    "omega_LC_R_GHz",
    "T_L_K",
    "T_R_K",
    "flux_start",
    "flux_stop",
    "flux_points",
    "oracle_cutoff",
];

impl SweepConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parse config text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SweepConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            let Some(canon) = KEYS.iter().find(|k| **k == key) else {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key `{key}`"),
                });
            };
            if seen.contains(canon) {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
            seen.push(canon);
            let fval = || -> Result<f64> {
                value.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("`{value}` is not a number"),
                })
            };
            let uval = || -> Result<usize> {
                value.parse::<usize>().map_err(|_| Error::Parse {
                    line,
                    message: format!("`{value}` is not a non-negative integer"),
                })
            };
            match *canon {
                "L_a_nH" => cfg.l_a_nh = fval()?,
                "L_b_nH" => cfg.l_b_nh = fval()?,
                "C_a_fF" => cfg.c_a_ff = fval()?,
                "C_b_fF" => cfg.c_b_ff = fval()?,
                "L_sh_nH" => cfg.l_sh_nh = fval()?,
                "L_J0_nH" => cfg.l_j0_nh = fval()?,
                "M_0_nH" => cfg.m_0_nh = fval()?,
                "L_0_nH" => cfg.l_0_nh = fval()?,
                "delta" => cfg.delta = fval()?,
                "R_L" => cfg.r_l = fval()?,
                "R_R" => cfg.r_r = fval()?,
                "Q_L" => cfg.q_l = fval()?,
                "Q_R" => cfg.q_r = fval()?,
                "omega_LC_L_GHz" => cfg.omega_lc_l_ghz = fval()?,
                "omega_LC_R_GHz" => cfg.omega_lc_r_ghz = fval()?,
                "T_L_K" => cfg.t_l_k = fval()?,
                "T_R_K" => cfg.t_r_k = fval()?,
                "flux_start" => cfg.flux_start = fval()?,
                "flux_stop" => cfg.flux_stop = fval()?,
                "flux_points" => cfg.flux_points = uval()?,
                "oracle_cutoff" => cfg.oracle_cutoff = uval()?,
                _ => unreachable!(),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Serialize in canonical key order. Floats use the shortest
    /// round-trippable form, so parse(serialize(c)) == c.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let f = |v: f64| v.to_string();
        let pairs: [(&str, String); 21] = [
            ("L_a_nH", f(self.l_a_nh)),
            ("L_b_nH", f(self.l_b_nh)),
            ("C_a_fF", f(self.c_a_ff)),
            ("C_b_fF", f(self.c_b_ff)),
            ("L_sh_nH", f(self.l_sh_nh)),
            ("L_J0_nH", f(self.l_j0_nh)),
            ("M_0_nH", f(self.m_0_nh)),
            ("L_0_nH", f(self.l_0_nh)),
            ("delta", f(self.delta)),
            ("R_L", f(self.r_l)),
            ("R_R", f(self.r_r)),
            ("Q_L", f(self.q_l)),
            ("Q_R", f(self.q_r)),
            ("omega_LC_L_GHz", f(self.omega_lc_l_ghz)),
            ("omega_LC_R_GHz", f(self.omega_lc_r_ghz)),
            ("T_L_K", f(self.t_l_k)),
            ("T_R_K", f(self.t_r_k)),
            ("flux_start", f(self.flux_start)),
            ("flux_stop", f(self.flux_stop)),
            ("flux_points", self.flux_points.to_string()),
            ("oracle_cutoff", self.oracle_cutoff.to_string()),
        ];
        for (k, v) in pairs {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let err = |message: String| Err(Error::Validation { message });
        let positive: [(&str, f64); 13] = [
            ("L_a_nH", self.l_a_nh),
            ("L_b_nH", self.l_b_nh),
            ("C_a_fF", self.c_a_ff),
            ("C_b_fF", self.c_b_ff),
            ("L_sh_nH", self.l_sh_nh),
            ("L_J0_nH", self.l_j0_nh),
            ("M_0_nH", self.m_0_nh),
            ("R_L", self.r_l),
            ("R_R", self.r_r),
            ("Q_L", self.q_l),
            ("Q_R", self.q_r),
            ("omega_LC_L_GHz", self.omega_lc_l_ghz),
            ("omega_LC_R_GHz", self.omega_lc_r_ghz),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return err(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.l_0_nh.is_finite() && self.l_0_nh >= 0.0) {
            return err(format!("L_0_nH must be non-negative, got {}", self.l_0_nh));
        }
        if !(self.delta.is_finite() && self.delta.abs() < 1.0) {
            return err(format!("delta must lie in (-1, 1), got {}", self.delta));
        }
        for (name, t) in [("T_L_K", self.t_l_k), ("T_R_K", self.t_r_k)] {
            if !(t.is_finite() && t >= 0.0) {
                return err(format!("{name} must be non-negative, got {t}"));
            }
        }
        if !(self.flux_start.is_finite() && self.flux_stop.is_finite()) {
            return err("flux bounds must be finite".to_string());
        }
        if self.flux_stop <= self.flux_start {
            return err(format!(
                "flux_stop ({}) must exceed flux_start ({})",
                self.flux_stop, self.flux_start
            ));
        }
        if self.flux_points < 2 {
            return err(format!("flux_points must be at least 2, got {}", self.flux_points));
        }
        if !(2..=crate::oracle::MAX_CUTOFF).contains(&self.oracle_cutoff) {
            return err(format!(
                "oracle_cutoff must lie in [2, {}], got {}",
                crate::oracle::MAX_CUTOFF,
                self.oracle_cutoff
            ));
        }
        Ok(())
    }

    /// Circuit parameters in SI units.
    pub fn circuit(&self) -> CircuitParams {
        CircuitParams {
            l_a: self.l_a_nh * NANO,
            l_b: self.l_b_nh * NANO,
            c_a: self.c_a_ff * FEMTO,
            c_b: self.c_b_ff * FEMTO,
            l_sh: self.l_sh_nh * NANO,
            l_j0: self.l_j0_nh * NANO,
            m_0: self.m_0_nh * NANO,
            l_0: self.l_0_nh * NANO,
            delta: self.delta,
            pole_eps: 1e-9,
        }
    }

    pub fn left_bath(&self) -> BathSpec {
        BathSpec {
            resistance: self.r_l,
            quality: self.q_l,
            omega_lc: ghz_to_angular(self.omega_lc_l_ghz),
            temperature: self.t_l_k,
        }
    }

    pub fn right_bath(&self) -> BathSpec {
        BathSpec {
            resistance: self.r_r,
            quality: self.q_r,
            omega_lc: ghz_to_angular(self.omega_lc_r_ghz),
            temperature: self.t_r_k,
        }
    }

    /// The flux grid in flux quanta (phi / 2 pi), evenly spaced inclusive of
    /// both ends.
    pub fn flux_grid(&self) -> Vec<f64> {
        let n = self.flux_points;
        let step = (self.flux_stop - self.flux_start) / (n - 1) as f64;
        (0..n).map(|k| self.flux_start + k as f64 * step).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_text() {
        let cfg = SweepConfig::default();
        let text = cfg.serialize();
        let back = SweepConfig::parse(&text).unwrap();
        assert_eq!(cfg, back);
        // And serialization is idempotent on the canonical text.
        assert_eq!(text, back.serialize());
    }

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(SweepConfig::parse("").unwrap(), SweepConfig::default());
        let commented = "# nothing here\n\n   # more nothing\n";
        assert_eq!(SweepConfig::parse(commented).unwrap(), SweepConfig::default());
    }

    #[test]
    fn partial_override_keeps_other_defaults() {
        let cfg = SweepConfig::parse("T_L_K = 0.35\nflux_points = 51 # coarse\n").unwrap();
        assert_eq!(cfg.t_l_k, 0.35);
        assert_eq!(cfg.flux_points, 51);
        assert_eq!(cfg.l_a_nh, 2.023);
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let text = "T_L_K = 0.2\nT_Z_K = 0.3\n";
        match SweepConfig::parse(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("T_Z_K"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let text = "delta = 0.1\n# comment\ndelta = 0.2\n";
        match SweepConfig::parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(matches!(
            SweepConfig::parse("delta 0.1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            SweepConfig::parse("delta = banana\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            SweepConfig::parse("flux_points = 3.5\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn domain_violations_are_rejected() {
        for bad in [
            "L_a_nH = -2.0",
            "L_a_nH = 0",
            "delta = 1.0",
            "T_L_K = -0.1",
            "flux_points = 1",
            "flux_start = 0.7\nflux_stop = 0.3",
            "oracle_cutoff = 1",
            "oracle_cutoff = 100",
            "Q_L = 0",
        ] {
            assert!(
                matches!(SweepConfig::parse(bad), Err(Error::Validation { .. })),
                "accepted: {bad}"
            );
        }
    }

    #[test]
    fn accessors_convert_units_once() {
        let cfg = SweepConfig::default();
        let c = cfg.circuit();
        assert_eq!(c.l_a, 2.023e-9);
        assert_eq!(c.c_b, 18.27e-15);
        let b = cfg.left_bath();
        // 10/(2 pi) GHz ordinary = 1e10 rad/s angular.
        assert!((b.omega_lc - 1e10).abs() < 1e-3);
        assert_eq!(b.temperature, 0.2);
    }

    #[test]
    fn flux_grid_is_inclusive_and_uniform() {
        let cfg = SweepConfig::parse("flux_points = 5\nflux_start = 0.25\nflux_stop = 0.75").unwrap();
        let grid = cfg.flux_grid();
        assert_eq!(grid.len(), 5);
        assert_eq!(grid[0], 0.25);
        assert_eq!(grid[4], 0.75);
        assert!((grid[2] - 0.5).abs() < 1e-15);
        // Default grid hits half flux exactly at the center index.
        let grid = SweepConfig::default().flux_grid();
        assert_eq!(grid.len(), 1001);
        assert_eq!(grid[500], 0.5);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("valve.cfg");
        let mut cfg = SweepConfig::default();
        cfg.t_l_k = 0.123456789012345;
        cfg.flux_points = 77;
        std::fs::write(&path, cfg.serialize()).unwrap();
        let back = SweepConfig::from_path(&path).unwrap();
        assert_eq!(cfg, back);
    }
}
