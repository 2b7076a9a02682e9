//! Resistive baths and the secular coupling rates they induce.
//!
//! Each resonator terminates in a resistor R embedded in a band-pass
//! environment of quality factor Q centered at omega_lc, so the dissipative
//! part of the admittance seen by the mode is
//!
//!   Re Y(omega) = 1 / (R [1 + Q^2 (omega/omega_lc - omega_lc/omega)^2])
//!
//! which peaks at 1/R on resonance and rolls off on both sides. A polariton
//! at frequency omega_j damps at zeta(omega_j) = 2 omega_j Re Y(omega_j),
//! weighted by the square of its quadrature amplitude in whichever resonator
//! the bath touches. Thermal occupations follow the Bose distribution at the
//! bath's own temperature.
//!
//! Resistances are normalized so that admittance carries 1/R and the damping
//! rate comes out in rad/s; only ratios of zetas and the overall heat scale
//! depend on R.

use crate::hopfield::PolaritonBasis;
use crate::units::{HBAR, KB};

/// One bath: a resistor R at temperature T behind a band-pass filter (Q,
/// omega_lc). `omega_lc` is angular, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub resistance: f64,
    pub quality: f64,
    pub omega_lc: f64,
    pub temperature: f64,
}

impl BathSpec {
    /// Dissipative part of the filtered admittance at angular frequency
    /// `omega` > 0.
    pub fn re_admittance(&self, omega: f64) -> f64 {
        let detune = omega / self.omega_lc - self.omega_lc / omega;
        1.0 / (self.resistance * (1.0 + self.quality * self.quality * detune * detune))
    }

    /// Bare damping rate zeta(omega) = 2 omega Re Y(omega), rad/s.
    ///
    /// Vanishes as omega -> 0 (the filter detuning diverges) and decays as
    /// 1/omega far above resonance.
    pub fn damping_rate(&self, omega: f64) -> f64 {
        2.0 * omega * self.re_admittance(omega)
    }

    /// Bose-Einstein occupation at this bath's temperature.
    ///
    /// Uses expm1 so the high-occupation regime (hbar omega << kT) keeps
    /// full precision; T <= 0 returns exactly zero.
    pub fn occupation(&self, omega: f64) -> f64 {
        if self.temperature <= 0.0 {
            return 0.0;
        }
        1.0 / (HBAR * omega / (KB * self.temperature)).exp_m1()
    }
}

/// Everything the rate equations need about one polariton mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRates {
    /// Mode frequency, rad/s.
    pub omega: f64,
    /// Squared quadrature weight in the left resonator, (w - y)^2.
    pub weight_left: f64,
    /// Squared quadrature weight in the right resonator, (x - z)^2.
    pub weight_right: f64,
    /// Bare left-bath damping rate at this frequency, rad/s.
    pub zeta_left: f64,
    pub zeta_right: f64,
    /// Left-bath Bose occupation at this frequency.
    pub occ_left: f64,
    pub occ_right: f64,
}

impl ModeRates {
    /// Total weighted damping rate of this mode, rad/s.
    pub fn linewidth(&self) -> f64 {
        self.weight_left * self.zeta_left + self.weight_right * self.zeta_right
    }
}

/// Rates for both polariton modes plus the secular figure of merit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    pub plus: ModeRates,
    pub minus: ModeRates,
    /// Mode splitting over the larger linewidth. The independent
    /// single-mode rate equations assume this is large.
    pub secular_ratio: f64,
}

/// Evaluate both baths at both polariton frequencies.
pub fn rate_set(basis: &PolaritonBasis, left: &BathSpec, right: &BathSpec) -> RateSet {
    let mode = |omega: f64, wl: f64, wr: f64| ModeRates {
        omega,
        weight_left: wl * wl,
        weight_right: wr * wr,
        zeta_left: left.damping_rate(omega),
        zeta_right: right.damping_rate(omega),
        occ_left: left.occupation(omega),
        occ_right: right.occupation(omega),
    };
    let plus = mode(
        basis.omega_plus,
        basis.plus.left_weight(),
        basis.plus.right_weight(),
    );
    let minus = mode(
        basis.omega_minus,
        basis.minus.left_weight(),
        basis.minus.right_weight(),
    );
    let splitting = basis.omega_plus - basis.omega_minus;
    let width = plus.linewidth().max(minus.linewidth());
    let secular_ratio = if width > 0.0 {
        splitting / width
    } else {
        f64::INFINITY
    };
    RateSet {
        plus,
        minus,
        secular_ratio,
    }
}
