//! Lumped-element reduction of the coupler circuit.
//!
//! Two LC resonators (L_a, C_a) and (L_b, C_b) are joined by a coupler made
//! of a flux-biased SQUID of inductance L_J(phi), a pair of shunt inductors
//! L_sh, a series stray L_0, and a fixed geometric mutual M_0. Eliminating
//! the coupler's internal node renormalizes both resonator inductances and
//! produces a flux-dependent effective mutual, which is what makes the valve
//! tunable: the correction term can cancel M_0 exactly at two flux points
//! per period, switching the coupling off.
//!
//! All inductances here are in henry, capacitances in farad, and phi is the
//! reduced flux (2 pi times flux in units of the flux quantum).

use crate::error::{Error, Result};

/// Fixed element values of the coupler network.
///
/// `pole_eps` guards the junction inductance divergence: fluxes with
/// |cos(phi) - delta| below it are rejected as [`Error::PolePassage`] rather
/// than evaluated to astronomically amplified round-off.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitParams {
    /// Left resonator inductance, H.
    pub l_a: f64,
    /// Right resonator inductance, H.
    pub l_b: f64,
    /// Left resonator capacitance, F.
    pub c_a: f64,
    /// Right resonator capacitance, F.
    pub c_b: f64,
    /// Shunt inductance on each side of the junction, H.
    pub l_sh: f64,
    /// Junction inductance scale, H.
    pub l_j0: f64,
    /// Static geometric mutual inductance, H.
    pub m_0: f64,
    /// Series stray inductance of the coupler branch, H.
    pub l_0: f64,
    /// SQUID asymmetry offset, dimensionless.
    pub delta: f64,
    /// Half-width of the rejected band around the junction pole.
    pub pole_eps: f64,
}

impl Default for CircuitParams {
    /// Nominal device values used throughout the test suite.
    fn default() -> Self {
        CircuitParams {
            l_a: 2.023e-9,
            l_b: 2.023e-9,
            c_a: 42.3e-15,
            c_b: 18.27e-15,
            l_sh: 0.446e-9,
            l_j0: 1.210e-9,
            m_0: 0.381e-9,
            l_0: 0.177e-9,
            delta: 0.053,
            pole_eps: 1e-9,
        }
    }
}

/// Bare mode frequencies and coupling rate after circuit reduction, rad/s.
///
/// Invariant (enforced by [`ModeParams::new`]): omega_l, omega_r > 0 and
/// |g| < sqrt(omega_l * omega_r) / 2, so the quadratic Hamiltonian is
/// positive definite and both normal-mode frequencies are real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeParams {
    pub omega_l: f64,
    pub omega_r: f64,
    /// Signed coupling rate. Negative values are legitimate; only the
    /// magnitude is bounded by stability.
    pub g: f64,
}

impl ModeParams {
    pub fn new(omega_l: f64, omega_r: f64, g: f64) -> Result<Self> {
        if !(omega_l.is_finite() && omega_r.is_finite() && g.is_finite()) {
            return Err(Error::Instability {
                reason: "non-finite mode parameters".into(),
            });
        }
        if omega_l <= 0.0 || omega_r <= 0.0 {
            return Err(Error::Instability {
                reason: format!(
                    "non-positive mode frequency (omega_l = {omega_l:.3e}, omega_r = {omega_r:.3e})"
                ),
            });
        }
        let bound = 0.5 * (omega_l * omega_r).sqrt();
        if g.abs() >= bound {
            return Err(Error::Instability {
                reason: format!(
                    "|g| = {:.6e} exceeds the ultrastrong-coupling bound sqrt(omega_l omega_r)/2 = {:.6e}",
                    g.abs(),
                    bound
                ),
            });
        }
        Ok(ModeParams { omega_l, omega_r, g })
    }

    /// Stability margin sqrt(omega_l * omega_r)/2 - |g|, positive by construction.
    pub fn stability_margin(&self) -> f64 {
        0.5 * (self.omega_l * self.omega_r).sqrt() - self.g.abs()
    }
}

impl CircuitParams {
    /// Flux-dependent junction branch inductance
    /// L_J(phi) = L_J0 / (cos(phi) - delta) + L_0.
    ///
    /// Diverges where cos(phi) = delta; fluxes inside the `pole_eps` guard
    /// band are rejected. The result changes sign across the pole, which is
    /// fine: downstream formulas only ever use it inside a convergent
    /// correction term.
    pub fn junction_inductance(&self, phi: f64) -> Result<f64> {
        let c = phi.cos() - self.delta;
        if c.abs() < self.pole_eps {
            return Err(Error::PolePassage {
                phi_over_2pi: phi / std::f64::consts::TAU,
            });
        }
        Ok(self.l_j0 / c + self.l_0)
    }

    /// Loading correction L_sh^2 / (L_J(phi) + 2 L_sh) shared by the mutual
    /// and both resonator inductances.
    fn loading_correction(&self, phi: f64) -> Result<f64> {
        let series = self.junction_inductance(phi)? + 2.0 * self.l_sh;
        let corr = self.l_sh * self.l_sh / series;
        if !corr.is_finite() {
            return Err(Error::Instability {
                reason: "coupler branch series inductance vanished".into(),
            });
        }
        Ok(corr)
    }

    /// Effective mutual inductance M_eff(phi) = M_0 + L_sh^2 / (L_J + 2 L_sh).
    ///
    /// The correction term is bounded and continuous through the junction
    /// pole (where it crosses zero), so M_eff can cancel against M_0 at two
    /// flux points per period whenever M_0 is small enough.
    pub fn effective_mutual(&self, phi: f64) -> Result<f64> {
        Ok(self.m_0 + self.loading_correction(phi)?)
    }

    /// Reduce the network at flux `phi` to bare mode frequencies and the
    /// coupling rate.
    ///
    /// The same correction that builds M_eff also loads each resonator:
    /// L_m = L - corr, omega = 1/sqrt(L_m C). The coupling is the exact
    /// mutual-inductance rate g = M_eff sqrt(omega_l omega_r) / (2 sqrt(L_ml
    /// L_mr)); with loaded inductances in the denominator it respects the
    /// stability bound automatically whenever the inductance matrix is
    /// positive definite.
    pub fn mode_params(&self, phi: f64) -> Result<ModeParams> {
        let corr = self.loading_correction(phi)?;
        let l_ml = self.l_a - corr;
        let l_mr = self.l_b - corr;
        if l_ml <= 0.0 || l_mr <= 0.0 {
            return Err(Error::Instability {
                reason: format!(
                    "loaded inductance non-positive at phi/2pi = {:.6}",
                    phi / std::f64::consts::TAU
                ),
            });
        }
        let omega_l = 1.0 / (l_ml * self.c_a).sqrt();
        let omega_r = 1.0 / (l_mr * self.c_b).sqrt();
        let m_eff = self.m_0 + corr;
        let g = m_eff * (omega_l * omega_r).sqrt() / (2.0 * (l_ml * l_mr).sqrt());
        ModeParams::new(omega_l, omega_r, g)
    }

    /// Closed-form zero-coupling fluxes: solutions of M_eff(phi) = 0.
    ///
    /// Returns the two roots in [0, 2 pi), increasing; they are mirror
    /// images about phi = pi. Fails with [`Error::NoRoot`] when M_0 is too
    /// large for the correction to cancel it.
    pub fn zero_coupling_flux(&self) -> Result<(f64, f64)> {
        // M_eff = 0  <=>  L_J + 2 L_sh = -L_sh^2 / M_0, solved for cos(phi).
        let arg = self.delta - self.l_j0 / (self.l_sh * self.l_sh / self.m_0 + 2.0 * self.l_sh + self.l_0);
        if !(-1.0..=1.0).contains(&arg) {
            return Err(Error::NoRoot { arg });
        }
        let phi1 = arg.acos();
        let phi2 = (std::f64::consts::TAU - phi1) % std::f64::consts::TAU;
        if phi1 <= phi2 {
            Ok((phi1, phi2))
        } else {
            Ok((phi2, phi1))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{RngExt, SeedableRng};
    use std::f64::consts::TAU;

    #[test]
    fn junction_inductance_at_reference_fluxes() {
        let p = CircuitParams::default();
        // cos(0) - delta = 0.947
        let expect0 = 1.210e-9 / (1.0 - 0.053) + 0.177e-9;
        assert!((p.junction_inductance(0.0).unwrap() - expect0).abs() < 1e-24);
        // cos(pi/2) = 0 exactly would need phi = pi/2 with cos round-off; use the formula value
        let phi = std::f64::consts::FRAC_PI_2;
        let expect = 1.210e-9 / (phi.cos() - 0.053) + 0.177e-9;
        assert_eq!(p.junction_inductance(phi).unwrap(), expect);
    }

    #[test]
    fn junction_inductance_is_periodic() {
        let p = CircuitParams::default();
        let mut rng = StdRng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 100 {
            let phi: f64 = rng.random_range(0.0..TAU);
            if (phi.cos() - p.delta).abs() < 0.05 {
                continue; // stay off the pole, where round-off is amplified
            }
            let a = p.junction_inductance(phi).unwrap();
            let b = p.junction_inductance(phi + TAU).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-12));
            checked += 1;
        }
    }

    #[test]
    fn pole_is_rejected() {
        let p = CircuitParams::default();
        let phi = (p.delta).acos();
        match p.junction_inductance(phi) {
            Err(Error::PolePassage { phi_over_2pi }) => {
                assert!((phi_over_2pi - phi / TAU).abs() < 1e-15);
            }
            other => panic!("expected pole rejection, got {other:?}"),
        }
        // Just outside the guard band it evaluates.
        let off = (p.delta + 1e-6).acos();
        assert!(p.junction_inductance(off).is_ok());
    }

    #[test]
    fn mutual_vanishes_at_closed_form_roots() {
        let p = CircuitParams::default();
        let (r1, r2) = p.zero_coupling_flux().unwrap();
        for r in [r1, r2] {
            let m = p.effective_mutual(r).unwrap();
            assert!(m.abs() < 1e-15 * p.m_0, "M_eff({r}) = {m:e}");
        }
        assert!((r1 + r2 - TAU).abs() < 1e-12);
        // Known device values put the roots near 0.375 and 0.625 flux quanta.
        assert!((r1 / TAU - 0.375085222722).abs() < 1e-9);
        assert!((r2 / TAU - 0.624914777278).abs() < 1e-9);
    }

    #[test]
    fn mutual_sign_flips_between_zero_and_pi() {
        let p = CircuitParams::default();
        assert!(p.effective_mutual(0.0).unwrap() > 0.0);
        assert!(p.effective_mutual(std::f64::consts::PI).unwrap() < 0.0);
    }

    #[test]
    fn no_shunt_means_static_mutual_and_bare_frequencies() {
        let p = CircuitParams {
            l_sh: 0.0,
            ..CircuitParams::default()
        };
        for phi in [0.1, 1.0, 2.5, 4.0] {
            let m = p.effective_mutual(phi).unwrap();
            assert_eq!(m, p.m_0);
            let mp = p.mode_params(phi).unwrap();
            assert!((mp.omega_l - 1.0 / (p.l_a * p.c_a).sqrt()).abs() < 1e-3);
            assert!((mp.omega_r - 1.0 / (p.l_b * p.c_b).sqrt()).abs() < 1e-3);
        }
    }

    #[test]
    fn mode_params_match_step_by_step_evaluation() {
        // Independent re-derivation of every intermediate at one flux point.
        let p = CircuitParams::default();
        let phi = 0.3 * TAU;
        let lj = 1.210e-9 / ((0.3f64 * TAU).cos() - 0.053) + 0.177e-9;
        let corr = 0.446e-9 * 0.446e-9 / (lj + 2.0 * 0.446e-9);
        let l_ml = 2.023e-9 - corr;
        let l_mr = 2.023e-9 - corr;
        let wl = 1.0 / (l_ml * 42.3e-15).sqrt();
        let wr = 1.0 / (l_mr * 18.27e-15).sqrt();
        let g = (0.381e-9 + corr) * (wl * wr).sqrt() / (2.0 * (l_ml * l_mr).sqrt());
        let mp = p.mode_params(phi).unwrap();
        assert!((mp.omega_l - wl).abs() <= 1e-12 * wl);
        assert!((mp.omega_r - wr).abs() <= 1e-12 * wr);
        assert!((mp.g - g).abs() <= 1e-12 * g.abs());
    }

    #[test]
    fn default_device_is_stable_across_a_full_period() {
        let p = CircuitParams::default();
        let n = 2001;
        let mut poles = 0;
        for k in 0..n {
            let phi = TAU * k as f64 / (n - 1) as f64;
            match p.mode_params(phi) {
                Ok(mp) => assert!(mp.stability_margin() > 0.0),
                Err(Error::PolePassage { .. }) => poles += 1,
                Err(e) => panic!("unexpected failure at phi = {phi}: {e}"),
            }
        }
        // The guard band is far narrower than this grid spacing.
        assert_eq!(poles, 0);
    }

    #[test]
    fn coupling_is_symmetric_about_pi() {
        let p = CircuitParams::default();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let phi: f64 = rng.random_range(0.01..TAU - 0.01);
            let (Ok(a), Ok(b)) = (p.mode_params(phi), p.mode_params(TAU - phi)) else {
                continue;
            };
            assert!((a.g - b.g).abs() <= 1e-9 * a.g.abs().max(1e-3));
            assert!((a.omega_l - b.omega_l).abs() <= 1e-9 * a.omega_l);
        }
    }

    #[test]
    fn zero_coupling_matches_bisection_of_the_mutual() {
        let p = CircuitParams::default();
        let (r1, _) = p.zero_coupling_flux().unwrap();
        // Bracket the first root by scanning M_eff on (0, pi).
        let mut lo = 0.0f64;
        let mut hi = std::f64::consts::PI;
        let f = |phi: f64| p.effective_mutual(phi).unwrap();
        let n = 1024;
        for k in 0..n {
            let a = lo + (hi - lo) * k as f64 / n as f64;
            let b = lo + (hi - lo) * (k + 1) as f64 / n as f64;
            if f(a).signum() != f(b).signum() {
                lo = a;
                hi = b;
                break;
            }
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(lo).signum() == f(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((0.5 * (lo + hi) - r1).abs() < 1e-9);
    }

    #[test]
    fn oversized_static_mutual_has_no_zero_crossing() {
        // The correction term is bounded; a big enough M_0 can never be
        // cancelled, and the closed form reports that instead of a root.
        let p = CircuitParams {
            m_0: 5e-9,
            ..CircuitParams::default()
        };
        match p.zero_coupling_flux() {
            Err(Error::NoRoot { arg }) => assert!(arg < -1.0),
            other => panic!("expected NoRoot, got {other:?}"),
        }
        // And indeed M_eff keeps one sign over a dense grid.
        for k in 0..2000 {
            let phi = TAU * (k as f64 + 0.5) / 2000.0;
            if let Ok(m) = p.effective_mutual(phi) {
                assert!(m > 0.0);
            }
        }
    }

    #[test]
    fn instability_bound_is_enforced() {
        assert!(ModeParams::new(1.0, 1.0, 0.499).is_ok());
        match ModeParams::new(1.0, 1.0, 0.5) {
            Err(Error::Instability { .. }) => {}
            other => panic!("expected instability, got {other:?}"),
        }
        assert!(ModeParams::new(1.0, 4.0, -0.99).is_ok());
        assert!(ModeParams::new(1.0, 4.0, -1.01).is_err());
        assert!(ModeParams::new(0.0, 1.0, 0.0).is_err());
        assert!(ModeParams::new(f64::NAN, 1.0, 0.0).is_err());
    }
}
