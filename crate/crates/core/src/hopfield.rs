//! Normal modes of the coupled-resonator Hamiltonian.
//!
//! With annihilation operators a (left) and b (right), the reduced circuit
//! Hamiltonian is
//!
//!   H = omega_l a'a + omega_r b'b - g (a' - a)(b' - b)
//!
//! (primes denote daggers). Because the coupling is position-position, the
//! diagonalizing Bogoliubov transformation mixes annihilation and creation
//! operators: each polariton annihilation operator is
//!
//!   p_j = w_j a + x_j b + y_j a' + z_j b',    j in {+, -}
//!
//! with real coefficients normalized to w^2 + x^2 - y^2 - z^2 = 1 so that
//! [p_j, p_j'] = 1. The coefficient vectors are eigenvectors of a 4x4
//! dynamical matrix whose spectrum is {+omega_+, +omega_-, -omega_+,
//! -omega_-}; we extract the two positive-frequency vectors by a null-space
//! computation, which stays accurate arbitrarily close to the zero-coupling
//! point where perturbative forms degrade.

use crate::circuit::ModeParams;
use crate::error::{Error, Result};
use nalgebra::{Matrix4, Vector4};

/// Bogoliubov coefficients (w, x, y, z) of one polariton mode.
///
/// Sign convention: w > 0 (or x > 0 if w vanishes). The quadrature weights
/// below are the combinations that enter the bath couplings and the
/// quadrature transformation; for mode j the left position quadrature
/// carries weight w - y and the left momentum quadrature w + y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ModeCoefficients {
    /// Symplectic norm w^2 + x^2 - y^2 - z^2; exactly 1 for a properly
    /// normalized annihilation-type mode.
    pub fn symplectic_norm(&self) -> f64 {
        self.w * self.w + self.x * self.x - self.y * self.y - self.z * self.z
    }

    /// Coefficient of this mode's position quadrature in the left resonator
    /// position (the left bath coupling amplitude).
    pub fn left_weight(&self) -> f64 {
        self.w - self.y
    }

    /// Coefficient in the right resonator position.
    pub fn right_weight(&self) -> f64 {
        self.x - self.z
    }

    /// Momentum-quadrature counterpart of [`left_weight`](Self::left_weight).
    pub fn left_momentum_weight(&self) -> f64 {
        self.w + self.y
    }

    pub fn right_momentum_weight(&self) -> f64 {
        self.x + self.z
    }
}

/// The two positive-frequency normal modes, omega_plus >= omega_minus > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolaritonBasis {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub plus: ModeCoefficients,
    pub minus: ModeCoefficients,
}

/// Normal-mode frequencies, rad/s.
///
/// omega_{+/-}^2 = (omega_l^2 + omega_r^2 +/- d) / 2 with
/// d = sqrt((omega_l^2 - omega_r^2)^2 + 16 g^2 omega_l omega_r). The lower
/// branch is evaluated through the product form
/// omega_-^2 = 2 omega_l omega_r (omega_l omega_r - 4 g^2) / (s + d)
/// to avoid the catastrophic cancellation of (s - d)/2 near the instability.
pub fn polariton_frequencies(mp: &ModeParams) -> Result<(f64, f64)> {
    let (wl, wr, g) = (mp.omega_l, mp.omega_r, mp.g);
    let s = wl * wl + wr * wr;
    let diff = wl * wl - wr * wr;
    let d = (diff * diff + 16.0 * g * g * wl * wr).sqrt();
    let prod = wl * wr - 4.0 * g * g;
    if prod <= 0.0 || !prod.is_finite() {
        return Err(Error::Instability {
            reason: format!("omega_l omega_r - 4 g^2 = {prod:.6e} is not positive"),
        });
    }
    let omega_plus = (0.5 * (s + d)).sqrt();
    let omega_minus = (2.0 * wl * wr * prod / (s + d)).sqrt();
    Ok((omega_plus, omega_minus))
}

/// Dynamical matrix of H in the ordered operator basis (a, b, a', b').
///
/// A coefficient vector (w, x, y, z) of a normal-mode annihilation operator
/// satisfies [p, H] = omega p exactly when it is an eigenvector of this
/// matrix with eigenvalue omega; eigenvalues come in +/- pairs.
pub fn hopfield_matrix(mp: &ModeParams) -> Matrix4<f64> {
    let (wl, wr, g) = (mp.omega_l, mp.omega_r, mp.g);
    Matrix4::new(
        wl, g, 0.0, g, //
        g, wr, g, 0.0, //
        0.0, -g, -wl, -g, //
        -g, 0.0, -g, -wr,
    )
}

const DEGENERACY_EPS: f64 = 1e-12;

/// Solve for both positive-frequency modes.
///
/// Errors with [`Error::DegenerateBasis`] when the modes are uncoupled and
/// degenerate (g = 0 with omega_l = omega_r), where no preferred basis
/// exists, and with [`Error::Instability`] when the Hamiltonian has no real
/// normal modes.
pub fn hopfield_coefficients(mp: &ModeParams) -> Result<PolaritonBasis> {
    let (omega_plus, omega_minus) = polariton_frequencies(mp)?;
    let scale = mp.omega_l.max(mp.omega_r);
    if mp.g.abs() <= DEGENERACY_EPS * scale
        && (mp.omega_l - mp.omega_r).abs() <= DEGENERACY_EPS * scale
    {
        return Err(Error::DegenerateBasis);
    }
    let m = hopfield_matrix(mp);
    let plus = mode_vector(&m, omega_plus)?;
    let minus = mode_vector(&m, omega_minus)?;
    Ok(PolaritonBasis {
        omega_plus,
        omega_minus,
        plus,
        minus,
    })
}

/// Null vector of (M - omega I), normalized to the symplectic metric.
fn mode_vector(m: &Matrix4<f64>, omega: f64) -> Result<ModeCoefficients> {
    let shifted = m - Matrix4::identity() * omega;
    let svd = shifted.svd(false, true);
    let sv = &svd.singular_values;
    let mut k = 0;
    for i in 1..4 {
        if sv[i] < sv[k] {
            k = i;
        }
    }
    let v_t = svd.v_t.expect("v_t requested");
    let v: Vector4<f64> = v_t.row(k).transpose();

    // v has unit Euclidean norm, so the residual scales with the matrix norm.
    let residual = (shifted * v).norm();
    if residual > 1e-10 * m.norm() {
        return Err(Error::NotConverged {
            reason: format!(
                "normal-mode residual {residual:.3e} exceeds tolerance at omega = {omega:.6e}"
            ),
        });
    }

    let norm = v[0] * v[0] + v[1] * v[1] - v[2] * v[2] - v[3] * v[3];
    // Positive-frequency eigenvectors have positive symplectic norm; losing
    // that means the +/- subspaces have mixed, i.e. near-degeneracy.
    if norm <= 1e-8 {
        return Err(Error::DegenerateBasis);
    }
    let s = 1.0 / norm.sqrt();
    let mut c = ModeCoefficients {
        w: v[0] * s,
        x: v[1] * s,
        y: v[2] * s,
        z: v[3] * s,
    };
    let flip = if c.w != 0.0 { c.w < 0.0 } else { c.x < 0.0 };
    if flip {
        c = ModeCoefficients {
            w: -c.w,
            x: -c.x,
            y: -c.y,
            z: -c.z,
        };
    }
    Ok(c)
}
