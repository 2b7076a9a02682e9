//! Gaussian state of the resonator pair and its entanglement.
//!
//! The steady state is Gaussian: each polariton is an independent thermal
//! mode, so in the polariton quadrature basis (d_+, f_+, d_-, f_-) the
//! covariance matrix is diagonal with entries n_j + 1/2 (vacuum = 1/2,
//! quadratures x = (a + a')/sqrt2, p = i(a' - a)/sqrt2). Mapping back to the
//! lab basis (x_L, p_L, x_R, p_R) is a symplectic congruence Gamma_lab =
//! S Gamma_pol S^t, and the entanglement between the two resonators is the
//! logarithmic negativity computed from the smaller symplectic eigenvalue of
//! the partially transposed covariance matrix.
//!
//! Symplectic eigenvalues are taken from the spectrum of Omega Gamma
//! (eigenvalues +/- i nu) rather than from the quartic invariants: the
//! invariant route cancels catastrophically when the two eigenvalues
//! coincide, which is exactly the near-vacuum regime a cold valve lives in.

use crate::circuit::ModeParams;
use crate::error::{Error, Result};
use crate::hopfield::PolaritonBasis;
use nalgebra::{Complex, Matrix4, Vector4};

/// Covariance of two uncorrelated thermal polaritons.
pub fn polariton_covariance(occ_plus: f64, occ_minus: f64) -> Result<Matrix4<f64>> {
    if !(occ_plus.is_finite() && occ_minus.is_finite()) || occ_plus < 0.0 || occ_minus < 0.0 {
        return Err(Error::Unphysical {
            reason: format!("negative or non-finite occupation ({occ_plus}, {occ_minus})"),
        });
    }
    Ok(Matrix4::from_diagonal(&Vector4::new(
        occ_plus + 0.5,
        occ_plus + 0.5,
        occ_minus + 0.5,
        occ_minus + 0.5,
    )))
}

/// Quadrature transformation for complex Bogoliubov coefficients, rows
/// ordered (x_L, p_L, x_R, p_R), columns (d_+, f_+, d_-, f_-).
///
/// With p_j = w_j a + x_j b + y_j a' + z_j b' and the completeness relation
/// a = sum_j (conj(w_j) p_j - y_j p_j'), the lab quadratures come out as
/// x_L = sum_j [Re(W_j) d_j + Im(W_j) f_j], W_j = w_j - y_j, and
/// p_L = sum_j [-Im(U_j) d_j + Re(U_j) f_j], U_j = w_j + y_j (same with
/// X_j = x_j - z_j, V_j = x_j + z_j on the right). The real-coefficient case
/// used by the rest of the crate is the Im = 0 specialization, but the
/// builder keeps the general form so complex bases work too.
pub fn transform_matrix_general(modes: &[[Complex<f64>; 4]; 2]) -> Matrix4<f64> {
    let mut s = Matrix4::zeros();
    for (j, m) in modes.iter().enumerate() {
        let [w, x, y, z] = *m;
        let big_w = w - y;
        let big_u = w + y;
        let big_x = x - z;
        let big_v = x + z;
        s[(0, 2 * j)] = big_w.re;
        s[(0, 2 * j + 1)] = big_w.im;
        s[(1, 2 * j)] = -big_u.im;
        s[(1, 2 * j + 1)] = big_u.re;
        s[(2, 2 * j)] = big_x.re;
        s[(2, 2 * j + 1)] = big_x.im;
        s[(3, 2 * j)] = -big_v.im;
        s[(3, 2 * j + 1)] = big_v.re;
    }
    s
}

/// Quadrature transformation for a real polariton basis.
pub fn transform_matrix(basis: &PolaritonBasis) -> Matrix4<f64> {
    let c = |m: &crate::hopfield::ModeCoefficients| {
        [
            Complex::new(m.w, 0.0),
            Complex::new(m.x, 0.0),
            Complex::new(m.y, 0.0),
            Complex::new(m.z, 0.0),
        ]
    };
    transform_matrix_general(&[c(&basis.plus), c(&basis.minus)])
}

/// Lab-frame covariance Gamma_lab = S Gamma_pol S^t.
pub fn lab_covariance(gamma_polariton: &Matrix4<f64>, s: &Matrix4<f64>) -> Matrix4<f64> {
    s * gamma_polariton * s.transpose()
}

/// The symplectic form on (x_L, p_L, x_R, p_R).
pub fn symplectic_form() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

/// Symplectic eigenvalues of a two-mode covariance matrix, smaller first.
/// Physical states have both >= 1/2.
///
/// Omega Gamma is similar to a skew-symmetric matrix whenever Gamma is
/// positive definite, so its spectrum is +/- i nu to machine precision; a
/// real part beyond round-off means the input was not a covariance matrix.
pub fn symplectic_eigenvalues(gamma: &Matrix4<f64>) -> Result<(f64, f64)> {
    let scale = gamma.norm();
    if !scale.is_finite() || scale == 0.0 {
        return Err(Error::Unphysical {
            reason: "covariance matrix is zero or non-finite".into(),
        });
    }
    let eigs = (symplectic_form() * gamma).complex_eigenvalues();
    let mut nus = [0.0f64; 4];
    for (k, e) in eigs.iter().enumerate() {
        if e.re.abs() > 1e-9 * scale {
            return Err(Error::NumericalBranch { value: e.re });
        }
        nus[k] = e.im.abs();
    }
    nus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // The four values are two conjugate pairs; average each pair.
    Ok((0.5 * (nus[0] + nus[1]), 0.5 * (nus[2] + nus[3])))
}

/// Logarithmic negativity between the two lab modes (natural log).
///
/// Rejects covariance matrices whose physical symplectic eigenvalues fall
/// below 1/2 beyond round-off: "entanglement" of an unphysical state would
/// be meaningless.
pub fn logarithmic_negativity(gamma_lab: &Matrix4<f64>) -> Result<f64> {
    let (nu_min, _) = symplectic_eigenvalues(gamma_lab)?;
    if nu_min < 0.5 - 1e-12 * gamma_lab.norm().max(1.0) {
        return Err(Error::Unphysical {
            reason: format!("symplectic eigenvalue {nu_min} below the vacuum floor"),
        });
    }
    // Partial transposition on the right mode flips the sign of p_R.
    let p = Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, 1.0, -1.0));
    let (nu_pt, _) = symplectic_eigenvalues(&(p * gamma_lab * p))?;
    Ok((-(2.0 * nu_pt).ln()).max(0.0))
}

/// How far S^t V S is from diagonalizing the quadratic form: V is the
/// Hamiltonian matrix in lab quadratures (including the 2 g p_L p_R
/// coupling), and a correct basis maps it to diag(omega_+, omega_+,
/// omega_-, omega_-). Returns the largest absolute deviation, rad/s.
pub fn reconstruction_residual(mp: &ModeParams, basis: &PolaritonBasis) -> f64 {
    let s = transform_matrix(basis);
    let v = Matrix4::new(
        mp.omega_l, 0.0, 0.0, 0.0, //
        0.0, mp.omega_l, 0.0, 2.0 * mp.g, //
        0.0, 0.0, mp.omega_r, 0.0, //
        0.0, 2.0 * mp.g, 0.0, mp.omega_r,
    );
    let a = s.transpose() * v * s;
    let target = [
        basis.omega_plus,
        basis.omega_plus,
        basis.omega_minus,
        basis.omega_minus,
    ];
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { target[i] } else { 0.0 };
            worst = worst.max((a[(i, j)] - want).abs());
        }
    }
    worst
}

/// Covariance of a two-mode squeezed vacuum with squeezing parameter r,
/// whose logarithmic negativity is exactly 2 r. Kept public as a reference
/// state for tests and benchmarks.
pub fn two_mode_squeezed_covariance(r: f64) -> Matrix4<f64> {
    let c = 0.5 * (2.0 * r).cosh();
    let s = 0.5 * (2.0 * r).sinh();
    Matrix4::new(
        c, 0.0, s, 0.0, //
        0.0, c, 0.0, -s, //
        s, 0.0, c, 0.0, //
        0.0, -s, 0.0, c,
    )
}
