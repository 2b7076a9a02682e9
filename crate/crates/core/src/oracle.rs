//! Independent check of the rate-equation results: solve the full Lindblad
//! master equation in a truncated two-mode Fock space and read the same
//! observables off the density matrix.
//!
//! The master equation uses the secular dissipators the rate equations are
//! derived from, one absorption and one emission channel per mode per bath,
//!
//!   drho/dt = sum_j,b Gamma_up(j,b) D[p_j'] rho + Gamma_down(j,b) D[p_j] rho
//!
//! with Gamma_up = zeta_b(omega_j) N_b(omega_j) weight_b(j) and Gamma_down
//! the same with N + 1. There is no Hamiltonian commutator: in the polariton
//! Fock basis it would only rotate coherence sectors that carry no
//! population, and dropping it keeps the Liouvillian real. Agreement between
//! this solver and the closed-form rate equations is a genuine cross-check
//! because the two evolve entirely different representations (a sparse
//! operator-space kernel problem here, four scalar balance equations there).
//!
//! The steady state is found from the Liouvillian's null space. The sparse
//! matrix splits into independent blocks (connected components of its
//! nonzero pattern; for two modes at cutoff c there are (2c - 1)^2 of them),
//! discovered with a union-find pass rather than assumed, so each block gets
//! a small dense SVD instead of one 20k x 20k factorization. A long-time
//! integrator is kept as a fallback solver and as a consistency test.

use crate::bath::RateSet;
use crate::error::{Error, Result};
use crate::gaussian::logarithmic_negativity;
use crate::point::PointReport;
use crate::steady_state::gross_heat_scale;
use nalgebra::{DMatrix, Matrix4};
use petgraph::unionfind::UnionFind;
use std::collections::BTreeMap;

/// Hard cap on the per-mode Fock cutoff; the superoperator has cutoff^4
/// entries on its diagonal alone.
pub const MAX_CUTOFF: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Exact null space of the Liouvillian, block by block.
    NullSpace,
    /// Fourth-order Runge-Kutta integration to stationarity.
    LongTimeIntegration,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Fock states kept per mode.
    pub cutoff: usize,
    pub solver: SolverKind,
    /// Bound on the stationarity residual |L rho| / rate_scale, and the
    /// stopping criterion of the integrator.
    pub convergence_tol: f64,
    /// Step budget for the integrator.
    pub max_steps: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            cutoff: 12,
            solver: SolverKind::NullSpace,
            convergence_tol: 1e-10,
            max_steps: 400_000,
        }
    }
}

impl OracleConfig {
    pub fn with_cutoff(cutoff: usize) -> Self {
        OracleConfig {
            cutoff,
            ..OracleConfig::default()
        }
    }
}

/// Minimal CSR matrix: just what a Liouvillian needs (assembly from
/// triplets with duplicate merging, matvec, row access).
struct Csr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl Csr {
    fn from_triplets(dim: usize, mut trip: Vec<(u32, u32, f64)>) -> Csr {
        trip.sort_unstable_by_key(|&(r, c, _)| ((r as u64) << 32) | c as u64);
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols: Vec<u32> = Vec::with_capacity(trip.len());
        let mut vals: Vec<f64> = Vec::with_capacity(trip.len());
        let mut last = None;
        for (r, c, v) in trip {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r as usize + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Csr {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    fn row(&self, r: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        self.cols[lo..hi]
            .iter()
            .copied()
            .zip(self.vals[lo..hi].iter().copied())
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        for r in 0..self.dim {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            y[r] = acc;
        }
    }

    fn diag(&self, r: usize) -> f64 {
        self.row(r)
            .find(|&(c, _)| c as usize == r)
            .map(|(_, v)| v)
            .unwrap_or(0.0)
    }

    fn max_abs_diag(&self) -> f64 {
        (0..self.dim).fold(0.0f64, |m, r| m.max(self.diag(r).abs()))
    }
}

/// Annihilation operator of one mode on the product space, as triplets.
/// Basis index is n_plus * cutoff + n_minus.
fn lowering(cutoff: usize, mode: usize) -> Vec<(u32, u32, f64)> {
    let d = cutoff;
    let mut out = Vec::with_capacity(d * (d - 1));
    for np in 0..d {
        for nm in 0..d {
            let col = (np * d + nm) as u32;
            match mode {
                0 if np > 0 => out.push((((np - 1) * d + nm) as u32, col, (np as f64).sqrt())),
                1 if nm > 0 => out.push(((np * d + nm - 1) as u32, col, (nm as f64).sqrt())),
                _ => {}
            }
        }
    }
    out
}

fn transpose(trip: &[(u32, u32, f64)]) -> Vec<(u32, u32, f64)> {
    trip.iter().map(|&(r, c, v)| (c, r, v)).collect()
}

/// Append the jump part of rate * D[c] in column-major vectorization
/// (A rho B becomes B^T (x) A, so c rho c^T lands at (m + n h, s + t h) with
/// value c_ms c_nt), and accumulate the anticommutator diagonal into `damp`.
fn push_dissipator(
    h: usize,
    c: &[(u32, u32, f64)],
    rate: f64,
    out: &mut Vec<(u32, u32, f64)>,
    damp: &mut [f64],
) {
    if rate == 0.0 {
        return;
    }
    let h32 = h as u32;
    for &(m, s, a) in c {
        for &(n, t, b) in c {
            out.push((m + n * h32, s + t * h32, rate * a * b));
        }
    }
    for &(_, s, a) in c {
        damp[s as usize] += rate * a * a;
    }
}

/// One bath's superoperator: absorption plus emission for both modes, with
/// the four anticommutator diagonals merged into a single pass.
fn bath_superop(
    h: usize,
    lowers: &[Vec<(u32, u32, f64)>; 2],
    raises: &[Vec<(u32, u32, f64)>; 2],
    up_rates: [f64; 2],
    down_rates: [f64; 2],
) -> Vec<(u32, u32, f64)> {
    let mut out = Vec::new();
    let mut damp = vec![0.0f64; h];
    for j in 0..2 {
        push_dissipator(h, &raises[j], up_rates[j], &mut out, &mut damp);
        push_dissipator(h, &lowers[j], down_rates[j], &mut out, &mut damp);
    }
    let h32 = h as u32;
    for m in 0..h as u32 {
        for n in 0..h as u32 {
            let v = -0.5 * (damp[m as usize] + damp[n as usize]);
            if v != 0.0 {
                out.push((m + n * h32, m + n * h32, v));
            }
        }
    }
    out
}

/// Sparse Liouvillian with its per-bath pieces kept separate so heat
/// currents can be read off as Tr{H_S L_bath rho}.
pub struct Liouvillian {
    pub cutoff: usize,
    pub hilbert_dim: usize,
    pub omega_plus: f64,
    pub omega_minus: f64,
    /// Largest damping rate on the diagonal; the natural scale for
    /// residual norms and time steps.
    pub rate_scale: f64,
    full: Csr,
    left: Csr,
    right: Csr,
}

pub fn build_liouvillian(rates: &RateSet, cutoff: usize) -> Result<Liouvillian> {
    if !(2..=MAX_CUTOFF).contains(&cutoff) {
        return Err(Error::Validation {
            message: format!("oracle cutoff must lie in [2, {MAX_CUTOFF}], got {cutoff}"),
        });
    }
    let h = cutoff * cutoff;
    let lowers = [lowering(cutoff, 0), lowering(cutoff, 1)];
    let raises = [transpose(&lowers[0]), transpose(&lowers[1])];

    let up = |zeta: f64, occ: f64, weight: f64| zeta * occ * weight;
    let down = |zeta: f64, occ: f64, weight: f64| zeta * (occ + 1.0) * weight;
    let p = &rates.plus;
    let m = &rates.minus;
    for r in [p, m] {
        for v in [
            r.zeta_left,
            r.zeta_right,
            r.occ_left,
            r.occ_right,
            r.weight_left,
            r.weight_right,
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Validation {
                    message: format!("rates must be finite and non-negative, got {v}"),
                });
            }
        }
    }

    let left_trip = bath_superop(
        h,
        &lowers,
        &raises,
        [
            up(p.zeta_left, p.occ_left, p.weight_left),
            up(m.zeta_left, m.occ_left, m.weight_left),
        ],
        [
            down(p.zeta_left, p.occ_left, p.weight_left),
            down(m.zeta_left, m.occ_left, m.weight_left),
        ],
    );
    let right_trip = bath_superop(
        h,
        &lowers,
        &raises,
        [
            up(p.zeta_right, p.occ_right, p.weight_right),
            up(m.zeta_right, m.occ_right, m.weight_right),
        ],
        [
            down(p.zeta_right, p.occ_right, p.weight_right),
            down(m.zeta_right, m.occ_right, m.weight_right),
        ],
    );
    let mut full_trip = left_trip.clone();
    full_trip.extend_from_slice(&right_trip);

    let n = h * h;
    let full = Csr::from_triplets(n, full_trip);
    let left = Csr::from_triplets(n, left_trip);
    let right = Csr::from_triplets(n, right_trip);
    let rate_scale = full.max_abs_diag().max(f64::MIN_POSITIVE);
    Ok(Liouvillian {
        cutoff,
        hilbert_dim: h,
        omega_plus: p.omega,
        omega_minus: m.omega,
        rate_scale,
        full,
        left,
        right,
    })
}

/// Steady-state density matrix plus the diagnostics that certify it.
pub struct SteadyStateSolution {
    pub rho: DMatrix<f64>,
    /// |L vec(rho)|_inf / rate_scale after normalization.
    pub trace_residual: f64,
    /// Smallest eigenvalue of the symmetrized density matrix.
    pub min_eigenvalue: f64,
    /// Largest population of a top Fock level in either mode; measures
    /// whether the cutoff actually contained the state.
    pub leakage: f64,
}

pub fn steady_state_density(l: &Liouvillian, cfg: &OracleConfig) -> Result<SteadyStateSolution> {
    let v = match cfg.solver {
        SolverKind::NullSpace => null_space_vector(l)?,
        SolverKind::LongTimeIntegration => integrate_to_stationarity(l, cfg)?,
    };
    finalize(l, cfg, &v)
}

/// Kernel of the Liouvillian found block by block. Errors with
/// [`Error::DegenerateKernel`] unless the kernel is one-dimensional.
fn null_space_vector(l: &Liouvillian) -> Result<Vec<f64>> {
    let n = l.full.dim;
    let mut uf = UnionFind::<u32>::new(n);
    for r in 0..n {
        for (c, v) in l.full.row(r) {
            if c as usize != r && v != 0.0 {
                uf.union(r as u32, c);
            }
        }
    }
    let mut comps: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for k in 0..n {
        comps.entry(uf.find_mut(k as u32)).or_default().push(k as u32);
    }

    let mut kernel: Option<(Vec<u32>, Vec<f64>)> = None;
    let mut total = 0usize;
    for comp in comps.values() {
        if comp.len() == 1 {
            let r = comp[0] as usize;
            if l.full.diag(r).abs() <= 1e-10 * l.rate_scale {
                total += 1;
                kernel.get_or_insert((comp.clone(), vec![1.0]));
            }
            continue;
        }
        let k = comp.len();
        let mut local: BTreeMap<u32, usize> = BTreeMap::new();
        for (li, &g) in comp.iter().enumerate() {
            local.insert(g, li);
        }
        let mut a = vec![0.0f64; k * k];
        for (li, &g) in comp.iter().enumerate() {
            for (c, v) in l.full.row(g as usize) {
                if v == 0.0 {
                    continue;
                }
                // union-find closure guarantees the column is in this block
                let lj = local[&c];
                a[li + lj * k] = v;
            }
        }
        for vec in kernel_basis(k, &mut a, 1e-10) {
            total += 1;
            if kernel.is_none() {
                kernel = Some((comp.clone(), vec));
            }
        }
    }
    if total != 1 {
        return Err(Error::DegenerateKernel { dim: total });
    }
    let (comp, coeffs) = kernel.expect("total == 1");
    let mut v = vec![0.0f64; n];
    for (&g, &c) in comp.iter().zip(coeffs.iter()) {
        v[g as usize] = c;
    }
    Ok(v)
}

/// Kernel basis of a square matrix (column-major in `a`, which is
/// destroyed) via Householder QR with column pivoting. Direct rather than
/// iterative: the blocks this runs on are exactly singular by construction,
/// which iterative SVD handles slowly. Columns whose remaining norm falls
/// below `drop_tol` times the first pivot are declared rank-deficient; each
/// yields one kernel vector by back-substitution.
fn kernel_basis(n: usize, a: &mut [f64], drop_tol: f64) -> Vec<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rank = n;
    let mut first_pivot = 0.0f64;
    for k in 0..n {
        // pivot on the column with the largest remaining norm, recomputed
        // exactly (downdating formulas lose accuracy near rank boundaries)
        let mut jmax = k;
        let mut nmax = -1.0f64;
        for j in k..n {
            let s: f64 = a[(k + j * n)..((j + 1) * n)].iter().map(|x| x * x).sum();
            if s > nmax {
                nmax = s;
                jmax = j;
            }
        }
        let pivot = nmax.max(0.0).sqrt();
        if k == 0 {
            first_pivot = pivot;
        }
        if pivot <= drop_tol * first_pivot {
            rank = k;
            break;
        }
        if jmax != k {
            for i in 0..n {
                a.swap(i + k * n, i + jmax * n);
            }
            perm.swap(k, jmax);
        }
        // Householder reflector taking column k's tail onto e_k
        let x0 = a[k + k * n];
        let alpha = if x0 >= 0.0 { -pivot } else { pivot };
        let mut v = vec![0.0f64; n - k];
        v[0] = x0 - alpha;
        v[1..].copy_from_slice(&a[(k + 1 + k * n)..((k + 1) * n)]);
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        a[k + k * n] = alpha;
        for i in k + 1..n {
            a[i + k * n] = 0.0;
        }
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k + 1..n {
            let col = &mut a[(k + j * n)..((j + 1) * n)];
            let dot: f64 = v.iter().zip(col.iter()).map(|(p, q)| p * q).sum();
            let scale = 2.0 * dot / vnorm2;
            for (p, q) in v.iter().zip(col.iter_mut()) {
                *q -= scale * p;
            }
        }
    }
    // one kernel vector per column beyond the numerical rank
    let mut basis = Vec::with_capacity(n - rank);
    for j in rank..n {
        let mut y = vec![0.0f64; rank];
        for i in (0..rank).rev() {
            let mut s = -a[i + j * n];
            for (l, yl) in y.iter().enumerate().skip(i + 1) {
                s -= a[i + l * n] * yl;
            }
            y[i] = s / a[i + i * n];
        }
        let mut z = vec![0.0f64; n];
        for (i, yi) in y.iter().enumerate() {
            z[perm[i]] = *yi;
        }
        z[perm[j]] = 1.0;
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in z.iter_mut() {
            *x /= norm;
        }
        basis.push(z);
    }
    basis
}

/// RK4 relaxation from the maximally mixed state until |L v| stalls below
/// the tolerance.
fn integrate_to_stationarity(l: &Liouvillian, cfg: &OracleConfig) -> Result<Vec<f64>> {
    let n = l.full.dim;
    let h = l.hilbert_dim;
    let mut v = vec![0.0f64; n];
    for i in 0..h {
        v[i + i * h] = 1.0 / h as f64;
    }
    let dt = 0.5 / l.rate_scale;
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    for step in 0..cfg.max_steps {
        l.full.matvec(&v, &mut k1);
        if step % 25 == 0 {
            let res = k1.iter().fold(0.0f64, |m, x| m.max(x.abs())) / l.rate_scale;
            if res <= cfg.convergence_tol {
                return Ok(v);
            }
        }
        for i in 0..n {
            tmp[i] = v[i] + 0.5 * dt * k1[i];
        }
        l.full.matvec(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = v[i] + 0.5 * dt * k2[i];
        }
        l.full.matvec(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = v[i] + dt * k3[i];
        }
        l.full.matvec(&tmp, &mut k4);
        for i in 0..n {
            v[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        // the dissipators preserve trace exactly; renormalize anyway to stop
        // round-off drift from compounding over many steps
        let tr: f64 = (0..h).map(|i| v[i + i * h]).sum();
        if tr != 0.0 {
            for x in v.iter_mut() {
                *x /= tr;
            }
        }
    }
    Err(Error::NotConverged {
        reason: format!("integrator hit its budget of {} steps", cfg.max_steps),
    })
}

/// Turn a kernel vector into a certified density matrix.
fn finalize(l: &Liouvillian, cfg: &OracleConfig, v: &[f64]) -> Result<SteadyStateSolution> {
    let h = l.hilbert_dim;
    let mut rho = DMatrix::<f64>::zeros(h, h);
    for m in 0..h {
        for n in 0..h {
            rho[(m, n)] = v[m + n * h];
        }
    }
    let rho_t = rho.transpose();
    rho = (rho + rho_t) * 0.5;
    let trace = rho.trace();
    let scale = rho.abs().max();
    if trace.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Unphysical {
            reason: "kernel vector is traceless, not a state".into(),
        });
    }
    rho /= trace;

    let mut vec_rho = vec![0.0f64; h * h];
    for m in 0..h {
        for n in 0..h {
            vec_rho[m + n * h] = rho[(m, n)];
        }
    }
    let mut resid = vec![0.0f64; h * h];
    l.full.matvec(&vec_rho, &mut resid);
    let trace_residual = resid.iter().fold(0.0f64, |m, x| m.max(x.abs())) / l.rate_scale;
    if trace_residual > cfg.convergence_tol {
        return Err(Error::NotConverged {
            reason: format!("stationarity residual {trace_residual:.3e} above tolerance"),
        });
    }

    let min_eigenvalue = rho.clone().symmetric_eigen().eigenvalues.min();
    if min_eigenvalue < -1e-10 {
        return Err(Error::Unphysical {
            reason: format!("density matrix eigenvalue {min_eigenvalue:.3e} below zero"),
        });
    }

    let d = l.cutoff;
    let mut top_plus = 0.0;
    let mut top_minus = 0.0;
    for k in 0..d {
        top_plus += rho[((d - 1) * d + k, (d - 1) * d + k)];
        top_minus += rho[(k * d + (d - 1), k * d + (d - 1))];
    }
    let leakage = top_plus.max(top_minus);
    if leakage > 1e-6 {
        return Err(Error::NotConverged {
            reason: format!("top Fock level holds {leakage:.3e} of the population; raise the cutoff"),
        });
    }

    Ok(SteadyStateSolution {
        rho,
        trace_residual,
        min_eigenvalue,
        leakage,
    })
}

/// Observables read directly off the steady density matrix.
pub struct OracleObservables {
    pub occ_plus: f64,
    pub occ_minus: f64,
    /// Tr{H_S L_left rho}, rad^2/s^2.
    pub q_left: f64,
    pub q_right: f64,
    /// Covariance of the polariton quadratures reconstructed from second
    /// moments of the density matrix.
    pub gamma_polariton: Matrix4<f64>,
}

pub fn oracle_observables(l: &Liouvillian, sol: &SteadyStateSolution) -> OracleObservables {
    let h = l.hilbert_dim;
    let d = l.cutoff;
    let rho = &sol.rho;

    let mut occ_plus = 0.0;
    let mut occ_minus = 0.0;
    for np in 0..d {
        for nm in 0..d {
            let pop = rho[(np * d + nm, np * d + nm)];
            occ_plus += np as f64 * pop;
            occ_minus += nm as f64 * pop;
        }
    }

    // heat currents: energy-weighted trace of each bath's piece
    let mut vec_rho = vec![0.0f64; h * h];
    for m in 0..h {
        for n in 0..h {
            vec_rho[m + n * h] = rho[(m, n)];
        }
    }
    let mut work = vec![0.0f64; h * h];
    let energy = |i: usize| l.omega_plus * (i / d) as f64 + l.omega_minus * (i % d) as f64;
    let mut heat = |csr: &Csr| -> f64 {
        csr.matvec(&vec_rho, &mut work);
        (0..h).map(|i| energy(i) * work[i + i * h]).sum()
    };
    let q_left = heat(&l.left);
    let q_right = heat(&l.right);

    // quadrature second moments: d_j = (p_j + p_j^T)/sqrt2 is real symmetric
    // and f_j = i(p_j^T - p_j)/sqrt2 is i times a real antisymmetric A_j, so
    // with a real symmetric rho every d-f cross moment vanishes identically
    // and everything reduces to real matrix algebra.
    let dense = |trip: &[(u32, u32, f64)]| {
        let mut m = DMatrix::<f64>::zeros(h, h);
        for &(r, c, v) in trip {
            m[(r as usize, c as usize)] = v;
        }
        m
    };
    let sqrt_half = 0.5f64.sqrt();
    let mut gamma = Matrix4::<f64>::zeros();
    let lowers = [lowering(d, 0), lowering(d, 1)];
    let pos: Vec<DMatrix<f64>> = lowers
        .iter()
        .map(|t| {
            let p = dense(t);
            (&p + p.transpose()) * sqrt_half
        })
        .collect();
    let anti: Vec<DMatrix<f64>> = lowers
        .iter()
        .map(|t| {
            let p = dense(t);
            (p.transpose() - &p) * sqrt_half
        })
        .collect();
    let rho_pos: Vec<DMatrix<f64>> = pos.iter().map(|m| rho * m).collect();
    let rho_anti: Vec<DMatrix<f64>> = anti.iter().map(|m| rho * m).collect();
    let tr_prod = |a: &DMatrix<f64>, b: &DMatrix<f64>| -> f64 {
        let mut s = 0.0;
        for i in 0..h {
            for j in 0..h {
                s += a[(i, j)] * b[(j, i)];
            }
        }
        s
    };
    let mean: Vec<f64> = rho_pos.iter().map(|m| m.trace()).collect();
    for i in 0..2 {
        for j in 0..2 {
            // <d_i d_j + d_j d_i>/2 - <d_i><d_j>
            let dd = 0.5 * (tr_prod(&rho_pos[i], &pos[j]) + tr_prod(&rho_pos[j], &pos[i]))
                - mean[i] * mean[j];
            // f_i f_j = -A_i A_j, and <f_j> = 0 exactly for symmetric rho
            let ff = -0.5 * (tr_prod(&rho_anti[i], &anti[j]) + tr_prod(&rho_anti[j], &anti[i]));
            gamma[(2 * i, 2 * j)] = dd;
            gamma[(2 * i + 1, 2 * j + 1)] = ff;
        }
    }

    OracleObservables {
        occ_plus,
        occ_minus,
        q_left,
        q_right,
        gamma_polariton: gamma,
    }
}

/// One compared quantity.
pub struct ComparisonRow {
    pub name: &'static str,
    pub analytic: f64,
    pub oracle: f64,
    /// |a - o| / max(|a|, |o|), zero when both sit under the floor.
    pub rel_diff: f64,
    pub pass: bool,
}

pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub rel_tol: f64,
    pub pass: bool,
}

/// Compare a pipeline evaluation against the master-equation observables.
///
/// Comparisons are relative, floored so that quantities which are zero up to
/// numerical noise on both sides pass: occupations and entanglement at 1e-9
/// absolute, heat currents at 1e-12 of the gross one-way flow (the net
/// current is a near-cancellation of absorption against emission, so its
/// relative error is meaningless once the cancellation is complete).
pub fn compare(
    point: &PointReport,
    obs: &OracleObservables,
    rel_tol: f64,
) -> Result<ComparisonReport> {
    let gamma_lab = point.transform * obs.gamma_polariton * point.transform.transpose();
    let e_n_oracle = logarithmic_negativity(&gamma_lab)?;
    let heat_floor = 1e-12 * gross_heat_scale(&point.rates);
    let rows_spec: [(&'static str, f64, f64, f64); 5] = [
        ("occ_plus", point.steady.occ_plus, obs.occ_plus, 1e-9),
        ("occ_minus", point.steady.occ_minus, obs.occ_minus, 1e-9),
        ("q_left", point.steady.q_left, obs.q_left, heat_floor),
        ("q_right", point.steady.q_right, obs.q_right, heat_floor),
        ("log_negativity", point.log_negativity, e_n_oracle, 1e-9),
    ];
    let mut rows = Vec::with_capacity(rows_spec.len());
    let mut all = true;
    for (name, analytic, oracle, floor) in rows_spec {
        let mag = analytic.abs().max(oracle.abs());
        let (rel_diff, pass) = if mag <= floor {
            (0.0, true)
        } else {
            let r = (analytic - oracle).abs() / mag;
            (r, r <= rel_tol)
        };
        all &= pass;
        rows.push(ComparisonRow {
            name,
            analytic,
            oracle,
            rel_diff,
            pass,
        });
    }
    Ok(ComparisonReport {
        rows,
        rel_tol,
        pass: all,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{rate_set, BathSpec, ModeRates};
    use crate::circuit::ModeParams;
    use crate::hopfield::hopfield_coefficients;
    use crate::point::evaluate_modes;
    use rand::rngs::StdRng;
    use rand::{RngExt, SeedableRng};

    fn toy_rates(cutoff_friendly: bool) -> RateSet {
        // Occupations low enough that a small cutoff holds the state.
        let (nl_p, nr_p, nl_m, nr_m) = if cutoff_friendly {
            (0.03, 0.015, 0.06, 0.03)
        } else {
            (0.8, 0.5, 1.2, 0.9)
        };
        RateSet {
            plus: ModeRates {
                omega: 1.2e11,
                weight_left: 0.8,
                weight_right: 0.5,
                zeta_left: 3e7,
                zeta_right: 5e7,
                occ_left: nl_p,
                occ_right: nr_p,
            },
            minus: ModeRates {
                omega: 6.0e10,
                weight_left: 1.1,
                weight_right: 0.7,
                zeta_left: 4e7,
                zeta_right: 2e7,
                occ_left: nl_m,
                occ_right: nr_m,
            },
            secular_ratio: 300.0,
        }
    }

    #[test]
    fn csr_matvec_matches_dense() {
        let mut rng = StdRng::seed_from_u64(101);
        for _ in 0..20 {
            let dim = rng.random_range(3..20);
            let mut trip = Vec::new();
            let mut dense = DMatrix::<f64>::zeros(dim, dim);
            for _ in 0..rng.random_range(0..60) {
                let r = rng.random_range(0..dim);
                let c = rng.random_range(0..dim);
                let v: f64 = rng.random_range(-2.0..2.0);
                trip.push((r as u32, c as u32, v));
                dense[(r, c)] += v; // duplicates must merge
            }
            let csr = Csr::from_triplets(dim, trip);
            let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut y = vec![0.0; dim];
            csr.matvec(&x, &mut y);
            let xv = nalgebra::DVector::from_vec(x);
            let want = &dense * xv;
            for i in 0..dim {
                assert!((y[i] - want[i]).abs() < 1e-12, "row {i}");
            }
            for r in 0..dim {
                assert!((csr.diag(r) - dense[(r, r)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn liouvillian_preserves_trace_exactly() {
        // Columns of L restricted to trace positions must sum to zero:
        // d/dt Tr rho = 0 for every input matrix, not just states.
        let l = build_liouvillian(&toy_rates(true), 6).unwrap();
        let h = l.hilbert_dim;
        let mut acc = vec![0.0f64; h * h];
        for i in 0..h {
            let r = i + i * h; // diagonal (trace) positions of vec(rho)
            for (c, v) in l.full.row(r) {
                acc[c as usize] += v;
            }
        }
        let worst = acc.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(worst <= 1e-12 * l.rate_scale, "trace leak {worst:e}");
    }

    #[test]
    fn liouvillian_commutes_with_transposition() {
        // Hermiticity preservation: L(v^T-perm) = (L v)^T-perm on random
        // real vectors, where the permutation swaps (m, n) -> (n, m).
        let l = build_liouvillian(&toy_rates(true), 5).unwrap();
        let h = l.hilbert_dim;
        let n = h * h;
        let mut rng = StdRng::seed_from_u64(103);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let perm = |x: &[f64]| -> Vec<f64> {
            let mut y = vec![0.0; n];
            for m in 0..h {
                for k in 0..h {
                    y[m + k * h] = x[k + m * h];
                }
            }
            y
        };
        let mut lv = vec![0.0; n];
        l.full.matvec(&v, &mut lv);
        let mut lpv = vec![0.0; n];
        l.full.matvec(&perm(&v), &mut lpv);
        let plv = perm(&lv);
        for i in 0..n {
            assert!((lpv[i] - plv[i]).abs() <= 1e-12 * l.rate_scale);
        }
    }

    #[test]
    fn single_bath_steady_state_is_truncated_thermal() {
        // Equal bath occupations per mode: the exact steady state of the
        // truncated problem is a product of truncated geometric
        // distributions at each mode's occupation ratio.
        let mut rs = toy_rates(true);
        rs.plus.occ_right = rs.plus.occ_left;
        rs.minus.occ_right = rs.minus.occ_left;
        let cutoff = 7;
        let l = build_liouvillian(&rs, cutoff).unwrap();
        let sol = steady_state_density(&l, &OracleConfig::with_cutoff(cutoff)).unwrap();

        let ratio = |n: f64| n / (n + 1.0);
        let geom = |r: f64| -> Vec<f64> {
            let z: f64 = (0..cutoff).map(|k| r.powi(k as i32)).sum();
            (0..cutoff).map(|k| r.powi(k as i32) / z).collect()
        };
        let gp = geom(ratio(rs.plus.occ_left));
        let gm = geom(ratio(rs.minus.occ_left));
        for np in 0..cutoff {
            for nm in 0..cutoff {
                let idx = np * cutoff + nm;
                let want = gp[np] * gm[nm];
                assert!(
                    (sol.rho[(idx, idx)] - want).abs() < 1e-12,
                    "population ({np},{nm})"
                );
            }
        }
        // No coherences survive.
        let mut off = 0.0f64;
        for i in 0..l.hilbert_dim {
            for j in 0..l.hilbert_dim {
                if i != j {
                    off = off.max(sol.rho[(i, j)].abs());
                }
            }
        }
        assert!(off < 1e-12);
    }

    #[test]
    fn detailed_balance_holds_along_each_mode() {
        let rs = toy_rates(true);
        let cutoff = 8;
        let l = build_liouvillian(&rs, cutoff).unwrap();
        let sol = steady_state_density(&l, &OracleConfig::with_cutoff(cutoff)).unwrap();
        // Populations are geometric with the up/down rate ratio of the
        // combined baths, mode by mode.
        let ratio = |r: &ModeRates| {
            let up = r.weight_left * r.zeta_left * r.occ_left
                + r.weight_right * r.zeta_right * r.occ_right;
            let down = r.weight_left * r.zeta_left * (r.occ_left + 1.0)
                + r.weight_right * r.zeta_right * (r.occ_right + 1.0);
            up / down
        };
        let rp = ratio(&rs.plus);
        let rm = ratio(&rs.minus);
        let pop = |np: usize, nm: usize| sol.rho[(np * cutoff + nm, np * cutoff + nm)];
        // stop once populations approach the kernel-vector noise floor
        let mut tested = 0;
        for np in 0..cutoff - 1 {
            if pop(np + 1, 0) < 1e-6 {
                break;
            }
            let got = pop(np + 1, 0) / pop(np, 0);
            assert!((got - rp).abs() <= 1e-7 * rp, "plus rung {np}");
            tested += 1;
        }
        for nm in 0..cutoff - 1 {
            if pop(0, nm + 1) < 1e-6 {
                break;
            }
            let got = pop(0, nm + 1) / pop(0, nm);
            assert!((got - rm).abs() <= 1e-7 * rm, "minus rung {nm}");
            tested += 1;
        }
        assert!(tested >= 5, "only {tested} rungs carried enough weight");
    }

    #[test]
    fn null_space_and_integrator_agree() {
        let rs = toy_rates(true);
        let cutoff = 6;
        let l = build_liouvillian(&rs, cutoff).unwrap();
        let a = steady_state_density(&l, &OracleConfig::with_cutoff(cutoff)).unwrap();
        let cfg = OracleConfig {
            cutoff,
            solver: SolverKind::LongTimeIntegration,
            convergence_tol: 1e-12,
            max_steps: 400_000,
        };
        let b = steady_state_density(&l, &cfg).unwrap();
        let diff = (&a.rho - &b.rho).abs().max();
        assert!(diff < 1e-6, "solver disagreement {diff:e}");
    }

    #[test]
    fn solver_rejects_an_isolated_mode() {
        let mut rs = toy_rates(true);
        rs.minus.weight_left = 0.0;
        rs.minus.weight_right = 0.0;
        let l = build_liouvillian(&rs, 4).unwrap();
        match steady_state_density(&l, &OracleConfig::with_cutoff(4)) {
            Err(Error::DegenerateKernel { dim }) => assert!(dim > 1, "dim = {dim}"),
            other => panic!("expected a degenerate kernel, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn undersized_cutoff_is_reported_as_leakage() {
        let rs = toy_rates(false); // occupations near 1
        let l = build_liouvillian(&rs, 3).unwrap();
        match steady_state_density(&l, &OracleConfig::with_cutoff(3)) {
            Err(Error::NotConverged { reason }) => {
                assert!(reason.contains("cutoff"), "reason: {reason}")
            }
            other => panic!("expected leakage failure, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn oracle_matches_rate_equations_on_a_small_case() {
        let mp = ModeParams::new(9.0e10, 1.3e11, -1.5e10).unwrap();
        let basis = hopfield_coefficients(&mp).unwrap();
        let left = BathSpec {
            resistance: 1.0,
            quality: 5.0,
            omega_lc: 1.0e10,
            temperature: 0.15,
        };
        let right = BathSpec {
            temperature: 0.07,
            ..left
        };
        let rs = rate_set(&basis, &left, &right);
        let point = evaluate_modes(mp, &left, &right).unwrap();
        let cutoff = 8;
        let l = build_liouvillian(&rs, cutoff).unwrap();
        let sol = steady_state_density(&l, &OracleConfig::with_cutoff(cutoff)).unwrap();
        let obs = oracle_observables(&l, &sol);
        let report = compare(&point, &obs, 1e-2).unwrap();
        for row in &report.rows {
            assert!(
                row.pass,
                "{}: analytic {:.6e} vs oracle {:.6e} (rel {:.2e})",
                row.name, row.analytic, row.oracle, row.rel_diff
            );
        }
        assert!(report.pass);
        // Conservation inside the oracle itself.
        let gross = gross_heat_scale(&rs);
        assert!((obs.q_left + obs.q_right).abs() <= 1e-10 * gross);
    }

    #[test]
    fn comparison_catches_a_corrupted_rate() {
        // Corrupt one damping rate by 10 percent after the analytic pass;
        // the oracle must notice. This is what makes the check meaningful.
        let mp = ModeParams::new(9.0e10, 1.3e11, -1.5e10).unwrap();
        let left = BathSpec {
            resistance: 1.0,
            quality: 5.0,
            omega_lc: 1.0e10,
            temperature: 0.15,
        };
        let right = BathSpec {
            temperature: 0.07,
            ..left
        };
        let point = evaluate_modes(mp, &left, &right).unwrap();
        let mut rs = point.rates;
        rs.plus.zeta_left *= 1.1;
        let cutoff = 8;
        let l = build_liouvillian(&rs, cutoff).unwrap();
        let sol = steady_state_density(&l, &OracleConfig::with_cutoff(cutoff)).unwrap();
        let obs = oracle_observables(&l, &sol);
        let report = compare(&point, &obs, 1e-3).unwrap();
        assert!(!report.pass, "corruption slipped through");
    }

    #[test]
    fn default_point_agrees_at_moderate_cutoff() {
        // The full-strength version of this comparison (cutoff 12, nine
        // cases) lives in the acceptance suite; this is the fast smoke test.
        let cfg = crate::config::SweepConfig::default();
        let point = crate::point::evaluate_flux(
            &cfg.circuit(),
            0.5 * std::f64::consts::TAU,
            &cfg.left_bath(),
            &cfg.right_bath(),
        )
        .unwrap();
        let cutoff = 9;
        let l = build_liouvillian(&point.rates, cutoff).unwrap();
        let sol = steady_state_density(&l, &OracleConfig::with_cutoff(cutoff)).unwrap();
        let obs = oracle_observables(&l, &sol);
        let report = compare(&point, &obs, 1e-2).unwrap();
        assert!(
            report.pass,
            "{:?}",
            report
                .rows
                .iter()
                .map(|r| format!("{} {:.2e}", r.name, r.rel_diff))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn rejected_cutoffs() {
        let rs = toy_rates(true);
        assert!(build_liouvillian(&rs, 1).is_err());
        assert!(build_liouvillian(&rs, MAX_CUTOFF + 1).is_err());
    }
}
