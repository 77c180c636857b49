//! Eigenmodes of the drive-free non-Hermitian five-mode matrix.
//!
//! Peak positions of the transmission spectrum are predicted by the
//! eigenvalues λ of `M − δ_p·I`: a peak can appear at δ_p = −Re λ with
//! linewidth −2 Im λ. The mode with the smallest |Im λ| is the (perturbed)
//! dark mode carrying the MIOT peak.
//!
//! The solver is self-contained: characteristic polynomial via
//! Faddeev-LeVerrier, roots by Aberth-Ehrlich iteration, eigenvectors by
//! inverse iteration with Rayleigh-quotient polish.

use crate::error::Error;
use crate::langevin::drive_free_matrix;
use crate::linalg::{self, mat_norm, matvec, solve, vec_norm, Mat5, Vec5, C64, ZERO_MAT, ZERO_VEC};
use crate::params::{eta, PhysicalParams};
#[allow(unused_imports)]
use num_traits::Float;

const DIM: usize = linalg::DIM;

/// Complex eigendecomposition of the drive-free matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDecomposition {
    /// Eigenvalues relative to ω_A (i.e. of `M − δ_p·I`).
    pub eigenvalues: [C64; DIM],
    /// Unit-normalized right eigenvectors, column k matching `eigenvalues[k]`.
    pub right_eigenvectors: [Vec5; DIM],
    /// Index of the eigenvalue with the smallest |Im λ| (ties broken toward
    /// smaller |Re λ|).
    pub dark_index: usize,
}

impl ModeDecomposition {
    pub fn dark_eigenvalue(&self) -> C64 {
        self.eigenvalues[self.dark_index]
    }

    /// Predicted MIOT linewidth: −2 Im λ of the dark mode.
    pub fn dark_linewidth(&self) -> f64 {
        -2.0 * self.dark_eigenvalue().im
    }

    /// Predicted peak position in δ_p for eigenvalue k: −Re λ_k.
    pub fn peak_position(&self, k: usize) -> f64 {
        -self.eigenvalues[k].re
    }
}

/// First-order perturbative dark state |φ_D'> = |D>|0> + ε |g>|1>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbativeDarkState {
    /// Weight on |D>|0> (1 before normalization of the perturbed state).
    pub amplitude_d: C64,
    /// Weight iΔ g_β / (Ω_N √(|g_α|²+|g_β|²)) on |g>|1>.
    pub amplitude_g1: C64,
    /// Eigenenergy estimate, ≈ ω_A.
    pub energy: f64,
    /// Population-weighted decay estimate η[γ + (Δ/Ω_N)² κ].
    pub decay_estimate: f64,
    /// Small-Zeeman limit ηγ of the decay estimate; exactly γ when g_α = 0.
    pub decay_small_zeeman: f64,
}

/// Full complex eigendecomposition of the drive-free 5x5 matrix.
pub fn decompose(p: &PhysicalParams) -> Result<ModeDecomposition, Error> {
    let m = drive_free_matrix(p);
    decompose_matrix(&m)
}

/// Eigendecomposition of an arbitrary 5x5 complex matrix.
pub fn decompose_matrix(m: &Mat5) -> Result<ModeDecomposition, Error> {
    let norm = mat_norm(m);
    if norm == 0.0 {
        let mut vecs = [ZERO_VEC; DIM];
        for (k, v) in vecs.iter_mut().enumerate() {
            v[k] = C64::new(1.0, 0.0);
        }
        return Ok(ModeDecomposition {
            eigenvalues: [C64::new(0.0, 0.0); DIM],
            right_eigenvectors: vecs,
            dark_index: 0,
        });
    }

    // Work on the scaled matrix; eigenvalues scale back linearly.
    let inv = 1.0 / norm;
    let mut a = ZERO_MAT;
    for i in 0..DIM {
        for j in 0..DIM {
            a[i][j] = m[i][j] * inv;
        }
    }

    let coeffs = characteristic_polynomial(&a);
    let mut roots = aberth_roots(&coeffs)?;

    let mut vectors = [ZERO_VEC; DIM];
    for k in 0..DIM {
        let (lambda, v) = eigenpair(&a, roots[k], &vectors[..k], &roots[..k])?;
        roots[k] = lambda;
        vectors[k] = v;
    }

    let mut eigenvalues = [C64::new(0.0, 0.0); DIM];
    for k in 0..DIM {
        eigenvalues[k] = roots[k] * norm;
    }
    let dark_index = dark_index(&eigenvalues, &vectors, norm);
    Ok(ModeDecomposition {
        eigenvalues,
        right_eigenvectors: vectors,
        dark_index,
    })
}

/// Monic characteristic polynomial coefficients `c` with
/// p(λ) = λ⁵ + c[4]λ⁴ + ... + c[0], via Faddeev-LeVerrier.
fn characteristic_polynomial(a: &Mat5) -> [C64; DIM] {
    let trace = |m: &Mat5| -> C64 {
        let mut t = C64::new(0.0, 0.0);
        for k in 0..DIM {
            t += m[k][k];
        }
        t
    };
    let matmul = |x: &Mat5, y: &Mat5| -> Mat5 {
        let mut z = ZERO_MAT;
        for i in 0..DIM {
            for j in 0..DIM {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..DIM {
                    acc += x[i][k] * y[k][j];
                }
                z[i][j] = acc;
            }
        }
        z
    };

    let mut c = [C64::new(0.0, 0.0); DIM];
    let mut mk = *a; // M_1 = A
    let mut ck = -trace(&mk); // c_{n-1}
    c[DIM - 1] = ck;
    for step in 2..=DIM {
        let mut shifted = mk;
        for k in 0..DIM {
            shifted[k][k] += ck;
        }
        mk = matmul(a, &shifted);
        ck = -trace(&mk) / (step as f64);
        c[DIM - step] = ck;
    }
    c
}

fn poly_eval(coeffs: &[C64; DIM], z: C64) -> (C64, C64) {
    // Horner for p and p'.
    let mut p = C64::new(1.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for k in (0..DIM).rev() {
        dp = dp * z + p;
        p = p * z + coeffs[k];
    }
    (p, dp)
}

/// All five roots of the monic quintic by Aberth-Ehrlich simultaneous
/// iteration.
fn aberth_roots(coeffs: &[C64; DIM]) -> Result<[C64; DIM], Error> {
    // Cauchy-style inclusion radius.
    let mut radius = 0.0f64;
    for c in coeffs {
        radius = radius.max(c.norm());
    }
    let radius = 1.0 + radius;

    let mut z = [C64::new(0.0, 0.0); DIM];
    for (k, zk) in z.iter_mut().enumerate() {
        // Asymmetric start angles avoid symmetry stalls.
        let angle = 2.0 * core::f64::consts::PI * (k as f64 + 0.3711) / DIM as f64 + 0.2;
        *zk = C64::from_polar(radius, angle);
    }

    for _iter in 0..200 {
        let mut moved = 0.0f64;
        for k in 0..DIM {
            let (p, dp) = poly_eval(coeffs, z[k]);
            if p == C64::new(0.0, 0.0) {
                continue;
            }
            let newton = if dp == C64::new(0.0, 0.0) {
                C64::new(1e-3, 1e-3)
            } else {
                p / dp
            };
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..DIM {
                if j != k {
                    let d = z[k] - z[j];
                    if d != C64::new(0.0, 0.0) {
                        sum += C64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - newton * sum;
            let step = if denom == C64::new(0.0, 0.0) {
                newton
            } else {
                newton / denom
            };
            z[k] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 * radius {
            return Ok(z);
        }
    }
    // Multiple roots converge slowly; accept if residuals are tiny anyway.
    for zk in &z {
        let (p, _) = poly_eval(coeffs, *zk);
        if p.norm() > 1e-8 {
            return Err(Error::ConvergenceFailure);
        }
    }
    Ok(z)
}

/// Refine one eigenpair of the scaled matrix `a` from an approximate
/// eigenvalue: inverse iteration plus Rayleigh-quotient polish. The start
/// vector is orthogonalized against previously found vectors of (nearly)
/// the same eigenvalue so repeated eigenvalues yield distinct directions.
fn eigenpair(
    a: &Mat5,
    lambda0: C64,
    prev_vecs: &[Vec5],
    prev_vals: &[C64],
) -> Result<(C64, Vec5), Error> {
    let mut lambda = lambda0;
    // Deterministic, direction-rich start vector.
    let mut v: Vec5 = [
        C64::new(0.7723, 0.1312),
        C64::new(-0.3313, 0.5712),
        C64::new(0.2501, -0.6133),
        C64::new(-0.5417, -0.2129),
        C64::new(0.1359, 0.3921),
    ];
    orthogonalize_against_same(&mut v, lambda, prev_vecs, prev_vals);
    normalize(&mut v);

    let mut best_res = f64::INFINITY;
    let mut best: (C64, Vec5) = (lambda, v);
    for iter in 0..40 {
        // Shift slightly off the eigenvalue so the solve stays nonsingular.
        let eps = 1e-13 + 1e-11 * (iter as f64);
        let shift = lambda + C64::new(eps, eps);
        let mut shifted = *a;
        for k in 0..DIM {
            shifted[k][k] -= shift;
        }
        let w = match solve(&shifted, &v) {
            Ok(w) => w,
            Err(Error::SingularSystem) => {
                lambda += C64::new(3e-11, -2e-11);
                continue;
            }
            Err(e) => return Err(e),
        };
        v = w;
        orthogonalize_against_same(&mut v, lambda, prev_vecs, prev_vals);
        if !normalize(&mut v) {
            lambda += C64::new(1e-10, 1e-10);
            continue;
        }
        // Rayleigh quotient update.
        let av = matvec(a, &v);
        let mut num = C64::new(0.0, 0.0);
        for k in 0..DIM {
            num += v[k].conj() * av[k];
        }
        lambda = num; // ‖v‖ = 1
        let mut res = 0.0f64;
        for k in 0..DIM {
            res += (av[k] - lambda * v[k]).norm_sqr();
        }
        let res = res.sqrt();
        if res < best_res {
            best_res = res;
            best = (lambda, v);
        }
        if res <= 1e-12 {
            return Ok((lambda, v));
        }
    }
    if best_res <= 1e-10 {
        Ok(best)
    } else {
        Err(Error::ConvergenceFailure)
    }
}

fn orthogonalize_against_same(v: &mut Vec5, lambda: C64, prev_vecs: &[Vec5], prev_vals: &[C64]) {
    for (pv, pl) in prev_vecs.iter().zip(prev_vals) {
        if (lambda - pl).norm() < 1e-6 {
            let mut dot = C64::new(0.0, 0.0);
            for k in 0..DIM {
                dot += pv[k].conj() * v[k];
            }
            for k in 0..DIM {
                v[k] -= dot * pv[k];
            }
        }
    }
}

fn normalize(v: &mut Vec5) -> bool {
    let n = vec_norm(v);
    if n < 1e-300 {
        return false;
    }
    for e in v.iter_mut() {
        *e /= n;
    }
    true
}

fn dark_index(eigenvalues: &[C64; DIM], vectors: &[Vec5; DIM], norm: f64) -> usize {
    // The dark mode is the narrowest optically active one. Modes with no
    // weight on the cavity field or the optical coherences (the bare
    // ground-state coherence when the Raman pair is off) are ruled out
    // first: their linewidth is exactly zero but they never show up in
    // the transmission.
    let active = |v: &Vec5| -> bool {
        v[0].norm() + v[1].norm() + v[2].norm() > 1e-8
    };
    let tie = 1e-9 * norm;
    let mut best: Option<usize> = None;
    for k in 0..DIM {
        if !active(&vectors[k]) {
            continue;
        }
        let Some(b) = best else {
            best = Some(k);
            continue;
        };
        let (ik, rk) = (eigenvalues[k].im.abs(), eigenvalues[k].re.abs());
        let (ib, rb) = (eigenvalues[b].im.abs(), eigenvalues[b].re.abs());
        if ik < ib - tie || ((ik - ib).abs() <= tie && rk < rb) {
            best = Some(k);
        }
    }
    best.unwrap_or(0)
}

/// First-order perturbative dark state and decay estimates.
pub fn perturbative_dark(p: &PhysicalParams) -> PerturbativeDarkState {
    let g2 = p.raman_power();
    let eta = eta(p.g_alpha, p.g_beta);
    let amplitude_g1 = if g2 > 0.0 && p.omega_n > 0.0 {
        C64::new(0.0, 1.0) * p.delta * p.g_beta / (p.omega_n * g2.sqrt())
    } else if p.omega_n > 0.0 {
        // Raman off: |D> degenerates to |e_y>, same mixing weight with η = 1.
        C64::new(0.0, p.delta / p.omega_n)
    } else {
        C64::new(0.0, 0.0)
    };
    let ratio = if p.omega_n > 0.0 {
        p.delta / p.omega_n
    } else {
        0.0
    };
    PerturbativeDarkState {
        amplitude_d: C64::new(1.0, 0.0),
        amplitude_g1,
        energy: p.omega_a,
        decay_estimate: eta * (p.gamma + ratio * ratio * p.kappa),
        decay_small_zeeman: eta * p.gamma,
    }
}

/// Dark-state direction (g_β, −g_α)/√(|g_α|²+|g_β|²) over (|e_y>, |P>).
pub fn dark_state_vector(g_alpha: C64, g_beta: C64) -> Result<[C64; 2], Error> {
    let g2 = g_alpha.norm_sqr() + g_beta.norm_sqr();
    if g2 == 0.0 {
        return Err(Error::ZeroRaman);
    }
    let n = g2.sqrt();
    Ok([g_beta / n, -g_alpha / n])
}

/// The perturbative dark state as a 5-vector in mode order, normalized;
/// used to compare against the numeric dark eigenvector.
pub fn perturbative_dark_vector(p: &PhysicalParams) -> Vec5 {
    use crate::langevin::{A_X, B_Y, C_P};
    let pd = perturbative_dark(p);
    let mut v = ZERO_VEC;
    match dark_state_vector(p.g_alpha, p.g_beta) {
        Ok(d) => {
            v[B_Y] = pd.amplitude_d * d[0];
            v[C_P] = pd.amplitude_d * d[1];
        }
        Err(_) => {
            v[B_Y] = pd.amplitude_d;
        }
    }
    v[A_X] = pd.amplitude_g1;
    let mut out = v;
    normalize(&mut out);
    out
}
