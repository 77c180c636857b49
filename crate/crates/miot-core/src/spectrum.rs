//! Relative transmission power P_T of the probe beam.
//!
//! `transmission_exact` evaluates the closed-form steady-state expression
//! (with a dedicated reduced branch for the Raman-free case); when any
//! frequency fluctuation is nonzero the closed form no longer applies and the
//! evaluation routes through the five-mode steady-state solve. P_T is the
//! ratio of transmitted to incident power, so it is independent of the drive
//! amplitude.

use crate::error::Error;
use crate::langevin::{build_system, steady_state};
use crate::params::{eta, PhysicalParams};
use alloc::vec::Vec;
use num_complex::Complex64 as C64;

/// Sampling grid over the probe detuning δ_p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    /// Adaptively subdivide around detected maxima until the local grid step
    /// is below an estimated FWHM/20.
    pub refine: bool,
}

/// A sampled (δ_p, P_T) curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Strictly increasing in δ_p.
    pub points: Vec<(f64, f64)>,
    pub grid: Grid,
    pub params_hash: u64,
}

/// Exact relative transmission power at probe detuning `delta_p`.
pub fn transmission_exact(p: &PhysicalParams, delta_p: f64) -> Result<f64, Error> {
    if !p.fluct.is_zero() {
        return transmission_steady_state(p, delta_p);
    }
    Ok(transmission_closed_form(p, delta_p))
}

/// P_T from the direct five-mode steady-state solve.
pub fn transmission_steady_state(p: &PhysicalParams, delta_p: f64) -> Result<f64, Error> {
    let st = steady_state(&build_system(p, delta_p))?;
    let ratio = st.a_x / C64::new(p.drive_amplitude, 0.0);
    Ok(0.25 * p.kappa * p.kappa * ratio.norm_sqr())
}

/// Closed-form P_T (fluctuations zero). Evaluated nondimensionalized by Ω_N
/// (or κ for the empty cavity) so widths spanning several orders of
/// magnitude stay well conditioned.
pub fn transmission_closed_form(p: &PhysicalParams, delta_p: f64) -> f64 {
    let scale = if p.omega_n > 0.0 { p.omega_n } else { p.kappa };
    let d = delta_p / scale;
    let k = p.kappa / scale;
    let g = p.gamma / scale;
    let dz = p.delta / scale;
    let on = p.omega_n / scale;
    let i = C64::new(0.0, 1.0);

    let a = C64::new(d, 0.0) - i * (0.5 * g);
    let (num, den);
    let g2 = p.raman_power() / (scale * scale);
    if g2 == 0.0 {
        // Raman beams off: the C_S/C_P rows drop and the same elimination
        // gives the reduced three-mode form.
        let n3 = a * a - C64::new(0.25 * dz * dz, 0.0);
        num = n3;
        den = (C64::new(d, 0.0) - i * (0.5 * k)) * n3 - C64::new(0.25 * on * on, 0.0) * a;
    } else {
        let gs = p.gamma_s / scale;
        let eta = eta(p.g_alpha, p.g_beta);
        let r = C64::new(eta, 0.0)
            - C64::new(4.0 * d, 0.0) * (C64::new(d, 0.0) - i * (0.5 * gs)) / g2;
        let f = C64::new(d, 0.0) * (r + (1.0 - eta)) - i * (0.5 * g) * r;
        let n5 = a * f - C64::new(0.25 * dz * dz, 0.0) * r;
        num = n5;
        den = (C64::new(d, 0.0) - i * (0.5 * k)) * n5 - C64::new(0.25 * on * on, 0.0) * f;
    }
    0.25 * k * k * (num / den).norm_sqr()
}

/// Near-resonance Lorentzian approximation of the MIOT peak, valid for
/// Ω_N ≫ Δ ≫ {γ, κ}. Evaluated regardless; the caller judges validity.
pub fn transmission_approx(p: &PhysicalParams, delta_p: f64) -> f64 {
    let d = p.derived();
    let db2 = d.delta_bar * d.delta_bar;
    let on2 = p.omega_n * p.omega_n;
    let amp = d.eta * db2 / on2;
    let half_width = 0.5 * d.eta * (p.gamma + p.kappa * db2 / on2);
    let denom = delta_p * delta_p + half_width * half_width;
    0.25 * p.kappa * p.kappa * amp * amp / denom
}

const MAX_POINTS: usize = 1 << 20;

/// Sample the exact transmission over a δ_p grid.
pub fn sample(p: &PhysicalParams, grid: Grid) -> Result<Spectrum, Error> {
    assert!(grid.count >= 2, "grid count must be >= 2");
    assert!(grid.max > grid.min, "grid max must exceed min");
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(grid.count);
    let step = (grid.max - grid.min) / (grid.count - 1) as f64;
    for k in 0..grid.count {
        let dp = if k == grid.count - 1 {
            grid.max
        } else {
            grid.min + step * k as f64
        };
        points.push((dp, transmission_exact(p, dp)?));
    }
    if grid.refine {
        refine_around_maxima(p, &mut points)?;
    }
    Ok(Spectrum {
        points,
        grid,
        params_hash: p.hash_token(),
    })
}

/// Subdivide around local maxima until the local step is below the locally
/// estimated FWHM/20.
fn refine_around_maxima(p: &PhysicalParams, points: &mut Vec<(f64, f64)>) -> Result<(), Error> {
    for _pass in 0..40 {
        let maxima = local_maxima_indices(points);
        let mut inserts: Vec<(f64, f64)> = Vec::new();
        for &m in &maxima {
            let est = estimate_local_fwhm(points, m);
            let lo = m.saturating_sub(2);
            let hi = (m + 2).min(points.len() - 1);
            for k in lo..hi {
                let (x0, _) = points[k];
                let (x1, _) = points[k + 1];
                if x1 - x0 > est / 20.0 {
                    let xm = 0.5 * (x0 + x1);
                    inserts.push((xm, transmission_exact(p, xm)?));
                }
            }
        }
        if inserts.is_empty() || points.len() + inserts.len() > MAX_POINTS {
            break;
        }
        points.extend(inserts);
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        points.dedup_by(|a, b| a.0 == b.0);
    }
    Ok(())
}

/// Indices of strict interior local maxima of the sampled curve.
pub fn local_maxima_indices(points: &[(f64, f64)]) -> Vec<usize> {
    let mut out = Vec::new();
    for k in 1..points.len().saturating_sub(1) {
        if points[k].1 > points[k - 1].1 && points[k].1 >= points[k + 1].1 {
            out.push(k);
        }
    }
    out
}

/// Rough FWHM of the maximum at index `m` from the half-height crossings of
/// the sampled curve; falls back to a couple of local steps when the half
/// level is not reached inside the sample.
fn estimate_local_fwhm(points: &[(f64, f64)], m: usize) -> f64 {
    let half = 0.5 * points[m].1;
    let mut left = points[m].0;
    let mut found_left = false;
    for k in (0..m).rev() {
        if points[k].1 <= half {
            left = points[k].0;
            found_left = true;
            break;
        }
    }
    let mut right = points[m].0;
    let mut found_right = false;
    for point in points.iter().skip(m + 1) {
        if point.1 <= half {
            right = point.0;
            found_right = true;
            break;
        }
    }
    if found_left && found_right {
        right - left
    } else {
        let step = if m + 1 < points.len() {
            points[m + 1].0 - points[m].0
        } else {
            points[m].0 - points[m - 1].0
        };
        4.0 * step
    }
}
