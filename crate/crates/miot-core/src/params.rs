//! Physical parameters of the driven atom-cavity model.
//!
//! Every rate, coupling and detuning is an angular frequency in rad/s.
//! Front ends accept ordinary frequencies with unit tags and multiply by 2π
//! before constructing these types.

use crate::error::Error;
use crate::linalg::C64;
#[allow(unused_imports)]
use num_traits::Float;

/// Deterministic frequency offsets of the cavity mode and Raman beams.
///
/// `delta_c` shifts the cavity frequency, `delta_t` is the fluctuation of the
/// total (one-photon) Raman frequency and `delta_r` of the Raman frequency
/// difference (two-photon detuning). All default to zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FluctuationSet {
    pub delta_c: f64,
    pub delta_t: f64,
    pub delta_r: f64,
}

impl FluctuationSet {
    pub const ZERO: FluctuationSet = FluctuationSet {
        delta_c: 0.0,
        delta_t: 0.0,
        delta_r: 0.0,
    };

    pub fn is_zero(&self) -> bool {
        self.delta_c == 0.0 && self.delta_t == 0.0 && self.delta_r == 0.0
    }
}

/// Raw parameter set as ingested from configuration, before validation.
///
/// `delta` (the Zeeman splitting) may be omitted when the pair (`mu`, `b`)
/// is given; validation then derives `delta = 2 mu B`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawParams {
    pub omega_a: f64,
    pub omega_n: f64,
    pub n_atoms: u64,
    pub delta: Option<f64>,
    /// Magnetic moment of the excited manifold, rad/s per tesla.
    pub mu: Option<f64>,
    /// Bias magnetic field in tesla.
    pub b_field: Option<f64>,
    pub kappa: f64,
    pub gamma: f64,
    pub gamma_s: f64,
    pub g_alpha: C64,
    pub g_beta: C64,
    pub drive_amplitude: f64,
    pub fluct: FluctuationSet,
}

impl Default for RawParams {
    fn default() -> Self {
        RawParams {
            omega_a: 0.0,
            omega_n: 0.0,
            n_atoms: 1,
            delta: None,
            mu: None,
            b_field: None,
            kappa: 0.0,
            gamma: 0.0,
            gamma_s: 0.0,
            g_alpha: C64::new(0.0, 0.0),
            g_beta: C64::new(0.0, 0.0),
            drive_amplitude: 1.0,
            fluct: FluctuationSet::ZERO,
        }
    }
}

/// Validated parameter set; the only parameter type the solvers consume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Atomic transition frequency; a free reference, 0 by default so δ_p is
    /// the natural abscissa.
    pub omega_a: f64,
    /// Collective Rabi frequency Ω_N = √N Ω.
    pub omega_n: f64,
    pub n_atoms: u64,
    /// Zeeman splitting Δ = 2μB.
    pub delta: f64,
    /// Cavity photon decay rate κ.
    pub kappa: f64,
    /// ³P₁ spontaneous decay rate γ.
    pub gamma: f64,
    /// ³S₁ decay rate Γ.
    pub gamma_s: f64,
    /// Raman Rabi frequency of beam α (couples |e_y> to |S>).
    pub g_alpha: C64,
    /// Raman Rabi frequency of beam β (couples |S> to |P>).
    pub g_beta: C64,
    /// Probe drive s = √(κ I_p / 2 ω_p), normalized to 1 by default.
    pub drive_amplitude: f64,
    pub fluct: FluctuationSet,
}

/// Quantities derived from the validated parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    /// Raman branching factor η = |g_β|² / (|g_α|² + |g_β|²); defined as 1
    /// when both Rabi frequencies vanish (bare-MIOT limit).
    pub eta: f64,
    /// Δ̄ = √(Δ² + γ²).
    pub delta_bar: f64,
}

/// Validate a raw parameter set and resolve the Zeeman splitting.
pub fn validate(raw: &RawParams) -> Result<PhysicalParams, Error> {
    if !(raw.kappa > 0.0) {
        return Err(Error::NonPositiveRate("kappa"));
    }
    if raw.omega_n < 0.0 || !raw.omega_n.is_finite() {
        return Err(Error::NonPositiveRate("Omega_N"));
    }
    if raw.gamma < 0.0 {
        return Err(Error::NonPositiveRate("gamma"));
    }
    if raw.gamma_s < 0.0 {
        return Err(Error::NonPositiveRate("Gamma_S"));
    }
    if !(raw.drive_amplitude > 0.0) {
        return Err(Error::NonPositiveRate("drive_amplitude"));
    }
    if raw.n_atoms < 1 {
        return Err(Error::NonPositiveRate("N_atoms"));
    }

    let from_field = match (raw.mu, raw.b_field) {
        (Some(mu), Some(b)) => Some(2.0 * mu * b),
        _ => None,
    };
    let delta = match (raw.delta, from_field) {
        (Some(d), Some(f)) => {
            let scale = d.abs().max(f.abs());
            if (d - f).abs() > 1e-12 * scale {
                return Err(Error::InconsistentZeeman { delta: d, two_mu_b: f });
            }
            d
        }
        (Some(d), None) => d,
        (None, Some(f)) => f,
        (None, None) => 0.0,
    };

    // Fluctuations are a linearized treatment; offsets comparable to Ω_N
    // are outside it. Skipped for the empty-cavity case Ω_N = 0.
    if raw.omega_n > 0.0 {
        if raw.fluct.delta_c.abs() >= raw.omega_n {
            return Err(Error::FluctuationTooLarge("Delta_c"));
        }
        if raw.fluct.delta_t.abs() >= raw.omega_n {
            return Err(Error::FluctuationTooLarge("Delta_t"));
        }
        if raw.fluct.delta_r.abs() >= raw.omega_n {
            return Err(Error::FluctuationTooLarge("Delta_r"));
        }
    }

    Ok(PhysicalParams {
        omega_a: raw.omega_a,
        omega_n: raw.omega_n,
        n_atoms: raw.n_atoms,
        delta,
        kappa: raw.kappa,
        gamma: raw.gamma,
        gamma_s: raw.gamma_s,
        g_alpha: raw.g_alpha,
        g_beta: raw.g_beta,
        drive_amplitude: raw.drive_amplitude,
        fluct: raw.fluct,
    })
}

/// η and Δ̄ for a validated parameter set.
pub fn derived(p: &PhysicalParams) -> DerivedQuantities {
    DerivedQuantities {
        eta: eta(p.g_alpha, p.g_beta),
        delta_bar: (p.delta * p.delta + p.gamma * p.gamma).sqrt(),
    }
}

/// η = |g_β|²/(|g_α|²+|g_β|²), with the degenerate g_α = g_β = 0 case
/// defined as 1 (the Raman subsystem decouples and the model reduces to bare
/// MIOT).
pub fn eta(g_alpha: C64, g_beta: C64) -> f64 {
    let a2 = g_alpha.norm_sqr();
    let b2 = g_beta.norm_sqr();
    if a2 + b2 == 0.0 {
        1.0
    } else {
        b2 / (a2 + b2)
    }
}

impl PhysicalParams {
    pub fn derived(&self) -> DerivedQuantities {
        derived(self)
    }

    /// Combined Raman power |g_α|² + |g_β|².
    pub fn raman_power(&self) -> f64 {
        self.g_alpha.norm_sqr() + self.g_beta.norm_sqr()
    }

    pub fn with_fluct(mut self, fluct: FluctuationSet) -> Self {
        self.fluct = fluct;
        self
    }

    /// FNV-1a hash over the parameter bytes; an opaque token linking outputs
    /// back to the parameters that generated them.
    pub fn hash_token(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |v: f64| {
            for b in v.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        eat(self.omega_a);
        eat(self.omega_n);
        eat(self.n_atoms as f64);
        eat(self.delta);
        eat(self.kappa);
        eat(self.gamma);
        eat(self.gamma_s);
        eat(self.g_alpha.re);
        eat(self.g_alpha.im);
        eat(self.g_beta.re);
        eat(self.g_beta.im);
        eat(self.drive_amplitude);
        eat(self.fluct.delta_c);
        eat(self.fluct.delta_t);
        eat(self.fluct.delta_r);
        h
    }
}
