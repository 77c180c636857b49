//! JSON parameter documents.
//!
//! Frequencies are written the way the literature quotes them — ordinary
//! frequency with an explicit unit tag, e.g. `{"value": 5.0, "unit": "MHz"}`
//! — and multiplied by 2π on ingestion. Complex Rabi frequencies put
//! `{"re": …, "im": …}` in the same wrapper. Bare numbers are accepted as Hz.

use miot_core::linalg::C64;
use miot_core::params::{FluctuationSet, RawParams};
use serde::Deserialize;
use std::fmt;

#[derive(Debug)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ParseError {}

#[derive(Deserialize, Clone, Copy)]
enum Unit {
    Hz,
    #[serde(rename = "kHz")]
    KiloHz,
    #[serde(rename = "MHz")]
    MegaHz,
}

impl Unit {
    fn scale(self) -> f64 {
        match self {
            Unit::Hz => 1.0,
            Unit::KiloHz => 1e3,
            Unit::MegaHz => 1e6,
        }
    }
}

/// (TAU * x) * scale, the same evaluation order as the core unit helpers,
/// so configured values compare bit-exact against programmatic ones.
fn angular(x: f64, scale: f64) -> f64 {
    core::f64::consts::TAU * x * scale
}

#[derive(Deserialize, Clone, Copy)]
#[serde(untagged)]
enum Num {
    Real(f64),
    Complex { re: f64, im: f64 },
}

#[derive(Deserialize, Clone, Copy)]
#[serde(untagged)]
enum FreqValue {
    Tagged { value: Num, unit: Unit },
    Bare(f64),
}

impl FreqValue {
    fn complex(self) -> C64 {
        let (num, scale) = match self {
            FreqValue::Tagged { value, unit } => (value, unit.scale()),
            FreqValue::Bare(x) => (Num::Real(x), 1.0),
        };
        match num {
            Num::Real(x) => C64::new(angular(x, scale), 0.0),
            Num::Complex { re, im } => C64::new(angular(re, scale), angular(im, scale)),
        }
    }

    fn real(self, key: &str) -> Result<f64, ParseError> {
        let c = self.complex();
        if c.im != 0.0 {
            return Err(ParseError(format!("{key}: complex value not allowed here")));
        }
        Ok(c.re)
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FluctDoc {
    #[serde(rename = "Delta_c")]
    delta_c: Option<FreqValue>,
    #[serde(rename = "Delta_t")]
    delta_t: Option<FreqValue>,
    #[serde(rename = "Delta_r")]
    delta_r: Option<FreqValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    #[serde(rename = "omega_A")]
    omega_a: Option<FreqValue>,
    #[serde(rename = "Omega_N")]
    omega_n: FreqValue,
    #[serde(rename = "N_atoms")]
    n_atoms: Option<u64>,
    #[serde(rename = "Delta")]
    delta: Option<FreqValue>,
    /// Magnetic moment, quoted as frequency per tesla.
    mu: Option<FreqValue>,
    /// Bias field in tesla.
    #[serde(rename = "B")]
    b: Option<f64>,
    kappa: FreqValue,
    gamma: FreqValue,
    #[serde(rename = "Gamma_S")]
    gamma_s: FreqValue,
    g_alpha: Option<FreqValue>,
    g_beta: Option<FreqValue>,
    drive_amplitude: Option<f64>,
    fluct: Option<FluctDoc>,
}

/// Parse a JSON parameter document into raw (not yet validated) parameters.
pub fn parse(text: &str) -> Result<RawParams, ParseError> {
    let doc: ConfigDoc =
        serde_json::from_str(text).map_err(|e| ParseError(format!("config: {e}")))?;
    let fluct_doc = doc.fluct.unwrap_or_default();
    let opt_real = |v: Option<FreqValue>, key: &str| -> Result<Option<f64>, ParseError> {
        v.map(|f| f.real(key)).transpose()
    };
    Ok(RawParams {
        omega_a: opt_real(doc.omega_a, "omega_A")?.unwrap_or(0.0),
        omega_n: doc.omega_n.real("Omega_N")?,
        n_atoms: doc.n_atoms.unwrap_or(1),
        delta: opt_real(doc.delta, "Delta")?,
        mu: opt_real(doc.mu, "mu")?,
        b_field: doc.b,
        kappa: doc.kappa.real("kappa")?,
        gamma: doc.gamma.real("gamma")?,
        gamma_s: doc.gamma_s.real("Gamma_S")?,
        g_alpha: doc.g_alpha.map_or(C64::new(0.0, 0.0), FreqValue::complex),
        g_beta: doc.g_beta.map_or(C64::new(0.0, 0.0), FreqValue::complex),
        drive_amplitude: doc.drive_amplitude.unwrap_or(1.0),
        fluct: FluctuationSet {
            delta_c: opt_real(fluct_doc.delta_c, "Delta_c")?.unwrap_or(0.0),
            delta_t: opt_real(fluct_doc.delta_t, "Delta_t")?.unwrap_or(0.0),
            delta_r: opt_real(fluct_doc.delta_r, "Delta_r")?.unwrap_or(0.0),
        },
    })
}

/// Parse a frequency flag such as `-4MHz`, `150kHz`, `7.5Hz` or a bare
/// number in Hz; returns rad/s.
pub fn parse_freq_flag(s: &str) -> Result<f64, ParseError> {
    let t = s.trim();
    let (digits, scale) = if let Some(v) = t.strip_suffix("MHz") {
        (v, 1e6)
    } else if let Some(v) = t.strip_suffix("kHz") {
        (v, 1e3)
    } else if let Some(v) = t.strip_suffix("Hz") {
        (v, 1.0)
    } else {
        (t, 1.0)
    };
    let x: f64 = digits
        .trim()
        .parse()
        .map_err(|_| ParseError(format!("bad frequency: {s}")))?;
    Ok(angular(x, scale))
}
