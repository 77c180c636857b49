use core::fmt;

/// Errors surfaced by the model, the solvers and the peak analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A rate or coupling that must be positive is not (`kappa`,
    /// `drive_amplitude`, ...). Carries the offending field name.
    NonPositiveRate(&'static str),
    /// `Delta` and the pair (`mu`, `B`) were both supplied but disagree
    /// beyond 1e-12 relative.
    InconsistentZeeman { delta: f64, two_mu_b: f64 },
    /// A fluctuation offset exceeds the collective Rabi frequency; the
    /// linearized fluctuation treatment is not meaningful there.
    FluctuationTooLarge(&'static str),
    /// The 5x5 steady-state solve hit a (near-)zero pivot.
    SingularSystem,
    /// Time step violates the Gershgorin stability precondition
    /// `dt * spectral_radius < 0.1`.
    StepTooLarge { dt: f64, radius: f64 },
    /// The eigen-iteration did not converge within its budget.
    ConvergenceFailure,
    /// The transmission maximum sits on the search-window boundary: no
    /// isolated MIOT peak (e.g. Delta = 0).
    NoPeak,
    /// The half-maximum level is not crossed within the allowed range; the
    /// MIOT peak has merged with the vacuum Rabi peaks.
    BracketFailure,
    /// Both Raman Rabi frequencies vanish where a dark-state direction is
    /// requested.
    ZeroRaman,
    /// Angular-momentum quantum numbers are malformed (|m| > j, or j/m not
    /// both integer or both half-integer).
    InvalidQuantumNumbers,
    /// Dipole elements are only provided for the J=1 -> J=1 transition.
    UnsupportedTransition,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositiveRate(name) => write!(f, "NonPositiveRate: {name}"),
            Error::InconsistentZeeman { delta, two_mu_b } => write!(
                f,
                "InconsistentZeeman: Delta = {delta} rad/s but 2*mu*B = {two_mu_b} rad/s"
            ),
            Error::FluctuationTooLarge(name) => {
                write!(f, "FluctuationTooLarge: |{name}| must be below Omega_N")
            }
            Error::SingularSystem => write!(f, "SingularSystem: rank-deficient steady state"),
            Error::StepTooLarge { dt, radius } => write!(
                f,
                "StepTooLarge: dt = {dt} s, Gershgorin radius = {radius} rad/s (need dt*radius < 0.1)"
            ),
            Error::ConvergenceFailure => write!(f, "ConvergenceFailure: eigen-iteration budget exhausted"),
            Error::NoPeak => write!(f, "NoPeak: transmission maximum on the search-window boundary"),
            Error::BracketFailure => write!(f, "BracketFailure: half-maximum level not bracketed"),
            Error::ZeroRaman => write!(f, "ZeroRaman: g_alpha = g_beta = 0 has no dark-state direction"),
            Error::InvalidQuantumNumbers => write!(f, "InvalidQuantumNumbers"),
            Error::UnsupportedTransition => write!(f, "UnsupportedTransition: only J=1 -> J=1"),
        }
    }
}

#[cfg(any(test, feature = "std"))]
impl std::error::Error for Error {}
