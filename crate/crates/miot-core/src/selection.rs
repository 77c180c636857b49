//! Angular-momentum machinery for the Raman-beam selection rules.
//!
//! Clebsch-Gordan coefficients are evaluated from the closed-form factorial
//! (Racah) expression in exact integer-rational arithmetic, with the square
//! root taken last, so asserted zeros are exact. Condon-Shortley phases
//! throughout. Dipole matrix elements are reported in units of the reduced
//! matrix element; the x-polarized beam is expanded as the σ+ + σ-
//! combination.

use crate::error::Error;
use crate::linalg::C64;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Atomic manifolds of the Raman transition ³P₁ ↔ ³S₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manifold {
    P1,
    S1,
}

/// An angular-momentum state |J, m_J> with half-integer quantum numbers
/// stored doubled (two_j = 2J, two_m = 2m_J).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AngularState {
    pub two_j: i64,
    pub two_m: i64,
    pub label: Manifold,
}

impl AngularState {
    pub fn new(two_j: i64, two_m: i64, label: Manifold) -> Result<Self, Error> {
        if two_j < 0 || two_m.abs() > two_j || (two_j + two_m) % 2 != 0 {
            return Err(Error::InvalidQuantumNumbers);
        }
        Ok(AngularState { two_j, two_m, label })
    }

    pub fn s1(m: i64) -> Self {
        AngularState {
            two_j: 2,
            two_m: 2 * m,
            label: Manifold::S1,
        }
    }

    pub fn p1(m: i64) -> Self {
        AngularState {
            two_j: 2,
            two_m: 2 * m,
            label: Manifold::P1,
        }
    }
}

/// Cartesian basis of the ³P₁ manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn label(&self) -> &'static str {
        match self {
            Axis::X => "e_x",
            Axis::Y => "e_y",
            Axis::Z => "e_z",
        }
    }
}

/// A ³P₁ state in the Cartesian basis, with its decomposition over
/// m_J = (+1, 0, −1):
/// e_x = −(|+1> − |−1>)/√2, e_y = i(|+1> + |−1>)/√2, e_z = |0>.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianP1State {
    pub axis: Axis,
}

impl CartesianP1State {
    /// Amplitudes on (m = +1, m = 0, m = −1).
    pub fn decomposition(&self) -> [C64; 3] {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        match self.axis {
            Axis::X => [C64::new(-s, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)],
            Axis::Y => [C64::new(0.0, s), C64::new(0.0, 0.0), C64::new(0.0, s)],
            Axis::Z => [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        }
    }
}

/// Initial ³P₁ state for a dipole element: either a Cartesian superposition
/// or a single spherical component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum P1State {
    Cartesian(Axis),
    Spherical(i64),
}

/// Probe/beam polarization. `Plus`/`Minus` are the σ± circular components;
/// `X`/`Y` are their linear combinations e_x = (e_+ + e_−) and
/// e_y = −i(e_+ − e_−) in the convention of the σ± expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl Polarization {
    pub fn label(&self) -> &'static str {
        match self {
            Polarization::X => "x",
            Polarization::Y => "y",
            Polarization::Z => "z",
            Polarization::Plus => "sigma+",
            Polarization::Minus => "sigma-",
        }
    }
}

// ---------------------------------------------------------------------------
// Exact rational arithmetic for the Racah expression.

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    fn new(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den);
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    const ZERO: Rational = Rational { num: 0, den: 1 };

    fn add(self, other: Rational) -> Rational {
        Rational::new(self.num * other.den + other.num * self.den, self.den * other.den)
    }

    fn mul(self, other: Rational) -> Rational {
        Rational::new(self.num * other.num, self.den * other.den)
    }

    fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn factorial(n: i64) -> i128 {
    debug_assert!((0..=33).contains(&n));
    (1..=n as i128).product::<i128>().max(1)
}

/// Clebsch-Gordan coefficient ⟨j1 m1; j2 m2 | J M⟩ with all quantum numbers
/// doubled. Returns exactly 0.0 when M ≠ m1 + m2 or the triangle condition
/// fails.
pub fn clebsch_gordan_doubled(
    tj1: i64,
    tm1: i64,
    tj2: i64,
    tm2: i64,
    tj: i64,
    tm: i64,
) -> Result<f64, Error> {
    for (j, m) in [(tj1, tm1), (tj2, tm2), (tj, tm)] {
        if j < 0 || m.abs() > j || (j + m) % 2 != 0 {
            return Err(Error::InvalidQuantumNumbers);
        }
    }
    if tm != tm1 + tm2 {
        return Ok(0.0);
    }
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return Ok(0.0);
    }

    let half = |x: i64| -> i64 {
        debug_assert!(x % 2 == 0);
        x / 2
    };
    let a = half(tj1 + tj2 - tj);
    let b = half(tj1 - tj2 + tj);
    let c = half(-tj1 + tj2 + tj);
    let jm = [
        half(tj + tm),
        half(tj - tm),
        half(tj1 - tm1),
        half(tj1 + tm1),
        half(tj2 - tm2),
        half(tj2 + tm2),
    ];

    // Prefactor (2J+1) Δ(j1 j2 J) Π (j±m)!
    let mut pref = Rational::new(
        (tj + 1) as i128 * factorial(a) * factorial(b) * factorial(c),
        factorial(half(tj1 + tj2 + tj) + 1),
    );
    for f in jm {
        pref = pref.mul(Rational::new(factorial(f), 1));
    }

    // Σ_k (−1)^k / [k!(j1+j2−J−k)!(j1−m1−k)!(j2+m2−k)!(J−j2+m1+k)!(J−j1−m2+k)!]
    let d1 = half(tj - tj2 + tm1);
    let d2 = half(tj - tj1 - tm2);
    let mut sum = Rational::ZERO;
    for k in 0..=a.max(0) {
        let args = [k, a - k, jm[2] - k, jm[5] - k, d1 + k, d2 + k];
        if args.iter().any(|&x| x < 0) {
            continue;
        }
        let den: i128 = args.iter().map(|&x| factorial(x)).product();
        let sign = if k % 2 == 0 { 1 } else { -1 };
        sum = sum.add(Rational::new(sign, den));
    }

    if sum.num == 0 {
        return Ok(0.0);
    }
    let sign = if sum.num < 0 { -1.0 } else { 1.0 };
    let s = sum.to_f64();
    Ok(sign * (pref.to_f64() * s * s).sqrt())
}

/// Clebsch-Gordan coefficient with half-integer quantum numbers given as
/// floats (e.g. `clebsch_gordan(0.5, 0.5, 0.5, -0.5, 1.0, 0.0)`).
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64, Error> {
    let dbl = |x: f64| -> Result<i64, Error> {
        let t = 2.0 * x;
        let r = num_traits::Float::round(t);
        if (t - r).abs() > 1e-9 {
            return Err(Error::InvalidQuantumNumbers);
        }
        Ok(r as i64)
    };
    clebsch_gordan_doubled(dbl(j1)?, dbl(m1)?, dbl(j2)?, dbl(m2)?, dbl(j)?, dbl(m)?)
}

// ---------------------------------------------------------------------------
// Dipole matrix elements on the J=1 -> J=1 transition.

/// ⟨s_{m'}| d_q |e_m⟩ = ⟨1 m; 1 q | 1 m'⟩ in units of the reduced matrix
/// element (Wigner-Eckart, Condon-Shortley).
fn spherical_component(m_initial: i64, q: i64, m_final: i64) -> f64 {
    clebsch_gordan_doubled(2, 2 * m_initial, 2, 2 * q, 2, 2 * m_final)
        .expect("valid J=1 quantum numbers")
}

/// ⟨s_{m'}| d·e |e_m⟩ for a single spherical initial component. The vector
/// components are d·e_± = ∓d_{±1}, d·e_z = d_0.
fn spherical_element(m_initial: i64, m_final: i64, pol: Polarization) -> C64 {
    let sigma_plus = -spherical_component(m_initial, 1, m_final);
    let sigma_minus = spherical_component(m_initial, -1, m_final);
    match pol {
        Polarization::Plus => C64::new(sigma_plus, 0.0),
        Polarization::Minus => C64::new(sigma_minus, 0.0),
        Polarization::Z => C64::new(spherical_component(m_initial, 0, m_final), 0.0),
        Polarization::X => C64::new(sigma_plus + sigma_minus, 0.0),
        Polarization::Y => C64::new(0.0, -(sigma_plus - sigma_minus)),
    }
}

/// Dipole matrix element ⟨final| d·e |initial⟩ on the ³P₁ → ³S₁ (J=1 → J=1)
/// transition, in units of the reduced matrix element.
pub fn dipole_element(
    initial: P1State,
    final_state: AngularState,
    pol: Polarization,
) -> Result<C64, Error> {
    if final_state.label != Manifold::S1 || final_state.two_j != 2 {
        return Err(Error::UnsupportedTransition);
    }
    if final_state.two_m % 2 != 0 {
        return Err(Error::InvalidQuantumNumbers);
    }
    let m_final = final_state.two_m / 2;
    match initial {
        P1State::Spherical(m) => {
            if m.abs() > 1 {
                return Err(Error::InvalidQuantumNumbers);
            }
            Ok(spherical_element(m, m_final, pol))
        }
        P1State::Cartesian(axis) => {
            let amps = CartesianP1State { axis }.decomposition();
            let mut acc = C64::new(0.0, 0.0);
            for (amp, m) in amps.iter().zip([1i64, 0, -1]) {
                if *amp != C64::new(0.0, 0.0) {
                    acc += amp * spherical_element(m, m_final, pol);
                }
            }
            Ok(acc)
        }
    }
}

/// One row of the selection-rule table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub initial: Axis,
    pub m_final: i64,
    pub value: C64,
}

/// Result of enumerating the x-polarization couplings from the Cartesian
/// ³P₁ states to the ³S₁ sublevels.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    pub polarization: Polarization,
    pub entries: Vec<TableEntry>,
    /// True when the e_x row is entirely zero and the e_y row couples only
    /// to s_0.
    pub rules_hold: bool,
    pub failures: Vec<String>,
}

/// Enumerate all 9 Cartesian-³P₁ × ³S₁ x-polarization elements and check
/// the zero/nonzero pattern: e_x couples to nothing, e_y only to s_0.
pub fn verify_selection_rules() -> SelectionReport {
    selection_table(Polarization::X)
}

/// The full 9-element table for an arbitrary polarization; the rule check
/// is only asserted for x.
pub fn selection_table(pol: Polarization) -> SelectionReport {
    use alloc::format;
    let mut entries = Vec::with_capacity(9);
    let mut failures = Vec::new();
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        for m_final in [-1i64, 0, 1] {
            let value = dipole_element(P1State::Cartesian(axis), AngularState::s1(m_final), pol)
                .expect("J=1 -> J=1 element");
            if pol == Polarization::X {
                let zero = value == C64::new(0.0, 0.0);
                let must_be_nonzero = axis == Axis::Y && m_final == 0;
                let must_be_zero = matches!(axis, Axis::X | Axis::Y) && !must_be_nonzero;
                if must_be_nonzero && zero {
                    failures.push(format!("expected nonzero: {} -> s_{m_final}", axis.label()));
                }
                if must_be_zero && !zero {
                    failures.push(format!(
                        "expected zero: {} -> s_{m_final}, got {value}",
                        axis.label()
                    ));
                }
            }
            entries.push(TableEntry {
                initial: axis,
                m_final,
                value,
            });
        }
    }
    SelectionReport {
        polarization: pol,
        rules_hold: failures.is_empty(),
        entries,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_HALF: f64 = core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn cg_known_values() {
        // Antisymmetry of 1⊗1 -> 1 kills the (0,0) element.
        assert_eq!(clebsch_gordan(1.0, 0.0, 1.0, 0.0, 1.0, 0.0).unwrap(), 0.0);
        // Ladder-operator values.
        assert!((clebsch_gordan(1.0, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap().abs() - SQRT_HALF).abs() < 1e-15);
        assert!((clebsch_gordan(1.0, 1.0, 1.0, -1.0, 0.0, 0.0).unwrap() - 1.0 / 3.0f64.sqrt()).abs() < 1e-15);
        // Signs in the 1⊗1 -> 1, M = 0 block.
        assert!((clebsch_gordan(1.0, 1.0, 1.0, -1.0, 1.0, 0.0).unwrap() - SQRT_HALF).abs() < 1e-15);
        assert!((clebsch_gordan(1.0, -1.0, 1.0, 1.0, 1.0, 0.0).unwrap() + SQRT_HALF).abs() < 1e-15);
        // Half-integer case: ⟨½ ½; ½ −½ | 0 0⟩ = 1/√2.
        assert!((clebsch_gordan(0.5, 0.5, 0.5, -0.5, 0.0, 0.0).unwrap() - SQRT_HALF).abs() < 1e-15);
        // Stretch state.
        assert_eq!(clebsch_gordan(1.0, 1.0, 1.0, 1.0, 2.0, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn cg_ladder_operator_oracle() {
        // Independent oracle: build the coupled |J M⟩ states of 1⊗1 by
        // applying J_- to the stretch state and orthogonalizing, then read
        // off overlaps with the product basis.
        // J_-|j m> = √(j(j+1) − m(m−1)) |j m−1>.
        let lower = |j: f64, m: f64| ((j * (j + 1.0) - m * (m - 1.0)) as f64).sqrt();

        // |2 2> = |1 1>|1 1>; J_- gives |2 1> = (|1 0>|1 1> + |1 1>|1 0>)/√2.
        // Components ordered as amplitudes over (m1, m2) pairs.
        // |2 1>:
        let n = lower(2.0, 2.0); // 2
        let a_01 = lower(1.0, 1.0) / n; // amplitude of |0>|1>
        let a_10 = lower(1.0, 1.0) / n; // amplitude of |1>|0>
        assert!((a_01 - SQRT_HALF).abs() < 1e-15);
        assert!(
            (clebsch_gordan(1.0, 0.0, 1.0, 1.0, 2.0, 1.0).unwrap() - a_01).abs() < 1e-15
        );
        assert!(
            (clebsch_gordan(1.0, 1.0, 1.0, 0.0, 2.0, 1.0).unwrap() - a_10).abs() < 1e-15
        );

        // |1 1> is the M = 1 state orthogonal to |2 1> with CS phase
        // (positive amplitude on the highest m1): (|1>|0> − |0>|1>)/√2.
        assert!(
            (clebsch_gordan(1.0, 1.0, 1.0, 0.0, 1.0, 1.0).unwrap() - SQRT_HALF).abs() < 1e-15
        );
        assert!(
            (clebsch_gordan(1.0, 0.0, 1.0, 1.0, 1.0, 1.0).unwrap() + SQRT_HALF).abs() < 1e-15
        );

        // Lower |1 1> once: |1 0> = (|1>|−1> − |−1>|1>)/√2.
        // J_-(|1>|0> − |0>|1>)/√2 = (√2|0>|0> + √2|1>|−1> − √2|−1>|1> − √2|0>|0>)/(√2·√2)
        //                        = (|1>|−1> − |−1>|1>)/√2.
        assert!(
            (clebsch_gordan(1.0, 1.0, 1.0, -1.0, 1.0, 0.0).unwrap() - SQRT_HALF).abs() < 1e-15
        );
        assert!(
            (clebsch_gordan(1.0, -1.0, 1.0, 1.0, 1.0, 0.0).unwrap() + SQRT_HALF).abs() < 1e-15
        );
        assert_eq!(clebsch_gordan(1.0, 0.0, 1.0, 0.0, 1.0, 0.0).unwrap(), 0.0);

        // |0 0> orthogonal to both M = 0 states: (|1>|−1> − |0>|0> + |−1>|1>)/√3.
        assert!(
            (clebsch_gordan(1.0, 1.0, 1.0, -1.0, 0.0, 0.0).unwrap() - 1.0 / 3.0f64.sqrt()).abs() < 1e-15
        );
        assert!(
            (clebsch_gordan(1.0, 0.0, 1.0, 0.0, 0.0, 0.0).unwrap() + 1.0 / 3.0f64.sqrt()).abs() < 1e-15
        );
    }

    #[test]
    fn cg_orthogonality_exhaustive() {
        // Σ_{m1,m2} ⟨1 m1; 1 m2|J M⟩⟨1 m1; 1 m2|J' M'⟩ = δ_{JJ'} δ_{MM'}.
        for j in 0..=2i64 {
            for m in -j..=j {
                for jp in 0..=2i64 {
                    for mp in -jp..=jp {
                        let mut s = 0.0;
                        for m1 in -1..=1i64 {
                            for m2 in -1..=1i64 {
                                let a = clebsch_gordan_doubled(2, 2 * m1, 2, 2 * m2, 2 * j, 2 * m)
                                    .unwrap();
                                let b = clebsch_gordan_doubled(2, 2 * m1, 2, 2 * m2, 2 * jp, 2 * mp)
                                    .unwrap();
                                s += a * b;
                            }
                        }
                        let expect = if j == jp && m == mp { 1.0 } else { 0.0 };
                        assert!((s - expect).abs() < 1e-14, "J={j} M={m} J'={jp} M'={mp}: {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn cg_invalid_inputs() {
        assert_eq!(
            clebsch_gordan(1.0, 2.0, 1.0, 0.0, 1.0, 2.0),
            Err(Error::InvalidQuantumNumbers)
        );
        assert_eq!(
            clebsch_gordan(1.3, 0.0, 1.0, 0.0, 1.0, 0.0),
            Err(Error::InvalidQuantumNumbers)
        );
        // Violated triangle inequality is a zero, not an error.
        assert_eq!(clebsch_gordan(1.0, 0.0, 1.0, 0.0, 5.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn cartesian_basis_is_unitary() {
        let states = [Axis::X, Axis::Y, Axis::Z].map(|a| CartesianP1State { axis: a }.decomposition());
        for (i, si) in states.iter().enumerate() {
            for (j, sj) in states.iter().enumerate() {
                let mut dot = C64::new(0.0, 0.0);
                for k in 0..3 {
                    dot += si[k].conj() * sj[k];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - C64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn raman_beam_couples_only_ey_to_s0() {
        let e_y_s0 = dipole_element(P1State::Cartesian(Axis::Y), AngularState::s1(0), Polarization::X)
            .unwrap();
        assert!(e_y_s0.norm() > 0.5);
        for m in [-1i64, 1] {
            let v = dipole_element(P1State::Cartesian(Axis::Y), AngularState::s1(m), Polarization::X)
                .unwrap();
            assert_eq!(v, C64::new(0.0, 0.0));
        }
        for m in -1..=1i64 {
            let v = dipole_element(P1State::Cartesian(Axis::X), AngularState::s1(m), Polarization::X)
                .unwrap();
            assert_eq!(v, C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn sigma_component_equality() {
        // ⟨s_0| d·e_+ |e_{−1}⟩ = ⟨s_0| d·e_− |e_{+1}⟩, exactly.
        let a = dipole_element(P1State::Spherical(-1), AngularState::s1(0), Polarization::Plus)
            .unwrap();
        let b = dipole_element(P1State::Spherical(1), AngularState::s1(0), Polarization::Minus)
            .unwrap();
        assert_eq!(a, b);
        assert!(a.norm() > 0.0);
    }

    #[test]
    fn z_polarization_is_pi_transitions() {
        // e_z couples with Δm = 0 only.
        for m_i in -1..=1i64 {
            for m_f in -1..=1i64 {
                let v = dipole_element(P1State::Spherical(m_i), AngularState::s1(m_f), Polarization::Z)
                    .unwrap();
                if m_i != m_f {
                    assert_eq!(v, C64::new(0.0, 0.0));
                }
            }
        }
        // The π ⟨s_0|d_0|e_0⟩ element vanishes by the 1⊗1 -> 1 antisymmetry,
        // but the m = ±1 π elements do not.
        let v = dipole_element(P1State::Spherical(1), AngularState::s1(1), Polarization::Z).unwrap();
        assert!(v.norm() > 0.5);
    }

    #[test]
    fn report_table_pattern() {
        let report = verify_selection_rules();
        assert!(report.rules_hold, "{:?}", report.failures);
        assert_eq!(report.entries.len(), 9);
        let nonzero: Vec<_> = report
            .entries
            .iter()
            .filter(|e| !matches!(e.initial, Axis::Z) && e.value != C64::new(0.0, 0.0))
            .collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].initial, Axis::Y);
        assert_eq!(nonzero[0].m_final, 0);
    }

    #[test]
    fn unsupported_transition_rejected() {
        let bad = AngularState::new(4, 0, Manifold::S1).unwrap(); // J = 2
        assert_eq!(
            dipole_element(P1State::Spherical(0), bad, Polarization::X),
            Err(Error::UnsupportedTransition)
        );
    }
}
