//! The five-mode linear Heisenberg-Langevin system in the rotated frame.
//!
//! Mode order is (a_x, B_x, B_y, C_S, C_P). The expectation-value equations
//! are `i ẋ = M x + d`, with the drive `d` nonzero only in the cavity slot.
//! Frequency fluctuations enter as deterministic diagonal offsets: Δ_c on
//! a_x, −(Δ_t+Δ_r)/2 on C_S and −Δ_r on C_P.

use crate::error::Error;
use crate::linalg::{self, gershgorin_radius, mat_norm, matvec, vec_norm, Mat5, Vec5, C64, ZERO_MAT, ZERO_VEC};
use crate::params::PhysicalParams;
use alloc::vec::Vec;

pub const A_X: usize = 0;
pub const B_X: usize = 1;
pub const B_Y: usize = 2;
pub const C_S: usize = 3;
pub const C_P: usize = 4;

/// Coefficient matrix and drive of `i ẋ = M x + d` at a fixed probe
/// detuning δ_p = ω_A − ω_p.
#[derive(Debug, Clone, PartialEq)]
pub struct LangevinSystem {
    pub matrix: Mat5,
    pub drive: Vec5,
    pub delta_p: f64,
}

/// Steady-state (or instantaneous) expectation values of the five modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeAmplitudes {
    pub a_x: C64,
    pub b_x: C64,
    pub b_y: C64,
    pub c_s: C64,
    pub c_p: C64,
}

impl ModeAmplitudes {
    pub const ZERO: ModeAmplitudes = ModeAmplitudes {
        a_x: C64::new(0.0, 0.0),
        b_x: C64::new(0.0, 0.0),
        b_y: C64::new(0.0, 0.0),
        c_s: C64::new(0.0, 0.0),
        c_p: C64::new(0.0, 0.0),
    };

    pub fn from_vec5(v: &Vec5) -> Self {
        ModeAmplitudes {
            a_x: v[A_X],
            b_x: v[B_X],
            b_y: v[B_Y],
            c_s: v[C_S],
            c_p: v[C_P],
        }
    }

    pub fn to_vec5(&self) -> Vec5 {
        [self.a_x, self.b_x, self.b_y, self.c_s, self.c_p]
    }

    /// Total excited-mode population (everything but the cavity field).
    pub fn atomic_excitation(&self) -> f64 {
        self.b_x.norm_sqr() + self.b_y.norm_sqr() + self.c_s.norm_sqr() + self.c_p.norm_sqr()
    }
}

/// Drive-free coefficient matrix with the probe detuning removed, i.e.
/// `M − δ_p·I`. This is the non-Hermitian single-excitation matrix whose
/// eigenvalues locate the transmission peaks.
pub fn drive_free_matrix(p: &PhysicalParams) -> Mat5 {
    let mut m = ZERO_MAT;
    let i = C64::new(0.0, 1.0);
    let half = 0.5;

    m[A_X][A_X] = C64::new(p.fluct.delta_c, -half * p.kappa);
    m[B_X][B_X] = C64::new(0.0, -half * p.gamma);
    m[B_Y][B_Y] = C64::new(0.0, -half * p.gamma);
    m[C_S][C_S] = C64::new(-half * (p.fluct.delta_t + p.fluct.delta_r), -half * p.gamma_s);
    m[C_P][C_P] = C64::new(-p.fluct.delta_r, 0.0);

    m[A_X][B_X] = C64::new(half * p.omega_n, 0.0);
    m[B_X][A_X] = C64::new(half * p.omega_n, 0.0);

    m[B_X][B_Y] = -i * C64::new(half * p.delta, 0.0);
    m[B_Y][B_X] = i * C64::new(half * p.delta, 0.0);

    m[B_Y][C_S] = p.g_alpha.conj() * half;
    m[C_S][B_Y] = p.g_alpha * half;
    m[C_S][C_P] = p.g_beta * half;
    m[C_P][C_S] = p.g_beta.conj() * half;
    m
}

/// Build the full driven system at probe detuning `delta_p`.
pub fn build_system(p: &PhysicalParams, delta_p: f64) -> LangevinSystem {
    let mut m = drive_free_matrix(p);
    for k in 0..linalg::DIM {
        m[k][k] += C64::new(delta_p, 0.0);
    }
    let mut d = ZERO_VEC;
    d[A_X] = C64::new(0.0, p.drive_amplitude);
    LangevinSystem {
        matrix: m,
        drive: d,
        delta_p,
    }
}

/// Steady state of `i ẋ = M x + d`, i.e. the solution of `M x = −d`.
///
/// The residual `‖Mx + d‖` is recomputed and asserted against
/// `1e-12 (‖M‖‖x‖ + ‖d‖)`.
pub fn steady_state(sys: &LangevinSystem) -> Result<ModeAmplitudes, Error> {
    let mut neg_d = ZERO_VEC;
    for k in 0..linalg::DIM {
        neg_d[k] = -sys.drive[k];
    }
    // A mode with no couplings and no decay (e.g. the ground-state
    // coherence with the Raman pair off, at δ_p = 0) leaves an all-zero
    // row. Undriven, its amplitude is zero; pin it so the LU stays regular.
    let mut m = sys.matrix;
    for i in 0..linalg::DIM {
        if m[i].iter().all(|e| e.norm_sqr() == 0.0) {
            if neg_d[i].norm_sqr() != 0.0 {
                return Err(Error::SingularSystem);
            }
            m[i][i] = linalg::C64::new(1.0, 0.0);
        }
    }
    let x = linalg::solve(&m, &neg_d)?;
    let mx = matvec(&sys.matrix, &x);
    let mut res = 0.0f64;
    for k in 0..linalg::DIM {
        res += (mx[k] + sys.drive[k]).norm_sqr();
    }
    let res = num_traits::Float::sqrt(res);
    let bound = 1e-12 * (mat_norm(&sys.matrix) * vec_norm(&x) + vec_norm(&sys.drive));
    debug_assert!(res <= bound, "steady-state residual {res} exceeds {bound}");
    if res > bound {
        return Err(Error::SingularSystem);
    }
    Ok(ModeAmplitudes::from_vec5(&x))
}

/// A fixed-step time-domain trajectory. Stored samples are decimated so the
/// buffer stays bounded; the exact final state is always kept.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ModeAmplitudes>,
    pub final_time: f64,
    pub final_state: ModeAmplitudes,
    pub steps: u64,
}

const MAX_SAMPLES: usize = 4096;

/// Integrate `ẋ = −i (M x + d)` with classic fourth-order Runge-Kutta.
///
/// Exists as a verification oracle for [`steady_state`]; the spectrum path
/// never calls it. Requires `dt * gershgorin_radius(M) < 0.1`.
pub fn integrate(
    sys: &LangevinSystem,
    x0: &ModeAmplitudes,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory, Error> {
    let radius = gershgorin_radius(&sys.matrix);
    if !(dt > 0.0) || dt * radius >= 0.1 {
        return Err(Error::StepTooLarge { dt, radius });
    }
    let n_steps = if t_final <= 0.0 {
        0
    } else {
        num_traits::Float::ceil(t_final / dt) as u64
    };
    let stride = (n_steps / MAX_SAMPLES as u64).max(1);

    let deriv = |x: &Vec5| -> Vec5 {
        let mut v = matvec(&sys.matrix, x);
        for k in 0..linalg::DIM {
            v[k] = C64::new(0.0, -1.0) * (v[k] + sys.drive[k]);
        }
        v
    };

    let mut x = x0.to_vec5();
    let mut times = Vec::new();
    let mut states = Vec::new();
    times.push(0.0);
    states.push(*x0);

    let mut t = 0.0;
    for step in 1..=n_steps {
        // Shorten the last step to land exactly on t_final.
        let h = if t + dt > t_final { t_final - t } else { dt };
        let k1 = deriv(&x);
        let mut x2 = x;
        for k in 0..linalg::DIM {
            x2[k] += k1[k] * (0.5 * h);
        }
        let k2 = deriv(&x2);
        let mut x3 = x;
        for k in 0..linalg::DIM {
            x3[k] += k2[k] * (0.5 * h);
        }
        let k3 = deriv(&x3);
        let mut x4 = x;
        for k in 0..linalg::DIM {
            x4[k] += k3[k] * h;
        }
        let k4 = deriv(&x4);
        for k in 0..linalg::DIM {
            x[k] += (k1[k] + (k2[k] + k3[k]) * 2.0 + k4[k]) * (h / 6.0);
        }
        t += h;
        if step % stride == 0 || step == n_steps {
            times.push(t);
            states.push(ModeAmplitudes::from_vec5(&x));
        }
    }
    Ok(Trajectory {
        final_time: t,
        final_state: ModeAmplitudes::from_vec5(&x),
        steps: n_steps,
        times,
        states,
    })
}

/// Largest stable step for [`integrate`] with a safety factor against the
/// Gershgorin precondition.
pub fn stable_step(sys: &LangevinSystem) -> f64 {
    0.099 / gershgorin_radius(&sys.matrix).max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{validate, FluctuationSet, RawParams};
    use crate::{khz, mhz};
    use proptest::prelude::*;

    fn fig3_raw(g_alpha_mhz: f64, g_beta_mhz: f64) -> RawParams {
        RawParams {
            omega_n: mhz(5.0),
            delta: Some(mhz(1.0)),
            kappa: khz(150.0),
            gamma: khz(7.5),
            gamma_s: mhz(5.3),
            g_alpha: C64::new(mhz(g_alpha_mhz), 0.0),
            g_beta: C64::new(mhz(g_beta_mhz), 0.0),
            n_atoms: 1_000_000,
            ..RawParams::default()
        }
    }

    fn fig3b() -> PhysicalParams {
        validate(&fig3_raw(10.0, 2.0)).unwrap()
    }

    #[test]
    fn all_couplings_off_gives_diagonal() {
        let mut raw = fig3_raw(0.0, 0.0);
        raw.omega_n = 0.0;
        raw.delta = Some(0.0);
        let p = validate(&raw).unwrap();
        let sys = build_system(&p, khz(3.0));
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert_eq!(sys.matrix[i][j], C64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn zeeman_coupling_entries() {
        // Δ = 2π·1 MHz → M[B_x,B_y] = −i·2π·0.5 MHz, M[B_y,B_x] = +i·2π·0.5 MHz.
        let sys = build_system(&fig3b(), 0.0);
        assert_eq!(sys.matrix[B_X][B_Y], C64::new(0.0, -mhz(0.5)));
        assert_eq!(sys.matrix[B_Y][B_X], C64::new(0.0, mhz(0.5)));
    }

    #[test]
    fn matrix_entries_match_invariants() {
        let p = fig3b();
        let dp = khz(12.0);
        let sys = build_system(&p, dp);
        assert_eq!(sys.matrix[A_X][B_X], C64::new(mhz(2.5), 0.0));
        assert_eq!(sys.matrix[B_X][A_X], C64::new(mhz(2.5), 0.0));
        assert_eq!(sys.matrix[B_Y][C_S], p.g_alpha.conj() * 0.5);
        assert_eq!(sys.matrix[C_S][B_Y], p.g_alpha * 0.5);
        assert_eq!(sys.matrix[C_S][C_P], p.g_beta * 0.5);
        assert_eq!(sys.matrix[C_P][C_S], p.g_beta.conj() * 0.5);
        assert_eq!(sys.matrix[A_X][A_X], C64::new(dp, -0.5 * p.kappa));
        assert_eq!(sys.matrix[B_X][B_X], C64::new(dp, -0.5 * p.gamma));
        assert_eq!(sys.matrix[B_Y][B_Y], C64::new(dp, -0.5 * p.gamma));
        assert_eq!(sys.matrix[C_S][C_S], C64::new(dp, -0.5 * p.gamma_s));
        assert_eq!(sys.matrix[C_P][C_P], C64::new(dp, 0.0));
        assert_eq!(sys.drive[A_X], C64::new(0.0, 1.0));
        for k in 1..5 {
            assert_eq!(sys.drive[k], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn fluctuations_enter_the_right_diagonals() {
        // Δ_r = 2π·1 kHz only: C_P gains −2π·1 kHz, C_S gains −2π·0.5 kHz.
        let mut raw = fig3_raw(10.0, 2.0);
        raw.fluct = FluctuationSet {
            delta_c: 0.0,
            delta_t: 0.0,
            delta_r: khz(1.0),
        };
        let p = validate(&raw).unwrap();
        let dp = khz(40.0);
        let sys = build_system(&p, dp);
        assert_eq!(sys.matrix[C_P][C_P], C64::new(dp - khz(1.0), 0.0));
        assert_eq!(sys.matrix[C_S][C_S], C64::new(dp - khz(0.5), -0.5 * p.gamma_s));

        // Δ_c enters only the cavity diagonal.
        let mut raw = fig3_raw(10.0, 2.0);
        raw.fluct.delta_c = khz(30.0);
        let p2 = validate(&raw).unwrap();
        let sys2 = build_system(&p2, dp);
        assert_eq!(sys2.matrix[A_X][A_X], C64::new(dp + khz(30.0), -0.5 * p2.kappa));
        for k in 1..5 {
            assert_eq!(sys2.matrix[k][k], build_system(&p2.with_fluct(FluctuationSet::ZERO), dp).matrix[k][k]);
        }
    }

    #[test]
    fn anti_hermitian_part_is_pure_decay() {
        let p = fig3b();
        let sys = build_system(&p, khz(77.0));
        let m = &sys.matrix;
        // M − δ_p I splits into a Hermitian part and a diagonal
        // anti-Hermitian part −i diag(κ/2, γ/2, γ/2, Γ/2, 0).
        let decay = [0.5 * p.kappa, 0.5 * p.gamma, 0.5 * p.gamma, 0.5 * p.gamma_s, 0.0];
        for i in 0..5 {
            for j in 0..5 {
                let anti = (m[i][j] - m[j][i].conj()) * 0.5;
                if i == j {
                    assert!((anti - C64::new(0.0, -decay[i])).norm() < 1e-9);
                } else {
                    assert!(anti.norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn empty_cavity_on_resonance() {
        // Ω_N = 0, δ_p = 0: a_x = −i s/(−iκ/2) → |a_x| = 2s/κ, atoms dark.
        let mut raw = fig3_raw(0.0, 0.0);
        raw.omega_n = 0.0;
        raw.delta = Some(0.0);
        let p = validate(&raw).unwrap();
        let st = steady_state(&build_system(&p, 0.0)).unwrap();
        assert!((st.a_x.norm() - 2.0 / p.kappa).abs() < 1e-12 * (2.0 / p.kappa));
        assert_eq!(st.b_x, C64::new(0.0, 0.0));
        assert_eq!(st.c_p, C64::new(0.0, 0.0));
    }

    #[test]
    fn steady_state_linear_in_drive() {
        let p = fig3b();
        let st1 = steady_state(&build_system(&p, khz(2.0))).unwrap();
        let mut p2 = p;
        p2.drive_amplitude = 2.0;
        let st2 = steady_state(&build_system(&p2, khz(2.0))).unwrap();
        assert!((st2.a_x - st1.a_x * 2.0).norm() < 1e-12 * st1.a_x.norm());
        assert!((st2.c_s - st1.c_s * 2.0).norm() < 1e-12 * st1.c_s.norm().max(1e-300));
    }

    #[test]
    fn steady_state_continuous_in_delta_p() {
        // Adjacent grid evaluations differ by O(step); halving the grid step
        // halves the observed difference (away from resonances).
        let p = fig3b();
        let dp0 = khz(220.0);
        let diff = |h: f64| {
            let a = steady_state(&build_system(&p, dp0)).unwrap().a_x;
            let b = steady_state(&build_system(&p, dp0 + h)).unwrap().a_x;
            (b - a).norm()
        };
        let d1 = diff(khz(1.0));
        let d2 = diff(khz(0.5));
        assert!(d2 < 0.6 * d1, "d1={d1}, d2={d2}");
    }

    #[test]
    fn integrate_fixed_point_stays_fixed() {
        let p = fig3b();
        let sys = build_system(&p, khz(1.0));
        let st = steady_state(&sys).unwrap();
        let dt = stable_step(&sys);
        let traj = integrate(&sys, &st, 2000.0 * dt, dt).unwrap();
        let d = vec_norm(&{
            let a = traj.final_state.to_vec5();
            let b = st.to_vec5();
            let mut r = ZERO_VEC;
            for k in 0..5 {
                r[k] = a[k] - b[k];
            }
            r
        });
        assert!(d < 1e-9 * vec_norm(&st.to_vec5()));
    }

    #[test]
    fn integrate_zero_state_no_drive_stays_zero() {
        let mut p = fig3b();
        p.drive_amplitude = 1.0;
        let mut sys = build_system(&p, 0.0);
        sys.drive = ZERO_VEC;
        let dt = stable_step(&sys);
        let traj = integrate(&sys, &ModeAmplitudes::ZERO, 500.0 * dt, dt).unwrap();
        assert_eq!(traj.final_state, ModeAmplitudes::ZERO);
    }

    #[test]
    fn integrate_step_too_large_rejected() {
        let p = fig3b();
        let sys = build_system(&p, 0.0);
        let dt = 1.0 / gershgorin_radius(&sys.matrix);
        assert!(matches!(
            integrate(&sys, &ModeAmplitudes::ZERO, 10.0 * dt, dt),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn norm_conserved_without_decay_or_drive() {
        let mut raw = fig3_raw(10.0, 2.0);
        raw.kappa = khz(150.0); // validation needs κ>0; zero it below
        let mut p = validate(&raw).unwrap();
        p.kappa = 0.0;
        p.gamma = 0.0;
        p.gamma_s = 0.0;
        let mut sys = build_system(&p, khz(35.0));
        sys.drive = ZERO_VEC;
        let x0 = ModeAmplitudes {
            a_x: C64::new(0.3, -0.1),
            b_x: C64::new(-0.2, 0.4),
            b_y: C64::new(0.1, 0.1),
            c_s: C64::new(0.0, -0.3),
            c_p: C64::new(0.5, 0.2),
        };
        // Well inside the stability bound: RK4 norm drift per step scales
        // like (dt·ρ)⁶, so a 20x margin keeps 5000 steps below 1e-11.
        let dt = stable_step(&sys) / 20.0;
        let traj = integrate(&sys, &x0, 5000.0 * dt, dt).unwrap();
        let n0 = vec_norm(&x0.to_vec5());
        let n1 = vec_norm(&traj.final_state.to_vec5());
        assert!((n1 - n0).abs() < 1e-8 * n0, "drift = {}", (n1 - n0) / n0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn passivity_norm_nonincreasing(
            re in proptest::array::uniform5(-1.0f64..1.0),
            im in proptest::array::uniform5(-1.0f64..1.0),
            dp_khz in -3000.0f64..3000.0,
        ) {
            let p = fig3b();
            let mut sys = build_system(&p, khz(dp_khz));
            sys.drive = ZERO_VEC;
            let mut v = ZERO_VEC;
            for k in 0..5 {
                v[k] = C64::new(re[k], im[k]);
            }
            let x0 = ModeAmplitudes::from_vec5(&v);
            let dt = stable_step(&sys);
            let traj = integrate(&sys, &x0, 300.0 * dt, dt).unwrap();
            let mut last = vec_norm(&x0.to_vec5());
            for st in &traj.states {
                let n = vec_norm(&st.to_vec5());
                prop_assert!(n <= last * (1.0 + 1e-9) + 1e-12);
                last = n;
            }
        }
    }
}
