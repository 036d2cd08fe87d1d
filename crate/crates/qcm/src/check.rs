//! Randomized oracle-equivalence suites behind `qcm check`.
//!
//! Each suite draws its instances from one seeded ChaCha stream, so a given
//! `(trials, seed)` pair always reports the same deviations.

use qcm_core::decoherence::{
    conditional_amplitudes_with, renormalized_trapping_time, QubitOneForm,
};
use qcm_core::linalg::max_abs_diff;
use qcm_core::propagator::{
    closed_form_propagator, evolve_oracle_rk4, expm_propagator, IntegratorSettings,
};
use qcm_core::{
    build_dissipative_hamiltonian, build_hamiltonian, initial_state, CMatrix, StateVector,
    SystemConfig, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::table::{Cell, Table};

pub const UNITARITY_TOL: f64 = 1e-10;
pub const GROUP_TOL: f64 = 1e-10;
pub const EXPM_TOL: f64 = 1e-10;
pub const RK4_TOL: f64 = 1e-8;
pub const CONDITIONAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub trials: usize,
    pub seed: u64,
    /// Flip the sign of one qubit-qubit entry of the closed form.
    pub inject_sign_flip: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: String,
    pub trials: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    /// For adjudication rows: whether this is the form the library ships.
    pub shipped: bool,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.max_deviation.is_finite() && self.max_deviation < self.tolerance
    }

    fn status(&self) -> &'static str {
        match (self.name.starts_with("conditional"), self.passed()) {
            (true, true) => "accepted",
            (true, false) => "rejected",
            (false, true) => "pass",
            (false, false) => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub suites: Vec<SuiteResult>,
}

impl CheckReport {
    /// Suites whose failure is a breach: every suite except rejected
    /// alternative readings.
    pub fn failures(&self) -> Vec<&SuiteResult> {
        self.suites
            .iter()
            .filter(|s| !s.passed() && (s.shipped || !s.name.starts_with("conditional")))
            .collect()
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["suite", "trials", "max_deviation", "tolerance", "status"]);
        for s in &self.suites {
            t.push(vec![
                Cell::Text(s.name.clone()),
                s.trials.into(),
                s.max_deviation.into(),
                s.tolerance.into(),
                s.status().into(),
            ]);
        }
        t
    }
}

struct Instance {
    config: SystemConfig,
    t1: f64,
    t2: f64,
    theta: f64,
    alpha: f64,
}

fn draw_instance(rng: &mut ChaCha8Rng) -> Instance {
    let m = rng.random_range(1..=16usize);
    let couplings = (0..m).map(|_| rng.random_range(0.1..=2.0)).collect();
    Instance {
        config: SystemConfig::new(couplings).expect("positive couplings"),
        t1: rng.random_range(0.0..=3.0),
        t2: rng.random_range(0.0..=3.0),
        theta: rng.random_range(0.0..=std::f64::consts::PI),
        alpha: rng.random_range(0.0..std::f64::consts::TAU),
    }
}

fn propagator(config: &SystemConfig, t: f64, fault: bool) -> CMatrix {
    let mut u = closed_form_propagator(config, t).into_matrix();
    if fault {
        let m = config.m();
        let (i, j) = if m >= 3 { (m - 1, 1) } else { (1, 0) };
        u[(i, j)] = -u[(i, j)];
    }
    u
}

fn apply(u: &CMatrix, state: &StateVector) -> Vec<C64> {
    let mut out = vec![state.amplitudes()[0]];
    out.extend(u.apply(state.excited_block()));
    out
}

/// Runs all suites. With `trials == 0` the report is empty.
pub fn run_checks(opts: CheckOptions) -> CheckReport {
    if opts.trials == 0 {
        return CheckReport { suites: Vec::new() };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let fault = opts.inject_sign_flip;
    let settings = IntegratorSettings::default();
    let (mut unitarity, mut group, mut expm, mut rk4) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);

    for _ in 0..opts.trials {
        let inst = draw_instance(&mut rng);
        let cfg = &inst.config;
        let u1 = propagator(cfg, inst.t1, fault);
        unitarity = unitarity.max(u1.unitarity_defect());

        let u12 = u1.matmul(&propagator(cfg, inst.t2, fault));
        group = group.max(u12.max_abs_diff(&propagator(cfg, inst.t1 + inst.t2, fault)));

        let h = build_hamiltonian(cfg);
        let oracle = expm_propagator(&h, inst.t1).expect("Hermitian generator");
        expm = expm.max(oracle.max_abs_diff(&u1));

        let psi0 = initial_state(inst.theta, inst.alpha, cfg);
        let integrated = evolve_oracle_rk4(&h, &psi0, inst.t1, settings).expect("stable step");
        rk4 = rk4.max(max_abs_diff(integrated.amplitudes(), &apply(&u1, &psi0)));
    }

    let (mut damped, mut undamped) = (0.0f64, 0.0f64);
    for _ in 0..opts.trials {
        let m = rng.random_range(1..=12usize);
        let r = 6.0 - rng.random_range(0.0..6.0);
        let g = rng.random_range(0.0..=0.1);
        let k = rng.random_range(0.0..=0.1);
        let cfg = SystemConfig::star(m, r)
            .and_then(|c| c.decaying(g, k))
            .expect("valid star configuration");
        let tc = renormalized_trapping_time(&cfg, 1).expect("underdamped for r > 0, rates <= 0.1");
        let t = rng.random_range(0.0..=3.0 * tc);
        let integrated = evolve_oracle_rk4(
            &build_dissipative_hamiltonian(&cfg),
            &initial_state(0.0, 0.0, &cfg),
            t,
            settings,
        )
        .expect("stable step");
        for (form, slot) in [
            (QubitOneForm::Damped, &mut damped),
            (QubitOneForm::Undamped, &mut undamped),
        ] {
            let c = conditional_amplitudes_with(&cfg, t, form).expect("underdamped");
            let mut branch = vec![C64::default(), c.b1];
            branch.extend(std::iter::repeat_n(c.b, m - 1));
            branch.push(c.b_photon);
            *slot = slot.max(max_abs_diff(&branch, integrated.amplitudes()));
        }
    }

    let suite = |name: &str, max_deviation, tolerance, shipped| SuiteResult {
        name: name.to_owned(),
        trials: opts.trials,
        max_deviation,
        tolerance,
        shipped,
    };
    CheckReport {
        suites: vec![
            suite("unitarity", unitarity, UNITARITY_TOL, true),
            suite("group", group, GROUP_TOL, true),
            suite("expm", expm, EXPM_TOL, true),
            suite("rk4", rk4, RK4_TOL, true),
            suite(
                &format!("conditional[{}]", QubitOneForm::Damped.label()),
                damped,
                CONDITIONAL_TOL,
                true,
            ),
            suite(
                &format!("conditional[{}]", QubitOneForm::Undamped.label()),
                undamped,
                CONDITIONAL_TOL,
                false,
            ),
        ],
    }
}
