//! The invariant suite behind `parabose verify`.

use num_complex::Complex64 as C64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::completeness::{diagonal_identity_residual, identity_block_residual, weight, RadialRule, DEFAULT_NODES};
use crate::coordrep::{cs_normalization, cs_wavefunction, default_grid, half_line_integral, probability_density, vacuum_wavefunction};
use crate::dynamics::{assemble_A, solve_fg, CoefficientSchedule, Sinusoid};
use crate::error::{Error, Result};
use crate::fock::{build_ladder, evolve_sampled, AlgebraParams, EvolveOptions, OperatorMatrix};
use crate::observables::{cs_moments, matrix_moments, uncertainty_products};
use crate::oscillator::{
    analytic_state, asymptotic_uncertainties, calibrate_l, minima_times, sample, uncertainty_at, OscillatorConfig, Regime,
    RegimeGates,
};
use crate::states::{
    cs_amplitudes, cs_state, cs_transition, cs_truncation, svs_amplitudes, svs_state, svs_transition, svs_transition_sabotaged,
    CsSpec, SvsSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Outside the domain of the identity; not counted as a failure.
    Excluded,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Excluded => "excluded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
    Equal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub criterion: u8,
    pub name: &'static str,
    pub measured: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub status: Status,
    pub note: String,
}

impl Check {
    fn new(criterion: u8, name: &'static str, measured: f64, relation: Relation, tolerance: f64) -> Self {
        let ok = match relation {
            Relation::AtMost => measured <= tolerance,
            Relation::AtLeast => measured >= tolerance,
            Relation::Equal => measured == tolerance,
        };
        Self {
            criterion,
            name,
            measured,
            relation,
            tolerance,
            status: if ok { Status::Pass } else { Status::Fail },
            note: String::new(),
        }
    }

    fn at_most(criterion: u8, name: &'static str, r: Result<f64>, tolerance: f64) -> Self {
        match r {
            Ok(v) => Self::new(criterion, name, v, Relation::AtMost, tolerance),
            Err(e) => Self::failed(criterion, name, Relation::AtMost, tolerance, e),
        }
    }

    fn holds(criterion: u8, name: &'static str, r: Result<bool>) -> Self {
        match r {
            Ok(b) => Self::new(criterion, name, if b { 1.0 } else { 0.0 }, Relation::Equal, 1.0),
            Err(e) => Self::failed(criterion, name, Relation::Equal, 1.0, e),
        }
    }

    fn failed(criterion: u8, name: &'static str, relation: Relation, tolerance: f64, e: Error) -> Self {
        Self {
            criterion,
            name,
            measured: f64::NAN,
            relation,
            tolerance,
            status: Status::Fail,
            note: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub seed: u64,
    pub sabotage: bool,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.status == Status::Fail).count()
    }

    /// Fixed-width table, one line per check.
    pub fn table(&self) -> String {
        let mut s = format!("{:<4} {:<34} {:>12} {:>4} {:>10}  {}\n", "crit", "check", "measured", "", "tolerance", "status");
        for c in &self.checks {
            let rel = match c.relation {
                Relation::AtMost => "<=",
                Relation::AtLeast => ">=",
                Relation::Equal => "==",
            };
            s.push_str(&format!(
                "{:<4} {:<34} {:>12.3e} {:>4} {:>10.1e}  {}",
                c.criterion,
                c.name,
                c.measured,
                rel,
                c.tolerance,
                c.status.label()
            ));
            if !c.note.is_empty() {
                s.push_str(&format!("  ({})", c.note));
            }
            s.push('\n');
        }
        s.push_str(&format!(
            "{} checks, {} failed\n",
            self.checks.len(),
            self.failures()
        ));
        s
    }
}

pub fn run_suite(opts: &SuiteOptions) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = Vec::new();
    checks.push(Check::at_most(1, "algebra.relations", algebra_residual(), 1e-12));
    checks.push(Check::at_most(2, "motion.eigen_residual", eigen_residual(), 1e-6));
    checks.push(Check::at_most(3, "motion.mu_drift", mu_drift(&mut rng), 1e-9));
    let (svs_norm, cs_norm) = norms(&mut rng);
    checks.push(Check::at_most(4, "states.svs_norm", svs_norm, 1e-9));
    checks.push(Check::at_most(4, "states.cs_norm", cs_norm, 1e-9));
    checks.push(Check::at_most(5, "states.canonical_svs", canonical_svs(), 1e-12));
    checks.push(Check::at_most(5, "states.canonical_svs_transition", canonical_svs_transition(opts.sabotage), 1e-12));
    checks.push(Check::at_most(5, "states.canonical_cs", canonical_cs(), 1e-12));
    checks.push(Check::at_most(6, "transitions.svs_sum", svs_sum(opts.sabotage), 1e-9));
    checks.push(Check::at_most(6, "transitions.cs_sum", cs_sum(), 1e-9));
    checks.push(Check::at_most(6, "transitions.svs_match", svs_match(opts.sabotage), 1e-10));
    checks.push(Check::at_most(6, "transitions.cs_match", cs_match(), 1e-10));
    checks.push(Check::holds(6, "transitions.dispersion_order", dispersion_order()));
    checks.push(Check::at_most(6, "transitions.odd_gated_by_xi", odd_lines_at_zero_xi(), 0.0));
    let (mom, sr) = moments(&mut rng);
    checks.push(Check::at_most(7, "moments.closed_vs_matrix", mom, 1e-8));
    checks.push(Check::at_most(7, "moments.sr_saturation", sr, 1e-10));
    checks.push(Check::at_most(8, "coordrep.vacuum_norm", vacuum_norm(), 1e-8));
    checks.push(Check::at_most(8, "coordrep.cs_norm", coord_cs_norm(), 1e-8));
    checks.push(Check::at_most(8, "coordrep.density_routes", density_routes(), 1e-10));
    checks.push(Check::at_most(8, "coordrep.ell0_gaussian", ell0_gaussian(), 1e-10));
    checks.push(Check::at_most(9, "completeness.diagonal", completeness_diagonal(), 1e-8));
    checks.push(Check::at_most(9, "completeness.even_block", identity_block_residual(2.5, 8, DEFAULT_NODES), 1e-6));
    checks.push(excluded_completeness());
    checks.push(Check::holds(9, "completeness.rejects_eps_le_1", Ok(weight(1.0, 0.3).is_err() && weight(0.5, 0.3).is_err())));
    checks.push(Check::at_most(10, "oscillator.fidelity_defect", oscillator_fidelity_defect(), 1e-7));
    checks.push(Check::at_most(10, "oscillator.minima", minima_excess(), 1e-14));
    checks.push(Check::holds(10, "oscillator.asymptotic_convergence", asymptotic_convergence()));
    checks.push(Check::at_most(10, "oscillator.calibrate_round_trip", calibrate_round_trip(&mut rng), 1e-12));
    Report { checks }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn algebra_residual() -> Result<f64> {
    let n = 128;
    let mut worst = 0.0f64;
    for eps in [0.5, 1.5, 2.5] {
        let p = AlgebraParams::new(eps)?;
        let l = build_ladder(&p, n)?;
        let id = OperatorMatrix::identity(n);
        let two = c(2.0, 0.0);
        let anti = l.a.anticommutator(&l.a_dagger);
        let residuals = [
            l.a.commutator(&l.a_dagger).sub(&id.add(&l.reflection.scale(c(p.nu, 0.0)))),
            l.reflection.anticommutator(&l.a),
            l.reflection.anticommutator(&l.a_dagger),
            l.reflection.mul(&l.reflection).sub(&id),
            anti.commutator(&l.a).add(&l.a.scale(two)),
            anti.commutator(&l.a_dagger).sub(&l.a_dagger.scale(two)),
        ];
        for r in residuals {
            worst = worst.max(r.max_abs_leading(n - 4));
        }
    }
    Ok(worst)
}

fn eigen_residual() -> Result<f64> {
    let p = AlgebraParams::new(1.5)?;
    let n = 256;
    let period = 2.0 * std::f64::consts::PI;
    let (zeta0, xi0) = (c(0.2, 0.1), c(0.6, -0.3));
    let psi0 = cs_amplitudes(&CsSpec::new(zeta0, xi0, p.epsilon, 0.0)?, Some(n))?;
    let schedules = [
        CoefficientSchedule::constant(c(0.2, 0.1), 1.0, 0.3)?,
        CoefficientSchedule::sinusoidal(
            Sinusoid {
                offset: 0.1,
                amplitude: 0.1,
                omega: 1.0,
                phase: 0.0,
            },
            Sinusoid::constant(0.05),
            Sinusoid {
                offset: 1.0,
                amplitude: 0.2,
                omega: 2.0,
                phase: 0.3,
            },
            Sinusoid::constant(0.1),
        )?,
    ];
    let times: Vec<f64> = (0..=8).map(|k| period * k as f64 / 8.0).collect();
    let mut worst = 0.0f64;
    for s in &schedules {
        let mi = solve_fg(s, c(1.0, 0.0), zeta0, c(0.0, 0.0), period, period / 8192.0)?;
        let ev = evolve_sampled(&psi0, s, &times, 2.5e-3, &p, &EvolveOptions::default())?;
        for (t, psi) in ev.times.iter().zip(&ev.states) {
            let a = assemble_A(&mi, *t, &p, n)?;
            worst = worst.max(a.apply(psi).sub(&psi.scaled(xi0)).norm());
        }
    }
    Ok(worst)
}

fn random_schedule(rng: &mut ChaCha8Rng) -> Result<CoefficientSchedule> {
    let mut sin = |offset: (f64, f64), amp: f64| Sinusoid {
        offset: rng.random_range(offset.0..offset.1),
        amplitude: rng.random_range(0.0..amp),
        omega: rng.random_range(0.5..2.0),
        phase: rng.random_range(0.0..std::f64::consts::TAU),
    };
    let alpha_re = sin((-0.3, 0.3), 0.2);
    let alpha_im = sin((-0.3, 0.3), 0.2);
    let beta = sin((1.2, 2.0), 0.3);
    let delta = sin((-0.5, 0.5), 0.3);
    CoefficientSchedule::sinusoidal(alpha_re, alpha_im, beta, delta)
}

fn mu_drift(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let s = random_schedule(rng)?;
        let g0 = C64::from_polar(rng.random_range(0.0..0.6), rng.random_range(0.0..std::f64::consts::TAU));
        let mi = solve_fg(&s, c(1.0, 0.0), g0, c(0.0, 0.0), 4.0, 4.0 / 4096.0)?;
        worst = worst.max(mi.max_mu_drift / mi.mu.abs());
    }
    Ok(worst)
}

fn random_point(rng: &mut ChaCha8Rng, zeta_max: f64, xi_max: f64) -> (C64, C64, f64) {
    let tau = std::f64::consts::TAU;
    (
        C64::from_polar(rng.random_range(0.0..zeta_max), rng.random_range(0.0..tau)),
        C64::from_polar(rng.random_range(0.0..xi_max), rng.random_range(0.0..tau)),
        rng.random_range(0.5..5.0),
    )
}

fn norms(rng: &mut ChaCha8Rng) -> (Result<f64>, Result<f64>) {
    let mut svs = Ok(0.0f64);
    let mut cs = Ok(0.0f64);
    for _ in 0..100 {
        let (z, xi, eps) = random_point(rng, 0.8, 3.0);
        svs = svs.and_then(|w| Ok(w.max(svs_state(&SvsSpec::new(z, eps, 0.0)?, None)?.norm_residual)));
        cs = cs.and_then(|w| Ok(w.max(cs_state(&CsSpec::new(z, xi, eps, 0.0)?, None)?.norm_residual)));
    }
    (svs, cs)
}

/// Canonical squeezed vacuum `(1−|ζ|²)^{1/4} (−ζ)ⁿ √((2n)!)/(2ⁿ n!)`.
fn canonical_svs_oracle(zeta: C64, len: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(len);
    let mut c2n = C64::new((1.0 - zeta.norm_sqr()).powf(0.25), 0.0);
    for n in 0..len {
        out.push(c2n);
        let nf = n as f64;
        c2n *= -zeta * ((2.0 * nf + 1.0) / (2.0 * nf + 2.0)).sqrt();
    }
    out
}

fn canonical_svs() -> Result<f64> {
    let mut worst = 0.0f64;
    for z in [c(0.3, 0.0), c(-0.2, 0.5), c(0.0, 0.85)] {
        let v = svs_amplitudes(&SvsSpec::new(z, 0.5, 0.0)?, None)?;
        let oracle = canonical_svs_oracle(z, v.truncation() / 2);
        for (k, c) in v.amplitudes.iter().enumerate() {
            let want = if k % 2 == 0 { oracle[k / 2] } else { C64::new(0.0, 0.0) };
            worst = worst.max((c - want).norm());
        }
    }
    Ok(worst)
}

fn canonical_svs_transition(sabotage: bool) -> Result<f64> {
    let mut worst = 0.0f64;
    for z in [c(0.3, 0.0), c(-0.2, 0.5)] {
        let oracle = canonical_svs_oracle(z, 40);
        for (n, c) in oracle.iter().enumerate() {
            let p = if sabotage { svs_transition_sabotaged(z, 0.5, n)? } else { svs_transition(z, 0.5, n)? };
            worst = worst.max((p - c.norm_sqr()).abs());
        }
    }
    Ok(worst)
}

fn canonical_cs() -> Result<f64> {
    let mut worst = 0.0f64;
    for xi in [c(0.7, 0.2), c(-1.5, 1.0), c(0.0, 2.5)] {
        let v = cs_amplitudes(&CsSpec::new(c(0.0, 0.0), xi, 0.5, 0.0)?, None)?;
        let mut want = Vec::with_capacity(v.truncation());
        let mut cn = C64::new((-0.5 * xi.norm_sqr()).exp(), 0.0);
        for n in 0..v.truncation() {
            want.push(cn);
            cn *= xi / ((n + 1) as f64).sqrt();
        }
        let phase = v.amplitudes[0] / v.amplitudes[0].norm();
        for (a, b) in v.amplitudes.iter().zip(&want) {
            worst = worst.max((a - phase * b).norm());
        }
    }
    Ok(worst)
}

fn svs_sum(sabotage: bool) -> Result<f64> {
    let mut worst = 0.0f64;
    for (z, eps) in [(c(0.3, 0.0), 0.5), (c(0.3, 0.0), 6.5), (c(0.5, 0.6), 2.5), (c(-0.9, 0.0), 1.5)] {
        let mut total = 0.0;
        for n in 0..20_000 {
            let p = if sabotage { svs_transition_sabotaged(z, eps, n)? } else { svs_transition(z, eps, n)? };
            total += p;
            if n > 50 && p < 1e-20 {
                break;
            }
        }
        worst = worst.max((total - 1.0).abs());
    }
    Ok(worst)
}

fn cs_cases() -> [(C64, C64, f64); 4] {
    [
        (c(0.3, 0.0), c(1.0, 0.0), 0.5),
        (c(0.45, 0.0), c(0.0, 1.0), 2.5),
        (c(-0.2, 0.4), c(1.5, -0.7), 4.5),
        (c(0.0, 0.0), c(2.0, 1.0), 6.5),
    ]
}

fn cs_sum() -> Result<f64> {
    let mut worst = 0.0f64;
    for (z, xi, eps) in cs_cases() {
        let (n, _) = cs_truncation(&CsSpec::new(z, xi, eps, 0.0)?)?;
        let mut total = 0.0;
        for k in 0..n + 40 {
            total += cs_transition(z, xi, eps, k)?;
        }
        worst = worst.max((total - 1.0).abs());
    }
    Ok(worst)
}

fn svs_match(sabotage: bool) -> Result<f64> {
    let mut worst = 0.0f64;
    for (z, eps) in [(c(0.3, 0.0), 2.5), (c(0.1, -0.6), 0.5)] {
        let v = svs_amplitudes(&SvsSpec::new(z, eps, 0.0)?, None)?;
        for n in 0..v.truncation() / 2 {
            let p = if sabotage { svs_transition_sabotaged(z, eps, n)? } else { svs_transition(z, eps, n)? };
            worst = worst.max((p - v.amplitudes[2 * n].norm_sqr()).abs());
        }
    }
    Ok(worst)
}

fn cs_match() -> Result<f64> {
    let mut worst = 0.0f64;
    for (z, xi, eps) in cs_cases() {
        let v = cs_amplitudes(&CsSpec::new(z, xi, eps, 0.0)?, None)?;
        for (n, a) in v.amplitudes.iter().enumerate().take(60) {
            worst = worst.max((cs_transition(z, xi, eps, n)? - a.norm_sqr()).abs());
        }
    }
    Ok(worst)
}

/// Variance of the number distribution grows with ε at |ζ| = 0.3.
fn dispersion_order() -> Result<bool> {
    let mut prev = -1.0;
    for eps in [0.5, 2.5, 4.5, 6.5] {
        let (mut m1, mut m2) = (0.0, 0.0);
        for n in 0..400 {
            let p = svs_transition(c(0.3, 0.0), eps, n)?;
            let k = 2.0 * n as f64;
            m1 += k * p;
            m2 += k * k * p;
        }
        let var = m2 - m1 * m1;
        if var <= prev {
            return Ok(false);
        }
        prev = var;
    }
    Ok(true)
}

fn odd_lines_at_zero_xi() -> Result<f64> {
    let mut worst = 0.0f64;
    for eps in [0.5, 2.5, 4.5] {
        for n in 0..30 {
            worst = worst.max(cs_transition(c(0.4, 0.2), c(0.0, 0.0), eps, 2 * n + 1)?);
        }
    }
    Ok(worst)
}

fn moments(rng: &mut ChaCha8Rng) -> (Result<f64>, Result<f64>) {
    let mut run = || -> Result<(f64, f64)> {
        let (mut dm, mut dsr) = (0.0f64, 0.0f64);
        for _ in 0..50 {
            let (z, xi, _) = random_point(rng, 0.7, 2.0);
            let eps = rng.random_range(0.5..4.0);
            let l = rng.random_range(0.5..2.0);
            let p = AlgebraParams::new(eps)?.with_length_scale(l)?;
            let spec = CsSpec::new(z, xi, eps, 0.0)?;
            let auto = cs_amplitudes(&spec, None)?.truncation();
            let v = cs_amplitudes(&spec, Some(auto + 8))?;
            let a = cs_moments(&spec, &p)?;
            let b = matrix_moments(&v, &p)?;
            for (u, w) in [
                (a.mean_x, b.mean_x),
                (a.mean_p, b.mean_p),
                (a.var_x, b.var_x),
                (a.var_p, b.var_p),
                (a.cov_xp, b.cov_xp),
                (a.mean_r, b.mean_r),
            ] {
                dm = dm.max((u - w).abs());
            }
            let (_, sr) = uncertainty_products(&a, &p, z);
            dsr = dsr.max((a.var_x * a.var_p - a.cov_xp * a.cov_xp - sr).abs());
        }
        Ok((dm, dsr))
    };
    match run() {
        Ok((a, b)) => (Ok(a), Ok(b)),
        Err(e) => {
            let msg = e.to_string();
            (Err(e), Err(Error::Config(msg)))
        }
    }
}

fn vacuum_norm() -> Result<f64> {
    let mut worst = 0.0f64;
    for ell in 0..4 {
        for l in [0.6, 1.0, 1.7] {
            let n = half_line_integral(l, |x| Ok(2.0 * vacuum_wavefunction(ell, l, x)?.powi(2)))?;
            worst = worst.max((n - 1.0).abs());
        }
    }
    Ok(worst)
}

fn coord_cs_norm() -> Result<f64> {
    let mut worst = 0.0f64;
    for (ell, z, xi, l) in [
        (0, c(0.6, 0.2), c(2.0, 1.0), 0.7),
        (1, c(0.45, 0.0), c(0.0, 1.0), 1.0),
        (2, c(0.1, 0.8), c(1.5, 1.5), 2.0),
        (3, c(0.0, 0.0), c(3.0, 0.0), 1.0),
    ] {
        let p = AlgebraParams::from_ell(ell).with_length_scale(l)?;
        worst = worst.max((cs_normalization(&CsSpec::new(z, xi, p.epsilon, 0.0)?, &p)? - 1.0).abs());
    }
    Ok(worst)
}

fn density_routes() -> Result<f64> {
    let mut worst = 0.0f64;
    for ell in 0..4 {
        let p = AlgebraParams::from_ell(ell);
        let g = probability_density(&CsSpec::new(c(0.45, 0.0), c(0.0, 1.0), p.epsilon, 0.0)?, &p, &default_grid(1.0))?;
        worst = worst.max(g.route_difference);
    }
    Ok(worst)
}

/// ℓ = 0 against the displaced squeezed Gaussian.
fn ell0_gaussian() -> Result<f64> {
    let (z, xi, l) = (c(0.3, 0.2), c(0.8, 0.0), 1.2);
    let p = AlgebraParams::from_ell(0).with_length_scale(l)?;
    let spec = CsSpec::new(z, xi, 0.5, 0.0)?;
    let one = c(1.0, 0.0);
    let a = 1.0 - z.norm_sqr();
    let pref = a.powf(0.25) / (std::f64::consts::PI.sqrt() * l * (one - z)).sqrt();
    let mut worst = 0.0f64;
    for k in 0..40 {
        let x = 0.02 + 0.1 * k as f64;
        let shift = x - l * std::f64::consts::SQRT_2 * xi / (one + z);
        let e = -(one + z) / (one - z) * shift * shift / (2.0 * l * l) + (one + z.conj()) / ((one + z) * a) * xi * xi / 2.0
            - xi.norm_sqr() / (2.0 * a);
        worst = worst.max((cs_wavefunction(&spec, &p, x)? - pref * e.exp()).norm());
    }
    Ok(worst)
}

fn completeness_diagonal() -> Result<f64> {
    let mut worst = 0.0f64;
    for eps in [1.5, 2.5, 5.5] {
        for n in 0..=15 {
            worst = worst.max(diagonal_identity_residual(eps, n, DEFAULT_NODES, RadialRule::Jacobi)?);
        }
    }
    Ok(worst)
}

fn excluded_completeness() -> Check {
    match identity_block_residual(0.75, 8, DEFAULT_NODES) {
        Err(Error::CompletenessDomain { epsilon }) => Check {
            criterion: 9,
            name: "completeness.eps_0.75",
            measured: f64::NAN,
            relation: Relation::AtMost,
            tolerance: 1e-6,
            status: Status::Excluded,
            note: format!("epsilon = {epsilon} <= 1 has no resolution of the identity"),
        },
        Ok(v) => Check::new(9, "completeness.eps_0.75", v, Relation::AtMost, 1e-6),
        Err(e) => Check::failed(9, "completeness.eps_0.75", Relation::AtMost, 1e-6, e),
    }
}

/// `1 − min_t F(ψ_oracle(t), ψ_analytic(t))` over one period at N = 256.
fn oscillator_fidelity_defect() -> Result<f64> {
    let k = OscillatorConfig::new(1.0, 2, c(0.6, 0.0), c(0.0, 2.0), 1.0, 1.0)?;
    let n = 256;
    let psi0 = analytic_state(&k, 0.0, Some(n))?;
    let sched = CoefficientSchedule::constant(c(0.0, 0.0), k.omega0, 0.0)?;
    let times: Vec<f64> = (0..=8).map(|j| k.period() * j as f64 / 8.0).collect();
    let ev = evolve_sampled(&psi0, &sched, &times, 2.5e-4, &k.params(), &EvolveOptions::default())?;
    let mut worst = 0.0f64;
    for (t, psi) in ev.times.iter().zip(&ev.states) {
        worst = worst.max(1.0 - psi.fidelity(&analytic_state(&k, *t, Some(n))?));
    }
    Ok(worst)
}

fn minima_excess() -> Result<f64> {
    let mut worst = 0.0f64;
    for zeta in [C64::from_polar(0.55, 0.9), c(0.3, 0.0), C64::from_polar(0.75, -2.0)] {
        let k = OscillatorConfig::new(1.3, 2, zeta, c(0.4, 0.2), 1.0, 1.0)?;
        let grid: Vec<f64> = (0..=2000).map(|j| k.period() * j as f64 / 2000.0).collect();
        let mut lowest = f64::INFINITY;
        for &t in &grid {
            lowest = lowest.min(uncertainty_at(&k, t)?.0);
        }
        for tk in minima_times(&k, 0.0, k.period()) {
            worst = worst.max(uncertainty_at(&k, tk)?.0 - lowest);
        }
    }
    Ok(worst)
}

fn asymptotic_convergence() -> Result<bool> {
    let open = RegimeGates {
        small_xi_max: 1.0,
        ..RegimeGates::default()
    };
    let mut prev = f64::INFINITY;
    for x in [0.3, 0.1, 0.03] {
        let k = OscillatorConfig::new(1.0, 2, c(0.4, 0.0), c(x, 0.0), 1.0, 1.0)?;
        let exact = uncertainty_at(&k, 0.3)?.0;
        let approx = asymptotic_uncertainties(&k, Regime::SmallArgument, 0.3, &open)?.heisenberg;
        let rel = ((exact - approx) / exact).abs();
        if rel >= prev {
            return Ok(false);
        }
        prev = rel;
    }
    let mut prev = f64::INFINITY;
    for x in [5.0, 8.0, 12.0, 20.0] {
        let k = OscillatorConfig::new(1.0, 2, c(0.3, 0.0), c(x, 0.0), 1.0, 1.0)?;
        let exact = uncertainty_at(&k, 0.4)?;
        let approx = asymptotic_uncertainties(&k, Regime::LargeArgument, 0.4, &RegimeGates::default())?;
        let rel = ((exact.0 - approx.heisenberg) / exact.0).abs().max(((exact.1 - approx.sr) / exact.1).abs());
        if rel >= prev {
            return Ok(false);
        }
        prev = rel;
    }
    Ok(true)
}

fn calibrate_round_trip(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = rng.random_range(-0.9..0.9);
        let xi = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let ell = rng.random_range(0..4u32);
        let l = rng.random_range(0.2..5.0);
        let k = OscillatorConfig::new(1.0, ell, c(z, 0.0), xi, l, 1.0)?;
        let sx = sample(&k, 0.0)?.sigma_x;
        worst = worst.max((calibrate_l(sx, k.zeta0, xi, ell)? - l).abs() / l);
    }
    Ok(worst)
}
