//! Figure-data and oracle-dump commands.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;

use super::config::ScenarioConfig;
use super::output::{plot_script, write_atomic, PlotStyle, Table};
use crate::completeness::{weight_curve, WeightSpec, DEFAULT_NODES};
use crate::coordrep::{default_grid, probability_density};
use crate::dynamics::solve_zeta_xi;
use crate::error::{Error, Result};
use crate::fock::{evolve_sampled, AlgebraParams, EvolveOptions};
use crate::oscillator::{sample, stationary_transition, OscillatorConfig, FIG5_ZETAS};
use crate::states::{cs_amplitudes, cs_transition, svs_transition, CsSpec};

/// Files produced by a command, in write order.
pub type Written = Vec<PathBuf>;

struct Emitter<'a> {
    out: &'a Path,
    digits: usize,
    scripts: bool,
    written: Written,
}

impl<'a> Emitter<'a> {
    fn new(cfg: &ScenarioConfig, out: &'a Path) -> Result<Self> {
        Ok(Self {
            out,
            digits: cfg.digits()?,
            scripts: cfg.flag("plot_scripts", true),
            written: Vec::new(),
        })
    }

    fn table(&mut self, name: &str, table: &Table) -> Result<String> {
        let path = self.out.join(name);
        write_atomic(&path, &table.to_csv(self.digits)?)?;
        self.written.push(path);
        Ok(name.to_string())
    }

    fn script(&mut self, name: &str, body: String) -> Result<()> {
        if self.scripts {
            let path = self.out.join(name);
            write_atomic(&path, body.as_bytes())?;
            self.written.push(path);
        }
        Ok(())
    }
}

/// Shortest round-trip decimal, for file names.
fn tag(v: f64) -> String {
    format!("{v}")
}

fn n_max(cfg: &ScenarioConfig, default: u64) -> Result<usize> {
    let n = cfg.int("n_max", default);
    usize::try_from(n)
        .ok()
        .filter(|n| *n <= 100_000)
        .ok_or_else(|| Error::Config(format!("n_max too large: {n}")))
}

/// `n,P2n` per ε. A vanishing ζ gives the single row `P₀ = 1`.
pub fn svs_prob(cfg: &ScenarioConfig, out: &Path) -> Result<Written> {
    let mut em = Emitter::new(cfg, out)?;
    let zeta = cfg.zeta(C64::new(0.3, 0.0));
    let n_max = n_max(cfg, 20)?;
    let epsilons = if cfg.contains("epsilon") {
        vec![cfg.float("epsilon", 0.5)]
    } else {
        cfg.float_list("epsilons", &[0.5, 2.5, 4.5, 6.5])
    };
    let mut files = Vec::new();
    for eps in epsilons {
        let mut t = Table::new(&["n", "P2n"]).with_integer_column(0);
        let last = if zeta.norm() == 0.0 { 0 } else { n_max };
        for n in 0..=last {
            t.push(vec![n as f64, svs_transition(zeta, eps, n)?]);
        }
        let f = em.table(&format!("svs_prob_eps{}.csv", tag(eps)), &t)?;
        files.push((f, format!("eps = {}", tag(eps))));
    }
    em.script(
        "svs_prob.gp",
        plot_script(&format!("SVS transition, |zeta| = {}", tag(zeta.norm())), &files, "n", "P_2n", 2, PlotStyle::Impulses),
    )?;
    Ok(em.written)
}

/// `n,Pn` per ε.
pub fn cs_prob(cfg: &ScenarioConfig, out: &Path) -> Result<Written> {
    let mut em = Emitter::new(cfg, out)?;
    let zeta = cfg.zeta(C64::new(0.3, 0.0));
    let xi = cfg.xi(C64::new(1.0, 0.0));
    let n_max = n_max(cfg, 30)?;
    let epsilons = if cfg.contains("epsilon") {
        vec![cfg.float("epsilon", 0.5)]
    } else {
        cfg.float_list("epsilons", &[0.5, 2.5, 4.5, 6.5])
    };
    let mut files = Vec::new();
    for eps in epsilons {
        let spec = CsSpec::new(zeta, xi, eps, 0.0)?;
        let v = cs_amplitudes(&spec, None)?;
        let mut t = Table::new(&["n", "Pn"]).with_integer_column(0);
        for n in 0..=n_max {
            let p = if n < v.truncation() {
                v.amplitudes[n].norm_sqr()
            } else {
                cs_transition(zeta, xi, eps, n)?
            };
            t.push(vec![n as f64, p]);
        }
        let f = em.table(&format!("cs_prob_eps{}.csv", tag(eps)), &t)?;
        files.push((f, format!("eps = {}", tag(eps))));
    }
    em.script("cs_prob.gp", plot_script("CS transition", &files, "n", "P_n", 2, PlotStyle::Impulses))?;
    Ok(em.written)
}

/// `x,psi_re,psi_im,rho` per ℓ on the default hybrid grid, or on a uniform
/// grid when `x_min`, `x_max` or `points` is set.
pub fn density(cfg: &ScenarioConfig, out: &Path) -> Result<Written> {
    let mut em = Emitter::new(cfg, out)?;
    let l = cfg.float("l", 1.0);
    let hbar = cfg.float("hbar", 1.0);
    let zeta = cfg.zeta(C64::new(0.45, 0.0));
    let xi = cfg.xi(C64::new(0.0, 1.0));
    let ells = if cfg.contains("ell") {
        vec![cfg.int("ell", 0)]
    } else {
        cfg.int_list("ells", &[0, 1, 2, 3])
    };
    let grid = if cfg.contains("x_min") || cfg.contains("x_max") || cfg.contains("points") {
        let (a, b) = (cfg.float("x_min", 1e-3 * l), cfg.float("x_max", 10.0 * l));
        let n = cfg.int("points", 2048).max(2) as usize;
        if !(a > 0.0 && b > a) {
            return Err(Error::Config(format!("need 0 < x_min < x_max, got {a}, {b}")));
        }
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    } else {
        default_grid(l)
    };
    let mut files = Vec::new();
    for ell in ells {
        let ell = u32::try_from(ell).map_err(|_| Error::Config("ell too large".into()))?;
        let params = AlgebraParams::from_ell(ell).with_length_scale(l)?.with_hbar(hbar)?;
        let g = probability_density(&CsSpec::new(zeta, xi, params.epsilon, 0.0)?, &params, &grid)?;
        let mut t = Table::new(&["x", "psi_re", "psi_im", "rho"]);
        for ((x, psi), rho) in g.x_values.iter().zip(&g.psi_values).zip(&g.rho_values) {
            t.push(vec![*x, psi.re, psi.im, *rho]);
        }
        let f = em.table(&format!("density_ell{ell}.csv"), &t)?;
        files.push((f, format!("ell = {ell}")));
    }
    em.script("density.gp", plot_script("CS probability density", &files, "x", "rho", 4, PlotStyle::Lines))?;
    Ok(em.written)
}

/// `r,w` per ε on `[0, r_max]`.
pub fn weight(cfg: &ScenarioConfig, out: &Path) -> Result<Written> {
    let mut em = Emitter::new(cfg, out)?;
    let epsilons = if cfg.contains("epsilon") {
        vec![cfg.float("epsilon", 2.0)]
    } else {
        cfg.float_list("epsilons", &[1.5, 2.0, 3.0])
    };
    let r_max = cfg.float("r_max", 0.95);
    let points = cfg.int("points", 200) as usize;
    let nodes = cfg.int("nodes", DEFAULT_NODES as u64) as usize;
    let mut files = Vec::new();
    for eps in epsilons {
        let spec = WeightSpec::new(eps, r_max, nodes)?;
        let mut t = Table::new(&["r", "w"]);
        for (r, w) in weight_curve(&spec, points)? {
            t.push(vec![r, w]);
        }
        let f = em.table(&format!("weight_eps{}.csv", tag(eps)), &t)?;
        files.push((f, format!("eps = {}", tag(eps))));
    }
    em.script("weight.gp", plot_script("completeness weight", &files, "r", "w", 2, PlotStyle::Lines))?;
    Ok(em.written)
}

/// Per ζ₀: the trajectory table `t,x_mean,p_mean,sigma_x,sigma_p,heis,sr`
/// and the stationary distribution `n,Pn`.
pub fn oscillator(cfg: &ScenarioConfig, out: &Path) -> Result<Written> {
    let mut em = Emitter::new(cfg, out)?;
    let ell = u32::try_from(cfg.int("ell", 2)).map_err(|_| Error::Config("ell too large".into()))?;
    if cfg.contains("epsilon") {
        return Err(Error::Config("the oscillator is parametrized by ell".into()));
    }
    let omega0 = cfg.float("omega0", 1.0);
    let xi0 = cfg.xi(C64::from_polar(1.0, std::f64::consts::FRAC_PI_2));
    let zetas: Vec<C64> = if ["zeta_re", "zeta_im", "zeta_abs", "zeta_arg"].iter().any(|k| cfg.contains(k)) {
        vec![cfg.zeta(C64::new(0.0, 0.0))]
    } else {
        cfg.float_list("zetas", &FIG5_ZETAS).into_iter().map(|z| C64::new(z, 0.0)).collect()
    };
    let samples = cfg.int("samples", 201).max(2) as usize;
    let periods = cfg.float("periods", 1.0);
    let n_max = n_max(cfg, 30)?;
    let (mut traj_files, mut prob_files) = (Vec::new(), Vec::new());
    for zeta0 in zetas {
        let k = OscillatorConfig::new(omega0, ell, zeta0, xi0, cfg.float("l", 1.0), cfg.float("hbar", 1.0))?;
        let name = if zeta0.im == 0.0 { tag(zeta0.re) } else { format!("{}_{}", tag(zeta0.re), tag(zeta0.im)) };
        let t_end = periods * k.period();
        let mut t = Table::new(&["t", "x_mean", "p_mean", "sigma_x", "sigma_p", "heis", "sr"]);
        for j in 0..samples {
            let s = sample(&k, t_end * j as f64 / (samples - 1) as f64)?;
            t.push(vec![s.t, s.x_mean, s.p_mean, s.sigma_x, s.sigma_p, s.heisenberg, s.sr]);
        }
        let f = em.table(&format!("oscillator_zeta{name}.csv"), &t)?;
        traj_files.push((f, format!("zeta0 = {name}")));
        let mut p = Table::new(&["n", "Pn"]).with_integer_column(0);
        for n in 0..=n_max {
            p.push(vec![n as f64, stationary_transition(&k, n)?]);
        }
        let f = em.table(&format!("oscillator_prob_zeta{name}.csv"), &p)?;
        prob_files.push((f, format!("zeta0 = {name}")));
    }
    em.script(
        "oscillator_prob.gp",
        plot_script(&format!("oscillator transition, ell = {ell}"), &prob_files, "n", "P_n", 2, PlotStyle::Impulses),
    )?;
    em.script(
        "oscillator_heis.gp",
        plot_script("sigma_x sigma_p", &traj_files, "t", "heis", 6, PlotStyle::Lines),
    )?;
    Ok(em.written)
}

/// Oracle dump: the analytic CS along the solved trajectory against the
/// truncated-basis Schrödinger evolution of its initial state.
pub fn evolve(cfg: &ScenarioConfig, out: &Path) -> Result<Written> {
    let mut em = Emitter::new(cfg, out)?;
    let params = cfg.algebra(1.5)?;
    let schedule = cfg.schedule()?;
    let zeta0 = cfg.zeta(C64::new(0.2, 0.0));
    let xi0 = cfg.xi(C64::new(0.5, 0.0));
    let t_final = cfg.float("t_final", std::f64::consts::TAU);
    let dt = cfg.float("dt", 5e-3);
    let samples = cfg.int("samples", 21).max(2) as usize;
    let truncation = cfg.int("truncation", 128) as usize;
    let traj = solve_zeta_xi(&schedule, zeta0, xi0, params.epsilon, t_final, dt)?;
    let steps = traj.states.len() - 1;
    let mut picks: Vec<usize> = (0..samples).map(|j| j * steps / (samples - 1)).collect();
    picks.dedup();
    let times: Vec<f64> = picks.iter().map(|&k| traj.states[k].t).collect();
    let psi0 = cs_amplitudes(&CsSpec::new(zeta0, xi0, params.epsilon, 0.0)?, Some(truncation))?;
    let ev = evolve_sampled(&psi0, &schedule, &times, dt, &params, &EvolveOptions::default())?;
    let mut t = Table::new(&["t", "zeta_re", "zeta_im", "xi_re", "xi_im", "theta_cs", "fidelity"]);
    for (&k, psi) in picks.iter().zip(&ev.states) {
        let sp = traj.states[k];
        let analytic = cs_amplitudes(&CsSpec::new(sp.zeta, sp.xi, params.epsilon, sp.theta_cs)?, Some(truncation))?;
        t.push(vec![sp.t, sp.zeta.re, sp.zeta.im, sp.xi.re, sp.xi.im, sp.theta_cs, psi.fidelity(&analytic)]);
    }
    let f = em.table("evolve.csv", &t)?;
    em.script(
        "evolve.gp",
        plot_script("analytic vs oracle fidelity", &[(f, "fidelity".into())], "t", "F", 7, PlotStyle::Lines),
    )?;
    Ok(em.written)
}
