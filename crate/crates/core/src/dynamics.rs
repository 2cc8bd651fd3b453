//! Time-dependent coefficients and the integrals of motion.
//!
//! [`solve_fg`] integrates the Bogoliubov coefficients of
//! `A = f a + g a† + φ₀`, [`solve_zeta_xi`] the squeeze/displacement pair
//! together with the phase integrals, and [`assemble_A`] turns a solution
//! into a matrix on the truncated basis.

use std::path::Path;

use num_complex::Complex64 as C64;

use crate::error::{domain, Error, Result};
use crate::fock::{build_ladder, AlgebraParams, OperatorMatrix};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `offset + amplitude · sin(ω t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sinusoid {
    pub offset: f64,
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
}

impl Sinusoid {
    pub fn constant(offset: f64) -> Self {
        Self {
            offset,
            ..Self::default()
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.amplitude == 0.0 {
            self.offset
        } else {
            self.offset + self.amplitude * (self.omega * t + self.phase).sin()
        }
    }
}

/// One row of a tabulated schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleSample {
    pub t: f64,
    pub alpha: C64,
    pub beta: f64,
    pub delta: f64,
}

/// The functions α(t) (complex), β(t), δ(t) of the quadratic Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSchedule {
    Constant {
        alpha: C64,
        beta: f64,
        delta: f64,
    },
    Sinusoidal {
        alpha_re: Sinusoid,
        alpha_im: Sinusoid,
        beta: Sinusoid,
        delta: Sinusoid,
    },
    /// Piecewise linear between samples.
    Tabulated(Vec<ScheduleSample>),
}

fn positive_definite(t: f64, alpha: C64, beta: f64) -> Result<()> {
    if beta > alpha.norm() {
        Ok(())
    } else {
        Err(Error::NotPositiveDefinite {
            t,
            beta,
            alpha_abs: alpha.norm(),
        })
    }
}

impl CoefficientSchedule {
    pub fn constant(alpha: C64, beta: f64, delta: f64) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite() && beta.is_finite() && delta.is_finite()) {
            return Err(Error::Config("schedule coefficients must be finite".into()));
        }
        positive_definite(0.0, alpha, beta)?;
        Ok(Self::Constant { alpha, beta, delta })
    }

    pub fn sinusoidal(alpha_re: Sinusoid, alpha_im: Sinusoid, beta: Sinusoid, delta: Sinusoid) -> Result<Self> {
        for s in [&alpha_re, &alpha_im, &beta, &delta] {
            if ![s.offset, s.amplitude, s.omega, s.phase].iter().all(|v| v.is_finite()) {
                return Err(Error::Config("sinusoid parameters must be finite".into()));
            }
        }
        let sched = Self::Sinusoidal {
            alpha_re,
            alpha_im,
            beta,
            delta,
        };
        sched.sample(0.0)?;
        Ok(sched)
    }

    pub fn tabulated(samples: Vec<ScheduleSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Config("a tabulated schedule needs at least two rows".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::Config(format!(
                    "tabulated times must be strictly increasing ({} then {})",
                    w[0].t, w[1].t
                )));
            }
        }
        for s in &samples {
            if !(s.t.is_finite() && s.alpha.re.is_finite() && s.alpha.im.is_finite() && s.beta.is_finite() && s.delta.is_finite()) {
                return Err(Error::Config(format!("non-finite entry in row t = {}", s.t)));
            }
            positive_definite(s.t, s.alpha, s.beta)?;
        }
        Ok(Self::Tabulated(samples))
    }

    /// Read a CSV with header `t,alpha_re,alpha_im,beta,delta`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let header = reader.headers()?.clone();
        let expected = ["t", "alpha_re", "alpha_im", "beta", "delta"];
        if header.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Config(format!(
                "schedule table header must be `{}`, got `{}`",
                expected.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut samples = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            let mut vals = [0.0f64; 5];
            for (k, v) in vals.iter_mut().enumerate() {
                let field = record.get(k).unwrap_or("");
                *v = field.parse().map_err(|_| {
                    Error::Config(format!("schedule row {}: cannot parse `{field}` as a number", row + 1))
                })?;
            }
            samples.push(ScheduleSample {
                t: vals[0],
                alpha: C64::new(vals[1], vals[2]),
                beta: vals[3],
                delta: vals[4],
            });
        }
        Self::tabulated(samples)
    }

    /// `(α(t), β(t), δ(t))`, failing where β ≤ |α|.
    pub fn sample(&self, t: f64) -> Result<(C64, f64, f64)> {
        let (alpha, beta, delta) = match self {
            Self::Constant { alpha, beta, delta } => (*alpha, *beta, *delta),
            Self::Sinusoidal {
                alpha_re,
                alpha_im,
                beta,
                delta,
            } => (C64::new(alpha_re.eval(t), alpha_im.eval(t)), beta.eval(t), delta.eval(t)),
            Self::Tabulated(rows) => {
                let first = rows[0].t;
                let last = rows[rows.len() - 1].t;
                if t < first || t > last {
                    return Err(domain("schedule", format!("t = {t} outside the table range [{first}, {last}]")));
                }
                let k = rows.partition_point(|r| r.t <= t).clamp(1, rows.len() - 1);
                let (a, b) = (&rows[k - 1], &rows[k]);
                let s = (t - a.t) / (b.t - a.t);
                (
                    a.alpha + (b.alpha - a.alpha) * s,
                    a.beta + (b.beta - a.beta) * s,
                    a.delta + (b.delta - a.delta) * s,
                )
            }
        };
        positive_definite(t, alpha, beta)?;
        Ok((alpha, beta, delta))
    }

    pub fn family(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Sinusoidal { .. } => "sinusoidal",
            Self::Tabulated(_) => "tabulated",
        }
    }
}

/// Uniform grid `0, h, …, t_final` with `h ≤ dt`.
fn time_grid(t_final: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    if !(t_final >= 0.0) || !t_final.is_finite() {
        return Err(Error::Config(format!("t_final must be finite and >= 0, got {t_final}")));
    }
    if t_final == 0.0 {
        return Ok((0, 0.0));
    }
    let steps = (t_final / dt).ceil().max(1.0) as usize;
    Ok((steps, t_final / steps as f64))
}

/// Classical RK4 over a fixed grid for a system of complex components.
fn rk4<F>(y0: &[C64], steps: usize, h: f64, mut rhs: F, mut after_step: impl FnMut(f64, &[C64]) -> Result<()>) -> Result<Vec<Vec<C64>>>
where
    F: FnMut(f64, &[C64]) -> Result<Vec<C64>>,
{
    let n = y0.len();
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0.to_vec();
    out.push(y.clone());
    let shift = |y: &[C64], k: &[C64], s: f64| -> Vec<C64> { y.iter().zip(k).map(|(a, b)| a + b * s).collect() };
    for step in 0..steps {
        let t = step as f64 * h;
        let k1 = rhs(t, &y)?;
        let k2 = rhs(t + 0.5 * h, &shift(&y, &k1, 0.5 * h))?;
        let k3 = rhs(t + 0.5 * h, &shift(&y, &k2, 0.5 * h))?;
        let k4 = rhs(t + h, &shift(&y, &k3, h))?;
        for i in 0..n {
            y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        after_step(t + h, &y)?;
        out.push(y.clone());
    }
    Ok(out)
}

const HALVING_LIMIT: f64 = 1e-8;

/// Max over the coarse grid of `|coarse − fine|`, relative to max(1, |fine|).
fn halving_diff(coarse: &[Vec<C64>], fine: &[Vec<C64>]) -> f64 {
    let mut worst = 0.0f64;
    for (k, row) in coarse.iter().enumerate() {
        for (a, b) in row.iter().zip(&fine[2 * k]) {
            worst = worst.max((a - b).norm() / b.norm().max(1.0));
        }
    }
    worst
}

/// Bogoliubov coefficients along a trajectory.
#[derive(Debug, Clone)]
pub struct MotionIntegral {
    pub times: Vec<f64>,
    pub f: Vec<C64>,
    pub g: Vec<C64>,
    pub phi0: C64,
    /// `|f|² − |g|²` at t = 0.
    pub mu: f64,
    /// `g φ₀* − f* φ₀` at t = 0.
    pub u: C64,
    pub max_mu_drift: f64,
    pub halving_diff: f64,
    schedule: CoefficientSchedule,
}

fn fg_rhs(schedule: &CoefficientSchedule, t: f64, f: C64, g: C64) -> Result<(C64, C64)> {
    let (alpha, beta, _) = schedule.sample(t)?;
    Ok((I * (beta * f - alpha.conj() * g), I * (f * alpha - beta * g)))
}

impl MotionIntegral {
    /// `(f(t), g(t))` by cubic Hermite interpolation on the step grid.
    pub fn at(&self, t: f64) -> Result<(C64, C64)> {
        let t_end = *self.times.last().expect("non-empty grid");
        if !(t >= 0.0 && t <= t_end) {
            return Err(domain("MotionIntegral::at", format!("t = {t} outside [0, {t_end}]")));
        }
        if self.times.len() == 1 {
            return Ok((self.f[0], self.g[0]));
        }
        let k = self.times.partition_point(|&s| s <= t).clamp(1, self.times.len() - 1);
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        if s == 0.0 {
            return Ok((self.f[k - 1], self.g[k - 1]));
        }
        if s == 1.0 {
            return Ok((self.f[k], self.g[k]));
        }
        let (df0, dg0) = fg_rhs(&self.schedule, t0, self.f[k - 1], self.g[k - 1])?;
        let (df1, dg1) = fg_rhs(&self.schedule, t1, self.f[k], self.g[k])?;
        let h00 = 2.0 * s.powi(3) - 3.0 * s * s + 1.0;
        let h10 = s.powi(3) - 2.0 * s * s + s;
        let h01 = -2.0 * s.powi(3) + 3.0 * s * s;
        let h11 = s.powi(3) - s * s;
        let interp = |y0: C64, y1: C64, d0: C64, d1: C64| y0 * h00 + d0 * (h10 * h) + y1 * h01 + d1 * (h11 * h);
        Ok((
            interp(self.f[k - 1], self.f[k], df0, df1),
            interp(self.g[k - 1], self.g[k], dg0, dg1),
        ))
    }

    /// ζ = g/f at each grid time.
    pub fn zeta(&self) -> Vec<C64> {
        self.f.iter().zip(&self.g).map(|(f, g)| g / f).collect()
    }
}

/// Integrate `ḟ = i(βf − α*g)`, `ġ = i(fα − βg)` with φ(t) = φ₀.
pub fn solve_fg(schedule: &CoefficientSchedule, f0: C64, g0: C64, phi0: C64, t_final: f64, dt: f64) -> Result<MotionIntegral> {
    let mu = f0.norm_sqr() - g0.norm_sqr();
    if mu.abs() <= 1e-12 * f0.norm_sqr().max(g0.norm_sqr()) {
        return Err(Error::FgCrossing { t: 0.0 });
    }
    let (steps, h) = time_grid(t_final, dt)?;
    let limit = 1e-9 * mu.abs();

    let run = |steps: usize, h: f64| -> Result<(Vec<Vec<C64>>, f64)> {
        let mut drift = 0.0f64;
        let traj = rk4(
            &[f0, g0],
            steps,
            h,
            |t, y| {
                let (df, dg) = fg_rhs(schedule, t, y[0], y[1])?;
                Ok(vec![df, dg])
            },
            |t, y| {
                let m = y[0].norm_sqr() - y[1].norm_sqr();
                if m.abs() <= 1e-12 * y[0].norm_sqr().max(y[1].norm_sqr()) {
                    return Err(Error::FgCrossing { t });
                }
                drift = drift.max((m - mu).abs());
                if drift > limit {
                    return Err(Error::MuDrift { drift, limit });
                }
                Ok(())
            },
        )?;
        Ok((traj, drift))
    };

    let (coarse, drift) = run(steps, h)?;
    let (fine, _) = run(2 * steps, 0.5 * h)?;
    let diff = halving_diff(&coarse, &fine);
    if diff > HALVING_LIMIT {
        return Err(Error::StepHalving {
            diff,
            limit: HALVING_LIMIT,
        });
    }
    Ok(MotionIntegral {
        times: (0..=steps).map(|k| k as f64 * h).collect(),
        f: coarse.iter().map(|y| y[0]).collect(),
        g: coarse.iter().map(|y| y[1]).collect(),
        phi0,
        mu,
        u: g0 * phi0.conj() - f0.conj() * phi0,
        max_mu_drift: drift,
        halving_diff: diff,
        schedule: schedule.clone(),
    })
}

/// Squeeze/displacement parameters and phases at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateParams {
    pub t: f64,
    pub zeta: C64,
    pub xi: C64,
    /// Eigenvalue `z = ξ f` with the normalization f₀ = 1.
    pub z_eigen: C64,
    /// SVS phase ϑ = ε Re J − D.
    pub theta_svs: f64,
    /// CS phase ϑ̃ = Re J − D.
    pub theta_cs: f64,
    /// `J = ∫₀ᵗ (α*ζ − β) dt`.
    pub j: C64,
    /// `D = ∫₀ᵗ δ dt`.
    pub d: f64,
}

#[derive(Debug, Clone)]
pub struct ZetaXiTrajectory {
    pub epsilon: f64,
    pub states: Vec<StateParams>,
    pub halving_diff: f64,
}

impl ZetaXiTrajectory {
    pub fn last(&self) -> &StateParams {
        self.states.last().expect("non-empty trajectory")
    }

    /// `f(t) = f₀ e^{−iJ(t)}`.
    pub fn f_from_phase(&self, f0: C64) -> Vec<C64> {
        self.states.iter().map(|s| f0 * (-I * s.j).exp()).collect()
    }
}

const BLOWUP: f64 = 1.0 - 1e-6;

/// Integrate the Riccati equation `ζ̇ = iα*ζ² − 2iβζ + iα`, the linear
/// equation `ξ̇ = i(α*ζ − β)ξ`, and the phase integrals J and D, all
/// anchored at zero for t = 0.
pub fn solve_zeta_xi(
    schedule: &CoefficientSchedule,
    zeta0: C64,
    xi0: C64,
    epsilon: f64,
    t_final: f64,
    dt: f64,
) -> Result<ZetaXiTrajectory> {
    if !(zeta0.norm() < 1.0) {
        return Err(domain("solve_zeta_xi", format!("|zeta0| must be < 1, got {}", zeta0.norm())));
    }
    if !(epsilon >= 0.5) {
        return Err(domain("solve_zeta_xi", format!("epsilon must be >= 1/2, got {epsilon}")));
    }
    let (steps, h) = time_grid(t_final, dt)?;
    let y0 = [zeta0, xi0, C64::new(0.0, 0.0), C64::new(0.0, 0.0)];

    let run = |steps: usize, h: f64| -> Result<Vec<Vec<C64>>> {
        rk4(
            &y0,
            steps,
            h,
            |t, y| {
                let (alpha, beta, delta) = schedule.sample(t)?;
                let (zeta, xi) = (y[0], y[1]);
                let rate = alpha.conj() * zeta - beta;
                Ok(vec![
                    I * (alpha.conj() * zeta * zeta - 2.0 * beta * zeta + alpha),
                    I * rate * xi,
                    rate,
                    C64::new(delta, 0.0),
                ])
            },
            |t, y| {
                let m = y[0].norm();
                if m >= BLOWUP || !m.is_finite() {
                    Err(Error::SqueezeBlowup { t, modulus: m })
                } else {
                    Ok(())
                }
            },
        )
    };

    let coarse = run(steps, h)?;
    let fine = run(2 * steps, 0.5 * h)?;
    let diff = halving_diff(&coarse, &fine);
    if diff > HALVING_LIMIT {
        return Err(Error::StepHalving {
            diff,
            limit: HALVING_LIMIT,
        });
    }
    let states = coarse
        .iter()
        .enumerate()
        .map(|(k, y)| {
            let (zeta, xi, j, d) = (y[0], y[1], y[2], y[3].re);
            StateParams {
                t: k as f64 * h,
                zeta,
                xi,
                z_eigen: xi * (-I * j).exp(),
                theta_svs: epsilon * j.re - d,
                theta_cs: j.re - d,
                j,
                d,
            }
        })
        .collect();
    Ok(ZetaXiTrajectory {
        epsilon,
        states,
        halving_diff: diff,
    })
}

/// `f a + g a† + φ₀ I` on the truncated basis.
pub fn assemble_a_from(f: C64, g: C64, phi0: C64, params: &AlgebraParams, truncation: usize) -> Result<OperatorMatrix> {
    let ladder = build_ladder(params, truncation)?;
    Ok(ladder
        .a
        .scale(f)
        .add(&ladder.a_dagger.scale(g))
        .add(&OperatorMatrix::identity(truncation).scale(phi0)))
}

/// The integral of motion `A(t)` as a matrix.
#[allow(non_snake_case)]
pub fn assemble_A(mi: &MotionIntegral, t: f64, params: &AlgebraParams, truncation: usize) -> Result<OperatorMatrix> {
    let (f, g) = mi.at(t)?;
    assemble_a_from(f, g, mi.phi0, params, truncation)
}
