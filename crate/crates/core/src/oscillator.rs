//! The time-independent para-Bose oscillator `α = δ = 0`, `β = ω₀`,
//! with `ε = 2ℓ + 1/2` and mass `m₀ = ħ/(l²ω₀)`.

use num_complex::Complex64 as C64;

use crate::dynamics::StateParams;
use crate::error::{domain, Error, Result};
use crate::fock::{AlgebraParams, FockVector};
use crate::observables::cs_moments;
use crate::specfun::{bessel_i_over_power, bessel_i_scaled, log_gamma};
use crate::states::{cs_amplitudes, mean_reflection, CsSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorConfig {
    pub omega0: f64,
    pub ell: u32,
    pub zeta0: C64,
    pub xi0: C64,
    pub l: f64,
    pub hbar: f64,
}

impl OscillatorConfig {
    pub fn new(omega0: f64, ell: u32, zeta0: C64, xi0: C64, l: f64, hbar: f64) -> Result<Self> {
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(domain("oscillator", format!("omega0 must be positive, got {omega0}")));
        }
        if !(zeta0.norm() < 1.0) {
            return Err(domain("oscillator", format!("|zeta0| must be < 1, got {}", zeta0.norm())));
        }
        if !(xi0.re.is_finite() && xi0.im.is_finite()) {
            return Err(domain("oscillator", "xi0 must be finite".to_string()));
        }
        if !(l > 0.0 && l.is_finite() && hbar > 0.0 && hbar.is_finite()) {
            return Err(domain("oscillator", format!("l and hbar must be positive, got {l}, {hbar}")));
        }
        Ok(Self { omega0, ell, zeta0, xi0, l, hbar })
    }

    /// `(|ζ₀|, θ_ζ, |ξ₀|, θ_ξ)` form.
    pub fn from_polar(omega0: f64, ell: u32, zeta: (f64, f64), xi: (f64, f64), l: f64, hbar: f64) -> Result<Self> {
        Self::new(omega0, ell, C64::from_polar(zeta.0, zeta.1), C64::from_polar(xi.0, xi.1), l, hbar)
    }

    pub fn epsilon(&self) -> f64 {
        2.0 * self.ell as f64 + 0.5
    }

    pub fn mass(&self) -> f64 {
        self.hbar / (self.l * self.l * self.omega0)
    }

    pub fn params(&self) -> AlgebraParams {
        AlgebraParams::from_ell(self.ell)
            .with_length_scale(self.l)
            .and_then(|p| p.with_hbar(self.hbar))
            .expect("validated in the constructor")
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega0
    }

    fn one_minus(&self) -> f64 {
        1.0 - self.zeta0.norm_sqr()
    }

    fn theta_zeta(&self) -> f64 {
        self.zeta0.arg()
    }
}

/// `ζ = ζ₀e^{−2iω₀t}`, `ξ = ξ₀e^{−iω₀t}`, `ϑ = −εω₀t`, `ϑ̃ = −ω₀t`.
pub fn closed_form_parameters(cfg: &OscillatorConfig, t: f64) -> StateParams {
    let w = cfg.omega0 * t;
    StateParams {
        t,
        zeta: cfg.zeta0 * C64::from_polar(1.0, -2.0 * w),
        xi: cfg.xi0 * C64::from_polar(1.0, -w),
        z_eigen: cfg.xi0,
        theta_svs: -cfg.epsilon() * w,
        theta_cs: -w,
        j: C64::new(-w, 0.0),
        d: 0.0,
    }
}

/// The time-evolved CS as [`cs_amplitudes`] at the closed-form parameters.
/// The principal branch of `arg ξ(t)` is unwrapped to `θ_ξ − ω₀t` so that the
/// amplitudes are continuous in `t` and equal to the exact evolution of the
/// `t = 0` state.
pub fn analytic_state(cfg: &OscillatorConfig, t: f64, truncation: Option<usize>) -> Result<FockVector> {
    let sp = closed_form_parameters(cfg, t);
    let eps = cfg.epsilon();
    let branch = if cfg.xi0.norm() == 0.0 {
        0.0
    } else {
        let unwrapped = cfg.xi0.arg() - cfg.omega0 * t;
        unwrapped - sp.xi.arg()
    };
    let spec = CsSpec::new(sp.zeta, sp.xi, eps, sp.theta_cs + (eps - 1.0) * branch)?;
    cs_amplitudes(&spec, truncation)
}

/// Initial means `(x̄₀, P̄₀)`.
pub fn initial_means(cfg: &OscillatorConfig) -> (f64, f64) {
    let a = cfg.one_minus();
    let (r, th) = (cfg.zeta0.norm(), cfg.theta_zeta());
    let (x, ph) = (cfg.xi0.norm(), cfg.xi0.arg());
    let sqrt2 = std::f64::consts::SQRT_2;
    let x0 = sqrt2 * cfg.l * x * (ph.cos() - r * (ph - th).cos()) / a;
    let p0 = sqrt2 * cfg.l * cfg.mass() * cfg.omega0 * x * (ph.sin() + r * (ph - th).sin()) / a;
    (x0, p0)
}

/// Harmonic means `(x̄(t), P̄(t))`.
pub fn mean_trajectories(cfg: &OscillatorConfig, t: f64) -> (f64, f64) {
    let (x0, p0) = initial_means(cfg);
    let mw = cfg.mass() * cfg.omega0;
    let (s, c) = (cfg.omega0 * t).sin_cos();
    (x0 * c + p0 / mw * s, p0 * c - mw * x0 * s)
}

/// `R̄` of the oscillator CS, constant in time.
pub fn mean_parity(cfg: &OscillatorConfig) -> Result<f64> {
    mean_reflection(cfg.zeta0, cfg.xi0, cfg.epsilon())
}

/// `(σ_xσ_P, σ_x²σ_P² − σ_xP²)` at time `t`.
pub fn uncertainty_at(cfg: &OscillatorConfig, t: f64) -> Result<(f64, f64)> {
    let r = mean_parity(cfg)?;
    let deform = 1.0 + 4.0 * cfg.ell as f64 * r;
    let a = cfg.one_minus();
    let s = (cfg.theta_zeta() - 2.0 * cfg.omega0 * t).sin();
    let heis = cfg.hbar * (1.0 + 4.0 * cfg.zeta0.norm_sqr() * s * s / (a * a)).sqrt() * deform / 2.0;
    let sr = 0.25 * cfg.hbar * cfg.hbar * deform * deform;
    Ok((heis, sr))
}

/// Minimum times `t_k = (θ_ζ − kπ)/(2ω₀)` inside `[t0, t1]`, ascending.
pub fn minima_times(cfg: &OscillatorConfig, t0: f64, t1: f64) -> Vec<f64> {
    let th = cfg.theta_zeta();
    let pi = std::f64::consts::PI;
    // t_k decreases in k
    let k_lo = ((th - 2.0 * cfg.omega0 * t1) / pi).ceil() as i64;
    let k_hi = ((th - 2.0 * cfg.omega0 * t0) / pi).floor() as i64;
    let mut out: Vec<f64> = (k_lo..=k_hi)
        .map(|k| (th - k as f64 * pi) / (2.0 * cfg.omega0))
        .filter(|t| *t >= t0 && *t <= t1)
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    out
}

/// `l = σ_{x0} √((1+ζ₀)/(1−ζ₀) · 2/(1+4ℓR̄))` for real `ζ₀`.
pub fn calibrate_l(sigma_x0: f64, zeta0: C64, xi0: C64, ell: u32) -> Result<f64> {
    if !(sigma_x0 > 0.0 && sigma_x0.is_finite()) {
        return Err(domain("calibrate_l", format!("sigma_x0 must be positive, got {sigma_x0}")));
    }
    if zeta0.im != 0.0 {
        return Err(domain("calibrate_l", format!("zeta0 must be real, got {zeta0}")));
    }
    let z = zeta0.re;
    if !(z.abs() < 1.0) {
        return Err(domain("calibrate_l", format!("|zeta0| must be < 1, got {z}")));
    }
    let r = mean_reflection(zeta0, xi0, 2.0 * ell as f64 + 0.5)?;
    let l = sigma_x0 * ((1.0 + z) / (1.0 - z) * 2.0 / (1.0 + 4.0 * ell as f64 * r)).sqrt();
    if !l.is_finite() {
        return Err(Error::Overflow {
            func: "calibrate_l",
            detail: format!("l diverges as zeta0 -> 1 (zeta0 = {z})"),
        });
    }
    Ok(l)
}

/// Stationary number-state distribution written with the initial parameters:
/// `P_n = (|ξ₀|²/2)^{ε−1} (1−|ζ₀|²) e^{Re(ζ₀*ξ₀²)/(1−|ζ₀|²)} / (I_{ε−1}(y) + I_ε(y))`
/// `× m! |ζ₀|^{2m} · {|L_m^{ε−1}|²/Γ(m+ε), n = 2m;  |ξ₀|²|L_m^ε|²/(2Γ(m+ε+1)), n = 2m+1}`
/// with the Laguerre argument `ξ₀²/(2ζ₀)`.
pub fn stationary_transition(cfg: &OscillatorConfig, n: usize) -> Result<f64> {
    let eps = cfg.epsilon();
    let (zeta, xi) = (cfg.zeta0, cfg.xi0);
    let a = cfg.one_minus();
    let m = n / 2;
    let odd = n % 2 == 1;
    if odd && xi.norm() == 0.0 {
        return Ok(0.0);
    }
    let alpha = if odd { eps } else { eps - 1.0 };
    // |ζ|^{m}|L_m(ξ²/2ζ)| through M_m = (−ζ)^m L_m^α(ξ²/2ζ), finite at ζ = 0
    let half_xi2 = 0.5 * xi * xi;
    let mut prev = C64::new(1.0, 0.0);
    let mut cur = half_xi2 - zeta * (1.0 + alpha);
    let mut ln_scale = 0.0;
    if m == 0 {
        cur = prev;
    } else {
        for k in 1..m {
            let kf = k as f64;
            let next = ((half_xi2 - zeta * (2.0 * kf + 1.0 + alpha)) * cur - zeta * zeta * (kf + alpha) * prev) / (kf + 1.0);
            prev = cur;
            cur = next;
            let s = cur.norm();
            if s > 1e100 {
                prev /= s;
                cur /= s;
                ln_scale += s.ln();
            }
        }
    }
    let ln_lag = 2.0 * (cur.norm().ln() + ln_scale);
    let y = xi.norm_sqr() / a;
    let ln_pref = if xi.norm() == 0.0 {
        // (|ξ|²/2)^{ε−1}/(I_{ε−1}(y)+I_ε(y)) → (1−|ζ|²)^{ε−1}/S(0)
        (eps - 1.0) * a.ln() - (bessel_i_over_power(eps - 1.0, 0.0)?).ln()
    } else {
        let z = C64::new(y, 0.0);
        let den = (bessel_i_scaled(eps - 1.0, z)?.re + bessel_i_scaled(eps, z)?.re).ln() + y;
        (eps - 1.0) * (0.5 * xi.norm_sqr()).ln() - den
    } + a.ln()
        + (zeta.conj() * xi * xi).re / a;
    let ln_m_fact = log_gamma(m as f64 + 1.0)?;
    let ln_tail = if odd {
        xi.norm_sqr().ln() - 2f64.ln() - log_gamma(m as f64 + eps + 1.0)?
    } else {
        -log_gamma(m as f64 + eps)?
    };
    // m!|ζ|^{2m}|L_m|² = m!|M_m|²
    Ok((ln_pref + ln_m_fact + ln_lag + ln_tail).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SmallArgument,
    LargeArgument,
}

/// Applicability gates for the asymptotic forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeGates {
    pub small_xi_max: f64,
    pub small_zeta_max: f64,
    pub large_y_min: f64,
}

impl Default for RegimeGates {
    fn default() -> Self {
        Self {
            small_xi_max: 0.1,
            small_zeta_max: 0.9,
            large_y_min: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticUncertainty {
    pub heisenberg: f64,
    pub sr: f64,
    /// The approximant of `R̄` used by both.
    pub mean_r: f64,
}

/// Small-argument (`I_κ(Z) ~ (Z/2)^κ/Γ(κ+1)`) or large-argument
/// (`I_κ(Z) ~ e^Z/√(2πZ)[1 − (κ²−1/4)/(2Z)]`) uncertainty products at `t`.
pub fn asymptotic_uncertainties(
    cfg: &OscillatorConfig,
    regime: Regime,
    t: f64,
    gates: &RegimeGates,
) -> Result<AsymptoticUncertainty> {
    let a = cfg.one_minus();
    let x2 = cfg.xi0.norm_sqr();
    let ell = cfg.ell as f64;
    let (mean_r, factor) = match regime {
        Regime::SmallArgument => {
            if cfg.xi0.norm() > gates.small_xi_max || cfg.zeta0.norm() > gates.small_zeta_max {
                return Err(Error::Regime {
                    detail: format!(
                        "small-argument form needs |xi0| <= {} and |zeta0| <= {}, got {} and {}",
                        gates.small_xi_max,
                        gates.small_zeta_max,
                        cfg.xi0.norm(),
                        cfg.zeta0.norm()
                    ),
                });
            }
            let k = 4.0 * ell + 1.0;
            let den = k * a + x2;
            ((k * a - x2) / den, (k * k * a - (4.0 * ell - 1.0) * x2) / den)
        }
        Regime::LargeArgument => {
            let y = x2 / a;
            if y < gates.large_y_min {
                return Err(Error::Regime {
                    detail: format!("large-argument form needs y >= {}, got {y}", gates.large_y_min),
                });
            }
            let den = x2 - 2.0 * ell * ell * a;
            (ell * a / den, (x2 + 2.0 * ell * ell * a) / den)
        }
    };
    let s = (cfg.theta_zeta() - 2.0 * cfg.omega0 * t).sin();
    let heisenberg = 0.5 * cfg.hbar * (1.0 + 4.0 * cfg.zeta0.norm_sqr() * s * s / (a * a)).sqrt() * factor;
    Ok(AsymptoticUncertainty {
        heisenberg,
        sr: 0.25 * cfg.hbar * cfg.hbar * factor * factor,
        mean_r,
    })
}

/// One row of the oscillator table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorSample {
    pub t: f64,
    pub x_mean: f64,
    pub p_mean: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
    pub heisenberg: f64,
    pub sr: f64,
}

/// Means from the harmonic closed form; spreads from the moment formulas at
/// the closed-form parameters.
pub fn sample(cfg: &OscillatorConfig, t: f64) -> Result<OscillatorSample> {
    let sp = closed_form_parameters(cfg, t);
    let spec = CsSpec::new(sp.zeta, sp.xi, cfg.epsilon(), sp.theta_cs)?;
    let m = cs_moments(&spec, &cfg.params())?;
    let (x_mean, p_mean) = mean_trajectories(cfg, t);
    let (heisenberg, sr) = uncertainty_at(cfg, t)?;
    Ok(OscillatorSample {
        t,
        x_mean,
        p_mean,
        sigma_x: m.sigma_x(),
        sigma_p: m.sigma_p(),
        heisenberg,
        sr,
    })
}

/// Default Fig. 5 sweep of `ζ₀`.
pub const FIG5_ZETAS: [f64; 4] = [0.0, 0.25, 0.5, 0.75];
