//! Coordinate representation on the half-line `x > 0` for the quantized
//! algebra `ε = 2ℓ + 1/2`.
//!
//! States live on the whole line and split into an even and an odd part;
//! on `x > 0` they are stored as the pair `(ψ_e, ψ_o)` with `ψ(±x) = ψ_e ± ψ_o`.
//! Inner products are `2∫₀^∞ (φ_e* ψ_e + φ_o* ψ_o) dx`, which for a purely
//! even state is the familiar `2∫₀^∞ |ψ|² dx`.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64 as C64;

use crate::error::{domain, Error, Result};
use crate::fock::AlgebraParams;
use crate::specfun::{bessel_i, bessel_i_over_power, bessel_i_scaled, log_gamma, principal_pow};
use crate::states::CsSpec;

/// Nodes per Gauss–Legendre panel.
const PANEL_NODES: usize = 24;
/// Integrand decay (relative to its maximum) at which the half-line is cut.
const TAIL_CUT: f64 = 1e-34;
const NORM_TOLERANCE: f64 = 1e-8;

/// Checks `ε = 2ℓ + 1/2` and returns ℓ.
pub fn quantized_ell(epsilon: f64) -> Result<u32> {
    let twice = epsilon - 0.5;
    if twice >= 0.0 && twice.fract() == 0.0 && (twice as u64) % 2 == 0 {
        Ok((twice / 2.0) as u32)
    } else {
        Err(Error::Quantization { epsilon })
    }
}

fn check_x(func: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(func, format!("x must be positive and finite, got {x}")))
    }
}

fn check_l(func: &'static str, l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(domain(func, format!("l must be positive and finite, got {l}")))
    }
}

/// Even vacuum `x^{2ℓ} e^{−x²/2l²} / (l^{2ℓ+1/2} √Γ(2ℓ+1/2))`.
pub fn vacuum_wavefunction(ell: u32, l: f64, x: f64) -> Result<f64> {
    check_l("vacuum_wavefunction", l)?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(domain("vacuum_wavefunction", format!("x must be >= 0, got {x}")));
    }
    let eps = 2.0 * ell as f64 + 0.5;
    let u = x / l;
    let ln_c = -0.5 * l.ln() - 0.5 * log_gamma(eps)?;
    Ok(u.powi(2 * ell as i32) * (ln_c - 0.5 * u * u).exp())
}

/// Even and odd parts of the CS wavefunction at `x > 0`.
///
/// Closed form with `w = √2 ξ x / ((1−ζ) l)` and `y = |ξ|²/(1−|ζ|²)`:
/// `√(1−|ζ|²)/(1−ζ) · √x/l · [I_{ε−1}(w) + I_ε(w)] / √(I_{ε−1}(y) + I_ε(y))`
/// `× exp[−(1+ζ)/(1−ζ) · x²/2l² − (1−ζ*)ξ²/(2(1−ζ)(1−|ζ|²)) + iϑ̃]`,
/// the `I_{ε−1}` term being the even part. Evaluated through `I_κ(w)/(w/2)^κ`
/// so that ξ → 0 and large `|w|` stay finite; the global phase matches
/// [`crate::states::cs_amplitudes`].
pub fn cs_wavefunction_parts(spec: &CsSpec, params: &AlgebraParams, x: f64) -> Result<(C64, C64)> {
    let ell = quantized_ell(spec.epsilon)?;
    check_x("cs_wavefunction", x)?;
    let l = params.length_scale;
    check_l("cs_wavefunction", l)?;
    let eps = spec.epsilon;
    let (zeta, xi) = (spec.zeta, spec.xi);
    let one = C64::new(1.0, 0.0);
    let a = 1.0 - zeta.norm_sqr();
    let om = one - zeta;
    let u = x / l;
    let half_w = xi * u / (std::f64::consts::SQRT_2 * om);
    let w = 2.0 * half_w;

    let (even, odd, ln_extra) = scaled_bessel_pair(eps, w)?;
    let gauss = -(one + zeta) / om * (0.5 * u * u) - (one - zeta.conj()) * xi * xi / (2.0 * om * a);
    let y = spec.bessel_argument();
    let s = bessel_i_over_power(eps - 1.0, y)? + 0.5 * y * bessel_i_over_power(eps, y)?;
    let ln_mod = 0.5 * a.ln() - om.norm().ln() - 0.5 * l.ln() + 0.5 * (eps - 1.0) * (a.ln() - om.norm_sqr().ln()) - 0.5 * s.ln()
        + 2.0 * ell as f64 * u.ln();
    let arg_xi = if xi.norm() == 0.0 { 0.0 } else { arg(xi) };
    let phase = (eps - 1.0) * (arg_xi - om.arg()) - om.arg() + spec.theta;
    let common = (C64::new(ln_mod + ln_extra, phase) + gauss).exp();
    Ok((common * even, common * odd * half_w))
}

/// `(Ĩ_{ε−1}(w), Ĩ_ε(w), ln_scale)` with `Ĩ_κ = I_κ(w)/(w/2)^κ · e^{−ln_scale}`.
fn scaled_bessel_pair(eps: f64, w: C64) -> Result<(C64, C64, f64)> {
    if w.norm() <= 4.0 {
        return Ok((tilde_series(eps - 1.0, w), tilde_series(eps, w), 0.0));
    }
    let hw = 0.5 * w;
    let lower = bessel_i_scaled(eps - 1.0, w)? / principal_pow(hw, eps - 1.0);
    let upper = bessel_i_scaled(eps, w)? / principal_pow(hw, eps);
    Ok((lower, upper, w.re.abs()))
}

/// `Σ (w²/4)^m / (m! Γ(m+κ+1))`, entire in `w`.
fn tilde_series(kappa: f64, w: C64) -> C64 {
    let q = 0.25 * w * w;
    let mut term = C64::new((-crate::specfun::ln_gamma_ratio(kappa + 1.0, 1.0)).exp(), 0.0);
    let mut sum = term;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= q / (m * (m + kappa));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && m > 2.0 {
            break;
        }
    }
    sum
}

fn arg(z: C64) -> f64 {
    if z.im == 0.0 && z.re < 0.0 {
        std::f64::consts::PI
    } else {
        z.im.atan2(z.re)
    }
}

/// `ψ(x) = ψ_e(x) + ψ_o(x)` at `x > 0`.
pub fn cs_wavefunction(spec: &CsSpec, params: &AlgebraParams, x: f64) -> Result<C64> {
    let (e, o) = cs_wavefunction_parts(spec, params, x)?;
    Ok(e + o)
}

/// Density by the closed form written directly in terms of `I_κ`:
/// `(1−|ζ|²)/|1−ζ|² · x/l² · |I_{ε−1}(w) + I_ε(w)|² / (I_{ε−1}(y) + I_ε(y))`
/// `× exp[−(1−|ζ|²)/|1−ζ|² · x²/l² − Re((1−ζ*)ξ²/(1−ζ))/(1−|ζ|²)]`.
pub fn density_closed_form(spec: &CsSpec, params: &AlgebraParams, x: f64) -> Result<f64> {
    quantized_ell(spec.epsilon)?;
    check_x("density_closed_form", x)?;
    let l = params.length_scale;
    let eps = spec.epsilon;
    let (zeta, xi) = (spec.zeta, spec.xi);
    let one = C64::new(1.0, 0.0);
    let a = 1.0 - zeta.norm_sqr();
    let om = one - zeta;
    let w = std::f64::consts::SQRT_2 * xi / om * (x / l);
    let y = spec.bessel_argument();
    let num = (bessel_i(eps - 1.0, w)? + bessel_i(eps, w)?).norm_sqr();
    let den = bessel_i(eps - 1.0, C64::new(y, 0.0))?.re + bessel_i(eps, C64::new(y, 0.0))?.re;
    let k = a / om.norm_sqr();
    let expo = -k * x * x / (l * l) - ((one - zeta.conj()) * xi * xi / om).re / a;
    Ok(k * x / (l * l) * num / den.abs() * expo.exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionGrid {
    pub x_values: Vec<f64>,
    pub psi_values: Vec<C64>,
    pub rho_values: Vec<f64>,
    pub ell: u32,
    pub params: AlgebraParams,
    /// Largest `| |ψ|² − closed-form density |` over the grid.
    pub route_difference: f64,
    /// `2∫₀^∞ (|ψ_e|² + |ψ_o|²) dx` by quadrature.
    pub normalization: f64,
}

/// Default hybrid grid on `[1e−3 l, 10 l]`: 256 logarithmic points below `0.1 l`,
/// the rest linear.
pub fn default_grid(l: f64) -> Vec<f64> {
    const TOTAL: usize = 2048;
    const LOG_POINTS: usize = 256;
    let (lo, mid, hi) = (1e-3 * l, 0.1 * l, 10.0 * l);
    let mut xs = Vec::with_capacity(TOTAL);
    let ratio = (mid / lo).ln();
    for k in 0..LOG_POINTS {
        xs.push(lo * (ratio * k as f64 / LOG_POINTS as f64).exp());
    }
    let lin = TOTAL - LOG_POINTS;
    for k in 0..lin {
        xs.push(mid + (hi - mid) * k as f64 / (lin - 1) as f64);
    }
    xs
}

/// Wavefunction and density on `grid`, both density routes, and the
/// normalization.
pub fn probability_density(spec: &CsSpec, params: &AlgebraParams, grid: &[f64]) -> Result<WavefunctionGrid> {
    let ell = quantized_ell(spec.epsilon)?;
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("probability_density", "grid must be strictly increasing".to_string()));
    }
    let mut psi_values = Vec::with_capacity(grid.len());
    let mut rho_values = Vec::with_capacity(grid.len());
    let mut route_difference: f64 = 0.0;
    for &x in grid {
        let psi = cs_wavefunction(spec, params, x)?;
        let rho = psi.norm_sqr();
        let direct = density_closed_form(spec, params, x)?;
        route_difference = route_difference.max((rho - direct).abs());
        psi_values.push(psi);
        rho_values.push(rho);
    }
    let normalization = cs_normalization(spec, params)?;
    if (normalization - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::Quadrature {
            detail: format!("wavefunction norm {normalization} differs from 1 by more than {NORM_TOLERANCE}"),
        });
    }
    Ok(WavefunctionGrid {
        x_values: grid.to_vec(),
        psi_values,
        rho_values,
        ell,
        params: *params,
        route_difference,
        normalization,
    })
}

/// `∫₀^∞ f` by Gauss–Legendre panels of width `l/2` from the origin, stopping
/// once a panel contributes below `TAIL_CUT` of the running total.
pub fn half_line_integral<F: FnMut(f64) -> Result<f64>>(l: f64, mut f: F) -> Result<f64> {
    let rule = GaussLegendre::new(NonZeroUsize::new(PANEL_NODES).expect("nonzero"));
    let width = 0.5 * l;
    let mut total = 0.0;
    let mut peak: f64 = 0.0;
    for k in 0..4000 {
        let a = width * k as f64;
        let mut err = None;
        let panel = rule.integrate(a, a + width, |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        total += panel;
        peak = peak.max(panel.abs());
        if k > 4 && panel.abs() <= TAIL_CUT * peak {
            return Ok(total);
        }
    }
    Err(Error::Quadrature {
        detail: format!("half-line integrand has not decayed after 2000 l (total {total})"),
    })
}

/// `2∫₀^∞ (|ψ_e|² + |ψ_o|²) dx`.
pub fn cs_normalization(spec: &CsSpec, params: &AlgebraParams) -> Result<f64> {
    half_line_integral(params.length_scale, |x| {
        if x == 0.0 {
            return Ok(0.0);
        }
        let (e, o) = cs_wavefunction_parts(spec, params, x)?;
        Ok(2.0 * (e.norm_sqr() + o.norm_sqr()))
    })
}

/// `2∫₀^∞ |ψ(x)|² dx`, which omits the mirror-image half of a state with odd
/// content.
pub fn half_line_density_integral(spec: &CsSpec, params: &AlgebraParams) -> Result<f64> {
    half_line_integral(params.length_scale, |x| {
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok(2.0 * cs_wavefunction(spec, params, x)?.norm_sqr())
    })
}

/// Golden-section search for the density maximum on `[a, b]`.
pub fn density_peak(spec: &CsSpec, params: &AlgebraParams, a: f64, b: f64) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let rho = |x: f64| cs_wavefunction(spec, params, x).map(|p| p.norm_sqr());
    let (mut lo, mut hi) = (a, b);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (rho(c)?, rho(d)?);
    while hi - lo > 1e-12 * (1.0 + hi.abs()) {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = rho(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = rho(d)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Coefficients of `P²/2m + mω²x²/2 + Ω(Px + xP)/2 + E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalForm {
    pub mass: f64,
    /// `ω²`, negative for an inverted oscillator.
    pub omega_sq: f64,
    pub cross: f64,
    pub offset: f64,
}

impl MechanicalForm {
    pub fn omega(&self) -> f64 {
        self.omega_sq.sqrt()
    }
}

pub fn hamiltonian_mapping(alpha: C64, beta: f64, delta: f64, params: &AlgebraParams) -> Result<MechanicalForm> {
    let l2 = params.length_scale * params.length_scale;
    let hbar = params.hbar;
    let inv_mass_part = beta - alpha.re;
    if !(inv_mass_part > 0.0) {
        return Err(Error::NegativeMass { value: inv_mass_part });
    }
    let mass = hbar / (l2 * inv_mass_part);
    let m_omega_sq = hbar / l2 * (beta + alpha.re);
    Ok(MechanicalForm {
        mass,
        omega_sq: m_omega_sq / mass,
        cross: alpha.im,
        offset: hbar * delta,
    })
}
