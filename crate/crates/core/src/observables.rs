//! First and second moments of position and momentum in the generalized CS,
//! with `x = l(a + a†)/√2` and `P = ħ(a − a†)/(i√2 l)`.

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::fock::{build_ladder, momentum_matrix, position_matrix, AlgebraParams, FockVector};
use crate::states::{mean_reflection, CsSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// Symmetrized covariance `⟨xP + Px⟩/2 − x̄P̄`.
    pub cov_xp: f64,
    /// Mean parity R̄.
    pub mean_r: f64,
}

impl Moments {
    pub fn sigma_x(&self) -> f64 {
        self.var_x.sqrt()
    }

    pub fn sigma_p(&self) -> f64 {
        self.var_p.sqrt()
    }
}

/// Closed-form moments of the CS.
pub fn cs_moments(spec: &CsSpec, params: &AlgebraParams) -> Result<Moments> {
    let (zeta, xi) = (spec.zeta, spec.xi);
    let l = params.length_scale;
    let hbar = params.hbar;
    let one_minus = 1.0 - zeta.norm_sqr();
    let mean_r = mean_reflection(zeta, xi, spec.epsilon)?;
    let deform = 1.0 + (2.0 * spec.epsilon - 1.0) * mean_r;
    let one = C64::new(1.0, 0.0);
    Ok(Moments {
        mean_x: std::f64::consts::SQRT_2 * l * ((one - zeta.conj()) * xi).re / one_minus,
        mean_p: std::f64::consts::SQRT_2 * hbar / l * ((one + zeta.conj()) * xi).im / one_minus,
        var_x: l * l * (one - zeta).norm_sqr() * deform / (2.0 * one_minus),
        var_p: (hbar / l).powi(2) * (one + zeta).norm_sqr() * deform / (2.0 * one_minus),
        cov_xp: -hbar * zeta.im * deform / one_minus,
        mean_r,
    })
}

/// `(σ_x σ_P, σ_x²σ_P² − σ_xP²)` from their closed forms.
pub fn uncertainty_products(m: &Moments, params: &AlgebraParams, zeta: C64) -> (f64, f64) {
    let deform = 1.0 + params.nu * m.mean_r;
    let one_minus = 1.0 - zeta.norm_sqr();
    let heisenberg = params.hbar * (1.0 + 4.0 * zeta.im * zeta.im / (one_minus * one_minus)).sqrt() * deform / 2.0;
    let sr = 0.25 * params.hbar * params.hbar * deform * deform;
    (heisenberg, sr)
}

/// Displacement reproducing given means: `ξ = (1+ζ)x̄/(√2 l) + i l(1−ζ)P̄/(√2 ħ)`.
pub fn xi_from_means(mean_x: f64, mean_p: f64, zeta: C64, params: &AlgebraParams) -> C64 {
    let l = params.length_scale;
    let one = C64::new(1.0, 0.0);
    ((one + zeta) * (mean_x / l) + C64::new(0.0, 1.0) * (one - zeta) * (l * mean_p / params.hbar)) / std::f64::consts::SQRT_2
}

/// The same six quantities as expectation values on a truncated basis.
pub fn matrix_moments(state: &FockVector, params: &AlgebraParams) -> Result<Moments> {
    let n = state.truncation();
    let ladder = build_ladder(params, n)?;
    let x = position_matrix(params, &ladder);
    let p = momentum_matrix(params, &ladder);
    let xv = x.apply(state);
    let pv = p.apply(state);
    let mean_x = state.inner(&xv).re;
    let mean_p = state.inner(&pv).re;
    let x2 = xv.norm_sqr();
    let p2 = pv.norm_sqr();
    // ⟨xP + Px⟩/2 = Re⟨xψ|Pψ⟩ for Hermitian x, P
    let sym = xv.inner(&pv).re;
    let mean_r = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { c.norm_sqr() } else { -c.norm_sqr() })
        .sum();
    Ok(Moments {
        mean_x,
        mean_p,
        var_x: x2 - mean_x * mean_x,
        var_p: p2 - mean_p * mean_p,
        cov_xp: sym - mean_x * mean_p,
        mean_r,
    })
}
