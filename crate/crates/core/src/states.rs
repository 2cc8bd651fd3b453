//! Closed-form generalized squeezed vacuum states (SVS) and para-Bose
//! coherent states (CS) on the number basis.
//!
//! The CS coefficients are evaluated through the scaled polynomials
//! `M_n^α = (−ζ)ⁿ L_n^α(ξ²/2ζ)`, which obey
//!
//! ```text
//! (n+1) M_{n+1} = [ξ²/2 − ζ(2n+1+α)] M_n − ζ²(n+α) M_{n−1}
//! ```
//!
//! and stay regular as ζ → 0, where `M_n → (ξ²/2)ⁿ/n!`. No separate small-ζ
//! branch is needed. The Bessel normalization is written with
//! `Ĩ_κ(y) = I_κ(y)/(y/2)^κ`, which absorbs the `(ξ/√2)^{ε−1}` prefactor.

use num_complex::Complex64 as C64;

use crate::error::{domain, Error, Result};
use crate::fock::FockVector;
use crate::specfun::{bessel_i_over_power, bessel_i_scaled, ln_gamma_ratio, log_gamma};

/// Largest admissible squeeze modulus.
pub const MAX_ZETA: f64 = 1.0 - 1e-6;
/// Largest admissible displacement modulus.
pub const MAX_XI: f64 = 50.0;
/// Upper bound on automatically chosen truncations.
pub const MAX_TRUNCATION: usize = 40_000;

const SVS_TAIL_LIMIT: f64 = 1e-14;
const CS_TAIL_LIMIT: f64 = 1e-12;
const RENORM_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvsSpec {
    pub zeta: C64,
    pub epsilon: f64,
    /// Phase ϑ.
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsSpec {
    pub zeta: C64,
    pub xi: C64,
    pub epsilon: f64,
    /// Phase ϑ̃.
    pub theta: f64,
}

fn check_epsilon(func: &'static str, epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon >= 0.5 {
        Ok(())
    } else {
        Err(domain(func, format!("epsilon must be >= 1/2, got {epsilon}")))
    }
}

fn check_zeta(func: &'static str, zeta: C64) -> Result<()> {
    if zeta.re.is_finite() && zeta.im.is_finite() && zeta.norm() <= MAX_ZETA {
        Ok(())
    } else {
        Err(domain(func, format!("|zeta| must be <= 1 - 1e-6, got {}", zeta.norm())))
    }
}

impl SvsSpec {
    pub fn new(zeta: C64, epsilon: f64, theta: f64) -> Result<Self> {
        check_zeta("SvsSpec", zeta)?;
        check_epsilon("SvsSpec", epsilon)?;
        Ok(Self { zeta, epsilon, theta })
    }
}

impl CsSpec {
    pub fn new(zeta: C64, xi: C64, epsilon: f64, theta: f64) -> Result<Self> {
        check_zeta("CsSpec", zeta)?;
        check_epsilon("CsSpec", epsilon)?;
        if !(xi.re.is_finite() && xi.im.is_finite()) || xi.norm() > MAX_XI {
            return Err(domain("CsSpec", format!("|xi| must be <= {MAX_XI}, got {}", xi.norm())));
        }
        Ok(Self { zeta, xi, epsilon, theta })
    }

    /// `y = |ξ|²/(1−|ζ|²)`, the Bessel argument of the normalization.
    pub fn bessel_argument(&self) -> f64 {
        self.xi.norm_sqr() / (1.0 - self.zeta.norm_sqr())
    }
}

/// A constructed state with its normalization diagnostics.
#[derive(Debug, Clone)]
pub struct BuiltState {
    pub vector: FockVector,
    /// `|‖c‖² − 1|` before any renormalization.
    pub norm_residual: f64,
    pub renormalized: bool,
    /// Tail bound that justified the truncation.
    pub tail_bound: f64,
}

impl BuiltState {
    pub fn warning(&self) -> Option<String> {
        self.renormalized.then(|| {
            format!(
                "state norm deviated from 1 by {:.3e}; amplitudes were renormalized",
                self.norm_residual
            )
        })
    }
}

fn finish(mut amplitudes: Vec<C64>, tail_bound: f64) -> BuiltState {
    let norm_sqr: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let norm_residual = (norm_sqr - 1.0).abs();
    let renormalized = norm_residual > RENORM_LIMIT;
    if renormalized {
        let s = 1.0 / norm_sqr.sqrt();
        for c in &mut amplitudes {
            *c *= s;
        }
    }
    BuiltState {
        vector: FockVector::new(amplitudes),
        norm_residual,
        renormalized,
        tail_bound,
    }
}

/// `ln P_{2n}` for the SVS.
fn svs_ln_prob(r2: f64, epsilon: f64, n: usize) -> f64 {
    let nf = n as f64;
    let ln_r2 = if n == 0 { 0.0 } else { nf * r2.ln() };
    epsilon * (-r2).ln_1p() + ln_gamma_ratio(nf + epsilon, nf + 1.0) - log_gamma(epsilon).unwrap_or(0.0) + ln_r2
}

/// Smallest even truncation whose SVS tail is below the limit, with the bound.
pub fn svs_truncation(zeta: C64, epsilon: f64) -> Result<(usize, f64)> {
    check_zeta("svs_truncation", zeta)?;
    check_epsilon("svs_truncation", epsilon)?;
    let r2 = zeta.norm_sqr();
    if r2 == 0.0 {
        return Ok((2, 0.0));
    }
    // P_{2n+2}/P_{2n} = r²(n+ε)/(n+1); tail after n bounded geometrically
    // with ratio max(that, r²) once it is below 1.
    let mut n = 0usize;
    loop {
        let ratio = r2 * (n as f64 + epsilon) / (n as f64 + 1.0);
        let q = ratio.max(r2);
        if q < 1.0 {
            let p = svs_ln_prob(r2, epsilon, n).exp();
            let bound = p * ratio / (1.0 - q);
            if bound < SVS_TAIL_LIMIT {
                return Ok((2 * n + 2, bound));
            }
        }
        n += 1;
        if 2 * n + 2 > MAX_TRUNCATION {
            return Err(Error::Truncation {
                given: MAX_TRUNCATION,
                bound: f64::NAN,
                limit: SVS_TAIL_LIMIT,
            });
        }
    }
}

fn resolve_truncation(auto: usize, bound: f64, requested: Option<usize>, limit: f64) -> Result<usize> {
    match requested {
        None => Ok(auto),
        Some(n) if n >= auto => Ok(n + n % 2),
        Some(n) => Err(Error::Truncation {
            given: n,
            bound,
            limit,
        }),
    }
}

/// SVS amplitudes `c_{2n} = (1−|ζ|²)^{ε/2} e^{iϑ} (−ζ)ⁿ √(Γ(n+ε)/(n!Γ(ε)))`.
///
/// `truncation` may only raise the automatic choice.
pub fn svs_state(spec: &SvsSpec, truncation: Option<usize>) -> Result<BuiltState> {
    let (auto, bound) = svs_truncation(spec.zeta, spec.epsilon)?;
    let n_total = resolve_truncation(auto, bound, truncation, SVS_TAIL_LIMIT)?;
    let r2 = spec.zeta.norm_sqr();
    let phase = C64::from_polar(1.0, spec.theta);
    let minus_zeta_unit = if r2 == 0.0 { C64::new(0.0, 0.0) } else { -spec.zeta / spec.zeta.norm() };
    let mut amplitudes = vec![C64::new(0.0, 0.0); n_total];
    let mut dir = C64::new(1.0, 0.0);
    for n in 0..n_total / 2 {
        if n > 0 && r2 == 0.0 {
            break;
        }
        let modulus = (0.5 * svs_ln_prob(r2, spec.epsilon, n)).exp();
        amplitudes[2 * n] = phase * dir * modulus;
        dir *= minus_zeta_unit;
    }
    Ok(finish(amplitudes, bound))
}

pub fn svs_amplitudes(spec: &SvsSpec, truncation: Option<usize>) -> Result<FockVector> {
    Ok(svs_state(spec, truncation)?.vector)
}

/// `P_{2n} = (1−|ζ|²)^ε Γ(n+ε)|ζ|^{2n}/(n!Γ(ε))`.
pub fn svs_transition(zeta: C64, epsilon: f64, n: usize) -> Result<f64> {
    svs_transition_impl(zeta, epsilon, n, false)
}

/// [`svs_transition`] with the sign of the `(1−|ζ|²)` exponent flipped; a
/// deliberate defect for checking that the verification suite notices.
pub fn svs_transition_sabotaged(zeta: C64, epsilon: f64, n: usize) -> Result<f64> {
    svs_transition_impl(zeta, epsilon, n, true)
}

fn svs_transition_impl(zeta: C64, epsilon: f64, n: usize, sabotage: bool) -> Result<f64> {
    check_zeta("svs_transition", zeta)?;
    check_epsilon("svs_transition", epsilon)?;
    let r2 = zeta.norm_sqr();
    if r2 == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let mut ln_p = svs_ln_prob(r2, epsilon, n);
    if sabotage {
        ln_p -= 2.0 * epsilon * (-r2).ln_1p();
    }
    Ok(ln_p.exp())
}

/// `⟨ζ₁|ζ₂⟩ = (1−|ζ₁|²)^{ε/2}(1−|ζ₂|²)^{ε/2}(1−ζ₁*ζ₂)^{−ε} e^{i(ϑ₂−ϑ₁)}`.
pub fn svs_overlap(spec1: &SvsSpec, spec2: &SvsSpec) -> Result<C64> {
    if spec1.epsilon != spec2.epsilon {
        return Err(domain("svs_overlap", "both states must share epsilon"));
    }
    let eps = spec1.epsilon;
    let scale = 0.5 * eps * ((-spec1.zeta.norm_sqr()).ln_1p() + (-spec2.zeta.norm_sqr()).ln_1p());
    let base = C64::new(1.0, 0.0) - spec1.zeta.conj() * spec2.zeta;
    let power = (-eps * base.ln()).exp();
    Ok(power * scale.exp() * C64::from_polar(1.0, spec2.theta - spec1.theta))
}

/// `ln S(y)` with `S = Ĩ_{ε−1}(y) + (y/2) Ĩ_ε(y)`.
fn ln_normalizer(epsilon: f64, y: f64) -> Result<f64> {
    if y <= 30.0 {
        let s = bessel_i_over_power(epsilon - 1.0, y)? + 0.5 * y * bessel_i_over_power(epsilon, y)?;
        Ok(s.ln())
    } else {
        let z = C64::new(y, 0.0);
        let scaled = bessel_i_scaled(epsilon - 1.0, z)?.re + bessel_i_scaled(epsilon, z)?.re;
        Ok(scaled.ln() + y - (epsilon - 1.0) * (0.5 * y).ln())
    }
}

/// Common CS prefactor in log-modulus/phase form:
/// `(1−|ζ|²)^{ε/2} S(y)^{−1/2} e^{i(ε−1)arg ξ} exp[ζ*ξ²/(2(1−|ζ|²)) + iϑ̃]`.
fn cs_prefactor(spec: &CsSpec) -> Result<(f64, f64)> {
    let one_minus = 1.0 - spec.zeta.norm_sqr();
    let y = spec.bessel_argument();
    let e = spec.zeta.conj() * spec.xi * spec.xi / (2.0 * one_minus);
    let ln_mod = 0.5 * spec.epsilon * one_minus.ln() - 0.5 * ln_normalizer(spec.epsilon, y)? + e.re;
    let arg_xi = if spec.xi.norm() == 0.0 {
        0.0
    } else if spec.xi.im == 0.0 && spec.xi.re < 0.0 {
        std::f64::consts::PI
    } else {
        spec.xi.im.atan2(spec.xi.re)
    };
    let phase = (spec.epsilon - 1.0) * arg_xi + e.im + spec.theta;
    Ok((ln_mod, phase))
}

/// Running `M_n^α` with a shared log scale.
struct ScaledLaguerre {
    alpha: f64,
    zeta: C64,
    half_xi2: C64,
    prev: C64,
    cur: C64,
    ln_scale: f64,
    n: usize,
}

impl ScaledLaguerre {
    fn new(alpha: f64, zeta: C64, xi: C64) -> Self {
        Self {
            alpha,
            zeta,
            half_xi2: 0.5 * xi * xi,
            prev: C64::new(0.0, 0.0),
            cur: C64::new(1.0, 0.0),
            ln_scale: 0.0,
            n: 0,
        }
    }

    /// `(m, s)` with `M_n = m·eᵗ`.
    fn value(&self) -> (C64, f64) {
        (self.cur, self.ln_scale)
    }

    fn advance(&mut self) {
        let nf = self.n as f64;
        let next = ((self.half_xi2 - self.zeta * (2.0 * nf + 1.0 + self.alpha)) * self.cur
            - self.zeta * self.zeta * (nf + self.alpha) * self.prev)
            / (nf + 1.0);
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        let m = self.cur.norm().max(self.prev.norm());
        if m > 1e100 || (m < 1e-100 && m > 0.0) {
            self.prev /= m;
            self.cur /= m;
            self.ln_scale += m.ln();
        }
    }
}

fn ln_abs_or_neg_inf(c: C64) -> (f64, C64) {
    let m = c.norm();
    if m == 0.0 {
        (f64::NEG_INFINITY, C64::new(0.0, 0.0))
    } else {
        (m.ln(), c / m)
    }
}

/// Generator of CS amplitude pairs `(c_{2n}, c_{2n+1})`.
struct CsPairs {
    eps: f64,
    xi: C64,
    ln_pref: f64,
    pref_phase: f64,
    even: ScaledLaguerre,
    odd: ScaledLaguerre,
    n: usize,
}

impl CsPairs {
    fn new(spec: &CsSpec) -> Result<Self> {
        let (ln_pref, pref_phase) = cs_prefactor(spec)?;
        Ok(Self {
            eps: spec.epsilon,
            xi: spec.xi,
            ln_pref,
            pref_phase,
            even: ScaledLaguerre::new(spec.epsilon - 1.0, spec.zeta, spec.xi),
            odd: ScaledLaguerre::new(spec.epsilon, spec.zeta, spec.xi),
            n: 0,
        })
    }

    fn next_pair(&mut self) -> (C64, C64) {
        let nf = self.n as f64;
        let base = C64::from_polar(1.0, self.pref_phase);
        let (me, se) = self.even.value();
        let (lme, ue) = ln_abs_or_neg_inf(me);
        let even = base * ue * (self.ln_pref + se + lme + 0.5 * ln_gamma_ratio(nf + 1.0, nf + self.eps)).exp();
        let (mo, so) = self.odd.value();
        let (lmo, uo) = ln_abs_or_neg_inf(mo);
        let (lxi, uxi) = ln_abs_or_neg_inf(self.xi);
        let odd = base
            * uo
            * uxi
            * (self.ln_pref + so + lmo + lxi + 0.5 * (ln_gamma_ratio(nf + 1.0, nf + self.eps + 1.0) - std::f64::consts::LN_2)).exp();
        self.even.advance();
        self.odd.advance();
        self.n += 1;
        (even, odd)
    }
}

fn sanitize(c: C64) -> C64 {
    if c.re.is_finite() && c.im.is_finite() {
        c
    } else {
        C64::new(0.0, 0.0)
    }
}

/// Automatic CS truncation: pairs are generated until the pair masses have
/// passed their maximum and a geometric extrapolation of the remaining mass
/// is below the limit.
pub fn cs_truncation(spec: &CsSpec) -> Result<(usize, f64)> {
    let mut gen = CsPairs::new(spec)?;
    let y = spec.bessel_argument();
    let mut masses: Vec<f64> = Vec::new();
    while 2 * masses.len() < MAX_TRUNCATION {
        let (e, o) = gen.next_pair();
        masses.push(sanitize(e).norm_sqr() + sanitize(o).norm_sqr());
        let k = masses.len();
        if k < 8 || (k as f64) < 0.5 * y {
            continue;
        }
        let window = &masses[k - 8..];
        let decreasing = window.windows(2).all(|w| w[1] <= w[0]);
        if !decreasing {
            continue;
        }
        let last = window[7];
        if last == 0.0 {
            return Ok((2 * k, 0.0));
        }
        let ratio = window.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        if ratio < 1.0 {
            let bound = last * ratio / (1.0 - ratio);
            if bound < CS_TAIL_LIMIT * 1e-2 {
                return Ok((2 * k, bound));
            }
        }
    }
    Err(Error::Truncation {
        given: MAX_TRUNCATION,
        bound: f64::NAN,
        limit: CS_TAIL_LIMIT,
    })
}

/// CS amplitudes; `truncation` may only raise the automatic choice.
pub fn cs_state(spec: &CsSpec, truncation: Option<usize>) -> Result<BuiltState> {
    let (auto, bound) = cs_truncation(spec)?;
    let n_total = resolve_truncation(auto, bound, truncation, CS_TAIL_LIMIT)?;
    let mut gen = CsPairs::new(spec)?;
    let mut amplitudes = Vec::with_capacity(n_total);
    while amplitudes.len() < n_total {
        let (e, o) = gen.next_pair();
        amplitudes.push(sanitize(e));
        amplitudes.push(sanitize(o));
    }
    Ok(finish(amplitudes, bound))
}

pub fn cs_amplitudes(spec: &CsSpec, truncation: Option<usize>) -> Result<FockVector> {
    Ok(cs_state(spec, truncation)?.vector)
}

/// `P_n = |c_n|²` for the CS.
pub fn cs_transition(zeta: C64, xi: C64, epsilon: f64, n: usize) -> Result<f64> {
    let spec = CsSpec::new(zeta, xi, epsilon, 0.0)?;
    let mut gen = CsPairs::new(&spec)?;
    let mut pair = gen.next_pair();
    for _ in 0..n / 2 {
        pair = gen.next_pair();
    }
    let c = if n % 2 == 0 { pair.0 } else { pair.1 };
    Ok(sanitize(c).norm_sqr())
}

/// `⟨ξ₁,ζ₁|ζ₂,ξ₂⟩` by its number-state series, summed until both pair
/// sequences are past the larger automatic truncation.
pub fn cs_overlap(spec1: &CsSpec, spec2: &CsSpec) -> Result<C64> {
    if spec1.epsilon != spec2.epsilon {
        return Err(domain("cs_overlap", "both states must share epsilon"));
    }
    let n = cs_truncation(spec1)?.0.max(cs_truncation(spec2)?.0);
    let mut g1 = CsPairs::new(spec1)?;
    let mut g2 = CsPairs::new(spec2)?;
    let mut sum = C64::new(0.0, 0.0);
    for _ in 0..n / 2 {
        let (e1, o1) = g1.next_pair();
        let (e2, o2) = g2.next_pair();
        sum += sanitize(e1).conj() * sanitize(e2) + sanitize(o1).conj() * sanitize(o2);
    }
    Ok(sum)
}

/// Mean parity `R̄ = (I_{ε−1}(y) − I_ε(y))/(I_{ε−1}(y) + I_ε(y))`,
/// `y = |ξ|²/(1−|ζ|²)`.
pub fn mean_reflection(zeta: C64, xi: C64, epsilon: f64) -> Result<f64> {
    check_zeta("mean_reflection", zeta)?;
    check_epsilon("mean_reflection", epsilon)?;
    if xi.norm() == 0.0 {
        return Ok(1.0);
    }
    let y = xi.norm_sqr() / (1.0 - zeta.norm_sqr());
    mean_reflection_at(epsilon, y)
}

/// R̄ as a function of the Bessel argument y alone.
pub fn mean_reflection_at(epsilon: f64, y: f64) -> Result<f64> {
    if y == 0.0 {
        return Ok(1.0);
    }
    if y <= 30.0 {
        let lower = bessel_i_over_power(epsilon - 1.0, y)?;
        let upper = 0.5 * y * bessel_i_over_power(epsilon, y)?;
        Ok((lower - upper) / (lower + upper))
    } else {
        let z = C64::new(y, 0.0);
        let lower = bessel_i_scaled(epsilon - 1.0, z)?.re;
        let upper = bessel_i_scaled(epsilon, z)?.re;
        Ok((lower - upper) / (lower + upper))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_ladder, AlgebraParams};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn svs_vacuum_and_normalization() {
        let s = svs_amplitudes(&SvsSpec::new(c(0.0, 0.0), 2.5, 0.4).unwrap(), None).unwrap();
        assert!((s.amplitudes[0] - C64::from_polar(1.0, 0.4)).norm() < 1e-15);
        assert!(s.amplitudes.iter().skip(1).all(|a| *a == c(0.0, 0.0)));
        let b = svs_state(&SvsSpec::new(c(0.3, 0.0), 2.5, 0.0).unwrap(), None).unwrap();
        assert!(b.norm_residual <= 1e-12);
        assert!(!b.renormalized);
    }

    #[test]
    fn svs_binomial_series_normalization() {
        // Σ Γ(n+ε)|ζ|^{2n}/(n!Γ(ε)) = (1−|ζ|²)^{−ε}, summed by term ratios
        for &(r, eps) in &[(0.3, 2.5), (0.8, 0.5), (0.95, 6.5)] {
            let mut term = 1.0f64;
            let mut sum = 0.0f64;
            let mut n = 0.0;
            while term > 1e-18 * sum.max(1.0) || n < 10.0 {
                sum += term;
                term *= r * r * (n + eps) / (n + 1.0);
                n += 1.0;
            }
            let want = (1.0f64 - r * r).powf(-eps);
            assert!(((sum - want) / want).abs() < 1e-12);
            let p: f64 = svs_amplitudes(&SvsSpec::new(c(r, 0.0), eps, 0.0).unwrap(), None).unwrap().norm_sqr();
            assert!((p - 1.0).abs() < 1e-12, "r={r} eps={eps}: {p}");
        }
    }

    #[test]
    fn svs_canonical_reduction() {
        let (r, th) = (0.7f64, 0.9f64);
        let zeta = C64::from_polar(r.tanh(), th);
        let v = svs_amplitudes(&SvsSpec::new(zeta, 0.5, 0.0).unwrap(), None).unwrap();
        let mut ratio = 1.0; // √((2n)!)/(2ⁿn!)
        for n in 0..v.truncation() / 2 {
            if n > 0 {
                let nf = n as f64;
                ratio *= ((2.0 * nf) * (2.0 * nf - 1.0)).sqrt() / (2.0 * nf);
            }
            let want = ratio * (-zeta).powu(n as u32) / r.cosh().sqrt();
            assert!((v.amplitudes[2 * n] - want).norm() <= 1e-12);
        }
    }

    #[test]
    fn svs_transition_examples() {
        assert!((svs_transition(c(0.3, 0.0), 0.5, 0).unwrap() - 0.953_939_201_416_945_7).abs() < 1e-14);
        assert!((svs_transition(c(0.0, 0.3), 0.5, 1).unwrap() - 0.042_927_264_063_762_55).abs() < 1e-14);
        assert_eq!(svs_transition(c(0.0, 0.0), 3.0, 0).unwrap(), 1.0);
        assert_eq!(svs_transition(c(0.0, 0.0), 3.0, 4).unwrap(), 0.0);
        let sab = svs_transition_sabotaged(c(0.3, 0.0), 0.5, 0).unwrap();
        assert!((sab - 0.953_939_201_416_945_7).abs() > 0.05);
    }

    fn dispersion(eps: f64) -> usize {
        (0..400).filter(|&n| svs_transition(c(0.3, 0.0), eps, n).unwrap() > 1e-3).max().unwrap()
    }

    #[test]
    fn svs_dispersion_grows_with_epsilon() {
        let d: Vec<usize> = [0.5, 2.5, 4.5, 6.5].iter().map(|&e| dispersion(e)).collect();
        assert!(d.windows(2).all(|w| w[1] > w[0]), "{d:?}");
    }

    #[test]
    fn svs_overlap_examples() {
        let a = SvsSpec::new(c(0.2, 0.4), 1.5, 0.3).unwrap();
        assert!((svs_overlap(&a, &a).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let vac = SvsSpec::new(c(0.0, 0.0), 1.5, 0.0).unwrap();
        let b = SvsSpec::new(c(0.5, -0.1), 1.5, 0.0).unwrap();
        let want = (1.0 - b.zeta.norm_sqr()).powf(0.75);
        assert!((svs_overlap(&vac, &b).unwrap() - c(want, 0.0)).norm() < 1e-15);
        let b = SvsSpec::new(c(0.5, -0.1), 1.5, -0.7).unwrap();
        let n = 120;
        let va = svs_amplitudes(&a, Some(n)).unwrap();
        let vb = svs_amplitudes(&b, Some(n)).unwrap();
        assert!((va.inner(&vb) - svs_overlap(&a, &b).unwrap()).norm() <= 1e-10);
        assert!(svs_overlap(&a, &SvsSpec::new(c(0.0, 0.0), 2.5, 0.0).unwrap()).is_err());
    }

    #[test]
    fn truncation_override_upward_only() {
        let spec = SvsSpec::new(c(0.5, 0.0), 2.5, 0.0).unwrap();
        let (auto, _) = svs_truncation(spec.zeta, spec.epsilon).unwrap();
        assert_eq!(svs_amplitudes(&spec, Some(auto + 10)).unwrap().truncation(), auto + 10);
        assert!(matches!(svs_amplitudes(&spec, Some(auto - 2)), Err(Error::Truncation { .. })));
        let cs = CsSpec::new(c(0.3, 0.0), c(1.0, 0.0), 1.5, 0.0).unwrap();
        let (auto, _) = cs_truncation(&cs).unwrap();
        assert!(matches!(cs_amplitudes(&cs, Some(auto / 2)), Err(Error::Truncation { .. })));
    }

    /// Eq. (30.2) coefficients, computed independently of the Laguerre route.
    fn para_bose_cs(xi: C64, eps: f64, n_total: usize) -> Vec<C64> {
        let y = xi.norm_sqr();
        let i_sum = crate::specfun::bessel_i(eps - 1.0, c(y, 0.0)).unwrap().re + crate::specfun::bessel_i(eps, c(y, 0.0)).unwrap().re;
        let pref = crate::specfun::principal_pow(xi / 2f64.sqrt(), eps - 1.0) / i_sum.sqrt();
        let mut out = Vec::new();
        for n in 0..n_total / 2 {
            let nf = n as f64;
            let p = (0.5 * xi * xi).powu(n as u32);
            let ln_fact = log_gamma(nf + 1.0).unwrap();
            out.push(pref * p / (ln_fact + log_gamma(nf + eps).unwrap()).exp().sqrt());
            out.push(pref * xi * p / (2.0 * (ln_fact + log_gamma(nf + eps + 1.0).unwrap()).exp()).sqrt());
        }
        out
    }

    #[test]
    fn cs_zeta_zero_matches_para_bose_cs() {
        for &eps in &[0.5, 1.5, 2.5, 4.5] {
            for &xi in &[c(0.7, 0.2), c(-1.2, 0.5), c(0.0, 2.0), c(-1.5, 0.0)] {
                let v = cs_amplitudes(&CsSpec::new(c(0.0, 0.0), xi, eps, 0.0).unwrap(), Some(80)).unwrap();
                let w = para_bose_cs(xi, eps, 80);
                for k in 0..80 {
                    assert!((v.amplitudes[k] - w[k]).norm() <= 1e-12, "eps={eps} xi={xi} k={k}");
                }
            }
        }
    }

    #[test]
    fn cs_small_zeta_is_continuous() {
        let xi = c(0.8, -0.6);
        let build = |z: f64| cs_amplitudes(&CsSpec::new(C64::from_polar(z, 0.4), xi, 2.5, 0.0).unwrap(), Some(60)).unwrap();
        let at = build(1e-4);
        assert!(build(1e-4 * (1.0 + 1e-6)).max_abs_diff(&at) <= 1e-7);
        assert!(build(1e-4 * (1.0 - 1e-6)).max_abs_diff(&at) <= 1e-7);
        // approach to the ζ = 0 state is linear in |ζ|
        let at0 = build(0.0);
        let d1 = build(1e-3).max_abs_diff(&at0);
        let d2 = build(1e-5).max_abs_diff(&at0);
        assert!(d2 < 1e-4 && (d1 / d2 - 100.0).abs() < 5.0, "{d1} {d2}");
    }

    #[test]
    fn cs_canonical_reduction() {
        let xi = c(1.1, -0.7);
        let v = cs_amplitudes(&CsSpec::new(c(0.0, 0.0), xi, 0.5, 0.0).unwrap(), None).unwrap();
        let mut want = Vec::new();
        let mut term = C64::new((-0.5 * xi.norm_sqr()).exp(), 0.0);
        for n in 0..v.truncation() {
            if n > 0 {
                term *= xi / (n as f64).sqrt();
            }
            want.push(term);
        }
        let w = FockVector::new(want);
        let phase = w.inner(&v);
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        let u = phase / phase.norm();
        assert!(v.max_abs_diff(&w.scaled(u)) <= 1e-12);
    }

    #[test]
    fn cs_xi_zero_is_svs() {
        let zeta = c(0.3, -0.4);
        let v = cs_amplitudes(&CsSpec::new(zeta, c(0.0, 0.0), 2.5, 0.2).unwrap(), Some(120)).unwrap();
        let s = svs_amplitudes(&SvsSpec::new(zeta, 2.5, 0.2).unwrap(), Some(120)).unwrap();
        assert!(v.max_abs_diff(&s) <= 1e-9);
        assert!(v.amplitudes.iter().skip(1).step_by(2).all(|a| *a == c(0.0, 0.0)));
    }

    #[test]
    fn cs_eigenrelation() {
        let p = AlgebraParams::from_ell(1);
        let spec = CsSpec::new(c(0.45, 0.0), c(0.0, 1.0), p.epsilon, 0.0).unwrap();
        let n = 160;
        let v = cs_amplitudes(&spec, Some(n)).unwrap();
        let l = build_ladder(&p, n).unwrap();
        let a_f = l.a.add(&l.a_dagger.scale(spec.zeta));
        let r = a_f.apply(&v).sub(&v.scaled(spec.xi));
        let resid = r.amplitudes.iter().take(n - 2).map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!(resid <= 1e-8, "{resid}");
        let s = svs_amplitudes(&SvsSpec::new(spec.zeta, p.epsilon, 0.0).unwrap(), Some(n)).unwrap();
        let r = a_f.apply(&s);
        assert!(r.amplitudes.iter().take(n - 2).map(|c| c.norm()).fold(0.0, f64::max) <= 1e-8);
    }

    #[test]
    fn transitions_match_amplitudes_and_sum_to_one() {
        let (zeta, xi, eps) = (c(0.2, 0.5), c(1.3, 0.4), 1.75);
        let v = cs_amplitudes(&CsSpec::new(zeta, xi, eps, 0.0).unwrap(), None).unwrap();
        let mut total = 0.0;
        for k in 0..v.truncation() {
            let p = cs_transition(zeta, xi, eps, k).unwrap();
            assert!((p - v.amplitudes[k].norm_sqr()).abs() <= 1e-10);
            total += p;
        }
        assert!((total - 1.0).abs() <= 1e-9);
        assert_eq!(cs_transition(zeta, c(0.0, 0.0), eps, 3).unwrap(), 0.0);
    }

    #[test]
    fn cs_overlap_checks() {
        let a = CsSpec::new(c(0.3, 0.1), c(0.5, 1.0), 2.5, 0.3).unwrap();
        let b = CsSpec::new(c(-0.2, 0.4), c(-0.7, 0.2), 2.5, -1.1).unwrap();
        assert!((cs_overlap(&a, &a).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        let n = 200;
        let direct = cs_amplitudes(&a, Some(n)).unwrap().inner(&cs_amplitudes(&b, Some(n)).unwrap());
        assert!((cs_overlap(&a, &b).unwrap() - direct).norm() <= 1e-9);
        assert!(cs_overlap(&a, &b).unwrap().norm() <= 1.0);
        let a0 = CsSpec { xi: c(0.0, 0.0), ..a };
        let b0 = CsSpec { xi: c(0.0, 0.0), ..b };
        let svs = svs_overlap(&SvsSpec::new(a.zeta, 2.5, a.theta).unwrap(), &SvsSpec::new(b.zeta, 2.5, b.theta).unwrap()).unwrap();
        assert!((cs_overlap(&a0, &b0).unwrap() - svs).norm() <= 1e-10);
    }

    #[test]
    fn mean_reflection_examples() {
        assert_eq!(mean_reflection(c(0.4, 0.0), c(0.0, 0.0), 2.5).unwrap(), 1.0);
        let r = mean_reflection(c(0.0, 0.0), c(1.0, 0.0), 0.5).unwrap();
        assert!((r - (-2.0f64).exp()).abs() < 1e-14);
        for &y in &[0.5, 10.0, 35.0] {
            assert!((mean_reflection_at(0.5, y).unwrap() - (-2.0 * y).exp()).abs() < 1e-14);
        }
        let (zeta, xi, eps) = (c(0.3, 0.3), c(0.9, -0.4), 3.5);
        let v = cs_amplitudes(&CsSpec::new(zeta, xi, eps, 0.0).unwrap(), None).unwrap();
        let parity: f64 = v.probabilities().iter().enumerate().map(|(k, p)| if k % 2 == 0 { *p } else { -p }).sum();
        assert!((parity - mean_reflection(zeta, xi, eps).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn large_displacement_stays_finite() {
        let spec = CsSpec::new(c(0.6, 0.2), c(20.0, -15.0), 2.5, 0.0).unwrap();
        let b = cs_state(&spec, None).unwrap();
        assert!(b.norm_residual <= 1e-9, "{}", b.norm_residual);
    }

    fn cs_strategy() -> impl Strategy<Value = CsSpec> {
        (0.0..0.9f64, -3.2..3.2f64, 0.0..3.0f64, -3.2..3.2f64, 0.5..6.0f64, -3.0..3.0f64)
            .prop_map(|(r, a, x, b, eps, th)| CsSpec::new(C64::from_polar(r, a), C64::from_polar(x, b), eps, th).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn states_are_normalized(spec in cs_strategy()) {
            let cs = cs_state(&spec, None).unwrap();
            prop_assert!(cs.norm_residual <= 1e-9);
            let svs = svs_state(&SvsSpec::new(spec.zeta, spec.epsilon, spec.theta).unwrap(), None).unwrap();
            prop_assert!(svs.norm_residual <= 1e-9);
            prop_assert!(svs.vector.amplitudes.iter().skip(1).step_by(2).all(|a| *a == c(0.0, 0.0)));
        }
    }
}
