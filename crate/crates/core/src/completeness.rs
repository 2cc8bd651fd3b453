//! Resolution of the identity by the squeezed vacua with the radial weight
//! `w(r) = (ε−1)/(π(1−r²)²)`, `ε > 1`.
//!
//! The states only reach even number states, so the identity is checked on
//! the even-parity subspace. The angular integral is the exact Kronecker
//! delta `2π δ_{nm}`; only the radial integral is done numerically, in
//! `u = r²`, where the integrand carries the endpoint factor `(1−u)^{ε−2}`.

use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi, GaussLegendre};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::specfun::ln_gamma_ratio;
use crate::states::svs_transition;

pub const DEFAULT_NODES: usize = 64;
/// Agreement required between the `n`- and `2n`-node results.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialRule {
    /// Gauss–Jacobi with the `(1−u)^{ε−2}` factor in the weight.
    Jacobi,
    /// Plain Gauss–Legendre sampling of the full integrand.
    Legendre,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub epsilon: f64,
    /// Cutoff in `(0, 1)` for curve emission and partial integrals.
    pub r_max: f64,
    pub node_count: usize,
}

impl WeightSpec {
    pub fn new(epsilon: f64, r_max: f64, node_count: usize) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(Error::Config(format!("r_max must lie in (0, 1), got {r_max}")));
        }
        if node_count == 0 {
            return Err(Error::Config("node_count must be positive".into()));
        }
        Ok(Self { epsilon, r_max, node_count })
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 1.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::CompletenessDomain { epsilon })
    }
}

pub fn weight(epsilon: f64, r: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if !(0.0..1.0).contains(&r) {
        return Err(crate::error::domain("weight", format!("r must lie in [0, 1), got {r}")));
    }
    let s = 1.0 - r * r;
    Ok((epsilon - 1.0) / (std::f64::consts::PI * s * s))
}

/// `∫₀^{r_max} w dr = (ε−1)/π · [r/(2(1−r²)) + ¼ ln((1+r)/(1−r))]`.
pub fn weight_integral(epsilon: f64, r_max: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if !(0.0..1.0).contains(&r_max) {
        return Err(crate::error::domain("weight_integral", format!("r_max must lie in [0, 1), got {r_max}")));
    }
    let r = r_max;
    Ok((epsilon - 1.0) / std::f64::consts::PI * (r / (2.0 * (1.0 - r * r)) + 0.25 * ((1.0 + r) / (1.0 - r)).ln()))
}

/// `(r, w(r))` on `points` equally spaced radii in `[0, r_max]`.
pub fn weight_curve(spec: &WeightSpec, points: usize) -> Result<Vec<(f64, f64)>> {
    let points = points.max(2);
    (0..points)
        .map(|k| {
            let r = spec.r_max * k as f64 / (points - 1) as f64;
            Ok((r, weight(spec.epsilon, r)?))
        })
        .collect()
}

/// `∫₀¹ (1−u)^{ε−2} g(u) du` with the chosen rule at `nodes` nodes.
fn radial_integral<G: Fn(f64) -> f64>(epsilon: f64, nodes: usize, rule: RadialRule, g: G) -> f64 {
    let alpha = epsilon - 2.0;
    match rule {
        RadialRule::Jacobi => {
            // the crate pins the middle node of odd-degree rules to 0, which is
            // wrong for asymmetric weights; keep the degree even
            let deg = NonZeroUsize::new(nodes + nodes % 2).expect("nonzero");
            let a = FiniteAboveNegOneF64::new(alpha).expect("epsilon > 1");
            let b = FiniteAboveNegOneF64::new(0.0).expect("zero");
            let rule = GaussJacobi::new(deg, a, b);
            // the reference weight is (1−x)^α = 2^α (1−u)^α
            rule.integrate(0.0, 1.0, g) / 2f64.powf(alpha)
        }
        RadialRule::Legendre => {
            let rule = GaussLegendre::new(NonZeroUsize::new(nodes).expect("nonzero"));
            rule.integrate(0.0, 1.0, |u| (1.0 - u).powf(alpha) * g(u))
        }
    }
}

/// Runs the rule at `nodes` and `2·nodes`; disagreement beyond
/// [`CONVERGENCE_TOLERANCE`] is a quadrature error.
fn converged<G: Fn(f64) -> f64 + Copy>(epsilon: f64, nodes: usize, rule: RadialRule, g: G) -> Result<f64> {
    let coarse = radial_integral(epsilon, nodes, rule, g);
    let fine = radial_integral(epsilon, 2 * nodes, rule, g);
    if (fine - coarse).abs() <= CONVERGENCE_TOLERANCE * fine.abs().max(1.0) {
        Ok(fine)
    } else {
        Err(Error::Quadrature {
            detail: format!(
                "radial integral at epsilon = {epsilon} changed by {:.3e} between {nodes} and {} nodes",
                (fine - coarse).abs(),
                2 * nodes
            ),
        })
    }
}

/// `|2π Γ(n+ε)/(n!Γ(ε)) ∫₀¹ (1−r²)^ε r^{2n+1} w(r) dr − 1|`.
pub fn diagonal_identity_residual(epsilon: f64, n: usize, node_count: usize, rule: RadialRule) -> Result<f64> {
    check_epsilon(epsilon)?;
    if node_count == 0 {
        return Err(Error::Config("node_count must be positive".into()));
    }
    let nf = n as f64;
    // with u = r²: 2π·(ε−1)/(2π) ∫ (1−u)^{ε−2} uⁿ du times the Gamma ratio
    let coef = (ln_gamma_ratio(nf + epsilon, nf + 1.0) - ln_gamma_ratio(epsilon, 1.0)).exp() * (epsilon - 1.0);
    let integral = converged(epsilon, node_count, rule, |u| u.powi(n as i32))?;
    Ok((coef * integral - 1.0).abs())
}

/// `max |M − 1|` over the leading `K × K` even block, where
/// `M_{2n,2m} = ∫ c_{2n}(ζ) c_{2m}(ζ)* w d²ζ`.
pub fn identity_block_residual(epsilon: f64, block: usize, node_count: usize) -> Result<f64> {
    Ok(identity_block(epsilon, block, node_count)?
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, v)| (v - if i == j { 1.0 } else { 0.0 }).norm()))
        .fold(0.0, f64::max))
}

/// The even block itself, row `n` for `|2n⟩`.
pub fn identity_block(epsilon: f64, block: usize, node_count: usize) -> Result<Vec<Vec<C64>>> {
    check_epsilon(epsilon)?;
    if block == 0 || block > 32 {
        return Err(Error::Config(format!("block size must be in 1..=32, got {block}")));
    }
    if node_count == 0 {
        return Err(Error::Config("node_count must be positive".into()));
    }
    let mut m = vec![vec![C64::new(0.0, 0.0); block]; block];
    for (n, row) in m.iter_mut().enumerate() {
        // ∫₀^{2π} e^{i(n−m)θ} dθ = 2π δ_{nm}; the diagonal is
        // 2π ∫ |c_{2n}(r)|² w(r) r dr = π ∫ |c_{2n}(√u)|² w(√u) du.
        let g = |u: f64| {
            let p = svs_transition(C64::new(u.sqrt(), 0.0), epsilon, n).unwrap_or(f64::NAN);
            // strip the (1−u)^{ε−2} that the radial rule supplies
            (epsilon - 1.0) * p / (1.0 - u).powf(epsilon)
        };
        let v = converged(epsilon, node_count, RadialRule::Jacobi, g)?;
        if !v.is_finite() {
            return Err(Error::Quadrature {
                detail: format!("non-finite block entry at n = {n}"),
            });
        }
        row[n] = C64::new(v, 0.0);
    }
    Ok(m)
}
