//! Truncated para-Bose number basis.
//!
//! Matrices for `a`, `a†`, `R` on `|0⟩ … |N−1⟩`, the quadratic Hamiltonian,
//! and a fixed-step RK4 Schrödinger integrator used as a brute-force oracle
//! for the closed-form states.
//!
//! The last two rows and columns of every product of ladder matrices are
//! wrong by construction (the algebra is unbounded), so relation checks look
//! at the leading block only.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::dynamics::CoefficientSchedule;
use crate::error::{Error, Result};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Deformation data of the Wigner–Heisenberg algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraParams {
    /// Ground-level parameter ε ≥ 1/2.
    pub epsilon: f64,
    /// Wigner parameter ν = 2ε − 1.
    pub nu: f64,
    /// ℓ when ε = 2ℓ + 1/2.
    pub ell: Option<u32>,
    /// Length scale l.
    pub length_scale: f64,
    pub hbar: f64,
}

impl AlgebraParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon < 0.5 {
            return Err(Error::Config(format!("epsilon must be >= 1/2, got {epsilon}")));
        }
        Ok(Self {
            epsilon,
            nu: 2.0 * epsilon - 1.0,
            ell: None,
            length_scale: 1.0,
            hbar: 1.0,
        })
    }

    /// ε = 2ℓ + 1/2.
    pub fn from_ell(ell: u32) -> Self {
        let epsilon = 2.0 * ell as f64 + 0.5;
        Self {
            epsilon,
            nu: 2.0 * epsilon - 1.0,
            ell: Some(ell),
            length_scale: 1.0,
            hbar: 1.0,
        }
    }

    pub fn with_length_scale(mut self, l: f64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::Config(format!("length scale must be positive, got {l}")));
        }
        self.length_scale = l;
        Ok(self)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::Config(format!("hbar must be positive, got {hbar}")));
        }
        self.hbar = hbar;
        Ok(self)
    }

    /// ℓ if ε is exactly of the form 2ℓ + 1/2.
    pub fn quantized_ell(&self) -> Option<u32> {
        if let Some(ell) = self.ell {
            return Some(ell);
        }
        let twice = self.epsilon - 0.5;
        if twice >= 0.0 && twice.fract() == 0.0 && (twice as u64) % 2 == 0 {
            Some((twice / 2.0) as u32)
        } else {
            None
        }
    }
}

/// Amplitudes on the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub amplitudes: Array1<C64>,
}

impl FockVector {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        Self {
            amplitudes: Array1::from(amplitudes),
        }
    }

    pub fn vacuum(truncation: usize) -> Self {
        Self::basis(truncation, 0)
    }

    pub fn basis(truncation: usize, n: usize) -> Self {
        let mut amplitudes = Array1::from_elem(truncation, ZERO);
        amplitudes[n] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn truncation(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|`, the modulus-based fidelity used throughout.
    pub fn fidelity(&self, other: &FockVector) -> f64 {
        self.inner(other).norm()
    }

    /// Probability mass on the last `rows` basis states.
    pub fn tail_mass(&self, rows: usize) -> f64 {
        let n = self.truncation();
        self.amplitudes.iter().skip(n.saturating_sub(rows)).map(|c| c.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn max_abs_diff(&self, other: &FockVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: C64) -> FockVector {
        FockVector {
            amplitudes: self.amplitudes.mapv(|c| c * s),
        }
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        FockVector {
            amplitudes: &self.amplitudes - &other.amplitudes,
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

/// Dense complex matrix on the truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: Array2<C64>,
}

impl OperatorMatrix {
    pub fn zeros(truncation: usize) -> Self {
        Self {
            entries: Array2::from_elem((truncation, truncation), ZERO),
        }
    }

    pub fn identity(truncation: usize) -> Self {
        let mut m = Self::zeros(truncation);
        for i in 0..truncation {
            m.entries[[i, i]] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn truncation(&self) -> usize {
        self.entries.nrows()
    }

    pub fn dagger(&self) -> Self {
        Self {
            entries: self.entries.t().mapv(|c| c.conj()),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            entries: self.entries.dot(&other.entries),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries + &other.entries,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries - &other.entries,
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            entries: self.entries.mapv(|c| c * s),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self))
    }

    /// Row-by-row product with the columns summed in ascending order.
    pub fn apply(&self, v: &FockVector) -> FockVector {
        let n = self.truncation();
        let mut out = Array1::from_elem(n, ZERO);
        for i in 0..n {
            let mut acc = ZERO;
            for j in 0..n {
                let h = self.entries[[i, j]];
                if h != ZERO {
                    acc += h * v.amplitudes[j];
                }
            }
            out[i] = acc;
        }
        FockVector { amplitudes: out }
    }

    /// Largest entry modulus on the leading `block × block` corner.
    pub fn max_abs_leading(&self, block: usize) -> f64 {
        let mut m = 0.0f64;
        for i in 0..block {
            for j in 0..block {
                m = m.max(self.entries[[i, j]].norm());
            }
        }
        m
    }

    /// `⟨v|M|v⟩`.
    pub fn expectation(&self, v: &FockVector) -> C64 {
        v.inner(&self.apply(v))
    }
}

#[derive(Debug, Clone)]
pub struct Ladder {
    pub a: OperatorMatrix,
    pub a_dagger: OperatorMatrix,
    pub reflection: OperatorMatrix,
}

/// `⟨n−1|a|n⟩`: √n for even n, √(2(m+ε)) for n = 2m+1, written uniformly as
/// √(n + (2ε−1)·[n odd]).
pub fn lowering_element(epsilon: f64, n: usize) -> f64 {
    if n % 2 == 0 {
        (n as f64).sqrt()
    } else {
        (2.0 * ((n / 2) as f64 + epsilon)).sqrt()
    }
}

pub fn build_ladder(params: &AlgebraParams, truncation: usize) -> Result<Ladder> {
    if truncation < 2 {
        return Err(Error::Config(format!("truncation must be at least 2, got {truncation}")));
    }
    let mut a = OperatorMatrix::zeros(truncation);
    let mut reflection = OperatorMatrix::zeros(truncation);
    for n in 0..truncation {
        reflection.entries[[n, n]] = C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
        if n >= 1 {
            a.entries[[n - 1, n]] = C64::new(lowering_element(params.epsilon, n), 0.0);
        }
    }
    let a_dagger = a.dagger();
    Ok(Ladder {
        a,
        a_dagger,
        reflection,
    })
}

/// Quadratic Hamiltonian
/// `(ħ/2)(α* a² + α a†²) + (ħβ/2)(a†a + a a†) + ħδ`.
pub fn build_hamiltonian(
    params: &AlgebraParams,
    alpha: C64,
    beta: f64,
    delta: f64,
    truncation: usize,
) -> Result<OperatorMatrix> {
    let banded = BandedHamiltonian::new(params, alpha, beta, delta, truncation)?;
    Ok(banded.to_dense())
}

/// Position `l(a + a†)/√2`.
pub fn position_matrix(params: &AlgebraParams, ladder: &Ladder) -> OperatorMatrix {
    ladder
        .a
        .add(&ladder.a_dagger)
        .scale(C64::new(params.length_scale / std::f64::consts::SQRT_2, 0.0))
}

/// Momentum `ħ(a − a†)/(i√2 l)`.
pub fn momentum_matrix(params: &AlgebraParams, ladder: &Ladder) -> OperatorMatrix {
    let s = params.hbar / (std::f64::consts::SQRT_2 * params.length_scale);
    ladder.a.sub(&ladder.a_dagger).scale(C64::new(0.0, -s))
}

/// The Hamiltonian stored as its three non-zero diagonals (offsets −2, 0, +2).
#[derive(Debug, Clone)]
pub struct BandedHamiltonian {
    /// `H[n][n]`
    pub diag: Vec<C64>,
    /// `H[n][n+2]`
    pub upper: Vec<C64>,
    /// `H[n+2][n]`
    pub lower: Vec<C64>,
}

impl BandedHamiltonian {
    pub fn new(params: &AlgebraParams, alpha: C64, beta: f64, delta: f64, truncation: usize) -> Result<Self> {
        if truncation < 2 {
            return Err(Error::Config(format!("truncation must be at least 2, got {truncation}")));
        }
        let h = params.hbar;
        let eps = params.epsilon;
        let low = |n: usize| if n == 0 { 0.0 } else { lowering_element(eps, n) };
        // (a†a + a a†)[n][n] = low(n)² + low(n+1)², the second term truncated
        let diag = (0..truncation)
            .map(|n| {
                let up = if n + 1 < truncation { low(n + 1).powi(2) } else { 0.0 };
                C64::new(0.5 * h * beta * (low(n).powi(2) + up) + h * delta, 0.0)
            })
            .collect();
        // (a²)[n][n+2] = low(n+1) low(n+2)
        let upper: Vec<C64> = (0..truncation.saturating_sub(2))
            .map(|n| 0.5 * h * alpha.conj() * (low(n + 1) * low(n + 2)))
            .collect();
        let lower = (0..truncation.saturating_sub(2))
            .map(|n| 0.5 * h * alpha * (low(n + 1) * low(n + 2)))
            .collect();
        Ok(Self { diag, upper, lower })
    }

    pub fn truncation(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> OperatorMatrix {
        let n = self.truncation();
        let mut m = OperatorMatrix::zeros(n);
        for i in 0..n {
            m.entries[[i, i]] = self.diag[i];
        }
        for i in 0..self.upper.len() {
            m.entries[[i, i + 2]] = self.upper[i];
            m.entries[[i + 2, i]] = self.lower[i];
        }
        m
    }

    /// Same summation order as [`OperatorMatrix::apply`] on the dense form.
    pub fn apply(&self, v: &FockVector) -> FockVector {
        let n = self.truncation();
        let x = &v.amplitudes;
        let mut out = Array1::from_elem(n, ZERO);
        for i in 0..n {
            let mut acc = ZERO;
            if i >= 2 && self.lower[i - 2] != ZERO {
                acc += self.lower[i - 2] * x[i - 2];
            }
            if self.diag[i] != ZERO {
                acc += self.diag[i] * x[i];
            }
            if i + 2 < n && self.upper[i] != ZERO {
                acc += self.upper[i] * x[i + 2];
            }
            out[i] = acc;
        }
        FockVector { amplitudes: out }
    }
}

/// Which matrix-vector product the integrator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixPath {
    #[default]
    Banded,
    Dense,
}

/// Integrator limits.
#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub path: MatrixPath,
    pub norm_drift_limit: f64,
    pub halving_limit: f64,
    pub tail_rows: usize,
    pub initial_tail_limit: f64,
    pub final_tail_limit: f64,
    /// Rerun at dt/2 and compare.
    pub verify_halving: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            path: MatrixPath::Banded,
            norm_drift_limit: 1e-8,
            halving_limit: 1e-8,
            tail_rows: 8,
            initial_tail_limit: 1e-12,
            final_tail_limit: 1e-10,
            verify_halving: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub times: Vec<f64>,
    pub states: Vec<FockVector>,
    pub max_norm_drift: f64,
    /// Max amplitude difference against the dt/2 rerun (0 when skipped).
    pub halving_diff: f64,
}

impl Evolution {
    pub fn last(&self) -> &FockVector {
        self.states.last().expect("at least the initial state")
    }
}

/// Integrate `iħ ∂ψ/∂t = H(t)ψ` from 0 to `t_final`.
pub fn evolve_schrodinger(
    psi0: &FockVector,
    schedule: &CoefficientSchedule,
    t_final: f64,
    dt: f64,
    params: &AlgebraParams,
) -> Result<FockVector> {
    Ok(evolve_sampled(psi0, schedule, &[t_final], dt, params, &EvolveOptions::default())?
        .last()
        .clone())
}

/// Integrate and record the state at each of `sample_times` (ascending,
/// non-negative). Each segment uses the largest step ≤ `dt` that divides it.
pub fn evolve_sampled(
    psi0: &FockVector,
    schedule: &CoefficientSchedule,
    sample_times: &[f64],
    dt: f64,
    params: &AlgebraParams,
    opts: &EvolveOptions,
) -> Result<Evolution> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    if psi0.truncation() < 2 {
        return Err(Error::Config("truncation must be at least 2".into()));
    }
    let mut prev = 0.0;
    for &t in sample_times {
        if !(t >= prev) || !t.is_finite() {
            return Err(Error::Config("sample times must be finite, non-negative and ascending".into()));
        }
        prev = t;
    }
    let norm0 = psi0.norm_sqr();
    if (norm0 - 1.0).abs() > opts.norm_drift_limit {
        return Err(Error::NormDrift {
            drift: (norm0 - 1.0).abs(),
            limit: opts.norm_drift_limit,
        });
    }
    let tail0 = psi0.tail_mass(opts.tail_rows);
    if tail0 >= opts.initial_tail_limit {
        return Err(Error::TailMass {
            mass: tail0,
            rows: opts.tail_rows,
            limit: opts.initial_tail_limit,
        });
    }

    let coarse = run(psi0, schedule, sample_times, dt, params, opts)?;
    let mut evolution = coarse;
    if opts.verify_halving {
        let fine = run(psi0, schedule, sample_times, 0.5 * dt, params, opts)?;
        let diff = evolution
            .states
            .iter()
            .zip(fine.states.iter())
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max);
        if diff > opts.halving_limit {
            return Err(Error::StepHalving {
                diff,
                limit: opts.halving_limit,
            });
        }
        evolution.halving_diff = diff;
    }
    let tail = evolution.last().tail_mass(opts.tail_rows);
    if tail >= opts.final_tail_limit {
        return Err(Error::TailMass {
            mass: tail,
            rows: opts.tail_rows,
            limit: opts.final_tail_limit,
        });
    }
    Ok(evolution)
}

fn run(
    psi0: &FockVector,
    schedule: &CoefficientSchedule,
    sample_times: &[f64],
    dt: f64,
    params: &AlgebraParams,
    opts: &EvolveOptions,
) -> Result<Evolution> {
    let n = psi0.truncation();
    let mut psi = psi0.clone();
    let mut t = 0.0;
    let mut max_drift = 0.0f64;
    let mut states = Vec::with_capacity(sample_times.len());
    let inv_hbar = 1.0 / params.hbar;

    let rhs = |time: f64, v: &FockVector| -> Result<FockVector> {
        let (alpha, beta, delta) = schedule.sample(time)?;
        let h = BandedHamiltonian::new(params, alpha, beta, delta, n)?;
        let hv = match opts.path {
            MatrixPath::Banded => h.apply(v),
            MatrixPath::Dense => h.to_dense().apply(v),
        };
        Ok(hv.scaled(-I * inv_hbar))
    };

    for &target in sample_times {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / dt).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            let t_start = t;
            for k in 0..steps {
                let tk = t_start + k as f64 * h;
                let k1 = rhs(tk, &psi)?;
                let k2 = rhs(tk + 0.5 * h, &axpy(&psi, 0.5 * h, &k1))?;
                let k3 = rhs(tk + 0.5 * h, &axpy(&psi, 0.5 * h, &k2))?;
                let k4 = rhs(tk + h, &axpy(&psi, h, &k3))?;
                let mut next = psi.amplitudes.clone();
                for i in 0..n {
                    next[i] += (h / 6.0) * (k1.amplitudes[i] + 2.0 * k2.amplitudes[i] + 2.0 * k3.amplitudes[i] + k4.amplitudes[i]);
                }
                psi = FockVector { amplitudes: next };
                let drift = (psi.norm_sqr() - 1.0).abs();
                max_drift = max_drift.max(drift);
                if drift > opts.norm_drift_limit {
                    return Err(Error::NormDrift {
                        drift,
                        limit: opts.norm_drift_limit,
                    });
                }
            }
            t = target;
        }
        states.push(psi.clone());
    }
    Ok(Evolution {
        times: sample_times.to_vec(),
        states,
        max_norm_drift: max_drift,
        halving_diff: 0.0,
    })
}

fn axpy(y: &FockVector, a: f64, x: &FockVector) -> FockVector {
    FockVector {
        amplitudes: &y.amplitudes + &x.amplitudes.mapv(|c| c * a),
    }
}
