//! Certified bounds on the singlet fraction
//! `F(ρ) = max ⟨Ψ|ρ|Ψ⟩` over maximally entangled `|Ψ⟩`.
//!
//! Every maximally entangled state of an N×N system is `(U⊗I)|Φ⟩` for some
//! unitary `U`, so the lower bound comes from ascent over U(N):
//!
//! ```text
//! f(U) = ⟨Φ|(U†⊗I) ρ (U⊗I)|Φ⟩ = vec(U)† ρ vec(U) / N
//! ```
//!
//! The step is `U ← polar(U + t·G)` with `G = (2/N)·mat(ρ·vec U)` the
//! Euclidean ascent direction. `t` starts at 0.1, halves on decrease and
//! doubles after every accepted step. Because f is convex in `U`, any `t > 0`
//! is an ascent step in exact arithmetic; large `t` approaches the fixed-point
//! map `U ← polar(G)`, which converges at roughly the ratio of the two
//! largest competing overlaps.
//! The upper bound is `λ_max(ρ)`, since maximally entangled states are unit vectors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::sampling;
use crate::states::DensityMatrix;

const INITIAL_STEP: f64 = 0.1;
const MAX_STEP: f64 = 1e8;
const MAX_HALVINGS: usize = 30;
/// Gap below which the bound pair counts as converged.
pub const GAP_TOL: f64 = 1e-6;
/// Margin around `1/N` used by the teleportation verdict.
pub const VERDICT_MARGIN: f64 = 1e-9;
const PROB_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 16,
            max_iters: 500,
            step_tol: 1e-10,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        OptimizerConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        if self.step_tol.is_nan() || self.step_tol < 0.0 {
            return Err(Error::InvalidParameter("step_tol must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Lower and upper bounds on F(ρ) with the witness unitary for `lower`.
#[derive(Debug, Clone, PartialEq)]
pub struct FefBounds {
    pub lower: f64,
    pub upper: f64,
    pub best_unitary: CMatrix,
    pub restarts_used: usize,
    pub iterations_total: usize,
    pub converged: bool,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TeleportVerdict {
    UsableCertified,
    UselessCertified,
    Undecided,
}

/// Outcome of a single ascent run.
#[derive(Debug, Clone)]
pub struct AscentRun {
    pub unitary: CMatrix,
    pub objective: f64,
    pub iterations: usize,
    /// Objective increase of the final accepted step (0 if none was accepted).
    pub last_change: f64,
    /// Objective after initialization and after every accepted step.
    pub history: Vec<f64>,
}

/// Row-major `vec(U)`, i.e. `√N·(U⊗I)|Φ⟩`.
fn vec_rowmajor(u: &CMatrix) -> CVector {
    let n = u.nrows();
    CVector::from_fn(n * n, |k, _| u[(k / n, k % n)])
}

/// `⟨Ψ_U|ρ|Ψ_U⟩` with `|Ψ_U⟩ = (U⊗I)|Φ⟩`.
pub fn overlap_objective(rho: &DensityMatrix, u: &CMatrix) -> f64 {
    let v = vec_rowmajor(u);
    linalg::expectation(rho.matrix(), &v) / rho.n() as f64
}

fn ascent_direction(rho: &DensityMatrix, u: &CMatrix) -> CMatrix {
    let n = rho.n();
    let rv = rho.matrix() * vec_rowmajor(u);
    CMatrix::from_fn(n, n, |i, j| rv[i * n + j] * (2.0 / n as f64))
}

/// Runs the polar-retracted ascent from `u0`.
pub fn ascend_from(rho: &DensityMatrix, u0: CMatrix, cfg: &OptimizerConfig) -> Result<AscentRun> {
    let n = rho.n();
    if u0.nrows() != n || u0.ncols() != n {
        return Err(Error::dims(
            format!("{n}x{n}"),
            format!("{}x{}", u0.nrows(), u0.ncols()),
        ));
    }
    let mut u = u0;
    let mut f = overlap_objective(rho, &u);
    let mut history = vec![f];
    let mut last_change = 0.0;
    let mut iterations = 0;
    let mut step = INITIAL_STEP;

    while iterations < cfg.max_iters {
        iterations += 1;
        let g = ascent_direction(rho, &u);
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let candidate = linalg::polar_unitary(&(&u + g.scale(step)))?;
            let f_new = overlap_objective(rho, &candidate);
            if f_new >= f {
                accepted = Some((candidate, f_new));
                step = (2.0 * step).min(MAX_STEP);
                break;
            }
            step *= 0.5;
        }
        let Some((next, f_next)) = accepted else {
            // no non-decreasing step within the halving budget: local maximum to working precision
            last_change = 0.0;
            break;
        };
        last_change = f_next - f;
        u = next;
        f = f_next;
        history.push(f);
        if last_change < cfg.step_tol {
            break;
        }
    }

    Ok(AscentRun {
        unitary: u,
        objective: f,
        iterations,
        last_change,
        history,
    })
}

/// Initial unitary of restart `r`, drawn from seed `cfg.seed ⊕ r`.
pub fn restart_start(n: usize, cfg: &OptimizerConfig, restart: usize) -> Result<CMatrix> {
    sampling::haar_unitary(n, cfg.seed ^ restart as u64)
}

/// Best ascent objective over `cfg.restarts` random restarts.
///
/// `upper` is set to the trivial bound 1; see [`fef_certified`] for the full pair.
pub fn fef_lower_bound(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<FefBounds> {
    cfg.validate()?;
    let n = rho.n();
    let runs: Vec<AscentRun> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| ascend_from(rho, restart_start(n, cfg, r)?, cfg))
        .collect::<Result<_>>()?;

    // max objective, lowest restart index on ties
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.objective > runs[best].objective {
            best = i;
        }
    }
    let winner = &runs[best];
    let iterations_total = runs.iter().map(|r| r.iterations).sum();
    let lower = winner.objective;
    let upper = 1.0;
    Ok(FefBounds {
        lower,
        upper,
        best_unitary: winner.unitary.clone(),
        restarts_used: runs.len(),
        iterations_total,
        converged: winner.last_change < cfg.step_tol,
        gap: upper - lower,
    })
}

/// `λ_max(ρ)`.
pub fn fef_upper_bound(rho: &DensityMatrix) -> Result<f64> {
    let eigs = linalg::hermitian_eigenvalues(rho.matrix())?;
    Ok(eigs[0].min(1.0))
}

/// Lower bound from the optimizer and upper bound from `λ_max`.
pub fn fef_certified(rho: &DensityMatrix, cfg: &OptimizerConfig) -> Result<FefBounds> {
    let mut bounds = fef_lower_bound(rho, cfg)?;
    let upper = fef_upper_bound(rho)?;
    bounds.upper = upper;
    bounds.gap = upper - bounds.lower;
    bounds.converged = bounds.gap <= GAP_TOL || bounds.converged;
    Ok(bounds)
}

/// Exact F for a state diagonal in a maximally entangled basis: the largest
/// weight and its index, lowest index on ties.
pub fn fef_bell_diagonal_exact(coeffs: &[f64]) -> Result<(f64, usize)> {
    check_probability_vector(coeffs)?;
    let mut best = 0;
    for (i, &v) in coeffs.iter().enumerate() {
        if v > coeffs[best] {
            best = i;
        }
    }
    Ok((coeffs[best], best))
}

pub(crate) fn check_probability_vector(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::NotProbabilityVector("empty vector".into()));
    }
    if let Some(bad) = p.iter().find(|v| !v.is_finite() || **v < -PROB_TOL) {
        return Err(Error::NotProbabilityVector(format!("entry {bad}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(Error::NotProbabilityVector(format!("sum {sum}")));
    }
    Ok(())
}

/// Teleportation usefulness from a bound pair, with a `1e-9` margin around `1/N`.
pub fn usable_for_teleportation(bounds: &FefBounds, n: usize) -> TeleportVerdict {
    let classical = 1.0 / n as f64;
    if bounds.lower > classical + VERDICT_MARGIN {
        TeleportVerdict::UsableCertified
    } else if bounds.upper < classical - VERDICT_MARGIN {
        TeleportVerdict::UselessCertified
    } else {
        TeleportVerdict::Undecided
    }
}
