//! Closed-form state families: generalized Werner states, Bell-diagonal
//! states and the state that saturates the teleportation entropy threshold.

use serde::Serialize;

use crate::entropy::{self, entropy_term};
use crate::error::{Error, Result};
use crate::fef::check_probability_vector;
use crate::linalg::CMatrix;
use crate::states::{self, check_dim, DensityMatrix};

/// `W_N(ε) = ε|Φ⟩⟨Φ| + (1-ε) I/N²` parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WernerParams {
    n: usize,
    epsilon: f64,
}

impl WernerParams {
    pub fn new(n: usize, epsilon: f64) -> Result<Self> {
        check_dim(n)?;
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside [0, 1]")));
        }
        Ok(WernerParams { n, epsilon })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `(λ₁, λ₂)`: λ₁ once (eigenvector |Φ⟩), λ₂ with multiplicity N²-1.
    pub fn spectrum(&self) -> (f64, f64) {
        let d = (self.n * self.n) as f64;
        let rest = (1.0 - self.epsilon) / d;
        (self.epsilon + rest, rest)
    }
}

pub fn werner(params: WernerParams) -> Result<DensityMatrix> {
    let n = params.n();
    let d = n * n;
    let eps = params.epsilon();
    let phi = states::canonical_phi(n)?;
    let m = phi.projector().scale(eps) + CMatrix::identity(d, d).scale((1.0 - eps) / d as f64);
    states::validate_density(&m, n, states::DENSITY_TOL)
}

/// `-λ₁log₂λ₁ - (N²-1)λ₂log₂λ₂`.
pub fn werner_entropy_closed_form(params: WernerParams) -> f64 {
    let (top, rest) = params.spectrum();
    let mult = (params.n() * params.n() - 1) as f64;
    entropy_term(top) + mult * entropy_term(rest)
}

/// `ε + (1-ε)/N²`.
pub fn werner_fef_closed_form(params: WernerParams) -> f64 {
    params.spectrum().0
}

/// Bell-diagonal state with weight 1/N on basis state 0 and the remainder
/// spread evenly over the other N²-1 states.
pub fn extremal_threshold_state(n: usize) -> Result<DensityMatrix> {
    check_dim(n)?;
    bell_diagonal(n, &extremal_weights(n))
}

pub fn extremal_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    let rest = (1.0 - 1.0 / nf) / (nf * nf - 1.0);
    let mut w = vec![rest; n * n];
    w[0] = 1.0 / nf;
    w
}

/// `Σ_k w_k |β_k⟩⟨β_k|` over the default maximally entangled basis.
pub fn bell_diagonal(n: usize, weights: &[f64]) -> Result<DensityMatrix> {
    check_dim(n)?;
    if weights.len() != n * n {
        return Err(Error::dims(n * n, weights.len()));
    }
    check_probability_vector(weights)?;
    let basis = states::bell_basis(n, None)?;
    let d = n * n;
    let mut m = CMatrix::zeros(d, d);
    for (w, s) in weights.iter().zip(basis.states()) {
        if *w != 0.0 {
            m += s.projector().scale(*w);
        }
    }
    states::validate_density(&m, n, states::DENSITY_TOL)
}

/// Werner mixing parameters at which the interesting thresholds are crossed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalEpsilons {
    /// `1/N`: any larger ε gives F > 1/N.
    pub eps_fef_above: f64,
    /// ε with `S(W_N(ε))` equal to the teleportation threshold.
    pub eps_entropy_at_teleport_threshold: f64,
    /// ε with `S(W_N(ε)) = log₂N`.
    pub eps_entropy_at_densecoding_threshold: f64,
}

const BISECTION_TOL: f64 = 1e-10;

/// Solves `S(W_N(ε)) = target` on [0, 1]; S is strictly decreasing in ε.
pub fn werner_epsilon_for_entropy(n: usize, target: f64) -> Result<f64> {
    check_dim(n)?;
    let entropy_at = |eps: f64| werner_entropy_closed_form(WernerParams { n, epsilon: eps });
    let max_entropy = entropy_at(0.0);
    if !(0.0..=max_entropy).contains(&target) {
        return Err(Error::InvalidParameter(format!(
            "entropy {target} outside [0, {max_entropy}]"
        )));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if entropy_at(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn critical_epsilons(n: usize) -> Result<CriticalEpsilons> {
    Ok(CriticalEpsilons {
        eps_fef_above: 1.0 / n as f64,
        eps_entropy_at_teleport_threshold: werner_epsilon_for_entropy(n, entropy::teleport_threshold_vn(n)?)?,
        eps_entropy_at_densecoding_threshold: werner_epsilon_for_entropy(n, entropy::densecoding_threshold(n)?)?,
    })
}
