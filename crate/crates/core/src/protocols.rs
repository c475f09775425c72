//! Standard teleportation and Bennett–Wiesner dense coding over a shared
//! bipartite resource. Alice always holds the first tensor factor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::sampling::{self, stream_rng};
use crate::states::{self, DensityMatrix, PureState};

/// Minimum Monte Carlo sample count.
pub const MIN_MC_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportResult {
    /// `⟨Φ|ρ|Φ⟩`.
    pub f_phi: f64,
    /// `(N·f_Φ + 1)/(N + 1)`.
    pub f_avg_exact: f64,
    pub f_avg_mc: Option<f64>,
    pub mc_std_error: Option<f64>,
    pub n_samples: usize,
}

impl TeleportResult {
    /// True when the Monte Carlo mean lies within `k` standard errors of the exact value.
    pub fn mc_agrees(&self, k: f64) -> bool {
        match (self.f_avg_mc, self.mc_std_error) {
            (Some(mc), Some(se)) => (mc - self.f_avg_exact).abs() <= k * se.max(1e-12),
            _ => false,
        }
    }
}

/// Best average fidelity without entanglement, `2/(N+1)`.
pub fn classical_fidelity(n: usize) -> f64 {
    2.0 / (n as f64 + 1.0)
}

/// Output state on Bob's side after teleporting `input` through `resource`.
///
/// Bell measurement in the default basis on (input ⊗ Alice), outcome
/// `k = a·N + b` leaves Bob with `W(a,b)†|ψ⟩` for a perfect resource; the
/// correction applied is `W(a,b)`.
pub fn teleportation_channel_apply(resource: &DensityMatrix, input: &PureState) -> Result<CMatrix> {
    let n = resource.n();
    if input.dim() != n {
        return Err(Error::dims(n, input.dim()));
    }
    let rho = resource.matrix();
    let psi = input.amplitudes();
    let inv_n = 1.0 / n as f64;
    let mut out = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let w = states::weyl_operator(n, a, b)?;
            let v: CVector = w.adjoint() * psi;
            // Bob's unnormalized conditional state: (1/N) Σ v_a v̄_a' ρ[(a,b),(a',b')]
            let mut bob = CMatrix::zeros(n, n);
            for (ai, va) in v.iter().enumerate() {
                for (aj, vb) in v.iter().enumerate() {
                    let coeff = va * vb.conj() * inv_n;
                    for r in 0..n {
                        for s in 0..n {
                            bob[(r, s)] += coeff * rho[(ai * n + r, aj * n + s)];
                        }
                    }
                }
            }
            out += &w * bob * w.adjoint();
        }
    }
    Ok(out)
}

/// Exact average fidelity of the standard protocol.
pub fn teleportation_avg_fidelity_exact(resource: &DensityMatrix) -> Result<TeleportResult> {
    let n = resource.n() as f64;
    let phi = states::canonical_phi(resource.n())?;
    let f_phi = linalg::expectation(resource.matrix(), phi.amplitudes());
    Ok(TeleportResult {
        f_phi,
        f_avg_exact: (n * f_phi + 1.0) / (n + 1.0),
        f_avg_mc: None,
        mc_std_error: None,
        n_samples: 0,
    })
}

/// Exact average fidelity plus a Monte Carlo estimate over Haar-random inputs.
///
/// Sample `i` draws its input from stream `(seed, i)`, so the estimate does not
/// depend on how the work is partitioned.
pub fn teleportation_avg_fidelity_mc(resource: &DensityMatrix, n_samples: usize, seed: u64) -> Result<TeleportResult> {
    if n_samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_MC_SAMPLES} samples, got {n_samples}"
        )));
    }
    let n = resource.n();
    let fidelities: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let psi = sampling::haar_pure_with(n, &mut stream_rng(seed, i))?;
            let out = teleportation_channel_apply(resource, &psi)?;
            Ok(linalg::expectation(&out, psi.amplitudes()))
        })
        .collect::<Result<_>>()?;
    let count = fidelities.len() as f64;
    let mean = fidelities.iter().sum::<f64>() / count;
    let var = fidelities.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (count - 1.0);
    let mut result = teleportation_avg_fidelity_exact(resource)?;
    result.f_avg_mc = Some(mean);
    result.mc_std_error = Some((var / count).sqrt());
    result.n_samples = n_samples;
    Ok(result)
}

/// Weyl-encoded signal states with uniform priors.
#[derive(Debug, Clone)]
pub struct DenseCodingEnsemble {
    pub n: usize,
    pub signal_states: Vec<DensityMatrix>,
    pub probabilities: Vec<f64>,
}

impl DenseCodingEnsemble {
    pub fn average_state(&self) -> Result<DensityMatrix> {
        let d = self.n * self.n;
        let mut avg = CMatrix::zeros(d, d);
        for (p, s) in self.probabilities.iter().zip(&self.signal_states) {
            avg += s.matrix().scale(*p);
        }
        states::validate_density(&avg, self.n, states::DENSITY_TOL)
    }
}

/// `signal_k = (W(a,b)⊗I) ρ (W(a,b)⊗I)†`, each with probability `1/N²`.
pub fn densecoding_ensemble(rho: &DensityMatrix) -> Result<DenseCodingEnsemble> {
    let n = rho.n();
    let id = CMatrix::identity(n, n);
    let mut signal_states = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let op = linalg::tensor(&states::weyl_operator(n, a, b)?, &id);
            signal_states.push(DensityMatrix::from_trusted(n, &op * rho.matrix() * op.adjoint()));
        }
    }
    let p = 1.0 / (n * n) as f64;
    Ok(DenseCodingEnsemble {
        n,
        signal_states,
        probabilities: vec![p; n * n],
    })
}

/// Holevo quantity `S(Σ p_i W_i) - Σ p_i S(W_i)` in bits.
pub fn densecoding_holevo(ensemble: &DenseCodingEnsemble) -> Result<f64> {
    let avg = ensemble.average_state()?;
    let mut mean_entropy = 0.0;
    for (p, s) in ensemble.probabilities.iter().zip(&ensemble.signal_states) {
        mean_entropy += p * entropy::von_neumann_entropy(s)?;
    }
    Ok(entropy::von_neumann_entropy(&avg)? - mean_entropy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DenseCodingVerdict {
    Useful,
    NotUseful,
}

/// Useful iff the standard ensemble's Holevo quantity beats `log₂N` by more than `1e-9`.
pub fn densecoding_useful(rho: &DensityMatrix) -> Result<DenseCodingVerdict> {
    let chi = densecoding_holevo(&densecoding_ensemble(rho)?)?;
    Ok(verdict_from_chi(chi, rho.n()))
}

pub fn verdict_from_chi(chi: f64, n: usize) -> DenseCodingVerdict {
    if chi > (n as f64).log2() + 1e-9 {
        DenseCodingVerdict::Useful
    } else {
        DenseCodingVerdict::NotUseful
    }
}
