//! Entropy functionals (base-2) and the teleportation / dense-coding thresholds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, SpectralDecomposition};
use crate::states::{self, check_dim, DensityMatrix, MaxEntangledBasis, DENSITY_TOL};

pub use crate::linalg::spectral_decomposition;

/// `-p log₂ p` with `0·log 0 := 0`.
#[inline]
pub fn entropy_term(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Shannon entropy (bits) of a probability vector; nonpositive entries contribute zero.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().map(|&p| entropy_term(p)).sum()
}

/// Eigenvalues of ρ, descending, with PSD noise in `[-1e-9, 0)` clamped to zero.
pub fn clamped_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let eigs = linalg::hermitian_eigenvalues(rho.matrix())?;
    eigs.into_iter()
        .map(|lam| {
            if lam >= 0.0 {
                Ok(lam)
            } else if lam >= -DENSITY_TOL {
                Ok(0.0)
            } else {
                Err(Error::NotPSD(lam))
            }
        })
        .collect()
}

/// Von Neumann entropy `-Tr ρ log₂ ρ` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    // an eigenvalue a hair above 1 would otherwise give -1e-16
    Ok(shannon_entropy(&clamped_spectrum(rho)?).max(0.0))
}

/// Shannon entropy of the diagonal of ρ in a maximally entangled basis.
pub fn shannon_entropy_in_basis(rho: &DensityMatrix, basis: &MaxEntangledBasis) -> Result<f64> {
    let coeffs = states::bell_diagonal_coeffs(rho, basis)?;
    Ok(shannon_entropy(&coeffs))
}

/// Linear entropy `1 - Tr ρ²`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    // Tr ρ² = Σ |ρ_jk|² for Hermitian ρ
    1.0 - rho.matrix().iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// `log₂N + (1 - 1/N) log₂(N+1)`: above this entropy, F(ρ) < 1/N.
pub fn teleport_threshold_vn(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let nf = n as f64;
    Ok(nf.log2() + (1.0 - 1.0 / nf) * (nf + 1.0).log2())
}

/// `1 - 2/(N(N+1))`, the linear-entropy counterpart of [`teleport_threshold_vn`].
pub fn teleport_threshold_linear(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let pairs = (n * (n + 1)) as f64;
    // one division keeps T_L(2) == 2/3 to the last bit
    Ok((pairs - 2.0) / pairs)
}

/// `log₂N`: above this entropy the standard dense-coding scheme beats no classical channel.
pub fn densecoding_threshold(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    Ok((n as f64).log2())
}

/// Distillable entanglement of a rank-two Bell-diagonal two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Distillability {
    /// Raw `1 - S(ρ)`, possibly negative.
    pub ebits: f64,
    pub distillable: bool,
}

const BELL_OFFDIAG_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-9;

/// `1 - S(ρ)` for two-qubit states that are Bell-diagonal in `basis` with at
/// most two nonzero eigenvalues.
pub fn distillable_entanglement_rank2_belldiag(
    rho: &DensityMatrix,
    basis: &MaxEntangledBasis,
) -> Result<Distillability> {
    if rho.n() != 2 || basis.n() != 2 {
        return Err(Error::PreconditionFailed(format!(
            "requires a two-qubit state, got n = {}",
            rho.n()
        )));
    }
    let in_basis = states::matrix_in_basis(rho, basis);
    let mut off = 0.0f64;
    for j in 0..4 {
        for k in 0..4 {
            if j != k {
                off = off.max(in_basis[(j, k)].norm());
            }
        }
    }
    if off >= BELL_OFFDIAG_TOL {
        return Err(Error::PreconditionFailed(format!(
            "state is not Bell-diagonal (off-diagonal magnitude {off:e})"
        )));
    }
    let spectrum = clamped_spectrum(rho)?;
    let rank = spectrum.iter().filter(|&&l| l > RANK_TOL).count();
    if !(1..=2).contains(&rank) {
        return Err(Error::PreconditionFailed(format!("rank {rank}, expected at most 2")));
    }
    let ebits = 1.0 - shannon_entropy(&spectrum);
    Ok(Distillability {
        ebits,
        distillable: ebits > 0.0,
    })
}

/// Spectral data bundled for reporting; reconstruction and orthonormality already checked.
pub fn spectrum_of(rho: &DensityMatrix) -> Result<SpectralDecomposition> {
    spectral_decomposition(rho.matrix())
}

/// Shannon entropy of the distribution `(1/N, rest uniform over N²-1)`.
pub fn extremal_distribution_entropy(n: usize) -> Result<f64> {
    check_dim(n)?;
    let nf = n as f64;
    let rest = (1.0 - 1.0 / nf) / (nf * nf - 1.0);
    let mut p = vec![rest; n * n];
    p[0] = 1.0 / nf;
    Ok(shannon_entropy(&p))
}
