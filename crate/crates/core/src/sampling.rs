//! Seeded random states and unitaries.
//!
//! Every sampler draws from a ChaCha8 stream selected by `(seed, index)`, so
//! a batch can be generated in any order or in parallel with identical output.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};
use crate::states::{self, check_dim, DensityMatrix, PureState, DENSITY_TOL};

/// Generator for stream `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// `rows×cols` matrix of i.i.d. standard complex normals.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    // column-major fill order, fixed for reproducibility
    let mut m = CMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Haar-random unitary: QR of a Ginibre matrix with the triangular diagonal made positive.
pub fn haar_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    let qr = ginibre(n, n, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

pub fn haar_unitary(n: usize, seed: u64) -> Result<CMatrix> {
    haar_unitary_with(n, &mut stream_rng(seed, 0))
}

/// Haar-random pure state of dimension `dim`.
pub fn haar_pure_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState> {
    if dim == 0 {
        return Err(Error::InvalidDimension(dim));
    }
    let v = CVector::from_fn(dim, |_, _| complex_normal(rng));
    PureState::normalized(v)
}

pub fn haar_pure(dim: usize, seed: u64) -> Result<PureState> {
    haar_pure_with(dim, &mut stream_rng(seed, 0))
}

/// `G G† / Tr(G G†)` with `G` a `dim×rank` Ginibre matrix; `dim` must be N².
pub fn hs_random_density_with<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let n = states::local_dim_of(dim)?;
    if rank == 0 || rank > dim {
        return Err(Error::InvalidRank { dim, rank });
    }
    let g = ginibre(dim, rank, rng);
    let m = &g * g.adjoint();
    let tr = crate::linalg::trace(&m).re;
    states::validate_density(&m.unscale(tr), n, DENSITY_TOL)
}

pub fn hs_random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    hs_random_density_with(dim, rank, &mut stream_rng(seed, 0))
}

/// `(1 - mix)·HS(N², N²) + mix·I/N²`.
pub fn high_entropy_density_with<R: Rng + ?Sized>(n: usize, mix: f64, rng: &mut R) -> Result<DensityMatrix> {
    check_dim(n)?;
    if !(0.0..=1.0).contains(&mix) {
        return Err(Error::InvalidParameter(format!("mix {mix} outside [0, 1]")));
    }
    let d = n * n;
    let hs = hs_random_density_with(d, d, rng)?;
    let m = hs.matrix().scale(1.0 - mix) + CMatrix::identity(d, d).scale(mix / d as f64);
    states::validate_density(&m, n, DENSITY_TOL)
}

pub fn high_entropy_density(n: usize, mix: f64, seed: u64) -> Result<DensityMatrix> {
    high_entropy_density_with(n, mix, &mut stream_rng(seed, 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    HaarPure,
    HaarUnitary,
    HilbertSchmidt,
    RankLimited,
    HighEntropy,
}

/// Description of a reproducible sampling stream.
///
/// For density-valued kinds `dim` is the composite dimension N².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub dim: usize,
    pub rank: Option<usize>,
    pub mix_toward_identity: Option<f64>,
    pub seed: u64,
}

impl SamplerSpec {
    pub fn hilbert_schmidt(n: usize, seed: u64) -> Self {
        SamplerSpec {
            kind: SamplerKind::HilbertSchmidt,
            dim: n * n,
            rank: None,
            mix_toward_identity: None,
            seed,
        }
    }

    pub fn high_entropy(n: usize, mix: f64, seed: u64) -> Self {
        SamplerSpec {
            kind: SamplerKind::HighEntropy,
            dim: n * n,
            rank: None,
            mix_toward_identity: Some(mix),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(rank) = self.rank {
            if rank == 0 || rank > self.dim {
                return Err(Error::InvalidRank { dim: self.dim, rank });
            }
        }
        if let Some(mix) = self.mix_toward_identity {
            if !(0.0..=1.0).contains(&mix) {
                return Err(Error::InvalidParameter(format!("mix {mix} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// The `index`-th density matrix of this stream.
    pub fn density(&self, index: u64) -> Result<DensityMatrix> {
        self.validate()?;
        let mut rng = stream_rng(self.seed, index);
        match self.kind {
            SamplerKind::HilbertSchmidt => hs_random_density_with(self.dim, self.dim, &mut rng),
            SamplerKind::RankLimited => {
                let rank = self
                    .rank
                    .ok_or_else(|| Error::InvalidParameter("rank_limited sampler needs a rank".into()))?;
                hs_random_density_with(self.dim, rank, &mut rng)
            }
            SamplerKind::HighEntropy => {
                let n = states::local_dim_of(self.dim)?;
                high_entropy_density_with(n, self.mix_toward_identity.unwrap_or(0.0), &mut rng)
            }
            SamplerKind::HaarPure => {
                let psi = haar_pure_with(self.dim, &mut rng)?;
                DensityMatrix::from_pure(&psi)
            }
            SamplerKind::HaarUnitary => Err(Error::InvalidParameter(
                "haar_unitary sampler does not produce density matrices".into(),
            )),
        }
    }

    /// The `index`-th unitary of a `haar_unitary` stream.
    pub fn unitary(&self, index: u64) -> Result<CMatrix> {
        if self.kind != SamplerKind::HaarUnitary {
            return Err(Error::InvalidParameter("sampler is not haar_unitary".into()));
        }
        haar_unitary_with(self.dim, &mut stream_rng(self.seed, index))
    }
}
