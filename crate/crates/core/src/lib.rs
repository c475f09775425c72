//! Entropy thresholds for the failure of teleportation and dense coding on
//! N×N bipartite mixed states.
//!
//! Above `S(ρ) > log₂N + (1 - 1/N)·log₂(N+1)` bits a state's singlet fraction
//! is below `1/N`, so it cannot teleport better than a classical channel;
//! above `S(ρ) > log₂N` the standard dense-coding scheme stops beating one.
//! This crate computes those quantities, bounds the singlet fraction
//! numerically, and simulates both protocols so the thresholds can be
//! checked operationally.
//!
//! All entropies are in bits.

#![forbid(unsafe_code)]

pub mod entropy;
pub mod error;
pub mod families;
pub mod fef;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod protocols;
pub mod sampling;
pub mod states;

pub use error::{Error, Result};
pub use families::WernerParams;
pub use fef::{FefBounds, OptimizerConfig, TeleportVerdict};
pub use harness::{SweepRow, ThresholdReport, VerifySummary};
pub use linalg::{CMatrix, CVector, SpectralDecomposition, Subsystem};
pub use num_complex::Complex64;
pub use protocols::{DenseCodingEnsemble, DenseCodingVerdict, TeleportResult};
pub use sampling::{SamplerKind, SamplerSpec};
pub use states::{DensityMatrix, MaxEntangledBasis, PureState};
