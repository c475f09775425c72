//! JSON state files: `{"n": N, "matrix": [[[re, im], ...], ...]}`, row-major N²×N².

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::states::{self, DensityMatrix, DENSITY_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        StateFile {
            n: rho.n(),
            matrix: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }

    /// Builds and validates the density matrix described by the file.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        let d = self.n * self.n;
        if self.matrix.len() != d || self.matrix.iter().any(|row| row.len() != d) {
            let cols = self.matrix.first().map_or(0, Vec::len);
            return Err(Error::dims(
                format!("{d}x{d}"),
                format!("{}x{}", self.matrix.len(), cols),
            ));
        }
        if self.matrix.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Parse("matrix contains NaN or infinite entries".into()));
        }
        let m = CMatrix::from_fn(d, d, |i, j| {
            let [re, im] = self.matrix[i][j];
            c(re, im)
        });
        states::validate_density(&m, self.n, DENSITY_TOL)
    }
}

pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_density()
}

pub fn read_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_state(&text)
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string(&StateFile::from_density(rho)).expect("state file serializes")
}

pub fn write_state(path: impl AsRef<Path>, rho: &DensityMatrix) -> Result<()> {
    std::fs::write(path, state_to_json(rho))?;
    Ok(())
}
