//! Bipartite N×N states, maximally entangled bases and Weyl operators.
//!
//! Index convention: the composite basis vector `|i⟩⊗|j⟩` sits at position
//! `i·N + j`, so the first factor (Alice) carries the slow index. Weyl
//! labels `(a, b)` are flattened as `k = a·N + b`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector, Subsystem};

/// Default tolerance for the density-matrix invariants.
pub const DENSITY_TOL: f64 = 1e-9;
/// Tolerance on `‖ψ‖² = 1` for pure states.
pub const PURE_NORM_TOL: f64 = 1e-12;
/// Entrywise tolerance on `Tr_X |ψ⟩⟨ψ| = I/N` for maximal entanglement.
pub const MAX_ENT_TOL: f64 = 1e-10;

/// Largest supported local dimension.
pub const MAX_LOCAL_DIM: usize = 16;

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if (2..=MAX_LOCAL_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(n))
    }
}

/// A validated `N²×N²` density matrix of a bipartite N×N system.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Local dimension N.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total dimension N².
    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    /// `|ψ⟩⟨ψ|` for a pure state of dimension N².
    pub fn from_pure(psi: &PureState) -> Result<Self> {
        let n = local_dim_of(psi.dim())?;
        let a = psi.amplitudes();
        Ok(DensityMatrix {
            n,
            entries: a * a.adjoint(),
        })
    }

    /// Conjugation `U ρ U†` by a global unitary of size N².
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::dims(
                format!("{0}x{0}", self.dim()),
                format!("{}x{}", u.nrows(), u.ncols()),
            ));
        }
        let m = u * &self.entries * u.adjoint();
        validate_density(&m, self.n, DENSITY_TOL)
    }

    /// Wraps a matrix already known to satisfy the invariants.
    pub(crate) fn from_trusted(n: usize, entries: CMatrix) -> Self {
        DensityMatrix {
            n,
            entries: linalg::hermitian_part(&entries),
        }
    }
}

/// Local dimension N of a composite dimension N².
pub(crate) fn local_dim_of(dim: usize) -> Result<usize> {
    let n = (dim as f64).sqrt().round() as usize;
    if n * n != dim {
        return Err(Error::dims("a perfect-square dimension", dim));
    }
    check_dim(n)?;
    Ok(n)
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let defect = (amplitudes.norm_squared() - 1.0).abs();
        if defect.is_nan() || defect > PURE_NORM_TOL {
            return Err(Error::NotNormalized(defect));
        }
        Ok(PureState { amplitudes })
    }

    /// Normalizes `v`; fails only on a zero or non-finite vector.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter("cannot normalize a zero vector".into()));
        }
        Ok(PureState {
            amplitudes: v.unscale(norm),
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::dims(format!("index < {dim}"), index));
        }
        let mut v = CVector::zeros(dim);
        v[index] = c(1.0, 0.0);
        Ok(PureState { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// Orthonormal basis of N² maximally entangled states, `states[a·N + b] = (W(a,b)⊗I)|seed⟩`.
#[derive(Debug, Clone)]
pub struct MaxEntangledBasis {
    n: usize,
    states: Vec<PureState>,
}

impl MaxEntangledBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Matrix whose k-th column is `states[k]`.
    pub fn as_columns(&self) -> CMatrix {
        let d = self.n * self.n;
        CMatrix::from_fn(d, d, |i, k| self.states[k].amplitudes()[i])
    }
}

/// Symmetrizes `raw` and checks the three density-matrix invariants against `tol`.
pub fn validate_density(raw: &CMatrix, n: usize, tol: f64) -> Result<DensityMatrix> {
    let d = n * n;
    if raw.nrows() != d || raw.ncols() != d {
        return Err(Error::dims(
            format!("{d}x{d}"),
            format!("{}x{}", raw.nrows(), raw.ncols()),
        ));
    }
    check_dim(n)?;
    if raw.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }

    let herm_defect = linalg::max_abs_diff(raw, &raw.adjoint());
    if herm_defect > tol {
        return Err(Error::NotHermitian(herm_defect));
    }
    let sym = linalg::hermitian_part(raw);

    let tr = linalg::trace(&sym);
    let trace_defect = (tr - c(1.0, 0.0)).norm();
    if trace_defect > tol {
        return Err(Error::TraceNotOne(trace_defect));
    }

    let eigs = linalg::hermitian_eigenvalues(&sym)?;
    let min_eig = eigs.last().copied().unwrap_or(0.0);
    if min_eig < -tol {
        return Err(Error::NotPSD(min_eig));
    }

    Ok(DensityMatrix { n, entries: sym })
}

/// `I/N²` on the N×N system.
pub fn maximally_mixed(n: usize) -> Result<DensityMatrix> {
    check_dim(n)?;
    let d = n * n;
    Ok(DensityMatrix {
        n,
        entries: CMatrix::identity(d, d).unscale(d as f64),
    })
}

/// `(1/√N) Σ_i |i⟩⊗|i⟩`.
pub fn canonical_phi(n: usize) -> Result<PureState> {
    check_dim(n)?;
    let amp = 1.0 / (n as f64).sqrt();
    let mut v = CVector::zeros(n * n);
    for i in 0..n {
        v[i * n + i] = c(amp, 0.0);
    }
    Ok(PureState { amplitudes: v })
}

/// `X^a Z^b` with `X|j⟩ = |j+1 mod N⟩` and `Z|j⟩ = ω^j |j⟩`, `ω = e^{2πi/N}`.
pub fn weyl_operator(n: usize, a: usize, b: usize) -> Result<CMatrix> {
    check_dim(n)?;
    if a >= n || b >= n {
        return Err(Error::IndexOutOfRange { n, a, b });
    }
    // (X^a Z^b)|j⟩ = ω^{bj} |j + a⟩
    let mut w = CMatrix::zeros(n, n);
    for j in 0..n {
        let phase = 2.0 * PI * ((b * j) % n) as f64 / n as f64;
        w[((j + a) % n, j)] = Complex64::from_polar(1.0, phase);
    }
    Ok(w)
}

/// Max entrywise deviation of both one-sided reduced states of `psi` from `I/N`.
pub fn max_entanglement_defect(psi: &PureState, n: usize) -> Result<f64> {
    if psi.dim() != n * n {
        return Err(Error::dims(n * n, psi.dim()));
    }
    let proj = psi.projector();
    let target = CMatrix::identity(n, n).unscale(n as f64);
    let mut defect: f64 = 0.0;
    for side in [Subsystem::First, Subsystem::Second] {
        let red = linalg::partial_trace_matrix(&proj, n, side)?;
        defect = defect.max(linalg::max_abs_diff(&red, &target));
    }
    Ok(defect)
}

/// Applies `op ⊗ I` to a vector of dimension N² (op acts on the first factor).
pub(crate) fn apply_first(op: &CMatrix, v: &CVector, n: usize) -> CVector {
    let mut out = CVector::zeros(n * n);
    for i in 0..n {
        for k in 0..n {
            let o = op[(i, k)];
            if o.re == 0.0 && o.im == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += o * v[k * n + j];
            }
        }
    }
    out
}

/// Maximally entangled basis generated from `seed` (default `canonical_phi(n)`) by Weyl shifts on the first factor.
pub fn bell_basis(n: usize, seed_state: Option<&PureState>) -> Result<MaxEntangledBasis> {
    check_dim(n)?;
    let seed = match seed_state {
        Some(s) => {
            let defect = max_entanglement_defect(s, n)?;
            if defect > MAX_ENT_TOL {
                return Err(Error::NotMaximallyEntangled(defect));
            }
            s.clone()
        }
        None => canonical_phi(n)?,
    };
    let mut states = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let w = weyl_operator(n, a, b)?;
            states.push(PureState {
                amplitudes: apply_first(&w, seed.amplitudes(), n),
            });
        }
    }
    Ok(MaxEntangledBasis { n, states })
}

/// Diagonal `c_kk = ⟨states[k]|ρ|states[k]⟩` of ρ in a maximally entangled basis.
pub fn bell_diagonal_coeffs(rho: &DensityMatrix, basis: &MaxEntangledBasis) -> Result<Vec<f64>> {
    if rho.n() != basis.n() {
        return Err(Error::dims(format!("n = {}", basis.n()), format!("n = {}", rho.n())));
    }
    Ok(basis
        .states()
        .iter()
        .map(|s| linalg::expectation(rho.matrix(), s.amplitudes()))
        .collect())
}

/// Full matrix `⟨states[j]|ρ|states[k]⟩`; used internally for Bell-diagonality checks.
pub(crate) fn matrix_in_basis(rho: &DensityMatrix, basis: &MaxEntangledBasis) -> CMatrix {
    let b = basis.as_columns();
    b.adjoint() * rho.matrix() * b
}

pub use crate::linalg::tensor;

/// Reduced state after tracing out `traced`.
pub fn partial_trace(rho: &DensityMatrix, traced: Subsystem) -> CMatrix {
    linalg::partial_trace_matrix(rho.matrix(), rho.n(), traced).expect("density matrix has N²×N² shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(vals: &[f64]) -> CMatrix {
        CMatrix::from_fn(vals.len(), vals.len(), |i, j| {
            if i == j {
                c(vals[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    #[test]
    fn validate_accepts_maximally_mixed() {
        let rho = validate_density(&diag(&[0.25; 4]), 2, DENSITY_TOL).unwrap();
        assert_eq!(rho.n(), 2);
    }

    #[test]
    fn validate_rejects_negative_eigenvalue() {
        let err = validate_density(&diag(&[0.55, 0.5, 0.0, -0.05]), 2, DENSITY_TOL).unwrap_err();
        match err {
            Error::NotPSD(v) => assert!((v + 0.05).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_bad_trace_and_shape() {
        assert!(matches!(
            validate_density(&diag(&[0.5, 0.6, 0.05, 0.05]), 2, DENSITY_TOL),
            Err(Error::TraceNotOne(_))
        ));
        assert!(matches!(
            validate_density(&CMatrix::identity(3, 3), 2, DENSITY_TOL),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn validate_rejects_non_hermitian_beyond_tol() {
        let mut m = diag(&[0.25; 4]);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(validate_density(&m, 2, DENSITY_TOL), Err(Error::NotHermitian(v)) if (v - 0.1).abs() < 1e-12));
        // rounding-level asymmetry is absorbed
        m[(0, 1)] = c(1e-12, 0.0);
        let rho = validate_density(&m, 2, DENSITY_TOL).unwrap();
        assert_eq!(rho.matrix()[(0, 1)], rho.matrix()[(1, 0)].conj());
    }

    #[test]
    fn maximally_mixed_entries() {
        let rho = maximally_mixed(3).unwrap();
        assert_eq!(rho.dim(), 9);
        for i in 0..9 {
            assert!((rho.matrix()[(i, i)].re - 1.0 / 9.0).abs() < 1e-15);
        }
        assert!(matches!(maximally_mixed(1), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn canonical_phi_amplitudes() {
        let phi = canonical_phi(3).unwrap();
        for (i, a) in phi.amplitudes().iter().enumerate() {
            let expected = if i % 4 == 0 { 1.0 / 3f64.sqrt() } else { 0.0 };
            assert!((a.re - expected).abs() < 1e-15 && a.im == 0.0);
        }
        let proj = DensityMatrix::from_pure(&phi).unwrap();
        assert!((linalg::expectation(proj.matrix(), phi.amplitudes()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn weyl_xz_for_qubit() {
        assert_eq!(weyl_operator(2, 0, 0).unwrap(), CMatrix::identity(2, 2));
        let w = weyl_operator(2, 1, 1).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(linalg::max_abs_diff(&w, &expected) < 1e-15);
        assert!(matches!(weyl_operator(2, 2, 0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn weyl_trace_orthogonality_n3() {
        // Brute-force loop over all 81 label pairs.
        let n = 3;
        for a in 0..n {
            for b in 0..n {
                let w = weyl_operator(n, a, b).unwrap();
                for ap in 0..n {
                    for bp in 0..n {
                        let wp = weyl_operator(n, ap, bp).unwrap();
                        let tr = linalg::trace(&(w.adjoint() * &wp));
                        let expected = if a == ap && b == bp { n as f64 } else { 0.0 };
                        assert!((tr - c(expected, 0.0)).norm() < 1e-12, "({a},{b}) vs ({ap},{bp})");
                    }
                }
            }
        }
    }

    #[test]
    fn weyl_is_unitary() {
        for n in [2, 3, 5] {
            for a in 0..n {
                for b in 0..n {
                    assert!(linalg::unitarity_defect(&weyl_operator(n, a, b).unwrap()) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn qubit_bell_basis_first_state() {
        let basis = bell_basis(2, None).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let expected = [s, 0.0, 0.0, s];
        for (z, e) in basis.states()[0].amplitudes().iter().zip(expected) {
            assert!((z - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn bell_basis_orthonormal_and_complete() {
        for n in 2..=4 {
            let basis = bell_basis(n, None).unwrap();
            let cols = basis.as_columns();
            let d = n * n;
            let gram = cols.adjoint() * &cols;
            assert!(linalg::max_abs_diff(&gram, &CMatrix::identity(d, d)) < 1e-10);
            let completeness = &cols * cols.adjoint();
            assert!(linalg::max_abs_diff(&completeness, &CMatrix::identity(d, d)) < 1e-9);
            for s in basis.states() {
                assert!(max_entanglement_defect(s, n).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn product_seed_rejected() {
        let seed = PureState::basis(4, 0).unwrap();
        assert!(matches!(
            bell_basis(2, Some(&seed)),
            Err(Error::NotMaximallyEntangled(_))
        ));
    }

    #[test]
    fn coeffs_of_reference_states() {
        let basis = bell_basis(2, None).unwrap();
        let mm = maximally_mixed(2).unwrap();
        for v in bell_diagonal_coeffs(&mm, &basis).unwrap() {
            assert!((v - 0.25).abs() < 1e-15);
        }
        let phi = DensityMatrix::from_pure(&canonical_phi(2).unwrap()).unwrap();
        let coeffs = bell_diagonal_coeffs(&phi, &basis).unwrap();
        for (v, e) in coeffs.iter().zip([1.0, 0.0, 0.0, 0.0]) {
            assert!((v - e).abs() < 1e-12);
        }
        let b3 = bell_basis(3, None).unwrap();
        assert!(matches!(
            bell_diagonal_coeffs(&phi, &b3),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn reduced_state_of_phi() {
        let phi = DensityMatrix::from_pure(&canonical_phi(2).unwrap()).unwrap();
        let red = partial_trace(&phi, Subsystem::First);
        assert!(linalg::max_abs_diff(&red, &diag(&[0.5, 0.5])) < 1e-15);
    }
}
