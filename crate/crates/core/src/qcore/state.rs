use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{inner, norm, ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::tol;

/// Unit-norm state vector. Bipartite vectors use the flat index
/// `i * d_b + j` for `|i⟩_A ⊗ |j⟩_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroVector);
        }
        let n = norm(&amplitudes);
        if !n.is_finite() || (n * n - 1.0).abs() > tol::ALGEBRAIC {
            return Err(Error::Normalization {
                deviation: (n * n - 1.0).abs(),
            });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `v` to unit norm.
    pub fn normalized(v: Vec<C64>) -> Result<Self> {
        let n = norm(&v);
        if !(n > tol::PROB_FLOOR) || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            amplitudes: v.into_iter().map(|z| z / n).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn kron(&self, other: &PureState) -> PureState {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        PureState { amplitudes }
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            matrix: projector(self),
        }
    }

    /// Amplitudes of a bipartite state arranged as a `d_a × d_b` matrix `M`
    /// with `|ψ⟩ = Σ M[i,j] |i⟩|j⟩`.
    pub fn amplitude_matrix(&self, d_a: usize, d_b: usize) -> Result<ComplexMatrix> {
        if d_a * d_b != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: d_a * d_b,
                found: self.dim(),
            });
        }
        ComplexMatrix::from_row_major(d_a, d_b, self.amplitudes.clone())
    }
}

/// `|v⟩⟨v|` for a unit vector.
pub fn projector(v: &PureState) -> ComplexMatrix {
    let a = v.amplitudes();
    ComplexMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj())
}

/// Projector onto the line spanned by an arbitrary nonzero vector.
pub fn projector_onto(v: &[C64]) -> Result<ComplexMatrix> {
    Ok(projector(&PureState::normalized(v.to_vec())?))
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState("matrix is not square".into()));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let herm = matrix.hermiticity_error();
        if herm > tol::ALGEBRAIC {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol::ALGEBRAIC || tr.im.abs() > tol::ALGEBRAIC {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = matrix.eigvalsh()?.first().copied().unwrap_or(0.0);
        if min < -tol::EIGEN_FLOOR {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    /// Skips the eigenvalue check; for operators that are positive by construction.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        }
    }

    /// Mixed state of a system of dimension `system_dim` obtained by tracing
    /// out an ancilla from the pure state with amplitudes `amplitudes[s * ancilla_dim + e]`.
    pub fn from_purification(amplitudes: &[C64], system_dim: usize, ancilla_dim: usize) -> Result<Self> {
        if amplitudes.len() != system_dim * ancilla_dim {
            return Err(Error::WrongLength {
                expected: system_dim * ancilla_dim,
                found: amplitudes.len(),
            });
        }
        let psi = PureState::new(amplitudes.to_vec())?;
        let m = psi.amplitude_matrix(system_dim, ancilla_dim)?;
        Ok(Self {
            matrix: m.matmul(&m.adjoint()),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        Self {
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix.eigvalsh().expect("density operators are Hermitian")
    }

    /// `Tr[ρ X]`.
    pub fn expectation(&self, observable: &ComplexMatrix) -> C64 {
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.matrix[(i, k)] * observable[(k, i)];
            }
        }
        acc
    }

    /// Unitary conjugation `U ρ U†`.
    pub fn conjugated(&self, u: &UnitaryOperator) -> DensityOperator {
        let m = u.matrix().matmul(&self.matrix).matmul(&u.matrix().adjoint());
        Self { matrix: m }
    }
}

/// Which tensor factor of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

pub(crate) fn partial_trace_matrix(m: &ComplexMatrix, d_a: usize, d_b: usize, traced: Party) -> ComplexMatrix {
    match traced {
        Party::Alice => ComplexMatrix::from_fn(d_b, d_b, |j, l| (0..d_a).map(|i| m[(i * d_b + j, i * d_b + l)]).sum()),
        Party::Bob => ComplexMatrix::from_fn(d_a, d_a, |i, k| (0..d_b).map(|j| m[(i * d_b + j, k * d_b + j)]).sum()),
    }
}

/// Reduced state after tracing out `traced` from a state on `A⊗B` with
/// dimensions `dims = (d_a, d_b)`.
pub fn partial_trace(rho: &DensityOperator, dims: (usize, usize), traced: Party) -> Result<DensityOperator> {
    let (d_a, d_b) = dims;
    if d_a * d_b != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: d_a * d_b,
            found: rho.dim(),
        });
    }
    Ok(DensityOperator::from_trusted(partial_trace_matrix(
        rho.matrix(),
        d_a,
        d_b,
        traced,
    )))
}

/// Matrix with `M†M = I`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct UnitaryOperator {
    matrix: ComplexMatrix,
}

impl TryFrom<ComplexMatrix> for UnitaryOperator {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<UnitaryOperator> for ComplexMatrix {
    fn from(u: UnitaryOperator) -> Self {
        u.matrix
    }
}

impl UnitaryOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.unitarity_error();
        if !(deviation <= tol::STRUCTURAL) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            matrix: self.matrix.conj(),
        }
    }

    pub fn compose(&self, other: &UnitaryOperator) -> Self {
        Self {
            matrix: self.matrix.matmul(&other.matrix),
        }
    }

    pub fn kron(&self, other: &UnitaryOperator) -> Self {
        Self {
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    pub fn apply(&self, v: &PureState) -> PureState {
        PureState {
            amplitudes: self.matrix.apply(v.amplitudes()),
        }
    }
}

/// Ordered orthonormal basis, stored as the unitary whose columns are the
/// basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    columns: ComplexMatrix,
}

impl OrthonormalBasis {
    pub fn from_vectors(vectors: &[Vec<C64>]) -> Result<Self> {
        let d = vectors.len();
        if d == 0 {
            return Err(Error::ZeroVector);
        }
        for v in vectors {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
        }
        Self::from_columns(ComplexMatrix::from_columns(vectors)?)
    }

    pub fn from_columns(columns: ComplexMatrix) -> Result<Self> {
        if !columns.is_square() {
            return Err(Error::DimensionMismatch {
                expected: columns.rows(),
                found: columns.cols(),
            });
        }
        let deviation = columns.unitarity_error();
        if !(deviation <= tol::STRUCTURAL) {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { columns })
    }

    pub(crate) fn from_trusted(columns: ComplexMatrix) -> Self {
        Self { columns }
    }

    pub fn from_unitary(u: &UnitaryOperator) -> Self {
        Self {
            columns: u.matrix().clone(),
        }
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            columns: ComplexMatrix::identity(dim),
        }
    }

    /// Columns `|f_k⟩ = Σ_j e^{2πi jk/d} |j⟩ / √d`.
    pub fn fourier(dim: usize) -> Self {
        let s = 1.0 / (dim as f64).sqrt();
        let columns = ComplexMatrix::from_fn(dim, dim, |j, k| {
            Complex64::from_polar(s, 2.0 * std::f64::consts::PI * (j * k) as f64 / dim as f64)
        });
        Self { columns }
    }

    /// Eigenbasis of a Hermitian observable, outcomes ordered by descending
    /// eigenvalue. Degenerate spectra are rejected since the eigenbasis would
    /// not be determined by the observable.
    pub fn from_observable(observable: &ComplexMatrix) -> Result<Self> {
        let (values, vectors) = observable.eigh()?;
        let gap = values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if gap < tol::STRUCTURAL {
            return Err(Error::DegenerateObservable(gap));
        }
        let n = values.len();
        let columns = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, n - 1 - j)]);
        Ok(Self { columns })
    }

    pub fn dim(&self) -> usize {
        self.columns.rows()
    }

    /// Unitary matrix whose `k`-th column is the `k`-th basis vector.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.columns
    }

    pub fn as_unitary(&self) -> UnitaryOperator {
        UnitaryOperator::from_trusted(self.columns.clone())
    }

    pub fn vector(&self, k: usize) -> PureState {
        PureState {
            amplitudes: self.columns.column(k),
        }
    }

    pub fn vectors(&self) -> Vec<PureState> {
        (0..self.dim()).map(|k| self.vector(k)).collect()
    }

    pub fn projector(&self, k: usize) -> ComplexMatrix {
        projector(&self.vector(k))
    }

    /// Same basis with vector `k` multiplied by `e^{i phases[k]}`.
    pub fn with_phases(&self, phases: &[f64]) -> Self {
        let d = self.dim();
        let columns = ComplexMatrix::from_fn(d, d, |i, k| {
            self.columns[(i, k)] * Complex64::from_polar(1.0, phases[k])
        });
        Self { columns }
    }

    /// Basis reordered so that new vector `k` is old vector `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let d = self.dim();
        Self {
            columns: ComplexMatrix::from_fn(d, d, |i, k| self.columns[(i, order[k])]),
        }
    }

    /// Basis `{U|v_k⟩}`.
    pub fn transformed(&self, u: &UnitaryOperator) -> Self {
        Self {
            columns: u.matrix().matmul(&self.columns),
        }
    }

    pub fn to_vectors(&self) -> Vec<Vec<C64>> {
        (0..self.dim()).map(|k| self.columns.column(k)).collect()
    }
}

/// `(I ⊗ V)|Φ⁺⟩` with `|Φ⁺⟩ = Σ_i |i⟩|i⟩ / √d`.
pub fn maximally_entangled(dim: usize, v: &UnitaryOperator) -> Result<PureState> {
    if v.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.dim(),
        });
    }
    let s = 1.0 / (dim as f64).sqrt();
    let m = v.matrix();
    let mut amplitudes = vec![ZERO; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            amplitudes[i * dim + j] = m[(j, i)] * s;
        }
    }
    Ok(PureState { amplitudes })
}

/// `Σ_i √λ_i |a_i⟩ ⊗ |b_i⟩` for Schmidt weights `λ` summing to one.
pub fn schmidt_state(weights: &[f64], basis_a: &OrthonormalBasis, basis_b: &OrthonormalBasis) -> Result<PureState> {
    let (d_a, d_b) = (basis_a.dim(), basis_b.dim());
    if weights.len() > d_a.min(d_b) {
        return Err(Error::DimensionMismatch {
            expected: d_a.min(d_b),
            found: weights.len(),
        });
    }
    if let Some((index, &value)) = weights.iter().enumerate().find(|(_, &w)| w < 0.0 || w.is_nan()) {
        return Err(Error::NegativeCoefficient { index, value });
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > tol::ALGEBRAIC {
        return Err(Error::Normalization {
            deviation: (total - 1.0).abs(),
        });
    }
    let mut amplitudes = vec![ZERO; d_a * d_b];
    for (i, &w) in weights.iter().enumerate() {
        let (a, b) = (basis_a.matrix().column(i), basis_b.matrix().column(i));
        let s = w.sqrt();
        for x in 0..d_a {
            for y in 0..d_b {
                amplitudes[x * d_b + y] += a[x] * b[y] * s;
            }
        }
    }
    PureState::normalized(amplitudes)
}

/// Modified Gram-Schmidt. The first vector's direction is kept.
pub fn gram_schmidt(vectors: &[Vec<C64>]) -> Result<OrthonormalBasis> {
    let d = vectors.len();
    if d == 0 {
        return Err(Error::ZeroVector);
    }
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(d);
    for (index, v) in vectors.iter().enumerate() {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
        let mut w = v.clone();
        // two passes keep the result orthogonal to working precision
        for _ in 0..2 {
            for u in &out {
                let c = inner(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        let pivot = norm(&w);
        if !(pivot >= tol::RANK_PIVOT) {
            return Err(Error::RankDeficient { index, pivot });
        }
        out.push(w.into_iter().map(|z| z / pivot).collect());
    }
    Ok(OrthonormalBasis::from_trusted(ComplexMatrix::from_columns(&out)?))
}
