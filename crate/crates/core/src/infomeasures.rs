//! Outcome distributions and the entropy functionals built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, DensityOperator, OrthonormalBasis, PureState, C64, ZERO};
use crate::tol;

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        let mut probs = probs;
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -tol::PROB_NEGATIVE {
                return Err(Error::InvalidDistribution(format!("entry {i} is {p}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol::PROB_SUM {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        Ok(Self(probs))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `p[k][j]`: probability that Alice sees outcome `k` and Bob outcome `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    alice_outcomes: usize,
    bob_outcomes: usize,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(alice_outcomes: usize, bob_outcomes: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alice_outcomes * bob_outcomes {
            return Err(Error::WrongLength {
                expected: alice_outcomes * bob_outcomes,
                found: probs.len(),
            });
        }
        let probs = ProbVector::new(probs)?.0;
        Ok(Self {
            alice_outcomes,
            bob_outcomes,
            probs,
        })
    }

    /// Renormalizes raw measurement statistics; rounding can leave the sum a
    /// few ulps off one and individual entries slightly negative.
    fn from_measurement(alice_outcomes: usize, bob_outcomes: usize, mut probs: Vec<f64>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol::PROB_SUM * 100.0 || !total.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "measurement statistics sum to {total}"
            )));
        }
        for p in probs.iter_mut() {
            *p = if *p < tol::PROB_FLOOR { 0.0 } else { *p / total };
        }
        Self::new(alice_outcomes, bob_outcomes, probs)
    }

    pub fn alice_outcomes(&self) -> usize {
        self.alice_outcomes
    }

    pub fn bob_outcomes(&self) -> usize {
        self.bob_outcomes
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.probs[k * self.bob_outcomes + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn alice_marginal(&self) -> ProbVector {
        ProbVector(
            (0..self.alice_outcomes)
                .map(|k| (0..self.bob_outcomes).map(|j| self.get(k, j)).sum())
                .collect(),
        )
    }

    pub fn bob_marginal(&self) -> ProbVector {
        ProbVector(
            (0..self.bob_outcomes)
                .map(|j| (0..self.alice_outcomes).map(|k| self.get(k, j)).sum())
                .collect(),
        )
    }

    /// Merges Bob's outcomes: outcome `j` becomes `groups[j]`.
    pub fn coarse_grain_bob(&self, groups: &[usize]) -> Result<Self> {
        if groups.len() != self.bob_outcomes {
            return Err(Error::WrongLength {
                expected: self.bob_outcomes,
                found: groups.len(),
            });
        }
        let n = groups.iter().max().map_or(0, |m| m + 1);
        let mut probs = vec![0.0; self.alice_outcomes * n];
        for k in 0..self.alice_outcomes {
            for (j, &g) in groups.iter().enumerate() {
                probs[k * n + g] += self.get(k, j);
            }
        }
        Ok(Self {
            alice_outcomes: self.alice_outcomes,
            bob_outcomes: n,
            probs,
        })
    }
}

/// Weighted collection of states of equal dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    weights: ProbVector,
    states: Vec<DensityOperator>,
}

impl Ensemble {
    pub fn new(weights: ProbVector, states: Vec<DensityOperator>) -> Result<Self> {
        if weights.len() != states.len() {
            return Err(Error::WrongLength {
                expected: weights.len(),
                found: states.len(),
            });
        }
        let d = states.first().map_or(0, DensityOperator::dim);
        if let Some(s) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.dim(),
            });
        }
        Ok(Self { weights, states })
    }

    /// Bob's conditional states after Alice measures `basis` on `rho`;
    /// outcomes of zero probability are dropped.
    pub fn steered(rho: &DensityOperator, alice_basis: &OrthonormalBasis) -> Result<Self> {
        let d_a = alice_basis.dim();
        if !rho.dim().is_multiple_of(d_a) {
            return Err(Error::DimensionMismatch {
                expected: d_a,
                found: rho.dim(),
            });
        }
        let d_b = rho.dim() / d_a;
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for k in 0..d_a {
            let a = alice_basis.matrix().column(k);
            // ⟨a_k| ρ |a_k⟩ as an operator on B
            let m = ComplexMatrix::from_fn(d_b, d_b, |j, l| {
                let mut acc = ZERO;
                for i in 0..d_a {
                    for i2 in 0..d_a {
                        acc += a[i].conj() * rho.matrix()[(i * d_b + j, i2 * d_b + l)] * a[i2];
                    }
                }
                acc
            });
            let w = m.trace().re;
            if w > tol::PROB_FLOOR {
                weights.push(w);
                states.push(DensityOperator::from_trusted(m.scale(C64::new(1.0 / w, 0.0))));
            }
        }
        let total: f64 = weights.iter().sum();
        let weights = weights.into_iter().map(|w| w / total).collect();
        Self::new(ProbVector::new(weights)?, states)
    }

    pub fn weights(&self) -> &ProbVector {
        &self.weights
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, DensityOperator::dim)
    }

    pub fn average(&self) -> DensityOperator {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (w, s) in self.weights.as_slice().iter().zip(&self.states) {
            m = &m + &s.matrix().scale(C64::new(*w, 0.0));
        }
        DensityOperator::from_trusted(m)
    }
}

/// Rényi order, with the min-entropy limit as an explicit value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RenyiOrder {
    Finite(f64),
    Infinity,
}

impl RenyiOrder {
    pub fn value(self) -> f64 {
        match self {
            RenyiOrder::Finite(a) => a,
            RenyiOrder::Infinity => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RenyiOrder::Finite(a) => write!(f, "{a}"),
            RenyiOrder::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for RenyiOrder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(RenyiOrder::Infinity),
            t => t
                .parse::<f64>()
                .map(RenyiOrder::Finite)
                .map_err(|e| format!("bad order '{t}': {e}")),
        }
    }
}

/// Shannon entropy in bits of raw weights, ignoring entries below the floor.
pub(crate) fn entropy_bits(p: &[f64]) -> f64 {
    let h: f64 = p.iter().filter(|&&x| x > tol::PROB_FLOOR).map(|&x| -x * x.log2()).sum();
    h.max(0.0)
}

pub fn shannon_entropy(p: &ProbVector) -> f64 {
    entropy_bits(p.as_slice())
}

pub(crate) fn renyi_bits(p: &[f64], order: RenyiOrder) -> Result<f64> {
    match order {
        RenyiOrder::Infinity => {
            let max = p.iter().copied().fold(0.0, f64::max);
            Ok((-max.log2()).max(0.0))
        }
        RenyiOrder::Finite(alpha) => {
            if !(alpha > 0.0) {
                return Err(Error::InvalidOrder(alpha));
            }
            if alpha.is_infinite() {
                return renyi_bits(p, RenyiOrder::Infinity);
            }
            if (alpha - 1.0).abs() < 1e-6 {
                return Ok(entropy_bits(p));
            }
            let s: f64 = p.iter().filter(|&&x| x > tol::PROB_FLOOR).map(|&x| x.powf(alpha)).sum();
            Ok((s.log2() / (1.0 - alpha)).max(0.0))
        }
    }
}

/// `H_α(p) = log₂(Σ p^α) / (1-α)`; Shannon entropy near `α = 1`,
/// `-log₂ max p` at infinity.
pub fn renyi_entropy(p: &ProbVector, order: RenyiOrder) -> Result<f64> {
    renyi_bits(p.as_slice(), order)
}

/// Outcome distribution of a single-system measurement.
pub fn outcome_distribution(rho: &DensityOperator, basis: &OrthonormalBasis) -> Result<ProbVector> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: rho.dim(),
        });
    }
    let b = basis.matrix();
    let probs: Vec<f64> = (0..basis.dim())
        .map(|k| {
            let v = b.column(k);
            let rv = rho.matrix().apply(&v);
            v.iter().zip(&rv).map(|(x, y)| (x.conj() * y).re).sum::<f64>()
        })
        .collect();
    let total: f64 = probs.iter().sum();
    ProbVector::new(
        probs
            .into_iter()
            .map(|p| if p < tol::PROB_FLOOR { 0.0 } else { p / total })
            .collect(),
    )
}

/// Same as [`outcome_distribution`] for a pure state.
pub fn outcome_distribution_pure(psi: &PureState, basis: &OrthonormalBasis) -> Result<ProbVector> {
    if psi.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: psi.dim(),
        });
    }
    let probs: Vec<f64> = basis.vectors().iter().map(|v| v.inner(psi).norm_sqr()).collect();
    let total: f64 = probs.iter().sum();
    ProbVector::new(
        probs
            .into_iter()
            .map(|p| if p < tol::PROB_FLOOR { 0.0 } else { p / total })
            .collect(),
    )
}

/// `p(k,j) = Tr[ρ (P_k ⊗ Q_j)]` for Alice's basis `{|a_k⟩}` and Bob's `{|b_j⟩}`.
pub fn joint_distribution(
    rho: &DensityOperator,
    basis_a: &OrthonormalBasis,
    basis_b: &OrthonormalBasis,
) -> Result<JointDistribution> {
    let (da, db) = (basis_a.dim(), basis_b.dim());
    if rho.dim() != da * db {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            found: rho.dim(),
        });
    }
    let (a, b, m) = (basis_a.matrix(), basis_b.matrix(), rho.matrix());
    let n = da * db;
    // S[(i,l),(k,l')] = Σ_{i'} ρ[(i,l),(i',l')] A[i',k]
    let mut s = vec![ZERO; n * n];
    for row in 0..n {
        for k in 0..da {
            for l2 in 0..db {
                let mut acc = ZERO;
                for i2 in 0..da {
                    acc += m[(row, i2 * db + l2)] * a[(i2, k)];
                }
                s[row * n + k * db + l2] = acc;
            }
        }
    }
    let mut probs = vec![0.0; n];
    for k in 0..da {
        for j in 0..db {
            let mut total = 0.0;
            for i in 0..da {
                let ca = a[(i, k)].conj();
                for l in 0..db {
                    let row = i * db + l;
                    let mut acc = ZERO;
                    for l2 in 0..db {
                        acc += s[row * n + k * db + l2] * b[(l2, j)];
                    }
                    total += (ca * b[(l, j)].conj() * acc).re;
                }
            }
            probs[k * db + j] = total;
        }
    }
    JointDistribution::from_measurement(da, db, probs)
}

/// Pure-state fast path: `p(k,j) = |(A† M B*)[k,j]|²` with `M` the amplitude matrix.
pub fn joint_distribution_pure(
    psi: &PureState,
    basis_a: &OrthonormalBasis,
    basis_b: &OrthonormalBasis,
) -> Result<JointDistribution> {
    let (da, db) = (basis_a.dim(), basis_b.dim());
    let m = psi.amplitude_matrix(da, db)?;
    let amps = basis_a.matrix().adjoint().matmul(&m).matmul(&basis_b.matrix().conj());
    let probs = amps.as_slice().iter().map(|z| z.norm_sqr()).collect();
    JointDistribution::from_measurement(da, db, probs)
}

/// `S(A) + S(B) - S(AB)` of the joint outcome distribution, in bits.
pub fn mutual_information(p: &JointDistribution) -> f64 {
    let mi = shannon_entropy(&p.alice_marginal()) + shannon_entropy(&p.bob_marginal()) - entropy_bits(p.as_slice());
    mi.max(0.0)
}

/// `S(B)_ρ - Σ_i p_i S(B)_{ρ_i}` with `ρ = Σ_i p_i ρ_i`.
pub fn accessible_information(ensemble: &Ensemble, basis: &OrthonormalBasis) -> Result<f64> {
    if ensemble.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: ensemble.dim(),
        });
    }
    let total = shannon_entropy(&outcome_distribution(&ensemble.average(), basis)?);
    let mut conditional = 0.0;
    for (w, s) in ensemble.weights().as_slice().iter().zip(ensemble.states()) {
        conditional += w * shannon_entropy(&outcome_distribution(s, basis)?);
    }
    Ok((total - conditional).max(0.0))
}
