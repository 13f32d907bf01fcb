//! Overlap coefficients appearing on the right-hand side of the relations.
//!
//! For two bases `B1`, `B2` the overlap matrix `c_ij = |⟨b1_i|b2_j⟩|²` is
//! bistochastic. From it come the largest overlap `a`, the sum `c` of the
//! `d` largest entries and `Σ c_ij²`. The two-vs-two relations use the
//! conjugated overlaps `|⟨b1_i| V Uᵀ V† |b2_j⟩|²`, where `U` carries Alice's
//! first basis to her second; `c̃′` evaluates them at a fixed `V`, while `c′`
//! and `c‴` maximize over `V` numerically and so are lower bounds on the
//! true maxima.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::engine::{GaConfig, Genome, SearchState};
use crate::qcore::{random_unitary, unitary_from_unit_vector, ComplexMatrix, OrthonormalBasis, UnitaryOperator, C64};
use crate::tol;

/// Squared overlaps `c[i][j] = |⟨b1_i|b2_j⟩|²` of two orthonormal bases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl OverlapMatrix {
    /// Validates bistochasticity within `1e-9`.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::WrongLength {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let m = Self { dim, entries };
        let dev = m.bistochastic_deviation();
        if !(dev <= tol::PROB_SUM) || m.entries.iter().any(|&c| c < -tol::PROB_NEGATIVE) {
            return Err(Error::InvalidDistribution(format!(
                "overlap matrix not bistochastic (deviation {dev:e})"
            )));
        }
        Ok(m)
    }

    /// Squared moduli of a unitary matrix's entries.
    fn from_unitary_entries(m: &ComplexMatrix) -> Self {
        Self {
            dim: m.rows(),
            entries: m.as_slice().iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    /// Largest deviation of a row or column sum from one.
    pub fn bistochastic_deviation(&self) -> f64 {
        let d = self.dim;
        let rows = (0..d).map(|i| (self.row(i).iter().sum::<f64>() - 1.0).abs());
        let cols = (0..d).map(|j| (self.column(j).iter().sum::<f64>() - 1.0).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }

    fn argmax(&self) -> (usize, usize, f64) {
        let (k, v) = self.entries.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc },
        );
        (k / self.dim, k % self.dim, v)
    }
}

pub fn overlap_matrix(b1: &OrthonormalBasis, b2: &OrthonormalBasis) -> Result<OverlapMatrix> {
    if b1.dim() != b2.dim() {
        return Err(Error::DimensionMismatch {
            expected: b1.dim(),
            found: b2.dim(),
        });
    }
    let g = b1.matrix().adjoint().matmul(b2.matrix());
    Ok(OverlapMatrix::from_unitary_entries(&g))
}

/// Largest entry of the overlap matrix.
pub fn coeff_a(c: &OverlapMatrix) -> f64 {
    c.argmax().2
}

/// Sum of the `d` largest of all `d²` entries, sorted by value then index.
pub fn coeff_c(c: &OverlapMatrix) -> f64 {
    sum_of_largest(c.entries(), c.dim())
}

pub(crate) fn sum_of_largest(values: &[f64], count: usize) -> f64 {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx.iter().take(count).map(|&k| values[k]).sum()
}

/// `Σ_ij c_ij²`.
pub fn sum_sq(c: &OverlapMatrix) -> f64 {
    c.entries().iter().map(|x| x * x).sum()
}

/// `U = Σ_k |a2_k⟩⟨a1_k|`, the unitary with `U†|a2_k⟩ = |a1_k⟩`.
pub fn alignment_unitary(a1: &OrthonormalBasis, a2: &OrthonormalBasis) -> Result<UnitaryOperator> {
    if a1.dim() != a2.dim() {
        return Err(Error::DimensionMismatch {
            expected: a1.dim(),
            found: a2.dim(),
        });
    }
    UnitaryOperator::new(a2.matrix().matmul(&a1.matrix().adjoint()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoefficientMethod {
    Exact,
    Optimized,
}

/// Effort spent maximizing over `V`: `restarts` independent GA runs of
/// `generations` generations with `population` organisms each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizerBudget {
    pub restarts: usize,
    pub generations: usize,
    pub population: usize,
    pub seed: u64,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        Self {
            restarts: 8,
            generations: 20,
            population: 25,
            seed: 0,
        }
    }
}

impl OptimizerBudget {
    /// Same restarts and seeds, `factor` times the generations.
    pub fn scaled(self, factor: usize) -> Self {
        Self {
            generations: self.generations * factor,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.generations == 0 || self.population < 2 {
            return Err(Error::ZeroBudget);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CoefficientWitness {
    /// `(i, j)` of the entry attaining a max-type coefficient.
    pub indices: Option<(usize, usize)>,
    pub unitary: Option<UnitaryOperator>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientResult {
    #[serde(with = "crate::serde_f64")]
    pub value: f64,
    pub witness: CoefficientWitness,
    pub method: CoefficientMethod,
    pub budget: Option<OptimizerBudget>,
    pub evaluations: usize,
    /// Set when the coefficient is singular and `value` is `+∞`.
    pub degenerate: bool,
}

impl CoefficientResult {
    fn exact(value: f64, witness: CoefficientWitness) -> Self {
        Self {
            value,
            witness,
            method: CoefficientMethod::Exact,
            budget: None,
            evaluations: 1,
            degenerate: false,
        }
    }
}

fn check_dims(bases: &[&OrthonormalBasis], u: &UnitaryOperator) -> Result<usize> {
    let d = u.dim();
    for b in bases {
        if b.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: b.dim(),
            });
        }
    }
    Ok(d)
}

/// Overlaps of `B1` against `V T V† B2` for a fixed `T = Uᵀ`, evaluated as
/// `(B1† Vs) W T W† (Vs† B2)` with `V = Vs W`.
struct ConjugatedOverlaps {
    left: ComplexMatrix,
    right: ComplexMatrix,
    t: ComplexMatrix,
    start: ComplexMatrix,
}

impl ConjugatedOverlaps {
    fn new(b1: &OrthonormalBasis, b2: &OrthonormalBasis, t: &ComplexMatrix, start: &UnitaryOperator) -> Self {
        let vs = start.matrix();
        Self {
            left: b1.matrix().adjoint().matmul(vs),
            right: vs.adjoint().matmul(b2.matrix()),
            t: t.clone(),
            start: vs.clone(),
        }
    }

    fn at(&self, w: &ComplexMatrix) -> OverlapMatrix {
        let x = self.left.matmul(w).matmul(&self.t);
        let y = w.adjoint().matmul(&self.right);
        OverlapMatrix::from_unitary_entries(&x.matmul(&y))
    }

    fn unitary_for(&self, genome: &Genome) -> UnitaryOperator {
        let w = unitary_from_unit_vector(genome.genes()).expect("genome length d²");
        UnitaryOperator::new(self.start.matmul(w.matrix())).expect("product of unitaries")
    }
}

/// `c̃′ = max_ij |⟨b1_i| V Uᵀ V† |b2_j⟩|²`.
pub fn coeff_c_tilde_prime(
    b1: &OrthonormalBasis,
    b2: &OrthonormalBasis,
    u: &UnitaryOperator,
    v: &UnitaryOperator,
) -> Result<CoefficientResult> {
    let d = check_dims(&[b1, b2], u)?;
    if v.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: v.dim(),
        });
    }
    let conj = ConjugatedOverlaps::new(b1, b2, u.transpose().matrix(), v);
    let (i, j, value) = conj.at(&ComplexMatrix::identity(d)).argmax();
    Ok(CoefficientResult::exact(
        value,
        CoefficientWitness {
            indices: Some((i, j)),
            unitary: Some(v.clone()),
        },
    ))
}

#[derive(Clone, Copy)]
enum Objective {
    MaxEntry,
    SumOfLargest,
}

impl Objective {
    fn eval(self, c: &OverlapMatrix) -> f64 {
        match self {
            Objective::MaxEntry => coeff_a(c),
            Objective::SumOfLargest => coeff_c(c),
        }
    }

    fn cap(self, d: usize) -> f64 {
        match self {
            Objective::MaxEntry => 1.0,
            Objective::SumOfLargest => d as f64,
        }
    }
}

/// Start points for the maximization over `V`: identity, `U`, the
/// eigenvectors of `Uᵀ`, then seeded Haar-random unitaries.
fn default_starts(u: &UnitaryOperator, budget: &OptimizerBudget) -> Vec<UnitaryOperator> {
    let d = u.dim();
    let eig = u.transpose().matrix().normal_eigenvectors();
    let mut starts = vec![UnitaryOperator::identity(d), u.clone()];
    if let Ok(e) = UnitaryOperator::new(eig) {
        starts.push(e);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ 0x005e_ed0f_57a7);
    while starts.len() < budget.restarts {
        starts.push(random_unitary(d, &mut rng));
    }
    starts.truncate(budget.restarts);
    starts
}

fn optimize_conjugation(
    b1: &OrthonormalBasis,
    b2: &OrthonormalBasis,
    u: &UnitaryOperator,
    budget: &OptimizerBudget,
    extra_starts: &[UnitaryOperator],
    objective: Objective,
) -> Result<CoefficientResult> {
    budget.validate()?;
    let d = check_dims(&[b1, b2], u)?;
    if let Some(bad) = extra_starts.iter().find(|v| v.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.dim(),
        });
    }
    let t = u.transpose();
    let cap = objective.cap(d);

    let mut starts = default_starts(u, budget);
    starts.extend(extra_starts.iter().cloned());

    // a scalar Uᵀ commutes with every V, so the objective is constant
    let phase = t.matrix()[(0, 0)];
    if t.matrix().max_abs_diff(&ComplexMatrix::identity(d).scale(phase)) < 1e-14 {
        let v = UnitaryOperator::identity(d);
        let c = ConjugatedOverlaps::new(b1, b2, t.matrix(), &v).at(&ComplexMatrix::identity(d));
        let (i, j, _) = c.argmax();
        return Ok(CoefficientResult {
            value: objective.eval(&c),
            witness: CoefficientWitness {
                indices: Some((i, j)),
                unitary: Some(v),
            },
            method: CoefficientMethod::Optimized,
            budget: Some(*budget),
            evaluations: 1,
            degenerate: false,
        });
    }

    let mut best: Option<(f64, UnitaryOperator, OverlapMatrix)> = None;
    let mut evaluations = 0;
    'restarts: for (r, start) in starts.iter().enumerate() {
        let conj = ConjugatedOverlaps::new(b1, b2, t.matrix(), start);
        let fitness = |g: &Genome| {
            let w = unitary_from_unit_vector(g.genes()).expect("genome length d²");
            objective.eval(&conj.at(w.matrix()))
        };
        let config = GaConfig {
            population_size: budget.population,
            elite_count: 3.min(budget.population - 1),
            generations: budget.generations,
            seed: budget.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(r as u64),
            ..GaConfig::default()
        };
        let mut state = SearchState::new(config, d * d, vec![Genome::zeros(d * d)], &fitness)?;
        for _ in 0..budget.generations {
            if state.best_ever().1 >= cap - tol::IDEMPOTENT {
                break;
            }
            state.step(&fitness);
        }
        evaluations += state.evaluations();
        let (genome, value) = state.best_ever();
        if best.as_ref().is_none_or(|b| value > b.0) {
            let v = conj.unitary_for(genome);
            let w = unitary_from_unit_vector(genome.genes())?;
            best = Some((value, v, conj.at(w.matrix())));
        }
        if value >= cap - tol::IDEMPOTENT {
            break 'restarts;
        }
    }
    let (mut value, mut v, mut c) = best.expect("at least one restart");
    if value < cap - tol::IDEMPOTENT {
        let polished = polish(b1, b2, t.matrix(), &v, value, cap, objective);
        evaluations += polished.evaluations;
        if polished.value > value {
            (value, v, c) = (polished.value, polished.unitary, polished.overlaps);
        }
    }
    let (i, j, _) = c.argmax();
    Ok(CoefficientResult {
        value,
        witness: CoefficientWitness {
            indices: Some((i, j)),
            unitary: Some(v),
        },
        method: CoefficientMethod::Optimized,
        budget: Some(*budget),
        evaluations,
        degenerate: false,
    })
}

/// Right-multiplies `m` in place by a rotation of `angle` along one of the
/// `d²` generator directions of U(d): real and imaginary Givens rotations on
/// each pair of levels, then single-level phases.
fn rotate(m: &mut ComplexMatrix, direction: usize, angle: f64) {
    let d = m.cols();
    let pairs = d * (d - 1) / 2;
    let (c, s) = (angle.cos(), angle.sin());
    if direction >= 2 * pairs {
        let k = direction - 2 * pairs;
        let phase = C64::new(c, s);
        for r in 0..m.rows() {
            m[(r, k)] *= phase;
        }
        return;
    }
    let mut k = direction % pairs;
    let mut p = 0;
    while k >= d - 1 - p {
        k -= d - 1 - p;
        p += 1;
    }
    let q = p + 1 + k;
    // columns p, q times [[c, -s], [s, c]] or [[c, is], [is, c]]
    let (to_p, to_q) = if direction < pairs {
        (C64::new(s, 0.0), C64::new(-s, 0.0))
    } else {
        (C64::new(0.0, s), C64::new(0.0, s))
    };
    for r in 0..m.rows() {
        let (a, b) = (m[(r, p)], m[(r, q)]);
        m[(r, p)] = a * c + b * to_p;
        m[(r, q)] = a * to_q + b * c;
    }
}

/// `base` followed by one rotation per generator; a smooth chart around `base`.
fn chart(base: &ComplexMatrix, theta: &[f64]) -> ComplexMatrix {
    let mut m = base.clone();
    for (k, &a) in theta.iter().enumerate() {
        if a != 0.0 {
            rotate(&mut m, k, a);
        }
    }
    m
}

struct Polished {
    value: f64,
    unitary: UnitaryOperator,
    overlaps: OverlapMatrix,
    evaluations: usize,
}

/// Local refinement of the best unitary found by the restarts. The inner GA
/// stalls a few parts in 10⁵ below the optimum, and an outer search over
/// states will happily sit in that gap. BFGS on central-difference gradients
/// does the bulk of the climb; a compass search with step halving then
/// handles kinks where two overlap entries tie.
fn polish(
    b1: &OrthonormalBasis,
    b2: &OrthonormalBasis,
    t: &ComplexMatrix,
    start: &UnitaryOperator,
    value: f64,
    cap: f64,
    objective: Objective,
) -> Polished {
    let d = start.dim();
    let conj = ConjugatedOverlaps::new(b1, b2, t, start);
    let mut evaluations = 0;
    let mut f = |w: &ComplexMatrix| {
        evaluations += 1;
        objective.eval(&conj.at(w))
    };
    let at_cap = |v: f64| v >= cap - tol::IDEMPOTENT;
    let (w, value) = bfgs_ascent(&mut f, ComplexMatrix::identity(d), value, &at_cap);
    let (w, value) = compass_ascent(&mut f, w, value, &at_cap);
    Polished {
        value,
        unitary: UnitaryOperator::new(start.matrix().matmul(&w)).expect("product of unitaries"),
        overlaps: conj.at(&w),
        evaluations,
    }
}

fn bfgs_ascent(
    f: &mut impl FnMut(&ComplexMatrix) -> f64,
    base: ComplexMatrix,
    mut value: f64,
    at_cap: &impl Fn(f64) -> bool,
) -> (ComplexMatrix, f64) {
    const ITERATIONS: usize = 60;
    const H: f64 = 1e-5;
    let n = base.cols() * base.cols();
    let gradient = |f: &mut dyn FnMut(&ComplexMatrix) -> f64, x: &DVector<f64>| {
        DVector::from_fn(n, |k, _| {
            let mut e = x.clone();
            e[k] += H;
            let up = f(&chart(&base, e.as_slice()));
            e[k] -= 2.0 * H;
            (up - f(&chart(&base, e.as_slice()))) / (2.0 * H)
        })
    };
    let mut x = DVector::zeros(n);
    let mut g = gradient(f, &x);
    let mut inv_hessian: Option<DMatrix<f64>> = None;
    for _ in 0..ITERATIONS {
        if at_cap(value) || g.amax() < 1e-12 {
            break;
        }
        let mut dir = inv_hessian.as_ref().map_or_else(|| g.clone(), |h| h * &g);
        if dir.dot(&g) <= 0.0 {
            inv_hessian = None;
            dir = g.clone();
        }
        let slope = dir.dot(&g);
        let mut step = 1.0;
        let accepted = loop {
            let cand = &x + &dir * step;
            let v = f(&chart(&base, cand.as_slice()));
            if v >= value + 1e-4 * step * slope && v > value {
                break Some((cand, v));
            }
            step /= 2.0;
            if step < 1e-12 {
                break None;
            }
        };
        let Some((next, v)) = accepted else { break };
        let next_g = gradient(f, &next);
        // ascent: the minimized function is -f, so y = g - next_g
        let s = &next - &x;
        let y = &g - &next_g;
        let sy = s.dot(&y);
        if sy > 1e-20 {
            let h = inv_hessian.get_or_insert_with(|| DMatrix::identity(n, n) * (sy / y.dot(&y)));
            let hy = &*h * &y;
            let yhy = y.dot(&hy);
            *h += (&s * s.transpose()) * ((sy + yhy) / (sy * sy)) - (&hy * s.transpose() + &s * hy.transpose()) / sy;
        }
        (x, g, value) = (next, next_g, v);
    }
    (chart(&base, x.as_slice()), value)
}

fn compass_ascent(
    f: &mut impl FnMut(&ComplexMatrix) -> f64,
    mut w: ComplexMatrix,
    mut value: f64,
    at_cap: &impl Fn(f64) -> bool,
) -> (ComplexMatrix, f64) {
    const FIRST_STEP: f64 = 1e-2;
    const LAST_STEP: f64 = 1e-9;
    let n = w.cols() * w.cols();
    let mut budget = 100 * n;
    let mut step = FIRST_STEP;
    while step >= LAST_STEP && budget > 0 && !at_cap(value) {
        let mut improved = false;
        for direction in 0..n {
            for sign in [1.0, -1.0] {
                let mut cand = w.clone();
                rotate(&mut cand, direction, sign * step);
                let v = f(&cand);
                budget = budget.saturating_sub(1);
                if v > value {
                    (value, w, improved) = (v, cand, true);
                    break;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    (w, value)
}

/// `c′ = max_V max_ij |⟨b1_i| V Uᵀ V† |b2_j⟩|²`, approximated from below.
pub fn coeff_c_prime(
    b1: &OrthonormalBasis,
    b2: &OrthonormalBasis,
    u: &UnitaryOperator,
    budget: &OptimizerBudget,
) -> Result<CoefficientResult> {
    optimize_conjugation(b1, b2, u, budget, &[], Objective::MaxEntry)
}

/// [`coeff_c_prime`] with additional start points for `V`.
pub fn coeff_c_prime_with_starts(
    b1: &OrthonormalBasis,
    b2: &OrthonormalBasis,
    u: &UnitaryOperator,
    budget: &OptimizerBudget,
    starts: &[UnitaryOperator],
) -> Result<CoefficientResult> {
    optimize_conjugation(b1, b2, u, budget, starts, Objective::MaxEntry)
}

/// `c‴ = max_V` of the sum of the `d` largest conjugated overlaps,
/// approximated from below.
pub fn coeff_c_tripleprime(
    b1: &OrthonormalBasis,
    b2: &OrthonormalBasis,
    u: &UnitaryOperator,
    budget: &OptimizerBudget,
) -> Result<CoefficientResult> {
    optimize_conjugation(b1, b2, u, budget, &[], Objective::SumOfLargest)
}

pub fn coeff_c_tripleprime_with_starts(
    b1: &OrthonormalBasis,
    b2: &OrthonormalBasis,
    u: &UnitaryOperator,
    budget: &OptimizerBudget,
    starts: &[UnitaryOperator],
) -> Result<CoefficientResult> {
    optimize_conjugation(b1, b2, u, budget, starts, Objective::SumOfLargest)
}

/// `c″ = Σ_ijkl |⟨a1_i|a2_j⟩|^p / |⟨b1_k|b2_l⟩|^p`, computed as the product of
/// the two separate sums. Any vanishing Bob overlap makes it singular.
pub fn coeff_c_doubleprime(
    a1: &OrthonormalBasis,
    a2: &OrthonormalBasis,
    b1: &OrthonormalBasis,
    b2: &OrthonormalBasis,
    p: f64,
) -> Result<CoefficientResult> {
    let d = a1.dim();
    for b in [a2, b1, b2] {
        if b.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: b.dim(),
            });
        }
    }
    if !p.is_finite() {
        return Err(Error::InvalidConfig(format!("exponent p = {p} is not finite")));
    }
    let alice = a1.matrix().adjoint().matmul(a2.matrix());
    let bob = b1.matrix().adjoint().matmul(b2.matrix());
    let numerator: f64 = alice.as_slice().iter().map(|z| z.norm().powf(p)).sum();
    if bob.as_slice().iter().any(|z| z.norm() < tol::SINGULAR_OVERLAP) {
        return Ok(CoefficientResult {
            value: f64::INFINITY,
            degenerate: true,
            ..CoefficientResult::exact(f64::INFINITY, CoefficientWitness::default())
        });
    }
    let denominator: f64 = bob.as_slice().iter().map(|z| z.norm().powf(-p)).sum();
    Ok(CoefficientResult::exact(
        numerator * denominator,
        CoefficientWitness::default(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn section_iv_bob_bases() -> (OrthonormalBasis, OrthonormalBasis) {
        let s = 1.0 / 2f64.sqrt();
        let r = |x: f64| C64::new(x, 0.0);
        let b2 = OrthonormalBasis::from_vectors(&[
            vec![r(s), r(s), r(0.0)],
            vec![r(0.5), r(-0.5), r(s)],
            vec![r(-0.5), r(0.5), r(s)],
        ])
        .unwrap();
        (OrthonormalBasis::computational(3), b2)
    }

    #[test]
    fn overlap_of_identical_bases_is_identity() {
        let f = OrthonormalBasis::fourier(4);
        let c = overlap_matrix(&f, &f).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((c.get(i, j) - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!((coeff_a(&c) - 1.0).abs() < 1e-14);
        assert!((coeff_c(&c) - 4.0).abs() < 1e-14);
        assert!((sum_sq(&c) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn qubit_mub() {
        let c = overlap_matrix(&OrthonormalBasis::computational(2), &OrthonormalBasis::fourier(2)).unwrap();
        assert!(c.entries().iter().all(|x| (x - 0.5).abs() < 1e-15));
        assert!((coeff_a(&c) - 0.5).abs() < 1e-15);
        assert!((sum_sq(&c) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn worked_example_matrix() {
        let (b1, b2) = section_iv_bob_bases();
        let c = overlap_matrix(&b1, &b2).unwrap();
        let want = [0.5, 0.25, 0.25, 0.5, 0.25, 0.25, 0.0, 0.5, 0.5];
        for (x, y) in c.entries().iter().zip(want) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((coeff_a(&c) - 0.5).abs() < 1e-12);
        assert!((coeff_c(&c) - 1.5).abs() < 1e-12);
        assert!((sum_sq(&c) - 1.25).abs() < 1e-12);
    }

    #[test]
    fn overlap_validation() {
        assert!(OverlapMatrix::new(2, vec![0.5, 0.5, 0.5, 0.5]).is_ok());
        assert!(OverlapMatrix::new(2, vec![1.0, 0.5, 0.0, 0.5]).is_err());
        assert!(overlap_matrix(&OrthonormalBasis::computational(2), &OrthonormalBasis::computational(3)).is_err());
    }

    #[test]
    fn alignment_to_fourier_is_fourier_matrix() {
        let (a1, a2) = (OrthonormalBasis::computational(2), OrthonormalBasis::fourier(2));
        let u = alignment_unitary(&a1, &a2).unwrap();
        assert!(u.matrix().max_abs_diff(a2.matrix()) < 1e-15);
        for k in 0..2 {
            let back = u.dagger().apply(&a2.vector(k));
            assert!(back.inner(&a1.vector(k)).norm() > 1.0 - 1e-12);
        }
        let same = alignment_unitary(&a2, &a2).unwrap();
        assert!(same.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn c_tilde_prime_trivial_cases() {
        let (b1, b2) = section_iv_bob_bases();
        let id = UnitaryOperator::identity(3);
        let r = coeff_c_tilde_prime(&b1, &b2, &id, &id).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        assert_eq!(r.method, CoefficientMethod::Exact);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = random_unitary(3, &mut rng);
        let c = OrthonormalBasis::computational(3);
        assert!((coeff_c_tilde_prime(&c, &c, &id, &v).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn c_prime_with_identity_alignment_is_a() {
        let (b1, b2) = section_iv_bob_bases();
        let r = coeff_c_prime(&b1, &b2, &UnitaryOperator::identity(3), &OptimizerBudget::default()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        let r3 = coeff_c_tripleprime(&b1, &b2, &UnitaryOperator::identity(3), &OptimizerBudget::default()).unwrap();
        assert!((r3.value - 1.5).abs() < 1e-12);
    }

    #[test]
    fn zero_budget_rejected() {
        let c = OrthonormalBasis::computational(2);
        let zero = OptimizerBudget {
            restarts: 0,
            ..OptimizerBudget::default()
        };
        let u = UnitaryOperator::identity(2);
        assert_eq!(coeff_c_prime(&c, &c, &u, &zero).unwrap_err(), Error::ZeroBudget);
        assert_eq!(coeff_c_tripleprime(&c, &c, &u, &zero).unwrap_err(), Error::ZeroBudget);
    }

    #[test]
    fn c_doubleprime_mub_everywhere() {
        let (z, x) = (OrthonormalBasis::computational(2), OrthonormalBasis::fourier(2));
        let r = coeff_c_doubleprime(&z, &x, &z, &x, 0.5).unwrap();
        assert!((r.value - 16.0).abs() < 1e-12);
        let deg = coeff_c_doubleprime(&z, &x, &z, &z, 0.5).unwrap();
        assert!(deg.degenerate && deg.value.is_infinite());
    }
}
