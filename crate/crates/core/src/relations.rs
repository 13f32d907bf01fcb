//! Evaluators for the entropic and mutual-information relations.
//!
//! Each evaluator returns a [`RelationReport`] holding both sides, the slack
//! and whether the relation is violated beyond its tolerance. For upper
//! bounds (`lhs ≤ rhs`) the slack is `rhs - lhs`; for the lower-bound
//! entropic relations it is `lhs - bound`. Negative slack means violation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coefficients::{
    alignment_unitary, coeff_a, coeff_c, coeff_c_doubleprime, coeff_c_prime_with_starts, coeff_c_tilde_prime,
    coeff_c_tripleprime_with_starts, overlap_matrix, sum_sq, CoefficientResult, OptimizerBudget, OverlapMatrix,
};
use crate::error::{Error, Result};
use crate::infomeasures::{
    accessible_information, joint_distribution, joint_distribution_pure, mutual_information, outcome_distribution,
    renyi_bits, shannon_entropy, Ensemble, JointDistribution, RenyiOrder,
};
use crate::qcore::{
    maximally_entangled, partial_trace_matrix, ComplexMatrix, DensityOperator, OrthonormalBasis, Party, PureState,
    UnitaryOperator, C64,
};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationId {
    /// `S(B1) + S(B2) ≥ -log a`.
    #[serde(rename = "maassen-uffink")]
    MaassenUffink,
    /// `S(B1) + S(B2) ≥` min Rényi entropy of a row or column of the overlaps.
    #[serde(rename = "renyi-mu")]
    RenyiMu,
    /// `I(B1|E) + I(B2|E) ≤ 2 log d + log a`.
    #[serde(rename = "hall")]
    Hall,
    /// `I(A:B1) + I(A:B2) ≤ log d + log c`.
    #[serde(rename = "one-vs-two")]
    OneVsTwo,
    /// `I(A:B1) + I(A:B2) ≤ log d + log Σ c_ij²`, valid only for
    /// states diagonal in a product of Alice's and Bob's first basis.
    #[serde(rename = "sum-sq-bound")]
    SumSqBound,
    /// `I(A:B1) + I(A:B2) ≤ 2 log d + log a`.
    #[serde(rename = "hall-special")]
    HallSpecial,
    /// `I(A1:B1) + I(A2:B2) ≤ 2 log d + log c′`.
    #[serde(rename = "two-vs-two")]
    TwoVsTwo,
    /// `I(A1:B1) + I(A2:B2) ≤ 2 log d + log c̃′` on `(I⊗V)|Φ⁺⟩`.
    #[serde(rename = "state-dependent")]
    StateDependent,
    /// `I(A1:B1) + I(A2:B2) ≤ log c″ - 2 log d`.
    #[serde(rename = "exotic")]
    Exotic,
    /// `I(A1:B1) + I(A2:B2) ≤ 2 log d + log c‴`.
    #[serde(rename = "c3-conjecture")]
    C3Conjecture,
}

impl RelationId {
    pub const ALL: [RelationId; 10] = [
        RelationId::MaassenUffink,
        RelationId::RenyiMu,
        RelationId::Hall,
        RelationId::OneVsTwo,
        RelationId::SumSqBound,
        RelationId::HallSpecial,
        RelationId::TwoVsTwo,
        RelationId::StateDependent,
        RelationId::Exotic,
        RelationId::C3Conjecture,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationId::MaassenUffink => "maassen-uffink",
            RelationId::RenyiMu => "renyi-mu",
            RelationId::Hall => "hall",
            RelationId::OneVsTwo => "one-vs-two",
            RelationId::SumSqBound => "sum-sq-bound",
            RelationId::HallSpecial => "hall-special",
            RelationId::TwoVsTwo => "two-vs-two",
            RelationId::StateDependent => "state-dependent",
            RelationId::Exotic => "exotic",
            RelationId::C3Conjecture => "c3-conjecture",
        }
    }

    /// Whether the bound involves a numerically maximized coefficient.
    pub fn is_optimized(self) -> bool {
        matches!(self, RelationId::TwoVsTwo | RelationId::C3Conjecture)
    }

    pub fn tolerance(self) -> f64 {
        if self.is_optimized() {
            tol::VIOLATION_OPTIMIZED
        } else {
            tol::VIOLATION_EXACT
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            RelationId::MaassenUffink | RelationId::RenyiMu => Direction::Lower,
            _ => Direction::Upper,
        }
    }

    pub fn standing(self) -> Standing {
        match self {
            RelationId::MaassenUffink | RelationId::Hall | RelationId::HallSpecial | RelationId::StateDependent => {
                Standing::Theorem
            }
            RelationId::RenyiMu
            | RelationId::OneVsTwo
            | RelationId::SumSqBound
            | RelationId::TwoVsTwo
            | RelationId::Exotic => Standing::Conjecture,
            RelationId::C3Conjecture => Standing::Open,
        }
    }

    /// Whether the relation needs two Alice bases.
    pub fn needs_two_alice_bases(self) -> bool {
        matches!(
            self,
            RelationId::TwoVsTwo | RelationId::StateDependent | RelationId::Exotic | RelationId::C3Conjecture
        )
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelationId::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::InvalidTarget(format!("unknown relation `{s}`")))
    }
}

/// `Upper`: `lhs ≤ rhs`. `Lower`: `lhs ≥ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

/// How far the relation is established: proved, conjectured, or open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Standing {
    Theorem,
    Conjecture,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportMethod {
    Exact,
    Optimized,
    /// Optimized, and re-run at ten times the budget after a first violation.
    Reverified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    #[serde(with = "crate::serde_f64")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCoefficient {
    pub name: String,
    pub result: CoefficientResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub relation: RelationId,
    pub label: String,
    pub dim: usize,
    /// Rényi order or exponent `p`, where the relation has one.
    #[serde(with = "crate::serde_f64::option", default)]
    pub param: Option<f64>,
    #[serde(with = "crate::serde_f64")]
    pub lhs: f64,
    #[serde(with = "crate::serde_f64")]
    pub rhs: f64,
    #[serde(with = "crate::serde_f64")]
    pub slack: f64,
    pub violated: bool,
    pub tolerance: f64,
    pub direction: Direction,
    pub method: ReportMethod,
    pub degenerate: bool,
    pub standing: Standing,
    pub terms: Vec<Term>,
    pub coefficients: Vec<NamedCoefficient>,
}

struct Draft {
    relation: RelationId,
    dim: usize,
    param: Option<f64>,
    lhs: f64,
    rhs: f64,
    method: ReportMethod,
    degenerate: bool,
    terms: Vec<Term>,
    coefficients: Vec<NamedCoefficient>,
}

impl Draft {
    fn new(relation: RelationId, dim: usize, lhs: f64, rhs: f64) -> Self {
        Self {
            relation,
            dim,
            param: None,
            lhs,
            rhs,
            method: ReportMethod::Exact,
            degenerate: false,
            terms: Vec::new(),
            coefficients: Vec::new(),
        }
    }

    fn term(mut self, name: &str, value: f64) -> Self {
        self.terms.push(Term {
            name: name.to_string(),
            value,
        });
        self
    }

    fn coefficient(mut self, name: &str, result: CoefficientResult) -> Self {
        self.coefficients.push(NamedCoefficient {
            name: name.to_string(),
            result,
        });
        self
    }

    fn finish(self) -> RelationReport {
        let direction = self.relation.direction();
        let slack = match direction {
            Direction::Upper => self.rhs - self.lhs,
            Direction::Lower => self.lhs - self.rhs,
        };
        let tolerance = self.relation.tolerance();
        RelationReport {
            relation: self.relation,
            label: String::new(),
            dim: self.dim,
            param: self.param,
            lhs: self.lhs,
            rhs: self.rhs,
            slack,
            violated: !self.degenerate && slack < -tolerance,
            tolerance,
            direction,
            method: self.method,
            degenerate: self.degenerate,
            standing: self.relation.standing(),
            terms: self.terms,
            coefficients: self.coefficients,
        }
    }
}

fn exact_coefficient(value: f64) -> CoefficientResult {
    CoefficientResult {
        value,
        witness: Default::default(),
        method: crate::coefficients::CoefficientMethod::Exact,
        budget: None,
        evaluations: 1,
        degenerate: false,
    }
}

/// Shared bipartite state, kept pure when possible for faster evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum SharedState {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl SharedState {
    pub fn dim(&self) -> usize {
        match self {
            SharedState::Pure(p) => p.dim(),
            SharedState::Mixed(m) => m.dim(),
        }
    }

    pub fn density(&self) -> DensityOperator {
        match self {
            SharedState::Pure(p) => p.density(),
            SharedState::Mixed(m) => m.clone(),
        }
    }

    /// Amplitudes of the state if it is pure, or rank one within `1e-8`.
    pub fn as_pure(&self) -> Option<PureState> {
        match self {
            SharedState::Pure(p) => Some(p.clone()),
            SharedState::Mixed(m) => {
                let (vals, vecs) = m.matrix().eigh().ok()?;
                let top = *vals.last()?;
                (top > 1.0 - tol::STRUCTURAL).then(|| PureState::normalized(vecs.column(vals.len() - 1)).ok())?
            }
        }
    }
}

/// Alice measures one or two bases on her half of a shared state, Bob one
/// or two on his.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScenario {
    dim: usize,
    state: SharedState,
    alice_bases: Vec<OrthonormalBasis>,
    bob_bases: Vec<OrthonormalBasis>,
    entangler: Option<UnitaryOperator>,
    label: String,
}

impl MeasurementScenario {
    pub fn new(
        state: SharedState,
        alice_bases: Vec<OrthonormalBasis>,
        bob_bases: Vec<OrthonormalBasis>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let dim = alice_bases
            .first()
            .map(OrthonormalBasis::dim)
            .ok_or(Error::IncompatibleScenario(
                "at least one basis for Alice is required".into(),
            ))?;
        for (name, bases) in [("alice", &alice_bases), ("bob", &bob_bases)] {
            if bases.is_empty() || bases.len() > 2 {
                return Err(Error::IncompatibleScenario(format!(
                    "{name} needs one or two bases, got {}",
                    bases.len()
                )));
            }
            if let Some(b) = bases.iter().find(|b| b.dim() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: b.dim(),
                });
            }
        }
        if state.dim() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: state.dim(),
            });
        }
        Ok(Self {
            dim,
            state,
            alice_bases,
            bob_bases,
            entangler: None,
            label: label.into(),
        })
    }

    /// Declares the state to be `(I⊗V)|Φ⁺⟩`; checked when evaluated.
    pub fn with_entangler(mut self, v: UnitaryOperator) -> Result<Self> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        self.entangler = Some(v);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self) -> &SharedState {
        &self.state
    }

    pub fn alice_bases(&self) -> &[OrthonormalBasis] {
        &self.alice_bases
    }

    pub fn bob_bases(&self) -> &[OrthonormalBasis] {
        &self.bob_bases
    }

    pub fn entangler(&self) -> Option<&UnitaryOperator> {
        self.entangler.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn joint(&self, alice: usize, bob: usize) -> Result<JointDistribution> {
        let (a, b) = (self.alice_basis(alice)?, self.bob_basis(bob)?);
        match &self.state {
            SharedState::Pure(p) => joint_distribution_pure(p, a, b),
            SharedState::Mixed(m) => joint_distribution(m, a, b),
        }
    }

    pub fn mutual_information(&self, alice: usize, bob: usize) -> Result<f64> {
        Ok(mutual_information(&self.joint(alice, bob)?))
    }

    pub fn bob_marginal(&self) -> DensityOperator {
        DensityOperator::from_trusted(partial_trace_matrix(
            self.state.density().matrix(),
            self.dim,
            self.dim,
            Party::Alice,
        ))
    }

    pub fn alice_marginal(&self) -> DensityOperator {
        DensityOperator::from_trusted(partial_trace_matrix(
            self.state.density().matrix(),
            self.dim,
            self.dim,
            Party::Bob,
        ))
    }

    fn alice_basis(&self, k: usize) -> Result<&OrthonormalBasis> {
        self.alice_bases
            .get(k)
            .ok_or_else(|| Error::IncompatibleScenario(format!("no Alice basis #{}", k + 1)))
    }

    fn bob_basis(&self, k: usize) -> Result<&OrthonormalBasis> {
        self.bob_bases
            .get(k)
            .ok_or_else(|| Error::IncompatibleScenario(format!("no Bob basis #{}", k + 1)))
    }

    fn bob_pair(&self) -> Result<(&OrthonormalBasis, &OrthonormalBasis)> {
        Ok((self.bob_basis(0)?, self.bob_basis(1)?))
    }

    fn alice_pair(&self) -> Result<(&OrthonormalBasis, &OrthonormalBasis)> {
        Ok((self.alice_basis(0)?, self.alice_basis(1)?))
    }

    /// `V` with the state equal to `(I⊗V)|Φ⁺⟩`, if it is maximally entangled.
    pub fn implied_entangler(&self) -> Option<UnitaryOperator> {
        let psi = self.state.as_pure()?;
        let m = psi.amplitude_matrix(self.dim, self.dim).ok()?;
        let d = self.dim as f64;
        let gram = m.matmul(&m.adjoint());
        let target = ComplexMatrix::identity(self.dim).scale(C64::new(1.0 / d, 0.0));
        if gram.max_abs_diff(&target) > tol::STRUCTURAL {
            return None;
        }
        UnitaryOperator::new(m.transpose().scale(C64::new(d.sqrt(), 0.0))).ok()
    }
}

/// A single system measured in two bases.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalScenario {
    pub state: DensityOperator,
    pub bases: [OrthonormalBasis; 2],
    pub label: String,
}

impl LocalScenario {
    pub fn new(
        state: DensityOperator,
        b1: OrthonormalBasis,
        b2: OrthonormalBasis,
        label: impl Into<String>,
    ) -> Result<Self> {
        for b in [&b1, &b2] {
            if b.dim() != state.dim() {
                return Err(Error::DimensionMismatch {
                    expected: state.dim(),
                    found: b.dim(),
                });
            }
        }
        Ok(Self {
            state,
            bases: [b1, b2],
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }
}

/// Bob holds a state drawn from an ensemble and measures one of two bases.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleScenario {
    pub ensemble: Ensemble,
    pub bob_bases: [OrthonormalBasis; 2],
    pub label: String,
}

impl EnsembleScenario {
    pub fn new(
        ensemble: Ensemble,
        b1: OrthonormalBasis,
        b2: OrthonormalBasis,
        label: impl Into<String>,
    ) -> Result<Self> {
        for b in [&b1, &b2] {
            if b.dim() != ensemble.dim() {
                return Err(Error::DimensionMismatch {
                    expected: ensemble.dim(),
                    found: b.dim(),
                });
            }
        }
        Ok(Self {
            ensemble,
            bob_bases: [b1, b2],
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.ensemble.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scenario {
    Local(LocalScenario),
    Bipartite(MeasurementScenario),
    Ensemble(EnsembleScenario),
}

impl Scenario {
    pub fn dim(&self) -> usize {
        match self {
            Scenario::Local(s) => s.dim(),
            Scenario::Bipartite(s) => s.dim(),
            Scenario::Ensemble(s) => s.dim(),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Scenario::Local(s) => &s.label,
            Scenario::Bipartite(s) => s.label(),
            Scenario::Ensemble(s) => &s.label,
        }
    }
}

/// Parameters shared by all evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub alpha: RenyiOrder,
    pub p: f64,
    pub budget: OptimizerBudget,
    /// Re-run optimized coefficients at ten times the budget before
    /// reporting a violation.
    pub reverify: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            alpha: RenyiOrder::Finite(2.0),
            p: 0.5,
            budget: OptimizerBudget::default(),
            reverify: true,
        }
    }
}

/// Evaluates `relation` on any scenario that supplies what it needs.
/// Single-system relations on a bipartite scenario use Bob's reduced state;
/// the accessible-information relation uses the ensemble Alice's first
/// measurement steers Bob into.
pub fn evaluate(relation: RelationId, scenario: &Scenario, opts: &EvalOptions) -> Result<RelationReport> {
    let mut report = match (relation, scenario) {
        (RelationId::MaassenUffink | RelationId::RenyiMu, _) => {
            let (rho, b1, b2) = match scenario {
                Scenario::Local(s) => (s.state.clone(), &s.bases[0], &s.bases[1]),
                Scenario::Bipartite(s) => {
                    let (b1, b2) = s.bob_pair()?;
                    (s.bob_marginal(), b1, b2)
                }
                Scenario::Ensemble(s) => (s.ensemble.average(), &s.bob_bases[0], &s.bob_bases[1]),
            };
            if relation == RelationId::MaassenUffink {
                eval_maassen_uffink(&rho, b1, b2)?
            } else {
                eval_renyi_mu(&rho, b1, b2, opts.alpha)?
            }
        }
        (RelationId::Hall, Scenario::Ensemble(s)) => eval_hall(s)?,
        (RelationId::Hall, Scenario::Bipartite(s)) => {
            let (b1, b2) = s.bob_pair()?;
            let ensemble = Ensemble::steered(&s.state.density(), s.alice_basis(0)?)?;
            eval_hall(&EnsembleScenario::new(ensemble, b1.clone(), b2.clone(), s.label())?)?
        }
        (_, Scenario::Bipartite(s)) => match relation {
            RelationId::OneVsTwo => eval_one_vs_two(s)?,
            RelationId::SumSqBound => eval_lemma1_bound(s)?,
            RelationId::HallSpecial => eval_hall_special(s)?,
            RelationId::TwoVsTwo => eval_two_vs_two_with(s, &opts.budget, opts.reverify)?,
            RelationId::StateDependent => {
                let v = match s.entangler() {
                    Some(v) => v.clone(),
                    None => s
                        .implied_entangler()
                        .ok_or_else(|| Error::NotMaximallyEntangled("state is not of the form (I⊗V)|Φ⁺⟩".into()))?,
                };
                eval_state_dependent_two_vs_two(s, &v)?
            }
            RelationId::Exotic => eval_exotic(s, opts.p)?,
            RelationId::C3Conjecture => eval_conjectured_c3_with(s, &opts.budget, opts.reverify)?,
            _ => unreachable!("handled above"),
        },
        _ => {
            return Err(Error::IncompatibleScenario(format!(
                "relation `{relation}` needs a bipartite scenario"
            )))
        }
    };
    report.label = scenario.label().to_string();
    Ok(report)
}

fn check_local(rho: &DensityOperator, b1: &OrthonormalBasis, b2: &OrthonormalBasis) -> Result<()> {
    for b in [b1, b2] {
        if b.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: b.dim(),
            });
        }
    }
    Ok(())
}

fn entropy_sum(rho: &DensityOperator, b1: &OrthonormalBasis, b2: &OrthonormalBasis) -> Result<(f64, f64)> {
    Ok((
        shannon_entropy(&outcome_distribution(rho, b1)?),
        shannon_entropy(&outcome_distribution(rho, b2)?),
    ))
}

/// `S(B1) + S(B2) ≥ -log₂ a`.
pub fn eval_maassen_uffink(
    rho: &DensityOperator,
    b1: &OrthonormalBasis,
    b2: &OrthonormalBasis,
) -> Result<RelationReport> {
    check_local(rho, b1, b2)?;
    let (s1, s2) = entropy_sum(rho, b1, b2)?;
    let a = coeff_a(&overlap_matrix(b1, b2)?);
    Ok(Draft::new(RelationId::MaassenUffink, rho.dim(), s1 + s2, -a.log2())
        .term("S(B1)", s1)
        .term("S(B2)", s2)
        .coefficient("a", exact_coefficient(a))
        .finish())
}

/// Smallest `H_α` over the rows and columns of an overlap matrix.
pub fn renyi_overlap_bound(c: &OverlapMatrix, order: RenyiOrder) -> Result<f64> {
    let d = c.dim();
    let mut best = f64::INFINITY;
    for k in 0..d {
        best = best
            .min(renyi_bits(c.row(k), order)?)
            .min(renyi_bits(&c.column(k), order)?);
    }
    Ok(best)
}

/// `S(B1) + S(B2) ≥ min_{rows, columns} H_α(c)`.
pub fn eval_renyi_mu(
    rho: &DensityOperator,
    b1: &OrthonormalBasis,
    b2: &OrthonormalBasis,
    order: RenyiOrder,
) -> Result<RelationReport> {
    check_local(rho, b1, b2)?;
    let (s1, s2) = entropy_sum(rho, b1, b2)?;
    let bound = renyi_overlap_bound(&overlap_matrix(b1, b2)?, order)?;
    let mut draft = Draft::new(RelationId::RenyiMu, rho.dim(), s1 + s2, bound)
        .term("S(B1)", s1)
        .term("S(B2)", s2);
    draft.param = Some(order.value());
    Ok(draft.finish())
}

/// `I(B1|E) + I(B2|E) ≤ 2 log₂ d + log₂ a`.
pub fn eval_hall(e: &EnsembleScenario) -> Result<RelationReport> {
    let [b1, b2] = &e.bob_bases;
    let i1 = accessible_information(&e.ensemble, b1)?;
    let i2 = accessible_information(&e.ensemble, b2)?;
    let d = e.dim();
    let a = coeff_a(&overlap_matrix(b1, b2)?);
    let mut r = Draft::new(RelationId::Hall, d, i1 + i2, 2.0 * (d as f64).log2() + a.log2())
        .term("I(B1|E)", i1)
        .term("I(B2|E)", i2)
        .coefficient("a", exact_coefficient(a))
        .finish();
    r.label = e.label.clone();
    Ok(r)
}

fn one_alice_terms(s: &MeasurementScenario) -> Result<(f64, f64, OverlapMatrix)> {
    let (b1, b2) = s.bob_pair()?;
    Ok((
        s.mutual_information(0, 0)?,
        s.mutual_information(0, 1)?,
        overlap_matrix(b1, b2)?,
    ))
}

fn labeled(mut r: RelationReport, s: &MeasurementScenario) -> RelationReport {
    r.label = s.label().to_string();
    r
}

/// `I(A:B1) + I(A:B2) ≤ log₂ d + log₂ c`.
pub fn eval_one_vs_two(s: &MeasurementScenario) -> Result<RelationReport> {
    let (i1, i2, c) = one_alice_terms(s)?;
    let cc = coeff_c(&c);
    let d = s.dim() as f64;
    Ok(labeled(
        Draft::new(RelationId::OneVsTwo, s.dim(), i1 + i2, d.log2() + cc.log2())
            .term("I(A:B1)", i1)
            .term("I(A:B2)", i2)
            .coefficient("c", exact_coefficient(cc))
            .finish(),
        s,
    ))
}

/// `I(A:B1) + I(A:B2) ≤ log₂ d + log₂ Σ c_ij²`. Holds for states diagonal
/// in `{|a_k⟩⊗|b1_i⟩}`, not in general.
pub fn eval_lemma1_bound(s: &MeasurementScenario) -> Result<RelationReport> {
    let (i1, i2, c) = one_alice_terms(s)?;
    let sq = sum_sq(&c);
    let d = s.dim() as f64;
    Ok(labeled(
        Draft::new(RelationId::SumSqBound, s.dim(), i1 + i2, d.log2() + sq.log2())
            .term("I(A:B1)", i1)
            .term("I(A:B2)", i2)
            .coefficient("sum_sq", exact_coefficient(sq))
            .finish(),
        s,
    ))
}

/// `I(A:B1) + I(A:B2) ≤ 2 log₂ d + log₂ max c_ij`.
pub fn eval_hall_special(s: &MeasurementScenario) -> Result<RelationReport> {
    let (i1, i2, c) = one_alice_terms(s)?;
    let a = coeff_a(&c);
    let d = s.dim() as f64;
    Ok(labeled(
        Draft::new(RelationId::HallSpecial, s.dim(), i1 + i2, 2.0 * d.log2() + a.log2())
            .term("I(A:B1)", i1)
            .term("I(A:B2)", i2)
            .coefficient("a", exact_coefficient(a))
            .finish(),
        s,
    ))
}

fn paired_terms(s: &MeasurementScenario) -> Result<(f64, f64)> {
    s.alice_pair()?;
    s.bob_pair()?;
    Ok((s.mutual_information(0, 0)?, s.mutual_information(1, 1)?))
}

fn optimized_relation(
    s: &MeasurementScenario,
    relation: RelationId,
    budget: &OptimizerBudget,
    reverify: bool,
) -> Result<RelationReport> {
    let (i1, i2) = paired_terms(s)?;
    let (a1, a2) = s.alice_pair()?;
    let (b1, b2) = s.bob_pair()?;
    let u = alignment_unitary(a1, a2)?;
    let starts: Vec<UnitaryOperator> = s
        .entangler()
        .cloned()
        .or_else(|| s.implied_entangler())
        .into_iter()
        .collect();
    type Compute = fn(
        &OrthonormalBasis,
        &OrthonormalBasis,
        &UnitaryOperator,
        &OptimizerBudget,
        &[UnitaryOperator],
    ) -> Result<CoefficientResult>;
    let (name, compute): (&str, Compute) = match relation {
        RelationId::TwoVsTwo => ("c'", coeff_c_prime_with_starts),
        _ => ("c'''", coeff_c_tripleprime_with_starts),
    };
    let d = s.dim() as f64;
    let build = |coef: CoefficientResult, method| {
        let mut draft = Draft::new(relation, s.dim(), i1 + i2, 2.0 * d.log2() + coef.value.log2())
            .term("I(A1:B1)", i1)
            .term("I(A2:B2)", i2)
            .coefficient(name, coef);
        draft.method = method;
        labeled(draft.finish(), s)
    };
    let report = build(compute(b1, b2, &u, budget, &starts)?, ReportMethod::Optimized);
    if report.violated && reverify {
        return Ok(build(
            compute(b1, b2, &u, &budget.scaled(10), &starts)?,
            ReportMethod::Reverified,
        ));
    }
    Ok(report)
}

/// `I(A1:B1) + I(A2:B2) ≤ 2 log₂ d + log₂ c′`, with `c′` maximized
/// numerically and any violation re-checked at ten times the budget.
pub fn eval_two_vs_two(s: &MeasurementScenario, budget: &OptimizerBudget) -> Result<RelationReport> {
    eval_two_vs_two_with(s, budget, true)
}

pub fn eval_two_vs_two_with(
    s: &MeasurementScenario,
    budget: &OptimizerBudget,
    reverify: bool,
) -> Result<RelationReport> {
    optimized_relation(s, RelationId::TwoVsTwo, budget, reverify)
}

/// `I(A1:B1) + I(A2:B2) ≤ 2 log₂ d + log₂ c‴`, an open conjecture.
pub fn eval_conjectured_c3(s: &MeasurementScenario, budget: &OptimizerBudget) -> Result<RelationReport> {
    eval_conjectured_c3_with(s, budget, true)
}

pub fn eval_conjectured_c3_with(
    s: &MeasurementScenario,
    budget: &OptimizerBudget,
    reverify: bool,
) -> Result<RelationReport> {
    optimized_relation(s, RelationId::C3Conjecture, budget, reverify)
}

/// `I(A1:B1) + I(A2:B2) ≤ 2 log₂ d + log₂ c̃′` for the state `(I⊗V)|Φ⁺⟩`.
pub fn eval_state_dependent_two_vs_two(s: &MeasurementScenario, v: &UnitaryOperator) -> Result<RelationReport> {
    let d = s.dim();
    if v.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: v.dim(),
        });
    }
    let mixed = ComplexMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
    for (party, m) in [("Alice", s.alice_marginal()), ("Bob", s.bob_marginal())] {
        let dev = m.matrix().max_abs_diff(&mixed);
        if dev > tol::STRUCTURAL {
            return Err(Error::NotMaximallyEntangled(format!(
                "{party}'s marginal deviates from I/d by {dev:e}"
            )));
        }
    }
    let phi = maximally_entangled(d, v)?;
    let fidelity = match s.state() {
        SharedState::Pure(p) => p.inner(&phi).norm_sqr(),
        SharedState::Mixed(m) => m.expectation(&crate::qcore::projector(&phi)).re,
    };
    if fidelity < 1.0 - tol::STRUCTURAL {
        return Err(Error::NotMaximallyEntangled(format!(
            "state differs from (I⊗V)|Φ⁺⟩ (fidelity {fidelity})"
        )));
    }
    let (i1, i2) = paired_terms(s)?;
    let (a1, a2) = s.alice_pair()?;
    let (b1, b2) = s.bob_pair()?;
    let coef = coeff_c_tilde_prime(b1, b2, &alignment_unitary(a1, a2)?, v)?;
    let rhs = 2.0 * (d as f64).log2() + coef.value.log2();
    Ok(labeled(
        Draft::new(RelationId::StateDependent, d, i1 + i2, rhs)
            .term("I(A1:B1)", i1)
            .term("I(A2:B2)", i2)
            .coefficient("c~'", coef)
            .finish(),
        s,
    ))
}

/// `I(A1:B1) + I(A2:B2) ≤ log₂ c″ - 2 log₂ d`; a singular `c″` gives an
/// infinite bound flagged as degenerate.
pub fn eval_exotic(s: &MeasurementScenario, p: f64) -> Result<RelationReport> {
    let (i1, i2) = paired_terms(s)?;
    let (a1, a2) = s.alice_pair()?;
    let (b1, b2) = s.bob_pair()?;
    let coef = coeff_c_doubleprime(a1, a2, b1, b2, p)?;
    let d = s.dim() as f64;
    let degenerate = coef.degenerate;
    let rhs = if degenerate {
        f64::INFINITY
    } else {
        coef.value.log2() - 2.0 * d.log2()
    };
    let mut draft = Draft::new(RelationId::Exotic, s.dim(), i1 + i2, rhs)
        .term("I(A1:B1)", i1)
        .term("I(A2:B2)", i2)
        .coefficient("c''", coef);
    draft.degenerate = degenerate;
    draft.param = Some(p);
    Ok(labeled(draft.finish(), s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::schmidt_state;

    fn phi_plus(d: usize) -> SharedState {
        SharedState::Pure(maximally_entangled(d, &UnitaryOperator::identity(d)).unwrap())
    }

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn relation_ids_round_trip() {
        for id in RelationId::ALL {
            assert_eq!(id.as_str().parse::<RelationId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{}\"", id.as_str()));
        }
        assert!("eq-99".parse::<RelationId>().is_err());
    }

    #[test]
    fn maassen_uffink_saturates_on_qubit_mub() {
        let rho = PureState::basis(2, 0).density();
        let r = eval_maassen_uffink(&rho, &OrthonormalBasis::computational(2), &OrthonormalBasis::fourier(2)).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-12);
        assert!(r.slack.abs() < 1e-12 && !r.violated);
        assert_eq!(r.direction, Direction::Lower);
    }

    #[test]
    fn maassen_uffink_identical_bases() {
        let f = OrthonormalBasis::fourier(3);
        let r = eval_maassen_uffink(&DensityOperator::maximally_mixed(3), &f, &f).unwrap();
        assert!(r.rhs.abs() < 1e-12 && r.slack >= 0.0);
    }

    #[test]
    fn renyi_at_infinity_matches_maassen_uffink() {
        let rho = PureState::basis(3, 1).density();
        let (b1, b2) = (OrthonormalBasis::computational(3), OrthonormalBasis::fourier(3));
        let mu = eval_maassen_uffink(&rho, &b1, &b2).unwrap();
        let re = eval_renyi_mu(&rho, &b1, &b2, RenyiOrder::Infinity).unwrap();
        assert_eq!(mu.rhs, re.rhs);
        assert_eq!(mu.slack, re.slack);
    }

    #[test]
    fn hall_on_identical_states_is_zero() {
        let rho = DensityOperator::maximally_mixed(2);
        let e = Ensemble::new(crate::infomeasures::ProbVector::uniform(2), vec![rho.clone(), rho]).unwrap();
        let s = EnsembleScenario::new(
            e,
            OrthonormalBasis::computational(2),
            OrthonormalBasis::fourier(2),
            "id",
        )
        .unwrap();
        let r = eval_hall(&s).unwrap();
        assert!(r.lhs.abs() < 1e-12);
        assert!((r.slack - (2.0 + 0.5f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn product_state_has_no_mutual_information() {
        let psi = PureState::basis(2, 0).kron(&PureState::basis(2, 1));
        let s = MeasurementScenario::new(
            SharedState::Pure(psi),
            vec![OrthonormalBasis::computational(2)],
            vec![OrthonormalBasis::computational(2), OrthonormalBasis::fourier(2)],
            "product",
        )
        .unwrap();
        let r = eval_one_vs_two(&s).unwrap();
        assert!(r.lhs.abs() < 1e-12 && !r.violated);
        assert_eq!(r.label, "product");
    }

    #[test]
    fn two_vs_two_saturates_on_phi_plus() {
        for d in 2..4 {
            let c = OrthonormalBasis::computational(d);
            let s =
                MeasurementScenario::new(phi_plus(d), vec![c.clone(), c.clone()], vec![c.clone(), c], "sat").unwrap();
            let r = eval_two_vs_two(&s, &OptimizerBudget::default()).unwrap();
            let want = 2.0 * (d as f64).log2();
            assert!((r.lhs - want).abs() < 1e-12 && (r.rhs - want).abs() < 1e-12);
            assert!(r.slack.abs() < 1e-12 && !r.violated);
            let t = eval_state_dependent_two_vs_two(&s, &UnitaryOperator::identity(d)).unwrap();
            assert!(t.slack.abs() < 1e-12);
        }
    }

    #[test]
    fn state_dependent_rejects_wrong_state() {
        let c = OrthonormalBasis::computational(2);
        let psi = schmidt_state(&[0.9, 0.1], &c, &c).unwrap();
        let s = MeasurementScenario::new(
            SharedState::Pure(psi),
            vec![c.clone(), c.clone()],
            vec![c.clone(), c],
            "x",
        )
        .unwrap();
        assert!(matches!(
            eval_state_dependent_two_vs_two(&s, &UnitaryOperator::identity(2)),
            Err(Error::NotMaximallyEntangled(_))
        ));
        let s = MeasurementScenario::new(phi_plus(2), s.alice_bases().to_vec(), s.bob_bases().to_vec(), "y").unwrap();
        let x = UnitaryOperator::new(ComplexMatrix::from_rows(&[vec![r(0.0), r(1.0)], vec![r(1.0), r(0.0)]]).unwrap())
            .unwrap();
        assert!(eval_state_dependent_two_vs_two(&s, &x).is_err());
    }

    #[test]
    fn implied_entangler_recovers_v() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let v = crate::qcore::random_unitary(3, &mut rng);
        let c = OrthonormalBasis::computational(3);
        let psi = maximally_entangled(3, &v).unwrap();
        let s = MeasurementScenario::new(SharedState::Pure(psi), vec![c.clone()], vec![c], "v").unwrap();
        assert!(s.implied_entangler().unwrap().matrix().max_abs_diff(v.matrix()) < 1e-10);
    }

    #[test]
    fn exotic_mub_everywhere_and_degenerate() {
        let (z, x) = (OrthonormalBasis::computational(2), OrthonormalBasis::fourier(2));
        let s = MeasurementScenario::new(
            phi_plus(2),
            vec![z.clone(), x.clone()],
            vec![z.clone(), x.clone()],
            "mub",
        )
        .unwrap();
        let r = eval_exotic(&s, 0.5).unwrap();
        assert!((r.rhs - 2.0).abs() < 1e-12);
        let s = MeasurementScenario::new(phi_plus(2), vec![z.clone(), x], vec![z.clone(), z], "deg").unwrap();
        let r = eval_exotic(&s, 0.5).unwrap();
        assert!(r.degenerate && r.rhs.is_infinite() && !r.violated);
        let json = serde_json::to_string(&r).unwrap();
        let back: RelationReport = serde_json::from_str(&json).unwrap();
        assert!(back.rhs.is_infinite());
    }

    #[test]
    fn dispatcher_routes_and_rejects() {
        let c = OrthonormalBasis::computational(2);
        let f = OrthonormalBasis::fourier(2);
        let local = Scenario::Local(
            LocalScenario::new(DensityOperator::maximally_mixed(2), c.clone(), f.clone(), "l").unwrap(),
        );
        let opts = EvalOptions::default();
        assert!(evaluate(RelationId::MaassenUffink, &local, &opts).is_ok());
        assert!(matches!(
            evaluate(RelationId::OneVsTwo, &local, &opts),
            Err(Error::IncompatibleScenario(_))
        ));
        let one = Scenario::Bipartite(MeasurementScenario::new(phi_plus(2), vec![c.clone()], vec![c, f], "b").unwrap());
        assert!(evaluate(RelationId::Hall, &one, &opts).is_ok());
        assert!(matches!(
            evaluate(RelationId::TwoVsTwo, &one, &opts),
            Err(Error::IncompatibleScenario(_))
        ));
        let r = evaluate(RelationId::HallSpecial, &one, &opts).unwrap();
        assert_eq!(r.label, "b");
    }

    #[test]
    fn scenario_validation() {
        let c2 = OrthonormalBasis::computational(2);
        let c3 = OrthonormalBasis::computational(3);
        assert!(MeasurementScenario::new(phi_plus(2), vec![c2.clone()], vec![c3], "x").is_err());
        assert!(MeasurementScenario::new(phi_plus(3), vec![c2.clone()], vec![c2.clone()], "x").is_err());
        assert!(MeasurementScenario::new(phi_plus(2), vec![c2.clone(); 3], vec![c2], "x").is_err());
    }
}
