//! Named scenarios with pinned expectations, and seeded scenario families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coefficients::{coeff_a, coeff_c, overlap_matrix, sum_sq};
use crate::error::{Error, Result};
use crate::ga::{Genome, ScenarioCodec, StateMode, SystemKind};
use crate::infomeasures::{joint_distribution, joint_distribution_pure, mutual_information, Ensemble, ProbVector};
use crate::qcore::{
    maximally_entangled, random_unitary, ComplexMatrix, DensityOperator, OrthonormalBasis, PureState, UnitaryOperator,
    C64,
};
use crate::relations::{
    evaluate, EnsembleScenario, EvalOptions, MeasurementScenario, RelationId, RelationReport, Scenario, SharedState,
};

/// Where an expected value comes from: stated in the literature the
/// scenario is taken from, or worked out independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Reported,
    Computed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientKind {
    A,
    C,
    SumSq,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expectation {
    Relation {
        relation: RelationId,
        lhs: Option<f64>,
        rhs: Option<f64>,
        violated: Option<bool>,
        tol: f64,
        provenance: Provenance,
    },
    /// `I(A_alice : B_bob)`, optionally on a different state with the same bases.
    MutualInformation {
        name: String,
        state: Option<SharedState>,
        alice: usize,
        bob: usize,
        value: f64,
        tol: f64,
        provenance: Provenance,
    },
    /// Coefficient of the overlap matrix of Bob's two bases.
    Coefficient {
        kind: CoefficientKind,
        value: f64,
        tol: f64,
        provenance: Provenance,
    },
    /// `slack ≥ min` for a relation expected to hold.
    SlackAtLeast { relation: RelationId, min: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(#[serde(with = "crate::serde_f64")] f64),
    Flag(bool),
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Number(x) => write!(f, "{x:.9}"),
            Value::Flag(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub scenario: String,
    pub check: String,
    pub expected: Value,
    pub actual: Value,
    pub tolerance: f64,
    pub passed: bool,
    pub provenance: Provenance,
}

#[derive(Debug, Clone)]
pub struct ReproResult {
    pub reports: Vec<RelationReport>,
    pub outcomes: Vec<CheckOutcome>,
}

impl ReproResult {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedScenario {
    pub id: String,
    pub description: String,
    pub scenario: Scenario,
    pub expectations: Vec<Expectation>,
    /// Choices made where the source leaves a detail open.
    pub notes: Vec<String>,
}

impl NamedScenario {
    fn new(id: impl Into<String>, description: impl Into<String>, scenario: Scenario) -> Self {
        Self {
            id: id.into(),
            description: description.into(),
            scenario,
            expectations: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn expect(mut self, e: Expectation) -> Self {
        self.expectations.push(e);
        self
    }

    fn note(mut self, n: &str) -> Self {
        self.notes.push(n.to_string());
        self
    }

    pub fn measurement(&self) -> Option<&MeasurementScenario> {
        match &self.scenario {
            Scenario::Bipartite(s) => Some(s),
            _ => None,
        }
    }

    /// Relations named by the expectations, in order of first mention.
    pub fn relations(&self) -> Vec<RelationId> {
        let mut out = Vec::new();
        for e in &self.expectations {
            if let Expectation::Relation { relation, .. } | Expectation::SlackAtLeast { relation, .. } = e {
                if !out.contains(relation) {
                    out.push(*relation);
                }
            }
        }
        out
    }

    /// Evaluates every expectation.
    pub fn run(&self, opts: &EvalOptions) -> Result<ReproResult> {
        let mut reports: Vec<RelationReport> = Vec::new();
        let mut outcomes = Vec::new();
        let report_for = |relation: RelationId, reports: &mut Vec<RelationReport>| -> Result<RelationReport> {
            if let Some(r) = reports.iter().find(|r| r.relation == relation) {
                return Ok(r.clone());
            }
            let r = evaluate(relation, &self.scenario, opts)?;
            reports.push(r.clone());
            Ok(r)
        };
        let mut push = |check: String, expected: Value, actual: Value, tolerance: f64, provenance| {
            let passed = match (expected, actual) {
                (Value::Number(e), Value::Number(a)) => (e - a).abs() <= tolerance,
                (Value::Flag(e), Value::Flag(a)) => e == a,
                _ => false,
            };
            outcomes.push(CheckOutcome {
                scenario: self.id.clone(),
                check,
                expected,
                actual,
                tolerance,
                passed,
                provenance,
            });
        };
        for e in &self.expectations {
            match e {
                Expectation::Relation {
                    relation,
                    lhs,
                    rhs,
                    violated,
                    tol,
                    provenance,
                } => {
                    let r = report_for(*relation, &mut reports)?;
                    if let Some(v) = lhs {
                        push(
                            format!("{relation}.lhs"),
                            Value::Number(*v),
                            Value::Number(r.lhs),
                            *tol,
                            *provenance,
                        );
                    }
                    if let Some(v) = rhs {
                        push(
                            format!("{relation}.rhs"),
                            Value::Number(*v),
                            Value::Number(r.rhs),
                            *tol,
                            *provenance,
                        );
                    }
                    if let Some(v) = violated {
                        push(
                            format!("{relation}.violated"),
                            Value::Flag(*v),
                            Value::Flag(r.violated),
                            0.0,
                            *provenance,
                        );
                    }
                }
                Expectation::SlackAtLeast { relation, min } => {
                    let r = report_for(*relation, &mut reports)?;
                    push(
                        format!("{relation}.slack>={min:e}"),
                        Value::Flag(true),
                        Value::Flag(r.slack >= *min),
                        0.0,
                        Provenance::Computed,
                    );
                }
                Expectation::MutualInformation {
                    name,
                    state,
                    alice,
                    bob,
                    value,
                    tol,
                    provenance,
                } => {
                    let s = self.measurement().ok_or_else(|| {
                        Error::IncompatibleScenario("mutual information needs a bipartite scenario".into())
                    })?;
                    let (a, b) = (&s.alice_bases()[*alice], &s.bob_bases()[*bob]);
                    let joint = match state.as_ref().unwrap_or(s.state()) {
                        SharedState::Pure(p) => joint_distribution_pure(p, a, b)?,
                        SharedState::Mixed(m) => joint_distribution(m, a, b)?,
                    };
                    let mi = mutual_information(&joint);
                    push(
                        name.clone(),
                        Value::Number(*value),
                        Value::Number(mi),
                        *tol,
                        *provenance,
                    );
                }
                Expectation::Coefficient {
                    kind,
                    value,
                    tol,
                    provenance,
                } => {
                    let bob = match &self.scenario {
                        Scenario::Bipartite(s) => s.bob_bases().to_vec(),
                        Scenario::Local(s) => s.bases.to_vec(),
                        Scenario::Ensemble(s) => s.bob_bases.to_vec(),
                    };
                    let c = overlap_matrix(&bob[0], &bob[1])?;
                    let (name, x) = match kind {
                        CoefficientKind::A => ("a", coeff_a(&c)),
                        CoefficientKind::C => ("c", coeff_c(&c)),
                        CoefficientKind::SumSq => ("sum_sq", sum_sq(&c)),
                    };
                    push(
                        format!("coefficient.{name}"),
                        Value::Number(*value),
                        Value::Number(x),
                        *tol,
                        *provenance,
                    );
                }
            }
        }
        Ok(ReproResult { reports, outcomes })
    }
}

fn real_vectors(rows: &[[f64; 3]]) -> Vec<Vec<C64>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
        .collect()
}

/// Bob's two bases of the three-dimensional counterexample to the
/// sum-of-squares bound.
pub fn counterexample_bob_bases() -> (OrthonormalBasis, OrthonormalBasis) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let b2 = OrthonormalBasis::from_vectors(&real_vectors(&[[s, s, 0.0], [0.5, -0.5, s], [-0.5, 0.5, s]]))
        .expect("orthonormal by construction");
    (OrthonormalBasis::computational(3), b2)
}

/// `d = 3`, Alice and Bob's first basis computational, Bob's second basis
/// `{(1,1,0)/√2, (1,-1,√2)/2, (-1,1,√2)/2}`, state
/// `(|a1⟩|b1_3⟩ + |a2⟩|b2_1⟩)/√2`. Mutual information 1 with each of Bob's
/// bases, which breaks `log d + log Σc²` but not `log d + log c`.
pub fn sum_sq_counterexample() -> NamedScenario {
    let (b1, b2) = counterexample_bob_bases();
    let a = OrthonormalBasis::computational(3);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = a.vector(0).kron(&b1.vector(2));
    let phi = a.vector(1).kron(&b2.vector(0));
    let amps: Vec<C64> = psi
        .amplitudes()
        .iter()
        .zip(phi.amplitudes())
        .map(|(x, y)| (x + y) * h)
        .collect();
    let state = SharedState::Pure(PureState::new(amps).expect("unit norm"));
    let s = MeasurementScenario::new(state, vec![a], vec![b1, b2], "sum_sq_counterexample").expect("valid");
    let exact = |relation, lhs, rhs, violated, provenance| Expectation::Relation {
        relation,
        lhs: Some(lhs),
        rhs: Some(rhs),
        violated: Some(violated),
        tol: 1e-9,
        provenance,
    };
    let mi = |name: &str, bob| Expectation::MutualInformation {
        name: name.into(),
        state: None,
        alice: 0,
        bob,
        value: 1.0,
        tol: 1e-9,
        provenance: Provenance::Computed,
    };
    NamedScenario::new(
        "sum_sq_counterexample",
        "qutrit state violating the sum-of-squares bound while respecting log d + log c",
        Scenario::Bipartite(s),
    )
    .expect(exact(
        RelationId::SumSqBound,
        2.0,
        3.75f64.log2(),
        true,
        Provenance::Reported,
    ))
    .expect(exact(
        RelationId::OneVsTwo,
        2.0,
        4.5f64.log2(),
        false,
        Provenance::Computed,
    ))
    .expect(mi("I(A:B1)", 0))
    .expect(mi("I(A:B2)", 1))
    .expect(Expectation::Coefficient {
        kind: CoefficientKind::A,
        value: 0.5,
        tol: 1e-12,
        provenance: Provenance::Reported,
    })
    .expect(Expectation::Coefficient {
        kind: CoefficientKind::C,
        value: 1.5,
        tol: 1e-12,
        provenance: Provenance::Computed,
    })
    .expect(Expectation::Coefficient {
        kind: CoefficientKind::SumSq,
        value: 1.25,
        tol: 1e-12,
        provenance: Provenance::Reported,
    })
}

/// Qubit state `√0.0332|00⟩ + √0.9668|11⟩` with Alice measuring the
/// eigenbasis of `X+Z` and Bob that of `X-Z`, outcomes ordered by
/// descending eigenvalue.
pub fn nonmaximal_xz() -> NamedScenario {
    let r = |x: f64| C64::new(x, 0.0);
    let x_plus_z = ComplexMatrix::from_rows(&[vec![r(1.0), r(1.0)], vec![r(1.0), r(-1.0)]]).expect("2x2");
    let x_minus_z = ComplexMatrix::from_rows(&[vec![r(-1.0), r(1.0)], vec![r(1.0), r(1.0)]]).expect("2x2");
    let a = OrthonormalBasis::from_observable(&x_plus_z).expect("nondegenerate");
    let b = OrthonormalBasis::from_observable(&x_minus_z).expect("nondegenerate");
    let amps = vec![r(0.0332f64.sqrt()), r(0.0), r(0.0), r(0.9668f64.sqrt())];
    let state = SharedState::Pure(PureState::new(amps).expect("unit norm"));
    let phi_plus = maximally_entangled(2, &UnitaryOperator::identity(2)).expect("d = 2");
    let s = MeasurementScenario::new(state, vec![a], vec![b], "nonmaximal_xz").expect("valid");
    NamedScenario::new(
        "nonmaximal_xz",
        "X+Z against X-Z on a weakly entangled qubit pair and on |Φ⁺⟩",
        Scenario::Bipartite(s),
    )
    .expect(Expectation::MutualInformation {
        name: "I(A:B)".into(),
        state: None,
        alice: 0,
        bob: 0,
        value: 0.049,
        tol: 1e-3,
        provenance: Provenance::Reported,
    })
    .expect(Expectation::MutualInformation {
        name: "I(A:B) on |Φ⁺⟩".into(),
        state: Some(SharedState::Pure(phi_plus)),
        alice: 0,
        bob: 0,
        value: 0.0,
        tol: 1e-9,
        provenance: Provenance::Reported,
    })
}

/// Bob's second basis `{|0⟩, |ĵ⟩}` with `|ĵ⟩ = Σ_{k=1}^{d-1} e^{2πi ĵk/(d-1)}|k⟩/√(d-1)`.
pub fn shared_eigenvector_basis(d: usize) -> Result<OrthonormalBasis> {
    if d < 3 {
        return Err(Error::InvalidConfig(format!(
            "the shared-eigenvector family needs d ≥ 3, got {d}"
        )));
    }
    let m = (d - 1) as f64;
    let mut vectors = vec![PureState::basis(d, 0).amplitudes().to_vec()];
    for j in 1..d {
        let mut v = vec![C64::new(0.0, 0.0); d];
        for (k, vk) in v.iter_mut().enumerate().skip(1) {
            *vk = C64::from_polar(1.0 / m.sqrt(), std::f64::consts::TAU * (j * k) as f64 / m);
        }
        vectors.push(v);
    }
    OrthonormalBasis::from_vectors(&vectors)
}

/// `ρ = Σ_i p_i |i⟩⟨i| ⊗ |i⟩⟨i|` with uniform `p_i`, Alice and Bob's first
/// basis computational, Bob's second the shared-eigenvector basis. `c = 2`.
pub fn shared_eigenvector_family(d: usize) -> Result<NamedScenario> {
    let b2 = shared_eigenvector_basis(d)?;
    let comp = OrthonormalBasis::computational(d);
    let mut diag = vec![0.0; d * d];
    for i in 0..d {
        diag[i * d + i] = 1.0 / d as f64;
    }
    let rho = DensityOperator::new(ComplexMatrix::real_diag(&diag))?;
    let id = format!("shared_eigenvector_d{d}");
    let s = MeasurementScenario::new(SharedState::Mixed(rho), vec![comp.clone()], vec![comp, b2], id.clone())?;
    let ld = (d as f64).log2();
    Ok(NamedScenario::new(
        id,
        format!("d = {d}: Bob's bases share one eigenvector; c = 2"),
        Scenario::Bipartite(s),
    )
    .expect(Expectation::Coefficient {
        kind: CoefficientKind::C,
        value: 2.0,
        tol: 1e-12,
        provenance: Provenance::Reported,
    })
    .expect(Expectation::Relation {
        relation: RelationId::OneVsTwo,
        lhs: None,
        rhs: Some(ld + 1.0),
        violated: Some(false),
        tol: 1e-12,
        provenance: Provenance::Reported,
    })
    .expect(Expectation::Relation {
        relation: RelationId::Hall,
        lhs: None,
        rhs: Some(2.0 * ld),
        violated: Some(false),
        tol: 1e-12,
        provenance: Provenance::Reported,
    })
    .note("outcome weights p_i are not fixed by the construction; uniform weights are used"))
}

fn random_probs<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    // normalized exponentials: uniform on the simplex
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// `ρ = Σ_{ki} p_{ki} |a_k⟩⟨a_k| ⊗ |b1_i⟩⟨b1_i|` with Haar-random bases
/// and weights uniform on the simplex. With `correlated`, only `k = i`
/// terms appear.
pub fn lemma1_family(d: usize, seed: u64, correlated: bool) -> Result<NamedScenario> {
    if d < 2 {
        return Err(Error::InvalidConfig(format!(
            "the diagonal-state family needs d ≥ 2, got {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = OrthonormalBasis::from_unitary(&random_unitary(d, &mut rng));
    let b1 = OrthonormalBasis::from_unitary(&random_unitary(d, &mut rng));
    let b2 = OrthonormalBasis::from_unitary(&random_unitary(d, &mut rng));
    let weights = if correlated {
        let p = random_probs(d, &mut rng);
        let mut w = vec![0.0; d * d];
        for i in 0..d {
            w[i * d + i] = p[i];
        }
        w
    } else {
        random_probs(d * d, &mut rng)
    };
    let frame = a.matrix().kron(b1.matrix());
    let rho = frame
        .matmul(&ComplexMatrix::real_diag(&weights))
        .matmul(&frame.adjoint());
    let rho = DensityOperator::new(rho)?;
    let kind = if correlated { "correlated" } else { "general" };
    let id = format!("lemma1_{kind}_d{d}_s{seed}");
    let s = MeasurementScenario::new(SharedState::Mixed(rho), vec![a], vec![b1, b2], id.clone())?;
    let holds = |relation| Expectation::SlackAtLeast { relation, min: -1e-9 };
    Ok(NamedScenario::new(
        id,
        format!("d = {d}: state diagonal in Alice's basis ⊗ Bob's first basis ({kind} weights)"),
        Scenario::Bipartite(s),
    )
    .expect(holds(RelationId::SumSqBound))
    .expect(holds(RelationId::OneVsTwo))
    .expect(holds(RelationId::HallSpecial)))
}

/// `(I⊗V)|Φ⁺⟩` with Haar-random `V` and four Haar-random bases.
pub fn theorem2_family(d: usize, seed: u64) -> Result<NamedScenario> {
    if d < 2 {
        return Err(Error::InvalidConfig(format!(
            "the maximally entangled family needs d ≥ 2, got {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = random_unitary(d, &mut rng);
    let mut basis = || OrthonormalBasis::from_unitary(&random_unitary(d, &mut rng));
    let (a1, a2, b1, b2) = (basis(), basis(), basis(), basis());
    let state = SharedState::Pure(maximally_entangled(d, &v)?);
    let id = format!("max_entangled_d{d}_s{seed}");
    let s = MeasurementScenario::new(state, vec![a1, a2], vec![b1, b2], id.clone())?.with_entangler(v)?;
    Ok(NamedScenario::new(
        id,
        format!("d = {d}: (I⊗V)|Φ⁺⟩ with random V and bases"),
        Scenario::Bipartite(s),
    )
    .expect(Expectation::SlackAtLeast {
        relation: RelationId::StateDependent,
        min: -1e-9,
    })
    .expect(Expectation::SlackAtLeast {
        relation: RelationId::TwoVsTwo,
        min: -1e-6,
    }))
}

/// Random bipartite scenario with two bases per party.
pub fn random_scenario(d: usize, mode: StateMode, seed: u64) -> Result<NamedScenario> {
    if d == 0 || d > 16 {
        return Err(Error::InvalidConfig(format!(
            "random scenarios support 1 ≤ d ≤ 16, got {d}"
        )));
    }
    let codec = ScenarioCodec::new(d, SystemKind::Bipartite, mode, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let decoded = codec.decode(&Genome::random(codec.genome_len(), &mut rng))?;
    let id = format!("random_{mode}_d{d}_s{seed}");
    let Scenario::Bipartite(s) = decoded.scenario else {
        unreachable!("bipartite codec")
    };
    let (state, alice, bob) = (s.state().clone(), s.alice_bases().to_vec(), s.bob_bases().to_vec());
    let mut m = MeasurementScenario::new(state, alice, bob, id.clone())?;
    if let Some(v) = s.entangler() {
        m = m.with_entangler(v.clone())?;
    }
    Ok(NamedScenario::new(
        id,
        format!("d = {d}: random {mode} state and bases"),
        Scenario::Bipartite(m),
    ))
}

/// Ensemble of `n` random mixed states with random weights, and two random
/// bases for Bob.
pub fn random_ensemble(d: usize, n: usize, seed: u64) -> Result<EnsembleScenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = ProbVector::new(random_probs(n, &mut rng))?;
    let states = (0..n)
        .map(|_| {
            let amps: Vec<C64> = (0..d * d)
                .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let psi = PureState::normalized(amps)?;
            DensityOperator::from_purification(psi.amplitudes(), d, d)
        })
        .collect::<Result<Vec<_>>>()?;
    let b1 = OrthonormalBasis::from_unitary(&random_unitary(d, &mut rng));
    let b2 = OrthonormalBasis::from_unitary(&random_unitary(d, &mut rng));
    EnsembleScenario::new(
        Ensemble::new(weights, states)?,
        b1,
        b2,
        format!("ensemble_d{d}_n{n}_s{seed}"),
    )
}

/// Every pinned scenario.
pub fn registry() -> Vec<NamedScenario> {
    let mut all = vec![sum_sq_counterexample(), nonmaximal_xz()];
    all.extend((3..=8).map(|d| shared_eigenvector_family(d).expect("d ≥ 3")));
    all.push(lemma1_family(3, 0, false).expect("d ≥ 2"));
    all.push(lemma1_family(3, 0, true).expect("d ≥ 2"));
    all.push(theorem2_family(3, 0).expect("d ≥ 2"));
    all
}

/// Alternative ids accepted by [`lookup`].
pub const ALIASES: [(&str, &str); 1] = [("example_sec4", "sum_sq_counterexample")];

pub fn lookup(id: &str) -> Option<NamedScenario> {
    let id = ALIASES
        .iter()
        .find(|(alias, _)| *alias == id)
        .map_or(id, |(_, target)| target);
    registry().into_iter().find(|s| s.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counterexample_reproduces() {
        let r = sum_sq_counterexample().run(&EvalOptions::default()).unwrap();
        for o in &r.outcomes {
            assert!(o.passed, "{o:?}");
        }
        let c = overlap_matrix(&counterexample_bob_bases().0, &counterexample_bob_bases().1).unwrap();
        let printed = [0.5, 0.25, 0.25, 0.5, 0.25, 0.25, 0.0, 0.5, 0.5];
        assert!(c.entries().iter().zip(printed).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn nonmaximal_reproduces() {
        let r = nonmaximal_xz().run(&EvalOptions::default()).unwrap();
        assert!(r.passed(), "{:?}", r.outcomes);
    }

    #[test]
    fn shared_eigenvector_family_has_c_two() {
        for d in 3..=8 {
            let s = shared_eigenvector_family(d).unwrap();
            let r = s.run(&EvalOptions::default()).unwrap();
            assert!(r.passed(), "{:?}", r.outcomes);
            let m = s.measurement().unwrap();
            let c = overlap_matrix(&m.bob_bases()[0], &m.bob_bases()[1]).unwrap();
            assert_eq!(c.row(0)[0], 1.0);
            assert!(c.row(0)[1..].iter().all(|&x| x.abs() < 1e-15));
        }
        assert!(shared_eigenvector_family(2).is_err());
    }

    #[test]
    fn lemma1_states_are_diagonal_in_product_frame() {
        let s = lemma1_family(3, 7, false).unwrap();
        let m = s.measurement().unwrap();
        let frame = m.alice_bases()[0].matrix().kron(m.bob_bases()[0].matrix());
        let inner = frame.adjoint().matmul(m.state().density().matrix()).matmul(&frame);
        for i in 0..9 {
            for j in 0..9 {
                if i != j {
                    assert!(inner[(i, j)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn families_are_deterministic() {
        assert_eq!(theorem2_family(3, 5).unwrap(), theorem2_family(3, 5).unwrap());
        assert_eq!(
            random_scenario(3, StateMode::Mixed, 2).unwrap(),
            random_scenario(3, StateMode::Mixed, 2).unwrap()
        );
        assert_ne!(
            random_scenario(3, StateMode::Pure, 1).unwrap(),
            random_scenario(3, StateMode::Pure, 2).unwrap()
        );
    }

    #[test]
    fn one_dimensional_scenarios_carry_no_information() {
        let s = random_scenario(1, StateMode::Pure, 0).unwrap();
        let m = s.measurement().unwrap();
        assert_eq!(m.mutual_information(0, 0).unwrap(), 0.0);
        assert!(random_scenario(17, StateMode::Pure, 0).is_err());
    }

    #[test]
    fn registry_ids_unique_and_alias_resolves() {
        let reg = registry();
        let mut ids: Vec<_> = reg.iter().map(|s| s.id.clone()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), reg.len());
        assert_eq!(lookup("example_sec4").unwrap().id, "sum_sq_counterexample");
        assert!(lookup("nope").is_none());
    }

    #[test]
    fn registry_passes() {
        for s in registry() {
            let r = s.run(&EvalOptions::default()).unwrap();
            assert!(r.passed(), "{}: {:?}", s.id, r.outcomes);
        }
    }
}
