//! JSON scenario files.
//!
//! Complex numbers are `[re, im]` pairs. A basis is either a list of
//! vectors or `{"observable": matrix}`, in which case its eigenvectors
//! ordered by descending eigenvalue are used. The scenario kind follows from
//! the fields present: an `ensemble` block makes an ensemble scenario, Alice
//! bases make a bipartite one, and otherwise the state lives on one system.

use std::path::Path;

use anyhow::{anyhow, Context, Result};
use mucorr_core::coefficients::OptimizerBudget;
use mucorr_core::infomeasures::{Ensemble, ProbVector, RenyiOrder};
use mucorr_core::qcore::{ComplexMatrix, DensityOperator, OrthonormalBasis, PureState, UnitaryOperator, C64};
use mucorr_core::relations::{EnsembleScenario, LocalScenario, MeasurementScenario, RelationId, Scenario, SharedState};
use serde::{Deserialize, Serialize};

pub type Complex = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub label: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alice_bases: Vec<BasisSpec>,
    pub bob_bases: Vec<BasisSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
    /// `V` with the state equal to `(I⊗V)|Φ⁺⟩`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entangler: Option<Vec<Vec<Complex>>>,
    /// Relations checked when none are given on the command line.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<RelationId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Optimizer budget for the relations whose coefficient is maximized.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<OptimizerBudget>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Number(f64),
    Text(String),
}

impl AlphaSpec {
    pub fn from_order(order: RenyiOrder) -> Self {
        match order {
            RenyiOrder::Finite(a) => AlphaSpec::Number(a),
            RenyiOrder::Infinity => AlphaSpec::Text("inf".into()),
        }
    }

    pub fn order(&self) -> Result<RenyiOrder> {
        match self {
            AlphaSpec::Number(a) => Ok(RenyiOrder::Finite(*a)),
            AlphaSpec::Text(s) => s.parse().map_err(|e| anyhow!("alpha: {e}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<Complex>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Complex>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisSpec {
    Vectors(Vec<Vec<Complex>>),
    Observable { observable: Vec<Vec<Complex>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub weights: Vec<f64>,
    pub states: Vec<StateSpec>,
}

fn c(z: &Complex) -> C64 {
    C64::new(z[0], z[1])
}

fn pair(z: &C64) -> Complex {
    [z.re, z.im]
}

fn matrix_from(rows: &[Vec<Complex>], path: &str) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(c).collect()).collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| anyhow!("{path}: {e}"))
}

fn matrix_to(m: &ComplexMatrix) -> Vec<Vec<Complex>> {
    m.to_rows().iter().map(|r| r.iter().map(pair).collect()).collect()
}

impl StateSpec {
    fn pure(psi: &PureState) -> Self {
        Self {
            amplitudes: Some(psi.amplitudes().iter().map(pair).collect()),
            matrix: None,
        }
    }

    fn mixed(rho: &DensityOperator) -> Self {
        Self {
            amplitudes: None,
            matrix: Some(matrix_to(rho.matrix())),
        }
    }

    fn build(&self, expected_dim: usize, path: &str) -> Result<SharedState> {
        let state = match (&self.amplitudes, &self.matrix) {
            (Some(a), None) => SharedState::Pure(
                PureState::new(a.iter().map(c).collect()).map_err(|e| anyhow!("{path}.amplitudes: {e}"))?,
            ),
            (None, Some(m)) => SharedState::Mixed(
                DensityOperator::new(matrix_from(m, &format!("{path}.matrix"))?)
                    .map_err(|e| anyhow!("{path}.matrix: {e}"))?,
            ),
            _ => return Err(anyhow!("{path}: give exactly one of `amplitudes` or `matrix`")),
        };
        if state.dim() != expected_dim {
            return Err(anyhow!(
                "{path}: expected dimension {expected_dim}, found {}",
                state.dim()
            ));
        }
        Ok(state)
    }
}

impl BasisSpec {
    fn from_basis(b: &OrthonormalBasis) -> Self {
        BasisSpec::Vectors(b.to_vectors().iter().map(|v| v.iter().map(pair).collect()).collect())
    }

    fn build(&self, dim: usize, path: &str) -> Result<OrthonormalBasis> {
        let b = match self {
            BasisSpec::Vectors(vs) => {
                let vs: Vec<Vec<C64>> = vs.iter().map(|v| v.iter().map(c).collect()).collect();
                OrthonormalBasis::from_vectors(&vs).map_err(|e| anyhow!("{path}: {e}"))?
            }
            BasisSpec::Observable { observable } => {
                let m = matrix_from(observable, &format!("{path}.observable"))?;
                OrthonormalBasis::from_observable(&m).map_err(|e| anyhow!("{path}.observable: {e}"))?
            }
        };
        if b.dim() != dim {
            return Err(anyhow!("{path}: expected dimension {dim}, found {}", b.dim()));
        }
        Ok(b)
    }
}

fn bases(specs: &[BasisSpec], dim: usize, field: &str) -> Result<Vec<OrthonormalBasis>> {
    specs
        .iter()
        .enumerate()
        .map(|(i, b)| b.build(dim, &format!("{field}[{i}]")))
        .collect()
}

fn two(mut v: Vec<OrthonormalBasis>, field: &str) -> Result<[OrthonormalBasis; 2]> {
    if v.len() != 2 {
        return Err(anyhow!("{field}: expected 2 bases, found {}", v.len()));
    }
    let b2 = v.pop().expect("two");
    let b1 = v.pop().expect("two");
    Ok([b1, b2])
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| anyhow!("line {}, column {}: {e}", e.line(), e.column()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario files serialize")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").with_context(|| format!("writing {}", path.display()))
    }

    pub fn alpha(&self) -> Result<Option<RenyiOrder>> {
        self.alpha.as_ref().map(AlphaSpec::order).transpose()
    }

    pub fn build(&self) -> Result<Scenario> {
        let d = self.dim;
        if d == 0 {
            return Err(anyhow!("dim: must be positive"));
        }
        let bob = bases(&self.bob_bases, d, "bob_bases")?;
        if let Some(e) = &self.ensemble {
            if self.state.is_some() || !self.alice_bases.is_empty() {
                return Err(anyhow!("ensemble: cannot be combined with `state` or `alice_bases`"));
            }
            let states = e
                .states
                .iter()
                .enumerate()
                .map(|(i, s)| Ok(s.build(d, &format!("ensemble.states[{i}]"))?.density()))
                .collect::<Result<Vec<_>>>()?;
            let weights = ProbVector::new(e.weights.clone()).map_err(|err| anyhow!("ensemble.weights: {err}"))?;
            let ensemble = Ensemble::new(weights, states).map_err(|err| anyhow!("ensemble: {err}"))?;
            let [b1, b2] = two(bob, "bob_bases")?;
            return Ok(Scenario::Ensemble(EnsembleScenario::new(
                ensemble,
                b1,
                b2,
                &self.label,
            )?));
        }
        let state = self.state.as_ref().ok_or_else(|| anyhow!("state: missing"))?;
        if self.alice_bases.is_empty() {
            if self.entangler.is_some() {
                return Err(anyhow!("entangler: needs a bipartite scenario"));
            }
            let rho = state.build(d, "state")?.density();
            let [b1, b2] = two(bob, "bob_bases")?;
            return Ok(Scenario::Local(LocalScenario::new(rho, b1, b2, &self.label)?));
        }
        let alice = bases(&self.alice_bases, d, "alice_bases")?;
        let mut s = MeasurementScenario::new(state.build(d * d, "state")?, alice, bob, &self.label)
            .map_err(|e| anyhow!("scenario: {e}"))?;
        if let Some(v) = &self.entangler {
            let v = UnitaryOperator::new(matrix_from(v, "entangler")?).map_err(|e| anyhow!("entangler: {e}"))?;
            s = s.with_entangler(v).map_err(|e| anyhow!("entangler: {e}"))?;
        }
        Ok(Scenario::Bipartite(s))
    }

    pub fn from_scenario(scenario: &Scenario) -> Self {
        let mut f = Self {
            label: scenario.label().to_string(),
            dim: scenario.dim(),
            state: None,
            alice_bases: Vec::new(),
            bob_bases: Vec::new(),
            ensemble: None,
            entangler: None,
            relations: Vec::new(),
            alpha: None,
            p: None,
            budget: None,
        };
        match scenario {
            Scenario::Local(s) => {
                f.state = Some(StateSpec::mixed(&s.state));
                f.bob_bases = s.bases.iter().map(BasisSpec::from_basis).collect();
            }
            Scenario::Ensemble(s) => {
                f.ensemble = Some(EnsembleSpec {
                    weights: s.ensemble.weights().as_slice().to_vec(),
                    states: s.ensemble.states().iter().map(StateSpec::mixed).collect(),
                });
                f.bob_bases = s.bob_bases.iter().map(BasisSpec::from_basis).collect();
            }
            Scenario::Bipartite(s) => {
                f.state = Some(match s.state() {
                    SharedState::Pure(p) => StateSpec::pure(p),
                    SharedState::Mixed(m) => StateSpec::mixed(m),
                });
                f.alice_bases = s.alice_bases().iter().map(BasisSpec::from_basis).collect();
                f.bob_bases = s.bob_bases().iter().map(BasisSpec::from_basis).collect();
                f.entangler = s.entangler().map(|v| matrix_to(v.matrix()));
            }
        }
        f
    }
}
