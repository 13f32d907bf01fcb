//! Decoding genomes into measurement scenarios.
//!
//! Layout, in order: the state segment, Alice's bases (`d²` genes each),
//! Bob's two bases (`d²` genes each), then an optional Rényi-order gene.
//! The state segment holds
//!
//! - pure: `2n` genes, amplitude `k` being `(2g₂ₖ - 1) + i(2g₂ₖ₊₁ - 1)`
//!   before normalization, with `n` the system dimension;
//! - mixed: a pure state on system ⊗ ancilla, traced over the ancilla
//!   (ancilla dimension `n`, so every rank is reachable);
//! - maximally entangled: `d²` genes for `V`, the state being `(I⊗V)|Φ⁺⟩`.

use serde::{Deserialize, Serialize};

use super::engine::Genome;
use crate::error::{Error, Result};
use crate::infomeasures::RenyiOrder;
use crate::qcore::{maximally_entangled, unitary_from_unit_vector, DensityOperator, OrthonormalBasis, PureState, C64};
use crate::relations::{LocalScenario, MeasurementScenario, Scenario, SharedState};

/// Range of the free Rényi order, sampled log-uniformly.
pub const ALPHA_RANGE: (f64, f64) = (0.1, 50.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    /// One system measured in two bases.
    Local,
    /// Alice and Bob share a state on `d × d`.
    Bipartite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateMode {
    Pure,
    Mixed,
    MaxEntangled,
}

impl std::fmt::Display for StateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StateMode::Pure => "pure",
            StateMode::Mixed => "mixed",
            StateMode::MaxEntangled => "max-entangled",
        })
    }
}

impl std::str::FromStr for StateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure" => Ok(StateMode::Pure),
            "mixed" => Ok(StateMode::Mixed),
            "max-entangled" => Ok(StateMode::MaxEntangled),
            _ => Err(Error::InvalidConfig(format!(
                "unknown state mode `{s}` (pure | mixed | max-entangled)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCodec {
    dim: usize,
    system: SystemKind,
    mode: StateMode,
    alice_bases: usize,
    free_alpha: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodedScenario {
    pub scenario: Scenario,
    /// Present when the codec carries a Rényi-order gene.
    pub alpha: Option<RenyiOrder>,
}

impl ScenarioCodec {
    pub fn new(dim: usize, system: SystemKind, mode: StateMode, alice_bases: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        match system {
            SystemKind::Local if mode == StateMode::MaxEntangled => {
                return Err(Error::InvalidConfig(
                    "a single system cannot be maximally entangled".into(),
                ))
            }
            SystemKind::Local if alice_bases != 0 => {
                return Err(Error::InvalidConfig("a single-system codec has no Alice bases".into()))
            }
            SystemKind::Bipartite if !(1..=2).contains(&alice_bases) => {
                return Err(Error::InvalidConfig(format!(
                    "Alice needs one or two bases, got {alice_bases}"
                )))
            }
            _ => {}
        }
        Ok(Self {
            dim,
            system,
            mode,
            alice_bases,
            free_alpha: false,
        })
    }

    pub fn with_free_alpha(mut self) -> Self {
        self.free_alpha = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn system(&self) -> SystemKind {
        self.system
    }

    pub fn mode(&self) -> StateMode {
        self.mode
    }

    pub fn alice_bases(&self) -> usize {
        self.alice_bases
    }

    pub fn free_alpha(&self) -> bool {
        self.free_alpha
    }

    fn system_dim(&self) -> usize {
        match self.system {
            SystemKind::Local => self.dim,
            SystemKind::Bipartite => self.dim * self.dim,
        }
    }

    pub fn state_genes(&self) -> usize {
        let n = self.system_dim();
        match self.mode {
            StateMode::Pure => 2 * n,
            StateMode::Mixed => 2 * n * n,
            StateMode::MaxEntangled => self.dim * self.dim,
        }
    }

    pub fn genome_len(&self) -> usize {
        self.state_genes() + (self.alice_bases + 2) * self.dim * self.dim + usize::from(self.free_alpha)
    }

    pub fn decode(&self, genome: &Genome) -> Result<DecodedScenario> {
        let g = genome.genes();
        if g.len() != self.genome_len() {
            return Err(Error::WrongLength {
                expected: self.genome_len(),
                found: g.len(),
            });
        }
        let d = self.dim;
        let (state_part, rest) = g.split_at(self.state_genes());
        let mut bases = rest[..(self.alice_bases + 2) * d * d]
            .chunks(d * d)
            .map(|chunk| Ok(OrthonormalBasis::from_unitary(&unitary_from_unit_vector(chunk)?)))
            .collect::<Result<Vec<_>>>()?;
        let bob = bases.split_off(self.alice_bases);
        let alpha = self.free_alpha.then(|| alpha_from_gene(*g.last().expect("alpha gene")));
        let label = "decoded";

        let scenario = match self.system {
            SystemKind::Local => {
                let rho = match self.mode {
                    StateMode::Pure => decode_pure(state_part).density(),
                    _ => decode_mixed(state_part, d)?,
                };
                let [b1, b2]: [OrthonormalBasis; 2] = bob.try_into().expect("two Bob bases");
                Scenario::Local(LocalScenario::new(rho, b1, b2, label)?)
            }
            SystemKind::Bipartite => {
                let (state, entangler) = match self.mode {
                    StateMode::Pure => (SharedState::Pure(decode_pure(state_part)), None),
                    StateMode::Mixed => (SharedState::Mixed(decode_mixed(state_part, d * d)?), None),
                    StateMode::MaxEntangled => {
                        let v = unitary_from_unit_vector(state_part)?;
                        (SharedState::Pure(maximally_entangled(d, &v)?), Some(v))
                    }
                };
                let s = MeasurementScenario::new(state, bases, bob, label)?;
                Scenario::Bipartite(match entangler {
                    Some(v) => s.with_entangler(v)?,
                    None => s,
                })
            }
        };
        Ok(DecodedScenario { scenario, alpha })
    }
}

fn amplitudes(genes: &[f64]) -> Vec<C64> {
    genes
        .chunks(2)
        .map(|p| C64::new(2.0 * p[0] - 1.0, 2.0 * p[1] - 1.0))
        .collect()
}

fn decode_pure(genes: &[f64]) -> PureState {
    let n = genes.len() / 2;
    PureState::normalized(amplitudes(genes)).unwrap_or_else(|_| PureState::basis(n, 0))
}

fn decode_mixed(genes: &[f64], n: usize) -> Result<DensityOperator> {
    let psi = decode_pure(genes);
    DensityOperator::from_purification(psi.amplitudes(), n, n)
}

/// Log-uniform map of `[0,1]` onto [`ALPHA_RANGE`].
pub fn alpha_from_gene(g: f64) -> RenyiOrder {
    let (lo, hi) = ALPHA_RANGE;
    RenyiOrder::Finite(lo * (hi / lo).powf(g.clamp(0.0, 1.0)))
}
