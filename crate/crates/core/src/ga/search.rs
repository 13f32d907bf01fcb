//! Genetic search for violations of a relation.
//!
//! Fitness is `-slack`, so a positive best fitness is a violation. Degenerate
//! bounds and scenarios the relation cannot be evaluated on score `-∞`.

use serde::{Deserialize, Serialize};

use super::codec::{DecodedScenario, ScenarioCodec, StateMode, SystemKind};
use super::engine::{maximize, GaConfig, GenerationLog, Genome};
use crate::coefficients::OptimizerBudget;
use crate::error::{Error, Result};
use crate::infomeasures::RenyiOrder;
use crate::relations::{evaluate, EvalOptions, RelationId, RelationReport};
use crate::tol;

/// The relation to attack and the fixed parameters of its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchTarget {
    pub relation: RelationId,
    /// Fixed Rényi order; `None` lets the genome choose it.
    pub alpha: Option<RenyiOrder>,
    pub p: f64,
    pub budget: OptimizerBudget,
}

impl SearchTarget {
    pub fn new(relation: RelationId) -> Self {
        Self {
            relation,
            alpha: None,
            p: 0.5,
            budget: OptimizerBudget::default(),
        }
    }

    /// The codec this target is searched with by default in dimension `d`.
    pub fn codec(&self, dim: usize, mode: StateMode) -> Result<ScenarioCodec> {
        let r = self.relation;
        let codec = match r {
            RelationId::MaassenUffink | RelationId::RenyiMu => {
                let mode = if mode == StateMode::MaxEntangled {
                    StateMode::Mixed
                } else {
                    mode
                };
                ScenarioCodec::new(dim, SystemKind::Local, mode, 0)?
            }
            RelationId::StateDependent => ScenarioCodec::new(dim, SystemKind::Bipartite, StateMode::MaxEntangled, 2)?,
            _ if r.needs_two_alice_bases() => ScenarioCodec::new(dim, SystemKind::Bipartite, mode, 2)?,
            _ => ScenarioCodec::new(dim, SystemKind::Bipartite, mode, 1)?,
        };
        Ok(if r == RelationId::RenyiMu && self.alpha.is_none() {
            codec.with_free_alpha()
        } else {
            codec
        })
    }

    fn check(&self, codec: &ScenarioCodec) -> Result<()> {
        let r = self.relation;
        let incompatible = |why: &str| Err(Error::InvalidTarget(format!("relation `{r}` {why}")));
        if r == RelationId::RenyiMu && self.alpha.is_none() && !codec.free_alpha() {
            return incompatible("needs a fixed order or a codec with an order gene");
        }
        if codec.system() == SystemKind::Local && !matches!(r, RelationId::MaassenUffink | RelationId::RenyiMu) {
            return incompatible("needs a bipartite codec");
        }
        if r.needs_two_alice_bases() && codec.alice_bases() != 2 {
            return incompatible("needs two Alice bases");
        }
        if r == RelationId::StateDependent && codec.mode() != StateMode::MaxEntangled {
            return incompatible("needs maximally entangled states");
        }
        Ok(())
    }

    fn options(&self, decoded: &DecodedScenario, reverify: bool) -> EvalOptions {
        EvalOptions {
            alpha: decoded.alpha.or(self.alpha).unwrap_or(RenyiOrder::Infinity),
            p: self.p,
            budget: self.budget,
            reverify,
        }
    }

    /// Decodes `genome` and evaluates the target on it.
    pub fn report(
        &self,
        codec: &ScenarioCodec,
        genome: &Genome,
        reverify: bool,
    ) -> Result<(DecodedScenario, RelationReport)> {
        let decoded = codec.decode(genome)?;
        let report = evaluate(self.relation, &decoded.scenario, &self.options(&decoded, reverify))?;
        Ok((decoded, report))
    }

    fn fitness(&self, codec: &ScenarioCodec, genome: &Genome) -> f64 {
        let Ok((decoded, report)) = self.report(codec, genome, false) else {
            return f64::NEG_INFINITY;
        };
        let score = |r: &RelationReport| if r.degenerate { f64::NEG_INFINITY } else { -r.slack };
        let f = score(&report);
        // an apparent violation is re-scored at ten times the budget so an
        // underestimated coefficient cannot steer the search
        if f > tol::VIOLATION_OPTIMIZED && self.relation.is_optimized() {
            let wider = Self {
                budget: self.budget.scaled(10),
                ..self.clone()
            };
            return match evaluate(self.relation, &decoded.scenario, &wider.options(&decoded, false)) {
                Ok(r) => score(&r),
                Err(_) => f64::NEG_INFINITY,
            };
        }
        f
    }
}

#[derive(Debug, Clone)]
pub struct SearchRecord {
    pub target: SearchTarget,
    pub codec: ScenarioCodec,
    pub config: GaConfig,
    pub log: Vec<GenerationLog>,
    pub best_genome: Genome,
    pub best_fitness: f64,
    pub best_scenario: DecodedScenario,
    /// Direct re-evaluation of the best scenario, re-verified when the bound
    /// is optimized.
    pub best_report: RelationReport,
    pub evaluations: usize,
}

impl SearchRecord {
    pub fn violation_found(&self) -> bool {
        self.best_report.violated
    }
}

/// Maximizes `-slack` of `target` over scenarios decoded by `codec`.
pub fn run_search(target: &SearchTarget, config: &GaConfig, codec: &ScenarioCodec) -> Result<SearchRecord> {
    config.validate()?;
    target.budget.validate()?;
    target.check(codec)?;
    let outcome = maximize(config, codec.genome_len(), Vec::new(), |g: &Genome| {
        target.fitness(codec, g)
    })?;
    let (best_scenario, best_report) = target.report(codec, &outcome.best, true)?;
    Ok(SearchRecord {
        target: target.clone(),
        codec: codec.clone(),
        config: config.clone(),
        log: outcome.log,
        best_genome: outcome.best,
        best_fitness: outcome.best_fitness,
        best_scenario,
        best_report,
        evaluations: outcome.evaluations,
    })
}
