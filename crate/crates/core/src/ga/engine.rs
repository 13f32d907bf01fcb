//! Real-coded genetic algorithm with elitism and mutation scaling.
//!
//! Organisms are vectors in `[0,1]^n`. Each generation keeps the elite
//! unchanged, fills the remaining slots with offspring of binary-tournament
//! parents (uniform swap crossover, then additive mutation `s(1-2r)`), and
//! adapts the mutation scale `s`: ×1.1 capped at 1 after an improving
//! generation, ÷1.05 otherwise, and back to 1 once it falls below the floor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// Real vector with every gene in `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genome(Vec<f64>);

impl Genome {
    /// Clamps every gene into `[0,1]`; NaN becomes 0.
    pub fn new(genes: Vec<f64>) -> Self {
        Self(genes.into_iter().map(clamp01).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self((0..len).map(|_| rng.random::<f64>()).collect())
    }

    pub fn genes(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn clamp01(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub elite_count: usize,
    pub generations: usize,
    pub seed: u64,
    /// Probability that a given gene is mutated.
    pub mutation_rate: f64,
    /// Probability that a parent pair is recombined rather than copied.
    pub crossover_rate: f64,
    pub scale_floor: f64,
    pub scale_up: f64,
    pub scale_down: f64,
    /// Evaluate fitness of a generation in parallel. Results are identical
    /// to the serial schedule.
    pub parallel: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 25,
            elite_count: 3,
            generations: 2000,
            seed: 0,
            mutation_rate: 0.1,
            crossover_rate: 0.7,
            scale_floor: 1e-9,
            scale_up: 1.1,
            scale_down: 1.05,
            parallel: false,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidConfig(
                "population must hold at least two organisms".into(),
            ));
        }
        if self.elite_count >= self.population_size {
            return Err(Error::InvalidConfig(format!(
                "elite count {} must be below population size {}",
                self.elite_count, self.population_size
            )));
        }
        for (name, rate) in [
            ("mutation rate", self.mutation_rate),
            ("crossover rate", self.crossover_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::InvalidConfig(format!("{name} {rate} outside [0,1]")));
            }
        }
        if !(self.scale_floor > 0.0 && self.scale_up >= 1.0 && self.scale_down > 1.0) {
            return Err(Error::InvalidConfig("mutation scaling constants out of range".into()));
        }
        Ok(())
    }

    pub fn next_scale(&self, s: f64, improved: bool) -> f64 {
        let next = if improved {
            (self.scale_up * s).min(1.0)
        } else {
            s / self.scale_down
        };
        if next < self.scale_floor {
            1.0
        } else {
            next
        }
    }
}

/// Mutation scale after a generation: `min(1, 1.1 s)` if it improved on the
/// best organism, `s / 1.05` otherwise, reset to 1 below `1e-9`.
pub fn mutation_scale_update(s: f64, improved: bool) -> f64 {
    GaConfig::default().next_scale(s, improved)
}

/// Adds `s(1-2r)` to each gene selected with probability `rate`, with a
/// fresh uniform `r` per selected gene, then clamps to `[0,1]`.
pub fn mutate<R: Rng + ?Sized>(genome: &Genome, s: f64, rate: f64, rng: &mut R) -> Genome {
    let genes = genome
        .0
        .iter()
        .map(|&g| {
            if rng.random::<f64>() < rate {
                let r: f64 = rng.random();
                clamp01(g + s * (1.0 - 2.0 * r))
            } else {
                g
            }
        })
        .collect();
    Genome(genes)
}

/// Swaps each position between the parents with probability 1/2.
pub fn crossover<R: Rng + ?Sized>(a: &Genome, b: &Genome, rng: &mut R) -> Result<(Genome, Genome)> {
    if a.len() != b.len() {
        return Err(Error::WrongLength {
            expected: a.len(),
            found: b.len(),
        });
    }
    let mut x = a.0.clone();
    let mut y = b.0.clone();
    for i in 0..x.len() {
        if rng.random::<bool>() {
            std::mem::swap(&mut x[i], &mut y[i]);
        }
    }
    Ok((Genome(x), Genome(y)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub generation: usize,
    pub best_fitness: f64,
    pub scale: f64,
}

fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::NEG_INFINITY
    } else {
        f
    }
}

/// Population, fitnesses and adaptive state of a running search. The
/// population is kept sorted by descending fitness.
#[derive(Debug, Clone)]
pub struct SearchState {
    config: GaConfig,
    population: Vec<Genome>,
    fitness: Vec<f64>,
    best_ever: (Genome, f64),
    scale: f64,
    generation: usize,
    evaluations: usize,
    rng: ChaCha8Rng,
}

impl SearchState {
    /// Seeds occupy the first slots of the initial population; the rest is
    /// uniform random.
    pub fn new<F>(config: GaConfig, genome_len: usize, seeds: Vec<Genome>, fitness: &F) -> Result<Self>
    where
        F: Fn(&Genome) -> f64 + Sync,
    {
        config.validate()?;
        if let Some(bad) = seeds.iter().find(|g| g.len() != genome_len) {
            return Err(Error::WrongLength {
                expected: genome_len,
                found: bad.len(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut population: Vec<Genome> = seeds.into_iter().take(config.population_size).collect();
        while population.len() < config.population_size {
            population.push(Genome::random(genome_len, &mut rng));
        }
        let scores = evaluate(&config, &population, fitness);
        let mut state = Self {
            evaluations: population.len(),
            best_ever: (population[0].clone(), f64::NEG_INFINITY),
            config,
            population,
            fitness: scores,
            scale: 1.0,
            generation: 0,
            rng,
        };
        state.sort();
        state.best_ever = (state.population[0].clone(), state.fitness[0]);
        Ok(state)
    }

    fn sort(&mut self) {
        let mut order: Vec<usize> = (0..self.population.len()).collect();
        // stable: ties keep their slot order
        order.sort_by(|&a, &b| self.fitness[b].total_cmp(&self.fitness[a]));
        self.population = order.iter().map(|&i| self.population[i].clone()).collect();
        self.fitness = order.iter().map(|&i| self.fitness[i]).collect();
    }

    fn tournament(&mut self) -> usize {
        let n = self.population.len();
        let a = self.rng.random_range(0..n);
        let b = self.rng.random_range(0..n);
        if self.fitness[a] >= self.fitness[b] {
            a
        } else {
            b
        }
    }

    /// Breeds, evaluates and ranks one generation, then updates the scale.
    pub fn step<F>(&mut self, fitness: &F) -> GenerationLog
    where
        F: Fn(&Genome) -> f64 + Sync,
    {
        let cfg = self.config.clone();
        let elite = cfg.elite_count;
        let mut children = Vec::with_capacity(cfg.population_size - elite);
        while children.len() < cfg.population_size - elite {
            let pa = self.tournament();
            let pb = self.tournament();
            let (mut x, mut y) = if self.rng.random::<f64>() < cfg.crossover_rate {
                crossover(&self.population[pa], &self.population[pb], &mut self.rng)
                    .expect("population genomes share a length")
            } else {
                (self.population[pa].clone(), self.population[pb].clone())
            };
            x = mutate(&x, self.scale, cfg.mutation_rate, &mut self.rng);
            children.push(x);
            if children.len() < cfg.population_size - elite {
                y = mutate(&y, self.scale, cfg.mutation_rate, &mut self.rng);
                children.push(y);
            }
        }
        let scores = evaluate(&cfg, &children, fitness);
        self.evaluations += children.len();
        self.population.truncate(elite);
        self.fitness.truncate(elite);
        self.population.extend(children);
        self.fitness.extend(scores);
        self.sort();

        let improved = self.fitness[0] > self.best_ever.1 + tol::IMPROVEMENT;
        if improved {
            self.best_ever = (self.population[0].clone(), self.fitness[0]);
        }
        self.scale = cfg.next_scale(self.scale, improved);
        self.generation += 1;
        GenerationLog {
            generation: self.generation,
            best_fitness: self.best_ever.1,
            scale: self.scale,
        }
    }

    pub fn population(&self) -> &[Genome] {
        &self.population
    }

    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn best_ever(&self) -> (&Genome, f64) {
        (&self.best_ever.0, self.best_ever.1)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn config(&self) -> &GaConfig {
        &self.config
    }
}

fn evaluate<F>(config: &GaConfig, genomes: &[Genome], fitness: &F) -> Vec<f64>
where
    F: Fn(&Genome) -> f64 + Sync,
{
    if config.parallel {
        genomes.par_iter().map(|g| sanitize(fitness(g))).collect()
    } else {
        genomes.iter().map(|g| sanitize(fitness(g))).collect()
    }
}

#[derive(Debug, Clone)]
pub struct GaOutcome {
    pub best: Genome,
    pub best_fitness: f64,
    pub log: Vec<GenerationLog>,
    pub evaluations: usize,
}

/// Runs `config.generations` generations maximizing `fitness`.
pub fn maximize<F>(config: &GaConfig, genome_len: usize, seeds: Vec<Genome>, fitness: F) -> Result<GaOutcome>
where
    F: Fn(&Genome) -> f64 + Sync,
{
    let mut state = SearchState::new(config.clone(), genome_len, seeds, &fitness)?;
    let mut log = Vec::with_capacity(config.generations);
    for _ in 0..config.generations {
        log.push(state.step(&fitness));
    }
    let (best, best_fitness) = state.best_ever();
    Ok(GaOutcome {
        best: best.clone(),
        best_fitness,
        log,
        evaluations: state.evaluations(),
    })
}
