use mucorr_core::ga::{mutation_scale_update, run_search, GaConfig, Genome, SearchState, SearchTarget, StateMode};
use mucorr_core::relations::RelationId;

fn bumpy(g: &Genome) -> f64 {
    g.genes()
        .iter()
        .enumerate()
        .map(|(i, x)| (7.0 * x + i as f64).sin())
        .sum()
}

#[test]
fn elite_survives_verbatim_and_counts_hold() {
    let config = GaConfig {
        seed: 3,
        ..GaConfig::default()
    };
    assert_eq!((config.population_size, config.elite_count), (25, 3));
    let mut state = SearchState::new(config, 12, Vec::new(), &bumpy).unwrap();
    let mut best = state.best_ever().1;
    let mut scale = state.scale();
    for _ in 0..300 {
        let elite: Vec<Genome> = state.population()[..3].to_vec();
        let prev_best = state.best_ever().1;
        let log = state.step(&bumpy);
        assert_eq!(state.population().len(), 25);
        for e in &elite {
            assert!(state.population().contains(e), "elite organism lost");
        }
        assert!(state
            .population()
            .iter()
            .all(|g| g.genes().iter().all(|x| (0.0..=1.0).contains(x))));
        assert!(log.best_fitness >= best);
        best = log.best_fitness;
        let improved = state.fitness()[0] > prev_best + 1e-12;
        assert_eq!(state.scale(), mutation_scale_update(scale, improved));
        scale = state.scale();
    }
}

#[test]
fn serial_runs_are_bit_identical() {
    let config = GaConfig {
        seed: 11,
        generations: 200,
        ..GaConfig::default()
    };
    let run = || mucorr_core::ga::maximize(&config, 9, Vec::new(), bumpy).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a.log, b.log);
    assert_eq!(a.best, b.best);
    assert_eq!(a.best_fitness.to_bits(), b.best_fitness.to_bits());
}

#[test]
fn maassen_uffink_negative_control() {
    let target = SearchTarget::new(RelationId::MaassenUffink);
    for d in 2..=4 {
        let codec = target.codec(d, StateMode::Mixed).unwrap();
        let config = GaConfig {
            seed: d as u64,
            generations: 300,
            ..GaConfig::default()
        };
        let rec = run_search(&target, &config, &codec).unwrap();
        assert!(rec.best_fitness <= 1e-9, "d={d} fitness {}", rec.best_fitness);
    }
}

#[test]
fn search_finds_sum_sq_counterexample() {
    let target = SearchTarget::new(RelationId::SumSqBound);
    let codec = target.codec(3, StateMode::Pure).unwrap();
    let config = GaConfig {
        seed: 1,
        generations: 5000,
        ..GaConfig::default()
    };
    let rec = run_search(&target, &config, &codec).unwrap();
    assert!(rec.best_fitness >= 0.05, "best fitness {}", rec.best_fitness);
    assert!(rec.best_report.violated);
}
