//! Acceptance criteria, one line of output each. Runs without the libtest
//! harness so the lines show even when output is captured.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use anyhow::{ensure, Context, Result};
use mucorr::ScenarioFile;
use mucorr_core::coefficients::{alignment_unitary, coeff_a, coeff_c, overlap_matrix, sum_sq};
use mucorr_core::ga::{
    maximize, mutation_scale_update, run_search, GaConfig, Genome, SearchState, SearchTarget, StateMode,
};
use mucorr_core::infomeasures::{outcome_distribution, renyi_entropy, shannon_entropy, ProbVector, RenyiOrder};
use mucorr_core::qcore::{
    maximally_entangled, random_unitary, unitary_from_unit_vector, DensityOperator, OrthonormalBasis, PureState,
    UnitaryOperator, C64,
};
use mucorr_core::relations::{
    eval_hall, eval_hall_special, eval_lemma1_bound, eval_maassen_uffink, eval_one_vs_two,
    eval_state_dependent_two_vs_two, evaluate, EvalOptions, RelationId, Scenario,
};
use mucorr_core::scenarios::{lemma1_family, lookup, random_ensemble, shared_eigenvector_family, theorem2_family};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mucorr(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mucorr"))
        .args(args)
        .current_dir(cwd)
        .env_remove("MUCORR_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Columns of the `PASS`/`FAIL` line for `check` in repro output.
fn repro_line<'a>(out: &'a str, check: &str) -> Option<&'a str> {
    out.lines().find(|l| {
        (l.starts_with("PASS") || l.starts_with("FAIL"))
            && l[4..].split(" expected ").next().map(str::trim) == Some(check)
    })
}

fn repro_actual(out: &str, check: &str) -> Result<String> {
    let line = repro_line(out, check).with_context(|| format!("no `{check}` line"))?;
    ensure!(line.starts_with("PASS"), "`{check}` failed: {line}");
    let words: Vec<&str> = line.split_whitespace().collect();
    let i = words.iter().position(|w| *w == "actual").context("no actual column")?;
    Ok(words[i + 1].to_string())
}

fn close(actual: &str, expected: f64, tol: f64) -> Result<()> {
    let a: f64 = actual.parse()?;
    ensure!(
        (a - expected).abs() <= tol,
        "{a} differs from {expected} by more than {tol}"
    );
    Ok(())
}

fn random_density(d: usize, rng: &mut ChaCha8Rng) -> DensityOperator {
    let rank = rng.random_range(1..=d);
    let amps: Vec<C64> = (0..d * rank)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let psi = PureState::normalized(amps).unwrap();
    DensityOperator::from_purification(psi.amplitudes(), d, rank).unwrap()
}

fn basis(d: usize, rng: &mut ChaCha8Rng) -> OrthonormalBasis {
    OrthonormalBasis::from_unitary(&random_unitary(d, rng))
}

fn counterexample() -> Result<String> {
    let dir = tempfile::tempdir()?;
    let t = Instant::now();
    let o = mucorr(&["repro", "--id", "example_sec4"], dir.path());
    let secs = t.elapsed().as_secs_f64();
    ensure!(o.status.code() == Some(0), "exit {:?}", o.status.code());
    let out = stdout(&o);
    close(&repro_actual(&out, "sum-sq-bound.lhs")?, 2.0, 1e-9)?;
    close(&repro_actual(&out, "sum-sq-bound.rhs")?, (15.0f64 / 4.0).log2(), 1e-9)?;
    ensure!(repro_actual(&out, "sum-sq-bound.violated")? == "true");
    close(&repro_actual(&out, "one-vs-two.rhs")?, 4.5f64.log2(), 1e-9)?;
    ensure!(repro_actual(&out, "one-vs-two.violated")? == "false");

    // the same numbers straight from the library, at full precision
    let named = lookup("example_sec4").context("alias")?;
    let opts = EvalOptions::default();
    let sq = evaluate(RelationId::SumSqBound, &named.scenario, &opts)?;
    let one = evaluate(RelationId::OneVsTwo, &named.scenario, &opts)?;
    ensure!((sq.lhs - 2.0).abs() <= 1e-9 && (sq.rhs - (15.0f64 / 4.0).log2()).abs() <= 1e-9 && sq.violated);
    ensure!((one.rhs - 4.5f64.log2()).abs() <= 1e-9 && !one.violated);
    ensure!(secs < 1.0, "took {secs:.3}s");
    Ok(format!(
        "lhs {:.6}, rhs {:.6}, slack {:.6}; other rhs {:.6} holds; {secs:.3}s",
        sq.lhs, sq.rhs, sq.slack, one.rhs
    ))
}

fn nonmaximal_value() -> Result<String> {
    let dir = tempfile::tempdir()?;
    let t = Instant::now();
    let o = mucorr(&["repro", "--id", "nonmaximal_xz"], dir.path());
    let secs = t.elapsed().as_secs_f64();
    ensure!(o.status.code() == Some(0), "exit {:?}", o.status.code());
    let out = stdout(&o);
    let weak = repro_actual(&out, "I(A:B)")?;
    close(&weak, 0.049, 0.001)?;
    let phi = repro_actual(&out, "I(A:B) on |Φ⁺⟩")?;
    close(&phi, 0.0, 1e-9)?;
    ensure!(secs < 1.0, "took {secs:.3}s");
    Ok(format!("I = {weak} on the weak state, {phi} on |Φ⁺⟩; {secs:.3}s"))
}

fn shared_eigenvector() -> Result<String> {
    let opts = EvalOptions::default();
    for d in 3..=8 {
        let s = shared_eigenvector_family(d)?;
        let m = s.measurement().context("bipartite")?;
        let c = coeff_c(&overlap_matrix(&m.bob_bases()[0], &m.bob_bases()[1])?);
        ensure!((c - 2.0).abs() <= 1e-12, "d={d}: c = {c}");
        let ld = (d as f64).log2();
        let one = evaluate(RelationId::OneVsTwo, &s.scenario, &opts)?;
        let hall = evaluate(RelationId::Hall, &s.scenario, &opts)?;
        ensure!(
            (one.rhs - (ld + 1.0)).abs() <= 1e-12,
            "d={d}: one-vs-two rhs {}",
            one.rhs
        );
        ensure!((hall.rhs - 2.0 * ld).abs() <= 1e-12, "d={d}: hall rhs {}", hall.rhs);
        let gap = hall.rhs - one.rhs;
        ensure!((gap - (ld - 1.0)).abs() <= 1e-12 && gap > 0.0, "d={d}: gap {gap}");
    }
    Ok("c = 2 and gap log d - 1 > 0 for d = 3..8".into())
}

fn theorem_suites() -> Result<String> {
    const TRIALS: u64 = 1000;
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = [f64::INFINITY; 6];
    for _ in 0..TRIALS {
        let d = rng.random_range(2..=4);
        let rho = random_density(d, &mut rng);
        worst[0] = worst[0].min(eval_maassen_uffink(&rho, &basis(d, &mut rng), &basis(d, &mut rng))?.slack);
    }
    for seed in 0..TRIALS {
        let d = 2 + (seed % 3) as usize;
        worst[1] = worst[1].min(eval_hall(&random_ensemble(d, 1 + (seed % 4) as usize, seed)?)?.slack);
        let s = lemma1_family(d, seed, seed % 2 == 0)?;
        let m = s.measurement().context("bipartite")?;
        worst[2] = worst[2].min(eval_lemma1_bound(m)?.slack);
        worst[3] = worst[3].min(eval_one_vs_two(m)?.slack);
        worst[4] = worst[4].min(eval_hall_special(m)?.slack);
        let s = theorem2_family(d, seed)?;
        let m = s.measurement().context("bipartite")?;
        worst[5] = worst[5].min(eval_state_dependent_two_vs_two(m, m.entangler().context("entangler")?)?.slack);
    }
    let names = [
        "maassen-uffink",
        "hall",
        "sum-sq-bound",
        "one-vs-two",
        "hall-special",
        "state-dependent",
    ];
    for (n, w) in names.iter().zip(worst) {
        ensure!(w >= -1e-9, "{n}: worst slack {w}");
    }
    let secs = t.elapsed().as_secs_f64();
    ensure!(secs < 300.0, "took {secs:.1}s");
    let min = worst.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(format!("6 x {TRIALS} trials, smallest slack {min:.3e}; {secs:.1}s"))
}

fn no_violation_sweeps() -> Result<String> {
    let t = Instant::now();
    let mut parts = Vec::new();
    for (relation, dims) in [(RelationId::OneVsTwo, 2..=4), (RelationId::TwoVsTwo, 2..=3)] {
        for d in dims {
            let target = SearchTarget::new(relation);
            let codec = target.codec(d, StateMode::Pure)?;
            let config = GaConfig {
                population_size: 25,
                elite_count: 3,
                generations: 2000,
                seed: 7,
                ..GaConfig::default()
            };
            let rec = run_search(&target, &config, &codec)?;
            ensure!(
                rec.best_fitness <= 1e-6,
                "{relation} d={d}: best fitness {}",
                rec.best_fitness
            );
            ensure!(!rec.best_report.violated, "{relation} d={d}: best scenario violates");
            parts.push(format!("{relation} d={d} {:.2e}", rec.best_fitness));
        }
    }

    let dir = tempfile::tempdir()?;
    let o = mucorr(
        &[
            "sweep",
            "--relation",
            "exotic",
            "--dim",
            "2..8",
            "--p",
            "0.5",
            "--method",
            "random",
            "--samples",
            "10000",
            "--seed",
            "1",
            "--out",
            "o",
        ],
        dir.path(),
    );
    ensure!(
        o.status.code() == Some(0),
        "exotic sweep exit {:?}: {}",
        o.status.code(),
        stdout(&o)
    );
    let mut r = csv::Reader::from_path(dir.path().join("o/sweep.csv"))?;
    let h = r.headers()?.clone();
    let col = |name: &str| h.iter().position(|x| x == name).context("column");
    let (dim_c, slack_c, eff_c) = (col("dim")?, col("min_slack")?, col("effort")?);
    let mut dims = Vec::new();
    let mut worst = f64::INFINITY;
    for rec in r.records() {
        let rec = rec?;
        ensure!(&rec[eff_c] == "10000");
        let s: f64 = rec[slack_c].parse()?;
        ensure!(s >= -1e-6, "exotic d={}: min slack {s}", &rec[dim_c]);
        worst = worst.min(s);
        dims.push(rec[dim_c].parse::<usize>()?);
    }
    ensure!(dims == (2..=8).collect::<Vec<_>>(), "dims {dims:?}");
    let secs = t.elapsed().as_secs_f64();
    ensure!(secs < 1800.0, "took {secs:.0}s");
    Ok(format!(
        "best fitness {}; exotic 10^4 per d for d=2..8, min slack {worst:.3e}; {secs:.0}s",
        parts.join(", ")
    ))
}

fn renyi_falsification() -> Result<String> {
    let dir = tempfile::tempdir()?;
    let d = dir.path();
    let o = mucorr(
        &[
            "search",
            "--relation",
            "renyi-mu",
            "--dim",
            "3",
            "--seed",
            "1",
            "--generations",
            "2000",
            "--out",
            "s",
        ],
        d,
    );
    ensure!(
        o.status.code() == Some(2),
        "search exit {:?}: {}",
        o.status.code(),
        stdout(&o)
    );
    let path = d.join("s/best_renyi-mu_d3_s1.json");
    let file = ScenarioFile::load(&path)?;
    let alpha = file.alpha()?.context("witness carries its order")?;
    let RenyiOrder::Finite(a) = alpha else {
        anyhow::bail!("order is infinite")
    };
    ensure!(a.is_finite() && a > 0.0);

    // direct evaluation, independent of the relation code
    let Scenario::Local(s) = file.build()? else {
        anyhow::bail!("expected a single-system scenario")
    };
    let lhs = shannon_entropy(&outcome_distribution(&s.state, &s.bases[0])?)
        + shannon_entropy(&outcome_distribution(&s.state, &s.bases[1])?);
    let c = overlap_matrix(&s.bases[0], &s.bases[1])?;
    let mut rhs = f64::INFINITY;
    for i in 0..c.dim() {
        rhs = rhs.min(renyi_entropy(&ProbVector::new(c.row(i).to_vec())?, alpha)?);
        rhs = rhs.min(renyi_entropy(&ProbVector::new(c.column(i))?, alpha)?);
    }
    let slack = lhs - rhs;
    ensure!(slack < -1e-4, "direct slack {slack}");

    // the CLI check of the emitted file reproduces the logged row
    let o = mucorr(
        &[
            "check",
            "--scenario",
            path.to_str().context("utf-8 path")?,
            "--out",
            "c",
        ],
        d,
    );
    ensure!(o.status.code() == Some(2), "check exit {:?}", o.status.code());
    let row = |p: &Path| -> Result<(f64, f64)> {
        let mut r = csv::Reader::from_path(p)?;
        let h = r.headers()?.clone();
        let rec = r.records().next().context("one row")??;
        let get = |n: &str| -> Result<f64> { Ok(rec[h.iter().position(|x| x == n).context("column")?].parse()?) };
        Ok((get("lhs")?, get("rhs")?))
    };
    let (sl, sr) = row(&d.join("s/results.csv"))?;
    let (cl, cr) = row(&d.join("c/results.csv"))?;
    ensure!(
        (sl - cl).abs() <= 1e-9 && (sr - cr).abs() <= 1e-9,
        "search ({sl}, {sr}) vs check ({cl}, {cr})"
    );
    ensure!(
        (lhs - cl).abs() <= 1e-9 && (rhs - cr).abs() <= 1e-9,
        "direct ({lhs}, {rhs}) vs check ({cl}, {cr})"
    );
    Ok(format!(
        "d=3, alpha={a:.4}: lhs {lhs:.6}, rhs {rhs:.6}, slack {slack:.6}; re-check identical"
    ))
}

fn ga_mechanics() -> Result<String> {
    ensure!((mutation_scale_update(0.5, true) - 0.55).abs() < 1e-15);
    ensure!(mutation_scale_update(0.95, true) == 1.0);
    ensure!((mutation_scale_update(0.5, false) - 0.5 / 1.05).abs() < 1e-15);
    ensure!(mutation_scale_update(1.02e-9, false) == 1.0);

    let fitness = |g: &Genome| {
        g.genes()
            .iter()
            .enumerate()
            .map(|(i, x)| (5.0 * x + i as f64).cos())
            .sum::<f64>()
    };
    let config = GaConfig {
        seed: 17,
        ..GaConfig::default()
    };
    ensure!(config.population_size == 25 && config.elite_count == 3);
    let mut state = SearchState::new(config.clone(), 10, Vec::new(), &fitness)?;
    for _ in 0..200 {
        let elite = state.population()[..3].to_vec();
        state.step(&fitness);
        ensure!(state.population().len() == 25);
        ensure!(
            elite.iter().all(|e| state.population().contains(e)),
            "elite lost at generation {}",
            state.generation()
        );
    }
    let serial = GaConfig {
        generations: 300,
        parallel: false,
        ..config
    };
    let (a, b) = (
        maximize(&serial, 10, Vec::new(), fitness)?,
        maximize(&serial, 10, Vec::new(), fitness)?,
    );
    ensure!(a.log == b.log && a.best == b.best && a.best_fitness.to_bits() == b.best_fitness.to_bits());
    Ok("three scale branches, elite of 3 in 25 kept for 200 generations, two serial runs identical".into())
}

fn invariant_battery() -> Result<String> {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for _ in 0..1000 {
        let d = rng.random_range(2..=6);
        let c = overlap_matrix(&basis(d, &mut rng), &basis(d, &mut rng))?;
        ensure!(c.bistochastic_deviation() <= 1e-9);
        let (sq, cc) = (sum_sq(&c), coeff_c(&c));
        ensure!(sq <= cc + 1e-10 && cc <= d as f64 + 1e-12, "chain: {sq} {cc} {d}");
        ensure!(coeff_a(&c) <= 1.0 + 1e-12);
    }
    for _ in 0..1000 {
        let d = rng.random_range(2..=5);
        let u = random_unitary(d, &mut rng);
        let phi = maximally_entangled(d, &UnitaryOperator::identity(d))?;
        let out = u.kron(&u.conj()).apply(&phi);
        let diff = out
            .amplitudes()
            .iter()
            .zip(phi.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        ensure!(diff <= 1e-10, "U⊗U* moved |Φ⁺⟩ by {diff}");
        let (a1, a2) = (basis(d, &mut rng), basis(d, &mut rng));
        let al = alignment_unitary(&a1, &a2)?;
        for k in 0..d {
            let back = al.dagger().apply(&a2.vector(k));
            let err = back
                .amplitudes()
                .iter()
                .zip(a1.vector(k).amplitudes())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            ensure!(err <= 1e-10, "alignment error {err}");
        }
    }
    for _ in 0..10_000 {
        let d = rng.random_range(1..=6);
        let x: Vec<f64> = (0..d * d).map(|_| rng.random()).collect();
        let e = unitary_from_unit_vector(&x)?.matrix().unitarity_error();
        ensure!(e <= 1e-8, "unitarity error {e}");
    }
    let secs = t.elapsed().as_secs_f64();
    ensure!(secs < 120.0, "took {secs:.1}s");
    Ok(format!("all invariants within tolerance; {secs:.2}s"))
}

type Criterion = (u32, &'static str, fn() -> Result<String>);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "sum-of-squares counterexample", counterexample),
        (2, "nonmaximal X+Z / X-Z value", nonmaximal_value),
        (3, "shared-eigenvector family", shared_eigenvector),
        (4, "proved-relation batteries", theorem_suites),
        (5, "no-violation searches", no_violation_sweeps),
        (6, "Rényi falsification", renyi_falsification),
        (7, "GA mechanics", ga_mechanics),
        (8, "algebraic invariants", invariant_battery),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let total = Instant::now();
    for (n, name, f) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f));
        let secs = Duration::as_secs_f64(&t.elapsed());
        match outcome {
            Ok(Ok(detail)) => println!("[PASS] criterion {n}: {name} ({detail}) [{secs:.1}s]"),
            Ok(Err(e)) => {
                failed += 1;
                println!("[FAIL] criterion {n}: {name}: {e:#} [{secs:.1}s]");
            }
            Err(_) => {
                failed += 1;
                println!("[FAIL] criterion {n}: {name}: panicked [{secs:.1}s]");
            }
        }
    }
    println!(
        "acceptance: {failed} failed, total {:.0}s",
        total.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
