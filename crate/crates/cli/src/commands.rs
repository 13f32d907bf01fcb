use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use mucorr_core::coefficients::OptimizerBudget;
use mucorr_core::ga::{run_search, GaConfig, Genome, ScenarioCodec, SearchRecord, SearchTarget};
use mucorr_core::infomeasures::RenyiOrder;
use mucorr_core::relations::{evaluate, EvalOptions, RelationId, RelationReport};
use mucorr_core::scenarios::{lookup, registry, NamedScenario, ALIASES};
use mucorr_core::Error as CoreError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{append_csv, append_jsonl, fmt_num, out_dir, print_reports, ResultRow};
use crate::scenario_file::{AlphaSpec, ScenarioFile};
use crate::{parse_dims, parse_list, CheckArgs, GaArgs, ReproArgs, SearchArgs, SweepArgs, SweepMethod};
use crate::{EXIT_OK, EXIT_VIOLATED};

const DEFAULT_OUT: &str = "mucorr-out";

fn exit_for(violated: bool) -> i32 {
    if violated {
        EXIT_VIOLATED
    } else {
        EXIT_OK
    }
}

fn write_reports(dir: &Path, reports: &[RelationReport], seed: Option<u64>, secs: &[f64]) -> Result<()> {
    let rows: Vec<ResultRow> = reports
        .iter()
        .zip(secs)
        .map(|(r, &t)| ResultRow::from_report(r, seed, None, t))
        .collect();
    append_csv(&dir.join("results.csv"), &rows)?;
    append_jsonl(&dir.join("reports.jsonl"), reports)
}

/// Relations a scenario cannot supply are skipped when none were requested.
fn unsupported(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::IncompatibleScenario(_) | CoreError::NotMaximallyEntangled(_)
    )
}

pub fn check(args: &CheckArgs) -> Result<i32> {
    let file = ScenarioFile::load(&args.scenario)?;
    let scenario = file
        .build()
        .with_context(|| format!("in {}", args.scenario.display()))?;
    let mut budget = args.budget.apply(file.budget.unwrap_or_default());
    if let Some(seed) = args.seed {
        budget.seed = seed;
    }
    budget.validate()?;
    let opts = EvalOptions {
        alpha: match args.alpha {
            Some(a) => a,
            None => file.alpha()?.unwrap_or(EvalOptions::default().alpha),
        },
        p: args.p.or(file.p).unwrap_or(EvalOptions::default().p),
        budget,
        reverify: true,
    };
    let requested = if !args.relation.is_empty() {
        args.relation.clone()
    } else {
        file.relations.clone()
    };
    let explicit = !requested.is_empty();
    let relations = if explicit { requested } else { RelationId::ALL.to_vec() };

    let mut reports = Vec::new();
    let mut secs = Vec::new();
    for r in relations {
        let t = Instant::now();
        match evaluate(r, &scenario, &opts) {
            Ok(rep) => {
                reports.push(rep);
                secs.push(t.elapsed().as_secs_f64());
            }
            Err(e) if !explicit && unsupported(&e) => {}
            Err(e) => return Err(anyhow!("{r}: {e}")),
        }
    }
    if reports.is_empty() {
        bail!("no relation applies to this scenario");
    }
    print_reports(&reports);
    if let Some(dir) = out_dir(args.out.as_deref(), None) {
        write_reports(&dir, &reports, Some(budget.seed), &secs)?;
    }
    Ok(exit_for(reports.iter().any(|r| r.violated)))
}

pub fn repro(args: &ReproArgs) -> Result<i32> {
    let scenarios: Vec<NamedScenario> = match &args.id {
        Some(id) => vec![lookup(id).ok_or_else(|| {
            let mut known: Vec<String> = registry().into_iter().map(|s| s.id).collect();
            known.extend(ALIASES.iter().map(|(a, _)| a.to_string()));
            anyhow!("unknown scenario id `{id}`; known: {}", known.join(", "))
        })?],
        None => registry(),
    };
    let mut budget = args.budget.apply(OptimizerBudget::default());
    if let Some(seed) = args.seed {
        budget.seed = seed;
    }
    budget.validate()?;
    let opts = EvalOptions {
        budget,
        ..EvalOptions::default()
    };

    if let (Some(path), [named]) = (&args.export, scenarios.as_slice()) {
        let mut file = ScenarioFile::from_scenario(&named.scenario);
        file.relations = named.relations();
        file.save(path)?;
        println!("wrote {}", path.display());
    }

    let dir = out_dir(args.out.as_deref(), None);
    let mut all_passed = true;
    for named in &scenarios {
        let t = Instant::now();
        let result = named.run(&opts).with_context(|| format!("scenario `{}`", named.id))?;
        let secs = t.elapsed().as_secs_f64();
        println!("== {}: {}", named.id, named.description);
        print_reports(&result.reports);
        for o in &result.outcomes {
            println!(
                "{}  {:<40} expected {:>14}  actual {:>14}  tol {:e}  [{}]",
                if o.passed { "PASS" } else { "FAIL" },
                o.check,
                o.expected.to_string(),
                o.actual.to_string(),
                o.tolerance,
                if matches!(o.provenance, mucorr_core::scenarios::Provenance::Reported) {
                    "reported"
                } else {
                    "computed"
                }
            );
        }
        for n in &named.notes {
            println!("note: {n}");
        }
        all_passed &= result.passed();
        if let Some(dir) = &dir {
            let per = vec![secs / result.reports.len().max(1) as f64; result.reports.len()];
            write_reports(dir, &result.reports, Some(budget.seed), &per)?;
            append_jsonl(&dir.join("checks.jsonl"), &result.outcomes)?;
        }
    }
    println!(
        "{}",
        if all_passed {
            "all checks passed"
        } else {
            "some checks FAILED"
        }
    );
    Ok(exit_for(!all_passed))
}

#[derive(Debug, Clone, Serialize)]
pub struct LogRow {
    pub relation: String,
    pub dim: usize,
    pub param: Option<f64>,
    pub seed: u64,
    pub generation: usize,
    pub best_fitness: f64,
    pub scale: f64,
}

/// Full record of a search, one JSON line per search.
#[derive(Debug, Serialize)]
pub struct Witness<'a> {
    pub relation: RelationId,
    pub dim: usize,
    pub seed: u64,
    /// Scenario file name, relative to the output directory.
    pub scenario_file: Option<String>,
    pub best_fitness: f64,
    pub alpha: Option<RenyiOrder>,
    pub config: Option<&'a GaConfig>,
    pub codec: &'a ScenarioCodec,
    pub genome: &'a Genome,
    pub report: &'a RelationReport,
}

fn ga_config(ga: &GaArgs, seed: u64) -> GaConfig {
    GaConfig {
        population_size: ga.population,
        elite_count: ga.elite,
        generations: ga.generations,
        seed,
        parallel: !ga.serial,
        ..GaConfig::default()
    }
}

fn target_for(relation: RelationId, alpha: Option<RenyiOrder>, p: f64, ga: &GaArgs) -> SearchTarget {
    let budget = ga.budget.apply(OptimizerBudget {
        seed: ga.seed,
        ..OptimizerBudget::default()
    });
    SearchTarget {
        relation,
        alpha,
        p,
        budget,
    }
}

/// The best scenario of a search as a file `check` reproduces exactly.
pub fn witness_file(
    target: &SearchTarget,
    scenario_alpha: Option<RenyiOrder>,
    rec_scenario: &mucorr_core::relations::Scenario,
    label: String,
) -> ScenarioFile {
    let mut f = ScenarioFile::from_scenario(rec_scenario);
    let r = target.relation;
    f.label = label;
    f.relations = vec![r];
    if r == RelationId::RenyiMu {
        f.alpha = Some(AlphaSpec::from_order(
            scenario_alpha.or(target.alpha).unwrap_or(RenyiOrder::Infinity),
        ));
    }
    if r == RelationId::Exotic {
        f.p = Some(target.p);
    }
    if r.is_optimized() {
        f.budget = Some(target.budget);
    }
    f
}

fn search_outputs(dir: &Path, rec: &SearchRecord, param: Option<f64>, secs: f64) -> Result<PathBuf> {
    let t = &rec.target;
    let (r, d, seed) = (t.relation, rec.codec.dim(), rec.config.seed);
    let log: Vec<LogRow> = rec
        .log
        .iter()
        .map(|l| LogRow {
            relation: r.to_string(),
            dim: d,
            param,
            seed,
            generation: l.generation,
            best_fitness: l.best_fitness,
            scale: l.scale,
        })
        .collect();
    append_csv(&dir.join("search_log.csv"), &log)?;
    append_csv(
        &dir.join("results.csv"),
        &[ResultRow::from_report(
            &rec.best_report,
            Some(seed),
            Some(rec.config.generations),
            secs,
        )],
    )?;
    let suffix = param.map(|p| format!("_p{p}")).unwrap_or_default();
    let path = dir.join(format!("best_{r}_d{d}{suffix}_s{seed}.json"));
    witness_file(
        t,
        rec.best_scenario.alpha,
        &rec.best_scenario.scenario,
        format!("best {r} d={d} seed={seed}"),
    )
    .save(&path)?;
    append_jsonl(
        &dir.join("witness.jsonl"),
        &[Witness {
            relation: r,
            dim: d,
            seed,
            scenario_file: path.file_name().map(|n| n.to_string_lossy().into_owned()),
            best_fitness: rec.best_fitness,
            alpha: rec.best_scenario.alpha,
            config: Some(&rec.config),
            codec: &rec.codec,
            genome: &rec.best_genome,
            report: &rec.best_report,
        }],
    )?;
    Ok(path)
}

pub fn search(args: &SearchArgs) -> Result<i32> {
    let dims = parse_dims(&args.dim)?;
    let dir = out_dir(args.ga.out.as_deref(), Some(DEFAULT_OUT)).expect("fallback given");
    let target = target_for(args.relation, args.alpha, args.p, &args.ga);
    let mut violated = false;
    for d in dims {
        let codec = target.codec(d, args.ga.mode)?;
        let config = ga_config(&args.ga, args.ga.seed);
        let t = Instant::now();
        let rec = run_search(&target, &config, &codec)?;
        let secs = t.elapsed().as_secs_f64();
        let path = search_outputs(&dir, &rec, None, secs)?;
        let r = &rec.best_report;
        println!(
            "{} d={} seed={} best fitness {} lhs {} rhs {} slack {} violated {}{} -> {}",
            args.relation,
            d,
            args.ga.seed,
            fmt_num(rec.best_fitness),
            fmt_num(r.lhs),
            fmt_num(r.rhs),
            fmt_num(r.slack),
            r.violated,
            rec.best_scenario
                .alpha
                .map(|a| format!(" alpha {a}"))
                .unwrap_or_default(),
            path.display()
        );
        violated |= r.violated;
    }
    Ok(exit_for(violated))
}

/// One grid cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub relation: RelationId,
    pub dim: usize,
    /// Fixed Rényi order or exponent `p`; `None` for a free order or no parameter.
    pub param: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub relation: String,
    pub dim: usize,
    pub param: Option<f64>,
    pub method: String,
    /// Generations for a search, scenarios for random sampling.
    pub effort: usize,
    pub min_slack: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
    pub degenerate: usize,
    pub seed: u64,
    pub wall_time_s: f64,
}

pub struct CellResult {
    pub cell: Cell,
    pub row: SweepRow,
    pub report: RelationReport,
    pub log: Vec<LogRow>,
    pub scenario: ScenarioFile,
    pub genome: Genome,
    pub codec: ScenarioCodec,
}

pub fn sweep_cells(args: &SweepArgs) -> Result<Vec<Cell>> {
    let dims = parse_dims(&args.dim)?;
    let alphas: Option<Vec<RenyiOrder>> = args.alpha.as_deref().map(|a| parse_list("--alpha", a)).transpose()?;
    let ps: Vec<f64> = match args.p.as_deref() {
        Some(p) => parse_list("--p", p)?,
        None => vec![0.5],
    };
    let mut cells = Vec::new();
    for &relation in &args.relation {
        for &dim in &dims {
            let params: Vec<Option<f64>> = match relation {
                RelationId::RenyiMu => match &alphas {
                    Some(a) => a.iter().map(|o| Some(o.value())).collect(),
                    None => vec![None],
                },
                RelationId::Exotic => ps.iter().copied().map(Some).collect(),
                _ => vec![None],
            };
            cells.extend(params.into_iter().map(|param| Cell { relation, dim, param }));
        }
    }
    Ok(cells)
}

fn cell_target(cell: &Cell, ga: &GaArgs) -> SearchTarget {
    match cell.relation {
        RelationId::RenyiMu => {
            let alpha = cell.param.map(|a| {
                if a.is_infinite() {
                    RenyiOrder::Infinity
                } else {
                    RenyiOrder::Finite(a)
                }
            });
            target_for(cell.relation, alpha, 0.5, ga)
        }
        RelationId::Exotic => target_for(cell.relation, None, cell.param.unwrap_or(0.5), ga),
        r => target_for(r, None, 0.5, ga),
    }
}

/// Worst of `samples` seeded random scenarios; sample `i` uses seed `seed + i`.
fn random_cell(
    target: &SearchTarget,
    codec: &ScenarioCodec,
    samples: usize,
    seed: u64,
    serial: bool,
) -> Result<(Genome, RelationReport, usize)> {
    let one = |i: usize| -> Result<(Genome, RelationReport)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
        let g = Genome::random(codec.genome_len(), &mut rng);
        let (_, rep) = target.report(codec, &g, true)?;
        Ok((g, rep))
    };
    let results: Vec<(Genome, RelationReport)> = if serial {
        (0..samples).map(one).collect::<Result<_>>()?
    } else {
        (0..samples).into_par_iter().map(one).collect::<Result<_>>()?
    };
    let degenerate = results.iter().filter(|(_, r)| r.degenerate).count();
    let worst = results
        .into_iter()
        .filter(|(_, r)| !r.degenerate)
        .min_by(|a, b| a.1.slack.total_cmp(&b.1.slack))
        .ok_or_else(|| anyhow!("every sampled scenario was degenerate"))?;
    Ok((worst.0, worst.1, degenerate))
}

pub fn run_cell(cell: Cell, args: &SweepArgs) -> Result<CellResult> {
    let ga = &args.ga;
    let target = cell_target(&cell, ga);
    let codec = target.codec(cell.dim, ga.mode)?;
    let t = Instant::now();
    let (genome, report, alpha, log, effort, degenerate) = match args.method {
        SweepMethod::Ga => {
            let rec = run_search(&target, &ga_config(ga, ga.seed), &codec)?;
            let log = rec
                .log
                .iter()
                .map(|l| LogRow {
                    relation: cell.relation.to_string(),
                    dim: cell.dim,
                    param: cell.param,
                    seed: ga.seed,
                    generation: l.generation,
                    best_fitness: l.best_fitness,
                    scale: l.scale,
                })
                .collect();
            (
                rec.best_genome,
                rec.best_report,
                rec.best_scenario.alpha,
                log,
                ga.generations,
                0,
            )
        }
        SweepMethod::Random => {
            if args.samples == 0 {
                bail!("--samples: must be positive");
            }
            let (g, rep, degenerate) = random_cell(&target, &codec, args.samples, ga.seed, ga.serial)?;
            let alpha = codec.decode(&g)?.alpha;
            (g, rep, alpha, Vec::new(), args.samples, degenerate)
        }
    };
    let secs = t.elapsed().as_secs_f64();
    let decoded = codec.decode(&genome)?;
    let scenario = witness_file(
        &target,
        alpha,
        &decoded.scenario,
        format!("sweep {} d={}", cell.relation, cell.dim),
    );
    let row = SweepRow {
        relation: cell.relation.to_string(),
        dim: cell.dim,
        param: cell.param.or(report.param),
        method: match args.method {
            SweepMethod::Ga => "ga".into(),
            SweepMethod::Random => "random".into(),
        },
        effort,
        min_slack: report.slack,
        lhs: report.lhs,
        rhs: report.rhs,
        violated: report.violated,
        degenerate,
        seed: ga.seed,
        wall_time_s: secs,
    };
    Ok(CellResult {
        cell,
        row,
        report,
        log,
        scenario,
        genome,
        codec,
    })
}

pub fn sweep(args: &SweepArgs) -> Result<i32> {
    let cells = sweep_cells(args)?;
    let results: Vec<CellResult> = if args.ga.serial {
        cells.iter().map(|&c| run_cell(c, args)).collect::<Result<_>>()?
    } else {
        // collect keeps cell order, so rows come out sorted by cell
        cells.par_iter().map(|&c| run_cell(c, args)).collect::<Result<_>>()?
    };

    println!(
        "{:<16} {:>4} {:>8} {:>12} {:>9}",
        "relation", "d", "param", "min_slack", "violated"
    );
    for r in &results {
        let param = r.row.param.map(fmt_num).unwrap_or_else(|| "free".into());
        println!(
            "{:<16} {:>4} {:>8} {:>12} {:>9}",
            r.row.relation,
            r.row.dim,
            param,
            fmt_num(r.row.min_slack),
            r.row.violated
        );
    }

    let dir = out_dir(args.ga.out.as_deref(), Some(DEFAULT_OUT)).expect("fallback given");
    let rows: Vec<&SweepRow> = results.iter().map(|r| &r.row).collect();
    append_csv(&dir.join("sweep.csv"), &rows)?;
    let log: Vec<&LogRow> = results.iter().flat_map(|r| &r.log).collect();
    if !log.is_empty() {
        append_csv(&dir.join("sweep_log.csv"), &log)?;
    }
    let result_rows: Vec<ResultRow> = results
        .iter()
        .map(|r| {
            let generation = (args.method == SweepMethod::Ga).then_some(args.ga.generations);
            ResultRow::from_report(&r.report, Some(args.ga.seed), generation, r.row.wall_time_s)
        })
        .collect();
    append_csv(&dir.join("results.csv"), &result_rows)?;
    let witnesses: Vec<Witness> = results
        .iter()
        .map(|r| Witness {
            relation: r.cell.relation,
            dim: r.cell.dim,
            seed: args.ga.seed,
            scenario_file: None,
            best_fitness: -r.report.slack,
            alpha: r.scenario.alpha().ok().flatten(),
            config: None,
            codec: &r.codec,
            genome: &r.genome,
            report: &r.report,
        })
        .collect();
    append_jsonl(&dir.join("witness.jsonl"), &witnesses)?;
    for r in results.iter().filter(|r| r.report.violated) {
        let suffix = r.cell.param.map(|p| format!("_p{p}")).unwrap_or_default();
        let path = dir.join(format!(
            "sweep_{}_d{}{}_s{}.json",
            r.cell.relation, r.cell.dim, suffix, args.ga.seed
        ));
        r.scenario.save(&path)?;
        println!("violation witness -> {}", path.display());
    }
    Ok(exit_for(results.iter().any(|r| r.report.violated)))
}
