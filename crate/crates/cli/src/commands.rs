use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use heatmap_tsp::baseline::{nn_two_opt_baseline, nn_two_opt_multistart};
use heatmap_tsp::heatmap::HeatMap;
use heatmap_tsp::instance::Instance;
use heatmap_tsp::pipeline::{bench_instance, coverage_report, instance_label, HeatSource};
use heatmap_tsp::svg::emit_tour_svg;
use heatmap_tsp::{
    held_karp_exact, optimize_heatmap, run_search, top_m_filter, BenchResult, Budget, Preset,
    SearchParams, Tour, TrainConfig,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{distances, emit, load_instance, read, render, write, CliError, CliResult};
use crate::{
    BaselineArgs, BenchArgs, CoverageArgs, GenerateArgs, OracleArgs, ReportOptions, SearchArgs,
    SearchOptions, SolveArgs, TrainHeatmapArgs, TrainOptions,
};

const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(1);

fn seconds(s: f64) -> CliResult<Duration> {
    Duration::try_from_secs_f64(s)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| CliError::Usage(format!("time budget must be a positive number of seconds, got {s}")))
}

/// Time limit and round cap as given; one second when neither is.
fn budget(time_budget: Option<f64>, rounds: Option<usize>) -> CliResult<Budget> {
    let b = Budget {
        time_limit: time_budget.map(seconds).transpose()?,
        max_rounds: rounds,
    };
    if b.time_limit.is_none() && b.max_rounds.is_none() {
        return Ok(Budget::time(DEFAULT_TIME_BUDGET));
    }
    b.validate()?;
    Ok(b)
}

fn search_params(opts: &SearchOptions, n: usize) -> CliResult<SearchParams> {
    let preset = opts.preset.unwrap_or_else(|| Preset::for_size(n));
    let params = preset.params(budget(opts.time_budget, opts.rounds)?);
    params.validate()?;
    Ok(params)
}

fn train_config(n: usize, opts: &TrainOptions, seed: u64) -> CliResult<TrainConfig> {
    let mut cfg = TrainConfig::for_size(n).with_seed(seed);
    if let Some(v) = opts.steps {
        cfg.steps = v;
    }
    if let Some(v) = opts.lr {
        cfg.learning_rate = v;
    }
    if let Some(v) = opts.lambda1 {
        cfg.lambda1 = v;
    }
    if let Some(v) = opts.lambda2 {
        cfg.lambda2 = v;
    }
    if let Some(v) = opts.init_scale {
        cfg.init_scale = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Writes the tour and SVG if requested, then prints the result record.
fn report_tour(
    inst: &Instance,
    tour: &Tour,
    result: BenchResult,
    report: &ReportOptions,
) -> CliResult<()> {
    if let Some(path) = &report.out {
        write(path, &tour.to_text(result.length))?;
    }
    if let Some(path) = &report.svg {
        emit_tour_svg(inst, tour, path).map_err(|e| match e {
            heatmap_tsp::Error::Io(source) => CliError::Write {
                path: path.clone(),
                source,
            },
            other => other.into(),
        })?;
    }
    let text = render(report.format, BenchResult::CSV_HEADER, &[result.csv_row()], &result)?;
    emit(None, &text)
}

fn record(inst: &Instance, method: &str, length: f64, heat: f64, search: f64, seed: u64) -> BenchResult {
    BenchResult {
        instance: instance_label(inst),
        method: method.into(),
        length,
        gap_percent: None,
        heatmap_seconds: heat,
        search_seconds: search,
        seed,
    }
}

pub fn generate(a: GenerateArgs) -> CliResult<()> {
    let inst = Instance::random(a.n, a.seed)?;
    let text = if a.tsplib { inst.to_tsplib() } else { inst.to_text() };
    emit(a.out.as_deref(), &text)
}

pub fn train_heatmap(a: TrainHeatmapArgs) -> CliResult<()> {
    let inst = load_instance(&a.instance)?;
    let cfg = train_config(inst.len(), &a.train, a.seed)?;
    let trained = optimize_heatmap(&inst, &cfg)?;
    if let Some(path) = &a.trace {
        write(path, &trained.trace.to_csv())?;
    }
    emit(a.out.as_deref(), &trained.heatmap.to_text())
}

fn guided_search(
    inst: &Instance,
    heatmap: &HeatMap,
    tsplib_round: bool,
    params: &SearchParams,
    seed: u64,
) -> CliResult<(Tour, f64, f64)> {
    let n = inst.len();
    if heatmap.len() != n {
        return Err(CliError::Usage(format!(
            "heat map has {} cities but the instance has {n}",
            heatmap.len()
        )));
    }
    let dist = distances(inst, tsplib_round);
    let t = Instant::now();
    let pruned = top_m_filter(heatmap, params.m.min(n - 1))?;
    let out = run_search(&dist, pruned, params, seed)?;
    Ok((out.tour, out.length, t.elapsed().as_secs_f64()))
}

pub fn search(a: SearchArgs) -> CliResult<()> {
    let inst = load_instance(&a.input.instance)?;
    let heatmap = HeatMap::from_text(&read(&a.heatmap)?)?;
    let params = search_params(&a.search, inst.len())?;
    let (tour, length, secs) = guided_search(&inst, &heatmap, a.input.tsplib_round, &params, a.seed)?;
    let result = record(&inst, "heatmap-search", length, 0.0, secs, a.seed);
    report_tour(&inst, &tour, result, &a.report)
}

pub fn solve(a: SolveArgs) -> CliResult<()> {
    let inst = load_instance(&a.input.instance)?;
    let cfg = train_config(inst.len(), &a.train, a.seed)?;
    let params = search_params(&a.search, inst.len())?;
    let t = Instant::now();
    let trained = optimize_heatmap(&inst, &cfg)?;
    let heat_secs = t.elapsed().as_secs_f64();
    let (tour, length, secs) =
        guided_search(&inst, &trained.heatmap, a.input.tsplib_round, &params, a.seed)?;
    let result = record(&inst, "heatmap-search", length, heat_secs, secs, a.seed);
    report_tour(&inst, &tour, result, &a.report)
}

pub fn oracle(a: OracleArgs) -> CliResult<()> {
    let inst = load_instance(&a.input.instance)?;
    let t = Instant::now();
    let (tour, length) = held_karp_exact(&distances(&inst, a.input.tsplib_round))?;
    let result = record(&inst, "held-karp", length, 0.0, t.elapsed().as_secs_f64(), 0);
    report_tour(&inst, &tour, result, &a.report)
}

pub fn baseline(a: BaselineArgs) -> CliResult<()> {
    let inst = load_instance(&a.input.instance)?;
    let dist = distances(&inst, a.input.tsplib_round);
    let t = Instant::now();
    let (tour, length) = if a.time_budget.is_some() || a.rounds.is_some() {
        nn_two_opt_multistart(&dist, a.seed, budget(a.time_budget, a.rounds)?)?
    } else {
        nn_two_opt_baseline(&dist, a.seed)?
    };
    let result = record(&inst, "nn-2opt", length, 0.0, t.elapsed().as_secs_f64(), a.seed);
    report_tour(&inst, &tour, result, &a.report)
}

fn generated(n: usize, count: usize, seed: u64) -> CliResult<Vec<(Instance, u64)>> {
    if count == 0 {
        return Err(CliError::Usage("count must be at least 1".into()));
    }
    (0..count as u64)
        .map(|k| Ok((Instance::random(n, seed + k)?, seed + k)))
        .collect()
}

pub fn coverage(a: CoverageArgs) -> CliResult<()> {
    let instances = generated(a.n, a.count, a.seed)?;
    let cfg = train_config(a.n, &a.train, a.seed)?;
    let source = if a.random_logits {
        HeatSource::RandomLogits
    } else {
        HeatSource::Optimized
    };
    let report = coverage_report(&instances, &cfg, a.m, source)?;
    let text = match a.format {
        crate::Format::Csv => report.to_csv(),
        crate::Format::Json => {
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            s
        }
    };
    emit(a.out.as_deref(), &text)
}

#[derive(Debug, Serialize)]
struct MethodSummary {
    method: String,
    runs: usize,
    mean_length: f64,
    mean_gap_percent: f64,
    mean_seconds: f64,
}

#[derive(Debug, Serialize)]
struct BenchReport {
    results: Vec<BenchResult>,
    summary: Vec<MethodSummary>,
}

fn summarize(results: &[BenchResult]) -> Vec<MethodSummary> {
    let mut by_method: BTreeMap<&str, Vec<&BenchResult>> = BTreeMap::new();
    for r in results {
        by_method.entry(&r.method).or_default().push(r);
    }
    by_method
        .into_iter()
        .map(|(method, rs)| {
            let k = rs.len() as f64;
            MethodSummary {
                method: method.to_string(),
                runs: rs.len(),
                mean_length: rs.iter().map(|r| r.length).sum::<f64>() / k,
                mean_gap_percent: rs.iter().filter_map(|r| r.gap_percent).sum::<f64>() / k,
                mean_seconds: rs.iter().map(|r| r.heatmap_seconds + r.search_seconds).sum::<f64>() / k,
            }
        })
        .collect()
}

pub fn bench(a: BenchArgs) -> CliResult<()> {
    if a.jobs == 0 {
        return Err(CliError::Usage("jobs must be at least 1".into()));
    }
    let instances = generated(a.n, a.count, a.seed)?;
    let params = search_params(&a.search, a.n)?;
    let cfg = train_config(a.n, &a.train, a.seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let per_instance = pool.install(|| {
        instances
            .par_iter()
            .map(|(inst, seed)| bench_instance(inst, &cfg.clone().with_seed(*seed), &params, *seed))
            .collect::<heatmap_tsp::Result<Vec<_>>>()
    })?;
    let results: Vec<BenchResult> = per_instance.into_iter().flatten().collect();
    let rows: Vec<String> = results.iter().map(BenchResult::csv_row).collect();
    let report = BenchReport {
        summary: summarize(&results),
        results,
    };
    let text = render(a.format, BenchResult::CSV_HEADER, &rows, &report)?;
    emit(a.out.as_deref(), &text)
}
