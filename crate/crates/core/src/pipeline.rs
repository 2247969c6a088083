//! End-to-end solving, benchmark records, and edge-coverage reporting.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::baseline::nn_two_opt_multistart;
use crate::candidates::{edge_set, overlap_coefficient, top_m_filter, EdgeSet};
use crate::error::{Error, Result};
use crate::heatmap::HeatMap;
use crate::instance::Instance;
use crate::oracle::{held_karp_exact, MAX_EXACT_CITIES};
use crate::search::{run_search, Budget, SearchOutcome, SearchParams};
use crate::train::{optimize_heatmap, random_logit_heatmap, TrainConfig, TrainTrace};

/// Relative gap in percent.
pub fn gap_percent(length: f64, reference: f64) -> f64 {
    100.0 * (length - reference) / reference
}

/// One method's result on one instance.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BenchResult {
    pub instance: String,
    pub method: String,
    pub length: f64,
    pub gap_percent: Option<f64>,
    pub heatmap_seconds: f64,
    pub search_seconds: f64,
    pub seed: u64,
}

impl BenchResult {
    pub fn with_reference(mut self, reference: f64) -> Self {
        self.gap_percent = Some(gap_percent(self.length, reference));
        self
    }

    pub const CSV_HEADER: &'static str =
        "instance,method,length,gap_percent,heatmap_seconds,search_seconds,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:?},{},{:.6},{:.6},{}",
            self.instance,
            self.method,
            self.length,
            self.gap_percent.map_or(String::new(), |g| format!("{g:?}")),
            self.heatmap_seconds,
            self.search_seconds,
            self.seed
        )
    }
}

pub fn bench_csv(results: &[BenchResult]) -> String {
    let mut out = String::from(BenchResult::CSV_HEADER);
    out.push('\n');
    for r in results {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Everything the pipeline produced for one instance.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub result: BenchResult,
    pub heatmap: HeatMap,
    pub trace: TrainTrace,
    pub search: SearchOutcome,
}

/// Heat-map optimization, top-`M` pruning, then heat-map guided search.
/// `M` is capped at `n - 1` for instances smaller than the preset assumes.
pub fn solve_pipeline(
    inst: &Instance,
    train_cfg: &TrainConfig,
    params: &SearchParams,
    seed: u64,
) -> Result<PipelineOutput> {
    let t0 = Instant::now();
    let trained = optimize_heatmap(inst, train_cfg)?;
    let heatmap_seconds = t0.elapsed().as_secs_f64();
    search_with_heatmap(inst, trained.heatmap, trained.trace, params, seed, heatmap_seconds)
}

/// The search half of [`solve_pipeline`] for a heat map produced elsewhere.
pub fn search_with_heatmap(
    inst: &Instance,
    heatmap: HeatMap,
    trace: TrainTrace,
    params: &SearchParams,
    seed: u64,
    heatmap_seconds: f64,
) -> Result<PipelineOutput> {
    let n = inst.len();
    if heatmap.len() != n {
        return Err(Error::invalid(format!(
            "heat map has {} cities but the instance has {n}",
            heatmap.len()
        )));
    }
    let dist = inst.distance_matrix();
    let t1 = Instant::now();
    let pruned = top_m_filter(&heatmap, params.m.min(n - 1))?;
    let search = run_search(&dist, pruned, params, seed)?;
    let search_seconds = t1.elapsed().as_secs_f64();
    Ok(PipelineOutput {
        result: BenchResult {
            instance: instance_label(inst),
            method: "heatmap-search".into(),
            length: search.length,
            gap_percent: None,
            heatmap_seconds,
            search_seconds,
            seed,
        },
        heatmap,
        trace,
        search,
    })
}

pub fn instance_label(inst: &Instance) -> String {
    inst.name().map_or_else(|| format!("n{}", inst.len()), str::to_string)
}

/// Where the ground-truth tour for coverage came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruthSource {
    /// Held–Karp optimum.
    Exact,
    /// Best of a long multistart baseline run; not guaranteed optimal.
    ProxyTruth,
}

/// Ground-truth edges: exact for small instances, otherwise the best of
/// `proxy_restarts` baseline runs.
pub fn truth_edges(inst: &Instance, proxy_restarts: usize) -> Result<(EdgeSet, TruthSource)> {
    let dist = inst.distance_matrix();
    if inst.len() <= MAX_EXACT_CITIES {
        let (t, _) = held_karp_exact(&dist)?;
        Ok((EdgeSet::from_tour(&t), TruthSource::Exact))
    } else {
        let (t, _) = nn_two_opt_multistart(&dist, 0, Budget::rounds(proxy_restarts.max(1)))?;
        Ok((EdgeSet::from_tour(&t), TruthSource::ProxyTruth))
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CoverageRow {
    pub instance: String,
    pub seed: u64,
    pub m: usize,
    pub eta: f64,
    pub pi_size: usize,
    pub fully_covered: bool,
    pub truth: TruthSource,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CoverageReport {
    pub rows: Vec<CoverageRow>,
    pub mean_eta: f64,
    pub mean_pi_size: f64,
    pub fully_covered: usize,
}

impl CoverageReport {
    pub fn from_rows(rows: Vec<CoverageRow>) -> Self {
        let k = rows.len().max(1) as f64;
        CoverageReport {
            mean_eta: rows.iter().map(|r| r.eta).sum::<f64>() / k,
            mean_pi_size: rows.iter().map(|r| r.pi_size as f64).sum::<f64>() / k,
            fully_covered: rows.iter().filter(|r| r.fully_covered).count(),
            rows,
        }
    }

    /// CSV with columns `instance,seed,M,eta,pi_size,fully_covered`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance,seed,M,eta,pi_size,fully_covered\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{:?},{},{}",
                r.instance, r.seed, r.m, r.eta, r.pi_size, r.fully_covered
            )
            .unwrap();
        }
        out
    }
}

/// Which heat map a coverage row measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatSource {
    Optimized,
    /// Softmax of the initial logits, untrained.
    RandomLogits,
}

/// Coverage of the ground-truth edges by `M`-pruned heat maps, one row per
/// `(instance, seed)`; `seed` seeds the heat-map logits.
pub fn coverage_row(
    inst: &Instance,
    seed: u64,
    train_cfg: &TrainConfig,
    m: usize,
    source: HeatSource,
    truth: &(EdgeSet, TruthSource),
) -> Result<CoverageRow> {
    let cfg = train_cfg.clone().with_seed(seed);
    let heat = match source {
        HeatSource::Optimized => optimize_heatmap(inst, &cfg)?.heatmap,
        HeatSource::RandomLogits => random_logit_heatmap(inst.len(), &cfg)?,
    };
    let pi = edge_set(&top_m_filter(&heat, m)?);
    let eta = overlap_coefficient(&pi, &truth.0)?;
    Ok(CoverageRow {
        instance: instance_label(inst),
        seed,
        m,
        eta,
        pi_size: pi.len(),
        fully_covered: pi.intersection_len(&truth.0) == truth.0.len(),
        truth: truth.1,
    })
}

pub fn coverage_report(
    instances: &[(Instance, u64)],
    train_cfg: &TrainConfig,
    m: usize,
    source: HeatSource,
) -> Result<CoverageReport> {
    let rows = instances
        .iter()
        .map(|(inst, seed)| {
            let truth = truth_edges(inst, 100)?;
            coverage_row(inst, *seed, train_cfg, m, source, &truth)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageReport::from_rows(rows))
}

/// Pipeline, equal-time baseline and (when small enough) the exact optimum
/// on one instance. Gaps are relative to the exact optimum when available,
/// otherwise to the best length found.
pub fn bench_instance(
    inst: &Instance,
    train_cfg: &TrainConfig,
    params: &SearchParams,
    seed: u64,
) -> Result<Vec<BenchResult>> {
    let dist = inst.distance_matrix();
    let label = instance_label(inst);
    let pipe = solve_pipeline(inst, train_cfg, params, seed)?.result;

    let spent = Duration::from_secs_f64(pipe.heatmap_seconds + pipe.search_seconds);
    let baseline_budget = match params.budget.time_limit {
        Some(_) => Budget::time(spent.max(Duration::from_millis(1))),
        None => Budget::rounds(params.budget.max_rounds.unwrap_or(1)),
    };
    let t = Instant::now();
    let (_, base_len) = nn_two_opt_multistart(&dist, seed, baseline_budget)?;
    let baseline = BenchResult {
        instance: label.clone(),
        method: "nn-2opt".into(),
        length: base_len,
        gap_percent: None,
        heatmap_seconds: 0.0,
        search_seconds: t.elapsed().as_secs_f64(),
        seed,
    };

    let mut out = vec![pipe, baseline];
    let reference = if inst.len() <= MAX_EXACT_CITIES {
        let t = Instant::now();
        let (_, opt) = held_karp_exact(&dist)?;
        out.push(BenchResult {
            instance: label,
            method: "held-karp".into(),
            length: opt,
            gap_percent: None,
            heatmap_seconds: 0.0,
            search_seconds: t.elapsed().as_secs_f64(),
            seed,
        });
        opt
    } else {
        out.iter().map(|r| r.length).fold(f64::INFINITY, f64::min)
    };
    Ok(out.into_iter().map(|r| r.with_reference(reference)).collect())
}
