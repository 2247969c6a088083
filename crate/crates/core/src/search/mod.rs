//! Heat-map guided best-first k-opt local search with randomized restarts.

pub mod kopt;
pub mod two_opt;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng as _;

use crate::candidates::{CandidateLists, CandidateMode, PrunedHeatMap};
use crate::error::{Error, Result};
use crate::instance::DistanceMatrix;
use crate::rng;
use crate::tour::{tour_length, Tour};

pub use kopt::{
    heat_increment, select_next_city, selection_likelihood, update_heatmap, EdgeCounts,
    Expander, Expansion, KOptAction, KOptMove, WEIGHT_FLOOR,
};
pub use two_opt::{has_improving_two_opt, random_tour, two_opt_improve, IMPROVE_EPS};

/// When a search stops: after a wall-clock limit, a number of restart
/// rounds, or whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Budget {
    pub time_limit: Option<Duration>,
    pub max_rounds: Option<usize>,
}

impl Budget {
    pub fn time(limit: Duration) -> Self {
        Budget {
            time_limit: Some(limit),
            max_rounds: None,
        }
    }

    pub fn rounds(rounds: usize) -> Self {
        Budget {
            time_limit: None,
            max_rounds: Some(rounds),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.time_limit, self.max_rounds) {
            (None, None) => Err(Error::invalid("search budget needs a time limit or a round cap")),
            (Some(t), _) if t.is_zero() => Err(Error::invalid("time budget must be positive")),
            (_, Some(0)) => Err(Error::invalid("round cap must be positive")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SearchParams {
    /// Weight of the exploration bonus.
    pub alpha: f64,
    /// Scale of heat-map reinforcement after an improvement.
    pub beta: f64,
    /// Candidate-list size.
    pub m: usize,
    /// Half-open range the per-round cap `K` on removed edges is drawn from.
    pub k_range: Range<usize>,
    /// Action constructions tried per search node.
    pub expand_budget: usize,
    pub budget: Budget,
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha must be non-negative"));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid("beta must be non-negative"));
        }
        if self.m == 0 {
            return Err(Error::invalid("M must be positive"));
        }
        if self.k_range.start < 2 || self.k_range.end <= self.k_range.start {
            return Err(Error::invalid(format!(
                "K range must satisfy 2 <= lo < hi, got [{}, {})",
                self.k_range.start, self.k_range.end
            )));
        }
        if self.expand_budget == 0 {
            return Err(Error::invalid("expand budget must be at least 1"));
        }
        self.budget.validate()
    }
}

/// Named parameter sets by problem scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Tsp20,
    Tsp50,
    Tsp100,
    Tsp200,
    Tsp500,
    Tsp1000,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Tsp20,
        Preset::Tsp50,
        Preset::Tsp100,
        Preset::Tsp200,
        Preset::Tsp500,
        Preset::Tsp1000,
    ];

    /// The preset's search parameters under the given budget.
    pub fn params(self, budget: Budget) -> SearchParams {
        let (beta, m, k_range, expand_budget) = match self {
            Preset::Tsp20 => (10.0, 8, 10..11, 60),
            Preset::Tsp50 => (10.0, 8, 5..15, 150),
            Preset::Tsp100 => (10.0, 8, 5..35, 300),
            Preset::Tsp200 => (10.0, 8, 10..90, 600),
            Preset::Tsp500 => (50.0, 5, 30..130, 1000),
            Preset::Tsp1000 => (50.0, 5, 10..110, 2000),
        };
        SearchParams {
            alpha: 0.0,
            beta,
            m,
            k_range,
            expand_budget,
            budget,
        }
    }

    /// Smallest preset meant for instances of at least `n` cities.
    pub fn for_size(n: usize) -> Preset {
        match n {
            0..=20 => Preset::Tsp20,
            21..=50 => Preset::Tsp50,
            51..=100 => Preset::Tsp100,
            101..=200 => Preset::Tsp200,
            201..=500 => Preset::Tsp500,
            _ => Preset::Tsp1000,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Tsp20 => "tsp20",
            Preset::Tsp50 => "tsp50",
            Preset::Tsp100 => "tsp100",
            Preset::Tsp200 => "tsp200",
            Preset::Tsp500 => "tsp500",
            Preset::Tsp1000 => "tsp1000",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown preset `{s}`")))
    }
}

/// Bookkeeping for one search run.
#[derive(Debug, Clone)]
pub struct SearchStats {
    pub edge_use_counts: EdgeCounts,
    pub total_expansions: u64,
    pub rounds: usize,
    pub improvements: u64,
    pub best_length: f64,
    pub best_tour: Tour,
    /// Best length seen so far, recorded at the end of every round.
    pub round_bests: Vec<f64>,
    /// Length of the first round's 2-opt starting tour.
    pub first_start_length: f64,
    /// Largest pruned heat-map value when the search stopped.
    pub final_max_heat: f64,
}

/// A search result and the reinforced heat map it leaves behind.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub tour: Tour,
    pub length: f64,
    pub stats: SearchStats,
    pub heatmap: PrunedHeatMap,
}

/// Runs restart rounds of best-first k-opt search until the budget runs out.
///
/// Each round draws `K` from `params.k_range`, picks heat-map or distance
/// candidate lists with equal probability, starts from a 2-opt-improved
/// random tour, and keeps moving to the best improving action of each node
/// until a node yields none. Heat-map reinforcement carries across rounds.
/// The first round's starting tour is always built, even if the time limit
/// is already spent.
pub fn run_search(
    dist: &DistanceMatrix,
    mut hp: PrunedHeatMap,
    params: &SearchParams,
    seed: u64,
) -> Result<SearchOutcome> {
    params.validate()?;
    let n = dist.len();
    if hp.len() != n {
        return Err(Error::invalid(format!(
            "heat map has {} cities but the distance matrix has {n}",
            hp.len()
        )));
    }
    let m = params.m.min(n - 1);
    let deadline = params.budget.time_limit.map(|t| Instant::now() + t);
    let mut rng = rng::seeded(seed);

    let mut counts = EdgeCounts::new(n);
    let mut total_expansions = 0u64;
    let mut improvements = 0u64;
    let mut round_bests = Vec::new();
    let mut best: Option<(Tour, f64)> = None;
    let mut first_start_length = f64::NAN;
    let mut rounds = 0usize;

    loop {
        if params.budget.max_rounds.is_some_and(|r| rounds >= r) {
            break;
        }
        if rounds > 0 && deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let k = rng.gen_range(params.k_range.clone());
        let mode = if rng.gen_bool(0.5) {
            CandidateMode::HeatMap
        } else {
            CandidateMode::Distance
        };
        let candidates = CandidateLists::build(mode, m, &hp, dist)?;

        let start = two_opt::random_tour_with(n, &mut rng);
        let mut tour = two_opt_improve(dist, &start);
        let mut length = tour_length(dist, &tour)?;
        if rounds == 0 {
            first_start_length = length;
        }
        if best.as_ref().is_none_or(|b| length < b.1) {
            best = Some((tour.clone(), length));
        }

        let mut expander = Expander::new(
            dist,
            &candidates,
            params.alpha,
            k,
            &mut counts,
            &mut total_expansions,
            &mut rng,
        );
        let timed_out = loop {
            let out = expander.expand(&tour, length, &hp, params.expand_budget, deadline);
            let Some(mv) = out.best else { break out.timed_out };
            update_heatmap(&mut hp, &mv.action, length, mv.length, params.beta);
            improvements += 1;
            tour = mv.tour;
            length = mv.length;
            if best.as_ref().is_none_or(|b| length < b.1) {
                best = Some((tour.clone(), length));
            }
            if out.timed_out {
                break true;
            }
        };
        rounds += 1;
        round_bests.push(best.as_ref().map_or(f64::INFINITY, |b| b.1));
        if timed_out {
            break;
        }
    }

    let (best_tour, _) = best.expect("the first round always produces a tour");
    // report the recomputed length rather than the incrementally tracked one
    let best_length = tour_length(dist, &best_tour)?;
    let final_max_heat = hp.max_value();
    Ok(SearchOutcome {
        tour: best_tour.clone(),
        length: best_length,
        stats: SearchStats {
            edge_use_counts: counts,
            total_expansions,
            rounds,
            improvements,
            best_length,
            best_tour,
            round_bests,
            first_start_length,
            final_max_heat,
        },
        heatmap: hp,
    })
}
