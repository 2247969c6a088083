//! Per-instance heat-map generation: Adam descent on the logits under the
//! surrogate loss.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::heatmap::{
    column_softmax, indicator_to_heatmap, loss_and_gradient, surrogate_loss, HeatMap,
    LossBreakdown, LossWeights, Logits, SoftIndicator,
};
use crate::instance::Instance;
use crate::rng;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    pub steps: usize,
    pub learning_rate: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub init_scale: f64,
    pub seed: u64,
}

impl TrainConfig {
    /// Defaults scaled to an instance of `n` cities: 300 steps per started
    /// hundred cities, never fewer than 300. A light self-loop weight keeps
    /// the heat map ranking local neighbours; at `lambda2 = 10` the penalty
    /// flattens the rows and top-`M` coverage of optimal edges drops sharply.
    pub fn for_size(n: usize) -> Self {
        TrainConfig {
            steps: 300 * n.div_ceil(100).max(1),
            learning_rate: 0.01,
            lambda1: 10.0,
            lambda2: 0.1,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            init_scale: 0.1,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn weights(&self) -> Result<LossWeights> {
        LossWeights::new(self.lambda1, self.lambda2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::invalid("steps must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0 && self.beta2 > 0.0 && self.beta2 < 1.0) {
            return Err(Error::invalid("Adam betas must lie in (0, 1)"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid("epsilon must be positive"));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(Error::invalid("init scale must be non-negative"));
        }
        self.weights().map(|_| ())
    }
}

/// Loss history of one optimization run. `steps[k]` is the loss at the
/// logits before update `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainTrace {
    pub steps: Vec<LossBreakdown>,
    pub final_loss: LossBreakdown,
    pub elapsed: Duration,
}

impl TrainTrace {
    pub fn initial_loss(&self) -> &LossBreakdown {
        &self.steps[0]
    }

    /// CSV with columns `step,total,row_penalty,self_loop,expected_length`.
    /// The last row, numbered `steps.len()`, is the final loss.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,total,row_penalty,self_loop,expected_length\n");
        let rows = self.steps.iter().chain(std::iter::once(&self.final_loss));
        for (k, l) in rows.enumerate() {
            writeln!(
                out,
                "{k},{:?},{:?},{:?},{:?}",
                l.total, l.row_penalty, l.self_loop, l.expected_length
            )
            .unwrap();
        }
        out
    }
}

/// Result of [`optimize_heatmap`].
#[derive(Debug, Clone)]
pub struct TrainedHeatMap {
    pub heatmap: HeatMap,
    pub indicator: SoftIndicator,
    pub trace: TrainTrace,
}

/// I.i.d. `N(0, init_scale^2)` logits from the config's seed.
pub fn init_logits(n: usize, cfg: &TrainConfig) -> Result<Logits> {
    if n < 3 {
        return Err(Error::invalid(format!("need at least 3 cities, got {n}")));
    }
    if cfg.init_scale == 0.0 {
        return Ok(Logits::zeros(n));
    }
    let normal = Normal::new(0.0, cfg.init_scale)
        .map_err(|e| Error::invalid(format!("init scale: {e}")))?;
    let mut rng = rng::seeded(cfg.seed);
    let s = Array2::from_shape_simple_fn((n, n), || normal.sample(&mut rng));
    Logits::new(s)
}

/// Runs `cfg.steps` Adam updates on freshly initialized logits.
pub fn optimize_heatmap(inst: &Instance, cfg: &TrainConfig) -> Result<TrainedHeatMap> {
    let logits = init_logits(inst.len(), cfg)?;
    optimize_from(inst, logits, cfg)
}

/// Runs `cfg.steps` Adam updates starting from the given logits.
pub fn optimize_from(inst: &Instance, mut logits: Logits, cfg: &TrainConfig) -> Result<TrainedHeatMap> {
    cfg.validate()?;
    let n = inst.len();
    if logits.len() != n {
        return Err(Error::invalid("logits do not match the instance size"));
    }
    let weights = cfg.weights()?;
    let dist = inst.distance_matrix();
    let start = Instant::now();

    let mut m = Array2::<f64>::zeros((n, n));
    let mut v = Array2::<f64>::zeros((n, n));
    let mut history = Vec::with_capacity(cfg.steps);
    let (b1, b2) = (cfg.beta1, cfg.beta2);

    for step in 0..cfg.steps {
        let (loss, grad) = loss_and_gradient(&logits, &dist, weights)
            .map_err(|e| Error::Numeric(format!("step {step}: {e}")))?;
        history.push(loss);

        let t = (step + 1) as i32;
        let c1 = 1.0 - b1.powi(t);
        let c2 = 1.0 - b2.powi(t);
        m.zip_mut_with(&grad, |mv, &g| *mv = b1 * *mv + (1.0 - b1) * g);
        v.zip_mut_with(&grad, |vv, &g| *vv = b2 * *vv + (1.0 - b2) * g * g);
        let s = logits.matrix_mut();
        ndarray::Zip::from(s).and(&m).and(&v).for_each(|sv, &mv, &vv| {
            *sv -= cfg.learning_rate * (mv / c1) / ((vv / c2).sqrt() + cfg.epsilon);
        });
        if logits.matrix().iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric(format!("step {step}: logits diverged")));
        }
    }

    let indicator = column_softmax(&logits)?;
    let heatmap = indicator_to_heatmap(&indicator);
    let final_loss = surrogate_loss(&indicator, &heatmap, &dist, weights)?;
    if !final_loss.total.is_finite() {
        return Err(Error::Numeric(format!("step {}: final loss is not finite", cfg.steps)));
    }
    Ok(TrainedHeatMap {
        heatmap,
        indicator,
        trace: TrainTrace {
            steps: history,
            final_loss,
            elapsed: start.elapsed(),
        },
    })
}

/// Heat map of the initial logits without any optimization; the reference
/// point for judging what training adds.
pub fn random_logit_heatmap(n: usize, cfg: &TrainConfig) -> Result<HeatMap> {
    let logits = init_logits(n, cfg)?;
    Ok(indicator_to_heatmap(&column_softmax(&logits)?))
}
