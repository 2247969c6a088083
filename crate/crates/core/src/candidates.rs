//! Edge elimination, the symmetric pruned heat map, the predicted edge set,
//! and per-city candidate lists for the local search.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::heatmap::HeatMap;
use crate::instance::DistanceMatrix;
use crate::tour::Tour;

/// Row-wise top-`M` filtered heat map (`filtered`) and its symmetrization
/// `filtered + filtered^T` (`symmetric`). The search mutates `symmetric`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrunedHeatMap {
    m: usize,
    filtered: Array2<f64>,
    symmetric: Array2<f64>,
}

impl PrunedHeatMap {
    pub fn len(&self) -> usize {
        self.symmetric.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.symmetric.is_empty()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.symmetric[[i, j]]
    }

    /// The pre-symmetrization matrix.
    pub fn filtered(&self) -> &Array2<f64> {
        &self.filtered
    }

    pub fn symmetric(&self) -> &Array2<f64> {
        &self.symmetric
    }

    pub fn max_value(&self) -> f64 {
        self.symmetric.iter().fold(0.0, |m, &v| m.max(v))
    }

    /// Adds `delta` to both `(a, b)` and `(b, a)`.
    pub fn reinforce(&mut self, a: usize, b: usize, delta: f64) {
        let v = self.symmetric[[a, b]] + delta;
        self.symmetric[[a, b]] = v;
        self.symmetric[[b, a]] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.symmetric[[i, j]].to_bits() == self.symmetric[[j, i]].to_bits()))
    }
}

fn check_m(m: usize, n: usize) -> Result<()> {
    if m == 0 || m >= n {
        return Err(Error::invalid(format!("M must lie in 1..={}, got {m}", n - 1)));
    }
    Ok(())
}

/// Indices `0..n` except `skip`, ordered by `key` and then by index.
fn ranked(n: usize, skip: usize, mut cmp: impl FnMut(usize, usize) -> std::cmp::Ordering) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).filter(|&j| j != skip).collect();
    idx.sort_by(|&a, &b| cmp(a, b).then(a.cmp(&b)));
    idx
}

/// Keeps the `m` largest off-diagonal entries of each row (ties go to the
/// smaller column index), then symmetrizes.
pub fn top_m_filter(h: &HeatMap, m: usize) -> Result<PrunedHeatMap> {
    let n = h.len();
    check_m(m, n)?;
    let mut filtered = Array2::zeros((n, n));
    for i in 0..n {
        let order = ranked(n, i, |a, b| h.get(i, b).total_cmp(&h.get(i, a)));
        for &j in &order[..m] {
            filtered[[i, j]] = h.get(i, j);
        }
    }
    let mut symmetric = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            // one addition per pair keeps the result bitwise symmetric
            let v = filtered[[i, j]] + filtered[[j, i]];
            symmetric[[i, j]] = v;
            symmetric[[j, i]] = v;
        }
    }
    Ok(PrunedHeatMap {
        m,
        filtered,
        symmetric,
    })
}

/// Set of undirected edges `(i, j)` with `i < j`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeSet(BTreeSet<(usize, usize)>);

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet::default()
    }

    pub fn insert(&mut self, a: usize, b: usize) -> bool {
        assert_ne!(a, b, "self-loops are not edges");
        self.0.insert((a.min(b), a.max(b)))
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.0.contains(&(a.min(b), a.max(b)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, usize)> {
        self.0.iter()
    }

    pub fn from_tour(tour: &Tour) -> Self {
        EdgeSet(tour.edges().into_iter().collect())
    }

    pub fn intersection_len(&self, other: &EdgeSet) -> usize {
        self.0.intersection(&other.0).count()
    }
}

impl FromIterator<(usize, usize)> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        let mut s = EdgeSet::new();
        for (a, b) in iter {
            s.insert(a, b);
        }
        s
    }
}

/// Edges with a positive entry in the symmetric pruned heat map.
pub fn edge_set(hp: &PrunedHeatMap) -> EdgeSet {
    let n = hp.len();
    let mut s = EdgeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            if hp.get(i, j) > 0.0 {
                s.insert(i, j);
            }
        }
    }
    s
}

/// Fraction of `truth` edges that `pred` contains.
pub fn overlap_coefficient(pred: &EdgeSet, truth: &EdgeSet) -> Result<f64> {
    if truth.is_empty() {
        return Err(Error::invalid("ground-truth edge set is empty"));
    }
    Ok(pred.intersection_len(truth) as f64 / truth.len() as f64)
}

/// How a round of search builds its candidate lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateMode {
    /// Largest pruned heat-map values first.
    HeatMap,
    /// Nearest cities first.
    Distance,
}

impl fmt::Display for CandidateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateMode::HeatMap => "heat-map",
            CandidateMode::Distance => "distance",
        })
    }
}

impl FromStr for CandidateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heat-map" | "heatmap" => Ok(CandidateMode::HeatMap),
            "distance" => Ok(CandidateMode::Distance),
            _ => Err(Error::invalid(format!("unknown candidate mode `{s}`"))),
        }
    }
}

/// Per-city shortlists of up to `M` cities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateLists {
    mode: CandidateMode,
    lists: Vec<Vec<usize>>,
}

impl CandidateLists {
    /// Heat-map mode lists only cities with a positive pruned value, so a
    /// list may be shorter than `M`.
    pub fn build(
        mode: CandidateMode,
        m: usize,
        hp: &PrunedHeatMap,
        dist: &DistanceMatrix,
    ) -> Result<Self> {
        match mode {
            CandidateMode::HeatMap => Self::from_heatmap(hp, m),
            CandidateMode::Distance => Self::nearest(dist, m),
        }
    }

    pub fn from_heatmap(hp: &PrunedHeatMap, m: usize) -> Result<Self> {
        let n = hp.len();
        check_m(m, n)?;
        let lists = (0..n)
            .map(|i| {
                ranked(n, i, |a, b| hp.get(i, b).total_cmp(&hp.get(i, a)))
                    .into_iter()
                    .filter(|&j| hp.get(i, j) > 0.0)
                    .take(m)
                    .collect()
            })
            .collect();
        Ok(CandidateLists {
            mode: CandidateMode::HeatMap,
            lists,
        })
    }

    pub fn nearest(dist: &DistanceMatrix, m: usize) -> Result<Self> {
        let n = dist.len();
        check_m(m, n)?;
        let lists = (0..n)
            .map(|i| {
                let mut r = ranked(n, i, |a, b| dist.get(i, a).total_cmp(&dist.get(i, b)));
                r.truncate(m);
                r
            })
            .collect();
        Ok(CandidateLists {
            mode: CandidateMode::Distance,
            lists,
        })
    }

    pub fn mode(&self) -> CandidateMode {
        self.mode
    }

    pub fn of(&self, city: usize) -> &[usize] {
        &self.lists[city]
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}
