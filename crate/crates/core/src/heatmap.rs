//! Soft indicator matrices, the cyclic heat-map transform, and the
//! unsupervised surrogate loss with its analytic gradient.
//!
//! Cities and positions are 0-based throughout. Column `k` of a soft
//! indicator `T` is a distribution over which city sits at position `k` of
//! the cycle, and the heat map is
//!
//! ```text
//! H = sum_k p_k p_{k+1}^T   (indices mod n)  =  T V T^T
//! ```
//!
//! where `p_k` is column `k` of `T` and `V` is the cyclic shift matrix
//! (`V[k][k+1] = 1`, `V[n-1][0] = 1`). Row `i` of `H` scores the directed
//! edges leaving city `i`.

use std::fmt::Write as _;

use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::instance::DistanceMatrix;

pub const HEATMAP_HEADER: &str = "UTSP-HEATMAP v1";

/// Tolerance for treating an entry as exactly 0 or 1.
pub const PERMUTATION_TOL: f64 = 1e-9;

/// Tolerance for column sums of a soft indicator.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Pre-softmax scores.
#[derive(Debug, Clone, PartialEq)]
pub struct Logits(Array2<f64>);

impl Logits {
    pub fn new(s: Array2<f64>) -> Result<Self> {
        check_square(s.view(), "logits")?;
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("logits contain a non-finite entry"));
        }
        Ok(Logits(s))
    }

    pub fn zeros(n: usize) -> Self {
        Logits(Array2::zeros((n, n)))
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.0
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut Array2<f64> {
        &mut self.0
    }
}

/// Column-stochastic matrix. Softmax output is strictly positive; exact
/// permutation matrices (with zeros) are also accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftIndicator(Array2<f64>);

impl SoftIndicator {
    pub fn new(t: Array2<f64>) -> Result<Self> {
        check_square(t.view(), "soft indicator")?;
        if t.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid("soft indicator entries must be finite and non-negative"));
        }
        for (k, col) in t.axis_iter(Axis(1)).enumerate() {
            let s: f64 = col.sum();
            if (s - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::invalid(format!("column {k} sums to {s}, not 1")));
            }
        }
        Ok(SoftIndicator(t))
    }

    /// The permutation matrix with a 1 at `(cities[k], k)` for every position `k`.
    pub fn from_permutation(cities: &[usize]) -> Result<Self> {
        let n = cities.len();
        let mut seen = vec![false; n];
        let mut t = Array2::zeros((n, n));
        for (k, &c) in cities.iter().enumerate() {
            if c >= n || std::mem::replace(&mut seen[c], true) {
                return Err(Error::invalid("positions must be a permutation of 0..n"));
            }
            t[[c, k]] = 1.0;
        }
        SoftIndicator::new(t)
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.0.sum_axis(Axis(1)).to_vec()
    }
}

/// Dense directed-edge scores.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatMap(Array2<f64>);

impl HeatMap {
    pub fn new(h: Array2<f64>) -> Result<Self> {
        check_square(h.view(), "heat map")?;
        if h.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid("heat map entries must be finite and non-negative"));
        }
        Ok(HeatMap(h))
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[[i, j]]
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn total_mass(&self) -> f64 {
        self.0.sum()
    }

    pub fn to_text(&self) -> String {
        let n = self.len();
        let mut out = String::with_capacity(n * n * 24 + 32);
        writeln!(out, "{HEATMAP_HEADER}").unwrap();
        writeln!(out, "{n}").unwrap();
        for row in self.0.rows() {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{v:?}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty document"))?;
        if header != HEATMAP_HEADER {
            return Err(Error::parse(ln, format!("expected header `{HEATMAP_HEADER}`")));
        }
        let (ln, count) = lines
            .next()
            .ok_or_else(|| Error::parse(ln + 1, "missing dimension"))?;
        let n: usize = count
            .parse()
            .map_err(|_| Error::parse(ln, format!("bad dimension `{count}`")))?;
        let mut h = Array2::zeros((n, n));
        let mut rows = 0;
        let mut last = ln;
        for (ln, line) in lines {
            last = ln;
            if rows == n {
                return Err(Error::parse(ln, "more rows than the declared dimension"));
            }
            let mut cols = 0;
            for field in line.split_whitespace() {
                if cols == n {
                    return Err(Error::parse(ln, format!("row has more than {n} entries")));
                }
                h[[rows, cols]] = field
                    .parse()
                    .map_err(|_| Error::parse(ln, format!("bad number `{field}`")))?;
                cols += 1;
            }
            if cols != n {
                return Err(Error::parse(ln, format!("row has {cols} entries, expected {n}")));
            }
            rows += 1;
        }
        if rows != n {
            return Err(Error::parse(last, format!("expected {n} rows, found {rows}")));
        }
        HeatMap::new(h).map_err(|e| Error::parse(last, e.to_string()))
    }
}

/// Penalty weights: `lambda1` scales the row-sum penalty, `lambda2` the
/// self-loop penalty.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LossWeights {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl LossWeights {
    pub fn new(lambda1: f64, lambda2: f64) -> Result<Self> {
        if !(lambda1 >= 0.0 && lambda1.is_finite() && lambda2 >= 0.0 && lambda2.is_finite()) {
            return Err(Error::invalid(format!(
                "loss weights must be finite and non-negative, got ({lambda1}, {lambda2})"
            )));
        }
        Ok(LossWeights { lambda1, lambda2 })
    }
}

/// The three loss terms (unweighted) and the weighted total.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LossBreakdown {
    pub row_penalty: f64,
    pub self_loop: f64,
    pub expected_length: f64,
    pub total: f64,
}

fn check_square(m: ArrayView2<f64>, what: &str) -> Result<()> {
    let (r, c) = m.dim();
    if r != c || r == 0 {
        return Err(Error::invalid(format!("{what} must be square and non-empty, got {r}x{c}")));
    }
    Ok(())
}

/// Softmax down each column, with the column max subtracted first.
pub fn column_softmax(logits: &Logits) -> Result<SoftIndicator> {
    let s = logits.matrix();
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("logits contain a non-finite entry"));
    }
    let mut t = s.clone();
    for mut col in t.axis_iter_mut(Axis(1)) {
        let max = col.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        col.mapv_inplace(|v| (v - max).exp());
        let z = col.sum();
        col.mapv_inplace(|v| v / z);
    }
    Ok(SoftIndicator(t))
}

/// `T` with its columns rotated left: column `k` holds column `k+1 mod n`.
/// Equals `T V^T`.
fn shift_columns_left(t: &Array2<f64>) -> Array2<f64> {
    let n = t.ncols();
    let mut u = Array2::zeros(t.dim());
    for k in 0..n {
        u.column_mut(k).assign(&t.column((k + 1) % n));
    }
    u
}

/// `T` with its columns rotated right: column `k` holds column `k-1 mod n`.
/// Equals `T V`.
fn shift_columns_right(t: &Array2<f64>) -> Array2<f64> {
    let n = t.ncols();
    let mut w = Array2::zeros(t.dim());
    for k in 0..n {
        w.column_mut(k).assign(&t.column((k + n - 1) % n));
    }
    w
}

/// Builds the heat map `H = T (T V^T)^T`, one dense product.
pub fn indicator_to_heatmap(t: &SoftIndicator) -> HeatMap {
    let tm = t.matrix();
    HeatMap(tm.dot(&shift_columns_left(tm).t()))
}

/// Heat map as the explicit cyclic sum of outer products `p_k p_{k+1}^T`.
pub fn heatmap_outer_products(t: &SoftIndicator) -> HeatMap {
    let tm = t.matrix();
    let n = tm.nrows();
    let mut h = Array2::zeros((n, n));
    for k in 0..n {
        let p = tm.column(k);
        let q = tm.column((k + 1) % n);
        for i in 0..n {
            let pi = p[i];
            for j in 0..n {
                h[[i, j]] += pi * q[j];
            }
        }
    }
    HeatMap(h)
}

/// Heat map entry by entry: `H[i][j] = sum_k T[i][k] T[j][k+1 mod n]`.
pub fn heatmap_elementwise(t: &SoftIndicator) -> HeatMap {
    let tm = t.matrix();
    let n = tm.nrows();
    let h = Array2::from_shape_fn((n, n), |(i, j)| {
        (0..n).map(|k| tm[[i, k]] * tm[[j, (k + 1) % n]]).sum()
    });
    HeatMap(h)
}

/// The cyclic shift matrix `V`: ones on the superdiagonal and at `(n-1, 0)`.
pub fn shift_matrix(n: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, n), |(i, j)| if (i + 1) % n == j { 1.0 } else { 0.0 })
}

/// Heat map as the triple product `T V T^T` with an explicit shift matrix.
pub fn heatmap_shift_product(t: &SoftIndicator) -> HeatMap {
    let tm = t.matrix();
    HeatMap(tm.dot(&shift_matrix(tm.nrows())).dot(&tm.t()))
}

fn check_dims(t: &SoftIndicator, h: &HeatMap, dist: &DistanceMatrix) -> Result<usize> {
    let n = t.len();
    if h.len() != n || dist.len() != n {
        return Err(Error::invalid(format!(
            "dimension mismatch: T is {n}, H is {}, D is {}",
            h.len(),
            dist.len()
        )));
    }
    Ok(n)
}

fn row_penalty(t: &Array2<f64>) -> f64 {
    t.sum_axis(Axis(1)).iter().map(|r| (r - 1.0).powi(2)).sum()
}

/// Evaluates the surrogate loss term by term:
/// `lambda1 * sum_i (row_i - 1)^2 + lambda2 * trace(H) + <D, H>`.
pub fn surrogate_loss(
    t: &SoftIndicator,
    h: &HeatMap,
    dist: &DistanceMatrix,
    weights: LossWeights,
) -> Result<LossBreakdown> {
    let n = check_dims(t, h, dist)?;
    let row_penalty = row_penalty(t.matrix());
    let self_loop: f64 = (0..n).map(|i| h.get(i, i)).sum();
    let expected_length: f64 = dist
        .matrix()
        .iter()
        .zip(h.matrix().iter())
        .map(|(d, v)| d * v)
        .sum();
    let total =
        weights.lambda1 * row_penalty + weights.lambda2 * self_loop + expected_length;
    Ok(LossBreakdown {
        row_penalty,
        self_loop,
        expected_length,
        total,
    })
}

/// The same loss with the self-loop penalty folded into the distance matrix:
/// `lambda1 * sum_i (row_i - 1)^2 + <D + lambda2 I, H>`.
pub fn surrogate_loss_compact(
    t: &SoftIndicator,
    h: &HeatMap,
    dist: &DistanceMatrix,
    weights: LossWeights,
) -> Result<f64> {
    check_dims(t, h, dist)?;
    let shifted = penalized_distances(dist, weights.lambda2);
    let inner: f64 = shifted
        .iter()
        .zip(h.matrix().iter())
        .map(|(d, v)| d * v)
        .sum();
    Ok(weights.lambda1 * row_penalty(t.matrix()) + inner)
}

fn penalized_distances(dist: &DistanceMatrix, lambda2: f64) -> Array2<f64> {
    let mut a = dist.matrix().clone();
    a.diag_mut().mapv_inplace(|v| v + lambda2);
    a
}

/// Loss and gradient with respect to the logits, evaluated together.
pub fn loss_and_gradient(
    logits: &Logits,
    dist: &DistanceMatrix,
    weights: LossWeights,
) -> Result<(LossBreakdown, Array2<f64>)> {
    let n = logits.len();
    if dist.len() != n {
        return Err(Error::invalid(format!(
            "dimension mismatch: logits are {n}, D is {}",
            dist.len()
        )));
    }
    let t = column_softmax(logits)?;
    let tm = t.matrix();
    let h = indicator_to_heatmap(&t);
    let loss = surrogate_loss(&t, &h, dist, weights)?;

    // d<A, T V T^T>/dT = A (T V^T) + A^T (T V)
    let a = penalized_distances(dist, weights.lambda2);
    let mut grad_t = a.dot(&shift_columns_left(tm)) + a.t().dot(&shift_columns_right(tm));

    let rows = tm.sum_axis(Axis(1));
    for (i, mut row) in grad_t.axis_iter_mut(Axis(0)).enumerate() {
        let g = 2.0 * weights.lambda1 * (rows[i] - 1.0);
        row.mapv_inplace(|v| v + g);
    }

    // column softmax backward: dS = T * (dT - <T_col, dT_col>)
    let mut grad = grad_t;
    for (mut g, tc) in grad.axis_iter_mut(Axis(1)).zip(tm.axis_iter(Axis(1))) {
        let dot: f64 = g.iter().zip(tc.iter()).map(|(a, b)| a * b).sum();
        g.zip_mut_with(&tc, |gv, &tv| *gv = tv * (*gv - dot));
    }

    if !loss.total.is_finite() || grad.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("loss or gradient is not finite".into()));
    }
    Ok((loss, grad))
}

/// Analytic gradient of the total surrogate loss with respect to each logit.
pub fn loss_gradient(
    logits: &Logits,
    dist: &DistanceMatrix,
    weights: LossWeights,
) -> Result<Array2<f64>> {
    loss_and_gradient(logits, dist, weights).map(|(_, g)| g)
}

/// Total loss at `logits`, as used by finite-difference checks.
pub fn loss_at(logits: &Logits, dist: &DistanceMatrix, weights: LossWeights) -> Result<f64> {
    let t = column_softmax(logits)?;
    let h = indicator_to_heatmap(&t);
    Ok(surrogate_loss(&t, &h, dist, weights)?.total)
}

/// Reads off `q_k`, the city occupying position `k`, from a permutation
/// matrix. The directed cycle `q_0 -> q_1 -> ... -> q_{n-1} -> q_0` is the
/// support of the corresponding heat map.
pub fn permutation_to_cycle(t: &SoftIndicator) -> Result<Vec<usize>> {
    let tm = t.matrix();
    let n = tm.nrows();
    let mut q = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for (k, col) in tm.axis_iter(Axis(1)).enumerate() {
        let mut hit = None;
        for (i, &v) in col.iter().enumerate() {
            if (v - 1.0).abs() <= PERMUTATION_TOL {
                if hit.is_some() {
                    return Err(Error::invalid(format!("column {k} has more than one unit entry")));
                }
                hit = Some(i);
            } else if v.abs() > PERMUTATION_TOL {
                return Err(Error::invalid(format!("entry ({i}, {k}) = {v} is neither 0 nor 1")));
            }
        }
        let i = hit.ok_or_else(|| Error::invalid(format!("column {k} has no unit entry")))?;
        if std::mem::replace(&mut used[i], true) {
            return Err(Error::invalid(format!("row {i} has more than one unit entry")));
        }
        q.push(i);
    }
    Ok(q)
}

/// Returns the cycle (starting at city 0) if `h` is the 0/1 adjacency of a
/// single directed Hamiltonian cycle, `None` otherwise.
pub fn verify_hamiltonian_heatmap(h: &HeatMap) -> Option<Vec<usize>> {
    let n = h.len();
    let mut succ = vec![usize::MAX; n];
    let mut in_deg = vec![0usize; n];
    for ((i, j), &v) in h.matrix().indexed_iter() {
        if (v - 1.0).abs() <= PERMUTATION_TOL {
            if i == j || succ[i] != usize::MAX {
                return None;
            }
            succ[i] = j;
            in_deg[j] += 1;
        } else if v.abs() > PERMUTATION_TOL {
            return None;
        }
    }
    if succ.contains(&usize::MAX) || in_deg.iter().any(|&d| d != 1) {
        return None;
    }
    let mut cycle = Vec::with_capacity(n);
    let mut c = 0;
    for _ in 0..n {
        cycle.push(c);
        c = succ[c];
    }
    (c == 0 && {
        let mut seen = vec![false; n];
        cycle.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
    })
    .then_some(cycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;
    use ndarray::array;

    fn close(a: &Array2<f64>, b: &Array2<f64>, tol: f64) -> bool {
        a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn softmax_uniform_and_shift_invariant() {
        let t = column_softmax(&Logits::zeros(4)).unwrap();
        assert!(t.matrix().iter().all(|&v| (v - 0.25).abs() < 1e-15));

        let s = array![[0.3, -1.0, 2.0], [1.5, 0.0, -0.5], [0.2, 0.7, 0.1]];
        let mut shifted = s.clone();
        shifted.column_mut(1).mapv_inplace(|v| v + 123.0);
        let a = column_softmax(&Logits::new(s).unwrap()).unwrap();
        let b = column_softmax(&Logits::new(shifted).unwrap()).unwrap();
        assert!(close(a.matrix(), b.matrix(), 1e-12));
    }

    #[test]
    fn softmax_saturates() {
        let mut s = Array2::zeros((5, 5));
        for k in 0..5 {
            s[[(k * 2) % 5, k]] = 50.0;
        }
        let t = column_softmax(&Logits::new(s).unwrap()).unwrap();
        for k in 0..5 {
            assert!(t.matrix()[[(k * 2) % 5, k]] > 1.0 - 1e-9);
        }
    }

    #[test]
    fn softmax_rejects_non_finite() {
        assert!(Logits::new(array![[0.0, f64::NAN], [0.0, 0.0]]).is_err());
    }

    #[test]
    fn identity_gives_shift_matrix() {
        let t = SoftIndicator::from_permutation(&[0, 1, 2]).unwrap();
        let h = indicator_to_heatmap(&t);
        assert_eq!(h.matrix(), &array![[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]);
    }

    #[test]
    fn uniform_indicator_gives_uniform_heatmap() {
        let n = 6;
        let t = SoftIndicator::new(Array2::from_elem((n, n), 1.0 / n as f64)).unwrap();
        let h = indicator_to_heatmap(&t);
        assert!(h.matrix().iter().all(|&v| (v - 1.0 / n as f64).abs() < 1e-15));
    }

    #[test]
    fn permutation_columns_give_directed_cycle() {
        // columns e1, e3, e2, e4 in 1-based terms
        let t = SoftIndicator::from_permutation(&[0, 2, 1, 3]).unwrap();
        let h = indicator_to_heatmap(&t);
        let mut expected = Array2::zeros((4, 4));
        for (a, b) in [(0, 2), (2, 1), (1, 3), (3, 0)] {
            expected[[a, b]] = 1.0;
        }
        assert_eq!(h.matrix(), &expected);
        assert_eq!(heatmap_outer_products(&t).matrix(), &expected);
    }

    #[test]
    fn figure_pattern_edges() {
        // 1-based q_{k-1}=3, q_k=n-2, q_{k+1}=2, q_{n-1}=1, q_n=n, q_1=4 with n=8, k=4
        let n = 8;
        let one_based = [4, 5, 3, 6, 2, 7, 1, 8];
        let q: Vec<usize> = one_based.iter().map(|c| c - 1).collect();
        let t = SoftIndicator::from_permutation(&q).unwrap();
        assert_eq!(permutation_to_cycle(&t).unwrap(), q);
        let h = indicator_to_heatmap(&t);
        for (a, b) in [(3, n - 2), (n - 2, 2), (1, n), (n, 4)] {
            assert_eq!(h.get(a - 1, b - 1), 1.0, "edge {a}->{b}");
        }
    }

    #[test]
    fn identity_cycle_order() {
        let t = SoftIndicator::from_permutation(&[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(permutation_to_cycle(&t).unwrap(), vec![0, 1, 2, 3, 4]);
        let h = indicator_to_heatmap(&t);
        assert_eq!(verify_hamiltonian_heatmap(&h), Some(vec![0, 1, 2, 3, 4]));
    }

    #[test]
    fn non_permutation_is_rejected() {
        let t = SoftIndicator::new(Array2::from_elem((3, 3), 1.0 / 3.0)).unwrap();
        assert!(permutation_to_cycle(&t).is_err());
        let h = indicator_to_heatmap(&t);
        assert_eq!(verify_hamiltonian_heatmap(&h), None);
    }

    #[test]
    fn two_subtours_are_not_hamiltonian() {
        let mut h = Array2::zeros((6, 6));
        for (a, b) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] {
            h[[a, b]] = 1.0;
        }
        assert_eq!(verify_hamiltonian_heatmap(&HeatMap::new(h).unwrap()), None);
    }

    #[test]
    fn uniform_loss_closed_form() {
        let inst = Instance::random(7, 3).unwrap();
        let d = inst.distance_matrix();
        let n = 7.0;
        let t = SoftIndicator::new(Array2::from_elem((7, 7), 1.0 / n)).unwrap();
        let h = indicator_to_heatmap(&t);
        let l = surrogate_loss(&t, &h, &d, LossWeights::new(10.0, 10.0).unwrap()).unwrap();
        assert!(l.row_penalty.abs() < 1e-12);
        assert!((l.self_loop - 1.0).abs() < 1e-12);
        assert!((l.expected_length - d.matrix().sum() / n).abs() < 1e-12);
    }

    #[test]
    fn row_penalty_counts_squared_excess() {
        // row 0 sums to 1.5, row 1 to 0.5, row 2 to 1
        let t = SoftIndicator::new(array![[1.0, 0.5, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 1.0]])
            .unwrap();
        let h = indicator_to_heatmap(&t);
        let d = Instance::random(3, 1).unwrap().distance_matrix();
        let l = surrogate_loss(&t, &h, &d, LossWeights::new(1.0, 0.0).unwrap()).unwrap();
        assert!((l.row_penalty - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let t = SoftIndicator::from_permutation(&[0, 1, 2]).unwrap();
        let h = indicator_to_heatmap(&t);
        let d = Instance::random(4, 0).unwrap().distance_matrix();
        assert!(surrogate_loss(&t, &h, &d, LossWeights::new(1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn zero_weights_and_zero_distances_give_zero_gradient() {
        let d = DistanceMatrix::from_matrix(Array2::zeros((5, 5))).unwrap();
        let s = Array2::from_shape_fn((5, 5), |(i, j)| ((i * 7 + j * 3) % 5) as f64 * 0.3);
        let g = loss_gradient(&Logits::new(s).unwrap(), &d, LossWeights::new(0.0, 0.0).unwrap())
            .unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn heatmap_text_round_trip() {
        let s = Array2::from_shape_fn((4, 4), |(i, j)| (i as f64 - j as f64) * 0.37);
        let t = column_softmax(&Logits::new(s).unwrap()).unwrap();
        let h = indicator_to_heatmap(&t);
        let back = HeatMap::from_text(&h.to_text()).unwrap();
        assert_eq!(back, h);
        assert!(HeatMap::from_text("UTSP-HEATMAP v1\n2\n1 2\n").is_err());
        assert!(HeatMap::from_text("UTSP-HEATMAP v1\n2\n1 2\n3\n").is_err());
    }
}
