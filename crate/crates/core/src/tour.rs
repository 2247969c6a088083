use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::DistanceMatrix;

pub const TOUR_HEADER: &str = "UTSP-TOUR v1";

/// A Hamiltonian cycle stored as a visiting order plus its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tour {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl Tour {
    /// Builds a tour, rejecting anything that is not a permutation of `0..n`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n < 3 {
            return Err(Error::invalid(format!("a tour needs at least 3 cities, got {n}")));
        }
        let mut position = vec![usize::MAX; n];
        for (k, &c) in order.iter().enumerate() {
            if c >= n {
                return Err(Error::invalid(format!("city {c} out of range for n = {n}")));
            }
            if position[c] != usize::MAX {
                return Err(Error::invalid(format!("city {c} visited twice")));
            }
            position[c] = k;
        }
        Ok(Tour { order, position })
    }

    /// `0, 1, ..., n-1`.
    pub fn identity(n: usize) -> Result<Self> {
        Tour::new((0..n).collect())
    }

    pub(crate) fn from_order_unchecked(order: Vec<usize>) -> Self {
        let mut position = vec![0; order.len()];
        for (k, &c) in order.iter().enumerate() {
            position[c] = k;
        }
        Tour { order, position }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, city: usize) -> usize {
        self.position[city]
    }

    #[inline]
    pub fn succ(&self, city: usize) -> usize {
        let k = self.position[city] + 1;
        self.order[if k == self.order.len() { 0 } else { k }]
    }

    #[inline]
    pub fn pred(&self, city: usize) -> usize {
        let k = self.position[city];
        self.order[if k == 0 { self.order.len() - 1 } else { k - 1 }]
    }

    /// Checks that `order` and `position` are mutually inverse permutations.
    pub fn is_consistent(&self) -> bool {
        let n = self.order.len();
        self.position.len() == n
            && self
                .order
                .iter()
                .enumerate()
                .all(|(k, &c)| c < n && self.position[c] == k)
    }

    /// Reverses the tour segment between positions `i` and `j` inclusive.
    pub(crate) fn reverse_segment(&mut self, mut i: usize, mut j: usize) {
        while i < j {
            self.order.swap(i, j);
            self.position[self.order[i]] = i;
            self.position[self.order[j]] = j;
            i += 1;
            j -= 1;
        }
    }

    /// Undirected edges `(min, max)` of the cycle, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.order.len();
        let mut e: Vec<_> = (0..n)
            .map(|k| {
                let a = self.order[k];
                let b = self.order[(k + 1) % n];
                (a.min(b), a.max(b))
            })
            .collect();
        e.sort_unstable();
        e
    }

    /// Rotation starting at city 0, oriented towards the smaller neighbour.
    /// Two tours describe the same cycle iff their canonical orders match.
    pub fn canonical(&self) -> Vec<usize> {
        let n = self.order.len();
        let start = self.position[0];
        let fwd = self.order[(start + 1) % n];
        let bwd = self.order[(start + n - 1) % n];
        if fwd <= bwd {
            (0..n).map(|k| self.order[(start + k) % n]).collect()
        } else {
            (0..n).map(|k| self.order[(start + n - k) % n]).collect()
        }
    }

    /// Total length of the closed tour under `dist`.
    pub fn length(&self, dist: &DistanceMatrix) -> Result<f64> {
        tour_length(dist, self)
    }

    pub fn to_text(&self, length: f64) -> String {
        let mut out = String::new();
        writeln!(out, "{TOUR_HEADER}").unwrap();
        writeln!(out, "{}", self.len()).unwrap();
        let cities: Vec<String> = self.order.iter().map(|c| c.to_string()).collect();
        writeln!(out, "{}", cities.join(" ")).unwrap();
        writeln!(out, "{length:?}").unwrap();
        out
    }

    /// Parses a `UTSP-TOUR v1` document into the tour and its recorded length.
    pub fn from_text(text: &str) -> Result<(Tour, f64)> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        if lines.len() != 4 {
            return Err(Error::parse(
                lines.last().map_or(1, |l| l.0),
                format!("expected 4 non-empty lines, found {}", lines.len()),
            ));
        }
        if lines[0].1 != TOUR_HEADER {
            return Err(Error::parse(lines[0].0, format!("expected header `{TOUR_HEADER}`")));
        }
        let n: usize = lines[1]
            .1
            .parse()
            .map_err(|_| Error::parse(lines[1].0, "bad city count"))?;
        let order = lines[2]
            .1
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::parse(lines[2].0, "bad city index"))?;
        if order.len() != n {
            return Err(Error::parse(
                lines[2].0,
                format!("declared {n} cities but the order lists {}", order.len()),
            ));
        }
        let length: f64 = lines[3]
            .1
            .parse()
            .map_err(|_| Error::parse(lines[3].0, "bad tour length"))?;
        let tour = Tour::new(order).map_err(|e| Error::parse(lines[2].0, e.to_string()))?;
        Ok((tour, length))
    }
}

/// Sum of `d[order[k]][order[k+1]]` around the cycle.
pub fn tour_length(dist: &DistanceMatrix, tour: &Tour) -> Result<f64> {
    if dist.len() != tour.len() {
        return Err(Error::invalid(format!(
            "tour has {} cities but the distance matrix has {}",
            tour.len(),
            dist.len()
        )));
    }
    Ok(order_length(dist, tour.order()))
}

pub(crate) fn order_length(dist: &DistanceMatrix, order: &[usize]) -> f64 {
    let n = order.len();
    let mut total = 0.0;
    for k in 0..n - 1 {
        total += dist.get(order[k], order[k + 1]);
    }
    total + dist.get(order[n - 1], order[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;

    fn square() -> DistanceMatrix {
        Instance::new(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
            .unwrap()
            .distance_matrix()
    }

    #[test]
    fn square_perimeter_and_crossing() {
        let d = square();
        let perim = Tour::new(vec![0, 1, 2, 3]).unwrap();
        assert_eq!(tour_length(&d, &perim).unwrap(), 4.0);
        let cross = Tour::new(vec![0, 2, 1, 3]).unwrap();
        let len = tour_length(&d, &cross).unwrap();
        assert!((len - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let d = square();
        let t = Tour::identity(5).unwrap();
        assert!(matches!(tour_length(&d, &t), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Tour::new(vec![0, 1, 1]).is_err());
        assert!(Tour::new(vec![0, 1, 3]).is_err());
        assert!(Tour::new(vec![0, 1]).is_err());
    }

    #[test]
    fn succ_pred_and_canonical() {
        let t = Tour::new(vec![2, 0, 3, 1]).unwrap();
        assert_eq!(t.succ(1), 2);
        assert_eq!(t.pred(2), 1);
        assert_eq!(t.canonical(), vec![0, 2, 1, 3]);
        let rev = Tour::new(vec![1, 3, 0, 2]).unwrap();
        assert_eq!(rev.canonical(), t.canonical());
        assert_eq!(rev.edges(), t.edges());
    }

    #[test]
    fn text_round_trip() {
        let t = Tour::new(vec![3, 1, 0, 2]).unwrap();
        let text = t.to_text(3.25);
        let (back, len) = Tour::from_text(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(len, 3.25);
        assert!(Tour::from_text("UTSP-TOUR v1\n3\n0 1\n1.0\n").is_err());
        assert!(Tour::from_text("UTSP-TOUR v1\n3\n0 1 1\n1.0\n").is_err());
    }
}
