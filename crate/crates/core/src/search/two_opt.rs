use rand::seq::SliceRandom;

use crate::instance::DistanceMatrix;
use crate::rng::{self, Rng};
use crate::tour::Tour;

/// Smallest length decrease that counts as an improvement.
pub const IMPROVE_EPS: f64 = 1e-10;

/// Uniformly random tour from a seeded shuffle.
pub fn random_tour(n: usize, seed: u64) -> Tour {
    random_tour_with(n, &mut rng::seeded(seed))
}

pub(crate) fn random_tour_with(n: usize, rng: &mut Rng) -> Tour {
    assert!(n >= 3, "a tour needs at least 3 cities");
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    Tour::from_order_unchecked(order)
}

/// Length change of the 2-opt move that replaces edges
/// `(order[i], order[i+1])` and `(order[j], order[j+1])`; positive is better.
#[inline]
pub fn two_opt_gain(dist: &DistanceMatrix, order: &[usize], i: usize, j: usize) -> f64 {
    let n = order.len();
    let (a, b) = (order[i], order[i + 1]);
    let (c, d) = (order[j], order[(j + 1) % n]);
    dist.get(a, b) + dist.get(c, d) - dist.get(a, c) - dist.get(b, d)
}

/// First-improvement 2-opt sweeps until no move gains more than
/// [`IMPROVE_EPS`].
pub fn two_opt_improve(dist: &DistanceMatrix, tour: &Tour) -> Tour {
    let mut t = tour.clone();
    let n = t.len();
    loop {
        let mut improved = false;
        for i in 0..n - 2 {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if two_opt_gain(dist, t.order(), i, j) > IMPROVE_EPS {
                    t.reverse_segment(i + 1, j);
                    improved = true;
                }
            }
        }
        if !improved {
            return t;
        }
    }
}

/// Exhaustive check for an improving 2-opt move.
pub fn has_improving_two_opt(dist: &DistanceMatrix, tour: &Tour) -> bool {
    let n = tour.len();
    (0..n - 2).any(|i| {
        (i + 2..n).any(|j| !(i == 0 && j == n - 1) && two_opt_gain(dist, tour.order(), i, j) > IMPROVE_EPS)
    })
}
