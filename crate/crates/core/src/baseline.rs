//! Nearest-neighbour construction followed by 2-opt.

use std::time::Instant;

use rand::Rng as _;

use crate::error::Result;
use crate::instance::DistanceMatrix;
use crate::rng;
use crate::search::{two_opt_improve, Budget};
use crate::tour::{tour_length, Tour};

/// Greedy nearest-unvisited tour from `start`; ties go to the smaller index.
pub fn nearest_neighbor_tour(dist: &DistanceMatrix, start: usize) -> Tour {
    let n = dist.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = start;
    visited[cur] = true;
    order.push(cur);
    for _ in 1..n {
        let mut next = usize::MAX;
        let mut best = f64::INFINITY;
        for (c, &seen) in visited.iter().enumerate() {
            if !seen && dist.get(cur, c) < best {
                best = dist.get(cur, c);
                next = c;
            }
        }
        visited[next] = true;
        order.push(next);
        cur = next;
    }
    Tour::from_order_unchecked(order)
}

/// Nearest-neighbour tour from a seeded random start city, improved by 2-opt.
pub fn nn_two_opt_baseline(dist: &DistanceMatrix, seed: u64) -> Result<(Tour, f64)> {
    let start = rng::seeded(seed).gen_range(0..dist.len());
    let tour = two_opt_improve(dist, &nearest_neighbor_tour(dist, start));
    let length = tour_length(dist, &tour)?;
    Ok((tour, length))
}

/// Repeats the baseline with fresh start cities until the budget is spent
/// and keeps the shortest tour. At least one run always completes.
pub fn nn_two_opt_multistart(dist: &DistanceMatrix, seed: u64, budget: Budget) -> Result<(Tour, f64)> {
    budget.validate()?;
    let deadline = budget.time_limit.map(|t| Instant::now() + t);
    let mut best: Option<(Tour, f64)> = None;
    let mut runs = 0usize;
    loop {
        if budget.max_rounds.is_some_and(|r| runs >= r)
            || (runs > 0 && deadline.is_some_and(|d| Instant::now() >= d))
        {
            break;
        }
        let (t, l) = nn_two_opt_baseline(dist, rng::derive_seed(seed, runs as u64))?;
        if best.as_ref().is_none_or(|b| l < b.1) {
            best = Some((t, l));
        }
        runs += 1;
    }
    Ok(best.expect("at least one run"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Instance;

    #[test]
    fn square_any_start() {
        let d = Instance::new(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
            .unwrap()
            .distance_matrix();
        for seed in 0..8 {
            assert_eq!(nn_two_opt_baseline(&d, seed).unwrap().1, 4.0);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let d = Instance::random(50, 3).unwrap().distance_matrix();
        assert_eq!(nn_two_opt_baseline(&d, 7).unwrap(), nn_two_opt_baseline(&d, 7).unwrap());
    }

    #[test]
    fn multistart_is_no_worse_than_first_run() {
        let d = Instance::random(60, 3).unwrap().distance_matrix();
        let first = nn_two_opt_baseline(&d, rng::derive_seed(4, 0)).unwrap().1;
        let (t, l) = nn_two_opt_multistart(&d, 4, Budget::rounds(10)).unwrap();
        assert!(l <= first);
        assert!(t.is_consistent());
    }
}
