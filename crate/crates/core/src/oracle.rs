//! Exact Held–Karp dynamic program for small instances.

use crate::error::{Error, Result};
use crate::instance::DistanceMatrix;
use crate::tour::{tour_length, Tour};

/// Largest instance the exact solver accepts.
pub const MAX_EXACT_CITIES: usize = 18;

/// Optimal tour by bitmask dynamic programming over subsets of cities
/// `1..n`, with city 0 as the fixed start. `O(n^2 2^n)` time.
pub fn held_karp_exact(dist: &DistanceMatrix) -> Result<(Tour, f64)> {
    let n = dist.len();
    if n > MAX_EXACT_CITIES {
        return Err(Error::invalid(format!(
            "exact solver is limited to {MAX_EXACT_CITIES} cities, got {n}"
        )));
    }
    if n < 3 {
        return Err(Error::invalid("need at least 3 cities"));
    }
    // bit b of a mask stands for city b + 1
    let m = n - 1;
    let full = 1usize << m;
    let mut cost = vec![f64::INFINITY; full * m];
    let mut parent = vec![u8::MAX; full * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = dist.get(0, j + 1);
    }
    for mask in 1..full {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let here = cost[mask * m + j];
            if here == f64::INFINITY {
                continue;
            }
            let mut rest = !mask & (full - 1);
            while rest != 0 {
                let k = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let next = mask | (1 << k);
                let c = here + dist.get(j + 1, k + 1);
                if c < cost[next * m + k] {
                    cost[next * m + k] = c;
                    parent[next * m + k] = j as u8;
                }
            }
        }
    }

    let last_mask = full - 1;
    let (mut end, mut best) = (0, f64::INFINITY);
    for j in 0..m {
        let c = cost[last_mask * m + j] + dist.get(j + 1, 0);
        if c < best {
            best = c;
            end = j;
        }
    }

    let mut order = Vec::with_capacity(n);
    let mut mask = last_mask;
    let mut j = end;
    loop {
        order.push(j + 1);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    order.push(0);
    order.reverse();
    let tour = Tour::new(order)?;
    let length = tour_length(dist, &tour)?;
    Ok((tour, length))
}
