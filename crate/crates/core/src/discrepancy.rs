//! Extreme discrepancy
//! `D_N = sup_{0 <= a < b <= 1} | #{i : x_i in [a, b)} / N - (b - a) |`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::PointSet;

/// Largest input accepted by [`discrepancy_bruteforce`].
pub const BRUTEFORCE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyResult {
    pub value: f64,
    pub n: usize,
}

/// Sorted-order formula `D_N = 1/N + max_i(i/N - x_(i)) - min_i(i/N - x_(i))`.
pub fn extreme_discrepancy(points: &PointSet) -> Result<DiscrepancyResult> {
    let n = points.len();
    if n == 0 {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let sorted = points.sorted_values();
    let nf = n as f64;
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for (i, &x) in sorted.iter().enumerate() {
        let t = (i + 1) as f64 / nf - x;
        hi = hi.max(t);
        lo = lo.min(t);
    }
    let value = (1.0 / nf + hi - lo).clamp(1.0 / nf, 1.0);
    Ok(DiscrepancyResult { value, n })
}

/// Literal supremum over the finite family of limiting intervals.
///
/// The count in `[a, b)` only changes when an endpoint crosses a sample point,
/// and between crossings the deviation is linear in `b - a`, so the supremum
/// is a limit with `a` and `b` at sample points (or at 0 and 1). Each
/// endpoint is taken both including and excluding the point it sits on.
pub fn discrepancy_bruteforce(points: &PointSet) -> Result<DiscrepancyResult> {
    let n = points.len();
    if n == 0 {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::TooManyPoints { limit: BRUTEFORCE_LIMIT, got: n });
    }
    let sorted = points.sorted_values();
    let nf = n as f64;
    let below = |v: f64| sorted.partition_point(|&x| x < v);
    let at_most = |v: f64| sorted.partition_point(|&x| x <= v);

    // (position, number of points strictly left of the interval)
    let mut lefts = vec![(0.0, 0usize)];
    for &x in &sorted {
        lefts.push((x, below(x))); // a = x, x included
        lefts.push((x, at_most(x))); // a -> x+, x excluded
    }
    // (position, number of points inside [0, b))
    let mut rights = vec![(1.0, n)];
    for &x in &sorted {
        rights.push((x, below(x))); // b = x
        rights.push((x, at_most(x))); // b -> x+
    }

    let mut best = 0.0f64;
    for &(a, left) in &lefts {
        for &(b, right) in &rights {
            if b < a || right < left {
                continue;
            }
            let dev = ((right - left) as f64 / nf - (b - a)).abs();
            best = best.max(dev);
        }
    }
    Ok(DiscrepancyResult { value: best, n })
}
