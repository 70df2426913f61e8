//! The pair-correlation statistic
//! `R_alpha(s, N) = #{(i, j): i != j, ||x_i - x_j|| <= s / N^alpha} / N^(2 - alpha)`,
//! per-point neighbour counts, and nearest-gap histograms.
//!
//! Two pair counters are provided: a literal O(N^2) scan and a sort-based
//! O(N log N) counter. Both evaluate the same floating-point distance
//! expression, so they agree exactly, ties included.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::torus::{raw_dist, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCorrParams {
    pub s: f64,
    pub alpha: f64,
}

impl PairCorrParams {
    pub fn new(s: f64, alpha: f64) -> Result<Self> {
        let p = PairCorrParams { s, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s.is_finite() && self.s > 0.0) {
            return Err(Error::InvalidParameter(format!("s must be positive, got {}", self.s)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        Ok(())
    }

    /// Window radius `s / n^alpha`.
    pub fn radius(&self, n: usize) -> f64 {
        self.s / (n as f64).powf(self.alpha)
    }

    /// Normaliser `n^(2 - alpha)`.
    pub fn normalizer(&self, n: usize) -> f64 {
        (n as f64).powf(2.0 - self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCorrResult {
    /// Ordered pairs `(i, j)`, `i != j`, within the window.
    pub pair_count: u64,
    pub value: f64,
    pub n: usize,
    pub params: PairCorrParams,
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0) || radius.is_nan() {
        return Err(Error::NonPositiveRadius(radius));
    }
    Ok(())
}

fn all_pairs(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1)
}

/// Literal evaluation over all pairs.
pub fn pair_count_naive(points: &PointSet, radius: f64) -> Result<u64> {
    check_radius(radius)?;
    let v = points.values();
    if radius >= 0.5 {
        return Ok(all_pairs(v.len()));
    }
    let mut unordered = 0u64;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if raw_dist(v[i], v[j]) <= radius {
                unordered += 1;
            }
        }
    }
    Ok(2 * unordered)
}

/// Sort-based pair count; identical to [`pair_count_naive`].
pub fn pair_count_fast(points: &PointSet, radius: f64) -> Result<u64> {
    check_radius(radius)?;
    if radius >= 0.5 {
        return Ok(all_pairs(points.len()));
    }
    let sorted = points.sorted_values();
    Ok(pair_count_sorted(&sorted, radius))
}

/// Ordered pair count on values already sorted ascending, `0 < radius < 1/2`.
///
/// For sorted positions `i < j` let `d = y_j - y_i`. The pair is within the
/// window when `d <= r` (counted from `i`, looking forward) or when
/// `1 - d <= r` (counted from `j`, looking back across zero). For `r < 1/2`
/// the two cases are disjoint, so every unordered pair is seen once.
pub(crate) fn pair_count_sorted(sorted: &[f64], radius: f64) -> u64 {
    debug_assert!(radius < 0.5);
    let unordered = par::sum_indexed(sorted.len(), |i| {
        let yi = sorted[i];
        let ahead = &sorted[i + 1..];
        let forward = ahead.partition_point(|&v| v - yi <= radius);
        let behind = &sorted[..i];
        let wrapped = behind.partition_point(|&v| 1.0 - (yi - v) <= radius);
        (forward + wrapped) as u64
    });
    2 * unordered
}

/// `R_alpha(s, N)` for the whole point set.
pub fn r_statistic(points: &PointSet, params: PairCorrParams) -> Result<PairCorrResult> {
    params.validate()?;
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let radius = params.radius(n);
    let pair_count = if radius >= 0.5 {
        all_pairs(n)
    } else {
        pair_count_sorted(&points.sorted_values(), radius)
    };
    Ok(PairCorrResult { pair_count, value: pair_count as f64 / params.normalizer(n), n, params })
}

/// `R_alpha(s, N)` for several parameter pairs on one sorted sample of size `N`.
pub(crate) fn r_statistics_sorted(sorted: &[f64], params: &[PairCorrParams]) -> Vec<PairCorrResult> {
    let n = sorted.len();
    params
        .iter()
        .map(|&p| {
            let radius = p.radius(n);
            let pair_count = if radius >= 0.5 { all_pairs(n) } else { pair_count_sorted(sorted, radius) };
            PairCorrResult { pair_count, value: pair_count as f64 / p.normalizer(n), n, params: p }
        })
        .collect()
}

/// `F(i, alpha, s, N)`: number of other points within `s / N^alpha` of point
/// `i` (1-based).
pub fn neighbor_count(points: &PointSet, i: usize, params: PairCorrParams) -> Result<u64> {
    params.validate()?;
    let n = points.len();
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let radius = params.radius(n);
    if radius >= 0.5 {
        return Ok(n as u64 - 1);
    }
    let v = points.values();
    let xi = v[i - 1];
    Ok(v.iter()
        .enumerate()
        .filter(|&(j, &xj)| j != i - 1 && raw_dist(xi, xj) <= radius)
        .count() as u64)
}

/// `F(i, alpha, s, N)` for every `i`, in the point set's order.
pub fn neighbor_counts(points: &PointSet, params: PairCorrParams) -> Result<Vec<u64>> {
    params.validate()?;
    let n = points.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let radius = params.radius(n);
    if radius >= 0.5 {
        return Ok(vec![n as u64 - 1; n]);
    }
    let mut order: Vec<usize> = (0..n).collect();
    let v = points.values();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let sorted: Vec<f64> = order.iter().map(|&k| v[k]).collect();

    let by_rank = par::map_indexed(n, |p| {
        let yp = sorted[p];
        let (behind, ahead) = (&sorted[..p], &sorted[p + 1..]);
        let forward = ahead.partition_point(|&v| v - yp <= radius);
        let forward_wrap = ahead.len() - ahead.partition_point(|&v| 1.0 - (v - yp) > radius);
        let backward = behind.len() - behind.partition_point(|&v| yp - v > radius);
        let backward_wrap = behind.partition_point(|&v| 1.0 - (yp - v) <= radius);
        (forward + forward_wrap + backward + backward_wrap) as u64
    });
    let mut counts = vec![0u64; n];
    for (rank, &orig) in order.iter().enumerate() {
        counts[orig] = by_rank[rank];
    }
    Ok(counts)
}

/// Histogram of cyclic nearest-neighbour gaps scaled by `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapHistogram {
    /// Unscaled cyclic gaps in sorted order; they sum to 1.
    pub gaps: Vec<f64>,
    /// Upper edge of the binned range `[0, upper)` in scaled units.
    pub upper: f64,
    pub counts: Vec<u64>,
    /// Scaled gaps at or above `upper`.
    pub overflow: u64,
}

impl GapHistogram {
    pub fn bin_width(&self) -> f64 {
        self.upper / self.counts.len() as f64
    }

    /// Bin frequencies followed by the overflow frequency.
    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.gaps.len() as f64;
        self.counts
            .iter()
            .chain(std::iter::once(&self.overflow))
            .map(|&c| c as f64 / total)
            .collect()
    }
}

pub const DEFAULT_GAP_UPPER: f64 = 8.0;

pub fn gap_histogram(points: &PointSet, bins: usize) -> Result<GapHistogram> {
    gap_histogram_range(points, bins, DEFAULT_GAP_UPPER)
}

pub fn gap_histogram_range(points: &PointSet, bins: usize, upper: f64) -> Result<GapHistogram> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    if bins == 0 || !(upper > 0.0) {
        return Err(Error::InvalidParameter("gap histogram needs bins >= 1 and a positive range".into()));
    }
    let sorted = points.sorted_values();
    let mut gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.push(1.0 - (sorted[n - 1] - sorted[0]));

    let width = upper / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut overflow = 0;
    for g in &gaps {
        // 1e-9 slack keeps lattice gaps off the wrong side of an edge
        let pos = g * n as f64 / width + 1e-9;
        let bin = pos.floor() as usize;
        if bin >= bins {
            overflow += 1;
        } else {
            counts[bin] += 1;
        }
    }
    Ok(GapHistogram { gaps, upper, counts, overflow })
}
