//! Arithmetic on the unit torus `[0, 1)` and the point-set container.

use std::fmt;

use crate::error::{Error, Result};

/// A point of the unit torus. The wrapped value always lies in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct TorusPoint(f64);

impl TorusPoint {
    pub const ZERO: TorusPoint = TorusPoint(0.0);

    /// Wraps `x` onto the torus.
    pub fn new(x: f64) -> Result<Self> {
        frac(x)
    }

    /// Wraps a value known to be finite. Non-finite input maps to zero.
    pub(crate) fn wrap(x: f64) -> Self {
        TorusPoint(wrap_unit(x))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<TorusPoint> for f64 {
    fn from(p: TorusPoint) -> f64 {
        p.0
    }
}

#[inline]
fn wrap_unit(x: f64) -> f64 {
    if !x.is_finite() {
        return 0.0;
    }
    let r = x - x.floor();
    // x - floor(x) rounds to 1.0 for tiny negative x
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Fractional part `x - floor(x)`, in `[0, 1)`.
pub fn frac(x: f64) -> Result<TorusPoint> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    Ok(TorusPoint(wrap_unit(x)))
}

/// Distance to the nearest integer of `x - y`, in `[0, 1/2]`.
#[inline]
pub fn torus_dist(x: TorusPoint, y: TorusPoint) -> f64 {
    raw_dist(x.0, y.0)
}

/// `torus_dist` on raw values already in `[0, 1)`. The pair counters all go
/// through this so that their floating-point comparisons agree bit for bit.
#[inline]
pub(crate) fn raw_dist(x: f64, y: f64) -> f64 {
    let d = (x - y).abs();
    d.min(1.0 - d)
}

/// Number of dyadic grid points `j / 2^level`, `0 <= j < 2^level`, inside the
/// open torus interval `(x - radius, x + radius)`.
pub fn box_count(x: TorusPoint, level: u32, radius: f64) -> Result<u64> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::NonPositiveRadius(radius));
    }
    if level > 62 {
        return Err(Error::InvalidParameter(format!("dyadic level {level} too large")));
    }
    let cells = 1u64 << level;
    if 2.0 * radius >= 1.0 {
        return Ok(cells);
    }
    // The interval is shorter than the torus, so each residue class has at most
    // one representative k in it; count integers k with k/2^level strictly inside.
    let scale = cells as f64;
    let inside = |k: i64| {
        let offset = k as f64 / scale - x.0;
        offset > -radius && offset < radius
    };
    let lo = ((x.0 - radius) * scale).floor() as i64;
    let hi = ((x.0 + radius) * scale).ceil() as i64;
    if hi - lo <= 4 {
        return Ok((lo..=hi).filter(|&k| inside(k)).count() as u64);
    }
    let mut count = (hi - lo - 3) as u64;
    count += [lo, lo + 1, hi - 1, hi].iter().filter(|&&k| inside(k)).count() as u64;
    Ok(count)
}

/// Finite ordered sample on the torus, kept in generation order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet {
    values: Vec<f64>,
}

impl PointSet {
    /// Builds a point set from raw values, wrapping each onto the torus.
    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Result<Self> {
        let values = values
            .into_iter()
            .map(|v| frac(v).map(f64::from))
            .collect::<Result<Vec<_>>>()?;
        Ok(PointSet { values })
    }

    /// Caller guarantees every value is already in `[0, 1)`.
    pub(crate) fn from_unit_values(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| (0.0..1.0).contains(v)));
        PointSet { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> Option<TorusPoint> {
        self.values.get(i).copied().map(TorusPoint)
    }

    pub fn iter(&self) -> impl Iterator<Item = TorusPoint> + '_ {
        self.values.iter().copied().map(TorusPoint)
    }

    /// The first `n` points (the whole set if `n >= len`).
    pub fn prefix(&self, n: usize) -> PointSet {
        PointSet { values: self.values[..n.min(self.values.len())].to_vec() }
    }

    pub(crate) fn prefix_values(&self, n: usize) -> &[f64] {
        &self.values[..n.min(self.values.len())]
    }

    /// Values in increasing order.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        crate::par::sort_f64(&mut v);
        v
    }

    /// Adds `shift` to every point modulo 1.
    pub fn shifted(&self, shift: f64) -> Result<PointSet> {
        PointSet::from_values(self.values.iter().map(|v| v + shift))
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl FromIterator<TorusPoint> for PointSet {
    fn from_iter<I: IntoIterator<Item = TorusPoint>>(iter: I) -> Self {
        PointSet { values: iter.into_iter().map(f64::from).collect() }
    }
}
