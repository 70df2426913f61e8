//! Fourier coefficients `c_r = E[exp(2 pi i r Y)]` of step laws and the
//! n-fold convolution profile `sup_x |G_n(x) - x|`, where `G_n` is the CDF of
//! the fractional part of `Y_1 + ... + Y_n`.
//!
//! Coefficients are evaluated in closed form. The convolution works on a
//! uniform circular grid of `K` cells carrying a piecewise-constant density.
//! A draw from such a density is `(J + U) / K` with `J` the cell index and `U`
//! uniform on `[0, 1)`, so the n-fold sum is `(J_1 + ... + J_n + V) / K` with
//! `V` Irwin-Hall. Its exact cell masses are the n-fold discrete convolution
//! of the cell masses further convolved with the law of `floor(V)` (Eulerian
//! numbers over `n!`). Both convolutions happen in the frequency domain, so
//! the grid CDF is exact up to rounding and each `n` costs two FFTs.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::StepDistribution;

pub const DEFAULT_GRID: usize = 1 << 14;
pub const DEFAULT_RMAX: u64 = 64;
/// Deviations below this are at the level of rounding noise and are not fit.
pub const FIT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierCoefficient {
    pub r: i64,
    pub value: Complex64,
}

impl FourierCoefficient {
    pub fn abs(&self) -> f64 {
        self.value.norm()
    }
}

/// `exp(2 pi i t)` with `t` reduced mod 1 first.
fn unit(t: f64) -> Complex64 {
    let t = t - t.floor();
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 { 1.0 } else { x.sin() / x }
}

pub fn fourier_coeff(step: &StepDistribution, r: i64) -> Result<FourierCoefficient> {
    if r == 0 {
        return Err(Error::InvalidParameter("c_0 is identically 1; r must be non-zero".into()));
    }
    step.validate()?;
    let rf = r as f64;
    let value = match step {
        StepDistribution::UniformInterval { a, b } => {
            let width = b - a;
            // mean of exp(2 pi i r y) over [a, b)
            unit(rf * (a + b) / 2.0) * sinc(PI * rf * width)
        }
        StepDistribution::TwoPoint { atom1, atom2, p } => unit(rf * atom1) * *p + unit(rf * atom2) * (1.0 - p),
        StepDistribution::Constant { c } => unit(rf * c),
        StepDistribution::TabulatedDensity { grid } => {
            let m = grid.len() as f64;
            let total: f64 = grid.iter().sum();
            let cell = sinc(PI * rf / m);
            grid.iter()
                .enumerate()
                .map(|(j, &f)| unit(rf * (j as f64 + 0.5) / m) * (f / total))
                .sum::<Complex64>()
                * cell
        }
    };
    Ok(FourierCoefficient { r, value })
}

/// `max_{1 <= |r| <= r_max} |c_r|`. The true supremum runs over every
/// `r != 0`; the built-in laws have `|c_r|` non-increasing in `|r|`, so a
/// small `r_max` is exact for them.
pub fn sup_fourier(step: &StepDistribution, r_max: u64) -> Result<f64> {
    if r_max == 0 {
        return Err(Error::InvalidParameter("r_max must be >= 1".into()));
    }
    let mut best = 0.0f64;
    for r in 1..=r_max as i64 {
        best = best.max(fourier_coeff(step, r)?.abs()).max(fourier_coeff(step, -r)?.abs());
    }
    Ok(best)
}

/// Discretised step density and its spectrum on a circular grid.
pub struct ConvolutionGrid {
    size: usize,
    spectrum: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    base_max_density: f64,
}

/// One row of an n-fold profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldStats {
    pub n: usize,
    pub sup_dev: f64,
    /// `max_x (G_n(x) - x) - min_x (G_n(x) - x)`; unlike `sup_dev` this never
    /// grows with `n`.
    pub oscillation: f64,
    /// Total mass of the n-fold grid density.
    pub mass: f64,
    /// Largest value of the n-fold grid density.
    pub max_density: f64,
}

impl ConvolutionGrid {
    pub fn new(step: &StepDistribution, grid_size: usize) -> Result<Self> {
        step.validate()?;
        if !step.has_density() {
            return Err(Error::NoDensity(step.name()));
        }
        if grid_size < 256 || !grid_size.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("grid size must be a power of two >= 256, got {grid_size}")));
        }
        let k = grid_size as f64;
        let mut cdf_prev = 0.0;
        let mut masses = Vec::with_capacity(grid_size);
        for j in 0..grid_size {
            let c = step.cdf((j + 1) as f64 / k)?;
            masses.push(Complex64::new(c - cdf_prev, 0.0));
            cdf_prev = c;
        }
        let base_max_density = masses.iter().map(|m| m.re).fold(0.0, f64::max) * k;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid_size);
        forward.process(&mut masses);
        Ok(ConvolutionGrid {
            size: grid_size,
            spectrum: masses,
            forward,
            inverse: planner.plan_fft_inverse(grid_size),
            base_max_density,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Largest value of the one-fold grid density.
    pub fn base_max_density(&self) -> f64 {
        self.base_max_density
    }

    /// Cell masses of the n-fold convolution.
    pub fn fold_masses(&self, n: usize) -> Vec<f64> {
        let mut kernel = vec![Complex64::new(0.0, 0.0); self.size];
        for (t, p) in floor_irwin_hall(n).into_iter().enumerate() {
            kernel[t % self.size].re += p;
        }
        self.forward.process(&mut kernel);
        let mut buf: Vec<Complex64> = self
            .spectrum
            .iter()
            .zip(&kernel)
            .map(|(c, k)| c.powu(n as u32) * k)
            .collect();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.size as f64;
        buf.into_iter().map(|c| c.re * scale).collect()
    }

    pub fn fold_stats(&self, n: usize) -> FoldStats {
        let masses = self.fold_masses(n);
        let k = self.size as f64;
        let mut cum = 0.0;
        let (mut hi, mut lo) = (0.0f64, 0.0f64);
        let mut max_density = 0.0f64;
        for (j, &m) in masses.iter().enumerate() {
            cum += m;
            let dev = cum - (j + 1) as f64 / k;
            hi = hi.max(dev);
            lo = lo.min(dev);
            max_density = max_density.max(m * k);
        }
        FoldStats { n, sup_dev: hi.max(-lo), oscillation: hi - lo, mass: cum, max_density }
    }
}

/// `P(floor(U_1 + ... + U_n) = t)` for `t = 0..n`, i.e. the Eulerian numbers
/// `A(n, t) / n!`, built row by row without forming `n!`.
fn floor_irwin_hall(n: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for m in 2..=n {
        let mf = m as f64;
        let mut next = vec![0.0; m];
        for (k, slot) in next.iter_mut().enumerate() {
            let stay = if k < row.len() { (k + 1) as f64 * row[k] } else { 0.0 };
            let up = if k > 0 { (mf - k as f64) * row[k - 1] } else { 0.0 };
            *slot = (stay + up) / mf;
        }
        row = next;
    }
    row
}

/// `sup_x |G_n(x) - x|` on a grid of `grid_size` cells.
pub fn nfold_cdf_deviation(step: &StepDistribution, n: usize, grid_size: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("fold count must be >= 1".into()));
    }
    Ok(ConvolutionGrid::new(step, grid_size)?.fold_stats(n).sup_dev)
}

/// Profile for several fold counts on one grid.
pub fn nfold_profile(step: &StepDistribution, ns: &[usize], grid_size: usize) -> Result<Vec<FoldStats>> {
    if ns.contains(&0) {
        return Err(Error::InvalidParameter("fold count must be >= 1".into()));
    }
    let grid = ConvolutionGrid::new(step, grid_size)?;
    Ok(crate::par::map_indexed(ns.len(), |i| grid.fold_stats(ns[i])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceProfile {
    pub n_values: Vec<usize>,
    pub sup_devs: Vec<f64>,
    /// `exp(slope)` of the least-squares line through `(n, ln sup_dev)`.
    pub fitted_omega: f64,
    /// `exp(intercept)` of the same line.
    pub fitted_c: f64,
}

pub fn schatte_rate_fit(step: &StepDistribution, n_range: &[usize]) -> Result<ConvergenceProfile> {
    schatte_rate_fit_with_grid(step, n_range, DEFAULT_GRID)
}

/// Fits `sup_dev(n) ~ C omega^n` over `n_range`.
pub fn schatte_rate_fit_with_grid(step: &StepDistribution, n_range: &[usize], grid_size: usize) -> Result<ConvergenceProfile> {
    if n_range.len() < 3 || n_range.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("rate fit needs at least 3 increasing fold counts".into()));
    }
    let stats = nfold_profile(step, n_range, grid_size)?;
    let sup_devs: Vec<f64> = stats.iter().map(|s| s.sup_dev).collect();
    if let Some(i) = sup_devs.iter().position(|&d| d < FIT_FLOOR) {
        return Err(Error::DegenerateFit(format!(
            "sup deviation {:.3e} at n = {} is below the {FIT_FLOOR:e} floor",
            sup_devs[i], n_range[i]
        )));
    }
    let xs: Vec<f64> = n_range.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = sup_devs.iter().map(|d| d.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let fitted_omega = slope.exp();
    if !(fitted_omega > 0.0 && fitted_omega < 1.0) {
        return Err(Error::DegenerateFit(format!("no geometric decay (omega = {fitted_omega})")));
    }
    Ok(ConvergenceProfile { n_values: n_range.to_vec(), sup_devs, fitted_omega, fitted_c: intercept.exp() })
}

/// Ordinary least squares `y = slope * x + intercept`.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
