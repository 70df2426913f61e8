//! Seeded Monte Carlo harness for moments of `R_alpha(s, N)`.
//!
//! Replicate `i` of a configuration draws its point set from stream
//! `(master_seed, i)`. Every generator is prefix-consistent, so one point set
//! of the largest requested size serves all `n` values of a replicate.
//! Aggregation runs over the integer pair counts (`u128` sums of counts and
//! squared counts), which makes means and variances independent of thread
//! count and of how replicates are split between runs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{seed_serde, GeneratorKind, SeedSpec, StepDistribution, GOLDEN_STEP};
use crate::paircorr::{self, PairCorrParams};
use crate::par;
use crate::spectral::least_squares;
use crate::torus::raw_dist;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub generator: GeneratorKind,
    pub s_values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub n_values: Vec<usize>,
    pub replicates: u64,
    /// Index of the first replicate; replicates run over
    /// `first_replicate .. first_replicate + replicates`.
    #[serde(default)]
    pub first_replicate: u64,
    #[serde(with = "seed_serde")]
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be >= 1".into()));
        }
        if self.s_values.is_empty() || self.alpha_values.is_empty() || self.n_values.is_empty() {
            return Err(Error::Config("s_values, alpha_values and n_values must be non-empty".into()));
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(Error::TooFewPoints { needed: 2, got: n });
        }
        for p in self.params() {
            p.validate()?;
        }
        Ok(())
    }

    /// `(s, alpha)` pairs in record order (s outer).
    pub fn params(&self) -> Vec<PairCorrParams> {
        self.s_values
            .iter()
            .flat_map(|&s| self.alpha_values.iter().map(move |&alpha| PairCorrParams { s, alpha }))
            .collect()
    }

    fn max_n(&self) -> usize {
        self.n_values.iter().copied().max().unwrap_or(0)
    }
}

/// Running sums for one `(s, alpha, n)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellStats {
    pub replicates: u64,
    pub sum: u128,
    pub sum_sq: u128,
    pub min: u64,
    pub max: u64,
}

impl Default for CellStats {
    fn default() -> Self {
        CellStats { replicates: 0, sum: 0, sum_sq: 0, min: u64::MAX, max: 0 }
    }
}

impl CellStats {
    pub fn push(&mut self, count: u64) {
        self.replicates += 1;
        self.sum += count as u128;
        self.sum_sq += (count as u128) * (count as u128);
        self.min = self.min.min(count);
        self.max = self.max.max(count);
    }

    pub fn merge(&mut self, other: &CellStats) {
        self.replicates += other.replicates;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
    }

    /// Mean pair count.
    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.replicates as f64
    }

    /// Unbiased sample variance of the pair count, from exact integer sums.
    pub fn variance(&self) -> f64 {
        let r = self.replicates as u128;
        if r < 2 {
            return 0.0;
        }
        let numer = r * self.sum_sq - self.sum * self.sum;
        numer as f64 / (r * (r - 1)) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub generator: String,
    pub s: f64,
    pub alpha: f64,
    pub n: usize,
    pub replicates: u64,
    pub mean_r: f64,
    pub var_r: f64,
    pub stderr: f64,
    pub min_r: f64,
    pub max_r: f64,
    #[serde(with = "seed_serde")]
    pub master_seed: u64,
}

impl ExperimentRecord {
    fn from_stats(cfg: &ExperimentConfig, p: PairCorrParams, n: usize, st: &CellStats) -> Self {
        let norm = p.normalizer(n);
        let var_r = st.variance() / (norm * norm);
        ExperimentRecord {
            generator: cfg.generator.label(),
            s: p.s,
            alpha: p.alpha,
            n,
            replicates: st.replicates,
            mean_r: st.mean() / norm,
            var_r,
            stderr: (var_r / st.replicates as f64).sqrt(),
            min_r: st.min as f64 / norm,
            max_r: st.max as f64 / norm,
            master_seed: cfg.master_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub records: Vec<ExperimentRecord>,
}

impl ExperimentResult {
    pub fn find(&self, s: f64, alpha: f64, n: usize) -> Option<&ExperimentRecord> {
        self.records.iter().find(|r| r.s == s && r.alpha == alpha && r.n == n)
    }
}

/// Cell keys in record order: `n` outer, then `s`, then `alpha`.
fn cell_keys(cfg: &ExperimentConfig) -> Vec<(usize, PairCorrParams)> {
    let params = cfg.params();
    cfg.n_values.iter().flat_map(|&n| params.iter().map(move |&p| (n, p))).collect()
}

/// Pair counts of one replicate, one per cell in record order.
fn replicate_counts(cfg: &ExperimentConfig, replicate: u64) -> Result<Vec<u64>> {
    let seed = SeedSpec::new(cfg.master_seed, replicate);
    let points = cfg.generator.generate(cfg.max_n(), seed)?;
    let params = cfg.params();
    let mut counts = Vec::with_capacity(cfg.n_values.len() * params.len());
    for &n in &cfg.n_values {
        let mut sorted = points.prefix_values(n).to_vec();
        par::sort_f64(&mut sorted);
        counts.extend(paircorr::r_statistics_sorted(&sorted, &params).into_iter().map(|r| r.pair_count));
    }
    Ok(counts)
}

/// Exact per-cell accumulators in record order.
pub fn estimate_cells(cfg: &ExperimentConfig) -> Result<Vec<CellStats>> {
    cfg.validate()?;
    let reps = cfg.replicates as usize;
    let per_rep = par::map_indexed(reps, |i| replicate_counts(cfg, cfg.first_replicate + i as u64));
    let mut cells = vec![CellStats::default(); cell_keys(cfg).len()];
    for counts in per_rep {
        for (cell, c) in cells.iter_mut().zip(counts?) {
            cell.push(c);
        }
    }
    Ok(cells)
}

pub fn records_from_cells(cfg: &ExperimentConfig, cells: &[CellStats]) -> ExperimentResult {
    let records = cell_keys(cfg)
        .into_iter()
        .zip(cells)
        .map(|((n, p), st)| ExperimentRecord::from_stats(cfg, p, n, st))
        .collect();
    ExperimentResult { records }
}

/// Mean, variance and range of `R_alpha(s, n)` for every cell of `cfg`.
pub fn estimate_moments(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let cells = estimate_cells(cfg)?;
    Ok(records_from_cells(cfg, &cells))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceScan {
    pub s: f64,
    pub alpha: f64,
    /// `(n, Var R)` pairs.
    pub points: Vec<(usize, f64)>,
    /// Slope of `ln Var R` against `ln n`.
    pub slope: f64,
}

/// Variance of `R` against `n` with a log-log slope, one scan per `(s, alpha)`.
pub fn variance_decay_scan(cfg: &ExperimentConfig) -> Result<Vec<VarianceScan>> {
    if cfg.n_values.len() < 3 || cfg.n_values.windows(2).any(|w| w[1] < 2 * w[0]) {
        return Err(Error::Config("variance scan needs >= 3 n values, each at least twice the previous".into()));
    }
    let result = estimate_moments(cfg)?;
    cfg.params()
        .into_iter()
        .map(|p| {
            let points: Vec<(usize, f64)> = cfg
                .n_values
                .iter()
                .map(|&n| (n, result.find(p.s, p.alpha, n).map(|r| r.var_r).unwrap_or(0.0)))
                .collect();
            if points.iter().any(|&(_, v)| !(v > 0.0)) {
                return Err(Error::DegenerateFit("zero variance in scan".into()));
            }
            let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
            let ys: Vec<f64> = points.iter().map(|&(_, v)| v.ln()).collect();
            let (slope, _) = least_squares(&xs, &ys);
            Ok(VarianceScan { s: p.s, alpha: p.alpha, points, slope })
        })
        .collect()
}

/// Frequency, over replicates and over cyclically adjacent dyadic cells, of
/// sequential jittered neighbours within `1 / (2n)` of each other.
pub fn adjacent_pair_probability(n: usize, replicates: u64, master_seed: u64) -> Result<f64> {
    adjacent_pair_frequency(n, replicates, master_seed, 0.5 / n as f64)
}

/// As [`adjacent_pair_probability`] with an explicit radius (`>= 0`).
pub fn adjacent_pair_frequency(n: usize, replicates: u64, master_seed: u64, radius: f64) -> Result<f64> {
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("n must be a power of two >= 4, got {n}")));
    }
    if replicates == 0 || !(radius >= 0.0) {
        return Err(Error::InvalidParameter("need replicates >= 1 and radius >= 0".into()));
    }
    let per_rep = par::map_indexed(replicates as usize, |r| -> Result<u64> {
        let ps = crate::generators::gen_sequential_jittered(n, SeedSpec::new(master_seed, r as u64))?;
        // one point per cell, so sorted order is cell order
        let sorted = ps.sorted_values();
        Ok((0..n).filter(|&k| raw_dist(sorted[k], sorted[(k + 1) % n]) <= radius).count() as u64)
    });
    let mut hits = 0u64;
    for h in per_rep {
        hits += h?;
    }
    Ok(hits as f64 / (n as u64 * replicates) as f64)
}

/// Monte Carlo mean of `F(i, alpha, s, n)` for every `i` (0-based in the
/// output), over replicates `0..replicates`.
pub fn neighbor_count_means(
    generator: &GeneratorKind,
    n: usize,
    params: PairCorrParams,
    replicates: u64,
    master_seed: u64,
) -> Result<Vec<f64>> {
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be >= 1".into()));
    }
    let per_rep = par::map_indexed(replicates as usize, |r| {
        let ps = generator.generate(n, SeedSpec::new(master_seed, r as u64))?;
        paircorr::neighbor_counts(&ps, params)
    });
    let mut sums = vec![0u64; n];
    for counts in per_rep {
        for (acc, c) in sums.iter_mut().zip(counts?) {
            *acc += c;
        }
    }
    Ok(sums.into_iter().map(|s| s as f64 / replicates as f64).collect())
}

/// Canned experiment families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetId {
    Thm1BatchPpc,
    Thm2iSeqNotPpc,
    Thm2iiSeqWeakPpc,
    Thm3WalkPpc,
    ExTwoPoint,
    ExKronecker,
}

impl PresetId {
    pub const ALL: [PresetId; 6] = [
        PresetId::Thm1BatchPpc,
        PresetId::Thm2iSeqNotPpc,
        PresetId::Thm2iiSeqWeakPpc,
        PresetId::Thm3WalkPpc,
        PresetId::ExTwoPoint,
        PresetId::ExKronecker,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PresetId::Thm1BatchPpc => "thm1_batch_ppc",
            PresetId::Thm2iSeqNotPpc => "thm2i_seq_not_ppc",
            PresetId::Thm2iiSeqWeakPpc => "thm2ii_seq_weak_ppc",
            PresetId::Thm3WalkPpc => "thm3_walk_ppc",
            PresetId::ExTwoPoint => "ex_two_point",
            PresetId::ExKronecker => "ex_kronecker",
        }
    }

    pub fn parse(id: &str) -> Result<Self> {
        PresetId::ALL
            .into_iter()
            .find(|p| p.name() == id)
            .ok_or_else(|| Error::UnknownPreset(id.to_string()))
    }
}

/// Acceptance band attached to a preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BandCheck {
    /// `|mean - 2s| <= max(3 stderr, max(rel_tol * 2s, abs_tol))` in every cell.
    NearTwoS { rel_tol: f64, abs_tol: f64 },
    /// Mean inside `[lo, hi]` and at least `min_sigmas` standard errors from `2s`.
    NotPpc { lo: f64, hi: f64, min_sigmas: f64 },
    /// Every replicate's `R` above `threshold`.
    AllAbove { threshold: f64 },
    /// `|R - 2s| <= weak_tol` at `alpha = weak_alpha`, largest `n`; and at
    /// `alpha = 1` some `n` with `R` outside `[lo, hi]`.
    KroneckerDichotomy { weak_alpha: f64, weak_tol: f64, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl BandCheck {
    pub fn evaluate(&self, result: &ExperimentResult) -> Vec<CheckOutcome> {
        match *self {
            BandCheck::NearTwoS { rel_tol, abs_tol } => result
                .records
                .iter()
                .map(|r| {
                    let target = 2.0 * r.s;
                    let band = (3.0 * r.stderr).max((rel_tol * target).max(abs_tol));
                    let dev = (r.mean_r - target).abs();
                    CheckOutcome {
                        label: format!("{} s={} alpha={} n={}", r.generator, r.s, r.alpha, r.n),
                        passed: dev <= band,
                        detail: format!("mean_R={:.6} target={target} |dev|={dev:.3e} band={band:.3e}", r.mean_r),
                    }
                })
                .collect(),
            BandCheck::NotPpc { lo, hi, min_sigmas } => result
                .records
                .iter()
                .map(|r| {
                    let sigmas = (r.mean_r - 2.0 * r.s).abs() / r.stderr;
                    CheckOutcome {
                        label: format!("{} s={} alpha={} n={}", r.generator, r.s, r.alpha, r.n),
                        passed: (lo..=hi).contains(&r.mean_r) && sigmas >= min_sigmas,
                        detail: format!("mean_R={:.6} in [{lo}, {hi}], {sigmas:.1} stderr from 2s", r.mean_r),
                    }
                })
                .collect(),
            BandCheck::AllAbove { threshold } => result
                .records
                .iter()
                .map(|r| CheckOutcome {
                    label: format!("{} s={} alpha={} n={}", r.generator, r.s, r.alpha, r.n),
                    passed: r.min_r > threshold,
                    detail: format!("min_R={:.3} over {} replicates, threshold {threshold}", r.min_r, r.replicates),
                })
                .collect(),
            BandCheck::KroneckerDichotomy { weak_alpha, weak_tol, lo, hi } => {
                let mut out = Vec::new();
                let weak_n = result.records.iter().filter(|r| r.alpha == weak_alpha).map(|r| r.n).max();
                for r in result.records.iter().filter(|r| r.alpha == weak_alpha && Some(r.n) == weak_n) {
                    let dev = (r.mean_r - 2.0 * r.s).abs();
                    out.push(CheckOutcome {
                        label: format!("{} alpha={} n={}", r.generator, r.alpha, r.n),
                        passed: dev <= weak_tol,
                        detail: format!("R={:.6} |R-2s|={dev:.3e} <= {weak_tol}", r.mean_r),
                    });
                }
                let strong: Vec<&ExperimentRecord> = result.records.iter().filter(|r| r.alpha == 1.0).collect();
                let outside: Vec<usize> = strong.iter().filter(|r| !(lo..=hi).contains(&r.mean_r)).map(|r| r.n).collect();
                out.push(CheckOutcome {
                    label: "alpha=1 scan leaves the PPC band".into(),
                    passed: !outside.is_empty(),
                    detail: format!("R(1,N) outside [{lo}, {hi}] at N in {outside:?}"),
                });
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub id: PresetId,
    pub configs: Vec<ExperimentConfig>,
    pub check: BandCheck,
}

pub const PRESET_SEED: u64 = 20_240_607;

fn pow2s(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|k| 1usize << k).collect()
}

fn config(generator: GeneratorKind, s: &[f64], alpha: &[f64], n: Vec<usize>, replicates: u64) -> ExperimentConfig {
    ExperimentConfig {
        generator,
        s_values: s.to_vec(),
        alpha_values: alpha.to_vec(),
        n_values: n,
        replicates,
        first_replicate: 0,
        master_seed: PRESET_SEED,
    }
}

/// The canned configuration and band for a preset id.
pub fn theorem_preset(id: &str) -> Result<Preset> {
    let id = PresetId::parse(id)?;
    let (configs, check) = match id {
        PresetId::Thm1BatchPpc => (
            [2, 8, 32]
                .iter()
                .map(|&m| config(GeneratorKind::BatchJittered { m }, &[0.5, 1.0, 2.0], &[1.0], vec![1 << 14], 100))
                .collect(),
            BandCheck::NearTwoS { rel_tol: 0.03, abs_tol: 0.0 },
        ),
        PresetId::Thm2iSeqNotPpc => (
            vec![config(GeneratorKind::SequentialJittered, &[0.5], &[1.0], vec![1 << 12], 200)],
            BandCheck::NotPpc { lo: 0.22, hi: 0.28, min_sigmas: 10.0 },
        ),
        PresetId::Thm2iiSeqWeakPpc => (
            vec![config(GeneratorKind::SequentialJittered, &[0.5, 1.0], &[0.25, 0.5, 0.75], vec![1 << 16], 50)],
            BandCheck::NearTwoS { rel_tol: 0.05, abs_tol: 0.0 },
        ),
        PresetId::Thm3WalkPpc => (
            [
                StepDistribution::UniformInterval { a: 0.0, b: 1.0 },
                StepDistribution::UniformInterval { a: 0.0, b: 0.5 },
                StepDistribution::triangle(256)?,
            ]
            .into_iter()
            .map(|step| config(GeneratorKind::RandomWalk { x1: 0.0, step }, &[1.0], &[1.0], vec![1 << 15], 50))
            .collect(),
            BandCheck::NearTwoS { rel_tol: 0.0, abs_tol: 0.06 },
        ),
        PresetId::ExTwoPoint => (
            vec![config(
                GeneratorKind::RandomWalk { x1: 0.0, step: StepDistribution::TwoPoint { atom1: 0.0, atom2: 0.5, p: 0.5 } },
                &[1.0],
                &[1.0],
                vec![1 << 12],
                10,
            )],
            BandCheck::AllAbove { threshold: 100.0 },
        ),
        PresetId::ExKronecker => (
            vec![config(
                GeneratorKind::RandomWalk { x1: 0.0, step: StepDistribution::Constant { c: GOLDEN_STEP } },
                &[1.0],
                &[0.5, 1.0],
                pow2s(8, 16),
                1,
            )],
            BandCheck::KroneckerDichotomy { weak_alpha: 0.5, weak_tol: 0.1, lo: 1.8, hi: 2.2 },
        ),
    };
    Ok(Preset { id, configs, check })
}

impl Preset {
    /// Runs every configuration and concatenates the records.
    pub fn run(&self) -> Result<ExperimentResult> {
        let mut records = Vec::new();
        for cfg in &self.configs {
            records.extend(estimate_moments(cfg)?.records);
        }
        Ok(ExperimentResult { records })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paircorr::pair_count_naive;

    fn small_cfg(generator: GeneratorKind) -> ExperimentConfig {
        ExperimentConfig {
            generator,
            s_values: vec![0.5, 1.0],
            alpha_values: vec![1.0, 0.5],
            n_values: vec![64, 256],
            replicates: 20,
            first_replicate: 0,
            master_seed: 42,
        }
    }

    #[test]
    fn record_layout_and_invariants() {
        let cfg = small_cfg(GeneratorKind::BatchJittered { m: 4 });
        let res = estimate_moments(&cfg).unwrap();
        assert_eq!(res.records.len(), 2 * 2 * 2);
        for r in &res.records {
            assert!(r.var_r >= 0.0);
            assert!(r.min_r <= r.mean_r && r.mean_r <= r.max_r);
            assert_eq!(r.replicates, 20);
            assert_eq!(r.master_seed, 42);
        }
        assert_eq!((res.records[0].n, res.records[0].s, res.records[0].alpha), (64, 0.5, 1.0));
        assert_eq!((res.records[1].n, res.records[1].s, res.records[1].alpha), (64, 0.5, 0.5));
        assert_eq!((res.records[2].n, res.records[2].s), (64, 1.0));
        assert_eq!(res.records[4].n, 256);
    }

    #[test]
    fn matches_direct_per_replicate_evaluation() {
        let cfg = small_cfg(GeneratorKind::SequentialJittered);
        let res = estimate_moments(&cfg).unwrap();
        // oracle: generate each replicate at each n separately and count by brute force
        for rec in &res.records {
            let p = PairCorrParams::new(rec.s, rec.alpha).unwrap();
            let vals: Vec<f64> = (0..cfg.replicates)
                .map(|i| {
                    let ps = cfg.generator.generate(rec.n, SeedSpec::new(cfg.master_seed, i)).unwrap();
                    pair_count_naive(&ps, p.radius(rec.n)).unwrap() as f64 / p.normalizer(rec.n)
                })
                .collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
            assert!((rec.mean_r - mean).abs() < 1e-12);
            assert!((rec.var_r - var).abs() < 1e-12 * (1.0 + var));
        }
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let cfg = small_cfg(GeneratorKind::IidUniform);
        let a = par::with_threads(Some(1), || estimate_moments(&cfg).unwrap());
        let b = par::with_threads(Some(3), || estimate_moments(&cfg).unwrap());
        let c = estimate_moments(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn split_runs_pool_exactly() {
        let mut cfg = small_cfg(GeneratorKind::BatchJittered { m: 8 });
        cfg.replicates = 100;
        let whole = estimate_cells(&cfg).unwrap();
        let mut first = cfg.clone();
        first.replicates = 50;
        let mut second = cfg.clone();
        second.replicates = 50;
        second.first_replicate = 50;
        let mut pooled = estimate_cells(&first).unwrap();
        for (p, q) in pooled.iter_mut().zip(estimate_cells(&second).unwrap()) {
            p.merge(&q);
        }
        assert_eq!(pooled, whole);
        assert_eq!(records_from_cells(&cfg, &pooled), records_from_cells(&cfg, &whole));
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_cfg(GeneratorKind::IidUniform);
        cfg.n_values = vec![1];
        assert!(estimate_moments(&cfg).is_err());
        let mut cfg = small_cfg(GeneratorKind::IidUniform);
        cfg.replicates = 0;
        assert!(estimate_moments(&cfg).is_err());
        let mut cfg = small_cfg(GeneratorKind::IidUniform);
        cfg.s_values.clear();
        assert!(estimate_moments(&cfg).is_err());
        let mut cfg = small_cfg(GeneratorKind::IidUniform);
        cfg.alpha_values = vec![1.5];
        assert!(estimate_moments(&cfg).is_err());
        // generator errors propagate
        let cfg = small_cfg(GeneratorKind::JitteredSingle { m: 100 });
        assert!(estimate_moments(&cfg).is_err());
    }

    #[test]
    fn adjacent_pairs() {
        assert!(adjacent_pair_probability(12, 5, 1).is_err());
        assert!(adjacent_pair_probability(2, 5, 1).is_err());
        assert_eq!(adjacent_pair_frequency(64, 50, 1, 0.0).unwrap(), 0.0);
        let f = adjacent_pair_probability(4, 100_000, 3).unwrap();
        assert!((0.12..=0.13).contains(&f), "{f}");
    }

    #[test]
    fn two_point_walk_mean_is_large() {
        let res = theorem_preset("ex_two_point").unwrap().run().unwrap();
        let r = &res.records[0];
        assert!(r.mean_r > 100.0);
        // oracle: two values, each pair on the same value counts; R = (c0(c0-1) + c1(c1-1)) / N
        let cfg = &theorem_preset("ex_two_point").unwrap().configs[0];
        let direct: f64 = (0..cfg.replicates)
            .map(|i| {
                let ps = cfg.generator.generate(4096, SeedSpec::new(cfg.master_seed, i)).unwrap();
                let c0 = ps.values().iter().filter(|&&v| v == 0.0).count() as f64;
                let c1 = 4096.0 - c0;
                (c0 * (c0 - 1.0) + c1 * (c1 - 1.0)) / 4096.0
            })
            .sum::<f64>()
            / cfg.replicates as f64;
        assert!((r.mean_r - direct).abs() < 1e-9);
    }

    #[test]
    fn presets_are_well_formed() {
        for id in PresetId::ALL {
            let p = theorem_preset(id.name()).unwrap();
            assert_eq!(p.id, id);
            for cfg in &p.configs {
                cfg.validate().unwrap();
            }
        }
        let weak = theorem_preset("thm2ii_seq_weak_ppc").unwrap();
        assert_eq!(weak.configs[0].alpha_values, vec![0.25, 0.5, 0.75]);
        let kr = theorem_preset("ex_kronecker").unwrap();
        assert_eq!(kr.configs[0].alpha_values, vec![0.5, 1.0]);
        assert!(matches!(
            kr.configs[0].generator,
            GeneratorKind::RandomWalk { step: StepDistribution::Constant { c }, .. } if c == GOLDEN_STEP
        ));
        let t1 = theorem_preset("thm1_batch_ppc").unwrap();
        let ms: Vec<usize> = t1
            .configs
            .iter()
            .map(|c| match c.generator {
                GeneratorKind::BatchJittered { m } => m,
                _ => 0,
            })
            .collect();
        assert_eq!(ms, vec![2, 8, 32]);
        assert_eq!(t1.configs[0].s_values, vec![0.5, 1.0, 2.0]);
        assert!(matches!(theorem_preset("thm9"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn variance_scan_rejects_bad_grid() {
        let mut cfg = small_cfg(GeneratorKind::IidUniform);
        cfg.n_values = vec![64, 100, 256];
        assert!(variance_decay_scan(&cfg).is_err());
        cfg.n_values = vec![64, 128];
        assert!(variance_decay_scan(&cfg).is_err());
    }
}
