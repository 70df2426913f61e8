//! Seeded construction of every sequence family: i.i.d. uniforms, jittered
//! samples (single, M-batch, sequential dyadic), random walks on the torus and
//! Kronecker sequences.
//!
//! A `(master_seed, stream_index)` pair names one ChaCha8 stream. Sub-streams
//! (one per batch, one per dyadic level) are derived with [`SeedSpec::child`],
//! so any batch or level can be generated without touching the others.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{PointSet, TorusPoint};

/// Golden-ratio conjugate `(sqrt 5 - 1) / 2`.
pub const GOLDEN_STEP: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SeedSpec {
    #[serde(with = "seed_serde")]
    pub master_seed: u64,
    #[serde(with = "seed_serde", default)]
    pub stream_index: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeedSpec { master_seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// Sub-stream `k` of this stream. Distinct `(self, k)` give distinct keys.
    pub fn child(&self, k: u64) -> SeedSpec {
        let key = splitmix64(self.master_seed ^ splitmix64(self.stream_index ^ 0x5EED_0000_0000_0000));
        SeedSpec { master_seed: key, stream_index: k }
    }
}

/// TOML integers are signed 64-bit; seeds above `i64::MAX` go out as strings.
pub(crate) mod seed_serde {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*v) {
            Ok(i) => s.serialize_i64(i),
            Err(_) => s.serialize_str(&v.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(i) => u64::try_from(i).map_err(|_| de::Error::custom("seed must be non-negative")),
            Repr::Str(s) => s.trim().parse().map_err(de::Error::custom),
        }
    }
}

/// Law of the i.i.d. walk increments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepDistribution {
    /// Uniform on `[a, b)`, `0 <= a < b <= 1`.
    UniformInterval { a: f64, b: f64 },
    /// `atom1` with probability `p`, otherwise `atom2`.
    TwoPoint { atom1: f64, atom2: f64, p: f64 },
    /// Point mass at `c` (a Kronecker step).
    Constant { c: f64 },
    /// Piecewise-constant density on `grid.len()` equal cells of `[0, 1)`.
    TabulatedDensity { grid: Vec<f64> },
}

impl StepDistribution {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        let s = StepDistribution::UniformInterval { a, b };
        s.validate()?;
        Ok(s)
    }

    pub fn two_point(atom1: f64, atom2: f64, p: f64) -> Result<Self> {
        let s = StepDistribution::TwoPoint { atom1, atom2, p };
        s.validate()?;
        Ok(s)
    }

    pub fn constant(c: f64) -> Result<Self> {
        let s = StepDistribution::Constant { c };
        s.validate()?;
        Ok(s)
    }

    pub fn tabulated(grid: Vec<f64>) -> Result<Self> {
        let s = StepDistribution::TabulatedDensity { grid };
        s.validate()?;
        Ok(s)
    }

    /// Symmetric triangle density `4x` on `[0, 1/2)`, `4(1 - x)` on `[1/2, 1)`,
    /// tabulated at cell midpoints. `cells` must be even and positive.
    pub fn triangle(cells: usize) -> Result<Self> {
        if cells == 0 || !cells.is_multiple_of(2) {
            return Err(Error::InvalidStep(format!("triangle needs an even cell count, got {cells}")));
        }
        let grid = (0..cells)
            .map(|j| {
                let x = (j as f64 + 0.5) / cells as f64;
                if x < 0.5 { 4.0 * x } else { 4.0 * (1.0 - x) }
            })
            .collect();
        StepDistribution::tabulated(grid)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            StepDistribution::UniformInterval { a, b } => {
                if !(a.is_finite() && b.is_finite() && 0.0 <= *a && a < b && *b <= 1.0) {
                    return Err(Error::InvalidStep(format!("uniform interval needs 0 <= a < b <= 1, got [{a}, {b})")));
                }
            }
            StepDistribution::TwoPoint { atom1, atom2, p } => {
                if !(atom1.is_finite() && atom2.is_finite()) {
                    return Err(Error::InvalidStep("two-point atoms must be finite".into()));
                }
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidStep(format!("probability {p} outside [0, 1]")));
                }
            }
            StepDistribution::Constant { c } => {
                if !c.is_finite() {
                    return Err(Error::InvalidStep(format!("constant step {c} is not finite")));
                }
            }
            StepDistribution::TabulatedDensity { grid } => {
                if grid.is_empty() {
                    return Err(Error::InvalidStep("tabulated density needs at least one cell".into()));
                }
                if grid.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::InvalidStep("tabulated density entries must be finite and >= 0".into()));
                }
                let mean = grid.iter().sum::<f64>() / grid.len() as f64;
                if (mean - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidStep(format!("tabulated density must average to 1, got {mean}")));
                }
            }
        }
        Ok(())
    }

    pub fn has_density(&self) -> bool {
        matches!(self, StepDistribution::UniformInterval { .. } | StepDistribution::TabulatedDensity { .. })
    }

    pub fn name(&self) -> String {
        match self {
            StepDistribution::UniformInterval { a, b } => format!("uniform:{a}:{b}"),
            StepDistribution::TwoPoint { atom1, atom2, p } => format!("two_point:{atom1}:{atom2}:{p}"),
            StepDistribution::Constant { c } => format!("constant:{c}"),
            StepDistribution::TabulatedDensity { grid } => format!("tabulated[{}]", grid.len()),
        }
    }

    /// Parses the command-line step syntax: `uniform:a:b`,
    /// `two_point:x:y:p`, `constant:c`, `triangle:cells`,
    /// `tabulated:v1,v2,...`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidStep(format!("cannot parse step {spec:?}"));
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
        let parts: Vec<&str> = rest.split(':').collect();
        match (kind.trim(), parts.as_slice()) {
            ("uniform" | "uniform_interval", [a, b]) => StepDistribution::uniform(num(a)?, num(b)?),
            ("two_point", [x, y, p]) => StepDistribution::two_point(num(x)?, num(y)?, num(p)?),
            ("constant", [c]) => StepDistribution::constant(num(c)?),
            ("triangle", [m]) => StepDistribution::triangle(m.trim().parse().map_err(|_| bad())?),
            ("tabulated" | "tabulated_density", [vals]) => {
                let grid = vals.split(',').map(num).collect::<Result<Vec<_>>>()?;
                StepDistribution::tabulated(grid)
            }
            _ => Err(bad()),
        }
    }

    /// CDF on `[0, 1]` for the density variants.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let x = x.clamp(0.0, 1.0);
        match self {
            StepDistribution::UniformInterval { a, b } => Ok(((x - a) / (b - a)).clamp(0.0, 1.0)),
            StepDistribution::TabulatedDensity { grid } => {
                let m = grid.len();
                let total: f64 = grid.iter().sum();
                let pos = x * m as f64;
                let j = (pos.floor() as usize).min(m - 1);
                let below: f64 = grid[..j].iter().sum();
                Ok(((below + grid[j] * (pos - j as f64)) / total).clamp(0.0, 1.0))
            }
            other => Err(Error::NoDensity(other.name())),
        }
    }

    /// One draw of the step law.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TorusPoint {
        match self {
            StepDistribution::UniformInterval { a, b } => {
                let u: f64 = rng.random();
                TorusPoint::wrap(a + (b - a) * u)
            }
            StepDistribution::TwoPoint { atom1, atom2, p } => {
                let u: f64 = rng.random();
                TorusPoint::wrap(if u < *p { *atom1 } else { *atom2 })
            }
            StepDistribution::Constant { c } => TorusPoint::wrap(*c),
            StepDistribution::TabulatedDensity { grid } => {
                let u: f64 = rng.random();
                TorusPoint::wrap(tabulated_inverse_cdf(grid, u))
            }
        }
    }

    /// A reusable sampler that caches the cumulative table for tabulated laws.
    pub fn sampler(&self) -> StepSampler<'_> {
        let cumulative = match self {
            StepDistribution::TabulatedDensity { grid } => {
                let mut acc = 0.0;
                let mut cum = Vec::with_capacity(grid.len() + 1);
                cum.push(0.0);
                for v in grid {
                    acc += v;
                    cum.push(acc);
                }
                cum
            }
            _ => Vec::new(),
        };
        StepSampler { step: self, cumulative }
    }
}

fn tabulated_inverse_cdf(grid: &[f64], u: f64) -> f64 {
    let total: f64 = grid.iter().sum();
    let target = u * total;
    let mut acc = 0.0;
    for (j, &v) in grid.iter().enumerate() {
        if target < acc + v {
            return cell_position(j, grid.len(), (target - acc) / v);
        }
        acc += v;
    }
    // u * total rounded up to the total; take the last cell with mass
    let j = grid.iter().rposition(|&v| v > 0.0).unwrap_or(0);
    cell_position(j, grid.len(), 0.0)
}

/// Draws from a step law with the tabulated CDF precomputed.
pub struct StepSampler<'a> {
    step: &'a StepDistribution,
    cumulative: Vec<f64>,
}

impl StepSampler<'_> {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TorusPoint {
        match self.step {
            StepDistribution::TabulatedDensity { grid } => {
                let u: f64 = rng.random();
                let total = *self.cumulative.last().unwrap();
                let target = u * total;
                // first j with cumulative[j + 1] > target
                let j = self.cumulative[1..].partition_point(|&c| c <= target);
                if j >= grid.len() {
                    return TorusPoint::wrap(tabulated_inverse_cdf(grid, u));
                }
                let within = (target - self.cumulative[j]) / grid[j];
                TorusPoint::wrap(cell_position(j, grid.len(), within))
            }
            other => other.sample(rng),
        }
    }
}

/// `(cell + u) / cells`, nudged so that `floor(x * cells) == cell` holds
/// exactly after rounding.
pub(crate) fn cell_position(cell: usize, cells: usize, u: f64) -> f64 {
    let m = cells as f64;
    let j = cell as f64;
    let mut x = (j + u.clamp(0.0, 1.0)) / m;
    while x > 0.0 && (x * m).floor() > j {
        x = x.next_down();
    }
    while (x * m).floor() < j {
        x = x.next_up();
    }
    x
}

/// Sequence families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    IidUniform,
    /// One jittered sample of size `m`; `n <= m` takes a prefix.
    JitteredSingle { m: usize },
    BatchJittered { m: usize },
    SequentialJittered,
    RandomWalk { x1: f64, step: StepDistribution },
    Kronecker { x1: f64, c: f64 },
}

impl GeneratorKind {
    pub fn validate(&self) -> Result<()> {
        match self {
            GeneratorKind::JitteredSingle { m } | GeneratorKind::BatchJittered { m } if *m == 0 => {
                Err(Error::InvalidParameter("jittered sample size M must be >= 1".into()))
            }
            GeneratorKind::RandomWalk { x1, step } => {
                check_start(*x1)?;
                step.validate()
            }
            GeneratorKind::Kronecker { x1, c } => {
                check_start(*x1)?;
                if !c.is_finite() {
                    return Err(Error::NonFinite(*c));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Short label used in result tables.
    pub fn label(&self) -> String {
        match self {
            GeneratorKind::IidUniform => "iid_uniform".into(),
            GeneratorKind::JitteredSingle { m } => format!("jittered_single(M={m})"),
            GeneratorKind::BatchJittered { m } => format!("batch_jittered(M={m})"),
            GeneratorKind::SequentialJittered => "sequential_jittered".into(),
            GeneratorKind::RandomWalk { x1, step } => format!("random_walk(x1={x1},step={})", step.name()),
            GeneratorKind::Kronecker { x1, c } => format!("kronecker(x1={x1},c={c})"),
        }
    }

    pub fn generate(&self, n: usize, seed: SeedSpec) -> Result<PointSet> {
        self.validate()?;
        match self {
            GeneratorKind::IidUniform => gen_iid_uniform(n, seed),
            GeneratorKind::JitteredSingle { m } => {
                if n > *m {
                    return Err(Error::InvalidParameter(format!("a single jittered sample has {m} points, asked for {n}")));
                }
                Ok(gen_jittered_single(*m, seed)?.prefix(n))
            }
            GeneratorKind::BatchJittered { m } => gen_batch_jittered(*m, n, seed),
            GeneratorKind::SequentialJittered => gen_sequential_jittered(n, seed),
            GeneratorKind::RandomWalk { x1, step } => gen_random_walk(n, frac_start(*x1)?, step, seed),
            GeneratorKind::Kronecker { x1, c } => gen_kronecker(n, frac_start(*x1)?, *c),
        }
    }
}

fn check_start(x1: f64) -> Result<()> {
    if !(0.0..1.0).contains(&x1) {
        return Err(Error::InvalidParameter(format!("start point {x1} outside [0, 1)")));
    }
    Ok(())
}

fn frac_start(x1: f64) -> Result<TorusPoint> {
    check_start(x1)?;
    TorusPoint::new(x1)
}

/// A generator family together with its seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub generator: GeneratorKind,
    pub seed: SeedSpec,
}

impl GeneratorSpec {
    pub fn new(generator: GeneratorKind, seed: SeedSpec) -> Self {
        GeneratorSpec { generator, seed }
    }

    pub fn generate(&self, n: usize) -> Result<PointSet> {
        self.generator.generate(n, self.seed)
    }
}

fn require_points(n: usize, needed: usize) -> Result<()> {
    if n < needed {
        return Err(Error::TooFewPoints { needed, got: n });
    }
    Ok(())
}

pub fn gen_iid_uniform(n: usize, seed: SeedSpec) -> Result<PointSet> {
    require_points(n, 1)?;
    let mut rng = seed.rng();
    let values = (0..n).map(|_| rng.random::<f64>()).collect();
    Ok(PointSet::from_unit_values(values))
}

fn jittered_values(m: usize, seed: SeedSpec) -> Vec<f64> {
    let mut rng = seed.rng();
    let mut cells: Vec<usize> = (0..m).collect();
    cells.shuffle(&mut rng);
    cells
        .into_iter()
        .map(|cell| cell_position(cell, m, rng.random::<f64>()))
        .collect()
}

/// One jittered sample: point `k` lands uniformly in cell `perm(k)` of the
/// `m` equal cells.
pub fn gen_jittered_single(m: usize, seed: SeedSpec) -> Result<PointSet> {
    if m == 0 {
        return Err(Error::InvalidParameter("jittered sample size M must be >= 1".into()));
    }
    Ok(PointSet::from_unit_values(jittered_values(m, seed)))
}

/// Independent jittered samples of size `m` (batch `b` on sub-stream `b`),
/// concatenated and cut to `n` points.
pub fn gen_batch_jittered(m: usize, n: usize, seed: SeedSpec) -> Result<PointSet> {
    if m == 0 {
        return Err(Error::InvalidParameter("jittered sample size M must be >= 1".into()));
    }
    require_points(n, 1)?;
    let mut values = Vec::with_capacity(n);
    let batches = n.div_ceil(m);
    for b in 0..batches {
        let batch = jittered_values(m, seed.child(b as u64));
        let take = (n - values.len()).min(m);
        values.extend_from_slice(&batch[..take]);
    }
    Ok(PointSet::from_unit_values(values))
}

/// Sequential (dyadic) jittered sampling. The first two points are a jittered
/// sample of size 2; each later level doubles the set by dropping one point
/// uniformly into each void dyadic cell of half the current width, with cells
/// matched to new points by a fresh random permutation.
pub fn gen_sequential_jittered(n: usize, seed: SeedSpec) -> Result<PointSet> {
    require_points(n, 2)?;
    let mut values = jittered_values(2, seed.child(0));
    values.reserve(n.saturating_sub(2));
    let mut level = 1u64;
    while values.len() < n {
        let have = values.len();
        let cells = 2 * have;
        let mut occupied = vec![false; cells];
        for &v in &values {
            occupied[(v * cells as f64) as usize] = true;
        }
        let void: Vec<usize> = (0..cells).filter(|&c| !occupied[c]).collect();
        debug_assert_eq!(void.len(), have);

        let mut rng = seed.child(level).rng();
        let mut order: Vec<usize> = (0..have).collect();
        order.shuffle(&mut rng);
        let take = (n - have).min(have);
        for &k in &order[..take] {
            let z: f64 = rng.random();
            values.push(cell_position(void[k], cells, z));
        }
        level += 1;
    }
    Ok(PointSet::from_unit_values(values))
}

/// Random walk `X_1 = x1`, `X_{k+1} = {X_k + Y_k}` with `Y_k` i.i.d. `step`.
pub fn gen_random_walk(n: usize, x1: TorusPoint, step: &StepDistribution, seed: SeedSpec) -> Result<PointSet> {
    require_points(n, 1)?;
    step.validate()?;
    let sampler = step.sampler();
    let mut rng = seed.rng();
    let mut values = Vec::with_capacity(n);
    let mut x = x1.value();
    values.push(x);
    for _ in 1..n {
        x = TorusPoint::wrap(x + sampler.sample(&mut rng).value()).value();
        values.push(x);
    }
    Ok(PointSet::from_unit_values(values))
}

/// Kronecker sequence `{x1 + (k - 1) c}`.
pub fn gen_kronecker(n: usize, x1: TorusPoint, c: f64) -> Result<PointSet> {
    require_points(n, 1)?;
    if !c.is_finite() {
        return Err(Error::NonFinite(c));
    }
    let values = (0..n).map(|k| TorusPoint::wrap(x1.value() + k as f64 * c).value()).collect();
    Ok(PointSet::from_unit_values(values))
}

/// One draw from `step` on the stream named by `seed`.
pub fn sample_step(step: &StepDistribution, rng: &mut ChaCha8Rng) -> TorusPoint {
    step.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S: SeedSpec = SeedSpec { master_seed: 20240607, stream_index: 3 };

    fn occupancy(values: &[f64], cells: usize) -> Vec<usize> {
        let mut occ = vec![0; cells];
        for &v in values {
            occ[(v * cells as f64).floor() as usize] += 1;
        }
        occ
    }

    #[test]
    fn iid_is_deterministic_and_centered() {
        let a = gen_iid_uniform(1000, S).unwrap();
        let b = gen_iid_uniform(1000, S).unwrap();
        assert_eq!(a, b);
        let c = gen_iid_uniform(1000, SeedSpec::new(S.master_seed, 4)).unwrap();
        assert_ne!(a, c);
        let big = gen_iid_uniform(100_000, S).unwrap();
        let mean = big.values().iter().sum::<f64>() / 1e5;
        assert!((0.49..=0.51).contains(&mean), "mean {mean}");
        assert!(gen_iid_uniform(0, S).is_err());
    }

    #[test]
    fn jittered_single_stratifies() {
        let ps = gen_jittered_single(8, S).unwrap();
        assert_eq!(occupancy(ps.values(), 8), vec![1; 8]);
        let one = gen_jittered_single(1, S).unwrap();
        assert_eq!(one.len(), 1);
        assert!((0.0..1.0).contains(&one.values()[0]));
        for stream in 0..50 {
            let ps = gen_jittered_single(256, SeedSpec::new(9, stream)).unwrap();
            assert_eq!(occupancy(ps.values(), 256), vec![1; 256]);
        }
        assert!(gen_jittered_single(0, S).is_err());
    }

    #[test]
    fn jittered_non_power_of_two_cells() {
        for m in [3, 7, 10, 1000] {
            let ps = gen_jittered_single(m, S).unwrap();
            assert_eq!(occupancy(ps.values(), m), vec![1; m]);
        }
    }

    #[test]
    fn cell_position_stays_in_cell() {
        let below_one = 1.0f64.next_down();
        for cells in [3usize, 7, 1 << 17, 1000003] {
            for cell in [0, 1, cells / 2, cells - 1] {
                for u in [0.0, 0.5, below_one] {
                    let x = cell_position(cell, cells, u);
                    assert_eq!((x * cells as f64).floor() as usize, cell);
                    assert!(x < 1.0);
                }
            }
        }
    }

    #[test]
    fn batch_jittered_batches_stratify() {
        let ps = gen_batch_jittered(4, 12, S).unwrap();
        for b in 0..3 {
            assert_eq!(occupancy(&ps.values()[4 * b..4 * b + 4], 4), vec![1; 4]);
        }
        let short = gen_batch_jittered(4, 6, S).unwrap();
        assert_eq!(short.values()[..6], ps.values()[..6]);
        let tail = occupancy(&short.values()[4..6], 4);
        assert_eq!(tail.iter().filter(|&&c| c == 1).count(), 2);
        // batches differ
        assert_ne!(ps.values()[..4], ps.values()[4..8]);
    }

    #[test]
    fn sequential_dyadic_occupancy() {
        let ps = gen_sequential_jittered(1 << 16, S).unwrap();
        for k in 1..=16 {
            let n = 1usize << k;
            assert_eq!(occupancy(&ps.values()[..n], n), vec![1; n], "level {k}");
        }
        assert!(gen_sequential_jittered(1, S).is_err());
    }

    #[test]
    fn sequential_third_point_in_void_quarter() {
        for stream in 0..200 {
            let seed = SeedSpec::new(77, stream);
            let ps = gen_sequential_jittered(3, seed).unwrap();
            let occ = occupancy(&ps.values()[..2], 4);
            let third = (ps.values()[2] * 4.0).floor() as usize;
            assert_eq!(occ[third], 0);
            // the first two points split the halves
            assert_eq!(occupancy(&ps.values()[..2], 2), vec![1, 1]);
        }
    }

    #[test]
    fn sequential_prefix_nesting() {
        let long = gen_sequential_jittered(1000, S).unwrap();
        for n in [2, 3, 4, 5, 17, 64, 999] {
            assert_eq!(gen_sequential_jittered(n, S).unwrap().values(), &long.values()[..n]);
        }
    }

    #[test]
    fn walk_with_constant_step_is_kronecker() {
        let x1 = TorusPoint::new(0.1).unwrap();
        let walk = gen_random_walk(500, x1, &StepDistribution::constant(GOLDEN_STEP).unwrap(), S).unwrap();
        let kron = gen_kronecker(500, x1, GOLDEN_STEP).unwrap();
        for (a, b) in walk.values().iter().zip(kron.values()) {
            let d = crate::torus::raw_dist(*a, *b);
            assert!(d < 1e-12, "{a} vs {b}");
        }
        assert_eq!(walk.values()[0], 0.1);
    }

    #[test]
    fn two_point_walk_stays_on_two_values() {
        let step = StepDistribution::two_point(0.0, 0.5, 0.5).unwrap();
        let walk = gen_random_walk(10_000, TorusPoint::ZERO, &step, S).unwrap();
        assert!(walk.values().iter().all(|&v| v == 0.0 || v == 0.5));
        assert!(walk.values().contains(&0.5));
    }

    #[test]
    fn sample_step_examples() {
        let mut rng = S.rng();
        let c = StepDistribution::constant(0.3).unwrap();
        for _ in 0..10 {
            assert_eq!(sample_step(&c, &mut rng).value(), 0.3);
        }
        let u = StepDistribution::uniform(0.0, 0.5).unwrap();
        let mean = (0..100_000).map(|_| sample_step(&u, &mut rng).value()).sum::<f64>() / 1e5;
        assert!((0.245..=0.255).contains(&mean), "mean {mean}");
        let tp = StepDistribution::two_point(0.0, 0.5, 0.5).unwrap();
        let zeros = (0..100_000).filter(|_| sample_step(&tp, &mut rng).value() == 0.0).count() as f64 / 1e5;
        assert!((0.49..=0.51).contains(&zeros), "zeros {zeros}");
    }

    #[test]
    fn tabulated_sampler_agrees_with_direct_inverse() {
        let tri = StepDistribution::triangle(64).unwrap();
        let sampler = tri.sampler();
        let mut a = S.rng();
        let mut b = S.rng();
        for _ in 0..10_000 {
            let x = sampler.sample(&mut a).value();
            let y = tri.sample(&mut b).value();
            assert!((x - y).abs() < 1e-12);
        }
    }

    fn ks_sup(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        samples
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn walk_increments_follow_step_law() {
        let steps = [
            StepDistribution::uniform(0.0, 1.0).unwrap(),
            StepDistribution::uniform(0.0, 0.5).unwrap(),
            StepDistribution::uniform(0.2, 0.9).unwrap(),
            StepDistribution::triangle(128).unwrap(),
        ];
        for step in &steps {
            let walk = gen_random_walk(100_001, TorusPoint::new(0.3).unwrap(), step, S).unwrap();
            let inc: Vec<f64> = walk
                .values()
                .windows(2)
                .map(|w| TorusPoint::wrap(w[1] - w[0]).value())
                .collect();
            let d = ks_sup(inc, |x| step.cdf(x).unwrap());
            assert!(d < 0.01, "{}: KS sup {d}", step.name());
        }
    }

    #[test]
    fn step_validation() {
        assert!(StepDistribution::uniform(0.5, 0.5).is_err());
        assert!(StepDistribution::uniform(0.0, 1.5).is_err());
        assert!(StepDistribution::two_point(0.0, 0.5, 1.5).is_err());
        assert!(StepDistribution::two_point(0.0, 0.5, 1.0).is_ok());
        assert!(StepDistribution::tabulated(vec![1.0, 2.0]).is_err());
        assert!(StepDistribution::tabulated(vec![2.0, -0.0, 0.0, 2.0]).is_ok());
        assert!(StepDistribution::tabulated(vec![3.0, -1.0]).is_err());
        assert!(StepDistribution::triangle(3).is_err());
    }

    #[test]
    fn step_parse() {
        assert_eq!(StepDistribution::parse("uniform:0:0.5").unwrap(), StepDistribution::uniform(0.0, 0.5).unwrap());
        assert_eq!(
            StepDistribution::parse("two_point:0:0.5:0.5").unwrap(),
            StepDistribution::two_point(0.0, 0.5, 0.5).unwrap()
        );
        assert_eq!(StepDistribution::parse("constant:0.25").unwrap(), StepDistribution::constant(0.25).unwrap());
        assert_eq!(StepDistribution::parse("tabulated:0.5,1.5").unwrap(), StepDistribution::tabulated(vec![0.5, 1.5]).unwrap());
        assert_eq!(StepDistribution::parse("triangle:8").unwrap(), StepDistribution::triangle(8).unwrap());
        assert!(StepDistribution::parse("gauss:0:1").is_err());
        assert!(StepDistribution::parse("uniform:0").is_err());
    }

    #[test]
    fn generator_kind_jittered_single_prefix() {
        let g = GeneratorKind::JitteredSingle { m: 16 };
        let full = g.generate(16, S).unwrap();
        assert_eq!(g.generate(5, S).unwrap().values(), &full.values()[..5]);
        assert!(g.generate(17, S).is_err());
        assert!(GeneratorKind::BatchJittered { m: 0 }.generate(4, S).is_err());
        assert!(GeneratorKind::Kronecker { x1: 1.5, c: 0.3 }.generate(4, S).is_err());
    }

    #[test]
    fn child_streams_differ() {
        let a = S.child(0);
        let b = S.child(1);
        let c = SeedSpec::new(S.master_seed, S.stream_index + 1).child(0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, S.child(0));
    }

    proptest! {
        #[test]
        fn every_generator_is_prefix_consistent(seed in any::<u64>(), stream in 0u64..1000, n in 2usize..300) {
            let seed = SeedSpec::new(seed, stream);
            let kinds = [
                GeneratorKind::IidUniform,
                GeneratorKind::BatchJittered { m: 5 },
                GeneratorKind::SequentialJittered,
                GeneratorKind::RandomWalk { x1: 0.25, step: StepDistribution::triangle(8).unwrap() },
                GeneratorKind::Kronecker { x1: 0.0, c: GOLDEN_STEP },
            ];
            for kind in &kinds {
                let long = kind.generate(300, seed).unwrap();
                let short = kind.generate(n, seed).unwrap();
                prop_assert_eq!(short.values(), &long.values()[..n]);
            }
        }

        #[test]
        fn batch_jittered_full_batches_stratify(seed in any::<u64>(), m in 1usize..40, batches in 1usize..6) {
            let ps = gen_batch_jittered(m, m * batches, SeedSpec::new(seed, 0)).unwrap();
            for chunk in ps.values().chunks(m) {
                prop_assert_eq!(occupancy(chunk, m), vec![1; m]);
            }
        }
    }
}
