//! Command-line front end for the `ppc` binary.
//!
//! Every output starts with a `#` header holding the schema version and the
//! fully resolved configuration (as TOML), so a file alone is enough to
//! reproduce it. Numbers are printed with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::discrepancy::extreme_discrepancy;
use crate::error::Error;
use crate::experiments::{self, BandCheck, CheckOutcome, ExperimentConfig, ExperimentRecord};
use crate::generators::{seed_serde, GeneratorKind, SeedSpec, StepDistribution, GOLDEN_STEP};
use crate::paircorr::{r_statistic, PairCorrParams};
use crate::spectral::{self, fourier_coeff, nfold_profile};
use crate::torus::PointSet;

pub const SCHEMA_VERSION: &str = "torus-ppc/1";

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const RUNTIME: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const CHECK_FAILED: u8 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "ppc", version, about = "Pair correlation of sequences on the unit torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated point set, one value per line.
    Generate(GenerateArgs),
    /// Pair-correlation statistic R_alpha(s, n).
    Ppc(PpcArgs),
    /// Extreme discrepancy D_N.
    Discrepancy(DiscrepancyArgs),
    /// Fourier coefficients of a step law and the n-fold CDF deviation profile.
    Spectral(SpectralArgs),
    /// Monte Carlo moments of R from a config file or a preset.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenName {
    Iid,
    Jittered,
    Batch,
    Sequential,
    Walk,
    Kronecker,
}

#[derive(Debug, Clone, Args)]
pub struct GenFlags {
    /// Generator family.
    #[arg(long = "gen", value_enum)]
    pub gen: Option<GenName>,
    /// Number of points.
    #[arg(long)]
    pub n: Option<usize>,
    /// Jittered sample size (jittered, batch).
    #[arg(long)]
    pub m: Option<usize>,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stream index under the master seed.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Starting point (walk, kronecker).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x1: f64,
    /// Kronecker step.
    #[arg(long, default_value_t = GOLDEN_STEP, allow_negative_numbers = true)]
    pub c: f64,
    /// Walk step law, e.g. `uniform:0:0.5`, `two_point:0:0.5:0.5`,
    /// `constant:0.618`, `triangle:256`, `tabulated:1,2,1`.
    #[arg(long)]
    pub step: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub gen: GenFlags,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PpcArgs {
    /// Points file; otherwise the generator flags are used.
    #[arg(long, conflicts_with = "gen")]
    pub points: Option<PathBuf>,
    #[command(flatten)]
    pub gen: GenFlags,
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub s: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0], allow_negative_numbers = true)]
    pub alpha: Vec<f64>,
    /// Evaluate on these prefix lengths instead of the full set.
    #[arg(long, value_delimiter = ',')]
    pub prefix_scan: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DiscrepancyArgs {
    #[arg(long, conflicts_with = "gen")]
    pub points: Option<PathBuf>,
    #[command(flatten)]
    pub gen: GenFlags,
    #[arg(long, value_delimiter = ',')]
    pub prefix_scan: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectralArgs {
    #[arg(long)]
    pub step: String,
    /// Largest frequency r listed.
    #[arg(long, default_value_t = spectral::DEFAULT_RMAX)]
    pub rmax: u64,
    /// Fold counts n for the CDF deviation profile.
    #[arg(long, value_delimiter = ',')]
    pub profile: Vec<usize>,
    /// Grid size for the profile (power of two).
    #[arg(long, default_value_t = spectral::DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// Experiment document (TOML).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    /// Evaluate the acceptance band and exit 3 if it fails.
    #[arg(long)]
    pub check: bool,
    /// Result document (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat CSV summary.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: exit::USAGE, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::UnknownPreset(_) => exit::USAGE,
            _ => exit::RUNTIME,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError { code: exit::RUNTIME, message: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Formats `x` with 17 significant digits, which round-trips every double.
/// Fixed notation unless the magnitude is very small or very large.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..=30).contains(&mag) {
        return format!("{x:.16e}");
    }
    let decimals = (16 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Prefixes every line of a TOML rendering of `value` with `# `.
fn comment_header<T: Serialize>(value: &T) -> CliResult<String> {
    let body = toml::to_string(value).map_err(|e| CliError { code: exit::RUNTIME, message: e.to_string() })?;
    let mut out = String::new();
    for line in body.lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            let _ = writeln!(out, "# {line}");
        }
    }
    Ok(out)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Resolved source of a point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum PointSource {
    Generated {
        n: usize,
        generator: GeneratorKind,
        #[serde(with = "seed_serde")]
        master_seed: u64,
        #[serde(with = "seed_serde")]
        stream_index: u64,
    },
    File { path: String, n: usize },
}

#[derive(Debug, Serialize)]
struct Provenance<'a, T: Serialize> {
    schema_version: &'static str,
    command: &'static str,
    #[serde(flatten)]
    settings: T,
    points: &'a PointSource,
}

impl GenFlags {
    /// The generator these flags describe; usage errors for missing or
    /// contradictory flags.
    pub fn resolve(&self) -> CliResult<(GeneratorKind, usize, SeedSpec)> {
        let gen = self.gen.ok_or_else(|| CliError::usage("either --points or --gen is required"))?;
        let n = self.n.ok_or_else(|| CliError::usage("--n is required with --gen"))?;
        let need_m = || self.m.ok_or_else(|| CliError::usage("--m is required for this generator"));
        let kind = match gen {
            GenName::Iid => GeneratorKind::IidUniform,
            GenName::Jittered => GeneratorKind::JitteredSingle { m: need_m()? },
            GenName::Batch => GeneratorKind::BatchJittered { m: need_m()? },
            GenName::Sequential => GeneratorKind::SequentialJittered,
            GenName::Walk => {
                let spec = self.step.as_deref().ok_or_else(|| CliError::usage("--step is required for walk"))?;
                let step = StepDistribution::parse(spec).map_err(|e| CliError::usage(e.to_string()))?;
                GeneratorKind::RandomWalk { x1: self.x1, step }
            }
            GenName::Kronecker => GeneratorKind::Kronecker { x1: self.x1, c: self.c },
        };
        Ok((kind, n, SeedSpec::new(self.seed, self.stream)))
    }
}

/// Reads a points file: one decimal per line, `#` comments and blank lines
/// ignored.
pub fn read_points(path: &Path) -> CliResult<PointSet> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError { code: exit::RUNTIME, message: format!("{}: {e}", path.display()) })?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| CliError {
            code: exit::RUNTIME,
            message: format!("{}:{}: not a number: {line:?}", path.display(), lineno + 1),
        })?;
        values.push(v);
    }
    Ok(PointSet::from_values(values)?)
}

fn load_points(points: Option<&Path>, gen: &GenFlags) -> CliResult<(PointSet, PointSource)> {
    match points {
        Some(path) => {
            let ps = read_points(path)?;
            let n = ps.len();
            Ok((ps, PointSource::File { path: path.display().to_string(), n }))
        }
        None => {
            let (generator, n, seed) = gen.resolve()?;
            let ps = generator.generate(n, seed)?;
            Ok((ps, PointSource::Generated { n, generator, master_seed: seed.master_seed, stream_index: seed.stream_index }))
        }
    }
}

pub fn cmd_generate(args: &GenerateArgs) -> CliResult<String> {
    let (generator, n, seed) = args.gen.resolve()?;
    let ps = generator.generate(n, seed)?;
    let source = PointSource::Generated { n, generator, master_seed: seed.master_seed, stream_index: seed.stream_index };
    let mut text = comment_header(&Provenance { schema_version: SCHEMA_VERSION, command: "generate", settings: (), points: &source })?;
    for v in ps.values() {
        text.push_str(&fmt_num(*v));
        text.push('\n');
    }
    Ok(text)
}

#[derive(Serialize)]
struct PpcSettings<'a> {
    s: &'a [f64],
    alpha: &'a [f64],
    prefix_scan: &'a [usize],
}

pub fn cmd_ppc(args: &PpcArgs) -> CliResult<String> {
    let params = args
        .alpha
        .iter()
        .flat_map(|&alpha| args.s.iter().map(move |&s| PairCorrParams::new(s, alpha)))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(|e| CliError::usage(e.to_string()))?;
    let (ps, source) = load_points(args.points.as_deref(), &args.gen)?;
    let ns = prefix_lengths(&args.prefix_scan, ps.len())?;
    let settings = PpcSettings { s: &args.s, alpha: &args.alpha, prefix_scan: &args.prefix_scan };
    let mut text = comment_header(&Provenance { schema_version: SCHEMA_VERSION, command: "ppc", settings, points: &source })?;
    text.push_str("n,s,alpha,pair_count,R\n");
    for n in ns {
        let prefix = ps.prefix(n);
        for &p in &params {
            let r = r_statistic(&prefix, p)?;
            let _ = writeln!(text, "{n},{},{},{},{}", fmt_num(p.s), fmt_num(p.alpha), r.pair_count, fmt_num(r.value));
        }
    }
    Ok(text)
}

fn prefix_lengths(scan: &[usize], len: usize) -> CliResult<Vec<usize>> {
    if scan.is_empty() {
        return Ok(vec![len]);
    }
    if let Some(&n) = scan.iter().find(|&&n| n > len) {
        return Err(CliError { code: exit::RUNTIME, message: format!("prefix {n} exceeds the {len} available points") });
    }
    Ok(scan.to_vec())
}

#[derive(Serialize)]
struct ScanSettings<'a> {
    prefix_scan: &'a [usize],
}

pub fn cmd_discrepancy(args: &DiscrepancyArgs) -> CliResult<String> {
    let (ps, source) = load_points(args.points.as_deref(), &args.gen)?;
    let ns = prefix_lengths(&args.prefix_scan, ps.len())?;
    let settings = ScanSettings { prefix_scan: &args.prefix_scan };
    let mut text =
        comment_header(&Provenance { schema_version: SCHEMA_VERSION, command: "discrepancy", settings, points: &source })?;
    text.push_str("n,discrepancy\n");
    for n in ns {
        let d = extreme_discrepancy(&ps.prefix(n))?;
        let _ = writeln!(text, "{n},{}", fmt_num(d.value));
    }
    Ok(text)
}

#[derive(Serialize)]
struct SpectralHeader<'a> {
    schema_version: &'static str,
    command: &'static str,
    step: &'a StepDistribution,
    rmax: u64,
    profile: &'a [usize],
    grid: usize,
}

pub fn cmd_spectral(args: &SpectralArgs) -> CliResult<String> {
    let step = StepDistribution::parse(&args.step).map_err(|e| CliError::usage(e.to_string()))?;
    if args.rmax == 0 {
        return Err(CliError::usage("--rmax must be >= 1"));
    }
    let header = SpectralHeader {
        schema_version: SCHEMA_VERSION,
        command: "spectral",
        step: &step,
        rmax: args.rmax,
        profile: &args.profile,
        grid: args.grid,
    };
    let mut text = comment_header(&header)?;
    text.push_str("kind,index,value\n");
    for r in 1..=args.rmax as i64 {
        let c = fourier_coeff(&step, r)?;
        let _ = writeln!(text, "abs_c,{r},{}", fmt_num(c.abs()));
    }
    if !args.profile.is_empty() {
        let stats = nfold_profile(&step, &args.profile, args.grid)?;
        for st in &stats {
            let _ = writeln!(text, "sup_dev,{},{}", st.n, fmt_num(st.sup_dev));
        }
        for st in &stats {
            let _ = writeln!(text, "oscillation,{},{}", st.n, fmt_num(st.oscillation));
        }
    }
    Ok(text)
}

/// Experiment document: the input format, and the head of every result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDoc {
    #[serde(default = "schema_version")]
    pub schema_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<BandCheck>,
    pub configs: Vec<ExperimentConfig>,
}

fn schema_version() -> String {
    SCHEMA_VERSION.to_string()
}

impl ExperimentDoc {
    pub fn parse(text: &str) -> crate::Result<Self> {
        let doc: ExperimentDoc = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!("unsupported schema_version {:?}", doc.schema_version)));
        }
        if doc.configs.is_empty() {
            return Err(Error::Config("no [[configs]] entries".into()));
        }
        for cfg in &doc.configs {
            cfg.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(doc)
    }

    pub fn to_toml(&self) -> crate::Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_preset(id: &str) -> crate::Result<Self> {
        let preset = experiments::theorem_preset(id)?;
        Ok(ExperimentDoc {
            schema_version: schema_version(),
            preset: Some(id.to_string()),
            check: Some(preset.check),
            configs: preset.configs,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl From<CheckOutcome> for CheckRow {
    fn from(c: CheckOutcome) -> Self {
        CheckRow { label: c.label, passed: c.passed, detail: c.detail }
    }
}

/// Full result document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDoc {
    #[serde(flatten)]
    pub input: ExperimentDoc,
    pub records: Vec<ExperimentRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckRow>,
}

pub struct ExperimentOutput {
    pub document: String,
    pub csv: String,
    pub passed: bool,
}

pub fn run_experiment_doc(input: ExperimentDoc, check: bool) -> CliResult<ExperimentOutput> {
    let mut records = Vec::new();
    for cfg in &input.configs {
        records.extend(experiments::estimate_moments(cfg)?.records);
    }
    let checks: Vec<CheckRow> = match (&input.check, check) {
        (Some(band), true) => band
            .evaluate(&experiments::ExperimentResult { records: records.clone() })
            .into_iter()
            .map(CheckRow::from)
            .collect(),
        (None, true) => return Err(CliError::usage("--check needs a preset or a [check] table in the config")),
        _ => Vec::new(),
    };
    let passed = checks.iter().all(|c| c.passed);
    let result = ResultDoc { input, records, checks };

    let body = toml::to_string(&result).map_err(|e| CliError { code: exit::RUNTIME, message: e.to_string() })?;
    let document = format!("# schema_version = \"{SCHEMA_VERSION}\"\n{body}");

    let mut csv = comment_header(&result.input)?;
    csv.push_str("generator,s,alpha,n,replicates,mean_R,var_R,stderr,min_R,max_R,master_seed\n");
    for r in &result.records {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&r.generator),
            fmt_num(r.s),
            fmt_num(r.alpha),
            r.n,
            r.replicates,
            fmt_num(r.mean_r),
            fmt_num(r.var_r),
            fmt_num(r.stderr),
            fmt_num(r.min_r),
            fmt_num(r.max_r),
            r.master_seed
        );
    }
    Ok(ExperimentOutput { document, csv, passed })
}

pub fn cmd_experiment(args: &ExperimentArgs) -> CliResult<ExperimentOutput> {
    let input = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            ExperimentDoc::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
        }
        (None, Some(id)) => ExperimentDoc::from_preset(id)?,
        (None, None) => return Err(CliError::usage("either --config or --preset is required")),
    };
    run_experiment_doc(input, args.check)
}

/// Runs a parsed command line and returns the exit code. Messages go to
/// stderr.
pub fn run(cli: &Cli) -> u8 {
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a).and_then(|t| emit(a.out.as_deref(), &t)),
        Command::Ppc(a) => cmd_ppc(a).and_then(|t| emit(a.out.as_deref(), &t)),
        Command::Discrepancy(a) => cmd_discrepancy(a).and_then(|t| emit(a.out.as_deref(), &t)),
        Command::Spectral(a) => cmd_spectral(a).and_then(|t| emit(a.out.as_deref(), &t)),
        Command::Experiment(a) => cmd_experiment(a).and_then(|o| {
            emit(a.out.as_deref(), &o.document)?;
            if let Some(path) = &a.csv {
                fs::write(path, &o.csv)?;
            }
            if o.passed {
                Ok(())
            } else {
                Err(CliError { code: exit::CHECK_FAILED, message: "acceptance band check failed".into() })
            }
        }),
    };
    match result {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("ppc: {}", e.message);
            e.code
        }
    }
}
