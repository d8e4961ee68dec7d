//! Command-line interface. Every command writes into `--out DIR` and finishes
//! with `manifest.json`; nothing is written outside that directory.

use crate::gridio::{load_grid, save_grid, GridFormat};
use crate::manifest::{digest_input, RunManifest};
use crate::report::{
    curve_records, eval_detail, sim_records, stats_records, write_csv, write_json, CellContext,
    EvalDetail, EvalRecord, FprRecord, RatioStats, SweepRecord,
};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mia_audit_core::fp_sim::fpc_sweep;
use mia_audit_core::{
    empirical_tradeoff, estimate_stats, gaussian_curve, lira_grid, ratio_summary, simulate,
    standardize_with, EstimatedStats, EstimationMode, Evaluator, MiaGrid, RowSelection, SimConfig,
    Strategy, VarianceModel,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(
    name = "mia-audit",
    version,
    about = "Membership-inference audits over M x N score grids"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate mean-model shadow grids on a finite Gaussian pool
    Simulate(SimulateArgs),
    /// Estimate per-sample in/out statistics
    Estimate(EstimateArgs),
    /// TPR at fixed FPR for every (strategy, alpha, M') cell
    Evaluate(EvaluateArgs),
    /// Per-sample FPR at each strategy's threshold
    FprDist(FprDistArgs),
    /// Export an analytic or empirical trade-off curve
    Tradeoff(TradeoffArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CommonArgs {
    /// Output directory, created if missing
    #[arg(long)]
    pub out: PathBuf,
    /// Seed for every random choice made by the command [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Format of grid files written by the command
    #[arg(long, value_enum, default_value_t = GridFormat::Binary)]
    pub format: GridFormat,
}

impl CommonArgs {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// one set of stats from every row
    Pooled,
    /// each row standardized with stats from all other rows
    Loo,
    /// `--target-models` rows evaluated, each against all other rows
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variance {
    PerDistribution,
    Shared,
}

impl From<Variance> for VarianceModel {
    fn from(v: Variance) -> Self {
        match v {
            Variance::PerDistribution => VarianceModel::PerDistribution,
            Variance::Shared => VarianceModel::Shared,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    First,
    /// seeded uniform choice without replacement
    Random,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimationArgs {
    /// Input grid: a `.miag` file or a directory with scores.csv and mask.csv
    #[arg(long)]
    pub grid: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Loo)]
    pub mode: Mode,
    /// Number of target rows in oracle mode [default: all]
    #[arg(long)]
    pub target_models: Option<usize>,
    #[arg(long, value_enum, default_value_t = Variance::PerDistribution)]
    pub variance: Variance,
    /// Inflate sigmas by the finite population correction 1/sqrt(1 - N/N+)
    #[arg(long)]
    pub fpc: bool,
    /// Training-set size N for --fpc [default: grid metadata]
    #[arg(long)]
    pub n_train: Option<usize>,
    /// Pool size N+ for --fpc [default: grid metadata]
    #[arg(long)]
    pub n_full: Option<usize>,
    /// How rows are chosen for model subsets and oracle targets
    #[arg(long, value_enum, default_value_t = Selection::First)]
    pub selection: Selection,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse::<Strategy>().map_err(|e| e.to_string())
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err(format!("alpha {a} outside (0, 1)"))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub estimation: EstimationArgs,
    /// Target FPRs
    #[arg(long, value_delimiter = ',', value_parser = parse_alpha, default_value = "0.001,0.01,0.1")]
    pub alphas: Vec<f64>,
    /// naive, pp, per-sample, pp-normal, pp-t, per-sample-normal
    #[arg(
        long,
        value_delimiter = ',',
        value_parser = parse_strategy,
        default_value = "naive,pp,per-sample,pp-normal,pp-t,per-sample-normal"
    )]
    #[serde(serialize_with = "strategy_names")]
    pub strategies: Vec<Strategy>,
    /// Model-subset sizes M' [default: powers of two up to M, plus M]
    #[arg(long, value_delimiter = ',')]
    pub m_prime: Vec<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FprDistArgs {
    #[command(flatten)]
    pub estimation: EstimationArgs,
    #[arg(long, value_delimiter = ',', value_parser = parse_alpha, default_value = "0.001,0.01,0.1")]
    pub alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_strategy, default_value = "naive,pp,per-sample")]
    #[serde(serialize_with = "strategy_names")]
    pub strategies: Vec<Strategy>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub estimation: EstimationArgs,
    /// Also write the grid of LiRA log-likelihood ratios
    #[arg(long)]
    pub lira: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

fn strategy_names<S: serde::Serializer>(v: &[Strategy], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.name()))
}

/// Simulator parameters; flags override values from `--config`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimArgs {
    /// Pool size N+ [default: 1000]
    #[arg(long)]
    pub n_full: Option<usize>,
    /// Training-set size N per model [default: 500]
    #[arg(long)]
    pub n_train: Option<usize>,
    /// Dimension d [default: 500]
    #[arg(long)]
    pub dim: Option<usize>,
    /// Per-coordinate standard deviation of the pool [default: 1]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Number of models M [default: 2048]
    #[arg(long)]
    pub models: Option<usize>,
    /// Draw training sets with replacement (iid baseline)
    #[arg(long)]
    #[serde(default)]
    pub with_replacement: bool,
    #[arg(skip)]
    #[serde(default, skip_serializing)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// JSON file with any of n_full, n_train, dim, sigma, models, seed, with_replacement
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also sweep these sampling ratios N/N+ (writes sweep.csv)
    #[arg(long, value_delimiter = ',')]
    pub sweep: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TradeoffArgs {
    /// Standardized mean gap |mu_in - mu_out| / sigma_out of a Gaussian pair
    #[arg(long, conflicts_with_all = ["grid", "column"], required_unless_present = "grid")]
    pub gaussian_delta: Option<f64>,
    /// sigma_in / sigma_out of the Gaussian pair
    #[arg(long, default_value_t = 1.0, requires = "gaussian_delta")]
    pub ratio: f64,
    /// Alphas of the analytic curve [default: 0.001, 0.002, ..., 0.999]
    #[arg(long, value_delimiter = ',', value_parser = parse_alpha, requires = "gaussian_delta")]
    pub alpha_grid: Vec<f64>,
    /// Grid whose column gives an empirical curve
    #[arg(long, requires = "column")]
    pub grid: Option<PathBuf>,
    /// Sample id or zero-based column index
    #[arg(long, requires = "grid")]
    pub column: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
}

/// Files written and notes gathered by one command.
struct Outcome {
    outputs: Vec<PathBuf>,
    inputs: Vec<PathBuf>,
    notes: Vec<String>,
    config: serde_json::Value,
}

/// Runs a parsed command line; returns the manifest path.
pub fn run(cli: Cli) -> Result<PathBuf> {
    let start = Instant::now();
    let (name, common) = match &cli.command {
        Command::Simulate(a) => ("simulate", &a.common),
        Command::Estimate(a) => ("estimate", &a.common),
        Command::Evaluate(a) => ("evaluate", &a.common),
        Command::FprDist(a) => ("fpr-dist", &a.common),
        Command::Tradeoff(a) => ("tradeoff", &a.common),
    };
    let out = common.out.clone();
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let outcome = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a)?,
        Command::Estimate(a) => cmd_estimate(a)?,
        Command::Evaluate(a) => cmd_evaluate(a)?,
        Command::FprDist(a) => cmd_fpr_dist(a)?,
        Command::Tradeoff(a) => cmd_tradeoff(a)?,
    };
    let mut manifest = RunManifest::new(name, outcome.config);
    for input in &outcome.inputs {
        manifest.inputs.extend(digest_input(input)?);
    }
    manifest.notes = outcome.notes;
    Ok(manifest.finish(&out, &outcome.outputs, start.elapsed())?)
}

fn grid_path(common: &CommonArgs, stem: &str) -> PathBuf {
    match common.format {
        GridFormat::Binary => common.out.join(format!("{stem}.miag")),
        GridFormat::Csv => common.out.join(stem),
    }
}

pub fn resolve_sim_config(args: &SimulateArgs) -> Result<SimConfig> {
    let file: SimArgs = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => SimArgs::default(),
    };
    let s = &args.sim;
    Ok(SimConfig {
        n_full: s.n_full.or(file.n_full).unwrap_or(1000),
        n_train: s.n_train.or(file.n_train).unwrap_or(500),
        dim: s.dim.or(file.dim).unwrap_or(500),
        sigma: s.sigma.or(file.sigma).unwrap_or(1.0),
        n_models: s.models.or(file.models).unwrap_or(2048),
        seed: args.common.seed.or(file.seed).unwrap_or(0),
        with_replacement: s.with_replacement || file.with_replacement,
    })
}

fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome> {
    let config = resolve_sim_config(args)?;
    let (grid, result) = simulate(&config).context("invalid simulation config")?;
    let out = &args.common.out;
    let mut outputs = save_grid(&grid, &grid_path(&args.common, "grid"), args.common.format)?;

    let sim_csv = out.join("sim.csv");
    write_csv(&sim_csv, &sim_records(&grid, &result))?;
    outputs.push(sim_csv);

    let raw = ratio_summary(&result).ok().map(RatioStats::from);
    let corrected = if config.with_replacement {
        None
    } else {
        Some(RatioStats::from(ratio_summary(&result.corrected()?)?))
    };
    let summary = serde_json::json!({
        "config": sim_config_json(&config),
        "fpc": result.fpc,
        "sqrt_fpc": result.fpc.sqrt(),
        "uncorrected": raw,
        "fpc_corrected": corrected,
    });
    let summary_path = out.join("summary.json");
    write_json(&summary_path, &summary)?;
    outputs.push(summary_path);

    if !args.sweep.is_empty() {
        let points = fpc_sweep(&config, &args.sweep)?;
        let path = out.join("sweep.csv");
        write_csv(
            &path,
            &points.iter().map(SweepRecord::from).collect::<Vec<_>>(),
        )?;
        outputs.push(path);
    }
    let mut notes = Vec::new();
    if raw.is_none() {
        notes.push("no finite sigma ratios (zero-variance pool)".to_string());
    }
    Ok(Outcome {
        outputs,
        inputs: args.config.iter().cloned().collect(),
        notes,
        config: serde_json::json!({
            "resolved": sim_config_json(&config),
            "args": args,
        }),
    })
}

fn sim_config_json(c: &SimConfig) -> serde_json::Value {
    serde_json::json!({
        "n_full": c.n_full,
        "n_train": c.n_train,
        "dim": c.dim,
        "sigma": c.sigma,
        "models": c.n_models,
        "seed": c.seed,
        "with_replacement": c.with_replacement,
        "rng": mia_audit_core::fp_sim::RNG_DESCRIPTION,
    })
}

fn load(path: &Path) -> Result<MiaGrid> {
    load_grid(path, GridFormat::detect(path))
        .with_context(|| format!("loading grid {}", path.display()))
}

fn row_selection(est: &EstimationArgs, seed: u64) -> RowSelection {
    match est.selection {
        Selection::First => RowSelection::First,
        Selection::Random => RowSelection::SeededRandom(seed),
    }
}

/// `(n_train, n_full)` for `--fpc`, from flags or the grid's metadata.
fn fpc_sizes(est: &EstimationArgs, grid: &MiaGrid) -> Result<Option<(usize, usize)>> {
    if !est.fpc {
        if est.n_train.is_some() || est.n_full.is_some() {
            bail!("--n-train/--n-full only apply together with --fpc");
        }
        return Ok(None);
    }
    let meta = |key: &str| grid.meta().get(key).and_then(|v| v.parse::<usize>().ok());
    match (
        est.n_train.or_else(|| meta("n_train")),
        est.n_full.or_else(|| meta("n_full")),
    ) {
        (Some(t), Some(f)) => Ok(Some((t, f))),
        _ => bail!("--fpc needs --n-train and --n-full (the grid metadata does not provide them)"),
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Pooled => "pooled",
        Mode::Loo => "loo",
        Mode::Oracle => "oracle",
    }
}

fn estimation<'g>(
    est: &EstimationArgs,
    grid: &'g MiaGrid,
    fpc: Option<(usize, usize)>,
    seed: u64,
) -> Result<EstimatedStats<'g>> {
    let mode = match est.mode {
        Mode::Pooled => EstimationMode::Pooled,
        Mode::Loo => EstimationMode::LeaveOneOut,
        Mode::Oracle => {
            let k = est
                .target_models
                .unwrap_or(grid.n_models())
                .min(grid.n_models());
            if k == 0 {
                bail!("--target-models must be at least 1");
            }
            EstimationMode::Oracle {
                targets: grid.select_models(k, row_selection(est, seed))?,
            }
        }
    };
    if est.target_models.is_some() && est.mode != Mode::Oracle {
        bail!("--target-models requires --mode oracle");
    }
    let stats = estimate_stats(grid, mode, est.variance.into())?;
    Ok(match fpc {
        Some((t, f)) => stats.with_fpc(t, f)?,
        None => stats,
    })
}

fn cmd_estimate(args: &EstimateArgs) -> Result<Outcome> {
    let est = &args.estimation;
    let grid = load(&est.grid)?;
    let fpc = fpc_sizes(est, &grid)?;
    let stats = estimation(est, &grid, fpc, args.common.seed())?;
    let path = args.common.out.join("stats.json");
    write_json(&path, &stats_records(&grid, stats.pooled()))?;
    let mut outputs = vec![path];
    if args.lira {
        let lira = lira_grid(&stats)?;
        outputs.extend(save_grid(
            &lira,
            &grid_path(&args.common, "lira"),
            args.common.format,
        )?);
    }
    let notes = vec![format!(
        "stats.json holds the full-pool estimate; {} column(s) degenerate",
        stats.pooled().degenerate_count()
    )];
    Ok(Outcome {
        outputs,
        inputs: vec![est.grid.clone()],
        notes,
        config: serde_json::json!({ "args": args, "fpc": fpc }),
    })
}

/// Powers of two up to `m`, plus `m` itself.
pub fn default_m_primes(m: usize) -> Vec<usize> {
    let mut v: Vec<usize> = std::iter::successors(Some(1usize), |&p| p.checked_mul(2))
        .take_while(|&p| p <= m)
        .collect();
    if v.last() != Some(&m) {
        v.push(m);
    }
    v
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<Outcome> {
    let est = &args.estimation;
    let grid = load(&est.grid)?;
    let fpc = fpc_sizes(est, &grid)?;
    let seed = args.common.seed();
    let m_primes = if args.m_prime.is_empty() {
        default_m_primes(grid.n_models())
    } else {
        args.m_prime.clone()
    };
    if let Some(&bad) = m_primes.iter().find(|&&m| m == 0 || m > grid.n_models()) {
        bail!("--m-prime {bad} outside 1..={}", grid.n_models());
    }
    let cells: Vec<Result<Vec<EvalDetail>>> = m_primes
        .par_iter()
        .map(|&m| evaluate_subset(args, &grid, m, fpc, seed))
        .collect();
    let mut details = Vec::new();
    for c in cells {
        details.extend(c?);
    }
    let out = &args.common.out;
    let csv_path = out.join("report.csv");
    let records: Vec<EvalRecord> = details.iter().map(|d| d.record.clone()).collect();
    write_csv(&csv_path, &records)?;
    let json_path = out.join("report.json");
    write_json(&json_path, &details)?;
    let undefined = details.iter().filter(|d| d.undefined.is_some()).count();
    let mut notes = Vec::new();
    if undefined > 0 {
        notes.push(format!("{undefined} cell(s) undefined; see report.json"));
    }
    Ok(Outcome {
        outputs: vec![csv_path, json_path],
        inputs: vec![est.grid.clone()],
        notes,
        config: serde_json::json!({ "args": args, "m_prime": m_primes, "fpc": fpc }),
    })
}

fn evaluate_subset(
    args: &EvaluateArgs,
    grid: &MiaGrid,
    m: usize,
    fpc: Option<(usize, usize)>,
    seed: u64,
) -> Result<Vec<EvalDetail>> {
    let est = &args.estimation;
    let sub = grid.subset_models(m, row_selection(est, seed))?;
    let stats = estimation(est, &sub, fpc, seed)?;
    let cal = standardize_with(&stats)?;
    let ctx = CellContext {
        mode: mode_name(est.mode),
        m_used: cal.n_rows(),
        degenerate_columns: cal.degenerate_columns().len(),
        fpc_applied: fpc.is_some(),
    };
    let ev = Evaluator::new(&cal);
    let mut rows = Vec::new();
    for &strategy in &args.strategies {
        for &alpha in &args.alphas {
            let row = match &ev {
                Ok(ev) => ev.evaluate(strategy, alpha).map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            };
            rows.push(eval_detail(
                strategy,
                alpha,
                &ctx,
                row.as_ref().map_err(Clone::clone),
            ));
        }
    }
    Ok(rows)
}

fn cmd_fpr_dist(args: &FprDistArgs) -> Result<Outcome> {
    let est = &args.estimation;
    let grid = load(&est.grid)?;
    let fpc = fpc_sizes(est, &grid)?;
    let stats = estimation(est, &grid, fpc, args.common.seed())?;
    let cal = standardize_with(&stats)?;
    let ev = Evaluator::new(&cal)?;
    let mut records = Vec::new();
    let mut notes = Vec::new();
    for &strategy in &args.strategies {
        for &alpha in &args.alphas {
            match ev.per_sample_fpr(strategy, alpha) {
                Ok(fprs) => {
                    records.extend(cal.columns().iter().zip(fprs).map(|(&x, f)| FprRecord {
                        sample_id: grid.sample_id(x),
                        fpr_x: f.is_finite().then_some(f),
                        strategy: strategy.name(),
                        alpha,
                    }))
                }
                Err(e) => notes.push(format!("{} at alpha={alpha} skipped: {e}", strategy.name())),
            }
        }
    }
    for n in &notes {
        eprintln!("warning: {n}");
    }
    let path = args.common.out.join("fpr_dist.csv");
    write_csv(&path, &records)?;
    Ok(Outcome {
        outputs: vec![path],
        inputs: vec![est.grid.clone()],
        notes,
        config: serde_json::json!({ "args": args, "fpc": fpc }),
    })
}

fn column_index(grid: &MiaGrid, key: &str) -> Result<usize> {
    if let Some(ids) = grid.sample_ids() {
        if let Some(i) = ids.iter().position(|id| id == key) {
            return Ok(i);
        }
    }
    match key.parse::<usize>() {
        Ok(i) if i < grid.n_samples() => Ok(i),
        _ => bail!(
            "no column {key:?} in a grid with {} columns",
            grid.n_samples()
        ),
    }
}

fn cmd_tradeoff(args: &TradeoffArgs) -> Result<Outcome> {
    let mut inputs = Vec::new();
    let curve = match (args.gaussian_delta, &args.grid, &args.column) {
        (Some(delta), _, _) => {
            let alphas: Vec<f64> = if args.alpha_grid.is_empty() {
                (1..1000).map(|i| i as f64 / 1000.0).collect()
            } else {
                args.alpha_grid.clone()
            };
            gaussian_curve(delta, args.ratio, &alphas)?
        }
        (None, Some(path), Some(column)) => {
            let grid = load(path)?;
            inputs.push(path.clone());
            let x = column_index(&grid, column)?;
            let (mut outs, mut ins) = (Vec::new(), Vec::new());
            for m in 0..grid.n_models() {
                if grid.is_member(m, x) {
                    ins.push(grid.score(m, x));
                } else {
                    outs.push(grid.score(m, x));
                }
            }
            empirical_tradeoff(&outs, &ins)
                .with_context(|| format!("column {column} needs both in and out scores"))?
        }
        _ => bail!("give --gaussian-delta, or --grid with --column"),
    };
    let path = args.common.out.join("curve.csv");
    write_csv(&path, &curve_records(&curve))?;
    Ok(Outcome {
        outputs: vec![path],
        inputs,
        notes: Vec::new(),
        config: serde_json::json!({ "args": args }),
    })
}
