//! The `gridsmith` command line.
//!
//! Exit codes: 0 on success, 1 for bad input (missing files, malformed
//! configs, unmet stage dependencies), 2 for internal faults. Every run
//! prints its seed and a hash of its resolved configuration to standard
//! error before doing any work.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytics::{self, AnalyticsError};
use crate::campaign::{Campaign, CampaignConfig, CampaignError, CampaignLedger, LedgerError, StageSelector};
use crate::dataset::{load_csv, split, synth_gen, DatasetError, DatasetSchema, SplitPlan, SynthSpec, TabularDataset};
use crate::dfnn::{DfnnError, DfnnModel};
use crate::searchspace::{GridSpec, SearchError};
use crate::seed::sha256_hex;
use crate::shap::{
    dependence, explain_model, heatmap_order, hyperparameter_shap, importance_csv, BackgroundMode, ExplainMode,
    ShapError,
};

/// Seed used when `--seed` is omitted.
pub const DEFAULT_SEED: u64 = 20_240_607;

#[derive(Debug, Parser)]
#[command(name = "gridsmith", version, about = "Budget-aware staged grid search for feedforward networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate, split or inspect datasets.
    #[command(subcommand)]
    Dataset(DatasetCmd),
    /// Count a pool of settings or price its exhaustive search.
    #[command(subcommand)]
    Phs(PhsCmd),
    /// Run a staged search campaign.
    #[command(subcommand)]
    Campaign(CampaignCmd),
    /// Per-cycle tables from ledgers.
    Report(ReportArgs),
    /// Shapley explanations of a model or of a search.
    #[command(subcommand)]
    Shap(ShapCmd),
}

#[derive(Debug, Args)]
pub struct SeedArg {
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum DatasetCmd {
    /// Write a synthetic dataset and its schema.
    Synth {
        #[arg(long)]
        cases: usize,
        #[arg(long)]
        features: usize,
        #[arg(long)]
        signal: f64,
        #[arg(long)]
        out: PathBuf,
        /// Defaults to `<out stem>.schema.json` beside the data.
        #[arg(long)]
        schema_out: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Write a stratified train-test/validation split.
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Print case, class and predictor counts.
    Inspect {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
    },
}

#[derive(Debug, Subcommand)]
pub enum PhsCmd {
    /// Exact number of settings in a grid.
    Count {
        #[arg(long)]
        grid: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Time to evaluate every setting at `--rtps` seconds each.
    Budget {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        rtps: f64,
        #[command(flatten)]
        seed: SeedArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StageArg {
    All,
    Stage1,
    Stage2,
    Stage3,
}

#[derive(Debug, Subcommand)]
pub enum CampaignCmd {
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        stage: StageArg,
        /// Stage 3 cycle, 1-based.
        #[arg(long)]
        cycle: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the config's seed.
        #[command(flatten)]
        seed: SeedArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Groups,
    Midpoint,
    Time,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(value_enum)]
    pub kind: ReportKind,
    #[arg(long = "ledger", required = true)]
    pub ledgers: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Exact,
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackgroundArg {
    Composite,
    Centroids,
}

#[derive(Debug, Subcommand)]
pub enum ShapCmd {
    /// Explain a trained model on the validation rows.
    Features {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        split: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        #[arg(long, default_value_t = 2048)]
        samples: usize,
        #[arg(long, value_enum, default_value = "composite")]
        background: BackgroundArg,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Rank hyperparameters by their effect on mean_test_auc.
    Hypers {
        #[arg(long = "ledger", required = true)]
        ledgers: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
    },
}

/// A failed command and its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn user(message: impl ToString) -> Self {
        CliError {
            code: 1,
            message: message.to_string(),
        }
    }

    fn internal(message: impl ToString) -> Self {
        CliError {
            code: 2,
            message: message.to_string(),
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        CliError::user(e)
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        CliError::user(e)
    }
}

impl From<LedgerError> for CliError {
    fn from(e: LedgerError) -> Self {
        CliError::user(e)
    }
}

impl From<AnalyticsError> for CliError {
    fn from(e: AnalyticsError) -> Self {
        CliError::user(e)
    }
}

impl From<ShapError> for CliError {
    fn from(e: ShapError) -> Self {
        CliError::user(e)
    }
}

impl From<DfnnError> for CliError {
    fn from(e: DfnnError) -> Self {
        match e {
            DfnnError::Format(_) | DfnnError::InvalidHyperparameters(_) | DfnnError::ShapeMismatch { .. } => {
                CliError::user(e)
            }
            other => CliError::internal(other),
        }
    }
}

impl From<CampaignError> for CliError {
    fn from(e: CampaignError) -> Self {
        if e.is_user_error() {
            CliError::user(e)
        } else {
            CliError::internal(e)
        }
    }
}

fn write_out(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::user(format!("{}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::user(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::user(format!("{}: {e}", path.display())))
}

fn announce(seed: u64, config: &str) {
    eprintln!("seed {seed} config {}", &sha256_hex(config.as_bytes())[..16]);
}

fn resolve(seed: &SeedArg) -> u64 {
    seed.seed.unwrap_or(DEFAULT_SEED)
}

fn read_ledgers(paths: &[PathBuf]) -> Result<Vec<CampaignLedger>, CliError> {
    paths
        .iter()
        .map(|p| {
            if !p.exists() {
                return Err(CliError::user(format!("{}: no such file", p.display())));
            }
            Ok(CampaignLedger::read(p)?)
        })
        .collect()
}

/// Execute a parsed command, writing primary output to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    let emit = |out: &mut dyn std::io::Write, text: &str| -> Result<(), CliError> {
        out.write_all(text.as_bytes()).map_err(CliError::internal)
    };
    match &cli.command {
        Command::Dataset(cmd) => match cmd {
            DatasetCmd::Synth {
                cases,
                features,
                signal,
                out,
                schema_out,
                seed,
            } => {
                let seed = resolve(seed);
                let spec = SynthSpec {
                    case_count: *cases,
                    predictor_count: *features,
                    signal_strength: *signal,
                };
                announce(seed, &format!("synth {cases} {features} {signal}"));
                let data = synth_gen(&spec, seed)?;
                let schema_path = schema_out.clone().unwrap_or_else(|| {
                    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    out.with_file_name(format!("{stem}.schema.json"))
                });
                write_out(out, &data.to_csv_string())?;
                write_out(&schema_path, &data.schema.to_json_pretty())?;
                emit(stdout, &format!("{}\n", data.summary_line()))
            }
            DatasetCmd::Split {
                input,
                schema,
                out,
                seed,
            } => {
                let seed = resolve(seed);
                announce(seed, &format!("split {}", input.display()));
                let data = load(input, schema)?;
                let plan = split(&data, seed)?;
                write_out(out, &plan.to_json())?;
                emit(
                    stdout,
                    &format!(
                        "{} train-test, {} validation\n",
                        plan.train_test_indices.len(),
                        plan.validation_indices.len()
                    ),
                )
            }
            DatasetCmd::Inspect { input, schema, seed } => {
                announce(resolve(seed), &format!("inspect {}", input.display()));
                let data = load(input, schema)?;
                emit(stdout, &format!("{}\n", data.summary_line()))
            }
        },
        Command::Phs(cmd) => match cmd {
            PhsCmd::Count { grid, seed } => {
                let grid_text = read_text(grid)?;
                announce(resolve(seed), &grid_text);
                let pool = GridSpec::from_json(&grid_text)?.pool_size();
                emit(stdout, &format!("{pool} (≈{})\n", scientific(&pool)))
            }
            PhsCmd::Budget { grid, rtps, seed } => {
                let grid_text = read_text(grid)?;
                announce(resolve(seed), &format!("{grid_text}{rtps}"));
                if !(*rtps > 0.0 && rtps.is_finite()) {
                    return Err(CliError::user("--rtps must be positive"));
                }
                let pool = GridSpec::from_json(&grid_text)?.pool_size();
                let t = crate::campaign::estimate_total_time(&pool, *rtps);
                emit(
                    stdout,
                    &format!("{} seconds\n{:.2} hours\n{:.2} years\n", t.seconds, t.hours, t.years),
                )
            }
        },
        Command::Campaign(CampaignCmd::Run {
            config,
            stage,
            cycle,
            out,
            seed,
        }) => {
            if !config.exists() {
                return Err(CliError::user(format!("{}: no such file", config.display())));
            }
            let mut cfg = CampaignConfig::from_file(config)?;
            if let Some(s) = seed.seed {
                cfg.seed = s;
            }
            eprintln!("seed {} config {}", cfg.seed, cfg.hash());
            let selector = match (stage, cycle) {
                (StageArg::All, None) => StageSelector::All,
                (StageArg::Stage1, None) => StageSelector::Stage1,
                (StageArg::Stage2, None) => StageSelector::Stage2,
                (StageArg::Stage3, Some(k)) if *k >= 1 => StageSelector::Stage3(*k),
                (StageArg::Stage3, _) => return Err(CliError::user("--stage stage3 needs --cycle N (N ≥ 1)")),
                (_, Some(_)) => return Err(CliError::user("--cycle applies to --stage stage3 only")),
            };
            let campaign = Campaign::from_config(cfg)?;
            let run = campaign.run(out, selector)?;
            for m in &run.metas {
                emit(
                    stdout,
                    &format!(
                        "{}: {} settings in {:.1} s (budget {:.1} s)\n",
                        m.cycle_label, m.settings, m.elapsed_seconds, m.budget_seconds
                    ),
                )?;
            }
            if let Some(best) = &run.best {
                emit(
                    stdout,
                    &format!(
                        "best mean_test_auc {:.6} ({} setting {})\n",
                        best.cv.mean_test_auc, best.cycle_label, best.setting.id
                    ),
                )?;
            }
            if let Some(v) = run.validation_auc {
                emit(stdout, &format!("validation auc {v:.6}\n"))?;
            }
            Ok(())
        }
        Command::Report(args) => {
            let names: Vec<String> = args.ledgers.iter().map(|p| p.display().to_string()).collect();
            announce(resolve(&args.seed), &names.join(","));
            let ledgers = read_ledgers(&args.ledgers)?;
            let summary = analytics::summarize(&ledgers)?;
            let [groups, midpoint, time] = analytics::report_tables(&summary);
            let text = match args.kind {
                ReportKind::Groups => groups.1,
                ReportKind::Midpoint => midpoint.1,
                ReportKind::Time => time.1,
            };
            match &args.out {
                Some(p) => write_out(p, &text),
                None => emit(stdout, &text),
            }
        }
        Command::Shap(ShapCmd::Features {
            model,
            input,
            schema,
            split: split_path,
            out,
            mode,
            samples,
            background,
            seed,
        }) => {
            let seed = resolve(seed);
            announce(seed, &format!("{} {} {:?} {samples} {:?}", model.display(), input.display(), mode, background));
            let model = DfnnModel::from_json(&read_text(model)?)?;
            let data = load(input, schema)?;
            if model.input_dim() != data.predictor_count() {
                return Err(CliError::user(format!(
                    "model expects {} features, dataset has {}",
                    model.input_dim(),
                    data.predictor_count()
                )));
            }
            let plan = SplitPlan::from_json_file(split_path)?;
            plan.check(&data)?;
            let mode = match mode {
                ModeArg::Auto => ExplainMode::Auto,
                ModeArg::Exact => ExplainMode::Exact,
                ModeArg::Kernel => ExplainMode::Kernel { n_samples: *samples },
            };
            let bg = match background {
                BackgroundArg::Composite => BackgroundMode::Composite,
                BackgroundArg::Centroids => BackgroundMode::Centroids,
            };
            let shap = explain_model(&model, &data, &plan, mode, bg, seed)?;
            create_dir(out)?;
            let ranking = crate::shap::importance(&shap)?;
            write_out(&out.join("shap.csv"), &shap.to_csv())?;
            write_out(&out.join("importance.csv"), &importance_csv(&ranking))?;
            if shap.case_count() >= 2 {
                write_out(&out.join("heatmap.csv"), &heatmap_order(&shap)?.to_csv(&shap))?;
            }
            if shap.case_count() >= 3 {
                let (cases, _) = data.subset(&plan.validation_indices);
                let dep = dependence(&shap, cases.view())?;
                write_out(&out.join("dependence.csv"), &dep.ranking_csv())?;
                write_out(&out.join("interaction.csv"), &dep.interaction_csv())?;
            }
            emit(stdout, &importance_csv(&ranking))
        }
        Command::Shap(ShapCmd::Hypers { ledgers, out, seed }) => {
            let seed = resolve(seed);
            let names: Vec<String> = ledgers.iter().map(|p| p.display().to_string()).collect();
            announce(seed, &names.join(","));
            let rows: Vec<_> = read_ledgers(ledgers)?.into_iter().flat_map(|l| l.rows).collect();
            let h = hyperparameter_shap(&rows, seed)?;
            create_dir(out)?;
            write_out(&out.join("hyper_shap.csv"), &h.matrix.to_csv())?;
            write_out(&out.join("hyper_importance.csv"), &importance_csv(&h.importance))?;
            if h.matrix.case_count() >= 3 {
                let dep = dependence(&h.matrix, h.holdout.view())?;
                write_out(&out.join("hyper_dependence.csv"), &dep.ranking_csv())?;
                write_out(&out.join("hyper_interaction.csv"), &dep.interaction_csv())?;
            }
            emit(stdout, &importance_csv(&h.importance))
        }
    }
}

fn load(input: &Path, schema: &Path) -> Result<TabularDataset, CliError> {
    let schema = DatasetSchema::from_json_file(schema)?;
    Ok(load_csv(input, &schema)?)
}

fn scientific(n: &num_bigint::BigUint) -> String {
    let digits = n.to_string();
    if digits.len() < 2 {
        return format!("{digits}e0");
    }
    let mantissa: f64 = format!("{}.{}", &digits[..1], &digits[1..digits.len().min(17)])
        .parse()
        .expect("decimal digits");
    format!("{:.3}e{}", mantissa, digits.len() - 1)
}

/// Parse arguments and run; returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut out = std::io::stdout().lock();
    match execute(&cli, &mut out) {
        Ok(()) => {
            let _ = out.flush();
            0
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

/// Entry point of the `gridsmith` binary.
pub fn run() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    run_from(std::env::args_os())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific_form() {
        assert_eq!(scientific(&427_602_384_000_000u64.into()), "4.276e14");
        assert_eq!(scientific(&7u64.into()), "7e0");
    }

    #[test]
    fn cycle_flag_needs_stage3() {
        let cli = Cli::try_parse_from(["gridsmith", "campaign", "run", "--config", "/nonexistent.json", "--out", "x"]);
        assert!(cli.is_ok());
        assert_eq!(run_from(["gridsmith", "bogus"]), 1);
    }
}
