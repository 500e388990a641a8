//! Command-line frontend: prepare, merge, stats, train, predict,
//! evaluate, compare, and the analytic ensemble-error calculator.
//!
//! Every knob can come from flags or from a `--config` JSON file; flags
//! win. `--emit-config` writes the effective merged configuration, and
//! re-running a command from that file reproduces its outputs byte for
//! byte. All randomness flows from `--seed` (default 42).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal
//! error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use votum::data::{
    CartParams, EnsembleSpec, ForestParams, GnbParams, KnnParams, ModelKind, ModelParams, Preset,
    Voting,
};
use votum::ensemble::{ensemble_error, EnsembleErrorQuery};
use votum::eval::{
    compare, confusion, feature_rows, make_task, metrics, Averaging, CompareConfig, CompareEntry,
    EvaluationReport, MetricRow, TaskKind,
};
use votum::ingest::{
    dataset_stats, impute_missing, load_csv, merge_datasets, prepare_dataset, write_csv,
    write_predictions_to, IngestOptions, IngestReport, PrepareParams,
};
use votum::persist::{load_ensemble, save_ensemble};
use votum::report::{render_report, render_stats, EmitFormat};

#[derive(Parser, Debug)]
#[command(name = "votum", version, about = "Ensemble voting intrusion detection for IoT telemetry")]
struct Cli {
    /// Load defaults from a JSON config file; flags win over the file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write the effective merged configuration to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    emit_config: Option<PathBuf>,

    /// Binary label column name (default: label).
    #[arg(long, global = true)]
    label_col: Option<String>,

    /// Attack-type column name (default: type).
    #[arg(long, global = true)]
    type_col: Option<String>,

    /// Extra missing-value sentinel; repeatable (default: "", NaN, nan, -).
    #[arg(long = "sentinel", global = true, action = ArgAction::Append)]
    sentinels: Option<Vec<String>>,

    /// Held-out fraction for splits (default: 0.2).
    #[arg(long, global = true)]
    test_fraction: Option<f64>,

    /// Master seed for all randomness (default: 42).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Voting mode: hard or soft (default: hard).
    #[arg(long, global = true)]
    voting: Option<String>,

    /// Metric averaging: weighted or macro (default: weighted).
    #[arg(long, global = true)]
    averaging: Option<String>,

    /// Output format: table, csv, or markdown (default: table).
    #[arg(long, global = true)]
    emit: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct HyperArgs {
    /// CART/forest maximum tree depth (default: 12).
    #[arg(long)]
    max_depth: Option<usize>,

    /// Minimum samples per leaf (default: 2).
    #[arg(long)]
    min_leaf: Option<usize>,

    /// Minimum impurity decrease to split (default: 0).
    #[arg(long)]
    min_impurity_decrease: Option<f64>,

    /// Number of forest trees (default: 100).
    #[arg(long)]
    trees: Option<usize>,

    /// Features considered per split (default: floor(sqrt(p))).
    #[arg(long)]
    features_per_split: Option<usize>,

    /// Disable bootstrap sampling for forest trees.
    #[arg(long, action = ArgAction::SetTrue)]
    no_bootstrap: Option<bool>,

    /// Neighbors for k-NN (default: 5).
    #[arg(long)]
    k: Option<usize>,

    /// Variance smoothing fraction for naive Bayes (default: 1e-9).
    #[arg(long)]
    var_smoothing: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Preprocess a CSV: encode, impute, scale; emit params and report.
    Prepare {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a JSON preprocessing report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Reuse fitted preprocessing params (apply mode).
        #[arg(long)]
        params: Option<PathBuf>,
        /// Write fitted preprocessing params here.
        #[arg(long)]
        params_out: Option<PathBuf>,
    },
    /// Combine several CSVs into one, imputing columns the parts lack.
    Merge {
        #[arg(long = "input", action = ArgAction::Append, value_delimiter = ',')]
        inputs: Option<Vec<PathBuf>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-attack-type row counts.
    Stats {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a model or ensemble preset on a prepared CSV.
    Train {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Ensemble preset: dt-rf-knn-nb, dt-rf-nb, or dt-rf-knn.
        #[arg(long)]
        preset: Option<String>,
        /// Single model kind: cart, rf, knn, or nb.
        #[arg(long)]
        model: Option<String>,
        /// Task: binary or multiclass (default: binary).
        #[arg(long)]
        task: Option<String>,
        #[command(flatten)]
        hyper: HyperArgs,
    },
    /// Append a `predicted` column to an input CSV.
    Predict {
        /// Saved model file from `train`.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a saved model on a labeled prepared CSV.
    Evaluate {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-compare models and presets over datasets.
    Compare {
        #[arg(long = "input", action = ArgAction::Append, value_delimiter = ',')]
        inputs: Option<Vec<PathBuf>>,
        /// Single models to include, or `none` (default: knn,rf,cart,nb).
        #[arg(long, value_delimiter = ',')]
        models: Option<Vec<String>>,
        /// Presets to include, or `none` (default: all three).
        #[arg(long, value_delimiter = ',')]
        presets: Option<Vec<String>>,
        /// Task: binary or multiclass (default: binary).
        #[arg(long)]
        task: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        hyper: HyperArgs,
    },
    /// Analytic majority-ensemble error for n members of error epsilon.
    EnsembleError {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Wrong-member threshold (default: floor(n/2)+1).
        #[arg(long)]
        k: Option<u32>,
    },
}

/// Every knob of every command, fully serializable. A config file holds
/// any subset; flags override file values field by field.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    inputs: Option<Vec<PathBuf>>,
    out: Option<PathBuf>,
    report: Option<PathBuf>,
    params: Option<PathBuf>,
    params_out: Option<PathBuf>,
    model_file: Option<PathBuf>,
    label_col: Option<String>,
    type_col: Option<String>,
    sentinels: Option<Vec<String>>,
    test_fraction: Option<f64>,
    seed: Option<u64>,
    voting: Option<String>,
    averaging: Option<String>,
    emit: Option<String>,
    task: Option<String>,
    preset: Option<String>,
    model: Option<String>,
    models: Option<Vec<String>>,
    presets: Option<Vec<String>>,
    max_depth: Option<usize>,
    min_leaf: Option<usize>,
    min_impurity_decrease: Option<f64>,
    trees: Option<usize>,
    features_per_split: Option<usize>,
    no_bootstrap: Option<bool>,
    k_neighbors: Option<usize>,
    var_smoothing: Option<f64>,
    n: Option<u32>,
    epsilon: Option<f64>,
    k: Option<u32>,
}

impl RunConfig {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config `{}`: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("cannot parse config `{}`: {e}", path.display())))
    }

    /// Overlay `self` (flag values) on `base` (file values).
    fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            inputs: self.inputs.or(base.inputs),
            out: self.out.or(base.out),
            report: self.report.or(base.report),
            params: self.params.or(base.params),
            params_out: self.params_out.or(base.params_out),
            model_file: self.model_file.or(base.model_file),
            label_col: self.label_col.or(base.label_col),
            type_col: self.type_col.or(base.type_col),
            sentinels: self.sentinels.or(base.sentinels),
            test_fraction: self.test_fraction.or(base.test_fraction),
            seed: self.seed.or(base.seed),
            voting: self.voting.or(base.voting),
            averaging: self.averaging.or(base.averaging),
            emit: self.emit.or(base.emit),
            task: self.task.or(base.task),
            preset: self.preset.or(base.preset),
            model: self.model.or(base.model),
            models: self.models.or(base.models),
            presets: self.presets.or(base.presets),
            max_depth: self.max_depth.or(base.max_depth),
            min_leaf: self.min_leaf.or(base.min_leaf),
            min_impurity_decrease: self.min_impurity_decrease.or(base.min_impurity_decrease),
            trees: self.trees.or(base.trees),
            features_per_split: self.features_per_split.or(base.features_per_split),
            no_bootstrap: self.no_bootstrap.or(base.no_bootstrap),
            k_neighbors: self.k_neighbors.or(base.k_neighbors),
            var_smoothing: self.var_smoothing.or(base.var_smoothing),
            n: self.n.or(base.n),
            epsilon: self.epsilon.or(base.epsilon),
            k: self.k.or(base.k),
        }
    }

    fn emit_to(&self, path: &Path) -> Result<(), CliError> {
        let value = serde_json::to_value(self).map_err(|e| CliError::Internal(e.to_string()))?;
        let clean: serde_json::Value = match value {
            serde_json::Value::Object(map) => {
                serde_json::Value::Object(map.into_iter().filter(|(_, v)| !v.is_null()).collect())
            }
            other => other,
        };
        let text =
            serde_json::to_string_pretty(&clean).map_err(|e| CliError::Internal(e.to_string()))?;
        std::fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write `{}`: {e}", path.display())))
    }

    // Resolved values with the documented defaults.
    fn ingest_options(&self) -> IngestOptions {
        let mut opts = IngestOptions::default();
        if let Some(c) = &self.label_col {
            opts.binary_label_column = c.clone();
        }
        if let Some(c) = &self.type_col {
            opts.type_label_column = c.clone();
        }
        if let Some(extra) = &self.sentinels {
            opts.missing_sentinels.extend(extra.iter().cloned());
        }
        opts
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(42)
    }

    fn test_fraction(&self) -> f64 {
        self.test_fraction.unwrap_or(0.2)
    }

    fn voting(&self) -> Result<Voting, CliError> {
        match &self.voting {
            None => Ok(Voting::Hard),
            Some(s) => Voting::parse(s)
                .ok_or_else(|| CliError::Usage(format!("unknown voting mode `{s}`"))),
        }
    }

    fn averaging(&self) -> Result<Averaging, CliError> {
        match &self.averaging {
            None => Ok(Averaging::Weighted),
            Some(s) => Averaging::parse(s)
                .ok_or_else(|| CliError::Usage(format!("unknown averaging `{s}`"))),
        }
    }

    fn emit_format(&self) -> Result<EmitFormat, CliError> {
        match &self.emit {
            None => Ok(EmitFormat::Table),
            Some(s) => EmitFormat::parse(s)
                .ok_or_else(|| CliError::Usage(format!("unknown emit format `{s}`"))),
        }
    }

    fn task_kind(&self) -> Result<TaskKind, CliError> {
        match &self.task {
            None => Ok(TaskKind::Binary),
            Some(s) => {
                TaskKind::parse(s).ok_or_else(|| CliError::Usage(format!("unknown task `{s}`")))
            }
        }
    }

    fn cart_params(&self) -> CartParams {
        let d = CartParams::default();
        CartParams {
            max_depth: self.max_depth.unwrap_or(d.max_depth),
            min_leaf_samples: self.min_leaf.unwrap_or(d.min_leaf_samples),
            min_impurity_decrease: self.min_impurity_decrease.unwrap_or(d.min_impurity_decrease),
        }
    }

    fn model_params(&self, kind: ModelKind) -> ModelParams {
        match kind {
            ModelKind::Cart => ModelParams::Cart(self.cart_params()),
            ModelKind::RandomForest => ModelParams::Forest(ForestParams {
                n_trees: self.trees.unwrap_or(100),
                tree: self.cart_params(),
                features_per_split: self.features_per_split,
                bootstrap: !self.no_bootstrap.unwrap_or(false),
            }),
            ModelKind::Knn => ModelParams::Knn(KnnParams { k: self.k_neighbors.unwrap_or(5) }),
            ModelKind::GaussianNb => ModelParams::Gnb(GnbParams {
                var_smoothing_fraction: self.var_smoothing.unwrap_or(1e-9),
            }),
        }
    }

    fn spec_for_kinds(
        &self,
        kinds: &[ModelKind],
        voting: Voting,
    ) -> Result<EnsembleSpec, CliError> {
        let members = kinds.iter().map(|k| self.model_params(*k)).collect();
        let weights = vec![1.0; kinds.len()];
        EnsembleSpec::new(members, weights, voting).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

macro_rules! data_error_from {
    ($($ty:ty),*) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Data(e.to_string())
            }
        })*
    };
}
data_error_from!(
    votum::ingest::IngestError,
    votum::eval::EvalError,
    votum::ensemble::EnsembleError,
    votum::persist::PersistError,
    votum::data::DataError
);

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let base = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let (cfg, command_name) = merge_config(&cli, base);
    // Shared enum-valued flags are rejected up front, whether or not
    // the command ends up consulting them.
    cfg.voting()?;
    cfg.averaging()?;
    cfg.emit_format()?;
    cfg.task_kind()?;
    if let Some(path) = &cli.emit_config {
        cfg.emit_to(path)?;
    }
    match command_name {
        "prepare" => cmd_prepare(&cfg),
        "merge" => cmd_merge(&cfg),
        "stats" => cmd_stats(&cfg),
        "train" => cmd_train(&cfg),
        "predict" => cmd_predict(&cfg),
        "evaluate" => cmd_evaluate(&cfg),
        "compare" => cmd_compare(&cfg),
        "ensemble-error" => cmd_ensemble_error(&cfg),
        _ => unreachable!("unmapped subcommand"),
    }
}

/// Fold the parsed CLI into a RunConfig layered over the config file.
fn merge_config(cli: &Cli, base: RunConfig) -> (RunConfig, &'static str) {
    let mut flags = RunConfig {
        label_col: cli.label_col.clone(),
        type_col: cli.type_col.clone(),
        sentinels: cli.sentinels.clone(),
        test_fraction: cli.test_fraction,
        seed: cli.seed,
        voting: cli.voting.clone(),
        averaging: cli.averaging.clone(),
        emit: cli.emit.clone(),
        ..RunConfig::default()
    };
    let name = match &cli.command {
        Command::Prepare { input, out, report, params, params_out } => {
            flags.inputs = input.clone().map(|p| vec![p]);
            flags.out = out.clone();
            flags.report = report.clone();
            flags.params = params.clone();
            flags.params_out = params_out.clone();
            "prepare"
        }
        Command::Merge { inputs, out } => {
            flags.inputs = inputs.clone();
            flags.out = out.clone();
            "merge"
        }
        Command::Stats { input, out } => {
            flags.inputs = input.clone().map(|p| vec![p]);
            flags.out = out.clone();
            "stats"
        }
        Command::Train { input, out, preset, model, task, hyper } => {
            flags.inputs = input.clone().map(|p| vec![p]);
            flags.out = out.clone();
            flags.preset = preset.clone();
            flags.model = model.clone();
            flags.task = task.clone();
            apply_hyper(&mut flags, hyper);
            "train"
        }
        Command::Predict { model, input, out } => {
            flags.model_file = model.clone();
            flags.inputs = input.clone().map(|p| vec![p]);
            flags.out = out.clone();
            "predict"
        }
        Command::Evaluate { model, input, out } => {
            flags.model_file = model.clone();
            flags.inputs = input.clone().map(|p| vec![p]);
            flags.out = out.clone();
            "evaluate"
        }
        Command::Compare { inputs, models, presets, task, out, hyper } => {
            flags.inputs = inputs.clone();
            flags.models = models.clone();
            flags.presets = presets.clone();
            flags.task = task.clone();
            flags.out = out.clone();
            apply_hyper(&mut flags, hyper);
            "compare"
        }
        Command::EnsembleError { n, epsilon, k } => {
            flags.n = *n;
            flags.epsilon = *epsilon;
            flags.k = *k;
            "ensemble-error"
        }
    };
    (flags.over(base), name)
}

fn apply_hyper(cfg: &mut RunConfig, hyper: &HyperArgs) {
    cfg.max_depth = hyper.max_depth;
    cfg.min_leaf = hyper.min_leaf;
    cfg.min_impurity_decrease = hyper.min_impurity_decrease;
    cfg.trees = hyper.trees;
    cfg.features_per_split = hyper.features_per_split;
    cfg.no_bootstrap = hyper.no_bootstrap.filter(|b| *b);
    cfg.k_neighbors = hyper.k;
    cfg.var_smoothing = hyper.var_smoothing;
}

fn require_one_input(cfg: &RunConfig) -> Result<&PathBuf, CliError> {
    match cfg.inputs.as_deref() {
        Some([one]) => Ok(one),
        Some([]) | None => Err(CliError::Usage("--input is required".to_string())),
        Some(_) => Err(CliError::Usage("exactly one --input is expected".to_string())),
    }
}

fn require_out(cfg: &RunConfig) -> Result<&PathBuf, CliError> {
    cfg.out.as_ref().ok_or_else(|| CliError::Usage("--out is required".to_string()))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn emit_text(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PrepareReportFile {
    summary: IngestReport,
    params: PrepareParams,
}

fn cmd_prepare(cfg: &RunConfig) -> Result<(), CliError> {
    let input = require_one_input(cfg)?;
    let out = require_out(cfg)?;
    let opts = cfg.ingest_options();

    let supplied = match &cfg.params {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Data(format!("cannot read `{}`: {e}", path.display())))?;
            Some(serde_json::from_str::<PrepareParams>(&text).map_err(|e| {
                CliError::Data(format!("cannot parse params `{}`: {e}", path.display()))
            })?)
        }
        None => None,
    };

    let raw = load_csv(input, None, &opts)?;
    let outcome = prepare_dataset(&raw, supplied.as_ref())?;
    write_csv(&outcome.dataset, out)?;

    if let Some(path) = &cfg.params_out {
        let text = serde_json::to_string_pretty(&outcome.params)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        std::fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write `{}`: {e}", path.display())))?;
    }
    if let Some(path) = &cfg.report {
        let file = PrepareReportFile { summary: outcome.report.clone(), params: outcome.params };
        let text =
            serde_json::to_string_pretty(&file).map_err(|e| CliError::Internal(e.to_string()))?;
        std::fs::write(path, text)
            .map_err(|e| CliError::Data(format!("cannot write `{}`: {e}", path.display())))?;
    }

    println!(
        "prepared {} rows ({} dropped, {} unseen tokens) -> {}",
        outcome.report.rows_out,
        outcome.report.dropped_missing_label,
        outcome.report.unseen_tokens,
        out.display()
    );
    Ok(())
}

fn cmd_merge(cfg: &RunConfig) -> Result<(), CliError> {
    let inputs = cfg
        .inputs
        .as_deref()
        .filter(|list| !list.is_empty())
        .ok_or_else(|| CliError::Usage("at least one --input is required".to_string()))?;
    let out = require_out(cfg)?;
    let opts = cfg.ingest_options();

    let parts =
        inputs.iter().map(|path| load_csv(path, None, &opts)).collect::<Result<Vec<_>, _>>()?;
    let merged = merge_datasets(&parts)?;
    let (filled, _) = impute_missing(&merged, None)?;
    write_csv(&filled, out)?;
    println!(
        "merged {} files, {} rows, {} columns -> {}",
        inputs.len(),
        filled.n_rows(),
        filled.n_cols(),
        out.display()
    );
    Ok(())
}

fn cmd_stats(cfg: &RunConfig) -> Result<(), CliError> {
    let input = require_one_input(cfg)?;
    let opts = cfg.ingest_options();
    let data = load_csv(input, None, &opts)?;
    let stats = dataset_stats(&data)?;
    let text = render_stats(&stats, cfg.emit_format()?);
    emit_text(&text, cfg.out.as_ref())
}

fn build_spec(cfg: &RunConfig) -> Result<EnsembleSpec, CliError> {
    let voting = cfg.voting()?;
    match (&cfg.preset, &cfg.model) {
        (Some(_), Some(_)) => {
            Err(CliError::Usage("--preset and --model are mutually exclusive".to_string()))
        }
        (Some(name), None) => {
            let preset = Preset::parse(name).map_err(|e| CliError::Usage(e.to_string()))?;
            let mut spec = cfg.spec_for_kinds(&preset.member_kinds(), voting)?;
            spec.preset = Some(preset);
            Ok(spec)
        }
        (None, Some(name)) => {
            let kind = ModelKind::parse(name).map_err(|e| CliError::Usage(e.to_string()))?;
            cfg.spec_for_kinds(&[kind], voting)
        }
        (None, None) => Err(CliError::Usage("either --preset or --model is required".to_string())),
    }
}

fn cmd_train(cfg: &RunConfig) -> Result<(), CliError> {
    let input = require_one_input(cfg)?;
    let out = require_out(cfg)?;
    let task_kind = cfg.task_kind()?;
    let spec = build_spec(cfg)?;
    let opts = cfg.ingest_options();

    let data = load_csv(input, None, &opts)?;
    let task = make_task(&data, task_kind)?;
    let model = votum::ensemble::fit_ensemble(&spec, &task, cfg.seed())?;
    save_ensemble(&model, task_kind, out)?;
    println!(
        "trained {} ({} task) on {} rows -> {}",
        spec.id(),
        task_kind.as_str(),
        task.n_rows(),
        out.display()
    );
    Ok(())
}

fn require_model_file(cfg: &RunConfig) -> Result<&PathBuf, CliError> {
    cfg.model_file.as_ref().ok_or_else(|| CliError::Usage("--model FILE is required".to_string()))
}

fn cmd_predict(cfg: &RunConfig) -> Result<(), CliError> {
    let model_path = require_model_file(cfg)?;
    let input = require_one_input(cfg)?;
    let opts = cfg.ingest_options();

    let (model, _task) = load_ensemble(model_path)?;
    let data = load_csv(input, None, &opts)?;
    let (features, _) = feature_rows(&data)?;
    if data.n_rows() > 0 && features.n_cols() != model.n_features() {
        return Err(CliError::Data(format!(
            "input has {} feature columns, model expects {}",
            features.n_cols(),
            model.n_features()
        )));
    }
    let predictions = model.predict_batch(&features)?;
    let labels: Vec<String> =
        predictions.iter().map(|&p| model.labels.label(p).unwrap_or("?").to_string()).collect();

    let write = |w: &mut dyn std::io::Write| {
        write_predictions_to(&data, &labels, w).map_err(|e| CliError::Data(e.to_string()))
    };
    match &cfg.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)
                .map_err(|e| CliError::Data(format!("cannot write `{}`: {e}", path.display())))?;
            write(&mut file)
        }
        None => write(&mut std::io::stdout()),
    }
}

fn cmd_evaluate(cfg: &RunConfig) -> Result<(), CliError> {
    let model_path = require_model_file(cfg)?;
    let input = require_one_input(cfg)?;
    let opts = cfg.ingest_options();
    let averaging = cfg.averaging()?;

    let (model, task_kind) = load_ensemble(model_path)?;
    let data = load_csv(input, None, &opts)?;
    let task = make_task(&data, task_kind)?;
    let predictions = model.predict_batch(&task.features)?;
    let cm = confusion(&task.labels, &predictions, &task.label_set)?;
    let values = metrics(&cm, averaging)?;
    if values.zero_denominator_cells > 0 {
        eprintln!(
            "warning: {} zero-denominator metric cells were defined as 0",
            values.zero_denominator_cells
        );
    }

    let report = EvaluationReport {
        rows: vec![MetricRow {
            dataset: file_stem(input),
            model: model.spec.id(),
            task: task_kind,
            averaging,
            values,
        }],
        failures: vec![],
    };
    let text = render_report(&report, cfg.emit_format()?);
    emit_text(&text, cfg.out.as_ref())
}

fn cmd_compare(cfg: &RunConfig) -> Result<(), CliError> {
    let inputs = cfg
        .inputs
        .as_deref()
        .filter(|list| !list.is_empty())
        .ok_or_else(|| CliError::Usage("at least one --input is required".to_string()))?;
    let task = cfg.task_kind()?;
    let averaging = cfg.averaging()?;
    let voting = cfg.voting()?;
    let opts = cfg.ingest_options();

    let mut entries: Vec<CompareEntry> = Vec::new();
    let model_names = cfg
        .models
        .clone()
        .unwrap_or_else(|| vec!["knn".into(), "rf".into(), "cart".into(), "nb".into()]);
    for name in model_names.iter().filter(|n| n.as_str() != "none") {
        let kind = ModelKind::parse(name).map_err(|e| CliError::Usage(e.to_string()))?;
        entries.push(CompareEntry {
            id: kind.as_str().to_string(),
            spec: cfg.spec_for_kinds(&[kind], voting)?,
        });
    }
    let preset_names = cfg
        .presets
        .clone()
        .unwrap_or_else(|| Preset::ALL.iter().map(|p| p.as_str().to_string()).collect());
    for name in preset_names.iter().filter(|n| n.as_str() != "none") {
        let preset = Preset::parse(name).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut spec = cfg.spec_for_kinds(&preset.member_kinds(), voting)?;
        spec.preset = Some(preset);
        entries.push(CompareEntry { id: preset.as_str().to_string(), spec });
    }
    if entries.is_empty() {
        return Err(CliError::Usage("no models or presets selected".to_string()));
    }

    let datasets = inputs
        .iter()
        .map(|path| Ok((file_stem(path), load_csv(path, None, &opts)?)))
        .collect::<Result<Vec<_>, votum::ingest::IngestError>>()?;

    let compare_cfg =
        CompareConfig { task, averaging, test_fraction: cfg.test_fraction(), seed: cfg.seed() };
    let report = compare(&datasets, &entries, &compare_cfg);
    let text = render_report(&report, cfg.emit_format()?);
    emit_text(&text, cfg.out.as_ref())
}

fn cmd_ensemble_error(cfg: &RunConfig) -> Result<(), CliError> {
    let n = cfg.n.ok_or_else(|| CliError::Usage("--n is required".to_string()))?;
    let epsilon =
        cfg.epsilon.ok_or_else(|| CliError::Usage("--epsilon is required".to_string()))?;
    let query =
        EnsembleErrorQuery::new(n, epsilon, cfg.k).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("{:.9}", ensemble_error(&query));
    Ok(())
}
