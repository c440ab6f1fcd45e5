//! Command line driver: train, evaluate, cross-validate, ablate,
//! grid-search, inspect measurement neighborhoods, and export checkpoints.
//!
//! Exit codes: 0 success, 2 usage or data error, 3 numeric divergence.

mod checkpoint;
mod inspect;
mod report;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use qpdn::data::{
    encode_with_labels, load_corpus, load_dataset, load_pretrained, split_dataset, Dataset,
    PretrainedInit, SignConvention, Vocabulary,
};
use qpdn::error::read_named;
use qpdn::model::VariantTag;
use qpdn::train::{
    cross_validate, evaluate, grid_search, run_ablation, train_model, GridPool, TrainConfig,
};
use qpdn::{Error, Result};

use checkpoint::Checkpoint;
use inspect::DistanceMetric;

#[derive(Parser)]
#[command(
    name = "qpdn",
    version,
    about = "Quantum probability driven text classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one model and write a checkpoint plus reports.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a labeled file.
    Eval(EvalArgs),
    /// K-fold cross-validation on one file.
    Cv(CvArgs),
    /// Train every requested variant under one budget and tabulate deltas.
    Ablate(AblateArgs),
    /// Hyperparameter grid search scored by dev accuracy.
    Grid(GridArgs),
    /// Nearest vocabulary words for each measurement state.
    Inspect(InspectArgs),
    /// Dump a checkpoint as JSON lines.
    Export(ExportArgs),
}

/// Hyperparameters, resolved as defaults < config file < flags, with
/// QPDN_SEED (when set) having the final say on the seed.
#[derive(Args)]
struct ConfigArgs {
    /// TOML config file; any flag below overrides its value.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model variant tag (full, real-double-dim, fixed-amplitude,
    /// mean-weights, idf-weights, fixed-orthogonal-projectors, dense-on-rho).
    #[arg(long)]
    variant: Option<String>,
    /// Embedding dimension n.
    #[arg(long)]
    embedding_dim: Option<usize>,
    /// Number of measurement states k.
    #[arg(long)]
    measurements: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    l2_ratio: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Consecutive non-improving epochs tolerated before early stopping.
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Minimum corpus frequency for a vocabulary entry.
    #[arg(long)]
    min_count: Option<usize>,
    /// Fraction of the training file held out for model selection.
    #[arg(long)]
    dev_fraction: Option<f64>,
    /// Renormalize parameters every this many batches.
    #[arg(long)]
    normalization_cadence: Option<usize>,
    /// absolute-value or sign-to-phase.
    #[arg(long)]
    sign_convention: Option<String>,
    /// Fold count for cv.
    #[arg(long)]
    folds: Option<usize>,
    /// Worker threads for fold/grid/variant level parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<TrainConfig> {
        let mut config = match &self.config {
            Some(path) => toml::from_str(&read_named(path)?)
                .map_err(|e| Error::Config(format!("cannot parse {}: {e}", path.display())))?,
            None => TrainConfig::default(),
        };
        if let Some(variant) = &self.variant {
            config.variant = VariantTag::parse(variant)?;
        }
        if let Some(n) = self.embedding_dim {
            config.embedding_dim = n;
        }
        if let Some(k) = self.measurements {
            config.measurement_count = k;
        }
        if let Some(lr) = self.learning_rate {
            config.learning_rate = lr;
        }
        if let Some(l2) = self.l2_ratio {
            config.l2_ratio = l2;
        }
        if let Some(b) = self.batch_size {
            config.batch_size = b;
        }
        if let Some(e) = self.epochs {
            config.epochs = e;
        }
        if let Some(p) = self.patience {
            config.patience = p;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if let Some(m) = self.min_count {
            config.min_count = m;
        }
        if let Some(d) = self.dev_fraction {
            config.dev_fraction = d;
        }
        if let Some(c) = self.normalization_cadence {
            config.normalization_cadence = c;
        }
        if let Some(s) = &self.sign_convention {
            config.sign_convention = parse_sign_convention(s)?;
        }
        if let Some(f) = self.folds {
            config.folds = f;
        }
        if let Some(t) = self.threads {
            config.threads = t;
        }
        if let Ok(seed) = std::env::var("QPDN_SEED") {
            config.seed = seed.parse().map_err(|_| {
                Error::Config(format!(
                    "QPDN_SEED must be an unsigned integer, got {seed:?}"
                ))
            })?;
        }
        config.validate()?;
        Ok(config)
    }
}

fn parse_sign_convention(s: &str) -> Result<SignConvention> {
    match s {
        "absolute-value" => Ok(SignConvention::AbsoluteValue),
        "sign-to-phase" => Ok(SignConvention::SignToPhase),
        other => Err(Error::Config(format!(
            "unknown sign convention {other:?}; expected absolute-value or sign-to-phase"
        ))),
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Training data, one `label<TAB>text` per line.
    #[arg(long)]
    data: PathBuf,
    /// Optional test file, evaluated once with the selected parameters.
    #[arg(long)]
    test: Option<PathBuf>,
    /// Pretrained vectors, one `token v1 .. vn` per line.
    #[arg(long)]
    pretrained: Option<PathBuf>,
    /// Output directory for model.qpdn, report.txt, and report.jsonl.
    #[arg(long, default_value = "qpdn-out")]
    out: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Labeled file; labels must come from the checkpoint's label set.
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    pretrained: Option<PathBuf>,
    /// Optional directory for cv.txt and cv.jsonl.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct AblateArgs {
    #[arg(long)]
    data: PathBuf,
    /// Optional test file; without it the table reads dev accuracy.
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    pretrained: Option<PathBuf>,
    /// Comma-separated variant tags; default is all seven.
    #[arg(long, value_delimiter = ',')]
    variants: Option<Vec<String>>,
    /// Optional directory for ablation.txt and ablation.jsonl.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    pretrained: Option<PathBuf>,
    /// Learning rate axis; defaults to the standard pool.
    #[arg(long, value_delimiter = ',')]
    learning_rates: Option<Vec<f64>>,
    /// L2 ratio axis.
    #[arg(long, value_delimiter = ',')]
    l2_ratios: Option<Vec<f64>>,
    /// Batch size axis.
    #[arg(long, value_delimiter = ',')]
    batch_sizes: Option<Vec<usize>>,
    /// Measurement count axis.
    #[arg(long, value_delimiter = ',')]
    measurement_counts: Option<Vec<usize>>,
    /// Optional directory for grid.txt and grid.jsonl.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Neighbors per measurement state.
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// overlap (phase-insensitive, default) or euclidean (raw coordinates).
    #[arg(long, default_value = "overlap")]
    metric: String,
    /// Optional JSON-lines output file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Print to stdout, treating a closed pipe as a normal early exit so
/// `qpdn export | head` does not report an error.
fn emit<I: IntoIterator<Item = S>, S: std::fmt::Display>(items: I) -> Result<()> {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for item in items {
        if let Err(e) = writeln!(out, "{item}") {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                return Ok(());
            }
            return Err(e.into());
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Cv(args) => cmd_cv(args),
        Command::Ablate(args) => cmd_ablate(args),
        Command::Grid(args) => cmd_grid(args),
        Command::Inspect(args) => cmd_inspect(args),
        Command::Export(args) => cmd_export(args),
    };
    if let Err(error) = outcome {
        eprintln!("error: {error}");
        std::process::exit(i32::from(error.exit_code()));
    }
}

/// Load the training file, then encode the optional test file against the
/// training vocabulary and label table.
fn load_splits(
    data: &Path,
    test: Option<&Path>,
    min_count: usize,
) -> Result<(Dataset, Vocabulary, Option<Dataset>)> {
    let (dataset, vocab) = load_dataset(data, min_count)?;
    let test = match test {
        Some(path) => {
            let corpus = load_corpus(path)?;
            Some(encode_with_labels(&corpus, &vocab, &dataset.labels)?)
        }
        None => None,
    };
    Ok((dataset, vocab, test))
}

fn load_init(
    pretrained: Option<&Path>,
    vocab: &Vocabulary,
    dim: usize,
) -> Result<Option<PretrainedInit>> {
    match pretrained {
        Some(path) => {
            let init = load_pretrained(path, vocab, dim)?;
            eprintln!(
                "pretrained vectors cover {}/{} vocabulary entries",
                init.coverage(),
                vocab.size()
            );
            Ok(Some(init))
        }
        None => Ok(None),
    }
}

fn carve_dev(dataset: &Dataset, config: &TrainConfig) -> (Dataset, Dataset) {
    split_dataset(dataset, config.dev_fraction, config.seed)
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let config = args.config.resolve()?;
    let (dataset, vocab, test) = load_splits(&args.data, args.test.as_deref(), config.min_count)?;
    let pretrained = load_init(args.pretrained.as_deref(), &vocab, config.embedding_dim)?;
    let (train, dev) = carve_dev(&dataset, &config);
    let dev_ref = (!dev.is_empty()).then_some(&dev);
    let (params, run) = train_model(
        &config,
        &train,
        dev_ref,
        test.as_ref(),
        &vocab,
        pretrained.as_ref(),
    )?;

    std::fs::create_dir_all(&args.out)?;
    let model_path = args.out.join("model.qpdn");
    checkpoint::save(
        &model_path,
        &Checkpoint {
            params,
            vocab: vocab.tokens().to_vec(),
            labels: dataset.labels.clone(),
            seed: config.seed,
        },
    )?;
    report::write_lines(&args.out.join("report.txt"), &report::run_lines(&run))?;
    report::write_records(&args.out.join("report.jsonl"), &report::run_records(&run))?;

    println!("variant: {}", run.variant);
    println!("epochs_run: {}", run.epochs_run);
    println!("best_dev_accuracy: {:.4}", run.best_dev_accuracy);
    println!("train_accuracy: {:.4}", run.train_accuracy);
    if let Some(test_accuracy) = run.test_accuracy {
        println!("test_accuracy: {test_accuracy:.4}");
    }
    println!("checkpoint: {}", model_path.display());
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let ckpt = checkpoint::load(&args.checkpoint)?;
    let vocab = Vocabulary::from_token_list(ckpt.vocab.clone())?;
    let corpus = load_corpus(&args.data)?;
    let dataset = encode_with_labels(&corpus, &vocab, &ckpt.labels)?;
    let result = evaluate(&ckpt.params, &dataset)?;
    let mut lines = vec![
        format!("accuracy: {:.4}", result.accuracy),
        format!("total: {}", result.total),
    ];
    for (actual, row) in result.confusion.iter().enumerate() {
        for (predicted, &count) in row.iter().enumerate() {
            lines.push(format!(
                "confusion actual={} predicted={} count={}",
                ckpt.labels[actual], ckpt.labels[predicted], count
            ));
        }
    }
    emit(lines)
}

fn cmd_cv(args: CvArgs) -> Result<()> {
    let config = args.config.resolve()?;
    let (dataset, vocab) = load_dataset(&args.data, config.min_count)?;
    let pretrained = load_init(args.pretrained.as_deref(), &vocab, config.embedding_dim)?;
    let cv = cross_validate(&config, &dataset, &vocab, pretrained.as_ref())?;
    emit(report::cv_lines(&cv))?;
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        report::write_lines(&out.join("cv.txt"), &report::cv_lines(&cv))?;
        report::write_records(&out.join("cv.jsonl"), &report::cv_records(&cv))?;
    }
    Ok(())
}

fn parse_variants(raw: Option<&[String]>) -> Result<Vec<VariantTag>> {
    match raw {
        Some(tags) => tags.iter().map(|t| VariantTag::parse(t)).collect(),
        None => Ok(VariantTag::all().to_vec()),
    }
}

fn cmd_ablate(args: AblateArgs) -> Result<()> {
    let config = args.config.resolve()?;
    let variants = parse_variants(args.variants.as_deref())?;
    let (dataset, vocab, test) = load_splits(&args.data, args.test.as_deref(), config.min_count)?;
    let pretrained = load_init(args.pretrained.as_deref(), &vocab, config.embedding_dim)?;
    let (train, dev) = carve_dev(&dataset, &config);
    let dev_ref = (!dev.is_empty()).then_some(&dev);
    let table = run_ablation(
        &config,
        &variants,
        &train,
        dev_ref,
        test.as_ref(),
        &vocab,
        pretrained.as_ref(),
    )?;
    emit([format!("metric: {}", table.metric)])?;
    emit(report::ablation_table(&table))?;
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        report::write_lines(&out.join("ablation.txt"), &report::ablation_table(&table))?;
        report::write_records(
            &out.join("ablation.jsonl"),
            &report::ablation_records(&table),
        )?;
    }
    Ok(())
}

fn cmd_grid(args: GridArgs) -> Result<()> {
    let config = args.config.resolve()?;
    let defaults = GridPool::default();
    let pool = GridPool {
        learning_rates: args.learning_rates.unwrap_or(defaults.learning_rates),
        l2_ratios: args.l2_ratios.unwrap_or(defaults.l2_ratios),
        batch_sizes: args.batch_sizes.unwrap_or(defaults.batch_sizes),
        measurement_counts: args
            .measurement_counts
            .unwrap_or(defaults.measurement_counts),
    };
    let (dataset, vocab) = load_dataset(&args.data, config.min_count)?;
    let pretrained = load_init(args.pretrained.as_deref(), &vocab, config.embedding_dim)?;
    let (train, dev) = carve_dev(&dataset, &config);
    if dev.is_empty() {
        return Err(Error::Config(
            "grid search scores dev accuracy; set dev_fraction above 0".into(),
        ));
    }
    eprintln!("grid: {} configurations", pool.len());
    let grid = grid_search(&config, &pool, &train, &dev, &vocab, pretrained.as_ref())?;
    emit(report::grid_lines(&grid).iter().take(10))?;
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        report::write_lines(&out.join("grid.txt"), &report::grid_lines(&grid))?;
        report::write_records(&out.join("grid.jsonl"), &report::grid_records(&grid))?;
    }
    Ok(())
}

fn cmd_inspect(args: InspectArgs) -> Result<()> {
    if args.top == 0 {
        return Err(Error::Config("--top must be at least 1".into()));
    }
    let metric = DistanceMetric::parse(&args.metric)?;
    let ckpt = checkpoint::load(&args.checkpoint)?;
    let mut top = args.top;
    if top > ckpt.vocab.len() {
        top = ckpt.vocab.len();
        eprintln!(
            "warning: --top {} exceeds the vocabulary size; clamped to {top}",
            args.top
        );
    }
    if !ckpt.params.variant.uses_measurements() {
        eprintln!(
            "note: variant {} never reads its measurement states; this inspects their stored initialization",
            ckpt.params.variant
        );
    }
    let neighbors = inspect::nearest_words(&ckpt.params, &ckpt.vocab, top, metric);
    emit(report::neighbor_lines(&neighbors))?;
    if let Some(out) = &args.out {
        report::write_records(out, &report::neighbor_records(&neighbors))?;
    }
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let ckpt = checkpoint::load(&args.checkpoint)?;
    let records = export_records(&ckpt);
    match &args.out {
        Some(path) => report::write_records(path, &records)?,
        None => emit(&records)?,
    }
    Ok(())
}

/// JSON-lines image of a checkpoint: a metadata record, the vocabulary and
/// label tables, then one record per parameter array in storage order.
fn export_records(ckpt: &Checkpoint) -> Vec<serde_json::Value> {
    use qpdn::model::PARAM_BLOCKS;
    use serde_json::json;
    let params = &ckpt.params;
    let mut records = vec![
        json!({
            "record": "checkpoint",
            "embedding_dim": params.embedding_dim,
            "measurement_count": params.measurement_count,
            "vocab_size": params.vocab_size,
            "label_count": params.label_count,
            "variant": params.variant.as_str(),
            "seed": ckpt.seed,
        }),
        json!({ "record": "vocab", "tokens": ckpt.vocab }),
        json!({ "record": "labels", "names": ckpt.labels }),
    ];
    for block in PARAM_BLOCKS {
        records.push(json!({
            "record": "array",
            "name": block.name(),
            "values": params.block(block),
        }));
    }
    records
}
