use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::ValueEnum;
use sigforest::dataio::{export_metrics, MetricRecord};
use sigforest::metrics::{aupr, auroc, fpr_at_95tpr};
use sigforest::path::FunctionalDataset;
use sigforest::rng::derive_seed;
use sigforest::Forest;

use super::{dataset_stem, load_input_dataset, CliError, FitFlags};
use crate::manifest::ManifestWriter;
use crate::method::{parse_methods, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalSplit {
    /// Fit and evaluate on the training file (labels unused for fitting)
    Train,
    /// Fit on the training file, evaluate on the matching _TEST file
    Test,
}

#[derive(clap::Args)]
pub struct BenchArgs {
    /// Directory of dataset files (native JSON or `<Name>_TRAIN.tsv/csv`)
    #[arg(long)]
    data_dir: PathBuf,
    /// Comma-separated methods, e.g. sif,ksif-brownian,fif-cosine,if
    #[arg(long, default_value = "sif,ksif-brownian,fif-brownian,if")]
    methods: String,
    #[arg(long, value_enum, default_value_t = EvalSplit::Train)]
    eval: EvalSplit,
    #[command(flatten)]
    flags: FitFlags,
    /// Output directory for metrics.csv and timings.csv
    #[arg(long)]
    out_dir: PathBuf,
}

struct DatasetEntry {
    stem: String,
    train: PathBuf,
    test: Option<PathBuf>,
}

fn discover_datasets(dir: &Path) -> Result<Vec<DatasetEntry>, CliError> {
    let mut groups: BTreeMap<String, (Option<PathBuf>, Option<PathBuf>)> = BTreeMap::new();
    let entries = std::fs::read_dir(dir).map_err(|e| {
        CliError::data(format!("cannot read data dir {}: {e}", dir.display()))
    })?;
    for entry in entries {
        let path = entry.map_err(CliError::data)?.path();
        if !path.is_file() {
            continue;
        }
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        if !matches!(ext.as_deref(), Some("json" | "tsv" | "csv" | "txt")) {
            continue;
        }
        let raw_stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let slot = groups.entry(dataset_stem(&path)).or_default();
        if raw_stem.ends_with("_TEST") {
            slot.1 = Some(path);
        } else {
            slot.0 = Some(path);
        }
    }
    let datasets: Vec<DatasetEntry> = groups
        .into_iter()
        .filter_map(|(stem, (train, test))| train.map(|t| DatasetEntry { stem, train: t, test }))
        .collect();
    if datasets.is_empty() {
        return Err(CliError::data(format!(
            "no dataset files found in {}; fetch the UCR archive \
             (https://www.cs.ucr.edu/~eamonn/time_series_data_2018/) and place \
             <Name>_TRAIN.tsv files there, or generate data with `sigforest simulate`",
            dir.display()
        )));
    }
    Ok(datasets)
}

/// Metric name/value pairs plus the wall time of one fit+score run.
type MethodOutcome = (Vec<(&'static str, f64)>, f64);

fn run_method(
    method: &Method,
    flags: &FitFlags,
    train: &FunctionalDataset,
    eval: &FunctionalDataset,
    stem: &str,
    master_seed: u64,
) -> Result<MethodOutcome, CliError> {
    let mut config = flags.resolve()?;
    config.criterion = method.criterion;
    if let Some(kind) = method.dictionary {
        config.dictionary.kind = kind;
    }
    config.seed = derive_seed(master_seed, &format!("bench/{stem}/{}", method.name), 0);

    let started = Instant::now();
    let forest = Forest::fit(train, &config)?;
    let report = forest.score_all(eval)?;
    let seconds = started.elapsed().as_secs_f64();

    let values = vec![
        ("auroc", auroc(&report)?),
        ("aupr", aupr(&report)?),
        ("fpr_at_95tpr", fpr_at_95tpr(&report)?),
    ];
    Ok((values, seconds))
}

pub fn run(args: BenchArgs) -> Result<(), CliError> {
    let methods = parse_methods(&args.methods)?;
    // surface config errors before creating any output
    let base_config = args.flags.resolve()?;
    let datasets = discover_datasets(&args.data_dir)?;

    std::fs::create_dir_all(&args.out_dir).map_err(CliError::data)?;
    let metrics_path = args.out_dir.join("metrics.csv");
    let timings_path = args.out_dir.join("timings.csv");
    let seed = base_config.seed;

    let manifest = ManifestWriter::start(
        args.out_dir.join("manifest.json"),
        "bench",
        serde_json::json!({
            "base_config": base_config,
            "methods": methods.iter().map(|m| m.name.clone()).collect::<Vec<_>>(),
            "eval": format!("{:?}", args.eval),
            "datasets": datasets.iter().map(|d| d.stem.clone()).collect::<Vec<_>>(),
        }),
        seed,
        &[&metrics_path, &timings_path],
    )?;

    let mut records: Vec<MetricRecord> = Vec::new();
    // wall times live in their own file so the metrics file stays
    // byte-reproducible across runs and thread counts
    let mut timings: Vec<(String, String, f64)> = Vec::new();

    for entry in &datasets {
        let loaded = load_input_dataset(&entry.train, None).and_then(|train| {
            let eval = match (args.eval, &entry.test) {
                (EvalSplit::Train, _) => train.clone(),
                (EvalSplit::Test, Some(test)) => load_input_dataset(test, None)?,
                (EvalSplit::Test, None) => {
                    return Err(CliError::data(format!(
                        "{}: no _TEST file next to {}",
                        entry.stem,
                        entry.train.display()
                    )))
                }
            };
            Ok((train, eval))
        });
        let (train, eval) = match loaded {
            Ok(pair) => pair,
            Err(err) => {
                eprintln!("warning: skipping {}: {err}", entry.stem);
                continue;
            }
        };
        for method in &methods {
            match run_method(method, &args.flags, &train, &eval, &entry.stem, seed) {
                Ok((values, seconds)) => {
                    for (metric, value) in values {
                        records.push(MetricRecord {
                            dataset: entry.stem.clone(),
                            method: method.name.clone(),
                            metric: metric.to_string(),
                            value,
                            seed,
                        });
                    }
                    timings.push((entry.stem.clone(), method.name.clone(), seconds));
                }
                Err(err) => {
                    eprintln!("warning: {} / {}: {err}", entry.stem, method.name);
                }
            }
        }
    }

    if records.is_empty() {
        return Err(CliError::data("no dataset/method combination succeeded"));
    }
    export_metrics(&records, &metrics_path)?;
    write_timings(&timings, &timings_path)?;
    manifest.finish()?;
    println!(
        "benchmarked {} methods on {} datasets -> {}",
        methods.len(),
        datasets.len(),
        metrics_path.display()
    );
    Ok(())
}

fn write_timings(timings: &[(String, String, f64)], path: &Path) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::fs::File::create(path).map_err(CliError::data)?;
    writeln!(out, "dataset,method,wall_seconds").map_err(CliError::data)?;
    for (dataset, method, seconds) in timings {
        writeln!(out, "{dataset},{method},{seconds}").map_err(CliError::data)?;
    }
    Ok(())
}
