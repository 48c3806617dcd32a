use std::path::PathBuf;

use sigforest::Forest;

use super::{load_input_dataset, manifest_path, CliError, FitFlags};
use crate::manifest::ManifestWriter;

#[derive(clap::Args)]
pub struct FitArgs {
    /// Dataset file (native JSON, or raw series resolved via a preset)
    #[arg(long)]
    data: PathBuf,
    /// Label-map preset name when the file stem is not one
    #[arg(long)]
    label_preset: Option<String>,
    #[command(flatten)]
    flags: FitFlags,
    /// Output model file (JSON)
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: FitArgs) -> Result<(), CliError> {
    let config = args.flags.resolve()?;
    let dataset = load_input_dataset(&args.data, args.label_preset.as_deref())?;
    let manifest = ManifestWriter::start(
        manifest_path(&args.out),
        "fit",
        serde_json::to_value(&config).map_err(CliError::data)?,
        config.seed,
        &[&args.out],
    )?;
    let forest = Forest::fit(&dataset, &config)?;
    forest.save(&args.out)?;
    manifest.finish()?;
    println!(
        "fitted {} trees (subsample {}) on {} curves -> {}",
        forest.trees().len(),
        forest.subsample_used(),
        dataset.len(),
        args.out.display()
    );
    Ok(())
}
