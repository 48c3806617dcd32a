use std::path::PathBuf;

use sigforest::dataio::export_scores;
use sigforest::Forest;

use super::{load_input_dataset, manifest_path, CliError};
use crate::manifest::ManifestWriter;

#[derive(clap::Args)]
pub struct ScoreArgs {
    /// Fitted model file
    #[arg(long)]
    model: PathBuf,
    /// Dataset to score
    #[arg(long)]
    data: PathBuf,
    /// Label-map preset name when the file stem is not one
    #[arg(long)]
    label_preset: Option<String>,
    /// Output scores CSV
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: ScoreArgs) -> Result<(), CliError> {
    let forest = Forest::load(&args.model)?;
    let dataset = load_input_dataset(&args.data, args.label_preset.as_deref())?;
    let manifest = ManifestWriter::start(
        manifest_path(&args.out),
        "score",
        serde_json::to_value(forest.config()).map_err(CliError::data)?,
        forest.config().seed,
        &[&args.out],
    )?;
    let report = forest.score_all(&dataset)?;
    if report.scores().iter().any(|s| !s.is_finite()) {
        return Err(CliError::numeric("scoring produced non-finite values"));
    }
    export_scores(&report, &args.out)?;
    manifest.finish()?;
    println!("scored {} curves -> {}", report.len(), args.out.display());
    Ok(())
}
