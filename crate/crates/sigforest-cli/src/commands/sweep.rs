use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use sigforest::datagen::{generate, SynthSpec};
use sigforest::metrics::{auroc, kendall_tau};
use sigforest::rng::derive_seed;
use sigforest::Forest;

use super::simulate::ScenarioArg;
use super::{manifest_path, CliError, FitFlags};
use crate::manifest::ManifestWriter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    /// Vary the number of split windows; reports AUROC per setting
    Windows,
    /// Vary the signature depth; reports pairwise Kendall tau of the
    /// score rankings
    Depth,
}

#[derive(clap::Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    param: SweepParam,
    /// Settings: a comma list (`2,3,4`) or an inclusive range (`1:10`)
    #[arg(long)]
    values: String,
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    /// Repetitions per setting; each repetition regenerates the dataset
    #[arg(long)]
    reps: usize,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    fraction: Option<f64>,
    /// Extra abnormal volatility (robust-noise scenario only)
    #[arg(long, default_value_t = 0.1)]
    noise_level: f64,
    #[command(flatten)]
    flags: FitFlags,
    /// Output CSV
    #[arg(long)]
    out: PathBuf,
}

fn parse_values(text: &str) -> Result<Vec<usize>, CliError> {
    let values: Vec<usize> = if let Some((a, b)) = text.split_once(':') {
        let start: usize = a
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad range start `{a}`")))?;
        let end: usize = b
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad range end `{b}`")))?;
        if start > end {
            return Err(CliError::usage(format!("empty range `{text}`")));
        }
        (start..=end).collect()
    } else {
        text.split(',')
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| CliError::usage(format!("bad value `{v}`")))
            })
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(CliError::usage("no sweep values given"));
    }
    Ok(values)
}

struct SweepRow {
    setting: String,
    rep: String,
    metric: &'static str,
    value: f64,
}

pub fn run(args: SweepArgs) -> Result<(), CliError> {
    if args.reps == 0 {
        return Err(CliError::usage("--reps must be at least 1"));
    }
    let values = parse_values(&args.values)?;
    let base_config = args.flags.resolve()?;
    let seed = base_config.seed;

    let mut spec = SynthSpec::new(args.scenario.to_scenario(args.noise_level));
    spec.seed = seed;
    if let Some(n) = args.n {
        spec.n = n;
    }
    if let Some(p) = args.p {
        spec.p = p;
    }
    if let Some(fraction) = args.fraction {
        spec.fraction_abnormal = fraction;
    }

    let manifest = ManifestWriter::start(
        manifest_path(&args.out),
        "sweep",
        serde_json::json!({
            "param": format!("{:?}", args.param),
            "values": values,
            "reps": args.reps,
            "spec": spec,
            "base_config": base_config,
        }),
        seed,
        &[&args.out],
    )?;

    let rows = match args.param {
        SweepParam::Windows => windows_sweep(&args, &values, &spec, seed)?,
        SweepParam::Depth => depth_sweep(&args, &values, &spec, seed)?,
    };
    write_rows(&args.out, args.param, &rows)?;
    manifest.finish()?;
    println!("wrote {} sweep rows -> {}", rows.len(), args.out.display());
    Ok(())
}

fn windows_sweep(
    args: &SweepArgs,
    values: &[usize],
    spec: &SynthSpec,
    seed: u64,
) -> Result<Vec<SweepRow>, CliError> {
    let mut rows = Vec::new();
    for &windows in values {
        let mut sum = 0.0;
        for rep in 0..args.reps {
            let mut rep_spec = spec.clone();
            rep_spec.seed = derive_seed(seed, "sweep-data", rep as u64);
            let dataset = generate(&rep_spec)?;
            let mut config = args.flags.resolve()?;
            config.windows = windows;
            config.seed = derive_seed(seed, "sweep-fit", ((windows as u64) << 32) | rep as u64);
            let forest = Forest::fit(&dataset, &config)?;
            let auc = auroc(&forest.score_all(&dataset)?)?;
            sum += auc;
            rows.push(SweepRow {
                setting: windows.to_string(),
                rep: rep.to_string(),
                metric: "auroc",
                value: auc,
            });
        }
        rows.push(SweepRow {
            setting: windows.to_string(),
            rep: "mean".to_string(),
            metric: "auroc",
            value: sum / args.reps as f64,
        });
    }
    Ok(rows)
}

fn depth_sweep(
    args: &SweepArgs,
    values: &[usize],
    spec: &SynthSpec,
    seed: u64,
) -> Result<Vec<SweepRow>, CliError> {
    let mut rows = Vec::new();
    let mut taus: Vec<Vec<f64>> = Vec::new();
    let mut pair_names: Vec<String> = Vec::new();
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            pair_names.push(format!("{}v{}", values[i], values[j]));
            taus.push(Vec::new());
        }
    }
    for rep in 0..args.reps {
        let mut rep_spec = spec.clone();
        rep_spec.seed = derive_seed(seed, "sweep-data", rep as u64);
        let dataset = generate(&rep_spec)?;
        let mut scores: Vec<Vec<f64>> = Vec::new();
        for &depth in values {
            let mut config = args.flags.resolve()?;
            config.depth = depth;
            config.seed = derive_seed(seed, "sweep-fit", ((depth as u64) << 32) | rep as u64);
            let forest = Forest::fit(&dataset, &config)?;
            scores.push(forest.score_all(&dataset)?.scores().to_vec());
        }
        let mut pair = 0;
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                let tau = kendall_tau(&scores[i], &scores[j])?;
                taus[pair].push(tau);
                rows.push(SweepRow {
                    setting: pair_names[pair].clone(),
                    rep: rep.to_string(),
                    metric: "kendall_tau",
                    value: tau,
                });
                pair += 1;
            }
        }
    }
    for (name, mut pair_taus) in pair_names.into_iter().zip(taus) {
        pair_taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = pair_taus[pair_taus.len() / 2];
        rows.push(SweepRow {
            setting: name,
            rep: "median".to_string(),
            metric: "kendall_tau",
            value: median,
        });
    }
    Ok(rows)
}

fn write_rows(path: &Path, param: SweepParam, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut out = std::fs::File::create(path).map_err(CliError::data)?;
    writeln!(out, "param,setting,rep,metric,value").map_err(CliError::data)?;
    let param = match param {
        SweepParam::Windows => "windows",
        SweepParam::Depth => "depth",
    };
    for row in rows {
        writeln!(
            out,
            "{param},{},{},{},{}",
            row.setting, row.rep, row.metric, row.value
        )
        .map_err(CliError::data)?;
    }
    Ok(())
}
