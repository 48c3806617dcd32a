//! Dataset ingestion, label mapping and file persistence.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::ScoreReport;
use crate::path::{FunctionalDataset, Label};

/// Maps raw integer class labels onto normal/anomaly. Rows whose label is
/// in neither set are dropped (and counted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap {
    normal: BTreeSet<i64>,
    anomaly: BTreeSet<i64>,
}

impl LabelMap {
    pub fn new(normal: impl IntoIterator<Item = i64>, anomaly: impl IntoIterator<Item = i64>) -> Result<LabelMap> {
        let normal: BTreeSet<i64> = normal.into_iter().collect();
        let anomaly: BTreeSet<i64> = anomaly.into_iter().collect();
        if normal.is_empty() || anomaly.is_empty() || !normal.is_disjoint(&anomaly) {
            return Err(Error::InvalidLabelMap);
        }
        Ok(LabelMap { normal, anomaly })
    }

    pub fn classify(&self, raw: i64) -> Option<Label> {
        if self.normal.contains(&raw) {
            Some(Label::Normal)
        } else if self.anomaly.contains(&raw) {
            Some(Label::Anomaly)
        } else {
            None
        }
    }
}

/// Built-in label maps and expected grid sizes for the benchmark datasets.
#[derive(Debug, Clone)]
pub struct DatasetPreset {
    pub name: &'static str,
    /// Alternative stems the archive uses for the same dataset.
    pub aliases: &'static [&'static str],
    pub label_map: LabelMap,
    pub expected_points: usize,
}

pub fn presets() -> Vec<DatasetPreset> {
    let map = |n: &[i64], a: &[i64]| LabelMap::new(n.iter().copied(), a.iter().copied()).unwrap();
    vec![
        DatasetPreset {
            name: "Chinatown",
            aliases: &[],
            label_map: map(&[2], &[1]),
            expected_points: 24,
        },
        DatasetPreset {
            name: "Coffee",
            aliases: &[],
            label_map: map(&[1], &[0]),
            expected_points: 286,
        },
        DatasetPreset {
            name: "ECGFiveDays",
            aliases: &[],
            label_map: map(&[1], &[2]),
            expected_points: 136,
        },
        DatasetPreset {
            name: "ECG200",
            aliases: &[],
            label_map: map(&[1], &[-1]),
            expected_points: 96,
        },
        DatasetPreset {
            name: "Handoutlines",
            aliases: &["HandOutlines"],
            label_map: map(&[1], &[0]),
            expected_points: 2709,
        },
        DatasetPreset {
            name: "SonyRobotAI1",
            aliases: &["SonyAIBORobotSurface1"],
            label_map: map(&[2], &[1]),
            expected_points: 70,
        },
        DatasetPreset {
            name: "SonyRobotAI2",
            aliases: &["SonyAIBORobotSurface2"],
            label_map: map(&[2], &[1]),
            expected_points: 65,
        },
        DatasetPreset {
            name: "StarLightCurves",
            aliases: &[],
            label_map: map(&[3], &[1, 2]),
            expected_points: 1024,
        },
        DatasetPreset {
            name: "TwoLeadECG",
            aliases: &[],
            label_map: map(&[1], &[2]),
            expected_points: 82,
        },
        DatasetPreset {
            name: "ECG5000",
            aliases: &[],
            label_map: map(&[1], &[3, 4, 5]),
            expected_points: 140,
        },
    ]
}

/// Find a preset by dataset name or alias (case-insensitive).
pub fn preset_for(name: &str) -> Option<DatasetPreset> {
    let lower = name.to_ascii_lowercase();
    presets().into_iter().find(|p| {
        p.name.to_ascii_lowercase() == lower
            || p.aliases.iter().any(|a| a.to_ascii_lowercase() == lower)
    })
}

/// Result of loading a series file: the mapped dataset plus the number of
/// rows dropped for carrying unmapped labels.
#[derive(Debug)]
pub struct LoadReport {
    pub dataset: FunctionalDataset,
    pub dropped_rows: usize,
}

/// Load a `label, v_1, ..., v_p` series file (delimiter auto-detected among
/// tab and comma) onto the uniform grid `t_i = i / (p - 1)`.
pub fn load_series_file(path: &Path, label_map: &LabelMap) -> Result<LoadReport> {
    let text = std::fs::read_to_string(path)?;
    parse_series(&text, label_map, &path.display().to_string())
}

fn parse_series(text: &str, label_map: &LabelMap, origin: &str) -> Result<LoadReport> {
    let mut samples: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<Label> = Vec::new();
    let mut dropped = 0usize;
    let mut expected_len: Option<usize> = None;

    for (line_no, line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let delim = if trimmed.contains('\t') { '\t' } else { ',' };
        let fields: Vec<&str> = trimmed.split(delim).map(str::trim).collect();
        if fields.len() < 2 {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected a label followed by at least one value".into(),
            });
        }
        match expected_len {
            None => expected_len = Some(fields.len()),
            Some(e) if e != fields.len() => {
                return Err(Error::RaggedRow { line: line_no, expected: e - 1, got: fields.len() - 1 })
            }
            _ => {}
        }
        let raw_label: f64 = fields[0].parse().map_err(|_| Error::Parse {
            line: line_no,
            msg: format!("unparseable label `{}`", fields[0]),
        })?;
        if raw_label.fract() != 0.0 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("label `{}` is not an integer", fields[0]),
            });
        }
        let values: Vec<f64> = fields[1..]
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("unparseable value `{f}`"),
                })
            })
            .collect::<Result<_>>()?;
        match label_map.classify(raw_label as i64) {
            Some(label) => {
                samples.push(values);
                labels.push(label);
            }
            None => dropped += 1,
        }
    }

    if samples.is_empty() {
        return Err(Error::EmptyFile(origin.to_string()));
    }
    let p = samples[0].len();
    let grid = FunctionalDataset::uniform_grid(p);
    Ok(LoadReport {
        dataset: FunctionalDataset::new(grid, 1, samples, Some(labels))?,
        dropped_rows: dropped,
    })
}

const DATASET_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct DatasetFile {
    format_version: u32,
    /// Values round-trip bit-exactly: JSON floats are written in
    /// shortest-round-trip decimal form.
    float_encoding: String,
    dataset: FunctionalDataset,
}

/// Persist a dataset; `load_dataset(save_dataset(ds)) == ds` exactly.
pub fn save_dataset(dataset: &FunctionalDataset, path: &Path) -> Result<()> {
    let file = DatasetFile {
        format_version: DATASET_FORMAT_VERSION,
        float_encoding: "decimal-roundtrip".into(),
        dataset: dataset.clone(),
    };
    let mut out = serde_json::to_string(&file)?;
    out.push('\n');
    std::fs::write(path, out)?;
    Ok(())
}

pub fn load_dataset(path: &Path) -> Result<FunctionalDataset> {
    let text = std::fs::read_to_string(path)?;
    #[derive(Deserialize)]
    struct VersionProbe {
        format_version: u32,
    }
    let probe: VersionProbe = serde_json::from_str(&text)?;
    if probe.format_version != DATASET_FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            expected: DATASET_FORMAT_VERSION,
            got: probe.format_version,
        });
    }
    let file: DatasetFile = serde_json::from_str(&text)?;
    if file.dataset.is_empty() {
        return Err(Error::TooFewSamples { min: 1, got: 0 });
    }
    Ok(file.dataset)
}

/// One exported metric value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub dataset: String,
    pub method: String,
    pub metric: String,
    pub value: f64,
    pub seed: u64,
}

/// Write scores as CSV with stable column order `id,score,label`.
pub fn export_scores(report: &ScoreReport, path: &Path) -> Result<()> {
    let mut out = std::fs::File::create(path)?;
    writeln!(out, "id,score,label")?;
    for (k, &id) in report.ids().iter().enumerate() {
        let label = report
            .labels()
            .map(|l| l[k].as_u8().to_string())
            .unwrap_or_default();
        writeln!(out, "{},{},{}", id, report.scores()[k], label)?;
    }
    Ok(())
}

/// Write metric records as CSV, one row per (dataset, method, metric).
pub fn export_metrics(records: &[MetricRecord], path: &Path) -> Result<()> {
    let mut out = std::fs::File::create(path)?;
    writeln!(out, "dataset,method,metric,value,seed")?;
    for r in records {
        writeln!(out, "{},{},{},{},{}", r.dataset, r.method, r.metric, r.value, r.seed)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate, Scenario, SynthSpec};

    #[test]
    fn parses_tab_and_comma_delimited_rows() {
        let map = LabelMap::new([1], [2]).unwrap();
        let tab = "1\t0.5\t0.75\n2\t1.5\t2.5\n";
        let comma = "1,0.5,0.75\n2,1.5,2.5\n";
        for text in [tab, comma] {
            let report = parse_series(text, &map, "test").unwrap();
            assert_eq!(report.dataset.len(), 2);
            assert_eq!(report.dataset.points(), 2);
            assert_eq!(report.dropped_rows, 0);
            assert_eq!(
                report.dataset.labels().unwrap(),
                &[Label::Normal, Label::Anomaly]
            );
        }
    }

    #[test]
    fn unmapped_labels_are_dropped_and_counted() {
        // ECG5000 map {1} + {3,4,5}: a label-7 (or label-2) row is dropped
        let map = preset_for("ECG5000").unwrap().label_map;
        let text = "1,0.0,1.0\n7,9.0,9.0\n3,2.0,3.0\n2,4.0,4.0\n";
        let report = parse_series(text, &map, "test").unwrap();
        assert_eq!(report.dataset.len(), 2);
        assert_eq!(report.dropped_rows, 2);
    }

    #[test]
    fn single_row_file_loads() {
        let map = LabelMap::new([1], [2]).unwrap();
        let report = parse_series("1,0.1,0.2,0.3\n", &map, "test").unwrap();
        assert_eq!(report.dataset.len(), 1);
        assert_eq!(report.dataset.points(), 3);
    }

    #[test]
    fn ragged_rows_rejected() {
        let map = LabelMap::new([1], [2]).unwrap();
        assert!(matches!(
            parse_series("1,0.1,0.2\n2,0.3\n", &map, "test"),
            Err(Error::RaggedRow { .. })
        ));
    }

    #[test]
    fn unparseable_numerics_rejected() {
        let map = LabelMap::new([1], [2]).unwrap();
        assert!(matches!(
            parse_series("1,0.1,zebra\n", &map, "test"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn empty_file_rejected() {
        let map = LabelMap::new([1], [2]).unwrap();
        assert!(matches!(
            parse_series("", &map, "test"),
            Err(Error::EmptyFile(_))
        ));
    }

    #[test]
    fn label_map_validation() {
        assert!(LabelMap::new([1], [1]).is_err());
        assert!(LabelMap::new([], [1]).is_err());
        assert!(LabelMap::new([1, 2], [3]).is_ok());
    }

    #[test]
    fn presets_cover_the_benchmark_table() {
        let names = [
            ("Chinatown", 24),
            ("Coffee", 286),
            ("ECGFiveDays", 136),
            ("ECG200", 96),
            ("Handoutlines", 2709),
            ("SonyRobotAI1", 70),
            ("SonyRobotAI2", 65),
            ("StarLightCurves", 1024),
            ("TwoLeadECG", 82),
            ("ECG5000", 140),
        ];
        for (name, p) in names {
            let preset = preset_for(name).unwrap();
            assert_eq!(preset.expected_points, p, "{name}");
        }
        // archive stems resolve too
        assert!(preset_for("SonyAIBORobotSurface1").is_some());
        assert_eq!(preset_for("Chinatown").unwrap().label_map.classify(2), Some(Label::Normal));
        assert_eq!(preset_for("Chinatown").unwrap().label_map.classify(1), Some(Label::Anomaly));
    }

    #[test]
    fn dataset_round_trip_is_exact() {
        let spec = SynthSpec::new(Scenario::brownian_drift()).with_seed(31);
        let ds = generate(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.json");
        save_dataset(&ds, &path).unwrap();
        let loaded = load_dataset(&path).unwrap();
        assert_eq!(ds, loaded);
    }

    #[test]
    fn dataset_version_mismatch_is_explicit() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.json");
        std::fs::write(&path, "{\"format_version\":9,\"float_encoding\":\"x\",\"dataset\":null}")
            .unwrap();
        assert!(matches!(
            load_dataset(&path),
            Err(Error::VersionMismatch { expected: 1, got: 9 })
        ));
    }

    #[test]
    fn score_export_layout() {
        let report = ScoreReport::new(
            vec![0.25, 0.75],
            Some(vec![Label::Normal, Label::Anomaly]),
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        export_scores(&report, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3); // header + n rows
        assert_eq!(lines[0], "id,score,label");
        assert_eq!(lines[1], "0,0.25,0");
        assert_eq!(lines[2], "1,0.75,1");
        // deterministic bytes
        let again = dir.path().join("scores2.csv");
        export_scores(&report, &again).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }

    #[test]
    fn metric_export_layout() {
        let records = vec![MetricRecord {
            dataset: "toy".into(),
            method: "sif".into(),
            metric: "auroc".into(),
            value: 0.9,
            seed: 7,
        }];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metrics.csv");
        export_metrics(&records, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "dataset,method,metric,value,seed\ntoy,sif,auroc,0.9,7\n");
    }
}
