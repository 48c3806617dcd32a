//! Evaluation metrics: AUROC, AUPR, FPR at 95% TPR, Kendall tau-b.
//!
//! Tie handling is stated explicitly: AUROC gives half credit to tied
//! pairs (Mann-Whitney form) and Kendall tau is the tie-corrected tau-b.
//! AUPR uses step interpolation over score-sorted thresholds to avoid
//! optimistic bias.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::Label;

/// Per-sample anomaly scores with optional labels; the input to every
/// metric and to score export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    scores: Vec<f64>,
    labels: Option<Vec<Label>>,
    ids: Vec<usize>,
}

impl ScoreReport {
    pub fn new(scores: Vec<f64>, labels: Option<Vec<Label>>) -> ScoreReport {
        let ids = (0..scores.len()).collect();
        ScoreReport { scores, labels, ids }
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    fn checked_labels(&self) -> Result<&[Label]> {
        if self.scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFiniteScores);
        }
        let labels = self.labels.as_deref().ok_or(Error::MissingLabels)?;
        if labels.len() != self.scores.len() {
            return Err(Error::ScoreLengthMismatch {
                left: self.scores.len(),
                right: labels.len(),
            });
        }
        let anomalies = labels.iter().filter(|l| l.is_anomaly()).count();
        if anomalies == 0 || anomalies == labels.len() {
            return Err(Error::SingleClassLabels);
        }
        Ok(labels)
    }
}

/// AUROC: the probability that a random anomaly outscores a random normal
/// sample, ties counted one half. Computed from midranks; all intermediate
/// quantities are half-integers, so the result is exact.
pub fn auroc(report: &ScoreReport) -> Result<f64> {
    let labels = report.checked_labels()?;
    let n = report.scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| report.scores[a].partial_cmp(&report.scores[b]).unwrap());

    // midranks over tie groups
    let mut rank = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && report.scores[order[j + 1]] == report.scores[order[i]] {
            j += 1;
        }
        let mid = (i + 1 + j + 1) as f64 / 2.0;
        for k in i..=j {
            rank[order[k]] = mid;
        }
        i = j + 1;
    }

    let pos = labels.iter().filter(|l| l.is_anomaly()).count() as f64;
    let neg = n as f64 - pos;
    let rank_sum: f64 = (0..n)
        .filter(|&i| labels[i].is_anomaly())
        .map(|i| rank[i])
        .sum();
    Ok((rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg))
}

/// Threshold sweep shared by AUPR and FPR@95TPR: for each distinct score,
/// descending, the confusion counts of the rule `score >= threshold`.
fn threshold_counts(scores: &[f64], labels: &[Label]) -> Vec<(usize, usize)> {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
    let mut out = Vec::new();
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        for k in i..=j {
            if labels[order[k]].is_anomaly() {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        out.push((tp, fp));
        i = j + 1;
    }
    out
}

/// Area under the precision-recall curve via step interpolation, anomalies
/// positive.
pub fn aupr(report: &ScoreReport) -> Result<f64> {
    let labels = report.checked_labels()?;
    let pos = labels.iter().filter(|l| l.is_anomaly()).count() as f64;
    let mut area = 0.0;
    let mut prev_recall = 0.0;
    for (tp, fp) in threshold_counts(&report.scores, labels) {
        let recall = tp as f64 / pos;
        let precision = tp as f64 / (tp + fp) as f64;
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    Ok(area)
}

/// Smallest false-positive rate among thresholds achieving TPR >= 0.95.
pub fn fpr_at_95tpr(report: &ScoreReport) -> Result<f64> {
    let labels = report.checked_labels()?;
    let pos = labels.iter().filter(|l| l.is_anomaly()).count() as f64;
    let neg = labels.len() as f64 - pos;
    let mut best: Option<f64> = None;
    for (tp, fp) in threshold_counts(&report.scores, labels) {
        if tp as f64 / pos >= 0.95 {
            let fpr = fp as f64 / neg;
            best = Some(match best {
                Some(b) if b <= fpr => b,
                _ => fpr,
            });
        }
    }
    // the all-positive threshold always reaches TPR = 1
    Ok(best.expect("TPR reaches 1 at the lowest threshold"))
}

/// Kendall tau-b (tie-corrected) between two paired score vectors.
pub fn kendall_tau(scores_a: &[f64], scores_b: &[f64]) -> Result<f64> {
    if scores_a.len() != scores_b.len() {
        return Err(Error::ScoreLengthMismatch {
            left: scores_a.len(),
            right: scores_b.len(),
        });
    }
    let n = scores_a.len();
    if n < 2 {
        return Err(Error::TooFewSamples { min: 2, got: n });
    }
    if scores_a.iter().chain(scores_b.iter()).any(|s| !s.is_finite()) {
        return Err(Error::NonFiniteScores);
    }
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    let mut ties_a = 0i64;
    let mut ties_b = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            let da = scores_a[i] - scores_a[j];
            let db = scores_b[i] - scores_b[j];
            if da == 0.0 && db == 0.0 {
                ties_a += 1;
                ties_b += 1;
            } else if da == 0.0 {
                ties_a += 1;
            } else if db == 0.0 {
                ties_b += 1;
            } else if (da > 0.0) == (db > 0.0) {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as f64;
    let denom = ((n0 - ties_a as f64) * (n0 - ties_b as f64)).sqrt();
    if denom == 0.0 {
        return Err(Error::SingleClassLabels);
    }
    Ok((concordant - discordant) as f64 / denom)
}
