//! Isolation forests over functional data with pluggable split criteria:
//! coordinate signatures (SIF), the truncated signature kernel (K-SIF), the
//! FIF inner product, and plain grid-point values (classic IF baseline).

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictionary::{self, DictionaryConfig, DictionaryKind};
use crate::error::{Error, Result};
use crate::maybe_par_iter;
use crate::metrics::ScoreReport;
use crate::path::{FunctionalDataset, FunctionalPath, PathRef, Window};
use crate::rng::stream;
use crate::sigcore::{coordinate_signature, truncated_signature, SignatureVector, Word};

/// Split criterion selecting the per-node projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitCriterion {
    Sif,
    Ksif,
    Fif,
    If,
}

/// Forest fit configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    /// Number of trees N.
    pub n_trees: usize,
    /// Subsample size m; each tree uses min(m, n) samples.
    pub subsample: usize,
    /// Height limit P; defaults to ceil(log2(min(m, n))).
    pub height_limit: Option<usize>,
    /// Signature truncation depth k.
    pub depth: usize,
    /// Number of split windows omega; windows span floor(p / omega) grid
    /// points, clamped below at 2.
    pub windows: usize,
    pub criterion: SplitCriterion,
    /// Dictionary for K-SIF / FIF nodes.
    pub dictionary: DictionaryConfig,
    /// FIF mix between value and derivative inner products.
    pub alpha: f64,
    pub seed: u64,
    /// Prepend the time grid as an extra coordinate before signature
    /// computations (SIF / K-SIF only).
    pub time_augment: bool,
}

impl ForestConfig {
    pub fn new(criterion: SplitCriterion) -> Self {
        ForestConfig {
            n_trees: 100,
            subsample: 256,
            height_limit: None,
            depth: 3,
            windows: 10,
            criterion,
            dictionary: DictionaryConfig::default(),
            alpha: 1.0,
            seed: 0,
            time_augment: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::NoTrees);
        }
        if self.subsample < 2 {
            return Err(Error::SubsampleTooSmall(self.subsample));
        }
        if self.depth == 0 {
            return Err(Error::ZeroDepth);
        }
        if self.windows == 0 {
            return Err(Error::ZeroWindows);
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::AlphaOutOfRange(self.alpha));
        }
        Ok(())
    }
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig::new(SplitCriterion::Sif)
    }
}

/// Average path length of unsuccessful searches in a binary search tree of
/// `m` items; the standard isolation-forest normalizer c(m). Edge values
/// c(2) = 1 and c(m <= 1) = 0 are fixed for continuity.
pub fn avg_unsuccessful_bst_path(m: usize) -> f64 {
    const EULER_MASCHERONI: f64 = 0.5772156649;
    match m {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => {
            let m = m as f64;
            2.0 * ((m - 1.0).ln() + EULER_MASCHERONI) - 2.0 * (m - 1.0) / m
        }
    }
}

/// One drawn split: the projection payload plus the threshold gamma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SplitRule {
    /// SIF: one coordinate-signature word on a window.
    Coordinate { word: Word, window: Window, threshold: f64 },
    /// K-SIF: signature kernel against a drawn dictionary function. The
    /// payload keeps the windowed dictionary path together with its
    /// signature so routing never recomputes the draw.
    Kernel {
        window: Window,
        dict: FunctionalPath,
        dict_sig: SignatureVector,
        threshold: f64,
    },
    /// FIF: normalized value/derivative inner products on the full grid.
    InnerProduct { dict: FunctionalPath, threshold: f64 },
    /// Classic IF baseline on the raw discretization.
    GridPoint { grid_index: usize, coord: usize, threshold: f64 },
}

impl SplitRule {
    pub fn threshold(&self) -> f64 {
        match self {
            SplitRule::Coordinate { threshold, .. }
            | SplitRule::Kernel { threshold, .. }
            | SplitRule::InnerProduct { threshold, .. }
            | SplitRule::GridPoint { threshold, .. } => *threshold,
        }
    }
}

/// Node of a fitted tree. Internal nodes carry the drawn rule; leaves keep
/// the sample count and depth at termination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Internal {
        rule: SplitRule,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        size: usize,
        depth: usize,
    },
}

impl TreeNode {
    /// Sum of leaf sizes (the subsample size of the tree).
    pub fn leaf_size_sum(&self) -> usize {
        match self {
            TreeNode::Leaf { size, .. } => *size,
            TreeNode::Internal { left, right, .. } => left.leaf_size_sum() + right.leaf_size_sum(),
        }
    }

    pub fn max_depth(&self) -> usize {
        match self {
            TreeNode::Leaf { depth, .. } => *depth,
            TreeNode::Internal { left, right, .. } => left.max_depth().max(right.max_depth()),
        }
    }
}

/// Evaluate a stored rule on one curve.
pub fn project(x: PathRef<'_>, rule: &SplitRule, depth: usize, alpha: f64) -> Result<f64> {
    match rule {
        SplitRule::Coordinate { word, window, .. } => {
            coordinate_signature(x.restrict(*window)?, word)
        }
        SplitRule::Kernel { window, dict_sig, .. } => {
            truncated_signature(x.restrict(*window)?, depth)?.dot(dict_sig)
        }
        SplitRule::InnerProduct { dict, .. } => Ok(fif_projection(x, dict.view(), alpha)),
        SplitRule::GridPoint { grid_index, coord, .. } => {
            if *grid_index >= x.points() || *coord >= x.dim {
                return Err(Error::WindowOutOfBounds {
                    start: *grid_index,
                    len: 1,
                    points: x.points(),
                });
            }
            Ok(x.value(*grid_index, *coord))
        }
    }
}

/// FIF projection: `alpha * <x, d> / (|x| |d|) + (1 - alpha) * <x', d'> /
/// (|x'| |d'|)` with left Riemann sums over the full grid and forward
/// finite-difference derivatives. Multivariate curves sum the marginal
/// inner products. A zero-norm factor makes its term 0 so constant curves
/// stay scoreable.
pub fn fif_projection(x: PathRef<'_>, d: PathRef<'_>, alpha: f64) -> f64 {
    let value_term = if alpha > 0.0 {
        normalized_inner(x, d, false)
    } else {
        0.0
    };
    let deriv_term = if alpha < 1.0 {
        normalized_inner(x, d, true)
    } else {
        0.0
    };
    alpha * value_term + (1.0 - alpha) * deriv_term
}

fn normalized_inner(x: PathRef<'_>, d: PathRef<'_>, derivative: bool) -> f64 {
    let xd = riemann_inner(x, d, derivative);
    let xx = riemann_inner(x, x, derivative);
    let dd = riemann_inner(d, d, derivative);
    let denom = (xx * dd).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        xd / denom
    }
}

fn riemann_inner(a: PathRef<'_>, b: PathRef<'_>, derivative: bool) -> f64 {
    let p = a.points();
    let mut total = 0.0;
    for i in 0..p - 1 {
        let dt = a.times[i + 1] - a.times[i];
        for c in 0..a.dim {
            let (av, bv) = if derivative {
                (
                    (a.value(i + 1, c) - a.value(i, c)) / dt,
                    (b.value(i + 1, c) - b.value(i, c)) / dt,
                )
            } else {
                (a.value(i, c), b.value(i, c))
            };
            total += av * bv * dt;
        }
    }
    total
}

/// Path length of `x` through a fitted tree: re-evaluate each stored rule,
/// then add the standard `c(size)` adjustment for the unbuilt subtree at
/// the reached leaf.
pub fn path_length(tree: &TreeNode, x: PathRef<'_>, depth: usize, alpha: f64) -> Result<f64> {
    let mut node = tree;
    loop {
        match node {
            TreeNode::Leaf { size, depth: leaf_depth } => {
                return Ok(*leaf_depth as f64 + avg_unsuccessful_bst_path(*size));
            }
            TreeNode::Internal { rule, left, right } => {
                let value = project(x, rule, depth, alpha)?;
                node = if value <= rule.threshold() { left } else { right };
            }
        }
    }
}

/// A fitted forest: N trees, the fit configuration and the subsample
/// normalizer c(m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    trees: Vec<TreeNode>,
    config: ForestConfig,
    subsample_used: usize,
    c_m: f64,
    input_dim: usize,
    grid_points: usize,
}

const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    forest: Forest,
}

impl Forest {
    /// Fit a forest on the dataset. Each tree grows from an independent
    /// uniform subsample; the per-tree generator is derived from
    /// `(seed, tree_index)` so results are bit-identical regardless of the
    /// parallel schedule.
    pub fn fit(dataset: &FunctionalDataset, config: &ForestConfig) -> Result<Forest> {
        config.validate()?;
        if dataset.len() < 2 {
            return Err(Error::TooFewSamples { min: 2, got: dataset.len() });
        }
        let augmented;
        let working = if config.time_augment && uses_signatures(config.criterion) {
            augmented = dataset.time_augment();
            &augmented
        } else {
            dataset
        };

        let m_eff = config.subsample.min(working.len());
        let height = config
            .height_limit
            .unwrap_or_else(|| (m_eff as f64).log2().ceil() as usize)
            .max(1);

        // Finite dictionary pool shared by all trees (FIF emulation).
        let pool: Option<Vec<FunctionalPath>> = match config.criterion {
            SplitCriterion::Ksif | SplitCriterion::Fif
                if config.dictionary.pool_size > 0
                    && config.dictionary.kind != DictionaryKind::SelfDictionary =>
            {
                Some(
                    (0..config.dictionary.pool_size)
                        .map(|j| {
                            let mut rng = stream(config.seed, "dict-pool", j as u64);
                            draw_dictionary(config, working, &mut rng)
                        })
                        .collect(),
                )
            }
            _ => None,
        };

        let builder = TreeBuilder {
            data: working,
            config,
            height,
            pool: pool.as_deref(),
        };
        let trees: Vec<TreeNode> = maybe_par_iter!(0..config.n_trees)
            .map(|t| builder.build_tree(stream(config.seed, "tree", t as u64), m_eff))
            .collect();

        Ok(Forest {
            trees,
            config: config.clone(),
            subsample_used: m_eff,
            c_m: avg_unsuccessful_bst_path(m_eff),
            input_dim: dataset.dim(),
            grid_points: dataset.points(),
        })
    }

    /// Assemble a forest from prebuilt trees (test fixtures).
    pub fn from_parts(
        trees: Vec<TreeNode>,
        config: ForestConfig,
        subsample_used: usize,
        input_dim: usize,
        grid_points: usize,
    ) -> Forest {
        Forest {
            trees,
            config,
            subsample_used,
            c_m: avg_unsuccessful_bst_path(subsample_used),
            input_dim,
            grid_points,
        }
    }

    pub fn trees(&self) -> &[TreeNode] {
        &self.trees
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn subsample_used(&self) -> usize {
        self.subsample_used
    }

    pub fn c_m(&self) -> f64 {
        self.c_m
    }

    fn check_input(&self, dim: usize, points: usize) -> Result<()> {
        if dim != self.input_dim {
            return Err(Error::DimMismatch { left: dim, right: self.input_dim });
        }
        if points != self.grid_points {
            return Err(Error::UnexpectedGridSize { expected: self.grid_points, got: points });
        }
        Ok(())
    }

    fn working_depth_alpha(&self) -> (usize, f64) {
        (self.config.depth, self.config.alpha)
    }

    /// Average path length of `x` over all trees.
    pub fn average_path_length(&self, x: &FunctionalPath) -> Result<f64> {
        self.check_input(x.dim(), x.points())?;
        let working = if self.config.time_augment && uses_signatures(self.config.criterion) {
            x.time_augment()
        } else {
            x.clone()
        };
        self.average_path_length_prepared(working.view())
    }

    fn average_path_length_prepared(&self, x: PathRef<'_>) -> Result<f64> {
        let (depth, alpha) = self.working_depth_alpha();
        let mut total = 0.0;
        for tree in &self.trees {
            total += path_length(tree, x, depth, alpha)?;
        }
        Ok(total / self.trees.len() as f64)
    }

    /// Anomaly score `s(x) = 2^(-avg_path / c(m))`, in (0, 1]; higher means
    /// more anomalous.
    pub fn score(&self, x: &FunctionalPath) -> Result<f64> {
        Ok(score_from_path_length(self.average_path_length(x)?, self.c_m))
    }

    /// Scores for every sample of a dataset, in dataset order; labels are
    /// carried over when present.
    pub fn score_all(&self, dataset: &FunctionalDataset) -> Result<ScoreReport> {
        self.check_input(dataset.dim(), dataset.points())?;
        let augmented;
        let working = if self.config.time_augment && uses_signatures(self.config.criterion) {
            augmented = dataset.time_augment();
            &augmented
        } else {
            dataset
        };
        let scores: Vec<f64> = maybe_par_iter!(0..working.len())
            .map(|i| {
                self.average_path_length_prepared(working.sample(i))
                    .map(|h| score_from_path_length(h, self.c_m))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScoreReport::new(
            scores,
            dataset.labels().map(|l| l.to_vec()),
        ))
    }

    /// Serialize to a self-describing versioned JSON model file.
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let file = ModelFile { format_version: MODEL_FORMAT_VERSION, forest: self.clone() };
        let mut out = serde_json::to_string(&file)?;
        out.push('\n');
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Forest> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Forest> {
        // Version gate first so future formats fail with a clear error.
        #[derive(Deserialize)]
        struct VersionProbe {
            format_version: u32,
        }
        let probe: VersionProbe = serde_json::from_str(text)?;
        if probe.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                expected: MODEL_FORMAT_VERSION,
                got: probe.format_version,
            });
        }
        let file: ModelFile = serde_json::from_str(text)?;
        Ok(file.forest)
    }
}

pub fn score_from_path_length(avg_path: f64, c_m: f64) -> f64 {
    2f64.powf(-avg_path / c_m)
}

fn uses_signatures(criterion: SplitCriterion) -> bool {
    matches!(criterion, SplitCriterion::Sif | SplitCriterion::Ksif)
}

fn draw_dictionary(
    config: &ForestConfig,
    working: &FunctionalDataset,
    rng: &mut ChaCha8Rng,
) -> FunctionalPath {
    if config.time_augment && uses_signatures(config.criterion) {
        // working dim includes the time coordinate; draw the data
        // coordinates and augment the same way the samples were.
        dictionary::draw(&config.dictionary, working.grid(), working.dim() - 1, rng).time_augment()
    } else {
        dictionary::draw(&config.dictionary, working.grid(), working.dim(), rng)
    }
}

struct TreeBuilder<'a> {
    data: &'a FunctionalDataset,
    config: &'a ForestConfig,
    height: usize,
    pool: Option<&'a [FunctionalPath]>,
}

impl<'a> TreeBuilder<'a> {
    fn build_tree(&self, mut rng: ChaCha8Rng, m_eff: usize) -> TreeNode {
        let subsample: Vec<usize> =
            sample_indices(&mut rng, self.data.len(), m_eff).into_vec();
        self.build_node(&subsample, 0, &mut rng, &subsample)
    }

    fn window_len(&self) -> usize {
        let p = self.data.points();
        (p / self.config.windows).clamp(2, p)
    }

    fn draw_window(&self, rng: &mut ChaCha8Rng) -> Window {
        let len = self.window_len();
        let start = rng.random_range(0..=self.data.points() - len);
        Window::new(start, len)
    }

    fn draw_word(&self, rng: &mut ChaCha8Rng) -> Word {
        // uniform over the union of all words of length 1..=k; shorter words
        // are therefore more probable per word when d > 1, matching the
        // drawn set literally.
        let d = self.data.dim();
        let total: usize = (1..=self.config.depth).map(|l| d.pow(l as u32)).sum();
        let mut r = rng.random_range(0..total);
        let mut level = 1;
        let mut level_size = d;
        while r >= level_size {
            r -= level_size;
            level += 1;
            level_size *= d;
        }
        let mut indices = vec![0usize; level];
        for slot in indices.iter_mut().rev() {
            *slot = r % d + 1;
            r /= d;
        }
        Word::new(indices).expect("drawn word is non-empty and in range")
    }

    fn draw_rule_payload(
        &self,
        subsample: &[usize],
        rng: &mut ChaCha8Rng,
    ) -> (Option<Window>, RulePayload) {
        match self.config.criterion {
            SplitCriterion::Sif => {
                let window = self.draw_window(rng);
                (Some(window), RulePayload::Word(self.draw_word(rng)))
            }
            SplitCriterion::Ksif => {
                let window = self.draw_window(rng);
                (Some(window), RulePayload::Dict(self.draw_dict(subsample, rng)))
            }
            SplitCriterion::Fif => (None, RulePayload::Dict(self.draw_dict(subsample, rng))),
            SplitCriterion::If => {
                let grid_index = rng.random_range(0..self.data.points());
                let coord = rng.random_range(0..self.data.dim());
                (None, RulePayload::Point { grid_index, coord })
            }
        }
    }

    fn draw_dict(&self, subsample: &[usize], rng: &mut ChaCha8Rng) -> FunctionalPath {
        if self.config.dictionary.kind == DictionaryKind::SelfDictionary {
            let pick = subsample[rng.random_range(0..subsample.len())];
            return self.data.to_path(pick);
        }
        if let Some(pool) = self.pool {
            return pool[rng.random_range(0..pool.len())].clone();
        }
        draw_dictionary(self.config, self.data, rng)
    }

    fn build_node(
        &self,
        samples: &[usize],
        depth: usize,
        rng: &mut ChaCha8Rng,
        subsample: &[usize],
    ) -> TreeNode {
        if samples.len() <= 1 || depth >= self.height {
            return TreeNode::Leaf { size: samples.len(), depth };
        }

        let (window, payload) = self.draw_rule_payload(subsample, rng);
        let (rule_proto, projections) = self.project_node(samples, window, payload);

        let min = projections.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = projections.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if min == max {
            // degenerate node: re-drawing could loop forever on duplicates
            return TreeNode::Leaf { size: samples.len(), depth };
        }
        let threshold = rng.random_range(min..=max);

        let mut left = Vec::new();
        let mut right = Vec::new();
        for (&idx, &value) in samples.iter().zip(projections.iter()) {
            if value <= threshold {
                left.push(idx);
            } else {
                right.push(idx);
            }
        }

        TreeNode::Internal {
            rule: rule_proto.with_threshold(threshold),
            left: Box::new(self.build_node(&left, depth + 1, rng, subsample)),
            right: Box::new(self.build_node(&right, depth + 1, rng, subsample)),
        }
    }

    fn project_node(
        &self,
        samples: &[usize],
        window: Option<Window>,
        payload: RulePayload,
    ) -> (RuleProto, Vec<f64>) {
        match (self.config.criterion, payload) {
            (SplitCriterion::Sif, RulePayload::Word(word)) => {
                let window = window.expect("SIF draws a window");
                let projections = samples
                    .iter()
                    .map(|&i| {
                        coordinate_signature(
                            self.data.sample(i).restrict(window).expect("window fits"),
                            &word,
                        )
                        .expect("word fits data dim")
                    })
                    .collect();
                (RuleProto::Coordinate { word, window }, projections)
            }
            (SplitCriterion::Ksif, RulePayload::Dict(dict)) => {
                let window = window.expect("K-SIF draws a window");
                let dict_w = dict.restrict(window).expect("window fits");
                // dictionary signature computed once per node, reused
                // across samples
                let dict_sig = truncated_signature(dict_w.view(), self.config.depth)
                    .expect("valid dictionary path");
                let projections = samples
                    .iter()
                    .map(|&i| {
                        truncated_signature(
                            self.data.sample(i).restrict(window).expect("window fits"),
                            self.config.depth,
                        )
                        .expect("valid sample path")
                        .dot(&dict_sig)
                        .expect("same dim and depth")
                    })
                    .collect();
                (RuleProto::Kernel { window, dict: dict_w, dict_sig }, projections)
            }
            (SplitCriterion::Fif, RulePayload::Dict(dict)) => {
                let projections = samples
                    .iter()
                    .map(|&i| fif_projection(self.data.sample(i), dict.view(), self.config.alpha))
                    .collect();
                (RuleProto::InnerProduct { dict }, projections)
            }
            (SplitCriterion::If, RulePayload::Point { grid_index, coord }) => {
                let projections = samples
                    .iter()
                    .map(|&i| self.data.sample(i).value(grid_index, coord))
                    .collect();
                (RuleProto::GridPoint { grid_index, coord }, projections)
            }
            _ => unreachable!("payload always matches the criterion"),
        }
    }
}

enum RulePayload {
    Word(Word),
    Dict(FunctionalPath),
    Point { grid_index: usize, coord: usize },
}

enum RuleProto {
    Coordinate { word: Word, window: Window },
    Kernel { window: Window, dict: FunctionalPath, dict_sig: SignatureVector },
    InnerProduct { dict: FunctionalPath },
    GridPoint { grid_index: usize, coord: usize },
}

impl RuleProto {
    fn with_threshold(self, threshold: f64) -> SplitRule {
        match self {
            RuleProto::Coordinate { word, window } => {
                SplitRule::Coordinate { word, window, threshold }
            }
            RuleProto::Kernel { window, dict, dict_sig } => {
                SplitRule::Kernel { window, dict, dict_sig, threshold }
            }
            RuleProto::InnerProduct { dict } => SplitRule::InnerProduct { dict, threshold },
            RuleProto::GridPoint { grid_index, coord } => {
                SplitRule::GridPoint { grid_index, coord, threshold }
            }
        }
    }
}
