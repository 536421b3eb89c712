//! Quantum-inspired forest regressor.
//!
//! Each node examines every candidate split at once (every feature, every
//! midpoint between consecutive distinct values), which is the classical
//! counterpart of evaluating all split points in superposition. Impurity is
//! the population variance of the node targets; leaves predict the mean.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance under which two impurity decreases count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub num_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            num_trees: 25,
            max_depth: 4,
            min_leaf: 2,
            bootstrap: true,
            seed: 42,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_trees == 0 {
            return Err(Error::Config("num_trees must be at least 1".into()));
        }
        if self.min_leaf == 0 {
            return Err(Error::Config("min_leaf must be at least 1".into()));
        }
        Ok(())
    }
}

/// A chosen split: rows with `x[feature] <= threshold` go left.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub decrease: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        prediction: f64,
        count: usize,
    },
}

impl TreeNode {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { prediction, .. } => return *prediction,
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaves(&self) -> Vec<(f64, usize)> {
        match self {
            TreeNode::Leaf { prediction, count } => vec![(*prediction, *count)],
            TreeNode::Internal { left, right, .. } => {
                let mut v = left.leaves();
                v.extend(right.leaves());
                v
            }
        }
    }
}

fn mean(targets: &[f64], rows: &[usize]) -> f64 {
    rows.iter().map(|&r| targets[r]).sum::<f64>() / rows.len() as f64
}

fn variance(targets: &[f64], rows: &[usize]) -> f64 {
    let m = mean(targets, rows);
    rows.iter().map(|&r| (targets[r] - m).powi(2)).sum::<f64>() / rows.len() as f64
}

/// Exhaustive search for the variance-reducing split of `rows`.
///
/// Candidates are scanned feature by feature in ascending threshold order and
/// a candidate replaces the incumbent only when it beats it by more than the
/// tie tolerance, so ties resolve to the lower feature, then lower threshold.
pub fn best_split(features: &[Vec<f64>], targets: &[f64], rows: &[usize], min_leaf: usize) -> Option<Split> {
    let n = rows.len();
    let min_leaf = min_leaf.max(1);
    if n < 2 * min_leaf {
        return None;
    }
    let parent = variance(targets, rows);
    let tol = TIE_TOLERANCE * parent.max(1.0);
    if parent <= tol {
        return None;
    }
    let num_features = features[rows[0]].len();
    let total: f64 = rows.iter().map(|&r| targets[r]).sum();
    let total_sq: f64 = rows.iter().map(|&r| targets[r] * targets[r]).sum();

    let mut best: Option<Split> = None;
    let mut order = rows.to_vec();
    for feature in 0..num_features {
        order.sort_by(|&a, &b| features[a][feature].total_cmp(&features[b][feature]));
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for i in 0..n - 1 {
            let y = targets[order[i]];
            sum += y;
            sum_sq += y * y;
            let lo = features[order[i]][feature];
            let hi = features[order[i + 1]][feature];
            let left_n = i + 1;
            let right_n = n - left_n;
            if lo == hi || left_n < min_leaf || right_n < min_leaf {
                continue;
            }
            let (ln, rn) = (left_n as f64, right_n as f64);
            let left_var = (sum_sq / ln - (sum / ln).powi(2)).max(0.0);
            let (rs, rsq) = (total - sum, total_sq - sum_sq);
            let right_var = (rsq / rn - (rs / rn).powi(2)).max(0.0);
            let decrease = parent - (ln * left_var + rn * right_var) / n as f64;
            let incumbent = best.map_or(tol, |b| b.decrease + tol);
            if decrease > incumbent {
                best = Some(Split {
                    feature,
                    threshold: (lo + hi) / 2.0,
                    decrease,
                });
            }
        }
    }
    best
}

/// Recursively grows a regression tree over `rows`.
pub fn build_tree(features: &[Vec<f64>], targets: &[f64], rows: &[usize], config: &ForestConfig, depth: usize) -> TreeNode {
    let leaf = || TreeNode::Leaf {
        prediction: mean(targets, rows),
        count: rows.len(),
    };
    if depth >= config.max_depth || rows.len() < 2 * config.min_leaf {
        return leaf();
    }
    let Some(split) = best_split(features, targets, rows, config.min_leaf) else {
        return leaf();
    };
    let (left, right): (Vec<usize>, Vec<usize>) = rows
        .iter()
        .partition(|&&r| features[r][split.feature] <= split.threshold);
    TreeNode::Internal {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(build_tree(features, targets, &left, config, depth + 1)),
        right: Box::new(build_tree(features, targets, &right, config, depth + 1)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub config: ForestConfig,
    pub num_features: usize,
    pub trees: Vec<TreeNode>,
}

impl Forest {
    /// Trains `num_trees` trees. With bootstrap on, tree `t` draws N rows with
    /// replacement from a ChaCha8 stream keyed by (seed, t), so the result does
    /// not depend on the order trees are built in.
    pub fn fit(features: &[Vec<f64>], targets: &[f64], config: &ForestConfig) -> Result<Self> {
        config.validate()?;
        if features.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if features.len() != targets.len() {
            return Err(Error::LengthMismatch(targets.len(), features.len()));
        }
        let num_features = features[0].len();
        if let Some(bad) = features.iter().find(|r| r.len() != num_features) {
            return Err(Error::Shape {
                expected: num_features,
                actual: bad.len(),
            });
        }
        let n = features.len();
        let trees = (0..config.num_trees)
            .into_par_iter()
            .map(|t| {
                let rows: Vec<usize> = if config.bootstrap {
                    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                    rng.set_stream(t as u64);
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                build_tree(features, targets, &rows, config, 0)
            })
            .collect();
        Ok(Self {
            config: *config,
            num_features,
            trees,
        })
    }

    /// Mean of the tree predictions.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.num_features {
            return Err(Error::Shape {
                expected: self.num_features,
                actual: x.len(),
            });
        }
        Ok(self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64)
    }

    pub fn predict_all(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let forest: Self = serde_json::from_str(text)?;
        forest.config.validate()?;
        if forest.trees.is_empty() {
            return Err(Error::Config("forest has no trees".into()));
        }
        Ok(forest)
    }
}
