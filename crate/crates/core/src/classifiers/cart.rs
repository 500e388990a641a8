//! CART classification tree grown by greedy Gini-impurity
//! minimization.
//!
//! Split candidates are the midpoints between consecutive distinct
//! sorted values of each candidate feature. Growth stops at
//! `max_depth`, when a node is pure, when a child would fall below
//! `min_leaf_samples`, or when the best impurity decrease is below
//! `min_impurity_decrease`. All tie-breaks are fixed: equal split
//! scores go to the lowest feature index, then the lowest threshold.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{CartParams, LabelSet};

use super::{check_arity, FeatureMatrix, FitError, PredictError, TaskData};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Split { feature: usize, threshold: f64, left: usize, right: usize },
    Leaf { counts: Vec<u32> },
}

/// A fitted CART tree: internal nodes route on (feature, threshold),
/// leaves carry class counts over the label set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub labels: LabelSet,
    pub n_features: usize,
    pub nodes: Vec<TreeNode>,
}

impl TreeModel {
    /// Leaf class frequencies of the leaf the row routes to.
    pub fn predict_dist(&self, row: &[f64]) -> Result<Vec<f64>, PredictError> {
        check_arity(self.n_features, row)?;
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                TreeNode::Split { feature, threshold, left, right } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
                TreeNode::Leaf { counts } => {
                    let total: u32 = counts.iter().sum();
                    return Ok(counts.iter().map(|&c| c as f64 / total as f64).collect());
                }
            }
        }
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], at: usize) -> usize {
            match &nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }

    /// Leaf class-count vectors, for invariant checks.
    pub fn leaf_counts(&self) -> impl Iterator<Item = &[u32]> {
        self.nodes.iter().filter_map(|n| match n {
            TreeNode::Leaf { counts } => Some(counts.as_slice()),
            _ => None,
        })
    }

    /// A one-leaf tree with the given class counts; every row predicts
    /// the same distribution. Used to build fixed-output members.
    pub fn from_leaf_counts(labels: LabelSet, n_features: usize, counts: Vec<u32>) -> Self {
        assert_eq!(counts.len(), labels.len());
        assert!(counts.iter().any(|&c| c > 0));
        TreeModel { labels, n_features, nodes: vec![TreeNode::Leaf { counts }] }
    }
}

/// Fit a CART tree on the full feature set.
pub fn cart_fit(task: &TaskData, params: &CartParams) -> Result<TreeModel, FitError> {
    task.validate()?;
    if task.n_rows() == 0 {
        return Err(FitError::EmptyTrainingSet);
    }
    let indices: Vec<usize> = (0..task.n_rows()).collect();
    let nodes =
        grow_tree(&task.features, &task.labels, task.label_set.len(), params, indices, &mut None);
    Ok(TreeModel { labels: task.label_set.clone(), n_features: task.n_features(), nodes })
}

/// Per-split feature sampling used by the random forest: `m` features
/// drawn uniformly without replacement from the tree's RNG.
pub(crate) struct FeatureSampler<'a> {
    pub m: usize,
    pub rng: &'a mut ChaCha8Rng,
}

/// Grow a tree over `indices` with an explicit worklist. With a sampler
/// each split considers only a random feature subset; candidates are
/// always visited in ascending feature order so tie-breaks stay fixed.
pub(crate) fn grow_tree(
    features: &FeatureMatrix,
    labels: &[usize],
    n_labels: usize,
    params: &CartParams,
    root_indices: Vec<usize>,
    sampler: &mut Option<FeatureSampler<'_>>,
) -> Vec<TreeNode> {
    let p = features.n_cols();
    let mut nodes = vec![TreeNode::Leaf { counts: Vec::new() }];
    let mut work = vec![(0usize, root_indices, 0usize)];

    while let Some((slot, indices, depth)) = work.pop() {
        let counts = class_counts(labels, &indices, n_labels);
        let n = indices.len();
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;

        let mut split = None;
        if depth < params.max_depth && !pure && n >= 2 * params.min_leaf_samples {
            let candidates: Vec<usize> = match sampler {
                Some(s) if s.m < p => {
                    let mut picked: Vec<usize> =
                        rand::seq::index::sample(s.rng, p, s.m).into_iter().collect();
                    picked.sort_unstable();
                    picked
                }
                _ => (0..p).collect(),
            };
            split = best_split(features, labels, &counts, &indices, &candidates, params);
        }

        match split {
            Some((feature, threshold)) => {
                let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
                    indices.into_iter().partition(|&i| features.row(i)[feature] <= threshold);
                let left = nodes.len();
                let right = nodes.len() + 1;
                nodes.push(TreeNode::Leaf { counts: Vec::new() });
                nodes.push(TreeNode::Leaf { counts: Vec::new() });
                nodes[slot] = TreeNode::Split { feature, threshold, left, right };
                // Push right first so the left child is grown first;
                // with a sampler this fixes the RNG consumption order.
                work.push((right, right_idx, depth + 1));
                work.push((left, left_idx, depth + 1));
            }
            None => {
                nodes[slot] = TreeNode::Leaf { counts };
            }
        }
    }
    nodes
}

fn class_counts(labels: &[usize], indices: &[usize], n_labels: usize) -> Vec<u32> {
    let mut counts = vec![0u32; n_labels];
    for &i in indices {
        counts[labels[i]] += 1;
    }
    counts
}

fn gini_from_counts(counts: &[u32], total: f64) -> f64 {
    let mut g = 1.0;
    for &c in counts {
        let frac = c as f64 / total;
        g -= frac * frac;
    }
    g
}

/// Best (feature, threshold) over the candidate features, or `None`
/// when no split satisfies the leaf-size and impurity-decrease rules.
fn best_split(
    features: &FeatureMatrix,
    labels: &[usize],
    parent_counts: &[u32],
    indices: &[usize],
    candidates: &[usize],
    params: &CartParams,
) -> Option<(usize, f64)> {
    let n = indices.len();
    let n_f = n as f64;
    let parent_gini = gini_from_counts(parent_counts, n_f);

    let mut best: Option<(f64, usize, f64)> = None;
    let mut sorted = indices.to_vec();
    let mut left_counts = vec![0u32; parent_counts.len()];

    for &feature in candidates {
        sorted.sort_by(|&a, &b| features.row(a)[feature].total_cmp(&features.row(b)[feature]));
        left_counts.iter_mut().for_each(|c| *c = 0);
        let mut right_counts = parent_counts.to_vec();

        for pos in 1..n {
            let prev = features.row(sorted[pos - 1])[feature];
            left_counts[labels[sorted[pos - 1]]] += 1;
            right_counts[labels[sorted[pos - 1]]] -= 1;
            let here = features.row(sorted[pos])[feature];
            if here <= prev {
                continue; // not a boundary between distinct values
            }
            if pos < params.min_leaf_samples || n - pos < params.min_leaf_samples {
                continue;
            }
            let weighted = (pos as f64 / n_f) * gini_from_counts(&left_counts, pos as f64)
                + ((n - pos) as f64 / n_f) * gini_from_counts(&right_counts, (n - pos) as f64);
            let decrease = parent_gini - weighted;
            let better = match best {
                None => true,
                Some((best_decrease, _, _)) => decrease > best_decrease,
            };
            if better {
                // Midpoint of the two distinct values, kept strictly
                // below `here` so routing on x <= threshold realizes
                // exactly the scored left/right partition even when the
                // values are adjacent floats and the midpoint rounds up.
                let mut threshold = prev + (here - prev) / 2.0;
                if threshold >= here {
                    threshold = prev;
                }
                best = Some((decrease, feature, threshold));
            }
        }
    }

    match best {
        Some((decrease, feature, threshold)) if decrease >= params.min_impurity_decrease => {
            Some((feature, threshold))
        }
        _ => None,
    }
}
