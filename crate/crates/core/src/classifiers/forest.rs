//! Random forest: bagged CART trees with per-split feature
//! subsampling.
//!
//! Each tree gets its own seed derived from the master seed by index,
//! so fitting is reproducible regardless of how many workers run the
//! per-tree loop. The degenerate configuration (one tree, no bootstrap,
//! all features per split) reproduces CART exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{ForestParams, LabelSet};
use crate::seed::{derive_seed, rng_from_seed};

use super::cart::{grow_tree, FeatureSampler, TreeModel};
use super::{check_arity, FitError, PredictError, TaskData};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub labels: LabelSet,
    pub n_features: usize,
    pub features_per_split: usize,
    pub tree_seeds: Vec<u64>,
    pub trees: Vec<TreeModel>,
}

impl ForestModel {
    /// Mean of the member trees' leaf distributions.
    pub fn predict_dist(&self, row: &[f64]) -> Result<Vec<f64>, PredictError> {
        check_arity(self.n_features, row)?;
        let mut acc = vec![0.0; self.labels.len()];
        for tree in &self.trees {
            let dist = tree.predict_dist(row)?;
            for (a, d) in acc.iter_mut().zip(dist) {
                *a += d;
            }
        }
        let m = self.trees.len() as f64;
        for a in acc.iter_mut() {
            *a /= m;
        }
        Ok(acc)
    }
}

pub fn forest_fit(
    task: &TaskData,
    params: &ForestParams,
    seed: u64,
) -> Result<ForestModel, FitError> {
    task.validate()?;
    let n = task.n_rows();
    if n == 0 {
        return Err(FitError::EmptyTrainingSet);
    }
    if params.n_trees == 0 {
        return Err(FitError::NoTrees);
    }
    let p = task.n_features();
    let m = match params.features_per_split {
        Some(m) => {
            if m == 0 || m > p {
                return Err(FitError::BadFeaturesPerSplit { m, p });
            }
            m
        }
        None => ((p as f64).sqrt().floor() as usize).clamp(1, p.max(1)),
    };

    let tree_seeds: Vec<u64> = (0..params.n_trees).map(|i| derive_seed(seed, i as u64)).collect();

    let trees: Vec<TreeModel> = tree_seeds
        .par_iter()
        .map(|&tree_seed| {
            let mut rng = rng_from_seed(tree_seed);
            let indices: Vec<usize> = if params.bootstrap {
                use rand::Rng;
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let mut sampler = if m < p { Some(FeatureSampler { m, rng: &mut rng }) } else { None };
            let nodes = grow_tree(
                &task.features,
                &task.labels,
                task.label_set.len(),
                &params.tree,
                indices,
                &mut sampler,
            );
            TreeModel { labels: task.label_set.clone(), n_features: p, nodes }
        })
        .collect();

    Ok(ForestModel {
        labels: task.label_set.clone(),
        n_features: p,
        features_per_split: m,
        tree_seeds,
        trees,
    })
}
