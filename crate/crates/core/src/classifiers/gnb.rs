//! Gaussian naive Bayes with per-class feature-independent likelihoods.
//!
//! Posteriors are computed in log space and normalized with
//! log-sum-exp, so tiny densities never underflow to hard zeros.
//! Variances are population variances (divide by n) floored at
//! `var_smoothing_fraction` times the largest global feature variance;
//! the floor keeps constant features (encoded door states) from
//! producing zero-variance singularities.

use serde::{Deserialize, Serialize};

use crate::data::{GnbParams, LabelSet};

use super::{check_arity, FitError, PredictError, TaskData};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbModel {
    pub labels: LabelSet,
    /// Class priors; zero for classes absent from training.
    pub priors: Vec<f64>,
    /// Per-class per-feature means, indexed by class then feature.
    pub means: Vec<Vec<f64>>,
    /// Per-class per-feature variances, all >= `eps_var`.
    pub variances: Vec<Vec<f64>>,
    pub eps_var: f64,
}

impl GnbModel {
    pub fn n_features(&self) -> usize {
        self.means.first().map(Vec::len).unwrap_or(0)
    }

    pub fn predict_dist(&self, row: &[f64]) -> Result<Vec<f64>, PredictError> {
        check_arity(self.n_features(), row)?;
        let scores: Vec<f64> = (0..self.labels.len())
            .map(|c| {
                if self.priors[c] == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let mut score = self.priors[c].ln();
                for (f, &x) in row.iter().enumerate() {
                    let var = self.variances[c][f];
                    let diff = x - self.means[c][f];
                    score += -0.5 * (std::f64::consts::TAU * var).ln() - diff * diff / (2.0 * var);
                }
                score
            })
            .collect();

        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let unnorm: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let total: f64 = unnorm.iter().sum();
        Ok(unnorm.into_iter().map(|p| p / total).collect())
    }
}

pub fn gnb_fit(task: &TaskData, params: &GnbParams) -> Result<GnbModel, FitError> {
    task.validate()?;
    let n = task.n_rows();
    if n == 0 {
        return Err(FitError::EmptyTrainingSet);
    }
    if !params.var_smoothing_fraction.is_finite() || params.var_smoothing_fraction <= 0.0 {
        return Err(FitError::BadSmoothing(params.var_smoothing_fraction));
    }
    let p = task.n_features();
    let n_classes = task.label_set.len();

    let mut counts = vec![0usize; n_classes];
    let mut sums = vec![vec![0.0f64; p]; n_classes];
    for (i, &label) in task.labels.iter().enumerate() {
        counts[label] += 1;
        for (f, &x) in task.features.row(i).iter().enumerate() {
            sums[label][f] += x;
        }
    }
    let means: Vec<Vec<f64>> = (0..n_classes)
        .map(|c| {
            (0..p)
                .map(|f| if counts[c] > 0 { sums[c][f] / counts[c] as f64 } else { 0.0 })
                .collect()
        })
        .collect();

    let mut sq = vec![vec![0.0f64; p]; n_classes];
    for (i, &label) in task.labels.iter().enumerate() {
        for (f, &x) in task.features.row(i).iter().enumerate() {
            let d = x - means[label][f];
            sq[label][f] += d * d;
        }
    }

    // Global population variance per feature sets the smoothing scale.
    let mut global_mean = vec![0.0f64; p];
    for i in 0..n {
        for (f, &x) in task.features.row(i).iter().enumerate() {
            global_mean[f] += x;
        }
    }
    global_mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut max_global_var = 0.0f64;
    for (f, mean) in global_mean.iter().enumerate() {
        let var: f64 = (0..n)
            .map(|i| {
                let d = task.features.row(i)[f] - mean;
                d * d
            })
            .sum::<f64>()
            / n as f64;
        max_global_var = max_global_var.max(var);
    }
    // All-constant features leave no scale to smooth against; fall
    // back to the fraction itself so eps_var stays positive.
    let eps_var = if max_global_var > 0.0 {
        params.var_smoothing_fraction * max_global_var
    } else {
        params.var_smoothing_fraction
    };

    let variances: Vec<Vec<f64>> = (0..n_classes)
        .map(|c| {
            (0..p)
                .map(|f| {
                    let var = if counts[c] > 0 { sq[c][f] / counts[c] as f64 } else { 0.0 };
                    var.max(eps_var)
                })
                .collect()
        })
        .collect();

    let priors: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();

    Ok(GnbModel { labels: task.label_set.clone(), priors, means, variances, eps_var })
}
