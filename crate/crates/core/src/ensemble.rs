//! Weighted plurality voting over base-learner predictions, soft voting
//! over their distributions, and the analytic binomial-tail calculator
//! for the error of a majority ensemble of independent members.
//!
//! Hard voting returns the label with the greatest total member weight;
//! with uniform weights this reduces to the mode of the member votes.
//! The binary sign vote maps {-1,+1} votes through the weighted sum,
//! assigning the exact-zero boundary to +1. All plurality ties break
//! toward the lower label index.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifiers::{
    fit_model, FeatureMatrix, FitError, PredictError, TaskData, TrainedModel,
};
use crate::data::{EnsembleSpec, LabelSet, ModelKind};
use crate::seed::{derive_seed, STREAM_ENSEMBLE};

#[derive(Debug, Error)]
pub enum VoteError {
    #[error("cannot vote with zero members")]
    Empty,
    #[error("{votes} votes but {weights} weights")]
    WeightArity { votes: usize, weights: usize },
    #[error("weights must be non-negative and finite, got {0}")]
    BadWeight(f64),
    #[error("total weight must be positive")]
    ZeroTotalWeight,
    #[error("sign vote requires values in {{-1, +1}}, got {0}")]
    BadSignVote(i32),
    #[error("member {member} distribution is invalid: {reason}")]
    BadDistribution { member: usize, reason: String },
}

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("member {index} ({kind}) failed to fit: {source}")]
    MemberFit {
        index: usize,
        kind: ModelKind,
        #[source]
        source: FitError,
    },
    #[error("member {index} ({kind}) failed to predict: {source}")]
    MemberPredict {
        index: usize,
        kind: ModelKind,
        #[source]
        source: PredictError,
    },
    #[error(transparent)]
    Vote(#[from] VoteError),
    #[error(transparent)]
    Spec(#[from] crate::data::DataError),
    #[error("epsilon must lie in [0, 1], got {0}")]
    BadEpsilon(f64),
    #[error("threshold k must satisfy 1 <= k <= n, got k={k}, n={n}")]
    BadThreshold { k: u32, n: u32 },
    #[error("member count n must be at least 1")]
    NoVoters,
}

fn check_weights(n_votes: usize, weights: &[f64]) -> Result<(), VoteError> {
    if n_votes == 0 {
        return Err(VoteError::Empty);
    }
    if weights.len() != n_votes {
        return Err(VoteError::WeightArity { votes: n_votes, weights: weights.len() });
    }
    if let Some(&w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(VoteError::BadWeight(w));
    }
    if !weights.iter().any(|&w| w > 0.0) {
        return Err(VoteError::ZeroTotalWeight);
    }
    Ok(())
}

/// Weighted plurality vote over label indices: the label maximizing the
/// total weight of the members that voted for it, ties toward the lower
/// label index.
pub fn vote_hard(votes: &[usize], weights: &[f64]) -> Result<usize, VoteError> {
    check_weights(votes.len(), weights)?;
    let n_labels = votes.iter().max().copied().unwrap_or(0) + 1;
    let mut tally = vec![0.0f64; n_labels];
    for (&vote, &weight) in votes.iter().zip(weights) {
        tally[vote] += weight;
    }
    Ok(crate::classifiers::argmax_tie_low(&tally))
}

/// Weighted sign vote over {-1, +1}: +1 when the weighted sum is >= 0,
/// -1 otherwise. The exact-zero boundary belongs to +1.
pub fn vote_sign(votes: &[i32], weights: &[f64]) -> Result<i32, VoteError> {
    check_weights(votes.len(), weights)?;
    let mut sum = 0.0f64;
    for (&vote, &weight) in votes.iter().zip(weights) {
        if vote != -1 && vote != 1 {
            return Err(VoteError::BadSignVote(vote));
        }
        sum += weight * vote as f64;
    }
    Ok(if sum >= 0.0 { 1 } else { -1 })
}

/// Soft vote: argmax of the weighted average of member distributions,
/// ties toward the lower label index. Each distribution must be
/// non-negative and sum to 1 within 1e-9.
pub fn vote_soft(dists: &[Vec<f64>], weights: &[f64]) -> Result<usize, VoteError> {
    check_weights(dists.len(), weights)?;
    let width = dists[0].len();
    for (m, dist) in dists.iter().enumerate() {
        if dist.len() != width {
            return Err(VoteError::BadDistribution {
                member: m,
                reason: format!("length {} != {}", dist.len(), width),
            });
        }
        if dist.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(VoteError::BadDistribution {
                member: m,
                reason: "negative or non-finite probability".to_string(),
            });
        }
        let sum: f64 = dist.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(VoteError::BadDistribution {
                member: m,
                reason: format!("sums to {sum}, not 1"),
            });
        }
    }

    let total_weight: f64 = weights.iter().sum();
    let mut avg = vec![0.0f64; width];
    for (dist, &weight) in dists.iter().zip(weights) {
        for (a, p) in avg.iter_mut().zip(dist) {
            *a += weight * p;
        }
    }
    for a in avg.iter_mut() {
        *a /= total_weight;
    }
    Ok(crate::classifiers::argmax_tie_low(&avg))
}

/// A fitted voting ensemble: the spec, its fitted members in spec
/// order, and the shared label set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub spec: EnsembleSpec,
    pub members: Vec<TrainedModel>,
    pub labels: LabelSet,
}

/// Fit every member of `spec` independently on the full training task.
/// Member seeds derive from `seed` by member index; members never see
/// each other's outputs.
pub fn fit_ensemble(
    spec: &EnsembleSpec,
    task: &TaskData,
    seed: u64,
) -> Result<EnsembleModel, EnsembleError> {
    spec.validate()?;
    let ensemble_seed = derive_seed(seed, STREAM_ENSEMBLE);
    let members: Vec<TrainedModel> = spec
        .members
        .iter()
        .enumerate()
        .map(|(index, params)| {
            fit_model(params, task, derive_seed(ensemble_seed, index as u64))
                .map_err(|source| EnsembleError::MemberFit { index, kind: params.kind(), source })
        })
        .collect::<Result<_, _>>()?;
    Ok(EnsembleModel { spec: spec.clone(), members, labels: task.label_set.clone() })
}

impl EnsembleModel {
    pub fn n_features(&self) -> usize {
        self.members.first().map(TrainedModel::n_features).unwrap_or(0)
    }

    /// Predict one row by gathering member votes (hard) or
    /// distributions (soft) and applying the spec's weights.
    pub fn predict_row(&self, row: &[f64]) -> Result<usize, EnsembleError> {
        match self.spec.voting {
            crate::data::Voting::Hard => {
                let votes: Vec<usize> = self
                    .members
                    .iter()
                    .enumerate()
                    .map(|(index, m)| {
                        m.predict(row).map_err(|source| EnsembleError::MemberPredict {
                            index,
                            kind: m.kind(),
                            source,
                        })
                    })
                    .collect::<Result<_, _>>()?;
                Ok(vote_hard(&votes, &self.spec.weights)?)
            }
            crate::data::Voting::Soft => {
                let dists: Vec<Vec<f64>> = self
                    .members
                    .iter()
                    .enumerate()
                    .map(|(index, m)| {
                        m.predict_dist(row).map_err(|source| EnsembleError::MemberPredict {
                            index,
                            kind: m.kind(),
                            source,
                        })
                    })
                    .collect::<Result<_, _>>()?;
                Ok(vote_soft(&dists, &self.spec.weights)?)
            }
        }
    }

    /// Batch prediction over a feature matrix; rows are independent and
    /// evaluated in parallel, results in row order.
    pub fn predict_batch(&self, features: &FeatureMatrix) -> Result<Vec<usize>, EnsembleError> {
        (0..features.n_rows()).into_par_iter().map(|i| self.predict_row(features.row(i))).collect()
    }
}

/// Query for the analytic ensemble error: the probability that at least
/// `k` of `n` independent members, each wrong with probability
/// `epsilon`, are wrong together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleErrorQuery {
    pub n: u32,
    pub epsilon: f64,
    pub k: u32,
}

impl EnsembleErrorQuery {
    pub fn new(n: u32, epsilon: f64, k: Option<u32>) -> Result<Self, EnsembleError> {
        if n == 0 {
            return Err(EnsembleError::NoVoters);
        }
        if !(0.0..=1.0).contains(&epsilon) || epsilon.is_nan() {
            return Err(EnsembleError::BadEpsilon(epsilon));
        }
        let k = k.unwrap_or(n / 2 + 1);
        if k == 0 || k > n {
            return Err(EnsembleError::BadThreshold { k, n });
        }
        Ok(EnsembleErrorQuery { n, epsilon, k })
    }

    /// Majority threshold floor(n/2) + 1.
    pub fn majority(n: u32, epsilon: f64) -> Result<Self, EnsembleError> {
        EnsembleErrorQuery::new(n, epsilon, None)
    }
}

/// Exact binomial tail sum(j=k..n) C(n,j) eps^j (1-eps)^(n-j).
///
/// Small n uses incrementally computed coefficients directly; larger n
/// switches to log-domain coefficients so nothing overflows.
pub fn ensemble_error(q: &EnsembleErrorQuery) -> f64 {
    let (n, k, eps) = (q.n as u64, q.k as u64, q.epsilon);
    if eps == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if eps == 1.0 {
        return 1.0;
    }

    let total = if n <= 60 {
        // C(n,j) fits comfortably in f64 for n <= 60.
        let mut coeff = 1.0f64; // C(n,0)
        let mut sum = 0.0f64;
        for j in 0..=n {
            if j >= k {
                sum += coeff * eps.powi(j as i32) * (1.0 - eps).powi((n - j) as i32);
            }
            if j < n {
                coeff = coeff * (n - j) as f64 / (j + 1) as f64;
            }
        }
        sum
    } else {
        let ln_eps = eps.ln();
        let ln_1m = (1.0 - eps).ln();
        let mut ln_coeff = 0.0f64; // ln C(n,0)
        let mut sum = 0.0f64;
        for j in 0..=n {
            if j >= k {
                sum += (ln_coeff + j as f64 * ln_eps + (n - j) as f64 * ln_1m).exp();
            }
            if j < n {
                ln_coeff += ((n - j) as f64).ln() - ((j + 1) as f64).ln();
            }
        }
        sum
    };
    total.clamp(0.0, 1.0)
}
