//! Brute-force k-nearest-neighbors over exact Euclidean distance.
//!
//! The training matrix is stored verbatim. For a query, the k nearest
//! rows are selected with distance ties broken by the lower row index,
//! and the predicted distribution is the neighbor class fractions.

use serde::{Deserialize, Serialize};

use crate::data::{KnnParams, LabelSet};

use super::{check_arity, FeatureMatrix, FitError, PredictError, TaskData};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub labels: LabelSet,
    pub k: usize,
    pub train: FeatureMatrix,
    pub train_labels: Vec<usize>,
}

impl KnnModel {
    pub fn n_features(&self) -> usize {
        self.train.n_cols()
    }

    pub fn predict_dist(&self, row: &[f64]) -> Result<Vec<f64>, PredictError> {
        check_arity(self.n_features(), row)?;
        // Squared distance preserves the ordering and its ties.
        let mut dists: Vec<(f64, usize)> = self
            .train
            .rows()
            .enumerate()
            .map(|(i, train_row)| {
                let d2: f64 = train_row
                    .iter()
                    .zip(row)
                    .map(|(a, b)| {
                        let d = a - b;
                        d * d
                    })
                    .sum();
                (d2, i)
            })
            .collect();
        dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut counts = vec![0usize; self.labels.len()];
        for &(_, i) in dists.iter().take(self.k) {
            counts[self.train_labels[i]] += 1;
        }
        Ok(counts.iter().map(|&c| c as f64 / self.k as f64).collect())
    }
}

pub fn knn_fit(task: &TaskData, params: &KnnParams) -> Result<KnnModel, FitError> {
    task.validate()?;
    let n = task.n_rows();
    if n == 0 {
        return Err(FitError::EmptyTrainingSet);
    }
    if params.k == 0 || params.k > n {
        return Err(FitError::BadK { k: params.k, n });
    }
    Ok(KnnModel {
        labels: task.label_set.clone(),
        k: params.k,
        train: task.features.clone(),
        train_labels: task.labels.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::argmax_tie_low;
    use crate::classifiers::test_util::task;

    #[test]
    fn k1_memorizes_stored_rows() {
        let t = task(&[(&[0.0, 0.0], 0), (&[1.0, 1.0], 1), (&[2.0, 2.0], 0)], &["A", "B"]);
        let model = knn_fit(&t, &KnnParams { k: 1 }).unwrap();
        for i in 0..t.n_rows() {
            let dist = model.predict_dist(t.features.row(i)).unwrap();
            assert_eq!(argmax_tie_low(&dist), t.labels[i]);
            assert_eq!(dist.iter().copied().fold(f64::NEG_INFINITY, f64::max), 1.0);
        }
    }

    #[test]
    fn k_equal_n_returns_global_majority() {
        let t = task(&[(&[0.0], 0), (&[5.0], 0), (&[9.0], 1)], &["A", "B"]);
        let model = knn_fit(&t, &KnnParams { k: 3 }).unwrap();
        for q in [-10.0, 0.0, 100.0] {
            let dist = model.predict_dist(&[q]).unwrap();
            assert_eq!(argmax_tie_low(&dist), 0);
        }
    }

    #[test]
    fn neighbor_fractions_are_counted() {
        let t = task(&[(&[0.0], 0), (&[0.1], 0), (&[0.2], 1), (&[9.0], 1)], &["A", "B"]);
        let model = knn_fit(&t, &KnnParams { k: 3 }).unwrap();
        let dist = model.predict_dist(&[0.0]).unwrap();
        assert!((dist[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((dist[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force_distance_sort_oracle() {
        // Five seeded 2-D points; oracle sorts all pairwise distances
        // longhand and takes the 3-neighbor majority.
        let pts: [([f64; 2], usize); 5] = [
            ([0.31, 0.12], 0),
            ([0.90, 0.88], 1),
            ([0.25, 0.40], 0),
            ([0.77, 0.60], 1),
            ([0.05, 0.95], 0),
        ];
        let rows: Vec<(&[f64], usize)> = pts.iter().map(|(r, l)| (&r[..], *l)).collect();
        let t = task(&rows, &["A", "B"]);
        let model = knn_fit(&t, &KnnParams { k: 3 }).unwrap();

        for query in [[0.5f64, 0.5], [0.0, 0.0], [1.0, 1.0], [0.4, 0.7]] {
            let mut oracle: Vec<(f64, usize, usize)> = pts
                .iter()
                .enumerate()
                .map(|(i, (r, l))| {
                    let d = ((r[0] - query[0]).powi(2) + (r[1] - query[1]).powi(2)).sqrt();
                    (d, i, *l)
                })
                .collect();
            oracle.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let votes_b: usize = oracle.iter().take(3).map(|(_, _, l)| l).sum();
            let expected = usize::from(votes_b > 1);

            let dist = model.predict_dist(&query).unwrap();
            assert_eq!(argmax_tie_low(&dist), expected, "query {query:?}");
        }
    }

    #[test]
    fn k_out_of_range_is_a_parameter_error() {
        let t = task(&[(&[0.0], 0), (&[1.0], 1)], &["A", "B"]);
        assert!(matches!(knn_fit(&t, &KnnParams { k: 0 }), Err(FitError::BadK { k: 0, n: 2 })));
        assert!(matches!(knn_fit(&t, &KnnParams { k: 3 }), Err(FitError::BadK { k: 3, n: 2 })));
    }
}
