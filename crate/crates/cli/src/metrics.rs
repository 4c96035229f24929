//! Task metrics computed from model outputs on a split.

use anyhow::{bail, Result};
use ndarray::ArrayView2;
use rgboost::objectives::{LabeledData, Labels};

use crate::dataset::TaskKind;

/// Task metric for predictions against typed labels:
/// multiclass argmax error rate (ties to the lowest class index), ranking
/// pairwise disagreement (ties count as violations), regression mean squared
/// error, binary sign error.
pub fn eval_metric(
    predictions: ArrayView2<f64>,
    labels: &LabeledData,
    task: TaskKind,
) -> Result<f64> {
    let n = predictions.nrows();
    match task {
        TaskKind::Multiclass => {
            let Labels::Class {
                classes,
                num_classes,
            } = &labels.labels
            else {
                bail!("multiclass metric needs class labels");
            };
            if predictions.ncols() != *num_classes || classes.len() != n {
                bail!("prediction shape does not match labels");
            }
            let mut wrong = 0usize;
            for (row, &truth) in predictions.rows().into_iter().zip(classes) {
                let mut best = 0usize;
                for c in 1..row.len() {
                    if row[c] > row[best] {
                        best = c;
                    }
                }
                if best + 1 != truth {
                    wrong += 1;
                }
            }
            Ok(wrong as f64 / n as f64)
        }
        TaskKind::Ranking => {
            let Labels::Real(relevance) = &labels.labels else {
                bail!("ranking metric needs relevance labels");
            };
            let Some(groups) = &labels.groups else {
                bail!("ranking metric needs query groups");
            };
            if predictions.ncols() != 1 || relevance.nrows() != n {
                bail!("prediction shape does not match labels");
            }
            let mut pairs = 0usize;
            let mut violations = 0usize;
            for i in 0..n {
                for j in 0..n {
                    if i != j && groups[i] == groups[j] && relevance[[i, 0]] > relevance[[j, 0]] {
                        pairs += 1;
                        if predictions[[i, 0]] <= predictions[[j, 0]] {
                            violations += 1;
                        }
                    }
                }
            }
            if pairs == 0 {
                bail!("no preference pairs in the split");
            }
            Ok(violations as f64 / pairs as f64)
        }
        TaskKind::Regression => {
            let Labels::Real(targets) = &labels.labels else {
                bail!("regression metric needs real targets");
            };
            if targets.nrows() != n || targets.ncols() != predictions.ncols() {
                bail!("prediction shape does not match labels");
            }
            let mut total = 0.0;
            for (row, target) in predictions.rows().into_iter().zip(targets.rows()) {
                let mut sq = 0.0;
                for (a, b) in row.iter().zip(target.iter()) {
                    sq += (a - b) * (a - b);
                }
                total += sq;
            }
            Ok(total / n as f64)
        }
        TaskKind::Binary => {
            let Labels::Binary(truth) = &labels.labels else {
                bail!("binary metric needs ±1 labels");
            };
            if predictions.ncols() != 1 || truth.len() != n {
                bail!("prediction shape does not match labels");
            }
            let wrong = predictions
                .column(0)
                .iter()
                .zip(truth)
                .filter(|(f, y)| {
                    let predicted = if **f > 0.0 { 1.0 } else { -1.0 };
                    predicted != **y
                })
                .count();
            Ok(wrong as f64 / n as f64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn multiclass_error_and_ties() {
        let labels = LabeledData {
            labels: Labels::Class {
                classes: vec![1, 2],
                num_classes: 3,
            },
            groups: None,
        };
        // perfect separation
        let perfect = arr2(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        assert_eq!(
            eval_metric(perfect.view(), &labels, TaskKind::Multiclass).unwrap(),
            0.0
        );
        // all-tie rows predict class 1
        let flat = arr2(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        assert_eq!(
            eval_metric(flat.view(), &labels, TaskKind::Multiclass).unwrap(),
            0.5
        );
    }

    #[test]
    fn binary_constant_model_on_balanced_data() {
        let labels = LabeledData {
            labels: Labels::Binary(vec![1.0, -1.0, 1.0, -1.0]),
            groups: None,
        };
        let constant = arr2(&[[0.0], [0.0], [0.0], [0.0]]);
        assert_eq!(
            eval_metric(constant.view(), &labels, TaskKind::Binary).unwrap(),
            0.5
        );
    }

    #[test]
    fn ranking_tie_counts_as_violation() {
        let labels = LabeledData {
            labels: Labels::Real(arr2(&[[1.0], [0.0]])),
            groups: Some(vec![5, 5]),
        };
        let tied = arr2(&[[0.3], [0.3]]);
        assert_eq!(
            eval_metric(tied.view(), &labels, TaskKind::Ranking).unwrap(),
            1.0
        );
        let correct = arr2(&[[0.5], [0.3]]);
        assert_eq!(
            eval_metric(correct.view(), &labels, TaskKind::Ranking).unwrap(),
            0.0
        );
    }

    #[test]
    fn regression_mse() {
        let labels = LabeledData {
            labels: Labels::Real(arr2(&[[1.0], [-1.0]])),
            groups: None,
        };
        let predictions = arr2(&[[1.0], [0.0]]);
        assert_eq!(
            eval_metric(predictions.view(), &labels, TaskKind::Regression).unwrap(),
            0.5
        );
    }
}
