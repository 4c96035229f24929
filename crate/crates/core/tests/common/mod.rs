//! Shared helpers for the integration and acceptance suites: seeded data
//! generation and brute-force oracles kept independent of the library's
//! fitting paths.

#![allow(dead_code)]

use std::sync::Arc;

use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rgboost::learners::EnumeratedClass;
use rgboost::{FnVec, SampleSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_features(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, d), |_| rng.random_range(-1.0..1.0))
}

pub fn uniform_space(features: Array2<f64>, k: usize) -> Arc<SampleSpace> {
    SampleSpace::uniform(features, k).unwrap()
}

pub fn fnvec(space: &Arc<SampleSpace>, vals: &[f64]) -> FnVec {
    let values = Array2::from_shape_vec((space.len(), space.output_dim()), vals.to_vec()).unwrap();
    FnVec::new(space, values).unwrap()
}

pub fn random_fnvec(rng: &mut ChaCha8Rng, space: &Arc<SampleSpace>, scale: f64) -> FnVec {
    let values = Array2::from_shape_fn((space.len(), space.output_dim()), |_| {
        rng.random_range(-scale..scale)
    });
    FnVec::new(space, values).unwrap()
}

/// Signed coordinate basis: both orientations of the indicator of every
/// (point, output) coordinate.
pub fn signed_basis(space: &Arc<SampleSpace>) -> EnumeratedClass {
    let n = space.len();
    let k = space.output_dim();
    let mut members = Vec::with_capacity(2 * n * k);
    for i in 0..n {
        for c in 0..k {
            for sign in [1.0, -1.0] {
                let mut values = Array2::zeros((n, k));
                values[[i, c]] = sign;
                members.push(FnVec::new(space, values).unwrap());
            }
        }
    }
    EnumeratedClass::from_fnvecs(members).unwrap()
}

/// The two-point hypothesis set from the non-smooth counterexample:
/// sign values on one point, zero on the other.
pub fn counterexample_class(space: &Arc<SampleSpace>) -> EnumeratedClass {
    EnumeratedClass::from_fnvecs(vec![
        fnvec(space, &[1.0, 0.0]),
        fnvec(space, &[-1.0, 0.0]),
        fnvec(space, &[0.0, 1.0]),
        fnvec(space, &[0.0, -1.0]),
    ])
    .unwrap()
}

/// All stump thresholds for one feature column: the infinite sentinels plus
/// midpoints between consecutive distinct values.
pub fn all_thresholds(column: &[f64]) -> Vec<f64> {
    let mut vals = column.to_vec();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.dedup();
    let mut thresholds = vec![f64::NEG_INFINITY];
    for w in vals.windows(2) {
        thresholds.push(0.5 * (w[0] + w[1]));
    }
    thresholds.push(f64::INFINITY);
    thresholds
}

/// Exhaustive sign-valued stump outputs over a feature matrix, in the fit's
/// enumeration order: feature, then threshold ascending, then +1 before -1.
pub fn all_sign_stump_outputs(features: &Array2<f64>) -> Vec<Vec<f64>> {
    let n = features.nrows();
    let mut out = Vec::new();
    for j in 0..features.ncols() {
        let column: Vec<f64> = features.column(j).to_vec();
        for theta in all_thresholds(&column) {
            for sign in [1.0, -1.0] {
                out.push(
                    (0..n)
                        .map(|i| {
                            if features[[i, j]] > theta {
                                sign
                            } else {
                                -sign
                            }
                        })
                        .collect(),
                );
            }
        }
    }
    out
}

/// Exhaustive multiclass stump predictions (1-based class per point) over a
/// feature matrix: every (feature, threshold, left class, right class).
pub fn all_multiclass_stump_predictions(
    features: &Array2<f64>,
    num_classes: usize,
) -> Vec<Vec<usize>> {
    let n = features.nrows();
    let mut out = Vec::new();
    for j in 0..features.ncols() {
        let column: Vec<f64> = features.column(j).to_vec();
        for theta in all_thresholds(&column) {
            for left in 1..=num_classes {
                for right in 1..=num_classes {
                    out.push(
                        (0..n)
                            .map(|i| {
                                if features[[i, j]] > theta {
                                    right
                                } else {
                                    left
                                }
                            })
                            .collect(),
                    );
                }
            }
        }
    }
    out
}

/// Brute-force regression stump oracle: scans every (feature, threshold)
/// with freshly computed weighted means and returns the minimal weighted
/// SSE, keeping the first optimum in (feature, threshold) order.
pub struct BruteStump {
    pub feature: usize,
    pub threshold: f64,
    pub left: Array1<f64>,
    pub right: Array1<f64>,
    pub sse: f64,
}

pub fn brute_force_regression_stump(space: &Arc<SampleSpace>, target: &FnVec) -> BruteStump {
    let (n, k) = (space.len(), space.output_dim());
    let weights = space.weights();
    let values = target.values();
    let mut best: Option<BruteStump> = None;
    for feature in 0..space.num_features() {
        let column: Vec<f64> = space.features().column(feature).to_vec();
        for theta in all_thresholds(&column) {
            let mut w = [0.0, 0.0];
            let mut sums = [Array1::<f64>::zeros(k), Array1::<f64>::zeros(k)];
            for i in 0..n {
                let side = usize::from(column[i] > theta);
                w[side] += weights[i];
                sums[side] += &(weights[i] * &values.row(i));
            }
            let means = [
                if w[0] > 0.0 {
                    &sums[0] / w[0]
                } else {
                    Array1::zeros(k)
                },
                if w[1] > 0.0 {
                    &sums[1] / w[1]
                } else {
                    Array1::zeros(k)
                },
            ];
            let mut sse = 0.0;
            for i in 0..n {
                let side = usize::from(column[i] > theta);
                let diff = &values.row(i) - &means[side];
                sse += weights[i] * diff.dot(&diff);
            }
            if best.as_ref().is_none_or(|b| sse < b.sse) {
                best = Some(BruteStump {
                    feature,
                    threshold: theta,
                    left: means[0].clone(),
                    right: means[1].clone(),
                    sse,
                });
            }
        }
    }
    best.expect("candidates exist")
}

/// Brute-force best inner product of a sign stump with a target.
pub fn brute_force_sign_stump_inner(space: &Arc<SampleSpace>, target: &FnVec) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let features = space.features().to_owned();
    for outputs in all_sign_stump_outputs(&features) {
        let mut inner = 0.0;
        for (i, out) in outputs.iter().enumerate() {
            inner += space.weight(i) * target.values()[[i, 0]] * out;
        }
        if inner > best {
            best = inner;
        }
    }
    best
}

/// Brute-force best inner product of an encoded multiclass stump with a
/// target.
pub fn brute_force_multiclass_stump_inner(space: &Arc<SampleSpace>, target: &FnVec) -> f64 {
    let k = space.output_dim();
    let features = space.features().to_owned();
    let mut best = f64::NEG_INFINITY;
    for preds in all_multiclass_stump_predictions(&features, k) {
        let mut inner = 0.0;
        for (i, &class) in preds.iter().enumerate() {
            let enc = rgboost::learners::encode_class(class, k);
            inner += space.weight(i) * target.row(i).dot(&enc);
        }
        if inner > best {
            best = inner;
        }
    }
    best
}
