//! Weak-learner edge: the guaranteed alignment between projected targets and
//! the best hypothesis in a class, plus instance checkers relating it to the
//! weighted-classification notions of edge for binary and multiclass weak
//! learners. The conversion checkers work under the uniform empirical
//! measure, where the norm identities they rely on hold.

use ndarray::{Array2, ArrayView2};
use serde::Serialize;

use crate::fspace::FnVec;
use crate::learners::{Hypothesis, ProjectionMode, RestrictionSet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeMode {
    InnerProduct,
    NormResidual,
}

/// A measured or certified edge in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeEstimate {
    pub gamma: f64,
    pub mode: EdgeMode,
    /// Set when the raw measurement was negative and reported as zero.
    pub negative: bool,
    pub n_targets: usize,
    /// Index of the worst target when certified over a target set.
    pub worst_target: Option<usize>,
}

#[derive(Serialize)]
struct EdgeJson<'a> {
    gamma: f64,
    mode: &'a EdgeMode,
    n_targets: usize,
    worst_target_id: Option<usize>,
}

impl EdgeEstimate {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&EdgeJson {
            gamma: self.gamma,
            mode: &self.mode,
            n_targets: self.n_targets,
            worst_target_id: self.worst_target,
        })
        .expect("plain fields serialize")
    }
}

/// Realized edge of one hypothesis against one target.
///
/// Inner-product mode measures `<target, h> / (||target|| ||h||)`; negative
/// alignments are reported as zero edge with the `negative` flag set.
/// Norm-residual mode reports `sqrt(1 - ||target - h||^2 / ||target||^2)`
/// clamped to [0, 1].
pub fn realized_edge(target: &FnVec, h: &Hypothesis, mode: EdgeMode) -> Result<EdgeEstimate> {
    let t_norm = target.norm();
    if !(t_norm > 0.0) {
        return Err(Error::ZeroGradient);
    }
    if !(h.norm() > 0.0) {
        return Err(Error::DegenerateHypothesis);
    }
    let (gamma, negative) = match mode {
        EdgeMode::InnerProduct => {
            let raw = target.inner(h.values())? / (t_norm * h.norm());
            if raw < 0.0 {
                (0.0, true)
            } else {
                (raw.min(1.0), false)
            }
        }
        EdgeMode::NormResidual => {
            let diff = crate::fspace::combine(1.0, target, -1.0, h.values())?;
            let ratio = diff.inner(&diff)? / (t_norm * t_norm);
            let raw = 1.0 - ratio;
            if raw < 0.0 {
                (0.0, true)
            } else {
                (raw.sqrt().min(1.0), false)
            }
        }
    };
    Ok(EdgeEstimate {
        gamma,
        mode,
        negative,
        n_targets: 1,
        worst_target: None,
    })
}

/// Worst-case best-response edge of a class over a finite target family:
/// `min over targets of max over the class`. This certifies a lower bound
/// for the supplied family only.
pub fn class_edge(set: &dyn RestrictionSet, targets: &[FnVec]) -> Result<EdgeEstimate> {
    if targets.is_empty() {
        return Err(Error::InvalidArgument("empty target set".into()));
    }
    let mut worst: Option<(f64, usize, bool)> = None;
    for (index, target) in targets.iter().enumerate() {
        let h = set.fit(target, ProjectionMode::InnerProductMax)?;
        let estimate = realized_edge(target, &h, EdgeMode::InnerProduct)?;
        if worst.as_ref().is_none_or(|(g, ..)| estimate.gamma < *g) {
            worst = Some((estimate.gamma, index, estimate.negative));
        }
    }
    let (gamma, index, negative) = worst.expect("non-empty target set");
    Ok(EdgeEstimate {
        gamma,
        mode: EdgeMode::InnerProduct,
        negative,
        n_targets: targets.len(),
        worst_target: Some(index),
    })
}

/// A weighted-classification instance: non-negative weights with binary
/// labels, or a multiclass reward matrix with zero-mean rows.
#[derive(Debug, Clone)]
pub enum WeightedClassification {
    Binary { weights: Vec<f64>, labels: Vec<f64> },
    Multiclass { rewards: Array2<f64> },
}

impl WeightedClassification {
    pub fn binary(weights: Vec<f64>, labels: Vec<f64>) -> Result<Self> {
        if weights.len() != labels.len() || weights.is_empty() {
            return Err(Error::InvalidArgument(
                "weights and labels must match and be non-empty".into(),
            ));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "weights must be non-negative".into(),
            ));
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidArgument("labels must be ±1".into()));
        }
        Ok(WeightedClassification::Binary { weights, labels })
    }

    /// Rows must already have zero mean (within 1e-9).
    pub fn multiclass(rewards: Array2<f64>) -> Result<Self> {
        if rewards.nrows() == 0 || rewards.ncols() < 2 {
            return Err(Error::InvalidArgument(
                "reward matrix needs rows and K >= 2".into(),
            ));
        }
        for row in rewards.rows() {
            if row.sum().abs() > 1e-9 {
                return Err(Error::InvalidArgument(
                    "reward rows must sum to zero; use multiclass_normalized".into(),
                ));
            }
        }
        Ok(WeightedClassification::Multiclass { rewards })
    }

    /// Shifts each row to zero mean before validating.
    pub fn multiclass_normalized(mut rewards: Array2<f64>) -> Result<Self> {
        let k = rewards.ncols() as f64;
        for mut row in rewards.rows_mut() {
            let mean = row.sum() / k;
            row.mapv_inplace(|v| v - mean);
        }
        Self::multiclass(rewards)
    }
}

/// The edge lower bound `delta / sqrt(N)` implied by a binary weak-learner
/// guarantee of weighted error at most `(1/2 - delta/2) * sum(w)`.
pub fn adaboost_to_l2(wc: &WeightedClassification, delta: f64) -> Result<f64> {
    let WeightedClassification::Binary { weights, .. } = wc else {
        return Err(Error::InvalidArgument("binary instance required".into()));
    };
    check_delta(delta)?;
    Ok(delta / (weights.len() as f64).sqrt())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument("delta must lie in (0, 1]".into()));
    }
    Ok(())
}

/// Instance verification for the binary conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryConversionCheck {
    /// Weighted error is at most `(1/2 - delta/2) * sum(w)`.
    pub error_condition: bool,
    /// Realized edge of the classifier against the gradient `w_n y_n`.
    pub edge: f64,
    /// `delta / sqrt(N)`.
    pub implied_bound: f64,
    /// error_condition implies edge >= implied_bound.
    pub forward_ok: bool,
    /// edge >= gamma implies correct-weight sum >= (1/2 + gamma/2) sum(w),
    /// evaluated at gamma = edge.
    pub backward_ok: bool,
}

/// Checks both conversion directions on a concrete classifier with outputs
/// in {-1, +1}, under the uniform empirical measure.
pub fn adaboost_check(
    wc: &WeightedClassification,
    outputs: &[f64],
    delta: f64,
) -> Result<BinaryConversionCheck> {
    let WeightedClassification::Binary { weights, labels } = wc else {
        return Err(Error::InvalidArgument("binary instance required".into()));
    };
    check_delta(delta)?;
    if outputs.len() != weights.len() {
        return Err(Error::InvalidArgument(
            "classifier output length mismatch".into(),
        ));
    }
    if outputs.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidArgument(
            "classifier outputs must be ±1".into(),
        ));
    }
    let n = weights.len() as f64;
    let total: f64 = weights.iter().sum();
    let correct: f64 = weights
        .iter()
        .zip(labels)
        .zip(outputs)
        .filter(|((_, y), h)| **y == **h)
        .map(|((w, _), _)| *w)
        .sum();
    let error = total - correct;
    let error_condition = error <= (0.5 - delta / 2.0) * total + 1e-12;

    // gradient of the weighted classification reduction: t_n = w_n y_n;
    // sign-valued classifiers have unit norm under the uniform measure
    let t_sq: f64 = weights.iter().map(|w| w * w).sum();
    if !(t_sq > 0.0) {
        return Err(Error::ZeroGradient);
    }
    let t_dot_h: f64 = weights
        .iter()
        .zip(labels)
        .zip(outputs)
        .map(|((w, y), h)| w * y * h)
        .sum();
    let edge = (t_dot_h / n) / (t_sq / n).sqrt();

    let implied_bound = delta / n.sqrt();
    let forward_ok = !error_condition || edge >= implied_bound - 1e-12;
    let backward_ok = edge <= 0.0 || correct >= (0.5 + edge / 2.0) * total - 1e-12;
    Ok(BinaryConversionCheck {
        error_condition,
        edge,
        implied_bound,
        forward_ok,
        backward_ok,
    })
}

/// Converse of the binary conversion on a space-bound pair: with weights
/// `|target(x_n)|` and labels `sgn target(x_n)`, a hypothesis with realized
/// edge at least `gamma` collects at least `(1/2 + gamma/2)` of the total
/// weight on correct points. Returns the margin by which that holds.
pub fn l2_to_adaboost(target: &FnVec, h: &Hypothesis, gamma: f64) -> Result<f64> {
    let space = target.space();
    if space.output_dim() != 1 {
        return Err(Error::InvalidArgument(
            "single-output targets required".into(),
        ));
    }
    let n = space.len() as f64;
    if space.weights().iter().any(|&p| (p - 1.0 / n).abs() > 1e-12) {
        return Err(Error::Unsupported(
            "conversion assumes the uniform empirical measure".into(),
        ));
    }
    if h.values().values().iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidArgument(
            "hypothesis outputs must be ±1".into(),
        ));
    }
    let mut total = 0.0;
    let mut correct = 0.0;
    for (t, out) in target
        .values()
        .column(0)
        .iter()
        .zip(h.values().values().column(0))
    {
        let w = t.abs();
        total += w;
        if t.signum() == *out {
            correct += w;
        }
    }
    Ok(correct - (0.5 + gamma / 2.0) * total)
}

/// Encoded prediction matrix for a multiclass classifier: row n carries +1
/// at the (1-based) predicted class and -1/(K-1) elsewhere.
pub fn encode_predictions(predictions: &[usize], num_classes: usize) -> Array2<f64> {
    let mut out = Array2::zeros((predictions.len(), num_classes));
    for (mut row, &class) in out.rows_mut().into_iter().zip(predictions) {
        row.assign(&crate::learners::encode_class(class, num_classes));
    }
    out
}

/// Instance verification for the multiclass conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct MulticlassConversionCheck {
    /// Baseline-reward condition
    /// `sum_n w_{n h(x_n)} >= (1/K - delta/K) sum_{n,k} w_{nk} + delta sum_n w_{n y_n}`
    /// with `y_n` the row argmax.
    pub reward_condition: bool,
    /// Realized edge of the encoded hypothesis against the reward gradient.
    pub edge: f64,
    /// `delta / sqrt(N)`.
    pub implied_bound: f64,
    /// reward_condition implies edge >= implied_bound.
    pub forward_ok: bool,
    /// edge >= delta implies the reward condition at delta.
    pub backward_ok: bool,
}

/// Checks both directions of the multiclass conversion on one instance:
/// zero-mean rewards, an encoded hypothesis, and a claimed delta.
pub fn multiclass_requirement_check(
    wc: &WeightedClassification,
    encoded: ArrayView2<f64>,
    delta: f64,
) -> Result<MulticlassConversionCheck> {
    let WeightedClassification::Multiclass { rewards } = wc else {
        return Err(Error::InvalidArgument(
            "multiclass instance required".into(),
        ));
    };
    check_delta(delta)?;
    let (n, k) = (rewards.nrows(), rewards.ncols());
    if encoded.nrows() != n || encoded.ncols() != k {
        return Err(Error::InvalidArgument(
            "encoded hypothesis shape mismatch".into(),
        ));
    }
    for row in encoded.rows() {
        if row.sum().abs() > 1e-9 {
            return Err(Error::InvalidArgument(
                "encoded hypothesis rows must sum to zero".into(),
            ));
        }
    }

    let mut sum_pred = 0.0; // sum_n w_{n h(x_n)}
    let mut sum_best = 0.0; // sum_n w_{n y_n}, y_n the row argmax
    let mut sum_all = 0.0;
    let mut inner = 0.0;
    let mut rew_sq = 0.0;
    let mut enc_sq = 0.0;
    for (rew, enc) in rewards.rows().into_iter().zip(encoded.rows()) {
        let mut predicted = 0;
        let mut best_class = 0;
        for c in 1..k {
            if enc[c] > enc[predicted] {
                predicted = c;
            }
            if rew[c] > rew[best_class] {
                best_class = c;
            }
        }
        sum_pred += rew[predicted];
        sum_best += rew[best_class];
        sum_all += rew.sum();
        inner += rew.dot(&enc);
        rew_sq += rew.dot(&rew);
        enc_sq += enc.dot(&enc);
    }
    if !(rew_sq > 0.0) {
        return Err(Error::ZeroGradient);
    }

    let kf = k as f64;
    let reward_condition = sum_pred >= (1.0 / kf - delta / kf) * sum_all + delta * sum_best - 1e-12;
    let edge = inner / (rew_sq.sqrt() * enc_sq.sqrt());
    let implied_bound = delta / (n as f64).sqrt();
    let forward_ok = !reward_condition || edge >= implied_bound - 1e-12;
    let backward_ok = !(edge >= delta) || reward_condition;
    Ok(MulticlassConversionCheck {
        reward_condition,
        edge,
        implied_bound,
        forward_ok,
        backward_ok,
    })
}
