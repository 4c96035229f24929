//! Weak-learner restriction sets: fit a hypothesis to a target function
//! vector either by maximizing the normalized inner product or by
//! minimizing the distance to the target.

use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::fspace::{FnVec, SampleSpace};
use crate::{Error, Result};

/// Which projection a fit optimizes.
///
/// Distance minimization is only offered by classes closed under scalar
/// multiplication (or with closed-form leaf values); for sign-valued stumps
/// the inner-product projection is used and the descent coefficient supplies
/// the scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMode {
    InnerProductMax,
    NormMin,
}

/// Serializable description of a hypothesis.
///
/// Thresholds may be the infinite sentinels (constant stumps), which JSON
/// cannot carry as numbers; they are encoded as the strings "inf"/"-inf".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypothesisForm {
    RegressionStump {
        feature: usize,
        #[serde(with = "threshold_repr")]
        threshold: f64,
        left: Vec<f64>,
        right: Vec<f64>,
    },
    BinaryStump {
        feature: usize,
        #[serde(with = "threshold_repr")]
        threshold: f64,
        left: f64,
        right: f64,
    },
    MulticlassStump {
        feature: usize,
        #[serde(with = "threshold_repr")]
        threshold: f64,
        /// 1-based predicted class on each side.
        left: usize,
        right: usize,
        classes: usize,
    },
    Constant {
        value: Vec<f64>,
    },
    /// Member of an explicit finite class, referenced by list index; not
    /// evaluable outside its training space.
    Enumerated {
        index: usize,
    },
}

mod threshold_repr {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            v.serialize(s)
        } else if *v > 0.0 {
            "inf".serialize(s)
        } else {
            "-inf".serialize(s)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Named(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Named(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("bad threshold {other:?}"))),
            },
        }
    }
}

impl HypothesisForm {
    /// Output dimension, when the form determines one.
    pub fn output_dim(&self) -> Option<usize> {
        match self {
            HypothesisForm::RegressionStump { left, .. } => Some(left.len()),
            HypothesisForm::BinaryStump { .. } => Some(1),
            HypothesisForm::MulticlassStump { classes, .. } => Some(*classes),
            HypothesisForm::Constant { value } => Some(value.len()),
            HypothesisForm::Enumerated { .. } => None,
        }
    }

    /// Evaluates the hypothesis on one feature row.
    pub fn evaluate(&self, row: ArrayView1<f64>) -> Result<Array1<f64>> {
        match self {
            HypothesisForm::RegressionStump {
                feature,
                threshold,
                left,
                right,
            } => {
                let side = if row[*feature] > *threshold {
                    right
                } else {
                    left
                };
                Ok(Array1::from_vec(side.clone()))
            }
            HypothesisForm::BinaryStump {
                feature,
                threshold,
                left,
                right,
            } => {
                let v = if row[*feature] > *threshold {
                    *right
                } else {
                    *left
                };
                Ok(Array1::from_vec(vec![v]))
            }
            HypothesisForm::MulticlassStump {
                feature,
                threshold,
                left,
                right,
                classes,
            } => {
                let class = if row[*feature] > *threshold {
                    *right
                } else {
                    *left
                };
                Ok(encode_class(class, *classes))
            }
            HypothesisForm::Constant { value } => Ok(Array1::from_vec(value.clone())),
            HypothesisForm::Enumerated { .. } => Err(Error::Unsupported(
                "enumerated hypotheses are not evaluable outside their training space".into(),
            )),
        }
    }
}

/// Encoded multiclass prediction: +1 at the (1-based) predicted class and
/// -1/(K-1) elsewhere, so every member has per-point squared norm K/(K-1).
pub fn encode_class(class: usize, num_classes: usize) -> Array1<f64> {
    let mut v = Array1::from_elem(num_classes, -1.0 / (num_classes as f64 - 1.0));
    v[class - 1] = 1.0;
    v
}

/// An evaluable weak hypothesis with its values cached on the training
/// space. Every hypothesis returned by a fit has positive norm.
#[derive(Debug, Clone)]
pub struct Hypothesis {
    form: HypothesisForm,
    values: FnVec,
    norm_sq: f64,
    norm: f64,
}

impl Hypothesis {
    /// Binds a form to a space by evaluating it on every sample point.
    pub fn from_form(form: HypothesisForm, space: &Arc<SampleSpace>) -> Result<Self> {
        let k = space.output_dim();
        if let Some(dim) = form.output_dim() {
            if dim != k {
                return Err(Error::InvalidArgument(format!(
                    "hypothesis output dimension {dim} does not match space dimension {k}"
                )));
            }
        }
        let mut values = Array2::zeros((space.len(), k));
        for (i, mut row) in values.rows_mut().into_iter().enumerate() {
            row.assign(&form.evaluate(space.feature_row(i))?);
        }
        let values = FnVec::new(space, values)?;
        Self::with_values(form, values)
    }

    /// Wraps an explicit member of an enumerated class.
    pub fn enumerated(index: usize, values: FnVec) -> Result<Self> {
        Self::with_values(HypothesisForm::Enumerated { index }, values)
    }

    fn with_values(form: HypothesisForm, values: FnVec) -> Result<Self> {
        let norm_sq = values.inner(&values).expect("self binding");
        if !(norm_sq > 0.0) {
            return Err(Error::DegenerateHypothesis);
        }
        Ok(Hypothesis {
            form,
            values,
            norm_sq,
            norm: norm_sq.sqrt(),
        })
    }

    pub fn form(&self) -> &HypothesisForm {
        &self.form
    }

    /// Values on the training space.
    pub fn values(&self) -> &FnVec {
        &self.values
    }

    /// Norm under the training distribution.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Squared norm, computed directly from the inner product.
    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn evaluate(&self, row: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.form.evaluate(row)
    }
}

/// A weak learner: fits a hypothesis from its class to a target vector.
pub trait RestrictionSet: Send + Sync {
    fn fit(&self, target: &FnVec, mode: ProjectionMode) -> Result<Hypothesis>;
    fn describe(&self) -> String;
}

fn require_nonzero(target: &FnVec) -> Result<()> {
    if !(target.norm() > 0.0) {
        return Err(Error::ZeroGradient);
    }
    Ok(())
}

/// Candidate split positions for one feature: indices sorted ascending by
/// value, and `(left_count, threshold)` pairs covering the empty split, all
/// midpoints between distinct consecutive values, and the all-left split.
fn split_candidates(space: &SampleSpace, feature: usize) -> (Vec<usize>, Vec<(usize, f64)>) {
    let n = space.len();
    let column = space.features().column(feature).to_owned();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| column[a].partial_cmp(&column[b]).expect("finite features"));
    let mut candidates = vec![(0, f64::NEG_INFINITY)];
    for pos in 1..n {
        let prev = column[order[pos - 1]];
        let next = column[order[pos]];
        if next > prev {
            candidates.push((pos, 0.5 * (prev + next)));
        }
    }
    candidates.push((n, f64::INFINITY));
    (order, candidates)
}

/// Axis-aligned regression stumps with free leaf values in R^k.
///
/// The leaf values of the best split are the weighted target means of each
/// region, which makes the distance-minimizing and inner-product fits agree;
/// both modes are accepted.
pub fn fit_regression_stump(target: &FnVec) -> Result<Hypothesis> {
    struct Split {
        score: f64,
        feature: usize,
        threshold: f64,
        left: Array1<f64>,
        right: Array1<f64>,
    }

    require_nonzero(target)?;
    let space = target.space();
    let (n, d, k) = (space.len(), space.num_features(), space.output_dim());
    let weights = space.weights();
    let values = target.values();

    let mut best: Option<Split> = None;
    for feature in 0..d {
        let (order, candidates) = split_candidates(space, feature);
        let mut w_left = 0.0;
        let mut s_left = Array1::<f64>::zeros(k);
        let mut w_total = 0.0;
        let mut s_total = Array1::<f64>::zeros(k);
        for i in 0..n {
            w_total += weights[i];
            s_total += &(weights[i] * &values.row(i));
        }
        let mut consumed = 0;
        for &(left_count, threshold) in &candidates {
            while consumed < left_count {
                let i = order[consumed];
                w_left += weights[i];
                s_left += &(weights[i] * &values.row(i));
                consumed += 1;
            }
            let w_right = w_total - w_left;
            let s_right = &s_total - &s_left;
            let mut score = 0.0;
            if w_left > 0.0 {
                score += s_left.dot(&s_left) / w_left;
            }
            if w_right > 0.0 {
                score += s_right.dot(&s_right) / w_right;
            }
            if best.as_ref().is_none_or(|b| score > b.score) {
                let left = if w_left > 0.0 {
                    &s_left / w_left
                } else {
                    Array1::zeros(k)
                };
                let right = if w_right > 0.0 {
                    &s_right / w_right
                } else {
                    Array1::zeros(k)
                };
                best = Some(Split {
                    score,
                    feature,
                    threshold,
                    left,
                    right,
                });
            }
        }
    }

    let Split {
        feature,
        threshold,
        left,
        right,
        ..
    } = best.expect("at least one candidate per feature");
    let form = HypothesisForm::RegressionStump {
        feature,
        threshold,
        left: left.to_vec(),
        right: right.to_vec(),
    };
    match Hypothesis::from_form(form, space) {
        Err(Error::DegenerateHypothesis) => Err(Error::ZeroProjection),
        other => other,
    }
}

/// Sign-valued stumps for single-output targets: value `s` on the right of
/// the threshold and `-s` on the left, maximizing the inner product with
/// the target. All members have unit norm, so this also maximizes the
/// normalized projection.
pub fn fit_binary_stump(target: &FnVec) -> Result<Hypothesis> {
    require_nonzero(target)?;
    let space = target.space();
    if space.output_dim() != 1 {
        return Err(Error::InvalidArgument(
            "binary stumps require output dimension 1".into(),
        ));
    }
    let weights = space.weights();
    let values = target.values();

    let mut s_total = 0.0;
    for i in 0..space.len() {
        s_total += weights[i] * values[[i, 0]];
    }

    let mut best: Option<(f64, usize, f64, f64)> = None;
    for feature in 0..space.num_features() {
        let (order, candidates) = split_candidates(space, feature);
        let mut s_left = 0.0;
        let mut consumed = 0;
        for &(left_count, threshold) in &candidates {
            while consumed < left_count {
                let i = order[consumed];
                s_left += weights[i] * values[[i, 0]];
                consumed += 1;
            }
            let diff = s_total - 2.0 * s_left; // <target, h> for s = +1
                                               // orientation order: +1 before -1, strict improvement keeps first
            for sign in [1.0, -1.0] {
                let score = sign * diff;
                if best.as_ref().is_none_or(|(s, ..)| score > *s) {
                    best = Some((score, feature, threshold, sign));
                }
            }
        }
    }

    let (_, feature, threshold, sign) = best.expect("candidates exist");
    let form = HypothesisForm::BinaryStump {
        feature,
        threshold,
        left: -sign,
        right: sign,
    };
    Hypothesis::from_form(form, space)
}

/// Multiclass stumps: a class prediction per region, emitted in encoded form
/// (+1 at the predicted class, -1/(K-1) elsewhere). All members share norm
/// sqrt(K/(K-1)), so maximizing the inner product maximizes the normalized
/// projection.
pub fn fit_multiclass_stump(target: &FnVec) -> Result<Hypothesis> {
    require_nonzero(target)?;
    let space = target.space();
    let k = space.output_dim();
    if k < 2 {
        return Err(Error::InvalidArgument(
            "multiclass stumps require output dimension >= 2".into(),
        ));
    }
    let weights = space.weights();
    let values = target.values();
    let n = space.len();

    // <target, enc(c)> over a region = (K/(K-1)) T_c - R/(K-1) where T_c is
    // the weighted class-c sum and R the weighted all-class sum.
    let scale = k as f64 / (k as f64 - 1.0);
    let region_score = |t: &Array1<f64>, r: f64| -> (f64, usize) {
        let mut best_c = 0;
        for c in 1..k {
            if t[c] > t[best_c] {
                best_c = c;
            }
        }
        (scale * t[best_c] - r / (k as f64 - 1.0), best_c + 1)
    };

    let mut t_total = Array1::<f64>::zeros(k);
    let mut r_total = 0.0;
    for i in 0..n {
        t_total += &(weights[i] * &values.row(i));
        r_total += weights[i] * values.row(i).sum();
    }

    let mut best: Option<(f64, usize, f64, usize, usize)> = None;
    for feature in 0..space.num_features() {
        let (order, candidates) = split_candidates(space, feature);
        let mut t_left = Array1::<f64>::zeros(k);
        let mut r_left = 0.0;
        let mut consumed = 0;
        for &(left_count, threshold) in &candidates {
            while consumed < left_count {
                let i = order[consumed];
                t_left += &(weights[i] * &values.row(i));
                r_left += weights[i] * values.row(i).sum();
                consumed += 1;
            }
            let t_right = &t_total - &t_left;
            let r_right = r_total - r_left;
            let (score_l, class_l) = region_score(&t_left, r_left);
            let (score_r, class_r) = region_score(&t_right, r_right);
            let score = score_l + score_r;
            if best.as_ref().is_none_or(|(s, ..)| score > *s) {
                best = Some((score, feature, threshold, class_l, class_r));
            }
        }
    }

    let (_, feature, threshold, left, right) = best.expect("candidates exist");
    let form = HypothesisForm::MulticlassStump {
        feature,
        threshold,
        left,
        right,
        classes: k,
    };
    Hypothesis::from_form(form, space)
}

/// The distance-minimizing constant: h(x) = c with c the weighted target
/// mean. Errors with a zero-projection when the mean cancels exactly so
/// callers can fall back.
pub fn fit_constant(target: &FnVec) -> Result<Hypothesis> {
    require_nonzero(target)?;
    let space = target.space();
    let k = space.output_dim();
    let mut mean = Array1::<f64>::zeros(k);
    for (w, row) in space.weights().iter().zip(target.values().rows()) {
        mean += &(*w * &row);
    }
    if mean.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroProjection);
    }
    let form = HypothesisForm::Constant {
        value: mean.to_vec(),
    };
    Hypothesis::from_form(form, space)
}

/// Exact fit over an explicit finite class; ties go to the lowest index.
pub fn fit_enumerated(
    target: &FnVec,
    members: &[Hypothesis],
    mode: ProjectionMode,
) -> Result<Hypothesis> {
    require_nonzero(target)?;
    if members.is_empty() {
        return Err(Error::InvalidArgument("empty hypothesis class".into()));
    }
    let mut best: Option<(f64, usize)> = None;
    for (index, h) in members.iter().enumerate() {
        let score = match mode {
            ProjectionMode::InnerProductMax => target.inner(h.values())? / h.norm(),
            ProjectionMode::NormMin => {
                let diff = crate::fspace::combine(1.0, target, -1.0, h.values())?;
                -diff.inner(&diff)?
            }
        };
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, index));
        }
    }
    let (_, index) = best.expect("non-empty class");
    Ok(members[index].clone())
}

/// Regression stumps as a restriction set.
#[derive(Debug, Default, Clone, Copy)]
pub struct RegressionStumps;

impl RestrictionSet for RegressionStumps {
    fn fit(&self, target: &FnVec, _mode: ProjectionMode) -> Result<Hypothesis> {
        fit_regression_stump(target)
    }

    fn describe(&self) -> String {
        "regression stumps".into()
    }
}

/// Sign-valued stumps as a restriction set.
#[derive(Debug, Default, Clone, Copy)]
pub struct BinaryStumps;

impl RestrictionSet for BinaryStumps {
    fn fit(&self, target: &FnVec, mode: ProjectionMode) -> Result<Hypothesis> {
        if mode == ProjectionMode::NormMin {
            return Err(Error::Unsupported(
                "sign-valued stumps are not closed under scaling; use the inner-product projection"
                    .into(),
            ));
        }
        fit_binary_stump(target)
    }

    fn describe(&self) -> String {
        "sign stumps".into()
    }
}

/// Encoded multiclass stumps as a restriction set.
#[derive(Debug, Default, Clone, Copy)]
pub struct MulticlassStumps;

impl RestrictionSet for MulticlassStumps {
    fn fit(&self, target: &FnVec, mode: ProjectionMode) -> Result<Hypothesis> {
        if mode == ProjectionMode::NormMin {
            return Err(Error::Unsupported(
                "encoded stumps are not closed under scaling; use the inner-product projection"
                    .into(),
            ));
        }
        fit_multiclass_stump(target)
    }

    fn describe(&self) -> String {
        "multiclass stumps".into()
    }
}

/// Constant functions as a restriction set.
#[derive(Debug, Default, Clone, Copy)]
pub struct ConstantLearner;

impl RestrictionSet for ConstantLearner {
    fn fit(&self, target: &FnVec, _mode: ProjectionMode) -> Result<Hypothesis> {
        fit_constant(target)
    }

    fn describe(&self) -> String {
        "constants".into()
    }
}

/// An explicit finite class.
#[derive(Debug, Clone)]
pub struct EnumeratedClass {
    members: Vec<Hypothesis>,
}

impl EnumeratedClass {
    pub fn new(members: Vec<Hypothesis>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("empty hypothesis class".into()));
        }
        let token = members[0].values().space().token();
        if members.iter().any(|h| h.values().space().token() != token) {
            return Err(Error::SpaceMismatch);
        }
        Ok(EnumeratedClass { members })
    }

    /// Builds a class from raw member vectors, indexed by position.
    pub fn from_fnvecs(vectors: Vec<FnVec>) -> Result<Self> {
        let members = vectors
            .into_iter()
            .enumerate()
            .map(|(i, v)| Hypothesis::enumerated(i, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members)
    }

    pub fn members(&self) -> &[Hypothesis] {
        &self.members
    }

    /// Concatenation with another class, re-indexing the members.
    pub fn union(&self, other: &EnumeratedClass) -> Result<Self> {
        let vectors = self
            .members
            .iter()
            .chain(other.members.iter())
            .map(|h| h.values().clone())
            .collect();
        Self::from_fnvecs(vectors)
    }
}

impl RestrictionSet for EnumeratedClass {
    fn fit(&self, target: &FnVec, mode: ProjectionMode) -> Result<Hypothesis> {
        fit_enumerated(target, &self.members, mode)
    }

    fn describe(&self) -> String {
        format!("enumerated class ({} members)", self.members.len())
    }
}
