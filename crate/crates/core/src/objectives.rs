//! Convex loss functionals over [`FnVec`] with subgradient oracles.
//!
//! Values follow the empirical convention: a pointwise loss `l` enters the
//! objective as `sum_n p_n l(f(x_n), y_n)`, and the per-point subgradient
//! selection lands directly in the returned function vector — the sample
//! weights live in the inner product, not in the gradient. Functionals that
//! are not of that pointwise form (the two-point absolute objective, the
//! pairwise ranking hinge) return the representer of their derivative under
//! the weighted inner product, i.e. the per-point derivative divided by p_n,
//! so the subgradient inequality holds verbatim with [`FnVec::inner`].

use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1};

use crate::fspace::{combine, FnVec, SampleSpace};
use crate::{Error, Result};

/// Contract for a convex empirical objective.
///
/// `subgradient` must return a deterministic selection from the
/// subdifferential: for all probes `f'`,
/// `value(f') >= value(f) + inner(subgradient(f), f' - f)`.
pub trait Objective: Send + Sync {
    /// The space every argument must be bound to.
    fn space(&self) -> &Arc<SampleSpace>;

    fn value(&self, f: &FnVec) -> Result<f64>;

    fn subgradient(&self, f: &FnVec) -> Result<FnVec>;

    /// Strong-convexity modulus λ in the space inner product; 0 means merely
    /// convex.
    fn strong_convexity(&self) -> f64 {
        0.0
    }

    /// Strong-smoothness modulus Λ, when one exists.
    fn strong_smoothness(&self) -> Option<f64> {
        None
    }

    /// A priori bound G on subgradient norms, when one exists.
    fn grad_bound(&self) -> Option<f64> {
        None
    }

    /// Per-point loss for pointwise-separable objectives, so that
    /// `value(f) = sum_n p_n * pointwise_loss(n, f(x_n))`. Returns `None`
    /// for non-separable objectives.
    fn pointwise_loss(&self, index: usize, output: ArrayView1<f64>) -> Option<f64> {
        let _ = (index, output);
        None
    }

    /// Half-width of the box searched by [`pointwise_optimum`], derived from
    /// the label range plus a margin of 2.
    fn search_bound(&self) -> f64 {
        3.0
    }

    fn name(&self) -> String;
}

fn check_bound(space: &Arc<SampleSpace>, f: &FnVec) -> Result<()> {
    if space.token() != f.space().token() {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// Per-point targets for an objective.
#[derive(Debug, Clone)]
pub enum Labels {
    /// Regression targets in R^k, one row per point.
    Real(Array2<f64>),
    /// 1-based class indices in `1..=num_classes`.
    Class {
        classes: Vec<usize>,
        num_classes: usize,
    },
    /// Binary labels, each -1 or +1.
    Binary(Vec<f64>),
}

/// Labels plus optional query-group ids for ranking data.
#[derive(Debug, Clone)]
pub struct LabeledData {
    pub labels: Labels,
    pub groups: Option<Vec<u64>>,
}

impl LabeledData {
    pub fn validate(&self, space: &SampleSpace) -> Result<()> {
        let n = space.len();
        let count = match &self.labels {
            Labels::Real(t) => {
                if t.ncols() != space.output_dim() {
                    return Err(Error::InvalidArgument(format!(
                        "targets have {} columns but space output dimension is {}",
                        t.ncols(),
                        space.output_dim()
                    )));
                }
                t.nrows()
            }
            Labels::Class {
                classes,
                num_classes,
            } => {
                if *num_classes != space.output_dim() {
                    return Err(Error::InvalidArgument(format!(
                        "{num_classes} classes but space output dimension is {}",
                        space.output_dim()
                    )));
                }
                if let Some(bad) = classes.iter().find(|&&c| c == 0 || c > *num_classes) {
                    return Err(Error::InvalidArgument(format!(
                        "class index {bad} outside 1..={num_classes}"
                    )));
                }
                classes.len()
            }
            Labels::Binary(labels) => {
                if space.output_dim() != 1 {
                    return Err(Error::InvalidArgument(
                        "binary labels require output dimension 1".into(),
                    ));
                }
                if let Some(bad) = labels.iter().find(|&&y| y != 1.0 && y != -1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "binary label {bad} is not ±1"
                    )));
                }
                labels.len()
            }
        };
        if count != n {
            return Err(Error::InvalidArgument(format!(
                "{count} labels for {n} points"
            )));
        }
        if let Some(groups) = &self.groups {
            if groups.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "{} group ids for {n} points",
                    groups.len()
                )));
            }
        }
        Ok(())
    }
}

/// A reference optimum used when checking convergence bounds.
#[derive(Debug, Clone)]
pub struct OptimalReference {
    pub f_star: FnVec,
    pub value_star: f64,
    pub method: String,
}

// ---------------------------------------------------------------------------
// Squared loss
// ---------------------------------------------------------------------------

/// `l(v, y) = 0.5 ||v - y||^2`; 1-strongly convex and 1-strongly smooth in
/// the weighted geometry.
pub struct SquaredLoss {
    space: Arc<SampleSpace>,
    targets: Array2<f64>,
}

impl SquaredLoss {
    pub fn new(space: &Arc<SampleSpace>, targets: Array2<f64>) -> Result<Self> {
        if targets.nrows() != space.len() || targets.ncols() != space.output_dim() {
            return Err(Error::InvalidArgument(
                "target matrix shape mismatch".into(),
            ));
        }
        if targets.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("targets must be finite".into()));
        }
        Ok(SquaredLoss {
            space: Arc::clone(space),
            targets,
        })
    }
}

impl Objective for SquaredLoss {
    fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    fn value(&self, f: &FnVec) -> Result<f64> {
        check_bound(&self.space, f)?;
        let mut acc = 0.0;
        for ((w, fv), y) in self
            .space
            .weights()
            .iter()
            .zip(f.values().rows())
            .zip(self.targets.rows())
        {
            let mut sq = 0.0;
            for (a, b) in fv.iter().zip(y.iter()) {
                let d = a - b;
                sq += d * d;
            }
            acc += w * 0.5 * sq;
        }
        Ok(acc)
    }

    fn subgradient(&self, f: &FnVec) -> Result<FnVec> {
        check_bound(&self.space, f)?;
        FnVec::new(&self.space, f.values().to_owned() - &self.targets)
    }

    fn strong_convexity(&self) -> f64 {
        1.0
    }

    fn strong_smoothness(&self) -> Option<f64> {
        Some(1.0)
    }

    fn pointwise_loss(&self, index: usize, output: ArrayView1<f64>) -> Option<f64> {
        let y = self.targets.row(index);
        let mut sq = 0.0;
        for (a, b) in output.iter().zip(y.iter()) {
            let d = a - b;
            sq += d * d;
        }
        Some(0.5 * sq)
    }

    fn search_bound(&self) -> f64 {
        self.targets.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 2.0
    }

    fn name(&self) -> String {
        "squared".into()
    }
}

// ---------------------------------------------------------------------------
// Exponential loss
// ---------------------------------------------------------------------------

/// Binary margin loss `exp(-y f(x))` with labels in {-1, +1}.
pub struct ExponentialLoss {
    space: Arc<SampleSpace>,
    labels: Vec<f64>,
}

impl ExponentialLoss {
    pub fn new(space: &Arc<SampleSpace>, labels: Vec<f64>) -> Result<Self> {
        LabeledData {
            labels: Labels::Binary(labels.clone()),
            groups: None,
        }
        .validate(space)?;
        Ok(ExponentialLoss {
            space: Arc::clone(space),
            labels,
        })
    }
}

impl Objective for ExponentialLoss {
    fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    fn value(&self, f: &FnVec) -> Result<f64> {
        check_bound(&self.space, f)?;
        let mut acc = 0.0;
        for ((w, fv), y) in self
            .space
            .weights()
            .iter()
            .zip(f.values().rows())
            .zip(&self.labels)
        {
            acc += w * (-y * fv[0]).exp();
        }
        Ok(acc)
    }

    fn subgradient(&self, f: &FnVec) -> Result<FnVec> {
        check_bound(&self.space, f)?;
        let mut grad = Array2::zeros((self.space.len(), 1));
        for (i, (fv, y)) in f.values().rows().into_iter().zip(&self.labels).enumerate() {
            grad[[i, 0]] = -y * (-y * fv[0]).exp();
        }
        FnVec::new(&self.space, grad)
    }

    fn pointwise_loss(&self, index: usize, output: ArrayView1<f64>) -> Option<f64> {
        Some((-self.labels[index] * output[0]).exp())
    }

    fn name(&self) -> String {
        "exponential".into()
    }
}

// ---------------------------------------------------------------------------
// Binary hinge
// ---------------------------------------------------------------------------

/// `l(v, y) = max(0, 1 - y v)` with labels in {-1, +1}. At the kink
/// (margin exactly 1) the selection is 0.
pub struct BinaryHinge {
    space: Arc<SampleSpace>,
    labels: Vec<f64>,
}

impl BinaryHinge {
    pub fn new(space: &Arc<SampleSpace>, labels: Vec<f64>) -> Result<Self> {
        LabeledData {
            labels: Labels::Binary(labels.clone()),
            groups: None,
        }
        .validate(space)?;
        Ok(BinaryHinge {
            space: Arc::clone(space),
            labels,
        })
    }
}

impl Objective for BinaryHinge {
    fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    fn value(&self, f: &FnVec) -> Result<f64> {
        check_bound(&self.space, f)?;
        let mut acc = 0.0;
        for ((w, fv), y) in self
            .space
            .weights()
            .iter()
            .zip(f.values().rows())
            .zip(&self.labels)
        {
            acc += w * (1.0 - y * fv[0]).max(0.0);
        }
        Ok(acc)
    }

    fn subgradient(&self, f: &FnVec) -> Result<FnVec> {
        check_bound(&self.space, f)?;
        let mut grad = Array2::zeros((self.space.len(), 1));
        for (i, (fv, y)) in f.values().rows().into_iter().zip(&self.labels).enumerate() {
            if y * fv[0] < 1.0 {
                grad[[i, 0]] = -y;
            }
        }
        FnVec::new(&self.space, grad)
    }

    fn grad_bound(&self) -> Option<f64> {
        Some(1.0)
    }

    fn pointwise_loss(&self, index: usize, output: ArrayView1<f64>) -> Option<f64> {
        Some((1.0 - self.labels[index] * output[0]).max(0.0))
    }

    fn name(&self) -> String {
        "hinge".into()
    }
}

// ---------------------------------------------------------------------------
// Multiclass hinge (single-max form)
// ---------------------------------------------------------------------------

/// `l(v, y) = max(0, max_{k != y} (1 + v_k - v_y))` over K outputs.
///
/// The subgradient selection at a violating point is `e_{k*} - e_y` with the
/// violating class `k*` chosen as the lowest index among the maximizers; at
/// the kink (margin exactly 0) the selection is 0.
pub struct MulticlassHinge {
    space: Arc<SampleSpace>,
    classes: Vec<usize>, // 0-based internally
}

impl MulticlassHinge {
    /// `classes` are 1-based indices in `1..=space.output_dim()`.
    pub fn new(space: &Arc<SampleSpace>, classes: Vec<usize>) -> Result<Self> {
        if space.output_dim() < 2 {
            return Err(Error::InvalidArgument(
                "multiclass hinge needs output dimension >= 2".into(),
            ));
        }
        LabeledData {
            labels: Labels::Class {
                classes: classes.clone(),
                num_classes: space.output_dim(),
            },
            groups: None,
        }
        .validate(space)?;
        let classes = classes.into_iter().map(|c| c - 1).collect();
        Ok(MulticlassHinge {
            space: Arc::clone(space),
            classes,
        })
    }

    fn margin(&self, index: usize, output: ArrayView1<f64>) -> (f64, usize) {
        let y = self.classes[index];
        let mut best = f64::NEG_INFINITY;
        let mut best_k = usize::MAX;
        for (k, &v) in output.iter().enumerate() {
            if k != y && v > best {
                best = v;
                best_k = k;
            }
        }
        (1.0 + best - output[y], best_k)
    }
}

impl Objective for MulticlassHinge {
    fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    fn value(&self, f: &FnVec) -> Result<f64> {
        check_bound(&self.space, f)?;
        let mut acc = 0.0;
        for (i, (w, fv)) in self
            .space
            .weights()
            .iter()
            .zip(f.values().rows())
            .enumerate()
        {
            acc += w * self.margin(i, fv).0.max(0.0);
        }
        Ok(acc)
    }

    fn subgradient(&self, f: &FnVec) -> Result<FnVec> {
        check_bound(&self.space, f)?;
        let k = self.space.output_dim();
        let mut grad = Array2::zeros((self.space.len(), k));
        for (i, fv) in f.values().rows().into_iter().enumerate() {
            let (margin, violator) = self.margin(i, fv);
            if margin > 0.0 {
                grad[[i, violator]] = 1.0;
                grad[[i, self.classes[i]]] = -1.0;
            }
        }
        FnVec::new(&self.space, grad)
    }

    fn grad_bound(&self) -> Option<f64> {
        Some(2f64.sqrt())
    }

    fn pointwise_loss(&self, index: usize, output: ArrayView1<f64>) -> Option<f64> {
        Some(self.margin(index, output).0.max(0.0))
    }

    fn name(&self) -> String {
        "multiclass_hinge".into()
    }
}

// ---------------------------------------------------------------------------
// Pairwise ranking hinge
// ---------------------------------------------------------------------------

/// Mean over in-group preference pairs of `max(0, 1 - (f(x_i) - f(x_j)))`
/// for `i` preferred over `j` (higher relevance). Normalized by the total
/// pair count so gradient norms stay O(1) across datasets.
pub struct PairwiseRankingHinge {
    space: Arc<SampleSpace>,
    pairs: Vec<(usize, usize)>, // (preferred, other)
}

impl PairwiseRankingHinge {
    pub fn new(space: &Arc<SampleSpace>, relevance: &[f64], groups: &[u64]) -> Result<Self> {
        if space.output_dim() != 1 {
            return Err(Error::InvalidArgument(
                "ranking hinge requires output dimension 1".into(),
            ));
        }
        if relevance.len() != space.len() || groups.len() != space.len() {
            return Err(Error::InvalidArgument(
                "relevance/group length mismatch".into(),
            ));
        }
        let n = space.len();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && groups[i] == groups[j] && relevance[i] > relevance[j] {
                    pairs.push((i, j));
                }
            }
        }
        if pairs.is_empty() {
            return Err(Error::InvalidArgument(
                "no preference pairs in the data".into(),
            ));
        }
        Ok(PairwiseRankingHinge {
            space: Arc::clone(space),
            pairs,
        })
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

impl Objective for PairwiseRankingHinge {
    fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    fn value(&self, f: &FnVec) -> Result<f64> {
        check_bound(&self.space, f)?;
        let v = f.values();
        let mut acc = 0.0;
        for &(i, j) in &self.pairs {
            acc += (1.0 - (v[[i, 0]] - v[[j, 0]])).max(0.0);
        }
        Ok(acc / self.pairs.len() as f64)
    }

    fn subgradient(&self, f: &FnVec) -> Result<FnVec> {
        check_bound(&self.space, f)?;
        let v = f.values();
        let m = self.pairs.len() as f64;
        // Euclidean derivative per point, then the representer under the
        // weighted inner product (divide by p_n).
        let mut grad = Array2::zeros((self.space.len(), 1));
        for &(i, j) in &self.pairs {
            if v[[i, 0]] - v[[j, 0]] < 1.0 {
                grad[[i, 0]] -= 1.0 / m;
                grad[[j, 0]] += 1.0 / m;
            }
        }
        for (mut g, w) in grad.rows_mut().into_iter().zip(self.space.weights().iter()) {
            g[0] /= w;
        }
        FnVec::new(&self.space, grad)
    }

    fn name(&self) -> String {
        "ranking_hinge".into()
    }
}

// ---------------------------------------------------------------------------
// Two-point absolute objective
// ---------------------------------------------------------------------------

/// The non-smooth functional `R[f] = 2 |f(x_1)| + |f(x_2)|` on a two-point
/// space, under which a single projection per step can leave `f(x_2)`
/// untouched forever. The subgradient is the representer of the derivative
/// under the weighted inner product: `g_n = (c_n / p_n) sgn(f(x_n))` with
/// coefficients c = (2, 1), so `g = (4 sgn f_1, 2 sgn f_2)` at uniform
/// weights.
pub struct TwoPointAbs {
    space: Arc<SampleSpace>,
    scale: [f64; 2], // c_n / p_n
}

impl TwoPointAbs {
    pub fn new(space: &Arc<SampleSpace>) -> Result<Self> {
        if space.len() != 2 || space.output_dim() != 1 {
            return Err(Error::InvalidArgument(
                "two-point objective needs exactly 2 points and output dimension 1".into(),
            ));
        }
        let scale = [2.0 / space.weight(0), 1.0 / space.weight(1)];
        Ok(TwoPointAbs {
            space: Arc::clone(space),
            scale,
        })
    }
}

impl Objective for TwoPointAbs {
    fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    fn value(&self, f: &FnVec) -> Result<f64> {
        check_bound(&self.space, f)?;
        let v = f.values();
        Ok(2.0 * v[[0, 0]].abs() + v[[1, 0]].abs())
    }

    fn subgradient(&self, f: &FnVec) -> Result<FnVec> {
        check_bound(&self.space, f)?;
        let v = f.values();
        let mut grad = Array2::zeros((2, 1));
        for i in 0..2 {
            let x = v[[i, 0]];
            if x != 0.0 {
                grad[[i, 0]] = self.scale[i] * x.signum();
            }
        }
        FnVec::new(&self.space, grad)
    }

    fn grad_bound(&self) -> Option<f64> {
        let w = self.space.weights();
        Some((w[0] * self.scale[0].powi(2) + w[1] * self.scale[1].powi(2)).sqrt())
    }

    fn pointwise_loss(&self, index: usize, output: ArrayView1<f64>) -> Option<f64> {
        Some(self.scale[index] * output[0].abs())
    }

    fn search_bound(&self) -> f64 {
        2.0
    }

    fn name(&self) -> String {
        "two_point_abs".into()
    }
}

// ---------------------------------------------------------------------------
// Regularization wrapper
// ---------------------------------------------------------------------------

/// `R'[f] = R[f] + (lam/2) ||f||^2`, which adds `lam` to the
/// strong-convexity modulus and `lam * f` to the subgradient.
pub struct Regularized {
    base: Arc<dyn Objective>,
    lam: f64,
}

pub fn regularize(base: Arc<dyn Objective>, lam: f64) -> Result<Regularized> {
    if !(lam > 0.0) || !lam.is_finite() {
        return Err(Error::InvalidArgument(
            "regularization strength must be positive".into(),
        ));
    }
    Ok(Regularized { base, lam })
}

impl Regularized {
    pub fn lam(&self) -> f64 {
        self.lam
    }
}

impl Objective for Regularized {
    fn space(&self) -> &Arc<SampleSpace> {
        self.base.space()
    }

    fn value(&self, f: &FnVec) -> Result<f64> {
        let base = self.base.value(f)?;
        let norm = f.norm();
        Ok(base + 0.5 * self.lam * norm * norm)
    }

    fn subgradient(&self, f: &FnVec) -> Result<FnVec> {
        let base = self.base.subgradient(f)?;
        combine(1.0, &base, self.lam, f)
    }

    fn strong_convexity(&self) -> f64 {
        self.base.strong_convexity() + self.lam
    }

    fn strong_smoothness(&self) -> Option<f64> {
        self.base.strong_smoothness().map(|l| l + self.lam)
    }

    fn pointwise_loss(&self, index: usize, output: ArrayView1<f64>) -> Option<f64> {
        let base = self.base.pointwise_loss(index, output)?;
        let sq: f64 = output.iter().map(|v| v * v).sum();
        Some(base + 0.5 * self.lam * sq)
    }

    fn search_bound(&self) -> f64 {
        self.base.search_bound()
    }

    fn name(&self) -> String {
        format!("{}+l2({})", self.base.name(), self.lam)
    }
}

// ---------------------------------------------------------------------------
// Reference optima
// ---------------------------------------------------------------------------

/// Per-point minimization of the separable loss by grid search over
/// `[-B, B]^k` at the given resolution, followed by a shrinking pattern
/// search down to step 1e-9.
pub fn pointwise_optimum(obj: &dyn Objective, resolution: f64) -> Result<OptimalReference> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let space = obj.space();
    let k = space.output_dim();
    let probe = Array1::zeros(k);
    if obj.pointwise_loss(0, probe.view()).is_none() {
        return Err(Error::Unsupported(
            "objective is not pointwise separable; use subgradient_oracle".into(),
        ));
    }

    let bound = obj.search_bound();
    let steps = (2.0 * bound / resolution).ceil() as usize;
    let offsets = pattern_offsets(k);

    let mut best_values = Array2::zeros((space.len(), k));
    for index in 0..space.len() {
        let loss = |v: &Array1<f64>| obj.pointwise_loss(index, v.view()).expect("separable");

        // Full grid scan, first minimum kept.
        let mut best = Array1::from_elem(k, -bound);
        let mut best_loss = f64::INFINITY;
        let mut counter = vec![0usize; k];
        loop {
            let candidate =
                Array1::from_iter(counter.iter().map(|&c| -bound + c as f64 * resolution));
            let l = loss(&candidate);
            if l < best_loss {
                best_loss = l;
                best = candidate;
            }
            // odometer increment
            let mut dim = 0;
            loop {
                if dim == k {
                    break;
                }
                counter[dim] += 1;
                if counter[dim] <= steps {
                    break;
                }
                counter[dim] = 0;
                dim += 1;
            }
            if dim == k {
                break;
            }
        }

        // Shrinking pattern search around the grid minimum.
        let mut delta = resolution;
        while delta > 1e-9 {
            let mut improved = true;
            while improved {
                improved = false;
                let mut round_best = best_loss;
                let mut round_point = None;
                for offset in &offsets {
                    let mut candidate = best.clone();
                    for (c, &o) in candidate.iter_mut().zip(offset.iter()) {
                        *c += delta * o;
                    }
                    let l = loss(&candidate);
                    if l < round_best {
                        round_best = l;
                        round_point = Some(candidate);
                    }
                }
                if let Some(point) = round_point {
                    best = point;
                    best_loss = round_best;
                    improved = true;
                }
            }
            delta *= 0.5;
        }
        best_values.row_mut(index).assign(&best);
    }

    let f_star = FnVec::new(space, best_values)?;
    let value_star = obj.value(&f_star)?;
    Ok(OptimalReference {
        f_star,
        value_star,
        method: "grid-refine".into(),
    })
}

fn pattern_offsets(k: usize) -> Vec<Vec<f64>> {
    if k > 4 {
        // Coordinate moves only for higher dimensions.
        let mut offsets = Vec::with_capacity(2 * k);
        for dim in 0..k {
            for sign in [1.0, -1.0] {
                let mut o = vec![0.0; k];
                o[dim] = sign;
                offsets.push(o);
            }
        }
        return offsets;
    }
    let mut offsets = Vec::new();
    let mut counter = vec![0usize; k];
    loop {
        let candidate: Vec<f64> = counter.iter().map(|&c| c as f64 - 1.0).collect();
        if candidate.iter().any(|&v| v != 0.0) {
            offsets.push(candidate);
        }
        let mut dim = 0;
        loop {
            if dim == k {
                return offsets;
            }
            counter[dim] += 1;
            if counter[dim] <= 2 {
                break;
            }
            counter[dim] = 0;
            dim += 1;
        }
    }
}

/// Reference optimum by plain unrestricted subgradient descent in value
/// space with step 1/sqrt(t), tracking the best iterate seen.
pub fn subgradient_oracle(obj: &dyn Objective, iters: usize) -> Result<OptimalReference> {
    let mut f = FnVec::zeros(obj.space());
    let mut best_value = obj.value(&f)?;
    let mut best = f.clone();
    for t in 1..=iters {
        let grad = obj.subgradient(&f)?;
        let eta = 1.0 / (t as f64).sqrt();
        f = combine(1.0, &f, -eta, &grad)?;
        let value = obj.value(&f)?;
        if value < best_value {
            best_value = value;
            best = f.clone();
        }
    }
    Ok(OptimalReference {
        f_star: best,
        value_star: best_value,
        method: "subgradient-descent".into(),
    })
}
