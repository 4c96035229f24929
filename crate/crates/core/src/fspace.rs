//! Empirical L2 vector space: functions represented by their values on a
//! finite sample, with the probability-weighted inner product
//! `<f, g> = sum_n p_n <f(x_n), g(x_n)>`.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::{Error, Result};

static NEXT_TOKEN: AtomicU64 = AtomicU64::new(1);

/// The empirical domain: feature rows, per-point probability weights and the
/// output dimension shared by every function bound to this space.
///
/// Spaces are immutable after construction and carry a unique identity token;
/// two function vectors interoperate only when bound to the same space.
#[derive(Debug)]
pub struct SampleSpace {
    features: Array2<f64>,
    weights: Array1<f64>,
    output_dim: usize,
    ids: Option<Vec<String>>,
    token: u64,
}

impl SampleSpace {
    /// Space with uniform weights 1/n.
    pub fn uniform(features: Array2<f64>, output_dim: usize) -> Result<Arc<Self>> {
        let n = features.nrows();
        let weights = Array1::from_elem(n, 1.0 / n.max(1) as f64);
        Self::new(features, weights, output_dim, None)
    }

    /// Space with explicit positive weights. Weights are renormalized to sum
    /// to one; a deviation above 1e-9 is logged as a warning.
    pub fn weighted(
        features: Array2<f64>,
        weights: Array1<f64>,
        output_dim: usize,
    ) -> Result<Arc<Self>> {
        Self::new(features, weights, output_dim, None)
    }

    /// Full constructor with optional per-point identifiers.
    pub fn new(
        features: Array2<f64>,
        weights: Array1<f64>,
        output_dim: usize,
        ids: Option<Vec<String>>,
    ) -> Result<Arc<Self>> {
        let n = features.nrows();
        let d = features.ncols();
        if n < 1 {
            return Err(Error::InvalidArgument(
                "need at least one sample point".into(),
            ));
        }
        if d < 1 {
            return Err(Error::InvalidArgument("need at least one feature".into()));
        }
        if output_dim < 1 {
            return Err(Error::InvalidArgument(
                "output dimension must be >= 1".into(),
            ));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("features must be finite".into()));
        }
        if weights.len() != n {
            return Err(Error::InvalidArgument(format!(
                "got {} weights for {} points",
                weights.len(),
                n
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "weights must be positive and finite".into(),
            ));
        }
        if let Some(ids) = &ids {
            if ids.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "got {} ids for {} points",
                    ids.len(),
                    n
                )));
            }
        }
        let total: f64 = weights.sum();
        if (total - 1.0).abs() > 1e-9 {
            log::warn!("sample weights sum to {total}, renormalizing");
        }
        let weights = if (total - 1.0).abs() > 1e-12 {
            weights / total
        } else {
            weights
        };
        Ok(Arc::new(SampleSpace {
            features,
            weights,
            output_dim,
            ids,
            token: NEXT_TOKEN.fetch_add(1, Ordering::Relaxed),
        }))
    }

    /// Number of sample points.
    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires n >= 1
    }

    /// Number of input features per point.
    pub fn num_features(&self) -> usize {
        self.features.ncols()
    }

    /// Output dimension k of functions on this space.
    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn feature_row(&self, index: usize) -> ArrayView1<'_, f64> {
        self.features.row(index)
    }

    pub fn weights(&self) -> ArrayView1<'_, f64> {
        self.weights.view()
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    pub fn id(&self, index: usize) -> Option<&str> {
        self.ids.as_ref().map(|ids| ids[index].as_str())
    }

    /// Identity token used for O(1) binding checks.
    pub fn token(&self) -> u64 {
        self.token
    }
}

/// A function on a [`SampleSpace`], stored as its n-by-k value matrix.
#[derive(Debug, Clone)]
pub struct FnVec {
    values: Array2<f64>,
    space: Arc<SampleSpace>,
}

impl FnVec {
    /// Binds a value matrix to a space. Rows must match the sample count,
    /// columns the space's output dimension, and every entry must be finite.
    pub fn new(space: &Arc<SampleSpace>, values: Array2<f64>) -> Result<Self> {
        if values.nrows() != space.len() {
            return Err(Error::InvalidArgument(format!(
                "value matrix has {} rows, space has {} points",
                values.nrows(),
                space.len()
            )));
        }
        if values.ncols() != space.output_dim() {
            return Err(Error::InvalidArgument(format!(
                "value matrix has {} columns, space output dimension is {}",
                values.ncols(),
                space.output_dim()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "function values must be finite".into(),
            ));
        }
        Ok(FnVec {
            values,
            space: Arc::clone(space),
        })
    }

    /// The zero function.
    pub fn zeros(space: &Arc<SampleSpace>) -> Self {
        FnVec {
            values: Array2::zeros((space.len(), space.output_dim())),
            space: Arc::clone(space),
        }
    }

    /// The constant function with the given value in R^k.
    pub fn constant(space: &Arc<SampleSpace>, value: ArrayView1<f64>) -> Result<Self> {
        if value.len() != space.output_dim() {
            return Err(Error::InvalidArgument(format!(
                "constant has dimension {}, space output dimension is {}",
                value.len(),
                space.output_dim()
            )));
        }
        let mut values = Array2::zeros((space.len(), space.output_dim()));
        for mut row in values.rows_mut() {
            row.assign(&value);
        }
        Ok(FnVec {
            values,
            space: Arc::clone(space),
        })
    }

    pub fn space(&self) -> &Arc<SampleSpace> {
        &self.space
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn row(&self, index: usize) -> ArrayView1<'_, f64> {
        self.values.row(index)
    }

    fn check_binding(&self, other: &FnVec) -> Result<()> {
        if self.space.token != other.space.token {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    /// Probability-weighted inner product `sum_n p_n <f(x_n), g(x_n)>`.
    pub fn inner(&self, other: &FnVec) -> Result<f64> {
        self.check_binding(other)?;
        let weights = self.space.weights();
        let mut acc = 0.0;
        for ((w, a), b) in weights
            .iter()
            .zip(self.values.rows())
            .zip(other.values.rows())
        {
            acc += w * a.dot(&b);
        }
        Ok(acc)
    }

    /// Norm induced by [`FnVec::inner`].
    pub fn norm(&self) -> f64 {
        self.inner(self)
            .expect("self binding always matches")
            .sqrt()
    }

    /// Pointwise scaling `alpha * f`.
    pub fn scaled(&self, alpha: f64) -> FnVec {
        FnVec {
            values: alpha * &self.values,
            space: Arc::clone(&self.space),
        }
    }

    /// True when every value is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

impl PartialEq for FnVec {
    fn eq(&self, other: &Self) -> bool {
        self.space.token == other.space.token && self.values == other.values
    }
}

/// Pointwise linear combination `alpha * f + beta * g`, bound to the shared
/// space of the operands.
pub fn combine(alpha: f64, f: &FnVec, beta: f64, g: &FnVec) -> Result<FnVec> {
    f.check_binding(g)?;
    let values = alpha * &f.values + beta * &g.values;
    Ok(FnVec {
        values,
        space: Arc::clone(&f.space),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr1, arr2};

    fn two_point_space() -> Arc<SampleSpace> {
        SampleSpace::uniform(arr2(&[[0.0], [1.0]]), 1).unwrap()
    }

    fn vec_on(space: &Arc<SampleSpace>, vals: &[f64]) -> FnVec {
        let n = space.len();
        let k = space.output_dim();
        let values = Array2::from_shape_vec((n, k), vals.to_vec()).unwrap();
        FnVec::new(space, values).unwrap()
    }

    #[test]
    fn inner_product_two_points() {
        let space = two_point_space();
        let f = vec_on(&space, &[2.0, 4.0]);
        let g = vec_on(&space, &[1.0, 3.0]);
        assert_eq!(f.inner(&g).unwrap(), 7.0);
        assert_eq!(g.inner(&f).unwrap(), 7.0);
    }

    #[test]
    fn inner_product_single_coordinate() {
        for n in [1usize, 3, 7] {
            let features = Array2::zeros((n, 1));
            let space = SampleSpace::uniform(features, 1).unwrap();
            let mut values = Array2::zeros((n, 1));
            values[[0, 0]] = 1.0;
            let f = FnVec::new(&space, values).unwrap();
            let got = f.inner(&f).unwrap();
            assert!((got - 1.0 / n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn inner_product_orthogonal() {
        let space = two_point_space();
        let f = vec_on(&space, &[1.0, 1.0]);
        let g = vec_on(&space, &[1.0, -1.0]);
        assert_eq!(f.inner(&g).unwrap(), 0.0);
    }

    #[test]
    fn inner_product_rejects_foreign_space() {
        let a = two_point_space();
        let b = two_point_space();
        let f = vec_on(&a, &[1.0, 2.0]);
        let g = vec_on(&b, &[1.0, 2.0]);
        assert!(matches!(f.inner(&g), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn norm_examples() {
        let space = two_point_space();
        let f = vec_on(&space, &[3.0, 4.0]);
        assert!((f.norm() - 12.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(FnVec::zeros(&space).norm(), 0.0);

        let single = SampleSpace::uniform(arr2(&[[0.0]]), 2).unwrap();
        let f = FnVec::new(&single, arr2(&[[1.0, 1.0]])).unwrap();
        assert!((f.norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn combine_identities() {
        let space = two_point_space();
        let f = vec_on(&space, &[1.0, 2.0]);
        let g = vec_on(&space, &[3.0, -1.0]);

        let same = combine(1.0, &f, 0.0, &g).unwrap();
        assert_eq!(same, f);

        let zero = combine(1.0, &f, -1.0, &f).unwrap();
        assert!(zero.is_zero());

        let mixed = combine(2.0, &f, 1.0, &g).unwrap();
        assert_eq!(mixed.values().as_slice().unwrap(), &[5.0, 3.0]);
    }

    #[test]
    fn weights_renormalize() {
        let space = SampleSpace::weighted(arr2(&[[0.0], [1.0]]), arr1(&[2.0, 2.0]), 1).unwrap();
        assert!((space.weights().sum() - 1.0).abs() < 1e-15);
        assert!((space.weight(0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn construction_guards() {
        assert!(SampleSpace::uniform(Array2::zeros((0, 1)), 1).is_err());
        assert!(SampleSpace::uniform(Array2::zeros((1, 0)), 1).is_err());
        assert!(SampleSpace::uniform(Array2::zeros((1, 1)), 0).is_err());
        assert!(SampleSpace::weighted(arr2(&[[0.0], [1.0]]), arr1(&[1.0, -1.0]), 1).is_err());

        let space = two_point_space();
        assert!(FnVec::new(&space, Array2::zeros((3, 1))).is_err());
        assert!(FnVec::new(&space, Array2::zeros((2, 2))).is_err());
        assert!(FnVec::new(&space, arr2(&[[f64::NAN], [0.0]])).is_err());
    }

    #[test]
    fn uniform_weights_match_mean_formula() {
        // With p_n = 1/N the weighted sum reproduces (1/N) sum <f_n, g_n>
        // term for term, so the results are identical floats.
        for n in [2usize, 5, 12] {
            let features = Array2::zeros((n, 1));
            let space = SampleSpace::uniform(features, 3).unwrap();
            let mut fv = Array2::zeros((n, 3));
            let mut gv = Array2::zeros((n, 3));
            for i in 0..n {
                for c in 0..3 {
                    fv[[i, c]] = ((i * 3 + c) as f64).sin();
                    gv[[i, c]] = ((i * 7 + c) as f64).cos();
                }
            }
            let f = FnVec::new(&space, fv.clone()).unwrap();
            let g = FnVec::new(&space, gv.clone()).unwrap();
            let inv_n = 1.0 / n as f64;
            let mut reference = 0.0;
            for i in 0..n {
                reference += inv_n * fv.row(i).dot(&gv.row(i));
            }
            assert_eq!(f.inner(&g).unwrap(), reference);
        }
    }
}
