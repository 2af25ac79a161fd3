use super::{Dataset, Regressor};
use crate::error::{Error, Result};

pub const DEFAULT_NEIGHBORS: usize = 5;

/// k-nearest-neighbour regressor on raw (unscaled) features.
#[derive(Clone, Debug, PartialEq)]
pub struct KnnModel {
    k: usize,
    features: Vec<Vec<f64>>,
    labels: Vec<f64>,
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

pub fn knn_fit(ds: &Dataset, k: usize) -> Result<KnnModel> {
    if ds.is_empty() {
        return Err(Error::invalid("KNN needs a nonempty training set"));
    }
    if k == 0 || k > ds.len() {
        return Err(Error::invalid(format!("k = {k} not in 1..={}", ds.len())));
    }
    Ok(KnnModel {
        k,
        features: ds.rows().iter().map(|r| r.features.clone()).collect(),
        labels: ds.labels(),
    })
}

/// Mean label of the `k` nearest training rows by Euclidean distance; equal
/// distances are broken by training-row order.
pub fn knn_predict(model: &KnnModel, x: &[f64]) -> Result<f64> {
    let width = model.features[0].len();
    if x.len() != width {
        return Err(Error::Dimension(format!("KNN model expects {width} inputs, got {}", x.len())));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite KNN query"));
    }
    let mut dist: Vec<(f64, usize)> = model
        .features
        .iter()
        .enumerate()
        .map(|(i, f)| (f.iter().zip(x).map(|(a, b)| (a - b).powi(2)).sum::<f64>(), i))
        .collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if model.k < dist.len() {
        dist.select_nth_unstable_by(model.k - 1, cmp);
    }
    Ok(dist[..model.k].iter().map(|&(_, i)| model.labels[i]).sum::<f64>() / model.k as f64)
}

impl Regressor for KnnModel {
    fn predict_one(&self, x: &[f64]) -> Result<f64> {
        knn_predict(self, x)
    }
}
