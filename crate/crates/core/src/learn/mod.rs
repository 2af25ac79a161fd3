//! Regression from Stokes features to the non-Markovianity label.

mod cv;
mod knn;
mod metrics;
mod model_io;
mod poly;
mod split;

pub use cv::{fold_indices, k_fold_cv, size_sweep, CvReport, FoldResult, SweepEntry, SweepReport, DEFAULT_TRAIN_SIZES};
pub use knn::{knn_fit, knn_predict, KnnModel, DEFAULT_NEIGHBORS};
pub use metrics::{evaluate, mae, r_squared, MetricsReport};
pub use model_io::{parse_model, serialize_model, MODEL_FORMAT_VERSION};
pub use poly::{
    fit_least_squares, fit_ridge, monomial_count, monomials, poly_features, predict, train_poly, PolyModel,
};
pub use split::{split_indices, train_test_split, SplitMode, DEFAULT_TRAIN_FRACTION};

use crate::error::{Error, Result};
use crate::simulate::DatasetRow;

/// A nonempty collection of rows sharing one feature layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    rows: Vec<DatasetRow>,
    feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(rows: Vec<DatasetRow>, feature_names: Vec<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("dataset is empty"));
        }
        let width = feature_names.len();
        if width == 0 {
            return Err(Error::invalid("dataset has no feature columns"));
        }
        if let Some(bad) = rows.iter().find(|r| r.features.len() != width) {
            return Err(Error::Dimension(format!(
                "row {} has {} features, expected {width}",
                bad.id,
                bad.features.len()
            )));
        }
        Ok(Dataset { rows, feature_names })
    }

    pub fn rows(&self) -> &[DatasetRow] {
        &self.rows
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_count(&self) -> usize {
        self.feature_names.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn features(&self) -> Vec<&[f64]> {
        self.rows.iter().map(|r| r.features.as_slice()).collect()
    }

    pub fn labels(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.label).collect()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let rows = indices
            .iter()
            .map(|&i| self.rows.get(i).cloned().ok_or_else(|| Error::invalid(format!("row index {i} out of range"))))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(rows, self.feature_names.clone())
    }
}

/// Anything that maps a feature vector to a predicted label.
pub trait Regressor {
    fn predict_one(&self, x: &[f64]) -> Result<f64>;

    fn predict_dataset(&self, ds: &Dataset) -> Result<Vec<f64>> {
        ds.rows().iter().map(|r| self.predict_one(&r.features)).collect()
    }
}
