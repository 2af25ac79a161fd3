use serde::{Deserialize, Serialize};

use super::{Dataset, Regressor};
use crate::error::{Error, Result};

/// Coefficient of determination and mean absolute error over `n` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub r_squared: f64,
    pub mae: f64,
    pub n: usize,
}

fn check_lengths(y: &[f64], y_hat: &[f64], min: usize) -> Result<()> {
    if y.len() != y_hat.len() {
        return Err(Error::Dimension(format!("{} targets vs {} predictions", y.len(), y_hat.len())));
    }
    if y.len() < min {
        return Err(Error::invalid(format!("need at least {min} points, got {}", y.len())));
    }
    if y.iter().chain(y_hat).any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite target or prediction"));
    }
    Ok(())
}

/// `1 - SSE/SST`. A constant target has no defined R².
pub fn r_squared(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    check_lengths(y, y_hat, 2)?;
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::invalid("R² undefined for a constant target"));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let sse: f64 = y.iter().zip(y_hat).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(1.0 - sse / sst)
}

pub fn mae(y: &[f64], y_hat: &[f64]) -> Result<f64> {
    check_lengths(y, y_hat, 1)?;
    Ok(y.iter().zip(y_hat).map(|(a, b)| (a - b).abs()).sum::<f64>() / y.len() as f64)
}

/// Scores a model on every row of `ds`.
pub fn evaluate<M: Regressor + ?Sized>(model: &M, ds: &Dataset) -> Result<MetricsReport> {
    let y = ds.labels();
    let y_hat = model.predict_dataset(ds)?;
    Ok(MetricsReport { r_squared: r_squared(&y, &y_hat)?, mae: mae(&y, &y_hat)?, n: y.len() })
}
