//! Polynomial feature maps and minimum-norm least squares.
//!
//! Monomials are ordered graded-lexicographically: by total degree, then by
//! the sorted index tuple `(i1 <= i2 <= ... )` in lexicographic order. For
//! two inputs at degree 2 that is `1, x0, x1, x0², x0x1, x1²`. The order is
//! part of the model file format.

use faer::Mat;

use super::{Dataset, Regressor};
use crate::error::{Error, Result};
use crate::tolerance;

/// Index tuples of every monomial of total degree `<= degree`.
pub fn monomials(n_inputs: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..degree {
        let mut next = Vec::new();
        for mono in &layer {
            let start = mono.last().copied().unwrap_or(0);
            for i in start..n_inputs {
                let mut m = mono.clone();
                m.push(i);
                next.push(m);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// `C(n + d, d)`.
pub fn monomial_count(n_inputs: usize, degree: usize) -> usize {
    (1..=degree).fold(1usize, |acc, k| acc * (n_inputs + k) / k)
}

fn check_degree(degree: usize) -> Result<()> {
    if degree == 0 {
        return Err(Error::invalid("polynomial degree must be >= 1"));
    }
    Ok(())
}

/// All monomials of `x` up to `degree`, intercept first.
pub fn poly_features(x: &[f64], degree: usize) -> Result<Vec<f64>> {
    check_degree(degree)?;
    let mut out = Vec::with_capacity(monomial_count(x.len(), degree));
    out.push(1.0);
    // Each layer is built from the previous one so products are shared.
    let mut layer: Vec<(usize, f64)> = vec![(0, 1.0)];
    for _ in 0..degree {
        let mut next = Vec::with_capacity(layer.len() * x.len());
        for &(start, value) in &layer {
            for (i, &xi) in x.iter().enumerate().skip(start) {
                next.push((i, value * xi));
            }
        }
        out.extend(next.iter().map(|&(_, v)| v));
        layer = next;
    }
    Ok(out)
}

fn check_design(rows: &[&[f64]]) -> Result<(usize, usize)> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::invalid("least squares needs at least one row"));
    }
    let m = rows[0].len();
    if m == 0 {
        return Err(Error::invalid("least squares needs at least one column"));
    }
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Dimension("ragged design matrix".into()));
    }
    if rows.iter().any(|r| r.iter().any(|v| !v.is_finite())) {
        return Err(Error::invalid("non-finite value in design matrix"));
    }
    Ok((n, m))
}

/// Minimum-norm least-squares solution of `A c ≈ y` via SVD, discarding
/// singular values below `1e-10 σ_max`.
pub fn fit_least_squares(rows: &[&[f64]], labels: &[f64]) -> Result<Vec<f64>> {
    fit_ridge(rows, labels, 0.0)
}

/// Least squares with an optional ridge penalty `λ‖c‖²` (all coefficients,
/// intercept included). `λ = 0` is plain least squares.
pub fn fit_ridge(rows: &[&[f64]], labels: &[f64], ridge: f64) -> Result<Vec<f64>> {
    if !(ridge.is_finite() && ridge >= 0.0) {
        return Err(Error::invalid(format!("ridge parameter {ridge} must be >= 0")));
    }
    let (n, m) = check_design(rows)?;
    if labels.len() != n {
        return Err(Error::Dimension(format!("{} labels for {n} rows", labels.len())));
    }
    if labels.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite label"));
    }
    // ridge: stack sqrt(λ) I under A and zeros under y
    let extra = if ridge > 0.0 { m } else { 0 };
    let root = ridge.sqrt();
    let a = Mat::<f64>::from_fn(n + extra, m, |i, j| {
        if i < n {
            rows[i][j]
        } else if i - n == j {
            root
        } else {
            0.0
        }
    });
    let y = |i: usize| if i < n { labels[i] } else { 0.0 };

    let svd = a.thin_svd().map_err(|e| Error::Numerical(format!("SVD failed: {e:?}")))?;
    let (u, v, sigma) = (svd.U(), svd.V(), svd.S().column_vector());
    let sigma_max = (0..sigma.nrows()).map(|k| sigma[k]).fold(0.0, f64::max);
    let cutoff = tolerance::SVD_CUTOFF * sigma_max;

    let mut coeffs = vec![0.0; m];
    for k in 0..sigma.nrows() {
        let s = sigma[k];
        if s > cutoff && s > 0.0 {
            let uty: f64 = (0..n + extra).map(|i| u[(i, k)] * y(i)).sum();
            for (j, c) in coeffs.iter_mut().enumerate() {
                *c += v[(j, k)] * uty / s;
            }
        }
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numerical("least-squares solution is not finite".into()));
    }
    Ok(coeffs)
}

/// Fitted polynomial regression model.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyModel {
    pub degree: usize,
    pub n_inputs: usize,
    pub coefficients: Vec<f64>,
}

impl PolyModel {
    pub fn new(degree: usize, n_inputs: usize, coefficients: Vec<f64>) -> Result<Self> {
        check_degree(degree)?;
        let want = monomial_count(n_inputs, degree);
        if coefficients.len() != want {
            return Err(Error::Dimension(format!(
                "degree-{degree} model over {n_inputs} inputs needs {want} coefficients, got {}",
                coefficients.len()
            )));
        }
        Ok(PolyModel { degree, n_inputs, coefficients })
    }
}

/// `coefficients · poly_features(x)`.
pub fn predict(model: &PolyModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.n_inputs {
        return Err(Error::Dimension(format!("model expects {} inputs, got {}", model.n_inputs, x.len())));
    }
    let phi = poly_features(x, model.degree)?;
    Ok(phi.iter().zip(&model.coefficients).map(|(a, b)| a * b).sum())
}

impl Regressor for PolyModel {
    fn predict_one(&self, x: &[f64]) -> Result<f64> {
        predict(self, x)
    }
}

/// Fits a degree-`degree` polynomial on a dataset.
pub fn train_poly(ds: &Dataset, degree: usize, ridge: f64) -> Result<PolyModel> {
    check_degree(degree)?;
    let phi: Vec<Vec<f64>> = ds.rows().iter().map(|r| poly_features(&r.features, degree)).collect::<Result<_>>()?;
    let refs: Vec<&[f64]> = phi.iter().map(Vec::as_slice).collect();
    let coefficients = fit_ridge(&refs, &ds.labels(), ridge)?;
    PolyModel::new(degree, ds.feature_count(), coefficients)
}
