use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{evaluate, MetricsReport};
use super::poly::train_poly;
use super::split::shuffled_indices;
use super::Dataset;
use crate::error::{Error, Result};

/// One held-out fold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    /// Row indices (into the input dataset) tested in this fold.
    pub test_indices: Vec<usize>,
    pub train: MetricsReport,
    pub test: MetricsReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub degree: usize,
    pub seed: u64,
    pub folds: Vec<FoldResult>,
    pub mean_r_squared: f64,
    /// Population standard deviation over folds.
    pub std_r_squared: f64,
    pub mean_mae: f64,
    pub std_mae: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Splits a seeded permutation of `0..n` into `k` contiguous folds whose
/// sizes differ by at most one (the first `n mod k` are the larger ones).
pub fn fold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::invalid(format!("k-fold needs k >= 2, got {k}")));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds dataset size {n}")));
    }
    let perm = shuffled_indices(n, seed);
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(perm[start..start + len].to_vec());
        start += len;
    }
    Ok(folds)
}

/// k-fold cross-validation of a degree-`degree` polynomial model. Folds are
/// fitted in parallel and reported in fold order.
pub fn k_fold_cv(ds: &Dataset, k: usize, degree: usize, seed: u64, ridge: f64) -> Result<CvReport> {
    let folds = fold_indices(ds.len(), k, seed)?;
    let results = folds
        .par_iter()
        .enumerate()
        .map(|(f, test_idx)| {
            let train_idx: Vec<usize> =
                folds.iter().enumerate().filter(|&(g, _)| g != f).flat_map(|(_, v)| v.iter().copied()).collect();
            let train = ds.subset(&train_idx)?;
            let test = ds.subset(test_idx)?;
            let model = train_poly(&train, degree, ridge)?;
            Ok(FoldResult { fold: f, test_indices: test_idx.clone(), train: evaluate(&model, &train)?, test: evaluate(&model, &test)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let r2: Vec<f64> = results.iter().map(|r| r.test.r_squared).collect();
    let maes: Vec<f64> = results.iter().map(|r| r.test.mae).collect();
    let (mean_r_squared, std_r_squared) = mean_std(&r2);
    let (mean_mae, std_mae) = mean_std(&maes);
    Ok(CvReport { k, degree, seed, folds: results, mean_r_squared, std_r_squared, mean_mae, std_mae })
}

pub const DEFAULT_TRAIN_SIZES: [usize; 10] = [70, 140, 210, 280, 350, 420, 490, 560, 630, 700];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub train_size: usize,
    pub train: MetricsReport,
    pub test: MetricsReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub degree: usize,
    pub test_size: usize,
    pub seed: u64,
    pub entries: Vec<SweepEntry>,
}

impl SweepReport {
    /// Entry with the largest train − test R² gap (first on ties).
    pub fn largest_gap(&self) -> Option<&SweepEntry> {
        self.entries.iter().fold(None, |best: Option<&SweepEntry>, e| match best {
            Some(b) if b.train.r_squared - b.test.r_squared >= e.train.r_squared - e.test.r_squared => Some(b),
            _ => Some(e),
        })
    }
}

/// Learning curve: one seeded shuffle; the first `test_size` rows are held
/// out, and the training sets are nested prefixes of the remainder.
pub fn size_sweep(
    ds: &Dataset,
    test_size: usize,
    train_sizes: &[usize],
    degree: usize,
    seed: u64,
    ridge: f64,
) -> Result<SweepReport> {
    if train_sizes.is_empty() {
        return Err(Error::invalid("size sweep needs at least one training size"));
    }
    if test_size < 2 {
        return Err(Error::invalid("size sweep needs a test set of at least 2 rows"));
    }
    let largest = *train_sizes.iter().max().expect("nonempty");
    if train_sizes.contains(&0) {
        return Err(Error::invalid("training sizes must be >= 1"));
    }
    if largest + test_size > ds.len() {
        return Err(Error::invalid(format!(
            "training size {largest} plus test size {test_size} exceeds {} rows",
            ds.len()
        )));
    }
    let perm = shuffled_indices(ds.len(), seed);
    let test = ds.subset(&perm[..test_size])?;
    let pool = &perm[test_size..];
    let entries = train_sizes
        .par_iter()
        .map(|&size| {
            let train = ds.subset(&pool[..size])?;
            let model = train_poly(&train, degree, ridge)?;
            Ok(SweepEntry { train_size: size, train: evaluate(&model, &train)?, test: evaluate(&model, &test)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { degree, test_size, seed, entries })
}
