use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use super::Dataset;
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;

/// How rows are assigned to the train and test sides.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// One shuffle over all rows.
    #[default]
    Uniform,
    /// Shuffle and split each `(q, R)` group separately.
    Stratified,
}

pub(crate) fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::stream(seed));
    idx
}

fn train_count(n: usize, fraction: f64) -> usize {
    (fraction * n as f64).round() as usize
}

/// Row indices of the train and test sides, in shuffled order.
pub fn split_indices(ds: &Dataset, fraction: f64, seed: u64, mode: SplitMode) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!("train fraction {fraction} not in (0, 1)")));
    }
    let n = ds.len();
    if n < 2 {
        return Err(Error::invalid("need at least two rows to split"));
    }
    let (train, test) = match mode {
        SplitMode::Uniform => {
            let idx = shuffled_indices(n, seed);
            let cut = train_count(n, fraction);
            (idx[..cut].to_vec(), idx[cut..].to_vec())
        }
        SplitMode::Stratified => {
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (i, r) in ds.rows().iter().enumerate() {
                groups.entry(r.pair_index).or_default().push(i);
            }
            let (mut train, mut test) = (Vec::new(), Vec::new());
            for (g, members) in groups {
                let order = shuffled_indices(members.len(), rng::derive_seed(seed, &[g as u64]));
                let cut = train_count(members.len(), fraction);
                train.extend(order[..cut].iter().map(|&k| members[k]));
                test.extend(order[cut..].iter().map(|&k| members[k]));
            }
            (train, test)
        }
    };
    if train.is_empty() || test.is_empty() {
        return Err(Error::invalid(format!("fraction {fraction} leaves an empty side on {n} rows")));
    }
    Ok((train, test))
}

/// Seeded shuffle, then the first `round(fraction·n)` rows train.
pub fn train_test_split(ds: &Dataset, fraction: f64, seed: u64, mode: SplitMode) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(ds, fraction, seed, mode)?;
    Ok((ds.subset(&train)?, ds.subset(&test)?))
}
