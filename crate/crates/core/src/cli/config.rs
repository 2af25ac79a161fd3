//! Run configuration: defaults, then an optional TOML file, then flags.
//!
//! ```toml
//! [plan]
//! pairs = [[0.8, 1.0], [0.9, 1.5]]
//! pmfs_per_pair = 100
//! samples_per_pmf = 50      # or "exact"
//! seed = 0
//! noise_eps = 0.0
//! shots = 5000              # or "exact"
//! measurements = "XYZ"
//! log_base = 2.0
//!
//! [learn]
//! degree = [2]
//! kfold = 10
//! train_fraction = 0.7
//! seed = 0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::io::read_text;
use crate::error::{Error, Result};
use crate::learn::{SplitMode, DEFAULT_NEIGHBORS, DEFAULT_TRAIN_FRACTION, DEFAULT_TRAIN_SIZES};
use crate::simulate::{GenerationPlan, MeasurementSet, PmfSampling, ProbeConfig, Shots};

/// A count, or the word `exact`.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum CountOrExact {
    Count(u64),
    Word(String),
}

impl CountOrExact {
    fn resolve(&self, what: &str) -> Result<Option<u64>> {
        match self {
            CountOrExact::Count(0) => Err(Error::invalid(format!("{what} must be >= 1"))),
            CountOrExact::Count(n) => Ok(Some(*n)),
            CountOrExact::Word(w) if w.eq_ignore_ascii_case("exact") => Ok(None),
            CountOrExact::Word(w) => w
                .parse::<u64>()
                .ok()
                .filter(|&n| n > 0)
                .map(Some)
                .ok_or_else(|| Error::invalid(format!("{what} must be a positive count or \"exact\", got {w:?}"))),
        }
    }

    pub fn parse_flag(s: &str) -> std::result::Result<Self, String> {
        let v = CountOrExact::Word(s.to_owned());
        v.resolve("value").map_err(|e| e.to_string())?;
        Ok(v)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanSection {
    pub pairs: Option<Vec<[f64; 2]>>,
    pub pmfs_per_pair: Option<usize>,
    pub samples_per_pmf: Option<CountOrExact>,
    pub seed: Option<u64>,
    pub noise_eps: Option<f64>,
    pub shots: Option<CountOrExact>,
    pub measurements: Option<String>,
    pub log_base: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnSection {
    pub degree: Option<Vec<usize>>,
    pub kfold: Option<usize>,
    pub train_fraction: Option<f64>,
    pub seed: Option<u64>,
    pub ridge: Option<f64>,
    pub stratified: Option<bool>,
    pub test_size: Option<usize>,
    pub train_sizes: Option<Vec<usize>>,
    pub neighbors: Option<usize>,
}

/// Contents of a `--plan` file.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub plan: PlanSection,
    pub learn: LearnSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::parse(&read_text(p)?).map_err(|e| Error::invalid(format!("{}: {e}", p.display()))),
            None => Ok(RunConfig::default()),
        }
    }
}

/// `"0.8:1,0.9:1.5"` → `[(0.8, 1.0), (0.9, 1.5)]`.
pub fn parse_pairs(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(',')
        .map(|item| {
            let (q, r) = item
                .trim()
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("pair {item:?} is not of the form q:R")))?;
            let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad number {t:?} in pair {item:?}")));
            Ok((num(q)?, num(r)?))
        })
        .collect()
}

impl PlanSection {
    /// Copies every field set in `over` onto `self`.
    pub fn overlay(&mut self, over: PlanSection) {
        macro_rules! take { ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* } }
        take!(pairs, pmfs_per_pair, samples_per_pmf, seed, noise_eps, shots, measurements, log_base, alpha, beta, gamma);
    }

    pub fn resolve(&self) -> Result<GenerationPlan> {
        let d = GenerationPlan::default();
        let probe = ProbeConfig::new(
            self.alpha.unwrap_or(d.probe.alpha),
            self.beta.unwrap_or(d.probe.beta),
            self.gamma.unwrap_or(d.probe.gamma),
        )?;
        let mut noise = d.noise;
        if let Some(eps) = self.noise_eps {
            noise.white_noise_eps = eps;
        }
        if let Some(s) = &self.shots {
            noise.shots = s.resolve("shots")?.map_or(Shots::Exact, Shots::Finite);
        }
        let sampling = match &self.samples_per_pmf {
            Some(s) => s.resolve("samples_per_pmf")?.map_or(PmfSampling::Exact, |n| PmfSampling::Samples(n as usize)),
            None => d.sampling,
        };
        let plan = GenerationPlan {
            qr_pairs: self.pairs.as_ref().map(|v| v.iter().map(|p| (p[0], p[1])).collect()).unwrap_or(d.qr_pairs),
            pmfs_per_pair: self.pmfs_per_pair.unwrap_or(d.pmfs_per_pair),
            sampling,
            probe,
            noise,
            base_seed: self.seed.unwrap_or(d.base_seed),
            measurements: match &self.measurements {
                Some(m) => MeasurementSet::parse(m)?,
                None => d.measurements,
            },
            log_base: self.log_base.unwrap_or(d.log_base),
        };
        plan.validate()?;
        Ok(plan)
    }
}

/// Fully resolved learning parameters; hashed into every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LearnSettings {
    pub degrees: Vec<usize>,
    pub kfold: usize,
    pub train_fraction: f64,
    pub seed: u64,
    pub ridge: f64,
    pub split: SplitMode,
    pub test_size: usize,
    pub train_sizes: Vec<usize>,
    pub neighbors: usize,
}

impl LearnSection {
    pub fn overlay(&mut self, over: LearnSection) {
        macro_rules! take { ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* } }
        take!(degree, kfold, train_fraction, seed, ridge, stratified, test_size, train_sizes, neighbors);
    }

    /// `default_degrees` differs per command (one degree for `train`, three for `crossval`).
    pub fn resolve(&self, default_degrees: &[usize]) -> Result<LearnSettings> {
        let s = LearnSettings {
            degrees: self.degree.clone().unwrap_or_else(|| default_degrees.to_vec()),
            kfold: self.kfold.unwrap_or(10),
            train_fraction: self.train_fraction.unwrap_or(DEFAULT_TRAIN_FRACTION),
            seed: self.seed.unwrap_or(0),
            ridge: self.ridge.unwrap_or(0.0),
            split: if self.stratified.unwrap_or(false) { SplitMode::Stratified } else { SplitMode::Uniform },
            test_size: self.test_size.unwrap_or(300),
            train_sizes: self.train_sizes.clone().unwrap_or_else(|| DEFAULT_TRAIN_SIZES.to_vec()),
            neighbors: self.neighbors.unwrap_or(DEFAULT_NEIGHBORS),
        };
        if s.degrees.is_empty() || s.degrees.contains(&0) {
            return Err(Error::invalid("degrees must be a nonempty list of values >= 1"));
        }
        if !(s.train_fraction > 0.0 && s.train_fraction < 1.0) {
            return Err(Error::invalid(format!("train fraction {} not in (0, 1)", s.train_fraction)));
        }
        if s.kfold < 2 {
            return Err(Error::invalid("kfold must be >= 2"));
        }
        if !(s.ridge.is_finite() && s.ridge >= 0.0) {
            return Err(Error::invalid("ridge must be >= 0"));
        }
        if s.neighbors == 0 {
            return Err(Error::invalid("neighbors must be >= 1"));
        }
        Ok(s)
    }
}

impl LearnSettings {
    pub fn single_degree(&self) -> Result<usize> {
        match self.degrees.as_slice() {
            [d] => Ok(*d),
            _ => Err(Error::invalid(format!("this command takes one degree, got {:?}", self.degrees))),
        }
    }
}
