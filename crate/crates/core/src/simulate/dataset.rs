use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::noise::{add_white_noise, shot_noise, NoiseConfig, Shots};
use super::{output_state, probe_set, stokes, ProbeConfig};
use crate::error::{Error, Result};
use crate::linalg::DEFAULT_LOG_BASE;
use crate::process::{
    empirical_pmf, joint_pmf, mixed_process, non_markovianity, prepared_state, sample_marginal, DensityMatrix, JointPmf,
    PauliIndex,
};
use crate::rng;

/// The ten `(q, R)` pairs of the reference generation protocol.
pub fn standard_pairs() -> Vec<(f64, f64)> {
    vec![
        (0.8, 1.0),
        (0.8, 1.5),
        (0.8, 1.25),
        (0.9, 1.0),
        (0.9, 1.5),
        (0.9, 1.25),
        (0.95, 1.0),
        (0.95, 1.5),
        (0.95, 1.25),
        (1.0, 1.0),
    ]
}

/// Pauli observables measured at station B, in feature order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct MeasurementSet(Vec<PauliIndex>);

impl From<MeasurementSet> for String {
    fn from(m: MeasurementSet) -> String {
        m.label()
    }
}

impl TryFrom<String> for MeasurementSet {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

impl MeasurementSet {
    pub fn xyz() -> Self {
        MeasurementSet(vec![PauliIndex::X, PauliIndex::Y, PauliIndex::Z])
    }

    pub fn ixy() -> Self {
        MeasurementSet(vec![PauliIndex::I, PauliIndex::X, PauliIndex::Y])
    }

    pub fn new(indices: Vec<PauliIndex>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("measurement set is empty"));
        }
        let mut sorted = indices.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != indices.len() {
            return Err(Error::invalid("measurement set has repeated observables"));
        }
        Ok(MeasurementSet(indices))
    }

    /// Parses letters from `IXYZ`, e.g. `"XYZ"` or `"IXY"`.
    pub fn parse(s: &str) -> Result<Self> {
        let indices = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(PauliIndex::I),
                'X' => Ok(PauliIndex::X),
                'Y' => Ok(PauliIndex::Y),
                'Z' => Ok(PauliIndex::Z),
                other => Err(Error::invalid(format!("unknown observable {other:?} in measurement set {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices)
    }

    pub fn indices(&self) -> &[PauliIndex] {
        &self.0
    }

    pub fn label(&self) -> String {
        self.0.iter().map(|p| p.to_string()).collect()
    }

    /// CSV column names `s_k{k}_l{l}`, probe-major.
    pub fn feature_names(&self) -> Vec<String> {
        (0..3).flat_map(|k| self.0.iter().map(move |l| format!("s_k{k}_l{}", l.value()))).collect()
    }
}

impl Default for MeasurementSet {
    fn default() -> Self {
        Self::xyz()
    }
}

/// How the realised pmf is obtained from the model pmf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PmfSampling {
    /// Use the model pmf itself.
    Exact,
    /// Frequencies of this many i.i.d. pair draws.
    Samples(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationPlan {
    pub qr_pairs: Vec<(f64, f64)>,
    pub pmfs_per_pair: usize,
    pub sampling: PmfSampling,
    pub probe: ProbeConfig,
    pub noise: NoiseConfig,
    pub base_seed: u64,
    pub measurements: MeasurementSet,
    pub log_base: f64,
}

impl Default for GenerationPlan {
    /// Ten `(q, R)` pairs, 100 pmfs each, 50 draws per pmf, default probes
    /// and shot noise.
    fn default() -> Self {
        GenerationPlan {
            qr_pairs: standard_pairs(),
            pmfs_per_pair: 100,
            sampling: PmfSampling::Samples(50),
            probe: ProbeConfig::default(),
            noise: NoiseConfig::default(),
            base_seed: 0,
            measurements: MeasurementSet::xyz(),
            log_base: DEFAULT_LOG_BASE,
        }
    }
}

impl GenerationPlan {
    pub fn validate(&self) -> Result<()> {
        if self.qr_pairs.is_empty() {
            return Err(Error::invalid("plan has no (q, R) pairs"));
        }
        for &(q, r) in &self.qr_pairs {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::invalid(format!("q = {q} not in [0,1]")));
            }
            if !(r.is_finite() && r >= 1.0) {
                return Err(Error::invalid(format!("R = {r} must be >= 1")));
            }
        }
        if self.pmfs_per_pair == 0 {
            return Err(Error::invalid("pmfs_per_pair must be >= 1"));
        }
        if self.sampling == PmfSampling::Samples(0) {
            return Err(Error::invalid("samples_per_pmf must be >= 1"));
        }
        if !(self.log_base.is_finite() && self.log_base > 0.0 && self.log_base != 1.0) {
            return Err(Error::invalid(format!("logarithm base {} is not usable", self.log_base)));
        }
        self.probe.validate()?;
        self.noise.validate()?;
        MeasurementSet::new(self.measurements.0.clone())?;
        Ok(())
    }

    pub fn row_count(&self) -> usize {
        self.qr_pairs.len() * self.pmfs_per_pair
    }

    pub fn feature_count(&self) -> usize {
        3 * self.measurements.0.len()
    }
}

/// One labelled example: Stokes features of the realised process and its
/// non-Markovianity.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetRow {
    pub id: usize,
    pub q: f64,
    pub r: f64,
    pub pair_index: usize,
    pub pmf_index: usize,
    pub seed: u64,
    /// `S_lk`, probe-major then observable.
    pub features: Vec<f64>,
    /// Measure of the realised process.
    pub label: f64,
    /// Measure of the model process before finite sampling.
    pub exact_label: f64,
}

/// Generates one row; depends only on the plan and its coordinates.
pub fn generate_row(plan: &GenerationPlan, pair_index: usize, pmf_index: usize) -> Result<DatasetRow> {
    let (q, r) = *plan
        .qr_pairs
        .get(pair_index)
        .ok_or_else(|| Error::invalid(format!("pair index {pair_index} out of range")))?;
    let seed = rng::derive_seed(plan.base_seed, &[pair_index as u64, pmf_index as u64]);
    let mut stream = rng::stream(seed);

    let marginal = sample_marginal(r, &mut stream)?;
    let model = joint_pmf(&marginal, q)?;
    let realised = match plan.sampling {
        PmfSampling::Exact => model.clone(),
        PmfSampling::Samples(n) => empirical_pmf(&model, n, &mut stream)?,
    };

    let rho = prepared_state();
    let features = stokes_features(&realised, &rho, plan, &mut stream)?;

    let exact_label = non_markovianity(&mixed_process(&model, &rho), plan.log_base)?;
    let label = match plan.sampling {
        PmfSampling::Exact => exact_label,
        PmfSampling::Samples(_) => non_markovianity(&mixed_process(&realised, &rho), plan.log_base)?,
    };

    Ok(DatasetRow {
        id: pair_index * plan.pmfs_per_pair + pmf_index,
        q,
        r,
        pair_index,
        pmf_index,
        seed,
        features,
        label,
        exact_label,
    })
}

fn stokes_features<G: Rng + ?Sized>(
    p: &JointPmf,
    rho: &DensityMatrix,
    plan: &GenerationPlan,
    stream: &mut G,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(plan.feature_count());
    for u_k in probe_set(&plan.probe) {
        let mut rho_k = output_state(p, rho, &u_k)?;
        if plan.noise.white_noise_eps > 0.0 {
            rho_k = add_white_noise(&rho_k, plan.noise.white_noise_eps)?;
        }
        for &l in &plan.measurements.0 {
            let s = stokes(&rho_k, l);
            out.push(match plan.noise.shots {
                Shots::Exact => s,
                Shots::Finite(_) if l == PauliIndex::I => s,
                Shots::Finite(n) => shot_noise(s, n, stream)?,
            });
        }
    }
    Ok(out)
}

/// Runs the whole plan. Rows come back in `(pair_index, pmf_index)` order
/// regardless of how the work was scheduled.
pub fn generate_dataset(plan: &GenerationPlan) -> Result<Vec<DatasetRow>> {
    plan.validate()?;
    let coords: Vec<(usize, usize)> =
        (0..plan.qr_pairs.len()).flat_map(|a| (0..plan.pmfs_per_pair).map(move |b| (a, b))).collect();
    coords.par_iter().map(|&(a, b)| generate_row(plan, a, b)).collect()
}
