use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::process::DensityMatrix;

/// Photon counts per measurement setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shots {
    /// Stokes parameters are reported exactly.
    Exact,
    Finite(u64),
}

impl Shots {
    pub fn parse(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(Shots::Exact);
        }
        let n: u64 = s.parse().map_err(|_| Error::invalid(format!("shots must be a count or \"exact\", got {s:?}")))?;
        if n == 0 {
            return Err(Error::invalid("shots must be >= 1"));
        }
        Ok(Shots::Finite(n))
    }
}

impl std::fmt::Display for Shots {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Shots::Exact => f.write_str("exact"),
            Shots::Finite(n) => write!(f, "{n}"),
        }
    }
}

/// Default counts per setting for the binomial shot model.
pub const DEFAULT_SHOTS: u64 = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Depolarising weight mixed into each output state.
    pub white_noise_eps: f64,
    pub shots: Shots,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig { white_noise_eps: 0.0, shots: Shots::Finite(DEFAULT_SHOTS) }
    }
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        NoiseConfig { white_noise_eps: 0.0, shots: Shots::Exact }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.white_noise_eps) {
            return Err(Error::invalid(format!("white-noise eps {} not in [0,1]", self.white_noise_eps)));
        }
        if self.shots == Shots::Finite(0) {
            return Err(Error::invalid("shots must be >= 1"));
        }
        Ok(())
    }
}

/// `(1-ε) ρ + ε I/2`.
pub fn add_white_noise(rho: &DensityMatrix, eps: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::invalid(format!("white-noise eps {eps} not in [0,1]")));
    }
    let m = &rho.matrix().scale(1.0 - eps) + &ComplexMatrix::identity(2).scale(eps / 2.0);
    Ok(DensityMatrix::from_unchecked(m))
}

/// Finite-count estimate of a Stokes value: `c ~ Binomial(n, (1+s)/2)`,
/// returns `2c/n - 1`.
pub fn shot_noise<G: Rng + ?Sized>(s: f64, n: u64, rng: &mut G) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("shot count must be >= 1"));
    }
    if !s.is_finite() || s.abs() > 1.0 + 1e-9 {
        return Err(Error::invalid(format!("Stokes value {s} outside [-1, 1]")));
    }
    let p = ((1.0 + s) / 2.0).clamp(0.0, 1.0);
    let c = Binomial::new(n, p).map_err(|e| Error::Numerical(e.to_string()))?.sample(rng);
    Ok(2.0 * c as f64 / n as f64 - 1.0)
}
