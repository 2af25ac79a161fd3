//! What an experimenter sees: probe unitaries at station A, Pauli
//! measurements at station B, and the labelled Stokes datasets built from
//! them.

mod dataset;
mod noise;

pub use dataset::{
    generate_dataset, generate_row, standard_pairs, DatasetRow, GenerationPlan, MeasurementSet, PmfSampling,
};
pub use noise::{add_white_noise, shot_noise, NoiseConfig, Shots};

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, I};
use crate::process::{
    born_probability, effect_choi, operation_choi, pauli, DensityMatrix, JointPmf, PauliIndex, ProcessMatrix,
};

/// Rotation angle `α` and axis angles `β`, `γ` of the probe rotation.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProbeConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { alpha: PI / 8.0, beta: PI / 8.0, gamma: PI / 8.0 }
    }
}

impl ProbeConfig {
    /// Angles reduced into `[0, 2π)`.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let cfg = ProbeConfig { alpha, beta, gamma };
        cfg.validate()?;
        Ok(cfg.canonical())
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.alpha, self.beta, self.gamma].iter().all(|a| a.is_finite()) {
            return Err(Error::invalid(format!("probe angles must be finite: {self:?}")));
        }
        Ok(())
    }

    pub fn canonical(&self) -> Self {
        ProbeConfig { alpha: self.alpha.rem_euclid(TAU), beta: self.beta.rem_euclid(TAU), gamma: self.gamma.rem_euclid(TAU) }
    }
}

/// `R_n(α) = cos(α/2) I - i sin(α/2) n·σ`, with
/// `n·σ = sinβ sinγ σ₁ + cosβ sinγ σ₂ + cosγ σ₃`.
pub fn rotation_unitary(cfg: &ProbeConfig) -> ComplexMatrix {
    let ProbeConfig { alpha, beta, gamma } = *cfg;
    let (nx, ny, nz) = (beta.sin() * gamma.sin(), beta.cos() * gamma.sin(), gamma.cos());
    let axis = &(&pauli(PauliIndex::X).scale(nx) + &pauli(PauliIndex::Y).scale(ny)) + &pauli(PauliIndex::Z).scale(nz);
    let half = alpha / 2.0;
    &ComplexMatrix::identity(2).scale(half.cos()) - &axis.scale_complex(I * half.sin())
}

/// `U_k = R σ_k R†` for `k ∈ {0, 1, 2}`.
pub fn probe_unitary(k: PauliIndex, cfg: &ProbeConfig) -> Result<ComplexMatrix> {
    if k.value() > 2 {
        return Err(Error::invalid(format!("probe index {k} not in {{I, X, Y}}")));
    }
    if k == PauliIndex::I {
        return Ok(ComplexMatrix::identity(2));
    }
    pauli(k).conjugate_by(&rotation_unitary(cfg))
}

/// The three probes `U_0, U_1, U_2` for a configuration.
pub fn probe_set(cfg: &ProbeConfig) -> [ComplexMatrix; 3] {
    [PauliIndex::I, PauliIndex::X, PauliIndex::Y].map(|k| probe_unitary(k, cfg).expect("k < 3"))
}

/// `ρ_k = Σ_ij p(i,j) (U_j U_k U_i) ρ (U_j U_k U_i)†` with `U_i = σ_i`, `U_j = σ_j`.
pub fn output_state(p: &JointPmf, rho: &DensityMatrix, u_k: &ComplexMatrix) -> Result<DensityMatrix> {
    if u_k.rows() != 2 || u_k.cols() != 2 {
        return Err(Error::Dimension(format!("probe must be 2x2, got {}x{}", u_k.rows(), u_k.cols())));
    }
    let sigmas = PauliIndex::ALL.map(pauli);
    let mut acc = ComplexMatrix::zeros(2, 2);
    for i in PauliIndex::ALL {
        for j in PauliIndex::ALL {
            let w = p.get(i, j);
            if w == 0.0 {
                continue;
            }
            let total = &(&sigmas[j.value()] * u_k) * &sigmas[i.value()];
            acc = &acc + &rho.matrix().conjugate_by(&total)?.scale(w);
        }
    }
    Ok(DensityMatrix::from_unchecked(acc.hermitian_part()))
}

/// Stokes parameter `tr(σ_l ρ)`; exactly 1 for `l = 0`.
pub fn stokes(rho: &DensityMatrix, l: PauliIndex) -> f64 {
    if l == PauliIndex::I {
        return 1.0;
    }
    rho.expectation(l).clamp(-1.0, 1.0)
}

/// The same Stokes parameter from the process matrix: the probe enters as
/// the transposed-convention Choi of `ρ ↦ U_k ρ U_k†` on `A_I A_O`, the
/// observable as the transposed-convention Choi of `ρ ↦ tr(σ_l ρ)` on `B_I`.
pub fn stokes_via_contraction(w: &ProcessMatrix, u_k: &ComplexMatrix, l: PauliIndex) -> Result<f64> {
    let probe = operation_choi(u_k)?;
    let observable = effect_choi(&pauli(l))?;
    born_probability(w, &probe, &observable)
}

/// Angle-free helper for tests and callers that already hold `n̂`.
pub fn axis_components(cfg: &ProbeConfig) -> [f64; 3] {
    [cfg.beta.sin() * cfg.gamma.sin(), cfg.beta.cos() * cfg.gamma.sin(), cfg.gamma.cos()]
}
