//! Two-station processes with classical memory.
//!
//! All process matrices act on `A_I ⊗ A_O ⊗ B_I` in that order, each factor a
//! qubit, computational basis row-major. Channels inside a process use the
//! Choi convention without transposition; operations inserted into it
//! (probe instruments, measurement effects) use the transposed convention.

mod measure;
mod pmf;

pub use measure::{markov_projection, non_markovianity, non_markovianity_direct, MarkovMarginals};
pub use pmf::{empirical_pmf, joint_pmf, sample_marginal, JointPmf, PmfParams};

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{c64, kron, ComplexMatrix, I, ONE, ZERO};
use crate::tolerance;

/// Tensor-factor dimensions of a process matrix, `(A_I, A_O, B_I)`.
pub const PROCESS_FACTORS: [usize; 3] = [2, 2, 2];
pub const PROCESS_DIM: usize = 8;

/// Index of a Pauli operator: 0 = I, 1 = X, 2 = Y, 3 = Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliIndex(u8);

impl PauliIndex {
    pub const I: PauliIndex = PauliIndex(0);
    pub const X: PauliIndex = PauliIndex(1);
    pub const Y: PauliIndex = PauliIndex(2);
    pub const Z: PauliIndex = PauliIndex(3);
    pub const ALL: [PauliIndex; 4] = [Self::I, Self::X, Self::Y, Self::Z];

    pub fn new(value: usize) -> Result<Self> {
        if value > 3 {
            return Err(Error::invalid(format!("Pauli index {value} not in 0..=3")));
        }
        Ok(PauliIndex(value as u8))
    }

    pub fn value(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["I", "X", "Y", "Z"][self.value()])
    }
}

/// The 2x2 Pauli matrix `σ_i`.
pub fn pauli(i: PauliIndex) -> ComplexMatrix {
    match i.value() {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]]),
        2 => ComplexMatrix::from_rows(&[[ZERO, -I], [I, ZERO]]),
        _ => ComplexMatrix::from_rows(&[[ONE, ZERO], [ZERO, -ONE]]),
    }
}

/// A qubit density operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates a 2x2 Hermitian, unit-trace, positive semidefinite operator.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::Dimension(format!("density matrix must be 2x2, got {}x{}", m.rows(), m.cols())));
        }
        let herr = m.hermiticity_error();
        if herr > tolerance::HERMITIAN {
            return Err(Error::InvalidState(format!("not Hermitian ({herr:e})")));
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > tolerance::STATE_TRACE {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        // 2x2: PSD iff trace ≥ 0 and determinant ≥ 0
        let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re;
        if det < -tolerance::STATE_PSD {
            return Err(Error::InvalidState(format!("negative eigenvalue (det {det:e})")));
        }
        Ok(DensityMatrix(m))
    }

    /// Pure state from an amplitude pair, renormalised.
    pub fn pure(a0: c64, a1: c64) -> Result<Self> {
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid("zero or non-finite state vector"));
        }
        Self::new(ComplexMatrix::outer(&[a0 / norm, a1 / norm]))
    }

    pub(crate) fn from_unchecked(m: ComplexMatrix) -> Self {
        DensityMatrix(m)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(ComplexMatrix::identity(2).scale(0.5))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    /// `tr(σ_l ρ)`.
    pub fn expectation(&self, l: PauliIndex) -> f64 {
        (&pauli(l) * &self.0).trace().re
    }
}

/// Unnormalised amplitudes of the prepared probe-input state,
/// `0.16|0⟩ + 0.99 e^{-i 0.16π}|1⟩`.
pub const PREPARED_AMPLITUDES: (f64, f64, f64) = (0.16, 0.99, 0.16);

/// The prepared input state `|ψ⟩⟨ψ|`, with the amplitudes renormalised
/// (`0.16² + 0.99² = 1.0057`).
pub fn prepared_state() -> DensityMatrix {
    let (a0, a1, phase_turns) = PREPARED_AMPLITUDES;
    let phase = c64::from_polar(1.0, -phase_turns * std::f64::consts::PI);
    DensityMatrix::pure(c64::new(a0, 0.0), phase * a1).expect("prepared state is valid")
}

/// Choi operator of `ρ ↦ U ρ U†` without transposition:
/// `Σ_{jk} |j⟩⟨k| ⊗ U|j⟩⟨k|U† = |U⟩⟩⟨⟨U|`.
pub fn choi_unitary(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::Dimension(format!("expected a 2x2 unitary, got {}x{}", u.rows(), u.cols())));
    }
    let err = u.unitarity_error();
    if err > tolerance::UNITARY {
        return Err(Error::NotUnitary(err));
    }
    Ok(choi_unchecked(u))
}

fn choi_unchecked(u: &ComplexMatrix) -> ComplexMatrix {
    // |U⟩⟩ = Σ_j |j⟩ ⊗ U|j⟩, entry (j, m) = U[m, j]
    let vec: Vec<c64> = (0..2).flat_map(|j| (0..2).map(move |m| (j, m))).map(|(j, m)| u[(m, j)]).collect();
    ComplexMatrix::outer(&vec)
}

/// A process matrix on `A_I ⊗ A_O ⊗ B_I`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessMatrix(ComplexMatrix);

impl ProcessMatrix {
    /// Validates shape, Hermiticity, `tr W = 2` and positivity.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let w = ProcessMatrix(m);
        w.validate()?;
        Ok(w)
    }

    #[cfg(test)]
    pub(crate) fn from_unchecked(m: ComplexMatrix) -> Self {
        ProcessMatrix(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// `W̃ = W / d_{A_O}`.
    pub fn normalized(&self) -> ComplexMatrix {
        self.0.scale(0.5)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.0;
        if m.rows() != PROCESS_DIM || m.cols() != PROCESS_DIM {
            return Err(Error::Dimension(format!("process matrix must be 8x8, got {}x{}", m.rows(), m.cols())));
        }
        let herr = m.hermiticity_error();
        if herr > tolerance::HERMITIAN {
            return Err(Error::InvalidState(format!("process matrix not Hermitian ({herr:e})")));
        }
        let tr = m.trace().re;
        if (tr - 2.0).abs() > tolerance::PROCESS_TRACE {
            return Err(Error::InvalidState(format!("process matrix trace {tr}, expected 2")));
        }
        let eig = crate::linalg::hermitian_eigen(m)?;
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -tolerance::PROCESS_PSD {
            return Err(Error::InvalidState(format!("process matrix has eigenvalue {min:e}")));
        }
        Ok(())
    }
}

/// Choi operator, in the transposed convention, of the operation
/// `ρ ↦ U ρ U†` inserted at station A: `|U*⟩⟩⟨⟨U*|`.
pub fn operation_choi(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(choi_unitary(u)?.transpose())
}

/// Choi operator, in the transposed convention, of the functional
/// `ρ ↦ tr(E ρ)` at the final station. The untransposed Choi of this
/// functional is `Eᵀ`, so the transposed one is `E` itself.
pub fn effect_choi(effect: &ComplexMatrix) -> Result<ComplexMatrix> {
    if effect.rows() != 2 || effect.cols() != 2 {
        return Err(Error::Dimension(format!("effect must be 2x2, got {}x{}", effect.rows(), effect.cols())));
    }
    Ok(effect.clone())
}

/// `tr[W (M_A ⊗ M_B)]` for a 4x4 operation Choi on `A_I A_O` and a 2x2
/// effect Choi on `B_I`, both in the transposed convention (see
/// [`operation_choi`] and [`effect_choi`]).
pub fn born_probability(w: &ProcessMatrix, m_a: &ComplexMatrix, m_b: &ComplexMatrix) -> Result<f64> {
    if m_a.rows() != 4 || m_a.cols() != 4 {
        return Err(Error::Dimension(format!("A-station Choi must be 4x4, got {}x{}", m_a.rows(), m_a.cols())));
    }
    if m_b.rows() != 2 || m_b.cols() != 2 {
        return Err(Error::Dimension(format!("B-station effect must be 2x2, got {}x{}", m_b.rows(), m_b.cols())));
    }
    let op = kron(m_a, m_b);
    Ok(trace_of_product(w.matrix(), &op).re)
}

/// `tr(A B)` without forming the product.
pub(crate) fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> c64 {
    let n = a.rows();
    let mut s = ZERO;
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s
}

/// `W_ij = σ_i ρ σ_i† ⊗ |σ_j⟩⟩⟨⟨σ_j|`.
pub fn constituent_process(i: PauliIndex, j: PauliIndex, rho: &DensityMatrix) -> ProcessMatrix {
    let s = pauli(i);
    let first = rho.matrix().conjugate_by(&s).expect("2x2");
    ProcessMatrix(kron(&first, &choi_unchecked(&pauli(j))))
}

/// `W = Σ_ij p(i,j) W_ij`.
pub fn mixed_process(p: &JointPmf, rho: &DensityMatrix) -> ProcessMatrix {
    let mut acc = ComplexMatrix::zeros(PROCESS_DIM, PROCESS_DIM);
    for i in PauliIndex::ALL {
        for j in PauliIndex::ALL {
            let w = p.get(i, j);
            if w == 0.0 {
                continue;
            }
            acc = &acc + &constituent_process(i, j, rho).0.scale(w);
        }
    }
    ProcessMatrix(acc)
}
