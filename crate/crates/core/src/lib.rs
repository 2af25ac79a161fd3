//! Two-station quantum processes with classical memory.
//!
//! The crate builds process matrices on `A_I ⊗ A_O ⊗ B_I` from correlated
//! random Pauli pairs, labels them with a relative-entropy non-Markovianity
//! measure, simulates the Stokes-parameter data an experimenter would see
//! through three probe unitaries, and fits regression models that predict
//! the label from those nine tomographically incomplete numbers.
//!
//! Module map:
//!
//! * [`linalg`]: dense complex matrices, partial traces, Hermitian Jacobi
//!   eigensolver, entropies.
//! * [`process`]: Pauli-pair processes, the correlated pmf, the measure.
//! * [`simulate`]: probes, output states, Stokes features, noise, datasets.
//! * [`learn`]: polynomial least squares, KNN, metrics, splits, CV, sweeps.
//! * [`cli`]: the `nonmarkov` command-line driver and file formats.

pub mod cli;
pub mod error;
pub mod learn;
pub mod linalg;
pub mod process;
pub mod rng;
pub mod simulate;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::{c64, ComplexMatrix, EigenDecomposition};
pub use process::{DensityMatrix, JointPmf, PauliIndex, PmfParams, ProcessMatrix};
pub use simulate::{DatasetRow, GenerationPlan, MeasurementSet, NoiseConfig, ProbeConfig, Shots};
