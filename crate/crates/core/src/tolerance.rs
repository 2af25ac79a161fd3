//! Numerical tolerances shared by the library and its tests.

/// Max entry-wise `|M - M†|` for a matrix to count as Hermitian.
pub const HERMITIAN: f64 = 1e-10;
/// Max entry-wise `|U U† - I|` for a matrix to count as unitary.
pub const UNITARY: f64 = 1e-10;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// (scaled by `max(1, ‖M‖_F)`).
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-12;
/// Upper bound on cyclic Jacobi sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues below this are treated as exact zeros in entropies.
pub const EIGEN_CLAMP: f64 = 1e-12;
/// Most negative eigenvalue accepted for a density operator.
pub const STATE_PSD: f64 = 1e-10;
/// Unit-trace tolerance for density operators.
pub const STATE_TRACE: f64 = 1e-9;
/// Most negative eigenvalue accepted for a process matrix, and the
/// slack around zero inside which the measure is clamped.
pub const PROCESS_PSD: f64 = 1e-9;
/// Trace tolerance for process matrices (`tr W = 2`).
pub const PROCESS_TRACE: f64 = 1e-9;
/// Normalisation tolerance for probability tables.
pub const PMF_SUM: f64 = 1e-12;
/// Relative singular-value cutoff in least squares.
pub const SVD_CUTOFF: f64 = 1e-10;
