use super::eigen::hermitian_eigen;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tolerance;

/// Entropies are reported in bits unless a caller asks otherwise.
pub const DEFAULT_LOG_BASE: f64 = 2.0;

fn check_base(log_base: f64) -> Result<()> {
    if !(log_base.is_finite() && log_base > 0.0 && log_base != 1.0) {
        return Err(Error::invalid(format!("logarithm base {log_base} is not usable")));
    }
    Ok(())
}

/// `-Σ λ log λ` over a spectrum, with eigenvalues below the clamp set to 0.
pub fn entropy_of_spectrum(eigenvalues: &[f64], log_base: f64) -> f64 {
    let ln_base = log_base.ln();
    -eigenvalues
        .iter()
        .filter(|&&l| l > tolerance::EIGEN_CLAMP)
        .map(|&l| l * l.ln())
        .sum::<f64>()
        / ln_base
}

fn validate_state(rho: &ComplexMatrix, name: &str) -> Result<Vec<f64>> {
    let eig = hermitian_eigen(rho).map_err(|e| match e {
        Error::NotHermitian(x) => Error::InvalidState(format!("{name} is not Hermitian ({x:e})")),
        other => other,
    })?;
    let tr: f64 = eig.eigenvalues.iter().sum();
    if (tr - 1.0).abs() > tolerance::STATE_TRACE {
        return Err(Error::InvalidState(format!("{name} has trace {tr}")));
    }
    let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -tolerance::STATE_PSD {
        return Err(Error::InvalidState(format!("{name} has negative eigenvalue {min:e}")));
    }
    Ok(eig.eigenvalues)
}

/// Von Neumann entropy `-tr ρ log ρ`.
pub fn von_neumann_entropy(rho: &ComplexMatrix, log_base: f64) -> Result<f64> {
    check_base(log_base)?;
    let spectrum = validate_state(rho, "state")?;
    Ok(entropy_of_spectrum(&spectrum, log_base))
}

/// Quantum relative entropy `tr[a (log a - log b)]`.
///
/// `log b` is taken on the support of `b`. Any weight of `a` on the kernel
/// of `b` above the eigenvalue clamp is an infinite divergence.
pub fn relative_entropy(a: &ComplexMatrix, b: &ComplexMatrix, log_base: f64) -> Result<f64> {
    check_base(log_base)?;
    if a.rows() != b.rows() || !a.is_square() || !b.is_square() {
        return Err(Error::Dimension(format!(
            "relative entropy between {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let spec_a = validate_state(a, "first argument")?;
    validate_state(b, "second argument")?;
    let eb = hermitian_eigen(b)?;

    let ln_base = log_base.ln();
    let neg_entropy_a = -entropy_of_spectrum(&spec_a, log_base);

    // tr[a log b] = Σ_j log μ_j ⟨v_j|a|v_j⟩
    let n = a.rows();
    let mut cross = 0.0;
    for (j, &mu) in eb.eigenvalues.iter().enumerate() {
        let mut weight = 0.0;
        for r in 0..n {
            let vr = eb.eigenvectors[(r, j)];
            for c in 0..n {
                weight += (vr.conj() * a[(r, c)] * eb.eigenvectors[(c, j)]).re;
            }
        }
        if mu > tolerance::EIGEN_CLAMP {
            cross += weight * mu.ln() / ln_base;
        } else if weight > tolerance::EIGEN_CLAMP {
            return Err(Error::InfiniteDivergence(weight));
        }
    }
    Ok(neg_entropy_a - cross)
}
