//! Relative-entropy non-Markovianity of a two-station process.
//!
//! With `W̃ = W/2`, the Markovian reference is the product of the `A_I`
//! marginal and the `A_O B_I` marginal of `W̃`. The relative entropy to that
//! product equals the mutual information between `A_I` and `A_O B_I`, which
//! is what [`non_markovianity`] evaluates; [`non_markovianity_direct`] keeps
//! the relative-entropy route as an independent check.

use super::{ProcessMatrix, PROCESS_FACTORS};
use crate::error::{Error, Result};
use crate::linalg::{entropy_of_spectrum, hermitian_eigen, kron, partial_trace, relative_entropy, ComplexMatrix};
use crate::tolerance;

/// Marginals of a unit-trace process: `tr_{A_O B_I} W̃` and `tr_{A_I} W̃`.
#[derive(Clone, Debug)]
pub struct MarkovMarginals {
    pub initial: ComplexMatrix,
    pub channel: ComplexMatrix,
}

impl MarkovMarginals {
    pub fn of(w_tilde: &ComplexMatrix) -> Result<Self> {
        Ok(MarkovMarginals {
            initial: partial_trace(w_tilde, &PROCESS_FACTORS, &[0])?,
            channel: partial_trace(w_tilde, &PROCESS_FACTORS, &[1, 2])?,
        })
    }

    pub fn product(&self) -> ComplexMatrix {
        kron(&self.initial, &self.channel)
    }
}

/// `tr_{A_O B_I} W̃ ⊗ tr_{A_I} W̃` for a unit-trace process.
pub fn markov_projection(w_tilde: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(MarkovMarginals::of(w_tilde)?.product())
}

/// Spectrum of a process-derived operator with round-off negatives clamped.
fn clamped_spectrum(m: &ComplexMatrix, what: &str) -> Result<Vec<f64>> {
    let eig = hermitian_eigen(m)?;
    let mut vals = eig.eigenvalues;
    for v in vals.iter_mut() {
        if *v < -tolerance::PROCESS_PSD {
            return Err(Error::InvalidState(format!("{what} has eigenvalue {v:e}")));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(vals)
}

fn check_process(w: &ProcessMatrix) -> Result<ComplexMatrix> {
    let m = w.matrix();
    if m.rows() != 8 || m.cols() != 8 {
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
    Ok(w.normalized())
}

fn clamp_measure(x: f64) -> Result<f64> {
    if x < -tolerance::PROCESS_PSD {
        return Err(Error::Numerical(format!("non-Markovianity evaluated to {x:e}")));
    }
    Ok(if x.abs() <= tolerance::PROCESS_PSD { x.max(0.0) } else { x })
}

/// `S(W̃ ‖ W̃_Markov)` via `S(ρ_{A_I}) + S(T̃_{A_O B_I}) - S(W̃)`.
pub fn non_markovianity(w: &ProcessMatrix, log_base: f64) -> Result<f64> {
    if !(log_base.is_finite() && log_base > 0.0 && log_base != 1.0) {
        return Err(Error::invalid(format!("logarithm base {log_base} is not usable")));
    }
    let w_tilde = check_process(w)?;
    let marginals = MarkovMarginals::of(&w_tilde)?;
    let s_joint = entropy_of_spectrum(&clamped_spectrum(&w_tilde, "W̃")?, log_base);
    let s_initial = entropy_of_spectrum(&clamped_spectrum(&marginals.initial, "A_I marginal")?, log_base);
    let s_channel = entropy_of_spectrum(&clamped_spectrum(&marginals.channel, "A_O B_I marginal")?, log_base);
    clamp_measure(s_initial + s_channel - s_joint)
}

/// The same quantity as [`non_markovianity`], from
/// `tr[W̃ (log W̃ - log W̃_Markov)]` evaluated directly.
pub fn non_markovianity_direct(w: &ProcessMatrix, log_base: f64) -> Result<f64> {
    let w_tilde = check_process(w)?;
    let markov = markov_projection(&w_tilde)?;
    clamp_measure(relative_entropy(&w_tilde, &markov, log_base)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::von_neumann_entropy;
    use crate::process::{joint_pmf, mixed_process, prepared_state, DensityMatrix, PauliIndex};
    use crate::rng;
    use crate::process::{pauli, sample_marginal};

    #[test]
    fn product_process_is_markovian() {
        let rho = prepared_state();
        let w = mixed_process(&joint_pmf(&[0.4, 0.3, 0.2, 0.1], 0.0).unwrap(), &rho);
        assert!(non_markovianity(&w, 2.0).unwrap().abs() < 1e-9);
        assert!(non_markovianity_direct(&w, 2.0).unwrap().abs() < 1e-9);
    }

    #[test]
    fn uniform_full_correlation_is_one_bit() {
        let w = mixed_process(&joint_pmf(&[0.25; 4], 1.0).unwrap(), &prepared_state());
        assert!((non_markovianity(&w, 2.0).unwrap() - 1.0).abs() < 1e-9);
        let nats = non_markovianity(&w, std::f64::consts::E).unwrap();
        assert!((nats - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn full_correlation_matches_twirl_entropy() {
        let rho = prepared_state();
        let m = [0.5, 0.2, 0.2, 0.1];
        let w = mixed_process(&joint_pmf(&m, 1.0).unwrap(), &rho);
        let mut twirl = ComplexMatrix::zeros(2, 2);
        for k in PauliIndex::ALL {
            twirl = &twirl + &rho.matrix().conjugate_by(&pauli(k)).unwrap().scale(m[k.value()]);
        }
        let want = von_neumann_entropy(&twirl, 2.0).unwrap();
        assert!((non_markovianity(&w, 2.0).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn markov_projection_properties() {
        let rho = prepared_state();
        let w = mixed_process(&joint_pmf(&[0.4, 0.3, 0.2, 0.1], 0.6).unwrap(), &rho).normalized();
        let m = markov_projection(&w).unwrap();
        assert!((m.trace().re - 1.0).abs() < 1e-14);
        let a_in = partial_trace(&w, &PROCESS_FACTORS, &[0]).unwrap();
        let a_out = partial_trace(&m, &PROCESS_FACTORS, &[0]).unwrap();
        assert!(a_in.max_abs_diff(&a_out) < 1e-14);
        // fixed point on product input
        let prod = mixed_process(&joint_pmf(&[0.4, 0.3, 0.2, 0.1], 0.0).unwrap(), &rho).normalized();
        assert!(markov_projection(&prod).unwrap().max_abs_diff(&prod) < 1e-14);
    }

    #[test]
    fn rejects_bad_process() {
        let w = ProcessMatrix::from_unchecked(ComplexMatrix::identity(8));
        assert!(matches!(non_markovianity(&w, 2.0), Err(Error::InvalidState(_))));
        let w = mixed_process(&joint_pmf(&[0.25; 4], 0.5).unwrap(), &DensityMatrix::maximally_mixed());
        assert!(non_markovianity(&w, -1.0).is_err());
    }

    #[test]
    fn dual_routes_agree_and_stay_in_range() {
        let rho = prepared_state();
        let mut g = rng::stream(5);
        let mut best = (f64::NEG_INFINITY, 0.0);
        for step in 0..5 {
            let q = step as f64 * 0.25;
            let m = [0.4, 0.3, 0.2, 0.1];
            let w = mixed_process(&joint_pmf(&m, q).unwrap(), &rho);
            let x = non_markovianity(&w, 2.0).unwrap();
            if x > best.0 {
                best = (x, q);
            }
        }
        assert_eq!(best.1, 1.0);
        for _ in 0..200 {
            let r = 1.0 + 4.0 * rand::Rng::random::<f64>(&mut g);
            let q = rand::Rng::random::<f64>(&mut g);
            let m = sample_marginal(r, &mut g).unwrap();
            let w = mixed_process(&joint_pmf(&m, q).unwrap(), &rho);
            let a = non_markovianity(&w, 2.0).unwrap();
            let b = non_markovianity_direct(&w, 2.0).unwrap();
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            assert!((-1e-9..=1.0 + 1e-9).contains(&a));
        }
    }
}
