//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the classical real Jacobi rotation that annihilates
//! the now-real pivot. The accumulated product of these unitaries gives the
//! eigenvector matrix. Sweeps visit every pair `p < q` in row order.

use super::matrix::{c64, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tolerance;

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector for `eigenvalues[i]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_real_diagonal(&self.eigenvalues);
        &(&self.eigenvectors * &d) * &self.eigenvectors.dagger()
    }

    /// `V f(Λ) V†` for a real spectral function.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let d = ComplexMatrix::from_real_diagonal(&vals);
        &(&self.eigenvectors * &d) * &self.eigenvectors.dagger()
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Rejects input whose Hermiticity error exceeds [`tolerance::HERMITIAN`];
/// the Hermitian part is diagonalised.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("eigenproblem on a {}x{} matrix", m.rows(), m.cols())));
    }
    if !m.is_finite() {
        return Err(Error::Numerical("non-finite entries in eigenproblem".into()));
    }
    let herr = m.hermiticity_error();
    if herr > tolerance::HERMITIAN {
        return Err(Error::NotHermitian(herr));
    }

    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = tolerance::JACOBI_OFF_DIAGONAL * m.frobenius_norm().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off < threshold {
            break;
        }
        if sweeps >= tolerance::JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));

    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors[(r, col)] = v[(r, src)];
        }
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // D = diag(1, e^{-iφ}) makes the pivot real and equal to r.
    let phase = (apq / r).conj();

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J = D·G, acting on the (p, q) plane.
    let jpp = c64::new(c, 0.0);
    let jpq = c64::new(s, 0.0);
    let jqp = phase * (-s);
    let jqq = phase * c;

    let n = a.rows();
    // A ← A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // A ← J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = c64::new(0.0, 0.0);
    a[(q, p)] = c64::new(0.0, 0.0);
    a[(p, p)] = c64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = c64::new(a[(q, q)].re, 0.0);
    // V ← V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}
