use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(non_camel_case_types)]
pub type c64 = Complex64;

pub const ZERO: c64 = c64::new(0.0, 0.0);
pub const ONE: c64 = c64::new(1.0, 0.0);
pub const I: c64 = c64::new(0.0, 1.0);

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<c64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<c64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Builds a matrix from nested rows; panics on ragged input.
    pub fn from_rows<R: AsRef<[c64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.as_ref().len(), c, "ragged rows");
            data.extend_from_slice(row.as_ref());
        }
        ComplexMatrix { rows: r, cols: c, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = c64::new(d, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|`.
    pub fn outer(v: &[c64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[c64] {
        &self.data
    }

    pub fn trace(&self) -> c64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(c64) -> c64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: c64) -> Self {
        self.map(|z| z * s)
    }

    /// Matrix product; errors on inner-dimension mismatch.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// `A B A†`.
    pub fn conjugate_by(&self, a: &Self) -> Result<Self> {
        a.matmul(self)?.matmul(&a.dagger())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max entry-wise deviation from Hermiticity; infinite for non-square input.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut err: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let prod = self.matmul(&self.dagger()).expect("square");
        prod.max_abs_diff(&Self::identity(self.rows))
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let d = self.dagger();
        let mut out = self.clone();
        for (o, x) in out.data.iter_mut().zip(&d.data) {
            *o = (*o + x) * 0.5;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = c64;
    fn index(&self, (i, j): (usize, usize)) -> &c64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut c64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

fn zip_with(a: &ComplexMatrix, b: &ComplexMatrix, f: impl Fn(c64, c64) -> c64) -> ComplexMatrix {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols), "shape mismatch in element-wise op");
    ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

/// Panicking product for fixed-shape internal code; use [`ComplexMatrix::matmul`]
/// when shapes come from callers.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix shapes")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let s = a[(ai, aj)];
            if s == ZERO {
                continue;
            }
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    out[(ai * b.rows + bi, aj * b.cols + bj)] = s * b[(bi, bj)];
                }
            }
        }
    }
    out
}

fn unravel(mut idx: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = idx % d;
        idx /= d;
    }
}

/// Trace out every factor not listed in `keep`.
///
/// `factor_dims` lists the tensor factors in order; the result acts on the
/// kept factors in their original order. An empty `keep` returns the 1x1
/// matrix holding the full trace.
pub fn partial_trace(m: &ComplexMatrix, factor_dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = factor_dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::Dimension(format!(
            "factor dims {factor_dims:?} (product {total}) do not match a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = factor_dims.len();
    let mut kept = vec![false; n];
    for &k in keep {
        if k >= n {
            return Err(Error::Dimension(format!("factor index {k} out of range for {n} factors")));
        }
        kept[k] = true;
    }
    let kept_dims: Vec<usize> = (0..n).filter(|&f| kept[f]).map(|f| factor_dims[f]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);

    let mut ri = vec![0usize; n];
    let mut ci = vec![0usize; n];
    for r in 0..total {
        unravel(r, factor_dims, &mut ri);
        for c in 0..total {
            unravel(c, factor_dims, &mut ci);
            // traced factors must agree between row and column
            if (0..n).any(|f| !kept[f] && ri[f] != ci[f]) {
                continue;
            }
            let (mut orow, mut ocol) = (0, 0);
            for f in (0..n).filter(|&f| kept[f]) {
                orow = orow * factor_dims[f] + ri[f];
                ocol = ocol * factor_dims[f] + ci[f];
            }
            out[(orow, ocol)] += m[(r, c)];
        }
    }
    Ok(out)
}
