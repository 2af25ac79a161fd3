use rand::Rng;

use super::PauliIndex;
use crate::error::{Error, Result};
use crate::tolerance;

/// Joint distribution `p(i, j)` over the Pauli pair `(U_i, U_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPmf {
    table: [[f64; 4]; 4],
}

impl JointPmf {
    pub fn from_table(table: [[f64; 4]; 4]) -> Result<Self> {
        let mut sum = 0.0;
        for row in &table {
            for &x in row {
                if !(x.is_finite() && x >= 0.0) {
                    return Err(Error::invalid(format!("pmf entry {x} is not a nonnegative number")));
                }
                sum += x;
            }
        }
        if (sum - 1.0).abs() > tolerance::PMF_SUM {
            return Err(Error::invalid(format!("pmf sums to {sum}")));
        }
        Ok(JointPmf { table })
    }

    /// Point mass on a single pair.
    pub fn delta(i: PauliIndex, j: PauliIndex) -> Self {
        let mut table = [[0.0; 4]; 4];
        table[i.value()][j.value()] = 1.0;
        JointPmf { table }
    }

    pub fn get(&self, i: PauliIndex, j: PauliIndex) -> f64 {
        self.table[i.value()][j.value()]
    }

    pub fn table(&self) -> &[[f64; 4]; 4] {
        &self.table
    }

    /// Row-major flattening, index `4 i + j`.
    pub fn flat(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                out[4 * i + j] = self.table[i][j];
            }
        }
        out
    }

    pub fn first_marginal(&self) -> [f64; 4] {
        let mut m = [0.0; 4];
        for (i, row) in self.table.iter().enumerate() {
            m[i] = row.iter().sum();
        }
        m
    }

    pub fn second_marginal(&self) -> [f64; 4] {
        let mut m = [0.0; 4];
        for row in &self.table {
            for (j, &x) in row.iter().enumerate() {
                m[j] += x;
            }
        }
        m
    }

    /// Convex combination `α self + (1-α) other`.
    pub fn mix(&self, other: &JointPmf, alpha: f64) -> Result<JointPmf> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(format!("mixing weight {alpha} not in [0,1]")));
        }
        let mut table = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                table[i][j] = alpha * self.table[i][j] + (1.0 - alpha) * other.table[i][j];
            }
        }
        Ok(JointPmf { table })
    }
}

fn validate_marginal(marginal: &[f64; 4]) -> Result<()> {
    if marginal.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
        return Err(Error::invalid(format!("marginal {marginal:?} has a negative or non-finite entry")));
    }
    let sum: f64 = marginal.iter().sum();
    if (sum - 1.0).abs() > tolerance::PMF_SUM {
        return Err(Error::invalid(format!("marginal sums to {sum}")));
    }
    Ok(())
}

/// Parameters of the correlated pmf: correlation strength `q`, identity
/// bias `R` and the shared marginal.
#[derive(Clone, Debug, PartialEq)]
pub struct PmfParams {
    pub q: f64,
    pub r: f64,
    pub marginal: [f64; 4],
}

impl PmfParams {
    pub fn new(q: f64, r: f64, marginal: [f64; 4]) -> Result<Self> {
        check_q(q)?;
        check_r(r)?;
        validate_marginal(&marginal)?;
        Ok(PmfParams { q, r, marginal })
    }

    pub fn joint(&self) -> JointPmf {
        joint_pmf(&self.marginal, self.q).expect("validated at construction")
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("correlation strength q = {q} not in [0,1]")));
    }
    Ok(())
}

fn check_r(r: f64) -> Result<()> {
    if !(r.is_finite() && r >= 1.0) {
        return Err(Error::invalid(format!("identity bias R = {r} must be a finite number >= 1")));
    }
    Ok(())
}

/// Random marginal: `p(0) ~ U(0, R)`, `p(1..3) ~ U(0, 1)`, then normalised.
pub fn sample_marginal<G: Rng + ?Sized>(r: f64, rng: &mut G) -> Result<[f64; 4]> {
    check_r(r)?;
    loop {
        let raw = [
            rng.random::<f64>() * r,
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random::<f64>(),
        ];
        let sum: f64 = raw.iter().sum();
        if sum > 0.0 {
            return Ok(raw.map(|x| x / sum));
        }
    }
}

/// `p(i,j) = p(i) [q δ_ij + (1-q) p(j)]`.
pub fn joint_pmf(marginal: &[f64; 4], q: f64) -> Result<JointPmf> {
    check_q(q)?;
    validate_marginal(marginal)?;
    let mut table = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let delta = if i == j { q } else { 0.0 };
            table[i][j] = marginal[i] * (delta + (1.0 - q) * marginal[j]);
        }
    }
    JointPmf::from_table(table)
}

/// Relative frequencies of `n` i.i.d. pair draws from `p`.
pub fn empirical_pmf<G: Rng + ?Sized>(p: &JointPmf, n: usize, rng: &mut G) -> Result<JointPmf> {
    if n == 0 {
        return Err(Error::invalid("empirical pmf needs at least one sample"));
    }
    let flat = p.flat();
    let mut cumulative = [0.0; 16];
    let mut acc = 0.0;
    for (c, &x) in cumulative.iter_mut().zip(&flat) {
        acc += x;
        *c = acc;
    }
    let last_positive = flat.iter().rposition(|&x| x > 0.0).expect("pmf has positive mass");

    let mut counts = [0usize; 16];
    for _ in 0..n {
        let u: f64 = rng.random::<f64>() * acc;
        let k = cumulative.iter().position(|&c| c > u).unwrap_or(last_positive);
        counts[k] += 1;
    }
    let mut table = [[0.0; 4]; 4];
    for (k, &c) in counts.iter().enumerate() {
        table[k / 4][k % 4] = c as f64 / n as f64;
    }
    Ok(JointPmf { table })
}
