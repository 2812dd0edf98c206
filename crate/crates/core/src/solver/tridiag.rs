use crate::error::{Error, Result};

/// Tridiagonal system `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
///
/// The last row may carry one extra coefficient on `x[n-2]` (`last_extra`),
/// which is eliminated against row `n-1` before the sweep. This lets a
/// three-point one-sided boundary condition sit in the final row.
#[derive(Debug, Clone, Default)]
pub(crate) struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
    pub last_extra: f64,
}

impl Tridiagonal {
    pub fn new(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            rhs: vec![0.0; n],
            last_extra: 0.0,
        }
    }

    pub fn identity_row(&mut self, i: usize, value: f64) {
        self.lower[i] = 0.0;
        self.diag[i] = 1.0;
        self.upper[i] = 0.0;
        self.rhs[i] = value;
        if i + 1 == self.diag.len() {
            self.last_extra = 0.0;
        }
    }

    /// Thomas algorithm. Fails on a vanishing pivot.
    pub fn solve(mut self) -> Result<Vec<f64>> {
        let n = self.diag.len();
        if self.last_extra != 0.0 && n >= 3 {
            let k = n - 2;
            if self.lower[k] == 0.0 {
                return Err(Error::Singular(n - 1));
            }
            let f = self.last_extra / self.lower[k];
            self.lower[n - 1] -= f * self.diag[k];
            self.diag[n - 1] -= f * self.upper[k];
            self.rhs[n - 1] -= f * self.rhs[k];
        }
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0];
        if denom.abs() < f64::MIN_POSITIVE * 1e10 || !denom.is_finite() {
            return Err(Error::Singular(0));
        }
        c[0] = self.upper[0] / denom;
        d[0] = self.rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.lower[i] * c[i - 1];
            if denom.abs() < f64::MIN_POSITIVE * 1e10 || !denom.is_finite() {
                return Err(Error::Singular(i));
            }
            c[i] = self.upper[i] / denom;
            d[i] = (self.rhs[i] - self.lower[i] * d[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}
