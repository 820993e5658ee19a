//! Small dense/sparse solve helpers shared by the harmonic and Green-function code.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Systems at or below this size go through a dense LU factorization.
pub const DENSE_LIMIT: usize = 600;

/// Sparse symmetric positive-definite operator in row-list form.
pub struct SparseSpd {
    pub diag: Vec<f64>,
    pub off: Vec<Vec<(usize, f64)>>,
}

impl SparseSpd {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.len() {
            let mut s = self.diag[i] * x[i];
            for &(j, a) in &self.off[i] {
                s += a * x[j];
            }
            out[i] = s;
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for &(j, a) in &self.off[i] {
                m[(i, j)] += a;
            }
        }
        m
    }

    /// Solve `A x = b`. Dense LU for small systems, Jacobi-preconditioned CG otherwise.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if n == 0 {
            return Ok(Vec::new());
        }
        if n <= DENSE_LIMIT {
            return solve_dense(self.to_dense(), b);
        }
        self.conjugate_gradient(b, 1e-14, 20 * n + 1000)
    }

    /// Solve for several right-hand sides, factoring once when dense.
    pub fn solve_many(&self, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let n = self.len();
        if n == 0 {
            return Ok(vec![Vec::new(); rhs.len()]);
        }
        if n > DENSE_LIMIT {
            return rhs
                .iter()
                .map(|b| self.conjugate_gradient(b, 1e-14, 20 * n + 1000))
                .collect();
        }
        let lu = self.to_dense().lu();
        rhs.iter()
            .map(|b| {
                lu.solve(&DVector::from_column_slice(b))
                    .map(|x| x.iter().copied().collect())
                    .ok_or_else(|| Error::Numerical("singular linear system".into()))
            })
            .collect()
    }

    fn conjugate_gradient(&self, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let n = self.len();
        let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if bnorm == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&self.diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        for _ in 0..max_iter {
            self.apply(&p, &mut ap);
            let alpha = rz / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if r.iter().map(|v| v * v).sum::<f64>().sqrt() <= tol * bnorm {
                return Ok(x);
            }
            for i in 0..n {
                z[i] = r[i] / self.diag[i];
            }
            let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::Numerical(
            "conjugate gradient did not converge".into(),
        ))
    }
}

pub fn solve_dense(a: DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    if b.is_empty() {
        return Ok(Vec::new());
    }
    let rhs = DVector::from_column_slice(b);
    a.lu()
        .solve(&rhs)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::Numerical("singular linear system".into()))
}

pub fn invert(a: DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.try_inverse()
        .ok_or_else(|| Error::Numerical("singular matrix".into()))
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
