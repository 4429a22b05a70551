//! Envelope (skyline) direct factorizations. Fill is confined to the profile
//! of the matrix, which keeps banded discretization matrices cheap to factor.

use crate::error::{check_len, Error, Result};
use crate::sparse::vector::dot_unchecked;
use crate::sparse::CsrMatrix;

/// Envelope start of every row: smallest column `j ≤ i` that is nonzero in
/// row `i` or (when `symmetric_profile`) in column `i`.
fn envelope(m: &CsrMatrix, symmetric_profile: bool) -> Vec<usize> {
    let n = m.rows();
    let mut env: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let (idx, _) = m.row(i);
        for &j in idx {
            if j < i {
                env[i] = env[i].min(j);
            } else if symmetric_profile && j > i {
                env[j] = env[j].min(i);
            }
        }
    }
    env
}

fn offsets(env: &[usize]) -> Vec<usize> {
    let mut off = Vec::with_capacity(env.len() + 1);
    off.push(0);
    for (i, &e) in env.iter().enumerate() {
        off.push(off[i] + (i - e));
    }
    off
}

/// `M = LLᵗ` with `L` stored row-wise over the envelope.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    env: Vec<usize>,
    off: Vec<usize>,
    /// Strictly lower entries `L[i][env[i]..i]`.
    lower: Vec<f64>,
    diag: Vec<f64>,
}

impl SkylineCholesky {
    pub fn new(m: &CsrMatrix) -> Result<Self> {
        check_len("skyline cholesky", m.rows(), m.cols())?;
        let asym = m.max_asymmetry();
        if asym > 1e-12 * m.max_abs() {
            return Err(Error::NotSymmetric(asym));
        }
        let n = m.rows();
        let env = envelope(m, false);
        let off = offsets(&env);
        let mut lower = vec![0.0; off[n]];
        let mut diag = vec![0.0; n];
        for i in 0..n {
            let (idx, val) = m.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                if j < i {
                    lower[off[i] + j - env[i]] = v;
                } else if j == i {
                    diag[i] = v;
                }
            }
        }
        for i in 0..n {
            let ei = env[i];
            for j in ei..i {
                let k0 = ei.max(env[j]);
                let s = {
                    let li = &lower[off[i] + k0 - ei..off[i] + j - ei];
                    let lj = &lower[off[j] + k0 - env[j]..off[j] + j - env[j]];
                    dot_unchecked(li, lj)
                };
                let p = off[i] + j - ei;
                lower[p] = (lower[p] - s) / diag[j];
            }
            let row = &lower[off[i]..off[i + 1]];
            let d = diag[i] - dot_unchecked(row, row);
            if !(d > 0.0) {
                return Err(Error::NotSpd(format!("nonpositive pivot {d:e} at row {i}")));
            }
            diag[i] = d.sqrt();
        }
        Ok(Self {
            env,
            off,
            lower,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        self.lower.len() + self.diag.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x = b.to_vec();
        for i in 0..n {
            let ei = self.env[i];
            let s = dot_unchecked(&self.lower[self.off[i]..self.off[i + 1]], &x[ei..i]);
            x[i] = (x[i] - s) / self.diag[i];
        }
        for i in (0..n).rev() {
            x[i] /= self.diag[i];
            let xi = x[i];
            let ei = self.env[i];
            for (xk, l) in x[ei..i]
                .iter_mut()
                .zip(&self.lower[self.off[i]..self.off[i + 1]])
            {
                *xk -= l * xi;
            }
        }
        x
    }
}

/// `M = LU` without pivoting, `L` unit lower stored by rows and `U` stored
/// by columns over a symmetric envelope.
#[derive(Debug, Clone)]
pub struct SkylineLu {
    env: Vec<usize>,
    off: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    diag: Vec<f64>,
}

impl SkylineLu {
    pub fn new(m: &CsrMatrix) -> Result<Self> {
        check_len("skyline lu", m.rows(), m.cols())?;
        let n = m.rows();
        let env = envelope(m, true);
        let off = offsets(&env);
        let mut lower = vec![0.0; off[n]];
        let mut upper = vec![0.0; off[n]];
        let mut diag = vec![0.0; n];
        for i in 0..n {
            let (idx, val) = m.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                if j < i {
                    lower[off[i] + j - env[i]] = v;
                } else if j == i {
                    diag[i] = v;
                } else {
                    // U[i][j] lives in column j
                    upper[off[j] + i - env[j]] = v;
                }
            }
        }
        let scale = m.max_abs();
        for i in 0..n {
            let ei = env[i];
            for j in ei..i {
                let ej = env[j];
                let k0 = ei.max(ej);
                let s_l = dot_unchecked(
                    &lower[off[i] + k0 - ei..off[i] + j - ei],
                    &upper[off[j] + k0 - ej..off[j] + j - ej],
                );
                let p = off[i] + j - ei;
                lower[p] = (lower[p] - s_l) / diag[j];
                let s_u = dot_unchecked(
                    &lower[off[j] + k0 - ej..off[j] + j - ej],
                    &upper[off[i] + k0 - ei..off[i] + j - ei],
                );
                upper[p] -= s_u;
            }
            let d = diag[i] - dot_unchecked(&lower[off[i]..off[i + 1]], &upper[off[i]..off[i + 1]]);
            if !(d.abs() > 1e-14 * scale) {
                return Err(Error::Breakdown { row: i, pivot: d });
            }
            diag[i] = d;
        }
        Ok(Self {
            env,
            off,
            lower,
            upper,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x = b.to_vec();
        for i in 0..n {
            let ei = self.env[i];
            x[i] -= dot_unchecked(&self.lower[self.off[i]..self.off[i + 1]], &x[ei..i]);
        }
        for i in (0..n).rev() {
            x[i] /= self.diag[i];
            let xi = x[i];
            let ei = self.env[i];
            for (xk, u) in x[ei..i]
                .iter_mut()
                .zip(&self.upper[self.off[i]..self.off[i + 1]])
            {
                *xk -= u * xi;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{DenseMatrix, Lu};

    fn laplace2d(k: usize) -> CsrMatrix {
        let t = CsrMatrix::tridiag(k, -1.0, 2.0, -1.0);
        let i = CsrMatrix::identity(k);
        i.kron(&t).unwrap().add(&t.kron(&i).unwrap()).unwrap()
    }

    #[test]
    fn cholesky_solves_laplacian() {
        let a = laplace2d(6);
        let f = SkylineCholesky::new(&a).unwrap();
        let x: Vec<f64> = (0..36).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.matvec(&x).unwrap();
        let y = f.solve(&b);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = CsrMatrix::tridiag(3, 2.0, 1.0, 2.0);
        assert!(matches!(SkylineCholesky::new(&a), Err(Error::NotSpd(_))));
    }

    #[test]
    fn lu_matches_dense_on_convection_like_matrix() {
        let a = laplace2d(5);
        let c = CsrMatrix::identity(5)
            .kron(&CsrMatrix::tridiag(5, -1.5, 0.0, 1.5))
            .unwrap();
        let m = a.add(&c).unwrap();
        let f = SkylineLu::new(&m).unwrap();
        let b: Vec<f64> = (0..25).map(|i| 1.0 + i as f64).collect();
        let x = f.solve(&b);
        let dense = Lu::new(&DenseMatrix::from_sparse(&m))
            .unwrap()
            .solve(&b)
            .unwrap();
        for (p, q) in x.iter().zip(&dense) {
            assert!((p - q).abs() < 1e-11 * q.abs().max(1.0));
        }
    }
}
