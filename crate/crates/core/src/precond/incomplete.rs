//! Incomplete Cholesky factorizations: IC(0) on the lower pattern and a
//! threshold variant with a column-norm drop rule.

use crate::error::{check_len, Error, Result};
use crate::sparse::CsrMatrix;

/// What to do when a pivot becomes nonpositive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShiftPolicy {
    /// Fail on the first breakdown.
    None,
    /// Retry with `M + σI`, `σ = 1e-3·max diag`, doubling `σ` up to three
    /// times before giving up.
    Retry,
}

/// `M ≈ LLᵗ` with sparse lower `L`.
#[derive(Debug, Clone)]
pub struct IncompleteFactor {
    l: CsrMatrix,
    lt: CsrMatrix,
    shift: f64,
}

impl IncompleteFactor {
    pub fn factor(&self) -> &CsrMatrix {
        &self.l
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `L⁻ᵗ(L⁻¹b)`
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut x = b.to_vec();
        for i in 0..n {
            let (idx, val) = self.l.row(i);
            let mut s = x[i];
            let mut d = 1.0;
            for (&j, &v) in idx.iter().zip(val) {
                if j < i {
                    s -= v * x[j];
                } else {
                    d = v;
                }
            }
            x[i] = s / d;
        }
        for i in (0..n).rev() {
            let (idx, val) = self.lt.row(i);
            let mut s = x[i];
            let mut d = 1.0;
            for (&j, &v) in idx.iter().zip(val) {
                if j > i {
                    s -= v * x[j];
                } else {
                    d = v;
                }
            }
            x[i] = s / d;
        }
        x
    }
}

fn check_square_symmetric(m: &CsrMatrix) -> Result<()> {
    check_len("incomplete cholesky", m.rows(), m.cols())?;
    let asym = m.max_asymmetry();
    if asym > 1e-12 * m.max_abs() {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

fn with_shifts(
    m: &CsrMatrix,
    policy: ShiftPolicy,
    f: impl Fn(&CsrMatrix) -> Result<CsrMatrix>,
) -> Result<IncompleteFactor> {
    let finish = |l: CsrMatrix, shift: f64| IncompleteFactor {
        lt: l.transpose(),
        l,
        shift,
    };
    let first = match f(m) {
        Ok(l) => return Ok(finish(l, 0.0)),
        Err(e @ Error::Breakdown { .. }) => e,
        Err(e) => return Err(e),
    };
    if policy == ShiftPolicy::None {
        return Err(first);
    }
    let maxdiag = m.diagonal().into_iter().fold(0.0, f64::max);
    let mut sigma = 1e-3 * maxdiag;
    let mut last = first;
    for _ in 0..4 {
        let shifted = m.add_scaled(1.0, &CsrMatrix::identity(m.rows()), sigma)?;
        match f(&shifted) {
            Ok(l) => return Ok(finish(l, sigma)),
            Err(e @ Error::Breakdown { .. }) => last = e,
            Err(e) => return Err(e),
        }
        sigma *= 2.0;
    }
    Err(last)
}

/// IC(0): the factor keeps exactly the pattern of `lower(M)` and satisfies
/// `(LLᵗ)(i,j) = M(i,j)` on that pattern.
pub fn ic0(m: &CsrMatrix, policy: ShiftPolicy) -> Result<IncompleteFactor> {
    check_square_symmetric(m)?;
    with_shifts(m, policy, ic0_raw)
}

fn ic0_raw(m: &CsrMatrix) -> Result<CsrMatrix> {
    let n = m.rows();
    let lower = m.lower();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut diag = vec![0.0; n];
    for i in 0..n {
        let (idx, val) = lower.row(i);
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(idx.len());
        let mut aii = 0.0;
        for (&k, &a) in idx.iter().zip(val) {
            if k == i {
                aii = a;
                continue;
            }
            // dot of L[i][..k] and L[k][..k] over the shared pattern
            let rk = &rows[k];
            let (mut p, mut q, mut s) = (0, 0, 0.0);
            while p < row.len() && q < rk.len() {
                let (ci, vi) = row[p];
                let (ck, vk) = rk[q];
                if ci == ck {
                    s += vi * vk;
                    p += 1;
                    q += 1;
                } else if ci < ck {
                    p += 1;
                } else {
                    q += 1;
                }
            }
            row.push((k, (a - s) / diag[k]));
        }
        let d = aii - row.iter().map(|(_, v)| v * v).sum::<f64>();
        if !(d > 0.0) {
            return Err(Error::Breakdown { row: i, pivot: d });
        }
        diag[i] = d.sqrt();
        row.push((i, diag[i]));
        rows.push(row);
    }
    let trip = rows
        .into_iter()
        .enumerate()
        .flat_map(|(i, r)| r.into_iter().map(move |(j, v)| (i, j, v)));
    CsrMatrix::from_triplets(n, n, trip)
}

/// Threshold incomplete Cholesky. Column `j` of the factor is computed
/// left-looking and an off-diagonal entry is dropped when its unscaled value
/// satisfies `|L(i,j)·L(j,j)| < droptol·‖M(:,i)‖₂`.
pub fn ict(m: &CsrMatrix, droptol: f64, policy: ShiftPolicy) -> Result<IncompleteFactor> {
    check_square_symmetric(m)?;
    if !(droptol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "droptol {droptol} must be >= 0"
        )));
    }
    let colnorm: Vec<f64> = (0..m.rows())
        .map(|j| m.row(j).1.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    with_shifts(m, policy, |a| ict_raw(a, droptol, &colnorm))
}

fn ict_raw(m: &CsrMatrix, droptol: f64, colnorm: &[f64]) -> Result<CsrMatrix> {
    let n = m.rows();
    let mut cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut pos = vec![0usize; n];
    let mut pending: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut w = vec![0.0; n];
    let mut mark = vec![usize::MAX; n];
    let mut touched: Vec<usize> = Vec::new();
    for j in 0..n {
        touched.clear();
        // symmetric: column j below the diagonal equals row j right of it
        let (idx, val) = m.row(j);
        for (&i, &v) in idx.iter().zip(val) {
            if i >= j {
                w[i] = v;
                mark[i] = j;
                touched.push(i);
            }
        }
        if mark[j] != j {
            w[j] = 0.0;
            mark[j] = j;
            touched.push(j);
        }
        let mut ks = std::mem::take(&mut pending[j]);
        ks.sort_unstable();
        for &k in &ks {
            let col = &cols[k];
            let ljk = col[pos[k]].1;
            for &(i, lik) in &col[pos[k]..] {
                if mark[i] != j {
                    mark[i] = j;
                    w[i] = 0.0;
                    touched.push(i);
                }
                w[i] -= lik * ljk;
            }
            pos[k] += 1;
            if pos[k] < col.len() {
                pending[col[pos[k]].0].push(k);
            }
        }
        let d = w[j];
        if !(d > 0.0) {
            return Err(Error::Breakdown { row: j, pivot: d });
        }
        let ljj = d.sqrt();
        touched.sort_unstable();
        let mut col = Vec::with_capacity(touched.len());
        col.push((j, ljj));
        for &i in &touched {
            if i == j {
                continue;
            }
            if w[i] != 0.0 && w[i].abs() >= droptol * colnorm[i] {
                col.push((i, w[i] / ljj));
            }
        }
        pos[j] = 1;
        if col.len() > 1 {
            pending[col[1].0].push(j);
        }
        cols.push(col);
    }
    let trip = cols
        .into_iter()
        .enumerate()
        .flat_map(|(j, c)| c.into_iter().map(move |(i, v)| (i, j, v)));
    CsrMatrix::from_triplets(n, n, trip)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace2d(k: usize) -> CsrMatrix {
        let t = CsrMatrix::tridiag(k, -1.0, 2.0, -1.0);
        let i = CsrMatrix::identity(k);
        i.kron(&t).unwrap().add(&t.kron(&i).unwrap()).unwrap()
    }

    #[test]
    fn ic0_of_diagonal() {
        let f = ic0(&CsrMatrix::from_diagonal(&[4.0, 9.0]), ShiftPolicy::None).unwrap();
        assert_eq!(f.factor().to_dense(), vec![2.0, 0.0, 0.0, 3.0]);
    }

    #[test]
    fn ic0_of_tridiagonal_is_exact() {
        let m = CsrMatrix::tridiag(6, -1.0, 2.0, -1.0);
        let f = ic0(&m, ShiftPolicy::None).unwrap();
        let b: Vec<f64> = (0..6).map(|i| i as f64 - 2.0).collect();
        let x = f.solve(&m.matvec(&b).unwrap());
        for (p, q) in x.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn ic0_matches_on_pattern() {
        let m = laplace2d(5);
        let f = ic0(&m, ShiftPolicy::None).unwrap();
        let l = f.factor();
        let llt = l.matmul(&l.transpose()).unwrap();
        for (i, j, v) in m.lower().triplets() {
            assert!((llt.get(i, j) - v).abs() <= 1e-10 * v.abs());
        }
        assert_eq!(l.nnz(), m.lower().nnz());
    }

    #[test]
    fn breakdown_names_row_and_shift_recovers() {
        #[rustfmt::skip]
        let m = CsrMatrix::from_dense(3, 3, &[
            1.0, 2.0, 0.0,
            2.0, 1.0, 0.0,
            0.0, 0.0, 1.0,
        ]).unwrap();
        match ic0(&m, ShiftPolicy::None) {
            Err(Error::Breakdown { row, .. }) => assert_eq!(row, 1),
            other => panic!("expected breakdown, got {other:?}"),
        }
        // indefinite beyond what three doublings can fix
        assert!(ic0(&m, ShiftPolicy::Retry).is_err());
    }

    #[test]
    fn ict_limits() {
        let m = laplace2d(4);
        let big = ict(&m, 1e6, ShiftPolicy::None).unwrap();
        assert_eq!(big.factor().nnz(), 16);
        for (i, j, v) in big.factor().triplets() {
            assert_eq!(i, j);
            assert_eq!(v, 2.0);
        }
        let full = ict(&m, 0.0, ShiftPolicy::None).unwrap();
        let b: Vec<f64> = (0..16).map(|i| (i as f64).cos()).collect();
        let x = full.solve(&m.matvec(&b).unwrap());
        for (p, q) in x.iter().zip(&b) {
            assert!((p - q).abs() < 1e-12);
        }
    }
}
