//! Desk-scale dense linear algebra: Jacobi eigensolver, symmetric matrix
//! functions, SVD, Cholesky and LU.

use crate::error::{check_len, Error, Result};
use crate::sparse::CsrMatrix;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

/// `M = U [Σ₀ 0] Vᵗ` for an `m×n` matrix with `m ≤ n`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    /// Singular values, descending.
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

const MAX_SWEEPS: usize = 100;

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len("dense data", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_sparse(m: &CsrMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.to_dense(),
        }
    }

    /// Matrix whose columns are `cols`.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            check_len("column", rows, c.len())?;
            for i in 0..rows {
                m[(i, j)] = c[i];
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_len("dense matmul", self.cols, other.rows)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len("dense matvec", self.cols, v.len())?;
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    pub fn add_scaled(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        check_len("dense add rows", self.rows, other.rows)?;
        check_len("dense add cols", self.cols, other.cols)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| a * x).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..i {
                m = m.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        m
    }

    /// `(M + Mᵗ)/2`, used to remove rounding asymmetry before an eigensolve.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self[(i, j)] + self[(j, i)])
        })
    }

    /// Extracts the square sub-block `[r0..r0+rows, c0..c0+cols]`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    fn require_square(&self, context: &'static str) -> Result<()> {
        check_len(context, self.rows, self.cols)
    }

    fn require_symmetric(&self) -> Result<()> {
        self.require_square("symmetric matrix")?;
        let asym = self.max_asymmetry();
        if asym > 1e-12 * self.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn sym_eig(m: &DenseMatrix) -> Result<EigenPairs> {
    m.require_symmetric()?;
    let n = m.rows;
    let mut a = m.symmetrized();
    let mut q = DenseMatrix::identity(n);
    let norm = m.frobenius();
    let threshold = 1e-14 * norm;
    let off = |a: &DenseMatrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = c * akp - s * akr;
                    a[(k, r)] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = c * apk - s * ark;
                    a[(r, k)] = s * apk + c * ark;
                }
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, j| q[(i, order[j])]);
    Ok(EigenPairs { values, vectors })
}

/// Extreme eigenvalues `(min, max)` of a symmetric matrix.
pub fn sym_eig_bounds(m: &DenseMatrix) -> Result<(f64, f64)> {
    let e = sym_eig(m)?;
    Ok((e.values[0], *e.values.last().unwrap_or(&0.0)))
}

/// `Q f(Λ) Qᵗ` for a symmetric matrix.
pub fn sym_fn(m: &DenseMatrix, f: impl Fn(f64) -> f64) -> Result<DenseMatrix> {
    let e = sym_eig(m)?;
    Ok(reassemble(&e, f))
}

fn reassemble(e: &EigenPairs, f: impl Fn(f64) -> f64) -> DenseMatrix {
    let n = e.values.len();
    let fl: Vec<f64> = e.values.iter().map(|&l| f(l)).collect();
    let q = &e.vectors;
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = 0.0;
            for k in 0..n {
                s += q[(i, k)] * fl[k] * q[(j, k)];
            }
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    out
}

fn spd_eig(m: &DenseMatrix) -> Result<EigenPairs> {
    let e = sym_eig(m)?;
    let max = e.values.last().copied().unwrap_or(0.0);
    let min = e.values.first().copied().unwrap_or(0.0);
    if !(min > 1e-13 * max) {
        return Err(Error::NotSpd(format!(
            "eigenvalue range [{min:e}, {max:e}] is singular to working precision"
        )));
    }
    Ok(e)
}

pub fn sym_sqrt(m: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(reassemble(&spd_eig(m)?, f64::sqrt))
}

pub fn sym_inv_sqrt(m: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(reassemble(&spd_eig(m)?, |l| 1.0 / l.sqrt()))
}

/// Lower-triangular `R` with `M = R Rᵗ`.
pub fn chol(m: &DenseMatrix) -> Result<DenseMatrix> {
    m.require_square("chol")?;
    let n = m.rows;
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) {
            return Err(Error::NotSpd(format!("nonpositive pivot {d:e} at row {j}")));
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn solve_lower(l: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_len("solve_lower", l.rows, b.len())?;
    let n = l.rows;
    let mut x = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            x[i] -= l[(i, k)] * x[k];
        }
        x[i] /= l[(i, i)];
    }
    Ok(x)
}

/// Solves `Lᵗ x = b` for lower-triangular `L`.
pub fn solve_lower_transpose(l: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_len("solve_lower_transpose", l.rows, b.len())?;
    let n = l.rows;
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            x[i] -= l[(k, i)] * x[k];
        }
        x[i] /= l[(i, i)];
    }
    Ok(x)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse(l: &DenseMatrix) -> Result<DenseMatrix> {
    let n = l.rows;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            solve_lower(l, &e)
        })
        .collect::<Result<_>>()?;
    DenseMatrix::from_columns(n, &cols)
}

/// Inverse of an SPD matrix through its Cholesky factor.
pub fn spd_inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    let l = chol(m)?;
    let li = lower_inverse(&l)?;
    Ok(li.transpose().matmul(&li)?.symmetrized())
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(m: &DenseMatrix) -> Result<Self> {
        m.require_square("lu")?;
        let n = m.rows;
        let mut a = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = m.max_abs();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))
                .unwrap_or(k);
            if a[(p, k)].abs() <= 1e-300_f64.max(1e-15 * scale) {
                return Err(Error::Breakdown {
                    row: k,
                    pivot: a[(p, k)],
                });
            }
            if p != k {
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
                perm.swap(k, p);
            }
            for i in (k + 1)..n {
                let f = a[(i, k)] / a[(k, k)];
                a[(i, k)] = f;
                for j in (k + 1)..n {
                    a[(i, j)] -= f * a[(k, j)];
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.rows;
        check_len("lu solve", n, b.len())?;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= self.lu[(i, k)] * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        let n = self.lu.rows;
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                self.solve(&e)
            })
            .collect::<Result<_>>()?;
        DenseMatrix::from_columns(n, &cols)
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// SVD of an `m×n` matrix with `m ≤ n`, computed from the eigendecompositions
/// of `MMᵗ` and `MᵗM`.
pub fn svd_rect(m: &DenseMatrix) -> Result<Svd> {
    let (rows, cols) = (m.rows, m.cols);
    if rows > cols {
        return Err(Error::InvalidArgument(format!(
            "svd_rect needs rows <= cols, got {rows}x{cols}"
        )));
    }
    let mt = m.transpose();
    let left = sym_eig(&m.matmul(&mt)?.symmetrized())?;
    let right = sym_eig(&mt.matmul(m)?.symmetrized())?;
    let mut sigma = Vec::with_capacity(rows);
    let mut ucols = Vec::with_capacity(rows);
    for k in (0..rows).rev() {
        sigma.push(left.values[k].max(0.0).sqrt());
        ucols.push(left.vectors.column(k));
    }
    let smax = sigma.first().copied().unwrap_or(0.0);
    let mut vcols: Vec<Vec<f64>> = (0..cols).rev().map(|k| right.vectors.column(k)).collect();
    for k in 0..rows {
        if sigma[k] > 1e-10 * smax && sigma[k] > 0.0 {
            let mut v = mt.matvec(&ucols[k])?;
            v.iter_mut().for_each(|x| *x /= sigma[k]);
            normalize(&mut v);
            vcols[k] = v;
        }
    }
    for _ in 0..2 {
        for k in 0..cols {
            for j in 0..k {
                let d: f64 = vcols[k].iter().zip(&vcols[j]).map(|(a, b)| a * b).sum();
                let vj = vcols[j].clone();
                vcols[k].iter_mut().zip(&vj).for_each(|(a, b)| *a -= d * b);
            }
            normalize(&mut vcols[k]);
        }
    }
    Ok(Svd {
        u: DenseMatrix::from_columns(rows, &ucols)?,
        sigma,
        v: DenseMatrix::from_columns(cols, &vcols)?,
    })
}

/// Spectral norm of an arbitrary matrix.
pub fn spectral_norm(m: &DenseMatrix) -> Result<f64> {
    let g = if m.rows <= m.cols {
        m.matmul(&m.transpose())?
    } else {
        m.transpose().matmul(m)?
    };
    let (_, max) = sym_eig_bounds(&g.symmetrized())?;
    Ok(max.max(0.0).sqrt())
}

/// Eigenvalues of the pencil `(A, B)` with `B` SPD, ascending.
pub fn generalized_eigenvalues(a: &DenseMatrix, b: &DenseMatrix) -> Result<Vec<f64>> {
    let l = chol(b)?;
    let li = lower_inverse(&l)?;
    let c = li.matmul(a)?.matmul(&li.transpose())?.symmetrized();
    Ok(sym_eig(&c)?.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn random_spd(n: usize, seed: u64) -> DenseMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = DenseMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        g.matmul(&g.transpose())
            .unwrap()
            .add_scaled(1.0, &DenseMatrix::identity(n), 0.5)
            .unwrap()
    }

    #[test]
    fn eig_of_diagonal_sorts() {
        let e = sym_eig(&DenseMatrix::from_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn eig_of_two_by_two() {
        let m = DenseMatrix::from_row_major(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = sym_eig(&m).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 3.0, epsilon = 1e-14);
        let i = sym_eig(&DenseMatrix::identity(5)).unwrap();
        assert!(i.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn eig_rejects_nonsymmetric() {
        let m = DenseMatrix::from_row_major(2, 2, vec![1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(sym_eig(&m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn eigenpair_contract_on_random_spd() {
        let m = random_spd(12, 3);
        let e = sym_eig(&m).unwrap();
        let q = &e.vectors;
        let qtq = q.transpose().matmul(q).unwrap();
        assert!(
            qtq.add_scaled(1.0, &DenseMatrix::identity(12), -1.0)
                .unwrap()
                .max_abs()
                <= 1e-10
        );
        let lam = DenseMatrix::from_diagonal(&e.values);
        let r = m
            .matmul(q)
            .unwrap()
            .add_scaled(1.0, &q.matmul(&lam).unwrap(), -1.0)
            .unwrap();
        assert!(r.max_abs() <= 1e-8 * m.max_abs());
    }

    #[test]
    fn square_roots() {
        let s = sym_sqrt(&DenseMatrix::from_diagonal(&[4.0, 9.0])).unwrap();
        assert_abs_diff_eq!(s[(0, 0)], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s[(1, 1)], 3.0, epsilon = 1e-14);
        assert_eq!(
            sym_sqrt(&DenseMatrix::identity(3)).unwrap(),
            DenseMatrix::identity(3)
        );
        let m = random_spd(10, 7);
        let r = sym_sqrt(&m).unwrap();
        let err = r
            .matmul(&r)
            .unwrap()
            .add_scaled(1.0, &m, -1.0)
            .unwrap()
            .max_abs();
        assert!(err <= 1e-10 * m.max_abs());
        assert!(r.max_asymmetry() <= 1e-12);
        let ri = sym_inv_sqrt(&m).unwrap();
        let p = r.matmul(&ri).unwrap();
        assert!(
            p.add_scaled(1.0, &DenseMatrix::identity(10), -1.0)
                .unwrap()
                .max_abs()
                < 1e-10
        );
    }

    #[test]
    fn sqrt_rejects_singular() {
        assert!(sym_sqrt(&DenseMatrix::from_diagonal(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn cholesky_examples() {
        let r = chol(&DenseMatrix::from_diagonal(&[4.0])).unwrap();
        assert_eq!(r[(0, 0)], 2.0);
        let m = DenseMatrix::from_row_major(2, 2, vec![4.0, 2.0, 2.0, 5.0]).unwrap();
        let r = chol(&m).unwrap();
        assert_eq!(r.data(), &[2.0, 0.0, 1.0, 2.0]);
        assert_eq!(
            chol(&DenseMatrix::identity(3)).unwrap(),
            DenseMatrix::identity(3)
        );
        let bad = DenseMatrix::from_row_major(2, 2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(chol(&bad), Err(Error::NotSpd(_))));
    }

    #[test]
    fn svd_examples() {
        let m = DenseMatrix::from_row_major(2, 3, vec![2.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        let s = svd_rect(&m).unwrap();
        assert_abs_diff_eq!(s.sigma[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.sigma[1], 1.0, epsilon = 1e-14);
        let z = svd_rect(&DenseMatrix::zeros(2, 4)).unwrap();
        assert!(z.sigma.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn svd_reconstructs_random_rectangle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let m = DenseMatrix::from_fn(4, 7, |_, _| rng.gen_range(-1.0..1.0));
        let s = svd_rect(&m).unwrap();
        let mut sig = DenseMatrix::zeros(4, 7);
        for k in 0..4 {
            sig[(k, k)] = s.sigma[k];
        }
        let rec = s.u.matmul(&sig).unwrap().matmul(&s.v.transpose()).unwrap();
        assert!(rec.add_scaled(1.0, &m, -1.0).unwrap().max_abs() <= 1e-10 * m.max_abs());
        let vtv = s.v.transpose().matmul(&s.v).unwrap();
        assert!(
            vtv.add_scaled(1.0, &DenseMatrix::identity(7), -1.0)
                .unwrap()
                .max_abs()
                < 1e-10
        );
        assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn lu_solves_nonsymmetric() {
        let m =
            DenseMatrix::from_row_major(3, 3, vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0])
                .unwrap();
        let lu = Lu::new(&m).unwrap();
        let x = lu.solve(&[3.0, 2.0, 4.0]).unwrap();
        for (a, b) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn generalized_pencil() {
        let a = DenseMatrix::from_diagonal(&[2.0, 9.0]);
        let b = DenseMatrix::from_diagonal(&[1.0, 3.0]);
        let e = generalized_eigenvalues(&a, &b).unwrap();
        assert_abs_diff_eq!(e[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e[1], 3.0, epsilon = 1e-14);
    }
}
