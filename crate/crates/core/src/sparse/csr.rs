use crate::error::{check_len, Error, Result};

/// Row-compressed sparse matrix with sorted, unique column indices and no
/// stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// and entries that end up exactly zero are dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut t: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(i, j, v) in &t {
            if i >= rows || j >= cols {
                return Err(Error::InvalidArgument(format!(
                    "entry ({i}, {j}) outside {rows}x{cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite entry at ({i}, {j})"
                )));
            }
        }
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values = Vec::with_capacity(t.len());
        let mut k = 0;
        while k < t.len() {
            let (i, j, mut v) = t[k];
            k += 1;
            while k < t.len() && t[k].0 == i && t[k].1 == j {
                v += t[k].2;
                k += 1;
            }
            if v != 0.0 {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
            }
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        Ok(Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    /// Internal constructor for data that already satisfies the invariants
    /// except possibly for stored zeros.
    fn from_sorted_rows(rows: usize, cols: usize, row_data: Vec<Vec<(usize, f64)>>) -> Self {
        let mut indptr = Vec::with_capacity(rows + 1);
        indptr.push(0);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for r in row_data {
            for (j, v) in r {
                if v != 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            indptr: vec![0; rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self::from_sorted_rows(
            n,
            n,
            d.iter().enumerate().map(|(i, &v)| vec![(i, v)]).collect(),
        )
    }

    /// Tridiagonal matrix with constant bands.
    pub fn tridiag(n: usize, lower: f64, diag: f64, upper: f64) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = Vec::with_capacity(3);
                if i > 0 {
                    r.push((i - 1, lower));
                }
                r.push((i, diag));
                if i + 1 < n {
                    r.push((i + 1, upper));
                }
                r
            })
            .collect();
        Self::from_sorted_rows(n, n, rows)
    }

    /// Builds from a row-major dense array, dropping zeros.
    pub fn from_dense(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        check_len("from_dense", rows * cols, data.len())?;
        let row_data = (0..rows)
            .map(|i| (0..cols).map(|j| (j, data[i * cols + j])).collect())
            .collect();
        Ok(Self::from_sorted_rows(rows, cols, row_data))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, val) = self.row(i);
        match idx.binary_search(&j) {
            Ok(k) => val[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| self.row(i).0.iter().all(|&j| j == i))
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len("matvec", self.cols, v.len())?;
        let mut out = vec![0.0; self.rows];
        self.matvec_into(v, &mut out);
        Ok(out)
    }

    /// `out = M v` without dimension checks beyond debug assertions.
    pub(crate) fn matvec_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.indptr[i]..self.indptr[i + 1] {
                s += self.values[k] * v[self.indices[k]];
            }
            *o = s;
        }
    }

    /// `Mᵗ v`. Accumulates row by row of `M`, which is bit-identical to
    /// multiplying by the explicit transpose.
    pub fn matvec_transpose(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len("matvec_transpose", self.rows, v.len())?;
        let mut out = vec![0.0; self.cols];
        self.matvec_transpose_into(v, &mut out);
        Ok(out)
    }

    pub(crate) fn matvec_transpose_into(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &vi) in v.iter().enumerate() {
            for k in self.indptr[i]..self.indptr[i + 1] {
                out[self.indices[k]] += self.values[k] * vi;
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let mut count = vec![0usize; self.cols + 1];
        for &j in &self.indices {
            count[j + 1] += 1;
        }
        for j in 0..self.cols {
            count[j + 1] += count[j];
        }
        let indptr = count.clone();
        let mut next = count;
        let mut indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.rows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                let j = self.indices[k];
                let p = next[j];
                indices[p] = i;
                values[p] = self.values[k];
                next[j] += 1;
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            indptr,
            indices,
            values,
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        if a == 0.0 {
            return Self::zeros(self.rows, self.cols);
        }
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= a);
        out
    }

    /// `a*self + b*other`.
    pub fn add_scaled(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        check_len("add rows", self.rows, other.rows)?;
        check_len("add cols", self.cols, other.cols)?;
        let rows = (0..self.rows)
            .map(|i| {
                let (ia, va) = self.row(i);
                let (ib, vb) = other.row(i);
                let mut r = Vec::with_capacity(ia.len() + ib.len());
                let (mut p, mut q) = (0, 0);
                while p < ia.len() || q < ib.len() {
                    if q == ib.len() || (p < ia.len() && ia[p] < ib[q]) {
                        r.push((ia[p], a * va[p]));
                        p += 1;
                    } else if p == ia.len() || ib[q] < ia[p] {
                        r.push((ib[q], b * vb[q]));
                        q += 1;
                    } else {
                        r.push((ia[p], a * va[p] + b * vb[q]));
                        p += 1;
                        q += 1;
                    }
                }
                r
            })
            .collect();
        Ok(Self::from_sorted_rows(self.rows, self.cols, rows))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_scaled(1.0, other, 1.0)
    }

    /// Sparse matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_len("matmul", self.cols, other.rows)?;
        let mut acc = vec![0.0; other.cols];
        let mut mark = vec![usize::MAX; other.cols];
        let rows = (0..self.rows)
            .map(|i| {
                let mut touched = Vec::new();
                let (ia, va) = self.row(i);
                for (&k, &a) in ia.iter().zip(va) {
                    let (ib, vb) = other.row(k);
                    for (&j, &b) in ib.iter().zip(vb) {
                        if mark[j] != i {
                            mark[j] = i;
                            acc[j] = 0.0;
                            touched.push(j);
                        }
                        acc[j] += a * b;
                    }
                }
                touched.sort_unstable();
                touched.into_iter().map(|j| (j, acc[j])).collect()
            })
            .collect();
        Ok(Self::from_sorted_rows(self.rows, other.cols, rows))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.rows == 0 || self.cols == 0 || other.rows == 0 || other.cols == 0 {
            return Err(Error::InvalidArgument("kron of an empty matrix".into()));
        }
        let rows = self
            .rows
            .checked_mul(other.rows)
            .ok_or(Error::IndexOverflow("kron"))?;
        let cols = self
            .cols
            .checked_mul(other.cols)
            .ok_or(Error::IndexOverflow("kron"))?;
        self.nnz()
            .checked_mul(other.nnz())
            .ok_or(Error::IndexOverflow("kron"))?;
        let mut row_data = Vec::with_capacity(rows);
        for i in 0..self.rows {
            let (ia, va) = self.row(i);
            for k in 0..other.rows {
                let (ib, vb) = other.row(k);
                let mut r = Vec::with_capacity(ia.len() * ib.len());
                for (&j, &a) in ia.iter().zip(va) {
                    for (&l, &b) in ib.iter().zip(vb) {
                        r.push((j * other.cols + l, a * b));
                    }
                }
                row_data.push(r);
            }
        }
        Ok(Self::from_sorted_rows(rows, cols, row_data))
    }

    /// Stacks matrices vertically.
    pub fn vstack(blocks: &[&Self]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut row_data = Vec::new();
        for b in blocks {
            check_len("vstack", cols, b.cols)?;
            for i in 0..b.rows {
                let (idx, val) = b.row(i);
                row_data.push(idx.iter().copied().zip(val.iter().copied()).collect());
            }
        }
        let rows = row_data.len();
        Ok(Self::from_sorted_rows(rows, cols, row_data))
    }

    pub fn block_diag(blocks: &[&Self]) -> Self {
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut row_data = Vec::new();
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rows {
                let (idx, val) = b.row(i);
                row_data.push(
                    idx.iter()
                        .map(|&j| j + off)
                        .zip(val.iter().copied())
                        .collect(),
                );
            }
            off += b.cols;
        }
        let rows = row_data.len();
        Self::from_sorted_rows(rows, cols, row_data)
    }

    /// `(M + Mᵗ)/2`
    pub fn symmetric_part(&self) -> Result<Self> {
        let t = self.transpose();
        self.add_scaled(0.5, &t, 0.5)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |M - Mᵗ|` entrywise.
    pub fn max_asymmetry(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let t = self.transpose();
        match self.add_scaled(1.0, &t, -1.0) {
            Ok(d) => d.max_abs(),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        self.max_asymmetry() <= rel_tol * self.max_abs()
    }

    /// Lower triangle including the diagonal.
    pub fn lower(&self) -> Self {
        let rows = (0..self.rows)
            .map(|i| {
                let (idx, val) = self.row(i);
                idx.iter()
                    .zip(val)
                    .filter(|(&j, _)| j <= i)
                    .map(|(&j, &v)| (j, v))
                    .collect()
            })
            .collect();
        Self::from_sorted_rows(self.rows, self.cols, rows)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            let (idx, val) = self.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                d[i * self.cols + j] = v;
            }
        }
        d
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (idx, val) = self.row(i);
            idx.iter().zip(val).map(move |(&j, &v)| (i, j, v))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let m = CsrMatrix::from_triplets(
            2,
            2,
            vec![
                (1, 1, 2.0),
                (0, 0, 1.0),
                (1, 1, 3.0),
                (0, 1, 0.0),
                (1, 0, 1.0),
                (1, 0, -1.0),
            ],
        )
        .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(1, 1), 5.0);
        assert_eq!(m.get(1, 0), 0.0);
    }

    #[test]
    fn tridiagonal_product() {
        let m = CsrMatrix::tridiag(3, -1.0, 2.0, -1.0);
        assert_eq!(m.matvec(&[1.0, 1.0, 1.0]).unwrap(), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_rows_give_zero_entries() {
        let m = CsrMatrix::from_triplets(3, 2, vec![(1, 0, 4.0)]).unwrap();
        assert_eq!(m.matvec(&[2.0, 7.0]).unwrap(), vec![0.0, 8.0, 0.0]);
    }

    #[test]
    fn transpose_product_of_column() {
        let m = CsrMatrix::from_dense(3, 1, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m.matvec_transpose(&[1.0, 1.0, 1.0]).unwrap(), vec![6.0]);
        let z = CsrMatrix::zeros(3, 2);
        assert_eq!(
            z.matvec_transpose(&[1.0, 2.0, 3.0]).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = CsrMatrix::identity(3);
        assert!(matches!(m.matvec(&[1.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn kron_examples() {
        let i6 = CsrMatrix::identity(2)
            .kron(&CsrMatrix::identity(3))
            .unwrap();
        assert_eq!(i6, CsrMatrix::identity(6));
        let t = CsrMatrix::tridiag(2, -1.0, 2.0, -1.0);
        let k = CsrMatrix::from_diagonal(&[2.0]).kron(&t).unwrap();
        assert_eq!(k.to_dense(), vec![4.0, -2.0, -2.0, 4.0]);
        let k3 = CsrMatrix::from_diagonal(&[3.0]).kron(&t).unwrap();
        assert_eq!(k3, t.scale(3.0));
        let k = CsrMatrix::identity(2).kron(&t).unwrap();
        #[rustfmt::skip]
        let expect = vec![
            2.0, -1.0, 0.0, 0.0,
            -1.0, 2.0, 0.0, 0.0,
            0.0, 0.0, 2.0, -1.0,
            0.0, 0.0, -1.0, 2.0,
        ];
        assert_eq!(k.to_dense(), expect);
    }

    #[test]
    fn matmul_matches_dense() {
        let a = CsrMatrix::from_dense(2, 3, &[1.0, 0.0, 2.0, 0.0, 3.0, 0.0]).unwrap();
        let b = CsrMatrix::from_dense(3, 2, &[1.0, 1.0, 0.0, 2.0, 4.0, 0.0]).unwrap();
        assert_eq!(a.matmul(&b).unwrap().to_dense(), vec![9.0, 1.0, 0.0, 6.0]);
    }

    #[test]
    fn symmetric_part_and_asymmetry() {
        let a = CsrMatrix::from_dense(2, 2, &[2.0, 1.0, -1.0, 2.0]).unwrap();
        assert_eq!(a.max_asymmetry(), 2.0);
        assert_eq!(
            a.symmetric_part().unwrap(),
            CsrMatrix::from_diagonal(&[2.0, 2.0])
        );
    }
}
