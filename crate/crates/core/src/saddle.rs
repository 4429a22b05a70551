//! The generalized saddle-point system
//!
//! ```text
//! [ A   B ] [x]   [f]
//! [ Bᵗ −D ] [y] = [g]
//! ```

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{sym_eig_bounds, DenseMatrix};
use crate::error::{check_len, Error, Result};
use crate::precond::{LinearOperator, Preconditioner};
use crate::sparse::vector::{all_finite, dot_unchecked};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone)]
pub struct SaddleProblem {
    a: CsrMatrix,
    b: CsrMatrix,
    d: CsrMatrix,
    f: Vec<f64>,
    g: Vec<f64>,
    symmetric_a: bool,
    exact: Option<(Vec<f64>, Vec<f64>)>,
    meta: Vec<(String, String)>,
}

impl SaddleProblem {
    /// Validates dimensions, the symmetry flag and semi-definiteness of `D`.
    pub fn new(
        a: CsrMatrix,
        b: CsrMatrix,
        d: CsrMatrix,
        f: Vec<f64>,
        g: Vec<f64>,
        symmetric_a: bool,
    ) -> Result<Self> {
        let n = a.rows();
        check_len("A columns", n, a.cols())?;
        check_len("B rows", n, b.rows())?;
        let m = b.cols();
        check_len("D rows", m, d.rows())?;
        check_len("D columns", m, d.cols())?;
        check_len("f", n, f.len())?;
        check_len("g", m, g.len())?;
        if !(all_finite(&f) && all_finite(&g)) {
            return Err(Error::InvalidArgument(
                "right-hand side is not finite".into(),
            ));
        }
        if symmetric_a {
            let asym = a.max_asymmetry();
            if asym > 1e-12 * a.max_abs() {
                return Err(Error::NotSymmetric(asym));
            }
        }
        check_psd(&d)?;
        Ok(Self {
            a,
            b,
            d,
            f,
            g,
            symmetric_a,
            exact: None,
            meta: Vec::new(),
        })
    }

    /// Attaches a known solution used by error-based diagnostics.
    pub fn with_exact_solution(mut self, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_len("exact x", self.n(), x.len())?;
        check_len("exact y", self.m(), y.len())?;
        self.exact = Some((x, y));
        Ok(self)
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn a(&self) -> &CsrMatrix {
        &self.a
    }
    pub fn b(&self) -> &CsrMatrix {
        &self.b
    }
    pub fn d(&self) -> &CsrMatrix {
        &self.d
    }
    pub fn f(&self) -> &[f64] {
        &self.f
    }
    pub fn g(&self) -> &[f64] {
        &self.g
    }
    pub fn symmetric_a(&self) -> bool {
        self.symmetric_a
    }
    pub fn exact_solution(&self) -> Option<(&[f64], &[f64])> {
        self.exact
            .as_ref()
            .map(|(x, y)| (x.as_slice(), y.as_slice()))
    }
    pub fn meta(&self) -> &[(String, String)] {
        &self.meta
    }
    pub fn n(&self) -> usize {
        self.a.rows()
    }
    pub fn m(&self) -> usize {
        self.b.cols()
    }

    /// `f − Ax − By`
    pub fn residual_f(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        check_len("x", self.n(), x.len())?;
        check_len("y", self.m(), y.len())?;
        Ok(self.residual_f_unchecked(x, y))
    }

    pub(crate) fn residual_f_unchecked(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut ax = vec![0.0; n];
        self.a.matvec_into(x, &mut ax);
        let mut by = vec![0.0; n];
        self.b.matvec_into(y, &mut by);
        (0..n).map(|k| self.f[k] - (ax[k] + by[k])).collect()
    }

    /// `Bᵗx − Dy − g`. In the iteration `x` is the already updated `x_{i+1}`
    /// while `y` is still `y_i`.
    pub fn residual_g(&self, x_next: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        check_len("x", self.n(), x_next.len())?;
        check_len("y", self.m(), y.len())?;
        Ok(self.residual_g_unchecked(x_next, y))
    }

    pub(crate) fn residual_g_unchecked(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let m = self.m();
        let mut btx = vec![0.0; m];
        self.b.matvec_transpose_into(x, &mut btx);
        let mut dy = vec![0.0; m];
        self.d.matvec_into(y, &mut dy);
        (0..m).map(|k| btx[k] - dy[k] - self.g[k]).collect()
    }

    /// Matrix-free `H v = Bᵗ Â⁻¹ (B v) + D v`.
    pub fn schur_product(&self, a_hat: &dyn Preconditioner, v: &[f64]) -> Result<Vec<f64>> {
        check_len("H product", self.m(), v.len())?;
        schur_apply(&self.b, &self.d, a_hat, v)
    }

    /// Returns a copy with `A` replaced by its symmetric part.
    pub fn symmetric_part(&self) -> Result<Self> {
        let mut p = self.clone();
        p.a = self.a.symmetric_part()?;
        p.symmetric_a = true;
        Ok(p)
    }
}

fn schur_apply(
    b: &CsrMatrix,
    d: &CsrMatrix,
    a_hat: &dyn Preconditioner,
    v: &[f64],
) -> Result<Vec<f64>> {
    let bv = b.matvec(v)?;
    let z = a_hat.apply(&bv)?;
    let mut out = b.matvec_transpose(&z)?;
    let dv = d.matvec(v)?;
    for (o, x) in out.iter_mut().zip(dv) {
        *o += x;
    }
    Ok(out)
}

/// `H = BᵗÂ⁻¹B + D` as an owned matrix-free operator.
pub struct SchurOperator {
    b: CsrMatrix,
    d: CsrMatrix,
    a_hat: Arc<dyn Preconditioner>,
}

impl SchurOperator {
    pub fn new(problem: &SaddleProblem, a_hat: Arc<dyn Preconditioner>) -> Result<Self> {
        check_len("Â dimension", problem.n(), a_hat.dim())?;
        Ok(Self {
            b: problem.b.clone(),
            d: problem.d.clone(),
            a_hat,
        })
    }
}

impl LinearOperator for SchurOperator {
    fn dim(&self) -> usize {
        self.d.rows()
    }
    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        schur_apply(&self.b, &self.d, self.a_hat.as_ref(), v)
    }
}

fn check_psd(d: &CsrMatrix) -> Result<()> {
    let m = d.rows();
    let asym = d.max_asymmetry();
    if asym > 1e-12 * d.max_abs() {
        return Err(Error::NotSymmetric(asym));
    }
    if d.nnz() == 0 {
        return Ok(());
    }
    if d.is_diagonal() {
        if let Some((row, value)) = d.diagonal().into_iter().enumerate().find(|(_, v)| *v < 0.0) {
            return Err(Error::NotSpd(format!(
                "D has negative diagonal {value:e} at row {row}"
            )));
        }
        return Ok(());
    }
    if m <= 200 {
        let (min, _) = sym_eig_bounds(&DenseMatrix::from_sparse(d))?;
        if min < -1e-12 * d.max_abs() {
            return Err(Error::NotSpd(format!("D has eigenvalue {min:e}")));
        }
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10 {
        let z: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dz = d.matvec(&z)?;
        let q = dot_unchecked(&dz, &z);
        if q < -1e-12 * dot_unchecked(&z, &z) * d.max_abs() {
            return Err(Error::NotSpd(format!("<Dz,z> = {q:e} on a probe")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_are_checked() {
        let r = SaddleProblem::new(
            CsrMatrix::identity(3),
            CsrMatrix::zeros(3, 2),
            CsrMatrix::identity(3),
            vec![0.0; 3],
            vec![0.0; 2],
            true,
        );
        assert!(matches!(r, Err(Error::Dimension { .. })));
    }

    #[test]
    fn negative_d_is_rejected() {
        let r = SaddleProblem::new(
            CsrMatrix::identity(2),
            CsrMatrix::zeros(2, 1),
            CsrMatrix::from_diagonal(&[-1.0]),
            vec![0.0; 2],
            vec![0.0],
            true,
        );
        assert!(matches!(r, Err(Error::NotSpd(_))));
    }

    #[test]
    fn residuals_at_zero() {
        let b = CsrMatrix::from_dense(2, 1, &[1.0, 2.0]).unwrap();
        let p = SaddleProblem::new(
            CsrMatrix::identity(2),
            b,
            CsrMatrix::identity(1),
            vec![1.0, 1.0],
            vec![3.0],
            true,
        )
        .unwrap();
        assert_eq!(p.residual_f(&[0.0, 0.0], &[0.0]).unwrap(), vec![1.0, 1.0]);
        assert_eq!(p.residual_g(&[1.0, 1.0], &[0.0]).unwrap(), vec![0.0]);
    }
}
