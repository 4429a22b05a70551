use std::sync::Arc;

use super::{LinearOperator, Preconditioner};
use crate::error::{check_len, Error, Result};
use crate::sparse::norm2;
use crate::sparse::vector::dot_unchecked;

#[derive(Debug, Clone)]
pub struct PcgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Relative residual from the recurrence at exit.
    pub relative_residual: f64,
}

/// Preconditioned conjugate gradients from a zero initial guess, stopping when
/// `‖b − Mx‖ ≤ tol·‖b‖` (recurrence residual) or after `max_iter` steps.
pub fn pcg_solve(
    op: &dyn LinearOperator,
    precond: &dyn Preconditioner,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<PcgOutcome> {
    let n = op.dim();
    check_len("pcg rhs", n, b.len())?;
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(PcgOutcome {
            x,
            iterations: 0,
            converged: true,
            relative_residual: 0.0,
        });
    }
    let mut r = b.to_vec();
    let mut z = precond.apply(&r)?;
    let mut p = z.clone();
    let mut rz = dot_unchecked(&r, &z);
    let mut rel = 1.0;
    for it in 0..max_iter {
        let q = op.apply(&p)?;
        let pq = dot_unchecked(&p, &q);
        if !(pq > 0.0) {
            return Err(Error::Indefinite(format!(
                "<Mp,p> = {pq:e} at inner iteration {it}"
            )));
        }
        let a = rz / pq;
        for k in 0..n {
            x[k] += a * p[k];
            r[k] -= a * q[k];
        }
        rel = norm2(&r) / bnorm;
        if rel <= tol {
            return Ok(PcgOutcome {
                x,
                iterations: it + 1,
                converged: true,
                relative_residual: rel,
            });
        }
        z = precond.apply(&r)?;
        let rz_new = dot_unchecked(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    Ok(PcgOutcome {
        x,
        iterations: max_iter,
        converged: false,
        relative_residual: rel,
    })
}

/// Inner-iterative preconditioner `Ψ(ξ) ≈ M⁻¹ξ` realized by PCG.
#[derive(Clone)]
pub struct NonlinearPreconditioner {
    op: Arc<dyn LinearOperator>,
    inner: Arc<dyn Preconditioner>,
    rel_res_tol: f64,
    max_inner: usize,
}

impl std::fmt::Debug for NonlinearPreconditioner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonlinearPreconditioner")
            .field("inner", &self.inner.label())
            .field("rel_res_tol", &self.rel_res_tol)
            .field("max_inner", &self.max_inner)
            .finish()
    }
}

pub fn pcg_nonlinear(
    op: Arc<dyn LinearOperator>,
    inner: Arc<dyn Preconditioner>,
    rel_res_tol: f64,
    max_inner: usize,
) -> Result<NonlinearPreconditioner> {
    check_len("pcg inner preconditioner", op.dim(), inner.dim())?;
    if !(rel_res_tol >= 0.0) || max_inner == 0 {
        return Err(Error::InvalidArgument(
            "pcg_nonlinear needs rel_res_tol >= 0 and max_inner >= 1".into(),
        ));
    }
    Ok(NonlinearPreconditioner {
        op,
        inner,
        rel_res_tol,
        max_inner,
    })
}

impl NonlinearPreconditioner {
    pub fn solve(&self, xi: &[f64]) -> Result<PcgOutcome> {
        pcg_solve(
            self.op.as_ref(),
            self.inner.as_ref(),
            xi,
            self.rel_res_tol,
            self.max_inner,
        )
    }
}

impl Preconditioner for NonlinearPreconditioner {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        Ok(self.solve(r)?.x)
    }

    fn is_linear(&self) -> bool {
        false
    }

    fn label(&self) -> String {
        format!(
            "pcg(tol={:e},max={},inner={})",
            self.rel_res_tol,
            self.max_inner,
            self.inner.label()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precond::{ic0_preconditioner, LinearPreconditioner, ShiftPolicy};
    use crate::sparse::CsrMatrix;

    fn laplace2d(k: usize) -> CsrMatrix {
        let t = CsrMatrix::tridiag(k, -1.0, 2.0, -1.0);
        let i = CsrMatrix::identity(k);
        i.kron(&t).unwrap().add(&t.kron(&i).unwrap()).unwrap()
    }

    #[test]
    fn identity_operator_needs_one_step() {
        let op: Arc<dyn LinearOperator> = Arc::new(CsrMatrix::identity(5));
        let p = pcg_nonlinear(op, Arc::new(LinearPreconditioner::identity(5)), 1e-12, 10).unwrap();
        let out = p.solve(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.x, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn ic0_beats_plain_cg_on_laplacian() {
        let a = laplace2d(4);
        let b: Vec<f64> = (0..16).map(|i| 1.0 + (i % 3) as f64).collect();
        let plain = pcg_solve(&a, &LinearPreconditioner::identity(16), &b, 1e-10, 100).unwrap();
        let ic = ic0_preconditioner(&a, ShiftPolicy::None).unwrap();
        let pre = pcg_solve(&a, &ic, &b, 1e-10, 100).unwrap();
        assert!(plain.converged && pre.converged);
        assert!(
            pre.iterations < plain.iterations,
            "{} vs {}",
            pre.iterations,
            plain.iterations
        );
    }

    #[test]
    fn indefinite_operator_is_reported() {
        let a = CsrMatrix::from_diagonal(&[1.0, -1.0]);
        let r = pcg_solve(
            &a,
            &LinearPreconditioner::identity(2),
            &[0.0, 1.0],
            1e-10,
            5,
        );
        assert!(matches!(r, Err(Error::Indefinite(_))));
    }
}
