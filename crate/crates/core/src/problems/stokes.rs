//! Locally stabilized Q1-P0 discretization of the Stokes driven cavity on a
//! uniform `n×n` mesh. Velocities live at the `(n−1)²` interior nodes and
//! pressures are constant per element.

use crate::error::{Error, Result};
use crate::saddle::SaddleProblem;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct StokesParams {
    pub n: usize,
    pub nu: f64,
    /// Stabilization weight: 0.25 for local, 1 for global stabilization.
    pub beta: f64,
}

impl Default for StokesParams {
    fn default() -> Self {
        Self {
            n: 32,
            nu: 1.0,
            beta: 0.25,
        }
    }
}

/// `n×(n−1)` node-to-element operators: `H_o` differences, `H_n` sums.
fn h_ops(n: usize) -> Result<(CsrMatrix, CsrMatrix)> {
    let ho = CsrMatrix::from_triplets(
        n,
        n - 1,
        (0..n - 1).flat_map(|j| [(j, j, -1.0), (j + 1, j, 1.0)]),
    )?;
    let hn = CsrMatrix::from_triplets(
        n,
        n - 1,
        (0..n - 1).flat_map(|j| [(j, j, 1.0), (j + 1, j, 1.0)]),
    )?;
    Ok((ho, hn))
}

pub fn gen_stokes_q1p0(p: &StokesParams) -> Result<SaddleProblem> {
    let n = p.n;
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid count n={n} must be >= 2"
        )));
    }
    if !(p.nu > 0.0) || !(p.beta > 0.0) {
        return Err(Error::InvalidArgument(
            "nu and beta must be positive".into(),
        ));
    }
    let h = 1.0 / n as f64;
    let mm = CsrMatrix::tridiag(n - 1, 1.0, 4.0, 1.0);
    let kk = CsrMatrix::tridiag(n - 1, -1.0, 2.0, -1.0);
    let a0 = mm.kron(&kk)?.add(&kk.kron(&mm)?)?.scale(p.nu / 6.0);
    let a = CsrMatrix::block_diag(&[&a0, &a0]);
    let (ho, hn) = h_ops(n)?;
    let b1 = hn.kron(&ho)?.transpose().scale(h / 2.0);
    let b2 = ho.kron(&hn)?.transpose().scale(h / 2.0);
    let b = CsrMatrix::vstack(&[&b1, &b2])?;
    let mut tn: Vec<_> = CsrMatrix::tridiag(n, -1.0, 2.0, -1.0).triplets().collect();
    for e in tn.iter_mut() {
        if (e.0 == 0 && e.1 == 0) || (e.0 == n - 1 && e.1 == n - 1) {
            e.2 = 1.0;
        }
    }
    let tn = CsrMatrix::from_triplets(n, n, tn)?;
    let i_n = CsrMatrix::identity(n);
    let d = i_n.kron(&tn)?.add(&tn.kron(&i_n)?)?.scale(p.beta * h * h);
    let nv = (n - 1) * (n - 1);
    let mut f = vec![0.0; 2 * nv];
    // lid forcing: last row of interior nodes of the first component
    for k in 0..n - 1 {
        f[(n - 2) * (n - 1) + k] = p.nu;
    }
    let g = vec![0.0; n * n];
    Ok(SaddleProblem::new(a, b, d, f, g, true)?
        .with_meta("generator", "stokes")
        .with_meta("n", n)
        .with_meta("nu", p.nu)
        .with_meta("beta", p.beta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_for_n4() {
        let p = gen_stokes_q1p0(&StokesParams {
            n: 4,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(p.n(), 18);
        assert_eq!(p.m(), 16);
    }

    #[test]
    fn d_annihilates_constants() {
        let p = gen_stokes_q1p0(&StokesParams {
            n: 5,
            ..Default::default()
        })
        .unwrap();
        let dz = p.d().matvec(&[1.0; 25]).unwrap();
        assert!(dz.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn d_vanishes_with_beta() {
        let small = gen_stokes_q1p0(&StokesParams {
            n: 4,
            nu: 1.0,
            beta: 1e-12,
        })
        .unwrap();
        assert!(small.d().max_abs() < 1e-12);
    }
}
