//! Purely algebraic test problem with an ill-conditioned Gaussian Toeplitz
//! `A` and known solution `(1, …, 1)`.

use crate::error::{Error, Result};
use crate::saddle::SaddleProblem;
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicParams {
    pub n: usize,
    pub m: usize,
    pub sigma: f64,
}

impl Default for AlgebraicParams {
    fn default() -> Self {
        Self {
            n: 800,
            m: 600,
            sigma: 1.5,
        }
    }
}

/// `a_ij = exp(−(i−j)²/(2σ²)) / (√(2π)σ)`, `B = [T; 0]` with
/// `T = tridiag(1,4,1)/1000`, `D = I`.
pub fn gen_algebraic(p: &AlgebraicParams) -> Result<SaddleProblem> {
    let (n, m) = (p.n, p.m);
    if !(n > m && m >= 1) || !(p.sigma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need n > m >= 1 and sigma > 0, got n={n} m={m} sigma={}",
            p.sigma
        )));
    }
    let c = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * p.sigma);
    let s2 = 2.0 * p.sigma * p.sigma;
    let mut trip = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let k = i as f64 - j as f64;
            let v = c * (-(k * k) / s2).exp();
            if v == 0.0 {
                // exp has underflowed; the rest of the row is zero too
                if j > i {
                    break;
                }
                continue;
            }
            trip.push((i, j, v));
        }
    }
    let a = CsrMatrix::from_triplets(n, n, trip)?;
    let t = CsrMatrix::tridiag(m, 1.0, 4.0, 1.0).scale(1e-3);
    let b = CsrMatrix::vstack(&[&t, &CsrMatrix::zeros(n - m, m)])?;
    let d = CsrMatrix::identity(m);
    let (xs, ys) = (vec![1.0; n], vec![1.0; m]);
    let ax = a.matvec(&xs)?;
    let by = b.matvec(&ys)?;
    let f: Vec<f64> = ax.iter().zip(&by).map(|(p, q)| p + q).collect();
    let btx = b.matvec_transpose(&xs)?;
    let dy = d.matvec(&ys)?;
    let g: Vec<f64> = btx.iter().zip(&dy).map(|(p, q)| p - q).collect();
    Ok(SaddleProblem::new(a, b, d, f, g, true)?
        .with_exact_solution(xs, ys)?
        .with_meta("generator", "algebraic")
        .with_meta("n", n)
        .with_meta("m", m)
        .with_meta("sigma", p.sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_entry() {
        let p = gen_algebraic(&AlgebraicParams {
            n: 10,
            m: 4,
            sigma: 1.5,
        })
        .unwrap();
        assert!((p.a().get(3, 3) - 0.265_961_520_267_621_8).abs() < 1e-15);
        assert!(p.a().is_symmetric(0.0));
    }

    #[test]
    fn stored_solution_has_zero_residual() {
        let p = gen_algebraic(&AlgebraicParams {
            n: 30,
            m: 12,
            sigma: 1.5,
        })
        .unwrap();
        let (x, y) = p.exact_solution().unwrap();
        let rf = p.residual_f(x, y).unwrap();
        let rg = p.residual_g(x, y).unwrap();
        assert!(rf.iter().chain(&rg).all(|v| *v == 0.0));
    }
}
