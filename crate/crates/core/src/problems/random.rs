//! Seeded random equality-constrained quadratic programs with penalty term
//! `D = εI`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::dense::{sym_eig_bounds, DenseMatrix};
use crate::error::{Error, Result};
use crate::saddle::SaddleProblem;
use crate::sparse::CsrMatrix;

const RESEEDS: u64 = 5;

/// `A = LLᵗ/n + I` for a Gaussian `L`, Gaussian `B` of full column rank, and
/// a uniform random exact solution from which `(f, g)` are derived.
pub fn gen_random_qp(n: usize, m: usize, eps: f64, seed: u64) -> Result<SaddleProblem> {
    if !(n >= m && m >= 1) || !(eps >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need n >= m >= 1 and eps >= 0, got n={n} m={m} eps={eps}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = |rng: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(rng) };
    let l = DenseMatrix::from_row_major(n, n, (0..n * n).map(|_| normal(&mut rng)).collect())?;
    let a = l
        .matmul(&l.transpose())?
        .scale(1.0 / n as f64)
        .add_scaled(1.0, &DenseMatrix::identity(n), 1.0)?
        .symmetrized();
    let mut b = None;
    for attempt in 0..RESEEDS {
        let salt = 0x9e37_79b9_7f4a_7c15u64.wrapping_mul(attempt + 1);
        let mut brng = ChaCha8Rng::seed_from_u64(seed ^ salt);
        let cand =
            DenseMatrix::from_row_major(n, m, (0..n * m).map(|_| normal(&mut brng)).collect())?;
        let (lo, hi) = sym_eig_bounds(&cand.transpose().matmul(&cand)?.symmetrized())?;
        if lo > 1e-10 * hi {
            b = Some(cand);
            break;
        }
    }
    let b = b.ok_or_else(|| {
        Error::InvalidArgument(format!("B rank deficient after {RESEEDS} reseeds"))
    })?;
    let u = Uniform::new(-1.0, 1.0);
    let xs: Vec<f64> = (0..n).map(|_| u.sample(&mut rng)).collect();
    let ys: Vec<f64> = (0..m).map(|_| u.sample(&mut rng)).collect();
    let a = CsrMatrix::from_dense(n, n, a.data())?;
    let b = CsrMatrix::from_dense(n, m, b.data())?;
    let d = CsrMatrix::identity(m).scale(eps);
    let ax = a.matvec(&xs)?;
    let by = b.matvec(&ys)?;
    let f = ax.iter().zip(&by).map(|(p, q)| p + q).collect();
    let btx = b.matvec_transpose(&xs)?;
    let g = btx.iter().zip(&ys).map(|(p, q)| p - eps * q).collect();
    Ok(SaddleProblem::new(a, b, d, f, g, true)?
        .with_exact_solution(xs, ys)?
        .with_meta("generator", "random-qp")
        .with_meta("n", n)
        .with_meta("m", m)
        .with_meta("eps", eps)
        .with_meta("seed", seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_consistent() {
        let p = gen_random_qp(12, 5, 0.3, 17).unwrap();
        let q = gen_random_qp(12, 5, 0.3, 17).unwrap();
        assert_eq!(p.a(), q.a());
        assert_eq!(p.b(), q.b());
        assert_eq!(p.f(), q.f());
        let (x, y) = p.exact_solution().unwrap();
        let rf = p.residual_f(x, y).unwrap();
        let rg = p.residual_g(x, y).unwrap();
        assert!(rf.iter().chain(&rg).all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(gen_random_qp(3, 0, 0.0, 1).is_err());
        assert!(gen_random_qp(3, 4, 0.0, 1).is_err());
    }
}
