//! Staggered-grid finite differences for the mixed elasticity formulation
//!
//! ```text
//! −μΔu + ∇p = f,   ∇·u − p/(μ+λ) = g
//! ```
//!
//! on the unit square with `u₁ = 0` on `x = 0, 1` and `∂u₁/∂y = 0` on
//! `y = 0, 1` (and symmetrically for `u₂`). Both velocity blocks have
//! `n(n−1)` unknowns and the pressure lives at the `n²` cell centers.

use crate::error::{Error, Result};
use crate::saddle::SaddleProblem;
use crate::sparse::CsrMatrix;

/// Lamé parameter `λ` as a function of the cell center.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaField {
    Constant(f64),
    /// `inside` on the open square `(lo, hi)²`, `outside` elsewhere.
    Inclusion {
        inside: f64,
        outside: f64,
        lo: f64,
        hi: f64,
    },
}

impl LambdaField {
    pub fn at(&self, x: f64, y: f64) -> f64 {
        match *self {
            LambdaField::Constant(v) => v,
            LambdaField::Inclusion {
                inside,
                outside,
                lo,
                hi,
            } => {
                if x > lo && x < hi && y > lo && y < hi {
                    inside
                } else {
                    outside
                }
            }
        }
    }

    fn min(&self) -> f64 {
        match *self {
            LambdaField::Constant(v) => v,
            LambdaField::Inclusion {
                inside, outside, ..
            } => inside.min(outside),
        }
    }
}

/// Right-hand side of the discrete system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElasticityForcing {
    /// Unit body force on the second velocity component, zero divergence data.
    VerticalVelocity,
    /// `f = 0` and `g = 1` in every pressure row.
    Divergence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticityParams {
    pub n: usize,
    pub mu: f64,
    pub lambda_field: LambdaField,
    pub forcing: ElasticityForcing,
}

impl Default for ElasticityParams {
    fn default() -> Self {
        Self {
            n: 20,
            mu: 1.0,
            lambda_field: LambdaField::Inclusion {
                inside: 1000.0,
                outside: 0.0,
                lo: 0.25,
                hi: 0.75,
            },
            forcing: ElasticityForcing::VerticalVelocity,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvectionParams {
    pub elasticity: ElasticityParams,
    /// Convection magnitude `b` in `b(∂u₁/∂x₁, ∂u₂/∂x₂)`.
    pub b: f64,
}

/// `tridiag(−1, 2, −1)` of size `k`.
fn h1(k: usize) -> CsrMatrix {
    CsrMatrix::tridiag(k, -1.0, 2.0, -1.0)
}

/// `h1(k)` with both corner entries set to 1 (reflected Neumann ghosts).
fn h2(k: usize) -> Result<CsrMatrix> {
    let mut t: Vec<_> = h1(k).triplets().collect();
    for e in t.iter_mut() {
        if (e.0 == 0 && e.1 == 0) || (e.0 == k - 1 && e.1 == k - 1) {
            e.2 = 1.0;
        }
    }
    CsrMatrix::from_triplets(k, k, t)
}

/// `(k−1)×k` forward difference.
fn difference(k: usize) -> Result<CsrMatrix> {
    CsrMatrix::from_triplets(
        k - 1,
        k,
        (0..k - 1).flat_map(|i| [(i, i, -1.0), (i, i + 1, 1.0)]),
    )
}

struct Blocks {
    a1: CsrMatrix,
    a2: CsrMatrix,
    b: CsrMatrix,
    d: CsrMatrix,
    f: Vec<f64>,
    g: Vec<f64>,
}

fn assemble(p: &ElasticityParams) -> Result<Blocks> {
    let n = p.n;
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid count n={n} must be >= 2"
        )));
    }
    if !(p.mu > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "mu={} must be positive",
            p.mu
        )));
    }
    if !(p.lambda_field.min() >= 0.0) {
        return Err(Error::InvalidArgument(
            "lambda field must be nonnegative".into(),
        ));
    }
    let h = 1.0 / n as f64;
    let (i1, i_n) = (CsrMatrix::identity(n - 1), CsrMatrix::identity(n));
    let (t1, t2) = (h1(n - 1), h2(n)?);
    let s = p.mu / (h * h);
    let a1 = i_n.kron(&t1)?.add(&t2.kron(&i1)?)?.scale(s);
    let a2 = i1.kron(&t2)?.add(&t1.kron(&i_n)?)?.scale(s);
    let dd = difference(n)?;
    let b1 = i_n.kron(&dd)?.scale(1.0 / h);
    let b2 = dd.kron(&i_n)?.scale(1.0 / h);
    let b = CsrMatrix::vstack(&[&b1, &b2])?;
    let mut dvals = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let (x, y) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            dvals.push(1.0 / (p.mu + p.lambda_field.at(x, y)));
        }
    }
    let d = CsrMatrix::from_diagonal(&dvals);
    let nu = n * (n - 1);
    let (f, g) = match p.forcing {
        ElasticityForcing::VerticalVelocity => {
            let mut f = vec![0.0; 2 * nu];
            f[nu..].iter_mut().for_each(|v| *v = 1.0);
            (f, vec![0.0; n * n])
        }
        ElasticityForcing::Divergence => (vec![0.0; 2 * nu], vec![1.0; n * n]),
    };
    Ok(Blocks { a1, a2, b, d, f, g })
}

fn forcing_name(f: ElasticityForcing) -> &'static str {
    match f {
        ElasticityForcing::VerticalVelocity => "velocity",
        ElasticityForcing::Divergence => "divergence",
    }
}

pub fn gen_elasticity(p: &ElasticityParams) -> Result<SaddleProblem> {
    let bl = assemble(p)?;
    let a = CsrMatrix::block_diag(&[&bl.a1, &bl.a2]);
    Ok(SaddleProblem::new(a, bl.b, bl.d, bl.f, bl.g, true)?
        .with_meta("generator", "elasticity")
        .with_meta("n", p.n)
        .with_meta("mu", p.mu)
        .with_meta("forcing", forcing_name(p.forcing)))
}

/// Elasticity plus central-difference convection `b/(2h)(u_{k+1} − u_{k−1})`
/// in the `x₁` direction for `u₁` and the `x₂` direction for `u₂`.
pub fn gen_convection(p: &ConvectionParams) -> Result<SaddleProblem> {
    let e = &p.elasticity;
    let bl = assemble(e)?;
    let n = e.n;
    let h = 1.0 / n as f64;
    let c = CsrMatrix::tridiag(n - 1, -1.0, 0.0, 1.0).scale(p.b / (2.0 * h));
    let i_n = CsrMatrix::identity(n);
    let a1 = bl.a1.add(&i_n.kron(&c)?)?;
    let a2 = bl.a2.add(&c.kron(&i_n)?)?;
    let a = CsrMatrix::block_diag(&[&a1, &a2]);
    Ok(SaddleProblem::new(a, bl.b, bl.d, bl.f, bl.g, p.b == 0.0)?
        .with_meta("generator", "convection")
        .with_meta("n", n)
        .with_meta("mu", e.mu)
        .with_meta("b", p.b)
        .with_meta("forcing", forcing_name(e.forcing)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h2_has_unit_corners() {
        let t = h2(4).unwrap();
        assert_eq!(t.get(0, 0), 1.0);
        assert_eq!(t.get(3, 3), 1.0);
        assert_eq!(t.get(1, 1), 2.0);
        assert_eq!(t.get(0, 1), -1.0);
    }

    #[test]
    fn unknown_counts() {
        let p = gen_elasticity(&ElasticityParams::default()).unwrap();
        assert_eq!(p.n(), 760);
        assert_eq!(p.m(), 400);
    }

    #[test]
    fn constant_lambda_zero_gives_identity_d() {
        let p = gen_elasticity(&ElasticityParams {
            n: 5,
            lambda_field: LambdaField::Constant(0.0),
            ..Default::default()
        })
        .unwrap();
        assert_eq!(*p.d(), CsrMatrix::identity(25));
    }

    #[test]
    fn zero_convection_is_bit_identical() {
        let e = ElasticityParams {
            n: 6,
            ..Default::default()
        };
        let a = gen_elasticity(&e).unwrap();
        let c = gen_convection(&ConvectionParams {
            elasticity: e,
            b: 0.0,
        })
        .unwrap();
        assert_eq!(a.a(), c.a());
        assert_eq!(a.b(), c.b());
        assert_eq!(a.d(), c.d());
        assert!(c.symmetric_a());
    }
}
