//! Preconditioners approximating `A⁻¹` or `S⁻¹`, and the operator contract
//! shared by all solvers.

mod incomplete;
mod pcg;
mod skyline;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use incomplete::{ic0, ict, IncompleteFactor, ShiftPolicy};
pub use pcg::{pcg_nonlinear, pcg_solve, NonlinearPreconditioner, PcgOutcome};
pub use skyline::{SkylineCholesky, SkylineLu};

use crate::dense::DenseMatrix;
use crate::error::{check_len, Error, Result};
use crate::sparse::vector::dot_unchecked;
use crate::sparse::CsrMatrix;

/// Something that can be applied to a vector, e.g. a matrix or the
/// matrix-free Schur complement.
pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[f64]) -> Result<Vec<f64>>;
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }
    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.matvec(v)
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }
    fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.matvec(v)
    }
}

/// Approximate inverse applied as `z = P(r)`.
pub trait Preconditioner: Send + Sync {
    fn dim(&self) -> usize;
    fn apply(&self, r: &[f64]) -> Result<Vec<f64>>;
    /// False for inner-iterative preconditioners whose output depends
    /// nonlinearly on the input.
    fn is_linear(&self) -> bool {
        true
    }
    fn label(&self) -> String;
}

impl<P: Preconditioner + ?Sized> Preconditioner for Arc<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        (**self).apply(r)
    }
    fn is_linear(&self) -> bool {
        (**self).is_linear()
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PrecondKind {
    Jacobi,
    Ic0,
    Ict(f64),
    Exact,
    ScaledIdentity(f64),
    MassDiagonal,
    Dense,
}

impl std::fmt::Display for PrecondKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PrecondKind::Jacobi => write!(f, "jacobi"),
            PrecondKind::Ic0 => write!(f, "ic0"),
            PrecondKind::Ict(t) => write!(f, "ict({t:e})"),
            PrecondKind::Exact => write!(f, "exact"),
            PrecondKind::ScaledIdentity(s) => write!(f, "scaled-identity({s})"),
            PrecondKind::MassDiagonal => write!(f, "mass-diagonal"),
            PrecondKind::Dense => write!(f, "dense"),
        }
    }
}

#[derive(Debug, Clone)]
enum Op {
    /// Multiplies entrywise.
    Diagonal(Vec<f64>),
    Scale(f64),
    Incomplete(IncompleteFactor),
    Cholesky(SkylineCholesky),
    Lu(SkylineLu),
    Dense(DenseMatrix),
}

/// A fixed linear preconditioner.
#[derive(Debug, Clone)]
pub struct LinearPreconditioner {
    kind: PrecondKind,
    dim: usize,
    op: Op,
}

impl LinearPreconditioner {
    pub fn kind(&self) -> &PrecondKind {
        &self.kind
    }

    /// Diagonal shift that was needed to complete an incomplete factorization.
    pub fn shift(&self) -> f64 {
        match &self.op {
            Op::Incomplete(f) => f.shift(),
            _ => 0.0,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    /// Preconditioner for `Ŝ = c·I`, so `apply(v) = v/c`.
    pub fn scaled_identity(n: usize, c: f64) -> Self {
        Self {
            kind: PrecondKind::ScaledIdentity(c),
            dim: n,
            op: Op::Scale(1.0 / c),
        }
    }

    /// Wraps an explicit dense approximate inverse.
    pub fn from_dense_inverse(inv: DenseMatrix) -> Result<Self> {
        check_len("dense preconditioner", inv.rows(), inv.cols())?;
        Ok(Self {
            kind: PrecondKind::Dense,
            dim: inv.rows(),
            op: Op::Dense(inv),
        })
    }
}

impl Preconditioner for LinearPreconditioner {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len("preconditioner apply", self.dim, r.len())?;
        match &self.op {
            Op::Diagonal(d) => Ok(r.iter().zip(d).map(|(a, b)| a * b).collect()),
            Op::Scale(s) => Ok(r.iter().map(|a| a * s).collect()),
            Op::Incomplete(f) => Ok(f.solve(r)),
            Op::Cholesky(f) => Ok(f.solve(r)),
            Op::Lu(f) => Ok(f.solve(r)),
            Op::Dense(m) => m.matvec(r),
        }
    }

    fn label(&self) -> String {
        self.kind.to_string()
    }
}

/// `apply(v) = v ./ diag(M)`.
pub fn jacobi(m: &CsrMatrix) -> Result<LinearPreconditioner> {
    check_len("jacobi", m.rows(), m.cols())?;
    let inv = m
        .diagonal()
        .into_iter()
        .enumerate()
        .map(|(row, value)| {
            if value > 0.0 {
                Ok(1.0 / value)
            } else {
                Err(Error::NonPositiveDiagonal { row, value })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LinearPreconditioner {
        kind: PrecondKind::Jacobi,
        dim: m.rows(),
        op: Op::Diagonal(inv),
    })
}

pub fn ic0_preconditioner(m: &CsrMatrix, policy: ShiftPolicy) -> Result<LinearPreconditioner> {
    let f = ic0(m, policy)?;
    Ok(LinearPreconditioner {
        kind: PrecondKind::Ic0,
        dim: m.rows(),
        op: Op::Incomplete(f),
    })
}

pub fn ict_preconditioner(
    m: &CsrMatrix,
    droptol: f64,
    policy: ShiftPolicy,
) -> Result<LinearPreconditioner> {
    let f = ict(m, droptol, policy)?;
    Ok(LinearPreconditioner {
        kind: PrecondKind::Ict(droptol),
        dim: m.rows(),
        op: Op::Incomplete(f),
    })
}

/// Direct solve with `M` through an envelope Cholesky factorization.
pub fn exact(m: &CsrMatrix) -> Result<LinearPreconditioner> {
    let f = SkylineCholesky::new(m)?;
    Ok(LinearPreconditioner {
        kind: PrecondKind::Exact,
        dim: m.rows(),
        op: Op::Cholesky(f),
    })
}

/// Direct solve with a nonsymmetric `M` through an envelope LU factorization
/// without pivoting. Intended for diagonally dominant matrices.
pub fn exact_lu(m: &CsrMatrix) -> Result<LinearPreconditioner> {
    let f = SkylineLu::new(m)?;
    Ok(LinearPreconditioner {
        kind: PrecondKind::Exact,
        dim: m.rows(),
        op: Op::Lu(f),
    })
}

/// Schur complement preconditioners used in the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchurDiagKind {
    /// `Ŝ = I + D` with `D` diagonal.
    IdentityPlusD,
    /// Pressure mass matrix `h²I`.
    PressureMass { h: f64 },
}

pub fn schur_diag(d: &CsrMatrix, kind: SchurDiagKind) -> Result<LinearPreconditioner> {
    let m = d.rows();
    match kind {
        SchurDiagKind::IdentityPlusD => {
            if !d.is_diagonal() {
                return Err(Error::InvalidArgument(
                    "identity-plus-D needs a diagonal D".into(),
                ));
            }
            let inv = d
                .diagonal()
                .into_iter()
                .enumerate()
                .map(|(row, v)| {
                    let value = 1.0 + v;
                    if value > 0.0 {
                        Ok(1.0 / value)
                    } else {
                        Err(Error::NonPositiveDiagonal { row, value })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(LinearPreconditioner {
                kind: PrecondKind::MassDiagonal,
                dim: m,
                op: Op::Diagonal(inv),
            })
        }
        SchurDiagKind::PressureMass { h } => {
            if !(h > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "mesh size {h} must be positive"
                )));
            }
            Ok(LinearPreconditioner {
                kind: PrecondKind::MassDiagonal,
                dim: m,
                op: Op::Scale(1.0 / (h * h)),
            })
        }
    }
}

/// Outcome of the randomized linearity/symmetry/positivity probes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub max_linearity_error: f64,
    pub max_symmetry_error: f64,
    pub min_rayleigh: f64,
}

impl ProbeReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_linearity_error <= tol && self.max_symmetry_error <= tol && self.min_rayleigh > 0.0
    }
}

/// Checks `P(au+bv) = aP(u)+bP(v)`, `⟨P(u),v⟩ = ⟨u,P(v)⟩` and `⟨P(u),u⟩ > 0`
/// on random probes. Errors are relative.
pub fn probe(p: &dyn Preconditioner, probes: usize, seed: u64) -> Result<ProbeReport> {
    let n = p.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = ProbeReport {
        max_linearity_error: 0.0,
        max_symmetry_error: 0.0,
        min_rayleigh: f64::INFINITY,
    };
    for _ in 0..probes {
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let pu = p.apply(&u)?;
        let pv = p.apply(&v)?;
        let w: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let pw = p.apply(&w)?;
        let comb: Vec<f64> = pu.iter().zip(&pv).map(|(x, y)| a * x + b * y).collect();
        let scale = crate::sparse::norm2(&comb).max(f64::MIN_POSITIVE);
        let diff: Vec<f64> = pw.iter().zip(&comb).map(|(x, y)| x - y).collect();
        rep.max_linearity_error = rep
            .max_linearity_error
            .max(crate::sparse::norm2(&diff) / scale);
        let s1 = dot_unchecked(&pu, &v);
        let s2 = dot_unchecked(&u, &pv);
        let sscale = s1.abs().max(s2.abs()).max(f64::MIN_POSITIVE);
        rep.max_symmetry_error = rep.max_symmetry_error.max((s1 - s2).abs() / sscale);
        rep.min_rayleigh = rep.min_rayleigh.min(dot_unchecked(&pu, &u));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_examples() {
        let p = jacobi(&CsrMatrix::from_diagonal(&[2.0, 4.0])).unwrap();
        assert_eq!(p.apply(&[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
        let i = jacobi(&CsrMatrix::identity(3)).unwrap();
        assert_eq!(i.apply(&[1.0, -2.0, 3.0]).unwrap(), vec![1.0, -2.0, 3.0]);
        let bad = CsrMatrix::from_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            jacobi(&bad),
            Err(Error::NonPositiveDiagonal { row: 1, .. })
        ));
    }

    #[test]
    fn exact_examples() {
        let p = exact(&CsrMatrix::from_diagonal(&[2.0])).unwrap();
        assert!((p.apply(&[4.0]).unwrap()[0] - 2.0).abs() < 1e-15);
        let i = exact(&CsrMatrix::identity(4)).unwrap();
        assert_eq!(
            i.apply(&[1.0, 2.0, 3.0, 4.0]).unwrap(),
            vec![1.0, 2.0, 3.0, 4.0]
        );
    }

    #[test]
    fn schur_diag_examples() {
        let z = schur_diag(&CsrMatrix::zeros(3, 3), SchurDiagKind::IdentityPlusD).unwrap();
        assert_eq!(z.apply(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let d = CsrMatrix::from_diagonal(&[1.0 / 1001.0, 1.0]);
        let p = schur_diag(&d, SchurDiagKind::IdentityPlusD).unwrap();
        let out = p.apply(&[1.0, 1.0]).unwrap();
        assert!((out[0] - 1001.0 / 1002.0).abs() < 1e-15);
        assert_eq!(out[1], 0.5);
        let s = schur_diag(
            &CsrMatrix::zeros(2, 2),
            SchurDiagKind::PressureMass { h: 1.0 / 32.0 },
        )
        .unwrap();
        assert_eq!(s.apply(&[1.0, 2.0]).unwrap(), vec![1024.0, 2048.0]);
        let nd = CsrMatrix::tridiag(2, 1.0, 2.0, 1.0);
        assert!(schur_diag(&nd, SchurDiagKind::IdentityPlusD).is_err());
    }
}
