//! Constants of the convergence analysis and dense checks of its lemmas and
//! theorems on desk-scale instances.
//!
//! Notation: `λ, λ₀` bound the spectrum of `Â⁻¹A` (`λÂ ≤ A ≤ λ₀Â`),
//! `H = BᵗÂ⁻¹B + D`, `S = BᵗA⁻¹B + D = RRᵗ`, and
//! `BᵗA^{−1/2} = U[Σ₀ 0]Vᵗ`. The error-propagation matrix is
//!
//! ```text
//! F = [ α(I + Σ₀UᵗQ⁻¹UΣ₀)   √α Σ₀UᵗQ⁻¹R ]
//!     [ √α RᵗQ⁻¹UΣ₀         −(I − RᵗQ⁻¹R) ]
//! ```

mod verify;

pub use verify::{
    corollary_rate, corpus, equivalence_check, verify_instance, verify_theory, CheckTally,
    CorollaryOutcome, CorpusInstance, EquivalenceOutcome, InstanceVerdict, TheorySummary,
    VerifyOptions,
};

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{
    chol, generalized_eigenvalues, spd_inverse, spectral_norm, sym_eig, sym_eig_bounds,
    sym_inv_sqrt, sym_sqrt, DenseMatrix, Lu,
};
use crate::error::{check_len, Error, Result};
use crate::precond::{LinearOperator, Preconditioner};
use crate::saddle::SaddleProblem;
use crate::sparse::norm2;
use crate::sparse::vector::dot_unchecked;

/// Largest `n + m` handled by the dense path.
pub const DENSE_LIMIT: usize = 1500;

/// How `c₀`, the largest eigenvalue of `D⁻¹BᵗÂ⁻¹B`, was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum C0Kind {
    Finite,
    /// `D = 0`.
    Infinite,
    /// `D` singular but nonzero: the value is restricted to the range of `D`
    /// and the `δ` constants use `c₀ = ∞`.
    Partial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryReport {
    /// Extremal eigenvalues of `Â⁻¹A` as computed.
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `min(λ_min, 1)` and `max(λ_max, 1)`.
    pub lambda: f64,
    pub lambda0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c0: f64,
    pub c0_kind: C0Kind,
    pub delta1: f64,
    pub delta2: f64,
    /// Extremal eigenvalues of the pencil `(BᵗA⁻¹B, BᵗÂ⁻¹B)`, when `B` has
    /// full column rank.
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub lambda_hat: f64,
}

impl TheoryReport {
    /// `λ̃₀ = λ₀/λ`.
    pub fn lambda_tilde0(&self) -> f64 {
        self.lambda0 / self.lambda
    }

    /// Lemma interval `[(1−β_i)δ₁, (1+β_i)δ₂]`.
    pub fn lemma_interval(&self, beta_i: f64) -> (f64, f64) {
        ((1.0 - beta_i) * self.delta1, (1.0 + beta_i) * self.delta2)
    }

    /// Right-hand side `2(1−α)/(1−α+2c₁α)` of the convergence theorem.
    pub fn theorem_bound(&self, c1: f64) -> f64 {
        let a = self.alpha;
        2.0 * (1.0 - a) / (1.0 - a + 2.0 * c1 * a)
    }

    /// `γ(μ, α, c₁) = (μ+1)(μ−α)/(αc₁(μ+1) + μ − α)`.
    pub fn gamma(&self, mu: f64, c1: f64) -> f64 {
        let a = self.alpha;
        (mu + 1.0) * (mu - a) / (a * c1 * (mu + 1.0) + mu - a)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x:e}"))
}

impl fmt::Display for TheoryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lambda_min={:e}", self.lambda_min)?;
        writeln!(f, "lambda_max={:e}", self.lambda_max)?;
        writeln!(f, "lambda={:e}", self.lambda)?;
        writeln!(f, "lambda0={:e}", self.lambda0)?;
        writeln!(f, "kappa1={:e}", self.kappa1)?;
        writeln!(f, "kappa2={:e}", self.kappa2)?;
        writeln!(f, "alpha={:e}", self.alpha)?;
        writeln!(f, "beta={:e}", self.beta)?;
        writeln!(f, "c0={:e}", self.c0)?;
        let kind = match self.c0_kind {
            C0Kind::Finite => "finite",
            C0Kind::Infinite => "infinite",
            C0Kind::Partial => "partial",
        };
        writeln!(f, "c0_kind={kind}")?;
        writeln!(f, "delta1={:e}", self.delta1)?;
        writeln!(f, "delta2={:e}", self.delta2)?;
        writeln!(f, "gamma1={}", fmt_opt(self.gamma1))?;
        writeln!(f, "gamma2={}", fmt_opt(self.gamma2))?;
        writeln!(f, "lambda_hat={:e}", self.lambda_hat)
    }
}

/// Applies `p` to the unit vectors and symmetrizes the result.
pub fn dense_operator(p: &dyn Preconditioner) -> Result<DenseMatrix> {
    let n = p.dim();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(p.apply(&e)?);
    }
    Ok(DenseMatrix::from_columns(n, &cols)?.symmetrized())
}

fn condition((lo, hi): (f64, f64)) -> f64 {
    hi / lo
}

fn rate_constant(kappa: f64) -> f64 {
    (kappa - 1.0) / (kappa + 1.0)
}

fn deltas(lambda: f64, lambda0: f64, c0: f64, kind: C0Kind) -> (f64, f64) {
    match kind {
        C0Kind::Finite => (
            (lambda0 + c0) / (lambda0 * (1.0 + c0)),
            (lambda + c0) / (lambda * (1.0 + c0)),
        ),
        C0Kind::Infinite | C0Kind::Partial => (1.0 / lambda0, 1.0 / lambda),
    }
}

fn c0_of(bab: &DenseMatrix, d: &DenseMatrix) -> Result<(f64, C0Kind)> {
    if d.max_abs() == 0.0 {
        return Ok((f64::INFINITY, C0Kind::Infinite));
    }
    if chol(d).is_ok() {
        let ev = generalized_eigenvalues(bab, d)?;
        return Ok((*ev.last().unwrap_or(&0.0), C0Kind::Finite));
    }
    let e = sym_eig(d)?;
    let top = e.values.last().copied().unwrap_or(0.0);
    let cols: Vec<Vec<f64>> = (0..d.rows())
        .filter(|&k| e.values[k] > 1e-12 * top)
        .map(|k| e.vectors.column(k))
        .collect();
    let p = DenseMatrix::from_columns(d.rows(), &cols)?;
    let pt = p.transpose();
    let ev = generalized_eigenvalues(
        &pt.matmul(bab)?.matmul(&p)?.symmetrized(),
        &pt.matmul(d)?.matmul(&p)?.symmetrized(),
    )?;
    Ok((*ev.last().unwrap_or(&0.0), C0Kind::Partial))
}

/// Estimates of the spectral bounds of `Â⁻¹A` by power iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaHatEstimate {
    pub lambda0_hat: f64,
    pub lambda_min_hat: f64,
    pub kappa1_hat: f64,
    /// `min(λ̂₀/κ̂₁, 1)`.
    pub lambda_hat: f64,
}

/// Power method on `Â⁻¹A` in the `A` inner product for `λ̂₀`, then on
/// `λ̂₀I − Â⁻¹A` for the lower end.
pub fn lambda_hat_estimate(
    a_hat: &dyn Preconditioner,
    a: &dyn LinearOperator,
    power_iters: usize,
    seed: u64,
) -> Result<LambdaHatEstimate> {
    if power_iters < 10 {
        return Err(Error::InvalidArgument(format!(
            "power_iters = {power_iters}, need at least 10"
        )));
    }
    let n = a.dim();
    check_len("Â dimension", n, a_hat.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let t = |v: &[f64]| -> Result<Vec<f64>> { a_hat.apply(&a.apply(v)?) };
    let a_normalize = |v: &mut Vec<f64>| -> Result<()> {
        let nrm = dot_unchecked(&a.apply(v)?, v).sqrt();
        v.iter_mut().for_each(|x| *x /= nrm);
        Ok(())
    };
    let mut v = start.clone();
    a_normalize(&mut v)?;
    let mut lambda0 = 0.0;
    for _ in 0..power_iters {
        let w = t(&v)?;
        lambda0 = dot_unchecked(&a.apply(&w)?, &v);
        v = w;
        a_normalize(&mut v)?;
    }
    let mut v = start;
    a_normalize(&mut v)?;
    let mut top = 0.0;
    for _ in 0..power_iters {
        let tv = t(&v)?;
        let w: Vec<f64> = v.iter().zip(&tv).map(|(x, y)| lambda0 * x - y).collect();
        top = dot_unchecked(&a.apply(&w)?, &v);
        v = w;
        a_normalize(&mut v)?;
    }
    let lambda_min = (lambda0 - top).max(f64::MIN_POSITIVE);
    let kappa = (lambda0 / lambda_min).max(1.0);
    Ok(LambdaHatEstimate {
        lambda0_hat: lambda0,
        lambda_min_hat: lambda_min,
        kappa1_hat: kappa,
        lambda_hat: (lambda0 / kappa).min(1.0),
    })
}

/// The constants of the analysis for linear `Â`, `Ŝ`.
pub fn constants(
    problem: &SaddleProblem,
    a_hat: &dyn Preconditioner,
    s_hat: &dyn Preconditioner,
) -> Result<TheoryReport> {
    Ok(DenseAnalysis::new(problem, a_hat, s_hat)?.report)
}

/// Spectrum summary of an assembled `F`.
#[derive(Debug, Clone)]
pub struct FAnalysis {
    pub f: DenseMatrix,
    pub min: f64,
    pub max: f64,
    /// `‖F‖ = max(|min|, |max|)`.
    pub rho: f64,
}

/// Dense matrices shared by the per-iteration checks of one instance.
#[derive(Debug, Clone)]
pub struct DenseAnalysis {
    report: TheoryReport,
    a_inv_sqrt: DenseMatrix,
    /// `A^{1/2}Â⁻¹A^{1/2}`
    k: DenseMatrix,
    s_hat_inv: DenseMatrix,
    h: DenseMatrix,
    h_sqrt: DenseMatrix,
    h_inv_sqrt: DenseMatrix,
    /// Lower Cholesky factor of `S`.
    r: DenseMatrix,
    /// `UΣ₀`
    u_sigma: DenseMatrix,
    v: DenseMatrix,
}

impl DenseAnalysis {
    pub fn new(
        problem: &SaddleProblem,
        a_hat: &dyn Preconditioner,
        s_hat: &dyn Preconditioner,
    ) -> Result<Self> {
        let (n, m) = (problem.n(), problem.m());
        if n + m > DENSE_LIMIT {
            return Err(Error::InvalidArgument(format!(
                "dense analysis limited to n + m <= {DENSE_LIMIT}, got {}",
                n + m
            )));
        }
        if !problem.symmetric_a() {
            return Err(Error::InvalidArgument(
                "dense analysis needs symmetric A".into(),
            ));
        }
        check_len("Â dimension", n, a_hat.dim())?;
        check_len("Ŝ dimension", m, s_hat.dim())?;
        let a = DenseMatrix::from_sparse(problem.a());
        let b = DenseMatrix::from_sparse(problem.b());
        let d = DenseMatrix::from_sparse(problem.d());
        let a_hat_inv = dense_operator(a_hat)?;
        let a_hat_mat = spd_inverse(&a_hat_inv)?.symmetrized();
        let (lambda_min, lambda_max) = {
            let ev = generalized_eigenvalues(&a, &a_hat_mat)?;
            (ev[0], ev[ev.len() - 1])
        };
        let (lambda, lambda0) = (lambda_min.min(1.0), lambda_max.max(1.0));
        let kappa1 = condition((lambda_min, lambda_max));
        let alpha = rate_constant(kappa1);

        let bt = b.transpose();
        let bab = bt.matmul(&a_hat_inv)?.matmul(&b)?.symmetrized();
        let h = bab.add_scaled(1.0, &d, 1.0)?.symmetrized();
        let s_hat_inv = dense_operator(s_hat)?;
        let s_hat_mat = spd_inverse(&s_hat_inv)?.symmetrized();
        let kappa2 = {
            let ev = generalized_eigenvalues(&h, &s_hat_mat)?;
            ev[ev.len() - 1] / ev[0]
        };
        let beta = rate_constant(kappa2);
        let (c0, c0_kind) = c0_of(&bab, &d)?;
        let (delta1, delta2) = deltas(lambda, lambda0, c0, c0_kind);

        let a_inv = spd_inverse(&a)?.symmetrized();
        let a_sqrt = sym_sqrt(&a)?;
        let a_inv_sqrt = sym_inv_sqrt(&a)?;
        let k = a_sqrt.matmul(&a_hat_inv)?.matmul(&a_sqrt)?.symmetrized();
        let bainvb = bt.matmul(&a_inv)?.matmul(&b)?.symmetrized();
        let (gamma1, gamma2) = match generalized_eigenvalues(&bainvb, &bab) {
            Ok(ev) => (Some(ev[ev.len() - 1]), Some(ev[0])),
            Err(_) => (None, None),
        };
        let s = bainvb.add_scaled(1.0, &d, 1.0)?.symmetrized();
        let r = chol(&s)?;
        let svd = crate::dense::svd_rect(&bt.matmul(&a_inv_sqrt)?)?;
        let u_sigma = DenseMatrix::from_fn(m, m, |i, j| svd.u[(i, j)] * svd.sigma[j]);
        let lh = lambda_hat_estimate(a_hat, problem.a(), 50, 0x1a4b)?;

        Ok(Self {
            report: TheoryReport {
                lambda_min,
                lambda_max,
                lambda,
                lambda0,
                kappa1,
                kappa2,
                alpha,
                beta,
                c0,
                c0_kind,
                delta1,
                delta2,
                gamma1,
                gamma2,
                lambda_hat: lh.lambda_hat,
            },
            a_inv_sqrt,
            k,
            s_hat_inv,
            h_sqrt: sym_sqrt(&h)?,
            h_inv_sqrt: sym_inv_sqrt(&h)?,
            h,
            r,
            u_sigma,
            v: svd.v,
        })
    }

    pub fn report(&self) -> &TheoryReport {
        &self.report
    }

    pub fn s_hat_inverse(&self) -> &DenseMatrix {
        &self.s_hat_inv
    }

    pub fn schur_factor(&self) -> &DenseMatrix {
        &self.r
    }

    pub fn approximate_schur(&self) -> &DenseMatrix {
        &self.h
    }

    /// `|(I − ω_iA^{1/2}Â⁻¹A^{1/2})A^{−1/2}f_i| / |A^{−1/2}f_i|`.
    pub fn alpha_i(&self, f_i: &[f64], omega: f64) -> Result<f64> {
        let z = self.a_inv_sqrt.matvec(f_i)?;
        let zn = norm2(&z);
        if zn == 0.0 {
            return Err(Error::InvalidArgument("alpha_i needs f_i != 0".into()));
        }
        Ok(norm2(&self.x_residual(&z, omega)?) / zn)
    }

    fn x_residual(&self, z: &[f64], omega: f64) -> Result<Vec<f64>> {
        let kz = self.k.matvec(z)?;
        Ok(z.iter().zip(&kz).map(|(a, b)| a - omega * b).collect())
    }

    /// `β_i` from its definition with dense `H^{±1/2}`.
    pub fn beta_i(&self, g_i: &[f64], tauhat: f64) -> Result<f64> {
        let a = self.h_inv_sqrt.matvec(g_i)?;
        let an = norm2(&a);
        if an == 0.0 {
            return Ok(0.0);
        }
        let c = self.beta_residual(&a, g_i, tauhat)?;
        Ok(norm2(&c) / an)
    }

    /// `a − τ̂H^{1/2}Ŝ⁻¹g` with `a = H^{−1/2}g`.
    fn beta_residual(&self, a: &[f64], g_i: &[f64], tauhat: f64) -> Result<Vec<f64>> {
        let b = self.h_sqrt.matvec(&self.s_hat_inv.matvec(g_i)?)?;
        Ok(a.iter().zip(&b).map(|(x, y)| x - tauhat * y).collect())
    }

    /// `τ̂_iŜ⁻¹`, the literal candidate for `G_i⁻¹`.
    pub fn concrete_g_inverse(&self, tauhat: f64) -> DenseMatrix {
        self.s_hat_inv.scale(tauhat)
    }

    /// An SPD `G_i⁻¹` with `G_i⁻¹g_i = τ̂_iŜ⁻¹g_i` and
    /// `‖I − H^{1/2}G_i⁻¹H^{1/2}‖ = β_i`, built as
    /// `H^{−1/2}(I − β_iR)H^{−1/2}` with a Householder reflection `R` that
    /// maps `H^{−1/2}g_i` onto the direction of the defect. Returns `β_i` too.
    pub fn constructed_g_inverse(&self, g_i: &[f64], tauhat: f64) -> Result<(DenseMatrix, f64)> {
        let m = g_i.len();
        let a = self.h_inv_sqrt.matvec(g_i)?;
        let an = norm2(&a);
        let c = self.beta_residual(&a, g_i, tauhat)?;
        let cn = norm2(&c);
        let beta_i = if an == 0.0 { 0.0 } else { cn / an };
        let mut x = DenseMatrix::identity(m);
        if an > 0.0 && cn > 0.0 {
            let w: Vec<f64> = a.iter().zip(&c).map(|(p, q)| p / an - q / cn).collect();
            let wn = norm2(&w);
            let refl = if wn > 0.0 {
                let w: Vec<f64> = w.iter().map(|v| v / wn).collect();
                DenseMatrix::from_fn(m, m, |i, j| {
                    let id = if i == j { 1.0 } else { 0.0 };
                    id - 2.0 * w[i] * w[j]
                })
            } else {
                DenseMatrix::identity(m)
            };
            x = x.add_scaled(1.0, &refl, -beta_i)?;
        }
        let g_inv = self
            .h_inv_sqrt
            .matmul(&x)?
            .matmul(&self.h_inv_sqrt)?
            .symmetrized();
        Ok((g_inv, beta_i))
    }

    /// Extremal eigenvalues of `RᵗG⁻¹R`.
    pub fn lemma_spectrum(&self, g_inv: &DenseMatrix) -> Result<(f64, f64)> {
        let rt = self.r.transpose();
        sym_eig_bounds(&rt.matmul(g_inv)?.matmul(&self.r)?.symmetrized())
    }

    /// `c₁` of the weighted inequality `c₁RᵗQ⁻¹R ≥ Σ₀UᵗQ⁻¹UΣ₀`.
    pub fn c1(&self, q_inv: &DenseMatrix) -> Result<f64> {
        let rt = self.r.transpose();
        let w = rt.matmul(q_inv)?.matmul(&self.r)?.symmetrized();
        let t = self
            .u_sigma
            .transpose()
            .matmul(q_inv)?
            .matmul(&self.u_sigma)?
            .symmetrized();
        let ev = generalized_eigenvalues(&t, &w)?;
        Ok(ev[ev.len() - 1].max(0.0))
    }

    pub fn build_f(&self, q_inv: &DenseMatrix) -> Result<FAnalysis> {
        let m = self.r.rows();
        let alpha = self.report.alpha;
        let sa = alpha.sqrt();
        let ust = self.u_sigma.transpose();
        let t = ust.matmul(q_inv)?.matmul(&self.u_sigma)?;
        let c = ust.matmul(q_inv)?.matmul(&self.r)?;
        let w = self.r.transpose().matmul(q_inv)?.matmul(&self.r)?;
        let eye = DenseMatrix::identity(m);
        let mut f = DenseMatrix::zeros(2 * m, 2 * m);
        f.set_block(0, 0, &eye.add_scaled(alpha, &t, alpha)?);
        f.set_block(0, m, &c.scale(sa));
        f.set_block(m, 0, &c.transpose().scale(sa));
        f.set_block(m, m, &eye.add_scaled(-1.0, &w, 1.0)?);
        let f = f.symmetrized();
        let (min, max) = sym_eig_bounds(&f)?;
        Ok(FAnalysis {
            rho: min.abs().max(max.abs()),
            f,
            min,
            max,
        })
    }

    /// `(E⁽¹⁾, E⁽²⁾) = (√α VᵗA^{−1/2}f, Rᵗe_y)`.
    pub fn error_components(&self, f: &[f64], e_y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let sa = self.report.alpha.sqrt();
        let z = self.a_inv_sqrt.matvec(f)?;
        let mut e1 = self.v.transpose().matvec(&z)?;
        e1.iter_mut().for_each(|v| *v *= sa);
        Ok((e1, self.r.transpose().matvec(e_y)?))
    }

    /// `|(I − ω_iA^{1/2}Â⁻¹A^{1/2})A^{−1/2}f_i|² / α`, which equals
    /// `(α_i²/α²)|E⁽¹⁾_i|²`.
    pub fn weighted_e1_sq(&self, f_i: &[f64], omega: f64) -> Result<f64> {
        let z = self.a_inv_sqrt.matvec(f_i)?;
        let q = norm2(&self.x_residual(&z, omega)?);
        Ok(q * q / self.report.alpha)
    }
}

/// Spectral norms measuring how far a nonsymmetric `A` is from its
/// symmetric part `A₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonsymDiagnostics {
    /// `‖J − I‖` with `J = A₀^{1/2}A⁻¹A₀^{1/2}`.
    pub j_minus_i: f64,
    pub j_inv_minus_i: f64,
    /// `‖S − S₀‖` with `S₀ = BᵗA₀⁻¹B + D`.
    pub s_minus_s0: f64,
}

pub fn nonsym_diagnostics(problem: &SaddleProblem) -> Result<NonsymDiagnostics> {
    let (n, m) = (problem.n(), problem.m());
    if n + m > DENSE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "dense diagnostics limited to n + m <= {DENSE_LIMIT}"
        )));
    }
    let a = DenseMatrix::from_sparse(problem.a());
    let a0 = a.symmetrized();
    let a0_sqrt = sym_sqrt(&a0)?;
    let a0_inv_sqrt = sym_inv_sqrt(&a0)?;
    let a_inv = Lu::new(&a)?.inverse()?;
    let eye = DenseMatrix::identity(n);
    let j = a0_sqrt.matmul(&a_inv)?.matmul(&a0_sqrt)?;
    let j_inv = a0_inv_sqrt.matmul(&a)?.matmul(&a0_inv_sqrt)?;
    let b = DenseMatrix::from_sparse(problem.b());
    let bt = b.transpose();
    let a0_inv = spd_inverse(&a0)?;
    let ds =
        bt.matmul(&a_inv)?
            .matmul(&b)?
            .add_scaled(1.0, &bt.matmul(&a0_inv)?.matmul(&b)?, -1.0)?;
    Ok(NonsymDiagnostics {
        j_minus_i: spectral_norm(&j.add_scaled(1.0, &eye, -1.0)?)?,
        j_inv_minus_i: spectral_norm(&j_inv.add_scaled(1.0, &eye, -1.0)?)?,
        s_minus_s0: spectral_norm(&ds)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precond::LinearPreconditioner;
    use crate::problems::gen_random_qp;
    use crate::sparse::CsrMatrix;

    fn exact_inverse(m: &CsrMatrix) -> LinearPreconditioner {
        let inv = spd_inverse(&DenseMatrix::from_sparse(m)).unwrap();
        LinearPreconditioner::from_dense_inverse(inv).unwrap()
    }

    #[test]
    fn exact_preconditioners_give_trivial_constants() {
        let p = gen_random_qp(10, 4, 0.5, 3).unwrap();
        let a_hat = exact_inverse(p.a());
        let an = DenseAnalysis::new(&p, &a_hat, &LinearPreconditioner::identity(4)).unwrap();
        let h = an.approximate_schur().clone();
        let s_hat = LinearPreconditioner::from_dense_inverse(spd_inverse(&h).unwrap()).unwrap();
        let r = constants(&p, &a_hat, &s_hat).unwrap();
        assert!((r.kappa1 - 1.0).abs() < 1e-10);
        assert!(r.alpha.abs() < 1e-10);
        assert!(r.beta.abs() < 1e-10);
        assert!((r.delta1 - 1.0).abs() < 1e-10 && (r.delta2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn halved_preconditioner_keeps_kappa() {
        let p = gen_random_qp(8, 3, 0.5, 5).unwrap();
        let inv = spd_inverse(&DenseMatrix::from_sparse(p.a()))
            .unwrap()
            .scale(2.0);
        let a_hat = LinearPreconditioner::from_dense_inverse(inv).unwrap();
        let r = constants(&p, &a_hat, &LinearPreconditioner::identity(3)).unwrap();
        assert!((r.lambda_min - 2.0).abs() < 1e-10);
        assert!((r.lambda_max - 2.0).abs() < 1e-10);
        assert_eq!(r.lambda, 1.0);
        assert!((r.lambda0 - 2.0).abs() < 1e-10);
        assert!(r.alpha.abs() < 1e-10);
    }

    #[test]
    fn alpha_i_vanishes_for_exact_preconditioner() {
        let p = gen_random_qp(8, 3, 0.5, 7).unwrap();
        let an = DenseAnalysis::new(
            &p,
            &exact_inverse(p.a()),
            &LinearPreconditioner::identity(3),
        )
        .unwrap();
        assert!(an.alpha_i(p.f(), 1.0).unwrap() < 1e-10);
    }

    #[test]
    fn constructed_g_reproduces_the_step() {
        let p = gen_random_qp(12, 5, 0.2, 11).unwrap();
        let a_hat = crate::precond::jacobi(p.a()).unwrap();
        let s_hat = LinearPreconditioner::scaled_identity(5, 3.0);
        let an = DenseAnalysis::new(&p, &a_hat, &s_hat).unwrap();
        let g: Vec<f64> = (0..5).map(|k| (k as f64 + 1.0).sin()).collect();
        let s = an.s_hat_inverse().matvec(&g).unwrap();
        let hs = an.approximate_schur().matvec(&s).unwrap();
        let tauhat = dot_unchecked(&g, &s) / dot_unchecked(&hs, &s);
        let (g_inv, beta_i) = an.constructed_g_inverse(&g, tauhat).unwrap();
        let lhs = g_inv.matvec(&g).unwrap();
        for (u, v) in lhs.iter().zip(&s) {
            assert!((u - tauhat * v).abs() < 1e-10 * (1.0 + v.abs()));
        }
        assert!((beta_i - an.beta_i(&g, tauhat).unwrap()).abs() < 1e-12);
        let e = an
            .h_sqrt
            .matmul(&g_inv)
            .unwrap()
            .matmul(&an.h_sqrt)
            .unwrap()
            .add_scaled(-1.0, &DenseMatrix::identity(5), 1.0)
            .unwrap();
        assert!((spectral_norm(&e).unwrap() - beta_i).abs() < 1e-9);
    }

    #[test]
    fn zero_d_gives_infinite_c0() {
        let p = gen_random_qp(8, 3, 0.0, 2).unwrap();
        let r = constants(
            &p,
            &crate::precond::jacobi(p.a()).unwrap(),
            &LinearPreconditioner::identity(3),
        )
        .unwrap();
        assert_eq!(r.c0_kind, C0Kind::Infinite);
        assert!((r.delta2 - 1.0 / r.lambda).abs() < 1e-14);
    }

    #[test]
    fn lambda_hat_on_diagonal_pair() {
        let n = 10;
        let ratios: Vec<f64> = (0..n)
            .map(|k| 0.2 + 0.7 * k as f64 / (n - 1) as f64)
            .collect();
        let a = CsrMatrix::from_diagonal(&ratios);
        let est = lambda_hat_estimate(&LinearPreconditioner::identity(n), &a, 50, 1).unwrap();
        assert!((est.lambda0_hat - 0.9).abs() < 0.05 * 0.9);
        assert!((est.lambda_hat - 0.2).abs() < 0.05 * 0.2);
        let same = lambda_hat_estimate(&crate::precond::jacobi(&a).unwrap(), &a, 10, 1).unwrap();
        assert!((same.lambda_hat - 1.0).abs() < 1e-12);
        assert!(lambda_hat_estimate(&LinearPreconditioner::identity(n), &a, 5, 1).is_err());
    }

    #[test]
    fn symmetric_a_has_no_nonsymmetry() {
        let p = gen_random_qp(8, 3, 0.5, 9).unwrap();
        let d = nonsym_diagnostics(&p).unwrap();
        assert!(d.j_minus_i < 1e-12 && d.j_inv_minus_i < 1e-12 && d.s_minus_s0 < 1e-12);
    }

    #[test]
    fn report_serializes_as_key_value() {
        let p = gen_random_qp(8, 3, 0.5, 9).unwrap();
        let r = constants(
            &p,
            &crate::precond::jacobi(p.a()).unwrap(),
            &LinearPreconditioner::identity(3),
        )
        .unwrap();
        let text = r.to_string();
        assert!(text.lines().all(|l| l.contains('=')));
        assert!(text.contains("c0_kind=finite"));
    }
}
