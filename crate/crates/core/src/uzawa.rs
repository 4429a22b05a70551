//! Inexact Uzawa iterations with variable relaxation.
//!
//! One step of every variant reads
//!
//! ```text
//! f_i = f − A x_i − B y_i          r_i = Â⁻¹ f_i
//! ω_i = ⟨f_i, r_i⟩ / ⟨A r_i, r_i⟩  x_{i+1} = x_i + ω_i r_i
//! g_i = Bᵗ x_{i+1} − D y_i − g     s_i = Ŝ⁻¹ g_i
//! τ_i = θ_i ⟨g_i, s_i⟩ / ⟨H s_i, s_i⟩,   H = Bᵗ Â⁻¹ B + D
//! y_{i+1} = y_i + τ_i s_i
//! ```
//!
//! The variants differ in what `Â⁻¹` and `Ŝ⁻¹` are: fixed linear operators
//! (Algorithm 1), an inner PCG solve for `A` (Algorithm 2), an inner PCG
//! solve for `H` (Algorithm 3), or a nonsymmetric `A` whose symmetric part
//! is positive definite.

use std::io::Write;
use std::time::Instant;

use crate::error::{check_len, Error, Result};
use crate::precond::{LinearOperator, Preconditioner};
use crate::saddle::SaddleProblem;
use crate::sparse::norm2;
use crate::sparse::vector::dot_unchecked;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Alg1,
    Alg2,
    Alg3,
    Nonsymmetric,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Alg1 => "alg1",
            Variant::Alg2 => "alg2",
            Variant::Alg3 => "alg3",
            Variant::Nonsymmetric => "nonsymmetric",
        })
    }
}

/// Damping factor `θ_i` in `τ_i = θ_i τ̂_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theta {
    Fixed(f64),
    /// `θ_i = min(1, (1 − sqrt(max(0, 1 − λ̂ω_i)))/2)` with an estimate `λ̂`
    /// of the lower spectral bound of `Â⁻¹A`.
    Adaptive {
        lambda_hat: f64,
    },
}

impl Theta {
    pub fn value(&self, omega: f64) -> f64 {
        match *self {
            Theta::Fixed(t) => t,
            Theta::Adaptive { lambda_hat } => {
                let q = (1.0 - lambda_hat * omega).max(0.0);
                ((1.0 - q.sqrt()) / 2.0).min(1.0)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// `‖(f_i, g_i)‖₂`
    Stacked,
    /// `max{‖f_i‖₂, ‖g_i‖₂}`
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    Absolute,
    /// Relative to the same norm of the initial residual.
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    pub norm: NormKind,
    pub scaling: Scaling,
    pub tol: f64,
}

impl StopRule {
    pub fn stacked(tol: f64) -> Self {
        Self {
            norm: NormKind::Stacked,
            scaling: Scaling::Absolute,
            tol,
        }
    }

    pub fn max_norm(tol: f64) -> Self {
        Self {
            norm: NormKind::Max,
            scaling: Scaling::Absolute,
            tol,
        }
    }

    pub fn relative(self) -> Self {
        Self {
            scaling: Scaling::Relative,
            ..self
        }
    }

    pub fn measure(&self, fnorm: f64, gnorm: f64) -> f64 {
        match self.norm {
            NormKind::Stacked => fnorm.hypot(gnorm),
            NormKind::Max => fnorm.max(gnorm),
        }
    }

    /// Whether `(fnorm, gnorm)` satisfies the rule given the initial measure.
    pub fn satisfied(&self, fnorm: f64, gnorm: f64, initial: f64) -> bool {
        let v = self.measure(fnorm, gnorm);
        match self.scaling {
            Scaling::Absolute => v < self.tol,
            Scaling::Relative => initial == 0.0 || v < self.tol * initial,
        }
    }
}

impl std::fmt::Display for StopRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let norm = match self.norm {
            NormKind::Stacked => "stacked",
            NormKind::Max => "max",
        };
        let scaling = match self.scaling {
            Scaling::Absolute => "abs",
            Scaling::Relative => "rel",
        };
        write!(f, "{norm}-{scaling}-{:e}", self.tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UzawaConfig {
    pub variant: Variant,
    pub theta: Theta,
    pub max_iters: usize,
    pub stop_rule: StopRule,
    pub record_history: bool,
    /// Abort once the stacked residual exceeds this multiple of the initial one.
    pub divergence_factor: f64,
}

impl UzawaConfig {
    pub fn new(variant: Variant, theta: f64, stop_rule: StopRule, max_iters: usize) -> Self {
        Self {
            variant,
            theta: Theta::Fixed(theta),
            max_iters,
            stop_rule,
            record_history: true,
            divergence_factor: 1e6,
        }
    }

    fn validate(&self) -> Result<()> {
        let theta_ok = match self.theta {
            Theta::Fixed(t) => t > 0.0 && t.is_finite(),
            Theta::Adaptive { lambda_hat } => lambda_hat > 0.0 && lambda_hat.is_finite(),
        };
        if !theta_ok {
            return Err(Error::InvalidArgument(format!(
                "invalid theta {:?}",
                self.theta
            )));
        }
        if !(self.stop_rule.tol > 0.0) {
            return Err(Error::InvalidArgument(
                "stop tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Parameters of one completed iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// `‖f_i‖` at `(x_i, y_i)`.
    pub fnorm: f64,
    /// `‖g_i‖` at `(x_{i+1}, y_i)`.
    pub gnorm: f64,
    pub omega: f64,
    pub tauhat: f64,
    pub tau: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: Status,
    /// Completed updates `(x_i, y_i) → (x_{i+1}, y_{i+1})`.
    pub iterations: usize,
    /// `‖f − Ax − By‖` at the returned iterate.
    pub fnorm: f64,
    /// `‖Bᵗx − Dy − g‖` at the returned iterate.
    pub gnorm: f64,
    /// Stop-rule measure of the initial residual.
    pub initial_measure: f64,
    pub wall_seconds: f64,
    pub history: Vec<IterationRecord>,
    /// True residual measure before every update and after the last one.
    pub residual_trace: Vec<(f64, f64)>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    /// Number of updates after which `rule` would first have been satisfied.
    pub fn iterations_under(&self, rule: &StopRule) -> Option<usize> {
        let (f0, g0) = *self.residual_trace.first()?;
        let init = rule.measure(f0, g0);
        self.residual_trace
            .iter()
            .position(|&(f, g)| rule.satisfied(f, g, init))
    }

    /// Writes the history as CSV with header `iter,fnorm,gnorm,omega,tauhat,tau,theta`.
    pub fn write_history_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "iter,fnorm,gnorm,omega,tauhat,tau,theta")?;
        for (i, r) in self.history.iter().enumerate() {
            writeln!(
                w,
                "{},{:e},{:e},{:e},{:e},{:e},{:e}",
                i, r.fnorm, r.gnorm, r.omega, r.tauhat, r.tau, r.theta
            )?;
        }
        Ok(())
    }
}

/// Vectors of one iteration, handed to an observer.
#[derive(Debug)]
pub struct IterationSnapshot<'a> {
    pub index: usize,
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub f_i: &'a [f64],
    pub r_i: &'a [f64],
    pub x_next: &'a [f64],
    pub g_i: &'a [f64],
    pub s_i: &'a [f64],
    pub y_next: &'a [f64],
    pub record: IterationRecord,
}

/// `ω_i = ⟨f_i,r_i⟩/⟨Ar_i,r_i⟩`, or 1 when `f_i = 0`.
///
/// `⟨Ar,r⟩ = ⟨A₀r,r⟩` for `A₀ = (A+Aᵗ)/2`, so the same formula serves the
/// nonsymmetric variant.
pub fn step_omega(f_i: &[f64], r_i: &[f64], a: &dyn LinearOperator) -> Result<f64> {
    check_len("step_omega", f_i.len(), r_i.len())?;
    if f_i.iter().all(|&v| v == 0.0) {
        return Ok(1.0);
    }
    let ar = a.apply(r_i)?;
    let den = dot_unchecked(&ar, r_i);
    if den == 0.0 {
        return Err(Error::ZeroDenominator("<Ar_i, r_i>"));
    }
    if den < 0.0 {
        return Err(Error::SymmetricPartNotPositive(den));
    }
    Ok(dot_unchecked(f_i, r_i) / den)
}

/// `(τ̂_i, τ_i)` with `τ̂_i = ⟨g_i,s_i⟩/⟨Hs_i,s_i⟩` and `τ_i = θ_i τ̂_i`, or
/// `(1, 1)` when `s_i = 0`.
pub fn step_tau(
    g_i: &[f64],
    s_i: &[f64],
    h_product: impl Fn(&[f64]) -> Result<Vec<f64>>,
    theta: f64,
) -> Result<(f64, f64)> {
    check_len("step_tau", g_i.len(), s_i.len())?;
    if s_i.iter().all(|&v| v == 0.0) {
        return Ok((1.0, 1.0));
    }
    let hs = h_product(s_i)?;
    let den = dot_unchecked(&hs, s_i);
    if den == 0.0 {
        return Err(Error::ZeroDenominator("<Hs_i, s_i>"));
    }
    let tauhat = dot_unchecked(g_i, s_i) / den;
    if !(tauhat >= 0.0) {
        return Err(Error::Indefinite(format!(
            "tauhat = {tauhat:e}; S-hat or H is not positive definite"
        )));
    }
    Ok((tauhat, theta * tauhat))
}

/// Algorithm 1: fixed linear `Â` and `Ŝ`, symmetric `A`.
pub fn solve_alg1(
    problem: &SaddleProblem,
    a_hat: &dyn Preconditioner,
    s_hat: &dyn Preconditioner,
    config: &UzawaConfig,
) -> Result<SolveReport> {
    if !a_hat.is_linear() || !s_hat.is_linear() {
        return Err(Error::InvalidArgument(
            "alg1 needs linear preconditioners; use alg2/alg3 for inner solvers".into(),
        ));
    }
    require_symmetric(problem, "alg1")?;
    run(problem, a_hat, s_hat, a_hat, config, None)
}

/// Algorithm 2: `Ψ_A` may be an inner iterative solver. The `τ_i`
/// denominator is `⟨Ψ_A(Bs_i), Bs_i⟩ + ⟨Ds_i, s_i⟩`.
pub fn solve_alg2(
    problem: &SaddleProblem,
    psi_a: &dyn Preconditioner,
    s_hat: &dyn Preconditioner,
    config: &UzawaConfig,
) -> Result<SolveReport> {
    require_symmetric(problem, "alg2")?;
    run(problem, psi_a, s_hat, psi_a, config, None)
}

/// Algorithm 3: `s_i = Ψ_H(g_i)` where `Ψ_H` approximately inverts
/// `H = BᵗÂ⁻¹B + D`.
pub fn solve_alg3(
    problem: &SaddleProblem,
    a_hat: &dyn Preconditioner,
    psi_h: &dyn Preconditioner,
    config: &UzawaConfig,
) -> Result<SolveReport> {
    if !a_hat.is_linear() {
        return Err(Error::InvalidArgument("alg3 needs a linear Â".into()));
    }
    require_symmetric(problem, "alg3")?;
    run(problem, a_hat, psi_h, a_hat, config, None)
}

/// Nonsymmetric `A` with positive definite symmetric part.
pub fn solve_nonsymmetric(
    problem: &SaddleProblem,
    a_hat: &dyn Preconditioner,
    s_hat: &dyn Preconditioner,
    config: &UzawaConfig,
) -> Result<SolveReport> {
    run(problem, a_hat, s_hat, a_hat, config, None)
}

/// Dispatches on `config.variant`. For [`Variant::Alg3`] `s_hat` is `Ψ_H`.
pub fn solve(
    problem: &SaddleProblem,
    a_hat: &dyn Preconditioner,
    s_hat: &dyn Preconditioner,
    config: &UzawaConfig,
) -> Result<SolveReport> {
    match config.variant {
        Variant::Alg1 => solve_alg1(problem, a_hat, s_hat, config),
        Variant::Alg2 => solve_alg2(problem, a_hat, s_hat, config),
        Variant::Alg3 => solve_alg3(problem, a_hat, s_hat, config),
        Variant::Nonsymmetric => solve_nonsymmetric(problem, a_hat, s_hat, config),
    }
}

/// Like [`solve`] but calls `observer` after every iteration.
pub fn solve_observed(
    problem: &SaddleProblem,
    a_hat: &dyn Preconditioner,
    s_hat: &dyn Preconditioner,
    config: &UzawaConfig,
    observer: &mut dyn FnMut(&IterationSnapshot<'_>),
) -> Result<SolveReport> {
    match config.variant {
        Variant::Alg1 | Variant::Alg3 if !a_hat.is_linear() => {
            return Err(Error::InvalidArgument(
                "this variant needs a linear Â".into(),
            ))
        }
        Variant::Nonsymmetric => {}
        v => require_symmetric(problem, &v.to_string())?,
    }
    run(problem, a_hat, s_hat, a_hat, config, Some(observer))
}

fn require_symmetric(problem: &SaddleProblem, name: &str) -> Result<()> {
    if problem.symmetric_a() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} needs symmetric A; use the nonsymmetric variant"
        )))
    }
}

fn run(
    problem: &SaddleProblem,
    a_hat: &dyn Preconditioner,
    s_hat: &dyn Preconditioner,
    h_inner: &dyn Preconditioner,
    config: &UzawaConfig,
    mut observer: Option<&mut dyn FnMut(&IterationSnapshot<'_>)>,
) -> Result<SolveReport> {
    config.validate()?;
    check_len("Â dimension", problem.n(), a_hat.dim())?;
    check_len("Ŝ dimension", problem.m(), s_hat.dim())?;
    let start = Instant::now();
    let rule = config.stop_rule;
    let (n, m) = (problem.n(), problem.m());
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; m];
    let mut history = Vec::new();
    let mut trace = Vec::new();

    let mut f_i = problem.residual_f_unchecked(&x, &y);
    let g0 = problem.residual_g_unchecked(&x, &y);
    let (f0n, g0n) = (norm2(&f_i), norm2(&g0));
    let initial_measure = rule.measure(f0n, g0n);
    let initial_stacked = f0n.hypot(g0n);
    let mut current = (f0n, g0n);
    trace.push(current);
    let mut iterations = 0;
    let mut status = Status::MaxIterations;

    loop {
        if rule.satisfied(current.0, current.1, initial_measure) {
            status = Status::Converged;
            break;
        }
        let stacked = current.0.hypot(current.1);
        if !stacked.is_finite() || stacked > config.divergence_factor * initial_stacked {
            status = Status::Diverged;
            break;
        }
        if iterations >= config.max_iters {
            break;
        }

        let r_i = a_hat.apply(&f_i)?;
        let omega = step_omega(&f_i, &r_i, problem.a())?;
        let x_next: Vec<f64> = x.iter().zip(&r_i).map(|(a, b)| a + omega * b).collect();

        let g_i = problem.residual_g_unchecked(&x_next, &y);
        let s_i = s_hat.apply(&g_i)?;
        let theta = config.theta.value(omega);
        let (tauhat, tau) = step_tau(&g_i, &s_i, |v| problem.schur_product(h_inner, v), theta)?;
        let y_next: Vec<f64> = y.iter().zip(&s_i).map(|(a, b)| a + tau * b).collect();

        let record = IterationRecord {
            fnorm: current.0,
            gnorm: norm2(&g_i),
            omega,
            tauhat,
            tau,
            theta,
        };
        if let Some(obs) = observer.as_mut() {
            obs(&IterationSnapshot {
                index: iterations,
                x: &x,
                y: &y,
                f_i: &f_i,
                r_i: &r_i,
                x_next: &x_next,
                g_i: &g_i,
                s_i: &s_i,
                y_next: &y_next,
                record,
            });
        }
        if config.record_history {
            history.push(record);
        }
        x = x_next;
        y = y_next;
        iterations += 1;

        f_i = problem.residual_f_unchecked(&x, &y);
        let g_cur = problem.residual_g_unchecked(&x, &y);
        current = (norm2(&f_i), norm2(&g_cur));
        trace.push(current);
    }

    Ok(SolveReport {
        status,
        iterations,
        fnorm: current.0,
        gnorm: current.1,
        initial_measure,
        wall_seconds: start.elapsed().as_secs_f64(),
        history,
        residual_trace: trace,
        x,
        y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precond::LinearPreconditioner;
    use crate::sparse::CsrMatrix;

    #[test]
    fn omega_scalar_case() {
        let a = CsrMatrix::from_diagonal(&[2.0, 2.0, 2.0]);
        let f = [1.0, -3.0, 0.5];
        assert_eq!(step_omega(&f, &f, &a).unwrap(), 0.5);
        assert_eq!(step_omega(&[0.0; 3], &[0.0; 3], &a).unwrap(), 1.0);
    }

    #[test]
    fn tau_scalar_case_and_zero_convention() {
        let h = |v: &[f64]| Ok(v.iter().map(|x| 2.0 * x).collect());
        let (th, t) = step_tau(&[1.0, 2.0], &[1.0, 2.0], h, 0.5).unwrap();
        assert_eq!((th, t), (0.5, 0.25));
        assert_eq!(step_tau(&[0.0], &[0.0], h, 0.5).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn negative_tauhat_is_an_error() {
        let h = |v: &[f64]| Ok(v.to_vec());
        assert!(matches!(
            step_tau(&[1.0], &[-1.0], h, 1.0),
            Err(Error::Indefinite(_))
        ));
    }

    #[test]
    fn decoupled_exact_case_converges_in_one_step() {
        let p = SaddleProblem::new(
            CsrMatrix::identity(3),
            CsrMatrix::zeros(3, 2),
            CsrMatrix::identity(2),
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0],
            true,
        )
        .unwrap();
        let id3 = LinearPreconditioner::identity(3);
        let id2 = LinearPreconditioner::identity(2);
        let cfg = UzawaConfig::new(Variant::Alg1, 1.0, StopRule::stacked(1e-12), 10);
        let r = solve_alg1(&p, &id3, &id2, &cfg).unwrap();
        assert!(r.converged());
        assert_eq!(r.iterations, 1);
        assert_eq!(r.x, vec![1.0, 2.0, 3.0]);
        assert_eq!(r.y, vec![-4.0, -5.0]);
    }

    #[test]
    fn zero_iterations_and_relative_zero_start() {
        let p = SaddleProblem::new(
            CsrMatrix::identity(2),
            CsrMatrix::zeros(2, 1),
            CsrMatrix::identity(1),
            vec![0.0, 0.0],
            vec![0.0],
            true,
        )
        .unwrap();
        let id2 = LinearPreconditioner::identity(2);
        let id1 = LinearPreconditioner::identity(1);
        for rule in [StopRule::stacked(1e-8), StopRule::max_norm(1e-8).relative()] {
            let cfg = UzawaConfig::new(Variant::Alg1, 1.0, rule, 10);
            let r = solve_alg1(&p, &id2, &id1, &cfg).unwrap();
            assert!(r.converged());
            assert_eq!(r.iterations, 0);
        }
    }

    #[test]
    fn max_iters_zero_is_not_converged() {
        let p = SaddleProblem::new(
            CsrMatrix::identity(2),
            CsrMatrix::zeros(2, 1),
            CsrMatrix::identity(1),
            vec![1.0, 0.0],
            vec![0.0],
            true,
        )
        .unwrap();
        let cfg = UzawaConfig::new(Variant::Alg1, 1.0, StopRule::stacked(1e-8), 0);
        let r = solve_alg1(
            &p,
            &LinearPreconditioner::identity(2),
            &LinearPreconditioner::identity(1),
            &cfg,
        )
        .unwrap();
        assert_eq!(r.status, Status::MaxIterations);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn adaptive_theta_formula() {
        let t = Theta::Adaptive { lambda_hat: 0.5 };
        assert!((t.value(1.0) - (1.0 - 0.5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert_eq!(t.value(4.0), 0.5);
    }

    #[test]
    fn history_csv_header() {
        let rep = SolveReport {
            status: Status::Converged,
            iterations: 1,
            fnorm: 0.0,
            gnorm: 0.0,
            initial_measure: 1.0,
            wall_seconds: 0.0,
            history: vec![IterationRecord {
                fnorm: 1.0,
                gnorm: 0.5,
                omega: 1.0,
                tauhat: 1.0,
                tau: 0.5,
                theta: 0.5,
            }],
            residual_trace: vec![],
            x: vec![],
            y: vec![],
        };
        let mut buf = Vec::new();
        rep.write_history_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("iter,fnorm,gnorm,omega,tauhat,tau,theta\n0,1e0,5e-1,"));
    }
}
