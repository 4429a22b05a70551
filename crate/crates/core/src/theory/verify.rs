//! Seeded random corpus and the iteration-wise checks run on it.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{DenseAnalysis, TheoryReport};
use crate::dense::{lower_inverse, spd_inverse, sym_inv_sqrt, DenseMatrix};
use crate::error::{Error, Result};
use crate::precond::{pcg_nonlinear, LinearOperator, LinearPreconditioner, Preconditioner};
use crate::problems::gen_random_qp;
use crate::saddle::{SaddleProblem, SchurOperator};
use crate::sparse::norm2;
use crate::sparse::vector::sub;
use crate::uzawa::{
    solve_alg1, solve_alg2, solve_alg3, solve_observed, StopRule, UzawaConfig, Variant,
};

/// Slack on eigenvalue-interval containments and parameter bounds.
pub const SPECTRAL_SLACK: f64 = 1e-10;
/// Slack on the iteration-wise contraction inequality, relative to the
/// current E-norm.
pub const CONTRACTION_SLACK: f64 = 1e-9;

fn le(a: f64, b: f64) -> bool {
    a <= b + SPECTRAL_SLACK * b.abs().max(1.0)
}

#[derive(Debug, Clone)]
pub struct CorpusInstance {
    pub index: usize,
    pub seed: u64,
    pub problem: SaddleProblem,
    pub a_hat: LinearPreconditioner,
    pub s_hat: LinearPreconditioner,
    pub theta: f64,
    pub label: String,
}

fn dense_random_spd(n: usize, rng: &mut ChaCha8Rng) -> Result<DenseMatrix> {
    let g =
        DenseMatrix::from_row_major(n, n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
    Ok(g.matmul(&g.transpose())?
        .scale(1.0 / n as f64)
        .symmetrized())
}

/// `count` random QPs with `n ≤ 30`, `m ≤ 12`, SPD `D = εI` and assorted
/// preconditioners and damping factors.
pub fn corpus(seed: u64, count: usize) -> Result<Vec<CorpusInstance>> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..count).map(|_| master.gen()).collect();
    seeds
        .into_iter()
        .enumerate()
        .map(|(index, s)| corpus_instance(index, s))
        .collect()
}

fn corpus_instance(index: usize, seed: u64) -> Result<CorpusInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(8..=30);
    let m = rng.gen_range(2..=12.min(n - 2));
    let eps = 10f64.powf(rng.gen_range(-2.0..1.0));
    let problem = gen_random_qp(n, m, eps, seed)?;
    let a = DenseMatrix::from_sparse(problem.a());
    let (a_inv, a_label) = match index % 3 {
        0 => {
            let c = rng.gen_range(0.5..2.0);
            let d: Vec<f64> = a.diagonal().iter().map(|v| 1.0 / (c * v)).collect();
            (DenseMatrix::from_diagonal(&d), format!("jacobi*{c:.3}"))
        }
        1 => {
            let s = rng.gen_range(0.1..1.0);
            let c = rng.gen_range(0.5..2.0);
            let e = dense_random_spd(n, &mut rng)?;
            let ah = a.add_scaled(c, &e, c * s)?.symmetrized();
            (spd_inverse(&ah)?, format!("perturbed(s={s:.3})*{c:.3}"))
        }
        _ => {
            let mean = a.diagonal().iter().sum::<f64>() / n as f64;
            let c = rng.gen_range(0.5..2.0) * mean;
            (
                DenseMatrix::identity(n).scale(1.0 / c),
                format!("identity*{c:.3}"),
            )
        }
    };
    let a_hat = LinearPreconditioner::from_dense_inverse(a_inv.symmetrized())?;
    let b = DenseMatrix::from_sparse(problem.b());
    let h = b
        .transpose()
        .matmul(&a_hat_dense(&a_hat)?)?
        .matmul(&b)?
        .add_scaled(1.0, &DenseMatrix::from_sparse(problem.d()), 1.0)?
        .symmetrized();
    let (s_inv, s_label) = match (index / 3) % 3 {
        0 => {
            let mean = h.diagonal().iter().sum::<f64>() / m as f64;
            let c = rng.gen_range(0.3..3.0) * mean;
            (
                DenseMatrix::identity(m).scale(1.0 / c),
                format!("identity*{c:.3}"),
            )
        }
        1 => {
            let d: Vec<f64> = h.diagonal().iter().map(|v| 1.0 / v).collect();
            (DenseMatrix::from_diagonal(&d), "jacobi(H)".to_string())
        }
        _ => {
            let s = rng.gen_range(0.05..0.5);
            let e = dense_random_spd(m, &mut rng)?;
            let mean = h.diagonal().iter().sum::<f64>() / m as f64;
            let sh = h.add_scaled(1.0, &e, s * mean)?.symmetrized();
            (spd_inverse(&sh)?, format!("perturbed-H(s={s:.3})"))
        }
    };
    let s_hat = LinearPreconditioner::from_dense_inverse(s_inv.symmetrized())?;
    let theta = rng.gen_range(0.2..1.0);
    Ok(CorpusInstance {
        index,
        seed,
        label: format!(
            "n={n} m={m} eps={eps:.3e} A-hat={a_label} S-hat={s_label} theta={theta:.3}"
        ),
        problem,
        a_hat,
        s_hat,
        theta,
    })
}

fn a_hat_dense(p: &LinearPreconditioner) -> Result<DenseMatrix> {
    super::dense_operator(p)
}

/// Counts of one kind of check.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CheckTally {
    pub checked: usize,
    pub violations: usize,
    /// Iterations where the check's hypothesis was not met.
    pub skipped: usize,
    /// Largest amount by which the checked inequality was exceeded
    /// (negative when it always held).
    pub worst_excess: f64,
}

impl CheckTally {
    fn new() -> Self {
        Self {
            worst_excess: f64::NEG_INFINITY,
            ..Default::default()
        }
    }

    fn record(&mut self, ok: bool, excess: f64) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
        }
        self.worst_excess = self.worst_excess.max(excess);
    }

    fn merge(&mut self, o: &CheckTally) {
        self.checked += o.checked;
        self.violations += o.violations;
        self.skipped += o.skipped;
        self.worst_excess = self.worst_excess.max(o.worst_excess);
    }
}

#[derive(Debug, Clone)]
pub struct InstanceVerdict {
    pub index: usize,
    pub seed: u64,
    pub label: String,
    pub report: TheoryReport,
    pub iterations: usize,
    /// Lemma interval for the constructed `G_i`.
    pub lemma_interval: CheckTally,
    /// Lemma interval for the literal `G_i⁻¹ = τ̂_iŜ⁻¹` (informational).
    pub lemma_interval_literal: CheckTally,
    pub beta_bound: CheckTally,
    pub alpha_bound: CheckTally,
    pub omega_bounds: CheckTally,
    pub theorem: CheckTally,
    pub contraction: CheckTally,
    pub rates: CheckTally,
    pub messages: Vec<String>,
}

impl InstanceVerdict {
    /// Violations of the gated checks (everything except the literal
    /// Lemma realization).
    pub fn violations(&self) -> usize {
        self.lemma_interval.violations
            + self.beta_bound.violations
            + self.alpha_bound.violations
            + self.omega_bounds.violations
            + self.theorem.violations
            + self.contraction.violations
            + self.rates.violations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub count: usize,
    /// Replaces each instance's damping factor.
    pub theta_override: Option<f64>,
    pub max_iters: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            count: 50,
            theta_override: None,
            max_iters: 40,
        }
    }
}

struct Step {
    index: usize,
    f_i: Vec<f64>,
    g_i: Vec<f64>,
    y: Vec<f64>,
    x_next: Vec<f64>,
    y_next: Vec<f64>,
    omega: f64,
    tauhat: f64,
    theta: f64,
}

/// Runs Algorithm 1 on one instance and checks every iteration against the
/// Lemmas, the convergence theorem, the contraction estimate and the rates
/// theorem.
pub fn verify_instance(inst: &CorpusInstance, opts: &VerifyOptions) -> Result<InstanceVerdict> {
    let theta = opts.theta_override.unwrap_or(inst.theta);
    let p = &inst.problem;
    let an = DenseAnalysis::new(p, &inst.a_hat, &inst.s_hat)?;
    let rep = an.report().clone();
    let config = UzawaConfig {
        record_history: false,
        ..UzawaConfig::new(
            Variant::Alg1,
            theta,
            StopRule::stacked(1e-11).relative(),
            opts.max_iters,
        )
    };
    let mut steps = Vec::new();
    let report = solve_observed(p, &inst.a_hat, &inst.s_hat, &config, &mut |s| {
        steps.push(Step {
            index: s.index,
            f_i: s.f_i.to_vec(),
            g_i: s.g_i.to_vec(),
            y: s.y.to_vec(),
            x_next: s.x_next.to_vec(),
            y_next: s.y_next.to_vec(),
            omega: s.record.omega,
            tauhat: s.record.tauhat,
            theta: s.record.theta,
        });
    })?;
    let (_, y_star) = p
        .exact_solution()
        .ok_or_else(|| Error::InvalidArgument("corpus instance lacks an exact solution".into()))?;

    let mut v = InstanceVerdict {
        index: inst.index,
        seed: inst.seed,
        label: inst.label.clone(),
        report: rep.clone(),
        iterations: report.iterations,
        lemma_interval: CheckTally::new(),
        lemma_interval_literal: CheckTally::new(),
        beta_bound: CheckTally::new(),
        alpha_bound: CheckTally::new(),
        omega_bounds: CheckTally::new(),
        theorem: CheckTally::new(),
        contraction: CheckTally::new(),
        rates: CheckTally::new(),
        messages: Vec::new(),
    };
    let tag = |i: usize| format!("instance {} (seed {}) iteration {i}", inst.index, inst.seed);

    for st in &steps {
        let i = st.index;
        if norm2(&st.f_i) > 0.0 {
            let alpha_i = an.alpha_i(&st.f_i, st.omega)?;
            let ok = le(alpha_i, rep.alpha);
            v.alpha_bound.record(ok, alpha_i - rep.alpha);
            if !ok {
                v.messages.push(format!(
                    "{}: alpha_i {alpha_i:e} > alpha {:e}",
                    tag(i),
                    rep.alpha
                ));
            }
            let wt = rep.lambda * st.omega;
            let (lo, hi) = (1.0 / rep.lambda_tilde0(), 1.0 - alpha_i * alpha_i);
            let ok = le(lo, wt) && le(wt, hi);
            v.omega_bounds.record(ok, (lo - wt).max(wt - hi));
            if !ok {
                v.messages.push(format!(
                    "{}: lambda*omega {wt:e} outside [{lo:e}, {hi:e}]",
                    tag(i)
                ));
            }
        }
        if norm2(&st.g_i) == 0.0 {
            continue;
        }
        let (g_inv, beta_i) = an.constructed_g_inverse(&st.g_i, st.tauhat)?;
        let ok = le(beta_i, rep.beta);
        v.beta_bound.record(ok, beta_i - rep.beta);
        if !ok {
            v.messages.push(format!(
                "{}: beta_i {beta_i:e} > beta {:e}",
                tag(i),
                rep.beta
            ));
        }
        let (ilo, ihi) = rep.lemma_interval(beta_i);
        let (slo, shi) = an.lemma_spectrum(&g_inv)?;
        let ok = le(ilo, slo) && le(shi, ihi);
        v.lemma_interval.record(ok, (ilo - slo).max(shi - ihi));
        if !ok {
            v.messages.push(format!(
                "{}: spectrum [{slo:e}, {shi:e}] outside lemma interval [{ilo:e}, {ihi:e}]",
                tag(i)
            ));
        }
        let (llo, lhi) = an.lemma_spectrum(&an.concrete_g_inverse(st.tauhat))?;
        v.lemma_interval_literal
            .record(le(ilo, llo) && le(lhi, ihi), (ilo - llo).max(lhi - ihi));

        let c1 = an.c1(&g_inv)?;
        let q_inv = g_inv.scale(st.theta);
        let fa = an.build_f(&q_inv)?;
        if st.theta * (1.0 + rep.beta) * rep.delta2 < rep.theorem_bound(c1) {
            let ok = fa.rho < 1.0;
            v.theorem.record(ok, fa.rho - 1.0);
            if !ok {
                v.messages.push(format!(
                    "{}: theorem hypothesis met but rho = {:e}",
                    tag(i),
                    fa.rho
                ));
            }
        } else {
            v.theorem.skipped += 1;
        }

        if fa.rho < 1.0 && rep.alpha > 1e-12 {
            let e_y = sub(y_star, &st.y);
            let e_y_next = sub(y_star, &st.y_next);
            let f_next = p.residual_f(&st.x_next, &st.y_next)?;
            let (e1, e2) = an.error_components(&st.f_i, &e_y)?;
            let (e1n, e2n) = an.error_components(&f_next, &e_y_next)?;
            let sq = |u: &[f64]| u.iter().map(|x| x * x).sum::<f64>();
            let lhs = sq(&e1n) + sq(&e2n);
            let rhs = fa.rho * fa.rho * (an.weighted_e1_sq(&st.f_i, st.omega)? + sq(&e2));
            let scale = sq(&e1) + sq(&e2);
            let ok = lhs <= rhs + CONTRACTION_SLACK * scale;
            v.contraction
                .record(ok, (lhs - rhs) / scale.max(f64::MIN_POSITIVE));
            if !ok {
                v.messages.push(format!(
                    "{}: contraction {lhs:e} > rho^2 * {:e}",
                    tag(i),
                    rhs / (fa.rho * fa.rho)
                ));
            }
        } else {
            v.contraction.skipped += 1;
        }

        for frac in [0.25, 0.75] {
            let mu = rep.alpha + frac * (1.0 - rep.alpha);
            let gamma = rep.gamma(mu, c1);
            let theta_star = gamma / (rep.delta2 * (1.0 + rep.beta));
            let weight = if rep.alpha + rep.beta > 0.0 {
                rep.alpha / (rep.alpha + rep.beta)
            } else {
                0.0
            };
            let mu_tilde = (1.0
                - rep.delta1 * (1.0 - rep.beta) * theta_star / (1.0 + c1 * weight * gamma))
                .max(rep.beta);
            let fr = an.build_f(&g_inv.scale(theta_star))?;
            let ok = le(-mu_tilde, fr.min) && le(fr.max, mu);
            v.rates.record(ok, (-mu_tilde - fr.min).max(fr.max - mu));
            if !ok {
                v.messages.push(format!(
                    "{}: rates theorem spectrum [{:e}, {:e}] outside [-{mu_tilde:e}, {mu:e}]",
                    tag(i),
                    fr.min,
                    fr.max
                ));
            }
        }
    }
    Ok(v)
}

#[derive(Debug, Clone)]
pub struct TheorySummary {
    pub options: VerifyOptions,
    pub instances: Vec<InstanceVerdict>,
}

impl TheorySummary {
    pub fn total(&self, pick: impl Fn(&InstanceVerdict) -> &CheckTally) -> CheckTally {
        let mut t = CheckTally::new();
        for v in &self.instances {
            t.merge(pick(v));
        }
        t
    }

    pub fn violations(&self) -> usize {
        self.instances.iter().map(InstanceVerdict::violations).sum()
    }

    /// One `name checked violations skipped worst_excess` line per check.
    pub fn render(&self) -> String {
        type Pick = fn(&InstanceVerdict) -> &CheckTally;
        let rows: [(&str, Pick); 8] = [
            ("lemma-interval", |v| &v.lemma_interval),
            ("lemma-interval-literal(info)", |v| {
                &v.lemma_interval_literal
            }),
            ("beta_i<=beta", |v| &v.beta_bound),
            ("alpha_i<=alpha", |v| &v.alpha_bound),
            ("omega-bounds", |v| &v.omega_bounds),
            ("theorem-rho<1", |v| &v.theorem),
            ("contraction", |v| &v.contraction),
            ("rates", |v| &v.rates),
        ];
        let mut out = format!(
            "corpus seed={} count={} theta_override={}\n",
            self.options.seed,
            self.options.count,
            self.options
                .theta_override
                .map_or_else(|| "none".to_string(), |t| t.to_string())
        );
        out.push_str("check,checked,violations,hypothesis_not_met,worst_excess\n");
        for (name, pick) in rows {
            let t = self.total(pick);
            out.push_str(&format!(
                "{name},{},{},{},{:e}\n",
                t.checked, t.violations, t.skipped, t.worst_excess
            ));
        }
        for v in &self.instances {
            for m in &v.messages {
                out.push_str(m);
                out.push('\n');
            }
        }
        out
    }
}

/// Builds the corpus and verifies every instance in parallel.
pub fn verify_theory(opts: &VerifyOptions) -> Result<TheorySummary> {
    let insts = corpus(opts.seed, opts.count)?;
    let instances = insts
        .par_iter()
        .map(|i| verify_instance(i, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(TheorySummary {
        options: opts.clone(),
        instances,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryOutcome {
    pub kappa1_target: f64,
    pub kappa1: f64,
    pub alpha: f64,
    pub sqrt_alpha: f64,
    /// Geometric-mean contraction of the stacked E-norm.
    pub measured_rate: f64,
    pub f_norm: f64,
    pub relative_error: f64,
}

/// `D = 0` instance with `cond(Â⁻¹A) = κ₁` and `Q⁻¹ = R⁻ᵗMR⁻¹`, where `M` is
/// diagonal with entries in `[(1−ε)/κ₁, (1+ε)/κ₁]`. Iterates the error map
/// `E ↦ F·(E⁽¹⁾, −E⁽²⁾)` and measures its asymptotic contraction.
pub fn corollary_rate(kappa1: f64, eps: f64, seed: u64) -> Result<CorollaryOutcome> {
    if !(kappa1 >= 1.0) || !(eps >= 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "need kappa1 >= 1 and 0 <= eps < 1, got {kappa1}, {eps}"
        )));
    }
    let (n, m) = (24, 8);
    let problem = gen_random_qp(n, m, 0.0, seed)?;
    let a = DenseMatrix::from_sparse(problem.a());
    let a_inv_sqrt = sym_inv_sqrt(&a)?;
    let spread: Vec<f64> = (0..n)
        .map(|k| 1.0 + (kappa1 - 1.0) * k as f64 / (n - 1) as f64)
        .collect();
    let a_hat_inv = a_inv_sqrt
        .matmul(&DenseMatrix::from_diagonal(&spread))?
        .matmul(&a_inv_sqrt)?
        .symmetrized();
    let a_hat = LinearPreconditioner::from_dense_inverse(a_hat_inv)?;
    let an = DenseAnalysis::new(&problem, &a_hat, &LinearPreconditioner::identity(m))?;
    let rep = an.report().clone();
    let target = 1.0 / rep.kappa1;
    let cluster: Vec<f64> = (0..m)
        .map(|k| target * (1.0 - eps + 2.0 * eps * k as f64 / (m - 1) as f64))
        .collect();
    let r_inv = lower_inverse(an.schur_factor())?;
    let q_inv = r_inv
        .transpose()
        .matmul(&DenseMatrix::from_diagonal(&cluster))?
        .matmul(&r_inv)?
        .symmetrized();
    let fa = an.build_f(&q_inv)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0ff_ee);
    let mut z: Vec<f64> = (0..2 * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let (burn, steps) = (100usize, 500usize);
    let mut log_growth = 0.0;
    for k in 0..burn + steps {
        z[m..].iter_mut().for_each(|v| *v = -*v);
        z = fa.f.matvec(&z)?;
        let nz = norm2(&z);
        if k >= burn {
            log_growth += nz.ln();
        }
        z.iter_mut().for_each(|v| *v /= nz);
    }
    let measured = (log_growth / steps as f64).exp();
    let sqrt_alpha = rep.alpha.sqrt();
    Ok(CorollaryOutcome {
        kappa1_target: kappa1,
        kappa1: rep.kappa1,
        alpha: rep.alpha,
        sqrt_alpha,
        measured_rate: measured,
        f_norm: fa.rho,
        relative_error: (measured - sqrt_alpha).abs() / sqrt_alpha,
    })
}

/// Iteration counts of the nonlinear variants next to their linear
/// counterparts on one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceOutcome {
    pub index: usize,
    pub alg1_exact_a: usize,
    pub alg2: usize,
    pub alg1_exact_h: usize,
    pub alg3: usize,
}

impl EquivalenceOutcome {
    pub fn max_gap(&self) -> usize {
        self.alg1_exact_a
            .abs_diff(self.alg2)
            .max(self.alg1_exact_h.abs_diff(self.alg3))
    }
}

/// Algorithm 2 with `Ψ_A` = PCG to `inner_tol` against Algorithm 1 with the
/// exact `A⁻¹` (same `Ŝ`), and Algorithm 3 with `Ψ_H` = PCG to `inner_tol`
/// against Algorithm 1 with `Ŝ⁻¹ = H⁻¹` (same `Â`).
pub fn equivalence_check(inst: &CorpusInstance, inner_tol: f64) -> Result<EquivalenceOutcome> {
    let p = &inst.problem;
    let (n, m) = (p.n(), p.m());
    let rule = StopRule::stacked(1e-8).relative();
    let cfg = UzawaConfig::new(Variant::Alg1, inst.theta, rule, 5000);
    let a_dense = DenseMatrix::from_sparse(p.a());
    let a_exact = LinearPreconditioner::from_dense_inverse(spd_inverse(&a_dense)?.symmetrized())?;
    let r1 = solve_alg1(p, &a_exact, &inst.s_hat, &cfg)?;
    let a_op: Arc<dyn LinearOperator> = Arc::new(p.a().clone());
    let inner: Arc<dyn Preconditioner> = Arc::new(crate::precond::jacobi(p.a())?);
    let psi_a = pcg_nonlinear(a_op, inner, inner_tol, 10 * n)?;
    let r2 = solve_alg2(
        p,
        &psi_a,
        &inst.s_hat,
        &UzawaConfig {
            variant: Variant::Alg2,
            ..cfg.clone()
        },
    )?;

    let an = DenseAnalysis::new(p, &inst.a_hat, &inst.s_hat)?;
    let h_inv = spd_inverse(an.approximate_schur())?.symmetrized();
    let s_exact = LinearPreconditioner::from_dense_inverse(h_inv)?;
    let r3 = solve_alg1(p, &inst.a_hat, &s_exact, &cfg)?;
    let a_hat: Arc<dyn Preconditioner> = Arc::new(inst.a_hat.clone());
    let h_op: Arc<dyn LinearOperator> = Arc::new(SchurOperator::new(p, a_hat)?);
    let ident: Arc<dyn Preconditioner> = Arc::new(LinearPreconditioner::identity(m));
    let psi_h = pcg_nonlinear(h_op, ident, inner_tol, 10 * m)?;
    let r4 = solve_alg3(
        p,
        &inst.a_hat,
        &psi_h,
        &UzawaConfig {
            variant: Variant::Alg3,
            ..cfg
        },
    )?;
    for r in [&r1, &r2, &r3, &r4] {
        if !r.converged() {
            return Err(Error::NoConvergence(r.iterations));
        }
    }
    Ok(EquivalenceOutcome {
        index: inst.index,
        alg1_exact_a: r1.iterations,
        alg2: r2.iterations,
        alg1_exact_h: r3.iterations,
        alg3: r4.iterations,
    })
}
