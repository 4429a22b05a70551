//! Inner PCG solves in place of Â⁻¹ (Algorithm 2) and of H⁻¹ (Algorithm 3).

use std::sync::Arc;

use inexact_uzawa::precond::{
    exact, jacobi, pcg_nonlinear, LinearOperator, LinearPreconditioner, Preconditioner,
};
use inexact_uzawa::problems::gen_random_qp;
use inexact_uzawa::uzawa::{solve_alg2, solve_alg3};
use inexact_uzawa::{SchurOperator, StopRule, UzawaConfig, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = gen_random_qp(60, 20, 0.1, 3)?;
    let rule = StopRule::stacked(1e-8).relative();
    let s_hat = LinearPreconditioner::identity(problem.m());
    let a_op: Arc<dyn LinearOperator> = Arc::new(problem.a().clone());
    for tol in [1e-2, 1e-6, 1e-12] {
        let psi_a = pcg_nonlinear(a_op.clone(), Arc::new(jacobi(problem.a())?), tol, 600)?;
        let rep = solve_alg2(
            &problem,
            &psi_a,
            &s_hat,
            &UzawaConfig::new(Variant::Alg2, 1.0, rule, 5000),
        )?;
        println!("alg2 inner tol {tol:e}: {} updates", rep.iterations);
    }
    let a_hat: Arc<dyn Preconditioner> = Arc::new(exact(problem.a())?);
    let h_op: Arc<dyn LinearOperator> = Arc::new(SchurOperator::new(&problem, a_hat.clone())?);
    for tol in [1e-2, 1e-6, 1e-12] {
        let psi_h = pcg_nonlinear(
            h_op.clone(),
            Arc::new(LinearPreconditioner::identity(problem.m())),
            tol,
            200,
        )?;
        let rep = solve_alg3(
            &problem,
            a_hat.as_ref(),
            &psi_h,
            &UzawaConfig::new(Variant::Alg3, 1.0, rule, 5000),
        )?;
        println!("alg3 inner tol {tol:e}: {} updates", rep.iterations);
    }
    Ok(())
}
