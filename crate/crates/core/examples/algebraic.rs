//! Gaussian Toeplitz example with a known solution of all ones.

use inexact_uzawa::precond::{exact, LinearPreconditioner};
use inexact_uzawa::problems::{gen_algebraic, AlgebraicParams};
use inexact_uzawa::{solve, StopRule, UzawaConfig, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = gen_algebraic(&AlgebraicParams::default())?;
    let a_hat = exact(problem.a())?;
    let s_hat = LinearPreconditioner::scaled_identity(problem.m(), 2.0);
    let cfg = UzawaConfig::new(Variant::Alg1, 0.9, StopRule::stacked(1e-6).relative(), 1000);
    let rep = solve(&problem, &a_hat, &s_hat, &cfg)?;
    let (x_star, y_star) = problem
        .exact_solution()
        .expect("generator attaches the solution");
    let err = rep
        .x
        .iter()
        .zip(x_star)
        .chain(rep.y.iter().zip(y_star))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("updates={} max error={err:.2e}", rep.iterations);
    Ok(())
}
