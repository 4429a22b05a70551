//! Stabilized Q1-P0 driven cavity with the pressure mass matrix as Ŝ and a
//! sweep over the damping factor.

use inexact_uzawa::precond::{exact, schur_diag, SchurDiagKind};
use inexact_uzawa::problems::{gen_stokes_q1p0, StokesParams};
use inexact_uzawa::{solve, StopRule, UzawaConfig, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 32;
    let problem = gen_stokes_q1p0(&StokesParams {
        n,
        nu: 1.0,
        beta: 0.25,
    })?;
    let a_hat = exact(problem.a())?;
    let s_hat = schur_diag(
        problem.d(),
        SchurDiagKind::PressureMass { h: 1.0 / n as f64 },
    )?;
    let rule = StopRule::max_norm(1e-6).relative();
    for theta in [0.5, 0.3, 0.1, 0.05] {
        let rep = solve(
            &problem,
            &a_hat,
            &s_hat,
            &UzawaConfig::new(Variant::Alg1, theta, rule, 10_000),
        )?;
        println!(
            "theta={theta:<5} updates={:<4} |f|={:.2e} |g|={:.2e}",
            rep.iterations, rep.fnorm, rep.gnorm
        );
    }
    Ok(())
}
