//! Fixed damping factors against the adaptive choice driven by an estimate
//! of the lower spectral bound of Â⁻¹A.

use inexact_uzawa::precond::{ic0_preconditioner, schur_diag, SchurDiagKind, ShiftPolicy};
use inexact_uzawa::problems::{gen_elasticity, ElasticityParams};
use inexact_uzawa::theory::lambda_hat_estimate;
use inexact_uzawa::uzawa::Theta;
use inexact_uzawa::{solve, StopRule, UzawaConfig, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = gen_elasticity(&ElasticityParams {
        n: 30,
        ..Default::default()
    })?;
    let a_hat = ic0_preconditioner(problem.a(), ShiftPolicy::Retry)?;
    let s_hat = schur_diag(problem.d(), SchurDiagKind::IdentityPlusD)?;
    let rule = StopRule::stacked(1e-4);
    for theta in [1.0, 0.5, 0.1] {
        let rep = solve(
            &problem,
            &a_hat,
            &s_hat,
            &UzawaConfig::new(Variant::Alg1, theta, rule, 20_000),
        )?;
        println!("theta={theta:<4} updates={}", rep.iterations);
    }
    let est = lambda_hat_estimate(&a_hat, problem.a(), 100, 1)?;
    let cfg = UzawaConfig {
        theta: Theta::Adaptive {
            lambda_hat: est.lambda_hat,
        },
        ..UzawaConfig::new(Variant::Alg1, 1.0, rule, 20_000)
    };
    let rep = solve(&problem, &a_hat, &s_hat, &cfg)?;
    let last = rep.history.last().map_or(f64::NAN, |h| h.theta);
    println!(
        "adaptive (lambda_hat={:.3e}) updates={} final theta={last:.3}",
        est.lambda_hat, rep.iterations
    );
    Ok(())
}
