//! Mixed elasticity with a stiff inclusion, solved with three choices of Â.

use inexact_uzawa::precond::{
    exact, ic0_preconditioner, jacobi, schur_diag, Preconditioner, SchurDiagKind, ShiftPolicy,
};
use inexact_uzawa::problems::{gen_elasticity, ElasticityParams};
use inexact_uzawa::{solve, StopRule, UzawaConfig, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = gen_elasticity(&ElasticityParams {
        n: 32,
        ..Default::default()
    })?;
    println!("n={} m={}", problem.n(), problem.m());
    let s_hat = schur_diag(problem.d(), SchurDiagKind::IdentityPlusD)?;
    let a_hats: Vec<(&str, Box<dyn Preconditioner>)> = vec![
        ("jacobi", Box::new(jacobi(problem.a())?)),
        (
            "ic0",
            Box::new(ic0_preconditioner(problem.a(), ShiftPolicy::Retry)?),
        ),
        ("exact", Box::new(exact(problem.a())?)),
    ];
    for (name, a_hat) in &a_hats {
        let cfg = UzawaConfig::new(Variant::Alg1, 1.0, StopRule::stacked(1e-4), 20_000);
        let rep = solve(&problem, a_hat.as_ref(), &s_hat, &cfg)?;
        println!(
            "{name:>6}: {:?} after {} updates, |f|={:.2e} |g|={:.2e}",
            rep.status, rep.iterations, rep.fnorm, rep.gnorm
        );
    }
    Ok(())
}
