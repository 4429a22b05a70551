//! Elasticity with convection: exact LU of A against IC(0) of its symmetric
//! part as the convection strength grows.

use inexact_uzawa::precond::{
    exact_lu, ic0_preconditioner, schur_diag, SchurDiagKind, ShiftPolicy,
};
use inexact_uzawa::problems::{gen_convection, ConvectionParams, ElasticityParams};
use inexact_uzawa::theory::nonsym_diagnostics;
use inexact_uzawa::{solve, StopRule, UzawaConfig, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for b in [2.0, 10.0, 40.0] {
        let problem = gen_convection(&ConvectionParams {
            elasticity: ElasticityParams {
                n: 24,
                ..Default::default()
            },
            b,
        })?;
        let s_hat = schur_diag(problem.d(), SchurDiagKind::IdentityPlusD)?;
        let rule = StopRule::stacked(1e-6);
        let lu = exact_lu(problem.a())?;
        let r1 = solve(
            &problem,
            &lu,
            &s_hat,
            &UzawaConfig::new(Variant::Nonsymmetric, 1.0, rule, 20_000),
        )?;
        let ic = ic0_preconditioner(&problem.a().symmetric_part()?, ShiftPolicy::Retry)?;
        let r2 = solve(
            &problem,
            &ic,
            &s_hat,
            &UzawaConfig::new(Variant::Nonsymmetric, 0.05, rule, 20_000),
        )?;
        println!(
            "b={b:<4} exact: {} updates, ic0 (theta=0.05): {} updates",
            r1.iterations, r2.iterations
        );
    }
    let small = gen_convection(&ConvectionParams {
        elasticity: ElasticityParams {
            n: 6,
            ..Default::default()
        },
        b: 4.0,
    })?;
    let d = nonsym_diagnostics(&small)?;
    println!(
        "n=6, b=4: |J-I|={:.3} |J^-1-I|={:.3} |S-S0|={:.3}",
        d.j_minus_i, d.j_inv_minus_i, d.s_minus_s0
    );
    Ok(())
}
