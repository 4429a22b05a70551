//! Probes each Â for linearity, symmetry and positivity, then compares the
//! Uzawa iteration counts they produce on the same Stokes problem.

use inexact_uzawa::bench::{run, PrecondSpec, RunSpec};
use inexact_uzawa::precond::{
    exact, ic0_preconditioner, ict_preconditioner, jacobi, probe, Preconditioner, ShiftPolicy,
};
use inexact_uzawa::problems::ProblemSpec;
use inexact_uzawa::StopRule;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec: ProblemSpec = "stokes:n=24,nu=1,beta=0.25".parse()?;
    let problem = spec.build()?;
    let a = problem.a();
    let candidates: Vec<(PrecondSpec, Box<dyn Preconditioner>)> = vec![
        (PrecondSpec::Jacobi, Box::new(jacobi(a)?)),
        (
            PrecondSpec::Ic0,
            Box::new(ic0_preconditioner(a, ShiftPolicy::Retry)?),
        ),
        (
            PrecondSpec::Ict(1e-3),
            Box::new(ict_preconditioner(a, 1e-3, ShiftPolicy::Retry)?),
        ),
        (PrecondSpec::Exact, Box::new(exact(a)?)),
    ];
    for (sel, p) in &candidates {
        let pr = probe(p.as_ref(), 8, 11)?;
        let mut rs = RunSpec::new(
            &sel.to_string(),
            spec.clone(),
            sel.clone(),
            PrecondSpec::PressureMass,
            0.3,
        );
        rs.stop = StopRule::max_norm(1e-6).relative();
        rs.max_iters = 50_000;
        let rec = run(&rs)?;
        println!(
            "{:<10} linearity {:.1e} symmetry {:.1e} min rayleigh {:.2e} -> {} ({} updates)",
            sel.to_string(),
            pr.max_linearity_error,
            pr.max_symmetry_error,
            pr.min_rayleigh,
            rec.status,
            rec.iterations
        );
    }
    Ok(())
}
