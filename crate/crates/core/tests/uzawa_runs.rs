use inexact_uzawa::bench::{run, PrecondSpec, RunSpec};
use inexact_uzawa::dense::{spd_inverse, DenseMatrix};
use inexact_uzawa::precond::{exact, jacobi, LinearPreconditioner};
use inexact_uzawa::problems::gen_random_qp;
use inexact_uzawa::uzawa::Status;
use inexact_uzawa::{solve, Error, SaddleProblem, StopRule, UzawaConfig, Variant};
use proptest::prelude::*;

fn exact_schur_inverse(p: &SaddleProblem) -> LinearPreconditioner {
    let a_inv = spd_inverse(&DenseMatrix::from_sparse(p.a())).unwrap();
    let b = DenseMatrix::from_sparse(p.b());
    let h = b
        .transpose()
        .matmul(&a_inv)
        .unwrap()
        .matmul(&b)
        .unwrap()
        .add_scaled(1.0, &DenseMatrix::from_sparse(p.d()), 1.0)
        .unwrap();
    LinearPreconditioner::from_dense_inverse(spd_inverse(&h.symmetrized()).unwrap()).unwrap()
}

#[test]
fn exact_blocks_converge_in_one_update() {
    let p = gen_random_qp(14, 5, 0.5, 8).unwrap();
    let cfg = UzawaConfig::new(Variant::Alg1, 1.0, StopRule::stacked(1e-9).relative(), 10);
    let rep = solve(&p, &exact(p.a()).unwrap(), &exact_schur_inverse(&p), &cfg).unwrap();
    assert_eq!(rep.status, Status::Converged);
    assert!(rep.iterations <= 2, "{}", rep.iterations);
}

#[test]
fn zero_right_hand_side_needs_no_update() {
    let p = gen_random_qp(8, 3, 0.5, 1).unwrap();
    let z = SaddleProblem::new(
        p.a().clone(),
        p.b().clone(),
        p.d().clone(),
        vec![0.0; 8],
        vec![0.0; 3],
        true,
    )
    .unwrap();
    let cfg = UzawaConfig::new(Variant::Alg1, 1.0, StopRule::stacked(1e-6), 10);
    let rep = solve(
        &z,
        &jacobi(z.a()).unwrap(),
        &LinearPreconditioner::identity(3),
        &cfg,
    )
    .unwrap();
    assert_eq!(rep.iterations, 0);
    assert!(rep.converged());
}

#[test]
fn alg1_rejects_nonsymmetric_a() {
    let spec: inexact_uzawa::problems::ProblemSpec = "convection:n=5,b=2".parse().unwrap();
    let p = spec.build().unwrap();
    let cfg = UzawaConfig::new(Variant::Alg1, 1.0, StopRule::stacked(1e-6), 10);
    let a_hat = jacobi(&p.a().symmetric_part().unwrap()).unwrap();
    let r = solve(&p, &a_hat, &LinearPreconditioner::identity(p.m()), &cfg);
    assert!(matches!(r, Err(Error::InvalidArgument(_))));
}

#[test]
fn stokes_exact_cell() {
    let mut spec = RunSpec::new(
        "stokes",
        "stokes:n=32,nu=1,beta=0.25".parse().unwrap(),
        PrecondSpec::Exact,
        PrecondSpec::PressureMass,
        0.5,
    );
    spec.stop = StopRule::max_norm(1e-6).relative();
    let rec = run(&spec).unwrap();
    assert!(rec.converged());
    assert_eq!(rec.iterations + 1, 37);
}

#[test]
fn algebraic_exact_cell() {
    let mut spec = RunSpec::new(
        "algebraic",
        "algebraic:n=800,m=600,sigma=1.5".parse().unwrap(),
        PrecondSpec::Exact,
        PrecondSpec::ScaledIdentity(2.0),
        0.9,
    );
    spec.stop = StopRule::stacked(1e-6).relative();
    assert_eq!(run(&spec).unwrap().iterations + 1, 7);
}

#[test]
fn history_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.csv");
    let mut spec = RunSpec::new(
        "h",
        "random-qp:n=10,m=4,eps=0.5,seed=2".parse().unwrap(),
        PrecondSpec::Jacobi,
        PrecondSpec::ScaledIdentity(1.0),
        1.0,
    );
    spec.history = Some(path.clone());
    let rec = run(&spec).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("iter,fnorm,gnorm,omega,tauhat,tau,theta"));
    assert_eq!(text.lines().count(), rec.iterations + 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn residual_trace_matches_final_norms(seed in 0u64..500, theta in 0.2f64..1.0) {
        let p = gen_random_qp(12, 4, 0.3, seed).unwrap();
        let cfg = UzawaConfig::new(Variant::Alg1, theta, StopRule::stacked(1e-8).relative(), 3000);
        let rep = solve(&p, &jacobi(p.a()).unwrap(), &LinearPreconditioner::identity(4), &cfg).unwrap();
        prop_assert_eq!(rep.residual_trace.len(), rep.iterations + 1);
        let last = rep.residual_trace.last().unwrap();
        prop_assert_eq!(*last, (rep.fnorm, rep.gnorm));
        if rep.converged() {
            prop_assert_eq!(rep.iterations_under(&cfg.stop_rule), Some(rep.iterations));
        }
    }
}
