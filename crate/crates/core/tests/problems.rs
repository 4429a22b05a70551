use inexact_uzawa::problems::{
    export_problem, gen_algebraic, gen_convection, gen_elasticity, gen_random_qp, gen_stokes_q1p0,
    import_problem, AlgebraicParams, ConvectionParams, ElasticityForcing, ElasticityParams,
    ProblemSpec, StokesParams,
};

#[test]
fn convection_symmetric_part_is_elasticity() {
    let e = ElasticityParams {
        n: 9,
        ..Default::default()
    };
    let plain = gen_elasticity(&e).unwrap();
    let conv = gen_convection(&ConvectionParams {
        elasticity: e,
        b: 7.0,
    })
    .unwrap();
    assert!(!conv.symmetric_a());
    let sym = conv.a().symmetric_part().unwrap();
    let diff = sym.add_scaled(1.0, plain.a(), -1.0).unwrap();
    assert!(diff.max_abs() < 1e-12 * plain.a().max_abs());
    assert_eq!(conv.b(), plain.b());
}

#[test]
fn gradient_of_constant_pressure_vanishes() {
    let e = gen_elasticity(&ElasticityParams {
        n: 6,
        ..Default::default()
    })
    .unwrap();
    let s = gen_stokes_q1p0(&StokesParams {
        n: 6,
        ..Default::default()
    })
    .unwrap();
    for p in [&e, &s] {
        let b1 = p.b().matvec(&vec![1.0; p.m()]).unwrap();
        assert!(b1.iter().all(|v| v.abs() < 1e-12));
    }
}

#[test]
fn forcing_choices() {
    let div = gen_elasticity(&ElasticityParams {
        n: 5,
        forcing: ElasticityForcing::Divergence,
        ..Default::default()
    })
    .unwrap();
    assert!(div.f().iter().all(|v| *v == 0.0));
    assert!(div.g().iter().all(|v| *v == 1.0));
    let vel = gen_elasticity(&ElasticityParams {
        n: 5,
        ..Default::default()
    })
    .unwrap();
    assert_eq!(vel.f().iter().filter(|v| **v == 1.0).count(), 20);
    assert!(vel.g().iter().all(|v| *v == 0.0));
}

#[test]
fn stokes_lid_forcing_on_top_row() {
    let p = gen_stokes_q1p0(&StokesParams {
        n: 5,
        nu: 0.01,
        beta: 0.25,
    })
    .unwrap();
    let nonzero: Vec<usize> = (0..p.n()).filter(|&k| p.f()[k] != 0.0).collect();
    assert_eq!(nonzero, vec![12, 13, 14, 15]);
    assert!(nonzero.iter().all(|&k| p.f()[k] == 0.01));
}

#[test]
fn algebraic_solution_is_ones() {
    let p = gen_algebraic(&AlgebraicParams {
        n: 40,
        m: 30,
        sigma: 1.5,
    })
    .unwrap();
    let ones_x = vec![1.0; 40];
    let ones_y = vec![1.0; 30];
    let rf = p.residual_f(&ones_x, &ones_y).unwrap();
    let rg = p.residual_g(&ones_x, &ones_y).unwrap();
    assert!(rf.iter().chain(&rg).all(|v| v.abs() < 1e-12));
}

#[test]
fn random_qp_is_reproducible() {
    let a = gen_random_qp(12, 5, 0.3, 77).unwrap();
    let b = gen_random_qp(12, 5, 0.3, 77).unwrap();
    assert_eq!(a.a(), b.a());
    assert_eq!(a.b(), b.b());
    assert_eq!(a.f(), b.f());
    let c = gen_random_qp(12, 5, 0.3, 78).unwrap();
    assert_ne!(a.f(), c.f());
}

#[test]
fn export_import_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    for sel in [
        "stokes:n=5,nu=1,beta=0.25",
        "convection:n=5,b=3",
        "random-qp:n=9,m=4,eps=0.2,seed=1",
    ] {
        let spec: ProblemSpec = sel.parse().unwrap();
        let p = spec.build().unwrap();
        let out = dir.path().join(sel.split(':').next().unwrap());
        export_problem(&p, &out).unwrap();
        let q = import_problem(&out).unwrap();
        assert_eq!(q.a().to_dense(), p.a().to_dense());
        assert_eq!(q.b().to_dense(), p.b().to_dense());
        assert_eq!(q.d().to_dense(), p.d().to_dense());
        assert_eq!(q.f(), p.f());
        assert_eq!(q.g(), p.g());
        assert_eq!(q.symmetric_a(), p.symmetric_a());
    }
}

#[test]
fn import_of_missing_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    assert!(import_problem(&dir.path().join("absent")).is_err());
}
