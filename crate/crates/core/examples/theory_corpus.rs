//! Runs the seeded theory corpus and the √α corollary construction.

use inexact_uzawa::theory::{
    corollary_rate, corpus, equivalence_check, verify_theory, VerifyOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let summary = verify_theory(&VerifyOptions::default())?;
    print!("{}", summary.render());
    for kappa in [4.0, 16.0, 64.0] {
        let c = corollary_rate(kappa, 1e-3, 7)?;
        println!(
            "kappa1={kappa}: sqrt(alpha)={:.5} measured={:.5} |F|={:.5}",
            c.sqrt_alpha, c.measured_rate, c.f_norm
        );
    }
    for inst in corpus(42, 10)? {
        let e = equivalence_check(&inst, 1e-14)?;
        println!(
            "instance {}: alg1/alg2 {}/{}  alg1(H)/alg3 {}/{}",
            e.index, e.alg1_exact_a, e.alg2, e.alg1_exact_h, e.alg3
        );
    }
    Ok(())
}
