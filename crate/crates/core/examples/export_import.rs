//! Writes a Stokes problem as Matrix Market files and reads it back.

use inexact_uzawa::problems::{export_problem, import_problem, ProblemSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec: ProblemSpec = "stokes:n=8,nu=1,beta=0.25".parse()?;
    let problem = spec.build()?;
    let dir = std::env::temp_dir().join("inexact-uzawa-export");
    export_problem(&problem, &dir)?;
    let back = import_problem(&dir)?;
    println!("wrote {}", dir.display());
    println!(
        "A equal: {}, B equal: {}, D equal: {}",
        back.a() == problem.a(),
        back.b() == problem.b(),
        back.d() == problem.d()
    );
    for (k, v) in back.meta() {
        println!("  {k} = {v}");
    }
    Ok(())
}
