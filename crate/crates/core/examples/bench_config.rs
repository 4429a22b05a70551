//! Parses a run configuration and prints one record per stanza.

use inexact_uzawa::bench::{parse_config, run};

const CONFIG: &str = "\
# exact preconditioner on the driven cavity
name=stokes-exact
problem=stokes:n=32,nu=1,beta=0.25
a_hat=exact
s_hat=pressure-mass
theta=0.5
stop=max-rel-1e-6

name=elasticity-adaptive
problem=elasticity:n=20
a_hat=ic0
s_hat=identity-plus-d
theta=adaptive
stop=stacked-abs-1e-4
max_iters=20000
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for spec in parse_config(CONFIG)? {
        println!("{}", run(&spec)?.to_line());
    }
    Ok(())
}
