//! Generators for the benchmark saddle-point problems.

mod algebraic;
mod elasticity;
mod export;
mod random;
mod stokes;

pub use algebraic::{gen_algebraic, AlgebraicParams};
pub use elasticity::{
    gen_convection, gen_elasticity, ConvectionParams, ElasticityForcing, ElasticityParams,
    LambdaField,
};
pub use export::{export_problem, import_problem};
pub use random::gen_random_qp;
pub use stokes::{gen_stokes_q1p0, StokesParams};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::saddle::SaddleProblem;

/// A problem generator together with its parameters, written as
/// `kind:key=value,key=value`, e.g. `stokes:n=32,nu=1,beta=0.25`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Elasticity(ElasticityParams),
    Stokes(StokesParams),
    Algebraic(AlgebraicParams),
    Convection(ConvectionParams),
    RandomQp {
        n: usize,
        m: usize,
        eps: f64,
        seed: u64,
    },
}

impl ProblemSpec {
    pub fn build(&self) -> Result<SaddleProblem> {
        match self {
            ProblemSpec::Elasticity(p) => gen_elasticity(p),
            ProblemSpec::Stokes(p) => gen_stokes_q1p0(p),
            ProblemSpec::Algebraic(p) => gen_algebraic(p),
            ProblemSpec::Convection(p) => gen_convection(p),
            ProblemSpec::RandomQp { n, m, eps, seed } => gen_random_qp(*n, *m, *eps, *seed),
        }
    }

    /// Mesh size where the problem has one.
    pub fn mesh_size(&self) -> Option<f64> {
        match self {
            ProblemSpec::Elasticity(p) => Some(1.0 / p.n as f64),
            ProblemSpec::Stokes(p) => Some(1.0 / p.n as f64),
            ProblemSpec::Convection(p) => Some(1.0 / p.elasticity.n as f64),
            _ => None,
        }
    }
}

fn parse_kv(body: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got '{item}'")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn take<T: FromStr>(map: &mut BTreeMap<String, String>, key: &str, default: T) -> Result<T> {
    match map.remove(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad value '{v}' for '{key}'"))),
    }
}

fn finish(kind: &str, map: BTreeMap<String, String>) -> Result<()> {
    match map.keys().next() {
        None => Ok(()),
        Some(k) => Err(Error::InvalidArgument(format!(
            "unknown key '{k}' for {kind}"
        ))),
    }
}

impl FromStr for ProblemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        let mut map = parse_kv(body)?;
        let spec = match kind.trim() {
            "elasticity" | "convection" => {
                let d = ElasticityParams::default();
                let forcing = match take(&mut map, "forcing", "velocity".to_string())?.as_str() {
                    "velocity" => ElasticityForcing::VerticalVelocity,
                    "divergence" => ElasticityForcing::Divergence,
                    other => {
                        return Err(Error::InvalidArgument(format!("unknown forcing '{other}'")))
                    }
                };
                let e = ElasticityParams {
                    n: take(&mut map, "n", d.n)?,
                    mu: take(&mut map, "mu", d.mu)?,
                    lambda_field: LambdaField::Inclusion {
                        inside: take(&mut map, "lambda", 1000.0)?,
                        outside: 0.0,
                        lo: 0.25,
                        hi: 0.75,
                    },
                    forcing,
                };
                if kind.trim() == "convection" {
                    let b = take(&mut map, "b", 0.0)?;
                    ProblemSpec::Convection(ConvectionParams { elasticity: e, b })
                } else {
                    ProblemSpec::Elasticity(e)
                }
            }
            "stokes" => ProblemSpec::Stokes(StokesParams {
                n: take(&mut map, "n", 32)?,
                nu: take(&mut map, "nu", 1.0)?,
                beta: take(&mut map, "beta", 0.25)?,
            }),
            "algebraic" => ProblemSpec::Algebraic(AlgebraicParams {
                n: take(&mut map, "n", 800)?,
                m: take(&mut map, "m", 600)?,
                sigma: take(&mut map, "sigma", 1.5)?,
            }),
            "random-qp" => ProblemSpec::RandomQp {
                n: take(&mut map, "n", 20)?,
                m: take(&mut map, "m", 8)?,
                eps: take(&mut map, "eps", 0.1)?,
                seed: take(&mut map, "seed", 0)?,
            },
            other => return Err(Error::InvalidArgument(format!("unknown problem '{other}'"))),
        };
        finish(kind, map)?;
        Ok(spec)
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let el = |f: &mut fmt::Formatter<'_>, e: &ElasticityParams| {
            write!(f, "n={},mu={}", e.n, e.mu)?;
            if let LambdaField::Inclusion { inside, .. } = e.lambda_field {
                write!(f, ",lambda={inside}")?;
            }
            match e.forcing {
                ElasticityForcing::VerticalVelocity => write!(f, ",forcing=velocity"),
                ElasticityForcing::Divergence => write!(f, ",forcing=divergence"),
            }
        };
        match self {
            ProblemSpec::Elasticity(e) => {
                write!(f, "elasticity:")?;
                el(f, e)
            }
            ProblemSpec::Convection(c) => {
                write!(f, "convection:")?;
                el(f, &c.elasticity)?;
                write!(f, ",b={}", c.b)
            }
            ProblemSpec::Stokes(p) => write!(f, "stokes:n={},nu={},beta={}", p.n, p.nu, p.beta),
            ProblemSpec::Algebraic(p) => {
                write!(f, "algebraic:n={},m={},sigma={}", p.n, p.m, p.sigma)
            }
            ProblemSpec::RandomQp { n, m, eps, seed } => {
                write!(f, "random-qp:n={n},m={m},eps={eps},seed={seed}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_roundtrip() {
        for s in [
            "elasticity:n=20,mu=1,lambda=1000,forcing=velocity",
            "convection:n=50,mu=1,lambda=1000,forcing=divergence,b=4",
            "stokes:n=32,nu=0.01,beta=0.25",
            "algebraic:n=800,m=600,sigma=1.5",
            "random-qp:n=12,m=5,eps=0.5,seed=9",
        ] {
            let p: ProblemSpec = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!("stokes:n=4,viscosity=2".parse::<ProblemSpec>().is_err());
        assert!("heat:n=4".parse::<ProblemSpec>().is_err());
    }
}
