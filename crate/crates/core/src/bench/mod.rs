//! Benchmark harness: run specifications, run records and the table grids.

mod tables;

pub use tables::{
    calibration_candidates, table, CellResult, Gate, TableCell, TableName, TableResult, Verdict,
    PUBLISHED_OFFSET,
};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::precond::{
    exact, exact_lu, ic0_preconditioner, ict_preconditioner, jacobi, pcg_nonlinear, schur_diag,
    LinearOperator, LinearPreconditioner, Preconditioner, SchurDiagKind, ShiftPolicy,
};
use crate::problems::ProblemSpec;
use crate::saddle::{SaddleProblem, SchurOperator};
use crate::theory::lambda_hat_estimate;
use crate::uzawa::{
    solve, NormKind, Scaling, SolveReport, Status, StopRule, Theta, UzawaConfig, Variant,
};

pub const VERSION: &str = concat!("inexact-uzawa ", env!("CARGO_PKG_VERSION"));

/// Keys understood in a run stanza.
pub const CONFIG_HELP: &str = "\
Config files hold one run per stanza; stanzas are separated by blank lines
and '#' starts a comment. Keys:
  name       label echoed in the record (default: run<k>)
  problem    elasticity:n=20,mu=1,lambda=1000,forcing=velocity|divergence
             convection:n=50,b=4,...   stokes:n=32,nu=1,beta=0.25
             algebraic:n=800,m=600,sigma=1.5   random-qp:n=20,m=8,eps=0.1,seed=0
  a_hat      jacobi | ic0 | ict:<droptol> | exact | scaled-identity:<c>
             | pcg:<tol>,<max>[,<inner>]          (required)
  s_hat      identity-plus-d | pressure-mass | scaled-identity:<c>
             | pcg:<tol>,<max>[,<inner>]          (required)
  variant    alg1 | alg2 | alg3 | nonsymmetric (default: inferred)
  theta      damping factor > 0 or 'adaptive' (default 1)
  stop       <stacked|max>-<abs|rel>-<tol> (default stacked-abs-1e-6)
  max_iters  iteration cap (default 10000)
  history    path of a residual-history CSV to write (optional)";

/// Preconditioner selector for `Â` or `Ŝ`.
#[derive(Debug, Clone, PartialEq)]
pub enum PrecondSpec {
    Jacobi,
    Ic0,
    Ict(f64),
    Exact,
    IdentityPlusD,
    PressureMass,
    ScaledIdentity(f64),
    /// Inner PCG to relative residual `tol` with at most `max_inner` steps.
    Pcg {
        tol: f64,
        max_inner: usize,
        inner: Option<Box<PrecondSpec>>,
    },
}

fn bad(field: &str, msg: impl fmt::Display) -> Error {
    Error::InvalidArgument(format!("{field}: {msg}"))
}

impl FromStr for PrecondSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = s.split_once(':').unwrap_or((s, ""));
        let num = |v: &str| -> Result<f64> {
            v.trim()
                .parse()
                .map_err(|_| bad("preconditioner", format!("bad number '{v}' in '{s}'")))
        };
        Ok(match head {
            "jacobi" => PrecondSpec::Jacobi,
            "ic0" => PrecondSpec::Ic0,
            "ict" => PrecondSpec::Ict(num(arg)?),
            "exact" => PrecondSpec::Exact,
            "identity-plus-d" => PrecondSpec::IdentityPlusD,
            "pressure-mass" => PrecondSpec::PressureMass,
            "scaled-identity" => PrecondSpec::ScaledIdentity(num(arg)?),
            "pcg" => {
                let parts: Vec<&str> = arg.splitn(3, ',').collect();
                if parts.len() < 2 {
                    return Err(bad(
                        "preconditioner",
                        format!("'{s}' needs pcg:<tol>,<max>"),
                    ));
                }
                let max_inner = parts[1]
                    .trim()
                    .parse()
                    .map_err(|_| bad("preconditioner", format!("bad step count in '{s}'")))?;
                let inner = match parts.get(2) {
                    Some(p) => Some(Box::new(p.parse()?)),
                    None => None,
                };
                PrecondSpec::Pcg {
                    tol: num(parts[0])?,
                    max_inner,
                    inner,
                }
            }
            other => return Err(bad("preconditioner", format!("unknown selector '{other}'"))),
        })
    }
}

impl fmt::Display for PrecondSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrecondSpec::Jacobi => write!(f, "jacobi"),
            PrecondSpec::Ic0 => write!(f, "ic0"),
            PrecondSpec::Ict(t) => write!(f, "ict:{t:e}"),
            PrecondSpec::Exact => write!(f, "exact"),
            PrecondSpec::IdentityPlusD => write!(f, "identity-plus-d"),
            PrecondSpec::PressureMass => write!(f, "pressure-mass"),
            PrecondSpec::ScaledIdentity(c) => write!(f, "scaled-identity:{c}"),
            PrecondSpec::Pcg {
                tol,
                max_inner,
                inner,
            } => {
                write!(f, "pcg:{tol:e},{max_inner}")?;
                match inner {
                    Some(i) => write!(f, ",{i}"),
                    None => Ok(()),
                }
            }
        }
    }
}

impl PrecondSpec {
    fn is_inner_solver(&self) -> bool {
        matches!(self, PrecondSpec::Pcg { .. })
    }
}

/// Builds `Â`. Incomplete factorizations and Jacobi act on the symmetric
/// part of `A`; `exact` factors `A` itself.
pub fn build_a_hat(spec: &PrecondSpec, problem: &SaddleProblem) -> Result<Arc<dyn Preconditioner>> {
    let sym;
    let base = if problem.symmetric_a() {
        problem.a()
    } else {
        sym = problem.a().symmetric_part()?;
        &sym
    };
    Ok(match spec {
        PrecondSpec::Jacobi => Arc::new(jacobi(base)?),
        PrecondSpec::Ic0 => Arc::new(ic0_preconditioner(base, ShiftPolicy::Retry)?),
        PrecondSpec::Ict(t) => Arc::new(ict_preconditioner(base, *t, ShiftPolicy::Retry)?),
        PrecondSpec::Exact if problem.symmetric_a() => Arc::new(exact(problem.a())?),
        PrecondSpec::Exact => Arc::new(exact_lu(problem.a())?),
        PrecondSpec::ScaledIdentity(c) => {
            Arc::new(LinearPreconditioner::scaled_identity(problem.n(), *c))
        }
        PrecondSpec::Pcg {
            tol,
            max_inner,
            inner,
        } => {
            if !problem.symmetric_a() {
                return Err(bad("a_hat", "pcg needs a symmetric A"));
            }
            let inner = match inner {
                Some(i) => build_a_hat(i, problem)?,
                None => Arc::new(jacobi(problem.a())?),
            };
            let op: Arc<dyn LinearOperator> = Arc::new(problem.a().clone());
            Arc::new(pcg_nonlinear(op, inner, *tol, *max_inner)?)
        }
        PrecondSpec::IdentityPlusD | PrecondSpec::PressureMass => {
            return Err(bad(
                "a_hat",
                format!("'{spec}' is a Schur complement preconditioner"),
            ))
        }
    })
}

/// Builds `Ŝ`, or `Ψ_H` for a `pcg` selector (matrix-free on
/// `H = BᵗÂ⁻¹B + D`).
pub fn build_s_hat(
    spec: &PrecondSpec,
    problem: &SaddleProblem,
    mesh_size: Option<f64>,
    a_hat: &Arc<dyn Preconditioner>,
) -> Result<Arc<dyn Preconditioner>> {
    Ok(match spec {
        PrecondSpec::IdentityPlusD => {
            Arc::new(schur_diag(problem.d(), SchurDiagKind::IdentityPlusD)?)
        }
        PrecondSpec::PressureMass => {
            let h =
                mesh_size.ok_or_else(|| bad("s_hat", "pressure-mass needs a meshed problem"))?;
            Arc::new(schur_diag(problem.d(), SchurDiagKind::PressureMass { h })?)
        }
        PrecondSpec::ScaledIdentity(c) => {
            Arc::new(LinearPreconditioner::scaled_identity(problem.m(), *c))
        }
        PrecondSpec::Pcg {
            tol,
            max_inner,
            inner,
        } => {
            let inner = match inner {
                Some(i) => build_s_hat(i, problem, mesh_size, a_hat)?,
                None => Arc::new(LinearPreconditioner::identity(problem.m())),
            };
            let op: Arc<dyn LinearOperator> = Arc::new(SchurOperator::new(problem, a_hat.clone())?);
            Arc::new(pcg_nonlinear(op, inner, *tol, *max_inner)?)
        }
        other => {
            return Err(bad(
                "s_hat",
                format!("'{other}' is not a Schur complement preconditioner"),
            ))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaSpec {
    Fixed(f64),
    Adaptive,
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaSpec::Fixed(t) => write!(f, "{t}"),
            ThetaSpec::Adaptive => write!(f, "adaptive"),
        }
    }
}

impl FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().splitn(3, '-').collect();
        if parts.len() != 3 {
            return Err(bad(
                "stop",
                format!("expected <stacked|max>-<abs|rel>-<tol>, got '{s}'"),
            ));
        }
        let norm = match parts[0] {
            "stacked" => NormKind::Stacked,
            "max" => NormKind::Max,
            o => return Err(bad("stop", format!("unknown norm '{o}'"))),
        };
        let scaling = match parts[1] {
            "abs" => Scaling::Absolute,
            "rel" => Scaling::Relative,
            o => return Err(bad("stop", format!("unknown scaling '{o}'"))),
        };
        let tol: f64 = parts[2]
            .parse()
            .map_err(|_| bad("stop", format!("bad tolerance '{}'", parts[2])))?;
        if !(tol > 0.0) {
            return Err(bad("stop", "tolerance must be positive"));
        }
        Ok(StopRule { norm, scaling, tol })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub name: String,
    pub problem: ProblemSpec,
    pub variant: Option<Variant>,
    pub a_hat: PrecondSpec,
    pub s_hat: PrecondSpec,
    pub theta: ThetaSpec,
    pub stop: StopRule,
    pub max_iters: usize,
    pub history: Option<PathBuf>,
}

impl RunSpec {
    pub fn new(
        name: &str,
        problem: ProblemSpec,
        a_hat: PrecondSpec,
        s_hat: PrecondSpec,
        theta: f64,
    ) -> Self {
        Self {
            name: name.to_string(),
            problem,
            variant: None,
            a_hat,
            s_hat,
            theta: ThetaSpec::Fixed(theta),
            stop: StopRule::stacked(1e-6),
            max_iters: 10_000,
            history: None,
        }
    }

    /// Explicit variant, or the one implied by the selectors and the
    /// symmetry of `A`.
    pub fn resolved_variant(&self, symmetric_a: bool) -> Variant {
        self.variant.unwrap_or(if !symmetric_a {
            Variant::Nonsymmetric
        } else if self.a_hat.is_inner_solver() {
            Variant::Alg2
        } else if self.s_hat.is_inner_solver() {
            Variant::Alg3
        } else {
            Variant::Alg1
        })
    }
}

fn parse_variant(v: &str) -> Result<Variant> {
    Ok(match v {
        "alg1" => Variant::Alg1,
        "alg2" => Variant::Alg2,
        "alg3" => Variant::Alg3,
        "nonsymmetric" => Variant::Nonsymmetric,
        o => return Err(bad("variant", format!("unknown variant '{o}'"))),
    })
}

/// Parses `key=value` stanzas separated by blank lines.
pub fn parse_config(text: &str) -> Result<Vec<RunSpec>> {
    let mut specs = Vec::new();
    let mut stanza: Vec<(usize, String, String)> = Vec::new();
    let mut flush = |stanza: &mut Vec<(usize, String, String)>| -> Result<()> {
        if stanza.is_empty() {
            return Ok(());
        }
        let k = specs.len();
        specs.push(spec_from_stanza(stanza, k)?);
        stanza.clear();
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if raw.trim().is_empty() {
                flush(&mut stanza)?;
            }
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected key=value, got '{line}'"),
        })?;
        stanza.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    flush(&mut stanza)?;
    Ok(specs)
}

fn spec_from_stanza(stanza: &[(usize, String, String)], k: usize) -> Result<RunSpec> {
    let mut name = format!("run{k}");
    let (mut problem, mut a_hat, mut s_hat) = (None, None, None);
    let mut variant = None;
    let mut theta = ThetaSpec::Fixed(1.0);
    let mut stop = StopRule::stacked(1e-6);
    let mut max_iters = 10_000;
    let mut history = None;
    for (line, key, value) in stanza {
        let at = |e: Error| Error::Parse {
            line: *line,
            message: e.to_string(),
        };
        match key.as_str() {
            "name" => name = value.clone(),
            "problem" => {
                problem = Some(
                    value
                        .parse::<ProblemSpec>()
                        .map_err(|e| at(bad("problem", e)))?,
                )
            }
            "a_hat" => a_hat = Some(value.parse::<PrecondSpec>().map_err(at)?),
            "s_hat" => s_hat = Some(value.parse::<PrecondSpec>().map_err(at)?),
            "variant" => variant = Some(parse_variant(value).map_err(at)?),
            "theta" => {
                theta = if value == "adaptive" {
                    ThetaSpec::Adaptive
                } else {
                    let t: f64 = value
                        .parse()
                        .map_err(|_| at(bad("theta", format!("bad value '{value}'"))))?;
                    if !(t > 0.0) {
                        return Err(at(bad("theta", "must be positive")));
                    }
                    ThetaSpec::Fixed(t)
                }
            }
            "stop" => stop = value.parse().map_err(at)?,
            "max_iters" => {
                max_iters = value
                    .parse()
                    .map_err(|_| at(bad("max_iters", format!("bad value '{value}'"))))?
            }
            "history" => history = Some(PathBuf::from(value)),
            other => return Err(at(bad(other, "unknown key"))),
        }
    }
    let missing = |f: &str| bad(f, format!("missing in stanza '{name}'"));
    Ok(RunSpec {
        problem: problem.ok_or_else(|| missing("problem"))?,
        a_hat: a_hat.ok_or_else(|| missing("a_hat"))?,
        s_hat: s_hat.ok_or_else(|| missing("s_hat"))?,
        name,
        variant,
        theta,
        stop,
        max_iters,
        history,
    })
}

/// Outcome of one run. Solver failures are recorded in `status`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub version: String,
    pub name: String,
    pub problem: String,
    pub variant: String,
    pub a_hat: String,
    pub s_hat: String,
    pub theta: String,
    pub stop: String,
    pub status: String,
    pub iterations: usize,
    pub fnorm: f64,
    pub gnorm: f64,
    pub wall_seconds: f64,
    pub history: Option<PathBuf>,
}

impl RunRecord {
    pub fn converged(&self) -> bool {
        self.status == "converged"
    }

    /// One `key=value` line; the wall time is last so that callers may strip it.
    pub fn to_line(&self) -> String {
        format!(
            "version={} name={} problem={} variant={} a_hat={} s_hat={} theta={} stop={} status={} iterations={} fnorm={:e} gnorm={:e} history={} wall_seconds={:.3}",
            self.version.replace(' ', "/"),
            self.name,
            self.problem,
            self.variant,
            self.a_hat,
            self.s_hat,
            self.theta,
            self.stop,
            self.status.replace(' ', "_"),
            self.iterations,
            self.fnorm,
            self.gnorm,
            self.history
                .as_ref()
                .map_or_else(|| "none".to_string(), |p| p.display().to_string()),
            self.wall_seconds
        )
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Converged => "converged",
        Status::MaxIterations => "max-iterations",
        Status::Diverged => "diverged",
    }
}

/// Builds the problem and preconditioners and runs the solver. Returns the
/// full report alongside the record when the solver finished.
pub fn execute(spec: &RunSpec) -> Result<(RunRecord, Option<SolveReport>)> {
    let problem = spec.problem.build()?;
    let a_hat = build_a_hat(&spec.a_hat, &problem)?;
    let s_hat = build_s_hat(&spec.s_hat, &problem, spec.problem.mesh_size(), &a_hat)?;
    let variant = spec.resolved_variant(problem.symmetric_a());
    let theta = match spec.theta {
        ThetaSpec::Fixed(t) => Theta::Fixed(t),
        ThetaSpec::Adaptive => Theta::Adaptive {
            lambda_hat: lambda_hat_estimate(a_hat.as_ref(), problem.a(), 50, 0x7e7a)?.lambda_hat,
        },
    };
    let config = UzawaConfig {
        theta,
        record_history: spec.history.is_some(),
        ..UzawaConfig::new(variant, 1.0, spec.stop, spec.max_iters)
    };
    let mut record = RunRecord {
        version: VERSION.to_string(),
        name: spec.name.clone(),
        problem: spec.problem.to_string(),
        variant: variant.to_string(),
        a_hat: spec.a_hat.to_string(),
        s_hat: spec.s_hat.to_string(),
        theta: spec.theta.to_string(),
        stop: spec.stop.to_string(),
        status: String::new(),
        iterations: 0,
        fnorm: f64::NAN,
        gnorm: f64::NAN,
        wall_seconds: 0.0,
        history: spec.history.clone(),
    };
    match solve(&problem, a_hat.as_ref(), s_hat.as_ref(), &config) {
        Ok(rep) => {
            if let Some(path) = &spec.history {
                rep.write_history_csv(std::io::BufWriter::new(std::fs::File::create(path)?))?;
            }
            record.status = status_name(rep.status).to_string();
            record.iterations = rep.iterations;
            record.fnorm = rep.fnorm;
            record.gnorm = rep.gnorm;
            record.wall_seconds = rep.wall_seconds;
            Ok((record, Some(rep)))
        }
        Err(e) => {
            record.status = format!("error: {e}");
            Ok((record, None))
        }
    }
}

pub fn run(spec: &RunSpec) -> Result<RunRecord> {
    Ok(execute(spec)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors_roundtrip() {
        for s in [
            "jacobi",
            "ic0",
            "ict:1e-3",
            "exact",
            "identity-plus-d",
            "pressure-mass",
            "scaled-identity:2",
            "pcg:1e-6,3",
            "pcg:1e-14,50,jacobi",
        ] {
            let p: PrecondSpec = s.parse().unwrap();
            assert_eq!(p, p.to_string().parse().unwrap());
        }
        assert!("cholesky".parse::<PrecondSpec>().is_err());
    }

    #[test]
    fn stop_rule_parses_its_display() {
        let r = StopRule::stacked(1e-4);
        assert_eq!(r, r.to_string().parse().unwrap());
        let m = StopRule::max_norm(1e-6).relative();
        assert_eq!(m, m.to_string().parse().unwrap());
        assert!("stacked-abs-0".parse::<StopRule>().is_err());
    }

    #[test]
    fn config_stanzas() {
        let text = "# two runs\nname=a\nproblem=random-qp:n=10,m=4,eps=0.5,seed=1\na_hat=jacobi\ns_hat=scaled-identity:1\ntheta=0.5\n\nproblem=stokes:n=4\na_hat=exact\ns_hat=pressure-mass\nstop=max-rel-1e-6\n";
        let specs = parse_config(text).unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].name, "a");
        assert_eq!(specs[1].name, "run1");
        assert_eq!(specs[1].stop, StopRule::max_norm(1e-6).relative());
        let err = parse_config("problem=stokes:n=4\na_hat=exact\n").unwrap_err();
        assert!(err.to_string().contains("s_hat"));
        let err = parse_config("problem=stokes:n=4\nfoo=1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn zero_iteration_cap_gives_unconverged_record() {
        let mut spec = RunSpec::new(
            "cap",
            "random-qp:n=10,m=4,eps=0.5,seed=1".parse().unwrap(),
            PrecondSpec::Jacobi,
            PrecondSpec::ScaledIdentity(1.0),
            1.0,
        );
        spec.max_iters = 0;
        let r = run(&spec).unwrap();
        assert_eq!(r.iterations, 0);
        assert!(!r.converged());
        assert_eq!(r.status, "max-iterations");
    }

    #[test]
    fn variant_is_inferred() {
        let spec = RunSpec::new(
            "v",
            "random-qp:n=10,m=4".parse().unwrap(),
            "pcg:1e-8,20".parse().unwrap(),
            PrecondSpec::ScaledIdentity(1.0),
            1.0,
        );
        assert_eq!(spec.resolved_variant(true), Variant::Alg2);
        assert_eq!(spec.resolved_variant(false), Variant::Nonsymmetric);
    }
}
