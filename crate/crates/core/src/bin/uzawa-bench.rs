use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use inexact_uzawa::bench::{self, TableName, CONFIG_HELP, VERSION};
use inexact_uzawa::problems::{export_problem, ProblemSpec};
use inexact_uzawa::theory::{verify_theory, VerifyOptions};
use inexact_uzawa::Result;

#[derive(Parser)]
#[command(
    name = "uzawa-bench",
    version,
    about = "Inexact Uzawa benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the runs described in a config file.
    #[command(after_help = CONFIG_HELP)]
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Results file the records are appended to.
        #[arg(long, default_value = "results.txt")]
        results: PathBuf,
    },
    /// Run one of the published experiment grids.
    Table {
        /// table1, table2, table3 or table4
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Check the convergence theory on a seeded random corpus.
    VerifyTheory {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Replace every instance's damping factor.
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Write a generated problem as Matrix Market files.
    ExportProblem {
        /// e.g. stokes:n=32,nu=1
        selector: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run_config(config: &Path, results: &Path) -> Result<bool> {
    let specs = bench::parse_config(&fs::read_to_string(config)?)?;
    let mut file = OpenOptions::new().create(true).append(true).open(results)?;
    for spec in &specs {
        let record = bench::run(spec)?;
        let line = record.to_line();
        println!("{line}");
        writeln!(file, "{line}")?;
    }
    Ok(true)
}

fn run_table(name: &str, out: Option<&Path>, format: Format) -> Result<bool> {
    let name: TableName = name.parse()?;
    let result = bench::table(name)?;
    let (text, ext) = match format {
        Format::Csv => (result.render_csv(), "csv"),
        Format::Md => (result.render_md(), "md"),
    };
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(format!("{name}.{ext}")), &text)?;
            fs::write(
                dir.join(format!("{name}.timings.csv")),
                result.render_timings(),
            )?;
            let mut log = OpenOptions::new()
                .create(true)
                .append(true)
                .open(dir.join("results.txt"))?;
            writeln!(log, "# {VERSION} {name}")?;
            log.write_all(result.render_csv().as_bytes())?;
        }
        None => print!("{text}"),
    }
    let mismatches = result.mismatches();
    if mismatches > 0 {
        eprintln!("{name}: {mismatches} gated mismatch(es)");
    }
    Ok(mismatches == 0)
}

fn run_verify(seed: u64, count: usize, theta: Option<f64>) -> Result<bool> {
    let summary = verify_theory(&VerifyOptions {
        seed,
        count,
        theta_override: theta,
        ..Default::default()
    })?;
    print!("{}", summary.render());
    Ok(summary.violations() == 0)
}

fn run_export(selector: &str, out: &Path) -> Result<bool> {
    let spec: ProblemSpec = selector.parse()?;
    let problem = spec.build()?;
    export_problem(&problem, out)?;
    println!(
        "wrote {} (n={}, m={})",
        out.display(),
        problem.n(),
        problem.m()
    );
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config, results } => run_config(config, results),
        Command::Table { name, out, format } => run_table(name, out.as_deref(), *format),
        Command::VerifyTheory { seed, count, theta } => run_verify(*seed, *count, *theta),
        Command::ExportProblem { selector, out } => run_export(selector, out),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
