//! Problem export to a directory of Matrix Market files:
//! `A.mtx`, `B.mtx`, `D.mtx`, `f.mtx`, `g.mtx` and `meta.txt`.
//!
//! `meta.txt` holds one `key=value` pair per line: `n`, `m`, `symmetric_a`
//! and the generator parameters.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::saddle::SaddleProblem;
use crate::sparse::mtx;

pub fn export_problem(p: &SaddleProblem, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let w = |name: &str| -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(dir.join(name))?))
    };
    mtx::write_matrix(w("A.mtx")?, p.a(), p.symmetric_a())?;
    mtx::write_matrix(w("B.mtx")?, p.b(), false)?;
    mtx::write_matrix(w("D.mtx")?, p.d(), true)?;
    mtx::write_vector(w("f.mtx")?, p.f())?;
    mtx::write_vector(w("g.mtx")?, p.g())?;
    let mut meta = w("meta.txt")?;
    writeln!(meta, "n={}", p.n())?;
    writeln!(meta, "m={}", p.m())?;
    writeln!(meta, "symmetric_a={}", p.symmetric_a())?;
    for (k, v) in p.meta() {
        writeln!(meta, "{k}={v}")?;
    }
    meta.flush()?;
    Ok(())
}

pub fn import_problem(dir: &Path) -> Result<SaddleProblem> {
    let r =
        |name: &str| -> Result<BufReader<File>> { Ok(BufReader::new(File::open(dir.join(name))?)) };
    let a = mtx::read_matrix(r("A.mtx")?)?;
    let b = mtx::read_matrix(r("B.mtx")?)?;
    let d = mtx::read_matrix(r("D.mtx")?)?;
    let f = mtx::read_vector(r("f.mtx")?)?;
    let g = mtx::read_vector(r("g.mtx")?)?;
    let text = std::fs::read_to_string(dir.join("meta.txt"))?;
    let mut symmetric_a = None;
    let mut extra = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: k + 1,
            message: format!("expected key=value in meta.txt, got '{line}'"),
        })?;
        match key {
            "symmetric_a" => symmetric_a = Some(value == "true"),
            "n" | "m" => {}
            _ => extra.push((key.to_string(), value.to_string())),
        }
    }
    let symmetric_a = symmetric_a.ok_or_else(|| Error::Parse {
        line: 0,
        message: "meta.txt lacks symmetric_a".into(),
    })?;
    let mut p = SaddleProblem::new(a, b, d, f, g, symmetric_a)?;
    for (k, v) in extra {
        p = p.with_meta(&k, v);
    }
    Ok(p)
}
