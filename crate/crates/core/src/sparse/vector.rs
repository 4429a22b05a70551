//! Sequential vector kernels. Reductions run left to right so results are
//! reproducible bit for bit.

use crate::error::{check_len, Result};

pub fn dot(u: &[f64], v: &[f64]) -> Result<f64> {
    check_len("dot", u.len(), v.len())?;
    Ok(dot_unchecked(u, v))
}

pub(crate) fn dot_unchecked(u: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for (a, b) in u.iter().zip(v) {
        s += a * b;
    }
    s
}

pub fn norm2(v: &[f64]) -> f64 {
    dot_unchecked(v, v).sqrt()
}

/// Returns `a*u + v`.
pub fn axpy(a: f64, u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    check_len("axpy", u.len(), v.len())?;
    Ok(u.iter().zip(v).map(|(x, y)| a * x + y).collect())
}

/// `v += a*u`
pub fn axpy_in_place(a: f64, u: &[f64], v: &mut [f64]) -> Result<()> {
    check_len("axpy", u.len(), v.len())?;
    for (y, x) in v.iter_mut().zip(u) {
        *y += a * x;
    }
    Ok(())
}

pub(crate) fn sub(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

pub(crate) fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}
