//! Small exact integer matrix routines for the unimodular action.

use crate::error::{Error, Result};

/// Determinant by fraction-free (Bareiss) elimination.
pub(crate) fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| i128::from(x)).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn minor(m: &[Vec<i64>], row: usize, col: usize) -> Vec<Vec<i64>> {
    m.iter()
        .enumerate()
        .filter(|&(i, _)| i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|&(j, _)| j != col)
                .map(|(_, &x)| x)
                .collect()
        })
        .collect()
}

/// Exact inverse of a unimodular matrix, via the adjugate.
pub(crate) fn unimodular_inverse(m: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("matrix must be square".into()));
    }
    let d = det(m);
    if d != 1 && d != -1 {
        return Err(Error::NotUnimodular { det: d });
    }
    let mut inv = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let c = if n == 1 { 1 } else { det(&minor(m, j, i)) };
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[i][j] = i64::try_from(sign * c * d)
                .map_err(|_| Error::InvalidArgument("inverse entry overflows i64".into()))?;
        }
    }
    Ok(inv)
}
