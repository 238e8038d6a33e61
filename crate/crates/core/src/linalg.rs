//! Sparse SPD linear algebra: CSR storage, Jacobi-preconditioned conjugate
//! gradients and a banded Cholesky factorization.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a square matrix from `(row, col, value)` triplets, summing
    /// duplicates. Columns are sorted within each row.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|(j, _)| *j == c).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.get(r, r)).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (r, row) in d.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        d
    }

    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_into(x, &mut y);
        y
    }

    /// Largest `|r - c|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|r| self.row(r).map(move |(c, _)| r.abs_diff(c)))
            .max()
            .unwrap_or(0)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    pub residual: f64,
}

/// Solves `A x = b` by Jacobi-preconditioned CG, starting from `x`.
///
/// Stops once `||b - A x||_2 <= tol * max(1, ||b||_2)`; fails after
/// `max_iter` iterations.
pub fn pcg(a: &CsrMatrix, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> Result<CgStats> {
    let n = a.dim();
    let target = tol * norm2(b).max(1.0);
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();
    let mut r = a.mul(x);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut res = norm2(&r);
    if res <= target {
        return Ok(CgStats {
            iterations: 0,
            residual: res,
        });
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        a.mul_into(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = norm2(&r);
        if res <= target {
            return Ok(CgStats {
                iterations: it,
                residual: res,
            });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::SolverFailure {
        iterations: max_iter,
        residual: res,
    })
}

/// Cholesky factor `A = L L^T` of a banded SPD matrix, stored row-wise:
/// entry `k` of row `i` holds `L[i][i - bw + k]`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    rows: Vec<f64>,
}

impl BandedCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.dim();
        let bw = a.bandwidth();
        let w = bw + 1;
        let mut rows = vec![0.0; n * w];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    rows[i * w + (j + bw - i)] = v;
                }
            }
        }
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                // L[i][j] = (A[i][j] - sum_k L[i][k] L[j][k]) / L[j][j]
                let k0 = j0.max(j.saturating_sub(bw));
                let mut s = rows[i * w + (j + bw - i)];
                let ri = i * w + bw - i;
                let rj = j * w + bw - j;
                for k in k0..j {
                    s -= rows[ri + k] * rows[rj + k];
                }
                if j == i {
                    if !(s > 0.0) {
                        return Err(Error::invalid("matrix is not positive definite"));
                    }
                    rows[ri + i] = s.sqrt();
                } else {
                    rows[ri + j] = s / rows[rj + j];
                }
            }
        }
        Ok(Self { n, bw, rows })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let mut x = b.to_vec();
        for i in 0..n {
            let ri = i * w + bw - i;
            let mut s = x[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.rows[ri + k] * x[k];
            }
            x[i] = s / self.rows[ri + i];
        }
        for i in (0..n).rev() {
            let ri = i * w + bw - i;
            x[i] /= self.rows[ri + i];
            let xi = x[i];
            for k in i.saturating_sub(bw)..i {
                x[k] -= self.rows[ri + k] * xi;
            }
        }
        x
    }
}
