//! Dense matrix containers and the small amount of numerical linear algebra
//! the pipeline needs: Gram products, packed symmetric storage, a cyclic
//! Jacobi eigensolver for tiny matrices and shifted power iteration.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major dense `rows x cols` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self * x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `self^T * x`.
    pub fn t_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            axpy(xi, self.row(i), &mut out);
        }
        out
    }

    /// `self * self^T`, one fixed-order dot product per entry so the result
    /// does not depend on how rows are split across threads.
    pub fn gram(&self) -> SymmetricMatrix {
        let n = self.rows;
        let segments: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let ri = self.row(i);
                (i..n).map(|j| dot(ri, self.row(j))).collect()
            })
            .collect();
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for s in segments {
            packed.extend(s);
        }
        SymmetricMatrix { n, packed }
    }

    /// Product `self * other` for small dense operands (test and oracle use).
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a != 0.0 {
                    axpy(a, other.row(k), out.row_mut(i));
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }
}

/// Symmetric `n x n` matrix stored as its packed upper triangle (row-major).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    n: usize,
    packed: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            packed: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// The all-ones matrix `E_n`.
    pub fn ones(n: usize) -> Self {
        Self {
            n,
            packed: vec![1.0; n * (n + 1) / 2],
        }
    }

    /// Builds the matrix from `f(i, j)` evaluated on `i <= j` only.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                packed.push(f(i, j));
            }
        }
        Self { n, packed }
    }

    /// `v v^T`.
    pub fn outer(v: &[f64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    /// Reads the upper triangle of a square dense matrix. Fails if the input
    /// is not square or not symmetric to `1e-12` relative.
    pub fn from_dense(m: &DenseMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                got: m.cols(),
            });
        }
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..m.rows() {
            for j in (i + 1)..m.rows() {
                if (m.get(i, j) - m.get(j, i)).abs() > 1e-12 * scale {
                    return Err(Error::Infeasible(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self::from_fn(m.rows(), |i, j| m.get(i, j)))
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[self.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.index(i, j);
        self.packed[k] = v;
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    pub fn is_finite(&self) -> bool {
        self.packed.iter().all(|v| v.is_finite())
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `1^T M 1`.
    pub fn grand_sum(&self) -> f64 {
        let mut diag = 0.0;
        let mut off = 0.0;
        let mut k = 0;
        for i in 0..self.n {
            diag += self.packed[k];
            off += self.packed[k + 1..k + self.n - i].iter().sum::<f64>();
            k += self.n - i;
        }
        diag + 2.0 * off
    }

    /// Frobenius inner product `<self, other>`.
    pub fn inner(&self, other: &SymmetricMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.weighted_fold(other, |a, b| a * b)
    }

    fn weighted_fold(&self, other: &SymmetricMatrix, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut diag = 0.0;
        let mut off = 0.0;
        let mut k = 0;
        for i in 0..self.n {
            diag += f(self.packed[k], other.packed[k]);
            for t in k + 1..k + self.n - i {
                off += f(self.packed[t], other.packed[t]);
            }
            k += self.n - i;
        }
        diag + 2.0 * off
    }

    /// Entrywise l1 norm over all `n^2` entries.
    pub fn l1_norm(&self) -> f64 {
        self.weighted_fold(self, |a, _| a.abs())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.weighted_fold(self, |a, _| a * a).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.packed.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute row sum, an upper bound on every |eigenvalue|.
    /// Gershgorin lower bound `min_i (S_ii - sum_{j != i} |S_ij|)` on the
    /// smallest eigenvalue.
    pub fn gershgorin_lower(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let mut off = vec![0.0; self.n];
        let mut k = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let a = self.packed[k + j - i].abs();
                off[i] += a;
                off[j] += a;
            }
            k += self.n - i;
        }
        (0..self.n).map(|i| self.get(i, i) - off[i]).fold(f64::INFINITY, f64::min)
    }

    pub fn max_row_abs_sum(&self) -> f64 {
        let mut sums = vec![0.0; self.n];
        let mut k = 0;
        for i in 0..self.n {
            sums[i] += self.packed[k].abs();
            for j in i + 1..self.n {
                let a = self.packed[k + j - i].abs();
                sums[i] += a;
                sums[j] += a;
            }
            k += self.n - i;
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut k = 0;
        for i in 0..self.n {
            let row = &self.packed[k..k + self.n - i];
            out[i] += row[0] * x[i];
            let mut acc = 0.0;
            for (t, &a) in row.iter().enumerate().skip(1) {
                let j = i + t;
                acc += a * x[j];
                out[j] += a * x[i];
            }
            out[i] += acc;
            k += self.n - i;
        }
    }

    /// Quadratic form `x^T M x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymmetricMatrix {
        SymmetricMatrix {
            n: self.n,
            packed: self.packed.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &SymmetricMatrix, f: impl Fn(f64, f64) -> f64) -> SymmetricMatrix {
        assert_eq!(self.n, other.n);
        SymmetricMatrix {
            n: self.n,
            packed: self
                .packed
                .iter()
                .zip(&other.packed)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &SymmetricMatrix) -> SymmetricMatrix {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SymmetricMatrix) -> SymmetricMatrix {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> SymmetricMatrix {
        self.map(|a| a * s)
    }

    /// `self + s * I`.
    pub fn add_identity(mut self, s: f64) -> SymmetricMatrix {
        for i in 0..self.n {
            let k = self.index(i, i);
            self.packed[k] += s;
        }
        self
    }

    /// `self + s * E_n`.
    pub fn add_ones(mut self, s: f64) -> SymmetricMatrix {
        self.packed.iter_mut().for_each(|v| *v += s);
        self
    }

    /// `P M P^T` where row `i` of the result is row `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> SymmetricMatrix {
        assert_eq!(perm.len(), self.n);
        SymmetricMatrix::from_fn(self.n, |i, j| self.get(perm[i], perm[j]))
    }

    /// Writes the full matrix as row-major CSV preceded by
    /// `# n=<n> kind=<kind>`.
    pub fn write_csv<W: Write>(&self, mut w: W, kind: &str) -> Result<()> {
        writeln!(w, "# n={} kind={}", self.n, kind)?;
        let mut line = String::new();
        for i in 0..self.n {
            line.clear();
            for j in 0..self.n {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{:?}", self.get(i, j)));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Parses the format produced by [`SymmetricMatrix::write_csv`], returning
    /// the matrix and its `kind` tag.
    pub fn read_csv<R: BufRead>(r: R) -> Result<(SymmetricMatrix, String)> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empty matrix file".into()))??;
        let mut n = None;
        let mut kind = None;
        for tok in header.trim_start_matches('#').split_whitespace() {
            if let Some(v) = tok.strip_prefix("n=") {
                n = v.parse::<usize>().ok();
            } else if let Some(v) = tok.strip_prefix("kind=") {
                kind = Some(v.to_string());
            }
        }
        let (n, kind) = match (n, kind) {
            (Some(n), Some(k)) => (n, k),
            _ => return Err(Error::Config(format!("bad matrix header: {header}"))),
        };
        let mut rows = Vec::with_capacity(n);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Config(format!("bad matrix entry: {e}")))?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rows.len(),
            });
        }
        let dense = DenseMatrix::from_rows(&rows)?;
        Ok((SymmetricMatrix::from_dense(&dense)?, kind))
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigen-decomposition of a small dense symmetric matrix by cyclic Jacobi
/// rotations. Returns eigenvalues in descending order and the matching unit
/// eigenvectors as columns of a row-major `k x k` matrix.
pub fn symmetric_eigen(m: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let k = m.rows();
    assert_eq!(k, m.cols());
    let mut a = m.clone();
    let mut v = DenseMatrix::from_fn(k, k, |i, j| if i == j { 1.0 } else { 0.0 });
    let scale = a.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale > 0.0 {
        for _sweep in 0..100 {
            let mut off = 0.0;
            for p in 0..k {
                for q in p + 1..k {
                    off += a.get(p, q) * a.get(p, q);
                }
            }
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..k {
                for q in p + 1..k {
                    let apq = a.get(p, q);
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for r in 0..k {
                        let arp = a.get(r, p);
                        let arq = a.get(r, q);
                        a.set(r, p, c * arp - s * arq);
                        a.set(r, q, s * arp + c * arq);
                    }
                    for r in 0..k {
                        let apr = a.get(p, r);
                        let aqr = a.get(q, r);
                        a.set(p, r, c * apr - s * aqr);
                        a.set(q, r, s * apr + c * aqr);
                    }
                    for r in 0..k {
                        let vrp = v.get(r, p);
                        let vrq = v.get(r, q);
                        v.set(r, p, c * vrp - s * vrq);
                        v.set(r, q, s * vrp + c * vrq);
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| a.get(y, y).total_cmp(&a.get(x, x)));
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = DenseMatrix::from_fn(k, k, |r, c| v.get(r, order[c]));
    (values, vectors)
}

/// Outcome of power iteration on a shifted symmetric operator.
#[derive(Debug, Clone)]
pub(crate) struct PowerOutcome {
    /// Rayleigh quotient of the unshifted operator.
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `||S v - value v||_2`.
    pub residual: f64,
}

/// Stopping rules for [`shifted_power`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct PowerConfig {
    /// Added to the operator so that its top eigenvalue dominates in modulus.
    pub shift: f64,
    /// Converged once `residual <= tol_rel * |rho| + tol_floor`.
    pub tol_rel: f64,
    pub tol_floor: f64,
    pub max_iter: usize,
    /// Accept a stalled Rayleigh quotient as converged. Appropriate when only
    /// the eigenvalue is needed; a near-multiple top eigenvalue then still
    /// yields an accurate value.
    pub accept_stall: bool,
    /// Relative change of the Rayleigh quotient over the stall window below
    /// which it counts as stalled.
    pub stall_rel: f64,
}

const STALL_WINDOW: usize = 50;

/// Power iteration on `S + shift * I` where `apply` computes `S x`.
///
/// On hitting `max_iter` reports [`Error::DegenerateSpectrum`] when the
/// Rayleigh quotient has stalled with a large residual (a near-multiple top
/// eigenvalue) and [`Error::NonConvergence`] otherwise.
pub(crate) fn shifted_power<F>(mut apply: F, start: Vec<f64>, cfg: PowerConfig) -> Result<PowerOutcome>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = start.len();
    let mut v = start;
    let nv = norm2(&v);
    if nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    v.iter_mut().for_each(|x| *x /= nv);
    let mut w = vec![0.0; n];
    let mut history: Vec<f64> = Vec::new();
    let mut residual = f64::INFINITY;
    let stalled = |h: &[f64]| {
        h.len() > STALL_WINDOW && {
            let last = h[h.len() - 1];
            let earlier = h[h.len() - 1 - STALL_WINDOW];
            (last - earlier).abs() <= cfg.stall_rel * (last.abs() + cfg.shift.abs()).max(f64::MIN_POSITIVE)
        }
    };
    for it in 0..=cfg.max_iter {
        apply(&v, &mut w);
        let rho = dot(&v, &w);
        residual = w
            .iter()
            .zip(&v)
            .map(|(wi, vi)| (wi - rho * vi).powi(2))
            .sum::<f64>()
            .sqrt();
        history.push(rho);
        if residual <= cfg.tol_rel * rho.abs() + cfg.tol_floor || (cfg.accept_stall && stalled(&history)) {
            return Ok(PowerOutcome {
                value: rho,
                vector: v,
                iterations: it,
                residual,
            });
        }
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += cfg.shift * vi;
        }
        let nw = norm2(&w);
        if nw == 0.0 {
            return Err(Error::ZeroVector);
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / nw;
        }
    }
    if stalled(&history) {
        Err(Error::DegenerateSpectrum)
    } else {
        Err(Error::NonConvergence {
            iterations: cfg.max_iter,
            residual,
        })
    }
}

/// Deterministic start vector `(1, 1/2, 1/3, ...)` normalized.
pub(crate) fn harmonic_start(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 / (i as f64 + 1.0)).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_indexing_round_trips() {
        let n = 5;
        let m = SymmetricMatrix::from_fn(n, |i, j| (10 * i + j) as f64);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                assert_eq!(m.get(i, j), (10 * a + b) as f64);
            }
        }
    }

    #[test]
    fn grand_sum_and_inner_match_dense() {
        let m = SymmetricMatrix::from_fn(4, |i, j| (i as f64) - 0.5 * j as f64 + 0.1);
        let d = m.to_dense();
        let g: f64 = d.as_slice().iter().sum();
        assert!((m.grand_sum() - g).abs() < 1e-12);
        let ip: f64 = d.as_slice().iter().map(|x| x * x).sum();
        assert!((m.inner(&m) - ip).abs() < 1e-12);
        let l1: f64 = d.as_slice().iter().map(|x| x.abs()).sum();
        assert!((m.l1_norm() - l1).abs() < 1e-12);
    }

    #[test]
    fn mul_vec_matches_dense() {
        let m = SymmetricMatrix::from_fn(6, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0);
        let x: Vec<f64> = (0..6).map(|i| (i as f64).sin()).collect();
        let d = m.to_dense();
        let want = d.mul_vec(&x);
        let got = m.mul_vec(&x);
        for (a, b) in want.iter().zip(&got) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobi_diagonalizes() {
        let m = DenseMatrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 2.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ])
        .unwrap();
        let (vals, vecs) = symmetric_eigen(&m);
        let s2 = 2f64.sqrt();
        assert!((vals[0] - (2.0 + s2)).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
        assert!((vals[2] - (2.0 - s2)).abs() < 1e-12);
        for c in 0..3 {
            let col: Vec<f64> = (0..3).map(|r| vecs.get(r, c)).collect();
            let mv = m.mul_vec(&col);
            for r in 0..3 {
                assert!((mv[r] - vals[c] * col[r]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let m = SymmetricMatrix::from_fn(3, |i, j| 0.1 * (i + 2 * j) as f64 - 0.37);
        let mut buf = Vec::new();
        m.write_csv(&mut buf, "A").unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# n=3 kind=A\n"));
        let (back, kind) = SymmetricMatrix::read_csv(&buf[..]).unwrap();
        assert_eq!(kind, "A");
        assert_eq!(back, m);
    }
}
