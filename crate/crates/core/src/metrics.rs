//! Evaluation quantities: success rate, angles, sign-aligned distances and
//! the distances between `Z_hat` and `x_bar x_bar^T`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, DenseMatrix};
use crate::partition::Partition;
use crate::sdp::SdpSolution;

/// Per-trial evaluation summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub success_rate: f64,
    pub theta_sdp: f64,
    pub theta_1: f64,
    pub phi: f64,
    pub sin_theta_sdp: f64,
    pub sin_theta_1: f64,
    pub z_l1: f64,
    pub z_frob: f64,
    pub z_op: f64,
    pub aligned_l2: f64,
    pub snr: f64,
    pub np_gamma_sq: f64,
}

/// Fraction of correctly labelled samples, maximized over a global label
/// swap: `max(m, n - m) / n` where `m` counts agreements.
pub fn success_rate(pred: &Partition, truth: &Partition) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    let n = truth.len();
    if n == 0 {
        return Err(Error::ZeroVector);
    }
    let m = pred
        .labels()
        .iter()
        .zip(truth.labels())
        .filter(|(a, b)| a == b)
        .count();
    Ok(m.max(n - m) as f64 / n as f64)
}

fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    let nu = linalg::norm2(u);
    let nv = linalg::norm2(v);
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// `(||u/|u| - v/|v|||, ||u/|u| + v/|v|||)`.
fn chord_lengths(u: &[f64], v: &[f64]) -> Result<(f64, f64)> {
    cosine(u, v)?;
    let nu = linalg::norm2(u);
    let nv = linalg::norm2(v);
    let (mut minus, mut plus) = (0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        let (a, b) = (a / nu, b / nv);
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
    }
    Ok((minus.sqrt(), plus.sqrt()))
}

/// Angle between `u` and `v` in degrees, in `[0, 180]`. Computed from the
/// chord `2 asin(||u_hat - v_hat|| / 2)`, which stays accurate near 0.
pub fn angle_deg(u: &[f64], v: &[f64]) -> Result<f64> {
    let (minus, _) = chord_lengths(u, v)?;
    Ok((2.0 * (minus / 2.0).min(1.0).asin()).to_degrees())
}

/// Angle between the lines spanned by `u` and `v`, in `[0, 90]`. Used for
/// eigenvectors, whose sign is arbitrary.
pub fn axis_angle_deg(u: &[f64], v: &[f64]) -> Result<f64> {
    let (minus, plus) = chord_lengths(u, v)?;
    Ok((2.0 * (minus.min(plus) / 2.0).min(1.0).asin()).to_degrees())
}

/// `min over alpha in {-1, 1} of ||alpha u - v||_2`.
pub fn aligned_l2(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    let plus: f64 = u.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum();
    let minus: f64 = u.iter().zip(v).map(|(a, b)| (a + b).powi(2)).sum();
    Ok(plus.min(minus).sqrt())
}

/// Normalized distances between `Z_hat` and `Z* = x_bar x_bar^T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZDistances {
    /// `||Z_hat - Z*||_1 / n^2`.
    pub l1: f64,
    /// `||Z_hat - Z*||_F / n`.
    pub frob: f64,
    /// `||Z_hat - Z*||_2 / n`.
    pub op: f64,
}

/// Entries of `Z_hat` are streamed from the factor; nothing `n x n` is
/// stored.
pub fn z_distances(sol: &SdpSolution, truth: &Partition) -> Result<ZDistances> {
    z_distances_from_factor(&sol.factor, truth)
}

pub fn z_distances_from_factor(factor: &DenseMatrix, truth: &Partition) -> Result<ZDistances> {
    let n = factor.rows();
    if truth.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: truth.len(),
        });
    }
    let x = truth.to_f64();
    let per_row: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let vi = factor.row(i);
            let mut l1 = 0.0;
            let mut sq = 0.0;
            for j in 0..n {
                let d = dot(vi, factor.row(j)) - x[i] * x[j];
                l1 += d.abs();
                sq += d * d;
            }
            (l1, sq)
        })
        .collect();
    let (l1, sq) = per_row
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let nf = n as f64;
    Ok(ZDistances {
        l1: l1 / (nf * nf),
        frob: sq.sqrt() / nf,
        op: low_rank_difference_norm(factor, &x) / nf,
    })
}

/// `||V V^T - x x^T||_2` via the `(r+1) x (r+1)` pencil: with `G = [V, x]`
/// and `J = diag(1, .., 1, -1)`, the nonzero eigenvalues of `G J G^T` are
/// those of `S^{1/2} J S^{1/2}` where `S = G^T G`.
fn low_rank_difference_norm(factor: &DenseMatrix, x: &[f64]) -> f64 {
    let n = factor.rows();
    let r = factor.cols();
    let k = r + 1;
    let mut s = DenseMatrix::zeros(k, k);
    let mut g = vec![0.0; k];
    for i in 0..n {
        g[..r].copy_from_slice(factor.row(i));
        g[r] = x[i];
        for a in 0..k {
            let ga = g[a];
            if ga != 0.0 {
                linalg::axpy(ga, &g, s.row_mut(a));
            }
        }
    }
    let (vals, vecs) = linalg::symmetric_eigen(&s);
    // S^{1/2} = Q diag(sqrt(max(d, 0))) Q^T
    let root = DenseMatrix::from_fn(k, k, |a, b| {
        (0..k)
            .map(|c| vecs.get(a, c) * vals[c].max(0.0).sqrt() * vecs.get(b, c))
            .sum()
    });
    let mut jr = root.clone();
    for b in 0..k {
        let v = -jr.get(r, b);
        jr.set(r, b, v);
    }
    let mut kmat = root.matmul(&jr).expect("square");
    // symmetrize roundoff
    for a in 0..k {
        for b in a + 1..k {
            let m = 0.5 * (kmat.get(a, b) + kmat.get(b, a));
            kmat.set(a, b, m);
            kmat.set(b, a, m);
        }
    }
    let (ev, _) = linalg::symmetric_eigen(&kmat);
    ev.into_iter().fold(0.0, |m, e| m.max(e.abs()))
}
