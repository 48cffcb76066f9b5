//! Spectral path: leading eigenvector by shifted power iteration, the
//! sorted-split k-means step over that eigenvector, the plain sign split,
//! and the reference eigenvector of `R`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix, SymmetricMatrix};
use crate::mixture::MixtureSpec;
use crate::partition::Partition;
use crate::sdp::round_signs;

pub const DEFAULT_EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub value: f64,
    /// Unit-norm eigenvector.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `||S v - value v||_2`.
    pub residual: f64,
}

/// Top (algebraically largest) eigenpair of `s`.
///
/// Runs power iteration on `S + c I`, where `c = max(0, -g)` and `g` is the
/// Gershgorin lower bound on the spectrum, so the shifted operator is
/// positive semidefinite. `c <= max_i sum_j |S_ij|` always, and `c = 0` for
/// diagonally dominant matrices such as most Gram matrices, which keeps the
/// convergence ratio at `lambda_2 / lambda_1`. Stops once
/// `residual <= tol * |value|`; gives up after `10 n + 1000` iterations.
pub fn top_eigen(s: &SymmetricMatrix, tol: f64) -> Result<EigenResult> {
    let n = s.order();
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    let shift = (-s.gershgorin_lower()).max(0.0);
    let out = linalg::shifted_power(
        |x, y| s.mul_vec_into(x, y),
        linalg::harmonic_start(n),
        linalg::PowerConfig {
            shift,
            tol_rel: tol,
            tol_floor: 1e-14 * s.max_row_abs_sum(),
            max_iter: 10 * n + 1000,
            accept_stall: false,
            stall_rel: 1e-13,
        },
    )?;
    Ok(EigenResult {
        value: out.value,
        vector: out.vector,
        iterations: out.iterations,
        residual: out.residual,
    })
}

/// `v1_bar = [w2 1_{n1}, -w1 1_{n2}] / sqrt(w1 w2 n)`, the leading unit
/// eigenvector of `R`.
pub fn reference_v1(spec: &MixtureSpec) -> Vec<f64> {
    let (n1, _) = spec.cluster_sizes();
    let (w1, w2) = spec.weights();
    let norm = (w1 * w2 * spec.n as f64).sqrt();
    (0..spec.n)
        .map(|i| if i < n1 { w2 / norm } else { -w1 / norm })
        .collect()
}

/// Result of the sorted-split search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    pub partition: Partition,
    /// Size of the `+1` group in the winning split (0 when `v` is constant).
    pub split: usize,
    /// Within-group sum of squared distances of the winning split.
    pub cost: f64,
    /// Threshold value `S_t`.
    pub threshold: f64,
}

/// Two-group k-means restricted to contiguous splits of `v` sorted in
/// descending order.
///
/// Candidate splits sit between distinct consecutive values of the sorted
/// vector, so the returned labels (`+1` iff `v_i >= S_t`) are exactly the
/// evaluated split. The smallest split index wins among equal costs.
pub fn peng_wei_split(v: &[f64], y: &DenseMatrix) -> Result<SplitResult> {
    let n = v.len();
    if y.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.rows(),
        });
    }
    if n == 0 || linalg::norm2(v) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let p = y.cols();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));

    let mut total = vec![0.0; p];
    let mut total_sq = 0.0;
    for i in 0..n {
        linalg::axpy(1.0, y.row(i), &mut total);
        total_sq += linalg::dot(y.row(i), y.row(i));
    }
    let tie_tol = 1e-12 * total_sq.max(f64::MIN_POSITIVE);

    let mut left = vec![0.0; p];
    let mut best: Option<(usize, f64)> = None;
    for t in 1..n {
        linalg::axpy(1.0, y.row(order[t - 1]), &mut left);
        if v[order[t - 1]] <= v[order[t]] {
            continue;
        }
        let right_sq: f64 = left
            .iter()
            .zip(&total)
            .map(|(l, tot)| (tot - l) * (tot - l))
            .sum();
        let left_sq = linalg::dot(&left, &left);
        let cost = (total_sq - left_sq / t as f64 - right_sq / (n - t) as f64).max(0.0);
        match best {
            Some((_, c)) if cost >= c - tie_tol => {}
            _ => best = Some((t, cost)),
        }
    }

    Ok(match best {
        Some((t, cost)) => {
            let threshold = v[order[t - 1]];
            SplitResult {
                partition: Partition::from_labels(v.iter().map(|&x| if x >= threshold { 1 } else { -1 })),
                split: t,
                cost,
                threshold,
            }
        }
        None => SplitResult {
            partition: Partition::from_labels(std::iter::repeat_n(1, n)),
            split: 0,
            cost: (total_sq - linalg::dot(&total, &total) / n as f64).max(0.0),
            threshold: v[order[n - 1]],
        },
    })
}

/// Sign split of an eigenvector; zeros map to `+1`.
pub fn sign_split(v: &[f64]) -> Partition {
    round_signs(v)
}

/// `Z1 = (I - P1) Z (I - P1)` for `Z` with `Z 1 = 1`, which reduces to
/// `Z - E_n / n`.
pub fn z1_projector(z: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let n = z.order();
    let ones = vec![1.0; n];
    let z1 = z.mul_vec(&ones);
    if z1.iter().any(|&s| (s - 1.0).abs() > 1e-8) {
        return Err(Error::Infeasible("Z 1_n must equal 1_n".into()));
    }
    Ok(z.clone().add_ones(-1.0 / n as f64))
}
