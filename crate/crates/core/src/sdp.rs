//! Elliptope SDP: maximize `<A, Z>` over `Z >= 0` with unit diagonal.
//!
//! `Z` is represented as `V V^T` with unit-norm rows (Burer-Monteiro), and
//! `V` is improved by Riemannian gradient ascent on the product of spheres
//! with an Armijo backtracking line search and row renormalization as the
//! retraction. Every iterate is feasible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, axpy, dot, DenseMatrix, SymmetricMatrix};
use crate::partition::Partition;
use crate::preprocessing::CenteredData;

const ARMIJO: f64 = 1e-4;
const STABLE_ITERS: usize = 5;
const MAX_RANK: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Factor width; `None` picks `ceil(sqrt(2n)) + 1`, capped at 32.
    pub rank: Option<usize>,
    /// Relative objective change below which an iteration counts as stable.
    pub tol: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rank: None,
            tol: 1e-7,
            max_iters: 2000,
            restarts: 3,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.rank {
            if r < 2 {
                return Err(Error::InvalidOptions(format!("rank must be >= 2, got {r}")));
            }
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidOptions(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidOptions("max_iters must be >= 1".into()));
        }
        if self.restarts < 1 {
            return Err(Error::InvalidOptions("restarts must be >= 1".into()));
        }
        Ok(())
    }

    pub fn effective_rank(&self, n: usize) -> usize {
        self.rank.unwrap_or_else(|| default_rank(n))
    }
}

/// `ceil(sqrt(2n)) + 1`, capped at 32 and never below 2.
pub fn default_rank(n: usize) -> usize {
    let r = (2.0 * n as f64).sqrt().ceil() as usize + 1;
    r.clamp(2, MAX_RANK)
}

/// Solver output. `Z_hat = factor * factor^T` is never formed explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution {
    pub factor: DenseMatrix,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Leading eigenvector of `Z_hat`, scaled to norm `sqrt(n)`.
    pub xhat: Vec<f64>,
    /// Objective after each accepted step of the winning restart.
    pub history: Vec<f64>,
}

impl SdpSolution {
    pub fn n(&self) -> usize {
        self.factor.rows()
    }

    /// `Z_hat[i][j]`.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        dot(self.factor.row(i), self.factor.row(j))
    }

    /// Dense `Z_hat`; intended for small `n`.
    pub fn z_matrix(&self) -> SymmetricMatrix {
        self.factor.gram()
    }
}

/// `Y Y^T - lambda E_n`. Over the elliptope this differs from `A` by the
/// constant `lambda * n`, so it has the same maximizers.
pub fn sdp2_matrix(cd: &CenteredData) -> SymmetricMatrix {
    cd.gram.clone().add_ones(-cd.lambda)
}

/// Maximizes `<A, V V^T>` over unit-row `V`; returns the best of
/// `opts.restarts` runs (first run wins ties).
pub fn solve(a: &SymmetricMatrix, opts: &SolverOptions) -> Result<SdpSolution> {
    opts.validate()?;
    let n = a.order();
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    if !a.is_finite() {
        return Err(Error::Infeasible("objective matrix has non-finite entries".into()));
    }
    let r = opts.effective_rank(n);
    let dense = a.to_dense();
    let bound = a.max_row_abs_sum();

    let runs: Vec<RunResult> = (0..opts.restarts)
        .into_par_iter()
        .map(|k| {
            let v0 = random_factor(n, r, opts.seed, k as u64);
            ascend(&dense, bound, v0, opts)
        })
        .collect();

    let mut best = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.objective > runs[best].objective {
            best = k;
        }
    }
    let run = runs.into_iter().nth(best).expect("at least one restart");
    let xhat = top_direction(&run.factor).0;
    Ok(SdpSolution {
        factor: run.factor,
        objective: run.objective,
        iterations: run.iterations,
        converged: run.converged,
        xhat,
        history: run.history,
    })
}

/// Leading eigenvector of `Z_hat`, from the `r x r` matrix `V^T V`, scaled to
/// norm `sqrt(n)` with its first nonzero coordinate positive.
pub fn leading_eigvec(sol: &SdpSolution) -> Result<Vec<f64>> {
    if sol.factor.max_abs() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let (x, gap_ok) = top_direction(&sol.factor);
    if !gap_ok {
        return Err(Error::DegenerateSpectrum);
    }
    Ok(x)
}

/// Componentwise sign, zeros map to `+1`.
pub fn round_signs(x: &[f64]) -> Partition {
    Partition::from_labels(x.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }))
}

fn top_direction(v: &DenseMatrix) -> (Vec<f64>, bool) {
    let n = v.rows();
    let r = v.cols();
    let mut vtv = DenseMatrix::zeros(r, r);
    for i in 0..n {
        let row = v.row(i);
        for a in 0..r {
            let ra = row[a];
            if ra == 0.0 {
                continue;
            }
            axpy(ra, row, vtv.row_mut(a));
        }
    }
    let (vals, vecs) = linalg::symmetric_eigen(&vtv);
    let gap_ok = r < 2 || vals[0] - vals[1] >= 1e-12 * vals[0].abs();
    let u: Vec<f64> = (0..r).map(|k| vecs.get(k, 0)).collect();
    let mut x = v.mul_vec(&u);
    let nx = linalg::norm2(&x);
    if nx > 0.0 {
        let s = (n as f64).sqrt() / nx;
        x.iter_mut().for_each(|e| *e *= s);
    }
    if let Some(first) = x.iter().find(|e| **e != 0.0) {
        if *first < 0.0 {
            x.iter_mut().for_each(|e| *e = -*e);
        }
    }
    (x, gap_ok)
}

struct RunResult {
    factor: DenseMatrix,
    objective: f64,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
}

fn random_factor(n: usize, r: usize, seed: u64, stream: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut v = DenseMatrix::zeros(n, r);
    for i in 0..n {
        let row = v.row_mut(i);
        loop {
            row.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
            if normalize(row) {
                break;
            }
        }
    }
    v
}

fn normalize(row: &mut [f64]) -> bool {
    let nr = linalg::norm2(row);
    if nr > 0.0 && nr.is_finite() {
        row.iter_mut().for_each(|x| *x /= nr);
        true
    } else {
        false
    }
}

/// `A V` for row-major dense `A`.
fn mul_factor(a: &DenseMatrix, v: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    let r = v.cols();
    let mut out = DenseMatrix::zeros(n, r);
    out.as_mut_slice()
        .par_chunks_mut(r.max(1))
        .enumerate()
        .for_each(|(i, orow)| {
            for (j, &aij) in a.row(i).iter().enumerate() {
                if aij != 0.0 {
                    axpy(aij, v.row(j), orow);
                }
            }
        });
    out
}

fn frob_inner(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    dot(a.as_slice(), b.as_slice())
}

fn ascend(a: &DenseMatrix, bound: f64, mut v: DenseMatrix, opts: &SolverOptions) -> RunResult {
    let n = v.rows();
    let r = v.cols();
    if bound == 0.0 {
        return RunResult {
            factor: v,
            objective: 0.0,
            iterations: 0,
            converged: true,
            history: vec![0.0],
        };
    }
    let mut g = mul_factor(a, &v);
    let mut f = frob_inner(&v, &g);
    let mut history = vec![f];
    let mut step = 1.0 / bound;
    let mut stable = 0;
    let mut rgrad = DenseMatrix::zeros(n, r);
    let mut trial = DenseMatrix::zeros(n, r);

    for it in 1..=opts.max_iters {
        // Riemannian gradient: 2 (G_i - <G_i, V_i> V_i) per row.
        let mut gnorm2 = 0.0;
        for i in 0..n {
            let vi = v.row(i);
            let gi = g.row(i);
            let c = dot(gi, vi);
            let out = rgrad.row_mut(i);
            for k in 0..r {
                out[k] = 2.0 * (gi[k] - c * vi[k]);
            }
            gnorm2 += dot(out, out);
        }
        if gnorm2 <= 1e-30 * (1.0 + f.abs()).powi(2) {
            return RunResult {
                factor: v,
                objective: f,
                iterations: it - 1,
                converged: true,
                history,
            };
        }

        let retract = |t: f64, out: &mut DenseMatrix| {
            for i in 0..n {
                let row = out.row_mut(i);
                row.copy_from_slice(v.row(i));
                axpy(t, rgrad.row(i), row);
                if !normalize(row) {
                    row.copy_from_slice(v.row(i));
                }
            }
            let g_out = mul_factor(a, out);
            let f_out = frob_inner(out, &g_out);
            (g_out, f_out)
        };
        let mut t = step * 2.0;
        let accepted = loop {
            let (g_new, f_new) = retract(t, &mut trial);
            if f_new >= f + ARMIJO * t * gnorm2 {
                break Some((g_new, f_new));
            }
            t *= 0.5;
            if t < 1e-30 * step.max(1.0 / bound) {
                break None;
            }
        };
        // Armijo alone happily accepts steps that overshoot the maximizer
        // along the geodesic; keep halving while that still gains.
        let accepted = accepted.map(|(mut g_new, mut f_new)| {
            let mut half = DenseMatrix::zeros(n, r);
            loop {
                let (g_half, f_half) = retract(0.5 * t, &mut half);
                if f_half <= f_new {
                    break;
                }
                t *= 0.5;
                std::mem::swap(&mut trial, &mut half);
                g_new = g_half;
                f_new = f_half;
            }
            (g_new, f_new)
        });
        let Some((g_new, f_new)) = accepted else {
            // No ascent direction left at working precision.
            return RunResult {
                factor: v,
                objective: f,
                iterations: it,
                converged: true,
                history,
            };
        };
        std::mem::swap(&mut v, &mut trial);
        g = g_new;
        let change = (f_new - f).abs() / f_new.abs().max(f64::MIN_POSITIVE);
        f = f_new;
        history.push(f);
        step = t;
        if change < opts.tol {
            stable += 1;
            if stable >= STABLE_ITERS {
                return RunResult {
                    factor: v,
                    objective: f,
                    iterations: it,
                    converged: true,
                    history,
                };
            }
        } else {
            stable = 0;
        }
    }
    RunResult {
        factor: v,
        objective: f,
        iterations: opts.max_iters,
        converged: false,
        history,
    }
}
