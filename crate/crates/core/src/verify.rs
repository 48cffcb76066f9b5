//! Exact small-n oracles and empirical checks: operator and `inf -> 1`
//! norms, the Grothendieck ratio, exhaustive max-cut, the curvature
//! inequality of the reference objective, the optimality sandwich and
//! Monte-Carlo concentration envelopes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix, SymmetricMatrix};
use crate::metrics;
use crate::mixture::{sample, MixtureSpec};
use crate::partition::Partition;
use crate::preprocessing::{build_a, center, expected_gram, oracle_b, reference_r};
use crate::sdp::{self, SolverOptions};
use crate::seeding::derive_seed;

/// Upper bound on Grothendieck's constant, `pi / (2 ln(1 + sqrt 2)) <= 1.783`.
pub const GROTHENDIECK_BOUND: f64 = 1.783;

/// Largest order accepted by the exhaustive routines.
pub const ENUMERATION_LIMIT: usize = 22;

/// Largest `n` accepted by [`sandwich_check`].
pub const SANDWICH_LIMIT: usize = 20;

fn check_enumerable(n: usize) -> Result<()> {
    check_within(n, ENUMERATION_LIMIT)
}

fn check_within(n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(Error::TooLargeForEnumeration { n, max })
    } else {
        Ok(())
    }
}

/// Largest order for which [`op_norm`] uses the dense Jacobi eigensolver.
pub const DENSE_EIGEN_LIMIT: usize = 256;

/// `||M||_2 = max |lambda|`.
///
/// Up to [`DENSE_EIGEN_LIMIT`] this is read off a full Jacobi
/// diagonalization, so clustered top eigenvalues cost nothing extra. Larger
/// matrices use power iteration on `M^2`, which is positive semidefinite and
/// covers the extreme eigenvalues of both signs in one run; it stops once
/// the residual drops below `sqrt(tol)` relative or the Rayleigh quotient
/// changes by less than `tol` relative over 50 iterations.
pub fn op_norm(m: &SymmetricMatrix, tol: f64) -> Result<f64> {
    let n = m.order();
    if n == 0 || m.max_abs() == 0.0 {
        return Ok(0.0);
    }
    if n <= DENSE_EIGEN_LIMIT {
        let (vals, _) = linalg::symmetric_eigen(&m.to_dense());
        return Ok(vals.iter().fold(0.0, |a: f64, v| a.max(v.abs())));
    }
    let mut tmp = vec![0.0; n];
    let out = linalg::shifted_power(
        |x, y| {
            m.mul_vec_into(x, &mut tmp);
            m.mul_vec_into(&tmp, y);
        },
        linalg::harmonic_start(n),
        linalg::PowerConfig {
            shift: 0.0,
            tol_rel: tol.sqrt(),
            tol_floor: 0.0,
            max_iter: 10 * n + 1000,
            accept_stall: true,
            stall_rel: tol,
        },
    )?;
    Ok(out.value.max(0.0).sqrt())
}

/// `max over s in {-1, 1}^cols of ||M s||_1`, by Gray-code enumeration.
pub fn inf_to_one_exact(m: &DenseMatrix) -> Result<f64> {
    let (rows, cols) = (m.rows(), m.cols());
    check_enumerable(cols)?;
    if cols == 0 {
        return Ok(0.0);
    }
    let column = |k: usize| -> Vec<f64> { (0..rows).map(|i| m.get(i, k)).collect() };
    let columns: Vec<Vec<f64>> = (0..cols).map(column).collect();
    let fresh = |s: &[f64]| m.mul_vec(s);

    // ||M s||_1 = ||M (-s)||_1, so the last sign stays +1.
    let mut s = vec![1.0; cols];
    let mut ms = fresh(&s);
    let l1 = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>();
    let mut best = l1(&ms);
    let mut best_s = s.clone();
    let count: u64 = 1 << (cols - 1);
    for g in 1..count {
        let k = g.trailing_zeros() as usize;
        linalg::axpy(-2.0 * s[k], &columns[k], &mut ms);
        s[k] = -s[k];
        if g % 1024 == 0 {
            ms = fresh(&s);
        }
        let val = l1(&ms);
        if val > best {
            best = val;
            best_s.copy_from_slice(&s);
        }
    }
    Ok(l1(&fresh(&best_s)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    ExactEnum,
    PowerIter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub op_norm: f64,
    /// Exact for `ExactEnum`; for `PowerIter` the lower bound
    /// `||M sign(v1)||_1` from the leading eigenvector.
    pub inf_to_one: f64,
    /// `inf_to_one / 4`, a lower bound on the cut norm.
    pub cut_norm_lb: f64,
    pub method: NormMethod,
}

pub fn norm_report(m: &SymmetricMatrix, tol: f64) -> Result<NormReport> {
    let op = op_norm(m, tol)?;
    let (inf_to_one, method) = if m.order() <= ENUMERATION_LIMIT {
        (inf_to_one_exact(&m.to_dense())?, NormMethod::ExactEnum)
    } else {
        let mut best = 0.0f64;
        for s in [m.clone(), m.scale(-1.0)] {
            let v = crate::spectral::top_eigen(&s, 1e-8)?.vector;
            let signs = sdp::round_signs(&v).to_f64();
            best = best.max(m.mul_vec(&signs).iter().map(|x| x.abs()).sum());
        }
        (best, NormMethod::PowerIter)
    };
    Ok(NormReport {
        op_norm: op,
        inf_to_one,
        cut_norm_lb: inf_to_one / 4.0,
        method,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrothendieckReport {
    /// `max(|<M, Z>|)` over the elliptope, as found by the solver.
    pub sdp_value: f64,
    pub inf_to_one: f64,
    pub ratio: f64,
    pub holds: bool,
}

/// Compares the elliptope value of `M` with its exact `inf -> 1` norm.
pub fn grothendieck_check(m: &SymmetricMatrix, opts: &SolverOptions) -> Result<GrothendieckReport> {
    check_enumerable(m.order())?;
    let up = sdp::solve(m, opts)?.objective;
    let down = sdp::solve(&m.scale(-1.0), opts)?.objective;
    let sdp_value = up.max(down);
    let inf_to_one = inf_to_one_exact(&m.to_dense())?;
    let ratio = if inf_to_one > 0.0 {
        sdp_value / inf_to_one
    } else {
        0.0
    };
    Ok(GrothendieckReport {
        sdp_value,
        inf_to_one,
        ratio,
        holds: ratio <= GROTHENDIECK_BOUND + 1e-6,
    })
}

/// Exhaustive `max x^T A x` over `x in {-1, 1}^n`. Among (numerically)
/// equal values the lexicographically first `x` wins, with `+1` ordered
/// before `-1`.
pub fn brute_force_maxcut(a: &SymmetricMatrix) -> Result<(Partition, f64)> {
    let n = a.order();
    check_enumerable(n)?;
    if n == 0 {
        return Ok((Partition::from_labels([]), 0.0));
    }
    let dense = a.to_dense();
    let scale = a.l1_norm().max(f64::MIN_POSITIVE);
    let tie = 1e-10 * scale;

    // x and -x have equal value; fixing x_0 = +1 keeps the lexicographically
    // first representative. `code` has bit (n-1-k) set iff x_k = -1.
    let mut x = vec![1.0; n];
    let mut ax = dense.mul_vec(&x);
    let mut val = linalg::dot(&x, &ax);
    let mut code: u64 = 0;
    let mut best = (val, code, x.clone());
    let count: u64 = 1 << (n - 1);
    for g in 1..count {
        // flip coordinates n-1, n-2, .., 1 in Gray-code order
        let k = n - 1 - g.trailing_zeros() as usize;
        let xk = x[k];
        val -= 4.0 * xk * (ax[k] - dense.get(k, k) * xk);
        linalg::axpy(-2.0 * xk, dense.row(k), &mut ax);
        x[k] = -xk;
        code ^= 1 << (n - 1 - k);
        if g % 1024 == 0 {
            ax = dense.mul_vec(&x);
            val = linalg::dot(&x, &ax);
        }
        if val > best.0 + tie || (val >= best.0 - tie && code < best.1) {
            best = (val, code, x.clone());
        }
    }
    let xb = best.2;
    let exact = a.quad_form(&xb);
    Ok((sdp::round_signs(&xb), exact))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    /// `<R, Z* - Z>`.
    pub lhs: f64,
    /// `p gamma w_min^2 ||Z - Z*||_1`.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `<R, Z* - Z> >= p gamma w_min^2 ||Z - Z*||_1` for `Z` in the box
/// `[-1, 1]^{n x n}`, with `Z* = x_bar x_bar^T`.
pub fn curvature_check(spec: &MixtureSpec, z: &SymmetricMatrix) -> Result<CurvatureReport> {
    let n = spec.n;
    if z.order() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.order(),
        });
    }
    if z.max_abs() > 1.0 + 1e-9 {
        return Err(Error::Infeasible("Z entries must lie in [-1, 1]".into()));
    }
    let r = reference_r(spec);
    let zstar = SymmetricMatrix::outer(&spec.membership().to_f64());
    let pg = spec.separation().delta_sq;
    let lhs = r.inner(&zstar) - r.inner(z);
    let rhs = pg * spec.w_min().powi(2) * z.sub(&zstar).l1_norm();
    let nf = n as f64;
    Ok(CurvatureReport {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-9 * nf * nf * pg,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub trials: usize,
    /// `||Y Y^T - E Y Y^T||_2` statistics.
    pub max_dev: f64,
    pub mean_dev: f64,
    /// `max_dev / ((sqrt(pn) v n) + n sqrt(p gamma))`.
    pub c_hat: f64,
    /// `||B - R||_2` statistics.
    pub max_bias_dev: f64,
    pub mean_bias_dev: f64,
    /// `max ||B - R||_2 / (n p gamma)`; NaN when `gamma = 0`.
    pub xi_hat: f64,
}

/// Samples `trials` datasets and measures the deviation of the Gram matrix
/// from its analytic mean, plus that of `B` from `R`.
pub fn deviation_envelope(spec: &MixtureSpec, trials: usize, seed: u64) -> Result<EnvelopeReport> {
    if trials < 30 {
        return Err(Error::InvalidOptions(format!(
            "deviation envelope needs at least 30 trials, got {trials}"
        )));
    }
    let egram = expected_gram(spec);
    let r = reference_r(spec);
    let devs: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64)> {
            let ds = sample(spec, derive_seed(seed, &[t as u64]))?;
            let cd = center(&ds.x)?;
            let dev = op_norm(&cd.gram.sub(&egram), 1e-10)?;
            let bias = op_norm(&oracle_b(&cd, spec)?.sub(&r), 1e-10)?;
            Ok((dev, bias))
        })
        .collect::<Result<_>>()?;
    let (n, p) = (spec.n as f64, spec.p as f64);
    let pg = spec.separation().delta_sq;
    let scale = (p * n).sqrt().max(n) + n * pg.sqrt();
    let max_dev = devs.iter().map(|d| d.0).fold(0.0, f64::max);
    let max_bias_dev = devs.iter().map(|d| d.1).fold(0.0, f64::max);
    let tf = trials as f64;
    Ok(EnvelopeReport {
        trials,
        max_dev,
        mean_dev: devs.iter().map(|d| d.0).sum::<f64>() / tf,
        c_hat: max_dev / scale,
        max_bias_dev,
        mean_bias_dev: devs.iter().map(|d| d.1).sum::<f64>() / tf,
        xi_hat: if pg > 0.0 { max_bias_dev / (n * pg) } else { f64::NAN },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    /// `<R, Z*> - <R, Z_hat>`.
    pub gap: f64,
    /// `2 K_G ||B - R||_{inf -> 1}`.
    pub gap_bound: f64,
    /// `||Z_hat - Z*||_1 / n^2`.
    pub delta: f64,
    /// `gap / (n^2 p gamma w_min^2)`.
    pub delta_curvature_bound: f64,
    /// `2 K_G ||B - R||_{inf -> 1} / (n^2 p gamma w_min^2)`.
    pub delta_bound: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub delta_holds: bool,
    pub success_rate: f64,
    pub converged: bool,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds && self.delta_holds
    }
}

/// One pipeline run at small `n` checked against
/// `0 <= <R, Z* - Z_hat> <= 2 K_G ||B - R||_{inf -> 1}` and the resulting
/// bound on `delta`.
pub fn sandwich_check(spec: &MixtureSpec, seed: u64, opts: &SolverOptions) -> Result<SandwichReport> {
    check_within(spec.n, SANDWICH_LIMIT)?;
    let ds = sample(spec, seed)?;
    let cd = center(&ds.x)?;
    let a = build_a(&cd);
    let b = oracle_b(&cd, spec)?;
    let r = reference_r(spec);
    let sol = sdp::solve(&a, opts)?;
    let zhat = sol.z_matrix();
    let zstar = SymmetricMatrix::outer(&ds.membership.to_f64());
    let n2 = (spec.n * spec.n) as f64;
    let pg = spec.separation().delta_sq;
    let curv = pg * spec.w_min().powi(2) * n2;

    let gap = r.inner(&zstar) - r.inner(&zhat);
    let gap_bound = 2.0 * GROTHENDIECK_BOUND * inf_to_one_exact(&b.sub(&r).to_dense())?;
    let delta = zhat.sub(&zstar).l1_norm() / n2;
    let slack = 1e-9 * n2 * pg.max(f64::MIN_POSITIVE);
    let (delta_curvature_bound, delta_bound) = if curv > 0.0 {
        (gap / curv, gap_bound / curv)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    let pred = sdp::round_signs(&sol.xhat);
    Ok(SandwichReport {
        gap,
        gap_bound,
        delta,
        delta_curvature_bound,
        delta_bound,
        lower_holds: gap >= -slack,
        upper_holds: gap <= gap_bound + slack,
        delta_holds: delta <= delta_curvature_bound + 1e-9 && delta <= delta_bound + 1e-9,
        success_rate: metrics::success_rate(&pred, &ds.membership)?,
        converged: sol.converged,
    })
}

/// Short stable identifier of a spec: the first 8 bytes of the SHA-256 of
/// its JSON form, in hex.
pub fn spec_fingerprint(spec: &MixtureSpec) -> String {
    let json = serde_json::to_vec(spec).expect("spec serializes");
    let digest = Sha256::digest(&json);
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub spec: String,
    pub statistic: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckRow {
    /// Row that passes when `statistic <= bound`.
    pub fn at_most(check: impl Into<String>, spec: impl Into<String>, statistic: f64, bound: f64) -> Self {
        Self {
            check: check.into(),
            spec: spec.into(),
            statistic,
            bound,
            pass: statistic <= bound,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub rows: Vec<CheckRow>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&CheckRow> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for row in &self.rows {
            wtr.serialize(row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Sentinels that perturb the pipeline so the suite can demonstrate it
/// catches a broken identity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyHooks {
    /// Multiplies the computed `lambda` by `1 + lambda_perturbation`.
    pub lambda_perturbation: f64,
}

/// Deterministic identities that every centered dataset must satisfy.
pub fn identity_checks(spec: &MixtureSpec, seed: u64, hooks: &VerifyHooks) -> Result<Vec<CheckRow>> {
    let fp = spec_fingerprint(spec);
    let ds = sample(spec, seed)?;
    let mut cd = center(&ds.x)?;
    cd.lambda *= 1.0 + hooks.lambda_perturbation;
    let n = spec.n;
    let nf = n as f64;
    let mut rows = Vec::new();

    // Y Y^T against (I - P1) X X^T (I - P1), formed entrywise.
    let xxt = ds.x.gram();
    let rs: Vec<f64> = (0..n).map(|i| (0..n).map(|j| xxt.get(i, j)).sum::<f64>() / nf).collect();
    let grand = xxt.grand_sum() / (nf * nf);
    let proj = SymmetricMatrix::from_fn(n, |i, j| xxt.get(i, j) - rs[i] - rs[j] + grand);
    let scale = xxt.max_abs().max(f64::MIN_POSITIVE);
    rows.push(CheckRow::at_most(
        "gram_projection_rel",
        &fp,
        cd.gram.sub(&proj).max_abs() / scale,
        1e-9,
    ));

    let lam_ref = -cd.tau / (nf - 1.0);
    rows.push(CheckRow::at_most(
        "lambda_tau_rel",
        &fp,
        (cd.lambda - lam_ref).abs() / lam_ref.abs().max(f64::MIN_POSITIVE),
        1e-12,
    ));

    let gscale = cd.gram.l1_norm().max(f64::MIN_POSITIVE);
    rows.push(CheckRow::at_most(
        "gram_grand_sum_rel",
        &fp,
        cd.gram.grand_sum().abs() / gscale,
        1e-12,
    ));

    let a = build_a(&cd);
    let tr = cd.gram.trace();
    rows.push(CheckRow::at_most(
        "a_grand_sum_equals_trace_rel",
        &fp,
        (a.grand_sum() - tr).abs() / tr.abs().max(f64::MIN_POSITIVE),
        1e-9,
    ));

    let r = reference_r(spec);
    let (w1, w2) = spec.weights();
    let tr_r = w1 * w2 * nf * spec.separation().delta_sq;
    rows.push(CheckRow::at_most(
        "reference_trace_rel",
        &fp,
        (r.trace() - tr_r).abs() / tr_r.max(f64::MIN_POSITIVE),
        1e-12,
    ));
    if tr_r > 0.0 {
        rows.push(CheckRow::at_most(
            "reference_opnorm_equals_trace_rel",
            &fp,
            (op_norm(&r, 1e-14)? - tr_r).abs() / tr_r,
            1e-8,
        ));
    }

    let b = oracle_b(&cd, spec)?;
    let tol = crate::spectral::DEFAULT_EIGEN_TOL;
    let eg = crate::spectral::top_eigen(&cd.gram, tol);
    let ea = crate::spectral::top_eigen(&a, tol);
    let eb = crate::spectral::top_eigen(&b, tol);
    if let (Ok(eg), Ok(ea), Ok(eb)) = (eg, ea, eb) {
        let ang = |u: &[f64], v: &[f64]| metrics::axis_angle_deg(u, v).map(f64::to_radians);
        let worst = ang(&eg.vector, &ea.vector)?
            .max(ang(&eg.vector, &eb.vector)?)
            .max(ang(&ea.vector, &eb.vector)?);
        rows.push(CheckRow::at_most("top_eigvec_agreement_rad", &fp, worst, 1e-8));
    }
    Ok(rows)
}

/// The full fixed-size suite driven by `sdpcluster verify`.
pub fn run_suite(seed: u64, hooks: &VerifyHooks) -> Result<VerifyReport> {
    use crate::mixture::make_bernoulli_spec;
    use rand::{Rng, SeedableRng};

    let mut rows = Vec::new();
    let opts = SolverOptions {
        tol: 1e-10,
        seed,
        ..SolverOptions::default()
    };

    // Identities on a few Bernoulli designs.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, &[1]));
    for t in 0..50u64 {
        let n = rng.random_range(6..=30);
        let p = rng.random_range(5..=100);
        let w1 = rng.random_range(0.3..0.7);
        let spec = make_bernoulli_spec(0.2, 0.02, p, n, w1)?;
        rows.extend(identity_checks(&spec, derive_seed(seed, &[1, t]), hooks)?);
    }

    // Reference recovery.
    for (n, w1) in [(8, 0.5), (12, 0.7)] {
        let spec = make_bernoulli_spec(0.2, 0.02, 20, n, w1)?;
        let fp = spec_fingerprint(&spec);
        let r = reference_r(&spec);
        let sol = sdp::solve(&r, &opts)?;
        let d = metrics::z_distances(&sol, &spec.membership())?;
        rows.push(CheckRow::at_most("reference_recovery_l1", &fp, d.l1, 1e-6));
        let (x, _) = brute_force_maxcut(&r)?;
        let miss = if x == spec.membership() || x == spec.membership().flipped() {
            0.0
        } else {
            1.0
        };
        rows.push(CheckRow::at_most("reference_maxcut_partition", &fp, miss, 0.0));
    }

    // Grothendieck ratios and the norm chain on random symmetric matrices.
    let mut worst_ratio = 0.0f64;
    let mut worst_chain = f64::NEG_INFINITY;
    for _ in 0..100 {
        let m = SymmetricMatrix::from_fn(8, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let g = grothendieck_check(&m, &opts)?;
        worst_ratio = worst_ratio.max(g.ratio);
        worst_chain = worst_chain.max(g.inf_to_one - 8.0 * op_norm(&m, 1e-14)?);
    }
    rows.push(CheckRow::at_most("grothendieck_ratio_max", "random8", worst_ratio, GROTHENDIECK_BOUND));
    rows.push(CheckRow::at_most("inf_to_one_le_n_opnorm", "random8", worst_chain, 1e-8));

    // Curvature of the reference objective.
    let spec = make_bernoulli_spec(0.2, 0.02, 20, 10, 0.7)?;
    let fp = spec_fingerprint(&spec);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let z = random_feasible(10, 4, &mut rng);
        let c = curvature_check(&spec, &z)?;
        worst = worst.max(c.rhs - c.lhs);
    }
    let pg = spec.separation().delta_sq;
    rows.push(CheckRow::at_most("curvature_violation", &fp, worst, 1e-9 * 100.0 * pg));
    let balanced = make_bernoulli_spec(0.2, 0.02, 20, 10, 0.5)?;
    let c = curvature_check(&balanced, &SymmetricMatrix::identity(10))?;
    rows.push(CheckRow::at_most(
        "curvature_equality_rel",
        spec_fingerprint(&balanced),
        (c.lhs - c.rhs).abs() / c.lhs,
        1e-9,
    ));

    // Optimality sandwich and the delta chain.
    let spec = make_bernoulli_spec(0.3, 0.03, 200, 16, 0.5)?;
    let fp = spec_fingerprint(&spec);
    for t in 0..20u64 {
        let s = sandwich_check(&spec, derive_seed(seed, &[3, t]), &opts)?;
        rows.push(CheckRow::at_most("sandwich_gap_lower", &fp, -s.gap, 1e-9 * 256.0 * pg));
        rows.push(CheckRow::at_most("sandwich_gap_upper", &fp, s.gap - s.gap_bound, 0.0));
        rows.push(CheckRow::at_most("delta_chain", &fp, s.delta - s.delta_bound, 1e-9));

        // Rounded relaxations never beat the exhaustive optimum.
        let ds = sample(&spec, derive_seed(seed, &[3, t]))?;
        let a = build_a(&center(&ds.x)?);
        let sol = sdp::solve(&a, &opts)?;
        let rounded = a.quad_form(&sdp::round_signs(&sol.xhat).to_f64());
        let (_, best) = brute_force_maxcut(&a)?;
        rows.push(CheckRow::at_most(
            "maxcut_dominates_rounding",
            &fp,
            rounded - best,
            1e-9 * best.abs().max(1.0),
        ));
    }

    Ok(VerifyReport { rows })
}

/// Random elliptope point `V V^T` with unit rows of width `r`.
pub fn random_feasible<R: rand::Rng>(n: usize, r: usize, rng: &mut R) -> SymmetricMatrix {
    let mut v = DenseMatrix::zeros(n, r);
    for i in 0..n {
        let row = v.row_mut(i);
        loop {
            row.iter_mut().for_each(|x| *x = rng.sample::<f64, _>(rand_distr::StandardNormal));
            let nr = linalg::norm2(row);
            if nr > 0.0 {
                row.iter_mut().for_each(|x| *x /= nr);
                break;
            }
        }
    }
    v.gram()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::make_bernoulli_spec;

    #[test]
    fn op_norm_examples() {
        assert!((op_norm(&SymmetricMatrix::identity(5), 1e-12).unwrap() - 1.0).abs() < 1e-12);
        let v = [1.0, -2.0, 0.5, 3.0];
        let want = v.iter().map(|x| x * x).sum::<f64>();
        let got = op_norm(&SymmetricMatrix::outer(&v), 1e-14).unwrap();
        assert!((got - want).abs() < 1e-9 * want);
        assert_eq!(op_norm(&SymmetricMatrix::zeros(3), 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn inf_to_one_examples() {
        let eye = DenseMatrix::from_fn(2, 2, |i, j| if i == j { 1.0 } else { 0.0 });
        assert_eq!(inf_to_one_exact(&eye).unwrap(), 2.0);
        let ones = DenseMatrix::from_fn(2, 2, |_, _| 1.0);
        assert_eq!(inf_to_one_exact(&ones).unwrap(), 4.0);
        let big = DenseMatrix::zeros(23, 23);
        assert!(matches!(inf_to_one_exact(&big), Err(Error::TooLargeForEnumeration { .. })));
    }

    #[test]
    fn maxcut_examples() {
        let (x, v) = brute_force_maxcut(&SymmetricMatrix::zeros(5)).unwrap();
        assert_eq!((x.labels(), v), (&[1i8; 5][..], 0.0));
        let d = SymmetricMatrix::from_fn(6, |i, j| if i == j { i as f64 - 1.5 } else { 0.0 });
        let (x, v) = brute_force_maxcut(&d).unwrap();
        assert_eq!(x.labels(), &[1; 6]);
        assert!((v - d.trace()).abs() < 1e-12);
        for w1 in [0.5, 0.7] {
            let spec = make_bernoulli_spec(0.2, 0.02, 10, 8, w1).unwrap();
            let (x, _) = brute_force_maxcut(&reference_r(&spec)).unwrap();
            assert_eq!(x, spec.membership());
        }
    }

    #[test]
    fn curvature_equality_case() {
        let spec = make_bernoulli_spec(0.2, 0.02, 10, 10, 0.5).unwrap();
        let c = curvature_check(&spec, &SymmetricMatrix::identity(10)).unwrap();
        let pg = spec.separation().delta_sq;
        let want = pg / 4.0 * 10.0 * 9.0;
        assert!((c.lhs - want).abs() < 1e-12 * want);
        assert!((c.rhs - want).abs() < 1e-12 * want);
        assert!(c.holds);
        let zstar = SymmetricMatrix::outer(&spec.membership().to_f64());
        let c = curvature_check(&spec, &zstar).unwrap();
        assert_eq!((c.lhs, c.rhs, c.holds), (0.0, 0.0, true));
        assert!(curvature_check(&spec, &SymmetricMatrix::identity(10).scale(2.0)).is_err());
    }

    #[test]
    fn envelope_requires_trials() {
        let spec = make_bernoulli_spec(0.2, 0.02, 10, 10, 0.5).unwrap();
        assert!(deviation_envelope(&spec, 10, 0).is_err());
    }

    #[test]
    fn fingerprint_is_stable() {
        let spec = make_bernoulli_spec(0.2, 0.02, 10, 10, 0.5).unwrap();
        let a = spec_fingerprint(&spec);
        assert_eq!(a.len(), 16);
        assert_eq!(a, spec_fingerprint(&spec.clone()));
        assert_ne!(a, spec_fingerprint(&spec.with_n(12).unwrap()));
    }

    #[test]
    fn tampered_lambda_is_caught() {
        let spec = make_bernoulli_spec(0.2, 0.02, 30, 10, 0.5).unwrap();
        let clean = identity_checks(&spec, 1, &VerifyHooks::default()).unwrap();
        assert!(clean.iter().all(|r| r.pass), "{clean:?}");
        let hooks = VerifyHooks {
            lambda_perturbation: 1e-3,
        };
        let rows = identity_checks(&spec, 1, &hooks).unwrap();
        let lam = rows.iter().find(|r| r.check == "lambda_tau_rel").unwrap();
        assert!(!lam.pass);
    }

    #[test]
    fn sandwich_rejects_large_n() {
        let spec = make_bernoulli_spec(0.3, 0.03, 50, 21, 0.5).unwrap();
        let e = sandwich_check(&spec, 0, &SolverOptions::default()).unwrap_err();
        assert!(matches!(e, Error::TooLargeForEnumeration { n: 21, max: 20 }));
    }
}
