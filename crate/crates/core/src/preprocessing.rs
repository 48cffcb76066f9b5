//! Global centering and the data-derived and analytic `n x n` matrices built
//! on top of it.
//!
//! Data side: `Y = X - P1 X`, the Gram matrix `Y Y^T`, its mean diagonal
//! `tau` and mean off-diagonal `lambda`, and the adjusted matrix
//! `A = Y Y^T - lambda (E_n - I_n)`.
//!
//! Analytic side (from a known [`MixtureSpec`]): the reference matrix
//! `R = E(Y) E(Y)^T`, the expected Gram `E Y Y^T = Sigma_Y + R`, the oracle
//! `B = A - (E tau) I_n` and the exact bias `E B - R`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SymmetricMatrix};
use crate::mixture::MixtureSpec;

/// Globally centered data and its Gram summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteredData {
    pub y: DenseMatrix,
    pub gram: SymmetricMatrix,
    pub lambda: f64,
    pub tau: f64,
}

impl CenteredData {
    pub fn n(&self) -> usize {
        self.y.rows()
    }
}

/// Subtracts the column means from every row and forms `Y Y^T`.
pub fn center(x: &DenseMatrix) -> Result<CenteredData> {
    let n = x.rows();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let p = x.cols();
    let mut means = vec![0.0; p];
    for i in 0..n {
        for (m, v) in means.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= n as f64);
    let mut y = x.clone();
    for i in 0..n {
        for (v, m) in y.row_mut(i).iter_mut().zip(&means) {
            *v -= m;
        }
    }
    let gram = y.gram();
    let tau = gram.trace() / n as f64;
    let off_upper = (gram.grand_sum() - gram.trace()) / 2.0;
    let lambda = 2.0 * off_upper / (n as f64 * (n as f64 - 1.0));
    Ok(CenteredData { y, gram, lambda, tau })
}

/// `A = Y Y^T - lambda (E_n - I_n)`: off-diagonal entries shifted by
/// `-lambda`, diagonal untouched.
pub fn build_a(cd: &CenteredData) -> SymmetricMatrix {
    let lam = cd.lambda;
    let g = &cd.gram;
    SymmetricMatrix::from_fn(g.order(), |i, j| if i == j { g.get(i, i) } else { g.get(i, j) - lam })
}

/// `R = E(Y) E(Y)^T`, a two-block matrix scaled by `p gamma`.
pub fn reference_r(spec: &MixtureSpec) -> SymmetricMatrix {
    let (n1, _) = spec.cluster_sizes();
    let (w1, w2) = spec.weights();
    let pg = spec.separation().delta_sq;
    SymmetricMatrix::from_fn(spec.n, |i, j| match (i < n1, j < n1) {
        (true, true) => pg * w2 * w2,
        (false, false) => pg * w1 * w1,
        _ => -pg * w1 * w2,
    })
}

/// `Sigma_Y = E(Y Y^T) - R`, the covariance contribution of the noise after
/// centering:
/// `blockdiag(V1 I, V2 I) - ((w2 V1 + w1 V2) / n) E_n - W2`.
pub fn noise_gram(spec: &MixtureSpec) -> SymmetricMatrix {
    let n = spec.n as f64;
    let (n1, _) = spec.cluster_sizes();
    let (w1, w2) = spec.weights();
    let (v1, v2) = spec.variance_profiles();
    let common = (w2 * v1 + w1 * v2) / n;
    let w2_scale = (v1 - v2) / n;
    SymmetricMatrix::from_fn(spec.n, |i, j| {
        let block = match (i < n1, j < n1) {
            (true, true) => w2_scale,
            (false, false) => -w2_scale,
            _ => 0.0,
        };
        let diag = if i == j {
            if i < n1 {
                v1
            } else {
                v2
            }
        } else {
            0.0
        };
        diag - common - block
    })
}

/// `E Y Y^T = Sigma_Y + R`.
pub fn expected_gram(spec: &MixtureSpec) -> SymmetricMatrix {
    noise_gram(spec).add(&reference_r(spec))
}

/// `E tau = (tr(Sigma_Y) + tr(R)) / n`.
pub fn expected_tau(spec: &MixtureSpec) -> f64 {
    expected_gram(spec).trace() / spec.n as f64
}

/// `E lambda = -E tau / (n - 1)`.
pub fn expected_lambda(spec: &MixtureSpec) -> f64 {
    -expected_tau(spec) / (spec.n as f64 - 1.0)
}

/// `B = A - (E tau) I_n`, with `E tau` taken from the generating spec.
pub fn oracle_b(cd: &CenteredData, spec: &MixtureSpec) -> Result<SymmetricMatrix> {
    if cd.n() != spec.n {
        return Err(Error::DimensionMismatch {
            expected: spec.n,
            got: cd.n(),
        });
    }
    Ok(build_a(cd).add_identity(-expected_tau(spec)))
}

/// The three pieces of the analytic bias `E B - R`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasTerms {
    /// `(V1 - V2) blockdiag(w2 I_{n1}, -w1 I_{n2})`.
    pub w0: SymmetricMatrix,
    /// `((V1 - V2) / n) blockdiag(E_{n1}, -E_{n2})`.
    pub w2: SymmetricMatrix,
    /// `W2 + ((V1 - V2)(w2 - w1) / n) E_n`.
    pub w_adjusted: SymmetricMatrix,
}

pub fn bias_terms(spec: &MixtureSpec) -> BiasTerms {
    let n = spec.n as f64;
    let (n1, _) = spec.cluster_sizes();
    let (w1, w2) = spec.weights();
    let (v1, v2) = spec.variance_profiles();
    let dv = v1 - v2;
    let w0 = SymmetricMatrix::from_fn(spec.n, |i, j| match (i == j, i < n1) {
        (true, true) => dv * w2,
        (true, false) => -dv * w1,
        _ => 0.0,
    });
    let w2m = SymmetricMatrix::from_fn(spec.n, |i, j| match (i < n1, j < n1) {
        (true, true) => dv / n,
        (false, false) => -dv / n,
        _ => 0.0,
    });
    let w_adjusted = w2m.clone().add_ones(dv * (w2 - w1) / n);
    BiasTerms {
        w0,
        w2: w2m,
        w_adjusted,
    }
}

/// Exact `E B - R = W0 - W_adj - (tr(R) / (n - 1)) (I_n - E_n / n)`.
pub fn expected_bias(spec: &MixtureSpec) -> SymmetricMatrix {
    let n = spec.n as f64;
    let terms = bias_terms(spec);
    let tr_r = reference_r(spec).trace();
    let c = tr_r / (n - 1.0);
    terms
        .w0
        .sub(&terms.w_adjusted)
        .add_identity(-c)
        .add_ones(c / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::{make_bernoulli_spec, sample, NoiseModel};

    fn pseudo_random(n: usize, p: usize, salt: u64) -> DenseMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(salt);
        DenseMatrix::from_fn(n, p, |_, _| rng.random::<f64>() * 4.0 - 1.0)
    }

    fn diag_spec(n: usize, p: usize, w1: f64, s1: f64, s2: f64) -> MixtureSpec {
        MixtureSpec::new(
            n,
            p,
            w1,
            (0..p).map(|k| if k % 2 == 0 { 1.0 } else { 0.0 }).collect(),
            (0..p).map(|k| if k % 2 == 0 { 0.0 } else { 0.5 }).collect(),
            NoiseModel::DiagonalFactor {
                sigma1: vec![s1; p],
                sigma2: vec![s2; p],
            },
            1.0,
        )
        .unwrap()
    }

    /// `(I - P1) M (I - P1)` by explicit dense products.
    fn project_dense(m: &DenseMatrix) -> DenseMatrix {
        let n = m.rows();
        let q = DenseMatrix::from_fn(n, n, |i, j| (if i == j { 1.0 } else { 0.0 }) - 1.0 / n as f64);
        q.matmul(m).unwrap().matmul(&q).unwrap()
    }

    #[test]
    fn constant_matrix_centers_to_zero() {
        let x = DenseMatrix::from_fn(5, 3, |_, j| j as f64 + 2.5);
        let cd = center(&x).unwrap();
        assert!(cd.y.as_slice().iter().all(|&v| v == 0.0));
        assert_eq!(cd.gram.max_abs(), 0.0);
        assert_eq!((cd.lambda, cd.tau), (0.0, 0.0));
    }

    #[test]
    fn two_by_two_identity() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let cd = center(&x).unwrap();
        assert_eq!(cd.y.as_slice(), &[0.5, -0.5, -0.5, 0.5]);
        assert_eq!(cd.tau, 0.5);
        assert_eq!(cd.lambda, -0.5);
    }

    #[test]
    fn rejects_single_row() {
        let x = DenseMatrix::zeros(1, 3);
        assert!(matches!(center(&x), Err(Error::TooFewSamples(1))));
    }

    #[test]
    fn gram_matches_projected_outer_product() {
        let x = pseudo_random(8, 5, 11);
        let cd = center(&x).unwrap();
        let xxt = x.matmul(&x.transpose()).unwrap();
        let want = project_dense(&xxt);
        for i in 0..8 {
            for j in 0..8 {
                assert!((cd.gram.get(i, j) - want.get(i, j)).abs() < 1e-10);
            }
        }
        assert!(cd.gram.grand_sum().abs() < 1e-9);
        assert!((cd.lambda + cd.tau / 7.0).abs() < 1e-12 * cd.tau.abs().max(1.0));
    }

    #[test]
    fn centering_is_idempotent() {
        let x = pseudo_random(6, 4, 2);
        let cd = center(&x).unwrap();
        let again = center(&cd.y).unwrap();
        for (a, b) in cd.y.as_slice().iter().zip(again.y.as_slice()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn adjusted_matrix_properties() {
        let cd = center(&pseudo_random(9, 4, 5)).unwrap();
        let a = build_a(&cd);
        assert!((a.grand_sum() - cd.gram.trace()).abs() < 1e-9);
        assert_eq!(a.diag(), cd.gram.diag());
        let zero = center(&DenseMatrix::zeros(4, 2)).unwrap();
        assert_eq!(build_a(&zero).max_abs(), 0.0);
    }

    #[test]
    fn balanced_reference_is_scaled_outer_product() {
        let spec = make_bernoulli_spec(0.2, 0.02, 10, 8, 0.5).unwrap();
        let r = reference_r(&spec);
        let pg = spec.separation().delta_sq;
        let xbar = spec.membership().to_f64();
        let want = SymmetricMatrix::outer(&xbar).scale(pg / 4.0);
        assert!(r.sub(&want).max_abs() < 1e-14);
    }

    #[test]
    fn reference_trace_norm_and_grand_sum() {
        let spec = make_bernoulli_spec(0.2, 0.02, 10, 10, 0.7).unwrap();
        let r = reference_r(&spec);
        let (w1, w2) = spec.weights();
        let want = w1 * w2 * 10.0 * spec.separation().delta_sq;
        assert!((r.trace() - want).abs() < 1e-12);
        assert!(r.grand_sum().abs() < 1e-12);
    }

    #[test]
    fn reference_equals_mean_outer_product() {
        let spec = diag_spec(7, 6, 0.6, 1.0, 2.0);
        let ey = project_dense(&spec.mean_matrix().matmul(&spec.mean_matrix().transpose()).unwrap());
        let r = reference_r(&spec);
        for i in 0..7 {
            for j in 0..7 {
                assert!((r.get(i, j) - ey.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn expected_gram_matches_dense_projection() {
        // E X X^T = M M^T + D with D = diag(V_row); project both sides.
        for (w1, s1, s2) in [(0.5, 1.0, 1.0), (0.7, 0.5, 1.5), (0.3, 2.0, 0.2)] {
            let spec = diag_spec(10, 5, w1, s1, s2);
            let (v1, v2) = spec.variance_profiles();
            let (n1, _) = spec.cluster_sizes();
            let m = spec.mean_matrix();
            let mut exx = m.matmul(&m.transpose()).unwrap();
            for i in 0..10 {
                let d = exx.get(i, i) + if i < n1 { v1 } else { v2 };
                exx.set(i, i, d);
            }
            let want = project_dense(&exx);
            let got = expected_gram(&spec);
            for i in 0..10 {
                for j in 0..10 {
                    assert!((got.get(i, j) - want.get(i, j)).abs() < 1e-12, "w1={w1} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn equal_profiles_give_projected_identity() {
        let spec = diag_spec(6, 4, 0.5, 1.5, 1.5);
        let v = spec.variance_profiles().0;
        let want = SymmetricMatrix::identity(6).add_ones(-1.0 / 6.0).scale(v);
        assert!(noise_gram(&spec).sub(&want).max_abs() < 1e-12);
        assert!(noise_gram(&spec).grand_sum().abs() < 1e-10);
        let zero = diag_spec(6, 4, 0.5, 0.0, 0.0);
        assert!(expected_gram(&zero).sub(&reference_r(&zero)).max_abs() == 0.0);
    }

    #[test]
    fn zero_noise_oracle_b() {
        let spec = diag_spec(8, 6, 0.5, 0.0, 0.0);
        let ds = sample(&spec, 1).unwrap();
        let cd = center(&ds.x).unwrap();
        let b = oracle_b(&cd, &spec).unwrap();
        let (w1, w2) = spec.weights();
        let want = build_a(&cd).add_identity(-w1 * w2 * spec.separation().delta_sq);
        assert!(b.sub(&want).max_abs() < 1e-12);
    }

    #[test]
    fn oracle_b_shares_off_diagonals_with_a() {
        let spec = diag_spec(8, 6, 0.5, 1.0, 1.0);
        let cd = center(&sample(&spec, 4).unwrap().x).unwrap();
        let a = build_a(&cd);
        let b = oracle_b(&cd, &spec).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert_eq!(a.get(i, j), b.get(i, j));
                }
            }
        }
    }

    #[test]
    fn bias_matches_direct_expectation() {
        // E B - R = E YY^T - E lambda (E_n - I) - E tau I - R.
        for (w1, s1, s2) in [(0.5, 1.0, 1.0), (0.7, 0.5, 1.5), (0.25, 2.0, 0.3)] {
            let spec = diag_spec(12, 5, w1, s1, s2);
            let et = expected_tau(&spec);
            let el = expected_lambda(&spec);
            let direct = expected_gram(&spec)
                .sub(&reference_r(&spec))
                .add_ones(-el)
                .add_identity(el - et);
            let got = expected_bias(&spec);
            assert!(got.sub(&direct).max_abs() < 1e-12, "w1={w1}");
        }
    }

    #[test]
    fn w0_has_zero_trace_and_grand_sum() {
        for w1 in [0.3, 0.5, 0.8] {
            let spec = diag_spec(10, 4, w1, 0.4, 1.9);
            let t = bias_terms(&spec);
            assert!(t.w0.trace().abs() < 1e-12);
            assert!(t.w0.grand_sum().abs() < 1e-12);
        }
    }

    #[test]
    fn equal_profiles_bias_is_trace_term() {
        for n in [4, 7, 12] {
            let spec = diag_spec(n, 6, 0.5, 1.2, 1.2);
            let tr_r = reference_r(&spec).trace();
            let want = SymmetricMatrix::identity(n)
                .add_ones(-1.0 / n as f64)
                .scale(-tr_r / (n as f64 - 1.0));
            let bias = expected_bias(&spec);
            assert!(bias.sub(&want).max_abs() < 1e-12);
            // eigenvalues of I - E/n are 0 and 1
            let op = tr_r / (n as f64 - 1.0);
            assert!(op <= spec.separation().delta_sq / 3.0 + 1e-12);
        }
    }
}
