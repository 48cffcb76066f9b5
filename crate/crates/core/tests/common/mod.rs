#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdpcluster::{DenseMatrix, SymmetricMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_na(m: &SymmetricMatrix) -> DMatrix<f64> {
    let n = m.order();
    DMatrix::from_fn(n, n, |i, j| m.get(i, j))
}

pub fn dense_to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

pub fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
    SymmetricMatrix::from_fn(n, |_, _| rng.random::<f64>() * 2.0 - 1.0)
}

/// Eigenpairs sorted by decreasing eigenvalue.
pub fn eigen_desc(m: &DMatrix<f64>) -> Vec<(f64, DVector<f64>)> {
    let e = SymmetricEigen::new(m.clone());
    let mut pairs: Vec<(f64, DVector<f64>)> = e
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, e.eigenvectors.column(k).into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(0.0, |a: f64, v| a.max(v.abs()))
}

/// Axis angle in radians between two vectors, robust near zero.
pub fn axis_angle(u: &[f64], v: &[f64]) -> f64 {
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (mut m, mut p) = (0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        m += (a / nu - b / nv).powi(2);
        p += (a / nu + b / nv).powi(2);
    }
    2.0 * (m.min(p).sqrt() / 2.0).min(1.0).asin()
}

/// `max over s, t in {-1, 1}^n of s^T M t`, enumerating both vectors.
pub fn double_enumeration(m: &DMatrix<f64>) -> f64 {
    let (r, c) = m.shape();
    let signs = |code: u32, len: usize| -> DVector<f64> {
        DVector::from_fn(len, |k, _| if code >> k & 1 == 1 { -1.0 } else { 1.0 })
    };
    let mut best = f64::NEG_INFINITY;
    for a in 0..1u32 << r {
        let s = signs(a, r);
        for b in 0..1u32 << c {
            let t = signs(b, c);
            best = best.max((s.transpose() * m * &t)[(0, 0)]);
        }
    }
    best
}

/// Plain exhaustive `max x^T A x`, no Gray code and no symmetry reduction.
pub fn naive_maxcut(a: &DMatrix<f64>) -> (Vec<f64>, f64) {
    let n = a.nrows();
    let mut best = (vec![], f64::NEG_INFINITY);
    for code in 0..1u32 << n {
        // bit (n-1-k) set iff x_k = -1 gives lexicographic order, +1 first
        let x = DVector::from_fn(n, |k, _| if code >> (n - 1 - k) & 1 == 1 { -1.0 } else { 1.0 });
        let v = (x.transpose() * a * &x)[(0, 0)];
        if v > best.1 + 1e-9 {
            best = (x.iter().copied().collect(), v);
        }
    }
    best
}

/// Primal-dual interior-point method for
/// `max <C, X>  s.t.  diag(X) = 1, X psd`, with dual
/// `min 1^T y  s.t.  Diag(y) - C psd`. Returns `(primal, dual)`.
pub fn ipm_elliptope(c: &DMatrix<f64>) -> (f64, f64) {
    let n = c.nrows();
    let nf = n as f64;
    let mut x = DMatrix::<f64>::identity(n, n);
    let mut y = DVector::from_fn(n, |i, _| c.row(i).iter().map(|v| v.abs()).sum::<f64>() + 1.0);
    let mut z = DMatrix::from_diagonal(&y) - c;
    let mut mu = z.dot(&x) / (2.0 * nf);
    let psd = |m: &DMatrix<f64>| m.clone().cholesky().is_some();
    for _ in 0..500 {
        let primal = c.dot(&x);
        let dual = y.sum();
        if dual - primal <= 1e-12 * (1.0 + dual.abs()) {
            break;
        }
        let zi = z.clone().try_inverse().expect("dual slack is positive definite");
        let schur = zi.component_mul(&x);
        let rhs = zi.diagonal() * mu - DVector::from_element(n, 1.0);
        let dy = schur.lu().solve(&rhs).expect("Schur complement is nonsingular");
        let mut dx = -(&zi * DMatrix::from_diagonal(&dy) * &x) + &zi * mu - &x;
        dx = (&dx + dx.transpose()) * 0.5;
        let dz = DMatrix::from_diagonal(&dy);

        let step = |base: &DMatrix<f64>, dir: &DMatrix<f64>| {
            let mut a = 1.0;
            while !psd(&(base + dir * a)) {
                a *= 0.8;
            }
            if a < 1.0 {
                a * 0.95
            } else {
                a
            }
        };
        let ap = step(&x, &dx);
        let ad = step(&z, &dz);
        x += &dx * ap;
        y += &dy * ad;
        z += &dz * ad;
        mu = z.dot(&x) / (2.0 * nf);
        if ap + ad > 1.8 {
            mu *= 0.5;
        }
    }
    (c.dot(&x), y.sum())
}
