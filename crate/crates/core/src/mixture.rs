//! Two-population mixture models: specification, analytic summaries and
//! seeded sampling.
//!
//! Row `i` of a sampled data matrix is `mu1 + noise` for the first `n1` rows
//! and `mu2 + noise` for the remaining `n2 = n - n1` rows. The analytic
//! quantities (separation, variance profiles, SNR) use the realized cluster
//! fractions `w_j = n_j / n`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix};
use crate::partition::Partition;

/// Noise law of `Z_i = X_i - E X_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    /// Independent Bernoulli coordinates with means `mu1` / `mu2`.
    BernoulliIndependent,
    /// Standard normal coordinates.
    IsotropicGaussian,
    /// Independent normal coordinates with per-cluster standard deviations.
    DiagonalFactor { sigma1: Vec<f64>, sigma2: Vec<f64> },
    /// `Z_j = H_i W_j` with `H_i` of shape `p x m` and `W_j` standard normal.
    GeneralFactor { h1: DenseMatrix, h2: DenseMatrix },
}

/// Full generative description of a two-cluster mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub n: usize,
    pub p: usize,
    pub w1: f64,
    pub mu1: Vec<f64>,
    pub mu2: Vec<f64>,
    pub noise: NoiseModel,
    /// psi_2 bound `C_0` used when reporting the SNR.
    pub subgaussian_bound: f64,
}

/// `Delta^2 = ||mu1 - mu2||^2` and `gamma = Delta^2 / p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    pub delta_sq: f64,
    pub gamma: f64,
}

/// A sampled data matrix together with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DenseMatrix,
    pub membership: Partition,
    pub spec: MixtureSpec,
    pub seed: u64,
}

/// `n1 = round(n * w1)` with ties rounded up.
pub fn cluster_size(n: usize, w1: f64) -> usize {
    (n as f64 * w1 + 0.5).floor() as usize
}

impl MixtureSpec {
    pub fn new(
        n: usize,
        p: usize,
        w1: f64,
        mu1: Vec<f64>,
        mu2: Vec<f64>,
        noise: NoiseModel,
        subgaussian_bound: f64,
    ) -> Result<Self> {
        let spec = Self {
            n,
            p,
            w1,
            mu1,
            mu2,
            noise,
            subgaussian_bound,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if !(self.w1 > 0.0 && self.w1 < 1.0) {
            return bad(format!("w1 must lie in (0, 1), got {}", self.w1));
        }
        let n1 = cluster_size(self.n, self.w1);
        if n1 < 1 || n1 >= self.n {
            return bad(format!(
                "n = {} and w1 = {} give empty cluster (n1 = {n1})",
                self.n, self.w1
            ));
        }
        if self.p == 0 {
            return bad("p must be positive".into());
        }
        if self.mu1.len() != self.p || self.mu2.len() != self.p {
            return bad(format!(
                "mean vectors must have length p = {}, got {} and {}",
                self.p,
                self.mu1.len(),
                self.mu2.len()
            ));
        }
        if self.mu1.iter().chain(&self.mu2).any(|v| !v.is_finite()) {
            return bad("mean vectors must be finite".into());
        }
        if !(self.subgaussian_bound >= 0.0 && self.subgaussian_bound.is_finite()) {
            return bad(format!(
                "subgaussian bound must be finite and nonnegative, got {}",
                self.subgaussian_bound
            ));
        }
        match &self.noise {
            NoiseModel::BernoulliIndependent => {
                if self.mu1.iter().chain(&self.mu2).any(|&q| !(q > 0.0 && q < 1.0)) {
                    return bad("Bernoulli means must lie strictly inside (0, 1)".into());
                }
            }
            NoiseModel::IsotropicGaussian => {}
            NoiseModel::DiagonalFactor { sigma1, sigma2 } => {
                if sigma1.len() != self.p || sigma2.len() != self.p {
                    return bad(format!(
                        "diagonal factors must have length p = {}, got {} and {}",
                        self.p,
                        sigma1.len(),
                        sigma2.len()
                    ));
                }
                if sigma1.iter().chain(sigma2).any(|s| !s.is_finite() || *s < 0.0) {
                    return bad("diagonal factors must be finite and nonnegative".into());
                }
            }
            NoiseModel::GeneralFactor { h1, h2 } => {
                for (name, h) in [("h1", h1), ("h2", h2)] {
                    if h.rows() != self.p {
                        return bad(format!("{name} must have p = {} rows, got {}", self.p, h.rows()));
                    }
                    if h.cols() < self.p {
                        return bad(format!("{name} must have m >= p columns, got {}", h.cols()));
                    }
                    if h.as_slice().iter().any(|v| !v.is_finite()) {
                        return bad(format!("{name} has non-finite entries"));
                    }
                    if h.max_abs() == 0.0 {
                        return bad(format!("{name} must have nonzero operator norm"));
                    }
                }
            }
        }
        Ok(())
    }

    /// `(n1, n2)`.
    pub fn cluster_sizes(&self) -> (usize, usize) {
        let n1 = cluster_size(self.n, self.w1);
        (n1, self.n - n1)
    }

    /// Realized fractions `(n1 / n, n2 / n)`.
    pub fn weights(&self) -> (f64, f64) {
        let (n1, n2) = self.cluster_sizes();
        (n1 as f64 / self.n as f64, n2 as f64 / self.n as f64)
    }

    pub fn w_min(&self) -> f64 {
        let (w1, w2) = self.weights();
        w1.min(w2)
    }

    /// Ground-truth labels: `+1` for the first `n1` rows.
    pub fn membership(&self) -> Partition {
        Partition::blocks(self.cluster_sizes().0, self.n)
    }

    pub fn separation(&self) -> Separation {
        let delta_sq: f64 = self
            .mu1
            .iter()
            .zip(&self.mu2)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Separation {
            delta_sq,
            gamma: delta_sq / self.p as f64,
        }
    }

    /// `(V1, V2)`, the expected squared noise norm in each cluster.
    pub fn variance_profiles(&self) -> (f64, f64) {
        match &self.noise {
            NoiseModel::BernoulliIndependent => {
                let v = |mu: &[f64]| mu.iter().map(|q| q * (1.0 - q)).sum::<f64>();
                (v(&self.mu1), v(&self.mu2))
            }
            NoiseModel::IsotropicGaussian => (self.p as f64, self.p as f64),
            NoiseModel::DiagonalFactor { sigma1, sigma2 } => {
                let v = |s: &[f64]| s.iter().map(|x| x * x).sum::<f64>();
                (v(sigma1), v(sigma2))
            }
            NoiseModel::GeneralFactor { h1, h2 } => {
                let v = |h: &DenseMatrix| h.as_slice().iter().map(|x| x * x).sum::<f64>();
                (v(h1), v(h2))
            }
        }
    }

    /// Per-coordinate noise variances of each cluster, when coordinates are
    /// independent.
    pub fn coordinate_variances(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.noise {
            NoiseModel::BernoulliIndependent => {
                let v = |mu: &[f64]| mu.iter().map(|q| q * (1.0 - q)).collect::<Vec<_>>();
                Some((v(&self.mu1), v(&self.mu2)))
            }
            NoiseModel::IsotropicGaussian => Some((vec![1.0; self.p], vec![1.0; self.p])),
            NoiseModel::DiagonalFactor { sigma1, sigma2 } => {
                let v = |s: &[f64]| s.iter().map(|x| x * x).collect::<Vec<_>>();
                Some((v(sigma1), v(sigma2)))
            }
            NoiseModel::GeneralFactor { .. } => None,
        }
    }

    /// `max_j ||Cov(Z_j)||_2` over both clusters.
    pub fn max_noise_covariance_norm(&self) -> Result<f64> {
        match &self.noise {
            NoiseModel::BernoulliIndependent | NoiseModel::IsotropicGaussian | NoiseModel::DiagonalFactor { .. } => {
                let (a, b) = self.coordinate_variances().expect("independent coordinates");
                Ok(a.into_iter().chain(b).fold(0.0, f64::max))
            }
            NoiseModel::GeneralFactor { h1, h2 } => Ok(factor_cov_norm(h1)?.max(factor_cov_norm(h2)?)),
        }
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(
            self.noise,
            NoiseModel::BernoulliIndependent | NoiseModel::IsotropicGaussian
        )
    }

    /// Signal-to-noise parameter `s^2`.
    ///
    /// Isotropic noise: `min(Delta^2 / C0^2, n p gamma^2 / C0^4)`. Factor
    /// models additionally divide by `max_j ||Cov(Z_j)||_2` (first term) and
    /// its square (second term).
    pub fn snr(&self) -> Result<f64> {
        let Separation { delta_sq, gamma } = self.separation();
        if delta_sq == 0.0 {
            return Ok(0.0);
        }
        let c0 = self.subgaussian_bound;
        if c0 <= 0.0 {
            return Err(Error::InvalidSpec(
                "SNR needs a positive subgaussian bound".into(),
            ));
        }
        let cov = if self.is_isotropic() {
            1.0
        } else {
            self.max_noise_covariance_norm()?
        };
        if cov == 0.0 {
            return Ok(f64::INFINITY);
        }
        let npg2 = self.n as f64 * self.p as f64 * gamma * gamma;
        Ok((delta_sq / (c0 * c0 * cov)).min(npg2 / (c0.powi(4) * cov * cov)))
    }

    /// Mean of row `i`.
    pub fn mean_row(&self, i: usize) -> &[f64] {
        if i < self.cluster_sizes().0 {
            &self.mu1
        } else {
            &self.mu2
        }
    }

    /// `E X`, the `n x p` matrix of row means.
    pub fn mean_matrix(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.p);
        for i in 0..self.n {
            m.row_mut(i).copy_from_slice(self.mean_row(i));
        }
        m
    }

    /// Same spec with a different sample count.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        let mut s = self.clone();
        s.n = n;
        s.validate()?;
        Ok(s)
    }
}

/// `||H H^T||_2` by power iteration on `x -> H (H^T x)`.
fn factor_cov_norm(h: &DenseMatrix) -> Result<f64> {
    let p = h.rows();
    let scale: f64 = h.as_slice().iter().map(|v| v * v).sum();
    let out = linalg::shifted_power(
        |x, y| {
            let t = h.t_mul_vec(x);
            y.copy_from_slice(&h.mul_vec(&t));
        },
        linalg::harmonic_start(p),
        linalg::PowerConfig {
            shift: 0.0,
            tol_rel: 1e-10,
            tol_floor: 1e-14 * scale,
            max_iter: 10 * p + 1000,
            accept_stall: true,
            stall_rel: 1e-13,
        },
    )?;
    Ok(out.value)
}

/// The two-block Bernoulli design: for the first `ceil(p/2)` features
/// cluster 1 has mean `(1 + alpha)/2 + eps/2` and cluster 2 has
/// `(1 - alpha)/2 + eps/2`; the roles swap on the remaining features, so
/// `gamma = alpha^2`.
pub fn make_bernoulli_spec(alpha: f64, eps: f64, p: usize, n: usize, w1: f64) -> Result<MixtureSpec> {
    let (high, low) = bernoulli_levels(alpha, eps)?;
    let (mu1, mu2) = mirrored_means(high, low, p);
    MixtureSpec::new(n, p, w1, mu1, mu2, NoiseModel::BernoulliIndependent, 1.0)
}

fn bernoulli_levels(alpha: f64, eps: f64) -> Result<(f64, f64)> {
    if !(alpha.is_finite() && eps.is_finite()) || alpha < 0.0 || alpha >= 1.0 {
        return Err(Error::InvalidSpec(format!(
            "alpha must lie in [0, 1) and eps must be finite, got alpha = {alpha}, eps = {eps}"
        )));
    }
    let high = (1.0 + alpha) / 2.0 + eps / 2.0;
    let low = (1.0 - alpha) / 2.0 + eps / 2.0;
    if !(high < 1.0 && low > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "alpha = {alpha}, eps = {eps} push a Bernoulli mean outside (0, 1)"
        )));
    }
    Ok((high, low))
}

fn mirrored_means(high: f64, low: f64, p: usize) -> (Vec<f64>, Vec<f64>) {
    let half = p.div_ceil(2);
    let mu1 = (0..p).map(|k| if k < half { high } else { low }).collect();
    let mu2 = (0..p).map(|k| if k < half { low } else { high }).collect();
    (mu1, mu2)
}

/// Draws a dataset. Row `i` uses its own ChaCha stream keyed by
/// `(seed, i)`, so the output does not depend on evaluation order.
pub fn sample(spec: &MixtureSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let (n1, _) = spec.cluster_sizes();
    let mut x = DenseMatrix::zeros(spec.n, spec.p);
    for i in 0..spec.n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let first = i < n1;
        let mu = if first { &spec.mu1 } else { &spec.mu2 };
        let row = x.row_mut(i);
        match &spec.noise {
            NoiseModel::BernoulliIndependent => {
                for (xv, &q) in row.iter_mut().zip(mu) {
                    *xv = if rng.random::<f64>() < q { 1.0 } else { 0.0 };
                }
            }
            NoiseModel::IsotropicGaussian => {
                for (xv, &m) in row.iter_mut().zip(mu) {
                    let z: f64 = rng.sample(StandardNormal);
                    *xv = m + z;
                }
            }
            NoiseModel::DiagonalFactor { sigma1, sigma2 } => {
                let sigma = if first { sigma1 } else { sigma2 };
                for ((xv, &m), &s) in row.iter_mut().zip(mu).zip(sigma) {
                    let z: f64 = rng.sample(StandardNormal);
                    *xv = m + s * z;
                }
            }
            NoiseModel::GeneralFactor { h1, h2 } => {
                let h = if first { h1 } else { h2 };
                let w: Vec<f64> = (0..h.cols()).map(|_| rng.sample(StandardNormal)).collect();
                let z = h.mul_vec(&w);
                for ((xv, &m), zk) in row.iter_mut().zip(mu).zip(z) {
                    *xv = m + zk;
                }
            }
        }
    }
    Ok(Dataset {
        x,
        membership: spec.membership(),
        spec: spec.clone(),
        seed,
    })
}

/// A scalar broadcast to every coordinate, or an explicit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrVec {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl ScalarOrVec {
    fn expand(&self, p: usize, name: &str) -> Result<Vec<f64>> {
        match self {
            ScalarOrVec::Scalar(s) => Ok(vec![*s; p]),
            ScalarOrVec::Vector(v) if v.len() == p => Ok(v.clone()),
            ScalarOrVec::Vector(v) => Err(Error::Config(format!(
                "{name} has length {}, expected p = {p}",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Bernoulli,
    Gaussian,
    Diagonal,
    Factor,
}

/// Flat key-value description of a mixture, read from JSON.
///
/// Means always follow the mirrored two-level layout of
/// [`make_bernoulli_spec`]. `sigma1` / `sigma2` feed the diagonal model and,
/// when `h1` / `h2` are absent, the factor model as `sigma * I_p`. Factor
/// matrices are row-major flat arrays of shape `p x m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureConfig {
    #[serde(default = "default_model")]
    pub model: ModelKind,
    pub n: usize,
    pub p: usize,
    #[serde(default = "default_w1")]
    pub w1: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub sigma1: Option<ScalarOrVec>,
    #[serde(default)]
    pub sigma2: Option<ScalarOrVec>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub h1: Option<Vec<f64>>,
    #[serde(default)]
    pub h2: Option<Vec<f64>>,
    #[serde(default)]
    pub subgaussian_bound: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_model() -> ModelKind {
    ModelKind::Bernoulli
}

fn default_w1() -> f64 {
    0.5
}

fn default_alpha() -> f64 {
    0.04
}

impl MixtureConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `eps`, defaulting to `0.1 * alpha`.
    pub fn eps(&self) -> f64 {
        self.eps.unwrap_or(0.1 * self.alpha)
    }

    pub fn build(&self) -> Result<MixtureSpec> {
        let (high, low) = bernoulli_levels(self.alpha, self.eps())?;
        let (mu1, mu2) = mirrored_means(high, low, self.p);
        let sigma = |s: &Option<ScalarOrVec>, name: &str| -> Result<Vec<f64>> {
            s.as_ref()
                .unwrap_or(&ScalarOrVec::Scalar(1.0))
                .expand(self.p, name)
        };
        let noise = match self.model {
            ModelKind::Bernoulli => NoiseModel::BernoulliIndependent,
            ModelKind::Gaussian => NoiseModel::IsotropicGaussian,
            ModelKind::Diagonal => NoiseModel::DiagonalFactor {
                sigma1: sigma(&self.sigma1, "sigma1")?,
                sigma2: sigma(&self.sigma2, "sigma2")?,
            },
            ModelKind::Factor => {
                let m = self.m.unwrap_or(self.p);
                let factor = |h: &Option<Vec<f64>>, s: &Option<ScalarOrVec>, name: &str| -> Result<DenseMatrix> {
                    match h {
                        Some(flat) => DenseMatrix::from_vec(self.p, m, flat.clone())
                            .map_err(|_| Error::Config(format!("{name} must hold p * m = {} values", self.p * m))),
                        None => {
                            let sd = sigma(s, name)?;
                            Ok(DenseMatrix::from_fn(self.p, m, |i, j| if i == j { sd[i] } else { 0.0 }))
                        }
                    }
                };
                NoiseModel::GeneralFactor {
                    h1: factor(&self.h1, &self.sigma1, "h1")?,
                    h2: factor(&self.h2, &self.sigma2, "h2")?,
                }
            }
        };
        MixtureSpec::new(
            self.n,
            self.p,
            self.w1,
            mu1,
            mu2,
            noise,
            self.subgaussian_bound.unwrap_or(1.0),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_spec(n: usize, p: usize, w1: f64, s1: f64, s2: f64) -> MixtureSpec {
        let (mu1, mu2) = mirrored_means(0.6, 0.4, p);
        MixtureSpec::new(
            n,
            p,
            w1,
            mu1,
            mu2,
            NoiseModel::DiagonalFactor {
                sigma1: vec![s1; p],
                sigma2: vec![s2; p],
            },
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn section_seven_gamma() {
        let spec = make_bernoulli_spec(0.04, 0.004, 20000, 100, 0.5).unwrap();
        let sep = spec.separation();
        assert!((sep.gamma - 0.0016).abs() < 1e-15);
        assert!((1.0 / sep.gamma - 625.0).abs() < 1e-9);
        assert!((sep.delta_sq - 32.0).abs() < 1e-12 * 32.0);
    }

    #[test]
    fn zero_separation() {
        let spec = make_bernoulli_spec(0.0, 0.0, 8, 10, 0.5).unwrap();
        assert_eq!(spec.mu1, spec.mu2);
        let sep = spec.separation();
        assert_eq!((sep.delta_sq, sep.gamma), (0.0, 0.0));
        assert_eq!(spec.snr().unwrap(), 0.0);
    }

    #[test]
    fn small_bernoulli_means() {
        let spec = make_bernoulli_spec(0.04, 0.004, 10, 10, 0.5).unwrap();
        for k in 0..10 {
            let (a, b) = if k < 5 { (0.522, 0.482) } else { (0.482, 0.522) };
            assert!((spec.mu1[k] - a).abs() < 1e-15);
            assert!((spec.mu2[k] - b).abs() < 1e-15);
        }
        assert!((spec.separation().delta_sq - 0.016).abs() < 1e-15);
    }

    #[test]
    fn odd_p_still_exact_gamma() {
        let spec = make_bernoulli_spec(0.1, 0.01, 7, 10, 0.5).unwrap();
        assert_eq!(spec.mu1.iter().filter(|&&q| q > 0.5 + 0.01).count(), 4);
        assert!((spec.separation().gamma - 0.01).abs() < 1e-15);
    }

    #[test]
    fn rejects_means_outside_unit_interval() {
        assert!(make_bernoulli_spec(0.9, 0.3, 10, 10, 0.5).is_err());
        assert!(make_bernoulli_spec(0.9, -0.3, 10, 10, 0.5).is_err());
        assert!(make_bernoulli_spec(0.5, 0.0, 10, 10, 1.0).is_err());
        assert!(make_bernoulli_spec(0.5, 0.0, 10, 10, 0.01).is_err());
    }

    #[test]
    fn unit_coordinate_separation() {
        let mut mu1 = vec![0.0; 4];
        mu1[0] = 1.0;
        let spec = MixtureSpec::new(4, 4, 0.5, mu1, vec![0.0; 4], NoiseModel::IsotropicGaussian, 1.0).unwrap();
        let sep = spec.separation();
        assert_eq!((sep.delta_sq, sep.gamma), (1.0, 0.25));
    }

    #[test]
    fn isotropic_snr_arithmetic() {
        let (mu1, mu2) = mirrored_means(0.02, -0.02, 20000);
        let spec = MixtureSpec::new(300, 20000, 0.5, mu1, mu2, NoiseModel::IsotropicGaussian, 1.0).unwrap();
        // min(32, 300 * 20000 * 0.0016^2)
        assert!((spec.snr().unwrap() - 15.36).abs() < 1e-9);
    }

    #[test]
    fn diagonal_snr_reduces_to_isotropic() {
        let s0 = 1.7;
        let iso = {
            let (mu1, mu2) = mirrored_means(0.6, 0.4, 50);
            MixtureSpec::new(40, 50, 0.5, mu1, mu2, NoiseModel::IsotropicGaussian, 1.3).unwrap()
        };
        let mut aniso = diag_spec(40, 50, 0.5, s0, s0);
        aniso.subgaussian_bound = 1.3;
        let sep = iso.separation();
        let c0 = 1.3f64;
        let npg2 = 40.0 * 50.0 * sep.gamma * sep.gamma;
        let want = (sep.delta_sq / (c0 * c0) / (s0 * s0)).min(npg2 / c0.powi(4) / s0.powi(4));
        assert!((aniso.snr().unwrap() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn factor_snr_uses_covariance_norm() {
        let p = 6;
        let h = DenseMatrix::from_fn(p, p, |i, j| if i == j { 1.0 + i as f64 } else { 0.0 });
        let (mu1, mu2) = mirrored_means(1.0, 0.0, p);
        let spec = MixtureSpec::new(
            20,
            p,
            0.5,
            mu1,
            mu2,
            NoiseModel::GeneralFactor { h1: h.clone(), h2: h },
            1.0,
        )
        .unwrap();
        assert!((spec.max_noise_covariance_norm().unwrap() - 36.0).abs() < 1e-6);
    }

    #[test]
    fn variance_profiles_examples() {
        let spec = make_bernoulli_spec(0.04, 0.004, 100, 10, 0.5).unwrap();
        let (v1, v2) = spec.variance_profiles();
        assert!((v1 - v2).abs() < 1e-12);

        let spec = MixtureSpec::new(
            4,
            2,
            0.5,
            vec![0.0; 2],
            vec![1.0; 2],
            NoiseModel::DiagonalFactor {
                sigma1: vec![1.0, 2.0],
                sigma2: vec![1.0, 2.0],
            },
            1.0,
        )
        .unwrap();
        assert_eq!(spec.variance_profiles(), (5.0, 5.0));

        let p = 5;
        let eye = DenseMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { 0.0 });
        let spec = MixtureSpec::new(
            4,
            p,
            0.5,
            vec![0.0; p],
            vec![1.0; p],
            NoiseModel::GeneralFactor { h1: eye.clone(), h2: eye },
            1.0,
        )
        .unwrap();
        assert_eq!(spec.variance_profiles(), (5.0, 5.0));
    }

    #[test]
    fn cluster_sizes_round_half_up() {
        assert_eq!(cluster_size(10, 0.7), 7);
        assert_eq!(cluster_size(5, 0.5), 3);
        assert_eq!(cluster_size(3, 0.5), 2);
    }

    #[test]
    fn zero_noise_rows_equal_means() {
        let spec = diag_spec(6, 4, 0.5, 0.0, 0.0);
        let ds = sample(&spec, 3).unwrap();
        for i in 0..6 {
            assert_eq!(ds.x.row(i), spec.mean_row(i));
        }
    }

    #[test]
    fn bernoulli_support_and_determinism() {
        let spec = make_bernoulli_spec(0.04, 0.004, 30, 12, 0.7).unwrap();
        let a = sample(&spec, 99).unwrap();
        let b = sample(&spec, 99).unwrap();
        assert!(a.x.as_slice().iter().all(|&v| v == 0.0 || v == 1.0));
        assert_eq!(a, b);
        let c = sample(&spec, 100).unwrap();
        assert_ne!(a.x, c.x);
        assert_eq!(a.membership.count_positive(), 8);
    }

    #[test]
    fn empirical_row_mean_and_variance_profile() {
        let trials = 2000;
        let spec = diag_spec(2, 6, 0.5, 0.5, 1.5);
        let (v1, v2) = spec.variance_profiles();
        let mut mean = vec![[0.0f64; 6]; 2];
        let mut sq = [Vec::new(), Vec::new()];
        for t in 0..trials {
            let ds = sample(&spec, t as u64).unwrap();
            for i in 0..2 {
                let mut s = 0.0;
                for k in 0..6 {
                    let x = ds.x.get(i, k);
                    mean[i][k] += x / trials as f64;
                    s += (x - spec.mean_row(i)[k]).powi(2);
                }
                sq[i].push(s);
            }
        }
        let max_var = 1.5f64 * 1.5;
        for i in 0..2 {
            for k in 0..6 {
                assert!((mean[i][k] - spec.mean_row(i)[k]).abs() <= 4.0 * (max_var / trials as f64).sqrt());
            }
        }
        for (i, v) in [v1, v2].into_iter().enumerate() {
            let m = sq[i].iter().sum::<f64>() / trials as f64;
            let var = sq[i].iter().map(|s| (s - m).powi(2)).sum::<f64>() / (trials - 1) as f64;
            assert!((m - v).abs() <= 4.0 * (var / trials as f64).sqrt(), "cluster {i}: {m} vs {v}");
        }
    }

    #[test]
    fn config_round_trip_and_build() {
        let text = r#"{"model":"diagonal","n":12,"p":4,"w1":0.25,"alpha":0.2,"sigma1":0.5,"sigma2":[1,2,3,4],"seed":7}"#;
        let cfg = MixtureConfig::from_json(text).unwrap();
        assert!((cfg.eps() - 0.02).abs() < 1e-15);
        let spec = cfg.build().unwrap();
        assert_eq!(spec.cluster_sizes(), (3, 9));
        assert_eq!(spec.variance_profiles(), (1.0, 30.0));
        let again = MixtureConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(again, cfg);
        assert!(MixtureConfig::from_json(r#"{"n":4,"p":2,"bogus":1}"#).is_err());
    }

    #[test]
    fn factor_config_from_flat_arrays() {
        let text = r#"{"model":"factor","n":6,"p":2,"m":3,"h1":[1,0,0,0,1,0],"h2":[2,0,0,0,2,1]}"#;
        let spec = MixtureConfig::from_json(text).unwrap().build().unwrap();
        assert_eq!(spec.variance_profiles(), (2.0, 9.0));
        let bad = r#"{"model":"factor","n":6,"p":2,"m":1,"h1":[1,0],"h2":[1,0]}"#;
        assert!(MixtureConfig::from_json(bad).unwrap().build().is_err());
    }
}
