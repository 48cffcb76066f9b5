//! Experiment driver: success-rate sweeps, angle studies and the
//! verification suite, all emitting CSV.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics;
use crate::mixture::{sample, MixtureConfig, MixtureSpec, ModelKind, ScalarOrVec};
use crate::preprocessing::{build_a, center};
use crate::sdp::{self, SolverOptions};
use crate::seeding::derive_seed;
use crate::spectral;
use crate::verify::{self, VerifyHooks, VerifyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Sweep,
    Angles,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Elliptope relaxation of `A`, rounded by signs.
    Sdp,
    /// Leading eigenvector of `Y Y^T` followed by the sorted split.
    SpectralPw,
    /// Leading eigenvector of `Y Y^T` rounded by signs.
    SpectralSign,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sdp => "sdp",
            Algorithm::SpectralPw => "spectral_pw",
            Algorithm::SpectralSign => "spectral_sign",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "sdp" => Ok(Algorithm::Sdp),
            "spectral_pw" => Ok(Algorithm::SpectralPw),
            "spectral_sign" => Ok(Algorithm::SpectralSign),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Everything needed to reproduce one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub mode: Mode,
    pub n_grid: Vec<usize>,
    pub p_grid: Vec<usize>,
    pub w1: f64,
    pub alpha: f64,
    /// Defaults to `0.1 * alpha`.
    #[serde(default)]
    pub eps: Option<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    /// Noise law; `diagonal` with `sigma = 0` gives noiseless data.
    #[serde(default = "default_model")]
    pub model: ModelKind,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_model() -> ModelKind {
    ModelKind::Bernoulli
}

impl ExperimentPlan {
    /// Desk-scale defaults for each mode.
    pub fn defaults(mode: Mode) -> Self {
        let (n_grid, p_grid, w1) = match mode {
            Mode::Angles => (vec![100, 200, 400], vec![20000], 0.7),
            _ => (vec![50, 100, 200], vec![500, 20000], 0.5),
        };
        Self {
            mode,
            n_grid,
            p_grid,
            w1,
            alpha: 0.04,
            eps: None,
            trials: 10,
            master_seed: 0,
            algorithms: vec![Algorithm::Sdp, Algorithm::SpectralPw, Algorithm::SpectralSign],
            output_path: None,
            model: ModelKind::Bernoulli,
            sigma: None,
            solver: SolverOptions::default(),
            threads: None,
        }
    }

    /// Overlays the keys of a JSON object onto `defaults(mode)`.
    pub fn from_json_over_defaults(mode: Mode, text: &str) -> Result<Self> {
        let overlay: serde_json::Value = serde_json::from_str(text)?;
        let serde_json::Value::Object(overlay) = overlay else {
            return Err(Error::Config("plan must be a JSON object".into()));
        };
        let mut base = serde_json::to_value(Self::defaults(mode))?;
        let obj = base.as_object_mut().expect("plan serializes to an object");
        for (k, v) in overlay {
            obj.insert(k, v);
        }
        let plan: Self = serde_json::from_value(base)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn eps(&self) -> f64 {
        self.eps.unwrap_or(0.1 * self.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.n_grid.is_empty() || self.p_grid.is_empty() {
            return Err(Error::Config("n_grid and p_grid must be nonempty".into()));
        }
        if self.algorithms.is_empty() && self.mode == Mode::Sweep {
            return Err(Error::Config("at least one algorithm is required".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        self.solver.validate()?;
        for &n in &self.n_grid {
            for &p in &self.p_grid {
                self.spec(n, p)?;
            }
        }
        Ok(())
    }

    /// Mixture for one `(n, p)` cell.
    pub fn spec(&self, n: usize, p: usize) -> Result<MixtureSpec> {
        let sigma = self.sigma.map(ScalarOrVec::Scalar);
        MixtureConfig {
            model: self.model,
            n,
            p,
            w1: self.w1,
            alpha: self.alpha,
            eps: Some(self.eps()),
            sigma1: sigma.clone(),
            sigma2: sigma,
            m: None,
            h1: None,
            h2: None,
            subgaussian_bound: None,
            seed: 0,
        }
        .build()
    }

    fn cells(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for &p in &self.p_grid {
            for &n in &self.n_grid {
                cells.push((n, p));
            }
        }
        cells
    }

    fn algorithms(&self) -> Vec<Algorithm> {
        let mut a = self.algorithms.clone();
        a.sort();
        a.dedup();
        a
    }

    fn in_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            Some(k) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| Error::Config(e.to_string()))?;
                Ok(pool.install(f))
            }
            None => Ok(f()),
        }
    }
}

/// Aggregate of one `(algorithm, n, p)` cell. Column order is the CSV
/// header; the `z` columns are empty for spectral rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub algorithm: String,
    pub n: usize,
    pub p: usize,
    pub gamma: f64,
    pub np_gamma_sq: f64,
    pub trials: usize,
    pub mean_success: f64,
    pub std_success: f64,
    pub mean_theta_deg: f64,
    pub mean_sin_theta: f64,
    pub mean_z_l1: Option<f64>,
    pub mean_z_frob: Option<f64>,
    pub mean_z_op: Option<f64>,
    pub failures: usize,
    pub wall_ms: u64,
}

pub const SWEEP_HEADER: &str = "algorithm,n,p,gamma,np_gamma_sq,trials,mean_success,std_success,mean_theta_deg,mean_sin_theta,mean_z_l1,mean_z_frob,mean_z_op,failures,wall_ms";

#[derive(Debug, Clone, Copy)]
struct Outcome {
    success: f64,
    theta: f64,
    z: Option<metrics::ZDistances>,
    ms: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, c) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if c == 0 {
        f64::NAN
    } else {
        s / c as f64
    }
}

/// Sample standard deviation; zero for fewer than two values.
fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs.iter().copied());
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn solver_options(plan: &ExperimentPlan, trial_seed: u64) -> SolverOptions {
    SolverOptions {
        seed: derive_seed(trial_seed, &[1]),
        ..plan.solver.clone()
    }
}

fn run_trial(
    plan: &ExperimentPlan,
    spec: &MixtureSpec,
    seed: u64,
    algorithms: &[Algorithm],
) -> Vec<Result<Outcome>> {
    let start = Instant::now();
    let prepared = sample(spec, seed).and_then(|ds| Ok((center(&ds.x)?, ds)));
    let prep_ms = elapsed_ms(start);
    let (cd, ds) = match prepared {
        Ok(v) => v,
        Err(e) => {
            let msg = e.to_string();
            return algorithms.iter().map(|_| Err(Error::Infeasible(msg.clone()))).collect();
        }
    };
    let truth = &ds.membership;
    let xbar = truth.to_f64();
    let v1bar = spectral::reference_v1(spec);

    let spectral_vec = if algorithms.iter().any(|a| *a != Algorithm::Sdp) {
        let t = Instant::now();
        let e = spectral::top_eigen(&cd.gram, spectral::DEFAULT_EIGEN_TOL).map(|e| e.vector);
        Some((e, elapsed_ms(t)))
    } else {
        None
    };

    algorithms
        .iter()
        .map(|&alg| -> Result<Outcome> {
            match alg {
                Algorithm::Sdp => {
                    let t = Instant::now();
                    let sol = sdp::solve(&build_a(&cd), &solver_options(plan, seed))?;
                    let pred = sdp::round_signs(&sol.xhat);
                    let ms = elapsed_ms(t) + prep_ms;
                    Ok(Outcome {
                        success: metrics::success_rate(&pred, truth)?,
                        theta: metrics::axis_angle_deg(&sol.xhat, &xbar)?,
                        z: Some(metrics::z_distances(&sol, truth)?),
                        ms,
                    })
                }
                Algorithm::SpectralPw | Algorithm::SpectralSign => {
                    let (v, eig_ms) = spectral_vec.as_ref().expect("computed above");
                    let v = v.as_ref().map_err(|e| Error::Infeasible(e.to_string()))?;
                    let t = Instant::now();
                    let pred = if alg == Algorithm::SpectralPw {
                        spectral::peng_wei_split(v, &cd.y)?.partition
                    } else {
                        spectral::sign_split(v)
                    };
                    Ok(Outcome {
                        success: metrics::success_rate(&pred, truth)?,
                        theta: metrics::axis_angle_deg(v, &v1bar)?,
                        z: None,
                        ms: elapsed_ms(t) + eig_ms + prep_ms,
                    })
                }
            }
        })
        .collect()
}

/// Runs every `(n, p, trial)` job. The dataset of a job depends only on
/// `(master_seed, n, p, trial)` and is shared by all algorithms.
pub fn run_sweep(plan: &ExperimentPlan) -> Result<Vec<SweepRow>> {
    plan.validate()?;
    let algorithms = plan.algorithms();
    let cells = plan.cells();
    let specs: Vec<MixtureSpec> = cells.iter().map(|&(n, p)| plan.spec(n, p)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..plan.trials).map(move |t| (c, t)))
        .collect();

    let results: Vec<Vec<Result<Outcome>>> = plan.in_pool(|| {
        jobs.par_iter()
            .map(|&(c, t)| {
                let (n, p) = cells[c];
                let seed = derive_seed(plan.master_seed, &[n as u64, p as u64, t as u64]);
                run_trial(plan, &specs[c], seed, &algorithms)
            })
            .collect()
    })?;

    let mut rows = Vec::new();
    for (c, &(n, p)) in cells.iter().enumerate() {
        let spec = &specs[c];
        let sep = spec.separation();
        let cell = &results[c * plan.trials..(c + 1) * plan.trials];
        for (k, alg) in algorithms.iter().enumerate() {
            let ok: Vec<Outcome> = cell.iter().filter_map(|r| r[k].as_ref().ok().copied()).collect();
            let successes: Vec<f64> = ok.iter().map(|o| o.success).collect();
            let z_mean = |f: fn(&metrics::ZDistances) -> f64| -> Option<f64> {
                (*alg == Algorithm::Sdp).then(|| mean(ok.iter().filter_map(|o| o.z.as_ref().map(f))))
            };
            rows.push(SweepRow {
                algorithm: alg.name().to_string(),
                n,
                p,
                gamma: sep.gamma,
                np_gamma_sq: n as f64 * p as f64 * sep.gamma * sep.gamma,
                trials: plan.trials,
                mean_success: mean(successes.iter().copied()),
                std_success: std_dev(&successes),
                mean_theta_deg: mean(ok.iter().map(|o| o.theta)),
                mean_sin_theta: mean(ok.iter().map(|o| o.theta.to_radians().sin())),
                mean_z_l1: z_mean(|z| z.l1),
                mean_z_frob: z_mean(|z| z.frob),
                mean_z_op: z_mean(|z| z.op),
                failures: plan.trials - ok.len(),
                wall_ms: ok.iter().map(|o| o.ms).sum::<f64>().round() as u64,
            });
        }
    }
    Ok(rows)
}

/// Aggregate of one `(n, p)` cell of the angle study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleRow {
    pub n: usize,
    pub p: usize,
    pub w1: f64,
    pub np_gamma_sq: f64,
    pub trials: usize,
    /// Angle between `x_hat` and `x_bar`.
    pub mean_theta_sdp_deg: f64,
    /// Angle between the leading eigenvectors of `Y Y^T` and `R`.
    pub mean_theta_1_deg: f64,
    /// Angle between `x_hat` and the leading eigenvector of `Y Y^T`.
    pub mean_phi_deg: f64,
    pub mean_sin_theta_sdp: f64,
    pub mean_sin_theta_1: f64,
    pub mean_z_l1: f64,
    pub mean_z_frob: f64,
    pub mean_z_op: f64,
    /// Angle between `v1_bar` and `x_bar`; a property of the design only.
    pub ref_angle_deg: f64,
    pub failures: usize,
    pub wall_ms: u64,
}

pub const ANGLE_HEADER: &str = "n,p,w1,np_gamma_sq,trials,mean_theta_sdp_deg,mean_theta_1_deg,mean_phi_deg,mean_sin_theta_sdp,mean_sin_theta_1,mean_z_l1,mean_z_frob,mean_z_op,ref_angle_deg,failures,wall_ms";

#[derive(Debug, Clone, Copy)]
struct AngleOutcome {
    theta_sdp: f64,
    theta_1: f64,
    phi: f64,
    z: metrics::ZDistances,
    ms: f64,
}

fn angle_trial(plan: &ExperimentPlan, spec: &MixtureSpec, seed: u64) -> Result<AngleOutcome> {
    let t = Instant::now();
    let ds = sample(spec, seed)?;
    let cd = center(&ds.x)?;
    let sol = sdp::solve(&build_a(&cd), &solver_options(plan, seed))?;
    let v1 = spectral::top_eigen(&cd.gram, spectral::DEFAULT_EIGEN_TOL)?.vector;
    let xbar = ds.membership.to_f64();
    Ok(AngleOutcome {
        theta_sdp: metrics::axis_angle_deg(&sol.xhat, &xbar)?,
        theta_1: metrics::axis_angle_deg(&v1, &spectral::reference_v1(spec))?,
        phi: metrics::axis_angle_deg(&sol.xhat, &v1)?,
        z: metrics::z_distances(&sol, &ds.membership)?,
        ms: elapsed_ms(t),
    })
}

/// Angles between the SDP estimate, the spectral estimate and their
/// population counterparts, per `(n, p)` cell.
pub fn run_angles(plan: &ExperimentPlan) -> Result<Vec<AngleRow>> {
    plan.validate()?;
    let cells = plan.cells();
    let specs: Vec<MixtureSpec> = cells.iter().map(|&(n, p)| plan.spec(n, p)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..plan.trials).map(move |t| (c, t)))
        .collect();
    let results: Vec<Result<AngleOutcome>> = plan.in_pool(|| {
        jobs.par_iter()
            .map(|&(c, t)| {
                let (n, p) = cells[c];
                let seed = derive_seed(plan.master_seed, &[n as u64, p as u64, t as u64]);
                angle_trial(plan, &specs[c], seed)
            })
            .collect()
    })?;

    let mut rows = Vec::new();
    for (c, &(n, p)) in cells.iter().enumerate() {
        let spec = &specs[c];
        let gamma = spec.separation().gamma;
        let ok: Vec<AngleOutcome> = results[c * plan.trials..(c + 1) * plan.trials]
            .iter()
            .filter_map(|r| r.as_ref().ok().copied())
            .collect();
        let sin = |d: f64| d.to_radians().sin();
        let ref_angle_deg =
            metrics::axis_angle_deg(&spectral::reference_v1(spec), &spec.membership().to_f64())?;
        rows.push(AngleRow {
            n,
            p,
            w1: plan.w1,
            np_gamma_sq: n as f64 * p as f64 * gamma * gamma,
            trials: plan.trials,
            mean_theta_sdp_deg: mean(ok.iter().map(|o| o.theta_sdp)),
            mean_theta_1_deg: mean(ok.iter().map(|o| o.theta_1)),
            mean_phi_deg: mean(ok.iter().map(|o| o.phi)),
            mean_sin_theta_sdp: mean(ok.iter().map(|o| sin(o.theta_sdp))),
            mean_sin_theta_1: mean(ok.iter().map(|o| sin(o.theta_1))),
            mean_z_l1: mean(ok.iter().map(|o| o.z.l1)),
            mean_z_frob: mean(ok.iter().map(|o| o.z.frob)),
            mean_z_op: mean(ok.iter().map(|o| o.z.op)),
            ref_angle_deg,
            failures: plan.trials - ok.len(),
            wall_ms: ok.iter().map(|o| o.ms).sum::<f64>().round() as u64,
        });
    }
    Ok(rows)
}

/// `arccos(2 sqrt(w1 w2))` in degrees: the angle between `v1_bar` and
/// `x_bar` for exact weights.
pub fn reference_angle_deg(w1: f64) -> f64 {
    (2.0 * (w1 * (1.0 - w1)).sqrt()).clamp(-1.0, 1.0).acos().to_degrees()
}

/// The fixed-size verification suite.
pub fn run_verify(seed: u64) -> Result<VerifyReport> {
    run_verify_with(seed, &VerifyHooks::default())
}

pub fn run_verify_with(seed: u64, hooks: &VerifyHooks) -> Result<VerifyReport> {
    verify::run_suite(seed, hooks)
}

/// Writes serializable rows as CSV with a header line.
pub fn write_rows<W: std::io::Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}
