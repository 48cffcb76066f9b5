//! Two-population clustering by an elliptope relaxation of the adjusted
//! centered Gram matrix, with a spectral baseline, analytic reference
//! matrices and exact small-n oracles.

pub mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod mixture;
pub mod partition;
pub mod preprocessing;
pub mod sdp;
pub mod seeding;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use harness::{run_angles, run_sweep, run_verify, Algorithm, AngleRow, ExperimentPlan, Mode, SweepRow};
pub use linalg::{DenseMatrix, SymmetricMatrix};
pub use metrics::{success_rate, TrialMetrics, ZDistances};
pub use mixture::{make_bernoulli_spec, sample, Dataset, MixtureConfig, MixtureSpec, NoiseModel};
pub use partition::Partition;
pub use preprocessing::{build_a, center, expected_bias, expected_gram, oracle_b, reference_r, CenteredData};
pub use sdp::{round_signs, solve, SdpSolution, SolverOptions};
pub use spectral::{peng_wei_split, top_eigen, EigenResult, SplitResult};
