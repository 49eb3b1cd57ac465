//! Experiment configuration: a single declarative JSON file whose field
//! names match the config struct exactly. Unknown fields are rejected so
//! typos surface as parse errors with the offending path.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use qpmix::noise::{ErrorModel, UNIFORM_HI_FACTOR, UNIFORM_LO_FACTOR};

/// Which recipe to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Raw Trotter circuit, fixed over-rotation on every rotation; arms:
    /// exact, noisy, mixture.
    ConstantOverrotation,
    /// Per-gate over-rotations drawn uniformly with known mean; arms:
    /// exact, noisy, mixture (coefficients built from the mean).
    UniformOverrotation,
    /// Compiled Rz circuit with the three-axis synthesis-style error; arms:
    /// exact, noisy, twirl, mixture, mixture+twirl.
    UnstructuredModeled,
    /// As above, evaluated after each Trotter step with a fresh error
    /// direction per step.
    UnstructuredModeledSweep,
    /// Compiled Rz circuit with externally supplied per-gate error angles
    /// (from an actual gate-synthesis tool); arms as unstructured_modeled.
    ExternalSynthesisAngles,
    /// Offset-landscape scan; emits the (A, B, ‖γ‖₁) grid.
    AbScan,
    /// Accuracy versus number of sampled instances at fixed total shots.
    InstanceCountStudy,
}

/// Error model section of the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ErrorModelConfig {
    None,
    ConstantOverrotation {
        epsilon: f64,
    },
    UniformOverrotation {
        epsilon0: f64,
        #[serde(default = "default_lo_factor")]
        lo_factor: f64,
        #[serde(default = "default_hi_factor")]
        hi_factor: f64,
    },
    /// Magnitude plus direction; omit `direction` to draw a fresh random
    /// unit vector from the run seed.
    Unstructured {
        epsilon: f64,
        #[serde(default)]
        direction: Option<[f64; 3]>,
    },
}

fn default_lo_factor() -> f64 {
    UNIFORM_LO_FACTOR
}

fn default_hi_factor() -> f64 {
    UNIFORM_HI_FACTOR
}

impl ErrorModelConfig {
    /// Resolve to a concrete model; `direction` must already be resolved
    /// for the unstructured kind (see `experiments::resolve_direction`).
    pub fn to_model(&self, direction: Option<[f64; 3]>) -> anyhow::Result<ErrorModel> {
        Ok(match *self {
            ErrorModelConfig::None => ErrorModel::None,
            ErrorModelConfig::ConstantOverrotation { epsilon } => {
                ErrorModel::ConstantOverrotation { epsilon }
            }
            ErrorModelConfig::UniformOverrotation {
                epsilon0,
                lo_factor,
                hi_factor,
            } => ErrorModel::UniformOverrotation {
                epsilon0,
                lo_factor,
                hi_factor,
            },
            ErrorModelConfig::Unstructured { epsilon, .. } => {
                let dir = direction.ok_or_else(|| {
                    anyhow::anyhow!("error.direction unresolved for unstructured model")
                })?;
                qpmix::noise::build_unstructured(epsilon, dir)
                    .map_err(|e| anyhow::anyhow!("error.direction: {e}"))?
            }
        })
    }
}

/// Histogram resampling parameters: bootstrap `n_resamples` batch means of
/// `resample_size` draws (with replacement) and bin them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramSpec {
    #[serde(default = "default_resample_size")]
    pub resample_size: usize,
    #[serde(default = "default_n_resamples")]
    pub n_resamples: usize,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_resample_size() -> usize {
    10_000
}
fn default_n_resamples() -> usize {
    10_000
}
fn default_bins() -> usize {
    50
}

impl Default for HistogramSpec {
    fn default() -> Self {
        Self {
            resample_size: default_resample_size(),
            n_resamples: default_n_resamples(),
            bins: default_bins(),
        }
    }
}

/// One experiment run. JSON keys use the short physics names (`N`, `L`,
/// `T`, `h`, `J`, `S`, `s`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,

    /// Qubit count.
    #[serde(rename = "N")]
    pub n: usize,
    /// Trotter steps.
    #[serde(rename = "L")]
    pub l: usize,
    /// Evolution time.
    #[serde(rename = "T", default = "default_time")]
    pub t: f64,
    #[serde(default = "default_unit")]
    pub h: f64,
    #[serde(rename = "J", default = "default_unit")]
    pub j: f64,

    pub error: ErrorModelConfig,

    /// Total shots per arm.
    #[serde(rename = "S")]
    pub total_shots: u64,
    /// Shots per sampled instance.
    #[serde(rename = "s", default = "default_shots_per_instance")]
    pub shots_per_instance: u64,

    #[serde(default)]
    pub seed: u64,

    /// Accuracy target used when reporting the shot bound.
    #[serde(default = "default_delta")]
    pub delta: f64,

    /// Evaluation times for the sweep experiment; each must sit on the
    /// Trotter grid k·T/L. Omitted: every step 1..=L.
    #[serde(default)]
    pub time_sweep: Option<Vec<f64>>,

    /// Shots-per-instance grid for the instance-count study.
    #[serde(default)]
    pub s_sweep: Option<Vec<u64>>,

    /// Per-gate (ε_x, ε_y, ε_z) for external_synthesis_angles; a single
    /// triple broadcasts to every rotation.
    #[serde(default)]
    pub angles: Option<Vec<[f64; 3]>>,

    /// Grid resolution for ab_scan.
    #[serde(default = "default_grid")]
    pub grid_steps: usize,

    #[serde(default)]
    pub histogram: HistogramSpec,

    pub output_dir: PathBuf,
}

fn default_time() -> f64 {
    1.0
}
fn default_unit() -> f64 {
    1.0
}
fn default_shots_per_instance() -> u64 {
    qpmix::estimator::DEFAULT_SHOTS_PER_INSTANCE
}
fn default_delta() -> f64 {
    0.01
}
fn default_grid() -> usize {
    200
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| anyhow::anyhow!("config parse error: {e}"))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.n < 2 {
            anyhow::bail!("N: need at least 2 qubits, got {}", self.n);
        }
        if self.l < 1 {
            anyhow::bail!("L: need at least 1 Trotter step");
        }
        if self.total_shots == 0 {
            anyhow::bail!("S: total shots must be positive");
        }
        if self.shots_per_instance == 0 {
            anyhow::bail!("s: shots per instance must be positive");
        }
        if !self.total_shots.is_multiple_of(self.shots_per_instance) {
            anyhow::bail!(
                "s: {} does not divide S = {}",
                self.shots_per_instance,
                self.total_shots
            );
        }
        if self.histogram.resample_size == 0
            || self.histogram.n_resamples == 0
            || self.histogram.bins == 0
        {
            anyhow::bail!("histogram: all parameters must be positive");
        }
        match self.experiment {
            ExperimentKind::ConstantOverrotation => {
                if !matches!(
                    self.error,
                    ErrorModelConfig::ConstantOverrotation { .. } | ErrorModelConfig::None
                ) {
                    anyhow::bail!("error.kind: constant_overrotation experiment expects a constant (or no) error model");
                }
            }
            ExperimentKind::UniformOverrotation => {
                if !matches!(self.error, ErrorModelConfig::UniformOverrotation { .. }) {
                    anyhow::bail!(
                        "error.kind: uniform_overrotation experiment expects the uniform model"
                    );
                }
            }
            ExperimentKind::UnstructuredModeled | ExperimentKind::UnstructuredModeledSweep => {
                if !matches!(self.error, ErrorModelConfig::Unstructured { .. }) {
                    anyhow::bail!(
                        "error.kind: unstructured experiments expect the unstructured model"
                    );
                }
            }
            ExperimentKind::ExternalSynthesisAngles => {
                let angles = self.angles.as_ref().ok_or_else(|| {
                    anyhow::anyhow!("angles: required for external_synthesis_angles")
                })?;
                if angles.is_empty() {
                    anyhow::bail!("angles: need at least one (eps_x, eps_y, eps_z) triple");
                }
                let nu = 2 * self.n * self.l;
                if angles.len() != 1 && angles.len() != nu {
                    anyhow::bail!(
                        "angles: got {}, expected 1 (broadcast) or nu = {nu}",
                        angles.len()
                    );
                }
            }
            ExperimentKind::AbScan => {
                if self.grid_steps < 2 {
                    anyhow::bail!("grid_steps: need at least 2");
                }
            }
            ExperimentKind::InstanceCountStudy => {
                if let Some(sweep) = &self.s_sweep {
                    for &s in sweep {
                        if s == 0 || !self.total_shots.is_multiple_of(s) {
                            anyhow::bail!("s_sweep: every entry must divide S, offending s = {s}");
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// ν = 2NL for the Trotter circuits this harness builds.
    pub fn nu(&self) -> u64 {
        2 * self.n as u64 * self.l as u64
    }
}
