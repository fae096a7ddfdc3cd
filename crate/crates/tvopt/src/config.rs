//! Experiment configuration in TOML. Unknown keys are rejected everywhere and
//! every random stream takes an explicit seed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Format version understood by this build.
pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub problem: ProblemConfig,
    #[serde(default, rename = "solver", skip_serializing_if = "Vec::is_empty")]
    pub solvers: Vec<SolverConfig>,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_value(value: toml::Value) -> Result<Self> {
        let cfg: Self = value.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Replaces the problem seed.
    pub fn override_seed(&mut self, seed: u64) {
        *self.problem.seed_mut() = seed;
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported config version {} (this build reads version {CONFIG_VERSION})",
                self.version
            )));
        }
        let network = matches!(self.problem, ProblemConfig::Consensus(_));
        if network && !self.solvers.is_empty() {
            return Err(Error::Config(
                "the consensus problem runs its own network methods; remove the [[solver]] entries".into(),
            ));
        }
        if !network && self.solvers.is_empty() {
            return Err(Error::Config("at least one [[solver]] entry is required".into()));
        }
        for s in &self.solvers {
            if matches!(s, SolverConfig::PrimalDual { .. }) && !self.problem.has_constraints() {
                return Err(Error::Config(format!(
                    "solver `{}` needs a problem with constraints",
                    s.label()
                )));
            }
        }
        let mut labels: Vec<String> = self.solvers.iter().map(|s| s.label()).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!(
                "two solvers share the name `{}`; set `name` on one of them",
                w[0]
            )));
        }
        Ok(())
    }
}

/// Motion of the latent point or center.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriftConfig {
    pub amplitude: f64,
    pub omega: f64,
    pub velocity: f64,
    pub jumps: Vec<JumpConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpConfig {
    pub t: i64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegConfig {
    #[default]
    Zero,
    L1 { weight: f64 },
    Nuclear { weight: f64, rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetConfig {
    #[default]
    AllSpace,
    Nonneg,
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// `{x : matrix x = rhs}`, `matrix` given row by row.
    Affine { matrix: Vec<Vec<f64>>, rhs: Vec<f64> },
}

/// `c(x) = g x - h <= 0`, `g` given row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintConfig {
    pub g: Vec<Vec<f64>>,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaConfig {
    pub base: f64,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default)]
    pub omega: f64,
}

fn default_rows() -> usize {
    1
}

fn default_true() -> bool {
    true
}

/// The problem stream. `freeze_at = t` replaces the stream by its slice `t`
/// repeated over the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    Quadratic {
        dim: usize,
        eig_min: f64,
        eig_max: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rank: Option<usize>,
        horizon: usize,
        #[serde(default)]
        drift: DriftConfig,
        #[serde(default)]
        cost_shift: f64,
        #[serde(default)]
        reg: RegConfig,
        #[serde(default)]
        set: SetConfig,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        constraint: Option<ConstraintConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        freeze_at: Option<usize>,
        seed: u64,
    },
    /// Sliding-window least squares; with `lambda` it becomes the lasso.
    LeastSquares {
        dim: usize,
        #[serde(default = "default_rows")]
        rows: usize,
        window: usize,
        horizon: usize,
        #[serde(default)]
        drift: DriftConfig,
        #[serde(default)]
        noise_std: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<LambdaConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        freeze_at: Option<usize>,
        seed: u64,
    },
    /// The least-squares instance with two designed jumps.
    Fig1 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        freeze_at: Option<usize>,
        seed: u64,
    },
    Rpca {
        side: usize,
        frames: usize,
        clips: usize,
        rank: usize,
        sparse_fraction: f64,
        noise_std: f64,
        rotation: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<f64>,
        rho: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        freeze_at: Option<usize>,
        seed: u64,
    },
    Ssc {
        ambient: usize,
        subspace_dim: usize,
        subspaces: usize,
        points: usize,
        horizon: usize,
        arrival_period: usize,
        lambda: f64,
        noise_std: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        freeze_at: Option<usize>,
        seed: u64,
    },
    Feedback {
        outputs: usize,
        inputs: usize,
        exogenous: usize,
        horizon: usize,
        sensor_radius: f64,
        model_error: f64,
        w_omega: f64,
        target_amplitude: f64,
        target_omega: f64,
        /// Omit for an unbounded input.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        input_limit: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        freeze_at: Option<usize>,
        seed: u64,
    },
    /// Network tracking of the sum of local costs by five decentralized
    /// methods in three scenarios.
    Consensus(ConsensusConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsensusConfig {
    pub nodes: usize,
    pub horizon: usize,
    pub radius: f64,
    /// Edge-list file replacing the random geometric graph; relative paths
    /// resolve against the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_file: Option<PathBuf>,
    pub max_delay: usize,
    pub dgd_alpha: f64,
    pub dgd_alpha0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_beta: Option<f64>,
    pub admm_rho: f64,
    pub seed: u64,
}

impl ProblemConfig {
    pub fn seed(&self) -> u64 {
        match self {
            Self::Quadratic { seed, .. }
            | Self::LeastSquares { seed, .. }
            | Self::Fig1 { seed, .. }
            | Self::Rpca { seed, .. }
            | Self::Ssc { seed, .. }
            | Self::Feedback { seed, .. } => *seed,
            Self::Consensus(c) => c.seed,
        }
    }

    fn seed_mut(&mut self) -> &mut u64 {
        match self {
            Self::Quadratic { seed, .. }
            | Self::LeastSquares { seed, .. }
            | Self::Fig1 { seed, .. }
            | Self::Rpca { seed, .. }
            | Self::Ssc { seed, .. }
            | Self::Feedback { seed, .. } => seed,
            Self::Consensus(c) => &mut c.seed,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Quadratic { .. } => "quadratic",
            Self::LeastSquares { lambda: Some(_), .. } => "lasso",
            Self::LeastSquares { .. } => "least_squares",
            Self::Fig1 { .. } => "fig1",
            Self::Rpca { .. } => "rpca",
            Self::Ssc { .. } => "ssc",
            Self::Feedback { .. } => "feedback",
            Self::Consensus(_) => "consensus",
        }
    }

    pub fn has_constraints(&self) -> bool {
        matches!(self, Self::Quadratic { constraint: Some(_), .. })
    }
}

/// A step-size: a number or `"1/L"` (inverse of the largest `L_t` of the run).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepSize {
    Value(f64),
    Rule(StepRule),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepRule {
    #[serde(rename = "1/L")]
    InverseLipschitz,
}

impl Default for StepSize {
    fn default() -> Self {
        Self::Rule(StepRule::InverseLipschitz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualRuleConfig {
    AsPrinted,
    #[default]
    GradientAscent,
}

/// Heavy-ball parameters tuned from the constants of the first slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tuning {
    Polyak,
}

fn default_steps() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolverConfig {
    ProxGrad {
        #[serde(default)]
        alpha: StepSize,
        /// Steps per slice.
        #[serde(default = "default_steps")]
        steps: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    PrimalDual {
        alpha: f64,
        r: f64,
        #[serde(default)]
        dual_rule: DualRuleConfig,
        #[serde(default = "default_steps")]
        steps: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    Gd {
        #[serde(default)]
        alpha: StepSize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    NesterovV1 {
        #[serde(default)]
        alpha: StepSize,
        #[serde(default)]
        restart_on_slice: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    NesterovV2 {
        #[serde(default)]
        alpha: StepSize,
        /// `(mu, L)` for the momentum; defaults to each slice's constants.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        strong_convexity: Option<(f64, f64)>,
        #[serde(default)]
        restart_on_slice: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    HeavyBall {
        /// Ignored with `tuning`.
        #[serde(default)]
        alpha: StepSize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tuning: Option<Tuning>,
        #[serde(default)]
        restart_on_slice: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    Nlcg {
        #[serde(default)]
        restart_on_slice: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
}

impl SolverConfig {
    /// Name used in output files.
    pub fn label(&self) -> String {
        let (name, default) = match self {
            Self::ProxGrad { name, .. } => (name, "prox_grad"),
            Self::PrimalDual { name, .. } => (name, "primal_dual"),
            Self::Gd { name, .. } => (name, "gd"),
            Self::NesterovV1 { name, .. } => (name, "nesterov_v1"),
            Self::NesterovV2 { name, .. } => (name, "nesterov_v2"),
            Self::HeavyBall { name, .. } => (name, "heavy_ball"),
            Self::Nlcg { name, .. } => (name, "nlcg"),
        };
        name.clone().unwrap_or_else(|| default.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionConfig {
    Fixed,
    AlongGradient,
    #[default]
    RandomUnit,
}

/// Gradient error model; the seed drives the run's random state.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseConfig {
    #[default]
    None,
    Bounded {
        radius: f64,
        #[serde(default)]
        direction: DirectionConfig,
        seed: u64,
    },
    Gaussian {
        std: f64,
        clip: f64,
        seed: u64,
    },
    /// The problem's own measurement-based gradient.
    Measurement { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparatorConfig {
    /// Running mean of the oracle solutions.
    #[default]
    OracleMean,
    /// The final oracle solution at every step.
    FinalOracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    /// Fixed-point residual of the batch oracle.
    pub oracle_tol: f64,
    /// Tolerance of every per-step bound check.
    pub tol: f64,
    pub plateau_tol: f64,
    pub burn_in: usize,
    pub tail_fraction: f64,
    #[serde(default = "default_true")]
    pub certificates: bool,
    #[serde(default = "default_true")]
    pub regret: bool,
    pub comparator: ComparatorConfig,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            oracle_tol: 1e-10,
            tol: 1e-8,
            plateau_tol: 1e-8,
            burn_in: 5,
            tail_fraction: 0.2,
            certificates: true,
            regret: true,
            comparator: ComparatorConfig::OracleMean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Output directory; the command line and the environment take precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    /// Prepended to every output file name.
    pub prefix: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
version = 1
[problem]
kind = "quadratic"
dim = 3
eig_min = 1.0
eig_max = 4.0
horizon = 20
seed = 7
[[solver]]
method = "prox_grad"
alpha = 0.25
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.problem.seed(), 7);
        assert_eq!(cfg.noise, NoiseConfig::None);
        assert_eq!(cfg.metrics, MetricsConfig::default());
        assert!(matches!(
            cfg.solvers[0],
            SolverConfig::ProxGrad { alpha: StepSize::Value(a), steps: 1, .. } if a == 0.25
        ));
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("alpha = 0.25", "stepsize_typo = 0.25");
        let err = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("stepsize_typo"), "{err}");
        let text = MINIMAL.replace("seed = 7", "seed = 7\nwindo = 3");
        let err = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("windo"), "{err}");
    }

    #[test]
    fn version_is_checked() {
        let err = ExperimentConfig::from_toml(&MINIMAL.replace("version = 1", "version = 2")).unwrap_err();
        assert!(err.to_string().contains("version"));
    }

    #[test]
    fn seed_is_required() {
        assert!(ExperimentConfig::from_toml(&MINIMAL.replace("seed = 7", "")).is_err());
    }

    #[test]
    fn primal_dual_needs_constraints() {
        let text = MINIMAL.replace("method = \"prox_grad\"", "method = \"primal_dual\"\nr = 0.1");
        let err = ExperimentConfig::from_toml(&text).unwrap_err().to_string();
        assert!(err.contains("constraints"), "{err}");
    }

    #[test]
    fn step_rule_parses() {
        let cfg = ExperimentConfig::from_toml(&MINIMAL.replace("0.25", "\"1/L\"")).unwrap();
        assert!(matches!(
            cfg.solvers[0],
            SolverConfig::ProxGrad { alpha: StepSize::Rule(StepRule::InverseLipschitz), .. }
        ));
        assert!(ExperimentConfig::from_toml(&MINIMAL.replace("0.25", "\"1/M\"")).is_err());
    }

    #[test]
    fn echo_round_trips() {
        let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let again = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
    }
}
