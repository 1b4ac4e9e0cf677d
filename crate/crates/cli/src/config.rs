//! Experiment configuration: JSON schema, profiles and validation.

use serde::{Deserialize, Serialize};

use schwarz_core::dg::{default_penalty, Manufactured, ProblemConfig, SourceTerm};

/// PDE and discretization parameters as they appear in config files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSettings {
    #[serde(default = "one")]
    pub epsilon: f64,
    /// Convection coefficient.
    #[serde(default = "one")]
    pub b: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "unit_interval")]
    pub domain: (f64, f64),
    /// Named manufactured case: "sin", "poly" or "boundary-layer".
    #[serde(default = "sin_name")]
    pub source: String,
    #[serde(default = "default_ce")]
    pub penalty_ce: f64,
    #[serde(default = "one_usize")]
    pub degree_r: usize,
    #[serde(default)]
    pub boundary_only_penalty: bool,
}

fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn unit_interval() -> (f64, f64) {
    (0.0, 1.0)
}
fn sin_name() -> String {
    "sin".into()
}
fn default_ce() -> f64 {
    default_penalty::<f64>(1)
}

impl Default for ProblemSettings {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            b: 1.0,
            gamma: 1.0,
            domain: (0.0, 1.0),
            source: "sin".into(),
            penalty_ce: default_ce(),
            degree_r: 1,
            boundary_only_penalty: false,
        }
    }
}

impl ProblemSettings {
    pub fn to_problem(&self) -> Result<ProblemConfig<f64>, String> {
        let case = Manufactured::by_name(&self.source)
            .ok_or_else(|| format!("unknown manufactured case '{}'", self.source))?;
        let cfg = ProblemConfig {
            epsilon: self.epsilon,
            convection: self.b,
            gamma: self.gamma,
            domain: self.domain,
            source: SourceTerm::Manufactured(case),
            penalty_ce: self.penalty_ce,
            degree: self.degree_r,
            boundary_only_penalty: self.boundary_only_penalty,
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

/// Full experiment description; unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub problem: ProblemSettings,
    #[serde(default = "desk_h")]
    pub h_inv: usize,
    #[serde(rename = "H_inv", default = "desk_coarse")]
    pub coarse_inv: usize,
    #[serde(rename = "J_list", default = "desk_j_list")]
    pub j_list: Vec<usize>,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "default_tol")]
    pub gmres_tol: f64,
    #[serde(default = "default_max_iter")]
    pub gmres_max_iter: usize,
    #[serde(default = "default_tol")]
    pub mult_tol: f64,
    #[serde(default = "default_out")]
    pub outputs: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn desk_h() -> usize {
    64
}
fn desk_coarse() -> usize {
    16
}
fn desk_j_list() -> Vec<usize> {
    vec![4, 8, 16]
}
fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    1000
}
fn default_out() -> String {
    "out".into()
}
fn default_seed() -> u64 {
    1234
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("default config")
    }
}

/// Mesh/J presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `h = 1/64, H = 1/16, J in {4, 8, 16}`; seconds on a laptop.
    Desk,
    /// `h = 1/256, H = 1/64, J in {4, 8, 16, 32, 64}`.
    Paper,
}

impl Profile {
    pub fn parse(name: &str) -> Result<Self, String> {
        match name {
            "desk" => Ok(Self::Desk),
            "paper" => Ok(Self::Paper),
            other => Err(format!("unknown profile '{other}' (expected desk|paper)")),
        }
    }

    pub fn apply(self, cfg: &mut ExperimentConfig) {
        match self {
            Self::Desk => {
                cfg.h_inv = 64;
                cfg.coarse_inv = 16;
                cfg.j_list = vec![4, 8, 16];
            }
            Self::Paper => {
                cfg.h_inv = 256;
                cfg.coarse_inv = 64;
                cfg.j_list = vec![4, 8, 16, 32, 64];
            }
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.gmres_tol > 0.0 && self.gmres_tol < 1.0) {
            return Err(format!("gmres_tol {} outside (0, 1)", self.gmres_tol));
        }
        if !(self.mult_tol > 0.0 && self.mult_tol < 1.0) {
            return Err(format!("mult_tol {} outside (0, 1)", self.mult_tol));
        }
        if self.h_inv == 0 || self.coarse_inv == 0 {
            return Err("mesh sizes must be positive".into());
        }
        if !self.h_inv.is_multiple_of(self.coarse_inv) {
            return Err(format!(
                "H_inv {} does not divide h_inv {}",
                self.coarse_inv, self.h_inv
            ));
        }
        for &j in &self.j_list {
            if j == 0 || !self.coarse_inv.is_multiple_of(j) {
                return Err(format!("J = {j} does not divide H_inv {}", self.coarse_inv));
            }
        }
        self.problem.to_problem()?;
        Ok(())
    }
}

/// The experiment identifiers from the study: four convection-dominated
/// coefficient sets plus a free-form one taken from the config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestId {
    Test1,
    Test2,
    Test3,
    Test4,
    Custom,
}

impl TestId {
    pub fn parse(name: &str) -> Result<Self, String> {
        match name {
            "test1" => Ok(Self::Test1),
            "test2" => Ok(Self::Test2),
            "test3" => Ok(Self::Test3),
            "test4" => Ok(Self::Test4),
            "custom" => Ok(Self::Custom),
            other => Err(format!(
                "unknown test id '{other}' (expected test1..test4|custom)"
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Test1 => "test1",
            Self::Test2 => "test2",
            Self::Test3 => "test3",
            Self::Test4 => "test4",
            Self::Custom => "custom",
        }
    }

    /// Convection coefficient for the named tests (`eps = gamma = 1`).
    pub fn convection(&self) -> Option<f64> {
        match self {
            Self::Test1 => Some(1_000.0),
            Self::Test2 => Some(2_000.0),
            Self::Test3 => Some(10_000.0),
            Self::Test4 => Some(100_000.0),
            Self::Custom => None,
        }
    }

    /// Problem for this test under the given configuration.
    pub fn problem(&self, cfg: &ExperimentConfig) -> Result<ProblemConfig<f64>, String> {
        let mut problem = cfg.problem.to_problem()?;
        if let Some(b) = self.convection() {
            problem.epsilon = 1.0;
            problem.convection = b;
            problem.gamma = 1.0;
        }
        Ok(problem)
    }
}
