//! JSON run configuration.
//!
//! Every section is optional and falls back to the documented defaults:
//! an 8×8 grid, `(a, b, c, δ, p) = (1, 1, 1, 1, 1)`, the cubic with
//! `α = 0.5`, `dt = 1e-3`, `t_end = 50`, and random initial data with seed 42
//! and amplitude 1. The defaults are arbitrary desk-scale choices.
//! Unknown keys are rejected everywhere.

use std::path::{Path, PathBuf};

use fhn_cnn::model::CustomFn;
use fhn_cnn::{CnnParams, Field, GridDims, GridState, Nonlinearity, NonlinearityCert, StepperConfig, System};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_dims")]
    pub dims: GridDims,
    #[serde(default)]
    pub params: CnnParams,
    #[serde(default)]
    pub nonlinearity: NonlinearityConfig,
    #[serde(default)]
    pub stepper: StepperConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_dims() -> GridDims {
    GridDims { m: 8, n: 8, h_x: 1.0, h_y: 1.0 }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dims: default_dims(),
            params: CnnParams::default(),
            nonlinearity: NonlinearityConfig::default(),
            stepper: StepperConfig::default(),
            initial: InitialConfig::default(),
            outputs: OutputConfig::default(),
            sweep: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub lambda: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NonlinearityConfig {
    /// `s(s − α)(1 − s)`. The certificate defaults to the closed form.
    Cubic {
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        certificate: Option<Certificate>,
    },
    /// Polynomial `Σ c_j s^j`, coefficients in ascending degree.
    Custom { coefficients: Vec<f64>, certificate: Certificate },
}

impl Default for NonlinearityConfig {
    fn default() -> Self {
        NonlinearityConfig::Cubic { alpha: 0.5, certificate: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialConfig {
    Uniform {
        x: f64,
        y: f64,
    },
    /// Entries uniform in `[−amplitude, amplitude]`.
    Random {
        seed: u64,
        amplitude: f64,
    },
    /// JSON object with row-major `x` and `y` arrays (an optional `t` is
    /// ignored, so a `states.jsonl` line can be reused).
    File {
        path: PathBuf,
    },
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig::Random { seed: 42, amplitude: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// `states.jsonl`
    States,
    /// `summary.json`
    Summary,
    /// `sync_error.svg`
    Svg,
}

/// `scalars.csv` is always written; `formats` selects the optional files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Summary, OutputFormat::Svg]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: default_out_dir(), formats: default_formats() }
    }
}

impl OutputConfig {
    pub fn wants(&self, format: OutputFormat) -> bool {
        self.formats.contains(&format)
    }
}

/// Grids over the coupling `a` and the feedback gain `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub a: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    #[serde(default)]
    #[allow(dead_code)]
    t: Option<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
}

fn field_error(field: &str, err: fhn_cnn::Error) -> CliError {
    CliError::Config(format!("{field}: {err}"))
}

impl RunConfig {
    /// Parses JSON, reporting the offending key path with line and column.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("at `{path}`: {}", e.into_inner()))
        })
    }

    /// Reads a config file; a relative `initial.path` is resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg =
            Self::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let InitialConfig::File { path: p } = &mut cfg.initial {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn certificate(&self) -> Result<NonlinearityCert, CliError> {
        match &self.nonlinearity {
            NonlinearityConfig::Cubic { alpha, certificate: None } => {
                NonlinearityCert::cubic(*alpha).map_err(|e| field_error("nonlinearity.alpha", e))
            }
            NonlinearityConfig::Cubic { alpha, certificate: Some(c) } => {
                NonlinearityCert::new(Nonlinearity::Cubic { alpha: *alpha }, c.lambda, c.beta, c.gamma)
                    .map_err(|e| field_error("nonlinearity", e))
            }
            NonlinearityConfig::Custom { coefficients, certificate: c } => {
                if coefficients.is_empty() || coefficients.iter().any(|v| !v.is_finite()) {
                    return Err(CliError::Config(
                        "nonlinearity.coefficients: need at least one finite coefficient".into(),
                    ));
                }
                let f = Nonlinearity::Custom(CustomFn::polynomial(coefficients.clone()));
                NonlinearityCert::new(f, c.lambda, c.beta, c.gamma)
                    .map_err(|e| field_error("nonlinearity.certificate", e))
            }
        }
    }

    /// Validates every section and assembles the lattice.
    pub fn system(&self) -> Result<System, CliError> {
        self.dims.validate().map_err(|e| field_error("dims", e))?;
        self.params.validate().map_err(|e| field_error("params", e))?;
        self.stepper.validate().map_err(|e| field_error("stepper", e))?;
        if let InitialConfig::Random { amplitude, .. } = self.initial {
            if !(amplitude >= 0.0 && amplitude.is_finite()) {
                return Err(CliError::Config(format!(
                    "initial.amplitude: must be non-negative, got {amplitude}"
                )));
            }
        }
        if let Some(sweep) = &self.sweep {
            for (name, grid) in [("sweep.a", &sweep.a), ("sweep.p", &sweep.p)] {
                if let Some(v) = grid.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                    return Err(CliError::Config(format!("{name}: values must be positive, got {v}")));
                }
            }
        }
        let cert = self.certificate()?;
        System::new(self.dims, self.params, cert).map_err(|e| field_error("config", e))
    }

    pub fn initial_state(&self) -> Result<GridState, CliError> {
        let dims = &self.dims;
        match &self.initial {
            InitialConfig::Uniform { x, y } => Ok(GridState::uniform(dims, *x, *y)),
            InitialConfig::Random { seed, amplitude } => Ok(GridState::random(dims, *amplitude, *seed)),
            InitialConfig::File { path } => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("initial.path: cannot read {}: {e}", path.display()))
                })?;
                let file: StateFile = serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("initial.path: {}: {e}", path.display())))?;
                let x = Field::from_vec(dims, file.x).map_err(|e| field_error("initial.x", e))?;
                let y = Field::from_vec(dims, file.y).map_err(|e| field_error("initial.y", e))?;
                GridState::new(x, y).map_err(|e| field_error("initial", e))
            }
        }
    }

    /// Applies `--seed`: replaces the seed of random initial data.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let InitialConfig::Random { seed: s, .. } = &mut self.initial {
            *s = seed;
        }
        self
    }

    /// Seed for verification fields: the random-initial seed, else 42.
    pub fn seed(&self) -> u64 {
        match self.initial {
            InitialConfig::Random { seed, .. } => seed,
            _ => 42,
        }
    }
}
