//! Run configuration: a JSON file with every field optional, overridden by
//! command-line flags.

use std::path::{Path, PathBuf};

use rectiscope::curvature::{CurvOptions, DEFAULT_SAMPLES, DEFAULT_TUPLE_BUDGET};
use rectiscope::density::DEFAULT_CHOP_DEPTH;
use rectiscope::verify::CurvDomain;
use rectiscope::{GeneratorSpec, MethodChoice, SamplingStrategy, ScaleConfig, SecantMode};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// JSON summary path.
    pub report: Option<PathBuf>,
    /// Intrinsic dimension.
    pub n: usize,
    pub p: f64,
    pub alpha: f64,
    pub scales: ScaleConfig,
    pub r: f64,
    pub seed: u64,
    /// `all`, `sample:K` or `file:PATH` (one atom index per line).
    pub centers: String,
    pub centered: bool,
    pub dini_gamma: Option<f64>,
    pub curvature: CurvatureSettings,
    pub secant: SecantSettings,
    pub chop: ChopSettings,
    pub verify: VerifySettings,
    pub generator: GeneratorSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            output: None,
            report: None,
            n: 1,
            p: 2.0,
            alpha: 0.0,
            scales: ScaleConfig::default(),
            r: 1.0,
            seed: 0,
            centers: "all".into(),
            centered: false,
            dini_gamma: None,
            curvature: CurvatureSettings::default(),
            secant: SecantSettings::default(),
            chop: ChopSettings::default(),
            verify: VerifySettings::default(),
            generator: GeneratorSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurvatureSettings {
    pub method: MethodChoice,
    pub samples: usize,
    pub strategy: SamplingStrategy,
    pub budget: u64,
}

impl Default for CurvatureSettings {
    fn default() -> Self {
        CurvatureSettings {
            method: MethodChoice::Auto,
            samples: DEFAULT_SAMPLES,
            strategy: SamplingStrategy::AnnulusStratified,
            budget: DEFAULT_TUPLE_BUDGET as u64,
        }
    }
}

impl CurvatureSettings {
    pub fn options(&self, seed: u64) -> CurvOptions {
        CurvOptions {
            method: self.method,
            samples: self.samples,
            seed,
            strategy: self.strategy,
            budget: self.budget as u128,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SecantSettings {
    pub lambda: f64,
    pub c0: f64,
    pub k: u32,
    pub mode: SecantMode,
    pub x_index: usize,
    /// Tuples sampled when checking the frame's conclusions.
    pub check_samples: usize,
}

impl Default for SecantSettings {
    fn default() -> Self {
        SecantSettings {
            lambda: 1.0,
            c0: 2.0,
            k: 2,
            mode: SecantMode::Empirical,
            x_index: 0,
            check_samples: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChopSettings {
    pub k: u32,
    pub depth: usize,
}

impl Default for ChopSettings {
    fn default() -> Self {
        ChopSettings {
            k: 4,
            depth: DEFAULT_CHOP_DEPTH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    BetaCurv,
    JonesCurv,
    Holder,
    Volume,
}

impl Suite {
    pub fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    pub suite: Suite,
    /// Random simplices per dimension for the volume identity.
    pub trials: usize,
    pub max_dim: usize,
    pub ambient_dim: usize,
    /// Longest `(δ/3)ʲ` ladder for the Jones check.
    pub max_scales: usize,
    /// Exponent and Hölder order for the chained-sum check.
    pub holder_p: f64,
    pub holder_alpha: f64,
    pub domain: CurvDomain,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings {
            suite: Suite::All,
            trials: 1000,
            max_dim: 4,
            ambient_dim: 5,
            max_scales: 12,
            holder_p: 3.0,
            holder_alpha: 0.5,
            domain: CurvDomain::Localized,
        }
    }
}

impl RunConfig {
    /// Reads a JSON config; errors carry the line and column.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Which atoms to evaluate at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Centers {
    All,
    Sample(usize),
    File(PathBuf),
}

impl std::str::FromStr for Centers {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(Centers::All);
        }
        if let Some(k) = s.strip_prefix("sample:") {
            return k
                .parse()
                .map(Centers::Sample)
                .map_err(|_| format!("bad sample count in {s:?}"));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(Centers::File(PathBuf::from(path)));
        }
        Err(format!("centers must be all, sample:K or file:PATH, got {s:?}"))
    }
}
