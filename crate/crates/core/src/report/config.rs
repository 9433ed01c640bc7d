use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entropy_points::{Quantifier, Threshold};
use crate::spanning::{EstimateOptions, Mode, SolverConfig};
use crate::systems::{FiniteSystem, ScaleGrid, ZooSpec};
use crate::uniform::UniformityBase;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Validate,
    Entropy,
    Cover,
    #[serde(alias = "shadow-certificate")]
    Shadow,
    Expansivity,
    #[serde(alias = "entropy-points")]
    Entpoints,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Validate => "validate",
            ExperimentKind::Entropy => "entropy",
            ExperimentKind::Cover => "cover",
            ExperimentKind::Shadow => "shadow",
            ExperimentKind::Expansivity => "expansivity",
            ExperimentKind::Entpoints => "entpoints",
        })
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "validate" => ExperimentKind::Validate,
            "entropy" => ExperimentKind::Entropy,
            "cover" => ExperimentKind::Cover,
            "shadow" | "shadow-certificate" => ExperimentKind::Shadow,
            "expansivity" => ExperimentKind::Expansivity,
            "entpoints" | "entropy-points" => ExperimentKind::Entpoints,
            other => return Err(Error::Config(format!("unknown experiment kind `{other}`"))),
        })
    }
}

/// One experiment, read from a TOML file and optionally overridden on the
/// command line.
///
/// ```toml
/// kind = "entropy"
/// system = "full_shift 2 8"
/// grid = ["2", "1", "1/2"]
/// n_max = 8
/// mode = "exact"
/// out = "runs/shift"
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    /// A zoo system such as `full_shift 2 8`.
    pub system: Option<String>,
    /// A serialized system; mutually exclusive with `system`.
    pub system_file: Option<PathBuf>,
    /// Scales as rationals; the system's default grid when absent.
    pub grid: Option<Vec<String>>,
    pub n_max: usize,
    pub window: Option<(usize, usize)>,
    pub mode: Mode,
    /// Required by the sampled procedures (shadow certificates).
    pub seed: Option<u64>,
    pub threshold: Threshold,
    pub quantifier: Quantifier,
    pub tolerance: f64,
    pub out: PathBuf,
    pub solver: SolverConfig,
    /// Blocks per word in the shadow certificate.
    pub word_length: usize,
    pub chain_length: Option<usize>,
    pub chain_budget: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: None,
            system: None,
            system_file: None,
            grid: None,
            n_max: 6,
            window: None,
            mode: Mode::Auto,
            seed: None,
            threshold: Threshold::default(),
            quantifier: Quantifier::Every,
            tolerance: 1e-6,
            out: PathBuf::from("out"),
            solver: SolverConfig::default(),
            word_length: 3,
            chain_length: None,
            chain_budget: 20_000,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Range checks that do not need the system.
    pub fn validate(&self) -> Result<()> {
        if self.kind.is_none() {
            return Err(Error::Config("no experiment kind given".into()));
        }
        match (&self.system, &self.system_file) {
            (Some(_), Some(_)) => return Err(Error::Config("give `system` or `system_file`, not both".into())),
            (None, None) => return Err(Error::Config("no system given".into())),
            _ => {}
        }
        if !(1..=64).contains(&self.n_max) {
            return Err(Error::Config(format!("n_max = {} outside 1..=64", self.n_max)));
        }
        if let Some((lo, hi)) = self.window {
            if lo == 0 || lo > hi || hi > self.n_max {
                return Err(Error::Config(format!("window [{lo}, {hi}] not inside [1, {}]", self.n_max)));
            }
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::Config("tolerance must be non-negative".into()));
        }
        if [self.threshold.exact, self.threshold.approximate].iter().any(|t| t.is_nan() || *t < 0.0) {
            return Err(Error::Config("thresholds must be non-negative".into()));
        }
        if self.kind == Some(ExperimentKind::Shadow) {
            if self.seed.is_none() {
                return Err(Error::Config("shadow certificates sample chains; a seed is required".into()));
            }
            if !(1..=20).contains(&self.word_length) {
                return Err(Error::Config(format!("word_length = {} outside 1..=20", self.word_length)));
            }
            if self.chain_length == Some(0) || self.chain_budget == 0 {
                return Err(Error::Config("chain length and budget must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn build_system(&self) -> Result<FiniteSystem> {
        if let Some(spec) = &self.system {
            return spec.parse::<ZooSpec>()?.build();
        }
        let path = self.system_file.as_ref().ok_or_else(|| Error::Config("no system given".into()))?;
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        FiniteSystem::from_text(name, &text)
    }

    pub fn build_base(&self, sys: &FiniteSystem) -> Result<UniformityBase> {
        match &self.grid {
            Some(values) => sys.metric_entourage_family(&ScaleGrid::parse(values)?),
            None => sys.default_base(),
        }
    }

    pub fn estimate_options(&self) -> EstimateOptions {
        EstimateOptions {
            n_max: self.n_max,
            window: self.window,
            mode: self.mode,
            solver: self.solver,
            tolerance: self.tolerance,
        }
    }
}
