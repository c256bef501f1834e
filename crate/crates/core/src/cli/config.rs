use std::f64::consts::E;
use std::path::Path;

use clap::Subcommand;
use serde::{Deserialize, Serialize};

use super::CliError;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Subcommand,
)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Distance traces of same-circle, same-ray and generic pairs in a power tower.
    Trichotomy,
    /// Parameter generation, containment certificates and audits of the model map.
    Modelmap,
    /// Riemann–Hurwitz feasibility and the connectivity decision table.
    Silhouette,
    /// Boundary-distance traces and comparison bounds.
    Boundary,
    /// SVG picture of the two foliations of an annulus.
    Render,
    /// Every experiment above.
    All,
}

impl Experiment {
    pub const EACH: [Experiment; 5] = [
        Experiment::Trichotomy,
        Experiment::Modelmap,
        Experiment::Silhouette,
        Experiment::Boundary,
        Experiment::Render,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Trichotomy => "trichotomy",
            Experiment::Modelmap => "modelmap",
            Experiment::Silhouette => "silhouette",
            Experiment::Boundary => "boundary",
            Experiment::Render => "render",
            Experiment::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrichotomyConfig {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(default = "two")]
    pub degree: u64,
    #[serde(default = "twenty")]
    pub stages: usize,
    #[serde(default = "fifty")]
    pub pairs_per_class: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelmapConfig {
    pub r: f64,
    pub eps: f64,
    #[serde(default = "one")]
    pub margin: f64,
    #[serde(default = "two_usize")]
    pub cycles: usize,
    #[serde(default = "ten_thousand")]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SilhouetteConfig {
    /// Largest connectivity checked against brute force.
    #[serde(default = "fifty_u64")]
    pub max_k: u64,
    /// Entries per synthetic signature.
    #[serde(default = "sixteen")]
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default = "hundred")]
    pub pairs: usize,
    #[serde(default = "thirty")]
    pub stages: usize,
    #[serde(default = "thousand")]
    pub harnack_pairs: usize,
    #[serde(default = "hundred")]
    pub loops: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderConfig {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(default = "seven")]
    pub circles: usize,
    #[serde(default = "twelve")]
    pub rays: usize,
    #[serde(default = "default_svg")]
    pub file: String,
}

/// One TOML file describing every experiment; missing sections take reference values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Experiment the file is meant for; checked against the subcommand when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "TrichotomyConfig::reference")]
    pub trichotomy: TrichotomyConfig,
    #[serde(default = "ModelmapConfig::reference")]
    pub modelmap: ModelmapConfig,
    #[serde(default = "SilhouetteConfig::reference")]
    pub silhouette: SilhouetteConfig,
    #[serde(default = "BoundaryConfig::reference")]
    pub boundary: BoundaryConfig,
    #[serde(default = "RenderConfig::reference")]
    pub render: RenderConfig,
}

fn one() -> f64 {
    1.0
}
fn two() -> u64 {
    2
}
fn two_usize() -> usize {
    2
}
fn seven() -> usize {
    7
}
fn twelve() -> usize {
    12
}
fn sixteen() -> usize {
    16
}
fn twenty() -> usize {
    20
}
fn thirty() -> usize {
    30
}
fn fifty() -> usize {
    50
}
fn fifty_u64() -> u64 {
    50
}
fn hundred() -> usize {
    100
}
fn thousand() -> usize {
    1000
}
fn ten_thousand() -> usize {
    10_000
}
fn default_threshold() -> f64 {
    crate::boundary::DEFAULT_THRESHOLD
}
fn default_svg() -> String {
    "foliation.svg".into()
}

impl TrichotomyConfig {
    pub fn reference() -> Self {
        Self {
            r: 2.0,
            degree: 2,
            stages: 20,
            pairs_per_class: 50,
        }
    }
}

impl ModelmapConfig {
    pub fn reference() -> Self {
        Self {
            r: 2.5,
            eps: 1e-3,
            margin: 1.0,
            cycles: 2,
            samples: 10_000,
        }
    }
}

impl SilhouetteConfig {
    pub fn reference() -> Self {
        Self {
            max_k: 50,
            length: 16,
        }
    }
}

impl BoundaryConfig {
    pub fn reference() -> Self {
        Self {
            pairs: 100,
            stages: 30,
            harnack_pairs: 1000,
            loops: 100,
            threshold: default_threshold(),
        }
    }
}

impl RenderConfig {
    pub fn reference() -> Self {
        Self {
            r: E,
            circles: 7,
            rays: 12,
            file: default_svg(),
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            seed: 0,
            trichotomy: TrichotomyConfig::reference(),
            modelmap: ModelmapConfig::reference(),
            silhouette: SilhouetteConfig::reference(),
            boundary: BoundaryConfig::reference(),
            render: RenderConfig::reference(),
        }
    }
}

fn require(cond: bool, what: &str) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(format!("{what} must hold")))
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Range checks that do not depend on any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.trichotomy;
        require(t.r > 1.0 && t.r.is_finite(), "trichotomy.R > 1")?;
        require(t.degree >= 2, "trichotomy.degree >= 2")?;
        require(t.stages >= 1, "trichotomy.stages >= 1")?;
        let m = &self.modelmap;
        require(
            m.r.is_finite() && m.eps.is_finite() && m.margin.is_finite(),
            "finite modelmap values",
        )?;
        require(m.cycles >= 1, "modelmap.cycles >= 1")?;
        require(m.samples >= 1000, "modelmap.samples >= 1000")?;
        let s = &self.silhouette;
        require(s.max_k >= 3, "silhouette.max_k >= 3")?;
        require(s.length >= 8, "silhouette.length >= 8")?;
        let b = &self.boundary;
        require(b.stages >= 1, "boundary.stages >= 1")?;
        require(b.threshold > 0.0, "boundary.threshold > 0")?;
        let r = &self.render;
        require(r.r > 1.0 && r.r.is_finite(), "render.R > 1")?;
        require(
            !r.file.is_empty() && !r.file.contains(['/', '\\']),
            "render.file is a plain file name",
        )?;
        Ok(())
    }
}
