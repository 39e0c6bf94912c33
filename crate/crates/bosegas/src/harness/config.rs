//! Experiment configuration: one TOML/JSON file with shared model blocks
//! and an experiments array.

use crate::error::Error;
use crate::manybody::ModelFile;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarnessConfig {
    /// Shared finite-mode models, referenced by name.
    #[serde(default)]
    pub models: BTreeMap<String, ModelFile>,
    pub experiments: Vec<ExperimentConfig>,
    /// Default seed; the CLI `--seed` flag overrides it.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(flatten)]
    pub kind: ExperimentKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    ScalingSweep {
        model: String,
        n_list: Vec<usize>,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    Condensation {
        model: String,
        n_list: Vec<usize>,
        #[serde(default = "default_orders")]
        orders: Vec<usize>,
    },
    ScatteringReport {
        potential: PotentialSpec,
        #[serde(default)]
        ball_radii: Vec<f64>,
        #[serde(default)]
        born: Option<BornSpec>,
    },
    DefinettiSweep {
        d: usize,
        k: usize,
        n_list: Vec<usize>,
        samples: usize,
        family: DefinettiFamily,
    },
    BogoliubovSuite {
        instances: usize,
        #[serde(default = "default_cap")]
        cap: usize,
    },
    VmcSuite {
        particles: usize,
        box_length: f64,
        potential: PotentialSpec,
        cutoff: f64,
        walkers: usize,
        steps: usize,
        burn_in: usize,
    },
    InequalitySuite {
        onsager: usize,
        hoffmann_ostenhof: usize,
        dyson: usize,
    },
    GpMinimize {
        grid_points: usize,
        scattering_length: f64,
        #[serde(default = "default_tol_min")]
        tol: f64,
    },
}

fn default_tol() -> f64 {
    1e-10
}

fn default_tol_min() -> f64 {
    1e-8
}

fn default_cap() -> usize {
    32
}

fn default_orders() -> Vec<usize> {
    vec![1, 2]
}

/// Born-series sweep attached to a scattering report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BornSpec {
    pub beta: f64,
    pub orders: usize,
    pub n_list: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum PotentialSpec {
    SquareWell { v0: f64, r0: f64 },
    Bump { amp: f64, r0: f64 },
    Parabolic { amp: f64, r0: f64 },
    /// Two-column CSV file `r, w(r)`.
    Csv { path: String },
}

impl PotentialSpec {
    pub fn build(&self, base: &Path) -> Result<crate::scattering::RadialPotential> {
        use crate::scattering::RadialPotential;
        match self {
            PotentialSpec::SquareWell { v0, r0 } => RadialPotential::square_well(*v0, *r0),
            PotentialSpec::Bump { amp, r0 } => RadialPotential::bump(*amp, *r0),
            PotentialSpec::Parabolic { amp, r0 } => RadialPotential::parabolic(*amp, *r0),
            PotentialSpec::Csv { path } => {
                let full = base.join(path);
                let text = std::fs::read_to_string(&full).map_err(|e| {
                    Error::Config(format!("cannot read potential {}: {e}", full.display()))
                })?;
                RadialPotential::from_csv(&text)
            }
        }
    }

    pub fn referenced_file(&self) -> Option<&str> {
        match self {
            PotentialSpec::Csv { path } => Some(path),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DefinettiFamily {
    /// Pure condensate with a deterministic random mode per seed.
    Condensate,
    /// Fixed random mixture of a few condensates.
    MixedCondensates { components: usize },
}

impl HarnessConfig {
    pub fn from_str_auto(text: &str, path_hint: &str) -> Result<Self> {
        let config: HarnessConfig = if path_hint.ends_with(".json") {
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad JSON config: {e}")))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(format!("bad TOML config: {e}")))?
        };
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str_auto(&text, &path.to_string_lossy())
    }

    /// Structural checks: model references resolve, N lists strictly
    /// increase, referenced files exist.
    pub fn validate(&self, base: &Path) -> Result<()> {
        let increasing = |ns: &[usize]| ns.windows(2).all(|w| w[1] > w[0]);
        for exp in &self.experiments {
            match &exp.kind {
                ExperimentKind::ScalingSweep { model, n_list, .. }
                | ExperimentKind::Condensation { model, n_list, .. } => {
                    if !self.models.contains_key(model) {
                        return Err(Error::Config(format!(
                            "experiment {}: unknown model '{model}'",
                            exp.name
                        )));
                    }
                    if n_list.is_empty() || !increasing(n_list) {
                        return Err(Error::Config(format!(
                            "experiment {}: N list must be nonempty and strictly increasing",
                            exp.name
                        )));
                    }
                }
                ExperimentKind::DefinettiSweep { n_list, d, k, .. } => {
                    if n_list.is_empty() || !increasing(n_list) {
                        return Err(Error::Config(format!(
                            "experiment {}: N list must be strictly increasing",
                            exp.name
                        )));
                    }
                    if *d < 2 || *k == 0 {
                        return Err(Error::Config(format!(
                            "experiment {}: need D >= 2 and k >= 1",
                            exp.name
                        )));
                    }
                }
                ExperimentKind::ScatteringReport { potential, .. } => {
                    if let Some(file) = potential.referenced_file() {
                        if !base.join(file).exists() {
                            return Err(Error::Config(format!(
                                "experiment {}: missing file {file}",
                                exp.name
                            )));
                        }
                    }
                }
                ExperimentKind::VmcSuite { potential, particles, .. } => {
                    if *particles < 2 {
                        return Err(Error::Config(format!(
                            "experiment {}: VMC needs N >= 2",
                            exp.name
                        )));
                    }
                    if let Some(file) = potential.referenced_file() {
                        if !base.join(file).exists() {
                            return Err(Error::Config(format!(
                                "experiment {}: missing file {file}",
                                exp.name
                            )));
                        }
                    }
                }
                ExperimentKind::BogoliubovSuite { instances, cap } => {
                    if *instances == 0 || *cap < 10 {
                        return Err(Error::Config(format!(
                            "experiment {}: need instances >= 1 and cap >= 10",
                            exp.name
                        )));
                    }
                }
                ExperimentKind::InequalitySuite { .. } => {}
                ExperimentKind::GpMinimize { grid_points, scattering_length, .. } => {
                    if *grid_points < 4 || *scattering_length < 0.0 {
                        return Err(Error::Config(format!(
                            "experiment {}: need >= 4 grid points and a >= 0",
                            exp.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Stable fingerprint of the parsed configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        super::table::fnv1a_hex(canonical.as_bytes())
    }
}
