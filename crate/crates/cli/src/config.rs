//! Scenario files: JSON with every key optional, defaulting to the baseline scenario.
//!
//! ```json
//! {
//!   "snr_db": 10,
//!   "sigma1_sq": 1, "sigma2_sq": 1,
//!   "gamma1": 1, "gamma2": 1,
//!   "gamma_split": [0.25, 0.25, 0.25, 0.25],
//!   "chan1": {"m1": 1, "m2": 1, "omega1": 2, "omega2": 2},
//!   "chan2": {"m1": 1, "m2": 1, "omega1": 2, "omega2": 2},
//!   "dist1": 1, "dist2": 0.5, "pathloss_exp": 2,
//!   "catalog": {"files": 5, "zeta": 0.5, "cache_size": 1},
//!   "semantics": "paper_product",
//!   "averaging": "full"
//! }
//! ```

use std::path::Path;

use canoma::caching::{Averaging, Catalog};
use canoma::channel::{DoubleNakagamiParams, LinkGeometry};
use canoma::noma_full::{FullScenario, Semantics};
use canoma::noma_split::SplitScenario;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub power: Option<f64>,
    pub snr_db: Option<f64>,
    pub sigma1_sq: Option<f64>,
    pub sigma2_sq: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    /// `[γ1⁽¹⁾, γ1⁽²⁾, γ2⁽¹⁾, γ2⁽²⁾]`.
    pub gamma_split: Option<[f64; 4]>,
    pub chan1: Option<ChannelFile>,
    pub chan2: Option<ChannelFile>,
    pub dist1: Option<f64>,
    pub dist2: Option<f64>,
    pub pathloss_exp: Option<f64>,
    pub catalog: Option<CatalogFile>,
    pub semantics: Option<SemanticsKey>,
    pub averaging: Option<AveragingKey>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogFile {
    pub files: Option<usize>,
    pub zeta: Option<f64>,
    pub cache_size: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemanticsKey {
    PaperProduct,
    JointEvent,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AveragingKey {
    Full,
    CasesOnly,
}

const DEFAULT_SNR_DB: f64 = 10.0;
const DEFAULT_M: f64 = 1.0;
const DEFAULT_OMEGA: f64 = 2.0;
const DEFAULT_GAMMA_SPLIT: f64 = 0.25;

/// A fully resolved scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub scenario: FullScenario<f64>,
    pub split: SplitScenario<f64>,
    pub catalog: Catalog<f64>,
    pub averaging: Averaging,
}

/// `P = σ1² · 10^(snr/10)`.
pub fn power_from_snr_db(sigma1_sq: f64, snr_db: f64) -> f64 {
    sigma1_sq * 10f64.powf(snr_db / 10.0)
}

fn invalid(key: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {err}"))
}

fn channel(key: &str, file: Option<&ChannelFile>) -> Result<DoubleNakagamiParams<f64>, CliError> {
    let d = ChannelFile::default();
    let f = file.unwrap_or(&d);
    DoubleNakagamiParams::new(
        f.m1.unwrap_or(DEFAULT_M),
        f.m2.unwrap_or(DEFAULT_M),
        f.omega1.unwrap_or(DEFAULT_OMEGA),
        f.omega2.unwrap_or(DEFAULT_OMEGA),
    )
    .map_err(|e| invalid(key, e))
}

impl Config {
    pub fn baseline() -> Self {
        Self::from_file(ScenarioFile::default()).expect("defaults are valid")
    }

    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                CliError::Config(e.inner().to_string())
            } else {
                CliError::Config(format!("{path}: {}", e.inner()))
            }
        })?;
        de.end().map_err(|e| CliError::Config(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_file(f: ScenarioFile) -> Result<Self, CliError> {
        let sigma1_sq = f.sigma1_sq.unwrap_or(1.0);
        let sigma2_sq = f.sigma2_sq.unwrap_or(1.0);
        let power = match (f.power, f.snr_db) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("power and snr_db are mutually exclusive".into()));
            }
            (Some(p), None) => p,
            (None, snr) => {
                let snr = snr.unwrap_or(DEFAULT_SNR_DB);
                if !snr.is_finite() {
                    return Err(invalid("snr_db", "must be finite"));
                }
                power_from_snr_db(sigma1_sq, snr)
            }
        };
        let pathloss = f.pathloss_exp.unwrap_or(2.0);
        let geom1 = LinkGeometry::new(f.dist1.unwrap_or(1.0), pathloss).map_err(|e| invalid("dist1", e))?;
        let geom2 = LinkGeometry::new(f.dist2.unwrap_or(0.5), pathloss).map_err(|e| invalid("dist2", e))?;
        let scenario = FullScenario {
            power,
            sigma1_sq,
            sigma2_sq,
            gamma1: f.gamma1.unwrap_or(1.0),
            gamma2: f.gamma2.unwrap_or(1.0),
            chan1: channel("chan1", f.chan1.as_ref())?,
            chan2: channel("chan2", f.chan2.as_ref())?,
            geom1,
            geom2,
            semantics: match f.semantics {
                Some(SemanticsKey::JointEvent) => Semantics::JointEvent,
                Some(SemanticsKey::PaperProduct) | None => Semantics::PaperProduct,
            },
        };
        scenario.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let [g11, g12, g21, g22] = f.gamma_split.unwrap_or([DEFAULT_GAMMA_SPLIT; 4]);
        let split = SplitScenario {
            base: scenario,
            gamma11: g11,
            gamma12: g12,
            gamma21: g21,
            gamma22: g22,
        };
        split.validate().map_err(|e| invalid("gamma_split", e))?;
        let c = f.catalog.unwrap_or_default();
        let catalog = Catalog::new(c.files.unwrap_or(5), c.zeta.unwrap_or(0.5), c.cache_size.unwrap_or(1))
            .map_err(|e| invalid("catalog", e))?;
        let averaging = match f.averaging {
            Some(AveragingKey::CasesOnly) => Averaging::CasesOnly,
            Some(AveragingKey::Full) | None => Averaging::Full,
        };
        Ok(Self {
            scenario,
            split,
            catalog,
            averaging,
        })
    }

    fn map_scenario(&self, f: impl Fn(&mut FullScenario<f64>)) -> Self {
        let mut out = *self;
        f(&mut out.scenario);
        out.split.base = out.scenario;
        out
    }

    pub fn with_snr_db(&self, snr_db: f64) -> Self {
        self.map_scenario(|s| s.power = power_from_snr_db(s.sigma1_sq, snr_db))
    }

    /// Sets `Ω` on all four hops.
    pub fn with_omega(&self, omega: f64) -> Self {
        self.map_scenario(|s| {
            for c in [&mut s.chan1, &mut s.chan2] {
                c.omega1 = omega;
                c.omega2 = omega;
            }
        })
    }

    /// Sets `m` on all four hops.
    pub fn with_m(&self, m: f64) -> Self {
        self.map_scenario(|s| {
            for c in [&mut s.chan1, &mut s.chan2] {
                c.m1 = m;
                c.m2 = m;
            }
        })
    }

    pub fn with_semantics(&self, semantics: Semantics) -> Self {
        self.map_scenario(|s| s.semantics = semantics)
    }

    pub fn with_catalog(&self, catalog: Catalog<f64>) -> Self {
        Self { catalog, ..*self }
    }
}
