//! JSON run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use cbpabc::abc::DEFAULT_BUDGET_PER_STAGE;
use cbpabc::multitype::{REFERENCE_ALPHA, REFERENCE_BETA};
use cbpabc::{
    CbpModel, ControlFamily, Error, Metric, OffspringFamily, Prior, Result, Schedule, SizeMap,
    SmcConfig, SummaryKind, TwoTypeModel,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelSpec {
    Single(CbpModel),
    TwoType(TwoTypeModel),
}

/// Where the observed data comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservedSpec {
    /// Trajectory CSV (single-type) or tree-summary CSV (two-type), relative
    /// paths resolved against the config file's directory.
    File { path: PathBuf },
    /// Built-in reference data set.
    Reference,
    /// Simulated from `truth` with the run seed.
    Simulate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmcSpec {
    pub schedule: Schedule,
    #[serde(default = "default_budget")]
    pub budget_per_stage: u64,
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET_PER_STAGE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub offspring: OffspringFamily,
    pub control: ControlFamily,
    #[serde(default)]
    pub size_map: Option<SizeMap>,
}

/// Cross product of prior shapes and law families, one inference per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Beta `(a, b)` shapes; every pair of shapes over the two parameters is a cell.
    #[serde(default)]
    pub beta_shapes: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub families: Option<Vec<FamilySpec>>,
}

fn default_seed() -> u64 {
    1
}

fn default_true() -> bool {
    true
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    /// Parameter values used by `simulate`, by simulated observations and for RMSE.
    #[serde(default)]
    pub truth: Option<Vec<f64>>,
    #[serde(default)]
    pub observed: Option<ObservedSpec>,
    /// Defaults to the model's default prior.
    #[serde(default)]
    pub prior: Option<Prior>,
    #[serde(default)]
    pub smc: Option<SmcSpec>,
    #[serde(default)]
    pub metric: Option<Metric>,
    #[serde(default)]
    pub summary: Option<SummaryKind>,
    #[serde(default = "default_true")]
    pub adjust: bool,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let at = e.path().to_string();
            let inner = e.into_inner();
            Error::Config(format!("at `{at}` (line {}, column {}): {inner}", inner.line(), inner.column()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.model {
            ModelSpec::Single(m) => m.validate()?,
            ModelSpec::TwoType(m) => m.validate()?,
        }
        let prior = self.prior()?;
        if let Some(t) = &self.truth {
            if t.len() != prior.dim() {
                return Err(Error::Config(format!(
                    "truth has {} values but the model has {} parameters",
                    t.len(),
                    prior.dim()
                )));
            }
            match &self.model {
                ModelSpec::Single(m) => {
                    m.laws(t)?;
                }
                ModelSpec::TwoType(_) => {
                    cbpabc::TwoTypeParams::from_free(t[0], t[1], t[2])?;
                }
            }
        }
        if matches!(self.observed, Some(ObservedSpec::Simulate)) && self.truth.is_none() {
            return Err(Error::Config("observed source `simulate` needs `truth`".into()));
        }
        if let Some(smc) = &self.smc {
            smc.schedule.validate()?;
            if smc.budget_per_stage == 0 {
                return Err(Error::Config("budget_per_stage must be positive".into()));
            }
        }
        let kind = self.summary_kind();
        match (&self.model, kind.is_single_type()) {
            (ModelSpec::Single(_), false) => {
                return Err(Error::Config("single-type models need summary s, s1, s2 or s3".into()))
            }
            (ModelSpec::TwoType(_), true) => {
                return Err(Error::Config("two-type models use the two_type summary".into()))
            }
            _ => {}
        }
        if self.sweep.is_some() && matches!(self.model, ModelSpec::TwoType(_)) {
            return Err(Error::Config("sweeps are defined for single-type models only".into()));
        }
        if let Some(SweepSpec { beta_shapes: Some(shapes), .. }) = &self.sweep {
            if shapes.is_empty() || shapes.iter().flatten().any(|v| !(*v > 0.0) || !v.is_finite()) {
                return Err(Error::Config("beta_shapes must be a non-empty list of positive pairs".into()));
            }
        }
        if let Some(SweepSpec { families: Some(f), .. }) = &self.sweep {
            if f.is_empty() {
                return Err(Error::Config("families must not be empty".into()));
            }
        }
        Ok(())
    }

    pub fn prior(&self) -> Result<Prior> {
        if let Some(p) = &self.prior {
            let names: Vec<String> = match &self.model {
                ModelSpec::Single(m) => m.param_names().iter().map(|s| s.to_string()).collect(),
                ModelSpec::TwoType(_) => cbpabc::multitype::TWO_TYPE_PARAMS.iter().map(|s| s.to_string()).collect(),
            };
            if p.names() != names {
                return Err(Error::Config(format!(
                    "prior parameters {:?} do not match the model's {:?}",
                    p.names(),
                    names
                )));
            }
            return Ok(p.clone());
        }
        Ok(match &self.model {
            ModelSpec::Single(m) => m.default_prior(),
            ModelSpec::TwoType(m) => m.prior(REFERENCE_ALPHA, REFERENCE_BETA)?,
        })
    }

    pub fn summary_kind(&self) -> SummaryKind {
        match (&self.model, self.summary) {
            (_, Some(k)) => k,
            (ModelSpec::Single(_), None) => SummaryKind::Full,
            (ModelSpec::TwoType(_), None) => SummaryKind::TwoType,
        }
    }

    pub fn metric(&self) -> Metric {
        self.metric.unwrap_or(Metric::Rho1)
    }

    pub fn smc_config(&self) -> Result<SmcConfig> {
        let smc = self.smc.as_ref().ok_or_else(|| Error::Config("`smc` section is required".into()))?;
        Ok(SmcConfig {
            schedule: smc.schedule.clone(),
            metric: self.metric(),
            summary: self.summary_kind(),
            seed: self.seed,
            budget_per_stage: smc.budget_per_stage,
        })
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}
