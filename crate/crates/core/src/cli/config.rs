//! Experiment configuration files (TOML) and dotted-path overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::error::Error;
use crate::operators::{DiscreteOperator, Family};
use crate::verify::SuiteConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Enorm,
    Ecd,
    Semigroup,
    VerifySuite,
    ThresholdSweep,
    Series,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Enorm => "enorm",
            Experiment::Ecd => "ecd",
            Experiment::Semigroup => "semigroup",
            Experiment::VerifySuite => "verify-suite",
            Experiment::ThresholdSweep => "threshold-sweep",
            Experiment::Series => "series",
        }
    }
}

/// The energy observable, diagonal in its eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GSpec {
    /// Eigenvalues `0, 1, …, dim − 1`.
    Number { dim: usize },
    /// Nondecreasing eigenvalues starting at 0.
    Custom { eigenvalues: Vec<f64> },
}

impl GSpec {
    pub fn build(&self) -> Result<DiscreteOperator, Error> {
        match self {
            GSpec::Number { dim } => DiscreteOperator::number(*dim),
            GSpec::Custom { eigenvalues } => DiscreteOperator::custom(eigenvalues.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Power,
    SqrtLog,
    LogPower,
}

/// An operator given either as a function of `G` or as a matrix file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyName>,
    /// Exponent of `power`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Exponent of `log_power`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// CSV or JSON matrix, relative to the config file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
}

impl OperatorSpec {
    pub fn power(alpha: f64) -> Self {
        Self { family: Some(FamilyName::Power), alpha: Some(alpha), ..Self::default() }
    }

    pub fn family(&self) -> Result<Option<Family>, CliError> {
        let need = |x: Option<f64>, what: &str| x.ok_or_else(|| CliError::Config(format!("operator.{what} is required")));
        match (self.family, &self.matrix) {
            (Some(_), Some(_)) => Err(CliError::Config("operator: give either family or matrix, not both".into())),
            (None, None) => Err(CliError::Config("operator: family or matrix is required".into())),
            (None, Some(_)) => Ok(None),
            (Some(FamilyName::Power), None) => Ok(Some(Family::Power { alpha: need(self.alpha, "alpha")? })),
            (Some(FamilyName::SqrtLog), None) => Ok(Some(Family::SqrtLog)),
            (Some(FamilyName::LogPower), None) => Ok(Some(Family::LogPower { beta: need(self.beta, "beta")? })),
        }
    }

    /// Short name used in check ids.
    pub fn label(&self) -> String {
        match (self.family, &self.matrix) {
            (Some(FamilyName::Power), _) => format!("power_{}", self.alpha.unwrap_or(f64::NAN)),
            (Some(FamilyName::SqrtLog), _) => "sqrt_log".into(),
            (Some(FamilyName::LogPower), _) => format!("log_power_{}", self.beta.unwrap_or(f64::NAN)),
            (None, Some(p)) => p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "matrix".into()),
            (None, None) => "operator".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsKind {
    Unitary,
    Gaussian,
    Gkls,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GklsSpec {
    /// Random conservative generator on the dimension of `G`.
    Random { operators: usize, rate: f64 },
    /// `V = √γ σ_x`, `K = −γ/2 I` on a qubit.
    QubitFlip { gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_true")]
    pub plots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_out_dir(), plots: true }
    }
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("ecdnorm-out")
}

fn default_true() -> bool {
    true
}

fn default_restarts() -> usize {
    16
}

fn default_g() -> GSpec {
    GSpec::Number { dim: 16 }
}

fn is_default<T: Default + PartialEq>(x: &T) -> bool {
    *x == T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    /// Restarts of the ECD estimator.
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_g")]
    pub g: GSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gkls: Option<GklsSpec>,
    /// Choi matrix file of a map with equal input and output dimension
    /// (`ecd` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub energies: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<f64>,
    /// Highest Taylor order (`semigroup`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_max: Option<usize>,
    /// Series length (`series`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis_n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alphas: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<SuiteConfig>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    /// The configuration a bare subcommand starts from.
    pub fn template(experiment: Experiment) -> Self {
        let mut c = Self {
            experiment,
            seed: 0,
            restarts: default_restarts(),
            g: default_g(),
            operator: None,
            dynamics: None,
            gkls: None,
            choi: None,
            energies: vec![],
            times: vec![],
            k_max: None,
            n_max: None,
            target: None,
            hypothesis_n_max: None,
            alphas: vec![],
            dims: vec![],
            suite: None,
            output: OutputConfig::default(),
        };
        match experiment {
            Experiment::Enorm => {
                c.operator = Some(OperatorSpec::power(0.5));
                c.energies = vec![1.0, 2.0, 4.0];
            }
            Experiment::Ecd | Experiment::Semigroup => {
                c.operator = Some(OperatorSpec::power(0.5));
                c.dynamics = Some(DynamicsKind::Unitary);
                c.energies = vec![1.0, 4.0];
                c.times = vec![0.01, 0.1, 0.5];
            }
            Experiment::VerifySuite => c.suite = Some(SuiteConfig::default()),
            Experiment::ThresholdSweep => {
                c.dynamics = Some(DynamicsKind::Unitary);
                c.alphas = vec![0.25, 0.5, 0.75];
                c.dims = vec![16, 32, 64, 128];
                c.energies = vec![1.0, 4.0, 16.0];
            }
            Experiment::Series => {
                c.g = GSpec::Number { dim: 32 };
                c.operator = Some(OperatorSpec { family: Some(FamilyName::SqrtLog), ..OperatorSpec::default() });
                c.dynamics = Some(DynamicsKind::Unitary);
                c.energies = vec![4.0];
                c.times = vec![1.0];
            }
        }
        c
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        Self::from_table(table)
    }

    pub fn from_table(table: toml::Table) -> Result<Self, CliError> {
        if let Some(toml::Value::Table(s)) = table.get("suite") {
            for key in ["seed", "restarts"] {
                if s.contains_key(key) {
                    return Err(CliError::Config(format!("suite.{key}: set the top-level `{key}` instead")));
                }
            }
        }
        let mut cfg: Self = table.try_into().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        if cfg.experiment == Experiment::VerifySuite && cfg.suite.is_none() {
            cfg.suite = Some(SuiteConfig::default());
        }
        if let Some(s) = cfg.suite.as_mut() {
            s.seed = cfg.seed;
            s.restarts = cfg.restarts;
        }
        Ok(cfg)
    }

    pub fn to_table(&self) -> toml::Table {
        let mut t = toml::Table::try_from(self).expect("config serializes to TOML");
        if let Some(toml::Value::Table(s)) = t.get_mut("suite") {
            s.remove("seed");
            s.remove("restarts");
        }
        t
    }

    /// Applies `key.path=value` overrides. Values are read as TOML and fall
    /// back to a bare string.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = self.to_table();
        apply_overrides(&mut table, overrides)?;
        Self::from_table(table)
    }

    /// Checks that the fields the experiment needs are present and sane.
    pub fn validate(&self) -> Result<(), CliError> {
        let cfg_err = |m: String| Err(CliError::Config(m));
        let positive = |name: &str, v: &[f64]| -> Result<(), CliError> {
            if v.is_empty() {
                return cfg_err(format!("{name} must not be empty"));
            }
            if let Some(x) = v.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
                return cfg_err(format!("{name}: {x} is not a positive finite number"));
            }
            Ok(())
        };
        if self.restarts == 0 {
            return cfg_err("restarts must be positive".into());
        }
        let dynamics = |allow_gkls: bool| -> Result<DynamicsKind, CliError> {
            match self.dynamics {
                None => Err(CliError::Config("dynamics is required".into())),
                Some(DynamicsKind::Gkls) if !allow_gkls => {
                    Err(CliError::Config("dynamics must be unitary or gaussian for this experiment".into()))
                }
                Some(d) => Ok(d),
            }
        };
        let operator = || -> Result<(), CliError> {
            match &self.operator {
                None => cfg_err("operator is required".into()),
                Some(op) => op.family().map(|_| ()),
            }
        };
        match self.experiment {
            Experiment::Enorm => {
                operator()?;
                positive("energies", &self.energies)?;
            }
            Experiment::Ecd => {
                positive("energies", &self.energies)?;
                if self.choi.is_none() {
                    self.check_semigroup(dynamics(true)?, &operator)?;
                    positive("times", &self.times)?;
                }
            }
            Experiment::Semigroup => {
                positive("energies", &self.energies)?;
                positive("times", &self.times)?;
                let d = dynamics(true)?;
                self.check_semigroup(d, &operator)?;
                if let Some(k) = self.k_max {
                    if d == DynamicsKind::Gkls {
                        return cfg_err("k_max applies to unitary and gaussian dynamics only".into());
                    }
                    if !(1..=4).contains(&k) {
                        return cfg_err(format!("k_max must be in 1..=4, got {k}"));
                    }
                }
            }
            Experiment::VerifySuite => {
                if let Some(s) = &self.suite {
                    s.validate().map_err(|e| CliError::Config(format!("suite: {e}")))?;
                }
            }
            Experiment::ThresholdSweep => {
                dynamics(false)?;
                positive("alphas", &self.alphas)?;
                positive("energies", &self.energies)?;
                if self.dims.len() < 2 || self.dims.windows(2).any(|w| w[1] <= w[0]) || self.dims[0] < 2 {
                    return cfg_err("dims needs at least two increasing dimensions ≥ 2".into());
                }
            }
            Experiment::Series => {
                dynamics(false)?;
                operator()?;
                positive("energies", &self.energies)?;
                positive("times", &self.times)?;
                if let Some(t) = self.target {
                    positive("target", &[t])?;
                }
            }
        }
        Ok(())
    }

    fn check_semigroup(&self, d: DynamicsKind, operator: &dyn Fn() -> Result<(), CliError>) -> Result<(), CliError> {
        match d {
            DynamicsKind::Gkls => match &self.gkls {
                None => Err(CliError::Config("gkls is required for gkls dynamics".into())),
                Some(GklsSpec::Random { operators, rate }) if *operators == 0 || !(*rate > 0.0) => {
                    Err(CliError::Config("gkls: operators and rate must be positive".into()))
                }
                Some(GklsSpec::QubitFlip { gamma }) if !(*gamma > 0.0) => {
                    Err(CliError::Config("gkls.gamma must be positive".into()))
                }
                Some(_) => Ok(()),
            },
            _ => operator(),
        }
    }

    /// Makes relative matrix paths relative to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(op) = self.operator.as_mut() {
            if let Some(m) = op.matrix.as_mut() {
                fix(m);
            }
        }
        if let Some(c) = self.choi.as_mut() {
            fix(c);
        }
    }
}

pub fn apply_overrides(table: &mut toml::Table, overrides: &[String]) -> Result<(), CliError> {
    for ov in overrides {
        let (path, raw) = ov
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override {ov:?} is not of the form key=value")))?;
        let path = path.trim();
        let value = parse_value(raw.trim());
        let keys: Vec<&str> = path.split('.').collect();
        if keys.iter().any(|k| k.is_empty()) {
            return Err(CliError::Config(format!("override {ov:?}: empty key segment")));
        }
        let mut cur = &mut *table;
        for (i, key) in keys[..keys.len() - 1].iter().enumerate() {
            let entry = cur
                .entry(key.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            cur = match entry {
                toml::Value::Table(t) => t,
                _ => {
                    return Err(CliError::Config(format!(
                        "override {ov:?}: {} is not a table",
                        keys[..=i].join(".")
                    )))
                }
            };
        }
        cur.insert(keys[keys.len() - 1].to_string(), value);
    }
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
experiment = "enorm"
energies = [1, 2, 4]

[g]
kind = "number"
dim = 16

[operator]
family = "power"
alpha = 0.5
"#;

    #[test]
    fn parses_minimal() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.experiment, Experiment::Enorm);
        assert_eq!(c.energies, vec![1.0, 2.0, 4.0]);
        assert_eq!(c.operator.unwrap().family().unwrap(), Some(Family::Power { alpha: 0.5 }));
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn overrides_reach_leaves() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        let o = c
            .with_overrides(&["operator.alpha=0.25".into(), "g.dim=8".into(), "energies=[0.5]".into()])
            .unwrap();
        assert_eq!(o.operator.unwrap().alpha, Some(0.25));
        assert_eq!(o.g, GSpec::Number { dim: 8 });
        assert_eq!(o.energies, vec![0.5]);
        let o = c.with_overrides(&["output.dir=results/run1".into()]).unwrap();
        assert_eq!(o.output.dir, PathBuf::from("results/run1"));
        assert!(c.with_overrides(&["experiment=nope".into()]).is_err());
        assert!(c.with_overrides(&["energies.x=1".into()]).is_err());
        assert!(c.with_overrides(&["no_equals".into()]).is_err());
        assert!(c.with_overrides(&["typo_key=1".into()]).is_err());
    }

    #[test]
    fn empty_grid_is_rejected() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap().with_overrides(&["energies=[]".into()]).unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn diagnostics_name_the_line() {
        let err = ExperimentConfig::from_toml("experiment = \"enorm\"\nenergies = [1, oops]\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = ExperimentConfig::from_toml("experiment = \"enorm\"\nenergis = [1]\n").unwrap_err();
        assert!(err.to_string().contains("energis"), "{err}");
    }

    #[test]
    fn templates_validate_and_round_trip() {
        for e in [
            Experiment::Enorm,
            Experiment::Ecd,
            Experiment::Semigroup,
            Experiment::VerifySuite,
            Experiment::ThresholdSweep,
            Experiment::Series,
        ] {
            let c = ExperimentConfig::template(e);
            c.validate().unwrap();
            assert_eq!(ExperimentConfig::from_table(c.to_table()).unwrap(), c);
        }
    }

    #[test]
    fn suite_seed_comes_from_the_top() {
        let c = ExperimentConfig::from_toml("experiment = \"verify-suite\"\nseed = 7\n[suite]\nlaws_dim = 4\n").unwrap();
        let s = c.suite.unwrap();
        assert_eq!((s.seed, s.laws_dim), (7, 4));
        assert!(ExperimentConfig::from_toml("experiment = \"verify-suite\"\n[suite]\nseed = 3\n").is_err());
    }
}
