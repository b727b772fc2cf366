//! Experiment configuration and dispatch.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::codes;
use crate::error::{Error, Result};
use crate::faultsim::ClassRates;
use crate::harness::audit::{canon_audit, eec_audit, CanonAudit, EecAudit};
use crate::harness::ftec::{verify_ftec_exhaustive, FtecReport, VerifyOptions};
use crate::harness::montecarlo::{run_montecarlo, MonteCarloConfig, MonteCarloStats};
use crate::protocol::ProtocolOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    VerifyExhaustive,
    Montecarlo,
    EecAudit,
    CanonAudit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            _ => Err(Error::Config(format!("unknown output format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Noise {
    pub p_pauli: ClassRates,
    pub p_loss: ClassRates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Limits {
    /// Fault budget for verification; defaults to `⌊(dist − 1)/2⌋`.
    pub t: Option<usize>,
    /// Largest erased set for `eec-audit`; defaults to `dist − 1`.
    pub max_erasures: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CanonTarget {
    pub dim: u32,
    pub n: usize,
    pub groups: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentConfig {
    /// A code file, or `builtin:<name>`; unused by `canon-audit`.
    pub code_file: Option<PathBuf>,
    pub mode: Mode,
    pub seed: u64,
    #[serde(default)]
    pub trials: u64,
    #[serde(default)]
    pub noise: Noise,
    #[serde(default)]
    pub limits: Limits,
    pub canon: Option<CanonTarget>,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub protocol: ProtocolOptions,
    #[serde(default)]
    pub cat_prep_faults: bool,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, code_file: Option<PathBuf>, seed: u64) -> Self {
        Self {
            code_file,
            mode,
            seed,
            trials: 0,
            noise: Noise::default(),
            limits: Limits::default(),
            canon: None,
            output: Output::default(),
            protocol: ProtocolOptions::default(),
            cat_prep_faults: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text)
    }

    /// Checks everything that does not need the code; [`run`] checks the rest.
    pub fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::CanonAudit if self.canon.is_none() => Err(Error::Config("canon-audit needs `canon`".into())),
            Mode::CanonAudit => Ok(()),
            _ if self.code_file.is_none() => Err(Error::Config("a code file is required".into())),
            Mode::Montecarlo => self.montecarlo().validate(),
            _ => Ok(()),
        }
    }

    fn montecarlo(&self) -> MonteCarloConfig {
        MonteCarloConfig {
            trials: self.trials,
            seed: self.seed,
            p_pauli: self.noise.p_pauli,
            p_loss: self.noise.p_loss,
            cat_prep_faults: self.cat_prep_faults,
            protocol: self.protocol,
        }
    }
}

/// Result of one configured run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "mode", content = "report")]
pub enum RunReport {
    VerifyExhaustive(FtecReport),
    Montecarlo(MonteCarloStats),
    EecAudit(EecAudit),
    CanonAudit(CanonAudit),
}

impl RunReport {
    /// False iff a checked property failed. Monte Carlo runs fail on a bound violation.
    pub fn passed(&self) -> bool {
        match self {
            Self::VerifyExhaustive(r) => r.passed(),
            Self::Montecarlo(s) => s.extra_measurement_violations == 0 && s.round_bound_violations == 0,
            Self::EecAudit(a) => a.mismatches() == 0,
            Self::CanonAudit(a) => a.failures.is_empty(),
        }
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    if let (Mode::CanonAudit, Some(c)) = (cfg.mode, cfg.canon) {
        return Ok(RunReport::CanonAudit(canon_audit(c.dim, c.n, c.groups, cfg.seed)?));
    }
    let path = cfg.code_file.as_deref().expect("validated");
    let code = codes::load(path)?;
    Ok(match cfg.mode {
        Mode::VerifyExhaustive => {
            let t = match cfg.limits.t {
                Some(t) => t,
                None => code.t()?,
            };
            let opts = VerifyOptions {
                seed: cfg.seed,
                cat_prep_faults: cfg.cat_prep_faults,
                protocol: cfg.protocol,
                ..VerifyOptions::new(t)
            };
            RunReport::VerifyExhaustive(verify_ftec_exhaustive(&code, &opts)?)
        }
        Mode::Montecarlo => RunReport::Montecarlo(run_montecarlo(&code, &cfg.montecarlo())?),
        Mode::EecAudit => {
            let max = match cfg.limits.max_erasures {
                Some(m) => m,
                None => code.dist()?.saturating_sub(1),
            };
            RunReport::EecAudit(eec_audit(&code, max)?)
        }
        Mode::CanonAudit => unreachable!("handled above"),
    })
}
