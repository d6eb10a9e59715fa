use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use globact::covering::CoveringError;
use globact::kstab::KError;
use globact::matgroup::MatrixError;
use globact::path::PathError;
use globact::ring::FiniteRing;
use globact::unimodular::UmError;

#[derive(Debug, Parser)]
#[command(name = "globact", version, about = "Global actions over finite commutative rings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand, Clone, Serialize)]
#[serde(tag = "verb", rename_all = "kebab-case")]
pub enum Command {
    /// Path components of Um_n(R).
    Pi0,
    /// pi_1(EUm_n(R)) as EP_n / (EP_n)_2.
    Pi1 {
        /// Also compute pi_1 by homotopy search and compare.
        #[arg(long)]
        cross_check: bool,
    },
    /// Check the exact sequence linking pi_0, pi_1 and K-theory.
    Verify,
    /// Decide whether two paths in Um_n(R) are stably homotopic.
    Homotopy {
        /// JSON list of row vectors.
        #[arg(long)]
        path_a: PathBuf,
        #[arg(long)]
        path_b: PathBuf,
    },
    /// Check the global-action axioms on Um_n(R) and on E_n / (EP_n)_2.
    ValidateAction,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args, Clone, Serialize)]
pub struct Common {
    /// Ring spec: Zmod:<m>, GF:<p> or GFpoly:<p>:<c0,...,ck>.
    #[arg(long, global = true)]
    pub ring: Option<String>,
    #[arg(long, global = true, default_value_t = 3)]
    pub n: usize,
    /// Largest subgroup closure to materialize.
    #[arg(long, global = true, default_value_t = globact::matgroup::DEFAULT_CLOSURE_CAP)]
    pub cap_closure: usize,
    /// Search steps per homotopy question.
    #[arg(long, global = true, default_value_t = globact::path::DEFAULT_MAX_STEPS)]
    pub cap_steps: usize,
    /// Longest path window during homotopy search.
    #[arg(long, global = true)]
    pub cap_window: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Include wall time in the report.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub timing: bool,
}

impl Common {
    pub fn ring(&self) -> Result<Arc<FiniteRing>, CliError> {
        let spec = self
            .ring
            .as_deref()
            .ok_or_else(|| CliError::Config("--ring is required".into()))?;
        spec.parse()
            .map(Arc::new)
            .map_err(|e: globact::ring::RingError| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < 3 {
            return Err(CliError::Config(format!("--n must be at least 3 (got {})", self.n)));
        }
        if self.cap_closure == 0 || self.cap_steps == 0 || self.cap_window == Some(0) {
            return Err(CliError::Config("caps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Json(_) => 1,
            CliError::Cap(_) => 2,
            CliError::Inconsistent(_) => 4,
        }
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::ClosureCap { .. } => CliError::Cap(e.to_string()),
            other => CliError::Inconsistent(other.to_string()),
        }
    }
}

impl From<UmError> for CliError {
    fn from(e: UmError) -> Self {
        match e {
            UmError::TooLarge { .. } => CliError::Cap(e.to_string()),
            UmError::SmallDimension(_) | UmError::LargeDimension(_) | UmError::Length { .. } => {
                CliError::Config(e.to_string())
            }
            UmError::Action(a) => CliError::Inconsistent(a.to_string()),
        }
    }
}

impl From<CoveringError> for CliError {
    fn from(e: CoveringError) -> Self {
        match e {
            CoveringError::Matrix(m) => m.into(),
            other => CliError::Inconsistent(other.to_string()),
        }
    }
}

impl From<KError> for CliError {
    fn from(e: KError) -> Self {
        match e {
            KError::TooLarge { .. } => CliError::Cap(e.to_string()),
            KError::Matrix(m) => m.into(),
            KError::Covering(c) => c.into(),
            KError::Um(u) => u.into(),
            other => CliError::Inconsistent(other.to_string()),
        }
    }
}

impl From<PathError> for CliError {
    fn from(e: PathError) -> Self {
        CliError::Config(e.to_string())
    }
}
