//! Run configuration: a TOML file, overridden field by field by CLI flags.

use std::path::{Path, PathBuf};

use halfspace_core::bench::{ExperimentSpec, Method};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Train,
    Detect,
    #[default]
    Bench,
    Report,
}

impl Command {
    fn default_out(self) -> &'static str {
        match self {
            Command::Train => "model.json",
            Command::Detect => "detector.json",
            Command::Bench | Command::Report => "results",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Input CSV for `train` and `detect`.
    pub data: Option<PathBuf>,
    /// The input CSV starts with a header line.
    pub header: bool,
    /// Learner used by `train`.
    pub method: Option<Method>,
    /// Output file (`train`, `detect`) or directory (`bench`, `report`).
    pub out: Option<PathBuf>,
    /// Synthetic-data protocol and every learner hyperparameter.
    pub experiment: ExperimentSpec,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn out_path(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(self.command.default_out()))
    }

    pub fn train_method(&self) -> Method {
        self.method.unwrap_or(Method::Proposed)
    }

    /// Range checks on everything the selected command consumes.
    pub fn validate(&self) -> Result<(), CliError> {
        match self.command {
            Command::Bench => self.experiment.validate().map_err(|e| CliError::Config(e.to_string())),
            Command::Train | Command::Detect => {
                if self.data.is_none() {
                    return Err(CliError::Config("field `data`: an input CSV is required".into()));
                }
                if self.command == Command::Train && self.train_method() == Method::DecisionTree {
                    return Err(CliError::Config(
                        "field `method`: train supports proposed, logistic and linear_svm".into(),
                    ));
                }
                self.experiment.train.hp.validate().map_err(|e| CliError::Config(e.to_string()))
            }
            Command::Report => Ok(()),
        }
    }
}
