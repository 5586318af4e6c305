//! Config loading, error classes and report assembly.

use std::cell::RefCell;
use std::fs;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use freebit_core::toyvm::MACHINE_VERSION;
use freebit_core::ARTIFACT_VERSION;

use crate::{Common, Format};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {message}")]
    Config { message: String, schema: &'static str },
    #[error("{0}")]
    Invalid(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 2,
            _ => 1,
        }
    }

    pub fn schema(&self) -> Option<&'static str> {
        match self {
            CliError::Config { schema, .. } => Some(schema),
            _ => None,
        }
    }

    /// Wraps a library error that reflects bad input.
    pub fn invalid(e: impl std::fmt::Display) -> Self {
        CliError::Invalid(e.to_string())
    }
}

/// What a command produced: a JSON result object and optionally CSV.
pub struct Output {
    pub result: Value,
    pub csv: Option<String>,
    /// Seed the experiment actually used.
    pub seed: Option<u64>,
}

impl Output {
    pub fn json(result: impl Serialize) -> Result<Self, CliError> {
        Ok(Output {
            result: serde_json::to_value(result).map_err(|e| CliError::Internal(e.to_string()))?,
            csv: None,
            seed: None,
        })
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

pub struct Context {
    pub config: Option<Value>,
    pub seed: Option<u64>,
    common: Common,
    /// Configuration as parsed, after seed injection.
    effective: RefCell<Option<Value>>,
}

impl Context {
    pub fn new(common: &Common) -> Result<Self, CliError> {
        let config = match &common.config {
            None => None,
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                Some(
                    serde_json::from_str(&text)
                        .map_err(|e| CliError::Usage(format!("{} is not valid JSON: {e}", path.display())))?,
                )
            }
        };
        Ok(Context {
            config,
            seed: common.seed,
            common: common.clone(),
            effective: RefCell::new(None),
        })
    }

    /// Parses the configuration. With `seed_at`, the `--seed` flag is written
    /// into that object (`""` for the top level) before parsing.
    pub fn parse<T: DeserializeOwned>(
        &self,
        schema: &'static str,
        seed_at: Option<&str>,
    ) -> Result<(T, Value), CliError> {
        let mut value = self.config.clone().unwrap_or_else(|| Value::Object(Map::new()));
        if let (Some(key), Some(seed)) = (seed_at, self.seed) {
            let target = if key.is_empty() {
                Some(&mut value)
            } else {
                value.get_mut(key)
            };
            match target {
                Some(Value::Object(obj)) => {
                    obj.insert("seed".into(), Value::from(seed));
                }
                _ => {
                    return Err(CliError::Config {
                        message: format!("--seed needs an object at `{key}`"),
                        schema,
                    })
                }
            }
        }
        let parsed = serde_json::from_value(value.clone()).map_err(|e| CliError::Config {
            message: e.to_string(),
            schema,
        })?;
        *self.effective.borrow_mut() = Some(value.clone());
        Ok((parsed, value))
    }

    /// Writes the report for `command`.
    pub fn emit(&self, command: &str, output: Output) -> Result<(), CliError> {
        let text = match self.common.format {
            Format::Csv => output
                .csv
                .ok_or_else(|| CliError::Usage(format!("`{command}` has no CSV form; use --format json")))?,
            Format::Json => {
                let mut report = match output.result {
                    Value::Object(m) => m,
                    other => Map::from_iter([("result".to_string(), other)]),
                };
                report.insert("command".into(), Value::from(command));
                report.insert("config".into(), self.config_echo());
                report.insert("seed".into(), output.seed.or(self.seed).map_or(Value::Null, Value::from));
                report.insert("machine".into(), Value::from(MACHINE_VERSION));
                report.insert("version".into(), Value::from(ARTIFACT_VERSION));
                let mut s = serde_json::to_string_pretty(&Value::Object(report))
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                s.push('\n');
                s
            }
        };
        match &self.common.out {
            Some(path) => fs::write(path, text).map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn config_echo(&self) -> Value {
        self.effective
            .borrow()
            .clone()
            .or_else(|| self.config.clone())
            .unwrap_or(Value::Null)
    }
}
