//! Run configuration: defaults, `key=value` file, environment, then flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;
use zetaladder::experiments::{LabConfig, DEFAULT_FLOOR, DEFAULT_T0, DEFAULT_TOL};
use zetaladder::ladder::LadderConstants;

/// Environment variable overriding the cache location.
pub const CACHE_ENV: &str = "ZETALADDER_CACHE";
pub const DEFAULT_CACHE: &str = ".zetaladder/grid.bin";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config file {path}, line {line}: {message}")]
    Syntax {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid {key} = {value:?}: {message}")]
    Invalid {
        key: &'static str,
        value: String,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("expected csv or json, got {s:?}")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub cache_path: PathBuf,
    pub tol: f64,
    pub t0: f64,
    pub c0: f64,
    pub thread_budget: usize,
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cache_path: PathBuf::from(DEFAULT_CACHE),
            tol: DEFAULT_TOL,
            t0: DEFAULT_T0,
            c0: 0.0,
            thread_budget: std::thread::available_parallelism().map_or(1, |n| n.get()),
            output_format: OutputFormat::Csv,
        }
    }
}

/// Values given on the command line; `None` leaves the lower layer in place.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub cache_path: Option<PathBuf>,
    pub tol: Option<f64>,
    pub t0: Option<f64>,
    pub c0: Option<f64>,
    pub thread_budget: Option<usize>,
    pub output_format: Option<OutputFormat>,
}

fn invalid(key: &'static str, value: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        value: value.to_string(),
        message: message.into(),
    }
}

fn parse<T: FromStr>(key: &'static str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| invalid(key, value, e.to_string()))
}

impl RunConfig {
    /// Layers defaults, the optional config file, the environment and the
    /// command-line overrides, then validates the result.
    pub fn resolve(
        file: Option<&Path>,
        env_cache: Option<String>,
        overrides: &Overrides,
    ) -> Result<Self, ConfigError> {
        let mut config = RunConfig::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
                path: path.to_path_buf(),
                source,
            })?;
            config.apply_file(path, &text)?;
        }
        if let Some(cache) = env_cache.filter(|s| !s.is_empty()) {
            config.cache_path = PathBuf::from(cache);
        }
        let o = overrides;
        if let Some(v) = &o.cache_path {
            config.cache_path = v.clone();
        }
        config.tol = o.tol.unwrap_or(config.tol);
        config.t0 = o.t0.unwrap_or(config.t0);
        config.c0 = o.c0.unwrap_or(config.c0);
        config.thread_budget = o.thread_budget.unwrap_or(config.thread_budget);
        config.output_format = o.output_format.unwrap_or(config.output_format);
        config.validate()?;
        Ok(config)
    }

    fn apply_file(&mut self, path: &Path, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: String| ConfigError::Syntax {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| syntax("expected key = value".into()))?;
            let value = value.trim();
            match key.trim() {
                "cache_path" => self.cache_path = PathBuf::from(value),
                "tol" => self.tol = parse("tol", value)?,
                "t0" => self.t0 = parse("t0", value)?,
                "c0" => self.c0 = parse("c0", value)?,
                "thread_budget" => self.thread_budget = parse("thread_budget", value)?,
                "output_format" => self.output_format = parse("output_format", value)?,
                other => return Err(syntax(format!("unknown key {other:?}"))),
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.cache_path.as_os_str().is_empty() {
            return Err(invalid("cache_path", "", "empty path"));
        }
        if self.thread_budget == 0 || self.thread_budget > 1024 {
            return Err(invalid(
                "thread_budget",
                &self.thread_budget.to_string(),
                "expected 1..=1024",
            ));
        }
        self.lab_config()
            .validate()
            .map_err(|e| invalid("lab settings", &format!("tol={} t0={} c0={}", self.tol, self.t0, self.c0), e.to_string()))
    }

    pub fn lab_config(&self) -> LabConfig {
        LabConfig {
            tol: self.tol,
            t0: self.t0,
            floor: DEFAULT_FLOOR,
            constants: LadderConstants::with_c0(self.c0),
            track_step: 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layering() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.conf");
        std::fs::write(
            &file,
            "# comment\ncache_path = /tmp/a.bin\ntol=1e-7\noutput_format = json\n",
        )
        .unwrap();
        let c = RunConfig::resolve(Some(&file), None, &Overrides::default()).unwrap();
        assert_eq!(c.cache_path, PathBuf::from("/tmp/a.bin"));
        assert_eq!(c.tol, 1e-7);
        assert_eq!(c.output_format, OutputFormat::Json);
        let c = RunConfig::resolve(Some(&file), Some("/tmp/b.bin".into()), &Overrides::default())
            .unwrap();
        assert_eq!(c.cache_path, PathBuf::from("/tmp/b.bin"));
        let o = Overrides {
            cache_path: Some("/tmp/c.bin".into()),
            tol: Some(1e-8),
            ..Overrides::default()
        };
        let c = RunConfig::resolve(Some(&file), Some("/tmp/b.bin".into()), &o).unwrap();
        assert_eq!(c.cache_path, PathBuf::from("/tmp/c.bin"));
        assert_eq!(c.tol, 1e-8);
    }

    #[test]
    fn rejects_bad_values() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.conf");
        std::fs::write(&file, "tol = fast\n").unwrap();
        assert!(RunConfig::resolve(Some(&file), None, &Overrides::default()).is_err());
        std::fs::write(&file, "colour = red\n").unwrap();
        assert!(matches!(
            RunConfig::resolve(Some(&file), None, &Overrides::default()),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        let o = Overrides {
            thread_budget: Some(0),
            ..Overrides::default()
        };
        assert!(RunConfig::resolve(None, None, &o).is_err());
        let o = Overrides {
            t0: Some(5.0),
            ..Overrides::default()
        };
        assert!(RunConfig::resolve(None, None, &o).is_err());
    }
}
