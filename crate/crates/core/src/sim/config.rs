use std::collections::HashSet;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::storage::SystemParams;

/// One experiment run, read from flat `key = value` text.
///
/// ```text
/// # comments and blank lines are ignored
/// experiment = span-prob
/// m = 16
/// trials = 200
/// deltas = 0.1, 0.2, 0.3, 0.4
/// seed = 1
/// output = span16.csv
/// ```
///
/// Keys: `experiment` (required), `n`/`servers`, `h`/`files_per_server`,
/// `m`/`contents`, `M`/`content_bits`, `bias`, `epsilon`, `a`, `b`, `trials`,
/// `seed`, `output`, `deltas`, `ms`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub servers: usize,
    pub files_per_server: usize,
    pub contents: usize,
    pub content_bits: usize,
    pub bias: f64,
    pub epsilon: f64,
    pub a: usize,
    pub b: usize,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub deltas: Vec<f64>,
    /// Dimensions to sweep; experiments that take a single `m` ignore it
    /// when unset.
    pub ms: Option<Vec<usize>>,
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_string(),
            servers: 8,
            files_per_server: 8,
            contents: 16,
            content_bits: 64,
            bias: 0.5,
            epsilon: 0.01,
            a: 2,
            b: 1,
            trials: 1000,
            seed: 0,
            output: None,
            deltas: vec![0.1, 0.2, 0.3, 0.4],
            ms: None,
        }
    }

    pub fn params(&self) -> Result<SystemParams> {
        SystemParams::new(
            self.servers,
            self.files_per_server,
            self.contents,
            self.content_bits,
            self.bias,
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::new("");
        let mut seen = HashSet::new();
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| Error::Config { line: line_no, reason };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let canonical = match key {
                "n" | "servers" => "n",
                "h" | "files_per_server" => "h",
                "m" | "contents" => "m",
                "M" | "content_bits" => "M",
                other => other,
            };
            if !seen.insert(canonical.to_string()) {
                return Err(err(format!("duplicate key {key:?}")));
            }
            let num = |v: &str| -> Result<usize> { v.parse().map_err(|_| err(format!("{key}: bad count {v:?}"))) };
            let real = |v: &str| -> Result<f64> { v.parse().map_err(|_| err(format!("{key}: bad number {v:?}"))) };
            match canonical {
                "experiment" => config.experiment = value.to_string(),
                "n" => config.servers = num(value)?,
                "h" => config.files_per_server = num(value)?,
                "m" => config.contents = num(value)?,
                "M" => config.content_bits = num(value)?,
                "bias" => config.bias = real(value)?,
                "epsilon" => config.epsilon = real(value)?,
                "a" => config.a = num(value)?,
                "b" => config.b = num(value)?,
                "trials" => config.trials = num(value)?,
                "seed" => config.seed = value.parse().map_err(|_| err(format!("seed: bad integer {value:?}")))?,
                "output" => config.output = Some(PathBuf::from(value)),
                "deltas" => config.deltas = value.split(',').map(|v| real(v.trim())).collect::<Result<_>>()?,
                "ms" => config.ms = Some(value.split(',').map(|v| num(v.trim())).collect::<Result<_>>()?),
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        if config.experiment.is_empty() {
            return Err(Error::Config {
                line: 0,
                reason: "missing `experiment` key".into(),
            });
        }
        Ok(config)
    }

    /// Reads a config file; a relative `output` is resolved against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::parse(&text)?;
        if let (Some(out), Some(dir)) = (&config.output, path.parent()) {
            if out.is_relative() {
                config.output = Some(dir.join(out));
            }
        }
        Ok(config)
    }
}
