use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {value}")]
    Value { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Otsf,
    Wallcross,
    Torus,
    Swcheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Optional settings from one source (config file or command line).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub dim: Option<usize>,
    pub cutoff: Option<usize>,
    pub flux: Option<Vec<i64>>,
    pub n_max: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub delta_cap: Option<f64>,
    pub root_tol: Option<f64>,
    pub min_samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub timing: Option<bool>,
}

impl Overrides {
    /// Values from `other` win.
    pub fn merge(self, other: Overrides) -> Overrides {
        Overrides {
            seed: other.seed.or(self.seed),
            trials: other.trials.or(self.trials),
            dim: other.dim.or(self.dim),
            cutoff: other.cutoff.or(self.cutoff),
            flux: other.flux.or(self.flux),
            n_max: other.n_max.or(self.n_max),
            samples: other.samples.or(self.samples),
            delta_cap: other.delta_cap.or(self.delta_cap),
            root_tol: other.root_tol.or(self.root_tol),
            min_samples: other.min_samples.or(self.min_samples),
            out: other.out.or(self.out),
            format: other.format.or(self.format),
            timing: other.timing.or(self.timing),
        }
    }

    /// Parses a flat `key = value` file. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Overrides, ConfigError> {
        let mut o = Overrides::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: n + 1, msg: "expected key = value".into() });
            };
            o.set(key.trim(), value.trim())?;
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Overrides, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Overrides::parse(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::Value { key: key.to_string(), value: value.to_string() };
        match key {
            "seed" => self.seed = Some(value.parse().map_err(|_| bad())?),
            "trials" => self.trials = Some(value.parse().map_err(|_| bad())?),
            "dim" => self.dim = Some(value.parse().map_err(|_| bad())?),
            "cutoff" => self.cutoff = Some(value.parse().map_err(|_| bad())?),
            "flux" => self.flux = Some(parse_list(value).ok_or_else(bad)?),
            "n_max" => self.n_max = Some(parse_sizes(value).ok_or_else(bad)?),
            "samples" => self.samples = Some(value.parse().map_err(|_| bad())?),
            "delta_cap" => self.delta_cap = Some(value.parse().map_err(|_| bad())?),
            "root_tol" => self.root_tol = Some(value.parse().map_err(|_| bad())?),
            "min_samples" => self.min_samples = Some(value.parse().map_err(|_| bad())?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => {
                self.format = Some(match value {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => return Err(bad()),
                })
            }
            "timing" => self.timing = Some(value.parse().map_err(|_| bad())?),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }
}

/// Parses `a,b,c`. Also accepts an inclusive range `a..b`.
pub fn parse_list(value: &str) -> Option<Vec<i64>> {
    if let Some((lo, hi)) = value.split_once("..") {
        let lo: i64 = lo.trim().parse().ok()?;
        let hi: i64 = hi.trim().parse().ok()?;
        return Some((lo..=hi).collect());
    }
    value.split(',').map(|s| s.trim().parse().ok()).collect()
}

fn parse_sizes(value: &str) -> Option<Vec<usize>> {
    parse_list(value)?.into_iter().map(|x| usize::try_from(x).ok()).collect()
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub trials: usize,
    pub dim: usize,
    pub cutoff: usize,
    pub flux: Vec<i64>,
    pub n_max: Vec<usize>,
    pub samples: usize,
    pub delta_cap: f64,
    pub root_tol: f64,
    pub min_samples: usize,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub timing: bool,
}

impl RunConfig {
    pub fn defaults(command: Command) -> RunConfig {
        RunConfig {
            command,
            seed: 0,
            trials: 10,
            dim: 4,
            cutoff: 2,
            flux: (-3..=3).collect(),
            n_max: vec![2, 4, 8],
            samples: 9,
            delta_cap: 1e-3,
            root_tol: 1e-10,
            min_samples: 16,
            format: Format::Json,
            out: None,
            timing: false,
        }
    }

    /// Defaults, then the config file, then command-line flags.
    pub fn resolve(command: Command, file: Option<Overrides>, flags: Overrides) -> Result<RunConfig, ConfigError> {
        let o = file.unwrap_or_default().merge(flags);
        let d = RunConfig::defaults(command);
        let cfg = RunConfig {
            command,
            seed: o.seed.unwrap_or(d.seed),
            trials: o.trials.unwrap_or(d.trials),
            dim: o.dim.unwrap_or(d.dim),
            cutoff: o.cutoff.unwrap_or(d.cutoff),
            flux: o.flux.unwrap_or(d.flux),
            n_max: o.n_max.unwrap_or(d.n_max),
            samples: o.samples.unwrap_or(d.samples),
            delta_cap: o.delta_cap.unwrap_or(d.delta_cap),
            root_tol: o.root_tol.unwrap_or(d.root_tol),
            min_samples: o.min_samples.unwrap_or(d.min_samples),
            format: o.format.unwrap_or(d.format),
            out: o.out,
            timing: o.timing.unwrap_or(d.timing),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.trials == 0 {
            return fail("trials must be at least 1");
        }
        if self.dim == 0 {
            return fail("dim must be at least 1");
        }
        if self.cutoff == 0 {
            return fail("cutoff must be at least 1");
        }
        if self.flux.is_empty() {
            return fail("flux list is empty");
        }
        if self.n_max.is_empty() || self.n_max.iter().any(|&n| n < 2) {
            return fail("every n_max must be at least 2");
        }
        if self.samples < 2 || self.min_samples < 2 {
            return fail("samples and min_samples must be at least 2");
        }
        if !(self.delta_cap > 0.0) || !(self.root_tol > 0.0) {
            return fail("delta_cap and root_tol must be positive");
        }
        Ok(())
    }

    pub fn ot_config(&self) -> swflow::orient::OtConfig {
        let mut c = swflow::orient::OtConfig::default();
        c.sf.delta_cap = self.delta_cap;
        c.sf.root_tol = self.root_tol;
        c.min_samples = self.min_samples;
        c
    }
}
