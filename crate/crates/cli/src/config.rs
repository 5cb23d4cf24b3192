//! Run configuration: command-line flags, then a flat `key = value` file,
//! then built-in defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::CliError;

/// Environment variable naming the directory used when `--output` is absent.
pub const OUTPUT_DIR_VAR: &str = "JWDISCORD_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum,
    DiscordMatrix,
    SweepB,
    SweepNoise,
    Verify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::DiscordMatrix => "discord-matrix",
            Self::SweepB => "sweep-b",
            Self::SweepNoise => "sweep-noise",
            Self::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every setting as it may appear on the command line. Unset flags fall
/// back to the config file, then to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Flat `key = value` file; keys are the long flag names.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Chain length N.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Polarized node (1-based).
    #[arg(long, global = true)]
    pub j0: Option<usize>,
    /// Parasitic polarization of both neighbours of j0.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Polarization of j0 (default 10).
    #[arg(long = "b-j0", global = true)]
    pub b_j0: Option<f64>,
    /// Coupling D.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub d: Option<f64>,
    /// Field ω0.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega0: Option<f64>,
    /// Upper end of the b grid.
    #[arg(long = "b-max", global = true)]
    pub b_max: Option<f64>,
    /// Number of b grid points.
    #[arg(long, global = true)]
    pub points: Option<usize>,
    /// Noise amplitudes, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Realizations per noise amplitude.
    #[arg(long = "n-real", global = true)]
    pub n_real: Option<usize>,
    /// Noise truncation orders, comma separated (1, 2).
    #[arg(long, global = true, value_delimiter = ',')]
    pub order: Option<Vec<u8>>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Times for the stationarity and oracle checks, comma separated.
    #[arg(long = "t-grid", global = true, value_delimiter = ',')]
    pub t_grid: Option<Vec<f64>>,
    /// Explicit cluster (1-based modes, comma separated) instead of the
    /// predicted one.
    #[arg(long, global = true, value_delimiter = ',')]
    pub cluster: Option<Vec<usize>>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

/// Fully resolved settings; this is what the config hash covers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub j0: Option<usize>,
    pub b: f64,
    pub b_j0: f64,
    pub d: f64,
    pub omega0: f64,
    pub b_max: f64,
    pub points: usize,
    pub eps: Option<Vec<f64>>,
    pub n_real: usize,
    pub order: Vec<u8>,
    pub seed: u64,
    pub t_grid: Vec<f64>,
    pub cluster: Option<Vec<usize>>,
    pub format: Format,
    #[serde(skip)]
    pub output: PathBuf,
}

fn parse_one<T: FromStr>(key: &str, raw: &str) -> Result<T, CliError>
where
    T::Err: Display,
{
    raw.trim()
        .parse()
        .map_err(|e| CliError::Config(format!("{key}: cannot parse {raw:?}: {e}")))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>, CliError>
where
    T::Err: Display,
{
    raw.split(',').map(|s| parse_one(key, s)).collect()
}

/// `key = value` lines; `#` starts a comment. Keys accept `-` or `_`.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

impl Flags {
    /// Fill unset flags from `file`; unknown keys are an error.
    pub fn merge_file(mut self, file: &BTreeMap<String, String>) -> Result<Self, CliError> {
        for (key, raw) in file {
            let k = key.as_str();
            match k {
                "n" => self.n = self.n.or(Some(parse_one(k, raw)?)),
                "j0" => self.j0 = self.j0.or(Some(parse_one(k, raw)?)),
                "b" => self.b = self.b.or(Some(parse_one(k, raw)?)),
                "b-j0" => self.b_j0 = self.b_j0.or(Some(parse_one(k, raw)?)),
                "d" => self.d = self.d.or(Some(parse_one(k, raw)?)),
                "omega0" => self.omega0 = self.omega0.or(Some(parse_one(k, raw)?)),
                "b-max" => self.b_max = self.b_max.or(Some(parse_one(k, raw)?)),
                "points" => self.points = self.points.or(Some(parse_one(k, raw)?)),
                "eps" => self.eps = self.eps.or(Some(parse_list(k, raw)?)),
                "n-real" => self.n_real = self.n_real.or(Some(parse_one(k, raw)?)),
                "order" => self.order = self.order.or(Some(parse_list(k, raw)?)),
                "seed" => self.seed = self.seed.or(Some(parse_one(k, raw)?)),
                "t-grid" => self.t_grid = self.t_grid.or(Some(parse_list(k, raw)?)),
                "cluster" => self.cluster = self.cluster.or(Some(parse_list(k, raw)?)),
                "output" => self.output = self.output.or(Some(PathBuf::from(raw))),
                "format" => {
                    if self.format.is_none() {
                        self.format = Some(Format::from_str(raw, true).map_err(|e| CliError::Config(format!("format: {e}")))?);
                    }
                }
                _ => return Err(CliError::Config(format!("unknown config key {key:?}"))),
            }
        }
        Ok(self)
    }

    pub fn resolve(self, experiment: Experiment) -> Result<RunConfig, CliError> {
        let flags = match &self.config {
            Some(path) => self.clone().merge_file(&read_config_file(path)?)?,
            None => self,
        };
        let format = flags.format.unwrap_or(Format::Csv);
        let output = match flags.output {
            Some(p) => p,
            None => {
                let dir = std::env::var_os(OUTPUT_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
                let ext = match format {
                    Format::Csv => "csv",
                    Format::Json => "json",
                };
                dir.join(format!("{}.{ext}", experiment.name()))
            }
        };
        let cfg = RunConfig {
            experiment,
            n: flags.n.unwrap_or(if experiment == Experiment::Verify { 6 } else { 17 }),
            j0: flags.j0,
            b: flags.b.unwrap_or(0.0),
            b_j0: flags.b_j0.unwrap_or(10.0),
            d: flags.d.unwrap_or(1.0),
            omega0: flags.omega0.unwrap_or(0.0),
            b_max: flags.b_max.unwrap_or(0.96),
            points: flags.points.unwrap_or(97),
            eps: match experiment {
                Experiment::SweepNoise => Some(flags.eps.unwrap_or_else(|| vec![0.0, 0.1, 0.2, 0.3, 0.4])),
                _ => flags.eps,
            },
            n_real: flags.n_real.unwrap_or(100),
            order: flags.order.unwrap_or_else(|| match experiment {
                Experiment::DiscordMatrix => vec![2],
                _ => vec![1, 2],
            }),
            seed: flags.seed.unwrap_or(1),
            t_grid: flags.t_grid.unwrap_or_else(|| jw_discord::verify::T_GRID.to_vec()),
            cluster: flags.cluster,
            format,
            output,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let needs_j0 = matches!(
            self.experiment,
            Experiment::DiscordMatrix | Experiment::SweepB | Experiment::SweepNoise
        );
        if needs_j0 && self.j0.is_none() {
            return bad(format!("{} needs --j0", self.experiment.name()));
        }
        if self.order.is_empty() || self.order.iter().any(|o| !(1..=2).contains(o)) {
            return bad(format!("order must be 1 and/or 2, got {:?}", self.order));
        }
        if self.experiment == Experiment::DiscordMatrix && self.eps.is_some() && self.order.len() != 1 {
            return bad("a noise discord matrix needs exactly one --order".into());
        }
        if let Some(eps) = &self.eps {
            if eps.is_empty() || eps.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
                return bad(format!("eps must be finite and >= 0, got {eps:?}"));
            }
        }
        if self.n_real == 0 {
            return bad("n-real must be at least 1".into());
        }
        if self.experiment == Experiment::SweepB && (self.points < 2 || !(self.b_max > 0.0)) {
            return bad("sweep-b needs --points >= 2 and --b-max > 0".into());
        }
        if self.t_grid.is_empty() || self.t_grid.iter().any(|t| !t.is_finite()) {
            return bad("t-grid must be a non-empty list of finite times".into());
        }
        Ok(())
    }

    /// SHA-256 of the resolved settings (the output path excluded).
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }
}
