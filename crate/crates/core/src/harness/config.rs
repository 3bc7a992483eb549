//! Command-line flags, the JSON config file and the validated [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize};

use super::{Backend, HarnessError, HarnessResult};
use crate::group::BackendFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Liebn,
    Mliebn,
    Dsmliebn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Geometry,
    Rotation,
    Liebn,
    Gaussian,
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Rotation => "rotation",
            Suite::Liebn => "liebn",
            Suite::Gaussian => "gaussian",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Normalize,
    Verify,
    Sample,
    Bench,
}

#[derive(Parser, Debug)]
#[command(
    name = "liebn",
    version,
    about = "Lie-group batch normalization on SPD matrices, rotations and vectors"
)]
pub struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Normalize synthetic (or file-supplied) batches and record per-step statistics.
    Normalize {
        #[command(flatten)]
        flags: Flags,
        /// Matrix file to read batches from instead of synthesizing them.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run the property suites.
    Verify {
        #[command(flatten)]
        flags: Flags,
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        /// Multiplies every tolerance (test fixture for the failure path).
        #[arg(long, hide = true)]
        tolerance_scale: Option<f64>,
    },
    /// Draw from the Riemannian Gaussian and summarize the sample.
    Sample {
        #[command(flatten)]
        flags: Flags,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        sigma: Option<f64>,
        /// Also check the dispersion-scaling law for this factor.
        #[arg(long)]
        scaling: Option<f64>,
        /// Matrix file to write the samples to.
        #[arg(long)]
        samples_out: Option<PathBuf>,
    },
    /// Time forward passes per (family, dim) cell.
    Bench {
        #[command(flatten)]
        flags: Flags,
    },
}

/// Flags shared by all subcommands. Unset flags keep the config default.
#[derive(Args, Debug, Default)]
struct Flags {
    /// Backend family; verify and bench accept a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    family: Option<Vec<BackendFamily>>,
    /// Matrix or vector dimension; verify and bench accept a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    dim: Option<Vec<usize>>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, value_enum)]
    algo: Option<Algo>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    scale: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    momentum: Option<f64>,
    /// Length of the train-momentum schedule.
    #[arg(long = "K")]
    big_k: Option<usize>,
    /// Domains per batch; the schedule target is `1 / domains`.
    #[arg(long)]
    domains: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Standard deviation of synthetic batches in the tangent space at the centre.
    #[arg(long)]
    spread: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// JSON file whose keys override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl clap::ValueEnum for BackendFamily {
    fn value_variants<'a>() -> &'a [Self] {
        &[
            BackendFamily::SpdAim,
            BackendFamily::SpdLem,
            BackendFamily::SpdLcm,
            BackendFamily::So,
            BackendFamily::Euclidean,
        ]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.as_str()))
    }
}

fn one_or_many<'de, D, T>(d: D) -> Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    })
}

/// Every knob of every subcommand. Serialized verbatim into reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(deserialize_with = "one_or_many")]
    pub family: Vec<BackendFamily>,
    #[serde(deserialize_with = "one_or_many")]
    pub dim: Vec<usize>,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub algo: Algo,
    pub batch_size: usize,
    pub steps: usize,
    /// Row-major entries of the bias `B` (or the Gaussian mean for `sample`); `E` when absent.
    pub bias: Option<Vec<f64>>,
    pub scale: f64,
    pub epsilon: f64,
    pub momentum: f64,
    #[serde(rename = "K")]
    pub big_k: usize,
    pub domains: usize,
    pub seed: u64,
    /// Backend default when absent: 1.0, or 0.2 on `so`.
    pub spread: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub input: Option<PathBuf>,
    pub suite: Suite,
    /// Dimensions given explicitly to `verify`; otherwise each property uses its own grid.
    pub verify_dims: bool,
    /// Families given explicitly to `verify`; otherwise all families run.
    pub verify_families: bool,
    pub tolerance_scale: f64,
    pub samples: usize,
    pub sigma: f64,
    pub scaling: Option<f64>,
    pub samples_out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: vec![BackendFamily::SpdLem],
            dim: vec![3],
            theta: 1.0,
            alpha: 1.0,
            beta: 0.0,
            algo: Algo::Liebn,
            batch_size: 32,
            steps: 10,
            bias: None,
            scale: 1.0,
            epsilon: 1e-5,
            momentum: 0.1,
            big_k: 10,
            domains: 1,
            seed: 0,
            spread: None,
            out: None,
            format: OutputFormat::Json,
            input: None,
            suite: Suite::All,
            verify_dims: false,
            verify_families: false,
            tolerance_scale: 1.0,
            samples: 1000,
            sigma: 1.0,
            scaling: None,
            samples_out: None,
        }
    }
}

fn config_error(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

impl Cli {
    /// Applies flags over the defaults, then the `--config` file over the
    /// flags, then validates.
    pub fn into_config(self) -> HarnessResult<(Command, RunConfig)> {
        let mut cfg = RunConfig::default();
        let (command, flags) = match self.command {
            CliCommand::Normalize { flags, input } => {
                cfg.input = input;
                (Command::Normalize, flags)
            }
            CliCommand::Verify { flags, suite, tolerance_scale } => {
                cfg.suite = suite.unwrap_or(Suite::All);
                cfg.tolerance_scale = tolerance_scale.unwrap_or(1.0);
                cfg.verify_dims = flags.dim.is_some();
                cfg.verify_families = flags.family.is_some();
                (Command::Verify, flags)
            }
            CliCommand::Sample { flags, samples, sigma, scaling, samples_out } => {
                if let Some(n) = samples {
                    cfg.samples = n;
                }
                if let Some(s) = sigma {
                    cfg.sigma = s;
                }
                cfg.scaling = scaling;
                cfg.samples_out = samples_out;
                (Command::Sample, flags)
            }
            CliCommand::Bench { flags } => (Command::Bench, flags),
        };
        let config_path = flags.config.clone();
        flags.apply(&mut cfg);
        if let Some(path) = config_path {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            cfg = cfg.overridden_by(&text)?;
            if command == Command::Verify {
                let keys: serde_json::Value = serde_json::from_str(&text).unwrap_or_default();
                cfg.verify_dims |= keys.get("dim").is_some();
                cfg.verify_families |= keys.get("family").is_some();
            }
        }
        cfg.validate(command)?;
        Ok((command, cfg))
    }
}

impl Flags {
    fn apply(self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { cfg.$field = v; } )* };
        }
        set!(family, dim, theta, alpha, beta, algo, batch_size, steps, scale, epsilon, momentum, big_k, domains, seed, format);
        if self.spread.is_some() {
            cfg.spread = self.spread;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
    }
}

impl RunConfig {
    /// Overrides fields with the keys of a JSON object.
    pub fn overridden_by(&self, json: &str) -> HarnessResult<RunConfig> {
        let patch: serde_json::Value =
            serde_json::from_str(json).map_err(|e| config_error(format!("config file: {e}")))?;
        let serde_json::Value::Object(patch) = patch else {
            return Err(config_error("config file must hold a JSON object"));
        };
        let mut base = serde_json::to_value(self).map_err(|e| config_error(e.to_string()))?;
        let map = base.as_object_mut().expect("RunConfig serializes to an object");
        for (k, v) in patch {
            map.insert(k, v);
        }
        serde_json::from_value(base).map_err(|e| config_error(format!("config file: {e}")))
    }

    /// Re-validates every numeric constraint of the modules involved.
    pub fn validate(&self, command: Command) -> HarnessResult<()> {
        if self.family.is_empty() || self.dim.is_empty() {
            return Err(config_error("family and dim must be non-empty"));
        }
        if matches!(command, Command::Normalize | Command::Sample) && (self.family.len() > 1 || self.dim.len() > 1) {
            return Err(config_error("normalize and sample take a single family and dim"));
        }
        for &family in &self.family {
            for &dim in &self.dim {
                if command == Command::Verify {
                    continue;
                }
                self.backend_for(family, dim)
                    .map_err(|e| config_error(format!("{family} dim {dim}: {e}")))?;
            }
        }
        if command == Command::Verify {
            if !(self.tolerance_scale.is_finite() && self.tolerance_scale >= 0.0) {
                return Err(config_error("tolerance scale must be finite and non-negative"));
            }
            if self.dim.contains(&0) {
                return Err(config_error("dimensions must be positive"));
            }
            return Ok(());
        }
        crate::liebn::LieBn::new(crate::Euclidean::new(1)?, self.scale, self.epsilon, self.momentum)
            .map_err(|e| config_error(e.to_string()))?;
        if self.batch_size == 0 {
            return Err(config_error("batch size must be positive"));
        }
        if self.steps == 0 {
            return Err(config_error("steps must be positive"));
        }
        if self.domains == 0 {
            return Err(config_error("domains must be positive"));
        }
        if self.algo != Algo::Liebn {
            crate::liebn::gamma_train(self.big_k, 1, 1.0 / self.domains as f64)
                .map_err(|e| config_error(e.to_string()))?;
        }
        if let Some(s) = self.spread {
            if !(s.is_finite() && s > 0.0) {
                return Err(config_error(format!("spread must be positive, got {s}")));
            }
        }
        if command == Command::Sample {
            if self.samples == 0 {
                return Err(config_error("samples must be positive"));
            }
            if !(self.sigma.is_finite() && self.sigma > 0.0) {
                return Err(config_error(format!("sigma must be positive, got {}", self.sigma)));
            }
            if let Some(s) = self.scaling {
                if !s.is_finite() || s == 0.0 {
                    return Err(config_error(format!("scaling factor must be non-zero, got {s}")));
                }
            }
        }
        if let Some(entries) = &self.bias {
            if self.family.len() > 1 || self.dim.len() > 1 {
                return Err(config_error("a bias needs a single family and dim"));
            }
            if self.algo == Algo::Dsmliebn && command != Command::Sample {
                return Err(config_error("dsmliebn keeps the bias at the identity"));
            }
            let backend = self.backend_for(self.family[0], self.dim[0]).map_err(|e| config_error(e.to_string()))?;
            super::with_backend!(backend, g => {
                use crate::group::LieGroup;
                g.point_from_entries(entries).map_err(|e| config_error(format!("bias: {e}")))?;
            });
        }
        Ok(())
    }

    /// Backend for one (family, dim) cell. `spd-lcm` ignores `alpha` and
    /// `beta` when several families share a config (bench).
    pub fn backend_for(&self, family: BackendFamily, dim: usize) -> crate::Result<Backend> {
        let (alpha, beta) = if family == BackendFamily::SpdLcm && self.family.len() > 1 {
            (1.0, 0.0)
        } else {
            (self.alpha, self.beta)
        };
        Backend::build(family, dim, self.theta, alpha, beta)
    }
}

impl RunConfig {
    /// Copy embedded in reports: the output path is left out so that runs
    /// differing only in where they write produce identical documents.
    pub fn for_report(&self) -> RunConfig {
        RunConfig { out: None, ..self.clone() }
    }
}
