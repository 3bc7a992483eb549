//! Command-line front end: synthetic normalization runs, the property
//! suites, Gaussian sampling and timing, all emitting versioned reports.

pub mod config;
pub mod matfile;
mod normalize;
pub mod report;
pub mod schema;
mod sample;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::gaussian::GaussianBackend;
use crate::group::{BackendFamily, Euclidean};
use crate::matkernels::SymMatrix;
use crate::random::{random_skew, random_sym};
use crate::so::{SkewMatrix, SoGroup};
use crate::spd::{SpdFamily, SpdMetric};

pub use config::{Algo, Cli, Command, OutputFormat, RunConfig, Suite};
pub use normalize::{cmd_bench, cmd_normalize};
pub use report::SCHEMA_VERSION;
pub use sample::cmd_sample;
pub use verify::cmd_verify;

/// Exit codes of the `liebn` binary.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const PROPERTY_FAILURE: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
    pub const NUMERIC_ERROR: i32 = 3;
}

/// Failure of a harness command.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {}", .0.name(), .0)]
    Numeric(Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => exit::CONFIG_ERROR,
            HarnessError::Numeric(_) => exit::NUMERIC_ERROR,
        }
    }
}

impl From<Error> for HarnessError {
    fn from(e: Error) -> Self {
        match e {
            Error::UnsupportedBackend(_) => HarnessError::Config(format!("{}: {e}", e.name())),
            e => HarnessError::Numeric(e),
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;

/// A concrete backend selected by a config.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Backend {
    Spd(SpdMetric),
    So(SoGroup),
    Euclidean(Euclidean),
}

impl Backend {
    /// `theta`, `alpha` and `beta` are ignored by `so` and `euclidean`.
    pub fn build(family: BackendFamily, dim: usize, theta: f64, alpha: f64, beta: f64) -> crate::Result<Self> {
        Ok(match family {
            BackendFamily::SpdAim => Backend::Spd(SpdMetric::new(SpdFamily::Aim, dim, theta, alpha, beta)?),
            BackendFamily::SpdLem => Backend::Spd(SpdMetric::new(SpdFamily::Lem, dim, theta, alpha, beta)?),
            BackendFamily::SpdLcm => Backend::Spd(SpdMetric::new(SpdFamily::Lcm, dim, theta, alpha, beta)?),
            BackendFamily::So => Backend::So(SoGroup::new(dim)?),
            BackendFamily::Euclidean => Backend::Euclidean(Euclidean::new(dim)?),
        })
    }

    pub fn family(&self) -> BackendFamily {
        match self {
            Backend::Spd(m) => m.family().backend_family(),
            Backend::So(_) => BackendFamily::So,
            Backend::Euclidean(_) => BackendFamily::Euclidean,
        }
    }
}

/// Runs `$body` with `$g` bound to the concrete backend inside `$backend`.
macro_rules! with_backend {
    ($backend:expr, $g:ident => $body:expr) => {
        match $backend {
            $crate::harness::Backend::Spd($g) => $body,
            $crate::harness::Backend::So($g) => $body,
            $crate::harness::Backend::Euclidean($g) => $body,
        }
    };
}
pub(crate) use with_backend;

/// What the harness needs beyond [`GaussianBackend`]: random tangent
/// vectors at `E` for synthesizing batches.
pub trait HarnessBackend: GaussianBackend + Clone + 'static {
    /// Tangent vector at `E` whose coordinates are `N(0, spread²)`.
    fn random_tangent(&self, rng: &mut ChaCha20Rng, spread: f64) -> Self::Tangent;

    /// Spread used when the config does not set one.
    fn default_spread(&self) -> f64 {
        1.0
    }
}

impl HarnessBackend for SpdMetric {
    fn random_tangent(&self, rng: &mut ChaCha20Rng, spread: f64) -> SymMatrix {
        random_sym(rng, self.dim(), spread)
    }
}

impl HarnessBackend for SoGroup {
    fn random_tangent(&self, rng: &mut ChaCha20Rng, spread: f64) -> SkewMatrix {
        random_skew(rng, self.dim(), spread)
    }

    // Keeps synthetic batches well inside the ball where the mean is unique.
    fn default_spread(&self) -> f64 {
        0.2
    }
}

impl HarnessBackend for Euclidean {
    fn random_tangent(&self, rng: &mut ChaCha20Rng, spread: f64) -> nalgebra::DVector<f64> {
        nalgebra::DVector::from_fn(self.dim(), |_, _| spread * rng.sample::<f64, _>(StandardNormal))
    }
}

/// SplitMix64 finalizer, used to derive independent seeds.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Drops every object key ending in `_ms` (timings), recursively.
pub fn strip_timings(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.retain(|k, _| !k.ends_with("_ms"));
            map.values_mut().for_each(strip_timings);
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Reports go to `--out` or stdout,
/// diagnostics to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG_ERROR } else { exit::SUCCESS };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> HarnessResult<i32> {
    let (command, config) = cli.into_config()?;
    let (document, code) = match command {
        Command::Normalize => {
            let r = cmd_normalize(&config)?;
            (report::render(&r, &r.csv_rows(), config.format)?, exit::SUCCESS)
        }
        Command::Verify => {
            let r = cmd_verify(&config)?;
            for p in r.properties.iter().filter(|p| !p.pass) {
                eprintln!(
                    "FAIL {} ({}): max violation {} exceeds tolerance {:e}; failing input: {}",
                    p.id,
                    p.description,
                    p.max_violation.map_or("inf".to_string(), |v| format!("{v:e}")),
                    p.tolerance,
                    p.failing_input.as_ref().map_or("-".to_string(), |v| v.to_string()),
                );
            }
            let code = if r.passed { exit::SUCCESS } else { exit::PROPERTY_FAILURE };
            (report::render(&r, &r.csv_rows(), config.format)?, code)
        }
        Command::Sample => {
            let r = cmd_sample(&config)?;
            (report::render(&r, &r.csv_rows(), config.format)?, exit::SUCCESS)
        }
        Command::Bench => {
            let r = cmd_bench(&config)?;
            (report::render(&r, &r.csv_rows(), config.format)?, exit::SUCCESS)
        }
    };
    match &config.out {
        Some(path) => std::fs::write(path, document)
            .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(document.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(code)
}
