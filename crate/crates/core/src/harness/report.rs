//! Report documents. Every report carries `schema_version`; every field
//! whose name ends in `_ms` is a wall-clock timing and the only part of a
//! report allowed to differ between identical runs.

use serde::Serialize;

use super::config::{RunConfig, Suite};
use super::{HarnessError, HarnessResult, OutputFormat};
use crate::gaussian::{SampleReport, ScalingReport};
use crate::group::BackendDescriptor;

pub const SCHEMA_VERSION: &str = "1";

/// Running statistics of one layer (one domain for `dsmliebn`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunningRecord {
    pub domain: usize,
    /// Row-major entries of the running mean used in eval mode.
    pub mean: Vec<f64>,
    pub variance: f64,
    /// Train-phase pair, for the momentum variants.
    pub train_mean: Option<Vec<f64>>,
    pub train_variance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub batch_size: usize,
    /// Distance from the batch Fréchet mean to the bias `B`.
    pub pre_mean_distance: f64,
    /// Distance from the output Fréchet mean to `B`. `None` when the output
    /// has no well-defined mean (rotations spread beyond the ball of radius π/2).
    pub post_mean_distance: Option<f64>,
    pub pre_variance: f64,
    pub post_variance: Option<f64>,
    /// `post_variance / pre_variance`.
    pub variance_ratio: Option<f64>,
    /// `s² v² / (v² + ε)`; only for `liebn`, where the output is normalized with batch statistics.
    pub expected_post_variance: Option<f64>,
    pub running: Vec<RunningRecord>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizeReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub backend: BackendDescriptor,
    pub config: RunConfig,
    /// Row-major entries of `B`.
    pub target: Vec<f64>,
    pub steps: Vec<StepRecord>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyResult {
    pub id: &'static str,
    pub module: &'static str,
    pub suite: Suite,
    pub description: &'static str,
    /// Stated tolerance times the tolerance scale.
    pub tolerance: f64,
    pub cells: usize,
    pub trials: usize,
    /// Inputs rejected because they fall outside the property's domain of validity.
    pub rejected: usize,
    /// `null` when a trial raised an error.
    pub max_violation: Option<f64>,
    pub pass: bool,
    /// The input achieving `max_violation`, present on failure.
    pub failing_input: Option<serde_json::Value>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageRecord {
    pub invariants: usize,
    pub covered: usize,
    pub missing: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub suite: Suite,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub properties: Vec<PropertyResult>,
    pub coverage: CoverageRecord,
    pub passed: bool,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleCommandReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub backend: BackendDescriptor,
    pub config: RunConfig,
    pub sample: SampleReport,
    pub max_distance_to_mean: f64,
    pub scaling: Option<ScalingReport>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchCell {
    pub backend: BackendDescriptor,
    pub batch_size: usize,
    pub repetitions: usize,
    pub median_ms: f64,
    pub p95_ms: f64,
    pub mean_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub config: RunConfig,
    /// One cell per (family, dim), in config order.
    pub cells: Vec<BenchCell>,
    /// Cell labels ordered by median time, fastest first. Timing-derived.
    pub ranking_by_median_ms: Vec<String>,
    pub elapsed_ms: f64,
}

#[derive(Serialize)]
pub struct StepRow {
    step: usize,
    batch_size: usize,
    pre_mean_distance: f64,
    post_mean_distance: Option<f64>,
    pre_variance: f64,
    post_variance: Option<f64>,
    variance_ratio: Option<f64>,
    expected_post_variance: Option<f64>,
    running_variance: f64,
    elapsed_ms: f64,
}

#[derive(Serialize)]
pub struct PropertyRow {
    id: &'static str,
    module: &'static str,
    suite: Suite,
    tolerance: f64,
    cells: usize,
    trials: usize,
    rejected: usize,
    max_violation: Option<f64>,
    pass: bool,
    elapsed_ms: f64,
}

#[derive(Serialize)]
pub struct SampleRow {
    family: String,
    dim: usize,
    n_samples: usize,
    seed: u64,
    sigma: f64,
    mean_distance: f64,
    standard_error: f64,
    variance: f64,
    expected_variance: f64,
    variance_ratio: f64,
    max_distance_to_mean: f64,
    scaling_ratio_to_original: Option<f64>,
    scaling_passed: Option<bool>,
    elapsed_ms: f64,
}

#[derive(Serialize)]
pub struct BenchRow {
    family: String,
    dim: usize,
    batch_size: usize,
    repetitions: usize,
    median_ms: f64,
    p95_ms: f64,
    mean_ms: f64,
}

impl NormalizeReport {
    pub fn csv_rows(&self) -> Vec<StepRow> {
        self.steps
            .iter()
            .map(|s| StepRow {
                step: s.step,
                batch_size: s.batch_size,
                pre_mean_distance: s.pre_mean_distance,
                post_mean_distance: s.post_mean_distance,
                pre_variance: s.pre_variance,
                post_variance: s.post_variance,
                variance_ratio: s.variance_ratio,
                expected_post_variance: s.expected_post_variance,
                running_variance: s.running.first().map_or(f64::NAN, |r| r.variance),
                elapsed_ms: s.elapsed_ms,
            })
            .collect()
    }
}

impl VerifyReport {
    pub fn csv_rows(&self) -> Vec<PropertyRow> {
        self.properties
            .iter()
            .map(|p| PropertyRow {
                id: p.id,
                module: p.module,
                suite: p.suite,
                tolerance: p.tolerance,
                cells: p.cells,
                trials: p.trials,
                rejected: p.rejected,
                max_violation: p.max_violation,
                pass: p.pass,
                elapsed_ms: p.elapsed_ms,
            })
            .collect()
    }
}

impl SampleCommandReport {
    pub fn csv_rows(&self) -> Vec<SampleRow> {
        let s = &self.sample;
        vec![SampleRow {
            family: self.backend.family.to_string(),
            dim: self.backend.dim,
            n_samples: s.n_samples,
            seed: s.seed,
            sigma: s.sigma,
            mean_distance: s.mean_distance,
            standard_error: s.standard_error,
            variance: s.variance,
            expected_variance: s.expected_variance,
            variance_ratio: s.variance_ratio,
            max_distance_to_mean: self.max_distance_to_mean,
            scaling_ratio_to_original: self.scaling.as_ref().map(|r| r.ratio_to_original),
            scaling_passed: self.scaling.as_ref().map(|r| r.passed),
            elapsed_ms: self.elapsed_ms,
        }]
    }
}

impl BenchReport {
    pub fn csv_rows(&self) -> Vec<BenchRow> {
        self.cells
            .iter()
            .map(|c| BenchRow {
                family: c.backend.family.to_string(),
                dim: c.backend.dim,
                batch_size: c.batch_size,
                repetitions: c.repetitions,
                median_ms: c.median_ms,
                p95_ms: c.p95_ms,
                mean_ms: c.mean_ms,
            })
            .collect()
    }
}

/// Serializes a report as pretty JSON, or its flat rows as CSV.
pub fn render<R: Serialize, Row: Serialize>(report: &R, rows: &[Row], format: OutputFormat) -> HarnessResult<String> {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| HarnessError::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(|e| HarnessError::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| HarnessError::Io(e.to_string()))
        }
    }
}
