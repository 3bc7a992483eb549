use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{BackendDescriptor, BatchStats, LieGroup};

/// Whether a forward pass uses batch statistics (and updates the running
/// ones) or the stored running statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Train,
    Eval,
}

pub(crate) fn check_scale(scale: f64) -> Result<()> {
    if !scale.is_finite() || scale == 0.0 {
        return Err(Error::InvalidInput(format!(
            "scale must be finite and non-zero, got {scale}"
        )));
    }
    Ok(())
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    Ok(())
}

pub(crate) fn check_momentum(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidInput(format!(
            "momentum must lie in [0, 1], got {gamma}"
        )));
    }
    Ok(())
}

/// Mean and variance computed with uniform weights.
pub fn batch_statistics<G: LieGroup>(group: &G, batch: &[G::Point]) -> Result<BatchStats<G::Point>> {
    let mean = group.frechet_mean(batch, None)?;
    let variance = group.frechet_variance(batch, &mean, None)?;
    Ok(BatchStats { mean, variance })
}

/// `(WFM({1−γ, γ}, {M_r, M_b}), (1−γ) v²_r + γ v²_b)`.
pub(crate) fn blend_running<G: LieGroup>(
    group: &G,
    running: &BatchStats<G::Point>,
    batch: &BatchStats<G::Point>,
    gamma: f64,
) -> Result<BatchStats<G::Point>> {
    check_momentum(gamma)?;
    Ok(BatchStats {
        mean: group.wfm_pair(&batch.mean, &running.mean, gamma)?,
        variance: (1.0 - gamma) * running.variance + gamma * batch.variance,
    })
}

/// Centering, scaling and (optionally) biasing, pointwise.
pub(crate) fn normalize_with<G: LieGroup>(
    group: &G,
    batch: &[G::Point],
    stats: &BatchStats<G::Point>,
    scale: f64,
    epsilon: f64,
    bias: Option<&G::Point>,
) -> Result<Vec<G::Point>> {
    let inv_mean = group.inverse(&stats.mean)?;
    let factor = scale / (stats.variance + epsilon).sqrt();
    batch
        .par_iter()
        .map(|p| {
            let centered = group.compose(&inv_mean, p)?;
            let scaled = group.dilate(&centered, factor)?;
            match bias {
                Some(b) => group.compose(b, &scaled),
                None => Ok(scaled),
            }
        })
        .collect()
}

/// LieBN layer state over a Lie-group backend.
#[derive(Clone, Debug)]
pub struct LieBn<G: LieGroup> {
    group: G,
    bias: G::Point,
    scale: f64,
    epsilon: f64,
    momentum: f64,
    running: BatchStats<G::Point>,
    mode: Mode,
}

impl<G: LieGroup> LieBn<G> {
    /// Bias `E`, running statistics `(E, 1)`, train mode.
    pub fn new(group: G, scale: f64, epsilon: f64, momentum: f64) -> Result<Self> {
        check_scale(scale)?;
        check_epsilon(epsilon)?;
        check_momentum(momentum)?;
        let e = group.identity();
        Ok(LieBn {
            bias: e.clone(),
            running: BatchStats {
                mean: e,
                variance: 1.0,
            },
            group,
            scale,
            epsilon,
            momentum,
            mode: Mode::Train,
        })
    }

    pub fn with_bias(mut self, bias: G::Point) -> Result<Self> {
        self.set_bias(bias)?;
        Ok(self)
    }

    pub fn set_bias(&mut self, bias: G::Point) -> Result<()> {
        // Round-trip through the backend to validate the element.
        let e = self.group.identity();
        self.group.compose(&e, &bias)?;
        self.bias = bias;
        Ok(())
    }

    pub fn set_scale(&mut self, scale: f64) -> Result<()> {
        check_scale(scale)?;
        self.scale = scale;
        Ok(())
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn bias(&self) -> &G::Point {
        &self.bias
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn momentum(&self) -> f64 {
        self.momentum
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn running_mean(&self) -> &G::Point {
        &self.running.mean
    }

    pub fn running_var(&self) -> f64 {
        self.running.variance
    }

    pub fn running_stats(&self) -> &BatchStats<G::Point> {
        &self.running
    }

    pub fn batch_statistics(&self, batch: &[G::Point]) -> Result<BatchStats<G::Point>> {
        batch_statistics(&self.group, batch)
    }

    /// Moving-average update with weight `γ` on the batch statistics.
    pub fn update_running(&mut self, stats: &BatchStats<G::Point>) -> Result<()> {
        if self.mode != Mode::Train {
            return Err(Error::InvalidInput(
                "running statistics are only updated in train mode".into(),
            ));
        }
        self.running = blend_running(&self.group, &self.running, stats, self.momentum)?;
        Ok(())
    }

    /// `B ⊙ φ_{s/√(v²+ε)}(M⁻¹ ⊙ P)` for each `P`.
    pub fn normalize_batch(
        &self,
        batch: &[G::Point],
        stats: &BatchStats<G::Point>,
    ) -> Result<Vec<G::Point>> {
        normalize_with(&self.group, batch, stats, self.scale, self.epsilon, Some(&self.bias))
    }

    /// Centering and scaling without the final bias translation.
    pub fn normalize_pre_bias(
        &self,
        batch: &[G::Point],
        stats: &BatchStats<G::Point>,
    ) -> Result<Vec<G::Point>> {
        normalize_with(&self.group, batch, stats, self.scale, self.epsilon, None)
    }

    /// One forward pass. In train mode this normalizes with the batch
    /// statistics and updates the running ones; the state is only modified
    /// if the whole pass succeeds.
    pub fn forward(&mut self, batch: &[G::Point]) -> Result<Vec<G::Point>> {
        match self.mode {
            Mode::Eval => self.forward_eval(batch),
            Mode::Train => {
                let stats = self.batch_statistics(batch)?;
                let next = blend_running(&self.group, &self.running, &stats, self.momentum)?;
                let out = self.normalize_batch(batch, &stats)?;
                self.running = next;
                Ok(out)
            }
        }
    }

    /// Eval-mode forward: normalizes with the running statistics, never
    /// touches the state.
    pub fn forward_eval(&self, batch: &[G::Point]) -> Result<Vec<G::Point>> {
        if batch.is_empty() {
            return Err(Error::InvalidInput("empty batch".into()));
        }
        self.normalize_batch(batch, &self.running)
    }

    pub fn to_record(&self) -> LieBnRecord {
        LieBnRecord {
            backend: self.group.descriptor(),
            bias: self.group.point_entries(&self.bias),
            scale: self.scale,
            epsilon: self.epsilon,
            momentum: self.momentum,
            running_mean: self.group.point_entries(&self.running.mean),
            running_var: self.running.variance,
            mode: self.mode,
        }
    }

    /// Rebuilds a state; the record must describe `group`.
    pub fn from_record(group: G, record: &LieBnRecord) -> Result<Self> {
        if group.descriptor() != record.backend {
            return Err(Error::InvalidInput(format!(
                "record describes {:?}, backend is {:?}",
                record.backend,
                group.descriptor()
            )));
        }
        if !(record.running_var.is_finite() && record.running_var > 0.0) {
            return Err(Error::InvalidInput("running variance must be positive".into()));
        }
        let bias = group.point_from_entries(&record.bias)?;
        let mean = group.point_from_entries(&record.running_mean)?;
        let mut state = LieBn::new(group, record.scale, record.epsilon, record.momentum)?;
        state.bias = bias;
        state.running = BatchStats {
            mean,
            variance: record.running_var,
        };
        state.mode = record.mode;
        Ok(state)
    }

    pub(crate) fn from_parts(
        group: G,
        bias: G::Point,
        scale: f64,
        epsilon: f64,
        momentum: f64,
        running: BatchStats<G::Point>,
        mode: Mode,
    ) -> Self {
        LieBn {
            group,
            bias,
            scale,
            epsilon,
            momentum,
            running,
            mode,
        }
    }
}

/// Self-describing serialized form of a [`LieBn`] state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieBnRecord {
    pub backend: BackendDescriptor,
    pub bias: Vec<f64>,
    pub scale: f64,
    pub epsilon: f64,
    pub momentum: f64,
    pub running_mean: Vec<f64>,
    pub running_var: f64,
    pub mode: Mode,
}
