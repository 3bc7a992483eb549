use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::{BatchStats, LieGroup};

use super::state::{
    batch_statistics, blend_running, check_epsilon, check_momentum, check_scale, normalize_with,
    Mode,
};

/// `γ_train = 1 − ρ^{max(K−k, 0)/(K−1)} + ρ`.
///
/// Equals 1 at `k ≤ 1` and `ρ` once `k ≥ K`, decreasing in between.
pub fn gamma_train(big_k: usize, k: usize, rho: f64) -> Result<f64> {
    if big_k < 2 {
        return Err(Error::InvalidInput(format!("K must be at least 2, got {big_k}")));
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidInput(format!("rho must lie in (0, 1], got {rho}")));
    }
    if k >= big_k {
        return Ok(rho);
    }
    if k <= 1 {
        return Ok(1.0);
    }
    let exponent = (big_k - k) as f64 / (big_k - 1) as f64;
    Ok((1.0 - rho.powf(exponent) + rho).min(1.0))
}

/// Momentum used for the train-phase running statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrainMomentum {
    /// `γ_train(K, k, ρ)` at the current step `k`.
    Scheduled { big_k: usize, rho: f64 },
    /// A constant momentum.
    Fixed(f64),
}

impl TrainMomentum {
    fn validate(&self) -> Result<()> {
        match *self {
            TrainMomentum::Scheduled { big_k, rho } => gamma_train(big_k, 1, rho).map(|_| ()),
            TrainMomentum::Fixed(g) => check_momentum(g),
        }
    }

    pub fn at(&self, k: usize) -> Result<f64> {
        match *self {
            TrainMomentum::Scheduled { big_k, rho } => gamma_train(big_k, k, rho),
            TrainMomentum::Fixed(g) => Ok(g),
        }
    }
}

/// Momentum LieBN: separate running statistics for the train and the eval
/// phase. Train mode normalizes with the freshly updated train pair.
#[derive(Clone, Debug)]
pub struct MLieBn<G: LieGroup> {
    group: G,
    bias: G::Point,
    scale: f64,
    epsilon: f64,
    momentum: f64,
    train_momentum: TrainMomentum,
    step: usize,
    train_running: BatchStats<G::Point>,
    eval_running: BatchStats<G::Point>,
    mode: Mode,
}

impl<G: LieGroup> MLieBn<G> {
    /// Bias `E`, both running pairs `(E, 1)`, step `k = 1`, train mode.
    pub fn new(
        group: G,
        scale: f64,
        epsilon: f64,
        momentum: f64,
        train_momentum: TrainMomentum,
    ) -> Result<Self> {
        check_scale(scale)?;
        check_epsilon(epsilon)?;
        check_momentum(momentum)?;
        train_momentum.validate()?;
        let e = group.identity();
        let init = BatchStats {
            mean: e.clone(),
            variance: 1.0,
        };
        Ok(MLieBn {
            bias: e,
            train_running: init.clone(),
            eval_running: init,
            group,
            scale,
            epsilon,
            momentum,
            train_momentum,
            step: 1,
            mode: Mode::Train,
        })
    }

    pub fn with_bias(mut self, bias: G::Point) -> Result<Self> {
        let e = self.group.identity();
        self.group.compose(&e, &bias)?;
        self.bias = bias;
        Ok(self)
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

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Step counter `k`, starting at 1 and advanced by each train forward.
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn train_running(&self) -> &BatchStats<G::Point> {
        &self.train_running
    }

    pub fn eval_running(&self) -> &BatchStats<G::Point> {
        &self.eval_running
    }

    /// Momentum the next train forward will use for the train pair.
    pub fn current_train_momentum(&self) -> Result<f64> {
        self.train_momentum.at(self.step)
    }

    pub fn forward(&mut self, batch: &[G::Point]) -> Result<Vec<G::Point>> {
        match self.mode {
            Mode::Eval => self.forward_eval(batch),
            Mode::Train => {
                let stats = batch_statistics(&self.group, batch)?;
                let gamma_t = self.train_momentum.at(self.step)?;
                let train = blend_running(&self.group, &self.train_running, &stats, gamma_t)?;
                let eval = blend_running(&self.group, &self.eval_running, &stats, self.momentum)?;
                let out = normalize_with(
                    &self.group,
                    batch,
                    &train,
                    self.scale,
                    self.epsilon,
                    Some(&self.bias),
                )?;
                self.train_running = train;
                self.eval_running = eval;
                self.step += 1;
                Ok(out)
            }
        }
    }

    pub fn forward_eval(&self, batch: &[G::Point]) -> Result<Vec<G::Point>> {
        if batch.is_empty() {
            return Err(Error::InvalidInput("empty batch".into()));
        }
        normalize_with(
            &self.group,
            batch,
            &self.eval_running,
            self.scale,
            self.epsilon,
            Some(&self.bias),
        )
    }
}

/// Domain-specific MLieBN: one layer per domain, bias fixed to `E`, one
/// shared scale.
#[derive(Clone, Debug)]
pub struct DsmBank<G: LieGroup + Clone> {
    layers: BTreeMap<usize, MLieBn<G>>,
    scale: f64,
}

impl<G: LieGroup + Clone> DsmBank<G> {
    pub fn new(
        group: G,
        domains: &[usize],
        scale: f64,
        epsilon: f64,
        momentum: f64,
        train_momentum: TrainMomentum,
    ) -> Result<Self> {
        if domains.is_empty() {
            return Err(Error::InvalidInput("a bank needs at least one domain".into()));
        }
        let mut layers = BTreeMap::new();
        for &d in domains {
            let layer = MLieBn::new(group.clone(), scale, epsilon, momentum, train_momentum)?;
            if layers.insert(d, layer).is_some() {
                return Err(Error::InvalidInput(format!("duplicate domain id {d}")));
            }
        }
        Ok(DsmBank { layers, scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn set_scale(&mut self, scale: f64) -> Result<()> {
        check_scale(scale)?;
        for layer in self.layers.values_mut() {
            layer.set_scale(scale)?;
        }
        self.scale = scale;
        Ok(())
    }

    pub fn set_mode(&mut self, mode: Mode) {
        for layer in self.layers.values_mut() {
            layer.set_mode(mode);
        }
    }

    pub fn domains(&self) -> impl Iterator<Item = usize> + '_ {
        self.layers.keys().copied()
    }

    pub fn layer(&self, domain: usize) -> Option<&MLieBn<G>> {
        self.layers.get(&domain)
    }

    /// Routes each element to its domain's layer; output keeps input order.
    /// Domains without elements in this batch are left untouched.
    pub fn forward(&mut self, batch: &[G::Point], domain_ids: &[usize]) -> Result<Vec<G::Point>> {
        if batch.len() != domain_ids.len() {
            return Err(Error::InvalidInput(format!(
                "{} domain ids for {} elements",
                domain_ids.len(),
                batch.len()
            )));
        }
        if batch.is_empty() {
            return Err(Error::InvalidInput("empty batch".into()));
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &d) in domain_ids.iter().enumerate() {
            if !self.layers.contains_key(&d) {
                return Err(Error::UnknownDomain(d));
            }
            groups.entry(d).or_default().push(i);
        }
        let mut updated = Vec::with_capacity(groups.len());
        let mut out: Vec<Option<G::Point>> = vec![None; batch.len()];
        for (d, idx) in &groups {
            let mut layer = self.layers[d].clone();
            let sub: Vec<G::Point> = idx.iter().map(|&i| batch[i].clone()).collect();
            let normalized = layer.forward(&sub)?;
            for (&i, p) in idx.iter().zip(normalized) {
                out[i] = Some(p);
            }
            updated.push((*d, layer));
        }
        for (d, layer) in updated {
            self.layers.insert(d, layer);
        }
        Ok(out.into_iter().map(|p| p.expect("every index routed")).collect())
    }
}
