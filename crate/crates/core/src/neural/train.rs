//! Teacher-forced training with Adam on mean per-character cross-entropy.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::hook::ExternalLayers;
use super::model::{ModelConfig, Params, Seq2SeqModel};
use super::vocab::CharVocab;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub hidden: usize,
    pub embed: usize,
    /// Decoding stops after `input length + decode_slack` symbols.
    pub decode_slack: usize,
    /// Global gradient-norm clip; `None` disables clipping.
    pub clip_norm: Option<f64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 35,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 32,
            seed: 0,
            hidden: 128,
            embed: 64,
            decode_slack: 8,
            clip_norm: Some(5.0),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 || self.hidden == 0 || self.embed == 0 {
            return Err(Error::Config("batch size, hidden and embedding sizes must be positive".into()));
        }
        if !(self.learning_rate > 0.0) || !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::Config("learning rate must be positive and betas in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Adam with bias-corrected moments.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    m: Params,
    v: Params,
    step: i32,
}

impl Adam {
    pub fn new(params: &Params, cfg: &TrainConfig) -> Self {
        Adam {
            lr: cfg.learning_rate,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            epsilon: cfg.epsilon,
            m: params.zeroed(),
            v: params.zeroed(),
            step: 0,
        }
    }

    pub fn update(&mut self, params: &mut Params, grad: &Params) {
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        let grads = grad.named();
        for (((p, m), v), (_, g)) in params
            .tensors_mut()
            .into_iter()
            .zip(self.m.tensors_mut())
            .zip(self.v.tensors_mut())
            .zip(grads)
        {
            for k in 0..p.data.len() {
                let gk = g.data[k];
                m.data[k] = self.beta1 * m.data[k] + (1.0 - self.beta1) * gk;
                v.data[k] = self.beta2 * v.data[k] + (1.0 - self.beta2) * gk * gk;
                let mhat = m.data[k] / c1;
                let vhat = v.data[k] / c2;
                p.data[k] -= self.lr * mhat / (vhat.sqrt() + self.epsilon);
            }
        }
    }
}

fn clip(grad: &mut Params, max_norm: f64) {
    let norm = grad
        .named()
        .iter()
        .flat_map(|(_, t)| t.data.iter())
        .map(|g| g * g)
        .sum::<f64>()
        .sqrt();
    if norm > max_norm {
        let s = max_norm / norm;
        for t in grad.tensors_mut() {
            t.data.iter_mut().for_each(|g| *g *= s);
        }
    }
}

/// One training pair, already resolved against the external layers.
pub struct TrainPair<'a> {
    pub error: &'a str,
    pub correction: &'a str,
    pub stack: Option<&'a [Vec<f64>]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    /// Mean per-character training loss of each epoch.
    pub loss_history: Vec<f64>,
}

/// Builds a model whose vocabulary covers every character of `pairs`.
pub fn build_model(pairs: &[(String, String)], cfg: &TrainConfig, direction: super::Direction, hook: Option<(usize, usize)>) -> Seq2SeqModel {
    let vocab = CharVocab::from_texts(pairs.iter().flat_map(|(e, c)| [e.as_str(), c.as_str()]));
    Seq2SeqModel::new(
        vocab,
        ModelConfig {
            hidden: cfg.hidden,
            embed: cfg.embed,
            direction,
            hook,
        },
        cfg.seed,
    )
}

/// Trains in place. Pairs are shuffled every epoch with a generator seeded
/// from `cfg.seed`, so equal seeds give bit-identical runs.
pub fn train(model: &mut Seq2SeqModel, pairs: &[TrainPair<'_>], cfg: &TrainConfig) -> Result<TrainReport> {
    cfg.validate()?;
    if pairs.is_empty() {
        return Err(Error::Domain("empty training set".into()));
    }
    let encoded: Vec<(Vec<usize>, Vec<usize>)> = pairs
        .iter()
        .map(|p| (model.vocab.encode(p.error), model.vocab.encode(p.correction)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let mut adam = Adam::new(&model.params, cfg);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let (mut epoch_loss, mut epoch_chars) = (0.0, 0usize);
        for (b, batch) in order.chunks(cfg.batch_size).enumerate() {
            let chars: usize = batch.iter().map(|&i| encoded[i].1.len() + 1).sum();
            let scale = 1.0 / chars as f64;
            let mut grad = model.params.zeroed();
            let mut batch_loss = 0.0;
            for &i in batch {
                let (loss, _) = model.accumulate_gradients(&encoded[i].0, &encoded[i].1, pairs[i].stack, scale, &mut grad);
                batch_loss += loss;
            }
            if !batch_loss.is_finite() {
                return Err(Error::NanLoss { epoch, batch: b + 1 });
            }
            if let Some(max) = cfg.clip_norm {
                clip(&mut grad, max);
            }
            adam.update(&mut model.params, &grad);
            if !model.params.all_finite() {
                return Err(Error::NanLoss { epoch, batch: b + 1 });
            }
            epoch_loss += batch_loss;
            epoch_chars += chars;
        }
        let mean = epoch_loss / epoch_chars as f64;
        log::info!("epoch {epoch}/{}: loss {mean:.5}", cfg.epochs);
        history.push(mean);
    }
    model.train_loss = history.last().copied();
    Ok(TrainReport { loss_history: history })
}

/// Resolves the stacks for `pairs` from `layers`; tokens the file does not
/// cover get a zero stack.
pub fn resolve_stacks(pairs: &[(String, String)], layers: Option<&ExternalLayers>) -> (Vec<Option<Vec<Vec<f64>>>>, usize) {
    let mut missing = 0;
    let stacks = pairs
        .iter()
        .map(|(e, _)| {
            layers.map(|l| {
                l.get(e).cloned().unwrap_or_else(|| {
                    missing += 1;
                    l.zero_stack()
                })
            })
        })
        .collect();
    (stacks, missing)
}
