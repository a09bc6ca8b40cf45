//! Character encoder-decoder. In bidirectional mode a second encoder reads
//! the reversed error and feeds its own decoder; the two decoders' per-step
//! output distributions are averaged before the argmax or the loss.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::hook::{HookCache, InitHook};
use super::lstm::{LstmCell, StepCache};
use super::tensor::{argmax, softmax, Tensor};
use super::vocab::{CharVocab, EOS, SOS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Uni,
    Bi,
}

impl Direction {
    pub fn count(self) -> usize {
        match self {
            Direction::Uni => 1,
            Direction::Bi => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelConfig {
    pub hidden: usize,
    pub embed: usize,
    pub direction: Direction,
    /// `(layers, dim)` of the external layer stacks, when the init hook
    /// is enabled.
    pub hook: Option<(usize, usize)>,
}

/// Every trainable tensor. Gradients and Adam moments use the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    /// `|V| × E`
    pub embedding: Tensor,
    pub encoders: Vec<LstmCell>,
    pub decoders: Vec<LstmCell>,
    /// Per-encoder start state `[h₀; c₀]` (`2H × 1`); empty when the hook
    /// supplies start states.
    pub start: Vec<Tensor>,
    /// `|V| × H`
    pub output: Tensor,
    /// `|V| × 1`
    pub output_bias: Tensor,
    pub hook: Option<InitHook>,
}

impl Params {
    pub fn zeros(vocab: usize, cfg: &ModelConfig) -> Self {
        let (h, e, n) = (cfg.hidden, cfg.embed, cfg.direction.count());
        Params {
            embedding: Tensor::zeros(vocab, e),
            encoders: (0..n).map(|_| LstmCell::zeros(e, h)).collect(),
            decoders: (0..n).map(|_| LstmCell::zeros(e, h)).collect(),
            start: if cfg.hook.is_some() {
                Vec::new()
            } else {
                (0..n).map(|_| Tensor::zeros(2 * h, 1)).collect()
            },
            output: Tensor::zeros(vocab, h),
            output_bias: Tensor::zeros(vocab, 1),
            hook: cfg.hook.map(|(l, d)| InitHook::zeros(l, d, h)),
        }
    }

    pub fn random<R: Rng>(vocab: usize, cfg: &ModelConfig, rng: &mut R) -> Self {
        let (h, e, n) = (cfg.hidden, cfg.embed, cfg.direction.count());
        let embedding = Tensor::normal(vocab, e, 0.1, rng);
        let encoders = (0..n).map(|_| LstmCell::random(e, h, rng)).collect();
        let decoders = (0..n).map(|_| LstmCell::random(e, h, rng)).collect();
        let start = if cfg.hook.is_some() {
            Vec::new()
        } else {
            (0..n).map(|_| Tensor::normal(2 * h, 1, 0.1, rng)).collect()
        };
        let output = Tensor::uniform(vocab, h, (6.0 / (vocab + h) as f64).sqrt(), rng);
        let hook = cfg.hook.map(|(l, d)| InitHook::random(l, d, h, rng));
        Params {
            embedding,
            encoders,
            decoders,
            start,
            output,
            output_bias: Tensor::zeros(vocab, 1),
            hook,
        }
    }

    /// Named tensors in a fixed order (also the model-file order).
    pub fn named(&self) -> Vec<(String, &Tensor)> {
        let mut out = vec![("embedding".to_string(), &self.embedding)];
        for (d, cell) in self.encoders.iter().enumerate() {
            out.push((format!("encoder{d}.weights"), &cell.weights));
            out.push((format!("encoder{d}.bias"), &cell.bias));
        }
        for (d, cell) in self.decoders.iter().enumerate() {
            out.push((format!("decoder{d}.weights"), &cell.weights));
            out.push((format!("decoder{d}.bias"), &cell.bias));
        }
        for (d, s) in self.start.iter().enumerate() {
            out.push((format!("start{d}"), s));
        }
        out.push(("output.weights".to_string(), &self.output));
        out.push(("output.bias".to_string(), &self.output_bias));
        if let Some(hook) = &self.hook {
            out.push(("hook.layer_weights".to_string(), &hook.layer_weights));
            out.push(("hook.linear".to_string(), &hook.linear));
            out.push(("hook.bias".to_string(), &hook.bias));
        }
        out
    }

    /// Same order as [`Params::named`].
    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = vec![&mut self.embedding];
        for cell in &mut self.encoders {
            out.push(&mut cell.weights);
            out.push(&mut cell.bias);
        }
        for cell in &mut self.decoders {
            out.push(&mut cell.weights);
            out.push(&mut cell.bias);
        }
        out.extend(self.start.iter_mut());
        out.push(&mut self.output);
        out.push(&mut self.output_bias);
        if let Some(hook) = &mut self.hook {
            out.push(&mut hook.layer_weights);
            out.push(&mut hook.linear);
            out.push(&mut hook.bias);
        }
        out
    }

    pub fn zeroed(&self) -> Self {
        let mut z = self.clone();
        for t in z.tensors_mut() {
            t.data.fill(0.0);
        }
        z
    }

    pub fn all_finite(&self) -> bool {
        self.named().iter().all(|(_, t)| t.all_finite())
    }

    pub fn count(&self) -> usize {
        self.named().iter().map(|(_, t)| t.len()).sum()
    }
}

/// Final `(h, c)` of each encoder direction.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderState {
    pub states: Vec<(Vec<f64>, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Seq2SeqModel {
    pub vocab: CharVocab,
    pub config: ModelConfig,
    pub params: Params,
    /// Mean per-character training loss of the last epoch, if trained.
    pub train_loss: Option<f64>,
}

struct ForwardCache {
    hook: Option<HookCache>,
    enc: Vec<Vec<StepCache>>,
    enc_inputs: Vec<Vec<usize>>,
    dec: Vec<Vec<StepCache>>,
    dec_inputs: Vec<usize>,
    /// per direction, per step
    probs: Vec<Vec<Vec<f64>>>,
    /// averaged, per step
    mixed: Vec<Vec<f64>>,
    targets: Vec<usize>,
}

impl Seq2SeqModel {
    pub fn new(vocab: CharVocab, config: ModelConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = Params::random(vocab.len(), &config, &mut rng);
        Seq2SeqModel {
            vocab,
            config,
            params,
            train_loss: None,
        }
    }

    pub fn hidden(&self) -> usize {
        self.config.hidden
    }

    /// Learned mixing weights of the external layers, when present.
    pub fn layer_weights(&self) -> Option<Vec<f64>> {
        self.params.hook.as_ref().map(|h| h.layer_weights.data.clone())
    }

    fn start_states(&self, stack: Option<&[Vec<f64>]>) -> (Vec<Vec<f64>>, Option<HookCache>) {
        let n = self.config.direction.count();
        match &self.params.hook {
            Some(hook) => {
                let zeros;
                let stack = match stack {
                    Some(s) => s,
                    None => {
                        zeros = vec![vec![0.0; hook.dim]; hook.layers];
                        &zeros
                    }
                };
                let (state, cache) = hook.forward(stack);
                (vec![state; n], Some(cache))
            }
            None => {
                debug_assert_eq!(self.params.start.len(), n);
                (self.params.start.iter().map(|t| t.data.clone()).collect(), None)
            }
        }
    }

    fn direction_input(src: &[usize], d: usize) -> Vec<usize> {
        if d == 0 {
            src.to_vec()
        } else {
            src.iter().rev().copied().collect()
        }
    }

    /// Runs the encoders over `token`. `stack` is the token's external
    /// layer stack; a zero stack is used when the hook is enabled and none
    /// is given.
    pub fn encode(&self, token: &str, stack: Option<&[Vec<f64>]>) -> EncoderState {
        let src = self.vocab.encode(token);
        let hd = self.config.hidden;
        let (starts, _) = self.start_states(stack);
        let states = starts
            .into_iter()
            .enumerate()
            .map(|(d, s)| {
                let (mut h, mut c) = (s[..hd].to_vec(), s[hd..].to_vec());
                for &id in &Self::direction_input(&src, d) {
                    (h, c) = self.params.encoders[d].step(self.params.embedding.row(id), &h, &c);
                }
                (h, c)
            })
            .collect();
        EncoderState { states }
    }

    fn output_dist(&self, h: &[f64]) -> Vec<f64> {
        let mut logits = self.params.output.matvec(h);
        for (l, b) in logits.iter_mut().zip(&self.params.output_bias.data) {
            *l += b;
        }
        softmax(&logits)
    }

    /// Runs every decoder one step on `prev` and returns the averaged,
    /// renormalized distribution.
    fn decode_step(&self, states: &mut [(Vec<f64>, Vec<f64>)], prev: usize) -> Vec<f64> {
        let x = self.params.embedding.row(prev);
        let n = states.len() as f64;
        let mut mixed = vec![0.0; self.vocab.len()];
        for (d, (h, c)) in states.iter_mut().enumerate() {
            (*h, *c) = self.params.decoders[d].step(x, h, c);
            for (m, p) in mixed.iter_mut().zip(self.output_dist(h)) {
                *m += p / n;
            }
        }
        let sum: f64 = mixed.iter().sum();
        mixed.iter_mut().for_each(|m| *m /= sum);
        mixed
    }

    /// Greedy decoding from SOS until EOS or `max_len` steps. Returns the
    /// emitted string and the probability of each chosen symbol (EOS
    /// included when reached). Ties go to the lowest index.
    pub fn decode_greedy(&self, enc: &EncoderState, max_len: usize) -> (String, Vec<f64>) {
        let mut states = enc.states.clone();
        let mut prev = SOS;
        let mut out = String::new();
        let mut probs = Vec::new();
        for _ in 0..max_len.max(1) {
            let dist = self.decode_step(&mut states, prev);
            let k = argmax(&dist);
            probs.push(dist[k]);
            if k == EOS {
                break;
            }
            out.push(self.vocab.char_at(k).unwrap_or(char::REPLACEMENT_CHARACTER));
            prev = k;
        }
        (out, probs)
    }

    /// Averaged per-step distributions of a greedy run, for inspection.
    pub fn decode_distributions(&self, enc: &EncoderState, max_len: usize) -> Vec<Vec<f64>> {
        let mut states = enc.states.clone();
        let mut prev = SOS;
        let mut out = Vec::new();
        for _ in 0..max_len.max(1) {
            let dist = self.decode_step(&mut states, prev);
            prev = argmax(&dist);
            out.push(dist);
            if prev == EOS {
                break;
            }
        }
        out
    }

    /// `max_len` used at inference for an input of `input_chars` characters.
    pub fn default_max_len(input_chars: usize) -> usize {
        input_chars + 8
    }

    pub fn correct(&self, token: &str, stack: Option<&[Vec<f64>]>) -> (String, Vec<f64>) {
        let enc = self.encode(token, stack);
        self.decode_greedy(&enc, Self::default_max_len(token.chars().count()))
    }

    /// Teacher-forced probabilities of each gold character and the final
    /// EOS.
    pub fn score(&self, error: &str, gold: &str, stack: Option<&[Vec<f64>]>) -> Vec<f64> {
        let src = self.vocab.encode(error);
        let tgt = self.vocab.encode(gold);
        let cache = self.forward(&src, &tgt, stack);
        cache
            .mixed
            .iter()
            .zip(&cache.targets)
            .map(|(p, &t)| p[t])
            .collect()
    }

    fn forward(&self, src: &[usize], tgt: &[usize], stack: Option<&[Vec<f64>]>) -> ForwardCache {
        let hd = self.config.hidden;
        let n = self.config.direction.count();
        let (starts, hook) = self.start_states(stack);
        let mut enc = Vec::with_capacity(n);
        let mut enc_inputs = Vec::with_capacity(n);
        let mut finals = Vec::with_capacity(n);
        for (d, s) in starts.iter().enumerate() {
            let inputs = Self::direction_input(src, d);
            let (mut h, mut c) = (s[..hd].to_vec(), s[hd..].to_vec());
            let mut steps = Vec::with_capacity(inputs.len());
            for &id in &inputs {
                let st = self.params.encoders[d].forward(self.params.embedding.row(id), &h, &c);
                h.clone_from(&st.h);
                c.clone_from(&st.c);
                steps.push(st);
            }
            finals.push((h, c));
            enc.push(steps);
            enc_inputs.push(inputs);
        }

        let mut dec_inputs = Vec::with_capacity(tgt.len() + 1);
        dec_inputs.push(SOS);
        dec_inputs.extend_from_slice(tgt);
        let mut targets = tgt.to_vec();
        targets.push(EOS);

        let mut dec = Vec::with_capacity(n);
        let mut probs = Vec::with_capacity(n);
        for (d, (h0, c0)) in finals.into_iter().enumerate() {
            let (mut h, mut c) = (h0, c0);
            let mut steps = Vec::with_capacity(dec_inputs.len());
            let mut dists = Vec::with_capacity(dec_inputs.len());
            for &id in &dec_inputs {
                let st = self.params.decoders[d].forward(self.params.embedding.row(id), &h, &c);
                h.clone_from(&st.h);
                c.clone_from(&st.c);
                dists.push(self.output_dist(&st.h));
                steps.push(st);
            }
            dec.push(steps);
            probs.push(dists);
        }
        let mixed = (0..dec_inputs.len())
            .map(|t| {
                let mut m = vec![0.0; self.vocab.len()];
                for dists in &probs {
                    for (mi, p) in m.iter_mut().zip(&dists[t]) {
                        *mi += p / n as f64;
                    }
                }
                m
            })
            .collect();
        ForwardCache {
            hook,
            enc,
            enc_inputs,
            dec,
            dec_inputs,
            probs,
            mixed,
            targets,
        }
    }

    /// Summed cross-entropy (natural log) over the target characters plus
    /// EOS, and the number of predicted symbols.
    pub fn loss(&self, error: &str, gold: &str, stack: Option<&[Vec<f64>]>) -> (f64, usize) {
        let steps = self.step_losses(error, gold, stack);
        (steps.iter().sum(), steps.len())
    }

    /// Per-step cross-entropy terms `−ln p(goldₜ)`, computed from the
    /// logits through log-sum-exp rather than from the softmax output.
    pub fn step_losses(&self, error: &str, gold: &str, stack: Option<&[Vec<f64>]>) -> Vec<f64> {
        let src = self.vocab.encode(error);
        let tgt = self.vocab.encode(gold);
        let cache = self.forward(&src, &tgt, stack);
        let n = self.config.direction.count();
        cache
            .targets
            .iter()
            .enumerate()
            .map(|(t, &g)| {
                let log_p: Vec<f64> = (0..n)
                    .map(|d| {
                        let mut z = self.params.output.matvec(&cache.dec[d][t].h);
                        for (zi, b) in z.iter_mut().zip(&self.params.output_bias.data) {
                            *zi += b;
                        }
                        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
                        z[g] - lse
                    })
                    .collect();
                match log_p.as_slice() {
                    [a] => -a,
                    [a, b] => {
                        // −ln((eᵃ + eᵇ)/2)
                        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
                        -(hi + (lo - hi).exp().ln_1p() - std::f64::consts::LN_2)
                    }
                    _ => unreachable!("one or two directions"),
                }
            })
            .collect()
    }

    /// Forward and backward pass on one pair. Gradients of
    /// `scale × summed cross-entropy` are added into `grad`. Returns the
    /// unscaled summed loss and the number of predicted symbols.
    pub fn accumulate_gradients(
        &self,
        src: &[usize],
        tgt: &[usize],
        stack: Option<&[Vec<f64>]>,
        scale: f64,
        grad: &mut Params,
    ) -> (f64, usize) {
        let hd = self.config.hidden;
        let n = self.config.direction.count();
        let cache = self.forward(src, tgt, stack);
        let steps = cache.targets.len();
        let mut loss = 0.0;

        // dL/dh for every decoder step, from the output layer.
        let mut dh_out: Vec<Vec<Vec<f64>>> = vec![vec![vec![0.0; hd]; steps]; n];
        for t in 0..steps {
            let gold = cache.targets[t];
            let p_gold = cache.mixed[t][gold];
            loss -= p_gold.ln();
            let coef = -scale / (n as f64 * p_gold);
            for d in 0..n {
                let pd = &cache.probs[d][t];
                let a = coef * pd[gold];
                let dlogits: Vec<f64> = pd
                    .iter()
                    .enumerate()
                    .map(|(k, &pk)| a * (f64::from(u8::from(k == gold)) - pk))
                    .collect();
                grad.output.add_outer(&dlogits, &cache.dec[d][t].h);
                for (b, g) in grad.output_bias.data.iter_mut().zip(&dlogits) {
                    *b += g;
                }
                self.params.output.matvec_t_acc(&dlogits, &mut dh_out[d][t]);
            }
        }

        let mut dstart_total = vec![0.0; 2 * hd];
        for d in 0..n {
            // decoder BPTT
            let (mut dh, mut dc) = (vec![0.0; hd], vec![0.0; hd]);
            for t in (0..steps).rev() {
                for (a, b) in dh.iter_mut().zip(&dh_out[d][t]) {
                    *a += b;
                }
                let (dx, dhp, dcp) = self.params.decoders[d].backward(&cache.dec[d][t], &dh, &dc, &mut grad.decoders[d]);
                add_into(grad.embedding.row_mut(cache.dec_inputs[t]), &dx);
                dh = dhp;
                dc = dcp;
            }
            // encoder BPTT, continuing from the decoder's initial state
            for t in (0..cache.enc[d].len()).rev() {
                let (dx, dhp, dcp) = self.params.encoders[d].backward(&cache.enc[d][t], &dh, &dc, &mut grad.encoders[d]);
                add_into(grad.embedding.row_mut(cache.enc_inputs[d][t]), &dx);
                dh = dhp;
                dc = dcp;
            }
            match grad.start.get_mut(d) {
                Some(g) => {
                    add_into(&mut g.data[..hd], &dh);
                    add_into(&mut g.data[hd..], &dc);
                }
                None => {
                    add_into(&mut dstart_total[..hd], &dh);
                    add_into(&mut dstart_total[hd..], &dc);
                }
            }
        }
        if let (Some(hook), Some(hcache), Some(ghook)) = (&self.params.hook, &cache.hook, grad.hook.as_mut()) {
            let zeros;
            let stack = match stack {
                Some(s) => s,
                None => {
                    zeros = vec![vec![0.0; hook.dim]; hook.layers];
                    &zeros
                }
            };
            hook.backward(stack, hcache, &dstart_total, ghook);
        }
        (loss, steps)
    }
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (a, b) in dst.iter_mut().zip(src) {
        *a += b;
    }
}
