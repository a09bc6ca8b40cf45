//! Encoder state initialization from externally computed per-token layer
//! vectors: `ReLU(A · Σ wₗ·layerₗ + b)`, split into `h₀` and `c₀`.

use std::collections::HashMap;
use std::path::Path;

use rand::Rng;

use super::tensor::{axpy, dot, Tensor};
use crate::error::{read_lines, Error, Result};
use crate::lexicon::nfc;

/// Stack of `L` layer vectors of one token.
pub type LayerStack = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq)]
pub struct InitHook {
    pub layers: usize,
    pub dim: usize,
    /// `1 × L` trainable mixing weights.
    pub layer_weights: Tensor,
    /// `2H × D`
    pub linear: Tensor,
    /// `2H × 1`
    pub bias: Tensor,
}

pub struct HookCache {
    mixed: Vec<f64>,
    pre: Vec<f64>,
}

impl InitHook {
    pub fn zeros(layers: usize, dim: usize, hidden: usize) -> Self {
        InitHook {
            layers,
            dim,
            layer_weights: Tensor::zeros(1, layers),
            linear: Tensor::zeros(2 * hidden, dim),
            bias: Tensor::zeros(2 * hidden, 1),
        }
    }

    /// Mixing weights start equal at `1/L`.
    pub fn random<R: Rng>(layers: usize, dim: usize, hidden: usize, rng: &mut R) -> Self {
        let bound = (6.0 / (dim + 2 * hidden) as f64).sqrt();
        InitHook {
            layers,
            dim,
            layer_weights: Tensor::filled(1, layers, 1.0 / layers as f64),
            linear: Tensor::uniform(2 * hidden, dim, bound, rng),
            bias: Tensor::zeros(2 * hidden, 1),
        }
    }

    pub fn hidden(&self) -> usize {
        self.bias.rows / 2
    }

    /// Returns the `2H` initial state (h then c) and the cache for
    /// backpropagation.
    pub fn forward(&self, stack: &[Vec<f64>]) -> (Vec<f64>, HookCache) {
        assert_eq!(stack.len(), self.layers, "layer stack depth");
        let mut mixed = vec![0.0; self.dim];
        for (w, layer) in self.layer_weights.data.iter().zip(stack) {
            assert_eq!(layer.len(), self.dim, "external layer dimension");
            axpy(*w, layer, &mut mixed);
        }
        let mut pre = self.linear.matvec(&mixed);
        for (p, b) in pre.iter_mut().zip(&self.bias.data) {
            *p += b;
        }
        let state = pre.iter().map(|&v| v.max(0.0)).collect();
        (state, HookCache { mixed, pre })
    }

    pub fn backward(&self, stack: &[Vec<f64>], cache: &HookCache, dstate: &[f64], grad: &mut InitHook) {
        let dpre: Vec<f64> = dstate
            .iter()
            .zip(&cache.pre)
            .map(|(&d, &p)| if p > 0.0 { d } else { 0.0 })
            .collect();
        grad.linear.add_outer(&dpre, &cache.mixed);
        for (g, d) in grad.bias.data.iter_mut().zip(&dpre) {
            *g += d;
        }
        let mut dmixed = vec![0.0; self.dim];
        self.linear.matvec_t_acc(&dpre, &mut dmixed);
        for (g, layer) in grad.layer_weights.data.iter_mut().zip(stack) {
            *g += dot(&dmixed, layer);
        }
    }
}

/// Per-token layer stacks read from a text file.
#[derive(Debug, Clone, Default)]
pub struct ExternalLayers {
    pub layers: usize,
    pub dim: usize,
    stacks: HashMap<String, LayerStack>,
}

impl ExternalLayers {
    pub fn new(layers: usize, dim: usize) -> Self {
        ExternalLayers {
            layers,
            dim,
            stacks: HashMap::new(),
        }
    }

    pub fn insert(&mut self, token: &str, stack: LayerStack) -> Result<()> {
        if stack.len() != self.layers || stack.iter().any(|l| l.len() != self.dim) {
            return Err(Error::Domain(format!("layer stack for {token:?} is not {}×{}", self.layers, self.dim)));
        }
        self.stacks.insert(nfc(token), stack);
        Ok(())
    }

    /// Reads lines `token layer_index v1 … v_dim` with `layer_index` in
    /// `0..layers`. Every token must supply every layer exactly once.
    pub fn load(path: impl AsRef<Path>, dim: usize, layers: usize) -> Result<Self> {
        let path = path.as_ref();
        let mut partial: HashMap<String, (usize, Vec<Option<Vec<f64>>>)> = HashMap::new();
        let mut order = Vec::new();
        for (no, line) in read_lines(path)? {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.is_empty() || fields[0].starts_with('#') {
                continue;
            }
            if fields.len() != dim + 2 {
                return Err(Error::parse(path, no, format!("expected token, layer index and {dim} values")));
            }
            let layer: usize = fields[1]
                .parse()
                .ok()
                .filter(|&l| l < layers)
                .ok_or_else(|| Error::parse(path, no, format!("layer index {:?} not in 0..{layers}", fields[1])))?;
            let values = fields[2..]
                .iter()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(path, no, format!("bad number: {e}")))?;
            let token = nfc(fields[0]);
            let entry = partial.entry(token.clone()).or_insert_with(|| {
                order.push(token.clone());
                (no, vec![None; layers])
            });
            if entry.1[layer].replace(values).is_some() {
                return Err(Error::parse(path, no, format!("duplicate layer {layer} for {token:?}")));
            }
        }
        let mut out = ExternalLayers::new(layers, dim);
        for token in order {
            let (first_line, slots) = partial.remove(&token).expect("token recorded");
            let stack: Option<LayerStack> = slots.into_iter().collect();
            let stack = stack.ok_or_else(|| {
                Error::parse(path, first_line, format!("token {token:?} is missing layers (need {layers})"))
            })?;
            out.stacks.insert(token, stack);
        }
        Ok(out)
    }

    pub fn get(&self, token: &str) -> Option<&LayerStack> {
        self.stacks.get(token)
    }

    pub fn len(&self) -> usize {
        self.stacks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stacks.is_empty()
    }

    /// All-zero stack, used for tokens the file does not cover.
    pub fn zero_stack(&self) -> LayerStack {
        vec![vec![0.0; self.dim]; self.layers]
    }

    pub fn to_text(&self) -> String {
        let mut tokens: Vec<&String> = self.stacks.keys().collect();
        tokens.sort();
        let mut out = String::new();
        for t in tokens {
            for (l, layer) in self.stacks[t].iter().enumerate() {
                out.push_str(&format!("{t} {l}"));
                for v in layer {
                    out.push_str(&format!(" {v}"));
                }
                out.push('\n');
            }
        }
        out
    }
}
