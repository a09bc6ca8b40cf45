use rand::Rng;

use super::tensor::{sigmoid, Tensor};

/// One LSTM layer. Gate rows of `weights` are stacked as input, forget,
/// candidate, output; columns are `[x; h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmCell {
    pub input: usize,
    pub hidden: usize,
    /// `4H × (I + H)`
    pub weights: Tensor,
    /// `4H × 1`
    pub bias: Tensor,
}

/// Activations kept from a forward step for backpropagation.
#[derive(Debug, Clone)]
pub struct StepCache {
    pub xh: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub i: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub o: Vec<f64>,
    pub c: Vec<f64>,
    pub tanh_c: Vec<f64>,
    pub h: Vec<f64>,
}

impl LstmCell {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        LstmCell {
            input,
            hidden,
            weights: Tensor::zeros(4 * hidden, input + hidden),
            bias: Tensor::zeros(4 * hidden, 1),
        }
    }

    /// Uniform weights in `±√(6 / (I + 2H))`, forget-gate bias 1, other
    /// biases 0.
    pub fn random<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        let bound = (6.0 / (input + 2 * hidden) as f64).sqrt();
        let mut bias = Tensor::zeros(4 * hidden, 1);
        bias.data[hidden..2 * hidden].fill(1.0);
        LstmCell {
            input,
            hidden,
            weights: Tensor::uniform(4 * hidden, input + hidden, bound, rng),
            bias,
        }
    }

    pub fn forward(&self, x: &[f64], h: &[f64], c: &[f64]) -> StepCache {
        assert_eq!(x.len(), self.input, "LSTM input dimension");
        assert_eq!(h.len(), self.hidden, "LSTM hidden dimension");
        assert_eq!(c.len(), self.hidden, "LSTM cell dimension");
        let hd = self.hidden;
        let mut xh = Vec::with_capacity(self.input + hd);
        xh.extend_from_slice(x);
        xh.extend_from_slice(h);
        let mut z = self.weights.matvec(&xh);
        for (zi, b) in z.iter_mut().zip(&self.bias.data) {
            *zi += b;
        }
        let i: Vec<f64> = z[..hd].iter().map(|&v| sigmoid(v)).collect();
        let f: Vec<f64> = z[hd..2 * hd].iter().map(|&v| sigmoid(v)).collect();
        let g: Vec<f64> = z[2 * hd..3 * hd].iter().map(|&v| v.tanh()).collect();
        let o: Vec<f64> = z[3 * hd..].iter().map(|&v| sigmoid(v)).collect();
        let c_new: Vec<f64> = (0..hd).map(|k| f[k] * c[k] + i[k] * g[k]).collect();
        let tanh_c: Vec<f64> = c_new.iter().map(|v| v.tanh()).collect();
        let h_new: Vec<f64> = (0..hd).map(|k| o[k] * tanh_c[k]).collect();
        StepCache {
            xh,
            c_prev: c.to_vec(),
            i,
            f,
            g,
            o,
            c: c_new,
            tanh_c,
            h: h_new,
        }
    }

    /// `(h', c')` for one step.
    pub fn step(&self, x: &[f64], h: &[f64], c: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let s = self.forward(x, h, c);
        (s.h, s.c)
    }

    /// Backpropagates `dh`, `dc` (gradients w.r.t. this step's outputs)
    /// through the step, accumulating parameter gradients into `grad`.
    /// Returns `(dx, dh_prev, dc_prev)`.
    pub fn backward(&self, cache: &StepCache, dh: &[f64], dc: &[f64], grad: &mut LstmCell) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let hd = self.hidden;
        let mut dz = vec![0.0; 4 * hd];
        let mut dc_prev = vec![0.0; hd];
        for k in 0..hd {
            let (i, f, g, o, t) = (cache.i[k], cache.f[k], cache.g[k], cache.o[k], cache.tanh_c[k]);
            let dck = dc[k] + dh[k] * o * (1.0 - t * t);
            dz[k] = dck * g * i * (1.0 - i);
            dz[hd + k] = dck * cache.c_prev[k] * f * (1.0 - f);
            dz[2 * hd + k] = dck * i * (1.0 - g * g);
            dz[3 * hd + k] = dh[k] * t * o * (1.0 - o);
            dc_prev[k] = dck * f;
        }
        grad.weights.add_outer(&dz, &cache.xh);
        for (b, d) in grad.bias.data.iter_mut().zip(&dz) {
            *b += d;
        }
        let mut dxh = vec![0.0; self.input + hd];
        self.weights.matvec_t_acc(&dz, &mut dxh);
        let dh_prev = dxh.split_off(self.input);
        (dxh, dh_prev, dc_prev)
    }
}
