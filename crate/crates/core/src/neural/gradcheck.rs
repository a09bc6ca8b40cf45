//! Central finite-difference check of the analytic gradients.
//!
//! The analytic side is the model's own backward pass in `f64`. The numeric
//! side re-implements the forward loss in double-double arithmetic: at a
//! step of 1e-4 an `f64` loss difference carries about 1e-11 of rounding
//! noise, which swamps gradients below 1e-7.
//!
//! A step that moves a hook pre-activation across zero measures the ReLU
//! kink rather than the derivative. Such parameters are re-measured with
//! the step shrunk by tenfold until both sides keep the activation
//! pattern; double-double keeps these small steps accurate.

use super::model::Seq2SeqModel;
use super::vocab::{EOS, SOS};

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheck {
    /// Largest `|ga − gn| / max(|ga|, |gn|, 1e-8)` over all parameters.
    pub max_rel_error: f64,
    /// Per-tensor maxima, in parameter order.
    pub per_tensor: Vec<(String, f64)>,
    pub checked: usize,
    /// Parameters re-measured with a smaller step to stay off a ReLU kink.
    pub kink_retries: usize,
}

pub const FD_STEP: f64 = 1e-4;
/// Smallest step tried when backing away from a kink.
pub const MIN_FD_STEP: f64 = 1e-12;

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Compares backpropagated gradients of the summed cross-entropy of one
/// pair with central differences of step [`FD_STEP`] for every parameter.
pub fn gradient_check(model: &Seq2SeqModel, error: &str, correction: &str, stack: Option<&[Vec<f64>]>) -> GradCheck {
    let src = model.vocab.encode(error);
    let tgt = model.vocab.encode(correction);
    let mut grad = model.params.zeroed();
    model.accumulate_gradients(&src, &tgt, stack, 1.0, &mut grad);

    let base: Vec<Vec<f64>> = model.params.named().iter().map(|(_, t)| t.data.clone()).collect();
    let mut per_tensor = Vec::with_capacity(base.len());
    let mut max_rel_error: f64 = 0.0;
    let mut checked = 0;
    let mut kink_retries = 0;
    let (_, pattern) = dd::loss(model, &base, (0, 0, dd::Dd::from(0.0)), &src, &tgt, stack);
    for (ti, (name, ga)) in grad.named().into_iter().enumerate() {
        let mut worst: f64 = 0.0;
        for k in 0..ga.data.len() {
            let mut step = FD_STEP;
            let numeric = loop {
                let (plus, p_plus) = dd::loss(model, &base, (ti, k, dd::Dd::from(step)), &src, &tgt, stack);
                let (minus, p_minus) = dd::loss(model, &base, (ti, k, dd::Dd::from(-step)), &src, &tgt, stack);
                let smooth = p_plus == pattern && p_minus == pattern;
                if smooth || step / 10.0 < MIN_FD_STEP {
                    break (plus - minus).hi / (2.0 * step);
                }
                if step == FD_STEP {
                    kink_retries += 1;
                }
                step /= 10.0;
            };
            worst = worst.max(relative_error(ga.data[k], numeric));
            checked += 1;
        }
        max_rel_error = max_rel_error.max(worst);
        per_tensor.push((name, worst));
    }
    GradCheck {
        max_rel_error,
        per_tensor,
        checked,
        kink_retries,
    }
}

/// Double-double arithmetic and a forward-only loss evaluation on it.
mod dd {
    use std::ops::{Add, Div, Mul, Neg, Sub};

    use super::{Seq2SeqModel, EOS, SOS};

    #[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
    pub struct Dd {
        pub hi: f64,
        pub lo: f64,
    }

    const LN2: Dd = Dd {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };

    // 1/n! for n = 1..=10, as double-double
    const INV_FACT: [Dd; 10] = [
        Dd { hi: 1.0, lo: 0.0 },
        Dd { hi: 0.5, lo: 0.0 },
        Dd { hi: 0.16666666666666666, lo: 9.25185853854297e-18 },
        Dd { hi: 0.041666666666666664, lo: 2.3129646346357427e-18 },
        Dd { hi: 0.008333333333333333, lo: 1.1564823173178714e-19 },
        Dd { hi: 0.001388888888888889, lo: -5.300543954373577e-20 },
        Dd { hi: 0.0001984126984126984, lo: 1.7209558293420705e-22 },
        Dd { hi: 2.48015873015873e-05, lo: 2.1511947866775882e-23 },
        Dd { hi: 2.7557319223985893e-06, lo: -1.858393274046472e-22 },
        Dd { hi: 2.755731922398589e-07, lo: 2.3767714622250297e-23 },
    ];

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        (s, b - (s - a))
    }

    impl From<f64> for Dd {
        fn from(hi: f64) -> Self {
            Dd { hi, lo: 0.0 }
        }
    }

    impl Add for Dd {
        type Output = Dd;
        fn add(self, o: Dd) -> Dd {
            let (s, e) = two_sum(self.hi, o.hi);
            let (t, f) = two_sum(self.lo, o.lo);
            let (s, e) = quick_two_sum(s, e + t);
            let (hi, lo) = quick_two_sum(s, e + f);
            Dd { hi, lo }
        }
    }

    impl Neg for Dd {
        type Output = Dd;
        fn neg(self) -> Dd {
            Dd { hi: -self.hi, lo: -self.lo }
        }
    }

    impl Sub for Dd {
        type Output = Dd;
        fn sub(self, o: Dd) -> Dd {
            self + (-o)
        }
    }

    impl Mul for Dd {
        type Output = Dd;
        fn mul(self, o: Dd) -> Dd {
            let p = self.hi * o.hi;
            let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
            let (hi, lo) = quick_two_sum(p, e);
            Dd { hi, lo }
        }
    }

    impl Div for Dd {
        type Output = Dd;
        fn div(self, o: Dd) -> Dd {
            let q1 = self.hi / o.hi;
            let r = self - o * Dd::from(q1);
            let q2 = r.hi / o.hi;
            let r = r - o * Dd::from(q2);
            let q3 = r.hi / o.hi;
            let (hi, lo) = quick_two_sum(q1, q2);
            Dd { hi, lo } + Dd::from(q3)
        }
    }

    impl Dd {
        const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
        const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

        fn ldexp(self, k: i32) -> Dd {
            let s = 2f64.powi(k);
            Dd { hi: self.hi * s, lo: self.lo * s }
        }

        pub fn exp(self) -> Dd {
            if self.hi > 700.0 {
                return Dd::from(f64::INFINITY);
            }
            if self.hi < -700.0 {
                return Dd::ZERO;
            }
            // x = k·ln2 + r, |r| ≤ ln2/2; then exp(r) = exp(r/2⁹)^(2⁹)
            let k = (self.hi / LN2.hi).round();
            let r = (self - LN2 * Dd::from(k)).ldexp(-9);
            // |r| < 7e-4, so ten Taylor terms reach 1e-34
            let mut sum = Dd::ONE;
            let mut term = Dd::ONE;
            for coef in INV_FACT.iter() {
                term = term * r;
                sum = sum + term * *coef;
            }
            for _ in 0..9 {
                sum = sum * sum;
            }
            sum.ldexp(k as i32)
        }

        pub fn ln(self) -> Dd {
            // Newton on exp(y) = x
            let mut y = Dd::from(self.hi.ln());
            for _ in 0..2 {
                y = y + self * (-y).exp() - Dd::ONE;
            }
            y
        }

        fn sigmoid(self) -> Dd {
            Dd::ONE / (Dd::ONE + (-self).exp())
        }

        fn tanh(self) -> Dd {
            let e = (self + self).exp();
            (e - Dd::ONE) / (e + Dd::ONE)
        }

        fn relu(self) -> Dd {
            if self.hi > 0.0 {
                self
            } else {
                Dd::ZERO
            }
        }
    }

    fn dot(w: &[Dd], x: &[Dd]) -> Dd {
        w.iter().zip(x).fold(Dd::ZERO, |acc, (&a, &b)| acc + a * b)
    }

    struct Mat {
        cols: usize,
        data: Vec<Dd>,
    }

    impl Mat {
        fn row(&self, r: usize) -> &[Dd] {
            &self.data[r * self.cols..(r + 1) * self.cols]
        }
        fn matvec(&self, x: &[Dd]) -> Vec<Dd> {
            (0..self.data.len() / self.cols).map(|r| dot(self.row(r), x)).collect()
        }
    }

    struct Cell {
        w: Mat,
        b: Vec<Dd>,
        hidden: usize,
    }

    impl Cell {
        fn step(&self, x: &[Dd], h: &[Dd], c: &[Dd]) -> (Vec<Dd>, Vec<Dd>) {
            let hd = self.hidden;
            let xh: Vec<Dd> = x.iter().chain(h).copied().collect();
            let z: Vec<Dd> = self.w.matvec(&xh).into_iter().zip(&self.b).map(|(a, &b)| a + b).collect();
            let mut h2 = Vec::with_capacity(hd);
            let mut c2 = Vec::with_capacity(hd);
            for k in 0..hd {
                let i = z[k].sigmoid();
                let f = z[hd + k].sigmoid();
                let g = z[2 * hd + k].tanh();
                let o = z[3 * hd + k].sigmoid();
                let ck = f * c[k] + i * g;
                h2.push(o * ck.tanh());
                c2.push(ck);
            }
            (h2, c2)
        }
    }

    /// Summed loss of one pair with tensor `perturb.0`, element `perturb.1`
    /// shifted by `perturb.2`, and which hook pre-activations are positive.
    /// Tensors are taken in `Params::named` order.
    pub fn loss(
        model: &Seq2SeqModel,
        base: &[Vec<f64>],
        perturb: (usize, usize, Dd),
        src: &[usize],
        tgt: &[usize],
        stack: Option<&[Vec<f64>]>,
    ) -> (Dd, Vec<bool>) {
        let named = model.params.named();
        let mut tensors = named.iter().zip(base).enumerate().map(|(ti, ((_, t), data))| {
            let mut v: Vec<Dd> = data.iter().map(|&x| Dd::from(x)).collect();
            if ti == perturb.0 {
                v[perturb.1] = v[perturb.1] + perturb.2;
            }
            Mat { cols: t.cols, data: v }
        });
        let hd = model.config.hidden;
        let n = model.config.direction.count();
        let mut next = || tensors.next().expect("tensor layout");
        let embedding = next();
        let cell = |next: &mut dyn FnMut() -> Mat| {
            let w = next();
            let b = next().data;
            Cell { w, b, hidden: hd }
        };
        let encoders: Vec<Cell> = (0..n).map(|_| cell(&mut next)).collect();
        let decoders: Vec<Cell> = (0..n).map(|_| cell(&mut next)).collect();
        let starts: Vec<Vec<Dd>> = if model.config.hook.is_some() {
            Vec::new()
        } else {
            (0..n).map(|_| next().data).collect()
        };
        let output = next();
        let output_bias = next().data;
        let mut active = Vec::new();
        let starts = match model.config.hook {
            Some((layers, dim)) => {
                let mix = next().data;
                let linear = next();
                let bias = next().data;
                let zeros = vec![vec![0.0; dim]; layers];
                let stack = stack.unwrap_or(&zeros);
                let mut mixed = vec![Dd::ZERO; dim];
                for (w, layer) in mix.iter().zip(stack) {
                    for (m, &v) in mixed.iter_mut().zip(layer) {
                        *m = *m + *w * Dd::from(v);
                    }
                }
                let pre: Vec<Dd> = linear.matvec(&mixed).into_iter().zip(&bias).map(|(a, &b)| a + b).collect();
                active = pre.iter().map(|v| *v > Dd::ZERO).collect();
                let s: Vec<Dd> = pre.into_iter().map(Dd::relu).collect();
                vec![s; n]
            }
            None => starts,
        };

        let mut total = Dd::ZERO;
        let mut log_probs: Vec<Vec<Dd>> = Vec::with_capacity(n);
        for d in 0..n {
            let (mut h, mut c) = (starts[d][..hd].to_vec(), starts[d][hd..].to_vec());
            let inputs: Vec<usize> = if d == 0 { src.to_vec() } else { src.iter().rev().copied().collect() };
            for &id in &inputs {
                (h, c) = encoders[d].step(embedding.row(id), &h, &c);
            }
            let mut lp = Vec::with_capacity(tgt.len() + 1);
            let mut prev = SOS;
            for t in 0..=tgt.len() {
                (h, c) = decoders[d].step(embedding.row(prev), &h, &c);
                let z: Vec<Dd> = output.matvec(&h).into_iter().zip(&output_bias).map(|(a, &b)| a + b).collect();
                let gold = tgt.get(t).copied().unwrap_or(EOS);
                let max = z.iter().copied().fold(Dd::from(f64::NEG_INFINITY), |m, v| if v > m { v } else { m });
                let lse = max + z.iter().fold(Dd::ZERO, |s, &v| s + (v - max).exp()).ln();
                lp.push(z[gold] - lse);
                prev = gold;
            }
            log_probs.push(lp);
        }
        for t in 0..=tgt.len() {
            let p = log_probs.iter().fold(Dd::ZERO, |s, lp| s + lp[t].exp()) / Dd::from(n as f64);
            total = total - p.ln();
        }
        (total, active)
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn elementary_functions() {
            let x = Dd::from(0.7);
            assert!((x.exp().hi - 0.7f64.exp()).abs() < 1e-15);
            assert!((x.ln().hi - 0.7f64.ln()).abs() < 1e-15);
            assert!((x.ln().exp() - x).hi.abs() < 1e-30);
            assert!((Dd::from(-3.5).exp().ln() - Dd::from(-3.5)).hi.abs() < 1e-28);
            let e = Dd::ONE.exp();
            assert!((e - Dd { hi: std::f64::consts::E, lo: 1.445_646_891_729_250_2e-16 }).hi.abs() < 1e-28);
            assert!((Dd::from(0.3).tanh().hi - 0.3f64.tanh()).abs() < 1e-15);
            let third = Dd::ONE / Dd::from(3.0);
            assert!((third * Dd::from(3.0) - Dd::ONE).hi.abs() < 1e-31);
        }
    }
}
