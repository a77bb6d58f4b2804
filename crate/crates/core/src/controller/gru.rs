//! Single-layer gated recurrent cell with a linear read-out, stored as one
//! flat parameter vector so the optimizer can treat it uniformly.
//!
//! Gate order inside the `3H` blocks is reset, update, candidate:
//!
//! ```text
//! r  = σ(W_r x + b_r + U_r h + c_r)
//! z  = σ(W_z x + b_z + U_z h + c_z)
//! n  = tanh(W_n x + b_n + r ⊙ (U_n h + c_n))
//! h' = (1 − z) ⊙ n + z ⊙ h
//! y  = V h' + d
//! ```
//!
//! Inputs are two-hot, so `W x` is the sum of two rows of `W`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
}

impl Layout {
    fn w_ih(&self) -> usize {
        0
    }
    fn w_hh(&self) -> usize {
        self.inputs * 3 * self.hidden
    }
    fn b_ih(&self) -> usize {
        self.w_hh() + 3 * self.hidden * self.hidden
    }
    fn b_hh(&self) -> usize {
        self.b_ih() + 3 * self.hidden
    }
    fn w_out(&self) -> usize {
        self.b_hh() + 3 * self.hidden
    }
    fn b_out(&self) -> usize {
        self.w_out() + self.outputs * self.hidden
    }
    pub fn len(&self) -> usize {
        self.b_out() + self.outputs
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Random weights with standard deviation `scale`; the recurrent blocks
    /// are orthogonalised first. Biases start at zero.
    pub fn init<R: Rng>(&self, scale: f64, rng: &mut R) -> Vec<f64> {
        let mut p = vec![0.0; self.len()];
        let mut gauss = || -> f64 { StandardNormal.sample(rng) };
        let h = self.hidden;
        for v in &mut p[self.w_ih()..self.w_hh()] {
            *v = scale * gauss();
        }
        for g in 0..3 {
            let mut m: Vec<f64> = (0..h * h).map(|_| gauss()).collect();
            orthonormalize_rows(&mut m, h);
            let base = self.w_hh() + g * h * h;
            for (dst, src) in p[base..base + h * h].iter_mut().zip(&m) {
                *dst = scale * src;
            }
        }
        for v in &mut p[self.w_out()..self.b_out()] {
            *v = scale * gauss();
        }
        p
    }
}

fn orthonormalize_rows(m: &mut [f64], n: usize) {
    for i in 0..n {
        for j in 0..i {
            let d: f64 = (0..n).map(|k| m[i * n + k] * m[j * n + k]).sum();
            for k in 0..n {
                m[i * n + k] -= d * m[j * n + k];
            }
        }
        let norm = (0..n).map(|k| m[i * n + k].powi(2)).sum::<f64>().sqrt();
        if norm > 0.0 {
            for k in 0..n {
                m[i * n + k] /= norm;
            }
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Everything the backward pass needs from one step.
#[derive(Clone, Debug, Default)]
pub struct StepCache {
    pub input: [usize; 2],
    pub h_prev: Vec<f64>,
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    pub n: Vec<f64>,
    /// `U_n h + c_n`.
    pub hn: Vec<f64>,
    pub h: Vec<f64>,
}

/// One step: returns the new hidden state and writes logits.
pub fn step(
    lay: &Layout,
    p: &[f64],
    input: [usize; 2],
    h_prev: &[f64],
    logits: &mut [f64],
    cache: Option<&mut StepCache>,
) -> Vec<f64> {
    let hd = lay.hidden;
    let g3 = 3 * hd;
    let mut gi = p[lay.b_ih()..lay.b_ih() + g3].to_vec();
    for &x in &input {
        let row = &p[lay.w_ih() + x * g3..lay.w_ih() + (x + 1) * g3];
        for (a, b) in gi.iter_mut().zip(row) {
            *a += b;
        }
    }
    let mut gh = p[lay.b_hh()..lay.b_hh() + g3].to_vec();
    let w_hh = &p[lay.w_hh()..lay.b_ih()];
    for (row, out) in gh.iter_mut().enumerate() {
        let w = &w_hh[row * hd..(row + 1) * hd];
        *out += w.iter().zip(h_prev).map(|(a, b)| a * b).sum::<f64>();
    }
    let mut r = vec![0.0; hd];
    let mut z = vec![0.0; hd];
    let mut n = vec![0.0; hd];
    let mut h = vec![0.0; hd];
    for j in 0..hd {
        r[j] = sigmoid(gi[j] + gh[j]);
        z[j] = sigmoid(gi[hd + j] + gh[hd + j]);
        n[j] = (gi[2 * hd + j] + r[j] * gh[2 * hd + j]).tanh();
        h[j] = (1.0 - z[j]) * n[j] + z[j] * h_prev[j];
    }
    let w_out = &p[lay.w_out()..lay.b_out()];
    let b_out = &p[lay.b_out()..];
    for (k, y) in logits.iter_mut().enumerate() {
        let w = &w_out[k * hd..(k + 1) * hd];
        *y = b_out[k] + w.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>();
    }
    if let Some(c) = cache {
        c.input = input;
        c.h_prev = h_prev.to_vec();
        c.hn = gh[2 * hd..].to_vec();
        c.r = r;
        c.z = z;
        c.n = n;
        c.h = h.clone();
    }
    h
}

/// Back-propagate logit gradients through a cached sequence, accumulating
/// into `grad`.
pub fn backward(lay: &Layout, p: &[f64], steps: &[StepCache], dlogits: &[Vec<f64>], grad: &mut [f64]) {
    let hd = lay.hidden;
    let g3 = 3 * hd;
    let mut dh_next = vec![0.0; hd];
    for (c, dy) in steps.iter().zip(dlogits).rev() {
        let mut dh = dh_next.clone();
        for (k, &g) in dy.iter().enumerate() {
            if g == 0.0 {
                continue;
            }
            grad[lay.b_out() + k] += g;
            let wo = lay.w_out() + k * hd;
            for j in 0..hd {
                grad[wo + j] += g * c.h[j];
                dh[j] += g * p[wo + j];
            }
        }
        let mut dgi = vec![0.0; g3];
        let mut dgh = vec![0.0; g3];
        let mut dh_prev = vec![0.0; hd];
        for j in 0..hd {
            let (r, z, n) = (c.r[j], c.z[j], c.n[j]);
            let dn = dh[j] * (1.0 - z);
            let dz = dh[j] * (c.h_prev[j] - n);
            dh_prev[j] = dh[j] * z;
            let dan = dn * (1.0 - n * n);
            let dr = dan * c.hn[j];
            let dar = dr * r * (1.0 - r);
            let daz = dz * z * (1.0 - z);
            dgi[j] = dar;
            dgi[hd + j] = daz;
            dgi[2 * hd + j] = dan;
            dgh[j] = dar;
            dgh[hd + j] = daz;
            dgh[2 * hd + j] = dan * r;
        }
        for &x in &c.input {
            let base = lay.w_ih() + x * g3;
            for (g, d) in grad[base..base + g3].iter_mut().zip(&dgi) {
                *g += d;
            }
        }
        for (g, d) in grad[lay.b_ih()..lay.b_ih() + g3].iter_mut().zip(&dgi) {
            *g += d;
        }
        for (g, d) in grad[lay.b_hh()..lay.b_hh() + g3].iter_mut().zip(&dgh) {
            *g += d;
        }
        for (row, &d) in dgh.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let base = lay.w_hh() + row * hd;
            for j in 0..hd {
                grad[base + j] += d * c.h_prev[j];
                dh_prev[j] += d * p[base + j];
            }
        }
        dh_next = dh_prev;
    }
}
