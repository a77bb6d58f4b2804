//! Recurrent policy over traversals and its risk-seeking update.

mod gru;
mod prior;

pub use gru::Layout;
pub use prior::{prior_mask, Observation, PriorState};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::expr::{Library, Token};
use crate::optim::Adam;
use crate::{Error, Result};
use gru::StepCache;

/// Policy hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    /// Fraction of the batch the update concentrates on.
    pub risk_epsilon: f64,
    pub entropy_coef: f64,
    pub init_scale: f64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            hidden: 32,
            learning_rate: 5e-4,
            risk_epsilon: 0.05,
            entropy_coef: 5e-3,
            init_scale: 0.1,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.hidden > 0
            && self.learning_rate > 0.0
            && self.risk_epsilon > 0.0
            && self.risk_epsilon <= 1.0
            && self.entropy_coef >= 0.0
            && self.init_scale >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Parse(format!("invalid policy settings {self:?}")))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampledBatch {
    pub traversals: Vec<Vec<Token>>,
    pub log_probs: Vec<f64>,
    /// Sum over steps of the entropy of the masked distribution.
    pub entropies: Vec<f64>,
}

impl SampledBatch {
    pub fn len(&self) -> usize {
        self.traversals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traversals.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    /// The `(1 − ε)` quantile of the batch rewards.
    pub quantile: f64,
    pub n_selected: usize,
    pub fraction_used: f64,
    /// Risk-seeking objective of the batch before the step.
    pub objective: f64,
}

struct Trace {
    caches: Vec<StepCache>,
    probs: Vec<Vec<f64>>,
    actions: Vec<usize>,
}

/// `(1 − ε)` quantile with linear interpolation between order statistics.
pub fn risk_quantile(rewards: &[f64], epsilon: f64) -> f64 {
    let mut r = rewards.to_vec();
    r.sort_by(f64::total_cmp);
    let pos = (1.0 - epsilon) * (r.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    r[lo] + (pos - lo as f64) * (r[hi] - r[lo])
}

fn masked_softmax(logits: &[f64], mask: &[bool]) -> Vec<f64> {
    let max = logits
        .iter()
        .zip(mask)
        .filter(|(_, m)| **m)
        .map(|(l, _)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = logits
        .iter()
        .zip(mask)
        .map(|(l, m)| if *m { (l - max).exp() } else { 0.0 })
        .collect();
    let s: f64 = p.iter().sum();
    for v in &mut p {
        *v /= s;
    }
    p
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|v| **v > 0.0).map(|v| v * v.ln()).sum::<f64>()
}

#[derive(Clone, Debug)]
pub struct Controller {
    library: Library,
    config: PolicyConfig,
    layout: Layout,
    params: Vec<f64>,
    optimizer: Adam,
}

impl Controller {
    pub fn new(library: Library, config: PolicyConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let layout = Layout {
            inputs: 2 * (library.len() + 1),
            hidden: config.hidden,
            outputs: library.len(),
        };
        let params = layout.init(config.init_scale, &mut ChaCha8Rng::seed_from_u64(seed));
        let optimizer = Adam::new(layout.len(), config.learning_rate);
        Ok(Controller {
            library,
            config,
            layout,
            params,
            optimizer,
        })
    }

    pub fn library(&self) -> &Library {
        &self.library
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn rollout<F>(&self, params: &[f64], mut choose: F, mut trace: Option<&mut Trace>) -> Result<(Vec<Token>, f64, f64)>
    where
        F: FnMut(usize, &[f64]) -> Result<usize>,
    {
        let lib = &self.library;
        let mut st = PriorState::new(lib);
        let mut h = vec![0.0; self.layout.hidden];
        let mut logits = vec![0.0; lib.len()];
        let (mut lp, mut ent) = (0.0, 0.0);
        let mut out = Vec::new();
        while !st.is_complete() {
            let input = st.observation().encode(lib.len());
            let mask = st.mask();
            let mut cache = trace.as_ref().map(|_| StepCache::default());
            h = gru::step(&self.layout, params, input, &h, &mut logits, cache.as_mut());
            let p = masked_softmax(&logits, &mask);
            let a = choose(out.len(), &p)?;
            if !mask[a] {
                return Err(Error::Unreachable(format!(
                    "token `{}` forbidden at position {}",
                    lib.tokens()[a],
                    out.len()
                )));
            }
            lp += p[a].ln();
            ent += entropy(&p);
            let t = lib.tokens()[a];
            st.push(t);
            out.push(t);
            if let (Some(tr), Some(c)) = (trace.as_mut(), cache) {
                tr.caches.push(c);
                tr.probs.push(p);
                tr.actions.push(a);
            }
        }
        Ok((out, lp, ent))
    }

    /// Draw `n` complete traversals.
    pub fn sample_batch<R: Rng>(&self, n: usize, rng: &mut R) -> SampledBatch {
        let mut b = SampledBatch::default();
        for _ in 0..n {
            let draw = |_: usize, p: &[f64]| -> Result<usize> {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut last = 0;
                for (i, &pi) in p.iter().enumerate() {
                    if pi > 0.0 {
                        acc += pi;
                        last = i;
                        if u < acc {
                            return Ok(i);
                        }
                    }
                }
                Ok(last)
            };
            let (t, lp, ent) = self
                .rollout(&self.params, draw, None)
                .expect("sampling only picks allowed tokens");
            b.traversals.push(t);
            b.log_probs.push(lp);
            b.entropies.push(ent);
        }
        b
    }

    fn replay(&self, params: &[f64], traversal: &[Token], trace: Option<&mut Trace>) -> Result<(f64, f64)> {
        let lib = &self.library;
        let pick = |i: usize, _: &[f64]| -> Result<usize> {
            let t = traversal
                .get(i)
                .ok_or_else(|| Error::Unreachable("traversal ends early".into()))?;
            lib.index_of(*t)
                .ok_or_else(|| Error::Unreachable(format!("token `{t}` not in library")))
        };
        let (out, lp, ent) = self.rollout(params, pick, trace)?;
        if out.len() != traversal.len() {
            return Err(Error::Unreachable("traversal has trailing tokens".into()));
        }
        Ok((lp, ent))
    }

    /// Log-probability and summed entropy of a given traversal under the
    /// current policy.
    pub fn log_prob_and_entropy(&self, traversal: &[Token]) -> Result<(f64, f64)> {
        self.replay(&self.params, traversal, None)
    }

    fn selection(&self, rewards: &[f64]) -> (f64, Vec<usize>) {
        let q = risk_quantile(rewards, self.config.risk_epsilon);
        let sel = (0..rewards.len()).filter(|&i| rewards[i] > q).collect();
        (q, sel)
    }

    /// Risk-seeking objective of a frozen batch at parameters `params`:
    /// mean over the selected samples of `(R_i − R_ε) log p_i + β H_i`.
    pub fn objective_at(&self, params: &[f64], batch: &SampledBatch, rewards: &[f64]) -> Result<f64> {
        let (q, sel) = self.selection(rewards);
        if sel.is_empty() {
            return Ok(0.0);
        }
        let mut j = 0.0;
        for &i in &sel {
            let (lp, ent) = self.replay(params, &batch.traversals[i], None)?;
            j += (rewards[i] - q) * lp + self.config.entropy_coef * ent;
        }
        Ok(j / sel.len() as f64)
    }

    /// Gradient of [`Controller::objective_at`] at the current parameters.
    pub fn gradient(&self, batch: &SampledBatch, rewards: &[f64]) -> Result<(Vec<f64>, StepReport)> {
        if batch.len() != rewards.len() || batch.is_empty() {
            return Err(Error::Parse(format!(
                "{} rewards for a batch of {}",
                rewards.len(),
                batch.len()
            )));
        }
        let (q, sel) = self.selection(rewards);
        let mut grad = vec![0.0; self.layout.len()];
        let mut obj = 0.0;
        let beta = self.config.entropy_coef;
        let scale = 1.0 / sel.len().max(1) as f64;
        for &i in &sel {
            let mut tr = Trace {
                caches: Vec::new(),
                probs: Vec::new(),
                actions: Vec::new(),
            };
            let (lp, ent) = self.replay(&self.params, &batch.traversals[i], Some(&mut tr))?;
            let w = rewards[i] - q;
            obj += w * lp + beta * ent;
            let dlogits: Vec<Vec<f64>> = tr
                .probs
                .iter()
                .zip(&tr.actions)
                .map(|(p, &a)| {
                    let h = entropy(p);
                    p.iter()
                        .enumerate()
                        .map(|(k, &pk)| {
                            if pk == 0.0 {
                                return 0.0;
                            }
                            let onehot = if k == a { 1.0 } else { 0.0 };
                            scale * (w * (onehot - pk) - beta * pk * (pk.ln() + h))
                        })
                        .collect()
                })
                .collect();
            gru::backward(&self.layout, &self.params, &tr.caches, &dlogits, &mut grad);
        }
        let report = StepReport {
            quantile: q,
            n_selected: sel.len(),
            fraction_used: sel.len() as f64 / rewards.len() as f64,
            objective: obj * scale,
        };
        Ok((grad, report))
    }

    /// One ascent step on the risk-seeking objective. If no sample beats
    /// the quantile the parameters are left untouched.
    pub fn policy_update(&mut self, batch: &SampledBatch, rewards: &[f64]) -> Result<StepReport> {
        let (grad, report) = self.gradient(batch, rewards)?;
        if report.n_selected > 0 {
            self.optimizer.ascend(&mut self.params, &grad);
        }
        Ok(report)
    }

    /// Probabilities of the first token.
    pub fn root_distribution(&self) -> Vec<f64> {
        let st = PriorState::new(&self.library);
        let mut logits = vec![0.0; self.library.len()];
        let h = vec![0.0; self.layout.hidden];
        gru::step(
            &self.layout,
            &self.params,
            st.observation().encode(self.library.len()),
            &h,
            &mut logits,
            None,
        );
        masked_softmax(&logits, &st.mask())
    }
}
