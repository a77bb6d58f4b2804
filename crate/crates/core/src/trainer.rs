//! Scoring of candidate energies and the discovery loop.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::controller::{Controller, PolicyConfig};
use crate::datasets::{Dataset, Scenario, SplitConfig};
use crate::expr::{ExprTree, InvalidCause, Library, Token};
use crate::mechanics::{Formulation, KinematicsBatch, StressPredictor, StressResponse};
use crate::optim::NelderMead;
use crate::{Error, Result};

/// Reward and inner constant-fit settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    pub invalid_reward: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub initial_constant: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            invalid_reward: 0.0,
            max_iter: 200,
            restarts: 2,
            initial_constant: 1.0,
        }
    }
}

impl RewardConfig {
    fn simplex(&self) -> NelderMead {
        NelderMead {
            max_iter: self.max_iter,
            restarts: self.restarts,
            ..NelderMead::default()
        }
    }
}

fn weighted_mean(y: &[f64], w: &[f64]) -> f64 {
    let sw: f64 = w.iter().sum();
    y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw
}

/// Weighted standard deviation `sqrt(Σw(y − ȳ)² / Σw)`.
pub fn weighted_std(y: &[f64], w: &[f64]) -> f64 {
    let m = weighted_mean(y, w);
    let sw: f64 = w.iter().sum();
    (y.iter().zip(w).map(|(a, b)| b * (a - m).powi(2)).sum::<f64>() / sw).sqrt()
}

/// Weighted RMSE divided by the weighted standard deviation of the targets.
pub fn nrmse(predictions: &[f64], targets: &[f64], weights: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() || targets.len() != weights.len() || targets.is_empty() {
        return Err(Error::Degenerate("prediction, target and weight lengths differ".into()));
    }
    let sd = weighted_std(targets, weights);
    if !(sd > 0.0) {
        return Err(Error::Degenerate("targets have zero variance".into()));
    }
    let sw: f64 = weights.iter().sum();
    let mse = predictions
        .iter()
        .zip(targets)
        .zip(weights)
        .map(|((p, y), w)| w * (y - p).powi(2))
        .sum::<f64>()
        / sw;
    Ok(mse.sqrt() / sd)
}

/// `1 − Σw(y − ŷ)² / Σw(y − ȳ_w)²` in percent.
pub fn r2_percent(predictions: &[f64], targets: &[f64], weights: &[f64]) -> Result<f64> {
    let e = nrmse(predictions, targets, weights)?;
    Ok(100.0 * (1.0 - e * e))
}

/// A dataset flattened into stress observations with precomputed
/// kinematics, ready for repeated scoring.
#[derive(Clone, Debug)]
pub struct Evaluator {
    batch: KinematicsBatch,
    values: Vec<f64>,
    weights: Vec<f64>,
    source: Vec<(usize, bool)>,
    std: f64,
}

impl Evaluator {
    pub fn new(ds: &Dataset) -> Result<Self> {
        let batch = KinematicsBatch::new(&ds.kinematics()?);
        let t = ds.targets();
        let std = weighted_std(&t.values, &t.weights);
        if !(std > 0.0) {
            return Err(Error::Degenerate(format!(
                "stresses of `{}` have zero variance",
                ds.name
            )));
        }
        Ok(Evaluator {
            batch,
            values: t.values,
            weights: t.weights,
            source: t.source,
            std,
        })
    }

    pub fn targets(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Predicted stresses in target order.
    pub fn predict(&self, pred: &StressPredictor, params: &[f64]) -> Result<Vec<f64>, InvalidCause> {
        let n = self.batch.len();
        let (mut p11, mut p22) = (vec![0.0; n], vec![0.0; n]);
        pred.stress_batch(params, &self.batch, &mut p11, &mut p22)?;
        Ok(self
            .source
            .iter()
            .map(|&(i, second)| if second { p22[i] } else { p11[i] })
            .collect())
    }

    /// NRMSE at `params`; `+∞` when the expression is invalid anywhere.
    pub fn nrmse(&self, pred: &StressPredictor, params: &[f64]) -> f64 {
        match self.predict(pred, params) {
            Ok(p) => {
                let sw: f64 = self.weights.iter().sum();
                let mse = p
                    .iter()
                    .zip(&self.values)
                    .zip(&self.weights)
                    .map(|((p, y), w)| w * (y - p).powi(2))
                    .sum::<f64>()
                    / sw;
                let e = mse.sqrt() / self.std;
                if e.is_finite() {
                    e
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        }
    }

    pub fn r2(&self, pred: &StressPredictor) -> Result<f64> {
        let p = self.predict(pred, pred.tree().constants())?;
        r2_percent(&p, &self.values, &self.weights)
    }
}

/// Outcome of scoring one traversal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub tree: ExprTree,
    pub nrmse: f64,
    pub reward: f64,
}

/// Fit the constants of `tree` by simplex search on the NRMSE. Never
/// returns constants scoring worse than the ones passed in.
pub fn optimize_constants(
    tree: &ExprTree,
    ev: &Evaluator,
    formulation: Formulation,
    cfg: &RewardConfig,
) -> Result<(ExprTree, f64)> {
    let pred = StressPredictor::build(tree, formulation)?;
    let f = |c: &[f64]| ev.nrmse(&pred, c);
    if tree.n_constants() == 0 {
        return Ok((tree.clone(), f(&[])));
    }
    let m = cfg.simplex().minimize(f, tree.constants());
    if !m.f.is_finite() {
        return Ok((tree.clone(), m.f));
    }
    Ok((tree.with_constants(&m.x)?, m.f))
}

/// [`optimize_constants`] against a dataset.
pub fn constant_optimize(
    tree: &ExprTree,
    ds: &Dataset,
    formulation: Formulation,
    cfg: &RewardConfig,
) -> Result<ExprTree> {
    Ok(optimize_constants(tree, &Evaluator::new(ds)?, formulation, cfg)?.0)
}

/// Score a traversal: constants start at `cfg.initial_constant`, are fitted
/// if present, and the reward is `1/(1 + NRMSE)`.
pub fn score_traversal(
    tokens: &[Token],
    ev: &Evaluator,
    formulation: Formulation,
    cfg: &RewardConfig,
) -> Scored {
    let invalid = |tree: ExprTree| Scored {
        tree,
        nrmse: f64::INFINITY,
        reward: cfg.invalid_reward,
    };
    let tree = match ExprTree::with_default_constants(tokens.to_vec(), cfg.initial_constant) {
        Ok(t) => t,
        Err(_) => {
            return invalid(ExprTree::new(vec![Token::Var(0)], vec![]).expect("single variable"));
        }
    };
    match optimize_constants(&tree, ev, formulation, cfg) {
        Ok((t, e)) if e.is_finite() => Scored {
            tree: t,
            nrmse: e,
            reward: 1.0 / (1.0 + e),
        },
        Ok((t, _)) => invalid(t),
        Err(_) => invalid(tree),
    }
}

/// Reward of `tree` on `ds`. Constants are re-fitted starting from the
/// tree's own values.
pub fn reward(tree: &ExprTree, ds: &Dataset, formulation: Formulation, cfg: &RewardConfig) -> f64 {
    let Ok(ev) = Evaluator::new(ds) else {
        return cfg.invalid_reward;
    };
    match optimize_constants(tree, &ev, formulation, cfg) {
        Ok((_, e)) if e.is_finite() => 1.0 / (1.0 + e),
        _ => cfg.invalid_reward,
    }
}

/// Pooled R² of a predictor over every stress value of `ds`, in percent.
pub fn r2_score(pred: &StressPredictor, ds: &Dataset) -> Result<f64> {
    Evaluator::new(ds)?.r2(pred)
}

/// Per-point stresses.
pub fn predict_points(pred: &StressPredictor, ds: &Dataset) -> Result<Vec<StressResponse>> {
    ds.points
        .iter()
        .map(|p| Ok(pred.stress(&p.kinematics()?)?))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub formulation: Formulation,
    pub seed: u64,
    /// Defaults to the standard library of the formulation.
    pub library: Option<Library>,
    pub policy: PolicyConfig,
    pub reward: RewardConfig,
    pub split: Option<SplitConfig>,
    pub ebt_weight: u32,
    pub scenario: Option<Scenario>,
    /// Stop once the best reward reaches this value.
    pub stop_reward: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            batch_size: 500,
            formulation: Formulation::Invariant,
            seed: 0,
            library: None,
            policy: PolicyConfig::default(),
            reward: RewardConfig::default(),
            split: None,
            ebt_weight: 1,
            scenario: None,
            stop_reward: 1.0 - 1e-6,
        }
    }
}

impl TrainConfig {
    pub fn library(&self) -> Library {
        self.library.clone().unwrap_or_else(|| match self.formulation {
            Formulation::Invariant => Library::invariant(),
            Formulation::Stretch => Library::stretch(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub best_reward: f64,
    pub batch_max: f64,
    pub batch_mean: f64,
    pub quantile: f64,
    pub n_selected: usize,
    pub new_evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestModel {
    pub traversal: Vec<Token>,
    pub constants: Vec<f64>,
    pub display: String,
    pub reward: f64,
    pub nrmse: f64,
    pub complexity: usize,
    pub epoch: usize,
}

impl BestModel {
    pub fn tree(&self) -> Result<ExprTree> {
        ExprTree::new(self.traversal.clone(), self.constants.clone())
    }
}

/// Prediction at one data point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointPrediction {
    pub curve_id: String,
    pub mode: crate::DeformationMode,
    pub lambda1: f64,
    pub lambda2: f64,
    pub p11: f64,
    pub p11_pred: f64,
    pub p22: Option<f64>,
    pub p22_pred: f64,
}

/// Per-point predictions of `pred` on `ds`.
pub fn point_predictions(pred: &StressPredictor, ds: &Dataset) -> Result<Vec<PointPrediction>> {
    let s = predict_points(pred, ds)?;
    Ok(ds
        .points
        .iter()
        .zip(s)
        .map(|(p, r)| PointPrediction {
            curve_id: p.curve_id.clone(),
            mode: p.mode,
            lambda1: p.lambda1,
            lambda2: p.effective_lambda2(),
            p11: p.p11,
            p11_pred: r.p11,
            p22: p.p22,
            p22_pred: r.p22,
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub formulation: Formulation,
    pub best: Option<BestModel>,
    pub history: Vec<EpochRecord>,
    pub r2_train: Option<f64>,
    pub r2_test: Option<f64>,
    pub r2_full: Option<f64>,
    pub n_train: usize,
    pub n_test: usize,
    pub epochs_run: usize,
    pub stopped_early: bool,
    pub evaluations: usize,
    pub predictions: Vec<PointPrediction>,
}

impl FitReport {
    /// Reward history as CSV.
    pub fn history_csv(&self) -> String {
        let mut s =
            String::from("epoch,best_reward,batch_max,batch_mean,quantile,n_selected,new_evaluations\n");
        for h in &self.history {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                h.epoch,
                h.best_reward,
                h.batch_max,
                h.batch_mean,
                h.quantile,
                h.n_selected,
                h.new_evaluations
            ));
        }
        s
    }
}

/// The data a run trains and reports on, after scenario filtering, EBT
/// weighting and splitting.
#[derive(Clone, Debug)]
pub struct PreparedData {
    /// Scenario rows with their original weights.
    pub full: Dataset,
    pub train: Dataset,
    pub test: Option<Dataset>,
}

pub fn prepare(ds: &Dataset, cfg: &TrainConfig) -> Result<PreparedData> {
    let full = match cfg.scenario {
        Some(s) => s.apply(ds)?,
        None => ds.clone(),
    };
    let (train, test) = match &cfg.split {
        Some(sp) => {
            let (a, b) = full.split(sp)?;
            (a, (!b.is_empty()).then_some(b))
        }
        None => (full.clone(), None),
    };
    let train = train.apply_ebt_weighting(cfg.ebt_weight)?;
    Ok(PreparedData { full, train, test })
}

/// Run the discovery loop.
pub fn train(ds: &Dataset, cfg: &TrainConfig) -> Result<FitReport> {
    if cfg.batch_size == 0 {
        return Err(Error::Parse("batch size must be positive".into()));
    }
    let data = prepare(ds, cfg)?;
    let library = cfg.library();
    if library.n_inputs() > cfg.formulation.n_inputs() {
        return Err(Error::FormulationMismatch(format!(
            "library uses {} inputs, {} energy takes {}",
            library.n_inputs(),
            cfg.formulation,
            cfg.formulation.n_inputs()
        )));
    }
    let ev = Evaluator::new(&data.train)?;
    let mut controller = Controller::new(library, cfg.policy, cfg.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    let mut cache: HashMap<Vec<Token>, Scored> = HashMap::new();
    let mut history = Vec::new();
    let mut best: Option<BestModel> = None;
    let mut stopped_early = false;

    for epoch in 0..cfg.epochs {
        let batch = controller.sample_batch(cfg.batch_size, &mut rng);
        let mut fresh: Vec<&Vec<Token>> = Vec::new();
        {
            let mut seen = std::collections::HashSet::new();
            for t in &batch.traversals {
                if !cache.contains_key(t) && seen.insert(t) {
                    fresh.push(t);
                }
            }
        }
        let scored: Vec<Scored> = fresh
            .par_iter()
            .map(|t| score_traversal(t, &ev, cfg.formulation, &cfg.reward))
            .collect();
        let new_evaluations = fresh.len();
        for (t, s) in fresh.into_iter().zip(scored) {
            cache.insert(t.clone(), s);
        }
        let rewards: Vec<f64> = batch.traversals.iter().map(|t| cache[t].reward).collect();

        let (mut top, mut top_i) = (f64::NEG_INFINITY, 0);
        for (i, &r) in rewards.iter().enumerate() {
            if r > top {
                top = r;
                top_i = i;
            }
        }
        if best.as_ref().is_none_or(|b| top > b.reward) && top > cfg.reward.invalid_reward {
            let s = &cache[&batch.traversals[top_i]];
            best = Some(BestModel {
                traversal: s.tree.tokens().to_vec(),
                constants: s.tree.constants().to_vec(),
                display: s.tree.to_infix(),
                reward: s.reward,
                nrmse: s.nrmse,
                complexity: s.tree.complexity(),
                epoch,
            });
        }
        let step = controller.policy_update(&batch, &rewards)?;
        let best_reward = best.as_ref().map_or(cfg.reward.invalid_reward, |b| b.reward);
        history.push(EpochRecord {
            epoch,
            best_reward,
            batch_max: top,
            batch_mean: rewards.iter().sum::<f64>() / rewards.len() as f64,
            quantile: step.quantile,
            n_selected: step.n_selected,
            new_evaluations,
        });
        if best_reward >= cfg.stop_reward {
            stopped_early = epoch + 1 < cfg.epochs;
            break;
        }
    }

    let mut report = FitReport {
        formulation: cfg.formulation,
        best: None,
        epochs_run: history.len(),
        history,
        r2_train: None,
        r2_test: None,
        r2_full: None,
        n_train: data.train.len(),
        n_test: data.test.as_ref().map_or(0, Dataset::len),
        stopped_early,
        evaluations: cache.len(),
        predictions: Vec::new(),
    };
    if let Some(b) = best {
        let pred = StressPredictor::build(&b.tree()?, cfg.formulation)?;
        let train_plain = prepare(
            ds,
            &TrainConfig {
                ebt_weight: 1,
                ..cfg.clone()
            },
        )?
        .train;
        report.r2_train = r2_score(&pred, &train_plain).ok();
        report.r2_test = data.test.as_ref().and_then(|t| r2_score(&pred, t).ok());
        report.r2_full = r2_score(&pred, &data.full).ok();
        report.predictions = point_predictions(&pred, &data.full).unwrap_or_default();
        report.best = Some(b);
    }
    Ok(report)
}
