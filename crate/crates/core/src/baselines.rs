//! Classical hyperelastic models, their fitting, and published parameters.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::Dataset;
use crate::mechanics::{
    invariants, nominal_from_invariant_derivs, nominal_from_stretch_derivs, Kinematics,
    StressResponse,
};
use crate::optim::NelderMead;
use crate::trainer::{r2_percent, weighted_std};
use crate::{Error, Result};

const OGDEN_TABLE4: &str = include_str!("../../../data/baselines/ogden3_table4.json");
const ET_TABLE2: &str = include_str!("../../../data/baselines/extended_tube_table2.json");
const SHARIFF_TABLE3: &str = include_str!("../../../data/baselines/shariff_table3.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    #[serde(rename = "nh")]
    NeoHookean,
    #[serde(rename = "mr")]
    MooneyRivlin,
    #[serde(rename = "gt")]
    GentThomas,
    Ogden3,
    #[serde(rename = "et")]
    ExtendedTube,
    Shariff,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 6] = [
        BaselineKind::NeoHookean,
        BaselineKind::MooneyRivlin,
        BaselineKind::GentThomas,
        BaselineKind::Ogden3,
        BaselineKind::ExtendedTube,
        BaselineKind::Shariff,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BaselineKind::NeoHookean => "nh",
            BaselineKind::MooneyRivlin => "mr",
            BaselineKind::GentThomas => "gt",
            BaselineKind::Ogden3 => "ogden3",
            BaselineKind::ExtendedTube => "et",
            BaselineKind::Shariff => "shariff",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            BaselineKind::NeoHookean => &["c10"],
            BaselineKind::MooneyRivlin | BaselineKind::GentThomas => &["c10", "c01"],
            BaselineKind::Ogden3 => &["mu1", "mu2", "mu3", "alpha1", "alpha2", "alpha3"],
            BaselineKind::ExtendedTube => &["Gc", "Ge", "beta", "delta"],
            BaselineKind::Shariff => &["E", "alpha0", "alpha1", "alpha2", "alpha3", "alpha4"],
        }
    }

    pub fn n_params(self) -> usize {
        self.param_names().len()
    }

    pub fn is_implemented(self) -> bool {
        !matches!(self, BaselineKind::ExtendedTube | BaselineKind::Shariff)
    }

    fn check_implemented(self) -> Result<()> {
        if self.is_implemented() {
            Ok(())
        } else {
            Err(Error::NotImplemented(format!("the `{self}` baseline model")))
        }
    }

    /// Starting point of the first fit start.
    fn default_start(self) -> Vec<f64> {
        match self {
            BaselineKind::NeoHookean => vec![0.2],
            BaselineKind::MooneyRivlin | BaselineKind::GentThomas => vec![0.2, 0.02],
            BaselineKind::Ogden3 => vec![0.4, 1e-4, -0.01, 2.0, 6.0, -2.0],
            BaselineKind::ExtendedTube => vec![0.2, 0.2, 0.3, 0.1],
            BaselineKind::Shariff => vec![1.0, 1.0, 0.5, 0.01, 0.0, 0.01],
        }
    }

    /// Whether parameter `i` is an exponent (drawn from the full bound
    /// range) rather than a modulus.
    fn is_exponent(self, i: usize) -> bool {
        self == BaselineKind::Ogden3 && i >= 3
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaselineKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown baseline model `{s}`")))
    }
}

/// A baseline model with concrete parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineModel {
    pub kind: BaselineKind,
    pub params: Vec<f64>,
}

/// Energy derivatives the mechanics layer needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EnergyDerivatives {
    Invariant { psi1: f64, psi2: f64 },
    Stretch { dw: [f64; 3] },
}

impl BaselineModel {
    pub fn new(kind: BaselineKind, params: Vec<f64>) -> Result<Self> {
        kind.check_implemented()?;
        if params.len() != kind.n_params() {
            return Err(Error::Fit(format!(
                "{kind} takes {} parameters, got {}",
                kind.n_params(),
                params.len()
            )));
        }
        Ok(BaselineModel { kind, params })
    }

    pub fn energy_derivatives(&self, k: &Kinematics) -> EnergyDerivatives {
        let p = &self.params;
        match self.kind {
            BaselineKind::NeoHookean => EnergyDerivatives::Invariant {
                psi1: p[0],
                psi2: 0.0,
            },
            BaselineKind::MooneyRivlin => EnergyDerivatives::Invariant {
                psi1: p[0],
                psi2: p[1],
            },
            BaselineKind::GentThomas => EnergyDerivatives::Invariant {
                psi1: p[0],
                psi2: p[1] / invariants(k).i2,
            },
            BaselineKind::Ogden3 => {
                let dw = |l: f64| (0..3).map(|i| p[i] * l.powf(p[i + 3] - 1.0)).sum::<f64>();
                EnergyDerivatives::Stretch {
                    dw: [dw(k.l1), dw(k.l2), dw(k.l3)],
                }
            }
            BaselineKind::ExtendedTube | BaselineKind::Shariff => {
                unreachable!("constructor rejects unimplemented kinds")
            }
        }
    }

    pub fn stress(&self, k: &Kinematics) -> StressResponse {
        match self.energy_derivatives(k) {
            EnergyDerivatives::Invariant { psi1, psi2 } => nominal_from_invariant_derivs(k, psi1, psi2),
            EnergyDerivatives::Stretch { dw } => nominal_from_stretch_derivs(k, dw),
        }
    }

    /// Predictions in the target order of [`Dataset::targets`].
    pub fn predict(&self, ds: &Dataset) -> Result<Vec<f64>> {
        let ks = ds.kinematics()?;
        let s: Vec<StressResponse> = ks.iter().map(|k| self.stress(k)).collect();
        Ok(ds
            .targets()
            .source
            .iter()
            .map(|&(i, second)| if second { s[i].p22 } else { s[i].p11 })
            .collect())
    }

    /// Pooled R² in percent.
    pub fn r2(&self, ds: &Dataset) -> Result<f64> {
        let t = ds.targets();
        let p = self.predict(ds)?;
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::Fit(format!("{} predicts non-finite stress", self.kind)));
        }
        r2_percent(&p, &t.values, &t.weights)
    }
}

/// Multi-start simplex settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSettings {
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub restarts: usize,
    pub lower: f64,
    pub upper: f64,
    /// Random starts draw moduli from `[-modulus_range, modulus_range]`.
    pub modulus_range: f64,
}

impl Default for FitSettings {
    fn default() -> Self {
        FitSettings {
            starts: 16,
            seed: 0,
            max_iter: 2000,
            restarts: 2,
            lower: -10.0,
            upper: 10.0,
            modulus_range: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineFit {
    pub model: BaselineModel,
    pub nrmse: f64,
    pub r2: f64,
    pub start: usize,
}

/// Fit `kind` to `ds` by multi-start Nelder-Mead on the weighted NRMSE.
/// Parameters outside the bounds score `+∞`.
pub fn fit_baseline(kind: BaselineKind, ds: &Dataset, s: &FitSettings) -> Result<BaselineFit> {
    kind.check_implemented()?;
    if ds.len() < kind.n_params() {
        return Err(Error::Fit(format!(
            "{} points cannot determine {} parameters",
            ds.len(),
            kind.n_params()
        )));
    }
    let t = ds.targets();
    let sd = weighted_std(&t.values, &t.weights);
    if !(sd > 0.0) {
        return Err(Error::Degenerate("targets have zero variance".into()));
    }
    let sw: f64 = t.weights.iter().sum();
    let ks = ds.kinematics()?;
    let objective = |x: &[f64]| -> f64 {
        if x.iter().any(|v| *v < s.lower || *v > s.upper) {
            return f64::INFINITY;
        }
        let m = BaselineModel {
            kind,
            params: x.to_vec(),
        };
        let st: Vec<StressResponse> = ks.iter().map(|k| m.stress(k)).collect();
        let mut acc = 0.0;
        for ((&(i, second), y), w) in t.source.iter().zip(&t.values).zip(&t.weights) {
            let p = if second { st[i].p22 } else { st[i].p11 };
            acc += w * (y - p).powi(2);
        }
        (acc / sw).sqrt() / sd
    };

    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut starts = vec![kind.default_start()];
    for _ in 1..s.starts.max(1) {
        starts.push(
            (0..kind.n_params())
                .map(|i| {
                    let r = if kind.is_exponent(i) {
                        s.upper.min(-s.lower)
                    } else {
                        s.modulus_range
                    };
                    rng.random_range(-r..=r)
                })
                .collect(),
        );
    }
    let nm = NelderMead {
        max_iter: s.max_iter,
        restarts: s.restarts,
        ..NelderMead::default()
    };
    let results: Vec<(usize, Vec<f64>, f64)> = starts
        .par_iter()
        .enumerate()
        .map(|(i, x0)| {
            let m = nm.minimize(objective, x0);
            (i, m.x, m.f)
        })
        .collect();
    let (start, x, f) = results
        .into_iter()
        .filter(|r| r.2.is_finite())
        .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))
        .ok_or_else(|| Error::Fit(format!("every start of the {kind} fit was invalid")))?;
    let model = BaselineModel { kind, params: x };
    Ok(BaselineFit {
        r2: model.r2(ds)?,
        model,
        nrmse: f,
        start,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublishedParameter {
    pub name: String,
    /// Decimal string exactly as published.
    pub value: String,
    pub unit: String,
}

/// A published parameter set shipped with the crate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublishedTable {
    pub model: BaselineKind,
    pub table: String,
    pub data: String,
    pub parameters: Vec<PublishedParameter>,
}

impl PublishedTable {
    pub fn values(&self) -> Result<Vec<f64>> {
        self.parameters
            .iter()
            .map(|p| {
                p.value
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad parameter value `{}`", p.value)))
            })
            .collect()
    }

    pub fn model(&self) -> Result<BaselineModel> {
        BaselineModel::new(self.model, self.values()?)
    }
}

/// All bundled parameter tables.
pub fn published_tables() -> Result<Vec<PublishedTable>> {
    [OGDEN_TABLE4, ET_TABLE2, SHARIFF_TABLE3]
        .into_iter()
        .map(|s| Ok(serde_json::from_str(s)?))
        .collect()
}

/// The bundled table for `kind` with id `table` (e.g. `table4`).
pub fn published_table(kind: BaselineKind, table: &str) -> Result<PublishedTable> {
    published_tables()?
        .into_iter()
        .find(|t| t.model == kind && t.table == table)
        .ok_or_else(|| Error::Parse(format!("no published `{table}` parameters for {kind}")))
}

/// R² in percent of a published parameter set on `ds`.
pub fn evaluate_published(kind: BaselineKind, table: &str, ds: &Dataset) -> Result<f64> {
    kind.check_implemented()?;
    published_table(kind, table)?.model()?.r2(ds)
}
