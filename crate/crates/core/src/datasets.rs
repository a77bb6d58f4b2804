//! Multiaxial stress–stretch data: loading, weighting, splitting, noise.
//!
//! Stresses are nominal (first Piola-Kirchhoff) values in MPa. The CSV
//! layout is
//!
//! ```text
//! mode,lambda1,lambda2,P11_MPa,P22_MPa,weight,curve_id
//! ```
//!
//! with `lambda2`, `P22_MPa` and `weight` optional.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::mechanics::{stretches_from_mode, Kinematics};
use crate::{Error, Result};

pub use crate::mechanics::DeformationMode;

pub const CSV_HEADER: [&str; 7] = [
    "mode", "lambda1", "lambda2", "P11_MPa", "P22_MPa", "weight", "curve_id",
];

const TRELOAR_CSV: &str = include_str!("../../../data/treloar.csv");
const KAWABATA_CSV: &str = include_str!("../../../data/kawabata.csv");

/// One measured state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub mode: DeformationMode,
    pub lambda1: f64,
    /// Second in-plane stretch; only stored for biaxial rows.
    pub lambda2: Option<f64>,
    pub p11: f64,
    pub p22: Option<f64>,
    pub weight: f64,
    pub curve_id: String,
}

impl DataPoint {
    pub fn kinematics(&self) -> Result<Kinematics> {
        stretches_from_mode(self.mode, self.lambda1, self.lambda2)
    }

    /// In-plane second stretch actually applied.
    pub fn effective_lambda2(&self) -> f64 {
        match self.mode {
            DeformationMode::Uniaxial => 1.0 / self.lambda1.sqrt(),
            DeformationMode::PureShear => 1.0,
            DeformationMode::Equibiaxial => self.lambda1,
            DeformationMode::Biaxial => self.lambda2.unwrap_or(f64::NAN),
        }
    }

    /// Zero-stress point at the undeformed state.
    pub fn is_reference(&self) -> bool {
        self.lambda1 == 1.0
            && self.lambda2.is_none_or(|l| l == 1.0)
            && self.p11 == 0.0
            && self.p22.is_none_or(|p| p == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub points: Vec<DataPoint>,
}

/// Stratified train/test split settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub seed: u64,
}

/// Strain-proportional Gaussian noise settings; amplitude in MPa.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub amplitude: f64,
    pub seed: u64,
}

fn parse_opt(field: &str) -> std::result::Result<Option<f64>, String> {
    let f = field.trim();
    if f.is_empty() {
        Ok(None)
    } else {
        f.parse::<f64>()
            .map(Some)
            .map_err(|_| format!("bad number `{f}`"))
    }
}

impl Dataset {
    pub fn new(name: impl Into<String>, points: Vec<DataPoint>) -> Result<Self> {
        let ds = Dataset {
            name: name.into(),
            points,
        };
        ds.validate()?;
        Ok(ds)
    }

    fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Dataset(format!("`{}` has no points", self.name)));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !(p.weight > 0.0) || !p.weight.is_finite() {
                return Err(Error::Dataset(format!("point {i}: weight must be positive")));
            }
            if !p.p11.is_finite() || p.p22.is_some_and(|v| !v.is_finite()) {
                return Err(Error::Dataset(format!("point {i}: non-finite stress")));
            }
            p.kinematics()?;
        }
        Ok(())
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::from_csv_str(&name, &text, path)
    }

    /// Parse CSV text; `origin` is only used in error messages.
    pub fn from_csv_str(name: &str, text: &str, origin: &Path) -> Result<Self> {
        let csv_err = |line: u64, msg: String| Error::Csv {
            path: origin.to_path_buf(),
            line,
            msg,
        };
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|e| csv_err(1, e.to_string()))?.clone();
        let found: Vec<&str> = headers.iter().map(str::trim).collect();
        if found != CSV_HEADER {
            return Err(csv_err(
                1,
                format!("expected header `{}`", CSV_HEADER.join(",")),
            ));
        }
        let mut points = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                csv_err(line, e.to_string())
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            let err = |m: String| csv_err(line, m);
            let mode = DeformationMode::from_str(&rec[0]).map_err(|e| err(e.to_string()))?;
            let lambda1 = parse_opt(&rec[1])
                .map_err(&err)?
                .ok_or_else(|| err("missing lambda1".into()))?;
            let lambda2 = parse_opt(&rec[2]).map_err(&err)?;
            let p11 = parse_opt(&rec[3])
                .map_err(&err)?
                .ok_or_else(|| err("missing P11_MPa".into()))?;
            let p22 = parse_opt(&rec[4]).map_err(&err)?;
            let weight = parse_opt(&rec[5]).map_err(&err)?.unwrap_or(1.0);
            let curve_id = rec[6].trim().to_string();
            if curve_id.is_empty() {
                return Err(err("missing curve_id".into()));
            }
            if mode == DeformationMode::Biaxial && lambda2.is_none() {
                return Err(err("BIAXIAL row needs lambda2".into()));
            }
            let lambda2 = if mode == DeformationMode::Biaxial {
                lambda2
            } else {
                None
            };
            let p = DataPoint {
                mode,
                lambda1,
                lambda2,
                p11,
                p22,
                weight,
                curve_id,
            };
            if !(weight > 0.0) {
                return Err(err("weight must be positive".into()));
            }
            p.kinematics().map_err(|e| err(e.to_string()))?;
            points.push(p);
        }
        Self::new(name, points)
    }

    /// Bundled data set by file name (`treloar.csv`, `kawabata.csv`).
    pub fn bundled(file: &str) -> Result<Self> {
        let text = match file.trim_end_matches(".csv") {
            "treloar" => TRELOAR_CSV,
            "kawabata" => KAWABATA_CSV,
            _ => return Err(Error::Dataset(format!("no bundled data set `{file}`"))),
        };
        let stem = file.trim_end_matches(".csv");
        Self::from_csv_str(stem, text, Path::new(file))
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = CSV_HEADER.join(",");
        out.push('\n');
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                p.mode,
                p.lambda1,
                opt(p.lambda2),
                p.p11,
                opt(p.p22),
                p.weight,
                p.curve_id
            ));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    /// SHA-256 over the canonical CSV serialisation.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_csv_string().as_bytes()))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn kinematics(&self) -> Result<Vec<Kinematics>> {
        self.points.iter().map(DataPoint::kinematics).collect()
    }

    pub fn count_mode(&self, mode: DeformationMode) -> usize {
        self.points.iter().filter(|p| p.mode == mode).count()
    }

    pub fn modes(&self) -> Vec<DeformationMode> {
        let mut m: Vec<_> = self.points.iter().map(|p| p.mode).collect();
        m.sort();
        m.dedup();
        m
    }

    /// Curve ids in order of first appearance, with their point indices.
    pub fn curves(&self) -> Vec<(String, Vec<usize>)> {
        let mut order: Vec<(String, Vec<usize>)> = Vec::new();
        let mut slot: HashMap<&str, usize> = HashMap::new();
        for (i, p) in self.points.iter().enumerate() {
            let k = *slot.entry(&p.curve_id).or_insert_with(|| {
                order.push((p.curve_id.clone(), Vec::new()));
                order.len() - 1
            });
            order[k].1.push(i);
        }
        order
    }

    fn derived(&self, suffix: &str, points: Vec<DataPoint>) -> Dataset {
        Dataset {
            name: format!("{}{suffix}", self.name),
            points,
        }
    }

    /// Multiply the weight of every equibiaxial point by `factor`
    /// (equivalent to repeating those points `factor` times).
    pub fn apply_ebt_weighting(&self, factor: u32) -> Result<Dataset> {
        if factor == 0 {
            return Err(Error::Dataset("EBT weighting factor must be ≥ 1".into()));
        }
        let points = self
            .points
            .iter()
            .cloned()
            .map(|mut p| {
                if p.mode == DeformationMode::Equibiaxial {
                    p.weight *= factor as f64;
                }
                p
            })
            .collect();
        Ok(Dataset {
            name: self.name.clone(),
            points,
        })
    }

    /// Per-curve stratified split. Each curve contributes
    /// `round_half_up(fraction · n)` training points; reference points are
    /// always training points. Deterministic for a fixed seed.
    pub fn split(&self, cfg: &SplitConfig) -> Result<(Dataset, Dataset)> {
        if !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
            return Err(Error::Dataset(format!(
                "train fraction {} not in (0, 1)",
                cfg.train_fraction
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut in_train = vec![false; self.points.len()];
        for (_, idx) in self.curves() {
            let n = idx.len();
            let n_train = ((cfg.train_fraction * n as f64) + 0.5).floor() as usize;
            let (refs, mut rest): (Vec<usize>, Vec<usize>) =
                idx.iter().partition(|&&i| self.points[i].is_reference());
            rest.shuffle(&mut rng);
            for &i in &refs {
                in_train[i] = true;
            }
            for &i in rest.iter().take(n_train.saturating_sub(refs.len())) {
                in_train[i] = true;
            }
        }
        let (mut train, mut test) = (Vec::new(), Vec::new());
        for (p, t) in self.points.iter().zip(in_train) {
            if t {
                train.push(p.clone());
            } else {
                test.push(p.clone());
            }
        }
        Ok((self.derived("-train", train), self.derived("-test", test)))
    }

    /// Add `a · (λ₁/λ_max) · N(0, 1)` to every stress value, with `λ_max`
    /// the largest `λ₁` of the point's curve. Reference points are left
    /// untouched.
    pub fn add_noise(&self, cfg: &NoiseConfig) -> Result<Dataset> {
        if !(cfg.amplitude >= 0.0) {
            return Err(Error::Dataset("noise amplitude must be ≥ 0".into()));
        }
        if cfg.amplitude == 0.0 {
            return Ok(self.clone());
        }
        let mut lmax: HashMap<&str, f64> = HashMap::new();
        for p in &self.points {
            let e = lmax.entry(&p.curve_id).or_insert(p.lambda1);
            *e = e.max(p.lambda1);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut points = self.points.clone();
        for p in &mut points {
            if p.is_reference() {
                continue;
            }
            let scale = cfg.amplitude * p.lambda1 / lmax[p.curve_id.as_str()];
            let z: f64 = StandardNormal.sample(&mut rng);
            p.p11 += scale * z;
            if let Some(p22) = p.p22.as_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *p22 += scale * z;
            }
        }
        Ok(self.derived("-noisy", points))
    }

    /// Append a zero-stress point at `F = I` for each mode present that
    /// lacks one.
    pub fn add_reference_point(&self) -> Dataset {
        let mut points = self.points.clone();
        for mode in self.modes() {
            let has = self
                .points
                .iter()
                .any(|p| p.mode == mode && p.is_reference());
            if has {
                continue;
            }
            let first = self.points.iter().find(|p| p.mode == mode).expect("mode present");
            let biaxial = mode == DeformationMode::Biaxial;
            points.push(DataPoint {
                mode,
                lambda1: 1.0,
                lambda2: biaxial.then_some(1.0),
                p11: 0.0,
                p22: first.p22.map(|_| 0.0),
                weight: 1.0,
                curve_id: first.curve_id.clone(),
            });
        }
        Dataset {
            name: self.name.clone(),
            points,
        }
    }

    /// Total weight per mode.
    pub fn weight_by_mode(&self) -> BTreeMap<DeformationMode, f64> {
        let mut m = BTreeMap::new();
        for p in &self.points {
            *m.entry(p.mode).or_insert(0.0) += p.weight;
        }
        m
    }

    /// Stress targets in evaluation order: every `P11`, then every
    /// present `P22`. Returns `(values, weights, point index, is_p22)`.
    pub fn targets(&self) -> Targets {
        let mut t = Targets::default();
        for (i, p) in self.points.iter().enumerate() {
            t.values.push(p.p11);
            t.weights.push(p.weight);
            t.source.push((i, false));
        }
        for (i, p) in self.points.iter().enumerate() {
            if let Some(v) = p.p22 {
                t.values.push(v);
                t.weights.push(p.weight);
                t.source.push((i, true));
            }
        }
        t
    }
}

/// Flattened stress observations of a dataset.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Targets {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    /// `(point index, is P22)` for each value.
    pub source: Vec<(usize, bool)>,
}

/// Which rows and stress components a run trains on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    /// Uniaxial, pure shear and equibiaxial `P11`.
    #[serde(rename = "treloar-3mode")]
    TreloarThreeMode,
    /// Kawabata data: only the UT/PS/EBT rows, `P11`.
    #[serde(rename = "kawabata-s1")]
    KawabataS1,
    /// Kawabata data: every row, `P11` only.
    #[serde(rename = "kawabata-s2")]
    KawabataS2,
    /// Kawabata data: every row, `P11` and `P22`.
    #[serde(rename = "kawabata-s3")]
    KawabataS3,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::TreloarThreeMode => "treloar-3mode",
            Scenario::KawabataS1 => "kawabata-s1",
            Scenario::KawabataS2 => "kawabata-s2",
            Scenario::KawabataS3 => "kawabata-s3",
        }
    }

    /// Row filter and stress-component mask of the scenario.
    pub fn apply(self, ds: &Dataset) -> Result<Dataset> {
        let three_mode = |p: &DataPoint| p.mode != DeformationMode::Biaxial;
        let points: Vec<DataPoint> = match self {
            Scenario::TreloarThreeMode | Scenario::KawabataS1 => ds
                .points
                .iter()
                .filter(|p| three_mode(p))
                .cloned()
                .map(|mut p| {
                    p.p22 = None;
                    p
                })
                .collect(),
            Scenario::KawabataS2 => ds
                .points
                .iter()
                .cloned()
                .map(|mut p| {
                    p.p22 = None;
                    p
                })
                .collect(),
            Scenario::KawabataS3 => {
                if !ds.points.iter().any(|p| p.p22.is_some()) {
                    return Err(Error::Dataset(format!(
                        "scenario {} needs P22 values but `{}` has none",
                        self, ds.name
                    )));
                }
                ds.points.clone()
            }
        };
        if points.is_empty() {
            return Err(Error::Dataset(format!(
                "scenario {} selects no rows of `{}`",
                self, ds.name
            )));
        }
        Ok(Dataset {
            name: ds.name.clone(),
            points,
        })
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "treloar-3mode" => Ok(Scenario::TreloarThreeMode),
            "kawabata-s1" => Ok(Scenario::KawabataS1),
            "kawabata-s2" => Ok(Scenario::KawabataS2),
            "kawabata-s3" => Ok(Scenario::KawabataS3),
            _ => Err(Error::Parse(format!("unknown scenario `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(rows: &str) -> Result<Dataset> {
        let text = format!("{}\n{rows}", CSV_HEADER.join(","));
        Dataset::from_csv_str("t", &text, Path::new("t.csv"))
    }

    fn curve(mode: DeformationMode, id: &str, lams: &[f64]) -> Vec<DataPoint> {
        lams.iter()
            .map(|&l| DataPoint {
                mode,
                lambda1: l,
                lambda2: None,
                p11: l - 1.0,
                p22: None,
                weight: 1.0,
                curve_id: id.into(),
            })
            .collect()
    }

    #[test]
    fn parses_rows() {
        let ds = parse("UT,2.0,,1.75,,1,ut\nEBT,1.0,,0.0,,1,ebt\nBIAXIAL,2,1.5,1,0.5,,bx").unwrap();
        assert_eq!(ds.points[0].mode, DeformationMode::Uniaxial);
        assert_eq!(ds.points[0].lambda1, 2.0);
        assert_eq!(ds.points[0].p11, 1.75);
        assert_eq!(ds.points[0].weight, 1.0);
        assert!(ds.points[1].is_reference());
        assert_eq!(ds.points[2].lambda2, Some(1.5));
        assert_eq!(ds.points[2].p22, Some(0.5));
        assert_eq!(ds.points[2].weight, 1.0);
    }

    #[test]
    fn malformed_rows_report_line() {
        let e = parse("UT,2.0,,1.75,,1,ut\nUT,abc,,1,,1,ut").unwrap_err();
        assert!(matches!(e, Error::Csv { line: 3, .. }), "{e}");
        let e = parse("XX,2.0,,1.75,,1,ut").unwrap_err();
        assert!(matches!(e, Error::Csv { line: 2, .. }), "{e}");
        assert!(parse("UT,2.0,,1.75,,1").is_err());
        assert!(parse("BIAXIAL,2.0,,1.75,,1,b").is_err());
        assert!(parse("UT,2.0,,1.75,,0,ut").is_err());
        assert!(parse("UT,-2.0,,1.75,,1,ut").is_err());
        let bad_header = "mode,lambda1\nUT,2";
        assert!(Dataset::from_csv_str("t", bad_header, Path::new("x")).is_err());
    }

    #[test]
    fn treloar_bundle_counts() {
        let ds = Dataset::bundled("treloar.csv").unwrap();
        assert_eq!(ds.count_mode(DeformationMode::Uniaxial), 25);
        assert_eq!(ds.count_mode(DeformationMode::PureShear), 14);
        assert_eq!(ds.count_mode(DeformationMode::Equibiaxial), 17);
    }

    #[test]
    fn ebt_weighting() {
        let ds = Dataset::bundled("treloar").unwrap();
        assert_eq!(ds.apply_ebt_weighting(1).unwrap(), ds);
        let w = ds.apply_ebt_weighting(2).unwrap().weight_by_mode();
        assert_eq!(w[&DeformationMode::Equibiaxial], 34.0);
        assert_eq!(w[&DeformationMode::Uniaxial], 25.0);
        assert_eq!(w[&DeformationMode::PureShear], 14.0);
        assert!(ds.apply_ebt_weighting(0).is_err());
    }

    #[test]
    fn split_counts_and_determinism() {
        let lams: Vec<f64> = (0..10).map(|i| 1.1 + i as f64 * 0.3).collect();
        let ds = Dataset::new("c", curve(DeformationMode::Uniaxial, "u", &lams)).unwrap();
        let cfg = SplitConfig {
            train_fraction: 0.8,
            seed: 7,
        };
        let (tr, te) = ds.split(&cfg).unwrap();
        assert_eq!((tr.len(), te.len()), (8, 2));
        assert_eq!(ds.split(&cfg).unwrap(), (tr, te));

        let lams: Vec<f64> = (0..14).map(|i| 1.0 + i as f64 * 0.2).collect();
        let ds = Dataset::new("c", curve(DeformationMode::PureShear, "p", &lams)).unwrap();
        let (tr, te) = ds
            .split(&SplitConfig {
                train_fraction: 0.7,
                seed: 1,
            })
            .unwrap();
        assert_eq!((tr.len(), te.len()), (10, 4));
        assert!(tr.points.iter().any(DataPoint::is_reference));
    }

    #[test]
    fn split_is_stratified() {
        let ds = Dataset::bundled("treloar").unwrap();
        let (tr, te) = ds
            .split(&SplitConfig {
                train_fraction: 0.8,
                seed: 3,
            })
            .unwrap();
        assert_eq!(tr.count_mode(DeformationMode::Uniaxial), 20);
        assert_eq!(tr.count_mode(DeformationMode::PureShear), 11);
        assert_eq!(tr.count_mode(DeformationMode::Equibiaxial), 14);
        assert_eq!(tr.len() + te.len(), ds.len());
        assert!(te.points.iter().all(|p| !p.is_reference()));
    }

    #[test]
    fn zero_noise_is_identity() {
        let ds = Dataset::bundled("treloar").unwrap();
        let n = ds
            .add_noise(&NoiseConfig {
                amplitude: 0.0,
                seed: 1,
            })
            .unwrap();
        assert_eq!(n, ds);
    }

    #[test]
    fn noise_is_seeded_and_spares_reference() {
        let ds = Dataset::bundled("treloar").unwrap();
        let cfg = NoiseConfig {
            amplitude: 0.05,
            seed: 11,
        };
        let a = ds.add_noise(&cfg).unwrap();
        let b = ds.add_noise(&cfg).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        assert_ne!(a.content_hash(), ds.content_hash());
        for (p, q) in ds.points.iter().zip(&a.points) {
            if p.is_reference() {
                assert_eq!(p, q);
            }
        }
    }

    #[test]
    fn reference_points() {
        let ds = Dataset::new("u", curve(DeformationMode::Uniaxial, "u", &[1.5, 2.0])).unwrap();
        let r = ds.add_reference_point();
        assert_eq!(r.len(), 3);
        assert!(r.points[2].is_reference() && r.points[2].mode == DeformationMode::Uniaxial);
        assert_eq!(r.add_reference_point(), r);

        let stripped: Vec<_> = Dataset::bundled("treloar")
            .unwrap()
            .points
            .into_iter()
            .filter(|p| !p.is_reference())
            .collect();
        let ds = Dataset::new("t", stripped).unwrap();
        assert_eq!(ds.add_reference_point().len(), ds.len() + 3);
    }

    #[test]
    fn scenarios_filter_rows() {
        let ds = parse(
            "UT,2.0,,1.0,,1,ut\nBIAXIAL,2,1.5,1,0.5,,bx\nBIAXIAL,2,1.2,0.8,0.2,,bx",
        )
        .unwrap();
        let s1 = Scenario::KawabataS1.apply(&ds).unwrap();
        assert_eq!(s1.len(), 1);
        let s2 = Scenario::KawabataS2.apply(&ds).unwrap();
        assert_eq!(s2.len(), 3);
        assert!(s2.points.iter().all(|p| p.p22.is_none()));
        let s3 = Scenario::KawabataS3.apply(&ds).unwrap();
        assert_eq!(s3.targets().values.len(), 5);
        let no_p22 = parse("UT,2.0,,1.0,,1,ut").unwrap();
        assert!(Scenario::KawabataS3.apply(&no_p22).is_err());
        assert_eq!("kawabata-s2".parse::<Scenario>().unwrap(), Scenario::KawabataS2);
    }
}
