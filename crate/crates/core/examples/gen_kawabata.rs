//! Writes the biaxial surrogate data set `data/kawabata.csv`.
//!
//! Stresses come from the bundled `kawabata2_eq17` energy on a grid
//! matching the published biaxial programme: UT, PS and EBT curves for
//! `λ ∈ [1, 3.7]`, plus biaxial families at fixed `λ1` with `λ2` between the
//! uniaxial lateral stretch and `min(λ1, 3)`.
//! Usage: `cargo run --example gen_kawabata -- data/kawabata.csv`

use hyperdisc_core::datasets::{DataPoint, Dataset, DeformationMode};
use hyperdisc_core::mechanics::stretches_from_mode;
use hyperdisc_core::ModelFile;

fn round(v: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (v * s).round() / s
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "data/kawabata.csv".into());
    let pred = ModelFile::builtin("kawabata2_eq17").unwrap().predictor().unwrap();
    let mut pts = Vec::new();
    for (mode, id) in [
        (DeformationMode::Uniaxial, "ut"),
        (DeformationMode::PureShear, "ps"),
        (DeformationMode::Equibiaxial, "ebt"),
    ] {
        for l in linspace(1.0, 3.7, 10) {
            let l = round(l, 3);
            let s = pred.stress(&stretches_from_mode(mode, l, None).unwrap()).unwrap();
            pts.push(DataPoint {
                mode,
                lambda1: l,
                lambda2: None,
                p11: round(s.p11, 4),
                p22: None,
                weight: 1.0,
                curve_id: id.into(),
            });
        }
    }
    for l1 in [1.3, 1.6, 1.9, 2.2, 2.5, 2.8, 3.1, 3.4, 3.7] {
        for l2 in linspace(1.0 / f64::sqrt(l1), f64::min(l1, 3.0), 7).skip(1) {
            let l2 = round(l2, 3);
            let k = stretches_from_mode(DeformationMode::Biaxial, l1, Some(l2)).unwrap();
            let s = pred.stress(&k).unwrap();
            pts.push(DataPoint {
                mode: DeformationMode::Biaxial,
                lambda1: l1,
                lambda2: Some(l2),
                p11: round(s.p11, 4),
                p22: Some(round(s.p22, 4)),
                weight: 1.0,
                curve_id: format!("bx-{l1}"),
            });
        }
    }
    let ds = Dataset::new("kawabata", pts).unwrap();
    ds.write_csv(&out).unwrap();
    println!("{out}: {} rows, sha256 {}", ds.len(), ds.content_hash());
}
