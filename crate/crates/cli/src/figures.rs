//! Stress-stretch overlays and term-contribution charts.

use hyperdisc_core::datasets::{Dataset, DeformationMode};
use hyperdisc_core::mechanics::{stretches_from_mode, Kinematics, StressResponse};

use crate::plot::{Panel, Series, Style};

pub type StressFn<'a> = dyn Fn(&Kinematics) -> Option<StressResponse> + 'a;

const DENSE: usize = 120;

fn title(mode: DeformationMode) -> &'static str {
    match mode {
        DeformationMode::Uniaxial => "Uniaxial tension",
        DeformationMode::PureShear => "Pure shear",
        DeformationMode::Equibiaxial => "Equibiaxial tension",
        DeformationMode::Biaxial => "General biaxial",
    }
}

fn dense(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    (0..DENSE).map(move |i| lo + (hi - lo) * i as f64 / (DENSE - 1) as f64)
}

/// `(file name, panels)` per mode present in `ds`. For general biaxial
/// data one file holds a `P11(λ2)` and a `P22(λ2)` panel with one family
/// per fixed `λ1`.
pub fn overlays(ds: &Dataset, stress: &StressFn, model_label: &str) -> Vec<(String, Vec<Panel>)> {
    let mut out = Vec::new();
    for mode in ds.modes() {
        let curves: Vec<(String, Vec<usize>)> = ds
            .curves()
            .into_iter()
            .filter(|(_, idx)| ds.points[idx[0]].mode == mode)
            .collect();
        let panels = if mode == DeformationMode::Biaxial {
            biaxial_panels(ds, &curves, stress, model_label)
        } else {
            vec![uniaxial_panel(ds, mode, &curves, stress, model_label)]
        };
        out.push((format!("plot_{}.svg", mode.as_str()), panels));
    }
    out
}

fn uniaxial_panel(
    ds: &Dataset,
    mode: DeformationMode,
    curves: &[(String, Vec<usize>)],
    stress: &StressFn,
    model_label: &str,
) -> Panel {
    let mut series = Vec::new();
    let mut hi: f64 = 1.0;
    for (c, (id, idx)) in curves.iter().enumerate() {
        let pts: Vec<(f64, f64)> = idx.iter().map(|&i| (ds.points[i].lambda1, ds.points[i].p11)).collect();
        hi = pts.iter().fold(hi, |m, p| m.max(p.0));
        let label = if curves.len() == 1 { "data".to_string() } else { id.clone() };
        series.push(Series { label, points: pts, style: Style::Markers, color: c });
    }
    let line: Vec<(f64, f64)> = dense(1.0, hi)
        .filter_map(|l| {
            let k = stretches_from_mode(mode, l, None).ok()?;
            Some((l, stress(&k)?.p11))
        })
        .collect();
    series.push(Series {
        label: model_label.into(),
        points: line,
        style: Style::Line,
        color: curves.len(),
    });
    Panel {
        title: title(mode).into(),
        x_label: "stretch λ [-]".into(),
        y_label: "nominal stress P11 [MPa]".into(),
        series,
    }
}

fn biaxial_panels(
    ds: &Dataset,
    curves: &[(String, Vec<usize>)],
    stress: &StressFn,
    model_label: &str,
) -> Vec<Panel> {
    let mut p11 = Vec::new();
    let mut p22 = Vec::new();
    for (c, (_, idx)) in curves.iter().enumerate() {
        let l1 = ds.points[idx[0]].lambda1;
        let lam2: Vec<f64> = idx.iter().map(|&i| ds.points[i].effective_lambda2()).collect();
        let lo = lam2.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = lam2.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let label = format!("λ1 = {l1}");
        p11.push(Series {
            label: label.clone(),
            points: idx.iter().map(|&i| (ds.points[i].effective_lambda2(), ds.points[i].p11)).collect(),
            style: Style::Markers,
            color: c,
        });
        let with_p22: Vec<(f64, f64)> = idx
            .iter()
            .filter_map(|&i| Some((ds.points[i].effective_lambda2(), ds.points[i].p22?)))
            .collect();
        if !with_p22.is_empty() {
            p22.push(Series { label: label.clone(), points: with_p22, style: Style::Markers, color: c });
        }
        let line: Vec<(f64, f64, f64)> = dense(lo, hi)
            .filter_map(|l2| {
                let k = stretches_from_mode(DeformationMode::Biaxial, l1, Some(l2)).ok()?;
                let s = stress(&k)?;
                Some((l2, s.p11, s.p22))
            })
            .collect();
        p11.push(Series {
            label: String::new(),
            points: line.iter().map(|p| (p.0, p.1)).collect(),
            style: Style::Line,
            color: c,
        });
        p22.push(Series { label: String::new(), points: line.iter().map(|p| (p.0, p.2)).collect(), style: Style::Line, color: c });
    }
    for panel in [&mut p11, &mut p22] {
        panel.push(Series {
            label: model_label.into(),
            points: Vec::new(),
            style: Style::Line,
            color: 7,
        });
    }
    vec![
        Panel {
            title: "General biaxial, P11".into(),
            x_label: "stretch λ2 [-]".into(),
            y_label: "nominal stress P11 [MPa]".into(),
            series: p11,
        },
        Panel {
            title: "General biaxial, P22".into(),
            x_label: "stretch λ2 [-]".into(),
            y_label: "nominal stress P22 [MPa]".into(),
            series: p22,
        },
    ]
}

/// Per-term `P11` over engineering strain `[0, max_strain_percent]`.
/// Returns the panel and the sampled rows `(strain %, term values, total)`.
pub fn term_panel(
    mode: DeformationMode,
    terms: &[(String, Box<StressFn>)],
    total: &StressFn,
    max_strain_percent: f64,
    note: Option<&str>,
) -> (Panel, Vec<(f64, Vec<f64>, f64)>) {
    let mut rows = Vec::new();
    for e in dense(0.0, max_strain_percent) {
        let Ok(k) = stretches_from_mode(mode, 1.0 + e / 100.0, None) else {
            continue;
        };
        let vals: Vec<f64> = terms.iter().map(|(_, f)| f(&k).map_or(f64::NAN, |s| s.p11)).collect();
        let t = total(&k).map_or(f64::NAN, |s| s.p11);
        rows.push((e, vals, t));
    }
    let mut series: Vec<Series> = terms
        .iter()
        .enumerate()
        .map(|(j, (label, _))| Series {
            label: label.clone(),
            points: rows.iter().map(|r| (r.0, r.1[j])).collect(),
            style: Style::Line,
            color: j,
        })
        .collect();
    series.push(Series {
        label: "total".into(),
        points: rows.iter().map(|r| (r.0, r.2)).collect(),
        style: Style::Dashed,
        color: 7,
    });
    let mut t = title(mode).to_string();
    if let Some(n) = note {
        t.push_str(&format!(" ({n})"));
    }
    (
        Panel {
            title: t,
            x_label: "engineering strain [%]".into(),
            y_label: "nominal stress P11 [MPa]".into(),
            series,
        },
        rows,
    )
}
