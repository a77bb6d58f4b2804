//! `hyperdisc` command-line interface.

mod figures;
mod manifest;
mod plot;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hyperdisc_core::baselines::{self, BaselineKind, BaselineModel, FitSettings};
use hyperdisc_core::datasets::{Dataset, DeformationMode, NoiseConfig, SplitConfig};
use hyperdisc_core::mechanics::{Formulation, Kinematics, StressPredictor};
use hyperdisc_core::trainer::{self, PreparedData, TrainConfig};
use hyperdisc_core::{ExprTree, Library, ModelFile, Scenario};

use figures::StressFn;
use manifest::RunManifest;

const DATA_DIR_ENV: &str = "HYPERDISC_DATA_DIR";

/// Discover hyperelastic strain-energy functions from stress-stretch data.
#[derive(Parser, Debug)]
#[command(name = "hyperdisc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a strain energy that fits a data set.
    Discover(DiscoverArgs),
    /// Add seeded noise to the data, then run discovery.
    Noise(NoiseArgs),
    /// Score a model file against a data set.
    Evaluate(EvaluateArgs),
    /// Fit a classical hyperelastic model.
    FitBaseline(BaselineArgs),
    /// Plot the stress contributed by each additive term of a model.
    TermContributions(TermArgs),
}

#[derive(Args, Debug, Clone)]
struct DiscoverArgs {
    /// CSV path, or the name of a bundled data set.
    #[arg(long, default_value = "treloar.csv")]
    data: String,
    #[arg(long, default_value = "treloar-3mode")]
    scenario: Scenario,
    #[arg(long, default_value = "invariant")]
    formulation: Formulation,
    /// Train fraction per curve; 1 trains on everything.
    #[arg(long, default_value_t = 0.8)]
    split: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 500)]
    batch: usize,
    /// Weight multiplier for equibiaxial points in the training set.
    #[arg(long, default_value_t = 2)]
    ebt_weight: u32,
    #[arg(long)]
    max_length: Option<usize>,
    #[arg(long)]
    max_constants: Option<usize>,
    /// Stop once the best reward reaches this value.
    #[arg(long)]
    stop_reward: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct NoiseArgs {
    /// Noise amplitude in MPa.
    #[arg(long)]
    amplitude: f64,
    #[command(flatten)]
    discover: DiscoverArgs,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Model JSON path, or the name of a built-in model.
    #[arg(long)]
    model: String,
    #[arg(long, default_value = "treloar.csv")]
    data: String,
    /// Restrict rows and stress components as in training.
    #[arg(long)]
    scenario: Option<Scenario>,
    /// Expected formulation; an error if the model uses the other one.
    #[arg(long)]
    formulation: Option<Formulation>,
    /// Also report train/test scores for this train fraction.
    #[arg(long)]
    split: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BaselineArgs {
    /// One of nh, mr, gt, ogden3, et, shariff.
    #[arg(long)]
    model: BaselineKind,
    #[arg(long, default_value = "treloar.csv")]
    data: String,
    #[arg(long)]
    scenario: Option<Scenario>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    starts: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TermArgs {
    #[arg(long)]
    model: String,
    /// `auto` splits top-level sums; `none` plots the whole energy.
    #[arg(long, default_value = "auto")]
    terms: String,
    /// Largest engineering strain in percent (the usual presets are 700 and 300).
    #[arg(long, default_value_t = 700.0)]
    range: f64,
    #[arg(long)]
    out: PathBuf,
}

/// Errors that should exit like a command-line misuse.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn data_dir() -> Option<PathBuf> {
    std::env::var_os(DATA_DIR_ENV).map(PathBuf::from)
}

/// An existing path, then the data directory, then the bundled copy.
fn load_data(spec: &str) -> Result<Dataset> {
    let p = Path::new(spec);
    if p.is_file() {
        return Ok(Dataset::load_csv(p)?);
    }
    if let Some(dir) = data_dir() {
        let q = dir.join(spec);
        if q.is_file() {
            return Ok(Dataset::load_csv(q)?);
        }
    }
    Dataset::bundled(spec).with_context(|| format!("data `{spec}` not found"))
}

fn load_model(spec: &str) -> Result<ModelFile> {
    let p = Path::new(spec);
    if p.is_file() {
        return ModelFile::load(p).with_context(|| format!("reading model {spec}"));
    }
    if let Some(dir) = data_dir() {
        for q in [dir.join("models").join(spec), dir.join("models").join(format!("{spec}.json"))] {
            if q.is_file() {
                return ModelFile::load(&q).with_context(|| format!("reading model {}", q.display()));
            }
        }
    }
    ModelFile::builtin(spec).with_context(|| format!("model `{spec}` not found"))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let p = dir.join(name);
    std::fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serialises");
    s.push('\n');
    s
}

fn write_plots(dir: &Path, plots: Vec<(String, Vec<plot::Panel>)>, m: &RunManifest) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for (name, panels) in plots {
        write(dir, &name, &plot::render(&panels, &m.to_line()))?;
        names.push(name);
    }
    Ok(names)
}

fn predictor_fn(p: &StressPredictor) -> Box<StressFn<'_>> {
    Box::new(move |k: &Kinematics| p.stress(k).ok())
}

fn split_config(fraction: f64, seed: u64) -> Result<Option<SplitConfig>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(usage(format!("--split must be in (0, 1], got {fraction}")));
    }
    Ok((fraction < 1.0).then_some(SplitConfig { train_fraction: fraction, seed }))
}

fn train_config(a: &DiscoverArgs) -> Result<TrainConfig> {
    if a.batch == 0 {
        return Err(usage("--batch must be positive"));
    }
    if a.ebt_weight == 0 {
        return Err(usage("--ebt-weight must be at least 1"));
    }
    if let Some(r) = a.stop_reward {
        if !(r > 0.0 && r <= 1.0) {
            return Err(usage(format!("--stop-reward must be in (0, 1], got {r}")));
        }
    }
    let mut cfg = TrainConfig {
        epochs: a.epochs,
        batch_size: a.batch,
        formulation: a.formulation,
        seed: a.seed,
        split: split_config(a.split, a.seed)?,
        ebt_weight: a.ebt_weight,
        scenario: Some(a.scenario),
        ..TrainConfig::default()
    };
    if let Some(r) = a.stop_reward {
        cfg.stop_reward = r;
    }
    if a.max_length.is_some() || a.max_constants.is_some() {
        let base = cfg.library();
        let lib = Library::new(
            base.tokens().to_vec(),
            a.max_constants.unwrap_or(base.max_constants),
            base.min_length,
            a.max_length.unwrap_or(base.max_length),
        )
        .map_err(|e| usage(e.to_string()))?;
        cfg.library = Some(lib);
    }
    Ok(cfg)
}

fn run_discovery(command: &str, a: &DiscoverArgs, ds: &Dataset, extra: serde_json::Value) -> Result<()> {
    let cfg = train_config(a)?;
    // Validate scenario against the data before any output is produced.
    let prepared: PreparedData = trainer::prepare(ds, &cfg)?;
    let mut config = json!({ "data": a.data, "train": cfg });
    if let (Some(obj), Some(more)) = (config.as_object_mut(), extra.as_object()) {
        obj.extend(more.clone());
    }
    let mut m = RunManifest::start(command, config, a.seed, &ds.name, ds.content_hash());
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;

    if a.epochs == 0 {
        m.finish();
        write(&a.out, "manifest.json", &m.to_json())?;
        println!("epochs = 0: wrote {}", a.out.join("manifest.json").display());
        return Ok(());
    }

    let report = trainer::train(ds, &cfg)?;
    m.finish();
    let stable = m.stable();
    write(
        &a.out,
        "report.json",
        &pretty(&json!({ "manifest": stable, "report": report })),
    )?;
    let mut history = format!("# manifest: {}\n", serde_json::to_string(&stable)?);
    history.push_str(&report.history_csv());
    write(&a.out, "reward_history.csv", &history)?;

    if let Some(best) = &report.best {
        let tree = best.tree()?;
        let mut model = ModelFile::from_tree(None, cfg.formulation, &tree);
        model.manifest = Some(stable.clone());
        write(&a.out, "model.json", &model.to_json())?;
        let pred = StressPredictor::build(&tree, cfg.formulation)?;
        let f = predictor_fn(&pred);
        write_plots(&a.out, figures::overlays(&prepared.full, &*f, "model"), &m)?;
        println!("best: {}", best.display);
        println!(
            "reward {:.6}  nrmse {:.6}  complexity {}  found at epoch {}",
            best.reward, best.nrmse, best.complexity, best.epoch
        );
    } else {
        println!("no valid expression found");
    }
    for (name, v) in [("train", report.r2_train), ("test", report.r2_test), ("full", report.r2_full)] {
        if let Some(v) = v {
            println!("R2 {name}: {v:.4}%");
        }
    }
    println!("epochs run: {}  evaluations: {}", report.epochs_run, report.evaluations);
    write(&a.out, "manifest.json", &m.to_json())?;
    Ok(())
}

fn cmd_discover(a: &DiscoverArgs) -> Result<()> {
    let ds = load_data(&a.data)?;
    run_discovery("discover", a, &ds, json!({}))
}

fn cmd_noise(a: &NoiseArgs) -> Result<()> {
    if !(a.amplitude >= 0.0 && a.amplitude.is_finite()) {
        return Err(usage(format!("--amplitude must be a non-negative number, got {}", a.amplitude)));
    }
    let clean = load_data(&a.discover.data)?;
    let noisy = clean.add_noise(&NoiseConfig {
        amplitude: a.amplitude,
        seed: a.discover.seed,
    })?;
    let extra = json!({
        "noise": { "amplitude": a.amplitude, "seed": a.discover.seed },
        "clean_dataset_hash": clean.content_hash(),
    });
    std::fs::create_dir_all(&a.discover.out)
        .with_context(|| format!("creating {}", a.discover.out.display()))?;
    write(&a.discover.out, "noisy_data.csv", &noisy.to_csv_string())?;
    println!("noisy data sha256 {}", noisy.content_hash());
    run_discovery("noise", &a.discover, &noisy, extra)
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    if let Some(f) = a.formulation {
        if f != model.formulation {
            bail!(hyperdisc_core::Error::FormulationMismatch(format!(
                "model uses the {} formulation, {} was requested",
                model.formulation, f
            )));
        }
    }
    let ds = load_data(&a.data)?;
    let ds = match a.scenario {
        Some(s) => s.apply(&ds)?,
        None => ds,
    };
    let pred = model.predictor()?;
    let full = trainer::r2_score(&pred, &ds)?;
    let mut scores = json!({ "pooled": full });
    println!("model: {} ({}, {} tokens)", model.name.as_deref().unwrap_or(&a.model), model.formulation, model.traversal.len());
    println!("data: {} ({} points)", ds.name, ds.len());
    println!("R2 pooled: {full:.4}%");
    if let Some(fr) = a.split {
        if let Some(sc) = split_config(fr, a.seed)? {
            let (train, test) = ds.split(&sc)?;
            let r_train = trainer::r2_score(&pred, &train)?;
            println!("R2 train: {r_train:.4}%");
            scores["train"] = json!(r_train);
            if !test.is_empty() {
                let r_test = trainer::r2_score(&pred, &test)?;
                println!("R2 test: {r_test:.4}%");
                scores["test"] = json!(r_test);
            }
        }
    }
    if let Some(out) = &a.out {
        std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        let config = json!({ "model": a.model, "data": a.data, "scenario": a.scenario, "split": a.split });
        let mut m = RunManifest::start("evaluate", config, a.seed, &ds.name, ds.content_hash());
        let preds = trainer::point_predictions(&pred, &ds)?;
        let mut csv = String::from("curve_id,mode,lambda1,lambda2,p11,p11_pred,p22,p22_pred\n");
        for p in &preds {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                p.curve_id,
                p.mode,
                p.lambda1,
                p.lambda2,
                p.p11,
                p.p11_pred,
                p.p22.map(|v| v.to_string()).unwrap_or_default(),
                p.p22_pred
            ));
        }
        m.finish();
        let stable = m.stable();
        write(out, "predictions.csv", &csv)?;
        write(out, "evaluation.json", &pretty(&json!({ "manifest": stable, "model": model, "r2": scores })))?;
        let f = predictor_fn(&pred);
        let label = model.name.clone().unwrap_or_else(|| "model".into());
        write_plots(out, figures::overlays(&ds, &*f, &label), &m)?;
        write(out, "manifest.json", &m.to_json())?;
    }
    Ok(())
}

fn cmd_fit_baseline(a: &BaselineArgs) -> Result<()> {
    if !a.model.is_implemented() {
        bail!(
            "the {} model is not implemented: its functional form is not part of this build",
            a.model
        );
    }
    if a.starts == 0 {
        return Err(usage("--starts must be positive"));
    }
    let ds = load_data(&a.data)?;
    let ds = match a.scenario {
        Some(s) => s.apply(&ds)?,
        None => ds,
    };
    let settings = FitSettings {
        starts: a.starts,
        seed: a.seed,
        ..FitSettings::default()
    };
    let fit = baselines::fit_baseline(a.model, &ds, &settings)?;
    println!("{} fit on {} ({} points)", a.model, ds.name, ds.len());
    for (n, v) in a.model.param_names().iter().zip(&fit.model.params) {
        println!("  {n} = {v}");
    }
    println!("R2: {:.4}%  nrmse {:.6}", fit.r2, fit.nrmse);
    let published = baselines::published_tables()?
        .into_iter()
        .find(|t| t.model == a.model)
        .map(|t| -> Result<_> {
            let r2 = t.model()?.r2(&ds)?;
            println!("published {} parameters: R2 {:.4}%", t.table, r2);
            Ok(json!({ "table": t.table, "r2": r2, "parameters": t.parameters }))
        })
        .transpose()?;
    if let Some(out) = &a.out {
        std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        let config = json!({ "model": a.model, "data": a.data, "scenario": a.scenario, "fit": settings });
        let mut m = RunManifest::start("fit-baseline", config, a.seed, &ds.name, ds.content_hash());
        m.finish();
        let params: serde_json::Map<String, serde_json::Value> = a
            .model
            .param_names()
            .iter()
            .zip(&fit.model.params)
            .map(|(n, v)| (n.to_string(), json!(v)))
            .collect();
        write(
            out,
            "baseline.json",
            &pretty(&json!({
                "manifest": m.stable(),
                "model": a.model,
                "parameters": params,
                "r2": fit.r2,
                "nrmse": fit.nrmse,
                "published": published,
            })),
        )?;
        let model: &BaselineModel = &fit.model;
        let f: Box<StressFn> = Box::new(move |k: &Kinematics| {
            let s = model.stress(k);
            (s.p11.is_finite() && s.p22.is_finite()).then_some(s)
        });
        write_plots(out, figures::overlays(&ds, &*f, a.model.as_str()), &m)?;
        write(out, "manifest.json", &m.to_json())?;
    }
    Ok(())
}

fn cmd_term_contributions(a: &TermArgs) -> Result<()> {
    if !(a.range > 0.0 && a.range.is_finite()) {
        return Err(usage(format!("--range must be positive, got {}", a.range)));
    }
    let split = match a.terms.as_str() {
        "auto" => true,
        "none" => false,
        other => return Err(usage(format!("--terms must be `auto` or `none`, got `{other}`"))),
    };
    let model = load_model(&a.model)?;
    let tree = model.tree()?;
    let pieces: Vec<ExprTree> = if split { tree.additive_terms() } else { vec![tree.clone()] };
    let note = (pieces.len() == 1).then_some("not a sum: single term");
    let total = model.predictor()?;
    let preds: Vec<StressPredictor> = pieces
        .iter()
        .map(|t| StressPredictor::build(t, model.formulation))
        .collect::<hyperdisc_core::Result<_>>()?;
    let terms: Vec<(String, Box<StressFn>)> = pieces
        .iter()
        .zip(&preds)
        .enumerate()
        .map(|(i, (_, p))| (format!("Ψ{}", i + 1), predictor_fn(p)))
        .collect();
    let infix: Vec<String> = pieces.iter().map(|t| t.to_infix()).collect();
    for ((label, _), e) in terms.iter().zip(&infix) {
        println!("{label} = {e}");
    }
    if let Some(n) = note {
        println!("note: {n}");
    }
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let config = json!({ "model": a.model, "terms": a.terms, "range": a.range });
    let mut m = RunManifest::start("term-contributions", config, 0, "", String::new());
    m.finish();
    let total_f = predictor_fn(&total);
    let mut csv = String::from("mode,strain_percent");
    for i in 0..terms.len() {
        csv.push_str(&format!(",term{}", i + 1));
    }
    csv.push_str(",total\n");
    for mode in [DeformationMode::Uniaxial, DeformationMode::PureShear, DeformationMode::Equibiaxial] {
        let (panel, rows) = figures::term_panel(mode, &terms, &*total_f, a.range, note);
        for (e, vals, t) in rows {
            csv.push_str(&format!("{},{}", mode, e));
            for v in vals {
                csv.push_str(&format!(",{v}"));
            }
            csv.push_str(&format!(",{t}\n"));
        }
        write(&a.out, &format!("plot_{}.svg", mode.as_str()), &plot::render(&[panel], &m.to_line()))?;
    }
    write(&a.out, "terms.csv", &csv)?;
    write(
        &a.out,
        "terms.json",
        &pretty(&json!({
            "manifest": m.stable(),
            "terms": infix,
            "note": note,
        })),
    )?;
    write(&a.out, "manifest.json", &m.to_json())?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Discover(a) => cmd_discover(a),
        Command::Noise(a) => cmd_noise(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::FitBaseline(a) => cmd_fit_baseline(a),
        Command::TermContributions(a) => cmd_term_contributions(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            eprintln!("For more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
