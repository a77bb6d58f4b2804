//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits 0 so a failing criterion does not break the test suite; set
//! `HYPERDISC_ACCEPTANCE_STRICT=1` to turn any FAIL into a non-zero exit.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use hyperdisc_core::baselines::{self, BaselineKind, BaselineModel, FitSettings};
use hyperdisc_core::controller::{prior_mask, Controller, PolicyConfig};
use hyperdisc_core::datasets::{DataPoint, Dataset, DeformationMode, NoiseConfig};
use hyperdisc_core::expr::{parse_infix, validate_traversal};
use hyperdisc_core::mechanics::{invariants, stretches_from_mode, Kinematics};
use hyperdisc_core::trainer::{self, Evaluator, RewardConfig, TrainConfig};
use hyperdisc_core::{ExprTree, Formulation, Library, ModelFile, Scenario, StressPredictor, Token};

#[derive(Default)]
struct Tally {
    pass: usize,
    fail: usize,
}

impl Tally {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        if ok {
            self.pass += 1;
        } else {
            self.fail += 1;
        }
        println!("{} {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    }

    fn skip(&self, id: &str, why: &str) {
        println!("SKIP {id}: {why}");
    }

    fn info(&self, id: &str, detail: String) {
        println!("     {id}: {detail}");
    }
}

fn bundled(name: &str) -> Dataset {
    Dataset::bundled(name).expect("bundled data")
}

// ---------------------------------------------------------------- AC1

fn ac1(t: &mut Tally) {
    let cases: [(&str, &str, Option<Scenario>, f64, f64); 4] = [
        ("eq11", "treloar.csv", None, 97.316, 1.5),
        ("omega_eq15", "treloar.csv", None, 98.062, 1.5),
        ("kawabata1_eq16", "kawabata.csv", Some(Scenario::KawabataS1), 99.670, 1.5),
        ("kawabata3_eq18", "kawabata.csv", Some(Scenario::KawabataS3), 98.4, 2.0),
    ];
    for (model, data, scenario, target, tol) in cases {
        let start = Instant::now();
        let ds = bundled(data);
        let ds = scenario.map_or(ds.clone(), |s| s.apply(&ds).unwrap());
        let p = ModelFile::builtin(model).unwrap().predictor().unwrap();
        let r2 = trainer::r2_score(&p, &ds).unwrap();
        let secs = start.elapsed().as_secs_f64();
        t.check(
            &format!("AC1 {model}"),
            (r2 - target).abs() <= tol && secs < 5.0,
            format!("R2 = {r2:.3}% (target {target} ± {tol}), {secs:.2} s"),
        );
        let e = Evaluator::new(&ds).unwrap().nrmse(&p, p.tree().constants());
        t.info(&format!("AC1 {model}"), format!("100/(1+NRMSE) = {:.3}%", 100.0 / (1.0 + e)));
    }
}

// ---------------------------------------------------------------- AC2

fn ac2(t: &mut Tally) {
    let ds = bundled("treloar.csv");
    let target = 95.583;
    let r2 = baselines::evaluate_published(BaselineKind::Ogden3, "table4", &ds).unwrap();
    t.check(
        "AC2 ogden3 table4",
        (r2 - target).abs() <= 1.5,
        format!("R2 = {r2:.3}% (target {target} ± 1.5)"),
    );
    let m = baselines::published_table(BaselineKind::Ogden3, "table4").unwrap().model().unwrap();
    let e = Evaluator::new(&ds).unwrap();
    let pred = m.predict(&ds).unwrap();
    let n = trainer::nrmse(&pred, e.targets(), e.weights()).unwrap();
    t.info("AC2 ogden3 table4", format!("100/(1+NRMSE) = {:.3}%", 100.0 / (1.0 + n)));

    let start = Instant::now();
    let fit = baselines::fit_baseline(BaselineKind::Ogden3, &ds, &FitSettings::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    t.check(
        "AC2 ogden3 fresh fit",
        fit.r2 >= target && secs < 60.0,
        format!("R2 = {:.3}% (need ≥ {target}), {secs:.1} s", fit.r2),
    );
    for kind in [BaselineKind::ExtendedTube, BaselineKind::Shariff] {
        if kind.is_implemented() {
            unreachable!("plug-in present but not scored");
        }
        t.skip(&format!("AC2 {kind}"), "plug-in not built");
    }
}

// ---------------------------------------------------------------- AC3

fn three_mode_data(name: &str, stress: impl Fn(&Kinematics) -> f64, n: usize, lmax: f64) -> Dataset {
    let mut pts = Vec::new();
    for mode in [DeformationMode::Uniaxial, DeformationMode::PureShear, DeformationMode::Equibiaxial] {
        for i in 0..n {
            let l = 1.0 + (lmax - 1.0) * i as f64 / (n - 1) as f64;
            pts.push(DataPoint {
                mode,
                lambda1: l,
                lambda2: None,
                p11: stress(&stretches_from_mode(mode, l, None).unwrap()),
                p22: None,
                weight: 1.0,
                curve_id: mode.as_str().to_lowercase(),
            });
        }
    }
    Dataset::new(name, pts).unwrap()
}

fn ac3(t: &mut Tally) {
    // Ψ = I + 0.5 ln II: Ψ1 = 1, Ψ2 = 0.5 / II
    let ds = three_mode_data(
        "fig1",
        |k| {
            let inv = invariants(k);
            let (p, _) = plane_stress(k, 1.0, 0.5 / inv.i2);
            p
        },
        20,
        3.0,
    );
    let start = Instant::now();
    let (mut ok, mut done) = (0, 0);
    for seed in 0..5u64 {
        if ok >= 3 || done - ok > 2 {
            break;
        }
        let s0 = Instant::now();
        let cfg = TrainConfig {
            epochs: 2000,
            batch_size: 500,
            seed,
            ebt_weight: 1,
            stop_reward: 0.99,
            ..TrainConfig::default()
        };
        let r = trainer::train(&ds, &cfg).unwrap();
        let best = r.best.as_ref().map_or(0.0, |b| b.reward);
        done += 1;
        if best >= 0.99 {
            ok += 1;
        }
        t.info(
            "AC3 seed",
            format!(
                "{seed}: best reward {best:.5} after {} epochs ({:.0} s) {}",
                r.epochs_run,
                s0.elapsed().as_secs_f64(),
                r.best.as_ref().map_or("", |b| b.display.as_str())
            ),
        );
    }
    t.check(
        "AC3 synthetic recovery",
        ok >= 3,
        format!("{ok} of {done} seeds reached reward ≥ 0.99 (need 3 of 5), {:.0} s", start.elapsed().as_secs_f64()),
    );
}

// ---------------------------------------------------------------- AC4

/// Independent closed form of the plane-stress nominal stresses.
fn plane_stress(k: &Kinematics, psi1: f64, psi2: f64) -> (f64, f64) {
    let f = |li: f64| 2.0 / li * (psi1 * (li * li - k.l3 * k.l3) - psi2 * (1.0 / (li * li) - 1.0 / (k.l3 * k.l3)));
    (f(k.l1), f(k.l2))
}

fn random_trees(lib: &Library, n: usize, seed: u64) -> Vec<ExprTree> {
    let c = Controller::new(lib.clone(), PolicyConfig::default(), seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let batch = c.sample_batch(20 * n, &mut rng);
    let mut out = Vec::new();
    for tokens in batch.traversals {
        let k = tokens.iter().filter(|t| **t == Token::Const).count();
        let consts = (0..k).map(|_| rng.random_range(0.1..2.0)).collect();
        out.push(ExprTree::new(tokens, consts).unwrap());
    }
    out
}

fn biaxial_states() -> Vec<Kinematics> {
    let mut ks = Vec::new();
    for l1 in [1.1, 1.7, 2.5, 3.4] {
        for l2 in [0.8, 1.0, 1.3, 2.2] {
            ks.push(stretches_from_mode(DeformationMode::Biaxial, l1, Some(l2)).unwrap());
        }
    }
    ks
}

fn ac4(t: &mut Tally) {
    let start = Instant::now();
    let id = Kinematics::identity();
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for tree in random_trees(&Library::invariant(), 100, 1) {
        let p = StressPredictor::build(&tree, Formulation::Invariant).unwrap();
        if let Ok(s) = p.stress(&id) {
            worst = worst.max(s.p11.abs()).max(s.p22.abs());
            checked += 1;
            if checked == 100 {
                break;
            }
        }
    }
    t.check(
        "AC4 zero stress at identity",
        checked == 100 && worst < 1e-10,
        format!("{checked} valid trees, max |P| = {worst:.1e}"),
    );

    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let l = 1.0 + 7.0 * i as f64 / 199.0;
        let inv = invariants(&stretches_from_mode(DeformationMode::PureShear, l, None).unwrap());
        worst = worst.max((inv.i1 - inv.i2).abs() / inv.i1);
    }
    t.check("AC4 PS invariants", worst < 1e-12, format!("max |I - II| / I = {worst:.1e}"));

    let mut worst: f64 = 0.0;
    let trees = random_trees(&Library::invariant(), 100, 2);
    for tree in trees.iter().take(500) {
        let p = StressPredictor::build(tree, Formulation::Invariant).unwrap();
        for l in [1.2, 2.0, 4.0] {
            if let Ok(s) = p.stress(&stretches_from_mode(DeformationMode::Equibiaxial, l, None).unwrap()) {
                worst = worst.max((s.p11 - s.p22).abs() / s.p11.abs().max(1e-300));
            }
        }
    }
    t.check("AC4 EBT symmetry", worst < 1e-12, format!("max rel |P11 - P22| = {worst:.1e}"));

    let mu = 0.8;
    let inv = StressPredictor::build(&parse_infix("(0.4 * (x0 - 3))").unwrap(), Formulation::Invariant).unwrap();
    let str_ = StressPredictor::build(&parse_infix("(0.4 * ((x0)^2 - 1))").unwrap(), Formulation::Stretch).unwrap();
    let og = BaselineModel::new(BaselineKind::Ogden3, vec![mu, 0.0, 0.0, 2.0, 1.0, 1.0]).unwrap();
    let mut worst: f64 = 0.0;
    let mut states = biaxial_states();
    for mode in [DeformationMode::Uniaxial, DeformationMode::PureShear, DeformationMode::Equibiaxial] {
        for l in [1.05, 1.5, 2.5, 5.0] {
            states.push(stretches_from_mode(mode, l, None).unwrap());
        }
    }
    for k in &states {
        let a = inv.stress(k).unwrap();
        let b = str_.stress(k).unwrap();
        let c = og.stress(k);
        let (e11, e22) = plane_stress(k, mu / 2.0, 0.0);
        for (x, y) in [(a.p11, b.p11), (a.p22, b.p22), (a.p11, c.p11), (a.p22, c.p22), (a.p11, e11), (a.p22, e22)] {
            worst = worst.max((x - y).abs() / x.abs().max(y.abs()).max(1e-12));
        }
    }
    t.check(
        "AC4 invariant/stretch equivalence",
        worst < 1e-10,
        format!("alpha = 2 Ogden, max rel diff = {worst:.1e}"),
    );

    // P_i = ∂W/∂λ_i with λ3 = 1/(λ1 λ2) eliminated.
    let mut preds: Vec<StressPredictor> = ["eq11", "omega_eq15", "kawabata1_eq16", "kawabata2_eq17", "kawabata3_eq18"]
        .iter()
        .map(|n| ModelFile::builtin(n).unwrap().predictor().unwrap())
        .collect();
    preds.extend(
        random_trees(&Library::invariant(), 40, 3)
            .iter()
            .map(|t| StressPredictor::build(t, Formulation::Invariant).unwrap())
            .take(200),
    );
    let (mut n, mut worst) = (0, 0.0f64);
    for p in &preds {
        for k in biaxial_states() {
            let w = |l1: f64, l2: f64| p.energy(&Kinematics::new(l1, l2, 1.0 / (l1 * l2)).unwrap());
            let Ok(s) = p.stress(&k) else { continue };
            let h1 = 1e-5 * k.l1;
            let h2 = 1e-5 * k.l2;
            let (Ok(a), Ok(b), Ok(c), Ok(d)) =
                (w(k.l1 + h1, k.l2), w(k.l1 - h1, k.l2), w(k.l1, k.l2 + h2), w(k.l1, k.l2 - h2))
            else {
                continue;
            };
            if [a, b, c, d].iter().any(|v| v.abs() > 1e6) {
                continue;
            }
            let fd = [(a - b) / (2.0 * h1), (c - d) / (2.0 * h2)];
            for (x, y) in [(s.p11, fd[0]), (s.p22, fd[1])] {
                worst = worst.max((x - y).abs() / x.abs().max(1e-3));
            }
            n += 1;
        }
    }
    t.check(
        "AC4 symbolic vs finite-difference stress",
        worst < 1e-5 && n > 100,
        format!("{n} states, max rel diff = {worst:.1e}"),
    );
    t.info("AC4", format!("{:.2} s", start.elapsed().as_secs_f64()));
}

// ---------------------------------------------------------------- AC5

fn ac5(t: &mut Tally) {
    let lib = Library::invariant();
    let c = Controller::new(lib.clone(), PolicyConfig::default(), 11).unwrap();
    let batch = c.sample_batch(10_000, &mut ChaCha8Rng::seed_from_u64(12));
    let mut invalid = 0;
    let mut masked = 0;
    for tr in &batch.traversals {
        if !validate_traversal(tr, &lib) {
            invalid += 1;
        }
        for i in 0..tr.len() {
            if !prior_mask(&tr[..i], &lib).unwrap()[lib.index_of(tr[i]).unwrap()] {
                masked += 1;
            }
        }
    }
    t.check(
        "AC5 sampled validity",
        invalid == 0 && batch.len() == 10_000,
        format!("{invalid} invalid of {}", batch.len()),
    );
    t.check("AC5 masked tokens never sampled", masked == 0, format!("{masked} masked tokens sampled"));

    let batch = c.sample_batch(300, &mut ChaCha8Rng::seed_from_u64(13));
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let rewards: Vec<f64> = (0..batch.len()).map(|_| rng.random()).collect();
    let (g, _) = c.gradient(&batch, &rewards).unwrap();
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let step = |s: f64| -> Vec<f64> { c.params().iter().zip(&g).map(|(p, gi)| p + s * gi / norm).collect() };
    let o0 = c.objective_at(c.params(), &batch, &rewards).unwrap();
    let up = c.objective_at(&step(1e-4), &batch, &rewards).unwrap();
    let dn = c.objective_at(&step(-1e-4), &batch, &rewards).unwrap();
    let fd = (up - dn) / 2e-4;
    t.check(
        "AC5 gradient direction",
        up > o0 && (fd - norm).abs() <= 1e-4 * norm,
        format!("objective +{:.3e} along gradient, directional FD {fd:.6e} vs |g| {norm:.6e}", up - o0),
    );

    let bandit = Library::new(vec![Token::Add, Token::Var(0), Token::Var(1)], 0, 1, 1).unwrap();
    let cfg = PolicyConfig {
        learning_rate: 0.01,
        ..PolicyConfig::default()
    };
    let mut ctl = Controller::new(bandit.clone(), cfg, 21).unwrap();
    let good = bandit.index_of(Token::Var(0)).unwrap();
    let noise = Normal::new(0.0, 0.05).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut reached = None;
    for step in 1..=500 {
        let b = ctl.sample_batch(64, &mut rng);
        let r: Vec<f64> = b
            .traversals
            .iter()
            .map(|tr| if tr[0] == Token::Var(0) { 0.8 } else { 0.5 } + noise.sample(&mut rng))
            .collect();
        ctl.policy_update(&b, &r).unwrap();
        if ctl.root_distribution()[good] > 0.99 {
            reached = Some(step);
            break;
        }
    }
    let p = ctl.root_distribution()[good];
    t.check(
        "AC5 two-token bandit",
        reached.is_some(),
        match reached {
            Some(s) => format!("p(better token) = {p:.4} after {s} steps"),
            None => format!("p(better token) = {p:.4} after 500 steps"),
        },
    );
}

// ---------------------------------------------------------------- AC6

fn ac6(t: &mut Tally) {
    let a = 0.025;
    let clean = bundled("treloar.csv");
    let runs = 4000;
    let ut: Vec<usize> = (0..clean.len()).filter(|&i| clean.points[i].mode == DeformationMode::Uniaxial).collect();
    let lmax = ut.iter().map(|&i| clean.points[i].lambda1).fold(0.0, f64::max);
    let probes = [ut[ut.len() / 3], ut[2 * ut.len() / 3], *ut.last().unwrap()];
    let mut sums = vec![(0.0, 0.0); probes.len()];
    for seed in 0..runs {
        let noisy = clean.add_noise(&NoiseConfig { amplitude: a, seed }).unwrap();
        for (j, &i) in probes.iter().enumerate() {
            let d = noisy.points[i].p11 - clean.points[i].p11;
            sums[j].0 += d;
            sums[j].1 += d * d;
        }
    }
    let n = runs as f64;
    let mut ok = true;
    let mut detail = Vec::new();
    for (j, &i) in probes.iter().enumerate() {
        let expect = a * clean.points[i].lambda1 / lmax;
        let mean = sums[j].0 / n;
        let sd = ((sums[j].1 - n * mean * mean) / (n - 1.0)).sqrt();
        let sd_tol = 3.0 * expect / (2.0 * (n - 1.0)).sqrt();
        let mean_tol = 3.0 * expect / n.sqrt();
        ok &= (sd - expect).abs() <= sd_tol && mean.abs() <= mean_tol;
        detail.push(format!("λ={} sd {sd:.5} vs {expect:.5}", clean.points[i].lambda1));
    }
    t.check("AC6 noise scaling", ok, format!("{runs} draws: {}", detail.join(", ")));

    let start = Instant::now();
    let noisy = clean.add_noise(&NoiseConfig { amplitude: a, seed: 0 }).unwrap();
    let cfg = TrainConfig {
        epochs: 200,
        batch_size: 500,
        seed: 0,
        ebt_weight: 1,
        stop_reward: 0.9,
        ..TrainConfig::default()
    };
    let r = trainer::train(&noisy, &cfg).unwrap();
    let r2 = r.r2_full.unwrap_or(f64::NEG_INFINITY);
    t.check(
        "AC6 noisy discovery",
        r2 >= 90.0,
        format!(
            "R2 on noisy data = {r2:.3}% (need ≥ 90) after {} epochs, {:.0} s: {}",
            r.epochs_run,
            start.elapsed().as_secs_f64(),
            r.best.as_ref().map_or("", |b| b.display.as_str())
        ),
    );
}

// ---------------------------------------------------------------- AC7

#[allow(clippy::approx_constant)]
fn ac7(t: &mut Tally) {
    let e = trainer::nrmse(&[0.0, 1.0, 3.0], &[0.0, 1.0, 2.0], &[1.0; 3]).unwrap();
    t.check("AC7 NRMSE hand example", (e - 0.7071).abs() <= 1e-4, format!("NRMSE = {e:.6} (expect 0.7071)"));

    let ds = bundled("treloar.csv");
    let ev = Evaluator::new(&ds).unwrap();
    let c = Controller::new(Library::invariant(), PolicyConfig::default(), 31).unwrap();
    let batch = c.sample_batch(150, &mut ChaCha8Rng::seed_from_u64(32));
    let cfg = RewardConfig::default();
    let rewards: Vec<f64> = batch
        .traversals
        .iter()
        .map(|tr| trainer::score_traversal(tr, &ev, Formulation::Invariant, &cfg).reward)
        .collect();
    let (lo, hi) = rewards.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(*r), b.max(*r)));
    t.check(
        "AC7 reward bounds",
        lo >= 0.0 && hi <= 1.0,
        format!("{} rewards in [{lo:.4}, {hi:.4}]", rewards.len()),
    );

    let y = ev.targets();
    let w = ev.weights();
    let mean = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / w.iter().sum::<f64>();
    let r2 = trainer::r2_percent(&vec![mean; y.len()], y, w).unwrap();
    t.check("AC7 mean predictor", r2.abs() < 1e-9, format!("R2 = {r2:.2e}%"));

    // neo-Hookean uniaxial: P = 2c(λ - λ⁻²)
    let pts = (0..15)
        .map(|i| {
            let l = 1.0 + 0.25 * i as f64;
            DataPoint {
                mode: DeformationMode::Uniaxial,
                lambda1: l,
                lambda2: None,
                p11: 2.0 * 0.5 * (l - 1.0 / (l * l)),
                p22: None,
                weight: 1.0,
                curve_id: "ut".into(),
            }
        })
        .collect();
    let nh = Dataset::new("nh", pts).unwrap();
    let tree = parse_infix("(1 * (x0 - 3))").unwrap();
    let fit = trainer::constant_optimize(&tree, &nh, Formulation::Invariant, &cfg).unwrap();
    let got = fit.constants()[0];
    t.check(
        "AC7 constant_optimize",
        (got - 0.5).abs() <= 1e-3,
        format!("c = {got:.8} (expect 0.5 ± 1e-3)"),
    );
}

fn main() {
    let mut t = Tally::default();
    ac1(&mut t);
    ac2(&mut t);
    ac4(&mut t);
    ac5(&mut t);
    ac7(&mut t);
    ac6(&mut t);
    ac3(&mut t);
    println!("acceptance: {} passed, {} failed", t.pass, t.fail);
    let strict = std::env::var("HYPERDISC_ACCEPTANCE_STRICT").is_ok_and(|v| v != "0" && !v.is_empty());
    if strict && t.fail > 0 {
        std::process::exit(1);
    }
}
