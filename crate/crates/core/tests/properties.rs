use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hyperdisc_core::controller::{prior_mask, Controller, PolicyConfig};
use hyperdisc_core::datasets::{DataPoint, Dataset, DeformationMode, NoiseConfig, SplitConfig};
use hyperdisc_core::expr::{differentiate, parse_infix, validate_traversal};
use hyperdisc_core::mechanics::{invariants, stretches_from_mode, Kinematics};
use hyperdisc_core::trainer::{self, Evaluator, RewardConfig};
use hyperdisc_core::{ExprTree, Formulation, Library, ModelFile, StressPredictor, Token};

#[derive(Clone, Debug)]
enum Ast {
    Var(u8),
    Const(f64),
    Un(Token, Box<Ast>),
    Bin(Token, Box<Ast>, Box<Ast>),
}

impl Ast {
    fn flatten(&self, tokens: &mut Vec<Token>, consts: &mut Vec<f64>) {
        match self {
            Ast::Var(v) => tokens.push(Token::Var(*v)),
            Ast::Const(c) => {
                tokens.push(Token::Const);
                consts.push(*c);
            }
            Ast::Un(t, a) => {
                tokens.push(*t);
                a.flatten(tokens, consts);
            }
            Ast::Bin(t, a, b) => {
                tokens.push(*t);
                a.flatten(tokens, consts);
                b.flatten(tokens, consts);
            }
        }
    }

    fn tree(&self) -> ExprTree {
        let (mut t, mut c) = (Vec::new(), Vec::new());
        self.flatten(&mut t, &mut c);
        ExprTree::new(t, c).unwrap()
    }
}

fn constant() -> impl Strategy<Value = f64> {
    prop_oneof![(-3.0f64..3.0), (1u32..6).prop_map(f64::from)]
}

/// Random expressions over `n_vars` inputs, depth ≤ 4.
fn ast(n_vars: u8, with_pow: bool) -> impl Strategy<Value = Ast> {
    let leaf = prop_oneof![
        (0..n_vars).prop_map(Ast::Var),
        constant().prop_map(Ast::Const),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        let un = prop_oneof![
            Just(Token::Square),
            Just(Token::Sqrt),
            Just(Token::Exp),
            Just(Token::Log)
        ];
        let bin = if with_pow {
            prop_oneof![
                Just(Token::Add),
                Just(Token::Sub),
                Just(Token::Mul),
                Just(Token::Div),
                Just(Token::Pow)
            ]
            .boxed()
        } else {
            prop_oneof![Just(Token::Add), Just(Token::Sub), Just(Token::Mul), Just(Token::Div)].boxed()
        };
        prop_oneof![
            (un, inner.clone()).prop_map(|(t, a)| Ast::Un(t, Box::new(a))),
            (bin, inner.clone(), inner).prop_map(|(t, a, b)| Ast::Bin(t, Box::new(a), Box::new(b))),
        ]
    })
}

fn treloar() -> Dataset {
    Dataset::bundled("treloar.csv").unwrap()
}

fn datapoint() -> impl Strategy<Value = DataPoint> {
    (0usize..4, 1.0f64..5.0, 0.5f64..3.0, -1.0f64..10.0, -1.0f64..10.0, 0.1f64..3.0, 0u8..3).prop_map(
        |(m, l1, l2, p11, p22, w, c)| {
            let mode = [
                DeformationMode::Uniaxial,
                DeformationMode::PureShear,
                DeformationMode::Equibiaxial,
                DeformationMode::Biaxial,
            ][m];
            let bi = mode == DeformationMode::Biaxial;
            DataPoint {
                mode,
                lambda1: l1,
                lambda2: bi.then_some(l2),
                p11,
                p22: bi.then_some(p22),
                weight: w,
                curve_id: format!("{}-{c}", mode.as_str().to_lowercase()),
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn infix_round_trip(a in ast(2, true)) {
        let t = a.tree();
        let back = parse_infix(&t.to_infix()).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn derivative_matches_finite_difference(a in ast(2, false), x0 in 1.0f64..6.0, x1 in 1.0f64..6.0, var in 0u8..2) {
        let t = a.tree();
        let d = differentiate(&t, var);
        let mut at = [x0, x1];
        let Ok(f0) = t.evaluate(&at) else { return Ok(()) };
        let Ok(dv) = d.evaluate(&at) else { return Ok(()) };
        prop_assume!(f0.abs() < 1e6 && dv.abs() < 1e6);
        let h = 1e-5 * at[var as usize];
        at[var as usize] += h;
        let fp = t.evaluate(&at);
        at[var as usize] -= 2.0 * h;
        let fm = t.evaluate(&at);
        let (Ok(fp), Ok(fm)) = (fp, fm) else { return Ok(()) };
        let fd = (fp - fm) / (2.0 * h);
        // second-order FD error plus cancellation in f
        let tol = 1e-4 * dv.abs().max(1.0) + 1e-9 * f0.abs().max(1.0) / h;
        prop_assert!((fd - dv).abs() <= tol, "fd {} vs symbolic {} for {}", fd, dv, t);
    }

    #[test]
    fn zero_stress_at_identity_invariant(a in ast(2, false)) {
        let p = StressPredictor::build(&a.tree(), Formulation::Invariant).unwrap();
        if let Ok(s) = p.stress(&Kinematics::identity()) {
            prop_assert!(s.p11.abs() < 1e-10 && s.p22.abs() < 1e-10);
        }
    }

    #[test]
    fn zero_stress_at_identity_stretch(a in ast(1, true)) {
        let p = StressPredictor::build(&a.tree(), Formulation::Stretch).unwrap();
        if let Ok(s) = p.stress(&Kinematics::identity()) {
            prop_assert!(s.p11.abs() < 1e-10 && s.p22.abs() < 1e-10);
        }
    }

    #[test]
    fn equibiaxial_stresses_are_equal(a in ast(2, false), l in 1.0f64..5.0) {
        let p = StressPredictor::build(&a.tree(), Formulation::Invariant).unwrap();
        let k = stretches_from_mode(DeformationMode::Equibiaxial, l, None).unwrap();
        if let Ok(s) = p.stress(&k) {
            prop_assert!((s.p11 - s.p22).abs() <= 1e-12 * s.p11.abs().max(1.0));
        }
    }

    #[test]
    fn pure_shear_invariants_coincide(l in 1.0f64..8.0) {
        let inv = invariants(&stretches_from_mode(DeformationMode::PureShear, l, None).unwrap());
        prop_assert!((inv.i1 - inv.i2).abs() <= 1e-12 * inv.i1);
    }

    #[test]
    fn csv_round_trip(points in prop::collection::vec(datapoint(), 1..40)) {
        let ds = Dataset::new("rt", points).unwrap();
        let text = ds.to_csv_string();
        let back = Dataset::from_csv_str("rt", &text, std::path::Path::new("rt.csv")).unwrap();
        prop_assert_eq!(&back, &ds);
        prop_assert_eq!(back.content_hash(), ds.content_hash());
    }

    #[test]
    fn split_partitions_the_data(f in 0.05f64..0.95, seed in any::<u64>()) {
        let ds = treloar();
        let (tr, te) = ds.split(&SplitConfig { train_fraction: f, seed }).unwrap();
        prop_assert_eq!(tr.len() + te.len(), ds.len());
        let key = |p: &DataPoint| format!("{}|{}|{}", p.curve_id, p.lambda1, p.p11);
        let mut all: Vec<String> = tr.points.iter().chain(&te.points).map(key).collect();
        let mut orig: Vec<String> = ds.points.iter().map(key).collect();
        all.sort();
        orig.sort();
        prop_assert_eq!(all, orig);
    }

    #[test]
    fn noise_leaves_reference_points_alone(seed in any::<u64>(), a in 0.0f64..0.2) {
        let ds = treloar().add_reference_point();
        let noisy = ds.add_noise(&NoiseConfig { amplitude: a, seed }).unwrap();
        for (p, q) in ds.points.iter().zip(&noisy.points) {
            prop_assert_eq!(p.lambda1, q.lambda1);
            if p.is_reference() {
                prop_assert_eq!(p.p11, q.p11);
            }
        }
    }

    #[test]
    fn nrmse_ignores_point_order(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let ds = treloar();
        let mut shuffled = ds.clone();
        shuffled.points.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let p = ModelFile::builtin("eq11").unwrap().predictor().unwrap();
        let e0 = Evaluator::new(&ds).unwrap().nrmse(&p, p.tree().constants());
        let e1 = Evaluator::new(&shuffled).unwrap().nrmse(&p, p.tree().constants());
        prop_assert!((e0 - e1).abs() <= 1e-12 * e0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reward_is_bounded(a in ast(2, false)) {
        let cfg = RewardConfig { max_iter: 60, restarts: 0, ..RewardConfig::default() };
        let r = trainer::reward(&a.tree(), &treloar(), Formulation::Invariant, &cfg);
        prop_assert!((0.0..=1.0).contains(&r), "reward {}", r);
    }
}

#[test]
fn sampled_traversals_respect_the_prior() {
    for lib in [Library::invariant(), Library::stretch()] {
        let c = Controller::new(lib.clone(), PolicyConfig::default(), 3).unwrap();
        let batch = c.sample_batch(10_000, &mut ChaCha8Rng::seed_from_u64(4));
        for t in &batch.traversals {
            assert!(validate_traversal(t, &lib), "{t:?}");
            for i in 0..t.len() {
                let mask = prior_mask(&t[..i], &lib).unwrap();
                assert!(mask[lib.index_of(t[i]).unwrap()], "masked token sampled in {t:?}");
            }
        }
    }
}
