//! Regenerates `data/models/*.json` from infix definitions of the
//! published energies. Usage: `cargo run --example builtin_models -- data/models`

use hyperdisc_core::expr::parse_infix;
use hyperdisc_core::mechanics::Formulation;
use hyperdisc_core::ModelFile;

const MODELS: [(&str, Formulation, &str); 7] = [
    (
        "eq11",
        Formulation::Invariant,
        "((((0.13 * x0) + (2.4011865971618606e-3 * x1)) + (1.9961020686934149e-3 * exp(sqrt(x0)))) \
         + (2.7563861123868053e-2 * ((log(x0))^2 + (log(x1))^2)))",
    ),
    (
        "eq13",
        Formulation::Invariant,
        "((log(x0) + 28.42108203022402) / (((-0.02770411058718299 * x0) + 1.1306629047538411) \
         - ((19.6374554685484 / x0) * exp(((7.574960169390804 * exp(((0.02064522578092095 * sqrt(x0)) \
         - (1 / sqrt(x1))))) - 16.150767419420287)))))",
    ),
    (
        "eq14",
        Formulation::Invariant,
        "((((0.088520957704187183 * x0) + (0.10721797273102984 * sqrt(x1))) \
         + (0.10721797273102984 * exp((0.60023782905113407 * sqrt(((0.74689298464165324 * x1) - 1)))))) \
         + exp((0.06724733103245549 * exp(exp((0.01729721736231109 * x0))))))",
    ),
    (
        "omega_eq15",
        Formulation::Stretch,
        "(1.44 * (((0.4 * ((2.96 ^ x0) / x0)) + (((0.62 * sqrt(((0.61 * x0) + sqrt(exp(((2.0 ^ x0) / x0)))))) \
         - 1) ^ 0.65)) ^ 0.4))",
    ),
    (
        "kawabata1_eq16",
        Formulation::Invariant,
        "(0.43417905491527578 * sqrt(((0.38280727876875269 * ((x0 * ((((0.30468766496136507 * x0) \
         - ((8.581704823563822e-4 * x1) * log(x1))) - (0.30468766496136507 * log(x0))) + 4.7327460737281793)) \
         + x1)) + 1)))",
    ),
    (
        "kawabata2_eq17",
        Formulation::Invariant,
        "(((0.16702143336426614 * x0) - 0.027744317551027826) + ((0.0958024930831093 \
         * (3.6946795686172456 - (2.211859814364515 * sqrt((((0.085072165716625369 * x0) \
         - (0.2044018411354622 * sqrt(x1))) + 1))))) * log(((((4.7443898424407 * x0) + x1) \
         + log(sqrt(x1))) + (5.2132171735409315 / x0)))))",
    ),
    (
        "kawabata3_eq18",
        Formulation::Invariant,
        "((((((0.12223415594624147 * x0) + (0.12223415594624147 * sqrt(x1))) \
         - (0.025169754009035435 * log(x1))) - (0.025169754009035435 * log(((log(x1))^2)^2))) \
         - 0.12995614747379221) - (((0.025169754009035435 * ((-3.4926060582710092 * x0) \
         - (5.8774593591164961 * x1))) * log(x1)) / x1))",
    ),
];

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "data/models".into());
    for (name, formulation, infix) in MODELS {
        let tree = parse_infix(infix).unwrap_or_else(|e| panic!("{name}: {e}"));
        let model = ModelFile::from_tree(Some(name.into()), formulation, &tree);
        model.predictor().unwrap_or_else(|e| panic!("{name}: {e}"));
        let path = format!("{dir}/{name}.json");
        model.save(&path).unwrap();
        println!("{path}: {} tokens, {} constants", tree.len(), tree.n_constants());
    }
}
