// Temporary calibration probe; prints fixture-GAN convergence diagnostics.
use evobot_core::dataset::{
    expansion_counts, make_fixture, FeatureSchema, FixtureSpec, Standardizer,
};
use evobot_core::forest::{fit, ForestConfig};
use evobot_core::gan::{build, GanConfig, GanVariant};
use evobot_core::metrics::ks_score;

#[allow(clippy::too_many_arguments)]
fn probe(
    lr: f64,
    beta1: f64,
    batch: usize,
    g_hidden: Vec<usize>,
    d_hidden: Vec<usize>,
    noise: usize,
    seed: u64,
    verbose: bool,
) -> f64 {
    let schema = FeatureSchema::new(vec![("feat".into(), 20)]);
    let raw = make_fixture::<f64>(&FixtureSpec::two_class_separable(), 500, &schema, 42).unwrap();
    let std = Standardizer::fit(&raw).unwrap();
    let data = std.transform(&raw).unwrap();

    let mut config = GanConfig::new(GanVariant::Acgan, 2);
    config.noise_dim = noise;
    config.embed_dim = 4;
    config.batch_size = batch;
    config.g_hidden = g_hidden.clone();
    config.d_hidden = d_hidden.clone();
    config.lr = lr;
    config.beta1 = beta1;
    config.epochs = 50;
    config.seed = seed;

    let mut model = build::<f64>(config.clone(), data.schema(), data.classes()).unwrap();
    model.train(&data).unwrap();

    let counts = expansion_counts(&data, 2, 1);
    let synth_std = model.generate(&counts, 7).unwrap();
    let synth_raw = std.inverse_transform(&synth_std).unwrap();

    let mut worst_mean_err = 0.0f64;
    for (class, want) in [(0usize, -3.0f64), (1, 3.0)] {
        let sub = synth_raw.filter_class(class);
        for col in 0..20 {
            let vals = sub.column(col);
            let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
            worst_mean_err = worst_mean_err.max((mean - want).abs());
        }
    }
    if verbose {
        let forest =
            fit(&raw, &ForestConfig { n_trees: 50, seed: 3, ..Default::default() }).unwrap();
        let preds = forest.predict_dataset(&synth_raw).unwrap();
        let acc = preds
            .iter()
            .zip(synth_raw.labels())
            .filter(|(p, t)| **p == *t)
            .count() as f64
            / synth_raw.len() as f64;
        let ks = ks_score(&data, &synth_std).unwrap();
        println!("      -> rf_acc={acc:.3} ks={ks:.3}");
    }
    worst_mean_err
}

#[test]
fn probe_convergence() {
    type Grid = (f64, f64, usize, Vec<usize>, Vec<usize>, usize);
    let grids: Vec<Grid> = vec![
        (0.001, 0.9, 64, vec![32, 32], vec![32, 32], 16),
        (0.0015, 0.9, 64, vec![32, 32], vec![32, 32], 16),
        (0.001, 0.9, 64, vec![32, 32], vec![16, 16], 16),
        (0.001, 0.5, 64, vec![32, 32], vec![16, 16], 16),
        (0.001, 0.9, 64, vec![], vec![32, 32], 16),
        (0.002, 0.9, 64, vec![], vec![32, 32], 16),
        (0.001, 0.5, 64, vec![], vec![32, 32], 16),
        (0.002, 0.5, 64, vec![], vec![32, 32], 16),
    ];
    for (lr, beta1, batch, g_hidden, d_hidden, noise) in grids {
        let errs: Vec<f64> = (0..5)
            .map(|seed| {
                probe(
                    lr,
                    beta1,
                    batch,
                    g_hidden.clone(),
                    d_hidden.clone(),
                    noise,
                    seed,
                    false,
                )
            })
            .collect();
        let max = errs.iter().cloned().fold(0.0f64, f64::max);
        let pretty: Vec<String> = errs.iter().map(|e| format!("{e:.3}")).collect();
        println!(
            "lr={lr} b1={beta1} batch={batch} g={g_hidden:?} d={d_hidden:?} noise={noise}: errs={pretty:?} max={max:.3}"
        );
    }
}
