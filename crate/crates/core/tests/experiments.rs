use torus_ppc::experiments::{estimate_moments, theorem_preset, variance_decay_scan, ExperimentConfig};
use torus_ppc::paircorr::pair_count_naive;
use torus_ppc::{GeneratorKind, PairCorrParams, SeedSpec};

fn config(generator: GeneratorKind, s: f64, n_values: Vec<usize>, replicates: u64) -> ExperimentConfig {
    ExperimentConfig {
        generator,
        s_values: vec![s],
        alpha_values: vec![1.0],
        n_values,
        replicates,
        first_replicate: 0,
        master_seed: 5,
    }
}

#[test]
fn batch_jittered_mean_near_two_s() {
    let res = estimate_moments(&config(GeneratorKind::BatchJittered { m: 8 }, 1.0, vec![1 << 14], 100)).unwrap();
    let r = &res.records[0];
    assert!((1.95..=2.05).contains(&r.mean_r), "{}", r.mean_r);
}

#[test]
fn walk_presets_within_three_stderr_of_two_s() {
    let preset = theorem_preset("thm3_walk_ppc").unwrap();
    let res = preset.run().unwrap();
    assert_eq!(res.records.len(), 3);
    for r in &res.records {
        let dev = (r.mean_r - 2.0 * r.s).abs();
        assert!(dev <= 3.0 * r.stderr, "{}: |{} - 2| = {dev} vs stderr {}", r.generator, r.mean_r, r.stderr);
    }
}

#[test]
fn sequential_separates_from_ppc() {
    let res = theorem_preset("thm2i_seq_not_ppc").unwrap().run().unwrap();
    let r = &res.records[0];
    assert!((r.mean_r - 0.25).abs() <= 3.0 * r.stderr, "{} +- {}", r.mean_r, r.stderr);
    assert!((r.mean_r - 1.0).abs() >= 10.0 * r.stderr);
}

#[test]
fn full_jittered_expectation_is_exact() {
    // For a full jittered sample with radius k/N (k a positive integer) each
    // point sees 2k - 1 neighbours on average, so E R = 2s - N^(alpha - 1).
    let cfg = ExperimentConfig {
        generator: GeneratorKind::SequentialJittered,
        s_values: vec![0.5, 1.0],
        alpha_values: vec![0.5, 0.75],
        n_values: vec![1 << 12],
        replicates: 40,
        first_replicate: 0,
        master_seed: 8,
    };
    for r in estimate_moments(&cfg).unwrap().records {
        let exact = 2.0 * r.s - (r.n as f64).powf(r.alpha - 1.0);
        assert!((r.mean_r - exact).abs() <= 4.0 * r.stderr + 1e-12, "{r:?} vs {exact}");
    }
}

#[test]
fn iid_variance_matches_brute_force_at_small_n() {
    let cfg = config(GeneratorKind::IidUniform, 1.0, vec![1 << 10], 50);
    let rec = &estimate_moments(&cfg).unwrap().records[0];
    let p = PairCorrParams::new(1.0, 1.0).unwrap();
    let vals: Vec<f64> = (0..50)
        .map(|i| {
            let ps = GeneratorKind::IidUniform.generate(1 << 10, SeedSpec::new(5, i)).unwrap();
            pair_count_naive(&ps, p.radius(1 << 10)).unwrap() as f64 / p.normalizer(1 << 10)
        })
        .collect();
    let mean = vals.iter().sum::<f64>() / 50.0;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 49.0;
    assert!((rec.var_r - var).abs() <= 1e-12);
}

#[test]
fn variance_decays_like_one_over_n() {
    let cfg = config(GeneratorKind::BatchJittered { m: 4 }, 1.0, (10..=14).map(|k| 1usize << k).collect(), 200);
    let scan = variance_decay_scan(&cfg).unwrap();
    assert_eq!(scan.len(), 1);
    assert_eq!(scan[0].points.len(), 5);
    assert!((-1.4..=-0.6).contains(&scan[0].slope), "{}", scan[0].slope);
}
