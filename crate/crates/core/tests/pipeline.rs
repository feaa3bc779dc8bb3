//! In-process pipeline: generated data through training, extraction, and
//! the leave-one-class-out benchmark, including disk round trips.

use pcnd_core::autoencoder::{extract_latents, train_autoencoder, ArchSpec, TrainConfig};
use pcnd_core::eval::{evaluate_class, run_benchmark};
use pcnd_core::fractal::{generate_fractal_dataset, FractalConfig};
use pcnd_core::io::LatentBank;
use pcnd_core::one_class::ClassifierKind;

fn tiny_arch() -> ArchSpec {
    ArchSpec {
        latent_dim: 16,
        knn_k: 6,
        point_mlp: [12, 12, 12],
        graph1_dim: 16,
        graph2_dim: 32,
        head_hidden: 32,
        grid_side: 6,
        fold_hidden: [24, 24],
    }
}

fn build_bank() -> LatentBank {
    let config = FractalConfig {
        points_per_cloud: 64,
        chaos_iterations: 4000,
        ..FractalConfig::default()
    };
    let dataset = generate_fractal_dataset(4, 12, &config, 9001).unwrap();

    let clouds: Vec<_> = dataset.iter().flatten().cloned().collect();
    let train_cfg = TrainConfig {
        epochs: 3,
        batch_size: 8,
        seed: 7,
        ..TrainConfig::default()
    };
    let params = train_autoencoder(&clouds, &tiny_arch(), &train_cfg).unwrap();
    assert_eq!(params.meta.epochs_trained, 3);
    assert!(params.meta.final_loss.is_finite());

    let items: Vec<(String, String, _)> = dataset
        .iter()
        .enumerate()
        .flat_map(|(c, samples)| {
            samples.iter().enumerate().map(move |(i, cloud)| {
                (format!("c{c}_{i:02}"), format!("class{c}"), cloud.clone())
            })
        })
        .collect();
    extract_latents(&params, &items).unwrap()
}

#[test]
fn pipeline_benchmark_agrees_with_per_class_evaluation() {
    let bank = build_bank();
    assert_eq!(bank.len(), 48);
    assert_eq!(bank.dim(), 16);

    let kinds = [ClassifierKind::OcSvm, ClassifierKind::KpcaNd];
    let report = run_benchmark(&bank, &kinds, 31, None).unwrap();
    assert_eq!(report.rows.len(), 4);
    for row in &report.rows {
        for &auc in &row.aucs {
            assert!((0.0..=1.0).contains(&auc), "AUC out of range: {auc}");
        }
    }

    // The benchmark row for a class is exactly the standalone evaluation of
    // that class under the same seed.
    let eval = evaluate_class(&bank, &kinds, "class2", 31).unwrap();
    let row = report
        .rows
        .iter()
        .find(|r| r.anomaly_class == "class2")
        .unwrap();
    assert_eq!(row.aucs, eval.test_aucs);

    // Same seed, same report; different seed reshuffles the splits.
    let again = run_benchmark(&bank, &kinds, 31, None).unwrap();
    assert_eq!(report.to_text(), again.to_text());
    assert_eq!(report.to_delimited(), again.to_delimited());
}

#[test]
fn pipeline_survives_a_disk_round_trip() {
    let bank = build_bank();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bank.ltb");
    bank.save(&path).unwrap();
    let loaded = LatentBank::load(&path).unwrap();

    assert_eq!(loaded.len(), bank.len());
    assert_eq!(loaded.fingerprint(), bank.fingerprint());
    for i in 0..bank.len() {
        assert_eq!(loaded.row_f32(i), bank.row_f32(i));
    }

    let kinds = [ClassifierKind::OcSvm];
    let a = run_benchmark(&bank, &kinds, 5, None).unwrap();
    let b = run_benchmark(&loaded, &kinds, 5, None).unwrap();
    assert_eq!(a.to_text(), b.to_text());
}