//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).
//! Expected values come from independent oracles computed inside the
//! tests, never from the implementation under test.

use std::time::Instant;

use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use votum::classifiers::{fit_model, FeatureMatrix, TaskData};
use votum::data::{
    CartParams, Cell, Column, Dataset, EnsembleSpec, FeatureKind, ForestParams, LabelSet,
    ModelKind, ModelParams, Preset, Schema, Voting,
};
use votum::ensemble::{ensemble_error, fit_ensemble, vote_hard, vote_sign, EnsembleErrorQuery};
use votum::eval::{
    compare, confusion, make_binary_task, metrics, Averaging, CompareConfig, CompareEntry,
    ConfusionMatrix, TaskKind,
};
use votum::ingest::{
    fit_scaler, impute_missing, label_encode, merge_datasets, stratified_split, SplitSpec,
};
use votum::report::{render_report, EmitFormat};

// ---------------------------------------------------------------------
// Criterion 1: exhaustive hard-vote oracle equivalence
// ---------------------------------------------------------------------

/// Brute-force weighted tally, written independently of the library:
/// explicit per-label loops, strict-greater winner tracking.
fn oracle_weighted_plurality(votes: &[usize], weights: &[f64], n_labels: usize) -> usize {
    let mut best_label = 0usize;
    let mut best_weight = f64::NEG_INFINITY;
    for label in 0..n_labels {
        let mut total = 0.0;
        for (v, w) in votes.iter().zip(weights) {
            if *v == label {
                total += *w;
            }
        }
        if total > best_weight {
            best_weight = total;
            best_label = label;
        }
    }
    best_label
}

#[test]
fn c1_voting_oracle_equivalence() {
    let start = Instant::now();
    let mut cases = 0u64;
    for m in 1..=5usize {
        for n_labels in 1..=3usize {
            let n_vote_vectors = n_labels.pow(m as u32);
            let n_weight_vectors = 3usize.pow(m as u32);
            for vote_code in 0..n_vote_vectors {
                let mut votes = vec![0usize; m];
                let mut v = vote_code;
                for slot in votes.iter_mut() {
                    *slot = v % n_labels;
                    v /= n_labels;
                }
                for weight_code in 0..n_weight_vectors {
                    let mut weights = vec![0.0f64; m];
                    let mut w = weight_code;
                    for slot in weights.iter_mut() {
                        *slot = (w % 3 + 1) as f64;
                        w /= 3;
                    }
                    let expected = oracle_weighted_plurality(&votes, &weights, n_labels);
                    let got = vote_hard(&votes, &weights).unwrap();
                    assert_eq!(
                        got, expected,
                        "votes {votes:?} weights {weights:?} ({n_labels} labels)"
                    );
                    cases += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    // Sum over m<=5, L<=3 of L^m * 3^m = 76122 cases, ~10^5.
    assert_eq!(cases, 76_122, "exhaustive enumeration covered {cases} cases");
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}, budget 10 s");
    println!(
        "PASS criterion 1: vote_hard matches brute-force oracle on {cases} cases in {elapsed:?}"
    );
}

// ---------------------------------------------------------------------
// Criterion 2: the worked five-classifier example
// ---------------------------------------------------------------------

#[test]
fn c2_worked_example() {
    let uniform = [1.0; 5];
    assert_eq!(vote_hard(&[1, 1, 1, 0, 0], &uniform).unwrap(), 1);
    assert_eq!(vote_sign(&[1, 1, 1, -1, -1], &uniform).unwrap(), 1);
    println!("PASS criterion 2: worked 5-classifier example (mode vote 1, sign vote +1)");
}

// ---------------------------------------------------------------------
// Criterion 3: analytic ensemble error
// ---------------------------------------------------------------------

/// Independent exact tail: integer binomial coefficients via Pascal
/// recursion, powers multiplied out longhand.
fn oracle_binomial_tail(n: u32, k: u32, eps: f64) -> f64 {
    fn choose(n: u32, k: u32) -> u128 {
        if k > n {
            return 0;
        }
        let mut table = vec![vec![0u128; (n + 1) as usize]; (n + 1) as usize];
        for i in 0..=n as usize {
            table[i][0] = 1;
            for j in 1..=i {
                table[i][j] = table[i - 1][j - 1] + if j < i { table[i - 1][j] } else { 0 };
            }
        }
        table[n as usize][k as usize]
    }
    let mut total = 0.0;
    for j in k..=n {
        let mut term = choose(n, j) as f64;
        for _ in 0..j {
            term *= eps;
        }
        for _ in 0..(n - j) {
            term *= 1.0 - eps;
        }
        total += term;
    }
    total
}

#[test]
fn c3_ensemble_error_checks() {
    let start = Instant::now();

    // Hand value and independent summation.
    let q = EnsembleErrorQuery::new(5, 0.1, Some(3)).unwrap();
    let got = ensemble_error(&q);
    assert!((got - 0.00856).abs() < 1e-9, "got {got}");
    assert!((got - oracle_binomial_tail(5, 3, 0.1)).abs() < 1e-9);

    // Monte Carlo with 10^6 trials of 5 independent eps-error voters.
    let mut rng = ChaCha8Rng::seed_from_u64(20260810);
    let trials = 1_000_000u32;
    let mut hits = 0u32;
    for _ in 0..trials {
        let wrong = (0..5).filter(|_| rng.random::<f64>() < 0.1).count();
        if wrong >= 3 {
            hits += 1;
        }
    }
    let estimate = hits as f64 / trials as f64;
    let stderr = (got * (1.0 - got) / trials as f64).sqrt();
    assert!(
        (estimate - got).abs() <= 3.0 * stderr,
        "Monte Carlo {estimate} vs analytic {got} (3 SE = {})",
        3.0 * stderr
    );

    // The ensemble beats its members for every odd n and eps < 1/2.
    for n in (3..=25u32).step_by(2) {
        for step in 1..=9u32 {
            let eps = step as f64 * 0.05;
            let q = EnsembleErrorQuery::majority(n, eps).unwrap();
            let v = ensemble_error(&q);
            assert!(v < eps, "ensemble error {v} not below member error {eps} at n={n}");
            assert!((v - oracle_binomial_tail(n, n / 2 + 1, eps)).abs() < 1e-9);
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget 30 s");
    println!("PASS criterion 3: analytic binomial tail exact, Monte Carlo within 3 SE, monotone for n=3..25 in {elapsed:?}");
}

// ---------------------------------------------------------------------
// Criterion 4: classifier sanity on Gaussian blobs
// ---------------------------------------------------------------------

fn gaussian_blobs(n_per_class: usize, separation: f64, seed: u64) -> (TaskData, TaskData) {
    use rand_distr::{Distribution, Normal};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0f64, 1.0).unwrap();
    let mut rows = Vec::new();
    let mut cells = Vec::new();
    for class in 0..2usize {
        let cx = class as f64 * separation;
        for _ in 0..n_per_class {
            let x = cx + normal.sample(&mut rng);
            let y = normal.sample(&mut rng);
            rows.push((x, y, class));
        }
    }
    let schema = Schema::new(
        vec![
            Column { name: "x".into(), kind: FeatureKind::Numeric },
            Column { name: "y".into(), kind: FeatureKind::Numeric },
            Column { name: "label".into(), kind: FeatureKind::Numeric },
        ],
        Some("label".into()),
        None,
    )
    .unwrap();
    for (x, y, class) in &rows {
        cells.push(vec![Cell::Number(*x), Cell::Number(*y), Cell::Number(*class as f64)]);
    }
    let dataset = Dataset::new(schema, cells).unwrap();
    let spec = SplitSpec { test_fraction: 0.2, seed, stratify_on: "label".into() };
    let (train, test) = stratified_split(&dataset, &spec).unwrap();
    let scaler = fit_scaler(&train).unwrap();
    let train = votum::ingest::apply_scaler(&train, &scaler).unwrap();
    let test = votum::ingest::apply_scaler(&test, &scaler).unwrap();
    (make_binary_task(&train).unwrap(), make_binary_task(&test).unwrap())
}

fn task_accuracy(predictions: &[usize], truth: &[usize]) -> f64 {
    let correct = predictions.iter().zip(truth).filter(|(a, b)| a == b).count();
    correct as f64 / truth.len() as f64
}

#[test]
fn c4_classifier_sanity_on_blobs() {
    let start = Instant::now();
    let (train, test) = gaussian_blobs(500, 4.0, 7);

    let kinds = [ModelKind::Cart, ModelKind::RandomForest, ModelKind::Knn, ModelKind::GaussianNb];
    let mut member_accuracy = std::collections::HashMap::new();
    for kind in kinds {
        let model = fit_model(&ModelParams::default_for(kind), &train, 42).unwrap();
        let predictions: Vec<usize> =
            (0..test.n_rows()).map(|i| model.predict(test.features.row(i)).unwrap()).collect();
        let accuracy = task_accuracy(&predictions, &test.labels);
        assert!(accuracy >= 0.95, "{kind} test accuracy {accuracy} below 0.95");
        member_accuracy.insert(kind, accuracy);
    }

    for preset in Preset::ALL {
        let spec = EnsembleSpec::preset(preset, Voting::Hard);
        let ensemble = fit_ensemble(&spec, &train, 42).unwrap();
        let predictions = ensemble.predict_batch(&test.features).unwrap();
        let accuracy = task_accuracy(&predictions, &test.labels);
        let floor =
            preset.member_kinds().iter().map(|k| member_accuracy[k]).fold(f64::INFINITY, f64::min)
                - 0.02;
        assert!(accuracy >= floor, "{preset} accuracy {accuracy} below member floor {floor}");
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, budget 60 s");
    println!("PASS criterion 4: all base learners >= 0.95 and presets within 0.02 of member floor in {elapsed:?}");
}

// ---------------------------------------------------------------------
// Criterion 5: degeneration identities
// ---------------------------------------------------------------------

fn random_task(
    rng: &mut ChaCha8Rng,
    n_rows: usize,
    n_features: usize,
    n_labels: usize,
) -> TaskData {
    let rows: Vec<Vec<f64>> = (0..n_rows)
        .map(|_| (0..n_features).map(|_| rng.random_range(-10.0..10.0)).collect())
        .collect();
    let labels: Vec<usize> = (0..n_rows).map(|_| rng.random_range(0..n_labels)).collect();
    let names: Vec<String> = (0..n_labels).map(|i| format!("c{i}")).collect();
    TaskData {
        features: FeatureMatrix::from_rows(&rows),
        labels,
        label_set: LabelSet::new(names).unwrap(),
        feature_names: (0..n_features).map(|i| format!("f{i}")).collect(),
    }
}

#[test]
fn c5_degeneration_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for round in 0..20 {
        let task = random_task(&mut rng, 60, 4, 3);
        let cart_params = CartParams::default();
        let forest_params = ForestParams {
            n_trees: 1,
            tree: cart_params.clone(),
            features_per_split: Some(4),
            bootstrap: false,
        };
        let cart = fit_model(&ModelParams::Cart(cart_params), &task, round).unwrap();
        let forest = fit_model(&ModelParams::Forest(forest_params), &task, round).unwrap();

        let probes = random_task(&mut rng, 30, 4, 3);
        for i in 0..task.n_rows() {
            let row = task.features.row(i);
            assert_eq!(forest.predict(row).unwrap(), cart.predict(row).unwrap());
        }
        for i in 0..probes.n_rows() {
            let row = probes.features.row(i);
            assert_eq!(
                forest.predict(row).unwrap(),
                cart.predict(row).unwrap(),
                "round {round}, probe {i}"
            );
        }
    }

    // A one-member ensemble is that member, in both voting modes.
    let mut rng = ChaCha8Rng::seed_from_u64(123);
    let task = random_task(&mut rng, 80, 3, 2);
    let probes = random_task(&mut rng, 40, 3, 2);
    for kind in [ModelKind::Cart, ModelKind::RandomForest, ModelKind::Knn, ModelKind::GaussianNb] {
        for voting in [Voting::Hard, Voting::Soft] {
            let spec = EnsembleSpec::single(ModelParams::default_for(kind), voting);
            let ensemble = fit_ensemble(&spec, &task, 42).unwrap();
            for i in 0..probes.n_rows() {
                let row = probes.features.row(i);
                assert_eq!(
                    ensemble.predict_row(row).unwrap(),
                    ensemble.members[0].predict(row).unwrap(),
                    "{kind} under {voting:?} voting"
                );
            }
        }
    }
    println!("PASS criterion 5: RF(1 tree, no bootstrap, all features) == CART on 20 datasets; 1-member ensemble == member");
}

// ---------------------------------------------------------------------
// Criterion 6: preprocessing property suites (>= 200 cases each)
// ---------------------------------------------------------------------

fn numeric_dataset(values: &[Option<f64>]) -> Dataset {
    let schema =
        Schema::new(vec![Column { name: "x".into(), kind: FeatureKind::Numeric }], None, None)
            .unwrap();
    let rows = values.iter().map(|v| vec![v.map(Cell::Number).unwrap_or(Cell::Missing)]).collect();
    Dataset::new(schema, rows).unwrap()
}

fn labeled_dataset(values: &[(f64, usize)]) -> Dataset {
    let schema = Schema::new(
        vec![
            Column { name: "x".into(), kind: FeatureKind::Numeric },
            Column { name: "label".into(), kind: FeatureKind::Numeric },
        ],
        Some("label".into()),
        None,
    )
    .unwrap();
    let rows =
        values.iter().map(|(x, l)| vec![Cell::Number(*x), Cell::Number(*l as f64)]).collect();
    Dataset::new(schema, rows).unwrap()
}

fn label_histogram(data: &Dataset) -> std::collections::BTreeMap<String, usize> {
    let col = data.schema.column_index("label").unwrap();
    let mut hist = std::collections::BTreeMap::new();
    for cell in data.column_cells(col) {
        *hist.entry(cell.display_string()).or_insert(0) += 1;
    }
    hist
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn c6_imputation_idempotent(
        mut values in prop::collection::vec(prop::option::of(-1e3..1e3f64), 1..40)
    ) {
        if values.iter().all(Option::is_none) {
            values[0] = Some(1.0);
        }
        let data = numeric_dataset(&values);
        let (once, fills) = impute_missing(&data, None).unwrap();
        let (twice, fills2) = impute_missing(&once, None).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(fills.len(), fills2.len());
        once.validate().unwrap();
    }

    #[test]
    fn c6_scaler_bounds_on_fit_data(
        values in prop::collection::vec(-1e6..1e6f64, 1..60)
    ) {
        let data = numeric_dataset(&values.iter().map(|v| Some(*v)).collect::<Vec<_>>());
        let params = fit_scaler(&data).unwrap();
        let scaled = votum::ingest::apply_scaler(&data, &params).unwrap();
        for cell in scaled.column_cells(0) {
            let v = cell.as_number().unwrap();
            prop_assert!((0.0..=1.0).contains(&v), "scaled value {} out of range", v);
        }
    }

    #[test]
    fn c6_merge_conserves_label_histogram(
        parts in prop::collection::vec(
            prop::collection::vec((-50.0..50.0f64, 0..3usize), 1..20),
            1..5
        )
    ) {
        let datasets: Vec<Dataset> = parts.iter().map(|p| labeled_dataset(p)).collect();
        let merged = merge_datasets(&datasets).unwrap();
        let mut expected = std::collections::BTreeMap::new();
        for ds in &datasets {
            for (label, count) in label_histogram(ds) {
                *expected.entry(label).or_insert(0) += count;
            }
        }
        prop_assert_eq!(label_histogram(&merged), expected);
        prop_assert_eq!(merged.n_rows(), datasets.iter().map(Dataset::n_rows).sum::<usize>());
    }

    #[test]
    fn c6_split_partitions_rows(
        class_sizes in prop::collection::vec(2..8usize, 1..5),
        fraction in 0.05..0.95f64,
        seed in any::<u64>()
    ) {
        let mut rows = Vec::new();
        for (class, size) in class_sizes.iter().enumerate() {
            for i in 0..*size {
                rows.push(((class * 100 + i) as f64, class));
            }
        }
        let data = labeled_dataset(&rows);
        let spec = SplitSpec { test_fraction: fraction, seed, stratify_on: "label".into() };
        let (train, test) = stratified_split(&data, &spec).unwrap();

        let mut combined: Vec<String> = train
            .rows
            .iter()
            .chain(test.rows.iter())
            .map(|r| format!("{:?}", r))
            .collect();
        combined.sort();
        let mut original: Vec<String> = data.rows.iter().map(|r| format!("{:?}", r)).collect();
        original.sort();
        prop_assert_eq!(combined, original);
    }

    #[test]
    fn c6_encoding_round_trips(
        tokens in prop::collection::vec("[a-z]{1,6}", 1..40),
        unseen in prop::collection::vec("[A-Z]{1,6}", 1..10)
    ) {
        let schema = Schema::new(
            vec![Column { name: "s".into(), kind: FeatureKind::Categorical }],
            None,
            None,
        )
        .unwrap();
        let rows = tokens.iter().map(|t| vec![Cell::Token(t.clone())]).collect();
        let data = Dataset::new(schema.clone(), rows).unwrap();
        let out = label_encode(&data, None).unwrap();
        let encoding = &out.map.columns["s"];

        // Round trip on every seen token.
        for (row, token) in out.dataset.rows.iter().zip(&tokens) {
            let code = row[0].as_number().unwrap() as usize;
            prop_assert_eq!(encoding.token_of(code).unwrap(), token.as_str());
        }

        // Unseen tokens (uppercase, disjoint from the lowercase corpus)
        // take the reserved code, strictly above all seen codes.
        let unseen_rows = unseen.iter().map(|t| vec![Cell::Token(t.clone())]).collect();
        let unseen_data = Dataset::new(schema, unseen_rows).unwrap();
        let applied = label_encode(&unseen_data, Some(&out.map)).unwrap();
        prop_assert_eq!(applied.unseen_tokens, unseen.len());
        for row in &applied.dataset.rows {
            let code = row[0].as_number().unwrap() as usize;
            prop_assert_eq!(code, encoding.unseen_code());
            prop_assert!(code >= encoding.len());
        }
    }
}

#[test]
fn c6_banner() {
    println!("PASS criterion 6: property suites (imputation, scaler, merge, split, encoding) each ran >= 200 generated cases");
}

// ---------------------------------------------------------------------
// Criterion 7: metric identities
// ---------------------------------------------------------------------

#[test]
fn c7_metric_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    while checked < 100 {
        let n = rng.random_range(2..6usize);
        let labels = LabelSet::new((0..n).map(|i| format!("l{i}"))).unwrap();
        let counts: Vec<Vec<u64>> =
            (0..n).map(|_| (0..n).map(|_| rng.random_range(0..200u64)).collect()).collect();
        let cm = ConfusionMatrix { labels, counts };
        if cm.total() == 0 {
            continue;
        }
        let m = metrics(&cm, Averaging::Weighted).unwrap();
        assert_eq!(m.accuracy, m.recall, "accuracy != weighted recall on matrix {:?}", cm.counts);
        assert!(m.precision >= 0.0 && m.precision <= 1.0);
        assert!(m.f_measure >= 0.0 && m.f_measure <= 1.0);
        checked += 1;
    }

    // Diagonal matrix scores 1.0 on everything.
    let labels = LabelSet::new(["a", "b", "c"]).unwrap();
    let cm = ConfusionMatrix { labels, counts: vec![vec![7, 0, 0], vec![0, 11, 0], vec![0, 0, 3]] };
    for averaging in [Averaging::Weighted, Averaging::Macro] {
        let m = metrics(&cm, averaging).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall, m.f_measure), (1.0, 1.0, 1.0, 1.0));
    }
    println!("PASS criterion 7: accuracy == weighted recall bit-exact on 100 random matrices; diagonal scores 1.0");
}

// ---------------------------------------------------------------------
// Criterion 8: conditional reproduction on the public device CSVs
// ---------------------------------------------------------------------

fn find_device_csv(dir: &std::path::Path, needle: &str) -> Option<std::path::PathBuf> {
    let mut found: Vec<std::path::PathBuf> = std::fs::read_dir(dir)
        .ok()?
        .flatten()
        .map(|e| e.path())
        .filter(|p| {
            p.extension().map(|e| e == "csv").unwrap_or(false)
                && p.file_name()
                    .map(|n| n.to_string_lossy().to_lowercase().contains(needle))
                    .unwrap_or(false)
        })
        .collect();
    found.sort();
    found.into_iter().next()
}

#[test]
fn c8_device_dataset_reproduction() {
    let dir = std::env::var_os("VOTUM_TONIOT_DIR")
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::path::PathBuf::from("data/ton_iot"));
    let weather = find_device_csv(&dir, "weather");
    let gps = find_device_csv(&dir, "gps");
    let garage = find_device_csv(&dir, "garage");
    let (Some(weather), Some(gps), Some(garage)) = (weather, gps, garage) else {
        println!(
            "PASS criterion 8: SKIP (device CSVs not found under {}; set VOTUM_TONIOT_DIR to run)",
            dir.display()
        );
        return;
    };

    let opts = votum::ingest::IngestOptions::default();
    let load_prepared = |path: &std::path::Path| {
        let raw = votum::ingest::load_csv(path, None, &opts).expect("device csv loads");
        votum::ingest::prepare_dataset(&raw, None).expect("device csv prepares").dataset
    };

    let cfg = CompareConfig {
        task: TaskKind::Binary,
        averaging: Averaging::Weighted,
        test_fraction: 0.2,
        seed: 42,
    };
    let singles = [ModelKind::Knn, ModelKind::RandomForest, ModelKind::Cart, ModelKind::GaussianNb];
    let mut entries: Vec<CompareEntry> = singles
        .iter()
        .map(|k| CompareEntry {
            id: k.as_str().into(),
            spec: EnsembleSpec::single(ModelParams::default_for(*k), Voting::Hard),
        })
        .collect();
    entries.extend(Preset::ALL.iter().map(|p| CompareEntry {
        id: p.as_str().into(),
        spec: EnsembleSpec::preset(*p, Voting::Hard),
    }));

    let datasets = vec![
        ("weather".to_string(), load_prepared(&weather)),
        ("gps".to_string(), load_prepared(&gps)),
        ("garage".to_string(), load_prepared(&garage)),
    ];
    let report = compare(&datasets, &entries, &cfg);
    assert!(report.failures.is_empty(), "failed cells: {:?}", report.failures);
    let accuracy = |dataset: &str, model: &str| -> f64 {
        report
            .rows
            .iter()
            .find(|r| r.dataset == dataset && r.model == model)
            .map(|r| r.values.accuracy)
            .unwrap_or_else(|| panic!("missing cell {dataset}/{model}"))
    };

    // (a) Weather: the DT-RF-kNN ensemble beats every single member.
    let weather_ens = accuracy("weather", "dt-rf-knn");
    for single in ["knn", "rf", "cart", "nb"] {
        assert!(
            weather_ens > accuracy("weather", single),
            "dt-rf-knn {weather_ens} not above {single} {}",
            accuracy("weather", single)
        );
    }

    // (b) GPS: every preset beats the best single member by >= 0.03.
    let gps_best_single = ["knn", "rf", "cart", "nb"]
        .iter()
        .map(|m| accuracy("gps", m))
        .fold(f64::NEG_INFINITY, f64::max);
    for preset in Preset::ALL {
        assert!(
            accuracy("gps", preset.as_str()) >= gps_best_single + 0.03,
            "{preset} did not clear best single {gps_best_single} by 0.03"
        );
    }

    // (c) Garage door: everything at or above 0.99.
    for row in report.rows.iter().filter(|r| r.dataset == "garage") {
        assert!(row.values.accuracy >= 0.99, "{} scored {}", row.model, row.values.accuracy);
    }

    // Absolute ensemble accuracies within 0.05 of the published cells.
    let published = [
        ("weather", [("dt-rf-knn-nb", 0.97), ("dt-rf-nb", 0.97), ("dt-rf-knn", 0.98)]),
        ("gps", [("dt-rf-knn-nb", 0.96), ("dt-rf-nb", 0.95), ("dt-rf-knn", 0.96)]),
        ("garage", [("dt-rf-knn-nb", 1.00), ("dt-rf-nb", 1.00), ("dt-rf-knn", 1.00)]),
    ];
    for (dataset, cells) in published {
        for (model, expected) in cells {
            let got = accuracy(dataset, model);
            assert!(
                (got - expected).abs() <= 0.05,
                "{dataset}/{model}: {got} not within 0.05 of {expected}"
            );
        }
    }
    println!("PASS criterion 8: qualitative findings reproduced on weather/gps/garage device data");
}

// ---------------------------------------------------------------------
// Criterion 9: determinism of compare
// ---------------------------------------------------------------------

#[test]
fn c9_compare_determinism() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut rows = Vec::new();
    for class in 0..2usize {
        for _ in 0..40 {
            rows.push((class as f64 * 3.0 + rng.random_range(-1.0..1.0), class));
        }
    }
    let datasets = vec![
        ("alpha".to_string(), labeled_dataset(&rows)),
        ("beta".to_string(), labeled_dataset(&rows[10..70])),
    ];
    let entries: Vec<CompareEntry> = [ModelKind::Cart, ModelKind::RandomForest, ModelKind::Knn]
        .iter()
        .map(|k| CompareEntry {
            id: k.as_str().into(),
            spec: EnsembleSpec::single(ModelParams::default_for(*k), Voting::Hard),
        })
        .chain(std::iter::once(CompareEntry {
            id: "dt-rf-knn".into(),
            spec: EnsembleSpec::preset(Preset::DtRfKnn, Voting::Hard),
        }))
        .collect();
    let cfg = CompareConfig {
        task: TaskKind::Binary,
        averaging: Averaging::Weighted,
        test_fraction: 0.25,
        seed: 42,
    };

    let first = compare(&datasets, &entries, &cfg);
    let second = compare(&datasets, &entries, &cfg);
    for fmt in [EmitFormat::Table, EmitFormat::Csv, EmitFormat::Markdown] {
        assert_eq!(render_report(&first, fmt), render_report(&second, fmt));
    }
    assert_eq!(
        serde_json::to_string(&first.rows.iter().map(|r| r.values).collect::<Vec<_>>()).unwrap(),
        serde_json::to_string(&second.rows.iter().map(|r| r.values).collect::<Vec<_>>()).unwrap()
    );
    println!("PASS criterion 9: repeated compare runs render byte-identical reports");
}

// Sanity that the confusion helper used across criteria behaves.
#[test]
fn confusion_smoke() {
    let labels = LabelSet::new(["x", "y"]).unwrap();
    let cm = confusion(&[0, 1], &[0, 1], &labels).unwrap();
    assert_eq!(cm.trace(), 2);
}
