//! Acceptance checks, one line per criterion. Runs without the libtest harness so
//! the PASS/FAIL lines always reach the terminal: `cargo test --test acceptance`.

mod common;

use std::path::Path;
use std::time::Instant;

use rand::Rng;

use landcover_svm::data_io::{
    gen_synthetic, load_model, read_raster, save_model, write_raster, ModelFile, Raster, SampleSet,
    SyntheticConfig,
};
use landcover_svm::ensemble::{
    default_members, train_ensemble, vote_simple, vote_weighted, TieBreak,
};
use landcover_svm::evaluation::{compare_maps, ErrorMatrix};
use landcover_svm::kernels::kernel_matrix;
use landcover_svm::model_selection::stratified_kfold;
use landcover_svm::svm::{
    dual_objective, max_kkt_violation, solve_dual, BinaryModel, BinaryProblem, SolverSettings,
};
use landcover_svm::{ClassTable, Kernel};

/// Published kappas for the linear, RBF, quadratic and ensemble classifiers.
const PUBLISHED: [(&str, f64); 4] = [
    ("Linear", 0.7806),
    ("RBF", 0.9198),
    ("Quadratic", 0.8378),
    ("Ensemble", 0.8929),
];

/// Seeded desk-scale kappas, frozen from the first run.
const FROZEN_DESK_KAPPAS: [&str; 4] = ["0.8351", "0.9295", "0.8826", "0.9277"];

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion = fn() -> Outcome;

fn check(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn kernels() -> [Kernel; 3] {
    [
        Kernel::Linear,
        Kernel::Rbf { gamma: 0.5 },
        Kernel::quadratic(),
    ]
}

fn solver_oracle() -> Outcome {
    let start = Instant::now();
    let tight = SolverSettings {
        kkt_tolerance: 1e-6,
        ..SolverSettings::default()
    };
    let mut worst_rel = 0.0f64;
    let mut worst_rel_default = 0.0f64;
    let mut worst_kkt = 0.0f64;
    let mut cases = 0;
    for seed in 0..10u64 {
        let n = 6 + (seed as usize % 7);
        for kernel in kernels() {
            for c in [1.0, 100.0] {
                let p = common::random_problem(seed, n, 2, c, kernel);
                let (_, oracle) = common::pg_dual_oracle(&p);
                let sol = match solve_dual(&p, &tight, false) {
                    Ok(s) => s,
                    Err(e) => return check(false, format!("seed {seed} {kernel} C={c}: {e}")),
                };
                let w = dual_objective(&p, &sol.alphas).unwrap();
                worst_rel = worst_rel.max((w - oracle).abs() / oracle.abs());
                worst_kkt = worst_kkt.max(max_kkt_violation(&p, &sol.alphas, sol.bias).unwrap());
                if let Ok(d) = solve_dual(&p, &SolverSettings::default(), false) {
                    let wd = dual_objective(&p, &d.alphas).unwrap();
                    worst_rel_default = worst_rel_default.max((wd - oracle).abs() / oracle.abs());
                }
                cases += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst_rel <= 1e-6 && worst_kkt <= 1e-3 && secs < 5.0,
        format!(
            "{cases} problems, worst relative gap {worst_rel:.1e} (kkt_tolerance 1e-6; {worst_rel_default:.1e} at the 1e-3 default), max KKT {worst_kkt:.1e}, {secs:.2} s"
        ),
    )
}

fn closed_form() -> Outcome {
    let p = BinaryProblem::new(
        vec![vec![-1.0], vec![1.0]],
        vec![-1, 1],
        10.0,
        Kernel::Linear,
    )
    .unwrap();
    let sol = solve_dual(&p, &SolverSettings::default(), false).unwrap();
    let model = BinaryModel::from_dual(&p, &sol);
    let alphas_ok = sol.alphas.iter().all(|a| (a - 0.5).abs() <= 1e-6);
    let bias_ok = sol.bias.abs() <= 1e-6;
    let f_ok = [-3.0, -1.0, 0.0, 0.5, 2.0]
        .iter()
        .all(|&x| (model.decision_value(&[x]).unwrap() - x).abs() <= 1e-6);
    check(
        alphas_ok && bias_ok && f_ok,
        format!(
            "alphas {:?}, bias {:.1e}, f(2) = {}",
            sol.alphas,
            sol.bias,
            model.decision_value(&[2.0]).unwrap()
        ),
    )
}

fn kernel_psd() -> Outcome {
    let mut worst = f64::INFINITY;
    for kernel in kernels() {
        for seed in 0..50u64 {
            let mut r = common::rng(seed);
            let n = r.random_range(1..=10);
            let d = r.random_range(1..=6);
            let xs: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| r.random_range(-3.0..3.0)).collect())
                .collect();
            worst = worst.min(common::min_eigenvalue(
                &kernel_matrix(&kernel, &xs).unwrap(),
            ));
        }
    }
    check(
        worst >= -1e-8,
        format!("150 Gram matrices, smallest eigenvalue {worst:.2e}"),
    )
}

fn kappa_oracle() -> Outcome {
    let mut worst = 0.0f64;
    let mut bounded = true;
    for seed in 0..100u64 {
        let mut r = common::rng(1000 + seed);
        let k = r.random_range(2..=7);
        let mut counts: Vec<Vec<u64>> = (0..k)
            .map(|_| (0..k).map(|_| r.random_range(0..50)).collect())
            .collect();
        for (i, row) in counts.iter_mut().enumerate() {
            row[i] += r.random_range(1..150);
        }
        let m = ErrorMatrix::from_counts(counts.clone(), ClassTable::numbered(k).unwrap()).unwrap();
        let kappa = m.kappa().unwrap();
        worst = worst.max((kappa - common::kappa_ref(&counts)).abs());
        bounded &= kappa <= m.overall_accuracy();
        let diag: Vec<Vec<u64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { counts[i][i] } else { 0 })
                    .collect()
            })
            .collect();
        bounded &= ErrorMatrix::from_counts(diag, ClassTable::numbered(k).unwrap())
            .unwrap()
            .kappa()
            .unwrap()
            == 1.0;
    }
    let two = ClassTable::numbered(2).unwrap();
    let hand_a = ErrorMatrix::from_counts(vec![vec![40, 10], vec![20, 30]], two.clone())
        .unwrap()
        .kappa()
        .unwrap();
    let hand_b = ErrorMatrix::from_counts(vec![vec![50, 0], vec![50, 0]], two)
        .unwrap()
        .kappa()
        .unwrap();
    check(
        worst <= 1e-12 && bounded && hand_a == 0.4 && hand_b == 0.0,
        format!("100 matrices, worst oracle gap {worst:.1e}; hand cases {hand_a} and {hand_b}"),
    )
}

fn vote_laws() -> Outcome {
    let first = TieBreak::FirstListedMember;
    let mut checked = 0;
    for a in 1..=5 {
        for b in 1..=5 {
            for c in 1..=5 {
                let p = [a, b, c];
                let simple = vote_simple(&p, first).unwrap();
                let count = |x: usize| p.iter().filter(|&&v| v == x).count();
                let majority = p.iter().copied().find(|&x| count(x) >= 2);
                let expected = majority.unwrap_or(p[0]);
                let unanimity = a != b || b != c || simple.winner == a;
                let equal_weights = vote_weighted(&p, &[2.0; 3], first).unwrap() == simple;
                if simple.winner != expected
                    || !unanimity
                    || !equal_weights
                    || simple.was_tie != majority.is_none()
                {
                    return check(false, format!("violated on {p:?}: {simple:?}"));
                }
                checked += 1;
            }
        }
    }
    check(
        checked == 125,
        format!("{checked} triples: unanimity, majority, equal weights, first-listed ties"),
    )
}

fn desk_replication() -> Outcome {
    let start = Instant::now();
    let scene = gen_synthetic(&SyntheticConfig::default()).unwrap();
    let ensemble = train_ensemble(
        &scene.samples,
        &default_members(10.0, 1.0 / scene.samples.dim() as f64),
        &SolverSettings::default(),
    )
    .unwrap();
    let pred = ensemble.predict_raster(&scene.raster).unwrap();
    let mut kappas: Vec<f64> = pred
        .member_maps
        .iter()
        .map(|m| compare_maps(&scene.reference, m).unwrap().kappa().unwrap())
        .collect();
    kappas.push(
        compare_maps(&scene.reference, &pred.final_map)
            .unwrap()
            .kappa()
            .unwrap(),
    );
    let secs = start.elapsed().as_secs_f64();

    println!(
        "      {:<10} {:>10} {:>10}",
        "classifier", "published", "synthetic"
    );
    for ((name, published), k) in PUBLISHED.iter().zip(&kappas) {
        println!("      {name:<10} {published:>10.4} {k:>10.4}");
    }
    let member_min = kappas[..3].iter().copied().fold(f64::INFINITY, f64::min);
    let shown: Vec<String> = kappas.iter().map(|k| format!("{k:.4}")).collect();
    let pattern = kappas[3] > kappas[0] && kappas[3] > kappas[2] && kappas[3] < kappas[1];
    check(
        kappas[3] >= member_min && shown == FROZEN_DESK_KAPPAS && secs < 60.0,
        format!(
            "ensemble {:.4} >= weakest member {member_min:.4}; frozen values {}; above linear and quadratic but below RBF as published: {}; {secs:.2} s",
            kappas[3],
            if shown == FROZEN_DESK_KAPPAS { "match" } else { "DIFFER" },
            if pattern { "yes" } else { "no" },
        ),
    )
}

fn run_cli(args: &[&str]) -> i32 {
    let argv = std::iter::once("landcover-svm").chain(args.iter().copied());
    landcover_svm::cli::run(argv, &mut std::io::sink())
}

fn cli_pipeline(dir: &Path, threads: &str) -> Vec<(String, Vec<u8>)> {
    let f = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let mut steps: Vec<Vec<String>> = vec![vec!["gensynth".into(), "--out-dir".into(), f("")]];
    for kernel in ["linear", "rbf", "quadratic"] {
        steps.push(
            [
                "train",
                "--samples",
                &f("samples.csv"),
                "--kernel",
                kernel,
                "--out",
                &f(&format!("{kernel}.json")),
            ]
            .map(String::from)
            .to_vec(),
        );
        steps.push(
            [
                "classify",
                "--model",
                &f(&format!("{kernel}.json")),
                "--raster",
                &f("scene.hdr"),
                "--out",
                &f(&format!("{kernel}-map.hdr")),
            ]
            .map(String::from)
            .to_vec(),
        );
    }
    steps.push(
        [
            "vote",
            &f("linear-map.hdr"),
            &f("rbf-map.hdr"),
            &f("quadratic-map.hdr"),
            "--out",
            &f("vote.hdr"),
        ]
        .map(String::from)
        .to_vec(),
    );
    steps.push(
        [
            "evaluate",
            "--reference",
            &f("reference.hdr"),
            "--predicted",
            &f("vote.hdr"),
            "--json",
            &f("report.json"),
        ]
        .map(String::from)
        .to_vec(),
    );
    for step in steps {
        let mut args: Vec<&str> = vec!["--threads", threads];
        args.extend(step.iter().map(String::as_str));
        assert_eq!(run_cli(&args), 0, "{args:?}");
    }
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn roundtrips() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut r = common::rng(77);
    let data: Vec<f32> = (0..4 * 9 * 11)
        .map(|_| f32::from_bits(r.random::<u32>() & 0x7f7f_ffff))
        .collect();
    let raster = Raster::new(9, 11, 4, data).unwrap();
    let path = dir.path().join("r.hdr");
    write_raster(&raster, &path).unwrap();
    let back = read_raster(&path).unwrap();
    let raster_ok = back
        .data()
        .iter()
        .zip(raster.data())
        .all(|(a, b)| a.to_bits() == b.to_bits());

    let scene = gen_synthetic(&SyntheticConfig {
        rows: 2,
        cols: 2,
        ..SyntheticConfig::default()
    })
    .unwrap();
    let ensemble = train_ensemble(
        &scene.samples,
        &default_members(10.0, 1.0 / 6.0),
        &SolverSettings::default(),
    )
    .unwrap();
    let model_path = dir.path().join("e.json");
    save_model(&ModelFile::Ensemble(ensemble.clone()), &model_path).unwrap();
    let ModelFile::Ensemble(loaded) = load_model(&model_path).unwrap() else {
        return check(false, "model kind changed on reload");
    };
    let model_ok = (0..500).all(|_| {
        let x: Vec<f64> = (0..6).map(|_| r.random_range(-8.0..8.0)).collect();
        ensemble.predict_one(&x).unwrap().winner == loaded.predict_one(&x).unwrap().winner
    });

    let runs: Vec<Vec<(String, Vec<u8>)>> = ["1", "4", "1"]
        .iter()
        .map(|threads| {
            let d = tempfile::tempdir().unwrap();
            cli_pipeline(d.path(), threads)
        })
        .collect();
    let cli_ok = runs[0] == runs[1] && runs[0] == runs[2];
    check(
        raster_ok && model_ok && cli_ok,
        format!(
            "raster bitwise {raster_ok}, model predictions exact {model_ok}, CLI pipeline byte-identical over 3 runs ({} files, 1 and 4 threads) {cli_ok}",
            runs[0].len()
        ),
    )
}

fn stratified_cv() -> Outcome {
    for seed in 0..20u64 {
        let mut r = common::rng(500 + seed);
        let k = r.random_range(2..=6);
        let folds = r.random_range(2..=6);
        let mut labels = Vec::new();
        for class in 0..k {
            labels.extend(std::iter::repeat_n(
                class,
                r.random_range(folds..=folds + 30),
            ));
        }
        for i in (1..labels.len()).rev() {
            labels.swap(i, r.random_range(0..=i));
        }
        let features = labels.iter().map(|&l| vec![l as f64]).collect();
        let samples = SampleSet::new(features, labels, ClassTable::numbered(k).unwrap()).unwrap();
        let parts = stratified_kfold(&samples, folds, seed).unwrap();
        let mut seen = vec![0; samples.len()];
        for f in &parts {
            for &i in &f.validation {
                seen[i] += 1;
            }
        }
        if seen.iter().any(|&s| s != 1) {
            return check(
                false,
                format!("seed {seed}: validation sets do not partition the samples"),
            );
        }
        for class in 0..k {
            let per: Vec<usize> = parts
                .iter()
                .map(|f| {
                    f.validation
                        .iter()
                        .filter(|&&i| samples.labels()[i] == class)
                        .count()
                })
                .collect();
            if per.iter().max().unwrap() - per.iter().min().unwrap() > 1 {
                return check(
                    false,
                    format!("seed {seed} class {class}: fold counts {per:?}"),
                );
            }
        }
    }
    check(
        true,
        "20 sample sets: disjoint cover, per-class fold counts within 1",
    )
}

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("solver-oracle equivalence", solver_oracle),
        ("two-point closed form", closed_form),
        ("kernel PSD suite", kernel_psd),
        ("kappa oracle", kappa_oracle),
        ("vote law suite", vote_laws),
        ("desk-scale pattern replication", desk_replication),
        ("roundtrip determinism", roundtrips),
        ("stratified CV validity", stratified_cv),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {}. {name}: {}", i + 1, outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
