//! One-vs-one classification of three labelled clusters, showing each pairwise contest.

use landcover_svm::data_io::SampleSet;
use landcover_svm::multiclass::train_multiclass;
use landcover_svm::svm::SolverSettings;
use landcover_svm::{ClassTable, Kernel};

fn main() -> landcover_svm::Result<()> {
    let centres = [[0.0, 0.0], [4.0, 0.0], [2.0, 3.5]];
    let offsets = [
        [0.3, 0.2],
        [-0.4, 0.1],
        [0.1, -0.5],
        [-0.2, -0.3],
        [0.5, 0.4],
    ];
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (class, c) in centres.iter().enumerate() {
        for o in &offsets {
            features.push(vec![c[0] + o[0], c[1] + o[1]]);
            labels.push(class);
        }
    }
    let samples = SampleSet::new(
        features,
        labels,
        ClassTable::new(["water", "built-up", "forest"])?,
    )?;
    let model = train_multiclass(
        &samples,
        Kernel::rbf(0.5)?,
        10.0,
        &SolverSettings::default(),
    )?;

    for x in [[0.2, 0.1], [3.8, 0.3], [2.0, 1.2]] {
        println!("x = {x:?} -> {}", model.predict_name(&x)?);
        for (i, j, f) in model.contests(&x)? {
            println!(
                "  {} vs {}: {f:+.3}",
                samples.classes().name(i),
                samples.classes().name(j)
            );
        }
    }
    Ok(())
}
