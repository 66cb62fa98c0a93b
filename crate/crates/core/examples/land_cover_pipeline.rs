//! End to end: synthetic scene, three SVMs, majority vote, and kappa for every map.

use landcover_svm::data_io::{gen_synthetic, SyntheticConfig};
use landcover_svm::ensemble::{default_members, train_ensemble};
use landcover_svm::evaluation::compare_maps;
use landcover_svm::svm::SolverSettings;

fn main() -> landcover_svm::Result<()> {
    let scene = gen_synthetic(&SyntheticConfig::default())?;
    let gamma = 1.0 / scene.samples.dim() as f64;
    let ensemble = train_ensemble(
        &scene.samples,
        &default_members(10.0, gamma),
        &SolverSettings::default(),
    )?;
    let prediction = ensemble.predict_raster(&scene.raster)?;

    for (name, map) in ensemble.names().iter().zip(&prediction.member_maps) {
        println!(
            "{name:<10} kappa {:.4}",
            compare_maps(&scene.reference, map)?.kappa()?
        );
    }
    let matrix = compare_maps(&scene.reference, &prediction.final_map)?;
    println!(
        "{:<10} kappa {:.4} ({} ties)",
        "ensemble",
        matrix.kappa()?,
        prediction.ties
    );
    print!("{}", matrix.report()?.to_text());
    Ok(())
}
