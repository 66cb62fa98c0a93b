//! Stratified cross-validation over a C × gamma grid for the RBF kernel.

use landcover_svm::data_io::{gen_synthetic, SyntheticConfig};
use landcover_svm::model_selection::{grid_search_cv, GridSpec, KernelFamily};
use landcover_svm::svm::SolverSettings;

fn main() -> landcover_svm::Result<()> {
    let scene = gen_synthetic(&SyntheticConfig {
        per_class: 30,
        rows: 8,
        cols: 8,
        ..SyntheticConfig::default()
    })?;
    let grid = GridSpec {
        c_values: vec![1.0, 10.0, 100.0],
        gamma_values: vec![0.05, 0.2, 1.0],
        folds: 4,
        ..GridSpec::default()
    };
    let result = grid_search_cv(
        &scene.samples,
        KernelFamily::Rbf,
        &grid,
        &SolverSettings::default(),
    )?;
    print!("{}", result.to_text());
    Ok(())
}
