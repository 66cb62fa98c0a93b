//! Land cover classification with a committee of support vector machines.
//!
//! Linear, RBF and quadratic soft-margin SVMs are trained by SMO, extended to
//! many classes by one-vs-one voting, applied pixel by pixel to multi-band
//! rasters, and fused by simple or weighted majority vote. Error matrices and
//! Cohen's kappa score the resulting maps.
//!
//! ```no_run
//! use landcover_svm::data_io::{gen_synthetic, SyntheticConfig};
//! use landcover_svm::ensemble::{default_members, train_ensemble};
//! use landcover_svm::evaluation::compare_maps;
//! use landcover_svm::svm::SolverSettings;
//!
//! let scene = gen_synthetic(&SyntheticConfig::default())?;
//! let committee = train_ensemble(&scene.samples, &default_members(10.0, 1.0 / 6.0), &SolverSettings::default())?;
//! let prediction = committee.predict_raster(&scene.raster)?;
//! let kappa = compare_maps(&scene.reference, &prediction.final_map)?.kappa()?;
//! println!("ensemble kappa {kappa:.4}");
//! # Ok::<(), landcover_svm::Error>(())
//! ```

pub mod classes;
pub mod cli;
pub mod data_io;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod kernels;
pub mod model_selection;
pub mod multiclass;
pub mod svm;

pub use classes::ClassTable;
pub use error::{Error, Result};
pub use kernels::Kernel;
