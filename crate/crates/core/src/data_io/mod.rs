//! File formats and data preparation: CSV samples, ENVI-style rasters,
//! PPM rendering, palettes, JSON model files, scaling, and synthetic scenes.

pub mod palette;
pub mod persist;
pub mod ppm;
pub mod raster;
pub mod samples;
pub mod scaler;
pub mod synthetic;

pub use palette::ClassPalette;
pub use persist::{load_model, save_model, ModelFile};
pub use ppm::{encode_ppm, render_ppm};
pub use raster::{
    data_path, read_class_raster, read_raster, write_class_raster, write_raster, ClassRaster,
    DataType, Raster,
};
pub use samples::{read_samples_csv, write_samples_csv, SampleSet};
pub use scaler::Scaler;
pub use synthetic::{gen_synthetic, SyntheticConfig, SyntheticScene};
