//! Seeded synthetic multispectral scenes.
//!
//! Every class owns `modes` spectral signatures (Gaussian blobs around a mean
//! drawn uniformly from `[-spread, spread]` per band). Training samples and
//! raster pixels come from the same blobs. The raster is tiled into Voronoi
//! regions, each tagged with a class and one of its modes, and the region tags
//! form the reference map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::raster::{ClassRaster, Raster};
use super::samples::SampleSet;
use crate::classes::ClassTable;
use crate::error::{Error, Result};

pub const LAND_COVER_CLASSES: [&str; 5] = [
    "water",
    "built-up",
    "thick-swamp",
    "light-swamp",
    "other-vegetation",
];

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub classes: usize,
    pub bands: usize,
    pub per_class: usize,
    /// Spectral signatures per class.
    pub modes: usize,
    pub spread: f64,
    pub noise_std: f64,
    pub rows: usize,
    pub cols: usize,
    pub regions: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            seed: 42,
            classes: 5,
            bands: 6,
            per_class: 60,
            modes: 2,
            spread: 4.0,
            noise_std: 1.0,
            rows: 64,
            cols: 64,
            regions: 30,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticScene {
    pub samples: SampleSet,
    pub raster: Raster,
    pub reference: ClassRaster,
    /// `means[class][mode][band]`
    pub means: Vec<Vec<Vec<f64>>>,
    /// Mode each training sample was drawn from.
    pub sample_modes: Vec<usize>,
}

fn class_names(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| {
            LAND_COVER_CLASSES
                .get(i)
                .map_or_else(|| format!("class{}", i + 1), |s| s.to_string())
        })
        .collect()
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("classes", self.classes),
            ("bands", self.bands),
            ("per_class", self.per_class),
            ("modes", self.modes),
            ("rows", self.rows),
            ("cols", self.cols),
            ("regions", self.regions),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::invalid(format!("{name} must be positive")));
        }
        if self.classes < 2 {
            return Err(Error::invalid("synthetic scenes need at least 2 classes"));
        }
        if !(self.spread.is_finite() && self.spread > 0.0) {
            return Err(Error::invalid("spread must be positive"));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(Error::invalid("noise_std must be nonnegative"));
        }
        Ok(())
    }
}

pub fn gen_synthetic(config: &SyntheticConfig) -> Result<SyntheticScene> {
    config.validate()?;
    let SyntheticConfig {
        seed,
        classes: k,
        bands: d,
        per_class,
        modes,
        spread,
        noise_std,
        rows,
        cols,
        regions,
    } = *config;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_std).map_err(|e| Error::invalid(e.to_string()))?;

    let means: Vec<Vec<Vec<f64>>> = (0..k)
        .map(|_| {
            (0..modes)
                .map(|_| (0..d).map(|_| rng.random_range(-spread..=spread)).collect())
                .collect()
        })
        .collect();

    let mut features = Vec::with_capacity(k * per_class);
    let mut labels = Vec::with_capacity(k * per_class);
    let mut sample_modes = Vec::with_capacity(k * per_class);
    for (class, class_means) in means.iter().enumerate() {
        for _ in 0..per_class {
            let mode = rng.random_range(0..modes);
            let x: Vec<f64> = class_means[mode]
                .iter()
                .map(|m| m + noise.sample(&mut rng))
                .collect();
            features.push(x);
            labels.push(class);
            sample_modes.push(mode);
        }
    }
    let table = ClassTable::new(class_names(k))?;
    let band_names: Vec<String> = (1..=d).map(|b| format!("b{b}")).collect();
    let samples =
        SampleSet::new(features, labels, table.clone())?.with_band_names(band_names.clone())?;

    // Region i is tagged with class i mod k, so every class appears once regions ≥ k.
    let centers: Vec<(f64, f64, usize, usize)> = (0..regions)
        .map(|i| {
            let r = rng.random_range(0.0..rows as f64);
            let c = rng.random_range(0.0..cols as f64);
            let mode = rng.random_range(0..modes);
            (r, c, i % k, mode)
        })
        .collect();

    let plane = rows * cols;
    let mut data = vec![0f32; plane * d];
    let mut codes = Vec::with_capacity(plane);
    for r in 0..rows {
        for c in 0..cols {
            let (y, x) = (r as f64 + 0.5, c as f64 + 0.5);
            let &(_, _, class, mode) = centers
                .iter()
                .min_by(|a, b| {
                    let da = (a.0 - y).powi(2) + (a.1 - x).powi(2);
                    let db = (b.0 - y).powi(2) + (b.1 - x).powi(2);
                    da.total_cmp(&db)
                })
                .expect("at least one region");
            codes.push(ClassTable::code(class));
            for (b, m) in means[class][mode].iter().enumerate() {
                data[b * plane + r * cols + c] = (m + noise.sample(&mut rng)) as f32;
            }
        }
    }
    let raster = Raster::new(rows, cols, d, data)?.with_band_names(Some(band_names))?;
    let reference = ClassRaster::new(rows, cols, codes, table)?;

    Ok(SyntheticScene {
        samples,
        raster,
        reference,
        means,
        sample_modes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let cfg = SyntheticConfig {
            rows: 16,
            cols: 16,
            ..SyntheticConfig::default()
        };
        let a = gen_synthetic(&cfg).unwrap();
        let b = gen_synthetic(&cfg).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.raster, b.raster);
        assert_eq!(a.reference, b.reference);
        let c = gen_synthetic(&SyntheticConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn zero_noise_hits_means() {
        let cfg = SyntheticConfig {
            noise_std: 0.0,
            modes: 1,
            rows: 8,
            cols: 8,
            ..SyntheticConfig::default()
        };
        let s = gen_synthetic(&cfg).unwrap();
        for (x, &l) in s.samples.features().iter().zip(s.samples.labels()) {
            assert_eq!(x, &s.means[l][0]);
        }
    }

    #[test]
    fn shapes_and_names() {
        let s = gen_synthetic(&SyntheticConfig::default()).unwrap();
        assert_eq!(s.samples.len(), 300);
        assert_eq!(s.samples.dim(), 6);
        assert_eq!(s.samples.classes().names(), LAND_COVER_CLASSES);
        assert_eq!(
            (s.raster.rows(), s.raster.cols(), s.raster.bands()),
            (64, 64, 6)
        );
        assert!(s.reference.code_counts()[1..].iter().all(|&n| n > 0));
        assert_eq!(s.reference.code_counts()[0], 0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gen_synthetic(&SyntheticConfig {
            classes: 1,
            ..Default::default()
        })
        .is_err());
        assert!(gen_synthetic(&SyntheticConfig {
            bands: 0,
            ..Default::default()
        })
        .is_err());
        assert!(gen_synthetic(&SyntheticConfig {
            noise_std: -1.0,
            ..Default::default()
        })
        .is_err());
    }
}
