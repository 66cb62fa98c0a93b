//! One-vs-one multiclass SVMs and per-pixel raster classification.
//!
//! A `k`-class model holds `k(k−1)/2` binary machines, one per pair `i < j`,
//! trained with class `i` as `+1` and class `j` as `−1`. Each machine casts one
//! vote; ties in the tally go to the class with the larger total `|decision value|`
//! over all contests it took part in, then to the lowest class index.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::{ClassTable, UNCLASSIFIED};
use crate::data_io::{ClassRaster, Raster, SampleSet, Scaler};
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::svm::{train_binary, BinaryModel, BinaryProblem, SolverSettings};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "one-vs-one")]
    OneVsOne,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairModel {
    /// Class index mapped to `+1`.
    pub positive: usize,
    /// Class index mapped to `−1`.
    pub negative: usize,
    pub model: BinaryModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MulticlassModel {
    pub strategy: Strategy,
    pub classes: ClassTable,
    pub scaler: Scaler,
    pub kernel: Kernel,
    pub c: f64,
    pub pairs: Vec<PairModel>,
}

pub fn pair_count(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Fits a scaler on `samples`, then one binary machine per class pair.
pub fn train_multiclass(
    samples: &SampleSet,
    kernel: Kernel,
    c: f64,
    settings: &SolverSettings,
) -> Result<MulticlassModel> {
    kernel.validate()?;
    settings.validate()?;
    let classes = samples.classes();
    let k = classes.len();
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 classes, got {k}")));
    }
    let counts = samples.class_counts();
    if let Some(empty) = counts.iter().position(|&n| n == 0) {
        return Err(Error::invalid(format!(
            "class `{}` has no training samples",
            classes.name(empty)
        )));
    }

    let scaler = Scaler::fit(samples)?;
    let scaled: Vec<Vec<f64>> = samples
        .features()
        .iter()
        .map(|x| scaler.apply_unchecked(x))
        .collect();
    let labels = samples.labels();

    let pair_ids: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let pairs = pair_ids
        .par_iter()
        .map(|&(i, j)| {
            let (features, signs): (Vec<Vec<f64>>, Vec<i8>) = labels
                .iter()
                .zip(&scaled)
                .filter(|(&l, _)| l == i || l == j)
                .map(|(&l, x)| (x.clone(), if l == i { 1 } else { -1 }))
                .unzip();
            BinaryProblem::new(features, signs, c, kernel)
                .and_then(|p| train_binary(&p, settings))
                .map(|model| PairModel {
                    positive: i,
                    negative: j,
                    model,
                })
                .map_err(|e| Error::Pair {
                    first: classes.name(i).to_string(),
                    second: classes.name(j).to_string(),
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(MulticlassModel {
        strategy: Strategy::OneVsOne,
        classes: classes.clone(),
        scaler,
        kernel,
        c,
        pairs,
    })
}

/// One pairwise contest: `(positive, negative, decision value)`.
pub type Contest = (usize, usize, f64);

/// Vote tally with the documented tie ladder.
pub fn tally(k: usize, contests: &[Contest]) -> usize {
    let mut votes = vec![0usize; k];
    let mut strength = vec![0.0f64; k];
    for &(i, j, value) in contests {
        let winner = if value >= 0.0 { i } else { j };
        votes[winner] += 1;
        strength[i] += value.abs();
        strength[j] += value.abs();
    }
    let mut best = 0;
    for c in 1..k {
        if votes[c] > votes[best] || (votes[c] == votes[best] && strength[c] > strength[best]) {
            best = c;
        }
    }
    best
}

impl MulticlassModel {
    pub fn dimension(&self) -> usize {
        self.scaler.dimension()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Decision value of every pair machine on the raw (unscaled) input.
    pub fn contests(&self, x: &[f64]) -> Result<Vec<Contest>> {
        self.check_dim(x)?;
        let z = self.scaler.apply_unchecked(x);
        Ok(self
            .pairs
            .iter()
            .map(|p| (p.positive, p.negative, p.model.decision_value_unchecked(&z)))
            .collect())
    }

    /// Class index predicted for a raw feature vector.
    pub fn predict_one(&self, x: &[f64]) -> Result<usize> {
        Ok(tally(self.num_classes(), &self.contests(x)?))
    }

    pub fn predict_name(&self, x: &[f64]) -> Result<&str> {
        Ok(self.classes.name(self.predict_one(x)?))
    }

    pub fn predict_many(&self, xs: &[Vec<f64>]) -> Result<Vec<usize>> {
        xs.par_iter().map(|x| self.predict_one(x)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        self.scaler.validate()?;
        let k = self.num_classes();
        if k < 2 {
            return Err(Error::invalid("model needs at least 2 classes"));
        }
        if self.pairs.len() != pair_count(k) {
            return Err(Error::invalid(format!(
                "{k} classes need {} pair models, found {}",
                pair_count(k),
                self.pairs.len()
            )));
        }
        let mut expected = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j)));
        for p in &self.pairs {
            if Some((p.positive, p.negative)) != expected.next() {
                return Err(Error::invalid(format!(
                    "unexpected pair ({}, {})",
                    p.positive, p.negative
                )));
            }
            p.model.validate()?;
            if p.model.dimension().is_some_and(|d| d != self.dimension()) {
                return Err(Error::invalid("pair model dimension differs from scaler"));
            }
        }
        Ok(())
    }

    pub fn classify_raster(&self, raster: &Raster) -> Result<Classification> {
        if raster.bands() != self.dimension() {
            return Err(Error::invalid(format!(
                "raster has {} bands but the model expects {}",
                raster.bands(),
                self.dimension()
            )));
        }
        let cols = raster.cols();
        let rows: Vec<Vec<u8>> = (0..raster.rows())
            .into_par_iter()
            .map(|r| {
                (0..cols)
                    .map(|c| {
                        let px = raster.pixel(r, c);
                        if raster.is_valid_pixel(&px) {
                            let z = self.scaler.apply_unchecked(&px);
                            let contests: Vec<Contest> = self
                                .pairs
                                .iter()
                                .map(|p| {
                                    (p.positive, p.negative, p.model.decision_value_unchecked(&z))
                                })
                                .collect();
                            ClassTable::code(tally(self.num_classes(), &contests))
                        } else {
                            UNCLASSIFIED
                        }
                    })
                    .collect()
            })
            .collect();
        let values: Vec<u8> = rows.into_iter().flatten().collect();
        let unclassified = values.iter().filter(|&&v| v == UNCLASSIFIED).count();
        Ok(Classification {
            map: ClassRaster::new(raster.rows(), cols, values, self.classes.clone())?,
            unclassified,
        })
    }
}

/// A class map plus the number of pixels left unclassified (non-finite or nodata input).
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub map: ClassRaster,
    pub unclassified: usize,
}
