use serde::{Deserialize, Serialize};

use super::samples::SampleSet;
use crate::error::{Error, Result};

/// Per-band z-score standardization using the population standard deviation.
/// Constant bands keep `std = 1`, so they scale to zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Scaler {
    pub fn fit(samples: &SampleSet) -> Result<Self> {
        Self::fit_rows(samples.features())
    }

    pub fn fit_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::invalid("cannot fit a scaler on zero samples"))?;
        let d = first.len();
        let n = rows.len() as f64;
        let mut means = vec![0.0; d];
        for row in rows {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut stds = vec![0.0; d];
        for row in rows {
            for ((s, v), m) in stds.iter_mut().zip(row).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
            if !(*s > 0.0 && s.is_finite()) {
                *s = 1.0;
            }
        }
        Ok(Scaler { means, stds })
    }

    pub fn dimension(&self) -> usize {
        self.means.len()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: x.len(),
            });
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.means.len() != self.stds.len() {
            return Err(Error::invalid("scaler means and stds differ in length"));
        }
        if self.stds.iter().any(|s| !(*s > 0.0 && s.is_finite()))
            || self.means.iter().any(|m| !m.is_finite())
        {
            return Err(Error::invalid("scaler stds must be positive and finite"));
        }
        Ok(())
    }
}
