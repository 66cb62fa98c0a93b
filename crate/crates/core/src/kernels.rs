//! Kernel functions and Gram matrices.
//!
//! * `Linear`: `x·y`
//! * `Rbf`: `exp(-gamma ‖x − y‖²)`
//! * `Polynomial`: `(scale (x·y) + coef0)^degree`
//!
//! The quadratic SVM is `Polynomial { degree: 2, .. }`, inhomogeneous by default.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
    Polynomial { degree: u32, scale: f64, coef0: f64 },
}

impl Kernel {
    pub fn rbf(gamma: f64) -> Result<Self> {
        let k = Kernel::Rbf { gamma };
        k.validate()?;
        Ok(k)
    }

    pub fn polynomial(degree: u32, scale: f64, coef0: f64) -> Result<Self> {
        let k = Kernel::Polynomial {
            degree,
            scale,
            coef0,
        };
        k.validate()?;
        Ok(k)
    }

    /// Degree-2 polynomial with `scale = 1`, `coef0 = 1`.
    pub fn quadratic() -> Self {
        Kernel::Polynomial {
            degree: 2,
            scale: 1.0,
            coef0: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Linear => Ok(()),
            Kernel::Rbf { gamma } => {
                if gamma.is_finite() && gamma > 0.0 {
                    Ok(())
                } else {
                    Err(Error::invalid(format!(
                        "rbf gamma must be positive, got {gamma}"
                    )))
                }
            }
            Kernel::Polynomial {
                degree,
                scale,
                coef0,
            } => {
                if degree < 1 {
                    return Err(Error::invalid("polynomial degree must be at least 1"));
                }
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::invalid(format!(
                        "polynomial scale must be positive, got {scale}"
                    )));
                }
                if !(coef0.is_finite() && coef0 >= 0.0) {
                    return Err(Error::invalid(format!(
                        "polynomial coef0 must be nonnegative, got {coef0}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Short family name: `linear`, `rbf` or `polynomial`.
    pub fn family(&self) -> &'static str {
        match self {
            Kernel::Linear => "linear",
            Kernel::Rbf { .. } => "rbf",
            Kernel::Polynomial { .. } => "polynomial",
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        Ok(self.eval_unchecked(x, y))
    }

    /// Caller guarantees `x.len() == y.len()`.
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        match *self {
            Kernel::Linear => dot(x, y),
            Kernel::Rbf { gamma } => {
                let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-gamma * sq).exp()
            }
            Kernel::Polynomial {
                degree,
                scale,
                coef0,
            } => powi(scale * dot(x, y) + coef0, degree),
        }
    }
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kernel::Linear => write!(f, "linear"),
            Kernel::Rbf { gamma } => write!(f, "rbf(gamma={gamma})"),
            Kernel::Polynomial {
                degree,
                scale,
                coef0,
            } => write!(
                f,
                "polynomial(degree={degree}, scale={scale}, coef0={coef0})"
            ),
        }
    }
}

// Summation order is fixed, so `dot(x, y) == dot(y, x)` bit for bit.
fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn powi(base: f64, degree: u32) -> f64 {
    match i32::try_from(degree) {
        Ok(d) => base.powi(d),
        Err(_) => base.powf(f64::from(degree)),
    }
}

/// Dense Gram matrix, row-major `n × n`. Only the upper triangle is evaluated;
/// the lower triangle is mirrored so the result is exactly symmetric.
pub fn kernel_matrix(kernel: &Kernel, points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let first = points
        .first()
        .ok_or_else(|| Error::invalid("kernel matrix needs at least one point"))?;
    let dim = first.len();
    if let Some(bad) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    let n = points.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| kernel.eval_unchecked(&points[i], &points[j]))
                .collect()
        })
        .collect();
    let mut gram = vec![vec![0.0; n]; n];
    for (i, row) in upper.iter().enumerate() {
        for (offset, &v) in row.iter().enumerate() {
            let j = i + offset;
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    Ok(gram)
}
