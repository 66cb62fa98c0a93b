//! Error matrices, overall accuracy, Cohen's kappa, and per-class accuracies.
//!
//! Rows are reference classes and columns are predicted classes. Inputs are
//! 1-based class codes; code 0 (unclassified) is kept out of the matrix and
//! counted separately.

use std::fmt::Write as _;

use serde::Serialize;

use crate::classes::ClassTable;
use crate::data_io::ClassRaster;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorMatrix {
    pub classes: ClassTable,
    /// `counts[reference][predicted]`
    pub counts: Vec<Vec<u64>>,
    pub total: u64,
    /// Pixels with a reference label that the classifier left unclassified.
    pub unclassified: u64,
    /// Pixels without a reference label.
    pub unreferenced: u64,
}

pub fn build_error_matrix(
    reference: &[u8],
    predicted: &[u8],
    classes: &ClassTable,
) -> Result<ErrorMatrix> {
    if reference.len() != predicted.len() {
        return Err(Error::invalid(format!(
            "{} reference labels but {} predictions",
            reference.len(),
            predicted.len()
        )));
    }
    let k = classes.len();
    let check = |code: u8, what: &str| -> Result<()> {
        if usize::from(code) > k {
            return Err(Error::invalid(format!(
                "{what} label {code} outside 1..={k}"
            )));
        }
        Ok(())
    };
    let mut counts = vec![vec![0u64; k]; k];
    let mut unclassified = 0;
    let mut unreferenced = 0;
    for (&r, &p) in reference.iter().zip(predicted) {
        check(r, "reference")?;
        check(p, "predicted")?;
        match (ClassTable::index(r), ClassTable::index(p)) {
            (None, _) => unreferenced += 1,
            (Some(_), None) => unclassified += 1,
            (Some(i), Some(j)) => counts[i][j] += 1,
        }
    }
    let total = counts.iter().flatten().sum();
    if total == 0 {
        return Err(Error::invalid(
            "no pixel has both a reference label and a prediction",
        ));
    }
    Ok(ErrorMatrix {
        classes: classes.clone(),
        counts,
        total,
        unclassified,
        unreferenced,
    })
}

/// Error matrix between a reference map and a predicted map with the same class table.
pub fn compare_maps(reference: &ClassRaster, predicted: &ClassRaster) -> Result<ErrorMatrix> {
    if !reference.same_shape(predicted) {
        return Err(Error::invalid(format!(
            "reference is {}×{} but prediction is {}×{}",
            reference.rows(),
            reference.cols(),
            predicted.rows(),
            predicted.cols()
        )));
    }
    if reference.classes() != predicted.classes() {
        return Err(Error::invalid(format!(
            "class tables differ: reference {:?}, predicted {:?}",
            reference.classes().names(),
            predicted.classes().names()
        )));
    }
    build_error_matrix(reference.values(), predicted.values(), reference.classes())
}

impl ErrorMatrix {
    pub fn from_counts(counts: Vec<Vec<u64>>, classes: ClassTable) -> Result<Self> {
        let k = classes.len();
        if counts.len() != k || counts.iter().any(|r| r.len() != k) {
            return Err(Error::invalid(format!("error matrix must be {k}×{k}")));
        }
        let total = counts.iter().flatten().sum();
        if total == 0 {
            return Err(Error::invalid("error matrix total must be positive"));
        }
        Ok(ErrorMatrix {
            classes,
            counts,
            total,
            unclassified: 0,
            unreferenced: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.k())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn diagonal(&self) -> u64 {
        (0..self.k()).map(|i| self.counts[i][i]).sum()
    }

    pub fn overall_accuracy(&self) -> f64 {
        self.diagonal() as f64 / self.total as f64
    }

    /// `(N·d − m) / (N² − m)` with `m = Σ rowᵢ·colᵢ`, evaluated in integers up to the final division.
    pub fn kappa(&self) -> Result<f64> {
        let n = i128::from(self.total);
        let d = i128::from(self.diagonal());
        let m: i128 = self
            .row_sums()
            .iter()
            .zip(self.col_sums())
            .map(|(&r, c)| i128::from(r) * i128::from(c))
            .sum();
        let denom = n * n - m;
        if denom == 0 {
            return Err(Error::DegenerateMarginals);
        }
        Ok((n * d - m) as f64 / denom as f64)
    }

    /// Producer's (row-normalized) and user's (column-normalized) accuracy per class;
    /// `None` where the marginal is zero.
    pub fn per_class_accuracy(&self) -> (Vec<Option<f64>>, Vec<Option<f64>>) {
        let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
        let producers = self
            .row_sums()
            .iter()
            .enumerate()
            .map(|(i, &r)| ratio(self.counts[i][i], r))
            .collect();
        let users = self
            .col_sums()
            .iter()
            .enumerate()
            .map(|(j, &c)| ratio(self.counts[j][j], c))
            .collect();
        (producers, users)
    }

    pub fn report(&self) -> Result<AccuracyReport> {
        let (producers, users) = self.per_class_accuracy();
        Ok(AccuracyReport {
            classes: self.classes.names().to_vec(),
            matrix: self.counts.clone(),
            total: self.total,
            unclassified: self.unclassified,
            overall_accuracy: self.overall_accuracy(),
            kappa: self.kappa()?,
            producers,
            users,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub classes: Vec<String>,
    /// Rows = reference, columns = predicted.
    pub matrix: Vec<Vec<u64>>,
    pub total: u64,
    pub unclassified: u64,
    pub overall_accuracy: f64,
    pub kappa: f64,
    pub producers: Vec<Option<f64>>,
    pub users: Vec<Option<f64>>,
}

fn fmt4(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |v| format!("{v:.4}"))
}

impl AccuracyReport {
    pub fn to_text(&self) -> String {
        let name_w = self
            .classes
            .iter()
            .map(String::len)
            .chain([9])
            .max()
            .unwrap_or(9);
        let cell_w = self
            .classes
            .iter()
            .map(String::len)
            .chain([self.total.to_string().len(), 6])
            .max()
            .unwrap_or(6);
        let mut s = String::from("Error matrix (rows = reference, columns = predicted)\n");
        let _ = write!(s, "{:name_w$}", "");
        for c in &self.classes {
            let _ = write!(s, " {c:>cell_w$}");
        }
        s.push('\n');
        for (name, row) in self.classes.iter().zip(&self.matrix) {
            let _ = write!(s, "{name:name_w$}");
            for v in row {
                let _ = write!(s, " {v:>cell_w$}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "Pixels assessed: {}", self.total);
        let _ = writeln!(s, "Unclassified pixels excluded: {}", self.unclassified);
        let _ = writeln!(s, "Overall accuracy: {:.4}", self.overall_accuracy);
        let _ = writeln!(s, "Kappa: {:.4}", self.kappa);
        let _ = writeln!(
            s,
            "{:name_w$} {:>10} {:>10}",
            "Class", "Producer's", "User's"
        );
        for ((name, p), u) in self.classes.iter().zip(&self.producers).zip(&self.users) {
            let _ = writeln!(s, "{name:name_w$} {:>10} {:>10}", fmt4(*p), fmt4(*u));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
