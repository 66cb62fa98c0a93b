//! Training samples: one row per pixel, band columns followed by a class-name label.
//!
//! ```text
//! b1,b2,b3,label
//! 0.12,0.30,0.08,water
//! ```
//!
//! Class indices follow the order in which labels first appear. Fields are
//! plain comma-separated values (no quoting); blank lines are skipped.

use std::path::Path;

use crate::classes::ClassTable;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    features: Vec<Vec<f64>>,
    labels: Vec<usize>,
    classes: ClassTable,
    band_names: Option<Vec<String>>,
}

impl SampleSet {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, classes: ClassTable) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if features.is_empty() {
            return Err(Error::invalid("sample set is empty"));
        }
        let d = features[0].len();
        if d == 0 {
            return Err(Error::invalid("samples need at least one band"));
        }
        for (i, row) in features.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("sample {i} has a non-finite value")));
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes.len()) {
            return Err(Error::invalid(format!(
                "label {bad} outside class table of size {}",
                classes.len()
            )));
        }
        Ok(SampleSet {
            features,
            labels,
            classes,
            band_names: None,
        })
    }

    pub fn with_band_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: names.len(),
            });
        }
        self.band_names = Some(names);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn classes(&self) -> &ClassTable {
        &self.classes
    }

    pub fn band_names(&self) -> Option<&[String]> {
        self.band_names.as_deref()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `indices`, keeping the full class table.
    pub fn subset(&self, indices: &[usize]) -> SampleSet {
        SampleSet {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes.clone(),
            band_names: self.band_names.clone(),
        }
    }
}

pub fn read_samples_csv(path: impl AsRef<Path>) -> Result<SampleSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_samples(std::io::BufReader::new(file), path)
}

pub(crate) fn parse_samples(mut input: impl std::io::Read, path: &Path) -> Result<SampleSet> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line: line as u64,
        message,
    };
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| parse_err(1, e.to_string()))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let header: Vec<&str> = match lines.next() {
        Some((_, h)) => h.split(',').map(str::trim).collect(),
        None => return Err(parse_err(1, "empty file".into())),
    };
    if header.len() < 2 || header.iter().any(|h| h.is_empty()) {
        return Err(parse_err(
            1,
            "header must list at least one band column followed by `label`".into(),
        ));
    }
    let bands = header.len() - 1;
    let band_names: Vec<String> = header[..bands].iter().map(|s| s.to_string()).collect();

    let mut classes = ClassTable::new(Vec::<String>::new())?;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (line, text) in lines {
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if fields.len() != header.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", header.len(), fields.len()),
            ));
        }
        let mut row = Vec::with_capacity(bands);
        for (name, field) in band_names.iter().zip(&fields) {
            let v: f64 = field.parse().map_err(|_| {
                parse_err(line, format!("column `{name}`: `{field}` is not a number"))
            })?;
            if !v.is_finite() {
                return Err(parse_err(
                    line,
                    format!("column `{name}`: non-finite value `{field}`"),
                ));
            }
            row.push(v);
        }
        let label = fields[bands];
        if label.is_empty() {
            return Err(parse_err(line, "empty class label".into()));
        }
        labels.push(
            classes
                .intern(label)
                .map_err(|e| parse_err(line, e.to_string()))?,
        );
        features.push(row);
    }
    if features.is_empty() {
        return Err(parse_err(1, "no sample rows".into()));
    }
    SampleSet::new(features, labels, classes)?.with_band_names(band_names)
}

pub fn write_samples_csv(samples: &SampleSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = match samples.band_names() {
        Some(names) => names.join(","),
        None => (1..=samples.dim())
            .map(|b| format!("b{b}"))
            .collect::<Vec<_>>()
            .join(","),
    };
    out.push_str(",label\n");
    for (row, &label) in samples.features().iter().zip(samples.labels()) {
        for v in row {
            out.push_str(&v.to_string());
            out.push(',');
        }
        out.push_str(samples.classes().name(label));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
