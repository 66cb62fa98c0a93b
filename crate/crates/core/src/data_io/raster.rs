//! ENVI-style rasters: a plain-text `.hdr` header next to a raw `.img` data file.
//!
//! Supported: `interleave = bsq`, `byte order = 0` (little-endian),
//! `data type = 1` (u8) or `4` (f32). Class maps are single-band u8 with
//! code 0 reserved for unclassified pixels; their class names travel in
//! the header's `class names` list.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::classes::ClassTable;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataType {
    U8,
    F32,
}

impl DataType {
    fn code(self) -> u32 {
        match self {
            DataType::U8 => 1,
            DataType::F32 => 4,
        }
    }

    fn from_code(code: u32) -> Result<Self> {
        match code {
            1 => Ok(DataType::U8),
            4 => Ok(DataType::F32),
            other => Err(Error::Unsupported(format!("ENVI data type {other}"))),
        }
    }

    fn size(self) -> usize {
        match self {
            DataType::U8 => 1,
            DataType::F32 => 4,
        }
    }
}

/// Multi-band image stored band-sequentially: all of band 0, then band 1, ...
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    rows: usize,
    cols: usize,
    bands: usize,
    data: Vec<f32>,
    data_type: DataType,
    nodata: Option<f64>,
    band_names: Option<Vec<String>>,
}

impl Raster {
    pub fn new(rows: usize, cols: usize, bands: usize, data: Vec<f32>) -> Result<Self> {
        if rows == 0 || cols == 0 || bands == 0 {
            return Err(Error::invalid("raster dimensions must be positive"));
        }
        if data.len() != rows * cols * bands {
            return Err(Error::invalid(format!(
                "raster {rows}×{cols}×{bands} needs {} values, got {}",
                rows * cols * bands,
                data.len()
            )));
        }
        Ok(Raster {
            rows,
            cols,
            bands,
            data,
            data_type: DataType::F32,
            nodata: None,
            band_names: None,
        })
    }

    pub fn with_nodata(mut self, nodata: Option<f64>) -> Self {
        self.nodata = nodata;
        self
    }

    pub fn with_band_names(mut self, names: Option<Vec<String>>) -> Result<Self> {
        if let Some(n) = &names {
            if n.len() != self.bands {
                return Err(Error::DimensionMismatch {
                    expected: self.bands,
                    found: n.len(),
                });
            }
        }
        self.band_names = names;
        Ok(self)
    }

    /// Stores the raster as unsigned bytes when written. Every value must be an integer in 0..=255.
    pub fn with_data_type(mut self, data_type: DataType) -> Result<Self> {
        if data_type == DataType::U8
            && self
                .data
                .iter()
                .any(|&v| v.fract() != 0.0 || !(0.0..=255.0).contains(&v))
        {
            return Err(Error::invalid("u8 rasters need integer values in 0..=255"));
        }
        self.data_type = data_type;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_type(&self) -> DataType {
        self.data_type
    }

    pub fn nodata(&self) -> Option<f64> {
        self.nodata
    }

    pub fn band_names(&self) -> Option<&[String]> {
        self.band_names.as_deref()
    }

    pub fn get(&self, band: usize, row: usize, col: usize) -> f32 {
        self.data[band * self.rows * self.cols + row * self.cols + col]
    }

    /// Band vector at `(row, col)`.
    pub fn pixel(&self, row: usize, col: usize) -> Vec<f64> {
        (0..self.bands)
            .map(|b| f64::from(self.get(b, row, col)))
            .collect()
    }

    /// `false` when any band is non-finite or equals the nodata value.
    pub fn is_valid_pixel(&self, pixel: &[f64]) -> bool {
        pixel
            .iter()
            .all(|v| v.is_finite() && self.nodata.is_none_or(|nd| *v != nd))
    }
}

/// Single-band class map; values are codes (0 = unclassified, 1..=k = classes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRaster {
    rows: usize,
    cols: usize,
    values: Vec<u8>,
    classes: ClassTable,
}

impl ClassRaster {
    pub fn new(rows: usize, cols: usize, values: Vec<u8>, classes: ClassTable) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("class raster dimensions must be positive"));
        }
        if values.len() != rows * cols {
            return Err(Error::invalid(format!(
                "class raster {rows}×{cols} needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if let Some(&bad) = values.iter().find(|&&v| usize::from(v) > classes.len()) {
            return Err(Error::invalid(format!(
                "class code {bad} exceeds class count {}",
                classes.len()
            )));
        }
        Ok(ClassRaster {
            rows,
            cols,
            values,
            classes,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn classes(&self) -> &ClassTable {
        &self.classes
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.values[row * self.cols + col]
    }

    pub fn same_shape(&self, other: &ClassRaster) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Pixel count per code, index 0 being unclassified.
    pub fn code_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len() + 1];
        for &v in &self.values {
            counts[usize::from(v)] += 1;
        }
        counts
    }
}

/// `foo.hdr` → `foo.img`.
pub fn data_path(header_path: &Path) -> PathBuf {
    header_path.with_extension("img")
}

fn header_file(path: &Path) -> PathBuf {
    if path.extension().is_some_and(|e| e == "hdr") {
        path.to_path_buf()
    } else {
        path.with_extension("hdr")
    }
}

struct Header {
    samples: usize,
    lines: usize,
    bands: usize,
    data_type: DataType,
    offset: usize,
    nodata: Option<f64>,
    band_names: Option<Vec<String>>,
    class_names: Option<Vec<String>>,
    classes: Option<usize>,
}

fn parse_header(text: &str, path: &Path) -> Result<Header> {
    let perr = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line: line as u64,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim() == "ENVI" => {}
        _ => return Err(perr(1, "header must start with `ENVI`".into())),
    }
    let mut fields: BTreeMap<String, (usize, String)> = BTreeMap::new();
    while let Some((idx, line)) = lines.next() {
        let line_no = idx + 1;
        if line.trim().is_empty() || line.trim_start().starts_with(';') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| perr(line_no, format!("expected `key = value`, found `{line}`")))?;
        let mut value = value.trim().to_string();
        if value.starts_with('{') {
            while !value.contains('}') {
                let (_, more) = lines
                    .next()
                    .ok_or_else(|| perr(line_no, "unterminated `{` block".into()))?;
                value.push('\n');
                value.push_str(more.trim());
            }
        }
        fields.insert(key.trim().to_ascii_lowercase(), (line_no, value));
    }

    let get = |key: &str| fields.get(key);
    let int = |key: &str| -> Result<Option<usize>> {
        get(key)
            .map(|(line, v)| {
                v.parse::<usize>().map_err(|_| {
                    perr(
                        *line,
                        format!("`{key}` must be a nonnegative integer, got `{v}`"),
                    )
                })
            })
            .transpose()
    };
    let required = |key: &str| -> Result<usize> {
        int(key)?.ok_or_else(|| perr(1, format!("missing required key `{key}`")))
    };
    let list = |key: &str| -> Option<Vec<String>> {
        get(key).map(|(_, v)| {
            v.trim_matches(|c| c == '{' || c == '}')
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
    };

    let samples = required("samples")?;
    let lines = required("lines")?;
    let bands = required("bands")?;
    let data_type = DataType::from_code(required("data type")? as u32)?;
    if let Some((_, interleave)) = get("interleave") {
        if !interleave.eq_ignore_ascii_case("bsq") {
            return Err(Error::Unsupported(format!("interleave `{interleave}`")));
        }
    }
    if let Some(order) = int("byte order")? {
        if order != 0 {
            return Err(Error::Unsupported(format!(
                "byte order {order} (big-endian)"
            )));
        }
    }
    let nodata = get("data ignore value")
        .map(|(line, v)| {
            v.parse::<f64>()
                .map_err(|_| perr(*line, format!("bad data ignore value `{v}`")))
        })
        .transpose()?;
    Ok(Header {
        samples,
        lines,
        bands,
        data_type,
        offset: int("header offset")?.unwrap_or(0),
        nodata,
        band_names: list("band names"),
        class_names: list("class names"),
        classes: int("classes")?,
    })
}

fn read_parts(path: &Path) -> Result<(Header, Vec<u8>, PathBuf)> {
    let hdr = header_file(path);
    let text = std::fs::read_to_string(&hdr).map_err(|e| Error::io(&hdr, e))?;
    let header = parse_header(&text, &hdr)?;
    let data_file = data_path(&hdr);
    let bytes = std::fs::read(&data_file).map_err(|e| Error::io(&data_file, e))?;
    let count = header.samples * header.lines * header.bands;
    let expected = header.offset + count * header.data_type.size();
    if bytes.len() != expected {
        return Err(Error::invalid(format!(
            "{}: header describes {} values ({expected} bytes) but the data file has {} bytes",
            data_file.display(),
            count,
            bytes.len()
        )));
    }
    Ok((header, bytes, data_file))
}

pub fn read_raster(path: impl AsRef<Path>) -> Result<Raster> {
    let (header, bytes, _) = read_parts(path.as_ref())?;
    let payload = &bytes[header.offset..];
    let data: Vec<f32> = match header.data_type {
        DataType::U8 => payload.iter().map(|&b| f32::from(b)).collect(),
        DataType::F32 => payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect(),
    };
    let band_names = header.band_names.filter(|n| n.len() == header.bands);
    Raster::new(header.lines, header.samples, header.bands, data)?
        .with_nodata(header.nodata)
        .with_band_names(band_names)?
        .with_data_type(header.data_type)
}

pub fn read_class_raster(path: impl AsRef<Path>) -> Result<ClassRaster> {
    let (header, bytes, _) = read_parts(path.as_ref())?;
    if header.data_type != DataType::U8 || header.bands != 1 {
        return Err(Error::Unsupported(
            "class rasters must be single-band unsigned 8-bit".into(),
        ));
    }
    let values = bytes[header.offset..].to_vec();
    let classes = match (header.class_names, header.classes) {
        // The first entry names code 0.
        (Some(names), _) if !names.is_empty() => ClassTable::new(names.into_iter().skip(1))?,
        (_, Some(n)) if n > 0 => ClassTable::numbered(n - 1)?,
        _ => ClassTable::numbered(usize::from(values.iter().copied().max().unwrap_or(0)))?,
    };
    ClassRaster::new(header.lines, header.samples, values, classes)
}

fn write_parts(path: &Path, header: String, data: &[u8]) -> Result<()> {
    let hdr = header_file(path);
    std::fs::write(&hdr, header).map_err(|e| Error::io(&hdr, e))?;
    let data_file = data_path(&hdr);
    std::fs::write(&data_file, data).map_err(|e| Error::io(&data_file, e))
}

fn brace_list(names: &[String]) -> String {
    format!("{{{}}}", names.join(", "))
}

pub fn write_raster(raster: &Raster, path: impl AsRef<Path>) -> Result<()> {
    let mut h = String::from("ENVI\n");
    let _ = writeln!(h, "samples = {}", raster.cols);
    let _ = writeln!(h, "lines = {}", raster.rows);
    let _ = writeln!(h, "bands = {}", raster.bands);
    h.push_str("header offset = 0\nfile type = ENVI Standard\n");
    let _ = writeln!(h, "data type = {}", raster.data_type.code());
    h.push_str("interleave = bsq\nbyte order = 0\n");
    if let Some(nd) = raster.nodata {
        let _ = writeln!(h, "data ignore value = {nd}");
    }
    if let Some(names) = &raster.band_names {
        let _ = writeln!(h, "band names = {}", brace_list(names));
    }
    let bytes: Vec<u8> = match raster.data_type {
        DataType::U8 => raster.data.iter().map(|&v| v as u8).collect(),
        DataType::F32 => raster.data.iter().flat_map(|v| v.to_le_bytes()).collect(),
    };
    write_parts(path.as_ref(), h, &bytes)
}

pub fn write_class_raster(map: &ClassRaster, path: impl AsRef<Path>) -> Result<()> {
    let mut h = String::from("ENVI\n");
    let _ = writeln!(h, "samples = {}", map.cols);
    let _ = writeln!(h, "lines = {}", map.rows);
    h.push_str("bands = 1\nheader offset = 0\nfile type = ENVI Classification\n");
    h.push_str("data type = 1\ninterleave = bsq\nbyte order = 0\n");
    let _ = writeln!(h, "classes = {}", map.classes.len() + 1);
    let mut names = vec!["unclassified".to_string()];
    names.extend(map.classes.names().iter().cloned());
    let _ = writeln!(h, "class names = {}", brace_list(&names));
    write_parts(path.as_ref(), h, &map.values)
}
