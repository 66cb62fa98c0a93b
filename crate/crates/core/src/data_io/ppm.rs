//! Binary PPM (`P6`) rendering of class maps.

use std::path::Path;

use super::palette::ClassPalette;
use super::raster::ClassRaster;
use crate::error::{Error, Result};

pub fn encode_ppm(map: &ClassRaster, palette: &ClassPalette) -> Result<Vec<u8>> {
    let lut = palette.resolve(map.classes())?;
    let mut out = format!("P6\n{} {}\n255\n", map.cols(), map.rows()).into_bytes();
    out.reserve(3 * map.values().len());
    for &code in map.values() {
        out.extend_from_slice(&lut[usize::from(code)]);
    }
    Ok(out)
}

pub fn render_ppm(map: &ClassRaster, palette: &ClassPalette, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_ppm(map, palette)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::ClassTable;

    fn palette() -> ClassPalette {
        let mut p = ClassPalette::new();
        p.insert("unclassified", [9, 9, 9]);
        p.insert("water", [0, 0, 255]);
        p.insert("veg", [0, 200, 0]);
        p
    }

    #[test]
    fn single_pixel() {
        let m = ClassRaster::new(1, 1, vec![1], ClassTable::new(["water"]).unwrap()).unwrap();
        let bytes = encode_ppm(&m, &palette()).unwrap();
        assert_eq!(&bytes[..], b"P6\n1 1\n255\n\x00\x00\xff");
    }

    #[test]
    fn all_unclassified() {
        let m = ClassRaster::new(2, 3, vec![0; 6], ClassTable::new(["water"]).unwrap()).unwrap();
        let bytes = encode_ppm(&m, &palette()).unwrap();
        let header = b"P6\n3 2\n255\n".len();
        assert_eq!(bytes.len(), header + 18);
        assert!(bytes[header..].iter().all(|&b| b == 9));
    }

    #[test]
    fn checkerboard_layout() {
        let classes = ClassTable::new(["water", "veg"]).unwrap();
        let m = ClassRaster::new(2, 2, vec![1, 2, 2, 1], classes).unwrap();
        let bytes = encode_ppm(&m, &palette()).unwrap();
        let mut expected = b"P6\n2 2\n255\n".to_vec();
        expected.extend_from_slice(&[0, 0, 255, 0, 200, 0, 0, 200, 0, 0, 0, 255]);
        assert_eq!(bytes, expected);
    }

    #[test]
    fn missing_entry() {
        let m = ClassRaster::new(1, 1, vec![1], ClassTable::new(["sand"]).unwrap()).unwrap();
        assert!(encode_ppm(&m, &palette()).is_err());
    }
}
