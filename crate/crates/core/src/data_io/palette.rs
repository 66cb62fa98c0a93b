//! Class colors. Text format, one entry per line: `classname R G B`.
//! Blank lines and `#` comments are ignored; `unclassified` sets the color of code 0.

use std::collections::BTreeMap;
use std::path::Path;

use crate::classes::ClassTable;
use crate::error::{Error, Result};

pub type Rgb = [u8; 3];

const UNCLASSIFIED_DEFAULT: Rgb = [0, 0, 0];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassPalette {
    entries: BTreeMap<String, Rgb>,
}

impl ClassPalette {
    pub fn new() -> Self {
        ClassPalette {
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, name: impl Into<String>, rgb: Rgb) {
        self.entries.insert(name.into(), rgb);
    }

    pub fn get(&self, name: &str) -> Option<Rgb> {
        self.entries.get(name).copied()
    }

    /// Distinct colors for `classes`, with familiar hues for the usual land cover names.
    pub fn default_for(classes: &ClassTable) -> Self {
        const FALLBACK: [Rgb; 8] = [
            [230, 25, 75],
            [60, 180, 75],
            [255, 225, 25],
            [0, 130, 200],
            [245, 130, 48],
            [145, 30, 180],
            [70, 240, 240],
            [240, 50, 230],
        ];
        let mut p = ClassPalette::new();
        p.insert("unclassified", UNCLASSIFIED_DEFAULT);
        for (i, name) in classes.names().iter().enumerate() {
            let rgb = match name.as_str() {
                "water" => [0, 0, 255],
                "built-up" => [200, 0, 0],
                "thick-swamp" => [0, 100, 80],
                "light-swamp" => [120, 200, 160],
                "other-vegetation" => [40, 160, 40],
                _ => FALLBACK[i % FALLBACK.len()],
            };
            p.insert(name.clone(), rgb);
        }
        p
    }

    /// RGB per code: index 0 is unclassified, then one entry per class.
    pub fn resolve(&self, classes: &ClassTable) -> Result<Vec<Rgb>> {
        let mut lut = vec![self.get("unclassified").unwrap_or(UNCLASSIFIED_DEFAULT)];
        for name in classes.names() {
            lut.push(self.get(name).ok_or_else(|| {
                Error::invalid(format!("palette has no color for class `{name}`"))
            })?);
        }
        Ok(lut)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut p = ClassPalette::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: idx as u64 + 1,
                message,
            };
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [name, r, g, b] = parts[..] else {
                return Err(perr(format!("expected `name R G B`, found `{line}`")));
            };
            let channel = |s: &str| {
                s.parse::<u8>()
                    .map_err(|_| perr(format!("color channel `{s}` is not in 0..=255")))
            };
            p.insert(name, [channel(r)?, channel(g)?, channel(b)?]);
        }
        Ok(p)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(name, [r, g, b])| format!("{name} {r} {g} {b}\n"))
            .collect()
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

impl Default for ClassPalette {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_resolve() {
        let p = ClassPalette::parse(
            "# comment\nwater 0 0 255\n\nveg 0 128 0 # trailing\n",
            Path::new("p"),
        )
        .unwrap();
        let classes = ClassTable::new(["water", "veg"]).unwrap();
        assert_eq!(
            p.resolve(&classes).unwrap(),
            vec![[0, 0, 0], [0, 0, 255], [0, 128, 0]]
        );
        let missing = ClassTable::new(["water", "sand"]).unwrap();
        assert!(p.resolve(&missing).is_err());
    }

    #[test]
    fn bad_lines() {
        assert!(ClassPalette::parse("water 0 0\n", Path::new("p")).is_err());
        assert!(ClassPalette::parse("water 0 0 256\n", Path::new("p")).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let p = ClassPalette::default_for(&ClassTable::new(["water", "x"]).unwrap());
        assert_eq!(
            ClassPalette::parse(&p.to_text(), Path::new("p")).unwrap(),
            p
        );
    }
}
