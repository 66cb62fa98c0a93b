use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// On-disk code for pixels that carry no class.
pub const UNCLASSIFIED: u8 = 0;

/// Ordered, unique class names. In memory a class is its 0-based index;
/// on disk (rasters, error-matrix inputs) it is the 1-based code `index + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ClassTable {
    names: Vec<String>,
}

impl ClassTable {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > usize::from(u8::MAX) {
            return Err(Error::invalid(format!(
                "at most {} classes are supported, got {}",
                u8::MAX,
                names.len()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(Error::invalid(format!("class {i} has an empty name")));
            }
            if names[..i].contains(name) {
                return Err(Error::invalid(format!("duplicate class name `{name}`")));
            }
        }
        Ok(ClassTable { names })
    }

    /// `class1 .. classK`, used when a file carries codes but no names.
    pub fn numbered(k: usize) -> Result<Self> {
        Self::new((1..=k).map(|i| format!("class{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Name for a 1-based code, `"unclassified"` for 0.
    pub fn code_name(&self, code: u8) -> &str {
        match code {
            UNCLASSIFIED => "unclassified",
            c => self
                .names
                .get(usize::from(c) - 1)
                .map_or("?", String::as_str),
        }
    }

    pub fn code(index: usize) -> u8 {
        u8::try_from(index + 1).expect("class tables hold at most 255 classes")
    }

    pub fn index(code: u8) -> Option<usize> {
        (code != UNCLASSIFIED).then(|| usize::from(code) - 1)
    }

    /// Appends `name` unless present; returns its index.
    pub(crate) fn intern(&mut self, name: &str) -> Result<usize> {
        if let Some(i) = self.index_of(name) {
            return Ok(i);
        }
        if self.names.len() >= usize::from(u8::MAX) {
            return Err(Error::invalid("too many classes"));
        }
        self.names.push(name.to_string());
        Ok(self.names.len() - 1)
    }
}

impl TryFrom<Vec<String>> for ClassTable {
    type Error = Error;

    fn try_from(names: Vec<String>) -> Result<Self> {
        ClassTable::new(names)
    }
}

impl From<ClassTable> for Vec<String> {
    fn from(t: ClassTable) -> Self {
        t.names
    }
}
