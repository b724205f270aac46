//! Statechart file formats: SCDL source text, the XMI subset and DOT output.

pub mod dot;
pub mod scdl;
pub mod xmi;

use std::path::Path;

use crate::error::{Code, Error, Result};

/// Model source formats recognised by file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Scdl,
    Xmi,
    Feature,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "scdl" => Some(Format::Scdl),
            "xmi" | "uml" | "xml" => Some(Format::Xmi),
            "feature" => Some(Format::Feature),
            _ => None,
        }
    }

    pub fn from_name(name: &str) -> Result<Format> {
        match name.to_ascii_lowercase().as_str() {
            "scdl" => Ok(Format::Scdl),
            "xmi" => Ok(Format::Xmi),
            "feature" => Ok(Format::Feature),
            other => Err(Error::new(
                Code::InvalidArgument,
                format!("unknown format {other:?}; expected scdl, xmi or feature"),
            )),
        }
    }
}
