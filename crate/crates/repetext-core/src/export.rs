//! Serialization of analysis products to stable, documented file formats.
//! All exporters are deterministic: identical inputs produce identical
//! bytes.

use std::io;
use std::path::Path;

use thiserror::Error;

pub mod band;
pub mod graph;
pub mod report;
pub mod tables;

pub use band::{band_to_svg, SvgOptions};
pub use graph::{graph_from_json, graph_to_dot, graph_to_graphml, graph_to_json, GraphFormat};
pub use report::{report_to_json, report_to_text, Report};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid color {0:?}: expected #RRGGBB")]
    InvalidColor(String),
    #[error("invalid dimension {name}: {value} (must be positive)")]
    InvalidDimension { name: &'static str, value: f64 },
}

/// `true` for strings like `#0A3f9c`.
pub fn is_hex_color(s: &str) -> bool {
    s.len() == 7
        && s.starts_with('#')
        && s[1..].chars().all(|c| c.is_ascii_hexdigit())
}

/// Write via a sibling temp file and rename, so concurrent exporters never
/// expose a half-written file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

/// Escape the five XML special characters.
pub(crate) fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            other => out.push(other),
        }
    }
    out
}
