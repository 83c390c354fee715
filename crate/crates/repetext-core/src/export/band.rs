//! Deterministic SVG rendering of the paragraph band strip.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::export::{is_hex_color, xml_escape, ExportError};
use crate::sequences::BandSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvgOptions {
    /// Minimum image width in pixels; the strip widens it as needed.
    #[serde(default = "default_width")]
    pub width: f64,
    /// Width of one paragraph cell in pixels.
    #[serde(default = "default_cell_width")]
    pub cell_width: f64,
    /// Height of the strip in pixels.
    #[serde(default = "default_strip_height")]
    pub strip_height: f64,
}

fn default_width() -> f64 {
    640.0
}
fn default_cell_width() -> f64 {
    2.0
}
fn default_strip_height() -> f64 {
    48.0
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width: default_width(),
            cell_width: default_cell_width(),
            strip_height: default_strip_height(),
        }
    }
}

impl SvgOptions {
    pub fn validate(&self) -> Result<(), ExportError> {
        for (name, value) in [
            ("width", self.width),
            ("cell_width", self.cell_width),
            ("strip_height", self.strip_height),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ExportError::InvalidDimension { name, value });
            }
        }
        Ok(())
    }
}

const MARGIN: f64 = 10.0;
const LEGEND_ROW: f64 = 18.0;
const LEGEND_SWATCH: f64 = 12.0;
const UNLABELED_FILL: &str = "#FFFFFF";

/// Pixel values formatted with at most two decimals, trailing zeros trimmed.
fn px(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// One `rect` of class "cell" per paragraph; multi-label cells stack one
/// sub-rect per color. A legend of component names and colors sits below
/// the strip.
pub fn band_to_svg(spec: &BandSpec, opts: &SvgOptions) -> Result<String, ExportError> {
    opts.validate()?;
    for entry in &spec.legend {
        if !is_hex_color(&entry.color) {
            return Err(ExportError::InvalidColor(entry.color.clone()));
        }
    }
    for cell in &spec.cells {
        for color in &cell.colors {
            if !is_hex_color(color) {
                return Err(ExportError::InvalidColor(color.clone()));
            }
        }
    }

    let strip_w = spec.cells.len() as f64 * opts.cell_width;
    let width = opts.width.max(strip_w + 2.0 * MARGIN);
    let legend_h = spec.legend.len() as f64 * LEGEND_ROW;
    let height = MARGIN + opts.strip_height + MARGIN + legend_h + MARGIN;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        px(width),
        px(height),
        px(width),
        px(height)
    );
    let _ = writeln!(out, "  <g id=\"cells\">");
    for (i, cell) in spec.cells.iter().enumerate() {
        let x = MARGIN + i as f64 * opts.cell_width;
        if cell.colors.is_empty() {
            let _ = writeln!(
                out,
                "    <rect class=\"cell\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                px(x),
                px(MARGIN),
                px(opts.cell_width),
                px(opts.strip_height),
                UNLABELED_FILL
            );
        } else {
            let sub_h = opts.strip_height / cell.colors.len() as f64;
            for (k, color) in cell.colors.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "    <rect class=\"cell\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                    px(x),
                    px(MARGIN + k as f64 * sub_h),
                    px(opts.cell_width),
                    px(sub_h),
                    color
                );
            }
        }
    }
    let _ = writeln!(out, "  </g>");

    let _ = writeln!(out, "  <g id=\"legend\">");
    for (i, entry) in spec.legend.iter().enumerate() {
        let y = MARGIN + opts.strip_height + MARGIN + i as f64 * LEGEND_ROW;
        let _ = writeln!(
            out,
            "    <rect class=\"legend-swatch\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#000000\"/>",
            px(MARGIN),
            px(y),
            px(LEGEND_SWATCH),
            px(LEGEND_SWATCH),
            entry.color
        );
        let _ = writeln!(
            out,
            "    <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            px(MARGIN + LEGEND_SWATCH + 6.0),
            px(y + LEGEND_SWATCH - 2.0),
            xml_escape(&entry.name)
        );
    }
    let _ = writeln!(out, "  </g>");
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{BandCell, LegendEntry};

    fn legend() -> Vec<LegendEntry> {
        vec![LegendEntry {
            component: 0,
            name: "Blue & Co".to_string(),
            color: "#0000FF".to_string(),
        }]
    }

    fn cell(idx: usize, colors: &[&str]) -> BandCell {
        BandCell {
            paragraph_idx: idx,
            colors: colors.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn count_cells(svg: &str) -> usize {
        svg.matches("class=\"cell\"").count()
    }

    #[test]
    fn one_rect_per_paragraph() {
        let spec = BandSpec {
            cells: vec![cell(0, &[]), cell(1, &["#0000FF"]), cell(2, &[])],
            legend: legend(),
        };
        let svg = band_to_svg(&spec, &SvgOptions::default()).unwrap();
        assert_eq!(count_cells(&svg), 3);
        assert_eq!(svg.matches("fill=\"#0000FF\"").count(), 2); // cell + swatch
        assert_eq!(svg.matches("fill=\"#FFFFFF\"").count(), 2);
        assert!(svg.contains("Blue &amp; Co"));
    }

    #[test]
    fn multi_label_cells_stack_sub_rects() {
        let spec = BandSpec {
            cells: vec![cell(0, &["#0000FF", "#FF0000"]), cell(1, &[])],
            legend: legend(),
        };
        let svg = band_to_svg(&spec, &SvgOptions::default()).unwrap();
        assert_eq!(count_cells(&svg), 3);
        assert!(svg.contains("height=\"24\"")); // 48 / 2 stacked
    }

    #[test]
    fn zero_paragraphs_renders_legend_only() {
        let spec = BandSpec {
            cells: vec![],
            legend: legend(),
        };
        let svg = band_to_svg(&spec, &SvgOptions::default()).unwrap();
        assert_eq!(count_cells(&svg), 0);
        assert!(svg.contains("legend-swatch"));
    }

    #[test]
    fn identical_inputs_identical_bytes() {
        let spec = BandSpec {
            cells: vec![cell(0, &["#0000FF"])],
            legend: legend(),
        };
        let a = band_to_svg(&spec, &SvgOptions::default()).unwrap();
        let b = band_to_svg(&spec, &SvgOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_color_and_dimensions_rejected() {
        let spec = BandSpec {
            cells: vec![cell(0, &["blue"])],
            legend: vec![],
        };
        assert!(matches!(
            band_to_svg(&spec, &SvgOptions::default()),
            Err(ExportError::InvalidColor(_))
        ));
        let spec = BandSpec {
            cells: vec![],
            legend: vec![],
        };
        let opts = SvgOptions {
            cell_width: 0.0,
            ..SvgOptions::default()
        };
        assert!(matches!(
            band_to_svg(&spec, &opts),
            Err(ExportError::InvalidDimension { .. })
        ));
    }
}
