//! CSV assembly and number formatting.
//!
//! All numeric cells use fixed-precision scientific notation so that a rerun
//! with the same seed reproduces the output byte for byte; weight cells use
//! the shortest round-trip form since they come from exact grid fractions.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// Output units for rate-valued columns. Internal computation is always in
/// nats; the scale is applied at formatting time only.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Units {
    Nats,
    Bits,
}

impl Units {
    pub fn scale(self) -> f64 {
        match self {
            Units::Nats => 1.0,
            Units::Bits => 1.0 / std::f64::consts::LN_2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

/// Dimensionless cell: residuals, gaps without units, scan values.
pub fn num(v: f64) -> String {
    format!("{v:.12e}")
}

/// Rate-valued cell, scaled into the requested units.
pub fn rate(v: f64, units: Units) -> String {
    num(v * units.scale())
}

/// Weight cell; simplex weights are exact binary fractions of small
/// integers, so the shortest round-trip form is stable.
pub fn weight(v: f64) -> String {
    format!("{v}")
}

/// A CSV document under construction: fixed header plus appended rows.
pub struct Csv {
    lines: Vec<String>,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        Csv {
            lines: vec![header.to_string()],
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.lines.push(cells.join(","));
    }

    pub fn render(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

/// Writes to the path when given, otherwise to stdout.
pub fn emit(path: Option<&Path>, content: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, content),
        None => io::stdout().write_all(content.as_bytes()),
    }
}
