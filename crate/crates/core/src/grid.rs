//! Sampled potentials on regular 1D/2D/3D lattices and their CSV/JSON forms.
//!
//! CSV layout (LF line endings, '.' decimal separator, 9 significant digits):
//!
//! ```text
//! # config_hash=<hex>
//! # axis=<name>,start=<m>,step=<m>,count=<n>      (one line per axis)
//! <name>_um,...,U_uK
//! ```
//!
//! Rows run over the last axis fastest. JSON stores energies in joules with
//! shortest round-trip float formatting, so JSON export/import is lossless.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{joule_to_microkelvin, microkelvin_to_joule};
use crate::error::{Result, TrapError};

pub const GRID_FORMAT: &str = "cwewt-grid/1";
pub const CSV_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    /// m
    pub start: f64,
    /// m
    pub step: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, start: f64, step: f64, count: usize) -> Self {
        Axis { name: name.into(), start, step, count }
    }

    /// Uniform axis from `from` to `to` inclusive.
    pub fn spanning(name: impl Into<String>, from: f64, to: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(TrapError::invalid("axis needs at least one sample"));
        }
        if !from.is_finite() || !to.is_finite() {
            return Err(TrapError::invalid("axis bounds must be finite"));
        }
        let step = if count > 1 { (to - from) / (count - 1) as f64 } else { 0.0 };
        Ok(Axis::new(name, from, step, count))
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialGrid {
    pub axes: Vec<Axis>,
    /// J, row-major with the last axis fastest.
    pub values: Vec<f64>,
    pub config_hash: String,
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    format: String,
    config_hash: String,
    energy_unit: String,
    axes: Vec<Axis>,
    /// NaN (escaped columns in minima products) is stored as null.
    values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridFormat {
    Csv,
    Json,
}

impl GridFormat {
    pub fn extension(self) -> &'static str {
        match self {
            GridFormat::Csv => "csv",
            GridFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for GridFormat {
    type Err = TrapError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(GridFormat::Csv),
            "json" => Ok(GridFormat::Json),
            other => Err(TrapError::invalid(format!("unknown format `{other}`"))),
        }
    }
}

impl PotentialGrid {
    pub fn new(axes: Vec<Axis>, values: Vec<f64>, config_hash: impl Into<String>) -> Result<Self> {
        let grid = PotentialGrid { axes, values, config_hash: config_hash.into() };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(TrapError::invalid("grid has no axes"));
        }
        if self.axes.iter().any(|a| a.count == 0) {
            return Err(TrapError::invalid("grid axis with zero samples"));
        }
        let expected: usize = self.axes.iter().map(|a| a.count).product();
        if expected != self.values.len() {
            return Err(TrapError::invalid(format!(
                "grid has {} values, axes imply {expected}",
                self.values.len()
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    /// Multi-index of flat sample `flat`.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            idx[k] = flat % axis.count;
            flat /= axis.count;
        }
        idx
    }

    pub fn coordinates(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat)
            .into_iter()
            .zip(&self.axes)
            .map(|(i, a)| a.coordinate(i))
            .collect()
    }

    pub fn values_microkelvin(&self) -> Vec<f64> {
        self.values.iter().map(|&v| joule_to_microkelvin(v)).collect()
    }

    /// Index and value of the lowest finite sample.
    pub fn argmin(&self) -> Option<(usize, f64)> {
        self.values
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .fold(None, |best, (i, v)| match best {
                Some((_, b)) if b <= v => best,
                _ => Some((i, v)),
            })
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# config_hash={}", self.config_hash).unwrap();
        for a in &self.axes {
            writeln!(out, "# axis={},start={:e},step={:e},count={}", a.name, a.start, a.step, a.count)
                .unwrap();
        }
        let header: Vec<String> = self.axes.iter().map(|a| format!("{}_um", a.name)).collect();
        writeln!(out, "{},U_uK", header.join(",")).unwrap();
        for (flat, &v) in self.values.iter().enumerate() {
            for (i, a) in self.unravel(flat).into_iter().zip(&self.axes) {
                out.push_str(&format_significant(a.coordinate(i) * 1e6, CSV_DIGITS));
                out.push(',');
            }
            out.push_str(&format_significant(joule_to_microkelvin(v), CSV_DIGITS));
            out.push('\n');
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut hash = String::new();
        let mut axes = Vec::new();
        let mut values = Vec::new();
        let mut header_seen = false;
        for (lineno, line) in text.lines().enumerate() {
            let err = |m: String| TrapError::Config {
                message: m,
                line: Some(lineno + 1),
                column: None,
                field: None,
            };
            if let Some(meta) = line.strip_prefix("# ") {
                if let Some(h) = meta.strip_prefix("config_hash=") {
                    hash = h.to_string();
                } else if let Some(spec) = meta.strip_prefix("axis=") {
                    axes.push(parse_axis(spec).map_err(err)?);
                }
                continue;
            }
            if !header_seen {
                header_seen = true;
                let cols = line.split(',').count();
                if cols != axes.len() + 1 {
                    return Err(err(format!("expected {} columns, header has {cols}", axes.len() + 1)));
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let last = line.rsplit(',').next().unwrap_or("");
            let uk: f64 = last.parse().map_err(|_| err(format!("bad energy value `{last}`")))?;
            values.push(microkelvin_to_joule(uk));
        }
        PotentialGrid::new(axes, values, hash)
    }

    pub fn to_json_string(&self) -> String {
        let doc = GridJson {
            format: GRID_FORMAT.to_string(),
            config_hash: self.config_hash.clone(),
            energy_unit: "J".to_string(),
            axes: self.axes.clone(),
            values: self.values.iter().map(|v| v.is_finite().then_some(*v)).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("grid serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: GridJson = serde_json::from_str(text).map_err(|e| TrapError::Config {
            message: e.to_string(),
            line: Some(e.line()),
            column: Some(e.column()),
            field: None,
        })?;
        if doc.format != GRID_FORMAT {
            return Err(TrapError::config_field("format", format!("unsupported `{}`", doc.format)));
        }
        let values = doc.values.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect();
        PotentialGrid::new(doc.axes, values, doc.config_hash)
    }

    pub fn write(&self, path: impl AsRef<Path>, format: GridFormat) -> Result<()> {
        let text = match format {
            GridFormat::Csv => self.to_csv_string(),
            GridFormat::Json => self.to_json_string(),
        };
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_csv_str(&text),
        }
    }
}

fn parse_axis(spec: &str) -> std::result::Result<Axis, String> {
    let mut parts = spec.split(',');
    let name = parts.next().ok_or("missing axis name")?.to_string();
    let mut start = None;
    let mut step = None;
    let mut count = None;
    for part in parts {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("bad axis field `{part}`"))?;
        match k {
            "start" => start = v.parse::<f64>().ok(),
            "step" => step = v.parse::<f64>().ok(),
            "count" => count = v.parse::<usize>().ok(),
            _ => return Err(format!("unknown axis field `{k}`")),
        }
    }
    match (start, step, count) {
        (Some(start), Some(step), Some(count)) => Ok(Axis { name, start, step, count }),
        _ => Err(format!("incomplete axis spec `{spec}`")),
    }
}

/// Positional decimal with `digits` significant digits (scientific notation
/// for very large or very small magnitudes).
pub fn format_significant(value: f64, digits: usize) -> String {
    if value.is_nan() {
        return "nan".to_string();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if value == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", digits - 1, value);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-7..=15).contains(&exp) {
        return sci;
    }
    let negative = mantissa.starts_with('-');
    let digits_only: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::with_capacity(digits + 10);
    if negative {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&digits_only);
    } else {
        let int_len = exp as usize + 1;
        if int_len >= digits_only.len() {
            out.push_str(&digits_only);
            for _ in digits_only.len()..int_len {
                out.push('0');
            }
        } else {
            out.push_str(&digits_only[..int_len]);
            out.push('.');
            out.push_str(&digits_only[int_len..]);
        }
    }
    out
}
