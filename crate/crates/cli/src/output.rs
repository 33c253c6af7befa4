//! Deterministic CSV and sidecar-metadata emission.
//!
//! Data files carry no timestamps and are written atomically (temp file +
//! rename), so identical configurations produce byte-identical outputs.
//! Run metadata, including wall time, lives in a `.meta.json` sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// C-style %.12g: twelve significant digits, fixed or scientific form by
/// exponent, trailing zeros stripped.
pub fn format_g12(x: f64) -> String {
    const P: i32 = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let epos = sci.find('e').expect("exponential form");
    let exp: i32 = sci[epos + 1..].parse().expect("exponent");
    if !(-4..P).contains(&exp) {
        let mantissa = sci[..epos].trim_end_matches('0').trim_end_matches('.');
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (P - 1 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    }
}

/// One CSV cell: either a preformatted string or a %.12g number.
pub enum Cell {
    Text(String),
    Num(f64),
    Int(i64),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(x) => format_g12(*x),
            Cell::Int(i) => i.to_string(),
        }
    }
}

/// Writes a header + rows as comma-separated values with LF line endings,
/// atomically.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    let mut buf = String::new();
    buf.push_str(&header.join(","));
    buf.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(Cell::render).collect();
        buf.push_str(&line.join(","));
        buf.push('\n');
    }
    atomic_write(path, buf.as_bytes())
}

/// Writes JSON metadata next to a data file (`<stem>.meta.json`).
pub fn write_sidecar(data_path: &Path, meta: &serde_json::Value) -> Result<()> {
    let sidecar = sidecar_path(data_path);
    let body = serde_json::to_string_pretty(meta)?;
    atomic_write(&sidecar, body.as_bytes())
}

pub fn sidecar_path(data_path: &Path) -> PathBuf {
    let mut p = data_path.as_os_str().to_owned();
    p.push(".meta.json");
    PathBuf::from(p)
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = {
        let mut t = path.as_os_str().to_owned();
        t.push(".tmp");
        PathBuf::from(t)
    };
    {
        let mut f =
            fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Derives a sibling output path `<stem>_<suffix>.<ext>` from a base path.
pub fn derived_path(base: &Path, suffix: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "out".into());
    let ext = base
        .extension()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "csv".into());
    base.with_file_name(format!("{stem}_{suffix}.{ext}"))
}
