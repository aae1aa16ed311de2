//! The `rfgrid` text format.
//!
//! ```text
//! rfgrid <ndim> <d1> [d2] [d3] <delta>
//! <values, row-major, one line per run along the last axis>
//! ```
//!
//! Values are written with 17 significant digits, so a write → read → write
//! cycle reproduces the file byte for byte. The reader accepts any
//! whitespace layout after the header line.

use std::fmt::Write as _;
use std::path::Path;

use rft_core::{Grid, ScalarField};

use crate::error::{Error, Result};

pub const MAGIC: &str = "rfgrid";

pub fn format_field(field: &ScalarField) -> String {
    let grid = field.grid();
    let mut out = String::with_capacity(24 * grid.len() + 64);
    out.push_str(MAGIC);
    write!(out, " {}", grid.ndim()).unwrap();
    for d in grid.dims() {
        write!(out, " {d}").unwrap();
    }
    writeln!(out, " {}", grid.delta()).unwrap();
    let row = grid.dims()[grid.ndim() - 1];
    for chunk in field.values().chunks(row) {
        for (i, v) in chunk.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "{v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_field(text: &str) -> Result<ScalarField> {
    let (header, body) = text.split_once('\n').unwrap_or((text, ""));
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some(MAGIC) {
        return Err(Error::Format(format!("missing `{MAGIC}` header")));
    }
    let ndim: usize = parse_token(tokens.next(), "ndim")?;
    if !(1..=3).contains(&ndim) {
        return Err(Error::Format(format!("ndim must be 1, 2 or 3, got {ndim}")));
    }
    let dims = (0..ndim)
        .map(|_| parse_token::<usize>(tokens.next(), "dimension"))
        .collect::<Result<Vec<_>>>()?;
    let delta: f64 = parse_token(tokens.next(), "delta")?;
    if let Some(extra) = tokens.next() {
        return Err(Error::Format(format!("unexpected header token `{extra}`")));
    }
    let grid = Grid::new(&dims, delta)?;
    let values = body
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| Error::Format(format!("bad value `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != grid.len() {
        return Err(Error::Format(format!(
            "header promises {} values, found {}",
            grid.len(),
            values.len()
        )));
    }
    Ok(ScalarField::new(grid, values)?)
}

fn parse_token<T: std::str::FromStr>(token: Option<&str>, what: &str) -> Result<T> {
    let t = token.ok_or_else(|| Error::Format(format!("header is missing {what}")))?;
    t.parse().map_err(|_| Error::Format(format!("bad {what} `{t}` in header")))
}

pub fn read_field(path: &Path) -> Result<ScalarField> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_field(&text).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_field(path: &Path, field: &ScalarField) -> Result<()> {
    std::fs::write(path, format_field(field)).map_err(|e| Error::io(path, e))
}
