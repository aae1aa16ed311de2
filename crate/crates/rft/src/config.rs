//! Flat `key = value` simulation configs for `rft ec-curve`.
//!
//! ```text
//! # key object, 50 replicates
//! dims = 60,37
//! fwhm = 10
//! replicates = 50
//! thresholds = -1:0.1:1
//! signal = key
//! ```
//!
//! Keys: `dims` (required), `delta` (1), `fwhm` (required, 0 = no
//! smoothing), `sigma_w` (1), `replicates` (required), `thresholds`
//! (required; `start:step:stop` or a comma list), `seed` (0), `signal`
//! (`none`, `cos`, `key` or `file:PATH`), `standardize` (`none`,
//! `theoretical` or `sample`) and `pad` (`true`/`false`). Without a signal the
//! defaults are theoretical standardization with padding, with a signal they
//! are sample standardization without padding.

use std::path::{Path, PathBuf};

use rft_core::montecarlo::{SimConfig, Standardization};
use rft_core::{grid, Grid, RngSeed, ScalarField};

use crate::error::{Error, Result};

/// Where the optional signal comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalSource {
    None,
    Cos,
    Key,
    File(PathBuf),
}

impl SignalSource {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "cos" => Ok(Self::Cos),
            "key" => Ok(Self::Key),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(Self::File(PathBuf::from(p))),
                _ => Err(Error::Usage(format!("unknown signal `{s}` (none, cos, key or file:PATH)"))),
            },
        }
    }

    pub fn build(&self, grid: &Grid) -> Result<Option<ScalarField>> {
        Ok(match self {
            Self::None => None,
            Self::Cos => Some(grid::synthetic_signal(grid)?),
            Self::Key => Some(grid::key_signal(grid)?),
            Self::File(path) => {
                let f = crate::rfgrid::read_field(path)?;
                if f.grid().dims() != grid.dims() {
                    return Err(Error::Usage(format!(
                        "signal {} has dims {:?}, expected {:?}",
                        path.display(),
                        f.grid().dims(),
                        grid.dims()
                    )));
                }
                Some(ScalarField::new(*grid, f.into_values())?)
            }
        })
    }
}

pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Usage(format!("bad dimension `{t}` in `{s}`"))))
        .collect()
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Usage(format!("bad number `{t}` in `{s}`"))))
        .collect()
}

/// `start:step:stop` (inclusive, values rounded to 1e-12) or a comma list.
pub fn parse_thresholds(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [_] => parse_list(s),
        [start, step, stop] => {
            let num = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Usage(format!("bad number `{t}` in range `{s}`")))
            };
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
                return Err(Error::Usage(format!("range `{s}` needs step > 0 and start ≤ stop")));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            if n > 1_000_000 {
                return Err(Error::Usage(format!("range `{s}` has too many thresholds")));
            }
            Ok((0..n)
                .map(|i| {
                    let v = ((start + i as f64 * step) * 1e12).round() / 1e12;
                    if v == 0.0 {
                        0.0
                    } else {
                        v
                    }
                })
                .collect())
        }
        _ => Err(Error::Usage(format!("thresholds `{s}` are neither a list nor start:step:stop"))),
    }
}

pub fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Usage(format!("expected true or false, got `{s}`"))),
    }
}

pub fn parse_standardization(s: &str) -> Result<Standardization> {
    match s {
        "none" => Ok(Standardization::None),
        "theoretical" => Ok(Standardization::Theoretical),
        "sample" => Ok(Standardization::Sample),
        _ => Err(Error::Usage(format!("unknown standardization `{s}`"))),
    }
}

/// Parses config text. Relative `file:` signal paths resolve against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<SimConfig> {
    let mut dims = None;
    let mut delta = 1.0;
    let mut fwhm = None;
    let mut sigma_w = 1.0;
    let mut replicates = None;
    let mut thresholds = None;
    let mut seed = 0u64;
    let mut signal = SignalSource::None;
    let mut standardize = None;
    let mut pad = None;

    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Format(format!("line {}: {msg}", n + 1));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key = value, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let number = |v: &str| v.parse::<f64>().map_err(|_| bad(format!("`{key}` needs a number, got `{v}`")));
        let wrap = |e: Error| match e {
            Error::Usage(msg) => bad(msg),
            other => other,
        };
        match key {
            "dims" => dims = Some(parse_dims(value).map_err(wrap)?),
            "delta" => delta = number(value)?,
            "fwhm" => fwhm = Some(number(value)?),
            "sigma_w" => sigma_w = number(value)?,
            "replicates" => {
                replicates = Some(value.parse::<usize>().map_err(|_| bad(format!("bad replicate count `{value}`")))?)
            }
            "thresholds" => thresholds = Some(parse_thresholds(value).map_err(wrap)?),
            "seed" => seed = value.parse().map_err(|_| bad(format!("bad seed `{value}`")))?,
            "signal" => {
                signal = match SignalSource::parse(value).map_err(wrap)? {
                    SignalSource::File(p) if p.is_relative() => SignalSource::File(base.join(p)),
                    s => s,
                }
            }
            "standardize" => standardize = Some(parse_standardization(value).map_err(wrap)?),
            "pad" => pad = Some(parse_bool(value).map_err(wrap)?),
            _ => return Err(bad(format!("unknown key `{key}`"))),
        }
    }
    let missing = |k: &str| Error::Format(format!("config is missing `{k}`"));
    let grid = Grid::new(&dims.ok_or_else(|| missing("dims"))?, delta)?;
    let has_signal = signal != SignalSource::None;
    let config = SimConfig {
        signal: signal.build(&grid)?,
        grid,
        fwhm: fwhm.ok_or_else(|| missing("fwhm"))?,
        sigma_w,
        n_replicates: replicates.ok_or_else(|| missing("replicates"))?,
        thresholds: thresholds.ok_or_else(|| missing("thresholds"))?,
        base_seed: RngSeed::new(seed, 0),
        standardization: standardize.unwrap_or(if has_signal {
            Standardization::Sample
        } else {
            Standardization::Theoretical
        }),
        stationary_padding: pad.unwrap_or(!has_signal),
    };
    config.validate()?;
    Ok(config)
}

pub fn read_config(path: &Path) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}
