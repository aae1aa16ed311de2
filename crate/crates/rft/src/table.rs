//! CSV output of mean Euler characteristic curves.

use std::io::Write;

use rft_core::montecarlo::{ReplicateSummary, SimConfig};
use rft_core::rft::expected_ec;
use rft_core::smoothing::{smoothness_params, Smoothness};
use rft_core::topology::{closed_form_intrinsic_volumes, Shape};
use rft_core::FieldSpec;

use crate::error::Result;

pub const HEADER: [&str; 4] = ["h", "mean_ec", "expected_ec", "stderr_ec"];

/// Null expected EC of the config's full grid at every threshold, or NaN
/// when the field is unsmoothed (λ undefined).
pub fn null_expected_ec(config: &SimConfig) -> Result<Vec<f64>> {
    if config.fwhm == 0.0 {
        return Ok(vec![f64::NAN; config.thresholds.len()]);
    }
    let lambda = smoothness_params(Smoothness::Fwhm(config.fwhm))?.lambda();
    let spec = FieldSpec::gaussian(lambda)?;
    let sides = config.grid.dims().iter().map(|&n| n as f64 * config.grid.delta()).collect();
    let iv = closed_form_intrinsic_volumes(&Shape::Box(sides))?;
    Ok(config
        .thresholds
        .iter()
        .map(|&h| expected_ec(&iv, &spec, h))
        .collect::<rft_core::Result<Vec<_>>>()?)
}

pub fn write_ec_curve<W: Write>(out: W, summary: &ReplicateSummary, expected: &[f64]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    for (t, &h) in summary.thresholds.iter().enumerate() {
        w.write_record([
            h.to_string(),
            summary.mean_ec[t].to_string(),
            expected[t].to_string(),
            summary.ec_stderr[t].to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
