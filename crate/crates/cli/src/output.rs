//! JSON reports and CSV curves.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use momcut::{ComparisonReport, GridFunction1D};

use crate::error::{CliError, Result};
use crate::pipeline::{Curves, Curves2d};

/// Pretty-printed JSON with a trailing newline.
pub fn report_json(report: &ComparisonReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

pub fn emit_report(report: &ComparisonReport, path: &Path) -> Result<()> {
    std::fs::write(path, report_json(report)?).map_err(|e| CliError::io(path, e))
}

pub fn write_curves(curves: &Curves, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "x,f,g,f_smoothed,g_smoothed")?;
    for i in 0..curves.x.len() {
        writeln!(
            out,
            "{},{},{},{},{}",
            curves.x[i], curves.f[i], curves.g[i], curves.f_smoothed[i], curves.g_smoothed[i]
        )?;
    }
    Ok(())
}

pub fn write_curves_2d(curves: &Curves2d, out: &mut impl Write) -> std::io::Result<()> {
    let n = curves.points_per_axis;
    let last = (n - 1) as f64;
    writeln!(out, "x1,x2,f,g,f_smoothed,g_smoothed")?;
    for i in 0..n {
        for j in 0..n {
            let k = i * n + j;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                i as f64 / last,
                j as f64 / last,
                curves.f[k],
                curves.g[k],
                curves.f_smoothed[k],
                curves.g_smoothed[k]
            )?;
        }
    }
    Ok(())
}

/// `x,f` rows of one density.
pub fn write_density(f: &GridFunction1D, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "x,f")?;
    for (x, v) in f.nodes().zip(f.values()) {
        writeln!(out, "{x},{v}")?;
    }
    Ok(())
}

fn to_file(
    path: &Path,
    write: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    write(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path, e))
}

pub fn emit_curves(curves: &Curves, path: &Path) -> Result<()> {
    to_file(path, |out| write_curves(curves, out))
}

pub fn emit_curves_2d(curves: &Curves2d, path: &Path) -> Result<()> {
    to_file(path, |out| write_curves_2d(curves, out))
}

pub fn emit_density(f: &GridFunction1D, path: &Path) -> Result<()> {
    to_file(path, |out| write_density(f, out))
}
