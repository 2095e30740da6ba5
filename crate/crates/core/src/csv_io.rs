//! CSV surfaces of the solver products. All files are UTF-8,
//! comma-separated, LF line endings, one header row; floats are written
//! with 17 significant digits so parsing a file reproduces the values
//! bit-exactly. Files that carry scalar summaries (discrepancies, the
//! refinement step) put them on a leading `#` comment line.

use std::io::{BufRead, Write};

use crate::driver::IterationReport;
use crate::error::{Result, StefanError};
use crate::grid::{BoundaryCurve, Discretization, TemperatureField};
use crate::study::StudyRow;
use crate::variational::{DiscrepancyReport, RefinementOutcome};

/// 17 significant decimal digits: enough for an exact f64 round trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(text: &str, context: &str) -> Result<f64> {
    text.trim()
        .parse()
        .map_err(|_| StefanError::CsvParse(format!("bad float '{text}' in {context}")))
}

/// Interface positions as `t,s` rows.
pub fn write_boundary_csv<W: Write>(w: &mut W, disc: &Discretization, curve: &BoundaryCurve) -> std::io::Result<()> {
    writeln!(w, "t,s")?;
    for n in 0..=disc.m() {
        writeln!(w, "{},{}", fmt_f64(disc.time(n)), fmt_f64(curve.get(n)))?;
    }
    Ok(())
}

/// Reads a `t,s` file back into times and a raw curve (no admissibility
/// check; callers validate where it matters).
pub fn read_boundary_csv<R: BufRead>(r: R) -> Result<(Vec<f64>, BoundaryCurve)> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line.map_err(|e| StefanError::CsvParse(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if idx == 0 || line == "t,s" {
            if !line.starts_with('t') {
                return Err(StefanError::CsvParse("missing t,s header".into()));
            }
            continue;
        }
        let mut parts = line.split(',');
        let t = parts.next().ok_or_else(|| StefanError::CsvParse(format!("short row {idx}")))?;
        let s = parts.next().ok_or_else(|| StefanError::CsvParse(format!("short row {idx}")))?;
        times.push(parse_f64(t, "boundary csv")?);
        values.push(parse_f64(s, "boundary csv")?);
    }
    if values.is_empty() {
        return Err(StefanError::CsvParse("boundary csv holds no rows".into()));
    }
    Ok((times, BoundaryCurve::from_values_unchecked(values)))
}

/// Transformed temperatures as `t,xi,F` rows, time-major.
pub fn write_field_csv<W: Write>(w: &mut W, disc: &Discretization, field: &TemperatureField) -> std::io::Result<()> {
    writeln!(w, "t,xi,F")?;
    for n in 0..=disc.m() {
        let t = fmt_f64(disc.time(n));
        for i in 0..=disc.n() {
            writeln!(w, "{},{},{}", t, fmt_f64(disc.xi(i)), fmt_f64(field.get(i, n)))?;
        }
    }
    Ok(())
}

/// Per-iteration convergence diagnostics: `k,delta,clamped,sign_at_max_dev`.
/// The sign column is empty when the run had no reference front.
pub fn write_iterations_csv<W: Write>(w: &mut W, report: &IterationReport) -> std::io::Result<()> {
    writeln!(w, "k,delta,clamped,sign_at_max_dev")?;
    for k in 0..report.iterations() {
        let sign = report
            .sign_pattern
            .get(k)
            .map(|s| s.to_string())
            .unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{}",
            k + 1,
            fmt_f64(report.deltas[k]),
            report.clamps_per_iteration[k],
            sign
        )?;
    }
    Ok(())
}

/// Full front history as `k,t,s` rows (iterate 0 is the initial guess).
pub fn write_iterate_dump_csv<W: Write>(w: &mut W, disc: &Discretization, report: &IterationReport) -> std::io::Result<()> {
    writeln!(w, "k,t,s")?;
    for (k, curve) in report.iterates.iter().enumerate() {
        for n in 0..=disc.m() {
            writeln!(w, "{},{},{}", k, fmt_f64(disc.time(n)), fmt_f64(curve.get(n)))?;
        }
    }
    Ok(())
}

/// Refinement-study table: `dxi,error,order,converged,iterations`; the
/// order column is empty on the first row.
pub fn write_study_csv<W: Write>(w: &mut W, rows: &[StudyRow]) -> std::io::Result<()> {
    writeln!(w, "dxi,error,order,converged,iterations")?;
    for row in rows {
        let order = row.order.map(fmt_f64).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_f64(row.dxi),
            fmt_f64(row.error),
            order,
            row.converged,
            row.iterations
        )?;
    }
    Ok(())
}

/// Reads a study table back.
pub fn read_study_csv<R: BufRead>(r: R) -> Result<Vec<StudyRow>> {
    let mut rows = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line.map_err(|e| StefanError::CsvParse(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("dxi") {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            return Err(StefanError::CsvParse(format!("study row {idx} has {} fields", parts.len())));
        }
        let order = if parts[2].trim().is_empty() {
            None
        } else {
            Some(parse_f64(parts[2], "study csv")?)
        };
        rows.push(StudyRow {
            dxi: parse_f64(parts[0], "study csv")?,
            error: parse_f64(parts[1], "study csv")?,
            order,
            converged: parts[3].trim() == "true",
            iterations: parts[4]
                .trim()
                .parse()
                .map_err(|_| StefanError::CsvParse(format!("bad iteration count '{}'", parts[4])))?,
        });
    }
    Ok(rows)
}

/// Flux-balance residual per node, with the integrated defects on a
/// leading comment line: `# d1=...,d2=...` then `t,residual` rows.
pub fn write_residual_csv<W: Write>(w: &mut W, disc: &Discretization, report: &DiscrepancyReport) -> std::io::Result<()> {
    writeln!(w, "# d1={},d2={}", fmt_f64(report.d1), fmt_f64(report.d2))?;
    writeln!(w, "t,residual")?;
    for n in 0..=disc.m() {
        writeln!(w, "{},{}", fmt_f64(disc.time(n)), fmt_f64(report.residual_curve[n]))?;
    }
    Ok(())
}

/// One refinement step: summary comment line, then `t,s,eta,s_hat` rows.
pub fn write_refine_csv<W: Write>(
    w: &mut W,
    disc: &Discretization,
    curve: &BoundaryCurve,
    outcome: &RefinementOutcome,
    epsilon: f64,
) -> std::io::Result<()> {
    writeln!(
        w,
        "# epsilon={},d1_before={},d2_before={},projected_d2={},projected_ratio={}",
        fmt_f64(epsilon),
        fmt_f64(outcome.before.d1),
        fmt_f64(outcome.before.d2),
        fmt_f64(outcome.projected_d2),
        fmt_f64(outcome.projected_ratio)
    )?;
    writeln!(w, "t,s,eta,s_hat")?;
    for n in 0..=disc.m() {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(disc.time(n)),
            fmt_f64(curve.get(n)),
            fmt_f64(outcome.eta[n]),
            fmt_f64(outcome.refined.get(n))
        )?;
    }
    Ok(())
}

/// Comparison of relaxation weights: `alpha,k,delta,clamped,sign_at_max_dev`.
pub fn write_operators_csv<W: Write>(w: &mut W, runs: &[(f64, IterationReport)]) -> std::io::Result<()> {
    writeln!(w, "alpha,k,delta,clamped,sign_at_max_dev")?;
    for (alpha, report) in runs {
        for k in 0..report.iterations() {
            let sign = report
                .sign_pattern
                .get(k)
                .map(|s| s.to_string())
                .unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt_f64(*alpha),
                k + 1,
                fmt_f64(report.deltas[k]),
                report.clamps_per_iteration[k],
                sign
            )?;
        }
    }
    Ok(())
}
