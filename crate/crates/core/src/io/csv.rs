//! Per-iteration CSV traces.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;
use crate::solver::{CycleResult, IterationRecord};

pub const CSV_HEADER: &str =
    "cycle,iter,sketched_resnorm,backward_error,tau_tilde,kappa_SB,kappa_SAB,t_current,y_norm,termination";

/// 17 significant digits; infinities as `inf`/`-inf`, NaN as `nan`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

fn write_row(out: &mut impl Write, r: &IterationRecord, termination: &str) -> std::io::Result<()> {
    writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{}",
        r.cycle,
        r.iter,
        format_float(r.sketched_residual_norm),
        format_float(r.backward_error),
        format_float(r.tau_tilde),
        format_float(r.kappa_sb),
        format_float(r.kappa_sab),
        r.t_current,
        format_float(r.y_norm),
        termination
    )
}

/// Writes the trace of `result`. The termination column is filled on the last row
/// of each cycle; the final row carries the termination of the whole run.
pub fn write_trace_to(out: &mut impl Write, result: &CycleResult) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let records = &result.records;
    for (k, r) in records.iter().enumerate() {
        let last_of_cycle = records.get(k + 1).is_none_or(|next| next.cycle != r.cycle);
        let term = if k + 1 == records.len() {
            result.termination.to_string()
        } else if last_of_cycle {
            result
                .cycle_terminations
                .get(r.cycle - 1)
                .map(ToString::to_string)
                .unwrap_or_default()
        } else {
            String::new()
        };
        write_row(out, r, &term)?;
    }
    Ok(())
}

pub fn write_trace(path: impl AsRef<Path>, result: &CycleResult) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_trace_to(&mut out, result)?;
    out.flush()?;
    Ok(())
}

/// Trace for a solve that failed before producing iterations: a single row whose
/// termination column holds `error: <message>`.
pub fn write_error_trace(path: impl AsRef<Path>, message: &str) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{CSV_HEADER}")?;
    let clean: String = message
        .chars()
        .map(|c| if c == ',' || c == '\n' { ';' } else { c })
        .collect();
    writeln!(out, "0,0,nan,nan,nan,nan,nan,0,nan,error: {clean}")?;
    out.flush()?;
    Ok(())
}
