//! CSV emission with fixed significant digits.

use std::io::Write;

use crate::dynamics::EvolutionTrace;
use crate::error::Result;

use super::runners::{FluctuationRow, SweepResult};

const SIGNIFICANT: usize = 12;

/// `printf("%.12g")`: fixed notation for moderate exponents, scientific
/// otherwise, trailing zeros removed.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= SIGNIFICANT as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (SIGNIFICANT as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

/// Header `t,p_1,...,p_N,leakage[,mid_overlap]`.
pub fn write_trace_csv<W: Write>(trace: &EvolutionTrace, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    let n = trace.n_sites();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("p_{i}")));
    header.push("leakage".into());
    if trace.mid_overlap.is_some() {
        header.push("mid_overlap".into());
    }
    w.write_record(&header).map_err(csv_io)?;
    for (i, t) in trace.times.iter().enumerate() {
        let mut row = Vec::with_capacity(header.len());
        row.push(format_sig(*t));
        row.extend(trace.populations[i].iter().map(|p| format_sig(*p)));
        row.push(format_sig(trace.leakage[i]));
        if let Some(mid) = &trace.mid_overlap {
            row.push(format_sig(mid[i]));
        }
        w.write_record(&row).map_err(csv_io)?;
    }
    finish(w)
}

/// Header `G,N,lambda_inv,delta`.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["G", "N", "lambda_inv", "delta"])
        .map_err(csv_io)?;
    for r in &result.rows {
        w.write_record([
            format_sig(r.g),
            r.n_sites.to_string(),
            format_sig(r.lambda_inv),
            format_sig(r.delta),
        ])
        .map_err(csv_io)?;
    }
    finish(w)
}

/// Header `seed_offset,corner_element,delta`.
pub fn write_fluctuation_csv<W: Write>(rows: &[FluctuationRow], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["seed_offset", "corner_element", "delta"])
        .map_err(csv_io)?;
    for r in rows {
        w.write_record([
            r.seed_offset.to_string(),
            format_sig(r.corner_element),
            format_sig(r.delta),
        ])
        .map_err(csv_io)?;
    }
    finish(w)
}
