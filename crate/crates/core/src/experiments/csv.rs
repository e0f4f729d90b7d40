//! CSV writers. Floats are written with 17 significant digits in scientific
//! notation so that output is exact and byte-stable.

use std::fmt::Write as _;
use std::io::Write;

use crate::dynamics::TraceRecord;

/// 17 significant digits: enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn sigma_columns(out: &mut String, sectors: usize) {
    for i in 0..sectors {
        let _ = write!(out, ",sigma_{i}");
    }
}

fn push_floats(out: &mut String, values: &[f64]) {
    for &v in values {
        out.push(',');
        out.push_str(&fmt_float(v));
    }
}

/// `step,agent_id,income,growth,equilibrium_growth,excess_growth,sigma_0,...`
pub fn trace_csv(records: &[TraceRecord]) -> String {
    let sectors = records.first().map_or(0, |r| r.strategy.len());
    let mut out = String::from("step,agent_id,income,growth,equilibrium_growth,excess_growth");
    sigma_columns(&mut out, sectors);
    out.push('\n');
    for r in records {
        let _ = write!(out, "{},{}", r.step, r.agent_id);
        push_floats(&mut out, &[r.income, r.growth, r.equilibrium_growth, r.excess_growth]);
        push_floats(&mut out, &r.strategy);
        out.push('\n');
    }
    out
}

/// `step,agent_id,income,growth,equilibrium_growth,sigma_0,...`
pub fn population_csv(records: &[TraceRecord]) -> String {
    let sectors = records.first().map_or(0, |r| r.strategy.len());
    let mut out = String::from("step,agent_id,income,growth,equilibrium_growth");
    sigma_columns(&mut out, sectors);
    out.push('\n');
    for r in records {
        let _ = write!(out, "{},{}", r.step, r.agent_id);
        push_floats(&mut out, &[r.income, r.growth, r.equilibrium_growth]);
        push_floats(&mut out, &r.strategy);
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeRow {
    pub strategy: Vec<f64>,
    pub response: f64,
    pub equilibrium_growth: f64,
}

/// `sigma_0,...,sigma_{n-1},response,equilibrium_growth`
pub fn landscape_csv(rows: &[LandscapeRow]) -> String {
    let sectors = rows.first().map_or(0, |r| r.strategy.len());
    let mut out: String = (0..sectors)
        .map(|i| format!("sigma_{i}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push_str(",response,equilibrium_growth\n");
    for r in rows {
        let cells: Vec<String> = r.strategy.iter().map(|&v| fmt_float(v)).collect();
        out.push_str(&cells.join(","));
        push_floats(&mut out, &[r.response, r.equilibrium_growth]);
        out.push('\n');
    }
    out
}

/// A headed table of `step` plus named float columns.
pub fn series_csv(columns: &[&str], rows: &[(u64, Vec<f64>)]) -> String {
    let mut out = String::from("step");
    for c in columns {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (step, values) in rows {
        let _ = write!(out, "{step}");
        push_floats(&mut out, values);
        out.push('\n');
    }
    out
}

pub fn write_file(path: &std::path::Path, contents: &str) -> crate::Result<()> {
    let io = |e| crate::Error::io(path, e);
    let mut file = std::fs::File::create(path).map_err(io)?;
    file.write_all(contents.as_bytes()).map_err(io)?;
    Ok(())
}
