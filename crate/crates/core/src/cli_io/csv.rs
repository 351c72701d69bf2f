//! CSV output. Floats are written as `{:.16e}`, 17 significant digits, which
//! round-trips every f64.

use crate::experiments::{Cell, Table};
use crate::spectral::TimeSeriesNorms;

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cell(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => format_float(*v),
        Cell::Text(s) => quote(s),
        Cell::Empty => String::new(),
    }
}

pub fn table_to_csv(table: &Table) -> String {
    let mut out = table.header.iter().map(|h| quote(h)).collect::<Vec<_>>().join(",");
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.iter().map(cell).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// One row per stored frame: `t` followed by the diagnostic columns.
pub fn norms_to_csv(norms: &TimeSeriesNorms) -> String {
    let mut out = String::from("t");
    for name in norms.names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for k in 0..norms.len() {
        let row: Vec<String> = norms.row(k).into_iter().map(format_float).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
