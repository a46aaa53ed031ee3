//! Rendering of rows as JSON, CSV or an aligned table.

use crate::error::{Error, Result};
use crate::suite::Row;
use serde::Serializer;
use std::fmt::Write as _;
use std::str::FromStr;

/// Finite values as numbers, the rest as `"inf"`, `"-inf"` or `"nan"`.
pub fn ser_f64<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(&fmt_f64(*v))
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Table,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            other => Err(Error::Parse {
                field: "format".into(),
                line: 1,
                column: 1,
                message: format!("expected json, csv or table, got `{other}`"),
            }),
        }
    }
}

pub const CSV_COLUMNS: [&str; 7] = ["statement_id", "input_digest", "value", "err_bound", "target", "tol", "pass"];

/// CSV with the fixed column contract. Header lines (`key: value`) become
/// leading `#` comments.
pub fn to_csv(rows: &[Row], header: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in header {
        let _ = writeln!(out, "# {k}: {v}");
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.statement_id.clone(),
            r.input_digest.clone(),
            fmt_f64(r.value),
            fmt_f64(r.err_bound),
            fmt_f64(r.target),
            fmt_f64(r.tol),
            r.pass.to_string(),
        ])
        .expect("in-memory write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8"));
    out
}

/// Aligned plain-text table followed by the notes of failing rows.
pub fn to_table(rows: &[Row], header: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in header {
        let _ = writeln!(out, "{k}: {v}");
    }
    let cells: Vec<[String; 6]> = rows
        .iter()
        .map(|r| {
            [
                if r.pass { "PASS" } else { "FAIL" }.to_string(),
                r.statement_id.clone(),
                fmt_f64(r.value),
                fmt_f64(r.target),
                format!("{:.0e}", r.tol),
                format!("{:.1e}", r.err_bound),
            ]
        })
        .collect();
    let titles = ["", "statement", "value", "target", "tol", "err"];
    let mut widths = titles.map(str::len);
    for c in &cells {
        for (w, s) in widths.iter_mut().zip(c) {
            *w = (*w).max(s.chars().count());
        }
    }
    let line = |out: &mut String, c: &[String]| {
        let parts: Vec<String> = c.iter().zip(widths).map(|(s, w)| format!("{s:<w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &titles.map(String::from));
    for c in &cells {
        line(&mut out, c);
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    let _ = writeln!(out, "{passed}/{} rows pass", rows.len());
    for r in rows.iter().filter(|r| !r.note.is_empty()) {
        let _ = writeln!(out, "note [{}]: {}", r.statement_id, r.note);
    }
    out
}

/// JSON object with the header fields and a `rows` array.
pub fn to_json(rows: &[Row], header: &[(&str, String)]) -> String {
    let mut obj = serde_json::Map::new();
    for (k, v) in header {
        obj.insert(k.to_string(), serde_json::Value::String(v.clone()));
    }
    obj.insert("rows".into(), serde_json::to_value(rows).expect("rows serialise"));
    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(obj)).expect("json");
    s.push('\n');
    s
}

pub fn render(rows: &[Row], header: &[(&str, String)], format: Format) -> String {
    match format {
        Format::Json => to_json(rows, header),
        Format::Csv => to_csv(rows, header),
        Format::Table => to_table(rows, header),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_contract() {
        let rows = vec![Row::close("a/b", "0123", f64::INFINITY, 0.0, 1.0, 1e-9)];
        let text = to_csv(&rows, &[("seed", "7".into())]);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# seed: 7"));
        assert_eq!(lines.next(), Some("statement_id,input_digest,value,err_bound,target,tol,pass"));
        assert_eq!(lines.next(), Some("a/b,0123,inf,0,1,0.000000001,false"));
    }

    #[test]
    fn json_handles_non_finite() {
        let rows = vec![Row::close("x", "d", f64::NAN, 0.0, 1.0, 0.0)];
        let v: serde_json::Value = serde_json::from_str(&to_json(&rows, &[])).unwrap();
        assert_eq!(v["rows"][0]["value"], "nan");
    }
}
