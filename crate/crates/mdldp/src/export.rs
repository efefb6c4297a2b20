//! Result rows and their CSV / JSON-lines serialization.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::{HarnessError, Result};

pub const COLUMNS: [&str; 11] =
    ["experiment", "protocol", "solution", "epsilon", "beta", "metric", "value", "stderr", "run", "seed", "flags"];

/// One measurement of one grid point in one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub protocol: String,
    pub solution: String,
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
    pub metric: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub run: usize,
    pub seed: u64,
    /// `key=value` pairs joined by `;`.
    pub flags: String,
}

/// Formats with 10 significant digits, trimming trailing zeros. Magnitudes
/// outside `[1e-5, 1e10)` use scientific notation.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..10).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (9 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn json_number(x: f64) -> Value {
    format_float(x).parse::<f64>().ok().and_then(serde_json::Number::from_f64).map_or(Value::Null, Value::Number)
}

pub fn write_csv<W: Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(COLUMNS)?;
    for r in rows {
        out.write_record([
            r.experiment.clone(),
            r.protocol.clone(),
            r.solution.clone(),
            opt(r.epsilon),
            opt(r.beta),
            r.metric.clone(),
            format_float(r.value),
            opt(r.stderr),
            r.run.to_string(),
            r.seed.to_string(),
            r.flags.clone(),
        ])?;
    }
    out.flush().map_err(|e| HarnessError::io("<csv output>", e))?;
    Ok(())
}

/// One JSON object per row, keys in column order. An empty row set writes
/// nothing.
pub fn write_jsonl<W: Write>(rows: &[ResultRow], mut writer: W) -> Result<()> {
    let io = |e| HarnessError::io("<jsonl output>", e);
    for r in rows {
        let mut m = Map::new();
        m.insert("experiment".into(), r.experiment.clone().into());
        m.insert("protocol".into(), r.protocol.clone().into());
        m.insert("solution".into(), r.solution.clone().into());
        m.insert("epsilon".into(), r.epsilon.map_or(Value::Null, json_number));
        m.insert("beta".into(), r.beta.map_or(Value::Null, json_number));
        m.insert("metric".into(), r.metric.clone().into());
        m.insert("value".into(), json_number(r.value));
        m.insert("stderr".into(), r.stderr.map_or(Value::Null, json_number));
        m.insert("run".into(), r.run.into());
        m.insert("seed".into(), r.seed.into());
        m.insert("flags".into(), r.flags.clone().into());
        serde_json::to_writer(&mut writer, &Value::Object(m)).map_err(|e| io(e.into()))?;
        writer.write_all(b"\n").map_err(io)?;
    }
    writer.flush().map_err(io)
}

/// Parses a file written by [`write_csv`].
pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut csv = csv::Reader::from_reader(reader);
    if csv.headers()?.iter().ne(COLUMNS) {
        return Err(HarnessError::Data { path: "<csv input>".into(), message: "unexpected header".into() });
    }
    let bad = |m: String| HarnessError::Data { path: "<csv input>".into(), message: m };
    let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("`{s}`: {e}")));
    let opt_num = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
    let mut rows = Vec::new();
    for record in csv.records() {
        let r = record?;
        rows.push(ResultRow {
            experiment: r[0].into(),
            protocol: r[1].into(),
            solution: r[2].into(),
            epsilon: opt_num(&r[3])?,
            beta: opt_num(&r[4])?,
            metric: r[5].into(),
            value: num(&r[6])?,
            stderr: opt_num(&r[7])?,
            run: r[8].parse().map_err(|e| bad(format!("run: {e}")))?,
            seed: r[9].parse().map_err(|e| bad(format!("seed: {e}")))?,
            flags: r[10].into(),
        });
    }
    Ok(rows)
}

pub fn render(rows: &[ResultRow], format: Format) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(rows, &mut buf)?,
        Format::Jsonl => write_jsonl(rows, &mut buf)?,
    }
    Ok(buf)
}

pub fn export_results(rows: &[ResultRow], format: Format, path: &Path) -> Result<()> {
    let bytes = render(rows, format)?;
    std::fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}
